from pathlib import Path
import json

import click
import numpy as np

from fractal.cog import Cog, experiment_options, lab_command
from fractal.frame import CylinderFunction
from fractal.reconstruct import SplitSystem, factorization_residual, fourier_reconstruct
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Reconstruct(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("reconstruct")
    @experiment_options
    @click.option("--complement", default=None, help="Chiffres de C en JSON, par exemple [0,1]")
    @click.option("--values", default=None, help="Valeurs de f sur les cylindres (JSON), f = 1 par défaut")
    @click.option("--points", type=float, multiple=True, help="Points t de reconstruction")
    @click.option("--cutoff", type=float, default=None, help="Coupure X de l'intégrale")
    @click.option("--step", type=float, default=None, help="Pas de quadrature")
    def run(self, **options) -> None:
        """f(t) = ∫ (f dμ_B)^(x) μ̂_C(x) e^{2πitx} dx par quadrature du point milieu"""
        config = self.configure("reconstruct", **options)
        ifs, params = self.ifs(config), config.params
        complement = params["complement"]
        if isinstance(complement, str):
            complement = json.loads(complement)
        split = SplitSystem.from_digits(ifs.R, ifs.digits, complement)

        values = params.get("values")
        if values is None:
            f = CylinderFunction.constant(ifs)
        else:
            f = CylinderFunction.from_values(ifs, json.loads(values) if isinstance(values, str) else values)

        reports = [fourier_reconstruct(split, f, t, params["cutoff"], params["step"], self.budget(config))
                   for t in params["points"]]
        for report in reports:
            logger.info(f"f({report.t:.6g}) ≈ {report.value.real:.6f}{report.value.imag:+.2e}i "
                        f"(résidu {report.richardson_residual:.2e})")
        probe = np.linspace(-50, 50, 257)
        self.emit(config, {"split": str(split), "reports": [report.to_dict() for report in reports],
                           "factorization_residual": factorization_residual(split, probe, self.budget(config))},
                  [report.to_dict() for report in reports])


def setup(lab) -> None:
    lab.add_cog(Reconstruct(lab))

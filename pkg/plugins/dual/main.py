from pathlib import Path

import click
import numpy as np

from fractal.cog import Cog, experiment_options, lab_command
from fractal.errors import DomainError, UsageError
from fractal.ifs import AffineIfs, dual_weights, find_complement, lattice_residual
from fractal.io import measure_to_dict, write_json
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Dual(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("dual")
    @experiment_options
    @click.option("--c-max", "c_max", type=int, default=None, help="Plus grand chiffre complémentaire (R-1 par défaut)")
    @click.option("--choice", type=int, default=None, help="Rang du complémentaire retenu")
    def complement(self, **options) -> None:
        """Cherche C avec B ⊕ C complet et construit ν = Σ |μ̂_C(γ)|² δ_γ sur ℤ ∩ [-Λ, Λ]"""
        config = self.configure("dual", **options)
        ifs, params = self.ifs(config), config.params
        c_max = params.get("c_max", ifs.R - 1)
        complements = find_complement(ifs, c_max)
        if not complements:
            raise DomainError(f"aucun complémentaire de {list(ifs.digits)} dans [0, {c_max}] modulo {ifs.R}")
        if not 0 <= params["choice"] < len(complements):
            raise UsageError(f"choix {params['choice']} hors de [0, {len(complements)})")

        complement_ifs = AffineIfs(ifs.R, complements[params["choice"]])
        lam = int(config.lambda_truncation)
        nu = dual_weights(complement_ifs, np.arange(-lam, lam + 1), self.budget(config))
        write_json(Path(config.out) / "dual_measure.json", measure_to_dict(nu))
        logger.info(f"Complémentaire {list(complement_ifs.digits)} : {len(nu)} atomes sur [-{lam}, {lam}]")

        self.emit(config, {
            "complements": [list(c) for c in complements],
            "complement": list(complement_ifs.digits),
            "atoms": len(nu),
            "mass": nu.mass,
            "surviving_fraction": len(nu) / (2 * lam + 1),
            "lattice_residual": lattice_residual(AffineIfs(ifs.R, tuple(sorted(
                b + c for b in ifs.digits for c in complement_ifs.digits)))),
        })


def setup(lab) -> None:
    lab.add_cog(Dual(lab))

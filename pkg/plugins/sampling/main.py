from pathlib import Path

import click

from fractal.beurling import lambda_set, lower_density
from fractal.cog import Cog, experiment_options, lab_command
from fractal.measure import make_atomic
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Sampling(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("sampling")
    @experiment_options
    @click.option("--r", "r", type=float, default=None, help="Pas r des cellules")
    @click.option("--delta", type=float, default=None, help="Masse minimale δ d'une cellule retenue")
    @click.option("--hull", "hull", nargs=2, type=float, default=None, help="Enveloppe de la densité inférieure")
    def run(self, **options) -> None:
        """Λ_ν(r, δ) = {kr : ν([kr, (k+1)r)) >= δ} et sa densité inférieure"""
        config = self.configure("sampling", **options)
        params = config.params
        points = lambda_set(self.measure(config), params["r"], params["delta"])
        result = {"points": points, "count": len(points)}
        if points and params.get("hull"):
            hull = tuple(params["hull"])
            radii = self.radii(config)
            result["lower_density"] = lower_density(make_atomic(points, [1.0] * len(points)),
                                                    radii[radii <= hull[1] - hull[0]], hull)
        logger.info(f"Ensemble d'échantillonnage de {len(points)} points")
        self.emit(config, result, [{"point": x} for x in points])


def setup(lab) -> None:
    lab.add_cog(Sampling(lab))

from pathlib import Path

import click

from fractal.beurling import dimension, lower_density, scan_rows, upper_density
from fractal.cog import Cog, experiment_options, lab_command
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Beurling(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("beurling")
    @experiment_options
    @click.option("--alphas", type=float, multiple=True, help="Exposants α des densités supérieures")
    @click.option("--shape", type=click.Choice(["left", "centered", "closed"]), default=None, help="Forme des fenêtres")
    @click.option("--hull", "hull", nargs=2, type=float, default=None, help="Enveloppe de la densité inférieure")
    def scan(self, **options) -> None:
        """Densités de Beurling sur une grille de rayons et estimation de la dimension"""
        config = self.configure("beurling", **options)
        nu, radii, params = self.measure(config), self.radii(config), config.params
        shape = params["shape"]

        rows, densities = [], {}
        for alpha in params["alphas"]:
            scan = upper_density(nu, alpha, radii, shape)
            densities[str(alpha)] = scan.estimate
            rows.extend({"alpha": alpha, **row} for row in scan_rows(scan))
        estimate = dimension(nu, radii, shape)

        result = {"upper_density": densities, "dimension": estimate.to_dict(), "radii": radii.tolist()}
        if params.get("hull"):
            hull = tuple(params["hull"])
            result["lower_density"] = lower_density(nu, radii[radii <= hull[1] - hull[0]], hull, shape)
            logger.info(f"Densité inférieure sur {hull} : {result['lower_density']:.4f}")
        self.emit(config, result, rows)


def setup(lab) -> None:
    lab.add_cog(Beurling(lab))

from pathlib import Path

import click

from fractal.cog import Cog, experiment_options, lab_command
from fractal.measure import discretize, support
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Discretize(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("discretize")
    @experiment_options
    @click.option("--r", "r", type=float, default=None, help="Pas de la grille r")
    @click.option("--rule", type=click.Choice(["left", "center", "custom"]), default=None, help="Position des atomes")
    @click.option("--offset", type=float, default=None, help="Décalage dans [0, r) pour la règle custom")
    def run(self, **options) -> None:
        """ν' = Σ ν(r(k+Q)) δ_{x_k} : un atome par cellule non vide"""
        config = self.configure("discretize", **options)
        nu, params = self.measure(config), config.params
        cells = discretize(nu, params["r"], params["rule"], params.get("offset"))
        logger.info(f"{len(cells)} cellules non vides, masse {cells.mass:.6g} pour {nu.mass:.6g}")
        self.emit(config, {"measure": cells, "mass_in": nu.mass, "mass_out": cells.mass, "support": support(cells)},
                  [{"x": x, "mass": m} for x, m in cells.atoms])


def setup(lab) -> None:
    lab.add_cog(Discretize(lab))

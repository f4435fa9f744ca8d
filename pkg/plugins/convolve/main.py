from pathlib import Path

import click

from fractal.cog import Cog, experiment_options, lab_command
from fractal.errors import UsageError
from fractal.measure import convolve, mollify
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Convolve(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("convolve")
    @experiment_options
    @click.option("--mollify", "width", type=float, default=None, help="Convolue avec l'uniforme sur [0, w)")
    def run(self, **options) -> None:
        """ν * ρ pour deux mesures (ou ν * uniforme[0, w) avec --mollify)"""
        config = self.configure("convolve", **options)
        measures = self.measures(config)
        if config.params.get("width") is not None:
            result = mollify(measures[0], config.params["width"])
        elif len(measures) == 2:
            result = convolve(*measures)
        else:
            raise UsageError(f"{len(measures)} mesures fournies, il en faut deux (ou --mollify)")
        logger.info(f"Convolution de masse {result.mass:.6g}")
        self.emit(config, {"measure": result, "mass": result.mass})


def setup(lab) -> None:
    lab.add_cog(Convolve(lab))

from pathlib import Path

from fractal.beurling import dimension
from fractal.cog import Cog, experiment_options, lab_command
from fractal.ifs import similarity_dimension
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class DimensionBound(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("dimension-bound")
    @experiment_options
    def bound(self, **options) -> None:
        """Plafond log N / log R de la dimension d'une mesure de Bessel, comparé à l'estimation"""
        config = self.configure("dimension-bound", **options)
        ifs = self.ifs(config)
        ceiling = similarity_dimension(ifs)
        result = {"ifs": ifs.descriptor, "ceiling": ceiling}
        if config.measures:
            estimate = dimension(self.measure(config), self.radii(config))
            result.update(dimension=estimate.to_dict(), within=estimate.slope <= ceiling + 0.1)
        logger.info(f"Plafond de dimension pour {ifs} : {ceiling:.4f}")
        self.emit(config, result)


def setup(lab) -> None:
    lab.add_cog(DimensionBound(lab))

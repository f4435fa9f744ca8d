from pathlib import Path

from fractal.cog import Cog, experiment_options, lab_command
from fractal.ifs import find_complement, hull, similarity_dimension
from fractal.io import ifs_from_dict
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Catalog(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("catalog")
    @experiment_options
    def list_systems(self, **options) -> None:
        """Liste les systèmes intégrés et leurs ensembles complémentaires"""
        config = self.configure("catalog", **options)
        systems = []
        for name, descriptor in self.load_json("catalog")["systems"].items():
            ifs = ifs_from_dict(descriptor)
            systems.append({
                "name": name,
                "label": descriptor.get("label", name),
                "R": ifs.R,
                "B": list(ifs.digits),
                "hull": list(hull(ifs)),
                "similarity_dimension": similarity_dimension(ifs),
                "complements": [list(c) for c in find_complement(ifs, ifs.R - 1)],
            })
        logger.info(f"{len(systems)} systèmes au catalogue")
        self.emit(config, {"systems": systems})


def setup(lab) -> None:
    lab.add_cog(Catalog(lab))

from pathlib import Path

import click
import numpy as np

from fractal.cog import Cog, experiment_options, lab_command
from fractal.errors import UsageError
from fractal.ifs import ft_cylinder, ft_invariant
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class FourierTransform(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("ft")
    @experiment_options
    @click.option("--start", type=float, default=None, help="Première fréquence")
    @click.option("--stop", type=float, default=None, help="Dernière fréquence (incluse)")
    @click.option("--step", type=float, default=None, help="Pas de la grille")
    @click.option("--word", default=None, help="Mot de cylindre, chiffres séparés par des virgules")
    def sweep(self, **options) -> None:
        """Balayage en fréquence de μ̂_B (ou de la transformée d'un cylindre), table CSV"""
        config = self.configure("ft", **options)
        ifs, params = self.ifs(config), config.params
        if params["step"] <= 0:
            raise UsageError(f"pas {params['step']} non positif")
        t = np.arange(params["start"], params["stop"] + params["step"] / 2, params["step"])

        if params.get("word"):
            word = [int(b) for b in str(params["word"]).split(",")]
            values = np.atleast_1d(ft_cylinder(ifs, word, t, self.budget(config)))
        else:
            values = np.atleast_1d(ft_invariant(ifs, t, self.budget(config)))
        magnitudes = np.abs(values)
        zeros = t[magnitudes < params["zero_threshold"]]
        logger.info(f"{len(t)} fréquences, {len(zeros)} zéros numériques")

        rows = [{"t": float(x), "re": float(v.real), "im": float(v.imag), "abs": float(a)}
                for x, v, a in zip(t, values, magnitudes)]
        self.emit(config, {"ifs": ifs.descriptor, "count": len(t), "max_abs": float(magnitudes.max()),
                           "zeros": zeros.tolist()}, rows)


def setup(lab) -> None:
    lab.add_cog(FourierTransform(lab))

from pathlib import Path

import click

from fractal.cog import Cog, experiment_options, lab_command
from fractal.frame import lower_bound_decay_certificate
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


class Counterexample(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("counterexample")
    @experiment_options
    @click.option("--T", "modulations", type=float, multiple=True, help="Fréquences de modulation T")
    def probe(self, **options) -> None:
        """‖g_T dμ^‖² sous ν pour μ = χ_[0,1]dx + δ₂ : la borne inférieure s'effondre quand T grandit"""
        config = self.configure("counterexample", **options)
        certificate = lower_bound_decay_certificate(self.measure(config), config.params["modulations"])
        rows = [{"T": T, "probe": value} for T, value in certificate.rows]
        self.emit(config, {"rows": rows, "decreasing": certificate.decreasing, "ratio": certificate.ratio}, rows)


def setup(lab) -> None:
    lab.add_cog(Counterexample(lab))

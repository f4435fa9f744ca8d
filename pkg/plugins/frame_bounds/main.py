from pathlib import Path

import click

from fractal.cog import Cog, experiment_options, lab_command
from fractal.frame import frame_bounds, lambda_sweep
from fractal.io import measure_from_dict
from logs.logger_config import setup_logger

parent_folder = Path(__file__).resolve().parent
logger = setup_logger()


def truncated(descriptor: dict, lam: float) -> dict:
    """Descripteur de la mesure candidate tronquée à [-Λ, Λ]"""
    descriptor = dict(descriptor)
    match descriptor["type"]:
        case "dual":
            descriptor["lambda"] = int(lam)
        case "counting":
            descriptor["lo"], descriptor["hi"] = -int(lam), int(lam)
    return descriptor


class FrameBounds(Cog):
    def __init__(self, lab) -> None:
        super().__init__(lab, parent_folder)

    @lab_command("frame-bounds")
    @experiment_options
    @click.option("--levels", type=int, multiple=True, help="Niveaux balayés (remplace --level)")
    @click.option("--lambdas", type=float, multiple=True, help="Troncatures balayées (remplace --lambda)")
    @click.option("--sweep", is_flag=True, default=None, help="Double Λ jusqu'à stabilisation de A_n")
    def bounds(self, **options) -> None:
        """Bornes de frame A_n, B_n sur les fonctions cylindriques, balayage (n, Λ)"""
        config = self.configure("frame-bounds", **options)
        ifs, params = self.ifs(config), config.params
        descriptor = config.measures[0]
        catalog = self.catalog()
        levels = params.get("levels") or [config.level]
        lambdas = params.get("lambdas") or [config.lambda_truncation]

        reports, stars = [], {}
        for n in levels:
            if params.get("sweep"):
                sweep = lambda_sweep(ifs, n, lambda lam: measure_from_dict(truncated(descriptor, lam), catalog),
                                     params["lambda_start"], params["delta_tol"], params["lambda_max"],
                                     self.budget(config))
                reports.extend(sweep.reports)
                stars[n] = {"lambda_star": sweep.lambda_star, "converged": sweep.converged}
                continue
            for lam in lambdas:
                nu = measure_from_dict(truncated(descriptor, lam), catalog)
                report = frame_bounds(ifs, n, nu, self.budget(config), lambda_truncation=lam,
                                      measure_ref=descriptor["type"])
                logger.info(f"n={n} Λ={lam:g} : A={report.lower:.6f} B={report.upper:.6f}")
                reports.append(report)

        result = {"ifs": ifs.descriptor, "reports": [report.to_dict() for report in reports]}
        if stars:
            result["lambda_star"] = stars
        self.emit(config, result, [report.row() for report in reports])


def setup(lab) -> None:
    lab.add_cog(FrameBounds(lab))

"""Socle commun des extensions du laboratoire : une extension est une classe
`Cog` dont les méthodes marquées par `lab_command` deviennent des
sous-commandes click.
"""
from pathlib import Path
import functools
import inspect
import json

import click
import numpy as np

from fractal.beurling import default_radii, geometric_radii
from fractal.config import PARENT_FOLDER, ExperimentConfig
from fractal.errors import UsageError
from fractal.ifs import AffineIfs, TruncationBudget
from fractal.io import (envelope, ifs_from_dict, load_descriptor, measure_from_dict, parse_ifs, parse_radii,
                        to_jsonable, write_csv, write_json)
from fractal.measure import Measure
from logs.logger_config import setup_logger


logger = setup_logger()


CATALOG_FILE = PARENT_FOLDER / "plugins" / "catalog" / "catalog.json"


def lab_command(name: str, **attrs):
    """Marque une méthode de Cog comme sous-commande (équivalent d'un hybrid_command)"""
    def decorator(method):
        method.__lab_command__ = (name, attrs)
        return method
    return decorator


def experiment_options(method):
    """Options partagées par toutes les expériences, superposées à --config"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                     help="Fichier ExperimentConfig JSON"),
        click.option("--ifs", "ifs_text", default=None, help="Nom du catalogue, JSON en ligne ou fichier"),
        click.option("--measure", "measure_texts", multiple=True, help="Descripteur de mesure (JSON ou fichier)"),
        click.option("--level", type=int, default=None, help="Niveau n des cylindres"),
        click.option("--lambda", "lambda_truncation", type=float, default=None, help="Troncature Λ"),
        click.option("--tol", type=float, default=None, help="Tolérance de troncature de μ̂"),
        click.option("--radii", "radii_text", default=None, help="Grille géométrique lo:hi:count"),
        click.option("--seed", type=int, default=None, help="Graine du générateur PCG64"),
        click.option("--out", type=click.Path(file_okay=False), default=None, help="Dossier de sortie"),
    ]
    return functools.reduce(lambda f, option: option(f), reversed(options), method)


class Cog:
    """Extension chargée par `FrameLab.load_all_extensions`"""

    def __init__(self, lab: click.Group, folder: Path) -> None:
        self.lab = lab
        self.folder = folder
        self.defaults = self.load_json("defaults") if (folder / "defaults.json").exists() else {}

    def load_json(self, file: str) -> dict:
        """Récupère un fichier json de l'extension

        Args:
            file (str): Nom du fichier sans extension

        Returns:
            dict: Données enregistrées
        """
        with open(self.folder / f"{file}.json", 'r') as f:
            return json.load(f)

    def get_commands(self) -> list[click.Command]:
        commands = []
        for _, method in inspect.getmembers(self, predicate=inspect.ismethod):
            marker = getattr(method, "__lab_command__", None)
            if marker is None:
                continue
            name, attrs = marker
            params = list(reversed(getattr(method.__func__, "__click_params__", [])))
            commands.append(click.Command(name=name, callback=method, params=params,
                                          help=inspect.getdoc(method), **attrs))
        return commands

    # |----------Configuration----------|
    @staticmethod
    def catalog() -> dict:
        with open(CATALOG_FILE, 'r') as f:
            return json.load(f)["systems"]

    def configure(self, command: str, config_path: str | None = None, ifs_text: str | None = None,
                  measure_texts: tuple[str, ...] = (), level: int | None = None,
                  lambda_truncation: float | None = None, tol: float | None = None,
                  radii_text: str | None = None, seed: int | None = None, out: str | None = None,
                  **params) -> ExperimentConfig:
        """Fusionne defaults.json, le fichier --config et les options explicites

        Args:
            command (str): Nom de la sous-commande
            config_path (str | None): Fichier ExperimentConfig
            params: Options propres à la sous-commande

        Raises:
            UsageError: Descripteur ou grille illisible

        Returns:
            ExperimentConfig: Configuration complète, recopiée dans chaque sortie
        """
        base = ExperimentConfig.from_json(config_path) if config_path else ExperimentConfig(command)
        defaults = {key: value for key, value in self.defaults.items()
                    if key in ExperimentConfig.__dataclass_fields__ and getattr(base, key) in (None, [], {})}
        radii = None
        if radii_text is not None:
            grid = parse_radii(radii_text)
            radii = (float(grid[0]), float(grid[-1]), len(grid))
        extra = dict(self.defaults.get("params", {}))
        extra.update(base.params)
        extra.update({key: value for key, value in params.items() if value not in (None, ())})
        config = base.merged(**defaults).merged(
            command=command, ifs=self._ifs_descriptor(ifs_text), level=level,
            lambda_truncation=lambda_truncation, tol=tol, radii=radii, seed=seed, out=out,
            measures=[load_descriptor(text) for text in measure_texts] or None, params=extra,
        )
        logger.debug(f"Configuration {command} : {config.to_dict()}")
        return config

    def _ifs_descriptor(self, text: str | None) -> dict | None:
        if text is None:
            return None
        return parse_ifs(text, self.catalog()).descriptor

    def ifs(self, config: ExperimentConfig) -> AffineIfs:
        if config.ifs is None:
            raise UsageError(f"la commande {config.command} demande --ifs")
        return ifs_from_dict(config.ifs)

    def measures(self, config: ExperimentConfig) -> list[Measure]:
        return [measure_from_dict(descriptor, self.catalog()) for descriptor in config.measures]

    def measure(self, config: ExperimentConfig) -> Measure:
        measures = self.measures(config)
        if not measures:
            raise UsageError(f"la commande {config.command} demande --measure")
        return measures[0]

    @staticmethod
    def budget(config: ExperimentConfig) -> TruncationBudget:
        return TruncationBudget(config.tol)

    @staticmethod
    def radii(config: ExperimentConfig) -> np.ndarray:
        if config.radii is None:
            return default_radii()
        lo, hi, count = config.radii
        return geometric_radii(lo, hi, int(count))

    # |----------Sorties----------|
    def emit(self, config: ExperimentConfig, result, csv_rows: list[dict] | None = None) -> dict:
        """Écrit <out>/<commande>.json (et .csv), affiche le résultat sur stdout"""
        out = Path(config.out)
        name = config.command.replace("-", "_")
        write_json(out / f"{name}.json", envelope(config.to_dict(), result))
        if csv_rows is not None:
            write_csv(out / f"{name}.csv", csv_rows)
        payload = to_jsonable(result)
        click.echo(json.dumps(payload, ensure_ascii=False))
        return payload

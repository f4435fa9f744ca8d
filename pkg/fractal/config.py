# |----------Module d'environnement-----------|
from os import getenv
from os.path import join
from pathlib import Path
from dataclasses import dataclass, field, asdict
import json

from dotenv import load_dotenv
import numpy as np


PARENT_FOLDER = Path(__file__).resolve().parent.parent
load_dotenv(dotenv_path=join(PARENT_FOLDER, ".env"))


# |----------Constantes numériques-----------|
FT_TOL = 1e-12
EIGEN_REL_TOL = 1e-10
PSD_SLACK = 1e-10
HERMITIAN_TOL = 1e-12
GRAM_MAX_DIMENSION = 4096
WEIGHT_FLOOR = 1e-20
MERGE_TOL = 1e-12
DIGIT_DEPTH = 40
SINGULARITY_TOL = 1e-8
GRID_MAX_DENOMINATOR = 10 ** 6
GRID_MAX_BINS = 2 ** 22

DEFAULT_SEED = int(getenv("FRACTAL_SEED", "20240601"))
DEFAULT_OUT_DIR = Path(getenv("FRACTAL_OUT_DIR", "out"))
VERSION = "0.1.0"


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Générateur unique d'une exécution, algorithme PCG64 figé

    Args:
        seed (int | None): Graine 64 bits, `DEFAULT_SEED` si absente

    Returns:
        np.random.Generator: Générateur déterministe
    """
    return np.random.Generator(np.random.PCG64(DEFAULT_SEED if seed is None else seed))


@dataclass
class ExperimentConfig:
    command: str
    ifs: dict | None = None
    measures: list[dict] = field(default_factory=list)
    level: int | None = None
    lambda_truncation: float | None = None
    tol: float = FT_TOL
    radii: tuple[float, float, int] | None = None
    seed: int = DEFAULT_SEED
    out: str = str(DEFAULT_OUT_DIR)
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        data = asdict(self)
        if self.radii is not None:
            data["radii"] = list(self.radii)
        return data

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        """Charge une configuration enregistrée

        Args:
            path (str | Path): Fichier json de configuration

        Returns:
            ExperimentConfig: Configuration chargée
        """
        with open(path, 'r') as f:
            data = json.load(f)
        if data.get("radii") is not None:
            data["radii"] = tuple(data["radii"])
        return cls(**data)

    def merged(self, **overrides) -> "ExperimentConfig":
        """Copie où les options passées explicitement remplacent le fichier"""
        data = self.to_dict()
        data.update({key: value for key, value in overrides.items() if value is not None})
        if data.get("radii") is not None:
            data["radii"] = tuple(data["radii"])
        return ExperimentConfig(**data)

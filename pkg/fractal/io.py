"""Lecture des descripteurs (IFS, mesures, grilles) et écriture atomique des
artefacts JSON et CSV.
"""
from dataclasses import is_dataclass
from datetime import datetime, timezone
from pathlib import Path
import json
import os
import tempfile

import numpy as np
import pandas as pd

from fractal.beurling import geometric_radii
from fractal.config import VERSION
from fractal.errors import UsageError
from fractal.ifs import AffineIfs, dual_weights
from fractal.measure import (AtomicMeasure, DensityMeasure, FiniteSum, Measure, counterexample_target, counting,
                             dirac, discretize, lebesgue, make_atomic, make_density, mollify, uniform)
from logs.logger_config import setup_logger


logger = setup_logger()


# |----------Descripteurs----------|
def load_descriptor(text: str) -> dict:
    """JSON en ligne ou chemin vers un fichier JSON"""
    text = text.strip()
    try:
        if text.startswith(("{", "[")):
            return json.loads(text)
        with open(text, 'r') as f:
            return json.load(f)
    except (OSError, json.JSONDecodeError) as error:
        raise UsageError(f"descripteur illisible {text!r} : {error}") from error


def ifs_from_dict(data: dict) -> AffineIfs:
    try:
        return AffineIfs(int(data["R"]), tuple(data["B"]))
    except (KeyError, TypeError) as error:
        raise UsageError(f"descripteur d'IFS invalide {data} : attendu {{'R': ..., 'B': [...]}}") from error


def parse_ifs(text: str, catalog: dict | None = None) -> AffineIfs:
    """IFS depuis un nom du catalogue, du JSON en ligne ou un fichier

    Args:
        text (str): 'mu4', '{"R":4,"B":[0,2]}' ou chemin
        catalog (dict | None): Systèmes nommés

    Raises:
        UsageError: Descripteur illisible ou incomplet

    Returns:
        AffineIfs: Système décrit
    """
    if catalog and text in catalog:
        return ifs_from_dict(catalog[text])
    return ifs_from_dict(load_descriptor(text))


def parse_radii(text: str) -> np.ndarray:
    """Grille géométrique 'lo:hi:count'"""
    try:
        lo, hi, count = text.split(":")
        return geometric_radii(float(lo), float(hi), int(count))
    except ValueError as error:
        raise UsageError(f"grille de rayons {text!r} : attendu lo:hi:count") from error


def measure_to_dict(nu: Measure) -> dict:
    """Forme sérialisée : atomes en [[point, poids], ...], densités en {start, bin_width, masses}"""
    match nu:
        case AtomicMeasure():
            return {"type": "atomic", "atoms": [[point, weight] for point, weight in nu.atoms]}
        case DensityMeasure():
            return {"type": "density", "start": nu.support_start, "bin_width": nu.bin_width,
                    "masses": nu.bin_masses.tolist()}
        case FiniteSum():
            return {"type": "sum", "components": [measure_to_dict(part) for part in nu.components]}


def measure_from_dict(data: dict, catalog: dict | None = None) -> Measure:
    """Mesure depuis sa forme sérialisée ou un descripteur de construction

    Formes reconnues : atomic, density, sum, dirac, counting, lebesgue,
    uniform, dual (poids |μ̂_C|² sur ℤ ∩ [-Λ, Λ]), mollify, discretize,
    counterexample_target.

    Raises:
        UsageError: Type inconnu ou champ manquant
    """
    try:
        match data["type"]:
            case "atomic":
                atoms = data["atoms"]
                return make_atomic([point for point, _ in atoms], [weight for _, weight in atoms])
            case "density":
                return make_density(data["start"], data["bin_width"], data["masses"])
            case "sum":
                return FiniteSum(tuple(measure_from_dict(part, catalog) for part in data["components"]))
            case "dirac":
                return dirac(data["x"], data.get("weight", 1.0))
            case "counting":
                return counting(data["lo"], data["hi"], data.get("weight", 1.0))
            case "lebesgue":
                return lebesgue(data["a"], data["b"], data.get("bins", 1))
            case "uniform":
                return uniform(data.get("start", 0.0), data["width"], data.get("bins", 1))
            case "dual":
                complement = parse_ifs(data["complement"], catalog) if isinstance(data["complement"], str) \
                    else ifs_from_dict(data["complement"])
                lam = int(data["lambda"])
                return dual_weights(complement, np.arange(-lam, lam + 1))
            case "mollify":
                return mollify(measure_from_dict(data["measure"], catalog), data["width"])
            case "discretize":
                return discretize(measure_from_dict(data["measure"], catalog), data["r"],
                                  data.get("point_rule", "left"), data.get("offset"))
            case "counterexample_target":
                return counterexample_target()
            case other:
                raise UsageError(f"type de mesure inconnu : {other}")
    except KeyError as error:
        raise UsageError(f"champ {error} manquant dans le descripteur de mesure") from error


def load_measure(text: str, catalog: dict | None = None) -> Measure:
    return measure_from_dict(load_descriptor(text), catalog)


# |----------Écriture----------|
def to_jsonable(obj):
    """Convertit récursivement tableaux, scalaires numpy, complexes et rapports"""
    match obj:
        case dict():
            return {str(key): to_jsonable(value) for key, value in obj.items()}
        case list() | tuple():
            return [to_jsonable(value) for value in obj]
        case np.ndarray():
            return to_jsonable(obj.tolist())
        case complex() | np.complexfloating():
            return {"re": float(obj.real), "im": float(obj.imag)}
        case np.integer() | np.bool_():
            return obj.item()
        case np.floating():
            return float(obj)
        case Path():
            return str(obj)
        case AtomicMeasure() | DensityMeasure() | FiniteSum():
            return measure_to_dict(obj)
        case _ if is_dataclass(obj) and hasattr(obj, "to_dict"):
            return to_jsonable(obj.to_dict())
        case _:
            return obj


def _atomic_write(path: Path, write) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'w', encoding="utf-8", newline="") as f:
            write(f)
        os.replace(temp, path)
    except BaseException:
        if os.path.exists(temp):
            os.remove(temp)
        raise
    logger.info(f"Fichier {path} écrit")
    return path


def envelope(config: dict, result) -> dict:
    return {"config": to_jsonable(config), "result": to_jsonable(result),
            "metadata": {"timestamp": datetime.now(timezone.utc).isoformat(), "version": VERSION}}


def write_json(path: str | Path, payload: dict) -> Path:
    return _atomic_write(path, lambda f: json.dump(to_jsonable(payload), f, indent=2, ensure_ascii=False))


def write_csv(path: str | Path, rows: list[dict] | pd.DataFrame) -> Path:
    """Table CSV, séparateur décimal '.', 17 chiffres significatifs"""
    frame = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(rows)
    return _atomic_write(path, lambda f: frame.to_csv(f, index=False, float_format="%.17g"))

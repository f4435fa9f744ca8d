"""Densités de Beurling et dimension de Beurling de mesures tronquées.

Les limites sup/inf sont remplacées par des statistiques sur une grille
géométrique de rayons : la grille accompagne toujours le résultat.
"""
from dataclasses import dataclass
from typing import Literal
import itertools
import math

import numpy as np

from fractal.errors import UsageError
from fractal.measure import AtomicMeasure, DensityMeasure, Measure, components, discretize, interval_mass, support
from logs.logger_config import setup_logger


logger = setup_logger()


WindowShape = Literal["left", "centered", "closed"]

MIN_SCAN_RADII = 4
MIN_DIMENSION_RADII = 16


# |----------Types----------|
@dataclass(frozen=True, eq=False)
class DensityScan:
    alpha: float
    window_radii: np.ndarray
    sup_masses: np.ndarray
    ratios: np.ndarray

    @property
    def estimate(self) -> float:
        """Maximum des rapports sur la dernière décade de rayons"""
        top = self.window_radii >= self.window_radii[-1] / 10
        return float(np.max(self.ratios[top]))


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    alpha_lo: float
    alpha_hi: float
    fit_range: tuple[float, float]
    residual: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"slope": self.slope, "alpha_lo": self.alpha_lo, "alpha_hi": self.alpha_hi,
                "fit_range": list(self.fit_range), "residual": self.residual, "degenerate": self.degenerate}


# |----------Annexes----------|
def _check_radii(window_radii, minimum: int) -> np.ndarray:
    radii = np.asarray(window_radii, dtype=float).ravel()
    if len(radii) < minimum:
        raise UsageError(f"{len(radii)} rayons fournis, il en faut au moins {minimum}")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise UsageError("les rayons doivent être positifs et strictement croissants")
    return radii


def _breakpoints(nu: Measure) -> np.ndarray:
    """Atomes et bords de cases : la masse d'une fenêtre est affine entre eux"""
    points = []
    for part in components(nu):
        match part:
            case AtomicMeasure():
                points.append(part.points)
            case DensityMeasure():
                points.append(part.edges())
    return np.unique(np.concatenate(points)) if points else np.array([])


def _point_mass(nu: Measure, x: np.ndarray) -> np.ndarray:
    total = np.zeros(x.shape)
    for part in components(nu):
        if isinstance(part, AtomicMeasure):
            cumulative = part.cumulative()
            total += cumulative[np.searchsorted(part.points, x, side="right")] \
                - cumulative[np.searchsorted(part.points, x, side="left")]
    return total


def _window_extremes(nu: Measure, starts: np.ndarray, R: float, shape: WindowShape) -> tuple[float, float]:
    """(sup, inf) des masses de fenêtres de longueur R, limites latérales comprises"""
    ends = starts + R
    left = np.atleast_1d(interval_mass(nu, starts, ends, "left"))
    right = np.atleast_1d(interval_mass(nu, starts, ends, "right"))
    match shape:
        case "left" | "centered":
            return float(max(left.max(), right.max())), float(min(left.min(), right.min()))
        case "closed":
            at_end = _point_mass(nu, ends)
            return float((left + at_end).max()), float((right - at_end).min())
        case _:
            raise UsageError(f"forme de fenêtre inconnue : {shape}")


def _candidates(nu: Measure, R: float, shape: WindowShape) -> np.ndarray:
    # ]x-R/2, x+R/2] est la fenêtre ]y, y+R] avec y = x-R/2 : mêmes départs
    breakpoints = _breakpoints(nu)
    return np.unique(np.concatenate((breakpoints, breakpoints - R)))


# |----------Densités----------|
def sup_window_mass(nu: Measure, R: float, shape: WindowShape = "left") -> float:
    """sup_x ν(x + RQ), exacte

    La masse d'une fenêtre est affine par morceaux en x, cassée quand un bord
    de la fenêtre passe sur un atome ou un bord de case : le sup est atteint
    (ou approché par un côté) en ces positions.

    Args:
        nu (Measure): Mesure à support borné
        R (float): Longueur de fenêtre
        shape (WindowShape): [x, x+R), ]x-R/2, x+R/2] ou [x, x+R]

    Raises:
        UsageError: R non positif ou forme inconnue

    Returns:
        float: Masse maximale d'une fenêtre
    """
    if R <= 0:
        raise UsageError(f"rayon {R} non positif")
    starts = _candidates(nu, R, shape)
    if len(starts) == 0:
        return 0.0
    return _window_extremes(nu, starts, R, shape)[0]


def upper_density(nu: Measure, alpha: float, window_radii, shape: WindowShape = "left") -> DensityScan:
    """Rapports sup_x ν(x+RQ) / R^α sur la grille de rayons

    Raises:
        UsageError: Moins de 4 rayons, grille non croissante
    """
    radii = _check_radii(window_radii, MIN_SCAN_RADII)
    hull = support(nu)
    if hull is not None and radii[-1] > 2 * (hull[1] - hull[0]) + 1:
        logger.warning(f"Rayon {radii[-1]:g} au-delà de l'échelle du support {hull}")
    masses = np.array([sup_window_mass(nu, R, shape) for R in radii])
    return DensityScan(float(alpha), radii, masses, masses / radii ** alpha)


def lower_density_scan(nu: Measure, window_radii, hull: tuple[float, float],
                       shape: WindowShape = "left") -> np.ndarray:
    """inf_{x ∈ [h0, h1-R]} ν(x+RQ) / R pour chaque rayon de la grille"""
    radii = np.asarray(window_radii, dtype=float).ravel()
    h0, h1 = map(float, hull)
    if len(radii) == 0 or np.any(radii <= 0):
        raise UsageError("grille de rayons vide ou non positive")
    if h1 - h0 < radii.max():
        raise UsageError(f"enveloppe [{h0:g}, {h1:g}] plus étroite que le rayon {radii.max():g}")

    values = []
    for R in radii:
        starts = _candidates(nu, R, shape)
        starts = starts[(starts >= h0) & (starts <= h1 - R)]
        starts = np.concatenate((starts, [h0, h1 - R]))
        values.append(_window_extremes(nu, starts, R, shape)[1] / R)
    return np.array(values)


def lower_density(nu: Measure, window_radii, hull: tuple[float, float], shape: WindowShape = "left") -> float:
    """Densité de Beurling inférieure : minimum sur la grille de l'inf sur l'enveloppe

    Raises:
        UsageError: Enveloppe plus étroite que le plus grand rayon
    """
    return float(np.min(lower_density_scan(nu, window_radii, hull, shape)))


# |----------Dimension----------|
def _pairwise_slopes(log_radii: np.ndarray, log_masses: np.ndarray) -> np.ndarray:
    pairs = np.array(list(itertools.combinations(range(len(log_radii)), 2)))
    i, j = pairs[:, 0], pairs[:, 1]
    return (log_masses[j] - log_masses[i]) / (log_radii[j] - log_radii[i])


def _grows(slopes: np.ndarray, alpha: float, quantile: float) -> bool:
    """Le rapport masse / R^α croît si la pente de Theil-Sen au quantile donné est positive"""
    return float(np.quantile(slopes - alpha, quantile)) > 0


def _bisect(slopes: np.ndarray, quantile: float, upper: float, steps: int = 60) -> float:
    lo, hi = 0.0, upper
    if not _grows(slopes, lo, quantile):
        return 0.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if _grows(slopes, mid, quantile):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def dimension(nu: Measure, window_radii, shape: WindowShape = "left") -> DimensionEstimate:
    """Estimation de la dimension de Beurling sur une grille géométrique

    La pente est l'ajustement aux moindres carrés de log sup_x ν(x+RQ) contre
    log R sur la moitié centrale de la grille. L'encadrement vient d'une
    bissection sur α : α_lo (resp. α_hi) est la transition croissance/décroissance
    du rapport quand la pente par paires est lue au premier (resp. troisième)
    quartile.

    Args:
        nu (Measure): Mesure tronquée
        window_radii: Au moins 16 rayons couvrant deux décades
        shape (WindowShape): Forme des fenêtres

    Raises:
        UsageError: Grille trop courte ou trop étroite

    Returns:
        DimensionEstimate: Pente, encadrement, plage d'ajustement et résidu
    """
    radii = _check_radii(window_radii, MIN_DIMENSION_RADII)
    if radii[-1] / radii[0] < 100:
        raise UsageError(f"la grille couvre {math.log10(radii[-1] / radii[0]):.2f} décades, il en faut 2")

    parts = components(nu)
    atoms = sum(len(part) for part in parts if isinstance(part, AtomicMeasure))
    if atoms <= 1 and not any(isinstance(part, DensityMeasure) and part.bins for part in parts):
        logger.warning("Mesure dégénérée : dimension 0")
        return DimensionEstimate(0.0, 0.0, 0.0, (float(radii[0]), float(radii[-1])), 0.0, degenerate=True)

    masses = np.array([sup_window_mass(nu, R, shape) for R in radii])
    if np.any(masses <= 0):
        raise UsageError("fenêtre vide : la mesure est nulle")
    log_radii, log_masses = np.log(radii), np.log(masses)

    quarter = len(radii) // 4
    middle = slice(quarter, len(radii) - quarter)
    slope, intercept = np.polyfit(log_radii[middle], log_masses[middle], 1)
    fitted = slope * log_radii[middle] + intercept
    residual = float(np.sqrt(np.mean((log_masses[middle] - fitted) ** 2)))

    slopes = _pairwise_slopes(log_radii, log_masses)
    upper = max(float(slopes.max()), 0.0) + 1.0
    estimate = DimensionEstimate(
        slope=float(slope),
        alpha_lo=_bisect(slopes, 0.25, upper),
        alpha_hi=_bisect(slopes, 0.75, upper),
        fit_range=(float(radii[middle][0]), float(radii[middle][-1])),
        residual=residual,
    )
    logger.info(f"Dimension : pente {estimate.slope:.4f}, encadrement [{estimate.alpha_lo:.4f}, {estimate.alpha_hi:.4f}]")
    return estimate


# |----------Ensembles d'échantillonnage----------|
def lambda_set(nu: Measure, r: float, delta: float) -> list[float]:
    """Λ_ν(r, δ) = {kr : ν([kr, (k+1)r)) >= δ}

    Raises:
        DomainError: r non positif
    """
    cells = discretize(nu, r, "left")
    return cells.points[cells.weights >= delta].tolist()


# |----------Grilles----------|
def geometric_radii(lo: float, hi: float, count: int) -> np.ndarray:
    if lo <= 0 or hi <= lo or count < 2:
        raise UsageError(f"grille géométrique invalide {lo}:{hi}:{count}")
    return np.geomspace(lo, hi, count)


def default_radii() -> np.ndarray:
    """R = 2^(k/2), k = 4..28"""
    return 2.0 ** (np.arange(4, 29) / 2)


def scan_rows(scan: DensityScan) -> list[dict]:
    return [{"R": float(R), "sup_mass": float(mass), "ratio": float(ratio)}
            for R, mass, ratio in zip(scan.window_radii, scan.sup_masses, scan.ratios)]

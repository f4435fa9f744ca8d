"""Mesures boréliennes finies sur la droite : atomiques, à densité constante
par morceaux, et sommes finies des deux.

Les constructions de convolution, discrétisation et régularisation restent
exactes dans le modèle constant par morceaux : seules les masses par case
sont manipulées.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Literal
import math

import numpy as np

from fractal.config import GRID_MAX_BINS, GRID_MAX_DENOMINATOR, MERGE_TOL
from fractal.errors import DomainError, SizeError, UsageError
from logs.logger_config import setup_logger


logger = setup_logger()


PointRule = Literal["left", "center", "custom"]
Closed = Literal["left", "right"]

# |----------Types----------|
def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    points: np.ndarray
    weights: np.ndarray

    @property
    def mass(self) -> float:
        return math.fsum(self.weights)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.points.tolist(), self.weights.tolist()))

    def __len__(self) -> int:
        return len(self.points)

    def cumulative(self) -> np.ndarray:
        """Sommes cumulées des poids, précédées d'un zéro"""
        return np.concatenate(([0.0], np.cumsum(self.weights)))


@dataclass(frozen=True, eq=False)
class DensityMeasure:
    support_start: float
    bin_width: float
    bin_masses: np.ndarray

    @property
    def mass(self) -> float:
        return math.fsum(self.bin_masses)

    @property
    def bins(self) -> int:
        return len(self.bin_masses)

    @property
    def support_end(self) -> float:
        return self.support_start + self.bins * self.bin_width

    def edges(self) -> np.ndarray:
        return self.support_start + self.bin_width * np.arange(self.bins + 1)

    def midpoints(self) -> np.ndarray:
        return self.support_start + self.bin_width * (np.arange(self.bins) + 0.5)

    def cdf(self, x: float | np.ndarray) -> np.ndarray:
        """Masse de ]-inf, x], linéaire dans chaque case

        Args:
            x (float | np.ndarray): Points d'évaluation

        Returns:
            np.ndarray: Fonction de répartition aux points x
        """
        cumulative = np.concatenate(([0.0], np.cumsum(self.bin_masses)))
        if self.bins == 0:
            return np.zeros_like(np.asarray(x, dtype=float))
        position = np.clip((np.asarray(x, dtype=float) - self.support_start) / self.bin_width, 0.0, self.bins)
        index = np.minimum(np.floor(position).astype(int), self.bins - 1)
        return cumulative[index] + (position - index) * self.bin_masses[index]


@dataclass(frozen=True, eq=False)
class FiniteSum:
    components: tuple["AtomicMeasure | DensityMeasure", ...]

    @property
    def mass(self) -> float:
        return math.fsum(component.mass for component in self.components)


Measure = AtomicMeasure | DensityMeasure | FiniteSum


# |----------Constructeurs----------|
def make_atomic(points, weights) -> AtomicMeasure:
    """Construit une mesure atomique triée, les atomes confondus sont fusionnés

    Args:
        points: Positions des atomes
        weights: Poids positifs associés

    Raises:
        UsageError: Listes de longueurs différentes
        DomainError: Poids négatif ou position non finie

    Returns:
        AtomicMeasure: Mesure triée sans doublon
    """
    points = np.asarray(points, dtype=float).ravel()
    weights = np.asarray(weights, dtype=float).ravel()
    if points.shape != weights.shape:
        raise UsageError(f"{len(points)} points pour {len(weights)} poids")
    if np.any(weights < 0) or np.any(np.isnan(weights)):
        raise DomainError("les poids d'une mesure doivent être positifs")
    if not np.all(np.isfinite(points)):
        raise DomainError("les atomes doivent être à distance finie")
    if len(points) == 0:
        return AtomicMeasure(_frozen(points), _frozen(weights))

    order = np.argsort(points, kind="stable")
    points, weights = points[order], weights[order]

    scale = np.maximum(1.0, np.maximum(np.abs(points[1:]), np.abs(points[:-1])))
    distinct = np.diff(points) > MERGE_TOL * scale
    starts = np.concatenate(([0], np.flatnonzero(distinct) + 1))
    return AtomicMeasure(_frozen(points[starts].copy()), _frozen(np.add.reduceat(weights, starts)))


def make_density(support_start: float, bin_width: float, bin_masses) -> DensityMeasure:
    masses = np.asarray(bin_masses, dtype=float).ravel()
    if bin_width <= 0:
        raise DomainError(f"largeur de case {bin_width} non positive")
    if np.any(masses < 0):
        raise DomainError("les masses par case doivent être positives")
    return DensityMeasure(float(support_start), float(bin_width), _frozen(masses.copy()))


def dirac(x: float, weight: float = 1.0) -> AtomicMeasure:
    return make_atomic([x], [weight])


def counting(lo: int, hi: int, weight: float = 1.0) -> AtomicMeasure:
    """Mesure de comptage sur les entiers de [lo, hi]"""
    points = np.arange(int(math.ceil(lo)), int(math.floor(hi)) + 1)
    return make_atomic(points, np.full(len(points), weight))


def uniform(start: float, width: float, bins: int = 1) -> DensityMeasure:
    """Probabilité uniforme sur [start, start + width)"""
    if width <= 0:
        raise DomainError(f"largeur {width} non positive")
    return make_density(start, width / bins, np.full(bins, 1.0 / bins))


def lebesgue(a: float, b: float, bins: int = 1) -> DensityMeasure:
    """Mesure de Lebesgue restreinte à [a, b)"""
    if b <= a:
        raise DomainError(f"intervalle [{a}, {b}) vide")
    width = (b - a) / bins
    return make_density(a, width, np.full(bins, width))


def counterexample_target() -> FiniteSum:
    """La mesure χ_[0,1]dx + δ₂, qui n'admet aucune mesure de frame"""
    return FiniteSum((lebesgue(0.0, 1.0), dirac(2.0)))


def empty() -> AtomicMeasure:
    return make_atomic([], [])


# |----------Annexes----------|
def components(nu: Measure) -> tuple[AtomicMeasure | DensityMeasure, ...]:
    match nu:
        case FiniteSum():
            return tuple(part for component in nu.components for part in components(component))
        case _:
            return (nu,)


def simplify(parts: list[AtomicMeasure | DensityMeasure]) -> Measure:
    """Regroupe les atomes d'une somme finie, renvoie le seul terme s'il n'en reste qu'un"""
    atomic = [part for part in parts if isinstance(part, AtomicMeasure)]
    densities = [part for part in parts if isinstance(part, DensityMeasure)]
    merged = []
    if atomic:
        merged.append(make_atomic(np.concatenate([a.points for a in atomic]),
                                  np.concatenate([a.weights for a in atomic])))
    merged.extend(densities)
    if len(merged) == 1:
        return merged[0]
    return FiniteSum(tuple(merged)) if merged else empty()


def support(nu: Measure) -> tuple[float, float] | None:
    """Enveloppe convexe du support, None pour la mesure nulle"""
    bounds = []
    for part in components(nu):
        match part:
            case AtomicMeasure() if len(part):
                bounds.append((float(part.points[0]), float(part.points[-1])))
            case DensityMeasure() if part.bins:
                bounds.append((part.support_start, part.support_end))
    if not bounds:
        return None
    return min(lo for lo, _ in bounds), max(hi for _, hi in bounds)


def as_atomic(nu: Measure) -> AtomicMeasure:
    """Vue atomique d'une mesure, refusée si une densité est présente

    Raises:
        UsageError: La mesure contient une partie à densité
    """
    parts = components(nu)
    if any(isinstance(part, DensityMeasure) for part in parts):
        raise UsageError("mesure à densité : la discrétiser d'abord")
    merged = simplify(list(parts))
    return merged if isinstance(merged, AtomicMeasure) else empty()


def translate(nu: Measure, s: float) -> Measure:
    match nu:
        case AtomicMeasure():
            return make_atomic(nu.points + s, nu.weights)
        case DensityMeasure():
            return make_density(nu.support_start + s, nu.bin_width, nu.bin_masses)
        case FiniteSum():
            return FiniteSum(tuple(translate(part, s) for part in nu.components))


def scale_weights(nu: Measure, factor: float) -> Measure:
    if factor < 0:
        raise DomainError(f"facteur {factor} négatif")
    match nu:
        case AtomicMeasure():
            return make_atomic(nu.points, factor * nu.weights)
        case DensityMeasure():
            return make_density(nu.support_start, nu.bin_width, factor * nu.bin_masses)
        case FiniteSum():
            return FiniteSum(tuple(scale_weights(part, factor) for part in nu.components))


def refine(density: DensityMeasure, factor: int) -> DensityMeasure:
    """Découpe chaque case en `factor` sous-cases de même masse"""
    if factor < 1:
        raise DomainError(f"facteur de raffinement {factor} invalide")
    masses = np.repeat(density.bin_masses / factor, factor)
    return make_density(density.support_start, density.bin_width / factor, masses)


# |----------Masses de fenêtres----------|
def interval_mass(nu: Measure, a, b, closed: Closed = "left") -> np.ndarray | float:
    """Masse de [a, b) (closed='left') ou de ]a, b] (closed='right')

    Args:
        nu (Measure): Mesure
        a: Bornes gauches (scalaire ou tableau)
        b: Bornes droites
        closed (Closed): Côté fermé de l'intervalle

    Returns:
        np.ndarray | float: Masses, même forme que a et b
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    total = np.zeros(np.broadcast(a, b).shape)
    side = "left" if closed == "left" else "right"
    for part in components(nu):
        match part:
            case AtomicMeasure():
                cumulative = part.cumulative()
                total = total + cumulative[np.searchsorted(part.points, b, side=side)] \
                    - cumulative[np.searchsorted(part.points, a, side=side)]
            case DensityMeasure():
                total = total + part.cdf(b) - part.cdf(a)
    total = np.maximum(total, 0.0)
    return float(total) if total.ndim == 0 else total


def window_mass(nu: Measure, x, R: float) -> np.ndarray | float:
    """ν([x, x+R)), exacte pour les atomes comme pour les densités"""
    if R <= 0:
        raise DomainError(f"rayon de fenêtre {R} non positif")
    x = np.asarray(x, dtype=float)
    return interval_mass(nu, x, x + R, "left")


# |----------Convolution----------|
def _check_grid(bins: int) -> None:
    if bins > GRID_MAX_BINS:
        raise SizeError(f"grille commune de {bins} cases au-delà de {GRID_MAX_BINS}")


def _grid_denominator(offsets: np.ndarray, max_denominator: int = GRID_MAX_DENOMINATOR) -> int:
    """Plus petit q tel que q·offsets soit entier, à 1e-9 case près

    Raises:
        UsageError: Décalages sans dénominateur commun raisonnable
    """
    fractional = np.unique(np.round(offsets - np.floor(offsets), 12))
    q = 1
    for value in fractional.tolist():
        if min(value, 1.0 - value) < 1e-9:
            continue
        ratio = Fraction(value).limit_denominator(max_denominator)
        q = math.lcm(q, ratio.denominator)
        if abs(float(ratio) - value) > 1e-9 or q > max_denominator:
            raise UsageError(f"décalage {value} hors de toute grille commune")
    return q


def _place(out: np.ndarray, shifts: np.ndarray, weights: np.ndarray, masses: np.ndarray) -> None:
    """Ajoute des copies de `masses` décalées d'un nombre entier de cases"""
    index = shifts[:, None] + np.arange(len(masses))[None, :]
    np.add.at(out, index, weights[:, None] * masses[None, :])


def _trim(start: float, width: float, masses: np.ndarray) -> DensityMeasure:
    nonzero = np.flatnonzero(masses)
    if len(nonzero) == 0:
        return make_density(start, width, [])
    first, last = nonzero[0], nonzero[-1]
    return make_density(start + first * width, width, masses[first:last + 1])


def _convolve_atomic_density(atoms: AtomicMeasure, density: DensityMeasure) -> DensityMeasure:
    if len(atoms) == 0 or density.bins == 0:
        return make_density(density.support_start, density.bin_width, [])
    # chaque atome doit tomber sur la grille : on raffine la densité jusque-là
    offsets = (atoms.points - atoms.points[0]) / density.bin_width
    q = _grid_denominator(offsets)
    shifts = np.rint(offsets * q).astype(int)
    _check_grid(q * density.bins + int(shifts[-1]))
    fine = refine(density, q)
    out = np.zeros(fine.bins + int(shifts[-1]))
    _place(out, shifts, atoms.weights, fine.bin_masses)
    return _trim(atoms.points[0] + density.support_start, fine.bin_width, out)


def common_grid(first: float, second: float, max_denominator: int = GRID_MAX_DENOMINATOR) -> tuple[int, int]:
    """Facteurs (q1, q2) tels que first/q1 == second/q2, grille commune la plus grossière

    Raises:
        UsageError: Rapport des largeurs non rationnel à la précision demandée
    """
    ratio = Fraction(first / second).limit_denominator(max_denominator)
    if not math.isclose(float(ratio), first / second, rel_tol=1e-14):
        raise UsageError(f"largeurs de case {first} et {second} sans grille commune")
    # first/second = p/q -> sous-case de largeur first/p = second/q
    return ratio.numerator, ratio.denominator


def _convolve_densities(first: DensityMeasure, second: DensityMeasure) -> DensityMeasure:
    q1, q2 = common_grid(first.bin_width, second.bin_width)
    _check_grid(q1 * first.bins + q2 * second.bins)
    left, right = refine(first, q1), refine(second, q2)
    width = left.bin_width
    if left.bins == 0 or right.bins == 0:
        return make_density(left.support_start + right.support_start, width, [])
    products = np.convolve(left.bin_masses, right.bin_masses)
    # deux créneaux de largeur h donnent un triangle réparti à moitié sur deux cases
    masses = 0.5 * (np.concatenate((products, [0.0])) + np.concatenate(([0.0], products)))
    return _trim(left.support_start + right.support_start, width, masses)


def _add_densities(densities: list[DensityMeasure]) -> DensityMeasure:
    """Somme de densités ramenées sur une grille qui contient tous leurs bords"""
    densities = [density for density in densities if density.bins]
    if not densities:
        return make_density(0.0, 1.0, [])
    width = densities[0].bin_width
    for other in densities[1:]:
        q1, _ = common_grid(width, other.bin_width)
        width = width / q1
    start = min(density.support_start for density in densities)
    width = width / _grid_denominator(np.array([(density.support_start - start) / width for density in densities]))
    factors = [max(1, round(density.bin_width / width)) for density in densities]
    shifts = [round((density.support_start - start) / width) for density in densities]
    size = max(shift + factor * density.bins for shift, factor, density in zip(shifts, factors, densities))
    _check_grid(size)
    out = np.zeros(size)
    for shift, factor, density in zip(shifts, factors, densities):
        out[shift:shift + factor * density.bins] += refine(density, factor).bin_masses
    return _trim(start, width, out)


def convolve(nu: Measure, rho: Measure) -> Measure:
    """Convolution de deux mesures finies

    Args:
        nu (Measure): Première mesure
        rho (Measure): Seconde mesure

    Returns:
        Measure: Atomique si les deux le sont, à densité sinon
    """
    if isinstance(nu, FiniteSum) or isinstance(rho, FiniteSum):
        parts = [convolve(left, right) for left in components(nu) for right in components(rho)]
        densities = [part for part in parts if isinstance(part, DensityMeasure)]
        atomic = [part for part in parts if isinstance(part, AtomicMeasure)]
        merged = ([_add_densities(densities)] if densities else []) + atomic
        return simplify(merged)

    match nu, rho:
        case AtomicMeasure(), AtomicMeasure():
            points = np.add.outer(nu.points, rho.points).ravel()
            weights = np.multiply.outer(nu.weights, rho.weights).ravel()
            return make_atomic(points, weights)
        case AtomicMeasure(), DensityMeasure():
            return _convolve_atomic_density(nu, rho)
        case DensityMeasure(), AtomicMeasure():
            return _convolve_atomic_density(rho, nu)
        case DensityMeasure(), DensityMeasure():
            return _convolve_densities(nu, rho)


def mollify(nu: Measure, kernel_width: float) -> DensityMeasure:
    """Convolution avec la probabilité uniforme sur [0, kernel_width)

    Raises:
        DomainError: Largeur non positive
    """
    if kernel_width <= 0:
        raise DomainError(f"largeur de noyau {kernel_width} non positive")
    return convolve(nu, uniform(0.0, kernel_width))


# |----------Discrétisation----------|
def cell_index(u: np.ndarray) -> np.ndarray:
    """Indice k de la cellule [k, k+1) contenant u, tolérant au bruit flottant"""
    u = np.asarray(u, dtype=float)
    return np.floor(u + 1e-9 * np.maximum(1.0, np.abs(u))).astype(np.int64)


def _cell_masses(part: AtomicMeasure | DensityMeasure, r: float) -> tuple[np.ndarray, np.ndarray]:
    match part:
        case AtomicMeasure():
            if len(part) == 0:
                return np.array([], dtype=np.int64), np.array([])
            cells, inverse = np.unique(cell_index(part.points / r), return_inverse=True)
            return cells, np.bincount(inverse, weights=part.weights)
        case DensityMeasure():
            if part.bins == 0:
                return np.array([], dtype=np.int64), np.array([])
            first = int(np.floor(part.support_start / r))
            last = int(np.ceil(part.support_end / r))
            cells = np.arange(first, last)
            masses = part.cdf((cells + 1) * r) - part.cdf(cells * r)
            return cells, np.maximum(masses, 0.0)


def discretize(nu: Measure, r: float, point_rule: PointRule = "left",
               offset: float | Callable[[np.ndarray], np.ndarray] | None = None) -> AtomicMeasure:
    """ν' = Σ ν(r(k+Q)) δ_{x_k}, un atome par cellule non vide

    Args:
        nu (Measure): Mesure à discrétiser
        r (float): Pas de la grille
        point_rule (PointRule): Position de x_k dans sa cellule
        offset (float | Callable): Décalage dans [0, r) pour la règle 'custom',
            constant ou fonction des indices de cellule

    Raises:
        DomainError: r <= 0 ou décalage hors de [0, r)
        UsageError: Règle inconnue ou décalage manquant

    Returns:
        AtomicMeasure: Mesure discrétisée, de même masse
    """
    if r <= 0:
        raise DomainError(f"pas de discrétisation {r} non positif")

    cells_list, masses_list = [], []
    for part in components(nu):
        cells, masses = _cell_masses(part, r)
        cells_list.append(cells)
        masses_list.append(masses)
    cells = np.concatenate(cells_list) if cells_list else np.array([], dtype=np.int64)
    masses = np.concatenate(masses_list) if masses_list else np.array([])
    if len(cells):
        cells, inverse = np.unique(cells, return_inverse=True)
        masses = np.bincount(inverse, weights=masses)
    keep = masses > 0
    cells, masses = cells[keep], masses[keep]

    match point_rule:
        case "left":
            offsets = np.zeros(len(cells))
        case "center":
            offsets = np.full(len(cells), 0.5 * r)
        case "custom":
            if offset is None:
                raise UsageError("la règle 'custom' demande un décalage")
            offsets = np.broadcast_to(np.asarray(offset(cells) if callable(offset) else offset, dtype=float),
                                      cells.shape)
            if np.any(offsets < 0) or np.any(offsets >= r):
                raise DomainError(f"décalages hors de [0, {r})")
        case _:
            raise UsageError(f"règle de point inconnue : {point_rule}")

    logger.debug(f"Discrétisation r={r} : {len(cells)} cellules non vides")
    return make_atomic(cells * r + offsets, masses)

"""Inégalité de frame ∫|f dμ^|² dν ≍ ‖f‖² sur les sous-espaces de fonctions
cylindriques.

Sur le niveau n, ‖f‖² = N^-n Σ|c_w|², donc les bornes de frame restreintes
sont N^n fois les valeurs propres extrêmes de la matrice de Gram.
"""
from dataclasses import dataclass, field
from typing import Callable, Iterable
import math

import numpy as np
from scipy import linalg

from fractal.config import (EIGEN_REL_TOL, GRAM_MAX_DIMENSION, HERMITIAN_TOL, PSD_SLACK,
                            SINGULARITY_TOL, WEIGHT_FLOOR, make_rng)
from fractal.errors import CertificateError, DomainError, SizeError, UsageError
from fractal.ifs import AffineIfs, TruncationBudget, _require_no_overlap, as_word, ft_cylinders, locate
from fractal.measure import (AtomicMeasure, DensityMeasure, Measure, components, as_atomic,
                             discretize, make_atomic, refine)
from logs.logger_config import setup_logger


logger = setup_logger()


# |----------Types----------|
@dataclass(frozen=True, eq=False)
class CylinderFunction:
    ifs: AffineIfs
    level: int
    coefficients: np.ndarray

    def __post_init__(self) -> None:
        _require_no_overlap(self.ifs)
        coefficients = np.asarray(self.coefficients, dtype=complex).ravel()
        if len(coefficients) != self.ifs.N ** self.level:
            raise UsageError(f"{len(coefficients)} coefficients pour {self.ifs.N ** self.level} cylindres")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def constant(cls, ifs: AffineIfs, value: complex = 1.0, level: int = 0) -> "CylinderFunction":
        return cls(ifs, level, np.full(ifs.N ** level, value, dtype=complex))

    @classmethod
    def from_values(cls, ifs: AffineIfs, values) -> "CylinderFunction":
        """Fonction dont la valeur sur chaque cylindre est donnée, niveau déduit de la longueur"""
        values = np.asarray(values, dtype=complex).ravel()
        level = round(math.log(len(values), ifs.N)) if len(values) > 1 else 0
        return cls(ifs, level, values)

    @classmethod
    def indicator(cls, ifs: AffineIfs, w, level: int | None = None) -> "CylinderFunction":
        """Indicatrice du cylindre w, exprimée au niveau `level` (longueur de w par défaut)"""
        word = as_word(ifs, w)
        level = word.level if level is None else level
        if level < word.level:
            raise UsageError(f"niveau {level} plus court que le mot {word.digits}")
        coefficients = np.zeros(ifs.N ** word.level, dtype=complex)
        coefficients[word_index(ifs, word)] = 1.0
        return cls(ifs, word.level, coefficients).refine(level)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2)) / self.ifs.N ** self.level

    def refine(self, level: int) -> "CylinderFunction":
        """Même fonction exprimée sur les cylindres d'un niveau plus fin"""
        if level < self.level:
            raise UsageError(f"niveau {level} plus grossier que {self.level}")
        return CylinderFunction(self.ifs, level, np.repeat(self.coefficients, self.ifs.N ** (level - self.level)))

    def ft(self, t, budget: TruncationBudget | None = None) -> np.ndarray:
        """(f dμ)^(t) = Σ_w c_w (χ_w dμ)^(t)"""
        return self.coefficients @ ft_cylinders(self.ifs, self.level, t, budget)

    def evaluate(self, x) -> np.ndarray:
        """Valeur de f aux points x, nulle hors de l'attracteur"""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        values = np.zeros(x.shape, dtype=complex)
        for i, point in enumerate(x):
            try:
                values[i] = self.coefficients[word_index(self.ifs, locate(self.ifs, point, self.level))]
            except DomainError:
                values[i] = 0.0
        return values

    def __add__(self, other: "CylinderFunction") -> "CylinderFunction":
        level = max(self.level, other.level)
        return CylinderFunction(self.ifs, level, self.refine(level).coefficients + other.refine(level).coefficients)

    def __mul__(self, scalar: complex) -> "CylinderFunction":
        return CylinderFunction(self.ifs, self.level, scalar * self.coefficients)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    data: np.ndarray

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def hermitian_residual(self) -> float:
        """max|M - M*| rapporté à max(1, max|M|)"""
        scale = max(1.0, float(np.max(np.abs(self.data)))) if self.data.size else 1.0
        return float(np.max(np.abs(self.data - self.data.conj().T))) / scale if self.data.size else 0.0

    def quadratic_form(self, c) -> float:
        c = np.asarray(c, dtype=complex)
        return float(np.real(c.conj() @ self.data @ c))


@dataclass(frozen=True)
class FrameReport:
    level: int
    measure_ref: str
    lower: float
    upper: float
    lambda_truncation: float | None = None
    residuals: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"level": self.level, "lambda_truncation": self.lambda_truncation,
                "A": self.lower, "B": self.upper, "residuals": dict(self.residuals),
                "measure_ref": self.measure_ref}

    def row(self) -> dict:
        return {"level": self.level, "lambda": self.lambda_truncation, "A": self.lower, "B": self.upper,
                "psd": self.residuals.get("psd", 0.0), "hermitian": self.residuals.get("hermitian", 0.0)}


@dataclass(frozen=True)
class DecayCertificate:
    rows: tuple[tuple[float, float], ...]

    @property
    def decreasing(self) -> bool:
        probes = [probe for _, probe in self.rows]
        return all(later < earlier for earlier, later in zip(probes, probes[1:]))

    @property
    def ratio(self) -> float:
        first, last = self.rows[0][1], self.rows[-1][1]
        return last / first if first > 0 else math.nan


@dataclass(frozen=True)
class LambdaSweep:
    lambda_star: float
    converged: bool
    reports: tuple[FrameReport, ...]


@dataclass(frozen=True)
class JitterReport:
    base: FrameReport
    radius: float
    lower_range: tuple[float, float]
    upper_range: tuple[float, float]


# |----------Annexes----------|
def word_index(ifs: AffineIfs, w) -> int:
    """Rang du mot dans l'énumération canonique de son niveau"""
    position = {b: i for i, b in enumerate(ifs.digits)}
    index = 0
    for b in as_word(ifs, w):
        index = index * ifs.N + position[b]
    return index


def _sinc_squared(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) < SINGULARITY_TOL, 1.0, np.sinc(u) ** 2)


# |----------Gram et valeurs propres----------|
def gram_matrix(ifs: AffineIfs, n: int, nu: Measure, budget: TruncationBudget | None = None,
                chunk: int = 4096) -> HermitianMatrix:
    """Matrice de Gram des exponentielles de cylindres sous ν

    c* G c = Σ_j d_j |(f dμ)^(λ_j)|² pour f = Σ c_w χ_w.

    Args:
        ifs (AffineIfs): Système sans chevauchement
        n (int): Niveau des cylindres
        nu (Measure): Mesure candidate atomique
        budget (TruncationBudget | None): Budget de troncature de μ̂_B
        chunk (int): Nombre d'atomes traités par bloc

    Raises:
        SizeError: N^n > 4096
        UnsupportedError: Système avec chevauchement

    Returns:
        HermitianMatrix: Matrice semi-définie positive N^n x N^n
    """
    _require_no_overlap(ifs)
    m = ifs.N ** n
    if m > GRAM_MAX_DIMENSION:
        raise SizeError(f"matrice de Gram {m}x{m} au-delà de {GRAM_MAX_DIMENSION}")
    atoms = as_atomic(nu)
    keep = atoms.weights >= WEIGHT_FLOOR
    points, weights = atoms.points[keep], atoms.weights[keep]

    gram = np.zeros((m, m), dtype=complex)
    for start in range(0, len(points), chunk):
        block = ft_cylinders(ifs, n, points[start:start + chunk], budget)
        gram += (block.conj() * weights[start:start + chunk]) @ block.T
    logger.debug(f"Gram {m}x{m} assemblée sur {len(points)} atomes")
    return HermitianMatrix(0.5 * (gram + gram.conj().T))


def _certified_extremes(M: HermitianMatrix, rel_tol: float) -> tuple[float, float, float]:
    residual = M.hermitian_residual()
    if residual > HERMITIAN_TOL:
        raise DomainError(f"matrice non hermitienne (résidu {residual:.3e})")
    if M.dimension == 0:
        raise UsageError("matrice vide")
    A = 0.5 * (M.data + M.data.conj().T)
    last = M.dimension - 1
    low_values, low_vectors = linalg.eigh(A, subset_by_index=[0, 0])
    high_values, high_vectors = linalg.eigh(A, subset_by_index=[last, last])
    lambda_min, lambda_max = float(low_values[0]), float(high_values[0])

    norm = max(abs(lambda_min), abs(lambda_max))
    worst = 0.0
    for value, vector in ((lambda_min, low_vectors[:, 0]), (lambda_max, high_vectors[:, 0])):
        error = np.linalg.norm(A @ vector - value * vector) / np.linalg.norm(vector)
        worst = max(worst, error / norm if norm else error)
    if worst > rel_tol:
        raise CertificateError(f"résidu propre {worst:.3e} au-delà de {rel_tol:.1e}")
    return lambda_min, lambda_max, worst


def hermitian_extremes(M: HermitianMatrix, rel_tol: float = EIGEN_REL_TOL) -> tuple[float, float]:
    """Valeurs propres extrêmes avec certificat ‖Mv - λv‖ <= rel_tol ‖M‖ ‖v‖

    Raises:
        DomainError: Résidu de symétrie hermitienne au-delà de 1e-12
        CertificateError: Certificat de résidu non atteint
    """
    lambda_min, lambda_max, _ = _certified_extremes(M, rel_tol)
    return lambda_min, lambda_max


def frame_bounds(ifs: AffineIfs, n: int, nu: Measure, budget: TruncationBudget | None = None,
                 lambda_truncation: float | None = None, measure_ref: str = "") -> FrameReport:
    """Bornes de frame exactes sur le sous-espace des fonctions de niveau n

    Returns:
        FrameReport: A_n = N^n λ_min(G), B_n = N^n λ_max(G)
    """
    gram = gram_matrix(ifs, n, nu, budget)
    lambda_min, lambda_max, eigen_residual = _certified_extremes(gram, EIGEN_REL_TOL)
    scale = ifs.N ** n
    if lambda_min < -PSD_SLACK * max(1.0, abs(lambda_max)):
        logger.warning(f"Gram non positive : λ_min = {lambda_min:.3e}")
    lower = max(scale * lambda_min, 0.0)
    upper = max(scale * lambda_max, lower)
    report = FrameReport(level=n, measure_ref=measure_ref, lower=lower, upper=upper,
                         lambda_truncation=lambda_truncation,
                         residuals={"psd": max(-lambda_min, 0.0), "hermitian": gram.hermitian_residual(),
                                    "eigen": eigen_residual})
    logger.debug(f"Niveau {n} : A={lower:.6f} B={upper:.6f}")
    return report


# |----------Frames pondérées----------|
def weighted_frame(nu: AtomicMeasure) -> list[tuple[float, float]]:
    """Famille {√d_n e_{λ_n}} associée à une mesure atomique"""
    return [(math.sqrt(weight), point) for point, weight in as_atomic(nu).atoms if weight > 0]


def frame_measure(pairs: Iterable[tuple[float, float]]) -> AtomicMeasure:
    """Mesure Σ c² δ_λ reconstruite à partir des couples (c, λ)"""
    pairs = list(pairs)
    return make_atomic([point for _, point in pairs], [weight ** 2 for weight, _ in pairs])


# |----------Contre-exemple----------|
def counterexample_probe(nu: Measure, T: float, quad_refine: int = 1) -> float:
    """∫ sin²(π(T+t)) / (π²(T+t)²) dν(t)

    C'est ‖g_T dμ^‖² sous ν pour μ = χ_[0,1]dx + δ₂ et g_T = e_{-T} χ_[0,1],
    fonction de norme 1 dans L²(μ).

    Args:
        nu (Measure): Mesure candidate
        T (float): Fréquence de modulation
        quad_refine (int): Sous-cases par case pour la quadrature au point milieu

    Returns:
        float: Valeur de la sonde
    """
    total = 0.0
    for part in components(nu):
        match part:
            case AtomicMeasure():
                total += float(np.sum(part.weights * _sinc_squared(T + part.points)))
            case DensityMeasure() if part.bins:
                fine = refine(part, quad_refine)
                total += float(np.sum(fine.bin_masses * _sinc_squared(T + fine.midpoints())))
    return total


def lower_bound_decay_certificate(nu: Measure, T_grid: Iterable[float], quad_refine: int = 1) -> DecayCertificate:
    """Table (T, sonde) montrant que l'infimum sur la famille g_T tend vers 0"""
    rows = tuple((float(T), counterexample_probe(nu, T, quad_refine)) for T in T_grid)
    if len(rows) < 2:
        raise UsageError("il faut au moins deux valeurs de T")
    certificate = DecayCertificate(rows)
    logger.info(f"Sonde du contre-exemple : décroissante={certificate.decreasing}, rapport={certificate.ratio:.3e}")
    return certificate


# |----------Balayages----------|
def lambda_sweep(ifs: AffineIfs, n: int, measure_for: Callable[[float], Measure], lambda0: float = 16,
                 delta_tol: float = 1e-3, lambda_max: float = 2 ** 14,
                 budget: TruncationBudget | None = None) -> LambdaSweep:
    """Double Λ jusqu'à ce que A_n progresse de moins de `delta_tol`

    Tant que A_n reste sous `delta_tol` (famille pas encore complète au
    niveau n) le balayage continue.

    Args:
        ifs (AffineIfs): Système
        n (int): Niveau
        measure_for (Callable): Λ -> mesure candidate tronquée à [-Λ, Λ]
        lambda0 (float): Troncature initiale
        delta_tol (float): Progression minimale de A_n
        lambda_max (float): Troncature maximale

    Returns:
        LambdaSweep: Λ*, convergence et rapports successifs
    """
    reports = []
    lam = lambda0
    while True:
        report = frame_bounds(ifs, n, measure_for(lam), budget, lambda_truncation=lam)
        reports.append(report)
        logger.info(f"Λ={lam:g} niveau {n} : A={report.lower:.6f} B={report.upper:.6f}")
        if len(reports) > 1 and report.lower > delta_tol and report.lower - reports[-2].lower < delta_tol:
            return LambdaSweep(lam, True, tuple(reports))
        if lam * 2 > lambda_max:
            return LambdaSweep(lam, False, tuple(reports))
        lam *= 2


def discretization_sweep(ifs: AffineIfs, n: int, nu: Measure, radii: Iterable[float], point_rule: str = "left",
                         budget: TruncationBudget | None = None) -> list[tuple[float, FrameReport]]:
    """Bornes de frame de discretize(ν, r) en fonction de r"""
    return [(float(r), frame_bounds(ifs, n, discretize(nu, r, point_rule), budget, measure_ref=f"discretize(r={r:g})"))
            for r in radii]


def jitter_sensitivity(ifs: AffineIfs, n: int, nu: Measure, radius: float, draws: int = 8,
                       seed: int | np.random.Generator | None = None,
                       budget: TruncationBudget | None = None) -> JitterReport:
    """Dispersion empirique de (A_n, B_n) quand chaque atome bouge d'au plus `radius`"""
    if radius < 0:
        raise DomainError(f"rayon {radius} négatif")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    atoms = as_atomic(nu)
    base = frame_bounds(ifs, n, atoms, budget)
    lowers, uppers = [], []
    for _ in range(draws):
        moved = make_atomic(atoms.points + rng.uniform(-radius, radius, size=len(atoms)), atoms.weights)
        report = frame_bounds(ifs, n, moved, budget)
        lowers.append(report.lower)
        uppers.append(report.upper)
    return JitterReport(base, radius, (min(lowers), max(lowers)), (min(uppers), max(uppers)))

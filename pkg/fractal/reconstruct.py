"""Facteurs de convolution μ_B * μ_C = μ_D : projection P et formule de
reconstruction de Fourier.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from fractal.config import DIGIT_DEPTH, make_rng
from fractal.errors import DomainError, UsageError
from fractal.frame import CylinderFunction, word_index
from fractal.ifs import (AffineIfs, TruncationBudget, cylinder_interval, encode, expand, ft_invariant,
                         hull, words)
from logs.logger_config import setup_logger


logger = setup_logger()


BOUNDARY_DEPTH = 12


@dataclass(frozen=True, eq=False)
class SplitSystem:
    base: AffineIfs
    complement: AffineIfs
    combined: AffineIfs = field(init=False)
    inverse: dict[int, tuple[int, int]] = field(init=False)

    def __post_init__(self) -> None:
        if self.base.R != self.complement.R:
            raise DomainError(f"bases différentes : {self.base.R} et {self.complement.R}")
        inverse = {}
        for b in self.base.digits:
            for c in self.complement.digits:
                if b + c in inverse:
                    raise DomainError(f"{b}+{c} = {b + c} déjà obtenu : la somme B+C n'est pas directe")
                inverse[b + c] = (b, c)
        combined = AffineIfs(self.base.R, tuple(sorted(inverse)))
        if combined.N != combined.R or not combined.distinct_mod_R:
            raise DomainError(f"D = {list(combined.digits)} n'est pas un système complet de résidus modulo {combined.R}")
        object.__setattr__(self, "combined", combined)
        object.__setattr__(self, "inverse", inverse)

    @classmethod
    def from_digits(cls, R: int, B, C) -> "SplitSystem":
        return cls(AffineIfs(R, tuple(B)), AffineIfs(R, tuple(C)))

    def split(self, d: int) -> tuple[int, int]:
        return self.inverse[d]

    def __str__(self) -> str:
        return f"{self.base} ⊕ {list(self.complement.digits)}"


@dataclass(frozen=True)
class ReconstructionReport:
    t: float
    value: complex
    cutoff: float
    step: float
    richardson_residual: float
    boundary_distance: float
    near_boundary: bool

    def to_dict(self) -> dict:
        return {"t": self.t, "value_re": self.value.real, "value_im": self.value.imag, "cutoff": self.cutoff,
                "step": self.step, "richardson_residual": self.richardson_residual,
                "boundary_distance": self.boundary_distance, "near_boundary": self.near_boundary}


# |----------Projection P----------|
def extract_digits(sys: SplitSystem, z: float, depth: int = DIGIT_DEPTH) -> tuple[int, ...]:
    """Développement glouton de z avec les chiffres de D

    Raises:
        DomainError: z hors de X_D à la résolution courante
    """
    return expand(sys.combined, z, depth)


def project_p(sys: SplitSystem, z, depth: int = DIGIT_DEPTH) -> float | np.ndarray:
    """p(z) = Σ R^-k b_k où d_k = b_k + c_k est le k-ième chiffre de z

    Args:
        sys (SplitSystem): Décomposition D = B ⊕ C
        z: Point(s) de X_D
        depth (int): Nombre de chiffres extraits

    Raises:
        DomainError: z n'appartient pas à X_D

    Returns:
        float | np.ndarray: Projection sur X_B
    """
    z_array = np.asarray(z, dtype=float)
    projected = np.array([
        encode(sys.base, [sys.split(d)[0] for d in extract_digits(sys, point, depth)])
        for point in z_array.ravel()
    ]).reshape(z_array.shape)
    return float(projected) if projected.ndim == 0 else projected


def _require_base(sys: SplitSystem, f: CylinderFunction) -> None:
    if f.ifs != sys.base:
        raise UsageError(f"la fonction vit sur {f.ifs}, pas sur {sys.base}")


def base_norm(f: CylinderFunction, p: float = 2) -> float:
    """‖f‖_{L^p(μ_B)} exacte pour une fonction cylindrique"""
    values = np.abs(f.coefficients)
    if math.isinf(p):
        return float(values.max())
    return float(np.mean(values ** p) ** (1 / p))


def transfer_norm(sys: SplitSystem, f: CylinderFunction, p: float = 2, count: int = 100_000,
                  seed: int | np.random.Generator | None = None) -> float:
    """Estimation Monte Carlo de ‖Pf‖_{L^p(μ_D)}, Pf = f∘p

    Les points de μ_D sont tirés par leurs chiffres i.i.d. uniformes dans D ;
    seuls les n premiers chiffres comptent pour une fonction de niveau n.

    Raises:
        UsageError: f n'est pas définie sur le système de base, p hors de {1, 2, ∞}
    """
    _require_base(sys, f)
    if p not in (1, 2) and not math.isinf(p):
        raise UsageError(f"norme L^{p} non prise en charge")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)

    position = {b: i for i, b in enumerate(sys.base.digits)}
    base_index = np.array([position[sys.split(d)[0]] for d in sys.combined.digits])
    index = np.zeros(count, dtype=np.int64)
    for _ in range(f.level):
        index = index * sys.base.N + base_index[rng.integers(0, sys.combined.N, size=count)]
    values = np.abs(f.coefficients[index])
    if math.isinf(p):
        return float(values.max())
    return float(np.mean(values ** p) ** (1 / p))


def factorization_residual(sys: SplitSystem, t, budget: TruncationBudget | None = None) -> float:
    """max |μ̂_B(t) μ̂_C(t) - μ̂_D(t)|"""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    product = ft_invariant(sys.base, t, budget) * ft_invariant(sys.complement, t, budget)
    return float(np.max(np.abs(product - ft_invariant(sys.combined, t, budget))))


# |----------Reconstruction de Fourier----------|
def boundary_distance(sys: SplitSystem, f: CylinderFunction, t: float) -> float:
    """Distance de t au plus proche bord d'un cylindre de μ_B de niveau n"""
    _require_base(sys, f)
    if f.level == 0:
        edges = np.array(hull(sys.base))
    else:
        edges = np.array([cylinder_interval(sys.base, w)[:2] for w in words(sys.base, f.level)]).ravel()
    return float(np.min(np.abs(edges - t)))


def _midpoint_rule(sys: SplitSystem, f: CylinderFunction, t: float, cutoff: float, step: float,
                   budget: TruncationBudget | None) -> complex:
    nodes_count = max(1, int(round(2 * cutoff / step)))
    width = 2 * cutoff / nodes_count
    x = -cutoff + width * (np.arange(nodes_count) + 0.5)
    integrand = f.ft(x, budget) * ft_invariant(sys.complement, x, budget) * np.exp(2j * np.pi * t * x)
    return complex(width * np.sum(integrand))


def fourier_reconstruct(sys: SplitSystem, f: CylinderFunction, t: float, cutoff: float = 200.0,
                        quad_step: float = 1 / 64, budget: TruncationBudget | None = None,
                        boundary_depth: int = BOUNDARY_DEPTH) -> ReconstructionReport:
    """f(t) ≈ ∫_{-X}^{X} (f dμ_B)^(x) μ̂_C(x) e^{2πitx} dx

    Quadrature du point milieu de pas `quad_step` ; le résidu de Richardson
    |I_{h/2} - I_h| / 3 mesure l'erreur de quadrature, sans rien affirmer sur
    la troncature en X.

    Args:
        sys (SplitSystem): Décomposition D = B ⊕ C
        f (CylinderFunction): Fonction sur le système de base
        t (float): Point de reconstruction
        cutoff (float): Borne X de l'intégrale
        quad_step (float): Pas de quadrature
        budget (TruncationBudget | None): Budget de troncature des transformées
        boundary_depth (int): t à moins de R^-depth d'un bord de cylindre est signalé

    Raises:
        DomainError: cutoff ou quad_step non positif

    Returns:
        ReconstructionReport: Valeur, pas, coupure et résidu
    """
    _require_base(sys, f)
    if cutoff <= 0 or quad_step <= 0:
        raise DomainError(f"coupure {cutoff} et pas {quad_step} doivent être positifs")
    lo, hi = hull(sys.base)
    if not lo <= t <= hi:
        logger.warning(f"t={t} hors de l'enveloppe [{lo:g}, {hi:g}] de μ_B")

    coarse = _midpoint_rule(sys, f, t, cutoff, quad_step, budget)
    fine = _midpoint_rule(sys, f, t, cutoff, quad_step / 2, budget)
    distance = boundary_distance(sys, f, t)
    near = distance < float(sys.base.R) ** (-boundary_depth)
    if near:
        logger.warning(f"t={t} à {distance:.2e} d'un bord de cylindre : Pf y est discontinue")
    return ReconstructionReport(t=float(t), value=coarse, cutoff=float(cutoff), step=float(quad_step),
                                richardson_residual=abs(fine - coarse) / 3, boundary_distance=distance,
                                near_boundary=near)


def pf_value(sys: SplitSystem, f: CylinderFunction, z: float, depth: int = DIGIT_DEPTH) -> complex:
    """(Pf)(z) lu directement sur les n premiers chiffres de z"""
    _require_base(sys, f)
    digits = extract_digits(sys, z, max(depth, f.level))[:f.level]
    return complex(f.coefficients[word_index(sys.base, [sys.split(d)[0] for d in digits])])

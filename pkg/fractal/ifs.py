"""Systèmes de fonctions itérées affines (R, B) sur la droite.

Les applications sont τ_b(x) = (x + b) / R. La transformée de Fourier de la
mesure invariante est évaluée par produit infini tronqué, avec une
profondeur choisie pour que l'erreur de queue soit certifiée sous `tol`.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
import math

import numpy as np

from fractal.config import FT_TOL, WEIGHT_FLOOR, make_rng
from fractal.errors import DomainError, UnsupportedError
from fractal.measure import AtomicMeasure, make_atomic
from logs.logger_config import setup_logger


logger = setup_logger()


# |----------Types----------|
@dataclass(frozen=True)
class AffineIfs:
    R: int
    digits: tuple[int, ...]
    distinct_mod_R: bool = field(init=False)

    def __post_init__(self) -> None:
        if int(self.R) != self.R or self.R < 2:
            raise DomainError(f"l'échelle R={self.R} doit être un entier >= 2")
        if len(self.digits) == 0:
            raise DomainError("l'ensemble de chiffres B est vide")
        if any(int(b) != b for b in self.digits):
            raise DomainError(f"chiffres non entiers : {list(self.digits)}")
        digits = tuple(sorted(int(b) for b in self.digits))
        if len(set(digits)) != len(digits):
            raise DomainError(f"chiffres en double : {list(self.digits)}")
        if len(digits) > self.R:
            raise DomainError(f"{len(digits)} chiffres pour R={self.R}")
        object.__setattr__(self, "R", int(self.R))
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "distinct_mod_R", len({b % self.R for b in digits}) == len(digits))

    @property
    def N(self) -> int:
        return len(self.digits)

    @property
    def max_abs_digit(self) -> int:
        return max(abs(b) for b in self.digits)

    def digit_array(self) -> np.ndarray:
        return np.asarray(self.digits, dtype=float)

    @property
    def descriptor(self) -> dict:
        return {"R": self.R, "B": list(self.digits)}

    def __str__(self) -> str:
        return f"({self.R}, {{{', '.join(map(str, self.digits))}}})"


@dataclass(frozen=True)
class Word:
    digits: tuple[int, ...] = ()

    @property
    def level(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)


@dataclass(frozen=True)
class TruncationBudget:
    tol: float = FT_TOL

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise DomainError(f"tolérance {self.tol} non positive")

    def depth(self, ifs: AffineIfs, t) -> np.ndarray:
        """Plus petite profondeur K(t) dont la queue est certifiée sous tol

        La queue vérifie |Π_{k>K} m_B(t/R^k) - 1| <= exp(2π max|b| |t| R^-K / (R-1)) - 1.

        Args:
            ifs (AffineIfs): Système
            t: Fréquences

        Returns:
            np.ndarray: Profondeurs entières, même forme que t
        """
        spread = 2 * math.pi * ifs.max_abs_digit * np.abs(np.asarray(t, dtype=float)) / (ifs.R - 1)
        threshold = math.log1p(self.tol)
        with np.errstate(divide="ignore"):
            guess = np.floor(np.log(spread / threshold) / math.log(ifs.R)) + 1
        depth = np.where(spread > 0, np.maximum(guess, 0), 0).astype(np.int64)
        # garde-fou sur l'arrondi du logarithme
        while True:
            short = np.expm1(spread * float(ifs.R) ** (-depth.astype(float))) >= self.tol
            if not np.any(short):
                return depth
            depth = depth + short


def as_word(ifs: AffineIfs, w) -> Word:
    """Valide les chiffres d'un mot

    Raises:
        DomainError: Un chiffre n'appartient pas à B
    """
    digits = tuple(w.digits if isinstance(w, Word) else w)
    allowed = set(ifs.digits)
    if any(b not in allowed for b in digits):
        raise DomainError(f"mot {digits} hors de B={list(ifs.digits)}")
    return Word(tuple(int(b) for b in digits))


# |----------Construction----------|
def new_ifs(R: int, B) -> AffineIfs:
    return AffineIfs(R, tuple(B))


def hull(ifs: AffineIfs) -> tuple[float, float]:
    """Enveloppe convexe de l'attracteur X_B"""
    return min(ifs.digits) / (ifs.R - 1), max(ifs.digits) / (ifs.R - 1)


def similarity_dimension(ifs: AffineIfs) -> float:
    return math.log(ifs.N) / math.log(ifs.R)


def words(ifs: AffineIfs, n: int) -> list[Word]:
    """Mots de longueur n, ordre lexicographique de B, chiffre de poids fort en tête"""
    return [Word(digits) for digits in product(ifs.digits, repeat=n)]


def anchor_numerator(ifs: AffineIfs, w) -> int:
    """Entier A_w = Σ b_k R^(n-k), de sorte que a_w = A_w / R^n"""
    numerator = 0
    for b in as_word(ifs, w):
        numerator = numerator * ifs.R + b
    return numerator


def anchor(ifs: AffineIfs, w) -> Fraction:
    word = as_word(ifs, w)
    return Fraction(anchor_numerator(ifs, word), ifs.R ** word.level)


def _require_no_overlap(ifs: AffineIfs) -> None:
    if not ifs.distinct_mod_R:
        raise UnsupportedError(f"le système {ifs} a des chiffres congrus modulo R (chevauchement)")


# |----------Codage----------|
def encode(ifs: AffineIfs, w, depth: int | None = None) -> float:
    """E_B(b₁b₂…) tronqué : Σ_{k<=depth} R^-k b_k

    Args:
        ifs (AffineIfs): Système
        w: Mot ou préfixe de suite de chiffres
        depth (int | None): Profondeur, longueur du mot par défaut

    Raises:
        DomainError: Chiffre hors de B, ou complétion par des zéros alors que 0 n'est pas dans B

    Returns:
        float: Point de l'attracteur
    """
    word = as_word(ifs, w)
    depth = word.level if depth is None else depth
    if depth > word.level and 0 not in ifs.digits:
        raise DomainError("complétion par des zéros impossible : 0 n'est pas dans B")
    value = 0.0
    for b in reversed(word.digits[:depth]):
        value = (value + b) / ifs.R
    return value


def cylinder_interval(ifs: AffineIfs, w) -> tuple[float, float, Fraction]:
    """Intervalle enveloppe et masse exacte du cylindre τ_{b₁}…τ_{b_n}(X_B)

    Raises:
        UnsupportedError: Système avec chevauchement
    """
    _require_no_overlap(ifs)
    word = as_word(ifs, w)
    lo, hi = hull(ifs)
    scale = float(ifs.R) ** (-word.level)
    start = float(anchor(ifs, word))
    return start + scale * lo, start + scale * hi, Fraction(1, ifs.N ** word.level)


def expand(ifs: AffineIfs, x: float, depth: int) -> tuple[int, ...]:
    """Développement glouton de x en base R avec les chiffres de B

    À chaque pas on retient le chiffre dont le reste est le plus proche de
    l'enveloppe, le plus grand en cas d'égalité. La tolérance d'appartenance
    grandit d'un facteur R par pas pour suivre l'amplification des erreurs
    d'arrondi ; celle du départage reste fixe.

    Raises:
        DomainError: x n'est pas dans X_B à la résolution courante
    """
    lo, hi = hull(ifs)
    scale = max(1.0, hi - lo, abs(x))
    tie_tolerance = 1e-12 * scale
    tolerance = tie_tolerance
    digits_array = ifs.digit_array()
    y = float(x)
    if not lo - tolerance <= y <= hi + tolerance:
        raise DomainError(f"{x} hors de l'enveloppe [{lo}, {hi}]")
    y = min(max(y, lo), hi)
    digits = []
    for step in range(depth):
        y = ifs.R * y
        rest = y - digits_array
        gaps = np.maximum(lo - rest, 0.0) + np.maximum(rest - hi, 0.0)
        best = gaps.min()
        if best > tolerance:
            raise DomainError(f"{x} n'appartient pas à l'attracteur de {ifs} (pas {step + 1})")
        choice = np.flatnonzero(gaps <= best + tie_tolerance)[-1]
        digits.append(ifs.digits[choice])
        y = min(max(rest[choice], lo), hi)
        tolerance *= ifs.R
    return tuple(digits)


def locate(ifs: AffineIfs, x: float, n: int) -> Word:
    """Mot de longueur n dont le cylindre contient x"""
    _require_no_overlap(ifs)
    return Word(expand(ifs, x, n))


def sample_invariant(ifs: AffineIfs, depth: int, count: int,
                     seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Tire `count` points de μ_B en codant `depth` chiffres i.i.d. uniformes

    Args:
        ifs (AffineIfs): Système
        depth (int): Nombre de chiffres par point
        count (int): Nombre de points
        seed (int | np.random.Generator | None): Graine ou générateur

    Returns:
        np.ndarray: Échantillon, résolution R^-depth · diam(X_B)
    """
    if depth < 1 or count < 1:
        raise DomainError(f"profondeur {depth} et effectif {count} doivent être >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    digits_array = ifs.digit_array()
    points = np.zeros(count)
    weight = 1.0
    for _ in range(depth):
        weight /= ifs.R
        points += weight * digits_array[rng.integers(0, ifs.N, size=count)]
    return points


# |----------Transformées de Fourier----------|
def mask(ifs: AffineIfs, s) -> np.ndarray | complex:
    """m_B(s) = (1/N) Σ_b e^{-2πisb}"""
    s = np.asarray(s, dtype=float)
    phase = np.mod(np.multiply.outer(s, ifs.digit_array()), 1.0)
    value = np.exp(-2j * np.pi * phase).mean(axis=-1)
    return complex(value) if value.ndim == 0 else value


def _factor(ifs: AffineIfs, t: np.ndarray, k: int) -> np.ndarray:
    # t·b est exact pour t entier, la division par R^k aussi quand R est une puissance de 2
    phase = np.mod(np.multiply.outer(t, ifs.digit_array()) / float(ifs.R) ** k, 1.0)
    return np.exp(-2j * np.pi * phase).mean(axis=-1)


def ft_invariant(ifs: AffineIfs, t, budget: TruncationBudget | None = None) -> np.ndarray | complex:
    """μ̂_B(t) = Π_k m_B(t/R^k), erreur absolue certifiée sous budget.tol

    Args:
        ifs (AffineIfs): Système
        t: Fréquence(s)
        budget (TruncationBudget | None): Budget de troncature

    Returns:
        np.ndarray | complex: Valeurs de la transformée
    """
    budget = budget or TruncationBudget()
    t = np.asarray(t, dtype=float)
    value = np.ones(t.shape, dtype=complex)
    if t.size:
        depth = int(budget.depth(ifs, t).max())
        for k in range(1, depth + 1):
            value *= _factor(ifs, t, k)
    return complex(value) if value.ndim == 0 else value


def ft_cylinders(ifs: AffineIfs, n: int, t, budget: TruncationBudget | None = None) -> np.ndarray:
    """Transformées de tous les cylindres de niveau n, une ligne par mot

    (χ_w dμ)^(t) = N^-n e^{-2πi t a_w} μ̂_B(t/R^n)

    Returns:
        np.ndarray: Tableau (N^n, len(t)) dans l'ordre de `words`
    """
    _require_no_overlap(ifs)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    numerators = np.array([anchor_numerator(ifs, w) for w in words(ifs, n)], dtype=float)
    scale = float(ifs.R) ** n
    envelope = ft_invariant(ifs, t / scale, budget)
    phase = np.mod(np.multiply.outer(numerators, t) / scale, 1.0)
    return np.exp(-2j * np.pi * phase) * envelope / ifs.N ** n


def ft_cylinder(ifs: AffineIfs, w, t, budget: TruncationBudget | None = None) -> np.ndarray | complex:
    """Transformée de χ_w dμ_B, erreur au plus N^-n · tol

    Raises:
        UnsupportedError: Système avec chevauchement
    """
    _require_no_overlap(ifs)
    word = as_word(ifs, w)
    t_array = np.asarray(t, dtype=float)
    scale = float(ifs.R) ** word.level
    phase = np.mod(t_array * anchor_numerator(ifs, word) / scale, 1.0)
    value = np.exp(-2j * np.pi * phase) * ft_invariant(ifs, t_array / scale, budget) / ifs.N ** word.level
    return complex(value) if np.ndim(value) == 0 else value


# |----------Ensembles complémentaires----------|
def find_complement(ifs: AffineIfs, c_max: int) -> list[tuple[int, ...]]:
    """Ensembles C ⊂ {0,…,c_max} avec B ⊕ C système complet de résidus modulo R

    Args:
        ifs (AffineIfs): Système (R, B)
        c_max (int): Plus grand chiffre candidat

    Returns:
        list[tuple[int, ...]]: Complémentaires, ordre lexicographique
    """
    R, size = ifs.R, ifs.R // ifs.N
    if R % ifs.N or not ifs.distinct_mod_R:
        return []

    found = []
    def extend(start: int, chosen: tuple[int, ...], hit: frozenset[int]) -> None:
        if len(chosen) == size:
            found.append(chosen)
            return
        for c in range(start, c_max + 1):
            if len(chosen) + c_max - c + 1 < size:
                break
            residues = frozenset((b + c) % R for b in ifs.digits)
            if residues & hit:
                continue
            extend(c + 1, chosen + (c,), hit | residues)

    extend(0, (), frozenset())
    logger.debug(f"{len(found)} complémentaires pour {ifs} avec c_max={c_max}")
    return found


def dual_weights(complement_ifs: AffineIfs, frequencies, budget: TruncationBudget | None = None) -> AtomicMeasure:
    """ν = Σ_γ |μ̂_C(γ)|² δ_γ, les poids sous 1e-20 sont retirés"""
    frequencies = np.asarray(frequencies, dtype=float)
    weights = np.abs(ft_invariant(complement_ifs, frequencies, budget)) ** 2
    keep = weights >= WEIGHT_FLOOR
    return make_atomic(frequencies[keep], weights[keep])


def lattice_residual(ifs: AffineIfs, m_max: int = 100, budget: TruncationBudget | None = None) -> float:
    """max_{0<|m|<=m_max} |μ̂(m)|, nul si ℤ est un spectre de μ"""
    frequencies = np.concatenate((np.arange(-m_max, 0), np.arange(1, m_max + 1)))
    return float(np.max(np.abs(ft_invariant(ifs, frequencies, budget))))

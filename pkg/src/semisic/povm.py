"""Semi-symmetric informationally complete qubit POVMs.

The family is indexed by the common pairwise overlap ``B = Tr[E_x E_y]``
(x != y), with ``B`` in the half-open interval (1/16, 1/12].  Elements come
in two trace classes, ``a_-`` for E1, E2 and ``a_+`` for E3, E4; at
``B = 1/12`` both equal 1/2 and the measurement is the qubit SIC.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import tolerances as TOL
from .qmath import (
    I2,
    Mat2,
    PureQubit,
    as_density,
    bloch_vector,
    eig_hermitian,
    hs_inner,
    mat2,
)

B_MIN = Fraction(1, 16)
B_MAX = Fraction(1, 12)


class OutOfRangeError(ValueError):
    pass


class NotRankOneError(ValueError):
    pass


def parse_b(value: str | float | Fraction) -> float:
    """Parse ``B`` from ``"1/13"``, ``"0.07"``, a float or a Fraction.

    Strings are converted exactly with :class:`fractions.Fraction` and the
    range check is done on the exact value before a single float conversion.
    """
    if isinstance(value, str):
        try:
            exact = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse B from {value!r}") from exc
    elif isinstance(value, Fraction):
        exact = value
    else:
        if not math.isfinite(value):
            raise OutOfRangeError(f"B must be finite, got {value!r}")
        exact = Fraction(value)
    if not (B_MIN < exact <= B_MAX):
        raise OutOfRangeError(f"B = {value} outside the qubit range (1/16, 1/12]")
    return float(exact)


def b_label(value: str | float | Fraction) -> str:
    """Short label such as ``"1/13"`` for unit fractions, else 12 significant digits."""
    exact = Fraction(value.strip()) if isinstance(value, str) else Fraction(value)
    approx = exact.limit_denominator(1000)
    if abs(float(approx) - float(exact)) < 1e-15:
        return f"{approx.numerator}/{approx.denominator}"
    return f"{float(exact):.12g}"


@dataclass(frozen=True)
class SemiSicParams:
    B: float
    a_minus: float
    a_plus: float
    r: float
    theta: float


def semi_sic_params(B: str | float | Fraction) -> SemiSicParams:
    b = parse_b(B)
    root = math.sqrt(max(1.0 - 12.0 * b, 0.0))
    a_minus = (1.0 - root) / 2.0
    a_plus = (1.0 + root) / 2.0
    r = min(2.0 * math.sqrt(b) / (1.0 - root), 1.0)
    arg = math.sqrt(max(1.0 - 8.0 * b - root, 0.0)) / (4.0 * math.sqrt(b))
    theta = math.acos(min(max(arg, -1.0), 1.0))
    return SemiSicParams(B=b, a_minus=a_minus, a_plus=a_plus, r=r, theta=theta)


@dataclass(frozen=True)
class PovmElement:
    """One effect ``op``; for rank-one effects ``op = weight |vector><vector|``."""

    op: Mat2
    weight: float
    vector: PureQubit | None
    bloch: NDArray[np.float64]


@dataclass(frozen=True)
class Povm:
    elements: tuple[PovmElement, ...]
    label: str = ""
    B: float | None = None

    @property
    def ops(self) -> list[Mat2]:
        return [e.op for e in self.elements]

    @property
    def weights(self) -> NDArray[np.float64]:
        return np.array([e.weight for e in self.elements])

    def __len__(self) -> int:
        return len(self.elements)


def make_element(op: ArrayLike, rank_tol: float = TOL.POVM) -> PovmElement:
    """Build an element from its effect, detecting rank-one structure."""
    op = mat2(op)
    op = (op + op.conj().T) / 2
    weight = float(np.trace(op).real)
    evals, vecs = eig_hermitian(op)
    if weight > rank_tol and abs(evals[1]) <= rank_tol:
        vector = vecs[0]
        bloch = vector.bloch()
    else:
        vector = None
        bloch = bloch_vector(op) / weight if weight > rank_tol else np.zeros(3)
    return PovmElement(op=op, weight=weight, vector=vector, bloch=bloch)


def povm_from_effects(ops: Sequence[ArrayLike], label: str = "", B: float | None = None) -> Povm:
    return Povm(elements=tuple(make_element(op) for op in ops), label=label, B=B)


def semi_sic_vectors(params: SemiSicParams) -> list[PureQubit]:
    r, th = params.r, params.theta
    s3, s23 = 1 / math.sqrt(3), math.sqrt(2 / 3)
    return [
        PureQubit(1.0, 0.0),
        PureQubit.normalized(r, math.sqrt(max(1 - r * r, 0.0))),
        PureQubit.normalized(s3, -s23 * np.exp(1j * th)),
        PureQubit.normalized(s3, -s23 * np.exp(-1j * th)),
    ]


def build_semi_sic(B: str | float | Fraction) -> Povm:
    """Semi-SIC POVM (E1, E2, E3, E4) with traces (a-, a-, a+, a+)."""
    params = semi_sic_params(B)
    weights = (params.a_minus, params.a_minus, params.a_plus, params.a_plus)
    elements = []
    for w, psi in zip(weights, semi_sic_vectors(params)):
        elements.append(PovmElement(op=w * psi.projector(), weight=w, vector=psi, bloch=psi.bloch()))
    label = f"semi-SIC B={b_label(B)}"
    return Povm(elements=tuple(elements), label=label, B=params.B)


def sic_povm() -> Povm:
    return build_semi_sic(Fraction(1, 12))


def born_probabilities(povm: Povm, rho: PureQubit | ArrayLike, clamp: float = TOL.CLAMP) -> NDArray[np.float64]:
    rho = as_density(rho)
    probs = np.array([np.trace(rho @ op).real for op in povm.ops])
    if np.any(probs < -clamp):
        raise ValueError(f"negative probability {probs.min():.3e}; invalid POVM or state")
    return np.where(probs < 0.0, 0.0, probs)


@dataclass
class VerificationReport:
    completeness_residual: float
    min_eigenvalue: float
    rank_one_residual: float
    overlaps: NDArray[np.float64]
    traces: NDArray[np.float64]
    symmetry_residual: float | None = None
    trace_spectrum_residual: float | None = None
    tol: float = TOL.POVM
    checks: dict[str, bool] = field(default_factory=dict)

    def __post_init__(self):
        self.checks = {
            "complete": self.completeness_residual <= self.tol,
            "positive": self.min_eigenvalue >= -self.tol,
            "rank_one": self.rank_one_residual <= self.tol,
        }
        if self.symmetry_residual is not None:
            self.checks["symmetric"] = self.symmetry_residual <= self.tol
        if self.trace_spectrum_residual is not None:
            self.checks["trace_spectrum"] = self.trace_spectrum_residual <= self.tol

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def max_residual(self) -> float:
        vals = [self.completeness_residual, max(-self.min_eigenvalue, 0.0), self.rank_one_residual]
        vals += [v for v in (self.symmetry_residual, self.trace_spectrum_residual) if v is not None]
        return float(max(vals))

    def failures(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "completeness_residual": self.completeness_residual,
            "min_eigenvalue": self.min_eigenvalue,
            "rank_one_residual": self.rank_one_residual,
            "symmetry_residual": self.symmetry_residual,
            "trace_spectrum_residual": self.trace_spectrum_residual,
            "traces": self.traces.tolist(),
            "max_residual": self.max_residual,
        }


def pairwise_overlaps(povm: Povm) -> NDArray[np.float64]:
    return np.array([hs_inner(povm.ops[i], povm.ops[j]) for i, j in combinations(range(len(povm)), 2)])


def verify_povm(povm: Povm, B: str | float | Fraction | None = None, tol: float = TOL.POVM) -> VerificationReport:
    """Check completeness, positivity, rank-one-ness and (given ``B``) the family identities."""
    ops = povm.ops
    completeness = float(np.linalg.norm(sum(ops) - I2))
    spectra = [eig_hermitian((op + op.conj().T) / 2)[0] for op in ops]
    min_eig = float(min(s[1] for s in spectra))
    rank_one = float(max(abs(s[1]) for s in spectra))
    overlaps = pairwise_overlaps(povm)
    traces = np.array([np.trace(op).real for op in ops])
    symmetry = spectrum = None
    if B is not None:
        b = float(Fraction(B)) if isinstance(B, str) else float(B)
        symmetry = float(np.max(np.abs(overlaps - b)))
        try:
            p = semi_sic_params(B)
            target = np.array([p.a_minus, p.a_minus, p.a_plus, p.a_plus])
            spectrum = float(np.max(np.abs(np.sort(traces) - target))) if len(traces) == 4 else math.inf
        except OutOfRangeError:
            spectrum = math.inf
    return VerificationReport(
        completeness_residual=completeness,
        min_eigenvalue=min_eig,
        rank_one_residual=rank_one,
        overlaps=overlaps,
        traces=traces,
        symmetry_residual=symmetry,
        trace_spectrum_residual=spectrum,
        tol=tol,
    )


def bloch_vectors(povm: Povm, tol: float = TOL.POVM) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Unit Bloch directions ``n_x`` and weights ``a_x`` with ``E_x = (a_x/2)(I + n_x . sigma)``."""
    dirs, weights = [], []
    for i, el in enumerate(povm.elements):
        evals, _ = eig_hermitian(el.op)
        if el.weight <= tol or abs(evals[1]) > tol:
            raise NotRankOneError(f"element {i + 1} is not rank one (eigenvalues {evals})")
        n = bloch_vector(el.op) / el.weight
        dirs.append(n / np.linalg.norm(n))
        weights.append(el.weight)
    return np.array(dirs), np.array(weights)


def random_rank_one_povm(rng: np.random.Generator, n: int = 4) -> Povm:
    """Random rank-one POVM: ``S^{-1/2} g_x g_x^dagger S^{-1/2}`` with ``S = sum g g^dagger``."""
    g = rng.normal(size=(n, 2)) + 1j * rng.normal(size=(n, 2))
    s = sum(np.outer(v, v.conj()) for v in g)
    evals, vecs = np.linalg.eigh(s)
    s_inv_half = vecs @ np.diag(evals ** -0.5) @ vecs.conj().T
    ops = []
    for v in g:
        w = s_inv_half @ v
        ops.append(np.outer(w, w.conj()))
    return povm_from_effects(ops, label="random rank-one")

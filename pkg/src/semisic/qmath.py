"""Small complex linear algebra for a single qubit.

Operators are plain ``numpy`` arrays of shape (2, 2) and dtype complex128;
pure states are :class:`PureQubit`.  Eigendecompositions use the closed-form
2x2 formulas so results are deterministic down to the eigenvector phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from . import tolerances as TOL

Mat2 = NDArray[np.complex128]

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SX, SY, SZ)


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


def mat2(entries: ArrayLike) -> Mat2:
    """Coerce ``entries`` to a finite 2x2 complex array (copy)."""
    m = np.array(entries, dtype=np.complex128)
    if m.shape == (4,):
        m = m.reshape(2, 2)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def mat_mul(a: Mat2, b: Mat2) -> Mat2:
    return np.asarray(a) @ np.asarray(b)


def dagger(m: Mat2) -> Mat2:
    return np.conj(np.transpose(m))


def is_hermitian(m: Mat2, tol: float = TOL.HERMITIAN) -> bool:
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


def is_unitary(m: Mat2, tol: float = TOL.UNITARY) -> bool:
    return bool(np.max(np.abs(dagger(m) @ m - I2)) <= tol)


def is_positive_semidefinite(m: Mat2, tol: float = TOL.PSD) -> bool:
    if not is_hermitian(m, tol):
        return False
    return bool(eig_hermitian(m, tol=tol)[0][1] >= -tol)


def _canonical_phase(v: NDArray[np.complex128]) -> NDArray[np.complex128]:
    # first non-negligible amplitude made real positive
    for amp in v:
        if abs(amp) > 1e-14:
            return v * (abs(amp) / amp)
    return v


@dataclass(frozen=True)
class PureQubit:
    """Normalised qubit state ``amp_h |H> + amp_v |V>``."""

    amp_h: complex
    amp_v: complex

    def __post_init__(self):
        h, v = complex(self.amp_h), complex(self.amp_v)
        if not (math.isfinite(h.real) and math.isfinite(h.imag)
                and math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError("amplitudes must be finite")
        norm = abs(h) ** 2 + abs(v) ** 2
        if abs(norm - 1.0) > TOL.NORM:
            raise ValueError(f"state not normalised (|psi|^2 = {norm!r}); use PureQubit.normalized")
        object.__setattr__(self, "amp_h", h)
        object.__setattr__(self, "amp_v", v)

    @classmethod
    def normalized(cls, amp_h: complex, amp_v: complex) -> PureQubit:
        n = math.sqrt(abs(amp_h) ** 2 + abs(amp_v) ** 2)
        if n == 0.0:
            raise ValueError("cannot normalise the zero vector")
        return cls(amp_h / n, amp_v / n)

    @classmethod
    def from_vector(cls, v: ArrayLike) -> PureQubit:
        v = np.asarray(v, dtype=np.complex128).ravel()
        return cls.normalized(v[0], v[1])

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> PureQubit:
        """``cos(theta/2)|H> + exp(i phi) sin(theta/2)|V>``."""
        return cls.normalized(math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2))

    @property
    def vector(self) -> NDArray[np.complex128]:
        return np.array([self.amp_h, self.amp_v], dtype=np.complex128)

    def projector(self) -> Mat2:
        v = self.vector
        return np.outer(v, v.conj())

    def bloch(self) -> NDArray[np.float64]:
        return bloch_vector(self.projector())

    def canonical(self) -> PureQubit:
        """Same ray with the first nonzero amplitude real positive."""
        v = _canonical_phase(self.vector)
        return PureQubit.normalized(v[0], v[1])


H = PureQubit(1.0, 0.0)
V = PureQubit(0.0, 1.0)
PLUS = PureQubit.normalized(1.0, 1.0)


def density(m: ArrayLike, tol: float = TOL.HERMITIAN) -> Mat2:
    """Validate ``m`` as a density matrix and return it as an array."""
    m = mat2(m)
    if not is_hermitian(m, tol):
        raise NotHermitianError("density matrix must be Hermitian")
    if abs(np.trace(m).real - 1.0) > tol or abs(np.trace(m).imag) > tol:
        raise ValueError(f"density matrix must have unit trace, got {np.trace(m)}")
    if eig_hermitian(m, tol=tol)[0][1] < -tol:
        raise NotPSDError("density matrix must be positive semidefinite")
    return (m + dagger(m)) / 2


def as_density(state: PureQubit | ArrayLike) -> Mat2:
    if isinstance(state, PureQubit):
        return state.projector()
    return density(state)


def eig_hermitian(m: Mat2, tol: float = TOL.HERMITIAN) -> tuple[NDArray[np.float64], list[PureQubit]]:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix.

    Returns eigenvalues in descending order and the matching eigenvectors,
    each with its first nonzero amplitude real positive.  A degenerate
    spectrum returns the computational basis.
    """
    m = np.asarray(m, dtype=np.complex128)
    if np.max(np.abs(m - dagger(m))) > tol:
        raise NotHermitianError("eig_hermitian needs a Hermitian matrix")
    a = m[0, 0].real
    d = m[1, 1].real
    b = (m[0, 1] + np.conj(m[1, 0])) / 2
    mean = (a + d) / 2
    rad = math.hypot((a - d) / 2, abs(b))
    evals = np.array([mean + rad, mean - rad])
    if rad <= 1e-15 * max(1.0, abs(mean)):
        return evals, [H, V]
    lam = evals[0]
    c1 = np.array([b, lam - a])
    c2 = np.array([lam - d, np.conj(b)])
    v1 = c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2
    v1 = _canonical_phase(v1 / np.linalg.norm(v1))
    v2 = _canonical_phase(np.array([-np.conj(v1[1]), np.conj(v1[0])]))
    return evals, [PureQubit.normalized(*v1), PureQubit.normalized(*v2)]


def sqrt_psd(m: Mat2, tol: float = TOL.PSD) -> Mat2:
    """Principal square root of a PSD matrix."""
    try:
        evals, vecs = eig_hermitian(m, tol=tol)
    except NotHermitianError as exc:
        raise NotPSDError(str(exc)) from exc
    if evals[1] < -tol:
        raise NotPSDError(f"matrix has negative eigenvalue {evals[1]:.3e}")
    out = np.zeros((2, 2), dtype=np.complex128)
    for lam, v in zip(evals, vecs):
        out += math.sqrt(max(lam, 0.0)) * v.projector()
    return out


def hs_inner(a: Mat2, b: Mat2) -> float:
    """Re Tr[a^dagger b], written symmetrically so (a, b) and (b, a) agree bitwise."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return float(np.sum(a.real * b.real + a.imag * b.imag))


def fidelity(a: Mat2, b: Mat2) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(a) b sqrt(a)))^2`` of two qubit density matrices."""
    det_a = max(np.linalg.det(a).real, 0.0)
    det_b = max(np.linalg.det(b).real, 0.0)
    f = np.trace(np.asarray(a) @ np.asarray(b)).real + 2 * math.sqrt(det_a * det_b)
    return float(min(max(f, 0.0), 1.0))


def trace_distance(a: Mat2, b: Mat2) -> float:
    evals, _ = eig_hermitian(np.asarray(a) - np.asarray(b))
    return float(0.5 * np.sum(np.abs(evals)))


def phase_free_distance(u: Mat2, v: Mat2) -> float:
    """min over phi of the Frobenius norm of ``u - exp(i phi) v``."""
    u = np.asarray(u, dtype=np.complex128)
    v = np.asarray(v, dtype=np.complex128)
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def bloch_vector(m: Mat2) -> NDArray[np.float64]:
    """Components ``Tr[m sigma_i]`` (the Bloch vector when ``Tr m = 1``)."""
    m = np.asarray(m)
    return np.array([np.trace(m @ p).real for p in PAULIS])


def from_bloch(trace: float, n: ArrayLike) -> Mat2:
    """``(trace/2) (I + n . sigma)``."""
    n = np.asarray(n, dtype=float)
    return (trace / 2) * (I2 + n[0] * SX + n[1] * SY + n[2] * SZ)


def euler_unitary(alpha: float, beta: float, gamma: float, delta: float = 0.0) -> Mat2:
    """``exp(i delta) Rz(alpha) Ry(beta) Rz(gamma)``."""
    rz = lambda t: np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])
    ry = np.array([[math.cos(beta / 2), -math.sin(beta / 2)],
                   [math.sin(beta / 2), math.cos(beta / 2)]], dtype=np.complex128)
    return np.exp(1j * delta) * (rz(alpha) @ ry @ rz(gamma))


def random_unitary(rng: np.random.Generator) -> Mat2:
    """Haar-random 2x2 unitary via the Euler parametrisation."""
    alpha, gamma, delta = rng.uniform(0, 2 * np.pi, size=3)
    beta = 2 * math.acos(math.sqrt(rng.uniform()))
    return euler_unitary(alpha, beta, gamma, delta)


def random_hermitian(rng: np.random.Generator, scale: float = 1.0) -> Mat2:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return scale * (g + dagger(g)) / 2


def random_psd(rng: np.random.Generator) -> Mat2:
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return g @ dagger(g)


def random_density(rng: np.random.Generator) -> Mat2:
    p = random_psd(rng)
    return p / np.trace(p).real


def random_pure(rng: np.random.Generator) -> PureQubit:
    return PureQubit.from_vector(rng.normal(size=2) + 1j * rng.normal(size=2))

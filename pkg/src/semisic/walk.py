"""One-dimensional discrete-time quantum walk with site-dependent coins.

A step applies the coin ``C_{x,n}`` at every occupied site ``x`` and then
shifts ``|x, H> -> |x+1, H>`` and ``|x, V> -> |x-1, V>``.  Detecting the
walker's final position realises a POVM on the initial coin state; the
compiler below inverts that map for four-outcome rank-one qubit POVMs using a
fixed five-step template:

    step 1, site 0   general unitary (state rotation)
    step 2, site 1   real reflection; H output exits to port +5
    step 2, site -1  sigma_x
    step 3, site 0   general unitary
    step 4, site 1   real reflection; H output exits to port +3
    step 4, site -1  sigma_x
    step 5, site 0   general unitary; H -> port +1, V -> port -1

Outcome ``i`` of the POVM corresponds to the ``i``-th port in descending
position order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np
from numpy.typing import NDArray
from scipy.linalg import expm, logm
from scipy.optimize import least_squares

from . import tolerances as TOL
from .povm import NotRankOneError, Povm, povm_from_effects, verify_povm
from .qmath import I2, SX, Mat2, PureQubit, as_density, dagger, is_unitary, mat2
from .serialize import mat2_from_json, mat2_to_json, povm_to_dict

TEMPLATE_SLOTS = ((1, 0), (2, 1), (2, -1), (3, 0), (4, 1), (4, -1), (5, 0))


class CompilationFailedError(RuntimeError):
    pass


class CoinOp(NamedTuple):
    step: int
    site: int
    matrix: Mat2


@dataclass(frozen=True)
class CoinSchedule:
    """Sparse map ``(step, site) -> coin``; unspecified coins are the identity."""

    steps: int
    coins: Mapping[tuple[int, int], Mat2] = field(default_factory=dict)
    initial_site: int = 0

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("a schedule needs at least one step")
        clean = {}
        for key, m in dict(self.coins).items():
            step, site = int(key[0]), int(key[1])
            if not 1 <= step <= self.steps:
                raise ValueError(f"coin at step {step} outside 1..{self.steps}")
            m = mat2(m)
            if not is_unitary(m):
                raise ValueError(f"coin at (step={step}, site={site}) is not unitary")
            m.setflags(write=False)
            clean[(step, site)] = m
        object.__setattr__(self, "coins", clean)

    def coin(self, step: int, site: int) -> Mat2:
        return self.coins.get((step, site), I2)

    def ops(self) -> list[CoinOp]:
        return [CoinOp(s, x, m) for (s, x), m in sorted(self.coins.items())]

    def replace(self, updates: Mapping[tuple[int, int], Mat2]) -> CoinSchedule:
        coins = dict(self.coins)
        coins.update(updates)
        return CoinSchedule(self.steps, coins, self.initial_site)

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "initial_site": self.initial_site,
            "coins": [{"step": op.step, "site": op.site, "matrix": mat2_to_json(op.matrix)} for op in self.ops()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> CoinSchedule:
        coins = {}
        for entry in data["coins"]:
            key = (int(entry["step"]), int(entry["site"]))
            if key in coins:
                raise ValueError(f"duplicate coin at {key}")
            coins[key] = mat2_from_json(entry["matrix"])
        return cls(int(data["steps"]), coins, int(data.get("initial_site", 0)))


def identity_schedule(steps: int = 5) -> CoinSchedule:
    return CoinSchedule(steps)


@dataclass
class WalkState:
    """Amplitudes keyed by position; each value is the (H, V) coin vector."""

    amplitudes: dict[int, NDArray[np.complex128]]

    @classmethod
    def localized(cls, psi: PureQubit | NDArray, site: int = 0) -> WalkState:
        v = psi.vector if isinstance(psi, PureQubit) else np.asarray(psi, dtype=np.complex128)
        return cls({site: v.copy()})

    def norm(self) -> float:
        return math.sqrt(sum(float(np.vdot(v, v).real) for v in self.amplitudes.values()))

    def position_probabilities(self) -> dict[int, float]:
        return {x: float(np.vdot(v, v).real) for x, v in sorted(self.amplitudes.items(), reverse=True)}


def step_walk(state: WalkState, schedule: CoinSchedule, n: int) -> WalkState:
    if not 1 <= n <= schedule.steps:
        raise ValueError(f"step {n} outside 1..{schedule.steps}")
    out: dict[int, NDArray[np.complex128]] = {}
    for x, amp in state.amplitudes.items():
        v = schedule.coin(n, x) @ amp
        if v[0] != 0:
            out.setdefault(x + 1, np.zeros(2, dtype=np.complex128))[0] += v[0]
        if v[1] != 0:
            out.setdefault(x - 1, np.zeros(2, dtype=np.complex128))[1] += v[1]
    return WalkState(out)


@dataclass
class WalkRun:
    state: WalkState
    distribution: dict[int, float]

    def probabilities(self, ports: Iterable[int]) -> NDArray[np.float64]:
        return np.array([self.distribution.get(x, 0.0) for x in ports])


def run_walk(psi: PureQubit | NDArray, schedule: CoinSchedule) -> WalkRun:
    state = WalkState.localized(psi, schedule.initial_site)
    for n in range(1, schedule.steps + 1):
        state = step_walk(state, schedule, n)
    return WalkRun(state, state.position_probabilities())


@dataclass(frozen=True)
class Port:
    final_position: int
    kraus_rows: NDArray[np.complex128]
    effect: Mat2


@dataclass(frozen=True)
class KrausSet:
    ports: tuple[Port, ...]

    @property
    def positions(self) -> list[int]:
        return [p.final_position for p in self.ports]

    @property
    def effects(self) -> list[Mat2]:
        return [p.effect for p in self.ports]

    def to_povm(self, label: str = "walk effective POVM", B: float | None = None) -> Povm:
        return povm_from_effects(self.effects, label=label, B=B)

    def residual(self, target: Povm) -> float:
        """Largest Frobenius distance between matching effects (inf on a port-count mismatch)."""
        if len(self.ports) != len(target):
            return math.inf
        return float(max(np.linalg.norm(f - e) for f, e in zip(self.effects, target.ops)))

    def residual_at(self, positions: Iterable[int], target: Povm) -> float:
        """Like :meth:`residual` but pairs ``target`` elements with explicit positions."""
        lookup = {p.final_position: p.effect for p in self.ports}
        zero = np.zeros((2, 2))
        return float(max(np.linalg.norm(lookup.get(x, zero) - e) for x, e in zip(positions, target.ops)))

    def to_dict(self) -> dict:
        data = povm_to_dict(self.to_povm())
        for entry, port in zip(data["elements"], self.ports):
            entry["final_position"] = port.final_position
        return data


def _propagate_basis(schedule: CoinSchedule) -> dict[int, NDArray[np.complex128]]:
    """Map final position -> 2x2 matrix ``A`` (rows: coin H/V, columns: input H/V)."""
    cols = []
    for basis in (np.array([1, 0], dtype=np.complex128), np.array([0, 1], dtype=np.complex128)):
        cols.append(run_walk(basis, schedule).state.amplitudes)
    positions = sorted(set(cols[0]) | set(cols[1]), reverse=True)
    zero = np.zeros(2, dtype=np.complex128)
    return {x: np.column_stack([cols[0].get(x, zero), cols[1].get(x, zero)]) for x in positions}


def effective_povm(schedule: CoinSchedule, support_tol: float = 1e-14) -> KrausSet:
    """Effects ``F_x = A_x^dagger A_x`` for every final position with support."""
    ports = []
    for x, a in _propagate_basis(schedule).items():
        effect = dagger(a) @ a
        if np.trace(effect).real <= support_tol:
            continue
        rows = a[np.linalg.norm(a, axis=1) > 0]
        ports.append(Port(final_position=x, kraus_rows=rows, effect=effect))
    return KrausSet(tuple(ports))


def port_probabilities(schedule: CoinSchedule, state: PureQubit | NDArray, ports: Iterable[int] | None = None) -> NDArray[np.float64]:
    """Outcome distribution for a pure or mixed input over ``ports`` (default: effective ports)."""
    kraus = effective_povm(schedule)
    rho = as_density(state)
    lookup = {p.final_position: p.effect for p in kraus.ports}
    ports = kraus.positions if ports is None else list(ports)
    zero = np.zeros((2, 2))
    probs = np.array([np.trace(rho @ lookup.get(x, zero)).real for x in ports])
    return np.clip(probs, 0.0, None)


def evolve_density(schedule: CoinSchedule, rho: NDArray, dephasing: float = 0.0) -> dict[int, float]:
    """Density-matrix walk with optional position dephasing before every recombining step.

    With probability ``dephasing`` the coherence between distinct positions
    is erased before the coins of steps 2..N act, i.e. each interferometer
    recombination is mixed with an incoherent (leakage) term.
    """
    lo = schedule.initial_site - schedule.steps
    npos = 2 * schedule.steps + 1
    dim = 2 * npos
    full = np.zeros((dim, dim), dtype=np.complex128)
    i0 = 2 * (schedule.initial_site - lo)
    full[i0:i0 + 2, i0:i0 + 2] = as_density(rho)
    block_mask = np.kron(np.eye(npos), np.ones((2, 2)))
    for n in range(1, schedule.steps + 1):
        if dephasing > 0 and n > 1:
            full = (1 - dephasing) * full + dephasing * full * block_mask
        u = np.zeros((dim, dim), dtype=np.complex128)
        for j in range(npos):
            x = lo + j
            c = schedule.coin(n, x)
            if j + 1 < npos:
                u[2 * (j + 1), 2 * j:2 * j + 2] += c[0]
            if j - 1 >= 0:
                u[2 * (j - 1) + 1, 2 * j:2 * j + 2] += c[1]
        full = u @ full @ dagger(u)
    diag = np.real(np.diag(full))
    return {lo + j: float(diag[2 * j] + diag[2 * j + 1]) for j in reversed(range(npos))}


# ---------------------------------------------------------------- compiler


def _reflection(c: float) -> Mat2:
    c = min(max(c, 0.0), 1.0)
    s = math.sqrt(max(1.0 - c * c, 0.0))
    return np.array([[c, s], [s, -c]], dtype=np.complex128)


def _swap_scale(s: float) -> Mat2:
    # survivor map of one exit stage: H slot <- V branch (via sigma_x), V slot <- s * H branch
    return np.array([[0.0, 1.0], [s, 0.0]], dtype=np.complex128)


def _closest_unitary(m: Mat2) -> Mat2:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _template_schedule(c01: Mat2, c1: float, c03: Mat2, c2: float, c05: Mat2) -> CoinSchedule:
    return CoinSchedule(5, {
        (1, 0): c01,
        (2, 1): _reflection(c1),
        (2, -1): SX,
        (3, 0): c03,
        (4, 1): _reflection(c2),
        (4, -1): SX,
        (5, 0): c05,
    })


def _peel(weights: NDArray, vectors: list[NDArray]) -> tuple:
    a, b = vectors[0]
    c01 = np.array([[np.conj(a), np.conj(b)], [-b, a]], dtype=np.complex128)
    c1 = math.sqrt(min(weights[0], 1.0))
    m1 = _swap_scale(math.sqrt(max(1.0 - c1 * c1, 0.0))) @ c01

    row = vectors[1].conj() @ np.linalg.pinv(m1)
    nu = np.linalg.norm(row)
    row = row / nu
    c03 = np.array([row, [np.conj(row[1]), -np.conj(row[0])]], dtype=np.complex128)
    c2 = min(math.sqrt(weights[1]) * nu, 1.0)
    m2 = _swap_scale(math.sqrt(max(1.0 - c2 * c2, 0.0))) @ c03 @ m1

    m2_inv = np.linalg.pinv(m2)
    c05 = np.array([math.sqrt(weights[i]) * (vectors[i].conj() @ m2_inv) for i in (2, 3)])
    if not is_unitary(c05, 1e-12):
        c05 = _closest_unitary(c05)
    return c01, c1, c03, c2, c05


def _unitary_params(u: Mat2) -> NDArray[np.float64]:
    h = -1j * logm(u)
    h = (h + dagger(h)) / 2
    return np.array([h[0, 0].real, h[1, 1].real, h[0, 1].real, h[0, 1].imag])


def _unitary_from(p: NDArray[np.float64]) -> Mat2:
    h = np.array([[p[0], p[2] + 1j * p[3]], [p[2] - 1j * p[3], p[1]]])
    return expm(1j * h)


def _refine(target: Povm, start: tuple, tol: float) -> CoinSchedule:
    c01, c1, c03, c2, c05 = start
    x0 = np.concatenate([
        _unitary_params(c01), [math.acos(c1)], _unitary_params(c03), [math.acos(c2)], _unitary_params(c05),
    ])

    def unpack(x):
        return _template_schedule(_unitary_from(x[0:4]), math.cos(x[4]), _unitary_from(x[5:9]),
                                  math.cos(x[9]), _unitary_from(x[10:14]))

    def resid(x):
        eff = effective_povm(unpack(x), support_tol=-1.0)
        lookup = {p.final_position: p.effect for p in eff.ports}
        out = []
        for pos, e in zip((5, 3, 1, -1), target.ops):
            d = lookup.get(pos, np.zeros((2, 2))) - e
            out.extend([d.real.ravel(), d.imag.ravel()])
        return np.concatenate(out)

    best = None
    rng = np.random.default_rng(0)
    for attempt in range(8):
        guess = x0 if attempt == 0 else x0 + rng.normal(scale=0.3, size=x0.shape)
        sol = least_squares(resid, guess, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
        if best is None or sol.cost < best.cost:
            best = sol
        if math.sqrt(2 * best.cost) <= tol / 10:
            break
    return unpack(best.x)


def _canonicalize_final(c05: Mat2, m2_rows: NDArray) -> Mat2:
    # exiting rows of the last coin: first nonzero entry of each Kraus row real positive
    out = c05.copy()
    for i in range(2):
        k = out[i] @ m2_rows
        for amp in k:
            if abs(amp) > 1e-14:
                out[i] *= abs(amp) / amp
                break
    return out


def compile_povm(target: Povm, tol: float = TOL.COMPILE) -> CoinSchedule:
    """Five-step coin schedule whose effective POVM reproduces ``target``.

    Sequential peeling: each exit stage fixes one coin row so that the
    exiting Kraus row is ``sqrt(a_i) <phi_i|``; the surviving branch is the
    linear map ``M`` with ``M^dagger M = I - sum_{j<=i} E_j``.  A damped
    least-squares refinement takes over if the analytic branch leaves a
    residual above ``tol`` (degenerate survivors).
    """
    if len(target) != 4:
        raise ValueError("the five-step template realises exactly four outcomes")
    report = verify_povm(target)
    if not (report.checks["complete"] and report.checks["positive"]):
        raise ValueError(f"target is not a valid POVM: {report.failures()}")
    if not report.checks["rank_one"] or any(el.vector is None for el in target.elements):
        raise NotRankOneError("compile_povm needs rank-one elements")

    weights = target.weights
    vectors = [el.vector.canonical().vector for el in target.elements]
    c01, c1, c03, c2, c05 = _peel(weights, vectors)
    m2 = _swap_scale(math.sqrt(max(1 - c2 * c2, 0.0))) @ c03 @ _swap_scale(math.sqrt(max(1 - c1 * c1, 0.0))) @ c01
    c05 = _canonicalize_final(c05, m2)
    schedule = _template_schedule(c01, c1, c03, c2, c05)
    if _round_trip_residual(schedule, target) > tol:
        schedule = _refine(target, (c01, c1, c03, c2, c05), tol)
    residual = _round_trip_residual(schedule, target)
    if residual > tol:
        raise CompilationFailedError(f"round-trip residual {residual:.3e} exceeds {tol:.1e}")
    return schedule


def _round_trip_residual(schedule: CoinSchedule, target: Povm) -> float:
    return effective_povm(schedule, support_tol=-1.0).residual_at((5, 3, 1, -1), target)


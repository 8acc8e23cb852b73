"""Prepare-and-measure self-testing of semi-SIC POVMs.

Alice prepares ``rho_x`` (x = 1..4); Bob either measures one of three
dichotomic observables ``O_y`` (``M_{0|y} = (I + O_y)/2``) or the
four-outcome POVM ``M_{b|4}``.  The witness is

    W = sum_{x,y} omega[x, y] Tr[rho_x O_y] - k sum_x p(b = x | x, 4)

and for qubits its maximum is ``Q(B) = 24 sqrt(B / (24B - 1))``.  The
penalty term is non-negative, so ``W = Q`` forces both the correlation part
to be maximal and every ``M_{x|4}`` to annihilate ``rho_x``; for the
witnesses shipped here that pins the POVM to the semi-SIC with overlap ``B``.

Witness coefficients use a two-parameter family symmetric under the pair
swaps (1 2)(3 4)::

    omega = s * [[ 1,  d1,  d1],
                 [ 1, -d1, -d1],
                 [-1,  d2, -d2],
                 [-1, -d2,  d2]]

fitted numerically by :func:`fit_witness`.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import minimize

from . import tolerances as TOL
from .optics import NoiseModel, apply_noise
from .povm import Povm, b_label, build_semi_sic, parse_b, povm_from_effects, semi_sic_params, verify_povm
from .qmath import I2, PAULIS, Mat2, bloch_vector, dagger, density, eig_hermitian, is_hermitian
from .serialize import mat2_to_json
from .walk import compile_povm

N_PREP = 4
N_DICHOTOMIC = 3


class FitFailedError(RuntimeError):
    pass


def q_max(B: str | float | Fraction) -> float:
    b = parse_b(B)
    return 24.0 * math.sqrt(b / (24.0 * b - 1.0))


@dataclass(frozen=True)
class PamScenario:
    preparations: tuple[Mat2, ...]
    observables: tuple[Mat2, ...]
    povm4: Povm
    B: float | None = None

    def __post_init__(self):
        if len(self.preparations) != N_PREP or len(self.observables) != N_DICHOTOMIC or len(self.povm4) != 4:
            raise ValueError("scenario needs 4 preparations, 3 observables and a 4-outcome POVM")
        preps = tuple(density(r) for r in self.preparations)
        obs = []
        for o in self.observables:
            o = np.asarray(o, dtype=np.complex128)
            if not is_hermitian(o):
                raise ValueError("dichotomic observables must be Hermitian")
            evals, _ = eig_hermitian(o)
            if evals[0] > 1 + 1e-10 or evals[1] < -1 - 1e-10:
                raise ValueError("observable spectrum must lie in [-1, 1]")
            obs.append((o + dagger(o)) / 2)
        report = verify_povm(self.povm4)
        if not (report.checks["complete"] and report.checks["positive"]):
            raise ValueError(f"invalid four-outcome POVM: {report.failures()}")
        object.__setattr__(self, "preparations", preps)
        object.__setattr__(self, "observables", tuple(obs))

    def with_povm(self, povm4: Povm) -> PamScenario:
        return PamScenario(self.preparations, self.observables, povm4, self.B)

    def to_dict(self) -> dict:
        return {
            "B": self.B,
            "preparations": [mat2_to_json(r) for r in self.preparations],
            "observables": [mat2_to_json(o) for o in self.observables],
            "povm4": [mat2_to_json(m) for m in self.povm4.ops],
        }


@dataclass(frozen=True)
class WitnessSpec:
    omega: NDArray[np.float64]
    k: float = 1.0
    B: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.shape != (N_PREP, N_DICHOTOMIC):
            raise ValueError(f"omega must be 4x3, got {omega.shape}")
        if not self.k > 0:
            raise ValueError("k must be positive")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    def to_dict(self) -> dict:
        return {"B": self.B, "omega": self.omega.tolist(), "k": self.k, "meta": dict(self.meta)}

    @classmethod
    def from_dict(cls, data: dict) -> WitnessSpec:
        B = data.get("B")
        if isinstance(B, str):
            B = parse_b(B)
        return cls(np.array(data["omega"], dtype=float), float(data["k"]), B, dict(data.get("meta", {})))


@dataclass
class WitnessResult:
    w: float
    w1: float
    penalty_term: float
    k: float
    q_bound: float | None = None
    stderr: float | None = None
    sweeps: int | None = None
    history: tuple[float, ...] = ()

    @property
    def gap(self) -> float | None:
        return None if self.q_bound is None else self.q_bound - self.w

    @property
    def exceeds_bound(self) -> bool:
        """Flag for estimates above the quantum maximum (possible with finite statistics)."""
        return self.q_bound is not None and self.w > self.q_bound

    def to_dict(self) -> dict:
        return {
            "w": self.w,
            "w1": self.w1,
            "penalty_term": self.penalty_term,
            "k": self.k,
            "q_bound": self.q_bound,
            "gap": self.gap,
            "stderr": self.stderr,
            "exceeds_bound": self.exceeds_bound,
            "sweeps": self.sweeps,
        }


@dataclass(frozen=True)
class PamStatistics:
    """``dichotomic[x, y, b]`` and ``four[x, b]`` outcome probabilities (or frequencies)."""

    dichotomic: NDArray[np.float64]
    four: NDArray[np.float64]


def scenario_probabilities(s: PamScenario, clamp: float = TOL.CLAMP) -> PamStatistics:
    p2 = np.empty((N_PREP, N_DICHOTOMIC, 2))
    p4 = np.empty((N_PREP, 4))
    for x, rho in enumerate(s.preparations):
        for y, o in enumerate(s.observables):
            e = np.trace(rho @ o).real
            p2[x, y] = ((1 + e) / 2, (1 - e) / 2)
        p4[x] = [np.trace(rho @ m).real for m in s.povm4.ops]
    for arr in (p2, p4):
        if np.any(arr < -clamp) or np.any(arr > 1 + clamp):
            raise ValueError("probability outside [0, 1]")
    return PamStatistics(np.clip(p2, 0.0, 1.0), np.clip(p4, 0.0, 1.0))


def witness_from_statistics(stats: PamStatistics, spec: WitnessSpec, B: float | None = None) -> WitnessResult:
    """The witness as an affine functional of the probability table."""
    correlators = stats.dichotomic[:, :, 0] - stats.dichotomic[:, :, 1]
    w1 = float(np.sum(spec.omega * correlators))
    penalty = float(np.trace(stats.four))
    q = q_max(B) if B is not None else None
    return WitnessResult(w=w1 - spec.k * penalty, w1=w1, penalty_term=penalty, k=spec.k, q_bound=q)


def evaluate_witness(s: PamScenario, spec: WitnessSpec) -> WitnessResult:
    return witness_from_statistics(scenario_probabilities(s), spec, s.B)


# ---------------------------------------------------------------- see-saw


def _sign_operator(h: Mat2, previous: Mat2 | None) -> Mat2:
    evals, vecs = eig_hermitian(h)
    if previous is not None and np.all(np.abs(evals) < 1e-14):
        return previous
    out = np.zeros((2, 2), dtype=np.complex128)
    for lam, v in zip(evals, vecs):
        out += (1.0 if lam >= 0 else -1.0) * v.projector()
    return out


def _top_projector(a: Mat2, previous: Mat2 | None) -> Mat2:
    evals, vecs = eig_hermitian(a)
    if previous is not None and evals[0] - evals[1] < 1e-12:
        return previous
    return vecs[0].projector()


def _polar(z: NDArray) -> NDArray:
    u, _, vh = np.linalg.svd(z, full_matrices=False)
    return u @ vh


def _isometry_effects(iso: NDArray) -> list[Mat2]:
    # row x of the 4x2 isometry is a_x^dagger, M_x = a_x a_x^dagger
    return [np.outer(iso[x].conj(), iso[x]) for x in range(iso.shape[0])]


def _povm_step(rhos: Sequence[Mat2], iso: NDArray, max_iter: int = 400, tol: float = 1e-14) -> NDArray:
    """Minimise sum_x Tr[rho_x M_x] over rank-one POVMs by descent on the Stiefel manifold.

    Every accepted step lowers the objective (Armijo), so the outer see-saw
    stays monotone.
    """

    def f(a):
        return sum((a[x] @ rhos[x] @ a[x].conj()).real for x in range(len(rhos)))

    fa, step = f(iso), 1.0
    for _ in range(max_iter):
        g = np.array([iso[x] @ rhos[x] for x in range(len(rhos))])
        g = g - iso @ ((dagger(iso) @ g + dagger(g) @ iso) / 2)
        gn2 = float(np.vdot(g, g).real)
        if gn2 < 1e-26:
            break
        while True:
            cand = _polar(iso - step * g)
            fc = f(cand)
            if fc <= fa - 1e-4 * step * gn2:
                break
            step *= 0.5
            if step < 1e-14:
                return iso
        improvement = fa - fc
        iso, fa = cand, fc
        if improvement < tol:
            break
        step = min(step * 2.0, 4.0)
    return iso


@dataclass
class SeesawRun:
    scenario: PamScenario
    result: WitnessResult
    history: list[float]
    converged: bool


def _witness_value(rhos, obs, effects, spec: WitnessSpec) -> float:
    w1 = sum(spec.omega[x, y] * np.trace(rhos[x] @ obs[y]).real for x in range(N_PREP) for y in range(N_DICHOTOMIC))
    pen = sum(np.trace(rhos[x] @ effects[x]).real for x in range(N_PREP))
    return float(w1 - spec.k * pen)


def seesaw_run(
    spec: WitnessSpec,
    rng: np.random.Generator,
    max_sweeps: int = TOL.SEESAW_SWEEPS,
    tol: float = TOL.SEESAW_DELTA,
    fixed_preparations: Sequence[Mat2] | None = None,
) -> SeesawRun:
    """One see-saw restart from a random isometry and random observables."""
    z = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
    iso = _polar(z)
    effects = _isometry_effects(iso)
    obs = []
    for _ in range(N_DICHOTOMIC):
        h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        obs.append(_sign_operator(h + dagger(h), None))
    rhos: list[Mat2 | None] = [None] * N_PREP if fixed_preparations is None else [density(r) for r in fixed_preparations]
    history: list[float] = []
    converged = False
    for _ in range(max_sweeps):
        if fixed_preparations is None:
            for x in range(N_PREP):
                a = sum(spec.omega[x, y] * obs[y] for y in range(N_DICHOTOMIC)) - spec.k * effects[x]
                rhos[x] = _top_projector(a, rhos[x])
        obs = [_sign_operator(sum(spec.omega[x, y] * rhos[x] for x in range(N_PREP)), obs[y]) for y in range(N_DICHOTOMIC)]
        iso = _povm_step(rhos, iso)
        effects = _isometry_effects(iso)
        value = _witness_value(rhos, obs, effects, spec)
        if history and value - history[-1] <= tol:
            history.append(max(value, history[-1]) if value >= history[-1] - 1e-12 else value)
            converged = True
            break
        history.append(value)
    povm = povm_from_effects(effects, label="see-saw optimum", B=spec.B)
    scenario = PamScenario(tuple(rhos), tuple(obs), povm, spec.B)
    result = evaluate_witness(scenario, spec)
    result.sweeps = len(history)
    result.history = tuple(history)
    return SeesawRun(scenario, result, history, converged)


def seesaw_optimize(
    spec: WitnessSpec,
    restarts: int = 50,
    seed: int = 0,
    max_sweeps: int = TOL.SEESAW_SWEEPS,
    tol: float = TOL.SEESAW_DELTA,
    threads: int = 1,
    fixed_preparations: Sequence[Mat2] | None = None,
) -> tuple[PamScenario, WitnessResult]:
    """Best of ``restarts`` independent see-saw runs.

    Restart ``i`` draws from the ``i``-th child of ``SeedSequence(seed)``,
    so the output does not depend on ``threads``.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    seeds = np.random.SeedSequence(seed).spawn(restarts)

    def one(ss):
        return seesaw_run(spec, np.random.default_rng(ss), max_sweeps, tol, fixed_preparations)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(ss) for ss in seeds]
    best = max(range(restarts), key=lambda i: (runs[i].result.w, -i))
    return runs[best].scenario, runs[best].result


# ---------------------------------------------------------------- witness family


def ansatz_omega(d1: float, d2: float, scale: float = 1.0) -> NDArray[np.float64]:
    return scale * np.array([[1.0, d1, d1], [1.0, -d1, -d1], [-1.0, d2, -d2], [-1.0, -d2, d2]])


def stationary_parameters(B: str | float | Fraction) -> tuple[float, float]:
    """``(d1, d2)`` for which the semi-SIC configuration is a stationary point of ``W1``.

    With preparations ``-n_x`` the pair (1, 2) makes angle ``A`` with the
    symmetry axis and (3, 4) angle ``C``; the semi-SIC has
    ``cos A = sqrt(B)/a_-`` and ``cos C = sqrt(B)/a_+``, and stationarity of
    ``2(cos A + cos C) + 4 sqrt(d1^2 sin^2 A + d2^2 sin^2 C)`` fixes d1, d2.
    """
    p = semi_sic_params(B)
    c_a = math.sqrt(p.B) / p.a_minus
    c_c = math.sqrt(p.B) / p.a_plus
    r = (1 - c_a ** 2) / (2 * c_a) + (1 - c_c ** 2) / (2 * c_c)
    return math.sqrt(r / (2 * c_a)), math.sqrt(r / (2 * c_c))


def _maximize_correlations(omega: NDArray, rng: np.random.Generator, restarts: int = 6, sweeps: int = 200) -> tuple[float, list[Mat2]]:
    """Maximise W1 alone over pure preparations and sign observables."""
    spec = WitnessSpec(omega, 1.0)
    best_val, best_rhos = -math.inf, None
    for _ in range(restarts):
        obs = []
        for _ in range(N_DICHOTOMIC):
            h = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            obs.append(_sign_operator(h + dagger(h), None))
        rhos: list = [None] * N_PREP
        last = -math.inf
        for _ in range(sweeps):
            for x in range(N_PREP):
                rhos[x] = _top_projector(sum(spec.omega[x, y] * obs[y] for y in range(N_DICHOTOMIC)), rhos[x])
            obs = [_sign_operator(sum(spec.omega[x, y] * rhos[x] for x in range(N_PREP)), obs[y]) for y in range(N_DICHOTOMIC)]
            val = sum(spec.omega[x, y] * np.trace(rhos[x] @ obs[y]).real for x in range(N_PREP) for y in range(N_DICHOTOMIC))
            if val - last <= 1e-13:
                break
            last = val
        if val > best_val:
            best_val, best_rhos = val, list(rhos)
    return float(best_val), best_rhos


def antidistinguishing_povm(rhos: Sequence[Mat2]) -> Povm | None:
    """The rank-one POVM with ``Tr[rho_x M_x] = 0`` for four pure states, if it exists."""
    dirs = np.array([-bloch_vector(r) for r in rhos])
    a = np.vstack([dirs.T, np.ones(N_PREP)])
    try:
        weights = np.linalg.solve(a, np.array([0.0, 0.0, 0.0, 2.0]))
    except np.linalg.LinAlgError:
        return None
    if np.any(weights < -1e-12):
        return None
    ops = [w / 2 * (I2 + sum(n[i] * s for i, s in enumerate(PAULIS))) for w, n in zip(weights, dirs)]
    return povm_from_effects(ops, label="anti-distinguishing")



def semi_sic_residual(povm: Povm, B: float) -> float:
    """max(|Tr[E_x E_y] - B|, |sorted traces - (a-, a-, a+, a+)|)."""
    report = verify_povm(povm, B)
    return float(max(report.symmetry_residual, report.trace_spectrum_residual))


def fit_witness(
    B: str | float | Fraction,
    seed: int = 0,
    start: str | tuple[float, float] = "stationary",
    restarts: int = 50,
    tol: float = TOL.SELFTEST,
    max_evals: int = 400,
) -> WitnessSpec:
    """Fit ``(d1, d2)`` of the symmetric witness family for a target ``B``.

    Nelder-Mead on the semi-SIC residual of the POVM that anti-distinguishes
    the W1-optimal preparations, from ``start`` (the stationary-point
    estimate, ``"generic"`` = (1, 1), or an explicit pair).  The fitted
    ``omega`` is rescaled so that its qubit maximum equals ``q_max(B)`` and
    then certified with a full see-saw; failure raises :class:`FitFailedError`.
    """
    b = parse_b(B)
    q = q_max(B)
    if start == "stationary":
        x0 = np.array(stationary_parameters(B))
    elif start == "generic":
        x0 = np.array([1.0, 1.0])
    else:
        x0 = np.array(start, dtype=float)

    def objective(x):
        if np.any(x <= 0):
            return 10.0
        val, rhos = _maximize_correlations(ansatz_omega(*x), np.random.default_rng(seed))
        povm = antidistinguishing_povm(rhos)
        return 10.0 if povm is None else semi_sic_residual(povm, b)

    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxfev": max_evals, "initial_simplex": [x0, x0 * [1.02, 1.0], x0 * [1.0, 1.02]]})
    d1, d2 = (float(v) for v in res.x)
    raw, _ = _maximize_correlations(ansatz_omega(d1, d2), np.random.default_rng(seed))
    scale = q / raw
    spec = WitnessSpec(ansatz_omega(d1, d2, scale), k=1.0, B=b, meta={
        "B_label": b_label(B), "seed": seed, "family": "pair-symmetric", "d1": d1, "d2": d2,
        "scale": scale, "start": start if isinstance(start, str) else list(start), "fit_residual": float(res.fun),
    })
    scenario, result = seesaw_optimize(spec, restarts=restarts, seed=seed)
    certificate = semi_sic_residual(scenario.povm4, b)
    if abs(result.w - q) > tol or certificate > tol:
        raise FitFailedError(f"B={b_label(B)}: see-saw value {result.w:.6f} vs Q={q:.6f}, semi-SIC residual {certificate:.2e}")
    spec.meta.update({"seesaw_value": result.w, "semi_sic_residual": certificate, "restarts": restarts})
    return spec


def _data_name(B: float) -> str:
    return "witness_" + b_label(B).replace("/", "_") + ".json"


def default_witness(B: str | float | Fraction) -> WitnessSpec:
    """Shipped witness for B in {1/12, 1/13, 1/14, 1/15}; other B are fitted on the fly."""
    b = parse_b(B)
    res = resources.files("semisic") / "data" / _data_name(b)
    if res.is_file():
        return WitnessSpec.from_dict(json.loads(res.read_text()))
    return fit_witness(B)


def optimal_scenario(B: str | float | Fraction, spec: WitnessSpec | None = None) -> PamScenario:
    """Ideal scenario built from the semi-SIC itself: ``rho_x`` orthogonal to ``E_x``."""
    b = parse_b(B)
    spec = spec if spec is not None else default_witness(B)
    povm = build_semi_sic(B)
    rhos = [I2 - el.vector.projector() for el in povm.elements]
    obs = [_sign_operator(sum(spec.omega[x, y] * rhos[x] for x in range(N_PREP)), None) for y in range(N_DICHOTOMIC)]
    return PamScenario(tuple(rhos), tuple(obs), povm, b)


# ---------------------------------------------------------------- finite statistics


@dataclass(frozen=True)
class Counts:
    dichotomic: NDArray[np.int64]
    four: NDArray[np.int64]
    shots: int

    def rows(self) -> list[tuple[int, int, int, int]]:
        """(x, y, b, count) with 1-based x, y; y = 4 is the POVM setting with b = 1..4."""
        out = []
        for x in range(N_PREP):
            for y in range(N_DICHOTOMIC):
                for b in range(2):
                    out.append((x + 1, y + 1, b, int(self.dichotomic[x, y, b])))
            for b in range(4):
                out.append((x + 1, 4, b + 1, int(self.four[x, b])))
        return out


def noisy_statistics(s: PamScenario, model: NoiseModel | None) -> PamStatistics:
    """Exact statistics with the optical noise model applied to the four-outcome setting.

    Dichotomic settings are left ideal.  Plate jitter and leakage need pure
    preparations (the walk is re-run from each preparation's state).
    """
    stats = scenario_probabilities(s)
    if model is None or model.is_noiseless:
        return stats
    needs_walk = model.plate_sigma > 0 or model.leakage > 0
    schedule = compile_povm(s.povm4) if needs_walk else None
    four = np.empty_like(stats.four)
    for x, rho in enumerate(s.preparations):
        psi = None
        if needs_walk:
            evals, vecs = eig_hermitian(rho)
            if evals[1] > 1e-9:
                raise ValueError("walk-level noise needs pure preparations")
            psi = vecs[0]
        four[x] = apply_noise(stats.four[x], model, schedule, psi)
    return PamStatistics(stats.dichotomic, four)


def sample_counts(s: PamScenario, shots_per_setting: int, model: NoiseModel | None, rng: np.random.Generator) -> Counts:
    stats = noisy_statistics(s, model)
    c2 = np.empty((N_PREP, N_DICHOTOMIC, 2), dtype=np.int64)
    c4 = np.empty((N_PREP, 4), dtype=np.int64)
    for x in range(N_PREP):
        for y in range(N_DICHOTOMIC):
            c2[x, y] = rng.multinomial(shots_per_setting, stats.dichotomic[x, y] / stats.dichotomic[x, y].sum())
        c4[x] = rng.multinomial(shots_per_setting, stats.four[x] / stats.four[x].sum())
    return Counts(c2, c4, shots_per_setting)


def witness_from_counts(counts: Counts, spec: WitnessSpec, B: float | None, rng: np.random.Generator, n_boot: int = 1000) -> WitnessResult:
    """Point estimate from frequencies and a nonparametric bootstrap standard error."""
    n = counts.shots
    f2 = counts.dichotomic / n
    f4 = counts.four / n
    result = witness_from_statistics(PamStatistics(f2, f4), spec, B)
    boot2 = np.empty((n_boot, N_PREP, N_DICHOTOMIC))
    boot4 = np.empty((n_boot, N_PREP))
    for x in range(N_PREP):
        for y in range(N_DICHOTOMIC):
            draws = rng.multinomial(n, f2[x, y], size=n_boot)
            boot2[:, x, y] = (draws[:, 0] - draws[:, 1]) / n
        draws = rng.multinomial(n, f4[x], size=n_boot)
        boot4[:, x] = draws[:, x] / n
    values = np.einsum("bxy,xy->b", boot2, spec.omega) - spec.k * boot4.sum(axis=1)
    result.stderr = float(np.std(values, ddof=1))
    return result


def sample_witness(
    s: PamScenario,
    spec: WitnessSpec,
    shots_per_setting: int,
    model: NoiseModel | None = None,
    seed: int = 0,
    n_boot: int = 1000,
) -> WitnessResult:
    """Finite-shot estimate of ``W``; ``shots_per_setting = 0`` is the exact (infinite-shot) value."""
    if shots_per_setting < 0:
        raise ValueError("shots_per_setting must be >= 0")
    if shots_per_setting == 0:
        result = witness_from_statistics(noisy_statistics(s, model), spec, s.B)
        result.stderr = 0.0
        return result
    sample_ss, boot_ss = np.random.SeedSequence(seed).spawn(2)
    counts = sample_counts(s, shots_per_setting, model, np.random.default_rng(sample_ss))
    return witness_from_counts(counts, spec, s.B, np.random.default_rng(boot_ss), n_boot)


def sample_witness_with_counts(s, spec, shots_per_setting, model=None, seed=0, n_boot=1000) -> tuple[WitnessResult, Counts]:
    sample_ss, boot_ss = np.random.SeedSequence(seed).spawn(2)
    counts = sample_counts(s, shots_per_setting, model, np.random.default_rng(sample_ss))
    return witness_from_counts(counts, spec, s.B, np.random.default_rng(boot_ss), n_boot), counts


def pairwise_overlap_residual(povm: Povm, B: float) -> float:
    return float(max(abs(np.trace(povm.ops[i] @ povm.ops[j]).real - B) for i, j in combinations(range(4), 2)))

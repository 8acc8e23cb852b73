"""Jones calculus for half- and quarter-wave plates.

Conventions (fixed; validated against the tabulated B = 1/13 settings):

* plate angle = fast-axis angle from horizontal, in degrees;
* ``HWP(t) = [[cos 2t, sin 2t], [sin 2t, -cos 2t]]`` (determinant -1 form);
* ``QWP(t) = R(-t) diag(1, i) R(t)``, i.e.
  ``[[cos^2 t + i sin^2 t, (1 - i) sin t cos t], [(1 - i) sin t cos t, sin^2 t + i cos^2 t]]``;
* a chain lists plates in the order light traverses them, so its matrix is
  the product with the last plate on the left.

Everything is compared modulo a global phase.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import least_squares

from . import tolerances as TOL
from .qmath import Mat2, PureQubit, is_unitary, phase_free_distance
from .walk import TEMPLATE_SLOTS, CoinSchedule, effective_povm, evolve_density

PERIOD = {"HWP": 90.0, "QWP": 180.0}

# plate labels for the five-step template; HWP4/HWP7 realise the sigma_x coins
SLOT_LABELS = {
    (1, 0): ("QWP2", "HWP2"),
    (2, 1): ("HWP3",),
    (2, -1): ("HWP4",),
    (3, 0): ("QWP3", "HWP5"),
    (4, 1): ("HWP6",),
    (4, -1): ("HWP7",),
    (5, 0): ("QWP4", "HWP8"),
}
PREP_LABELS = ("HWP1", "QWP1")


class TemplateInsufficientError(ValueError):
    pass


def canonical_angle(angle: float, kind: str = "QWP") -> float:
    """Unique representative of the plate's equivalence class.

    QWP angles (period 180) map to (-90, 90]; HWP angles (period 90) map to
    (-45, 45], which keeps the quoted 45 degree swap plates as they are.
    """
    half = PERIOD[kind] / 2
    a = math.fmod(angle, 2 * half)
    if a <= -half:
        a += 2 * half
    elif a > half:
        a -= 2 * half
    return 0.0 if a == 0.0 else a


def equivalent_angles(kind: str, a: float, b: float, tol: float = 1e-9) -> bool:
    """True when two settings of one plate give the same Jones matrix up to global phase."""
    period = PERIOD[kind]
    d = math.fmod(a - b, period)
    return min(abs(d), period - abs(d)) <= tol


@dataclass(frozen=True)
class WaveplateSetting:
    kind: str
    angle: float
    label: str = ""

    def __post_init__(self):
        if self.kind not in PERIOD:
            raise ValueError(f"unknown plate kind {self.kind!r}")
        if not math.isfinite(self.angle):
            raise ValueError("plate angle must be finite")

    def canonical(self) -> WaveplateSetting:
        return WaveplateSetting(self.kind, canonical_angle(self.angle, self.kind), self.label)

    def matrix(self) -> Mat2:
        return jones(self.kind, self.angle)


@dataclass(frozen=True)
class PlateChain:
    plates: tuple[WaveplateSetting, ...]
    realizes: tuple[int, int] | str = "preparation"

    def matrix(self) -> Mat2:
        return chain_matrix(self)


def jones(kind: str, angle_deg: float) -> Mat2:
    t = math.radians(angle_deg)
    if kind == "HWP":
        c, s = math.cos(2 * t), math.sin(2 * t)
        return np.array([[c, s], [s, -c]], dtype=np.complex128)
    if kind == "QWP":
        c, s = math.cos(t), math.sin(t)
        off = (1 - 1j) * s * c
        return np.array([[c * c + 1j * s * s, off], [off, s * s + 1j * c * c]], dtype=np.complex128)
    raise ValueError(f"unknown plate kind {kind!r}")


def chain_matrix(chain: PlateChain | Sequence[WaveplateSetting]) -> Mat2:
    plates = chain.plates if isinstance(chain, PlateChain) else tuple(chain)
    if not plates:
        raise ValueError("empty plate chain")
    m = np.eye(2, dtype=np.complex128)
    for p in plates:
        m = jones(p.kind, p.angle) @ m
    return m


def _kinds_matrix(kinds: Sequence[str], angles: Sequence[float]) -> Mat2:
    m = np.eye(2, dtype=np.complex128)
    for k, a in zip(kinds, angles):
        m = jones(k, a) @ m
    return m


def _phase_free_residual(target: Mat2, m: Mat2) -> NDArray[np.float64]:
    overlap = np.vdot(m, target)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    d = (target - phase * m).ravel()
    return np.concatenate([d.real, d.imag])


def _solve_angles(kinds: Sequence[str], target_of, n_extra: int) -> tuple[NDArray, float]:
    """Least squares over plate angles (+ ``n_extra`` free phases) with a grid of starts."""
    n = len(kinds)
    grid = [0.0, 30.0, 60.0, 90.0, 120.0, 150.0] if n == 1 else [0.0, 45.0, 90.0, 135.0]
    phase_grid = [0.0, 90.0, 180.0, 270.0][: 4 if n_extra else 1]
    best_x, best_r = None, math.inf

    def resid(x):
        return _phase_free_residual(target_of(x[n:]), _kinds_matrix(kinds, x[:n]))

    starts = itertools.product(*([grid] * n), *([phase_grid] * n_extra))
    for start in starts:
        sol = least_squares(resid, np.array(start, dtype=float), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.linalg.norm(sol.fun))
        if r < best_r:
            best_x, best_r = sol.x, r
        if best_r < 1e-13:
            break
    return best_x, best_r


def decompose_coin(
    u: Mat2,
    template: Sequence[str],
    labels: Sequence[str] | None = None,
    realizes: tuple[int, int] | str = "coin",
    free_output_phase: bool = False,
    tol: float = TOL.PLATES,
) -> PlateChain:
    """Plate angles for ``template`` reproducing ``u`` up to global phase.

    With ``free_output_phase`` the target is ``diag(1, e^{i d}) u`` for any
    ``d``: the two output branches of a coin that feeds detectors (or a
    compensating downstream coin) do not need a fixed relative phase.
    """
    u = np.asarray(u, dtype=np.complex128)
    if not is_unitary(u):
        raise ValueError("decompose_coin needs a unitary")
    kinds = list(template)
    for k in kinds:
        if k not in PERIOD:
            raise ValueError(f"unknown plate kind {k!r}")

    def target_of(extra):
        if free_output_phase:
            return np.diag([1.0, np.exp(1j * math.radians(extra[0]))]) @ u
        return u

    x, r = _solve_angles(kinds, target_of, 1 if free_output_phase else 0)
    if r > tol:
        raise TemplateInsufficientError(f"{'+'.join(kinds)} cannot reach the coin (residual {r:.2e})")
    labels = list(labels) if labels is not None else [f"{k}{i + 1}" for i, k in enumerate(kinds)]
    plates = tuple(WaveplateSetting(k, canonical_angle(a, k), lab) for k, a, lab in zip(kinds, x[: len(kinds)], labels))
    return PlateChain(plates, realizes)


def prep_angles(psi: PureQubit, tol: float = TOL.PLATES) -> PlateChain:
    """HWP1 then QWP1 taking ``|H>`` to ``psi`` up to a global phase."""
    target = psi.vector
    best_x, best_r = None, math.inf

    def resid(x):
        out = _kinds_matrix(("HWP", "QWP"), x)[:, 0]
        overlap = np.vdot(out, target)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        d = target - phase * out
        return np.concatenate([d.real, d.imag])

    for start in itertools.product([0.0, 22.5, 45.0, 67.5], [0.0, 45.0, 90.0, 135.0]):
        sol = least_squares(resid, np.array(start), xtol=1e-15, ftol=1e-15, gtol=1e-15)
        r = float(np.linalg.norm(sol.fun))
        if r < best_r:
            best_x, best_r = sol.x, r
        if best_r < 1e-13:
            break
    if best_r > tol:
        raise TemplateInsufficientError(f"preparation residual {best_r:.2e}")
    plates = tuple(WaveplateSetting(k, canonical_angle(a, k), lab) for k, a, lab in zip(("HWP", "QWP"), best_x, PREP_LABELS))
    return PlateChain(plates, "preparation")


def prepared_state(chain: PlateChain) -> PureQubit:
    return PureQubit.from_vector(chain_matrix(chain)[:, 0])


def _is_identity(u: Mat2, tol: float = 1e-12) -> bool:
    return phase_free_distance(u, np.eye(2)) <= tol


def _realize_slot(u: Mat2, key: tuple[int, int], free_output_phase: bool) -> PlateChain | None:
    labels = SLOT_LABELS[key]
    hwp_label = labels[-1]
    if _is_identity(u):
        return None
    try:
        return decompose_coin(u, ["HWP"], [hwp_label], key)
    except TemplateInsufficientError:
        pass
    if len(labels) == 2:
        try:
            return decompose_coin(u, ["QWP", "HWP"], labels, key, free_output_phase=free_output_phase)
        except TemplateInsufficientError:
            pass
    return decompose_coin(u, ["QWP", "HWP", "QWP"], [labels[0], hwp_label, labels[0] + "b"], key)


def realize_schedule(schedule: CoinSchedule, tol: float = TOL.PLATES) -> tuple[CoinSchedule, list[PlateChain]]:
    """Wave-plate chains for every coin, plus the schedule the plates actually implement.

    For the five-step template the output-row phases of the general coins
    at site 0 are free: the H/V outputs of the step-n coin reach the step
    n+2 coin on its V/H inputs respectively, so a phase there is undone by a
    right diagonal factor on that later coin, and the last coin feeds
    detectors.  Other schedules get an independent chain per coin.  The
    effective POVM of the returned schedule equals the input's within ``tol``.
    """
    coins = dict(schedule.coins)
    chains: list[PlateChain] = []
    template = schedule.steps == 5 and schedule.initial_site == 0 and set(coins) <= set(TEMPLATE_SLOTS)
    if not template:
        for (step, site), u in sorted(coins.items()):
            if _is_identity(u):
                continue
            base = f"C{step},{site}"
            for kinds in (["HWP"], ["QWP", "HWP"], ["QWP", "HWP", "QWP"]):
                try:
                    labels = [f"{base}:{k}{i + 1}" for i, k in enumerate(kinds)]
                    chains.append(decompose_coin(u, kinds, labels, (step, site)))
                    break
                except TemplateInsufficientError:
                    continue
        return schedule, chains

    realized = {}
    for key in TEMPLATE_SLOTS:
        u = coins.get(key, np.eye(2, dtype=np.complex128))
        chain = _realize_slot(u, key, free_output_phase=key[1] == 0)
        if chain is None:
            realized[key] = np.eye(2, dtype=np.complex128)
            continue
        chains.append(chain)
        m = chain_matrix(chain)
        realized[key] = m
        if key in ((1, 0), (3, 0)):
            # rows of m are u's rows times phases; undo them on the coin two steps later
            ph = np.array([np.vdot(u[i], m[i]) for i in range(2)])
            ph = ph / np.abs(ph)
            later = (key[0] + 2, 0)
            coins[later] = coins.get(later, np.eye(2)) @ np.diag([np.conj(ph[1]), np.conj(ph[0])])
    out = CoinSchedule(schedule.steps, realized, schedule.initial_site)
    before = effective_povm(schedule)
    after = effective_povm(out)
    lookup = {p.final_position: p.effect for p in after.ports}
    drift = max(np.linalg.norm(p.effect - lookup.get(p.final_position, np.zeros((2, 2)))) for p in before.ports)
    if drift > tol:
        raise TemplateInsufficientError(f"plate realisation changed the POVM by {drift:.2e}")
    return out, chains


def angle_rows(chains: Iterable[PlateChain], B_label: str = "") -> list[dict]:
    rows = []
    for chain in chains:
        for p in chain.plates:
            rows.append({"B": B_label, "label": p.label, "kind": p.kind, "angle_deg": round(p.angle, 6)})
    return rows


def angle_csv(chains: Iterable[PlateChain], B_label: str = "") -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["B", "label", "kind", "angle_deg"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(angle_rows(chains, B_label))
    return buf.getvalue()


def schedule_from_chains(schedule: CoinSchedule, chains: Iterable[PlateChain]) -> CoinSchedule:
    updates = {chain.realizes: chain_matrix(chain) for chain in chains if isinstance(chain.realizes, tuple)}
    return schedule.replace(updates)


# ---------------------------------------------------------------- noise


@dataclass(frozen=True)
class NoiseModel:
    """Optical imperfections.

    ``extinction_ratio = inf`` disables interferometer leakage; otherwise
    each recombination is mixed with an incoherent term of relative power
    ``1 / extinction_ratio``.  Port efficiencies scale the outcome
    probabilities, which are then renormalised over the detected events.
    """

    plate_sigma: float = 0.0
    extinction_ratio: float = math.inf
    efficiency: tuple[float, ...] = (1.0, 1.0, 1.0, 1.0)
    seed: int = 0
    efficiency_spread: float = field(init=False, default=1.0)

    def __post_init__(self):
        if self.plate_sigma < 0:
            raise ValueError("plate_sigma must be >= 0")
        if not self.extinction_ratio > 1:
            raise ValueError("extinction_ratio must exceed 1")
        eff = tuple(float(e) for e in self.efficiency)
        if any(not 0 < e <= 1 for e in eff):
            raise ValueError("port efficiencies must lie in (0, 1]")
        object.__setattr__(self, "efficiency", eff)
        object.__setattr__(self, "efficiency_spread", max(eff) / min(eff))

    @property
    def leakage(self) -> float:
        return 0.0 if math.isinf(self.extinction_ratio) else 1.0 / self.extinction_ratio

    @property
    def is_noiseless(self) -> bool:
        return self.plate_sigma == 0 and self.leakage == 0 and all(e == 1.0 for e in self.efficiency)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("efficiency_spread")
        d["efficiency"] = list(self.efficiency)
        d["extinction_ratio"] = None if math.isinf(self.extinction_ratio) else self.extinction_ratio
        return d

    @classmethod
    def from_dict(cls, data: dict) -> NoiseModel:
        er = data.get("extinction_ratio")
        er = math.inf if er in (None, "inf", "Infinity") else float(er)
        return cls(
            plate_sigma=float(data.get("plate_sigma", 0.0)),
            extinction_ratio=er,
            efficiency=tuple(data.get("efficiency", (1.0, 1.0, 1.0, 1.0))),
            seed=int(data.get("seed", 0)),
        )

    @classmethod
    def from_json(cls, path) -> NoiseModel:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def jitter_schedule(schedule: CoinSchedule, sigma: float, rng: np.random.Generator) -> CoinSchedule:
    """Re-derive every coin from its plate chain with Gaussian angle errors (degrees)."""
    realized, chains = realize_schedule(schedule)
    jittered = []
    for chain in chains:
        plates = tuple(WaveplateSetting(p.kind, p.angle + rng.normal(scale=sigma), p.label) for p in chain.plates)
        jittered.append(PlateChain(plates, chain.realizes))
    return schedule_from_chains(realized, jittered)


def apply_noise(
    distribution: Sequence[float],
    model: NoiseModel,
    schedule: CoinSchedule | None = None,
    psi: PureQubit | None = None,
) -> NDArray[np.float64]:
    """Perturb an outcome distribution according to ``model``.

    Plate jitter and leakage need the walk itself, so ``schedule`` and
    ``psi`` must be supplied when either is active; the distribution is then
    recomputed over the schedule's ideal ports.  Efficiencies apply last.
    Deterministic for a fixed ``model.seed``.
    """
    probs = np.asarray(distribution, dtype=float)
    if model.plate_sigma > 0 or model.leakage > 0:
        if schedule is None or psi is None:
            raise ValueError("plate jitter / leakage require the schedule and input state")
        rng = np.random.default_rng(model.seed)
        ports = effective_povm(schedule).positions
        rho = psi.projector()
        if model.plate_sigma > 0:
            schedule = jitter_schedule(schedule, model.plate_sigma, rng)
            prep = prep_angles(psi)
            plates = tuple(WaveplateSetting(p.kind, p.angle + rng.normal(scale=model.plate_sigma), p.label) for p in prep.plates)
            rho = prepared_state(PlateChain(plates)).projector()
        by_position = evolve_density(schedule, rho, dephasing=model.leakage)
        probs = np.array([by_position.get(x, 0.0) for x in ports])
        probs = probs / probs.sum()
    if len(model.efficiency) != len(probs):
        raise ValueError(f"{len(model.efficiency)} efficiencies for {len(probs)} outcomes")
    scaled = probs * np.asarray(model.efficiency)
    return scaled / scaled.sum()

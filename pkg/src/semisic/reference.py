"""Published B = 1/13 benchmark data: coin schedules, preparations and plate angles.

Values are stored exactly as printed (four decimals for matrix entries, two
for angles).  Printed coins are unitary only to ~1e-4, so schedule builders
project them onto the nearest unitary before use.
"""

from __future__ import annotations

import numpy as np

from .qmath import SX, Mat2, PureQubit
from .walk import CoinSchedule

# POVM realisation, B = 1/13; (step, site) -> printed entries
REALIZATION_COINS_1_13: dict[tuple[int, int], list[list[complex]]] = {
    (2, 1): [[0.6011, 0.7992], [0.7992, -0.6011]],
    (3, 0): [[0.5551, 0.8318], [0.8318, -0.5551]],
    (4, 1): [[0.6941, 0.7199], [0.7199, -0.6941]],
    (5, 0): [[-0.0771 + 0.7029j, 0.7028 + 0.0771j], [0.0771 + 0.7028j, -0.7028 + 0.0771j]],
}

# self-test experiment, B = 1/13
SELFTEST_COINS_1_13: dict[tuple[int, int], list[list[complex]]] = {
    (1, 0): [[0.9381 + 0.0614j, 0.2563 - 0.2248j], [-0.2248 + 0.2563j, -0.0614 - 0.9381j]],
    (2, 1): [[0.6011, 0.7992], [0.7992, -0.6011]],
    (3, 0): [[-0.4281 - 0.3533j, 0.8106 - 0.1866j], [-0.1866 + 0.8106j, 0.3533 + 0.4281j]],
    (4, 1): [[0.6941, 0.7199], [0.7199, -0.6941]],
    (5, 0): [[0.6882 + 0.1625j, -0.6882 + 0.1625j], [0.1625 - 0.6882j, -0.1625 - 0.6882j]],
}

SWAP_SLOTS = ((2, -1), (4, -1))

# self-test preparations for B = 1/13, (amp_H, amp_V) as printed
SELFTEST_STATES_1_13: tuple[tuple[complex, complex], ...] = (
    (0.3409, -(0.6648 + 0.6648j)),
    (0.3409, 0.6648 + 0.6648j),
    (0.8468, 0.3761 - 0.3761j),
    (0.8468, -(0.3761 - 0.3761j)),
)

# probabilities of the four ports for |+> at B = 1/13, as quoted
PLUS_PROBABILITIES_1_13 = (0.1807, 0.3584, 0.2305, 0.2305)

# witness maxima as quoted
QUOTED_Q = {"1/13": 7.2363, "1/14": 7.5895, "1/15": 8.0}

# plate angles (degrees) for the POVM realisation; HWP4 = HWP7 = 45
REALIZATION_ANGLES: dict[str, dict[str, float]] = {
    "1/12": {"HWP3": 22.5, "HWP5": 22.5, "HWP6": 17.63, "QWP4": 60.34, "HWP8": 7.67},
    "1/13": {"HWP3": 26.53, "HWP5": 28.14, "HWP6": 23.02, "QWP4": 96.26, "HWP8": 25.63},
    "1/14": {"HWP3": 28.05, "HWP5": 31.86, "HWP6": 24.96, "QWP4": 67.03, "HWP8": 11.01},
    "1/15": {"HWP3": 29.14, "HWP5": 36.0, "HWP6": 26.31, "QWP4": 22.19, "HWP8": -11.4},
}

# plate angles (degrees) for the self-test experiment
SELFTEST_ANGLES: dict[str, dict[str, float]] = {
    "1/13": {"QWP2": 15.28, "HWP2": 0.9, "HWP3": 26.53, "QWP3": -62.16, "HWP5": -19.31, "HWP6": 23.02, "QWP4": -45.0, "HWP8": -15.86},
    "1/14": {"QWP2": 11.41, "HWP2": 0.41, "HWP3": 28.05, "QWP3": -69.79, "HWP5": -25.63, "HWP6": 24.96, "QWP4": -45.0, "HWP8": -13.68},
    "1/15": {"QWP2": 7.56, "HWP2": 0.13, "HWP3": 29.14, "QWP3": -76.81, "HWP5": -32.05, "HWP6": 26.31, "QWP4": -45.0, "HWP8": -12.28},
}


def nearest_unitary(m) -> Mat2:
    u, _, vh = np.linalg.svd(np.asarray(m, dtype=np.complex128))
    return u @ vh


def _schedule(coins: dict) -> CoinSchedule:
    full = {key: nearest_unitary(m) for key, m in coins.items()}
    full.update({key: SX for key in SWAP_SLOTS})
    return CoinSchedule(steps=5, coins=full)


def realization_schedule_1_13() -> CoinSchedule:
    return _schedule(REALIZATION_COINS_1_13)


def selftest_schedule_1_13() -> CoinSchedule:
    return _schedule(SELFTEST_COINS_1_13)


def selftest_states_1_13(normalize: bool = True) -> list[PureQubit]:
    if normalize:
        return [PureQubit.normalized(h, v) for h, v in SELFTEST_STATES_1_13]
    return [PureQubit(h, v) for h, v in SELFTEST_STATES_1_13]

"""JSON conventions shared by every artifact.

A complex number is ``[re, im]``; a 2x2 matrix is a row-major list of four
complex numbers.  Floats written by :func:`dumps` are rounded to 12
significant digits so reports are byte-stable across runs.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .povm import Povm, make_element
from .qmath import PureQubit, mat2

SIG_DIGITS = 12


def complex_to_json(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair) -> complex:
    re, im = pair
    return complex(float(re), float(im))


def mat2_to_json(m) -> list[list[float]]:
    return [complex_to_json(z) for z in np.asarray(m).ravel()]


def mat2_from_json(entries) -> np.ndarray:
    if len(entries) != 4:
        raise ValueError("a 2x2 matrix is serialised as 4 complex entries")
    return mat2([complex_from_json(e) for e in entries])


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.{digits}g}")


def normalize(obj: Any) -> Any:
    """Convert numpy scalars/arrays to plain Python and round floats."""
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return normalize(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return round_sig(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return normalize(complex_to_json(obj))
    return obj


def dumps(obj: Any, indent: int | None = 2) -> str:
    return json.dumps(normalize(obj), indent=indent, sort_keys=True)


def povm_to_dict(povm: Povm) -> dict:
    elements = []
    for el in povm.elements:
        entry = {"matrix": mat2_to_json(el.op), "weight": el.weight, "bloch": list(el.bloch)}
        entry["vector"] = None if el.vector is None else [complex_to_json(el.vector.amp_h), complex_to_json(el.vector.amp_v)]
        elements.append(entry)
    return {"label": povm.label, "B": povm.B, "elements": elements}


def povm_from_dict(data: dict) -> Povm:
    elements = tuple(make_element(mat2_from_json(e["matrix"])) for e in data["elements"])
    B = data.get("B")
    return Povm(elements=elements, label=data.get("label", ""), B=None if B is None else float(B))


def state_to_json(psi: PureQubit) -> list[list[float]]:
    return [complex_to_json(psi.amp_h), complex_to_json(psi.amp_v)]

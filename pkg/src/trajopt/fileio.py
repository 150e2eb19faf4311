"""Instance and trajectory files: canonical JSON with fixed float formatting.

Floats are emitted with 17 significant digits so files reload bit-exactly,
and field order is fixed so build -> load -> re-serialize is byte-identical.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .core import PreferredOrder, ProblemInstance
from .errors import ParseError
from .trajectory import OptimalTrajectory, SwapStep

TOOL_VERSION = "0.1.0"
TIE_BREAK = "lexicographic-kl"

INSTANCE_FIELDS = (
    "eigenvalues",
    "target",
    "cost",
    "conserved",
    "initial_populations",
    "eps_pop",
    "eps_grad",
)


def format_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """Serialize dicts/lists/scalars to JSON with deterministic formatting.

    Dict order is insertion order; scalar lists stay on one line.
    """
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {dumps_canonical(v, indent + 2)}'
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items):
            return "[" + ", ".join(dumps_canonical(v) for v in items) + "]"
        inner = ",\n".join(f"{pad}  {dumps_canonical(v, indent + 2)}" for v in items)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _number_list(raw, field: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{field}: expected a non-empty number array")
    try:
        return np.array([float(v) for v in raw])
    except (TypeError, ValueError):
        raise ParseError(f"{field}: entries must be numbers") from None


def _number(raw, field: str, default: float) -> float:
    if raw is None:
        return default
    if not isinstance(raw, (int, float)):
        raise ParseError(f"{field}: expected a number")
    return float(raw)


def instance_to_dict(inst: ProblemInstance) -> dict:
    out = {
        "eigenvalues": list(map(float, inst.eigenvalues)),
        "target": list(map(float, inst.target)),
        "cost": list(map(float, inst.cost)),
    }
    if inst.conserved is not None:
        out["conserved"] = list(map(float, inst.conserved))
    if inst.initial_populations is not None:
        out["initial_populations"] = list(map(float, inst.initial_populations))
    out["eps_pop"] = float(inst.eps_pop)
    out["eps_grad"] = float(inst.eps_grad)
    return out


def instance_from_dict(doc: dict) -> ProblemInstance:
    if not isinstance(doc, dict):
        raise ParseError("instance file must contain a JSON object")
    unknown = set(doc) - set(INSTANCE_FIELDS)
    if unknown:
        raise ParseError(f"unknown instance fields: {sorted(unknown)}")
    for field in ("eigenvalues", "target", "cost"):
        if field not in doc:
            raise ParseError(f"{field}: required field missing")
    return ProblemInstance(
        eigenvalues=_number_list(doc["eigenvalues"], "eigenvalues"),
        target=_number_list(doc["target"], "target"),
        cost=_number_list(doc["cost"], "cost"),
        conserved=(
            _number_list(doc["conserved"], "conserved")
            if doc.get("conserved") is not None
            else None
        ),
        initial_populations=(
            _number_list(doc["initial_populations"], "initial_populations")
            if doc.get("initial_populations") is not None
            else None
        ),
        eps_pop=_number(doc.get("eps_pop"), "eps_pop", 1e-12),
        eps_grad=_number(doc.get("eps_grad"), "eps_grad", 1e-12),
    )


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})")


def load_instance(path: str) -> ProblemInstance:
    return instance_from_dict(load_json(path))


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def trajectory_to_dict(traj: OptimalTrajectory) -> dict:
    meta = {
        "tool_version": TOOL_VERSION,
        "tie_break": TIE_BREAK,
        "eps_pop": float(traj.eps_pop),
        "eps_grad": float(traj.eps_grad),
        "basis": "preferred",
        "order": [int(i) for i in traj.order.perm],
    }
    if traj.block_of_position is not None:
        meta["block_of_position"] = [int(b) for b in traj.block_of_position]
    return {
        "alpha_range": [float(traj.alpha_min), float(traj.alpha_max)],
        "breakpoints": [[float(a), float(w)] for a, w in traj.breakpoints],
        "steps": [
            {
                "k": int(s.k),
                "l": int(s.l),
                "gradient": float(s.gradient),
                "alpha_start": float(s.alpha_start),
                "alpha_end": float(s.alpha_end),
            }
            for s in traj.steps
        ],
        "vertices": [[float(x) for x in v] for v in traj.vertices],
        "metadata": meta,
    }


def trajectory_from_dict(doc: dict) -> dict:
    """Validate the shape of a trajectory document; returns it unchanged."""
    if not isinstance(doc, dict):
        raise ParseError("trajectory file must contain a JSON object")
    for field in ("alpha_range", "breakpoints", "steps", "vertices", "metadata"):
        if field not in doc:
            raise ParseError(f"{field}: required field missing")
    alphas = [bp[0] for bp in doc["breakpoints"]]
    if any(b - a <= 0 for a, b in zip(alphas[:-1], alphas[1:])):
        raise ParseError("breakpoints: alpha values must be strictly increasing")
    return doc


def trajectory_to_runtime(doc: dict) -> OptimalTrajectory:
    """Rebuild a runtime trajectory from a trajectory document.

    Target/cost vectors are not stored in the file, so the result supports
    evaluation (breakpoints, vertices, steps) but not re-lifting.
    """
    doc = trajectory_from_dict(doc)
    perm = np.asarray(doc["metadata"]["order"], dtype=int)
    order = PreferredOrder(perm=perm, inverse=np.argsort(perm))
    steps = tuple(
        SwapStep(
            k=int(s["k"]),
            l=int(s["l"]),
            delta_alpha=float(s["alpha_end"]) - float(s["alpha_start"]),
            gradient=float(s["gradient"]),
            alpha_start=float(s["alpha_start"]),
            alpha_end=float(s["alpha_end"]),
        )
        for s in doc["steps"]
    )
    blocks = doc["metadata"].get("block_of_position")
    return OptimalTrajectory(
        order=order,
        target_pref=np.array([]),
        cost_pref=np.array([]),
        vertices=np.asarray(doc["vertices"], dtype=float),
        steps=steps,
        breakpoints=np.asarray(doc["breakpoints"], dtype=float),
        eps_pop=float(doc["metadata"]["eps_pop"]),
        eps_grad=float(doc["metadata"]["eps_grad"]),
        block_of_position=None if blocks is None else np.asarray(blocks, dtype=int),
    )


def lifted_to_dict(lifted, alpha: float) -> dict:
    return {
        "alpha": float(alpha),
        "unitary": [[float(x) for x in row] for row in lifted.unitary],
        "doubly_stochastic": [
            [float(x) for x in row] for row in lifted.doubly_stochastic
        ],
        "density_diagonal": [float(x) for x in lifted.density_diagonal],
    }

"""Generic-model JSON files.

Schema::

    {"dim": d, "n": n, "labels": [...],
     "observables": [ [[ [re, im], ... d ], ... d ], ... n ],
     "theta": [...], "beta": b}

Matrices are row-major with complex entries as ``[re, im]`` pairs.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .expfamily import ExpFamilyModel, ModelPoint
from .hermitian import HERMITIAN_TOL, HermitianOperator


def _parse_matrix(raw, index: int, dim: int) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"observable {index}: entries must be [re, im] number pairs") from exc
    if arr.shape != (dim, dim, 2):
        raise ValidationError(f"observable {index}: expected shape ({dim}, {dim}, 2), got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def parse_generic(doc: dict) -> tuple[ExpFamilyModel, ModelPoint]:
    try:
        dim = int(doc["dim"])
        n = int(doc["n"])
        raw_obs = doc["observables"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"generic model is missing or has a malformed field: {exc}") from exc
    if len(raw_obs) != n:
        raise ValidationError(f"'n' is {n} but {len(raw_obs)} observables were given")
    labels = doc.get("labels") or [f"theta{i}" for i in range(n)]
    if len(labels) != n:
        raise ValidationError(f"{len(labels)} labels given for {n} observables")
    ops = []
    for i, raw in enumerate(raw_obs):
        m = _parse_matrix(raw, i, dim)
        err = float(np.max(np.abs(m - m.conj().T)))
        if err > HERMITIAN_TOL * max(1.0, float(np.max(np.abs(m)))):
            raise ValidationError(f"observable {i} ({labels[i]!r}) is not Hermitian (max |A - A^H| = {err:.3e})")
        ops.append(HermitianOperator(m, labels[i]))
    model = ExpFamilyModel(tuple(ops), tuple(labels))
    theta = doc.get("theta", [0.0] * n)
    if len(theta) != n:
        raise ValidationError(f"'theta' has {len(theta)} entries for {n} observables")
    return model, ModelPoint(tuple(theta), float(doc.get("beta", 1.0)))


def load_generic_file(path) -> tuple[ExpFamilyModel, ModelPoint]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: cannot read ({exc})") from exc
    return parse_generic(doc)


def load_generic_model(path) -> ExpFamilyModel:
    return load_generic_file(path)[0]


def generic_document(model: ExpFamilyModel, point: ModelPoint | None = None) -> dict:
    doc = {
        "dim": model.dim,
        "n": model.n,
        "labels": list(model.labels),
        "observables": [np.stack([o.entries.real, o.entries.imag], axis=-1).tolist() for o in model.observables],
    }
    if point is not None:
        doc["theta"] = list(point.theta)
        doc["beta"] = point.beta
    return doc


def dump_generic_model(model: ExpFamilyModel, path, point: ModelPoint | None = None) -> None:
    Path(path).write_text(json.dumps(generic_document(model, point), indent=1), encoding="utf-8")

"""File formats: the JSON grid schema, OBJ meshes and JSON reports.

Grid files look like::

    {"schema_version": 1, "nu": 32, "nv": 24,
     "u_range": [u0, u1], "v_range": [v0, v1],
     "fields": {"x": [...], "n": [...], "kappa1": [...], "kappa2": [...],
                "xu": [...], "xv": [...], "nu": [...], "nv": [...]}}

Arrays are flattened row-major over ``(i, j[, component])``. Floats are
written with ``repr``, which round-trips 64-bit values exactly.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .catalog import SampledGrid, check_chart, umbilic_mask
from .errors import GeometryError, SchemaError

SCHEMA_VERSION = 1
CHART_TOL = 1e-4

_VECTOR_FIELDS = ("x", "n")
_SCALAR_FIELDS = ("kappa1", "kappa2")
_PARTIAL_FIELDS = ("xu", "xv", "nu", "nv")


def grid_to_dict(grid: SampledGrid) -> dict:
    nu, nv = grid.shape
    fields = {
        "x": grid.x.reshape(-1).tolist(),
        "n": grid.n.reshape(-1).tolist(),
        "kappa1": grid.k1.reshape(-1).tolist(),
        "kappa2": grid.k2.reshape(-1).tolist(),
    }
    if grid.has_partials:
        for key, arr in zip(_PARTIAL_FIELDS, (grid.xu, grid.xv, grid.nu_, grid.nv_)):
            fields[key] = arr.reshape(-1).tolist()
    return {
        "schema_version": SCHEMA_VERSION,
        "nu": int(nu),
        "nv": int(nv),
        "u_range": [float(grid.u[0]), float(grid.u[-1])],
        "v_range": [float(grid.v[0]), float(grid.v[-1])],
        "fields": fields,
    }


def save_grid(grid: SampledGrid, path) -> None:
    """Write ``grid`` in the JSON grid schema."""
    Path(path).write_text(json.dumps(grid_to_dict(grid)))


def _array(fields, key, shape):
    raw = fields[key]
    if not isinstance(raw, list):
        raise SchemaError(f"field {key!r} must be a flat list")
    try:
        a = np.asarray(raw, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"field {key!r} is not numeric: {exc}") from None
    if a.ndim != 1 or a.size != int(np.prod(shape)):
        raise SchemaError(f"field {key!r} has {a.size} entries, expected {int(np.prod(shape))}")
    if not np.all(np.isfinite(a)):
        raise SchemaError(f"field {key!r} contains non-finite values")
    return a.reshape(shape)


def grid_from_dict(doc: dict) -> SampledGrid:
    """Parse a schema document without running geometric checks."""
    if not isinstance(doc, dict):
        raise SchemaError("grid document must be a JSON object")
    for key in ("schema_version", "nu", "nv", "u_range", "v_range", "fields"):
        if key not in doc:
            raise SchemaError(f"missing top-level key {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    nu, nv = doc["nu"], doc["nv"]
    if not (isinstance(nu, int) and isinstance(nv, int)) or nu < 8 or nv < 8:
        raise SchemaError("nu and nv must be integers >= 8")
    ranges = []
    for key in ("u_range", "v_range"):
        r = doc[key]
        if not (isinstance(r, list) and len(r) == 2) or not float(r[0]) < float(r[1]):
            raise SchemaError(f"{key} must be an increasing pair")
        ranges.append((float(r[0]), float(r[1])))
    fields = doc["fields"]
    if not isinstance(fields, dict):
        raise SchemaError("fields must be an object")
    for key in _VECTOR_FIELDS + _SCALAR_FIELDS:
        if key not in fields:
            raise SchemaError(f"missing field {key!r}")
    present = [k for k in _PARTIAL_FIELDS if k in fields]
    if present and len(present) != len(_PARTIAL_FIELDS):
        raise SchemaError("partials xu, xv, nu, nv must be given together or not at all")

    vec = (nu, nv, 3)
    sca = (nu, nv)
    partials = [_array(fields, k, vec) for k in _PARTIAL_FIELDS] if present else [None] * 4
    k1 = _array(fields, "kappa1", sca)
    k2 = _array(fields, "kappa2", sca)
    return SampledGrid(
        u=np.linspace(*ranges[0], nu), v=np.linspace(*ranges[1], nv),
        x=_array(fields, "x", vec), n=_array(fields, "n", vec), k1=k1, k2=k2,
        xu=partials[0], xv=partials[1], nu_=partials[2], nv_=partials[3],
        provenance="file", chart=None, umbilic=umbilic_mask(k1, k2),
    )


def load_grid(path, tol=CHART_TOL) -> SampledGrid:
    """Read a grid file and check unit normals and Rodrigues' equations.

    Rodrigues residuals are only available when the file carries partials.
    Per-vertex residuals are attached as ``grid.checks``.
    """
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    grid = grid_from_dict(doc)
    res = check_chart(grid)
    grid.checks = res
    bad = {k: float(np.max(v)) for k, v in res.items() if k != "tangency" and np.max(v) > tol}
    if bad:
        worst = ", ".join(f"{k}={v:.3e}" for k, v in bad.items())
        where = {k: np.argwhere(res[k] > tol)[:5].tolist() for k in bad}
        raise GeometryError(f"{path}: chart invariants violated ({worst}); first offending vertices {where}")
    return grid


def grid_faces(nu, nv):
    """Triangles (0-based vertex indices) of a row-major ``nu x nv`` grid."""
    idx = np.arange(nu * nv).reshape(nu, nv)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    return np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])


def write_obj(path, x, n=None) -> None:
    """Export a gridded surface ``x`` of shape (nu, nv, 3) with optional normals."""
    nu, nv = x.shape[:2]
    lines = [f"# lieapp mesh {nu}x{nv}"]
    lines += [f"v {p[0]!r} {p[1]!r} {p[2]!r}" for p in x.reshape(-1, 3).tolist()]
    faces = grid_faces(nu, nv) + 1
    if n is not None:
        lines += [f"vn {p[0]!r} {p[1]!r} {p[2]!r}" for p in n.reshape(-1, 3).tolist()]
        lines += [f"f {a}//{a} {b}//{b} {c}//{c}" for a, b, c in faces.tolist()]
    else:
        lines += [f"f {a} {b} {c}" for a, b, c in faces.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    return obj


def write_report(report: dict, path) -> None:
    Path(path).write_text(json.dumps(_jsonable(report), indent=2) + "\n")

"""JSON encodings of specs, points, automorphisms and reports.

Complex numbers are ``[re, im]`` pairs; matrices are row-major nested lists
of pairs. Reports are ``{"command", "summary", "records"}`` and have an
equivalent CSV form whose cells are JSON literals, so both round-trip.
"""

from __future__ import annotations

import csv
import io as _io
import json

import numpy as np

from .cartan import KINDS, CartanSpec
from .errors import ParseError
from .hua import EllipsoidSpec, HuaPoint, HuaSpec


def encode_complex(x) -> list:
    x = complex(x)
    return [float(x.real), float(x.imag)]


def encode_array(a) -> list:
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return encode_complex(a)
    return [encode_array(x) for x in a]


def decode_array(data, ndim: int | None = None) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not an array of [re, im] pairs: {exc}") from None
    if arr.size == 0:
        return np.zeros(arr.shape[:-1] if arr.ndim > 1 else (0,), complex)
    if arr.shape[-1] != 2:
        raise ParseError("complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if ndim is not None and out.ndim != ndim:
        raise ParseError(f"expected a {ndim}-dimensional array of pairs, got {out.ndim}")
    return out


# ---------------------------------------------------------------- specs


def cartan_to_json(spec: CartanSpec) -> dict:
    if spec.kind == "I":
        return {"kind": "I", "m": spec.m, "n": spec.n}
    if spec.kind == "ball":
        return {"kind": "ball", "d": spec.n}
    return {"kind": spec.kind, "n": spec.n}


def cartan_from_json(obj) -> CartanSpec:
    if not isinstance(obj, dict) or obj.get("kind") not in KINDS:
        raise ParseError(f"base must be an object with kind in {KINDS}")
    k = obj["kind"]
    try:
        if k == "I":
            return CartanSpec.type_i(obj["m"], obj["n"])
        if k == "ball":
            return CartanSpec.ball(obj["d"] if "d" in obj else obj["n"])
        return CartanSpec(k, 1, int(obj["n"]))
    except KeyError as exc:
        raise ParseError(f"base of kind {k} is missing {exc}") from None


def _fibers_from_json(obj):
    fibers = obj.get("fibers", [])
    if not isinstance(fibers, list):
        raise ParseError("fibers must be a list")
    try:
        return tuple(int(f["dim"]) for f in fibers), tuple(float(f["exp"]) for f in fibers)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"fiber entries need integer 'dim' and real 'exp': {exc}") from None


def spec_to_json(spec) -> dict:
    fibers = [{"dim": n, "exp": p} for n, p in zip(spec.fiber_dims, spec.exponents)]
    if isinstance(spec, EllipsoidSpec):
        return {"fibers": fibers}
    return {"base": cartan_to_json(spec.base), "fibers": fibers}


def spec_from_json(obj):
    """HuaSpec when a base is present, otherwise EllipsoidSpec."""
    if not isinstance(obj, dict):
        raise ParseError("spec must be a JSON object")
    dims, exps = _fibers_from_json(obj)
    if "base" in obj:
        return HuaSpec(cartan_from_json(obj["base"]), dims, exps)
    return EllipsoidSpec(dims, exps)


def hua_spec_from_json(obj) -> HuaSpec:
    spec = spec_from_json(obj)
    if not isinstance(spec, HuaSpec):
        raise ParseError("expected a Hua domain spec with a 'base'")
    return spec


def ellipsoid_spec_from_json(obj) -> EllipsoidSpec:
    if isinstance(obj, dict) and "base" in obj:
        dims, exps = _fibers_from_json(obj)
        return EllipsoidSpec(dims, exps)
    return spec_from_json(obj)


def load_json(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc.msg} (column {exc.colno})", exc.lineno) from None


# ---------------------------------------------------------------- points


def point_to_json(p: HuaPoint) -> dict:
    return {"z": encode_array(p.z), "w": [encode_array(b) for b in p.w]}


def point_from_json(obj) -> HuaPoint:
    if not isinstance(obj, dict) or "z" not in obj:
        raise ParseError("point must be an object with 'z' (and 'w')")
    z = decode_array(obj["z"], 1)
    w = tuple(decode_array(b, 1) for b in obj.get("w", []))
    return HuaPoint(z, w)


def read_points(path) -> list:
    out = []
    try:
        fh = open(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(point_from_json(json.loads(line)))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{exc.msg} (column {exc.colno})", lineno) from None
            except ParseError as exc:
                raise ParseError(str(exc), lineno) from None
    return out


def dumps_points(points) -> str:
    return "".join(json.dumps(point_to_json(p), sort_keys=True) + "\n" for p in points)


# ---------------------------------------------------------------- automorphisms


def gamma_to_json(g) -> dict:
    phi = g.phi
    kind = "linear" if phi.is_linear else "mobius"
    return {
        "spec": spec_to_json(g.spec),
        "phi": {"kind": kind, "steps": [s.to_json() for s in phi.steps], "z0": encode_array(phi.z0)},
        "unitaries": [encode_array(u) for u in g.unitaries],
    }


def gamma_from_json(obj):
    from .aut import BaseAut, GammaAut, Step

    try:
        spec = hua_spec_from_json(obj["spec"])
        phi = obj["phi"]
        steps = []
        for s in phi.get("steps", []):
            if s["kind"] == "mobius":
                steps.append(Step("mobius", a=decode_array(s["a"], 1)))
            elif s["kind"] == "linear":
                left = decode_array(s["left"], 2) if "left" in s else None
                right = decode_array(s["right"], 2) if "right" in s else None
                phase = complex(*s.get("phase", [1.0, 0.0]))
                steps.append(Step("linear", left=left, right=right, phase=phase))
            else:
                raise ParseError(f"unknown step kind {s['kind']!r}")
        z0 = decode_array(phi["z0"], 1) if "z0" in phi else None
        base = BaseAut(spec.base, tuple(steps), z0)
        us = [decode_array(u, 2) for u in obj["unitaries"]]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed automorphism: {exc}") from None
    return GammaAut(spec, base, tuple(us))


# ---------------------------------------------------------------- reports


def _clean(x):
    """Plain JSON-compatible values (numpy scalars and arrays converted)."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return encode_complex(x)
    return x


def make_report(command: str, records, summary) -> dict:
    return {"command": command, "summary": _clean(summary), "records": _clean(list(records))}


def dumps_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def dumps_csv(report: dict) -> str:
    buf = _io.StringIO()
    buf.write("# " + json.dumps({"command": report["command"], "summary": report["summary"]}, sort_keys=True) + "\n")
    records = report["records"]
    cols = sorted({k for r in records for k in r})
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        w.writerow([json.dumps(r[c], sort_keys=True) if c in r else "" for c in cols])
    return buf.getvalue()


def loads_csv(text: str) -> dict:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ParseError("CSV report must start with a '# {...}' summary line", 1)
    head = json.loads(lines[0][2:])
    rows = list(csv.reader(lines[1:]))
    records = []
    if rows:
        cols = rows[0]
        for row in rows[1:]:
            records.append({c: json.loads(v) for c, v in zip(cols, row) if v != ""})
    return {"command": head["command"], "summary": head["summary"], "records": records}


def dumps_report(report: dict, fmt: str) -> str:
    return dumps_csv(report) if fmt == "csv" else dumps_json(report)


def loads_report(text: str, fmt: str) -> dict:
    return loads_csv(text) if fmt == "csv" else json.loads(text)


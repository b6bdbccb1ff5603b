"""File formats: potential/Hamiltonian JSON, CSV tables, JSON reports.

Potential spec file:
    { "K": int, "n_params": int, "cos": [[poly coeffs]...],
      "sin": [[poly coeffs]...], "s0": float, "param_box": [[lo,hi]...] }
Coefficient polynomials are nested lists, one nesting level per parameter
(plain lists for one parameter, scalars wrapped as [c]); all floats decimal.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError, SchemaError
from .potential import FourierPotential, ParamPolynomial
from .standard_form import PerturbedHamiltonian

SCHEMA = "morse-actions/1"

_POTENTIAL_FIELDS = {"K", "n_params", "cos", "sin", "s0", "param_box"}
_HAMILTONIAN_FIELDS = {"base", "pert_cos", "pert_sin", "eta0", "r0", "R0", "s_hat"}


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _potential_from_dict(data, where="potential"):
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = set(data) - _POTENTIAL_FIELDS
    if unknown:
        raise SchemaError(f"{where}: unknown field '{sorted(unknown)[0]}'")
    missing = _POTENTIAL_FIELDS - set(data)
    if missing:
        raise SchemaError(f"{where}: missing field '{sorted(missing)[0]}'")
    K = data["K"]
    m = data["n_params"]
    if not isinstance(K, int) or K < 1:
        raise SchemaError(f"{where}: K must be a positive integer")
    if not isinstance(m, int) or m < 0:
        raise SchemaError(f"{where}: n_params must be a nonnegative integer")
    box = data["param_box"]
    if len(box) != m:
        raise SchemaError(f"{where}: param_box must have n_params rows")
    for row in box:
        if len(row) != 2 or not all(isinstance(x, (int, float)) for x in row):
            raise SchemaError(f"{where}: param_box rows must be [lo, hi]")
    for name in ("cos", "sin"):
        if len(data[name]) != K:
            raise SchemaError(f"{where}: '{name}' must have K entries")

    def poly(spec, which, k):
        try:
            arr = np.asarray(spec, dtype=float)
        except (TypeError, ValueError):
            raise SchemaError(f"{where}: {which}[{k}] is not a numeric array") from None
        if m == 0:
            if arr.size != 1:
                raise SchemaError(f"{where}: {which}[{k}] must be a single coefficient")
            return ParamPolynomial(arr.reshape(()))
        if m == 1 and arr.ndim == 1:
            return ParamPolynomial(arr)
        if arr.ndim != m:
            raise SchemaError(f"{where}: {which}[{k}] needs {m} nesting levels")
        return ParamPolynomial(arr)

    cos = tuple(poly(c, "cos", k) for k, c in enumerate(data["cos"]))
    sin = tuple(poly(s, "sin", k) for k, s in enumerate(data["sin"]))
    return FourierPotential(K=K, cos_polys=cos, sin_polys=sin, s0=float(data["s0"]),
                            param_box=tuple(tuple(map(float, r)) for r in box))


def load_potential(path):
    return _potential_from_dict(_load_json(path), where=str(path))


def potential_to_dict(pot):
    def unpack(poly):
        c = poly.coeffs
        if c.ndim == 0:
            return [float(c)]
        return c.tolist()

    return {
        "K": pot.K,
        "n_params": pot.n_params,
        "cos": [unpack(p) for p in pot.cos_polys],
        "sin": [unpack(p) for p in pot.sin_polys],
        "s0": pot.s0,
        "param_box": [list(r) for r in pot.param_box],
    }


def save_potential(pot, path):
    with open(path, "w") as fh:
        json.dump(potential_to_dict(pot), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_perturbed_hamiltonian(path):
    data = _load_json(path)
    where = str(path)
    if not isinstance(data, dict):
        raise SchemaError(f"{where}: expected an object")
    unknown = set(data) - _HAMILTONIAN_FIELDS
    if unknown:
        raise SchemaError(f"{where}: unknown field '{sorted(unknown)[0]}'")
    missing = (_HAMILTONIAN_FIELDS - {"s_hat"}) - set(data)
    if missing:
        raise SchemaError(f"{where}: missing field '{sorted(missing)[0]}'")
    base = _potential_from_dict(data["base"], where=f"{where}:base")
    m = base.n_params

    def poly(spec, which, k):
        try:
            arr = np.asarray(spec, dtype=float)
        except (TypeError, ValueError):
            raise SchemaError(f"{where}: {which}[{k}] is not numeric") from None
        if arr.ndim == 0:
            arr = arr.reshape((1,) * (m + 1))
        if arr.ndim == 1 and m == 0:
            pass
        elif arr.ndim != m + 1:
            raise SchemaError(f"{where}: {which}[{k}] needs {m + 1} nesting levels "
                              "(parameters then momentum)")
        return ParamPolynomial(arr)

    pc = tuple(poly(c, "pert_cos", k) for k, c in enumerate(data["pert_cos"]))
    ps = tuple(poly(s, "pert_sin", k) for k, s in enumerate(data["pert_sin"]))
    if len(pc) != len(ps):
        raise SchemaError(f"{where}: pert_cos and pert_sin must have equal length")
    return PerturbedHamiltonian(base=base, pert_cos=pc, pert_sin=ps,
                                eta0=float(data["eta0"]), r0=float(data["r0"]),
                                R0=float(data["R0"]),
                                s_hat=float(data.get("s_hat", base.s0 / 2)))


def format_float(x):
    return f"{float(x):.17g}"


def write_csv(rows, path, header):
    """RFC-4180-style CSV, mandatory header, 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(x) if isinstance(x, (int, float, np.floating))
                              else str(x) for x in row))
    text = "\r\n".join(lines) + "\r\n"
    if path is None:
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return None


def write_report(obj, path, constants=None, seed=None):
    """Deterministic JSON report with the schema tag and constants table."""
    doc = {"schema": SCHEMA}
    if seed is not None:
        doc["seed"] = seed
    if constants is not None:
        doc["constants"] = constants
    doc.update(obj)
    text = json.dumps(doc, indent=1, sort_keys=True, allow_nan=True)
    if path is None:
        return text
    with open(path, "w") as fh:
        fh.write(text + "\n")
    return None

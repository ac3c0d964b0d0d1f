"""Builtin algebras and the JSON algebra file format."""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError
from .hopf import (
    HopfAlgebra,
    cyclic_table,
    function_algebra,
    group_algebra,
    new_algebra,
    s3_table,
)

BUILTIN_NAMES = ("z2-group", "z3-group", "z4-group", "s3-group", "z2-fun", "s3-fun")

_registry: dict = {}


def builtin(name: str) -> HopfAlgebra:
    """Return a shared handle to a builtin algebra.

    Names are ``z2-group``, ``z3-group``, ``z4-group``, ``s3-group``
    (group algebras) and ``z2-fun``, ``s3-fun`` (function algebras).
    """
    if name not in _registry:
        if name not in BUILTIN_NAMES:
            raise ParseError(f"unknown builtin algebra {name!r}; choose from {', '.join(BUILTIN_NAMES)}")
        group, flavor = name.split("-")
        table = s3_table()[0] if group == "s3" else cyclic_table(int(group[1:]))
        G = group.upper()
        if flavor == "group":
            _registry[name] = group_algebra(table, label=f"C[{G}]")
        else:
            _registry[name] = function_algebra(table, label=f"C({G})")
    return _registry[name]


def _decode(value, shape_hint=None):
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return arr.astype(complex)
    if arr.shape[-1] != 2:
        raise ParseError("complex entries must be [re, im] pairs")
    out = arr[..., 0] + 1j * arr[..., 1]
    if shape_hint is not None and out.shape != shape_hint:
        raise ParseError(f"expected shape {shape_hint}, got {out.shape}")
    return out


def _encode(arr):
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def algebra_from_dict(data: dict) -> HopfAlgebra:
    """Build an algebra from the decoded JSON file format.

    Raises
    ------
    ParseError
        On missing keys or malformed arrays.
    """
    try:
        if "group" in data:
            grp = data["group"]
            cayley = grp["cayley"]
            labels = grp.get("labels")
            if labels is not None and cayley and isinstance(cayley[0][0], str):
                index = {lab: i for i, lab in enumerate(labels)}
                cayley = [[index[c] for c in row] for row in cayley]
            flavor = data.get("flavor", "group_algebra")
            label = data.get("label")
            if flavor == "group_algebra":
                return group_algebra(cayley, label=label or "C[G]")
            if flavor == "function_algebra":
                return function_algebra(cayley, label=label or "C(G)")
            raise ParseError(f"unknown flavor {flavor!r}")
        n = int(data["dim"])
        star = data.get("star")
        return new_algebra(
            _decode(data["mult"], (n, n, n)),
            _decode(data["unit"], (n,)),
            _decode(data["comult"], (n, n, n)),
            _decode(data["counit"], (n,)),
            _decode(data["antipode"], (n, n)),
            star=None if star is None else _decode(star, (n, n)),
            label=data.get("label", "H"),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed algebra data: {exc}") from exc


def algebra_to_dict(H: HopfAlgebra) -> dict:
    out = {
        "dim": H.dim,
        "mult": _encode(H.mult),
        "unit": _encode(H.unit),
        "comult": _encode(H.comult),
        "counit": _encode(H.counit),
        "antipode": _encode(H.antipode),
        "label": H.label,
    }
    if H.star is not None:
        out["star"] = _encode(H.star)
    return out


def load_algebra(source: str) -> HopfAlgebra:
    """Resolve a builtin name or a path to a JSON algebra file."""
    if source in BUILTIN_NAMES:
        return builtin(source)
    try:
        with open(source) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no builtin algebra or file named {source!r}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {source}: {exc}") from exc
    return algebra_from_dict(data)

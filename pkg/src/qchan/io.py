"""JSON channel files.

A channel file is a JSON object with exactly one representation key:

``kraus``
    list of complex matrices
``choi``
    dynamical matrix (trace ``dim``); optional ``dim``
``superoperator``
    superoperator matrix; optional ``dim``
``affine``
    ``{"kappa": [x, y, z], "eta": [x, y, z]}``
``family``
    ``{"name": ..., "params": {...}}`` with name one of ``depolarizing``
    (``d``, ``p``), ``werner_holevo`` (``d``, ``p``), ``pauli`` (``p``: real
    matrix) or ``dephasing`` (``f``: complex, or ``F``: complex matrix)

Complex numbers are ``[re, im]`` pairs (plain reals are accepted on input);
matrices are row-major nested lists. Other keys such as ``description`` are
ignored.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from . import families
from .channel import Channel

REPRESENTATION_KEYS = ("kraus", "choi", "superoperator", "affine", "family")
FAMILY_NAMES = ("depolarizing", "werner_holevo", "pauli", "dephasing")


class ChannelSpecError(ValueError):
    """The file or object does not describe a channel."""


def _complex(x) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise ChannelSpecError(f"expected a number or [re, im] pair, got {x!r}")


def decode_matrix(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ChannelSpecError("a matrix must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ChannelSpecError("matrix rows have different lengths")
    return np.array([[_complex(v) for v in r] for r in rows], dtype=complex)


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[encode_complex(v) for v in row] for row in m]


def _check_dim(obj, m):
    if "dim" in obj:
        d = obj["dim"]
        if not isinstance(d, int) or d * d != m.shape[0]:
            raise ChannelSpecError(f"'dim' = {d!r} does not match a {m.shape[0]}x{m.shape[0]} matrix")


def _family(spec) -> Channel:
    if not isinstance(spec, dict) or "name" not in spec:
        raise ChannelSpecError("'family' needs a 'name' and 'params'")
    name = spec["name"]
    params = spec.get("params", {})
    if name not in FAMILY_NAMES:
        raise ChannelSpecError(f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}")
    try:
        if name == "depolarizing":
            return families.depolarizing(int(params["d"]), float(params["p"]))
        if name == "werner_holevo":
            return families.werner_holevo(int(params["d"]), float(params["p"]))
        if name == "pauli":
            p = np.asarray(params["p"], dtype=float)
            return families.generalized_pauli(p.shape[0], p)
        if "F" in params:
            return families.dephasing_qudit(decode_matrix(params["F"]))
        return families.dephasing_qubit(_complex(params["f"]))
    except KeyError as exc:
        raise ChannelSpecError(f"family {name!r} is missing parameter {exc}") from exc


def channel_from_obj(obj) -> Channel:
    if not isinstance(obj, dict):
        raise ChannelSpecError("a channel spec must be a JSON object")
    present = [k for k in REPRESENTATION_KEYS if k in obj]
    if len(present) != 1:
        raise ChannelSpecError(
            f"expected exactly one of {', '.join(REPRESENTATION_KEYS)}; found {present or 'none'}"
        )
    key = present[0]
    value = obj[key]
    try:
        if key == "kraus":
            if not isinstance(value, list) or not value:
                raise ChannelSpecError("'kraus' must be a non-empty list of matrices")
            return Channel.from_kraus([decode_matrix(m) for m in value])
        if key == "choi":
            m = decode_matrix(value)
            _check_dim(obj, m)
            return Channel.from_dynamical(m)
        if key == "superoperator":
            m = decode_matrix(value)
            _check_dim(obj, m)
            return Channel.from_superoperator(m)
        if key == "affine":
            if not isinstance(value, dict):
                raise ChannelSpecError("'affine' must be an object with 'kappa' and 'eta'")
            a = families.AffineQubit(value.get("kappa", (0, 0, 0)), value.get("eta", (0, 0, 0)))
            return families.affine_qubit_channel(a)
        return _family(value)
    except ChannelSpecError:
        raise
    except (TypeError, ValueError) as exc:
        raise ChannelSpecError(str(exc)) from exc


def channel_to_obj(c: Channel, representation: str = "kraus") -> dict:
    """Serialize to the ``kraus``, ``choi`` or ``superoperator`` representation."""
    if representation == "kraus":
        return {"kraus": [encode_matrix(e) for e in c.kraus]}
    if representation == "choi":
        return {"dim": c.dim, "choi": encode_matrix(c.dynamical)}
    if representation == "superoperator":
        return {"dim": c.dim, "superoperator": encode_matrix(c.superoperator)}
    raise ValueError(f"cannot serialize to {representation!r}")


def loads(text: str) -> Channel:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelSpecError(f"invalid JSON: {exc}") from exc
    return channel_from_obj(obj)


def load(path) -> Channel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ChannelSpecError(f"cannot read {path}: {exc}") from exc
    return loads(text)


def _format_matrix(m, indent: str) -> str:
    rows = (json.dumps(r, separators=(", ", ": ")) for r in m)
    return "[\n" + ",\n".join(indent + "  " + r for r in rows) + "\n" + indent + "]"


def dumps(c: Channel, representation: str = "kraus", **extra) -> str:
    """JSON text with one matrix row per line."""
    obj = dict(extra)
    obj.update(channel_to_obj(c, representation))
    parts = []
    for key, value in obj.items():
        if key == "kraus":
            mats = ",\n".join("    " + _format_matrix(m, "    ") for m in value)
            text = "[\n" + mats + "\n  ]"
        elif key in ("choi", "superoperator"):
            text = _format_matrix(value, "  ")
        else:
            text = json.dumps(value)
        parts.append(f"  {json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n}"


def dump(c: Channel, path, representation: str = "kraus", **extra) -> None:
    Path(path).write_text(dumps(c, representation, **extra) + "\n")


def fixture_path(name: str) -> Path:
    """Path of a shipped fixture, e.g. ``fixture_path("psi1")``."""
    fname = name if name.endswith(".json") else name + ".json"
    return Path(str(resources.files("qchan") / "fixtures" / fname))


def load_fixture(name: str) -> Channel:
    return load(fixture_path(name))


def fixture_names() -> list[str]:
    folder = resources.files("qchan") / "fixtures"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".json"))

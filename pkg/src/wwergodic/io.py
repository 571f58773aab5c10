"""File formats: JSON inputs validated against bundled schemas, and binary streams.

Stream layout (little endian)::

    uint64  header length L
    L bytes UTF-8 JSON header {"d": int, "box": [N_1, ..., N_d]}
    complex64 samples, row-major over [0, N_1] x ... x [0, N_d]
"""

from __future__ import annotations

import json
import math
import struct
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from .ncsystem import MatrixSystem, matrix_from_json
from .spectral import TorusMeasure
from .vandercorput import OperatorArray2D
from .weights import TrigPolynomial, WeightSequence, example59


class InputError(ValueError):
    """Unreadable, malformed or inconsistent input."""


@lru_cache(maxsize=None)
def schema(name: str) -> dict:
    text = resources.files("wwergodic").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def validate(data, name: str) -> None:
    try:
        jsonschema.validate(data, schema(name))
    except jsonschema.ValidationError as exc:
        raise InputError(f"{name}: {exc.message}") from exc


def read_json(path) -> object:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _complex_list(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    return arr[:, 0] + 1j * arr[:, 1]


def _pairs(values) -> list:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


# ---------------------------------------------------------------------------
# weights


def weight_from_json(data: dict, seed: Optional[int] = None) -> WeightSequence:
    validate(data, "weight")
    box = [int(v) for v in data["box"]]
    if "generator" not in data:
        d = int(data["d"])
        if len(box) != d:
            raise InputError("box length differs from d")
        vals = _complex_list(data["values"])
        expected = math.prod(b + 1 for b in box)
        if vals.size != expected:
            raise InputError(f"expected {expected} values for box {box}, got {vals.size}")
        origin = data.get("origin")
        if origin is not None and len(origin) != d:
            raise InputError("origin length differs from d")
        return WeightSequence(vals.reshape(tuple(b + 1 for b in box)), origin)
    gen = data["generator"]
    kind = gen["kind"]
    d = int(gen.get("d", len(box)))
    if len(box) != d:
        raise InputError("box length differs from generator dimension")
    if kind == "trigpoly":
        terms = gen.get("terms", [])
        for t in terms:
            if len(t["angles"]) != d:
                raise InputError("term angles differ from the dimension")
        if not terms:
            return WeightSequence.from_generator(TrigPolynomial.zero(d), box)
        psi = TrigPolynomial.from_terms([(tuple(t["angles"]), complex(*t["coeff"])) for t in terms], d=d)
        return WeightSequence.from_generator(psi, box)
    if kind == "example59":
        return WeightSequence.from_generator(example59(d, gen.get("base", math.e)), box)
    # bernoulli: i.i.d. +-1 samples; the seed must be explicit
    s = gen.get("seed", seed)
    if s is None:
        raise InputError("randomized input needs an explicit seed (generator.seed or --seed)")
    rng = np.random.default_rng(int(s))
    vals = rng.choice(np.array([-1.0, 1.0]), size=tuple(b + 1 for b in box))
    return WeightSequence(vals.astype(complex))


def weight_to_json(a: WeightSequence) -> dict:
    out = {"d": a.d, "box": list(a.box), "values": _pairs(a.values)}
    if any(a.origin):
        out["origin"] = list(a.origin)
    return out


def trigpoly_to_json(psi: TrigPolynomial, box) -> dict:
    return {
        "generator": {
            "kind": "trigpoly",
            "d": psi.d,
            "terms": [{"angles": list(f.angles), "coeff": [c.real, c.imag]} for f, c in psi.terms()],
        },
        "box": list(box),
    }


# ---------------------------------------------------------------------------
# measures, matrices, systems, operator arrays


def measure_from_json(data: dict) -> TorusMeasure:
    validate(data, "measure")
    try:
        return TorusMeasure.from_dict(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def matrix_from_data(data) -> np.ndarray:
    validate(data, "matrix")
    try:
        return matrix_from_json(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def system_from_json(data: dict) -> MatrixSystem:
    validate(data, "system")
    try:
        return MatrixSystem.from_dict(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def operator_array_from_json(data: dict) -> OperatorArray2D:
    validate(data, "operator_array")
    try:
        return OperatorArray2D.from_dict(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# binary streams


def write_stream(path, samples: np.ndarray) -> None:
    samples = np.asarray(samples)
    header = json.dumps({"d": samples.ndim, "box": [s - 1 for s in samples.shape]}).encode()
    with open(path, "wb") as fh:
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        fh.write(np.ascontiguousarray(samples, dtype="<c8").tobytes())


def read_stream(path) -> np.ndarray:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if len(raw) < 8:
        raise InputError("stream too short for its header")
    (hlen,) = struct.unpack("<Q", raw[:8])
    try:
        header = json.loads(raw[8 : 8 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InputError(f"bad stream header: {exc}") from exc
    validate(header, "stream_header")
    box = header["box"]
    if len(box) != header["d"]:
        raise InputError("stream header box length differs from d")
    shape = tuple(b + 1 for b in box)
    body = raw[8 + hlen :]
    expected = math.prod(shape) * 8
    if len(body) != expected:
        raise InputError(f"stream body has {len(body)} bytes, expected {expected}")
    return np.frombuffer(body, dtype="<c8").reshape(shape).astype(np.complex128)

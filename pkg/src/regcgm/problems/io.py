"""Reading and writing Huber / group LASSO instances.

Binary layout (little endian)::

    magic      8 bytes   b"RCGMINST"
    version    uint32    1
    kind       uint32    1 = huber, 2 = glasso
    m, n       uint64
    seed       int64     -1 when unknown
    rho        float64   0 for huber
    n_groups   uint64    0 for huber
    sizes      uint64[n_groups]
    A          float64[m*n] column-major
    b          float64[m]

The CSV form has comment lines ``# key=value`` for the header fields,
then m rows ``b_i, A_i1, ..., A_in``.
"""
from __future__ import annotations

import io
import os
import struct

import numpy as np

from .ml import GroupLassoInstance, HuberInstance

MAGIC = b"RCGMINST"
VERSION = 1
_KINDS = {1: "huber", 2: "glasso"}
_HEAD = struct.Struct("<8sIIQQqdQ")


class InstanceFormatError(ValueError):
    pass


def _kind_of(inst) -> int:
    if isinstance(inst, GroupLassoInstance):
        return 2
    if isinstance(inst, HuberInstance):
        return 1
    raise TypeError(f"cannot serialise {type(inst).__name__}")


def _build(kind, A, b, seed, rho, sizes):
    if kind == 1:
        return HuberInstance(A, b, seed)
    return GroupLassoInstance(A, b, tuple(sizes), rho, seed)


def to_bytes(inst) -> bytes:
    kind = _kind_of(inst)
    sizes = list(inst.group_sizes) if kind == 2 else []
    rho = inst.rho if kind == 2 else 0.0
    buf = io.BytesIO()
    buf.write(_HEAD.pack(MAGIC, VERSION, kind, inst.m, inst.n, int(inst.seed), float(rho), len(sizes)))
    buf.write(np.asarray(sizes, dtype="<u8").tobytes())
    buf.write(inst.A.astype("<f8").tobytes(order="F"))
    buf.write(inst.b.astype("<f8").tobytes())
    return buf.getvalue()


def from_bytes(data: bytes):
    if len(data) < _HEAD.size:
        raise InstanceFormatError("truncated header")
    magic, version, kind, m, n, seed, rho, ng = _HEAD.unpack_from(data)
    if magic != MAGIC:
        raise InstanceFormatError("bad magic")
    if version != VERSION:
        raise InstanceFormatError(f"unsupported version {version}")
    if kind not in _KINDS:
        raise InstanceFormatError(f"unknown instance kind {kind}")
    off = _HEAD.size
    need = off + 8 * (ng + m * n + m)
    if len(data) != need:
        raise InstanceFormatError(f"expected {need} bytes, got {len(data)}")
    sizes = np.frombuffer(data, dtype="<u8", count=ng, offset=off).astype(int)
    off += 8 * ng
    A = np.frombuffer(data, dtype="<f8", count=m * n, offset=off).reshape((m, n), order="F")
    off += 8 * m * n
    b = np.frombuffer(data, dtype="<f8", count=m, offset=off)
    return _build(kind, A.astype(float), b.astype(float), seed, rho, sizes.tolist())


def to_csv(inst) -> str:
    kind = _kind_of(inst)
    out = io.StringIO()
    out.write(f"# kind={_KINDS[kind]}\n# m={inst.m}\n# n={inst.n}\n# seed={inst.seed}\n")
    if kind == 2:
        out.write(f"# rho={inst.rho!r}\n# groups={';'.join(map(str, inst.group_sizes))}\n")
    np.savetxt(out, np.column_stack([inst.b, inst.A]), delimiter=",", fmt="%.17g")
    return out.getvalue()


def from_csv(text: str):
    head = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            head[key.strip()] = val.strip()
        elif line.strip():
            body.append(line)
    try:
        kind = {v: k for k, v in _KINDS.items()}[head["kind"]]
        m, n, seed = int(head["m"]), int(head["n"]), int(head.get("seed", -1))
    except (KeyError, ValueError) as exc:
        raise InstanceFormatError(f"bad CSV header: {exc}") from exc
    data = np.loadtxt(io.StringIO("\n".join(body)), delimiter=",", ndmin=2)
    if data.shape != (m, n + 1):
        raise InstanceFormatError(f"expected a {m}x{n + 1} table, got {data.shape}")
    rho, sizes = 0.0, []
    if kind == 2:
        rho = float(head["rho"])
        sizes = [int(s) for s in head["groups"].split(";")]
    return _build(kind, data[:, 1:], data[:, 0], seed, rho, sizes)


def save_instance(inst, path) -> None:
    """Write ``inst`` to ``path``; a ``.csv`` suffix selects the CSV form."""
    path = os.fspath(path)
    if path.endswith(".csv"):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(to_csv(inst))
    else:
        with open(path, "wb") as fh:
            fh.write(to_bytes(inst))


def load_instance(path):
    path = os.fspath(path)
    if path.endswith(".csv"):
        with open(path, encoding="utf-8") as fh:
            return from_csv(fh.read())
    with open(path, "rb") as fh:
        return from_bytes(fh.read())

"""Binary tensor file formats "CTF1" and "CIR1".

Layout (all multi-byte fields little-endian):

    offset 0   4 bytes   magic, b"CTF1" or b"CIR1"
    offset 4   u32       format version (currently 1)
    offset 8   8 bytes   reserved, zero            -> 16-byte header
    offset 16  u32       band code (24 or 60)
    offset 20  u32       link code (11, 12, 21, 22 = tx digit * 10 + rx digit)
    offset 24  u32       N_f (CTF1) or N_tau (CIR1)
    offset 28  u32       N_phi_R
    offset 32  u32       N_phi_T
    (CIR1 only) f64      delay_bin_width in seconds
    then                 row-major complex64 samples in index order
                         [f][phi_R][phi_T]: f32 real then f32 imaginary

Values are stored at single precision; reading promotes to complex128.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import Band, CirTensor, CtfTensor, LinkId
from .errors import FileFormatError

CTF_MAGIC = b"CTF1"
CIR_MAGIC = b"CIR1"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sI8s")
_DIMS = struct.Struct("<5I")
_F64 = struct.Struct("<d")

_BAND_BY_CODE = {b.code: b for b in Band}
_LINK_BY_CODE = {l.code: l for l in LinkId}


def _pack_common(magic: bytes, band: Band, link: LinkId, shape) -> bytes:
    head = _HEADER.pack(magic, FORMAT_VERSION, b"\x00" * 8)
    dims = _DIMS.pack(band.code, link.code, *shape)
    return head + dims


def _payload(values: np.ndarray) -> bytes:
    return np.ascontiguousarray(values, dtype="<c8").tobytes()


def write_ctf(path, ctf: CtfTensor) -> None:
    data = _pack_common(CTF_MAGIC, ctf.band, ctf.link, ctf.values.shape)
    Path(path).write_bytes(data + _payload(ctf.values))


def write_cir(path, cir: CirTensor) -> None:
    data = _pack_common(CIR_MAGIC, cir.band, cir.link, cir.values.shape)
    data += _F64.pack(cir.delay_bin_width)
    Path(path).write_bytes(data + _payload(cir.values))


def _read_common(path, expected_magic: bytes):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size + _DIMS.size:
        raise FileFormatError(f"truncated tensor file: {path}")
    magic, version, _ = _HEADER.unpack_from(raw, 0)
    if magic != expected_magic:
        raise FileFormatError(
            f"bad magic {magic!r} (expected {expected_magic!r}) in {path}"
        )
    if version != FORMAT_VERSION:
        raise FileFormatError(f"unsupported format version {version} in {path}")
    band_code, link_code, n0, n1, n2 = _DIMS.unpack_from(raw, _HEADER.size)
    try:
        band = _BAND_BY_CODE[band_code]
        link = _LINK_BY_CODE[link_code]
    except KeyError as exc:
        raise FileFormatError(f"unknown band/link code in {path}") from exc
    return raw, band, link, (n0, n1, n2)


def _read_payload(raw: bytes, offset: int, shape, path) -> np.ndarray:
    count = shape[0] * shape[1] * shape[2]
    expected = offset + 8 * count
    if len(raw) != expected:
        raise FileFormatError(
            f"tensor file size {len(raw)} != expected {expected}: {path}"
        )
    flat = np.frombuffer(raw, dtype="<c8", count=count, offset=offset)
    return flat.reshape(shape).astype(np.complex128)


def read_ctf(path) -> CtfTensor:
    raw, band, link, shape = _read_common(path, CTF_MAGIC)
    values = _read_payload(raw, _HEADER.size + _DIMS.size, shape, path)
    return CtfTensor(band, link, values)


def read_cir(path) -> CirTensor:
    raw, band, link, shape = _read_common(path, CIR_MAGIC)
    offset = _HEADER.size + _DIMS.size
    if len(raw) < offset + _F64.size:
        raise FileFormatError(f"truncated tensor file: {path}")
    (bin_width,) = _F64.unpack_from(raw, offset)
    values = _read_payload(raw, offset + _F64.size, shape, path)
    return CirTensor(band, link, values, delay_bin_width=bin_width)

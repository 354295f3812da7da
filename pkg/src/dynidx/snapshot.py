"""Little-endian binary snapshots of named numpy arrays.

Layout: magic ``DIX1``, u32 field count, then per field: u16 name length,
UTF-8 name, u8 dtype code, u64 payload byte count, payload.
"""
import struct

import numpy as np

MAGIC = b"DIX1"
_CODES = {0: np.dtype("<u1"), 1: np.dtype("<i8"), 2: np.dtype("<u8")}
_BY_DTYPE = {np.dtype(np.uint8): 0, np.dtype(np.int64): 1, np.dtype(np.uint64): 2}


class SnapshotError(ValueError):
    pass


def dumps(fields):
    parts = [MAGIC, struct.pack("<I", len(fields))]
    for name, arr in fields.items():
        arr = np.asarray(arr)
        code = _BY_DTYPE.get(arr.dtype)
        if code is None:
            arr = arr.astype(np.int64)
            code = 1
        payload = np.ascontiguousarray(arr, dtype=_CODES[code]).tobytes()
        raw = name.encode()
        parts.append(struct.pack("<H", len(raw)))
        parts.append(raw)
        parts.append(struct.pack("<BQ", code, len(payload)))
        parts.append(payload)
    return b"".join(parts)


def loads(blob):
    mv = memoryview(blob)
    if bytes(mv[:4]) != MAGIC:
        raise SnapshotError("bad magic")
    try:
        (count,) = struct.unpack_from("<I", mv, 4)
        pos = 8
        out = {}
        for _ in range(count):
            (ln,) = struct.unpack_from("<H", mv, pos)
            pos += 2
            name = bytes(mv[pos:pos + ln]).decode()
            pos += ln
            code, nbytes = struct.unpack_from("<BQ", mv, pos)
            pos += 9
            if code not in _CODES or pos + nbytes > len(mv):
                raise SnapshotError(f"corrupt field {name!r}")
            out[name] = np.frombuffer(mv[pos:pos + nbytes], dtype=_CODES[code]).astype(
                _CODES[code].newbyteorder("="))
            pos += nbytes
    except struct.error as exc:
        raise SnapshotError("truncated snapshot") from exc
    return out

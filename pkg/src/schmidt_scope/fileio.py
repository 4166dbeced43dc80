"""JSON file formats for states, channels and plain matrices.

Complex matrices are stored as separate ``re``/``im`` nested lists (row-major).
Floats are written with ``repr`` (shortest string that round-trips), so a
parse/serialize cycle is lossless.
"""

import hashlib
import json
import sys
from typing import Optional

import numpy as np

from .channels import QuantumChannel, make_channel, KRAUS_TOL
from .errors import SchmidtScopeError
from .linalg import BipartiteState, DEFAULT_TOLERANCES, Tolerances, validate_density


class FileFormatError(SchmidtScopeError, ValueError):
    """A document is malformed; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def read_text(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def input_record(path: str, raw: bytes) -> dict:
    return {"path": path, "sha256": hashlib.sha256(raw).hexdigest()}


def loads(raw: bytes, source: str = "<input>") -> dict:
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise FileFormatError("<document>", f"{source} is not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise FileFormatError("<document>", "top level must be a JSON object")
    return doc


def dumps(doc) -> str:
    return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        raise TypeError("complex values must be split into re/im before serialization")
    return obj


def _field(doc: dict, name: str, where: str = ""):
    label = f"{where}{name}"
    if name not in doc:
        raise FileFormatError(label, "missing field")
    return doc[name]


def _int_field(doc: dict, name: str, where: str = "") -> int:
    value = _field(doc, name, where)
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise FileFormatError(f"{where}{name}", f"expected a positive integer, got {value!r}")
    return value


def _real_matrix(value, label: str, shape=None) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise FileFormatError(label, "expected a non-empty list of rows")
    width = len(value[0])
    if any(len(r) != width for r in value):
        raise FileFormatError(label, "rows have unequal lengths")
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise FileFormatError(label, "entries must be numbers") from None
    if not np.all(np.isfinite(m)):
        raise FileFormatError(label, "entries must be finite")
    if shape is not None and m.shape != shape:
        raise FileFormatError(label, f"expected shape {shape}, got {m.shape}")
    return m


def complex_matrix(doc: dict, where: str = "", shape=None) -> np.ndarray:
    re = _real_matrix(_field(doc, "re", where), f"{where}re", shape)
    im_raw = doc.get("im")
    if im_raw is None:
        return re.astype(np.complex128)
    im = _real_matrix(im_raw, f"{where}im", re.shape)
    return re + 1j * im


def matrix_doc(m) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _check_kind(doc: dict, kind: str) -> None:
    got = doc.get("kind")
    if got != kind:
        raise FileFormatError("kind", f"expected {kind!r}, got {got!r}")


def parse_state(doc: dict, validate: bool = True, tols: Tolerances = DEFAULT_TOLERANCES):
    """Return a BipartiteState, or ``(matrix, na, nb)`` when ``validate`` is False."""
    _check_kind(doc, "state")
    na = _int_field(doc, "na")
    nb = _int_field(doc, "nb")
    n = na * nb
    rho = complex_matrix(doc, shape=(n, n))
    if not validate:
        return rho, na, nb
    return validate_density(rho, na, nb, tols)


def state_doc(x, na: Optional[int] = None, nb: Optional[int] = None) -> dict:
    if isinstance(x, BipartiteState):
        rho, na, nb = x.rho, x.na, x.nb
    else:
        rho = x
    return {"kind": "state", "na": int(na), "nb": int(nb), **matrix_doc(rho)}


def parse_channel(doc: dict, tol: float = KRAUS_TOL) -> QuantumChannel:
    _check_kind(doc, "channel")
    in_dim = _int_field(doc, "in_dim")
    out_dim = _int_field(doc, "out_dim")
    kraus = _field(doc, "kraus")
    if not isinstance(kraus, list) or not kraus:
        raise FileFormatError("kraus", "expected a non-empty list")
    ops = []
    for i, k in enumerate(kraus):
        if not isinstance(k, dict):
            raise FileFormatError(f"kraus[{i}]", "expected an object with re/im")
        ops.append(complex_matrix(k, f"kraus[{i}].", shape=(out_dim, in_dim)))
    return make_channel(ops, tol)


def channel_doc(ch: QuantumChannel) -> dict:
    return {"kind": "channel", "in_dim": ch.in_dim, "out_dim": ch.out_dim,
            "kraus": [matrix_doc(k) for k in ch.kraus]}


def parse_matrix(doc: dict) -> np.ndarray:
    if "kind" in doc and doc["kind"] != "matrix":
        raise FileFormatError("kind", f"expected 'matrix', got {doc['kind']!r}")
    return complex_matrix(doc)

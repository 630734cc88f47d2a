"""Dense Hermitian operators over labelled tensor-product spaces.

An :class:`OperatorTensor` carries an ordered tuple of :class:`Wire` objects.
The matrix factor order is the wire order.  Every wire is either an input
(``"in"``) or an output (``"out"``); its integer ``id`` is the label used to
link wires between operators.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateWire, NotHermitian, UnknownWire

IN = "in"
OUT = "out"


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9
    psd: float = 1e-9
    eq: float = 1e-9
    prop: float = 1e-8

    def __post_init__(self):
        for name in ("herm", "psd", "eq", "prop"):
            if getattr(self, name) < 0:
                raise ValueError(f"tolerance {name} must be nonnegative")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class WireType:
    name: str
    dim: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("wire type needs a nonempty name")
        if int(self.dim) < 1:
            raise ValueError(f"wire dimension must be >= 1, got {self.dim}")


@dataclass(frozen=True)
class Wire:
    type: WireType
    id: int
    orientation: str = OUT

    def __post_init__(self):
        if self.orientation not in (IN, OUT):
            raise ValueError(f"orientation must be 'in' or 'out', got {self.orientation!r}")

    @property
    def dim(self) -> int:
        return self.type.dim

    @property
    def is_input(self) -> bool:
        return self.orientation == IN

    def flipped(self) -> "Wire":
        return Wire(self.type, self.id, OUT if self.orientation == IN else IN)

    def __str__(self):
        arrow = "_" if self.is_input else "^"
        return f"{self.type.name}{arrow}{self.id}"


def qubit(id: int, orientation: str = OUT, name: str = "q") -> Wire:
    return Wire(WireType(name, 2), id, orientation)


def _hermitian_defect(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(m))))
    return float(np.max(np.abs(m - m.conj().T))) / scale


class OperatorTensor:
    """Hermitian matrix acting on the tensor product of its wires' spaces.

    The matrix is stored read-only; every operation returns a new tensor.
    """

    __slots__ = ("wires", "matrix")

    def __init__(self, wires: Sequence[Wire], matrix, *, tol: Tolerances = DEFAULT_TOL,
                 check: bool = True):
        wires = tuple(wires)
        ids = [w.id for w in wires]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicateWire(f"wire ids repeated within one tensor: {dup}")
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        dim = int(np.prod([w.dim for w in wires], dtype=np.int64)) if wires else 1
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} does not match wire dimension {dim}")
        if check and _hermitian_defect(m) > tol.herm:
            raise NotHermitian(f"matrix deviates from Hermitian by {_hermitian_defect(m):.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "wires", wires)
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, key, value):
        raise AttributeError("OperatorTensor is immutable")

    # -- structure -------------------------------------------------------
    @property
    def ids(self) -> tuple[int, ...]:
        return tuple(w.id for w in self.wires)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(w.dim for w in self.wires)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def inputs(self) -> tuple[Wire, ...]:
        return tuple(w for w in self.wires if w.is_input)

    @property
    def outputs(self) -> tuple[Wire, ...]:
        return tuple(w for w in self.wires if not w.is_input)

    @property
    def is_scalar(self) -> bool:
        return not self.wires

    def scalar(self) -> complex:
        if self.wires:
            raise ValueError("operator still has open wires")
        return complex(self.matrix[0, 0])

    def wire(self, id: int) -> Wire:
        for w in self.wires:
            if w.id == id:
                return w
        raise UnknownWire(f"no wire with id {id} on {self!r}")

    def index(self, id: int) -> int:
        for k, w in enumerate(self.wires):
            if w.id == id:
                return k
        raise UnknownWire(f"no wire with id {id} on {self!r}")

    def as_array(self) -> np.ndarray:
        """Matrix reshaped to ``dims + dims`` (ket axes then bra axes)."""
        return self.matrix.reshape(self.dims + self.dims)

    def reorder(self, ids: Sequence[int]) -> "OperatorTensor":
        """Permute the tensor factors into the order given by ``ids``."""
        ids = list(ids)
        if sorted(ids) != sorted(self.ids):
            raise UnknownWire(f"reorder ids {ids} do not match {list(self.ids)}")
        perm = [self.index(i) for i in ids]
        if perm == list(range(len(perm))):
            return self
        k = len(perm)
        arr = self.as_array().transpose(perm + [p + k for p in perm])
        wires = [self.wires[p] for p in perm]
        return OperatorTensor(wires, arr.reshape(self.dim, self.dim), check=False)

    def relabel(self, mapping: dict[int, int]) -> "OperatorTensor":
        wires = [Wire(w.type, mapping.get(w.id, w.id), w.orientation) for w in self.wires]
        return OperatorTensor(wires, self.matrix, check=False)

    def with_matrix(self, matrix, check: bool = True) -> "OperatorTensor":
        return OperatorTensor(self.wires, matrix, check=check)

    def __add__(self, other: "OperatorTensor") -> "OperatorTensor":
        other = other.reorder(self.ids) if other.ids != self.ids else other
        if other.wires != self.wires:
            raise ValueError("cannot add operators with different wire signatures")
        return OperatorTensor(self.wires, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "OperatorTensor") -> "OperatorTensor":
        return self + other * -1.0

    def __mul__(self, c: float) -> "OperatorTensor":
        return OperatorTensor(self.wires, self.matrix * c, check=False)

    __rmul__ = __mul__

    def allclose(self, other: "OperatorTensor", atol: float = 1e-9) -> bool:
        if sorted(self.ids) != sorted(other.ids):
            return False
        other = other.reorder(self.ids)
        return other.wires == self.wires and np.allclose(self.matrix, other.matrix, atol=atol, rtol=0)

    def __repr__(self):
        sig = " ".join(str(w) for w in self.wires) or "scalar"
        return f"OperatorTensor({sig}, dim={self.dim})"


def scalar_operator(value: float) -> OperatorTensor:
    return OperatorTensor((), np.array([[value]]), check=False)


def identity(wires: Iterable[Wire]) -> OperatorTensor:
    """Kronecker product of per-wire identities, in the given order."""
    wires = tuple(wires)
    dim = int(np.prod([w.dim for w in wires], dtype=np.int64)) if wires else 1
    return OperatorTensor(wires, np.eye(dim), check=False)


def tensor_product(a: OperatorTensor, b: OperatorTensor) -> OperatorTensor:
    clash = set(a.ids) & set(b.ids)
    if clash:
        raise DuplicateWire(f"operands share wire ids {sorted(clash)}")
    return OperatorTensor(a.wires + b.wires, np.kron(a.matrix, b.matrix), check=False)


def _check_ids(a: OperatorTensor, ids) -> set[int]:
    ids = set(ids)
    unknown = ids - set(a.ids)
    if unknown:
        raise UnknownWire(f"unknown wire ids {sorted(unknown)} for {a!r}")
    return ids


def partial_trace(a: OperatorTensor, ids: Iterable[int]) -> OperatorTensor:
    ids = _check_ids(a, ids)
    if not ids:
        return a
    k = len(a.wires)
    ket = list(range(k))
    bra = [k + i for i in range(k)]
    keep = []
    for pos, w in enumerate(a.wires):
        if w.id in ids:
            bra[pos] = ket[pos]
        else:
            keep.append(pos)
    out = [ket[p] for p in keep] + [bra[p] for p in keep]
    arr = np.einsum(a.as_array(), ket + bra, out)
    wires = [a.wires[p] for p in keep]
    dim = int(np.prod([w.dim for w in wires], dtype=np.int64)) if wires else 1
    return OperatorTensor(wires, arr.reshape(dim, dim), check=False)


def partial_transpose(a: OperatorTensor, ids: Iterable[int]) -> OperatorTensor:
    ids = _check_ids(a, ids)
    if not ids:
        return a
    k = len(a.wires)
    perm = list(range(2 * k))
    for pos, w in enumerate(a.wires):
        if w.id in ids:
            perm[pos], perm[pos + k] = pos + k, pos
    arr = a.as_array().transpose(perm)
    return OperatorTensor(a.wires, arr.reshape(a.dim, a.dim), check=False)


def input_transpose(a: OperatorTensor) -> OperatorTensor:
    return partial_transpose(a, [w.id for w in a.inputs])


def eigenvalues(a, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Ascending real spectrum of a Hermitian operator (or raw matrix)."""
    m = a.matrix if isinstance(a, OperatorTensor) else np.asarray(a, dtype=np.complex128)
    if _hermitian_defect(m) > tol.herm:
        raise NotHermitian(f"matrix deviates from Hermitian by {_hermitian_defect(m):.3e}")
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def trace_norm(a, tol: Tolerances = DEFAULT_TOL) -> float:
    return float(np.sum(np.abs(eigenvalues(a, tol))))


def psd_floor(eigs: np.ndarray, eps: float) -> float:
    """Most negative eigenvalue still accepted as PSD for this spectrum."""
    dim = max(1, len(eigs))
    norm1 = float(np.sum(np.abs(eigs)))
    return -eps * dim * max(1.0, norm1 / dim)


def is_psd(a, tol: Tolerances = DEFAULT_TOL) -> bool:
    eigs = eigenvalues(a, tol)
    return len(eigs) == 0 or eigs[0] >= psd_floor(eigs, tol.psd)


def negative_sum(eigs: np.ndarray, eps: float) -> float:
    """Sum of the eigenvalues lying below the scale-aware PSD floor."""
    if len(eigs) == 0:
        return 0.0
    floor = psd_floor(eigs, eps)
    neg = eigs[eigs < floor]
    return float(np.sum(neg)) if len(neg) else 0.0


# -- JSON ---------------------------------------------------------------

def _wire_json(w: Wire) -> dict:
    return {"type": w.type.name, "dim": w.dim, "id": w.id}


def operator_to_json(a: OperatorTensor) -> dict:
    """Serialise with factor order outputs then inputs."""
    a = a.reorder([w.id for w in a.outputs] + [w.id for w in a.inputs])
    return {
        "inputs": [_wire_json(w) for w in a.inputs],
        "outputs": [_wire_json(w) for w in a.outputs],
        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in a.matrix],
    }


def operator_from_json(data: dict, tol: Tolerances = DEFAULT_TOL) -> OperatorTensor:
    try:
        outs = [Wire(WireType(str(w["type"]), int(w["dim"])), int(w["id"]), OUT)
                for w in data.get("outputs", [])]
        ins = [Wire(WireType(str(w["type"]), int(w["dim"])), int(w["id"]), IN)
               for w in data.get("inputs", [])]
        raw = np.asarray(data["matrix"], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed operator JSON: {exc}") from exc
    if raw.ndim != 3 or raw.shape[-1] != 2:
        raise ValueError("operator matrix must be a nested [[ [re, im], ... ], ...] array")
    return OperatorTensor(outs + ins, raw[..., 0] + 1j * raw[..., 1], tol=tol)


def load_operator(path, tol: Tolerances = DEFAULT_TOL) -> OperatorTensor:
    with open(path, encoding="utf-8") as fh:
        return operator_from_json(json.load(fh), tol)

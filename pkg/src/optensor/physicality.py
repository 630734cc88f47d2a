"""Physicality of operator tensors and constructors that are physical by design.

A tensor is physical when

1. its input transpose is positive semidefinite, and
2. tracing out all outputs leaves an operator whose input transpose is
   bounded above by the identity on the inputs.

Channels are stored as the input-transposed Choi matrix, so that wiring a
state into a channel reproduces the channel's action on that state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotPhysicalInput, SignatureMismatch
from .tensor import (DEFAULT_TOL, IN, OUT, OperatorTensor, Tolerances, Wire, WireType,
                     eigenvalues, input_transpose, partial_trace, psd_floor)


@dataclass(frozen=True)
class PhysicalityVerdict:
    psd_ok: bool
    causal_ok: bool
    min_eigen_after_input_transpose: float
    causal_slack_spectrum: tuple[float, ...]
    spectrum_after_input_transpose: tuple[float, ...] = ()

    @property
    def physical(self) -> bool:
        return self.psd_ok and self.causal_ok

    def to_json(self) -> dict:
        return {
            "physical": self.physical,
            "psd_ok": self.psd_ok,
            "causal_ok": self.causal_ok,
            "min_eigen_after_input_transpose": self.min_eigen_after_input_transpose,
            "causal_slack_spectrum": list(self.causal_slack_spectrum),
            "spectrum_after_input_transpose": list(self.spectrum_after_input_transpose),
        }


def output_marginal(a: OperatorTensor) -> OperatorTensor:
    """``A`` with every output wired into a deterministic (identity) effect."""
    return partial_trace(a, [w.id for w in a.outputs])


def check_physical(a: OperatorTensor, tol: Tolerances = DEFAULT_TOL) -> PhysicalityVerdict:
    eigs = eigenvalues(input_transpose(a), tol)
    psd_ok = bool(eigs[0] >= psd_floor(eigs, tol.psd))
    marg = input_transpose(output_marginal(a))
    slack = np.eye(marg.dim) - marg.matrix
    s_eigs = eigenvalues(slack, tol)
    causal_ok = bool(s_eigs[0] >= psd_floor(s_eigs, tol.psd))
    return PhysicalityVerdict(psd_ok, causal_ok, float(eigs[0]),
                              tuple(float(x) for x in s_eigs),
                              tuple(float(x) for x in eigs))


def _signature(a: OperatorTensor):
    return sorted((w.id, w.orientation, w.type.name, w.dim) for w in a.wires)


def check_complete_set(ops: Sequence[OperatorTensor], tol: Tolerances = DEFAULT_TOL) -> bool:
    ops = list(ops)
    if not ops:
        return False
    sig = _signature(ops[0])
    for op in ops[1:]:
        if _signature(op) != sig:
            raise SignatureMismatch(f"{op!r} differs from {ops[0]!r}")
    order = [w.id for w in ops[0].inputs]
    total = sum(output_marginal(op).reorder(order).matrix for op in ops)
    if np.max(np.abs(total - np.eye(total.shape[0]))) > tol.eq:
        return False
    return all(check_physical(op, tol).physical for op in ops)


# -- constructors -------------------------------------------------------

def _split_dim(dim: int) -> list[int]:
    n = int(round(np.log2(dim))) if dim > 0 else 0
    return [2] * n if 2 ** n == dim and n > 0 else [dim]


def make_wires(spec, orientation: str, dim: int, first_id: int = 1) -> list[Wire]:
    """Normalise a wire specification.

    ``spec`` may be None (qubit wires when ``dim`` is a power of two, else one
    wire), a sequence of ids, or a sequence of :class:`Wire`.
    """
    if spec is None:
        dims = _split_dim(dim)
        names = "q" if dims[0] == 2 else "s"
        return [Wire(WireType(names, d), first_id + k, orientation) for k, d in enumerate(dims)]
    out = []
    spec = list(spec)
    dims = _split_dim(dim) if spec and not isinstance(spec[0], Wire) else None
    for k, s in enumerate(spec):
        if isinstance(s, Wire):
            out.append(Wire(s.type, s.id, orientation))
        else:
            d = dims[k] if dims and len(dims) == len(spec) else dim
            out.append(Wire(WireType("q" if d == 2 else "s", d), int(s), orientation))
    total = int(np.prod([w.dim for w in out])) if out else 1
    if total != dim:
        raise NotPhysicalInput(f"wire dims multiply to {total}, operator has dimension {dim}")
    return out


def _psd(m: np.ndarray, tol: Tolerances) -> bool:
    e = eigenvalues(m, tol)
    return bool(e[0] >= psd_floor(e, tol.psd))


def from_state(rho, outputs=None, tol: Tolerances = DEFAULT_TOL) -> OperatorTensor:
    rho = np.asarray(rho, dtype=np.complex128)
    if not _psd(rho, tol) or np.trace(rho).real > 1 + tol.eq:
        raise NotPhysicalInput("state must be positive with trace <= 1")
    return OperatorTensor(make_wires(outputs, OUT, rho.shape[0]), rho, tol=tol)


def from_effect(effect, inputs=None, tol: Tolerances = DEFAULT_TOL) -> OperatorTensor:
    e = np.asarray(effect, dtype=np.complex128)
    if not _psd(e, tol) or not _psd(np.eye(e.shape[0]) - e, tol):
        raise NotPhysicalInput("effect must satisfy 0 <= E <= I")
    return OperatorTensor(make_wires(inputs, IN, e.shape[0]), e, tol=tol)


def choi_transposed(kraus) -> np.ndarray:
    """Input-transposed Choi matrix in (output, input) factor order."""
    ks = np.asarray(kraus, dtype=np.complex128)
    if ks.ndim == 2:
        ks = ks[None]
    _, d_out, d_in = ks.shape
    m = np.einsum("koj,kpi->oipj", ks, ks.conj())
    return m.reshape(d_out * d_in, d_out * d_in)


def from_channel(kraus, inputs=None, outputs=None, tol: Tolerances = DEFAULT_TOL
                 ) -> OperatorTensor:
    """Operator tensor of the CP trace non-increasing map with these Kraus operators.

    Wires are ordered outputs first, then inputs.
    """
    ks = np.asarray(kraus, dtype=np.complex128)
    if ks.ndim == 2:
        ks = ks[None]
    _, d_out, d_in = ks.shape
    gram = np.einsum("koi,koj->ij", ks.conj(), ks)
    if not _psd(np.eye(d_in) - gram, tol):
        raise NotPhysicalInput("Kraus operators are trace increasing")
    ins = make_wires(inputs, IN, d_in, first_id=1)
    outs = make_wires(outputs, OUT, d_out, first_id=1 + len(ins) if outputs is None else 1)
    return OperatorTensor(outs + ins, choi_transposed(ks), tol=tol)


def from_instrument(kraus_sets, inputs=None, outputs=None, tol: Tolerances = DEFAULT_TOL
                    ) -> list[OperatorTensor]:
    return [from_channel(ks, inputs, outputs, tol) for ks in kraus_sets]


def from_povm(elements, inputs=None, tol: Tolerances = DEFAULT_TOL) -> list[OperatorTensor]:
    return [from_effect(e, inputs, tol) for e in elements]

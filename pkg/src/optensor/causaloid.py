"""Probability tables, fiducial sets, r/p vectors and prediction heralding.

A :class:`ProbabilityTable` holds ``Prob(o_A, o_X | s_A, s_X)`` with one row per
outcome/setting pair ``[o_A|s_A]`` of a region and one column per external
context.  Every entry factorises as ``r[o_A|s_A] . p[context]`` once a minimal
fiducial set of rows is known.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import BadFiducials, DegenerateTable, HookupMismatch, UnboundedRatio, ZeroEffect
from .tensor import DEFAULT_TOL, Tolerances


def _split_label(label: str) -> tuple[str, str]:
    o, _, s = label.partition("|")
    return o, s


@dataclass(frozen=True)
class ProbabilityTable:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.rows), len(self.cols)):
            raise ValueError(f"table shape {v.shape} does not match labels")
        v.setflags(write=False)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "values", v)

    def validate(self, tol: Tolerances = DEFAULT_TOL) -> list[str]:
        """Problems with entry range or per-setting normalisation (empty if none)."""
        problems = []
        v = self.values
        if v.size and (v.min() < -tol.eq or v.max() > 1 + tol.eq):
            problems.append("entries outside [0, 1]")
        groups: dict = {}
        for i, r in enumerate(self.rows):
            groups.setdefault(_split_label(r)[1], []).append(i)
        cgroups: dict = {}
        for j, c in enumerate(self.cols):
            cgroups.setdefault(_split_label(c)[1], []).append(j)
        for s, ri in groups.items():
            for sx, cj in cgroups.items():
                total = v[np.ix_(ri, cj)].sum()
                if total > 1 + tol.eq * len(ri) * len(cj):
                    problems.append(f"setting ({s}, {sx}) sums to {total:.6g} > 1")
        return problems

    def row(self, label: str) -> np.ndarray:
        return self.values[self.rows.index(label)]

    def restrict_columns(self, cols: Sequence[int]) -> "ProbabilityTable":
        cols = list(cols)
        return ProbabilityTable(self.rows, tuple(self.cols[j] for j in cols), self.values[:, cols])


def swap(t: ProbabilityTable) -> ProbabilityTable:
    """Dual description: the external region becomes the rows."""
    return ProbabilityTable(t.cols, t.rows, t.values.T)


@dataclass(frozen=True)
class FiducialSet:
    indices: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def rank(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class RVector:
    label: str
    values: np.ndarray


@dataclass(frozen=True)
class PVector:
    label: str
    values: np.ndarray


def numerical_rank(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol.eq * s[0] * max(m.shape)))


def minimal_fiducials(t: ProbabilityTable, tol: Tolerances = DEFAULT_TOL) -> FiducialSet:
    v = t.values
    if v.size == 0:
        raise DegenerateTable("empty table")
    rank = numerical_rank(v, tol)
    if rank == 0:
        raise DegenerateTable("table has no nonzero entries")
    _, _, piv = scipy.linalg.qr(v.T, pivoting=True, mode="economic")
    idx = tuple(sorted(int(i) for i in piv[:rank]))
    return FiducialSet(idx, tuple(t.rows[i] for i in idx))


def decompose(t: ProbabilityTable, omega: FiducialSet, tol: Tolerances = DEFAULT_TOL
              ) -> tuple[dict[str, RVector], dict[str, PVector]]:
    fid = t.values[list(omega.indices)]
    if numerical_rank(fid, tol) < omega.rank:
        raise BadFiducials("fiducial rows are linearly dependent")
    coeffs, *_ = np.linalg.lstsq(fid.T, t.values.T, rcond=None)
    r_mat = coeffs.T
    err = np.max(np.abs(r_mat @ fid - t.values))
    bound = tol.eq * t.values.size * max(1.0, float(np.max(np.abs(t.values))))
    if err > bound:
        raise BadFiducials(f"fiducials reconstruct the table only to {err:.3e}")
    rvecs = {lab: RVector(lab, r_mat[i]) for i, lab in enumerate(t.rows)}
    pvecs = {lab: PVector(lab, fid[:, j].copy()) for j, lab in enumerate(t.cols)}
    return rvecs, pvecs


@dataclass(frozen=True)
class HeraldReport:
    heralded: bool
    k: float
    residual: float

    def to_json(self) -> dict:
        return {"heralded": self.heralded, "k": self.k if self.heralded else None,
                "k_fit": self.k, "residual": self.residual}


def _vec(x) -> np.ndarray:
    return np.asarray(getattr(x, "values", x), dtype=float)


def herald(r, r_ref, tol: float = DEFAULT_TOL.prop) -> HeraldReport:
    """Test ``r`` proportional to ``r_ref`` and fit ``r = k * r_ref``.

    ``residual`` is the sine of the angle between the two vectors.
    """
    r, r_ref = _vec(r), _vec(r_ref)
    if r.shape != r_ref.shape:
        raise ValueError("r-vectors have different lengths")
    nref = float(np.linalg.norm(r_ref))
    if nref == 0:
        raise ZeroEffect("reference r-vector is zero")
    k = float(r @ r_ref) / nref ** 2
    nr = float(np.linalg.norm(r))
    sine = float(np.linalg.norm(r - k * r_ref)) / nr if nr > 0 else 0.0
    return HeraldReport(sine <= tol, k, sine)


def herald_bounds(r, r_ref, admissible: Sequence) -> tuple[float, float]:
    """Range of ``(r.p)/(r_ref.p)`` over a finite admissible set of p-vectors."""
    r, r_ref = _vec(r), _vec(r_ref)
    ratios = []
    for p in admissible:
        p = _vec(p)
        den = float(r_ref @ p)
        if abs(den) <= 1e-300 or den <= 0:
            raise UnboundedRatio(f"reference probability {den} is not positive")
        ratios.append(float(r @ p) / den)
    if not ratios:
        raise ValueError("admissible set is empty")
    return min(ratios), max(ratios)


def duotensor_contract(nodes: Sequence[np.ndarray], hookups: Sequence[np.ndarray],
                       links: Sequence[tuple[int, int, int, int]]) -> np.ndarray:
    """Contract tensors over fiducial indices with a hookup matrix on every link.

    ``links[i] = (node_a, axis_a, node_b, axis_b)`` uses ``hookups[i]`` with
    rows indexed by ``axis_a`` and columns by ``axis_b``.  Free axes keep node
    order, then axis order.
    """
    nodes = [np.asarray(n) for n in nodes]
    if len(hookups) != len(links):
        raise HookupMismatch("one hookup matrix is needed per link")
    labels = []
    nxt = 0
    for n in nodes:
        labels.append(list(range(nxt, nxt + n.ndim)))
        nxt += n.ndim
    operands = []
    linked = set()
    for (a, ia, b, ib), h in zip(links, hookups):
        h = np.asarray(h)
        if h.shape != (nodes[a].shape[ia], nodes[b].shape[ib]):
            raise HookupMismatch(f"hookup {h.shape} vs wire sizes "
                                 f"{nodes[a].shape[ia]}, {nodes[b].shape[ib]}")
        operands.extend([h, [labels[a][ia], labels[b][ib]]])
        linked.add((a, ia))
        linked.add((b, ib))
    free = [labels[n][ax] for n in range(len(nodes)) for ax in range(nodes[n].ndim)
            if (n, ax) not in linked]
    for n, ls in zip(nodes, labels):
        operands.extend([n, ls])
    return np.einsum(*operands, free)


# -- CSV / JSON ---------------------------------------------------------

def table_from_csv(text: str) -> ProbabilityTable:
    reader = list(csv.reader(io.StringIO(text)))
    reader = [r for r in reader if r]
    if len(reader) < 2:
        raise ValueError("table CSV needs a header and at least one row")
    cols = tuple(c.strip() for c in reader[0][1:])
    rows, vals = [], []
    for r in reader[1:]:
        if len(r) != len(cols) + 1:
            raise ValueError(f"row {r[0]!r} has {len(r) - 1} entries, expected {len(cols)}")
        rows.append(r[0].strip())
        vals.append([float(x) for x in r[1:]])
    return ProbabilityTable(tuple(rows), cols, np.array(vals))


def table_to_csv(t: ProbabilityTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + list(t.cols))
    for lab, row in zip(t.rows, t.values):
        w.writerow([lab] + [repr(float(x)) for x in row])
    return buf.getvalue()

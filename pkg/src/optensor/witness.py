"""Recursive physicality check over foliations and the scale sweep W_l.

For a foliation with cuts ``1..N`` (earliest first) the check runs from the
latest cut backwards.  At each step the current operator lives on the past
wires ``c`` and the wires ``d`` between this cut and the next; ``d+`` are the
outputs and ``d-`` the inputs among them.  With ``Y = Tr_{d+} A`` and
``X = Tr_{d-} Y / dim(d-)``, causality demands ``Y = I_{d-} (x) X``.  The
recursion continues with ``X``, and at the earliest cut ``X`` must be the
identity on the remaining inputs.

The per-step checks are made on operators projected to the first ``K_n``
basis states of each factor (Hamming weight, then lexicographic), with
``K_n = D * 2**(N - n + 1)``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .causet import MINKOWSKI, Foliation, Rectangle, SpacetimeBackground, generate_foliations, sprinkle
from .errors import BadCompletion, TooSparse, TruncationOverflow
from .tensor import (DEFAULT_TOL, OperatorTensor, Tolerances, eigenvalues, input_transpose,
                     is_psd, negative_sum, partial_trace, trace_norm)

EPSILON_WITNESS = 1e-6
DEFAULT_CAP = 4096
# a flat sequence fits with a slope of rounding size
SLOPE_SLACK = 1e-9


@dataclass(frozen=True)
class StepRecord:
    n: int
    K: int
    neg: float
    beta: float
    alpha: float
    past: tuple[int, ...]
    future_out: tuple[int, ...]
    future_in: tuple[int, ...]

    def to_json(self) -> dict:
        return {"n": self.n, "K_n": self.K, "neg": self.neg, "beta": self.beta,
                "alpha": self.alpha, "past": list(self.past),
                "future_outputs": list(self.future_out), "future_inputs": list(self.future_in)}


@lru_cache(maxsize=256)
def _kept_states(dims: tuple[int, ...], k: int) -> np.ndarray:
    """Indices of the first ``k`` product basis states by digit sum then lex order."""
    total = math.prod(dims)
    if k >= total:
        return np.arange(total)
    digits = np.indices(dims).reshape(len(dims), -1)
    weight = digits.sum(0)
    order = np.lexsort((np.arange(total), weight))
    return np.sort(order[:k])


def _compress(m: np.ndarray, blocks: Sequence[tuple[int, ...]], k: int, cap: int) -> np.ndarray:
    """Principal submatrix on the kept states of each factor block."""
    idx = np.zeros(1, dtype=np.int64)
    for dims in blocks:
        kept = _kept_states(tuple(dims), k)
        idx = (idx[:, None] * math.prod(dims) + kept[None, :]).ravel()
    if len(idx) > cap:
        raise TruncationOverflow(f"truncated dimension {len(idx)} exceeds cap {cap}")
    return m[np.ix_(idx, idx)]


def _dims(a: OperatorTensor, ids) -> tuple[int, ...]:
    return tuple(a.wire(i).dim for i in ids)


def check_deterministic_recursion(a: OperatorTensor, fol: Foliation, D: int = 2,
                                  tol: Tolerances = DEFAULT_TOL, cap: int = DEFAULT_CAP,
                                  _memo: dict | None = None) -> list[StepRecord]:
    """Per-step diagnostics, ordered from the earliest cut (n = 1) to the latest (n = N).

    ``fol.partitions[k]`` is the set of wire ids to the future of cut ``k + 1``.
    """
    parts = [frozenset(p) & frozenset(a.ids) for p in fol.partitions]
    N = len(parts)
    if N == 0:
        raise ValueError("foliation has no cuts")
    memo = {} if _memo is None else _memo
    ids = set(a.ids)
    cur = a
    records: list[StepRecord] = []
    suffix: tuple = ()
    for k in range(N - 1, -1, -1):
        n = k + 1
        suffix = (parts[k],) + suffix
        key = (suffix, k == 0)
        if key in memo:
            cur, rec = memo[key]
            records.append(replace(rec, n=n))
            continue
        later = parts[k + 1] if k + 1 < N else frozenset()
        d = parts[k] - later
        c = sorted(ids - parts[k])
        d_out = sorted(w for w in d if not cur.wire(w).is_input)
        d_in = sorted(w for w in d if cur.wire(w).is_input)
        K = D * 2 ** (N - n + 1)

        # positivity of the current operator
        full = cur.reorder(c + d_out + d_in)
        it = input_transpose(full).matrix
        comp = _compress(it, [_dims(full, c), _dims(full, d_out + d_in)], K, cap)
        neg = negative_sum(eigenvalues(comp, tol), tol.psd) if comp.size else 0.0

        y = partial_trace(full, d_out).reorder(c + d_in)
        dim_in = math.prod(_dims(y, d_in)) if d_in else 1
        x = partial_trace(y, d_in) * (1.0 / dim_in)
        xm = x.matrix if c else np.array([[x.scalar()]])
        resid = y.matrix - np.kron(xm, np.eye(dim_in))
        rc = _compress(resid, [_dims(y, c), _dims(y, d_in)], K, cap)
        beta = trace_norm(rc, tol) if rc.size else 0.0
        xc_dims = [_dims(y, c)] if c else []
        xp = _compress(xm, xc_dims, K, cap) if c else xm
        kept = np.zeros_like(xm)
        if c:
            kept_idx = _kept_states(_dims(y, c), K)
            kept[np.ix_(kept_idx, kept_idx)] = xp
        else:
            kept = xm
        alpha = trace_norm(xm - kept, tol)
        if n == 1:
            # the remaining past holds only inputs: X must be the identity there
            beta += trace_norm(xm - np.eye(len(xm)), tol)
        rec = StepRecord(n, K, float(neg), float(beta), float(alpha), tuple(c),
                         tuple(d_out), tuple(d_in))
        if c:
            cur = x
        else:
            cur = OperatorTensor([], xm, tol=tol, check=False)
        memo[key] = (cur, rec)
        records.append(rec)
    records.reverse()
    return records


# -- sweep ----------------------------------------------------------------

@dataclass(frozen=True)
class ScaleRecord:
    m: int
    l: float
    F: int
    A: float
    W: float
    points: int
    mean_N: float


@dataclass
class WitnessReport:
    records: list[ScaleRecord]
    epsilon: float
    slope: float
    physical: bool
    alpha_decreasing: bool
    diagnostics: list = field(default_factory=list)

    @property
    def W(self) -> list[float]:
        return [r.W for r in self.records]

    @property
    def A(self) -> list[float]:
        return [r.A for r in self.records]

    def to_csv(self) -> str:
        lines = ["m,l,F,A_l,W_l"]
        for r in self.records:
            lines.append(f"{r.m},{r.l!r},{r.F},{r.A!r},{r.W!r}")
        return "\n".join(lines) + "\n"

    def to_json(self, with_steps: bool = True) -> dict:
        out = {
            "physical": self.physical,
            "epsilon_witness": self.epsilon,
            "slope": self.slope,
            "alpha_decreasing": self.alpha_decreasing,
            "records": [{"m": r.m, "l": r.l, "F": r.F, "A_l": r.A, "W_l": r.W,
                         "points": r.points, "mean_N": r.mean_N} for r in self.records],
        }
        if with_steps:
            out["foliations"] = self.diagnostics
        return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("OPTENSOR_THREADS", "")))
    except ValueError:
        return max(1, min(8, os.cpu_count() or 1))


def _nonempty_sprinkle(bg, region, l, seed, m, mode):
    # empty sprinkles are redrawn from the next child stream
    for attempt in range(1000):
        rng = np.random.default_rng([int(seed), int(m), attempt])
        try:
            return sprinkle(bg, region, l, mode=mode, rng=rng)
        except TooSparse:
            if mode == "grid":
                raise
    raise TooSparse(f"no nonempty sprinkle at l={l}")


def trend_slope(values: Sequence[float], floor: float) -> float:
    y = np.log10(np.maximum(np.asarray(values, dtype=float), floor))
    if len(y) < 2:
        return 0.0
    x = np.arange(len(y), dtype=float)
    return float(np.polyfit(x, y, 1)[0])


def witness_sweep(a: OperatorTensor, positions: Mapping[int, tuple[float, float]],
                  bg: SpacetimeBackground = MINKOWSKI, region: Rectangle | None = None,
                  L: float = 1.0, m_max: int = 6, D: int = 2, seeds: Sequence[int] = (0,),
                  mode: str = "sprinkle", epsilon: float = EPSILON_WITNESS,
                  tol: Tolerances = DEFAULT_TOL, cap: int = DEFAULT_CAP,
                  keep_steps: bool = True) -> WitnessReport:
    """Run the recursion over every foliation at scales ``l = L / m``, ``m = 1..m_max``."""
    if m_max < 2:
        raise ValueError("m_max must be at least 2")
    region = region or Rectangle(0.0, L, 0.0, L)
    missing = set(a.ids) - set(positions)
    if missing:
        raise ValueError(f"no spacetime position for wires {sorted(missing)}")
    pos = {i: tuple(positions[i]) for i in a.ids}
    inputs = [w.id for w in a.inputs]
    seeds = list(seeds)

    def job(m, seed):
        l = L / m
        cs = _nonempty_sprinkle(bg, region, l, seed, m, mode)
        fols = generate_foliations(cs, pos, inputs, bg)
        memo: dict = {}
        w_sum = a_sum = 0.0
        diag = []
        for fi, fol in enumerate(fols):
            steps = check_deterministic_recursion(a, fol, D, tol, cap, memo)
            w_sum += sum((abs(s.neg) + s.beta) / s.K for s in steps)
            a_sum += sum(s.alpha / s.K for s in steps)
            if keep_steps:
                diag.append({"m": m, "seed": seed, "foliation": fi, "N": fol.N,
                             "partitions": [sorted(p) for p in fol.partitions],
                             "steps": [s.to_json() for s in steps]})
        F = len(fols)
        return m, seed, F, w_sum / F, a_sum / F, cs.size, float(np.mean([f.N for f in fols])), diag

    jobs = [(m, s) for m in range(1, m_max + 1) for s in seeds]
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        results = list(ex.map(lambda ms: job(*ms), jobs))
    records = []
    diagnostics = []
    for m in range(1, m_max + 1):
        rs = [r for r in results if r[0] == m]
        records.append(ScaleRecord(m, L / m, sum(r[2] for r in rs),
                                   float(np.mean([r[4] for r in rs])),
                                   float(np.mean([r[3] for r in rs])),
                                   int(sum(r[5] for r in rs)),
                                   float(np.mean([r[6] for r in rs]))))
        for r in rs:
            diagnostics.extend(r[7])
    W = [r.W for r in records]
    A = [r.A for r in records]
    floor = epsilon * 1e-6
    slope = trend_slope(W, floor)
    physical = bool(W[-1] < epsilon and slope <= SLOPE_SLACK)
    alpha_decreasing = trend_slope(A, floor) <= SLOPE_SLACK
    return WitnessReport(records, epsilon, slope, physical, bool(alpha_decreasing), diagnostics)


# -- general operators ---------------------------------------------------

@dataclass(frozen=True)
class GeneralVerdict:
    physical: bool
    a_psd: bool
    complement_psd: bool

    def to_json(self) -> dict:
        return {"physical": self.physical, "a_psd": self.a_psd,
                "complement_psd": self.complement_psd}


def check_general_operator(a: OperatorTensor, det: OperatorTensor,
                           foliation: Foliation | None = None, D: int = 2,
                           tol: Tolerances = DEFAULT_TOL) -> GeneralVerdict:
    """``A`` is physical when it and ``Det - A`` are both positive under input transpose.

    ``Det`` must pass the deterministic recursion on ``foliation`` (the single
    cut with every wire in its future when none is given).
    """
    fol = foliation or Foliation((), (frozenset(det.ids),))
    steps = check_deterministic_recursion(det, fol, D, tol, cap=max(DEFAULT_CAP, det.dim))
    bad = [s for s in steps if abs(s.neg) > 0 or s.beta > tol.eq * max(1, det.dim)]
    if bad:
        raise BadCompletion(f"completion fails the deterministic check at step {bad[0].n}")
    a = a.reorder(det.ids)
    a_ok = is_psd(input_transpose(a), tol)
    b_ok = is_psd(input_transpose(det - a), tol)
    return GeneralVerdict(a_ok and b_ok, a_ok, b_ok)

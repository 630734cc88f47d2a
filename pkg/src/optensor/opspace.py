"""Discrete operational space: scalar coincidences and region outcomes."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Mapping

DECIMALS = 12


def canonical(vec) -> tuple[float, ...]:
    # rounding pins set equality; +0.0 normalises negative zero
    return tuple(float(round(float(x), DECIMALS)) + 0.0 for x in vec)


@dataclass(frozen=True)
class FieldSample:
    scalars: Mapping[object, tuple[float, ...]]

    def __post_init__(self):
        lengths = {len(v) for v in self.scalars.values()}
        if len(lengths) > 1:
            raise ValueError("every point needs the same number of scalars")

    @property
    def points(self):
        return tuple(self.scalars)

    def relabel(self, mapping: Mapping) -> "FieldSample":
        """Apply a bijection of point ids (a discrete diffeomorphism)."""
        if len(set(mapping.values())) != len(mapping) or set(mapping) != set(self.scalars):
            raise ValueError("relabelling must be a bijection on the point set")
        return FieldSample({mapping[p]: s for p, s in self.scalars.items()})


GammaSurface = frozenset


def compute_gamma(f: FieldSample) -> frozenset:
    return frozenset(canonical(s) for s in f.scalars.values())


@dataclass(frozen=True)
class OpRegion:
    """Axis-aligned closed box, or an arbitrary predicate on S-vectors."""

    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    predicate: Callable | None = None

    def contains(self, s) -> bool:
        if self.predicate is not None:
            return bool(self.predicate(s))
        if self.lower is None or self.upper is None:
            return True
        return all(lo <= x <= hi for x, lo, hi in zip(s, self.lower, self.upper))

    @classmethod
    def everything(cls) -> "OpRegion":
        return cls()

    @classmethod
    def empty(cls) -> "OpRegion":
        return cls(predicate=lambda s: False)


def region_outcome(g: frozenset, r: OpRegion) -> frozenset:
    return frozenset(s for s in g if r.contains(s))


def sample_from_csv(text: str) -> FieldSample:
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if rows and not _is_number(rows[0][1] if len(rows[0]) > 1 else ""):
        rows = rows[1:]
    return FieldSample({r[0].strip(): tuple(float(x) for x in r[1:]) for r in rows})


def _is_number(x: str) -> bool:
    try:
        float(x)
    except ValueError:
        return False
    return True


def gamma_to_json(g: frozenset) -> list:
    return [list(s) for s in sorted(g)]


def random_sample(rng, n_points: int, k: int, levels: int = 4) -> FieldSample:
    vals = rng.integers(0, levels, size=(n_points, k)) / levels
    return FieldSample({f"p{i}": tuple(v) for i, v in enumerate(vals)})

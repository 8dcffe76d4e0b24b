"""Tight sets of the Klein quadric Q+(5,q).

A line of PG(3,q) is a point of Q+(5,q) through its Plücker vector, and
two lines meet exactly when their Klein points are conjugate.  So for a
line set T and a line l, |l^perp meet T| is the number of lines of T
meeting l, l itself included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import PG3, plucker_pairing, _index


def klein_form(geom: PG3) -> np.ndarray:
    """p12 p34 - p13 p24 + p14 p23 for every line (must vanish)."""
    F, p = geom.F, geom.plucker
    mul, add, sub = F.mul_table, F.add_table, F.sub_table
    return add[sub[mul[p[:, 0], p[:, 5]], mul[p[:, 1], p[:, 4]]], mul[p[:, 2], p[:, 3]]]


def klein_perp_counts(geom: PG3, mask: np.ndarray) -> np.ndarray:
    return geom.meet_counts(np.asarray(mask, dtype=bool))


def klein_perp_count(geom: PG3, line, mask: np.ndarray) -> int:
    mask = np.asarray(mask, dtype=bool)
    i = _index(line)
    star = geom.star_counts(mask)
    return int(star[geom.line_points[i]].sum() - geom.q * mask[i])


def klein_perp_count_direct(geom: PG3, line, mask: np.ndarray) -> int:
    """Same count by the bilinear form of Q+(5,q), for cross-checking."""
    members = geom.plucker[np.flatnonzero(mask)]
    pair = plucker_pairing(geom.F, geom.plucker[_index(line)][None, :], members)
    return int((pair == 0).sum())


@dataclass
class TightReport:
    passed: bool
    i: int
    expected_in: int
    expected_out: int
    size: int
    expected_size: int
    n_violations: int
    violations: list[tuple[int, int]] = field(default_factory=list)

    def as_dict(self, sample: int = 10) -> dict:
        return {
            "pass": self.passed,
            "i": self.i,
            "expected_in": self.expected_in,
            "expected_out": self.expected_out,
            "size": self.size,
            "expected_size": self.expected_size,
            "n_violations": self.n_violations,
            "sample_violations": [list(v) for v in self.violations[:sample]],
        }


def verify_tight(geom: PG3, mask: np.ndarray, i: int) -> TightReport:
    """Check the i-tight condition on every line.

    A size different from i(q^2+q+1) fails at once, without the scan.
    """
    q = geom.q
    mask = np.asarray(mask, dtype=bool)
    exp_in, exp_out = i * (q + 1) + q * q, i * (q + 1)
    size, want = int(mask.sum()), i * (q * q + q + 1)
    if size != want:
        return TightReport(False, i, exp_in, exp_out, size, want, 0, [])
    counts = klein_perp_counts(geom, mask)
    expected = np.where(mask, exp_in, exp_out)
    bad = np.flatnonzero(counts != expected)
    return TightReport(
        passed=len(bad) == 0, i=i, expected_in=exp_in, expected_out=exp_out,
        size=size, expected_size=want, n_violations=int(len(bad)),
        violations=[(int(b), int(counts[b])) for b in bad],
    )

"""PGL(2,q) acting on PG(3,q) through the matrices

    [[a^2, 2ac,     c^2, 0      ],
     [ab,  ad + bc, cd,  0      ],
     [b^2, 2bd,     d^2, 0      ],
     [0,   0,       0,   ad - bc]]

which stabilise every quadric of the pencil.  Orbits are found by BFS
over index permutations induced by three generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .gf import FieldElement
from .geometry import PG3, DegenerateError, canonical_matrix, matmul


@dataclass(frozen=True)
class GroupElement:
    source: tuple[FieldElement, FieldElement, FieldElement, FieldElement]
    matrix: np.ndarray   # canonical 4x4 code matrix

    def key(self) -> bytes:
        return self.matrix.tobytes()


@dataclass
class OrbitPartition:
    kind: str
    orbit_id: np.ndarray
    sizes: list[int]
    representatives: list[int]

    def __len__(self) -> int:
        return len(self.sizes)

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.orbit_id == k)


def embed(F, a, b, c, d) -> GroupElement:
    a, b, c, d = (F(x) for x in (a, b, c, d))
    det = a * d - b * c
    if not det:
        raise DegenerateError("ad - bc must be nonzero")
    z = F.zero
    rows = [
        [a * a, 2 * a * c, c * c, z],
        [a * b, a * d + b * c, c * d, z],
        [b * b, 2 * b * d, d * d, z],
        [z, z, z, det],
    ]
    M = np.array([[e.code for e in r] for r in rows], dtype=np.int64)
    return GroupElement((a, b, c, d), canonical_matrix(F, M))


def compose(F, g: GroupElement, h: GroupElement) -> np.ndarray:
    """Canonical matrix of the product g.h (apply h first)."""
    return canonical_matrix(F, matmul(F, g.matrix, h.matrix))


def generators(F) -> list[GroupElement]:
    """Translation, dilation by a primitive element, and the swap."""
    g = F.primitive_element()
    return [embed(F, 1, 1, 0, 1), embed(F, g, 0, 0, 1), embed(F, 0, 1, 1, 0)]


def closure(F, gens: list[GroupElement], limit: int | None = None) -> int:
    """Number of distinct projective matrices generated (BFS)."""
    seen = {g.key(): g.matrix for g in gens}
    frontier = list(seen.values())
    while frontier:
        nxt = []
        for M in frontier:
            for g in gens:
                P = canonical_matrix(F, matmul(F, g.matrix, M))
                k = P.tobytes()
                if k not in seen:
                    seen[k] = P
                    nxt.append(P)
                    if limit and len(seen) > limit:
                        return len(seen)
        frontier = nxt
    return len(seen)


class GroupAction:
    """The group G generated by :func:`generators`, acting on one PG3."""

    def __init__(self, geom: PG3):
        self.geom = geom
        self.F = geom.F
        self.order = geom.q**3 - geom.q
        self.gens = generators(self.F)
        self.point_perms = [geom.point_permutation(g.matrix) for g in self.gens]
        self.line_perms = [geom.line_permutation(g.matrix) for g in self.gens]
        self.plane_perms = [geom.plane_permutation(g.matrix) for g in self.gens]

    def _perms(self, kind: str) -> list[np.ndarray]:
        return {"point": self.point_perms, "line": self.line_perms,
                "plane": self.plane_perms}[kind]

    def orbits(self, kind: str) -> OrbitPartition:
        perms = self._perms(kind)
        n = len(perms[0])
        oid = np.full(n, -1, dtype=np.int64)
        sizes, reps = [], []
        for seed in range(n):
            if oid[seed] >= 0:
                continue
            k = len(sizes)
            oid[seed] = k
            queue, size = deque([seed]), 1
            while queue:
                x = queue.popleft()
                for p in perms:
                    y = int(p[x])
                    if oid[y] < 0:
                        oid[y] = k
                        size += 1
                        queue.append(y)
            sizes.append(size)
            reps.append(seed)
        return OrbitPartition(kind, oid, sizes, reps)

    def is_invariant(self, mask: np.ndarray, kind: str = "line") -> bool:
        mask = np.asarray(mask, dtype=bool)
        members = np.flatnonzero(mask)
        return all(mask[p[members]].all() for p in self._perms(kind))

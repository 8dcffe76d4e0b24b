"""Points, lines and planes of PG(3,q) as index tables.

Points and planes share one table of canonical 4-vectors (first nonzero
coordinate equal to 1, sorted lexicographically); a plane's vector holds
the coefficients of its equation.  Lines are indexed by the lexicographic
rank of their canonical Plücker vector (p12, p13, p14, p23, p24, p34).

Every per-object quantity is held in a numpy array of field codes or of
indices, so incidence questions reduce to table lookups.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .gf import GF, FieldElement

PLUCKER_PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class DegenerateError(ValueError):
    """Raised for a span or matrix that does not have full rank."""


@dataclass(frozen=True)
class ProjPoint:
    index: int
    coords: tuple[FieldElement, ...]


@dataclass(frozen=True)
class ProjLine:
    index: int
    plucker: tuple[FieldElement, ...]
    span: tuple[int, int]
    points_on: tuple[int, ...]


@dataclass(frozen=True)
class ProjPlane:
    index: int
    dual_coords: tuple[FieldElement, ...]


Obj = Union[ProjPoint, ProjLine, ProjPlane]


def _encode(F: GF, rows: np.ndarray) -> np.ndarray:
    key = np.zeros(rows.shape[0], dtype=np.int64)
    for j in range(rows.shape[1]):
        key = key * F.q + rows[:, j]
    return key


def normalize(F: GF, rows: np.ndarray) -> np.ndarray:
    """Scale each row so that its first nonzero entry is 1."""
    rows = np.asarray(rows, dtype=np.int64)
    nz = rows != 0
    if not nz.any(axis=1).all():
        raise DegenerateError("zero vector has no projective point")
    first = nz.argmax(axis=1)
    lead = rows[np.arange(rows.shape[0]), first]
    scale = F.inv_table[lead]
    out = F.mul_table[scale[:, None], rows]
    return out


def plucker(F: GF, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Plücker 6-vectors of the spans of row pairs (not normalised)."""
    mul, sub = F.mul_table, F.sub_table
    cols = [sub[mul[a[:, i], b[:, j]], mul[a[:, j], b[:, i]]] for i, j in PLUCKER_PAIRS]
    return np.stack(cols, axis=1)


def plucker_pairing(F: GF, p: np.ndarray, r: np.ndarray) -> np.ndarray:
    """p12 r34 - p13 r24 + p14 r23 + p23 r14 - p24 r13 + p34 r12."""
    mul, add, sub = F.mul_table, F.add_table, F.sub_table
    acc = mul[p[..., 0], r[..., 5]]
    acc = sub[acc, mul[p[..., 1], r[..., 4]]]
    acc = add[acc, mul[p[..., 2], r[..., 3]]]
    acc = add[acc, mul[p[..., 3], r[..., 2]]]
    acc = sub[acc, mul[p[..., 4], r[..., 1]]]
    return add[acc, mul[p[..., 5], r[..., 0]]]


def mat_codes(F: GF, M) -> np.ndarray:
    """Accept a matrix of codes, ints or FieldElements; return codes."""
    out = np.empty((4, 4), dtype=np.int64)
    for i in range(4):
        for j in range(4):
            e = M[i][j]
            out[i, j] = e.code if isinstance(e, FieldElement) else F(int(e)).code
    return out


def matvec(F: GF, M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Apply a 4x4 code matrix to every row of X (points as columns)."""
    return np.stack([F.dot(M[i][None, :], X) for i in range(M.shape[0])], axis=1)


def matmul(F: GF, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return matvec(F, A, B.T).T


def mat_inverse(F: GF, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    a = [[F.from_code(int(M[i, j])) for j in range(n)] + [F.one if i == j else F.zero
                                                          for j in range(n)]
         for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise DegenerateError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        s = a[col][col].inv()
        a[col] = [s * e for e in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [e - f * g for e, g in zip(a[r], a[col])]
    return np.array([[e.code for e in row[n:]] for row in a], dtype=np.int64)


def canonical_matrix(F: GF, M: np.ndarray) -> np.ndarray:
    """Projective representative: first nonzero entry scaled to 1."""
    return normalize(F, M.reshape(1, -1)).reshape(M.shape)


class PG3:
    """The projective space PG(3,q) with its full incidence tables."""

    def __init__(self, field: GF):
        self.F = field
        self.q = q = field.q
        self.points = self._enumerate_points()
        self.point_keys = _encode(field, self.points)
        self.n_points = len(self.points)
        self._enumerate_lines()
        self.n_lines = len(self.plucker)
        self.n_planes = self.n_points
        assert self.n_points == q**3 + q**2 + q + 1
        assert self.n_lines == (q**2 + 1) * (q**2 + q + 1)

    # -- construction --------------------------------------------------------

    def _enumerate_points(self) -> np.ndarray:
        q, one = self.q, self.F.one_code
        rows = []
        for lead in range(4):
            for tail in itertools.product(range(q), repeat=3 - lead):
                rows.append((0,) * lead + (one,) + tail)
        pts = np.array(rows, dtype=np.int64)
        return pts[np.argsort(_encode(self.F, pts), kind="stable")]

    def _rref_bases(self) -> tuple[np.ndarray, np.ndarray]:
        """All 2x4 reduced row echelon forms, as (basis rows, kernel rows)."""
        q, F = self.q, self.F
        one, neg = F.one_code, F.neg_table
        bases, kernels = [], []
        for piv in itertools.combinations(range(4), 2):
            free = [j for j in range(4) if j not in piv]
            # entries right of each pivot that are not pivot columns are free
            slots = [(r, j) for r in range(2) for j in free if j > piv[r]]
            vals = np.array(list(itertools.product(range(q), repeat=len(slots))),
                            dtype=np.int64).reshape(q ** len(slots), len(slots))
            n = len(vals)
            B = np.zeros((n, 2, 4), dtype=np.int64)
            for r in range(2):
                B[:, r, piv[r]] = one
            for s, (r, j) in enumerate(slots):
                B[:, r, j] = vals[:, s]
            K = np.zeros((n, 2, 4), dtype=np.int64)
            for t, f in enumerate(free):
                K[:, t, f] = one
                for r in range(2):
                    K[:, t, piv[r]] = neg[B[:, r, f]]
            bases.append(B)
            kernels.append(K)
        return np.concatenate(bases), np.concatenate(kernels)

    def span_points(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Sorted indices of the q+1 points on span(a_i, b_i), row by row."""
        F = self.F
        vecs = [b]
        for t in range(self.q):
            vecs.append(F.add_table[a, F.mul_table[t, b]])
        stacked = np.stack(vecs, axis=1).reshape(-1, 4)
        idx = self.point_index(normalize(F, stacked)).reshape(len(a), self.q + 1)
        return np.sort(idx, axis=1)

    def _enumerate_lines(self) -> None:
        F = self.F
        B, K = self._rref_bases()
        pl = normalize(F, plucker(F, B[:, 0], B[:, 1]))
        keys = _encode(F, pl)
        order = np.argsort(keys, kind="stable")
        self.plucker = pl[order]
        self.line_keys = keys[order]
        self.line_basis = B[order]
        self.line_points = self.span_points(B[order, 0], B[order, 1])
        # planes through a line = points of the kernel of its basis, dually
        self.line_planes = self.span_points(K[order, 0], K[order, 1])

    @staticmethod
    def _invert_incidence(rows: np.ndarray, n_targets: int) -> np.ndarray:
        flat = rows.ravel()
        owners = np.repeat(np.arange(rows.shape[0]), rows.shape[1])
        order = np.argsort(flat, kind="stable")
        per = len(flat) // n_targets
        return owners[order].reshape(n_targets, per)

    @cached_property
    def point_lines(self) -> np.ndarray:
        """Line indices through each point (the line-star)."""
        return self._invert_incidence(self.line_points, self.n_points)

    @cached_property
    def plane_lines(self) -> np.ndarray:
        """Line indices contained in each plane."""
        return self._invert_incidence(self.line_planes, self.n_planes)

    # -- lookups ---------------------------------------------------------------

    def point_index(self, vecs: np.ndarray) -> np.ndarray:
        """Indices of canonical point vectors (n, 4)."""
        keys = _encode(self.F, np.asarray(vecs, dtype=np.int64))
        idx = np.searchsorted(self.point_keys, keys)
        if np.any(idx >= self.n_points) or np.any(self.point_keys[np.minimum(idx, self.n_points - 1)] != keys):
            raise KeyError("vector is not a canonical point")
        return idx

    def line_index(self, plucker_rows: np.ndarray) -> np.ndarray:
        keys = _encode(self.F, normalize(self.F, plucker_rows))
        idx = np.searchsorted(self.line_keys, keys)
        idx = np.minimum(idx, self.n_lines - 1)
        if np.any(self.line_keys[idx] != keys):
            raise KeyError("vector is not the Plücker vector of a line")
        return idx

    def lines_of_pairs(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Line indices through row pairs of (not necessarily canonical) vectors."""
        pl = plucker(self.F, a, b)
        if not (pl != 0).any(axis=1).all():
            raise DegenerateError("points do not span a line")
        return self.line_index(pl)

    def coords(self, vec: Sequence) -> np.ndarray:
        return np.array([e.code if isinstance(e, FieldElement) else self.F(int(e)).code
                         for e in vec], dtype=np.int64)

    def find_point(self, vec: Sequence) -> int:
        """Index of the point with homogeneous coordinates ``vec``."""
        return int(self.point_index(normalize(self.F, self.coords(vec)[None, :]))[0])

    find_plane = find_point

    # -- objects -----------------------------------------------------------------

    def _elems(self, row) -> tuple[FieldElement, ...]:
        return tuple(self.F.from_code(int(c)) for c in row)

    def point(self, i: int) -> ProjPoint:
        return ProjPoint(int(i), self._elems(self.points[i]))

    def plane(self, i: int) -> ProjPlane:
        return ProjPlane(int(i), self._elems(self.points[i]))

    def line(self, i: int) -> ProjLine:
        pts = tuple(int(p) for p in self.line_points[i])
        return ProjLine(int(i), self._elems(self.plucker[i]), pts[:2], pts)

    def enumerate_points(self) -> list[ProjPoint]:
        return [self.point(i) for i in range(self.n_points)]

    def enumerate_lines(self) -> list[ProjLine]:
        return [self.line(i) for i in range(self.n_lines)]

    def enumerate_planes(self) -> list[ProjPlane]:
        return [self.plane(i) for i in range(self.n_planes)]

    # -- incidence -------------------------------------------------------------

    def line_through(self, P, Q) -> ProjLine:
        i, j = _index(P), _index(Q)
        if i == j:
            raise DegenerateError("a line needs two distinct points")
        return self.line(int(self.lines_of_pairs(self.points[[i]], self.points[[j]])[0]))

    def plane_through(self, line, P) -> ProjPlane:
        l, p = _index(line), _index(P)
        if self.point_on_line(p, l):
            raise DegenerateError("point lies on the line")
        common = [s for s in self.line_planes[l] if self.point_on_plane(p, s)]
        return self.plane(int(common[0]))

    def point_on_line(self, P, line) -> bool:
        return _index(P) in set(self.line_points[_index(line)].tolist())

    def point_on_plane(self, P, plane) -> bool:
        u = self.points[_index(plane)]
        x = self.points[_index(P)]
        return int(self.F.dot(u, x)) == 0

    def line_in_plane(self, line, plane) -> bool:
        return _index(plane) in set(self.line_planes[_index(line)].tolist())

    def lines_through_point(self, P) -> np.ndarray:
        return self.point_lines[_index(P)]

    def lines_in_plane(self, plane) -> np.ndarray:
        return self.plane_lines[_index(plane)]

    def lines_meet(self, l, m) -> bool:
        """Two lines meet iff their Plücker vectors are orthogonal."""
        a, b = self.plucker[_index(l)], self.plucker[_index(m)]
        return int(plucker_pairing(self.F, a, b)) == 0

    # -- counting -----------------------------------------------------------------

    def star_counts(self, mask: np.ndarray) -> np.ndarray:
        """Number of lines of the set through each point."""
        members = np.flatnonzero(mask)
        return np.bincount(self.line_points[members].ravel(), minlength=self.n_points)

    def plane_counts(self, mask: np.ndarray) -> np.ndarray:
        """Number of lines of the set in each plane."""
        members = np.flatnonzero(mask)
        return np.bincount(self.line_planes[members].ravel(), minlength=self.n_planes)

    def meet_counts(self, mask: np.ndarray) -> np.ndarray:
        """For each line l, |{m in S : m meets l}|, l itself included.

        Summing the star counts over the q+1 points of l counts l itself
        q+1 times and every other meeting line once.
        """
        mask = np.asarray(mask, dtype=bool)
        star = self.star_counts(mask)
        return star[self.line_points].sum(axis=1) - self.q * mask

    def meet_counts_pairwise(self, mask: np.ndarray, chunk: int = 512) -> np.ndarray:
        """Same as :meth:`meet_counts` by testing every pair with the Plücker pairing."""
        members = self.plucker[np.flatnonzero(mask)]
        out = np.zeros(self.n_lines, dtype=np.int64)
        for start in range(0, self.n_lines, chunk):
            block = self.plucker[start:start + chunk]
            pair = plucker_pairing(self.F, block[:, None, :], members[None, :, :])
            out[start:start + chunk] = (pair == 0).sum(axis=1)
        return out

    # -- collineations ---------------------------------------------------------

    def check_matrix(self, M) -> np.ndarray:
        M = mat_codes(self.F, M) if not isinstance(M, np.ndarray) else M.astype(np.int64)
        mat_inverse(self.F, M)  # raises on a singular matrix
        return M

    def point_permutation(self, M: np.ndarray) -> np.ndarray:
        return self.point_index(normalize(self.F, matvec(self.F, M, self.points)))

    def plane_permutation(self, M: np.ndarray) -> np.ndarray:
        # u.x = 0  <=>  (M^-T u).(M x) = 0
        Minv_t = mat_inverse(self.F, M).T.copy()
        return self.point_index(normalize(self.F, matvec(self.F, Minv_t, self.points)))

    def line_permutation(self, M: np.ndarray) -> np.ndarray:
        a = matvec(self.F, M, self.line_basis[:, 0])
        b = matvec(self.F, M, self.line_basis[:, 1])
        return self.lines_of_pairs(a, b)

    def apply_collineation(self, M, obj: Obj) -> Obj:
        M = self.check_matrix(M)
        if isinstance(obj, ProjPoint):
            img = normalize(self.F, matvec(self.F, M, self.points[[obj.index]]))
            return self.point(int(self.point_index(img)[0]))
        if isinstance(obj, ProjPlane):
            Minv_t = mat_inverse(self.F, M).T.copy()
            img = normalize(self.F, matvec(self.F, Minv_t, self.points[[obj.index]]))
            return self.plane(int(self.point_index(img)[0]))
        if isinstance(obj, ProjLine):
            basis = self.line_basis[obj.index]
            a = matvec(self.F, M, basis[[0]])
            b = matvec(self.F, M, basis[[1]])
            return self.line(int(self.lines_of_pairs(a, b)[0]))
        raise TypeError(f"cannot apply a collineation to {type(obj).__name__}")

    # -- export ------------------------------------------------------------------

    def serialize(self, code: int) -> list[int]:
        return list(self.F.coeffs(int(code)))

    @cached_property
    def table_hash(self) -> str:
        """SHA-256 of the field modulus and the line table, in index order."""
        h = hashlib.sha256()
        h.update(f"p={self.F.p};k={self.F.k};mod={list(self.F.modulus)};".encode())
        h.update(np.ascontiguousarray(self.plucker, dtype="<i8").tobytes())
        return h.hexdigest()

    def lines_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "p12", "p13", "p14", "p23", "p24", "p34"])
        for i, row in enumerate(self.plucker):
            if self.F.k == 1:
                cells = [int(c) for c in row]
            else:
                cells = [" ".join(map(str, self.serialize(c))) for c in row]
            w.writerow([i, *cells])
        return buf.getvalue()


def _index(obj) -> int:
    return int(obj.index) if hasattr(obj, "index") else int(obj)

"""The pencil of quadrics X1 X3 - X2^2 + lam X4^2 = 0 together with the plane
pi: X4 = 0, and the classification of all points and lines of PG(3,q)
relative to it.

Point labels
    ``U4``; the conic ``C``; internal points ``I`` and external points ``E``
    of C in pi; ``cone`` (the cone Q_0 minus C and its vertex);
    ``quadric`` (a point of Q_lam minus C, lam != 0).  Points off
    pi and different from U4 also carry a *type* C, I or E: the label of the
    trace on pi of the line joining them to U4.

Line labels
    ``L1``, ``L2``, ``L3`` (tangent, external, secant lines of C in pi);
    ``L1p``, ``L2p``, ``L3p`` (lines through U4 meeting pi in C, I, E);
    ``regulus`` (a ruling of a hyperbolic Q_lam); ``tangentI``/``tangentE``
    (tangent to Q_lam, lam != 0, trace in I/E); ``L4`` (tangent to the
    cone off U4) and ``L4p`` (secant to every Q_lam through a point of C).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .gf import FieldElement
from .geometry import PG3, ProjPlane, ProjPoint, DegenerateError, normalize, _index

POINT_KINDS = ("U4", "C", "I", "E", "cone", "quadric")
LINE_KINDS = ("L1", "L2", "L3", "L1p", "L2p", "L3p", "L4", "L4p",
              "regulus", "tangentI", "tangentE")
NAMED_CLASSES = ("L1", "L2", "L3", "L4", "L1p", "L2p", "L3p", "L4p")
POINT_CATEGORIES = ("U4", "C", "I", "E", "typeC", "typeI", "typeE")
PLANE_CATEGORIES = ("pi", "U4_r0", "U4_r1", "U4_r2", "r0", "r1", "r2")

_PK = {k: i for i, k in enumerate(POINT_KINDS)}
_LK = {k: i for i, k in enumerate(LINE_KINDS)}


class LabelError(RuntimeError):
    """A point or line fell outside every case of the classification."""


def _lam_str(field, code: int) -> str:
    return ",".join(map(str, field.coeffs(int(code))))


@dataclass(frozen=True)
class PencilMember:
    """Q_lam for a field element ``lam``, or the plane pi when ``lam`` is None."""

    lam: Optional[FieldElement]

    @property
    def kind(self) -> str:
        if self.lam is None:
            return "plane"
        if self.lam.code == 0:
            return "cone"
        return "hyperbolic" if self.lam.is_square() else "elliptic"


@dataclass(frozen=True)
class PointLabel:
    kind: str
    lam: Optional[FieldElement] = None
    type: Optional[str] = None

    @property
    def name(self) -> str:
        if self.kind == "quadric":
            return f"quadric({_lam_str(self.lam.field, self.lam.code)})"
        return self.kind


@dataclass(frozen=True)
class LineLabel:
    kind: str
    lam: Optional[FieldElement] = None
    ruling: Optional[int] = None

    @property
    def name(self) -> str:
        if self.kind == "regulus":
            return f"regulus({_lam_str(self.lam.field, self.lam.code)};{self.ruling})"
        if self.lam is not None:
            return f"{self.kind}({_lam_str(self.lam.field, self.lam.code)})"
        return self.kind


@dataclass(frozen=True)
class SignPartition:
    """Points split by the square class of Q_lam_bar's form."""

    lambda_bar: FieldElement
    values: np.ndarray      # form value (code) per point
    Os: np.ndarray          # bool masks over point indices
    On: np.ndarray
    quadric_points: np.ndarray


class Pencil:
    """The pencil on a :class:`PG3`, with point and line labels precomputed."""

    def __init__(self, geom: PG3, lambda_bar: FieldElement | int | None = None):
        self.geom = geom
        F = self.F = geom.F
        self.q = geom.q
        pts = geom.points
        mul, sub = F.mul_table, F.sub_table
        # Q_lam(x) = base(x) + lam * w(x)
        self.base = sub[mul[pts[:, 0], pts[:, 2]], mul[pts[:, 1], pts[:, 1]]]
        self.w = mul[pts[:, 3], pts[:, 3]]
        self.on_pi = pts[:, 3] == 0
        self.U = tuple(geom.find_point(v) for v in
                       ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
        self.u4 = self.U[3]
        self.pi = geom.find_plane((0, 0, 0, 1))
        if lambda_bar is None:
            lambda_bar = F.nonsquare
        self.lambda_bar = F(lambda_bar)
        if self.lambda_bar.is_square():
            raise ValueError("lambda_bar must be a non-square")
        self._label_points()
        self._label_lines()

    # -- forms ---------------------------------------------------------------

    def eval_quadric(self, lam, P) -> FieldElement:
        lam = self.F(lam)
        i = _index(P)
        v = self.F.add_table[self.base[i], self.F.mul_table[lam.code, self.w[i]]]
        return self.F.from_code(int(v))

    def form_values(self, lam) -> np.ndarray:
        lam = self.F(lam)
        return self.F.add_table[self.base, self.F.mul_table[lam.code, self.w]]

    def members(self) -> list[PencilMember]:
        return [PencilMember(e) for e in self.F] + [PencilMember(None)]

    def classify_member(self, lam) -> str:
        return PencilMember(self.F(lam)).kind

    def quadric_mask(self, lam) -> np.ndarray:
        return self.form_values(lam) == 0

    def polar_plane(self, lam, P) -> ProjPlane:
        lam = self.F(lam)
        if lam.code == 0:
            raise DegenerateError("the cone has no polarity")
        i = self.polar_permutation(lam)[_index(P)]
        return self.geom.plane(int(i))

    def pole(self, lam, plane) -> ProjPoint:
        i = np.flatnonzero(self.polar_permutation(self.F(lam)) == _index(plane))[0]
        return self.geom.point(int(i))

    def polar_permutation(self, lam) -> np.ndarray:
        """Point index -> index of its polar plane under perp_lam."""
        lam = self.F(lam)
        if lam.code == 0:
            raise DegenerateError("the cone has no polarity")
        F, pts = self.F, self.geom.points
        two = F(2).code
        cols = np.stack([
            pts[:, 2],
            F.neg_table[F.mul_table[two, pts[:, 1]]],
            pts[:, 0],
            F.mul_table[F.mul_table[two, lam.code], pts[:, 3]],
        ], axis=1)
        return self.geom.point_index(normalize(F, cols))

    def line_vs_quadric(self, line, member: PencilMember) -> str:
        """external / tangent / secant / contained, by |l meet Q|."""
        pts = self.geom.line_points[_index(line)]
        if member.lam is None:
            n = int(self.on_pi[pts].sum())
        else:
            n = int((self.form_values(member.lam)[pts] == 0).sum())
        if n == self.q + 1:
            return "contained"
        return {0: "external", 1: "tangent", 2: "secant"}[n]

    # -- point labels ----------------------------------------------------------

    def _label_points(self) -> None:
        g, F = self.geom, self.F
        n = g.n_points
        kind = np.full(n, -1, dtype=np.int64)
        kind[self.u4] = _PK["U4"]
        conic = self.on_pi & (self.base == 0)
        kind[conic] = _PK["C"]
        self.conic = conic

        # lines of pi by the number of conic points on them
        self.pi_line_mask = np.zeros(g.n_lines, dtype=bool)
        self.pi_line_mask[g.plane_lines[self.pi]] = True
        n_conic = conic[g.line_points].sum(axis=1)
        tangent_in_pi = self.pi_line_mask & (n_conic == 1)
        # internal points lie on no tangent of C, external points on two
        tangents_through = g.star_counts(tangent_in_pi)
        rest = self.on_pi & ~conic
        if not np.all(np.isin(tangents_through[rest], (0, 2))):
            raise LabelError("point of pi on neither 0 nor 2 tangents of the conic")
        kind[rest & (tangents_through == 0)] = _PK["I"]
        kind[rest & (tangents_through == 2)] = _PK["E"]

        off = ~self.on_pi
        off[self.u4] = False
        lam = np.full(n, -1, dtype=np.int64)
        lam[off] = F.neg_table[F.mul_table[self.base[off], F.inv_table[self.w[off]]]]
        kind[off & (lam == 0)] = _PK["cone"]
        kind[off & (lam > 0)] = _PK["quadric"]
        assert (kind >= 0).all()

        # trace on pi of the join with U4 is (x1, x2, x3, 0)
        ptype = np.full(n, -1, dtype=np.int64)
        proj = g.points[off].copy()
        proj[:, 3] = 0
        trace = g.point_index(normalize(F, proj))
        ptype[off] = kind[trace]
        self.point_kind = kind
        self.point_lam = lam
        self.point_type = ptype          # a POINT_KINDS index of C/I/E, or -1
        self.internal = kind == _PK["I"]
        self.external = kind == _PK["E"]

    def label_point(self, P) -> PointLabel:
        i = _index(P)
        kind = POINT_KINDS[self.point_kind[i]]
        lam = self.F.from_code(int(self.point_lam[i])) if kind == "quadric" else None
        t = self.point_type[i]
        return PointLabel(kind, lam, POINT_KINDS[t] if t >= 0 else None)

    def point_type_of(self, P) -> str:
        """Type C, I or E of a point off pi and distinct from U4."""
        t = self.point_type[_index(P)]
        if t < 0:
            raise ValueError("point type is only defined off pi and away from U4")
        return "type" + POINT_KINDS[t]

    def point_category(self) -> np.ndarray:
        """Index into POINT_CATEGORIES for every point."""
        cat = np.empty(self.geom.n_points, dtype=np.int64)
        for k, name in enumerate(("U4", "C", "I", "E")):
            cat[self.point_kind == _PK[name]] = k
        for k, name in enumerate(("C", "I", "E")):
            cat[self.point_type == _PK[name]] = 4 + k
        return cat

    # -- line labels -------------------------------------------------------------

    def _label_lines(self) -> None:
        g, F, q = self.geom, self.F, self.q
        L = g.n_lines
        kind = np.full(L, -1, dtype=np.int64)
        lam = np.full(L, -1, dtype=np.int64)
        ruling = np.full(L, -1, dtype=np.int64)
        lp = g.line_points

        n_conic = self.conic[lp].sum(axis=1)
        in_pi = self.pi_line_mask
        kind[in_pi & (n_conic == 1)] = _LK["L1"]
        kind[in_pi & (n_conic == 0)] = _LK["L2"]
        kind[in_pi & (n_conic == 2)] = _LK["L3"]

        # every other line meets pi in exactly one point, its trace
        rows = np.flatnonzero(~in_pi)
        sub = lp[rows]
        order = np.argsort(self.on_pi[sub], axis=1, kind="stable")
        sub = np.take_along_axis(sub, order, axis=1)
        trace = sub[:, -1]
        offpts = sub[:, :-1]
        self.line_trace = np.full(L, -1, dtype=np.int64)
        self.line_trace[rows] = trace
        tkind = self.point_kind[trace]

        through_u4 = (offpts == self.u4).any(axis=1)
        for pk, lk in (("C", "L1p"), ("I", "L2p"), ("E", "L3p")):
            kind[rows[through_u4 & (tkind == _PK[pk])]] = _LK[lk]

        gen = ~through_u4
        r_gen = rows[gen]
        plam = self.point_lam[offpts[gen]]                   # (n, q)
        hist = np.bincount((plam + q * np.arange(len(r_gen))[:, None]).ravel(),
                           minlength=q * len(r_gen)).reshape(len(r_gen), q)
        on_c = tkind[gen] == _PK["C"]
        hist_tot = hist + on_c[:, None]                       # |l meet Q_lam|

        contained = on_c & (hist.max(axis=1) == q)
        all_secant = on_c & (hist_tot == 2).all(axis=1)
        n_tangent = (hist_tot == 1).sum(axis=1)
        tang_lam = np.argmax(hist_tot == 1, axis=1)
        off_c = ~on_c
        if np.any(off_c & (n_tangent != 1)):
            raise LabelError("line off pi and C not tangent to exactly one quadric")
        if np.any(on_c & ~contained & ~all_secant):
            raise LabelError("line through C neither contained nor secant everywhere")

        kind[r_gen[all_secant]] = _LK["L4p"]
        reg = contained
        kind[r_gen[reg]] = _LK["regulus"]
        lam[r_gen[reg]] = np.argmax(hist[reg], axis=1)
        cone_t = off_c & (tang_lam == 0)
        if np.any(cone_t & (tkind[gen] != _PK["E"])):
            raise LabelError("tangent to the cone meeting pi outside E")
        kind[r_gen[cone_t]] = _LK["L4"]
        quad_t = off_c & (tang_lam != 0)
        ti = quad_t & (tkind[gen] == _PK["I"])
        te = quad_t & (tkind[gen] == _PK["E"])
        kind[r_gen[ti]] = _LK["tangentI"]
        kind[r_gen[te]] = _LK["tangentE"]
        lam[r_gen[ti | te]] = tang_lam[ti | te]
        if np.any(kind < 0):
            raise LabelError("unlabelled line")

        for li in np.flatnonzero(kind == _LK["regulus"]):
            ruling[li] = self._ruling(int(li), int(lam[li]))
        self.line_kind = kind
        self.line_lam = lam
        self.line_ruling = ruling

    def _ruling(self, line: int, lam_code: int) -> int:
        """0 if the right kernel of [[X1, X2 - mu X4], [X2 + mu X4, X3]] is
        constant along the line, 1 if the left kernel is."""
        F = self.F
        mu = F.from_code(lam_code).sqrt()
        if mu is None:
            raise LabelError("regulus line on a non-hyperbolic quadric")
        kers = []
        for p in self.geom.line_points[line][:3]:
            if self.on_pi[p]:
                continue
            x = [F.from_code(int(c)) for c in self.geom.points[p]]
            a, b, c, d = x[0], x[1] - mu * x[3], x[1] + mu * x[3], x[2]
            right = (b, -a) if (a or b) else (d, -c)
            kers.append(right)
        (u0, u1), (v0, v1) = kers[:2]
        return 0 if (u0 * v1 - u1 * v0).code == 0 else 1

    def label_line(self, line) -> LineLabel:
        i = _index(line)
        kind = LINE_KINDS[self.line_kind[i]]
        lam = self.F.from_code(int(self.line_lam[i])) if self.line_lam[i] >= 0 else None
        r = int(self.line_ruling[i]) if self.line_ruling[i] >= 0 else None
        return LineLabel(kind, lam, r)

    def class_mask(self, *kinds: str) -> np.ndarray:
        return np.isin(self.line_kind, [_LK[k] for k in kinds])

    # -- censuses -----------------------------------------------------------------

    def point_census(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i in range(self.geom.n_points):
            name = self.label_point(i).name
            out[name] = out.get(name, 0) + 1
        return out

    def line_census(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i in range(self.geom.n_lines):
            name = self.label_line(i).name
            out[name] = out.get(name, 0) + 1
        return out

    def expected_point_census(self) -> dict[str, int]:
        q, F = self.q, self.F
        out = {"U4": 1, "C": q + 1, "I": q * (q - 1) // 2, "E": q * (q + 1) // 2,
               "cone": q * q - 1}
        for e in F:
            if e.code:
                out[PointLabel("quadric", e).name] = q * q + q if e.is_square() else q * q - q
        return out

    def expected_line_census(self) -> dict[str, int]:
        q, F = self.q, self.F
        out = {"L1": q + 1, "L2": q * (q - 1) // 2, "L3": q * (q + 1) // 2,
               "L1p": q + 1, "L2p": q * (q - 1) // 2, "L3p": q * (q + 1) // 2,
               "L4": q**3 - q, "L4p": q**3 - q}
        for e in F:
            if not e.code:
                continue
            if e.is_square():
                for r in (0, 1):
                    out[LineLabel("regulus", e, r).name] = q + 1
            out[LineLabel("tangentI", e).name] = (q**3 - q) // 2
            out[LineLabel("tangentE", e).name] = (q**3 - q) // 2
        return out

    # -- sign partition and the swap sets ---------------------------------------

    def sign_partition(self, lambda_bar=None) -> SignPartition:
        lb = self.lambda_bar if lambda_bar is None else self.F(lambda_bar)
        if lb.is_square():
            raise ValueError("sign partition needs a non-square lambda_bar")
        vals = self.form_values(lb)
        sq = self.F.square_table[vals]
        zero = vals == 0
        part = SignPartition(lb, vals, sq & ~zero, ~sq, zero)
        if self.q % 4 == 1:
            assert part.Os[self.external].all() and part.On[self.internal].all()
            assert part.On[self.u4]
        return part

    def build_A_B(self) -> tuple[np.ndarray, np.ndarray]:
        A = self.class_mask("L1p", "L2p", "L3", "L4p")
        B = self.class_mask("L1", "L2", "L3p", "L4")
        return A, B

    @cached_property
    def projected_line(self) -> np.ndarray:
        """For lines off pi not through U4: the line pi meet <U4, l>; else -1."""
        g, F = self.geom, self.F
        out = np.full(g.n_lines, -1, dtype=np.int64)
        gen = ~self.pi_line_mask & ~self.class_mask("L1p", "L2p", "L3p")
        rows = np.flatnonzero(gen)
        a = g.line_basis[rows, 0].copy()
        b = g.line_basis[rows, 1].copy()
        a[:, 3] = 0
        b[:, 3] = 0
        out[rows] = g.lines_of_pairs(a, b)
        return out

    # -- incidence tallies ----------------------------------------------------------

    def tally_through_point(self, P) -> dict[str, int]:
        kinds = self.line_kind[self.geom.point_lines[_index(P)]]
        return {k: int((kinds == _LK[k]).sum()) for k in LINE_KINDS}

    def tally_in_plane(self, plane) -> dict[str, int]:
        kinds = self.line_kind[self.geom.plane_lines[_index(plane)]]
        return {k: int((kinds == _LK[k]).sum()) for k in LINE_KINDS}

    def plane_category(self) -> np.ndarray:
        """Index into PLANE_CATEGORIES for every plane."""
        g = self.geom
        F = self.F
        cpts = g.points[self.conic]
        # |sigma meet C| for each plane sigma
        meets = np.zeros(g.n_planes, dtype=np.int64)
        for x in cpts:
            meets += F.dot(g.points, x[None, :]) == 0
        u4_in = g.points[:, 3] == 0   # u . U4 = u4 coordinate
        cat = np.where(u4_in, 1 + meets, 4 + meets)
        cat[self.pi] = 0
        return cat

    def expected_point_tally(self, category: str) -> dict[str, int]:
        """Named-class counts through a point of the given category."""
        q = self.q
        h, hm = (q + 1) // 2, (q - 1) // 2
        t = {
            "U4": dict(L1p=q + 1, L2p=q * (q - 1) // 2, L3p=q * (q + 1) // 2),
            "C": dict(L1=1, L3=q, L1p=1, L4p=q * (q - 1)),
            "I": dict(L2p=1, L2=h, L3=h),
            "E": dict(L1=2, L2=hm, L3=hm, L4=2 * (q - 1), L3p=1),
            "typeC": dict(L1p=1, L4p=q, L4=q),
            "typeI": dict(L2p=1, L4p=q + 1),
            "typeE": dict(L3p=1, L4p=q - 1, L4=2 * (q - 1)),
        }[category]
        return {k: t.get(k, 0) for k in NAMED_CLASSES}

    def expected_plane_tally(self, category: str) -> dict[str, int]:
        """Named-class counts inside a plane of the given category."""
        q = self.q
        h, hm = (q + 1) // 2, (q - 1) // 2
        t = {
            "pi": dict(L1=q + 1, L2=q * (q - 1) // 2, L3=q * (q + 1) // 2),
            "U4_r0": dict(L2=1, L2p=h, L3p=h),
            "U4_r1": dict(L1p=1, L3p=q, L1=1, L4=q * (q - 1)),
            "U4_r2": dict(L1p=2, L2p=hm, L3p=hm, L4p=2 * (q - 1), L3=1),
            "r0": dict(L2=1, L4=q + 1),
            "r1": dict(L1=1, L4=q, L4p=q),
            "r2": dict(L3=1, L4=q - 1, L4p=2 * (q - 1)),
        }[category]
        return {k: t.get(k, 0) for k in NAMED_CLASSES}

    def tally_table(self, kind: str) -> np.ndarray:
        """(objects x 8) counts of the named classes through points or in planes."""
        g = self.geom
        adj = g.point_lines if kind == "point" else g.plane_lines
        kinds = self.line_kind[adj]
        return np.stack([(kinds == _LK[k]).sum(axis=1) for k in NAMED_CLASSES], axis=1)

    def check_tallies(self) -> dict:
        """Compare every point and plane row against the incidence tables."""
        out = {}
        for kind, cats, expect, catf in (
                ("point", POINT_CATEGORIES, self.expected_point_tally, self.point_category),
                ("plane", PLANE_CATEGORIES, self.expected_plane_tally, self.plane_category)):
            table = self.tally_table(kind)
            cat = catf()
            bad = []
            for c, name in enumerate(cats):
                want = np.array([expect(name)[k] for k in NAMED_CLASSES])
                rows = np.flatnonzero(cat == c)
                wrong = rows[(table[rows] != want).any(axis=1)]
                bad.extend(int(i) for i in wrong)
            out[kind] = {"checked": int(len(table)), "mismatches": bad,
                         "pass": not bad}
        return out

    # -- structural facts ------------------------------------------------------------

    def check_structure(self) -> dict[str, bool]:
        """Tangency and secancy statements about the labelled classes."""
        g, q, F = self.geom, self.q, self.F
        lp = g.line_points
        nonzero = [e for e in F if e.code]
        hyper = [e for e in nonzero if e.is_square()]
        ell = [e for e in nonzero if not e.is_square()]
        meets = {e.code: (self.quadric_mask(e)[lp]).sum(axis=1) for e in F}

        # lines not in pi missing C are tangent to exactly one Q_lam
        cand = ~self.pi_line_mask & (self.conic[lp].sum(axis=1) == 0)
        n_tan = sum((meets[e.code] == 1).astype(int) for e in F)
        tang = bool((n_tan[cand] == 1).all())

        u4_lines = self.class_mask("L2p", "L3p")
        tk = self.point_kind[self.line_trace]
        cono = True
        for li in np.flatnonzero(u4_lines):
            sec_ell = all(meets[e.code][li] == 2 for e in ell)
            ext_hyp = all(meets[e.code][li] == 0 for e in hyper)
            sec_hyp = all(meets[e.code][li] == 2 for e in hyper)
            ext_ell = all(meets[e.code][li] == 0 for e in ell)
            if tk[li] == _PK["I"]:
                cono &= sec_ell and ext_hyp
            else:
                cono &= sec_hyp and ext_ell

        l4 = self.class_mask("L4")
        l4p = self.class_mask("L4p")
        sec = all((meets[e.code][l4] == 2).all() for e in hyper)
        sec &= all((meets[e.code][l4] == 0).all() for e in ell)
        sec &= all((meets[e.code][l4p] == 2).all() for e in F)

        # the q+1 points of each L4p line: one on C, one of type C,
        # (q-1)/2 each of types I and E; an L2p line: q-1 points of type I
        pt = self.point_type
        rows = lp[l4p]
        types_ok = bool(((pt[rows] == _PK["C"]).sum(axis=1) == 1).all()
                        and ((pt[rows] == _PK["I"]).sum(axis=1) == (q - 1) // 2).all()
                        and ((pt[rows] == _PK["E"]).sum(axis=1) == (q - 1) // 2).all())
        rows = lp[self.class_mask("L2p")]
        types_ok &= bool(((pt[rows] == _PK["I"]).sum(axis=1) == q - 1).all())
        return {"tangent_unique": tang, "cone_lines": bool(cono),
                "L4_L4p_secancy": bool(sec), "point_types_on_lines": types_ok}

    def polar_conic_meets(self, lambda_bar=None) -> dict[str, list[int]]:
        """For points off pi and U4: observed |P^perp meet C| per point type."""
        lb = self.lambda_bar if lambda_bar is None else self.F(lambda_bar)
        perm = self.polar_permutation(lb)
        g, F = self.geom, self.F
        meets = np.zeros(g.n_planes, dtype=np.int64)
        for x in g.points[self.conic]:
            meets += F.dot(g.points, x[None, :]) == 0
        out = {}
        for t in ("C", "I", "E"):
            pts = np.flatnonzero(self.point_type == _PK[t])
            out["type" + t] = sorted(set(meets[perm[pts]].tolist()))
        return out

"""Cameron-Liebler line classes built on the pencil: the Bruen-Drudge class,
its first derived class, and the class obtained from the Bruen-Drudge class
by swapping the G-invariant sets A and B.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import PG3, mat_inverse, DegenerateError, _index
from .pencil import Pencil, LINE_KINDS, _LK, _PK


class DerivationError(ValueError):
    def __init__(self, message: str, witnesses: dict[str, list[int]]):
        super().__init__(message)
        self.witnesses = witnesses


class UniverseMismatch(ValueError):
    """A line-class file was written for a different line table."""


@dataclass
class LineClass:
    name: str
    mask: np.ndarray
    x: int

    def __post_init__(self):
        self.mask = np.asarray(self.mask, dtype=bool)
        n = len(self.mask)
        # (q^2+1)(q^2+q+1) lines, so recover q^2+q+1 from the table size
        q = _q_from_lines(n)
        if int(self.mask.sum()) != self.x * (q * q + q + 1):
            raise ValueError(
                f"{self.name}: {int(self.mask.sum())} lines, expected "
                f"x(q^2+q+1) = {self.x * (q * q + q + 1)}")

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def complement(self) -> "LineClass":
        q = _q_from_lines(len(self.mask))
        return LineClass(f"complement({self.name})", ~self.mask, q * q + 1 - self.x)


def _q_from_lines(n: int) -> int:
    q = 1
    while (q * q + 1) * (q * q + q + 1) < n:
        q += 1
    if (q * q + 1) * (q * q + q + 1) != n:
        raise ValueError(f"{n} is not a PG(3,q) line count")
    return q


@dataclass
class CharacterProfile:
    kind: str                 # "star" or "plane"
    spectrum: dict[int, int]  # value -> multiplicity

    @property
    def values(self) -> list[int]:
        return sorted(self.spectrum)


# -- builders ------------------------------------------------------------------


def tangent_secant_sets(pencil: Pencil, lambda_bar=None) -> dict[str, np.ndarray]:
    """Lines split by their meeting with Q_lam_bar, tangents by side."""
    g = pencil.geom
    part = pencil.sign_partition(lambda_bar)
    lp = g.line_points
    zeros = part.quadric_points[lp].sum(axis=1)
    tangent = zeros == 1
    on_n = part.On[lp].sum(axis=1)
    on_s = part.Os[lp].sum(axis=1)
    q = g.q
    # every tangent line carries q points of one sign class only
    if not np.all((on_n[tangent] == q) | (on_s[tangent] == q)):
        raise AssertionError("tangent line with mixed square classes")
    return {
        "Tn": tangent & (on_n == q),
        "Ts": tangent & (on_s == q),
        "S1": zeros == 0,
        "S2": zeros == 2,
    }


def build_bruen_drudge(pencil: Pencil, lambda_bar=None, side: str = "On",
                       lines: str = "secant") -> LineClass:
    """Tangents to Q_lam_bar whose off-quadric points lie in the chosen
    sign class, glued to its secant (or external) lines."""
    side = {"on": "On", "os": "Os"}.get(side.lower(), side)
    if side not in ("On", "Os") or lines not in ("secant", "external"):
        raise ValueError("side must be On/Os and lines secant/external")
    sets = tangent_secant_sets(pencil, lambda_bar)
    T = sets["Tn"] if side == "On" else sets["Ts"]
    S = sets["S2"] if lines == "secant" else sets["S1"]
    q = pencil.q
    return LineClass(f"bruen-drudge[{side},{lines}]", T | S, (q * q + 1) // 2)


def build_first_derived(pencil: Pencil, Lprime: LineClass, R=None,
                        lambda_bar=None) -> LineClass:
    """Trade the external lines of the tangent plane at R for the secants
    through R (or the reverse, when the class holds secants)."""
    g = pencil.geom
    part = pencil.sign_partition(lambda_bar)
    if R is None:
        R = int(np.flatnonzero(part.quadric_points)[0])
    R = _index(R)
    if not part.quadric_points[R]:
        raise ValueError("R must lie on Q_lam_bar")
    sets = tangent_secant_sets(pencil, lambda_bar)
    rho = pencil.polar_plane(part.lambda_bar, R).index
    in_rho = np.zeros(g.n_lines, dtype=bool)
    in_rho[g.plane_lines[rho]] = True
    through_R = np.zeros(g.n_lines, dtype=bool)
    through_R[g.point_lines[R]] = True
    ext_in_rho = sets["S1"] & in_rho
    sec_through_R = sets["S2"] & through_R
    mask = Lprime.mask.copy()
    if (mask & sets["S1"]).any():
        if not mask[ext_in_rho].all() or mask[sec_through_R].any():
            raise ValueError("L' is not a Bruen-Drudge class for this quadric")
        mask[ext_in_rho] = False
        mask[sec_through_R] = True
    else:
        if mask[ext_in_rho].any() or not mask[sec_through_R].all():
            raise ValueError("L' is not a Bruen-Drudge class for this quadric")
        mask[sec_through_R] = False
        mask[ext_in_rho] = True
    return LineClass(f"first-derived({Lprime.name};R={R})", mask, Lprime.x)


def derive(L: LineClass, A: np.ndarray, B: np.ndarray) -> LineClass:
    """(L minus A) union B, for A inside L, B disjoint from L, |A| = |B|."""
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    witnesses = {
        "A_not_in_L": np.flatnonzero(A & ~L.mask)[:10].tolist(),
        "B_in_L": np.flatnonzero(B & L.mask)[:10].tolist(),
    }
    if witnesses["A_not_in_L"] or witnesses["B_in_L"] or A.sum() != B.sum():
        raise DerivationError(
            f"derivation needs A in L, B outside L, |A| = |B| "
            f"(got |A|={int(A.sum())}, |B|={int(B.sum())})", witnesses)
    return LineClass(f"derived({L.name})", (L.mask & ~A) | B, L.x)


def build_derived(pencil: Pencil, lambda_bar=None) -> LineClass:
    """The PGL(2,q)-invariant class from the Bruen-Drudge class; q = 1 mod 4."""
    if pencil.q % 4 != 1:
        raise ValueError(f"the A/B swap requires q = 1 (mod 4), got q = {pencil.q}")
    L = build_bruen_drudge(pencil, lambda_bar, "On", "secant")
    A, B = pencil.build_A_B()
    out = derive(L, A, B)
    out.name = "derived"
    return out


# -- derivation preconditions ------------------------------------------------------


def neutral_case(pencil: Pencil) -> np.ndarray:
    """Case name per line outside A and B ('' for lines of A or B)."""
    kind = pencil.line_kind
    trace_kind = np.where(pencil.line_trace >= 0,
                          pencil.point_kind[np.maximum(pencil.line_trace, 0)], -1)
    proj = pencil.projected_line
    proj_kind = np.where(proj >= 0, kind[np.maximum(proj, 0)], -1)
    out = np.full(len(kind), "", dtype=object)
    out[kind == _LK["regulus"]] = "regulus"
    tangent = np.isin(kind, [_LK["tangentI"], _LK["tangentE"]])
    for tk in ("I", "E"):
        for pk, pname in ((_LK["L3"], "secant"), (_LK["L2"], "external")):
            sel = tangent & (trace_kind == _PK[tk]) & (proj_kind == pk)
            out[sel] = f"tangent_{tk}_{pname}"
    return out


def expected_meets(q: int) -> dict[str, tuple[int, int]]:
    """(|A_l|, |B_l|) for each line class, from the case analysis."""
    a1 = (3 * q * q - q + 2) // 2
    a2 = (q + 1) ** 2 // 2
    a3 = (3 * q * q - 2 * q + 3) // 2
    a4 = (2 * q * q - q + 3) // 2
    qq = q * q
    return {
        "L1": (a1, qq + a1), "L2": (a2, qq + a2), "L3": (qq + a3, a3),
        "L4": (a4, qq + a4), "L1p": (qq + a1, a1), "L2p": (qq + a2, a2),
        "L3p": (a3, qq + a3), "L4p": (qq + a4, a4),
        "regulus": (2 * qq - q + 1,) * 2,
        "tangent_I_secant": (qq + q + 1,) * 2,
        "tangent_I_external": (qq + q,) * 2,
        "tangent_E_secant": (qq + q + 2,) * 2,
        "tangent_E_external": (qq + q + 1,) * 2,
    }


def check_derivation_preconditions(pencil: Pencil, L: LineClass, A: np.ndarray,
                                   B: np.ndarray) -> dict:
    g, q = pencil.geom, pencil.q
    A = np.asarray(A, dtype=bool)
    B = np.asarray(B, dtype=bool)
    nA, nB = g.meet_counts(A), g.meet_counts(B)
    neither = ~A & ~B
    cond = {
        "i_A_in_L": bool(not (A & ~L.mask).any()),
        "i_B_disjoint_L": bool(not (B & L.mask).any()),
        "equal_size": bool(A.sum() == B.sum()),
        "ii_neutral_balanced": bool((nA[neither] == nB[neither]).all()),
        "iii_A_excess": bool((nA[A] - nB[A] == q * q).all()),
        "iv_B_excess": bool((nB[B] - nA[B] == q * q).all()),
    }
    case = neutral_case(pencil)
    # the eight named classes keep their own names
    kinds = np.array(LINE_KINDS, dtype=object)[pencil.line_kind]
    case = np.where(case == "", kinds, case)
    closed = {}
    for name, (ea, eb) in expected_meets(q).items():
        sel = case == name
        got_a = sorted(set(nA[sel].tolist()))
        got_b = sorted(set(nB[sel].tolist()))
        closed[name] = {"lines": int(sel.sum()), "expected": [ea, eb],
                        "A": got_a, "B": got_b,
                        "pass": bool(sel.any()) and got_a == [ea] and got_b == [eb]}
    unclassified = int((~np.isin(case, list(expected_meets(q)))).sum())
    return {
        "conditions": cond,
        "closed_forms": closed,
        "unclassified_lines": unclassified,
        "pass": all(cond.values()) and all(c["pass"] for c in closed.values())
                and unclassified == 0,
    }


# -- characters ---------------------------------------------------------------------


def _profile(kind: str, counts: np.ndarray) -> CharacterProfile:
    vals, mult = np.unique(counts, return_counts=True)
    return CharacterProfile(kind, {int(v): int(m) for v, m in zip(vals, mult)})


def star_characters(geom: PG3, mask: np.ndarray) -> CharacterProfile:
    return _profile("star", geom.star_counts(mask))


def plane_characters(geom: PG3, mask: np.ndarray) -> CharacterProfile:
    return _profile("plane", geom.plane_counts(mask))


def derived_character_formulas(q: int) -> tuple[set[int], set[int]]:
    """Star and plane character sets of the derived class."""
    h = (q * q + q) // 2
    stars = {(q + 1) // 2, h - 2 * (q + 1), h - (q + 1), h, h + q + 1, q * q - (q + 3) // 2}
    planes = {(3 * q + 5) // 2, h - q, h + 1, h + q + 2, h + 2 * q + 3, q * q + (q + 1) // 2}
    return stars, planes


def derived_character_breakdown(q: int) -> dict[str, tuple[int, int]]:
    """(star value, polar-plane value) per point category of the derived class."""
    h = (q * q + q) // 2
    return {
        "U4": (h, h + 1),
        "C": ((q + 1) // 2, q * q + (q + 1) // 2),
        "E": (h + q + 1, h - q),
        "I": (h, h + 1),
        "typeI/Q": (q * q - (q + 3) // 2, (3 * q + 5) // 2),
        "typeI/On": (h - (q + 1), h + q + 2),
        "typeI/Os": (h - 2 * (q + 1), h + 2 * q + 3),
        "typeE/On": (h + q + 1, h - q),
        "typeE/Os": (h, h + 1),
        "typeC/On": (h, h + 1),
    }


def character_breakdown(pencil: Pencil, mask: np.ndarray, lambda_bar=None) -> dict:
    """Observed star and polar-plane counts per point category."""
    g = pencil.geom
    part = pencil.sign_partition(lambda_bar)
    star = g.star_counts(mask)
    plane = g.plane_counts(mask)[pencil.polar_permutation(part.lambda_bar)]
    out = {}
    cats = {name: pencil.point_kind == _PK[name] for name in ("U4", "C", "E", "I")}
    for t in ("C", "I", "E"):
        typed = pencil.point_type == _PK[t]
        for sname, smask in (("Q", part.quadric_points), ("On", part.On), ("Os", part.Os)):
            sel = typed & smask
            if sel.any():
                cats[f"type{t}/{sname}"] = sel
    for name, sel in cats.items():
        out[name] = {"points": int(sel.sum()),
                     "star": sorted(set(star[sel].tolist())),
                     "plane": sorted(set(plane[sel].tolist()))}
    return out


def check_derived_breakdown(pencil: Pencil, mask: np.ndarray, lambda_bar=None) -> dict:
    """Each nonempty point category against its closed-form (star, plane) pair."""
    obs = character_breakdown(pencil, mask, lambda_bar)
    exp = derived_character_breakdown(pencil.q)
    rows = {}
    for name, got in obs.items():
        want = exp.get(name)
        ok = want is not None and got["star"] == [want[0]] and got["plane"] == [want[1]]
        rows[name] = {**got, "expected": list(want) if want else None, "pass": ok}
    return {"categories": rows, "pass": all(r["pass"] for r in rows.values())}


def known_family_characters(q: int) -> dict[str, dict]:
    """Published character lists of the earlier families with x = (q^2+1)/2."""
    h = (q * q + q) // 2
    return {
        "L'": {"plane": sorted({h - q, h + 1, q * q + (q + 1) // 2}),
               "star": sorted({(q + 1) // 2, h, h + q + 1}), "exact": True},
        "L''": {"plane": sorted({(q + 1) // 2, h - (q + 1), h, h + q + 1,
                                 q * q + (q - 1) // 2}),
                "star": sorted({(q + 3) // 2, h - q, h + 1, h + q + 2,
                                q * q + (q + 1) // 2}), "exact": True},
        "L'''": {"plane": sorted({q * q + (q + 1) // 2, q * q - 3 * (q + 1) // 2,
                                  h + 2 * q + 3, h + q + 2, h + 1, h - q,
                                  h - 2 * q - 1, h - 2 * (q + 1)}),
                 "star": sorted({(q + 1) // 2, 5 * (q + 1) // 2, h - 2 * (q + 1),
                                 h - (q + 1), h, h + q + 1, h + 2 * (q + 1),
                                 h + 3 * (q + 1)}), "exact": False},
        "cyclic": {"flag": q * q + q + 1},
    }


def compare_known(q: int, star_values, plane_values) -> dict[str, dict]:
    """Non-equivalence verdicts from character-value discriminators.

    Characters are invariants, so a discriminating value proves the classes
    distinct; the absence of one proves nothing (INCONCLUSIVE).
    """
    ours = set(star_values) | set(plane_values)
    d = (3 * q + 5) // 2
    fams = known_family_characters(q)
    out = {}
    for name in ("L'", "L''", "L'''"):
        theirs = set(fams[name]["plane"]) | set(fams[name]["star"])
        ok = d in set(plane_values) and d not in theirs
        out[name] = {
            "verdict": "DISTINCT" if ok else "INCONCLUSIVE",
            "discriminator": d,
            "discriminator_in_ours": d in set(plane_values),
            "discriminator_in_theirs": d in theirs,
            "other_values_not_in_theirs": sorted(ours - theirs),
        }
    flag = fams["cyclic"]["flag"]
    out["cyclic"] = {
        "verdict": "DISTINCT" if flag not in ours else "INCONCLUSIVE",
        "discriminator": flag,
        "discriminator_in_ours": flag in ours,
    }
    return out


# -- spreads ----------------------------------------------------------------------------


def regular_spread(geom: PG3) -> np.ndarray:
    """The 1-dimensional GF(q^2)-subspaces of GF(q^2)^2, with
    GF(q^2) = GF(q)[y]/(y^2 - s) and (x1 + x2 y, x3 + x4 y) <-> (x1, x2, x3, x4)."""
    F = geom.F
    s = F.nonsquare.code
    one = F.one_code
    m0, m1 = np.meshgrid(np.arange(geom.q), np.arange(geom.q), indexing="ij")
    m0, m1 = m0.ravel(), m1.ravel()
    n = len(m0)
    a = np.zeros((n + 1, 4), dtype=np.int64)
    b = np.zeros((n + 1, 4), dtype=np.int64)
    a[:n, 0] = one
    a[:n, 2] = m0
    a[:n, 3] = m1
    b[:n, 1] = one
    b[:n, 2] = F.mul_table[s, m1]
    b[:n, 3] = m0
    a[n, 2] = one
    b[n, 3] = one
    return np.sort(geom.lines_of_pairs(a, b))


def is_spread(geom: PG3, lines: np.ndarray) -> bool:
    q = geom.q
    pts = geom.line_points[lines].ravel()
    return len(lines) == q * q + 1 and len(np.unique(pts)) == geom.n_points


def random_collineation(geom: PG3, rng: random.Random) -> np.ndarray:
    q = geom.q
    while True:
        M = np.array([[rng.randrange(q) for _ in range(4)] for _ in range(4)], dtype=np.int64)
        try:
            mat_inverse(geom.F, M)
        except DegenerateError:
            continue
        return M


def spread_sample_test(geom: PG3, mask: np.ndarray, x: int, n: int = 100,
                       seed: int = 0, jobs: int = 1) -> dict:
    """Image of the regular spread under n seeded random collineations;
    each must hold exactly x lines of the set."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (geom.n_lines,):
        raise ValueError(f"mask must cover all {geom.n_lines} lines")
    rng = random.Random(seed)
    base = regular_spread(geom)
    if not is_spread(geom, base):
        raise AssertionError("regular spread construction is broken")
    mats = [random_collineation(geom, rng) for _ in range(n)]

    def one(M):
        img = geom.line_permutation(M)[base]
        if not is_spread(geom, img):
            raise AssertionError("collineation image is not a spread")
        return int(mask[img].sum())

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(jobs) as ex:
            hits = list(ex.map(one, mats))
    else:
        hits = [one(M) for M in mats]
    bad = [i for i, h in enumerate(hits) if h != x]
    return {"samples": n, "seed": seed, "x": x, "spread_size": int(len(base)),
            "counts": sorted(set(hits)), "failures": bad, "pass": not bad}


# -- star and polar-plane counts by sign class ----------------------------------


def stated_sign_class_counts(q: int) -> dict[str, dict[str, int]]:
    """Stated star and polar-plane counts of the Bruen-Drudge class on
    Q_lam_bar, O_n and O_s.  The O_s star value is off by 2q: double
    counting forces (q^2-q)/2."""
    h = (q * q + q) // 2
    return {
        "star": {"Q": q * q + (q + 1) // 2, "On": h + 1, "Os": h + q},
        "plane": {"Q": (q + 1) // 2, "On": h, "Os": h + q + 1},
    }


def check_sign_class_counts(pencil: Pencil, L: LineClass, lambda_bar=None,
                            stated: dict | None = None) -> dict:
    """Star and polar-plane counts of L on Q, O_n, O_s against ``stated``
    (default :func:`stated_sign_class_counts`)."""
    g = pencil.geom
    part = pencil.sign_partition(lambda_bar)
    stated = stated or stated_sign_class_counts(pencil.q)
    star = g.star_counts(L.mask)
    plane = g.plane_counts(L.mask)[pencil.polar_permutation(part.lambda_bar)]
    groups = {"Q": part.quadric_points, "On": part.On, "Os": part.Os}
    out: dict = {"pass": True}
    for kind, counts in (("star", star), ("plane", plane)):
        for name, sel in groups.items():
            obs = sorted(set(counts[sel].tolist()))
            ok = obs == [stated[kind][name]]
            out[f"{kind}/{name}"] = {"stated": stated[kind][name], "observed": obs,
                                     "pass": ok}
            out["pass"] &= ok
    return out


# -- files ---------------------------------------------------------------------------


def save_lineclass(path: str | Path, cls: LineClass, geom: PG3) -> None:
    lines = [f"# q={geom.q} hash={geom.table_hash} x={cls.x} name={cls.name}"]
    lines += [str(int(i)) for i in cls.indices]
    Path(path).write_text("\n".join(lines) + "\n")


def load_indices(path: str | Path, geom: PG3) -> tuple[np.ndarray, dict[str, str]]:
    """Read a line-class file; raise UniverseMismatch on a foreign table."""
    text = Path(path).read_text().splitlines()
    meta: dict[str, str] = {}
    idx = []
    for row in text:
        row = row.strip()
        if not row:
            continue
        if row.startswith("#"):
            for tok in row[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
            continue
        idx.append(int(row))
    if "q" not in meta or "hash" not in meta:
        raise UniverseMismatch("line-class file header must name q and the table hash")
    if int(meta["q"]) != geom.q or meta["hash"] != geom.table_hash:
        raise UniverseMismatch(
            f"file was written for q={meta['q']} hash={meta['hash'][:12]}..., "
            f"current table is q={geom.q} hash={geom.table_hash[:12]}...")
    mask = np.zeros(geom.n_lines, dtype=bool)
    idx_arr = np.array(idx, dtype=np.int64)
    if idx_arr.size and (idx_arr.min() < 0 or idx_arr.max() >= geom.n_lines):
        raise ValueError("line index out of range")
    mask[idx_arr] = True
    return mask, meta


__all__ = [
    "LineClass", "CharacterProfile", "DerivationError", "UniverseMismatch",
    "build_bruen_drudge", "build_first_derived", "derive", "build_derived",
    "check_derivation_preconditions", "star_characters", "plane_characters",
    "derived_character_formulas", "check_derived_breakdown", "known_family_characters", "compare_known",
    "regular_spread", "spread_sample_test", "check_sign_class_counts",
]

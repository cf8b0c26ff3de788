"""Smooth-topology bookkeeping for surgery presentations.

Everything here is exact integer linear algebra: linking matrices of
surgery presentations, Smith normal form for first homology, signed
determinants (Bareiss fraction-free elimination), and the blow-down move
for removing (+/-1)-framed unknotted components.  These computations are
the independent cross-checks for the contact-level machinery: two routes
to the same manifold must present the same H1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    CalculusError,
    MoveNotApplicableError,
    NormalizationRequiredError,
    ParseError,
)
from .rationals import SurgeryCoeff, coeff as _coerce_coeff
from .diagrams import ContactDiagram, smooth_framing


# ---------------------------------------------------------------------------
# Manifold identifiers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Manifold:
    """A name for a closed oriented 3-manifold, as used in rank tables and
    certificates.

    Kinds: "s3", "s1xs2", "poincare" (the positively-oriented Poincare
    sphere), "lens" (lens(p, q), p >= 2, 1 <= q < p coprime), "tower" /
    "-tower" (stage-k tower of trefoil pushoffs and its reverse), "trefoil"
    (p/q-surgery on the right trefoil), and "opaque" free-form labels.
    """

    kind: str
    p: int = 0
    q: int = 0
    label: str = ""

    _KINDS = ("s3", "s1xs2", "poincare", "lens", "tower", "-tower", "trefoil", "opaque")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise CalculusError(f"unknown manifold kind {self.kind!r}")

    @classmethod
    def s3(cls):
        return cls("s3")

    @classmethod
    def s1xs2(cls):
        return cls("s1xs2")

    @classmethod
    def poincare(cls):
        return cls("poincare")

    @classmethod
    def lens(cls, p: int, q: int):
        """lens(p, q); q is reduced mod p, and lens(1, *) collapses to s3."""
        if p < 0:
            p, q = -p, -q
        if p == 0:
            raise CalculusError("lens space order must be nonzero")
        q %= p
        if p == 1:
            return cls.s3()
        if math.gcd(p, q) != 1:
            raise CalculusError(f"lens({p},{q}) needs coprime parameters")
        return cls("lens", p, q)

    @classmethod
    def tower(cls, k: int):
        if k < 1:
            raise CalculusError("tower stage must be >= 1")
        return cls("tower", k)

    @classmethod
    def neg_tower(cls, k: int):
        if k < 1:
            raise CalculusError("tower stage must be >= 1")
        return cls("-tower", k)

    @classmethod
    def trefoil_surgery(cls, r):
        r = _coerce_coeff(r)
        return cls("trefoil", r.num, r.den)

    @classmethod
    def opaque(cls, label: str):
        return cls("opaque", label=label)

    def text(self) -> str:
        if self.kind in ("s3", "s1xs2", "poincare"):
            return self.kind
        if self.kind == "lens":
            return f"lens({self.p},{self.q})"
        if self.kind == "tower":
            return f"tower({self.p})"
        if self.kind == "-tower":
            return f"-tower({self.p})"
        if self.kind == "trefoil":
            return f"trefoil({SurgeryCoeff(self.p, self.q)})"
        return f"opaque:{self.label}"

    __str__ = text

    @classmethod
    def parse(cls, text: str) -> "Manifold":
        text = text.strip()
        if text == "s3":
            return cls.s3()
        if text == "s1xs2":
            return cls.s1xs2()
        if text == "poincare":
            return cls.poincare()
        if text.startswith("opaque:"):
            return cls.opaque(text[len("opaque:") :])
        for head, maker in (
            ("lens(", None),
            ("tower(", cls.tower),
            ("-tower(", cls.neg_tower),
            ("trefoil(", None),
        ):
            if text.startswith(head) and text.endswith(")"):
                body = text[len(head) : -1]
                try:
                    if head == "lens(":
                        p_str, q_str = body.split(",")
                        return cls.lens(int(p_str), int(q_str))
                    if head == "trefoil(":
                        return cls.trefoil_surgery(SurgeryCoeff.parse(body))
                    return maker(int(body))
                except (ValueError, CalculusError) as exc:
                    raise ParseError(f"bad manifold {text!r}: {exc}") from None
        raise ParseError(f"bad manifold {text!r}")

    def mirror(self) -> "Manifold":
        """The same manifold with reversed orientation, where this package
        can name it."""
        if self.kind in ("s3", "s1xs2"):
            return self
        if self.kind == "tower":
            return Manifold.neg_tower(self.p)
        if self.kind == "-tower":
            return Manifold.tower(self.p)
        if self.kind == "lens":
            return Manifold.lens(self.p, self.p - self.q)
        raise CalculusError(f"no reversed-orientation name for {self.text()}")

    def expected_h1_order(self) -> int | None:
        """|H1| when the kind determines it (0 = infinite), else None."""
        if self.kind in ("s3", "poincare"):
            return 1
        if self.kind == "s1xs2":
            return 0
        if self.kind == "lens":
            return self.p
        if self.kind in ("tower", "-tower"):
            return self.p
        if self.kind == "trefoil":
            return abs(self.p)
        return None


# ---------------------------------------------------------------------------
# Framed links
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FramedLink:
    """A framed link presented by its symmetric integer linking matrix.

    Diagonal entries are framings.  ``tags`` records the smooth knot type
    of each component ("unknot", "rhtrefoil", or "" when unknown); moves
    that need unknottedness consult the tag and refuse without it.
    """

    matrix: tuple[tuple[int, ...], ...]
    tags: tuple[str, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.matrix)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise CalculusError("linking matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise CalculusError(
                        f"linking matrix not symmetric at ({i},{j})"
                    )
        tags = tuple(self.tags) if self.tags else ("",) * n
        if len(tags) != n:
            raise CalculusError("one tag per component required")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "tags", tags)

    @property
    def size(self) -> int:
        return len(self.matrix)


def linking_matrix(d: ContactDiagram) -> FramedLink:
    """Smooth linking matrix of a normalized diagram.

    Every component must carry coefficient +1 or -1 (run normalize_diagram
    first); diagonal entries are the smooth framings tb + coeff.
    """
    for c in d.components:
        if c.coeff is None or not (c.coeff == 1 or c.coeff == -1):
            raise NormalizationRequiredError(
                f"component {c.cid} has coefficient {c.coeff}; "
                "a +1/-1 presentation is required"
            )
    ids = d.ids()
    rows = []
    for a in ids:
        comp = d.component(a)
        framing = smooth_framing(comp)
        row = [
            framing.num if a == b else d.linking(a, b) for b in ids
        ]
        rows.append(tuple(row))
    tags = tuple(d.component(a).smooth_type for a in ids)
    return FramedLink(tuple(rows), tags)


# ---------------------------------------------------------------------------
# Exact integer linear algebra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HomologyResult:
    """H1 of a surgery presentation: free rank plus invariant factors.

    ``torsion`` is the increasing divisibility chain (each entry >= 2,
    each dividing the next).
    """

    free_rank: int
    torsion: tuple[int, ...]

    def __post_init__(self):
        tor = tuple(int(t) for t in self.torsion)
        if self.free_rank < 0:
            raise CalculusError("free rank cannot be negative")
        if any(t < 2 for t in tor):
            raise CalculusError("torsion coefficients must be >= 2")
        for a, b in zip(tor, tor[1:]):
            if b % a:
                raise CalculusError("torsion coefficients must form a divisibility chain")
        object.__setattr__(self, "torsion", tor)

    def order(self) -> int:
        """Order of the group; 0 encodes infinite."""
        if self.free_rank:
            return 0
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def is_cyclic(self) -> bool:
        return self.free_rank + len(self.torsion) <= 1

    def cyclic_order(self) -> int | None:
        """Order if the group is cyclic (0 = infinite cyclic), else None."""
        if not self.is_cyclic():
            return None
        return self.order()


def _as_rows(m):
    if isinstance(m, FramedLink):
        return [list(row) for row in m.matrix]
    rows = [list(int(x) for x in row) for row in m]
    return rows


def smith_normal_form(m) -> HomologyResult:
    """Cokernel of an integer matrix, read off the Smith normal form.

    Accepts any rectangular integer matrix (rows x cols) presenting the
    quotient Z^rows / column-span; returns free rank and invariant factors.
    """
    a = _as_rows(m)
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    if any(len(row) != ncols for row in a):
        raise CalculusError("matrix must be rectangular")
    diag = _smith_diagonal(a)
    torsion = tuple(d for d in diag if d > 1)
    return HomologyResult(nrows - len(diag), torsion)


def _smith_diagonal(a):
    """Return the nonzero invariant factors (positive).

    Works on a shrinking block: once a pivot's row and column are cleared,
    both are dropped, so every elementary operation touches only live
    entries.
    """
    diag = []
    block = a
    while block and block[0]:
        pivot = _locate_pivot(block)
        if pivot is None:
            break
        i0, j0 = pivot
        block[0], block[i0] = block[i0], block[0]
        if j0:
            for row in block:
                row[0], row[j0] = row[j0], row[0]
        _reduce_corner(block)
        diag.append(abs(block[0][0]))
        block = [row[1:] for row in block[1:]]
    return diag


def _locate_pivot(block):
    best = None
    best_abs = None
    for i, row in enumerate(block):
        for j, v in enumerate(row):
            if v:
                av = abs(v)
                if av == 1:
                    return i, j
                if best is None or av < best_abs:
                    best, best_abs = (i, j), av
    return best


def _reduce_corner(block):
    """Make block[0][0] the only nonzero entry of its row and column and a
    divisor of everything else, by elementary row/column operations."""
    while True:
        p = block[0][0]
        top = block[0]
        # Clear the first column; a nonzero remainder becomes the new,
        # strictly smaller pivot.
        swapped = False
        for i in range(1, len(block)):
            v = block[i][0]
            if v:
                q = v // p
                block[i] = [x - q * y for x, y in zip(block[i], top)]
                if v - q * p:
                    block[0], block[i] = block[i], block[0]
                    swapped = True
                    break
        if swapped:
            continue
        # The column below the pivot is zero, so clearing the first row by
        # column operations only changes the first row itself.
        swapped = False
        for j in range(1, len(top)):
            v = top[j]
            if v:
                q = v // p
                top[j] = v - q * p
                if top[j]:
                    for row in block:
                        row[0], row[j] = row[j], row[0]
                    swapped = True
                    break
        if swapped:
            continue
        if p in (1, -1):
            return
        # The pivot must divide the rest of the block.
        bad = None
        for i in range(1, len(block)):
            if any(x % p for x in block[i][1:]):
                bad = i
                break
        if bad is None:
            return
        block[0] = [x + y for x, y in zip(top, block[bad])]


def h1(obj) -> HomologyResult:
    """First homology of a diagram, framed link, or raw linking matrix."""
    if isinstance(obj, ContactDiagram):
        obj = linking_matrix(obj)
    return smith_normal_form(obj)


def det_signed(m) -> int:
    """Exact signed determinant by Bareiss fraction-free elimination."""
    a = _as_rows(m)
    n = len(a)
    if any(len(row) != n for row in a):
        raise CalculusError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for t in range(n - 1):
        if a[t][t] == 0:
            swap = next((i for i in range(t + 1, n) if a[i][t]), None)
            if swap is None:
                return 0
            a[t], a[swap] = a[swap], a[t]
            sign = -sign
        ptt = a[t][t]
        for i in range(t + 1, n):
            ait = a[i][t]
            row = a[i]
            prow = a[t]
            a[i] = [(ptt * row[j] - ait * prow[j]) // prev for j in range(n)]
        prev = ptt
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Moves and cross-checks
# ---------------------------------------------------------------------------


def blow_down(link: FramedLink, i: int) -> FramedLink:
    """Remove a (+/-1)-framed unknotted component, reframing the rest.

    With e the framing of component i, every other framing changes by
    -e * lk(i, j)^2 and every other linking by -e * lk(i, j) * lk(i, k).
    Requires tags[i] == "unknot"; the move is never applied to a component
    whose unknottedness is not recorded.
    """
    n = link.size
    if not 0 <= i < n:
        raise CalculusError(f"component index {i} out of range")
    e = link.matrix[i][i]
    if e not in (1, -1):
        raise MoveNotApplicableError(
            f"component {i} has framing {e}; blow-down needs +1 or -1"
        )
    if link.tags[i] != "unknot":
        raise MoveNotApplicableError(
            f"component {i} is not recorded as an unknot; refusing blow-down"
        )
    keep = [j for j in range(n) if j != i]
    rows = []
    for j in keep:
        row = []
        for k in keep:
            v = link.matrix[j][k] - e * link.matrix[i][j] * link.matrix[i][k]
            row.append(v)
        rows.append(tuple(row))
    return FramedLink(tuple(rows), tuple(link.tags[j] for j in keep))


def triangle_det_check(det_a: int, det_b: int, det_c: int) -> bool:
    """Determinant compatibility of three surgery-related presentations:
    the third value must be |second - first| or second + first."""
    return det_c == abs(det_b - det_a) or det_c == det_b + det_a

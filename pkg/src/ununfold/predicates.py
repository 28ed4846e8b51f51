"""Planar predicates with a float filter and interval certification.

Three numeric backends share one small protocol (``const``, ``sqrt``,
``sign``, ``bounds``):

* ``float``    -- IEEE doubles; signs of near-zero quantities use a distance
                  tolerance so that faces glued along a developed edge count as
                  touching.
* ``interval`` -- outward-rounded double intervals (:class:`Interval`).
* ``mp``       -- 256-bit mpmath intervals, used to retry undecided pairs.

Triangle contact is decided with the separating-axis argument for convex
polygons: two triangles have disjoint interiors iff the supporting line of
one of their six edges weakly separates them, and are disjoint as closed
sets iff one of those lines separates them strictly.
"""

from __future__ import annotations

import math
from enum import Enum
from fractions import Fraction

from mpmath.ctx_iv import MPIntervalContext

from .errors import DegenerateInput, PrecisionExhausted

#: Float-mode coincidence tolerance for developed segments (model units).
TOUCH_TOL = 1e-9
#: At 256 bits an enclosure narrower than this around zero is read as zero.
MP_ZERO = 2.0 ** -200
MP_PREC = 256

_SPLITTER = 134217729.0  # 2**27 + 1
_EPS = 2.0 ** -53
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


class Orientation(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    COLLINEAR = "collinear"
    INDETERMINATE = "indeterminate"


class Contact(str, Enum):
    DISJOINT = "disjoint"
    TOUCH_ONLY = "touch_only"
    OVERLAP = "overlap"
    INDETERMINATE = "indeterminate"


# --------------------------------------------------------------------------
# error-free transformations


def _two_sum(a, b):
    x = a + b
    bv = x - a
    av = x - bv
    return x, (a - av) + (b - bv)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    x = a * b
    ahi, alo = _split(a)
    bhi, blo = _split(b)
    err = ((ahi * bhi - x) + ahi * blo + alo * bhi) + alo * blo
    return x, err


def _round_pair(x, err):
    if err > 0:
        return x, math.nextafter(x, math.inf)
    if err < 0:
        return math.nextafter(x, -math.inf), x
    return x, x


def _down(x):
    return math.nextafter(x, -math.inf)


def _up(x):
    return math.nextafter(x, math.inf)


class Interval:
    """Closed interval ``[lo, hi]`` of reals with outward-rounded arithmetic.

    Results that are exactly representable stay exact (detected with
    error-free transformations), so ``x - x`` is exactly zero.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = float(lo)
        hi = lo if hi is None else float(hi)
        if not lo <= hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    def __repr__(self):
        return f"Interval({self.lo!r}, {self.hi!r})"

    @staticmethod
    def _coerce(x):
        return x if isinstance(x, Interval) else Interval(x)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __float__(self):
        return self.mid

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __add__(self, other):
        other = self._coerce(other)
        lo = _round_pair(*_two_sum(self.lo, other.lo))[0]
        hi = _round_pair(*_two_sum(self.hi, other.hi))[1]
        return Interval(lo, hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = self._coerce(other)
        lo = _round_pair(*_two_sum(self.lo, -other.hi))[0]
        hi = _round_pair(*_two_sum(self.hi, -other.lo))[1]
        return Interval(lo, hi)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                lo, hi = _round_pair(*_two_prod(a, b))
                los.append(lo)
                his.append(hi)
        return Interval(min(los), max(his))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.lo <= 0.0 <= other.hi:
            raise ZeroDivisionError("interval division by an interval containing zero")
        los, his = [], []
        for a in (self.lo, self.hi):
            for b in (other.lo, other.hi):
                q = a / b
                p, e = _two_prod(q, b)
                if p == a and e == 0.0:
                    los.append(q)
                    his.append(q)
                else:
                    los.append(_down(q))
                    his.append(_up(q))
        return Interval(min(los), max(his))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sqrt(self):
        if self.hi < 0:
            raise ValueError("sqrt of a negative interval")
        lo = max(self.lo, 0.0)

        def root(x, direction):
            r = math.sqrt(x)
            p, e = _two_prod(r, r)
            if p == x and e == 0.0:
                return r
            return _down(r) if direction < 0 else _up(r)

        return Interval(max(root(lo, -1), 0.0), root(self.hi, 1))


# --------------------------------------------------------------------------
# numeric backends


class FloatBackend:
    name = "float"

    @staticmethod
    def const(x):
        return float(x)

    sqrt = staticmethod(math.sqrt)

    @staticmethod
    def sign(x, tol=0.0):
        if x > tol:
            return 1
        if x < -tol:
            return -1
        return 0

    @staticmethod
    def bounds(x):
        return x, x

    @staticmethod
    def to_float(x):
        return float(x)


class IntervalBackend:
    name = "interval"

    @staticmethod
    def const(x):
        return x if isinstance(x, Interval) else Interval(x)

    @staticmethod
    def sqrt(x):
        return x.sqrt()

    @staticmethod
    def sign(x, tol=0.0):
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.lo == 0 and x.hi == 0:
            return 0
        return None

    @staticmethod
    def bounds(x):
        return x.lo, x.hi

    @staticmethod
    def to_float(x):
        return x.mid


class MPBackend:
    """mpmath interval arithmetic at :data:`MP_PREC` bits."""

    name = "mp"

    def __init__(self, prec=MP_PREC):
        self.ctx = MPIntervalContext()
        self.ctx.prec = prec

    def const(self, x):
        if isinstance(x, Interval):
            return self.ctx.mpf([x.lo, x.hi])
        return self.ctx.mpf(x)

    def sqrt(self, x):
        return self.ctx.sqrt(x)

    def sign(self, x, tol=0.0):
        if x.a > 0:
            return 1
        if x.b < 0:
            return -1
        if x.a == 0 and x.b == 0:
            return 0
        if -MP_ZERO < x.a and x.b < MP_ZERO:
            return 0
        return None

    def bounds(self, x):
        return _down(float(x.a)), _up(float(x.b))

    @staticmethod
    def to_float(x):
        return float(x.mid)


_BACKENDS = {"float": FloatBackend(), "interval": IntervalBackend()}


def get_backend(mode):
    """Return the backend object for ``"float"``, ``"interval"`` or ``"mp"``."""
    if not isinstance(mode, str):
        return mode
    if mode == "mp":
        return MPBackend()
    try:
        return _BACKENDS[mode]
    except KeyError:
        raise ValueError(f"unknown precision mode {mode!r}") from None


# --------------------------------------------------------------------------
# orientation


def _orient_value(a, b, c):
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _orient_float_exact(a, b, c):
    detl = (b[0] - a[0]) * (c[1] - a[1])
    detr = (b[1] - a[1]) * (c[0] - a[0])
    det = detl - detr
    bound = _CCW_ERRBOUND * (abs(detl) + abs(detr))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    fa = [Fraction(v) for v in a]
    fb = [Fraction(v) for v in b]
    fc = [Fraction(v) for v in c]
    exact = _orient_value(fa, fb, fc)
    return (exact > 0) - (exact < 0)


_SIGN_TO_ORIENT = {
    1: Orientation.LEFT,
    -1: Orientation.RIGHT,
    0: Orientation.COLLINEAR,
    None: Orientation.INDETERMINATE,
}


def orient2d(a, b, c, mode="float") -> Orientation:
    """Side of the directed line ``a -> b`` on which ``c`` lies.

    In float mode the sign is exact for the given doubles (error-bounded
    filter with a rational fallback).  In interval mode the result is
    ``INDETERMINATE`` when the enclosure of the determinant straddles zero.
    """
    if mode == "float":
        return _SIGN_TO_ORIENT[_orient_float_exact(a, b, c)]
    bk = get_backend(mode)
    pa, pb, pc = ([bk.const(v) for v in p] for p in (a, b, c))
    return _SIGN_TO_ORIENT[bk.sign(_orient_value(pa, pb, pc))]


# --------------------------------------------------------------------------
# triangle contact


def _side_sign(bk, p, q, r):
    """Sign of r relative to the directed line p -> q, tolerance-aware."""
    val = _orient_value(p, q, r)
    if bk.name == "float":
        length = math.hypot(q[0] - p[0], q[1] - p[1])
        return bk.sign(val / length, TOUCH_TOL)
    return bk.sign(val)


def _ccw(bk, tri):
    s = bk.sign(_orient_value(*tri))
    if s == 0:
        raise DegenerateInput("degenerate triangle")
    if s is None:
        raise DegenerateInput("triangle orientation cannot be certified")
    return tri if s > 0 else (tri[0], tri[2], tri[1])


def _edge_status(bk, tri, other):
    """Classify the supporting lines of ``tri``'s edges against ``other``."""
    out = []
    for i in range(3):
        p, q = tri[i], tri[(i + 1) % 3]
        signs = [_side_sign(bk, p, q, r) for r in other]
        if any(s == 1 for s in signs):
            out.append("cross")
        elif any(s is None for s in signs):
            out.append("unknown")
        elif all(s == -1 for s in signs):
            out.append("strict")
        else:
            out.append("weak")
    return out


def classify_pair(t1, t2, backend) -> Contact:
    """Contact class of two triangles whose coordinates are backend numbers."""
    bk = backend
    t1 = _ccw(bk, tuple(t1))
    t2 = _ccw(bk, tuple(t2))
    status = _edge_status(bk, t1, t2) + _edge_status(bk, t2, t1)
    if "strict" in status:
        return Contact.DISJOINT
    if "weak" in status:
        return Contact.TOUCH_ONLY
    if all(s == "cross" for s in status):
        return Contact.OVERLAP
    return Contact.INDETERMINATE


def _as_backend_triangle(tri, bk):
    return tuple(tuple(bk.const(v) for v in p) for p in tri)


def triangles_interior_overlap(t1, t2, mode="float") -> Contact:
    """Classify two planar triangles as disjoint, touching or overlapping.

    ``Overlap`` means the open interiors intersect.  Shared edges and shared
    vertices are ``TouchOnly``.  In interval mode an undecided result is
    retried at 256 bits before ``Indeterminate`` is returned.
    """
    bk = get_backend(mode)
    result = classify_pair(_as_backend_triangle(t1, bk), _as_backend_triangle(t2, bk), bk)
    if result is Contact.INDETERMINATE and bk.name == "interval":
        mp = MPBackend()
        result = classify_pair(_as_backend_triangle(t1, mp), _as_backend_triangle(t2, mp), mp)
    return result


def overlap_margin(t1, t2) -> float:
    """Float penetration measure: positive iff the interiors overlap.

    For each of the six edge lines, take the deepest vertex of the other
    triangle on the inner side (signed distance); the margin is the minimum
    over edges.
    """

    def ccw(t):
        return t if _orient_value(*t) > 0 else (t[0], t[2], t[1])

    t1, t2 = ccw(tuple(map(tuple, t1))), ccw(tuple(map(tuple, t2)))
    worst = math.inf
    for tri, other in ((t1, t2), (t2, t1)):
        for i in range(3):
            p, q = tri[i], tri[(i + 1) % 3]
            length = math.hypot(q[0] - p[0], q[1] - p[1])
            depth = max(_orient_value(p, q, r) / length for r in other)
            worst = min(worst, depth)
    return worst


def _bbox(bk, tri):
    xs = [bk.bounds(p[0]) for p in tri]
    ys = [bk.bounds(p[1]) for p in tri]
    return (
        min(x[0] for x in xs),
        max(x[1] for x in xs),
        min(y[0] for y in ys),
        max(y[1] for y in ys),
    )


def _boxes_apart(b1, b2):
    return b1[1] < b2[0] or b2[1] < b1[0] or b1[3] < b2[2] or b2[3] < b1[2]


def _pair_contacts(piece, bk):
    faces = list(piece.faces)
    boxes = {f: _bbox(bk, piece.coords[f]) for f in faces}
    out = {}
    for i, f in enumerate(faces):
        for g in faces[i + 1:]:
            if _boxes_apart(boxes[f], boxes[g]):
                continue
            out[(f, g)] = classify_pair(piece.coords[f], piece.coords[g], bk)
    return out


def piece_contacts(piece, strict=True) -> dict:
    """Contact class of every face pair of a developed piece.

    Pairs whose bounding boxes are certified apart are omitted (disjoint).
    Interval-mode pieces retry undecided pairs on a 256-bit redevelopment;
    pairs still undecided there raise :class:`PrecisionExhausted` unless
    ``strict`` is false, in which case they stay ``INDETERMINATE``.
    """
    bk = get_backend(piece.mode)
    contacts = _pair_contacts(piece, bk)
    undecided = [p for p, c in contacts.items() if c is Contact.INDETERMINATE]
    if undecided and bk.name == "interval":
        fine = piece.redevelop("mp")
        mp = get_backend("mp")
        for f, g in undecided:
            contacts[(f, g)] = classify_pair(fine.coords[f], fine.coords[g], mp)
        undecided = [p for p, c in contacts.items() if c is Contact.INDETERMINATE]
    if undecided and strict and bk.name != "float":
        raise PrecisionExhausted(f"cannot certify contact for face pairs {undecided}")
    return contacts


def piece_overlap_report(piece) -> list:
    """Sorted list of face pairs whose developed triangles overlap.

    An empty list means the piece lies flat without overlap.
    """
    return sorted(p for p, c in piece_contacts(piece).items() if c is Contact.OVERLAP)


# --------------------------------------------------------------------------
# the pentagon-margin witness


def pentagon_apex_height(edge=1.0):
    """Distance from an edge's midpoint to the opposite regular-pentagon vertex."""
    t = math.radians(36.0)
    return edge / (2 * math.tan(t)) + edge / (2 * math.sin(t))


def chain_witness(theta_deg, apex_deg=10.0, prec=MP_PREC) -> dict:
    """Certified geometry of a three-edge unit chain with interior angle theta.

    The chain ``P0 P1 P2 P3`` turns left by ``180 - theta`` at P1 and P2.  The
    quantity ``bisector_margin = 1/2 - x(P3)`` is positive when the last edge
    crosses the perpendicular bisector of the first edge ``P0 P1``, negative
    when it falls short, and zero for the regular pentagon (theta = 108).

    Returns a dict with the margin enclosure, its certified sign (``None`` if
    undecided), the crossing height on the bisector, the regular-pentagon
    vertex height, and the height of the apex of an isosceles triangle with
    the given apex angle erected inward on the first edge.
    """
    ctx = MPIntervalContext()
    ctx.prec = prec
    turn = (180 - ctx.mpf(theta_deg)) * ctx.pi / 180
    p2 = (1 + ctx.cos(turn), ctx.sin(turn))
    p3 = (p2[0] + ctx.cos(2 * turn), p2[1] + ctx.sin(2 * turn))
    margin = ctx.mpf(0.5) - p3[0]
    if margin.a > 0:
        sign = 1
    elif margin.b < 0:
        sign = -1
    elif -MP_ZERO < margin.a and margin.b < MP_ZERO:
        sign = 0
    else:
        sign = None
    crossing = None
    dx = p3[0] - p2[0]
    if sign is not None and sign >= 0 and not (dx.a <= 0 <= dx.b):
        t = (ctx.mpf(0.5) - p2[0]) / dx
        crossing = p2[1] + t * (p3[1] - p2[1])
    pent = 1 / (2 * ctx.tan(ctx.pi / 5)) + 1 / (2 * ctx.sin(ctx.pi / 5))
    apex = 1 / (2 * ctx.tan(ctx.mpf(apex_deg) * ctx.pi / 360))
    closer = None
    if crossing is not None:
        closer = bool(crossing.b < pent.a) if sign == 1 else None
    return {
        "theta": float(theta_deg),
        "bisector_margin": (float(margin.a), float(margin.b)),
        "crosses": sign,
        "crossing_height": None if crossing is None else float(crossing.mid),
        "pentagon_height": float(pent.mid),
        "apex_height": float(apex.mid),
        "closer_than_pentagon": closer,
        "apex_overlaps": None if crossing is None else bool(sign == 1 and apex.a > crossing.b),
    }

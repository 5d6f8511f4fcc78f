"""Integral Weierstrass models over Q: parsing, invariants, minimal models, twists.

A curve is y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6 with integer
coefficients.  All arithmetic is exact; the j-invariant is a Fraction.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction

from .arith import factorize, is_squarefree, squarefree_part, valuation

__all__ = [
    "WeierstrassModel",
    "Invariants",
    "Transformation",
    "ModelParseError",
    "SingularModelError",
    "NonIntegralModelError",
    "TwistAmbiguity",
    "parse_model",
    "invariants",
    "transform",
    "minimal_model",
    "quadratic_twist",
    "is_quadratic_twist",
]


class ModelParseError(ValueError):
    """Malformed curve text; carries the character position of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SingularModelError(ValueError):
    """The coefficients define a singular cubic (discriminant zero)."""


class NonIntegralModelError(ValueError):
    """A coordinate change produced non-integral coefficients."""


@dataclass(frozen=True)
class WeierstrassModel:
    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        for name in ("a1", "a2", "a3", "a4", "a6"):
            v = getattr(self, name)
            if not isinstance(v, int):
                raise TypeError(f"{name} must be an integer, got {type(v).__name__}")
        if _discriminant(self) == 0:
            raise SingularModelError(f"singular model {self}: discriminant is 0")

    @property
    def ainvs(self) -> tuple[int, int, int, int, int]:
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def __str__(self) -> str:
        return "[" + ",".join(str(a) for a in self.ainvs) + "]"


def _b_invariants(m: WeierstrassModel) -> tuple[int, int, int, int]:
    a1, a2, a3, a4, a6 = m.ainvs
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    return b2, b4, b6, b8


def _discriminant(m: WeierstrassModel) -> int:
    b2, b4, b6, b8 = _b_invariants(m)
    return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class Invariants:
    b2: int
    b4: int
    b6: int
    b8: int
    c4: int
    c6: int
    disc: int
    j: Fraction

    def __post_init__(self):
        if self.c4**3 - self.c6**2 != 1728 * self.disc:
            raise AssertionError("invariant identity c4^3 - c6^2 = 1728*disc violated")
        if 4 * self.b8 != self.b2 * self.b6 - self.b4**2:
            raise AssertionError("invariant identity 4*b8 = b2*b6 - b4^2 violated")


def invariants(m: WeierstrassModel) -> Invariants:
    """Standard b-, c-invariants, discriminant and exact j-invariant."""
    b2, b4, b6, b8 = _b_invariants(m)
    c4 = b2 * b2 - 24 * b4
    c6 = -(b2**3) + 36 * b2 * b4 - 216 * b6
    disc = -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return Invariants(b2, b4, b6, b8, c4, c6, disc, Fraction(c4**3, disc))


_INT_RE = re.compile(r"[+-]?\d+")


def parse_model(text: str) -> WeierstrassModel:
    """Parse "[a1,a2,a3,a4,a6]" (optional spaces) into a model.

    Raises ModelParseError with the failing position on bad syntax and
    SingularModelError when the coefficients give discriminant 0.
    """
    i = 0
    n = len(text)
    while i < n and text[i].isspace():
        i += 1
    if i >= n or text[i] != "[":
        raise ModelParseError("expected '['", i)
    i += 1
    coeffs: list[int] = []
    for k in range(5):
        while i < n and text[i].isspace():
            i += 1
        match = _INT_RE.match(text, i)
        if not match:
            raise ModelParseError(f"expected integer #{k + 1}", i)
        coeffs.append(int(match.group()))
        i = match.end()
        while i < n and text[i].isspace():
            i += 1
        if k < 4:
            if i >= n or text[i] != ",":
                raise ModelParseError("expected ','", i)
            i += 1
    if i >= n or text[i] != "]":
        raise ModelParseError("expected ']'", i)
    i += 1
    while i < n and text[i].isspace():
        i += 1
    if i != n:
        raise ModelParseError("trailing characters after ']'", i)
    return WeierstrassModel(*coeffs)


@dataclass(frozen=True)
class Transformation:
    """Coordinate change (x, y) -> (u^2*x + r, u^3*y + u^2*s*x + t).

    These form a group; disc scales by u^-12 and c4 by u^-4 under apply().
    """

    u: Fraction
    r: Fraction
    s: Fraction
    t: Fraction

    def __post_init__(self):
        for name in ("u", "r", "s", "t"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.u == 0:
            raise ValueError("transformation scale u must be nonzero")

    @classmethod
    def identity(cls) -> "Transformation":
        return cls(Fraction(1), Fraction(0), Fraction(0), Fraction(0))

    @classmethod
    def shift(cls, r=0, s=0, t=0) -> "Transformation":
        return cls(Fraction(1), Fraction(r), Fraction(s), Fraction(t))

    @classmethod
    def scale(cls, u) -> "Transformation":
        return cls(Fraction(u), Fraction(0), Fraction(0), Fraction(0))

    def then(self, other: "Transformation") -> "Transformation":
        """The transformation equivalent to applying self, then other."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return Transformation(
            u1 * u2,
            u1 * u1 * r2 + r1,
            u1 * s2 + s1,
            u1**3 * t2 + u1 * u1 * s1 * r2 + t1,
        )

    def inverse(self) -> "Transformation":
        u, r, s, t = self.u, self.r, self.s, self.t
        return Transformation(1 / u, -r / u**2, -s / u, (s * r - t) / u**3)

    @property
    def is_identity(self) -> bool:
        return self == Transformation.identity()


def transform(m: WeierstrassModel, trans: Transformation) -> WeierstrassModel:
    """Apply a coordinate change; the result must stay integral."""
    a1, a2, a3, a4, a6 = (Fraction(a) for a in m.ainvs)
    u, r, s, t = trans.u, trans.r, trans.s, trans.t
    new = (
        (a1 + 2 * s) / u,
        (a2 - s * a1 + 3 * r - s * s) / u**2,
        (a3 + r * a1 + 2 * t) / u**3,
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) / u**4,
        (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) / u**6,
    )
    if any(c.denominator != 1 for c in new):
        raise NonIntegralModelError(
            f"transformation {trans} of {m} gives non-integral coefficients"
        )
    return WeierstrassModel(*(int(c) for c in new))


# ---------------------------------------------------------------------------
# Global minimal model (Laska-Kraus-Connell via per-prime Tate scaling).


def _local_minimization(m: WeierstrassModel, p: int):
    """Tate run at p; its transformation carries the p-power scaling.

    Deferred to the local reduction machinery, which knows the exact
    conditions at 2 and 3.
    """
    from .localdata import tate_reduction

    return tate_reduction(m, p)


def _reduce_translation(m: WeierstrassModel) -> Transformation:
    """Translation putting a model in reduced form: a1, a3 in {0,1}, a2 in {-1,0,1}."""
    s = Fraction(m.a1 % 2 - m.a1, 2)
    a2s = m.a2 - s * m.a1 - s * s
    r = Fraction((a2s + 1) % 3 - 1 - a2s, 3)
    a3sr = m.a3 + r * m.a1
    t = Fraction(int(a3sr) % 2 - a3sr, 2)
    return Transformation(Fraction(1), r, s, t)


def minimal_model(m: WeierstrassModel) -> tuple[WeierstrassModel, Transformation]:
    """The reduced global minimal model and the transformation reaching it.

    Minimality: for every prime q, v_q(disc) < 12 or v_q(c4) < 4, with the
    exact Tate conditions applied at 2 and 3.  The reduced form
    (a1, a3 in {0,1}, a2 in {-1,0,1}) makes the result unique, so isomorphic
    inputs map to the identical model.
    """
    inv = invariants(m)
    total = Transformation.identity()
    cur = m
    for q, e in factorize(inv.disc).items():
        if e < 12:
            continue
        vc4 = valuation(inv.c4, q)[0] if inv.c4 != 0 else None
        if vc4 is not None and vc4 < 4:
            continue
        res = _local_minimization(cur, q)
        if res.u_exponent > 0:
            # res.trans scales by q^u_exponent after the translations that
            # make the scaling integral; translations leave other primes alone.
            cur = res.model
            total = total.then(res.trans)
    step = _reduce_translation(cur)
    cur = transform(cur, step)
    total = total.then(step)
    return cur, total


# ---------------------------------------------------------------------------
# Quadratic twists.


class TwistAmbiguity(enum.Enum):
    """Returned by is_quadratic_twist when j in {0, 1728} blocks the generic test."""

    HIGHER_TWIST = "higher-twist ambiguity"


def quadratic_twist(m: WeierstrassModel, d: int) -> WeierstrassModel:
    """Minimal model of the twist of m by the squarefree integer d.

    The twist scales c4 by d^2 and c6 by d^3 (up to 12th powers absorbed
    by minimization).  Twisting twice by the same d returns the minimal
    model of m itself.
    """
    if d == 0:
        raise ValueError("twist parameter must be nonzero")
    if not is_squarefree(d):
        raise ValueError(f"twist parameter must be squarefree, got {d}")
    inv = invariants(m)
    raw = WeierstrassModel(
        0, 0, 0, -27 * inv.c4 * d * d, -54 * inv.c6 * d**3
    )
    return minimal_model(raw)[0]


def is_quadratic_twist(
    m1: WeierstrassModel, m2: WeierstrassModel
) -> int | None | TwistAmbiguity:
    """Squarefree d with m2 isomorphic to the twist of m1 by d, else None.

    Curves sharing j in {0, 1728} admit quartic or sextic twists that this
    test does not attempt; TwistAmbiguity.HIGHER_TWIST is returned for them.
    """
    i1, i2 = invariants(m1), invariants(m2)
    if i1.j != i2.j:
        return None
    if i1.j == 0 or i1.j == 1728:
        return TwistAmbiguity.HIGHER_TWIST
    # c4, c6 are both nonzero away from j = 0, 1728.
    ratio = Fraction(i2.c6 * i1.c4, i1.c6 * i2.c4)
    d = squarefree_part(ratio.numerator * ratio.denominator)
    if quadratic_twist(m1, d) == minimal_model(m2)[0]:
        return d
    return None

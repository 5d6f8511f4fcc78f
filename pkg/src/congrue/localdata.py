"""Reduction data of a curve at each prime: Tate's algorithm and consequences.

The full Tate loop runs at every prime.  At p >= 5 the outcome is
cross-checked against the valuation table for (v(c4), v(disc)), which the
loop must reproduce; a mismatch raises immediately rather than returning
bad local data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from math import gcd

from .arith import factorize, is_prime, legendre, valuation
from .model import (
    Transformation,
    WeierstrassModel,
    invariants,
    minimal_model,
    transform,
)

__all__ = [
    "ReductionKind",
    "LocalData",
    "TateResult",
    "IrreducibilityCertificate",
    "NotMinimalError",
    "UnsupportedPrimeError",
    "tate_reduction",
    "reduction_type",
    "bad_primes",
    "conductor",
    "phi_order",
    "irreducibility_certificate",
]


class ReductionKind(enum.Enum):
    GOOD = "good"
    MULTIPLICATIVE_SPLIT = "multiplicative split"
    MULTIPLICATIVE_NONSPLIT = "multiplicative nonsplit"
    ADDITIVE = "additive"

    @property
    def is_multiplicative(self) -> bool:
        return self in (
            ReductionKind.MULTIPLICATIVE_SPLIT,
            ReductionKind.MULTIPLICATIVE_NONSPLIT,
        )


class NotMinimalError(ValueError):
    """The model is not minimal at the requested prime; minimize first."""


class UnsupportedPrimeError(ValueError):
    """The requested residual prime is outside the supported range."""


# Components of the special fiber (counted without multiplicity), by type.
# The conductor exponent is v(disc) + 1 - components.
_COMPONENTS = {"I0": 1, "II": 1, "III": 2, "IV": 3, "I0*": 5, "IV*": 7, "III*": 8, "II*": 9}


@dataclass(frozen=True)
class TateResult:
    """Raw outcome of the Tate loop at p, on the locally minimal model."""

    p: int
    kodaira: str
    f: int
    v_delta: int
    kind: ReductionKind
    u_exponent: int  # model was scaled down by p^u_exponent to reach minimality
    model: WeierstrassModel
    trans: Transformation


@dataclass(frozen=True)
class LocalData:
    q: int
    v_delta: int
    v_c4: int | None  # None means c4 = 0 (infinite valuation)
    kind: ReductionKind
    f: int
    kodaira: str
    potentially_good: bool
    phi_order: int | None


@dataclass(frozen=True)
class IrreducibilityCertificate:
    """Witness that the mod-p torsion representation has no stable line.

    At a prime q >= 5 of additive, potentially good reduction, inertia acts
    through a cyclic group whose order e is prime to p; if a stable line
    existed, e would divide p - 1.
    """

    q: int
    e: int
    p: int
    reason: str

    def __post_init__(self):
        if self.q < 5 or self.q == self.p:
            raise ValueError(f"certificate prime q={self.q} invalid for p={self.p}")
        if self.e not in (2, 3, 4, 6):
            raise ValueError(f"component order e={self.e} out of range")
        if self.p % self.e == 0 or (self.p - 1) % self.e == 0:
            raise ValueError(f"e={self.e} does not certify irreducibility at p={self.p}")


def _exact_div(a: int, d: int) -> int:
    q, r = divmod(a, d)
    if r:
        raise RuntimeError(f"internal: expected {d} | {a} in Tate loop")
    return q


def _singular_point(m: WeierstrassModel, p: int) -> tuple[int, int]:
    """Lift of the unique singular point of the reduction mod p."""
    a1, a2, a3, a4, a6 = m.ainvs
    if p <= 3:
        for x in range(p):
            for y in range(p):
                on = (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % p
                dx = (a1 * y - 3 * x * x - 2 * a2 * x - a4) % p
                dy = (2 * y + a1 * x + a3) % p
                if on == 0 and dx == 0 and dy == 0:
                    return x, y
        raise RuntimeError(f"internal: no singular point mod {p} on {m}")
    inv = invariants(m)
    if inv.c4 % p != 0:
        # node: double root of 4x^3 + b2 x^2 + 2 b4 x + b6
        x0 = -(inv.c6 + inv.b2 * inv.c4) * pow(12 * inv.c4, -1, p) % p
    else:
        # cusp: triple root
        x0 = -inv.b2 * pow(12, -1, p) % p
    y0 = -(a1 * x0 + a3) * pow(2, -1, p) % p
    return x0, y0


def _is_split(m: WeierstrassModel, p: int) -> bool:
    """Split test for multiplicative reduction.

    For odd p the node tangents are rational iff -c6 is a square mod p.
    At p = 2 the model must have its singular point at the origin; the
    tangent cone is T^2 + a1*T - a2 with a1 odd, which factors over F_2
    exactly when a2 is even.
    """
    if p == 2:
        return m.a2 % 2 == 0
    return legendre(-invariants(m).c6, p) == 1


def _normalize_step6(m: WeierstrassModel, p: int) -> Transformation:
    """Translation making p | a1, a2; p^2 | a3, a4; p^3 | a6.

    Closed form at p >= 5; small exhaustive search over the wild part
    at p = 2, 3 (existence is guaranteed at this point of the loop).
    """
    if p >= 5:
        s = -m.a1 * pow(2, -1, p) % p
        a3_after = m.a3  # s does not change a3
        t = -a3_after * pow(2, -1, p * p) % (p * p)
        return Transformation.shift(s=s, t=t)
    a1, a2, a3, a4, a6 = m.ainvs
    p2, p3 = p * p, p**3
    for s in range(p):
        if (a1 + 2 * s) % p or (a2 - s * a1 - s * s) % p:
            continue
        for r in range(0, p3, p):
            for t in range(p3):
                if (a3 + r * a1 + 2 * t) % p2:
                    continue
                if (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t) % p2:
                    continue
                if (a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1) % p3:
                    continue
                return Transformation.shift(r=r, s=s, t=t)
    raise RuntimeError(f"internal: step-6 normalization failed at {p} on {m}")


def _cubic_repeated_root(a: int, b: int, c: int, p: int) -> tuple[str, int] | None:
    """Root structure of T^3 + a T^2 + b T + c over F_p.

    None when the roots are distinct (over the algebraic closure);
    otherwise ("double", r) or ("triple", r) with the repeated root r,
    which always lies in F_p.
    """
    a, b, c = a % p, b % p, c % p
    disc = (18 * a * b * c - 4 * a**3 * c + a * a * b * b - 4 * b**3 - 27 * c * c) % p
    if disc != 0:
        return None
    if p <= 3:
        root = None
        for r in range(p):
            if (r**3 + a * r * r + b * r + c) % p == 0 and (3 * r * r + 2 * a * r + b) % p == 0:
                root = r
                break
        if root is None:
            raise RuntimeError("internal: vanishing cubic discriminant but no repeated root")
    else:
        # remainder of P mod P' is R1*T + R0 (computed symbolically)
        inv9 = pow(9, -1, p)
        r1 = (6 * b - 2 * a * a) * inv9 % p
        r0 = (9 * c - a * b) * inv9 % p
        if r1 != 0:
            root = -r0 * pow(r1, -1, p) % p
        elif r0 == 0:
            root = -a * pow(3, -1, p) % p
        else:
            raise RuntimeError("internal: vanishing cubic discriminant but trivial gcd")
    if (-3 * root - a) % p == 0 and (3 * root * root - b) % p == 0 and (root**3 + c) % p == 0:
        return "triple", root
    return "double", root


def _quad_double_root(B: int, C: int, p: int) -> int:
    """Double root of Y^2 + B*Y - C over F_p (inseparable case)."""
    if p == 2:
        return C % 2  # B is even here; the root squares to C
    return -B * pow(2, -1, p) % p


def _quad_double_root_general(A: int, B: int, C: int, p: int) -> int:
    """Double root of A*Y^2 + B*Y + C over F_p, A invertible (inseparable case)."""
    if p == 2:
        return C % 2  # A odd, B even
    return -B * pow(2 * A, -1, p) % p


def tate_reduction(m: WeierstrassModel, p: int) -> TateResult:
    """Run Tate's algorithm at p.

    Always terminates with the local data of the p-minimal model reached
    from m; u_exponent counts how many times the model had to be scaled
    down by p, so u_exponent == 0 certifies p-minimality of the input.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    cur = m
    total = Transformation.identity()
    u_exp = 0

    def apply(step: Transformation):
        nonlocal cur, total
        cur = transform(cur, step)
        total = total.then(step)

    def result(kodaira: str, f: int, n: int, kind: ReductionKind) -> TateResult:
        if p >= 5 and kind is ReductionKind.ADDITIVE and f != 2:
            raise RuntimeError(f"internal: conductor exponent {f} at {p} >= 5")
        return TateResult(p, kodaira, f, n, kind, u_exp, cur, total)

    while True:
        inv = invariants(cur)
        n = valuation(inv.disc, p)[0] if inv.disc % p == 0 else 0
        if n == 0:
            return result("I0", 0, 0, ReductionKind.GOOD)

        x0, y0 = _singular_point(cur, p)
        apply(Transformation.shift(r=x0, t=y0))
        inv = invariants(cur)

        if inv.c4 % p != 0:
            kind = (
                ReductionKind.MULTIPLICATIVE_SPLIT
                if _is_split(cur, p)
                else ReductionKind.MULTIPLICATIVE_NONSPLIT
            )
            return result(f"I{n}", 1, n, kind)

        # Additive from here on.  Singular point sits at the origin, so
        # p divides a3, a4, a6.
        if cur.a6 % p**2 != 0:
            return result("II", n, n, ReductionKind.ADDITIVE)
        if inv.b8 % p**3 != 0:
            return result("III", n - 1, n, ReductionKind.ADDITIVE)
        if inv.b6 % p**3 != 0:
            return result("IV", n - 2, n, ReductionKind.ADDITIVE)

        apply(_normalize_step6(cur, p))
        A2 = _exact_div(cur.a2, p)
        A4 = _exact_div(cur.a4, p * p)
        A6 = _exact_div(cur.a6, p**3)
        repeated = _cubic_repeated_root(A2, A4, A6, p)

        if repeated is None:
            return result("I0*", n - 4, n, ReductionKind.ADDITIVE)

        shape, root = repeated
        if shape == "double":
            apply(Transformation.shift(r=p * root))
            mx = my = p * p
            m_idx = 1
            while True:
                xa3 = _exact_div(cur.a3, my)
                xa6 = _exact_div(cur.a6, mx * my)
                if (xa3 * xa3 + 4 * xa6) % p != 0:
                    return result(f"I{m_idx}*", n - 4 - m_idx, n, ReductionKind.ADDITIVE)
                apply(Transformation.shift(t=my * _quad_double_root(xa3, xa6, p)))
                my *= p
                m_idx += 1

                xa2 = _exact_div(cur.a2, p)
                xa4 = _exact_div(cur.a4, p * mx)
                xa6 = _exact_div(cur.a6, mx * my)
                if (xa4 * xa4 - 4 * xa2 * xa6) % p != 0:
                    return result(f"I{m_idx}*", n - 4 - m_idx, n, ReductionKind.ADDITIVE)
                apply(Transformation.shift(r=mx * _quad_double_root_general(xa2, xa4, xa6, p)))
                mx *= p
                m_idx += 1
                if m_idx > n:
                    raise RuntimeError(f"internal: I_m* loop failed to terminate at {p}")

        # Triple root of the cubic.
        apply(Transformation.shift(r=p * root))
        xa3 = _exact_div(cur.a3, p * p)
        xa6 = _exact_div(cur.a6, p**4)
        if (xa3 * xa3 + 4 * xa6) % p != 0:
            return result("IV*", n - 6, n, ReductionKind.ADDITIVE)
        apply(Transformation.shift(t=p * p * _quad_double_root(xa3, xa6, p)))

        if cur.a4 % p**4 != 0:
            return result("III*", n - 7, n, ReductionKind.ADDITIVE)
        if cur.a6 % p**6 != 0:
            return result("II*", n - 8, n, ReductionKind.ADDITIVE)

        # Not minimal at p: scale down and run again.
        apply(Transformation.scale(p))
        u_exp += 1


def _components(kodaira: str) -> int:
    if kodaira in _COMPONENTS:
        return _COMPONENTS[kodaira]
    star = kodaira.endswith("*")
    idx = int(kodaira[1:-1] if star else kodaira[1:])
    return idx + 5 if star else idx


def reduction_type(m: WeierstrassModel, q: int) -> LocalData:
    """Complete local data of a minimal model at the prime q.

    Raises NotMinimalError when m is not minimal at q.
    """
    res = tate_reduction(m, q)
    if res.u_exponent > 0:
        raise NotMinimalError(f"{m} is not minimal at {q}; reduce it first")
    if res.f != res.v_delta + 1 - _components(res.kodaira) and res.v_delta > 0:
        raise RuntimeError("internal: conductor exponent inconsistent with fiber type")
    inv = invariants(m)
    v_c4 = valuation(inv.c4, q)[0] if inv.c4 != 0 else None
    pot_good = inv.j.denominator % q != 0
    phi = _phi_order_fields(res.kind, q, pot_good, res.v_delta)
    return LocalData(
        q=q,
        v_delta=res.v_delta,
        v_c4=v_c4,
        kind=res.kind,
        f=res.f,
        kodaira=res.kodaira,
        potentially_good=pot_good,
        phi_order=phi,
    )


def _phi_order_fields(
    kind: ReductionKind, q: int, potentially_good: bool, v_delta: int
) -> int | None:
    if kind is not ReductionKind.ADDITIVE or q < 5 or not potentially_good:
        return None
    return 12 // gcd(v_delta, 12)


def phi_order(ld: LocalData) -> int | None:
    """Order of the component group over the unramified closure, when defined.

    Defined for additive, potentially good reduction at q >= 5, where it is
    12 / gcd(v_q(disc), 12) in {2, 3, 4, 6}; None otherwise.
    """
    return _phi_order_fields(ld.kind, ld.q, ld.potentially_good, ld.v_delta)


def bad_primes(m: WeierstrassModel) -> list[int]:
    """Primes dividing the discriminant of m, ascending."""
    return list(factorize(invariants(m).disc))


def conductor(m: WeierstrassModel) -> int:
    """Conductor of a globally minimal model."""
    out = 1
    for q in bad_primes(m):
        out *= q ** reduction_type(m, q).f
    return out


def irreducibility_certificate(
    m: WeierstrassModel, p: int
) -> IrreducibilityCertificate | None:
    """Search for a local obstruction to a stable line in the mod-p torsion.

    Scans bad primes q >= 5 (ascending, skipping q = p) for additive,
    potentially good reduction whose inertia order e satisfies p does not
    divide e and e does not divide p - 1.  None means the criterion is
    inconclusive, not that the representation is reducible.
    """
    if not is_prime(p) or p < 5:
        raise UnsupportedPrimeError(f"residual prime must be a prime >= 5, got {p}")
    mm = minimal_model(m)[0]
    for q in bad_primes(mm):
        if q < 5 or q == p:
            continue
        ld = reduction_type(mm, q)
        e = ld.phi_order
        if e is None:
            continue
        if p % e != 0 and e != 0 and (p - 1) % e != 0:
            reason = (
                f"inertia at {q} acts through a cyclic group of order {e}, "
                f"prime to {p}; a stable line would force {e} | {p - 1}"
            )
            return IrreducibilityCertificate(q=q, e=e, p=p, reason=reason)
    return None

"""Mod-p congruence verification between two rational elliptic curves.

The check: after partitioning the primes dividing either conductor, compare
a_l mod p at every remaining prime up to a Sturm-type bound, impose the
auxiliary trace condition at one-sided multiplicative primes, and require
equal splitness at shared multiplicative primes.  Full success gives
congruent semisimplifications; irreducibility certificates on both sides
upgrade that to isomorphic torsion modules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import lcm

from .arith import is_prime, primes_upto
from .frobenius import ApCache, ap
from .localdata import (
    IrreducibilityCertificate,
    LocalData,
    ReductionKind,
    UnsupportedPrimeError,
    bad_primes,
    irreducibility_certificate,
    reduction_type,
)
from .model import WeierstrassModel, minimal_model

__all__ = [
    "BoundPolicy",
    "CongruenceParams",
    "Verdict",
    "Witness",
    "LevelPartition",
    "CongruenceReport",
    "congruence_level",
    "sturm_bound",
    "psi_index",
    "aux_condition",
    "verify_congruence",
    "certify_non_isogenous",
]

PRESET_BOUND = 3360


@dataclass(frozen=True)
class BoundPolicy:
    """How the trace-comparison range is chosen.

    computed: ceil(psi(M)/6) with psi the index M * prod(1 + 1/q), never
    weaker than any preset; preset: a fixed published range; explicit: caller
    supplied.
    """

    kind: str
    value: int | None = None

    def __post_init__(self):
        if self.kind not in ("computed", "preset", "explicit"):
            raise ValueError(f"unknown bound policy {self.kind!r}")
        if self.kind != "computed" and (self.value is None or self.value < 2):
            raise ValueError("preset/explicit bounds must be >= 2")

    @classmethod
    def computed(cls) -> "BoundPolicy":
        return cls("computed")

    @classmethod
    def preset(cls, value: int = PRESET_BOUND) -> "BoundPolicy":
        return cls("preset", value)

    @classmethod
    def explicit(cls, value: int) -> "BoundPolicy":
        return cls("explicit", value)


@dataclass(frozen=True)
class CongruenceParams:
    p: int
    bound_policy: BoundPolicy = field(default_factory=BoundPolicy.computed)
    include_l_equals_p: bool = True

    def __post_init__(self):
        if self.p < 3 or not is_prime(self.p):
            raise ValueError(f"residual prime must be a prime >= 3, got {self.p}")


class Verdict(enum.Enum):
    ISOMORPHIC_MODULES = "IsomorphicModules"
    CONGRUENT_SEMISIMPLIFICATIONS = "CongruentSemisimplifications"
    NOT_CONGRUENT = "NotCongruent"
    INAPPLICABLE = "Inapplicable"


@dataclass(frozen=True)
class Witness:
    """A prime at which the congruence fails, with both traces."""

    l: int
    a_first: int
    a_second: int
    check: str  # "trace", "aux" or "splitness"


@dataclass(frozen=True)
class LevelPartition:
    """Partition of the primes dividing either conductor."""

    level: int  # lcm of the conductors
    same_multiplicative: tuple[int, ...]  # shared multiplicative, equal splitness
    common_additive: tuple[int, ...]
    aux: tuple[tuple[int, int], ...]  # (q, side with multiplicative reduction: 1 or 2)
    splitness_conflicts: tuple[int, ...]  # shared multiplicative, opposite splitness
    inapplicable: tuple[tuple[int, str], ...]  # combinations outside the criterion


def congruence_level(
    local1: dict[int, LocalData], local2: dict[int, LocalData]
) -> tuple[int, LevelPartition]:
    """Level M = lcm(N, N') and the bad-prime partition.

    Shared multiplicative primes of opposite splitness are reported in
    splitness_conflicts (the verifier turns them into NotCongruent
    witnesses); mixed kinds such as additive against good or against
    multiplicative fall outside the criterion and land in inapplicable.
    """
    n1 = 1
    for q, ld in local1.items():
        n1 *= q**ld.f
    n2 = 1
    for q, ld in local2.items():
        n2 *= q**ld.f
    level = lcm(n1, n2)

    same_mult: list[int] = []
    common_add: list[int] = []
    aux: list[tuple[int, int]] = []
    conflicts: list[int] = []
    inapplicable: list[tuple[int, str]] = []
    for q in sorted(set(local1) | set(local2)):
        k1 = local1[q].kind if q in local1 else ReductionKind.GOOD
        k2 = local2[q].kind if q in local2 else ReductionKind.GOOD
        if k1 is ReductionKind.GOOD and k2 is ReductionKind.GOOD:
            continue
        if k1.is_multiplicative and k2.is_multiplicative:
            (same_mult if k1 is k2 else conflicts).append(q)
        elif k1 is ReductionKind.ADDITIVE and k2 is ReductionKind.ADDITIVE:
            common_add.append(q)
        elif k1.is_multiplicative and k2 is ReductionKind.GOOD:
            aux.append((q, 1))
        elif k2.is_multiplicative and k1 is ReductionKind.GOOD:
            aux.append((q, 2))
        else:
            inapplicable.append((q, f"{k1.value} against {k2.value} at {q}"))
    return level, LevelPartition(
        level,
        tuple(same_mult),
        tuple(common_add),
        tuple(aux),
        tuple(conflicts),
        tuple(inapplicable),
    )


def psi_index(m_level: int) -> int:
    """The index psi(M) = M * prod_{q | M} (1 + 1/q), exactly."""
    if m_level < 1:
        raise ValueError("level must be positive")
    psi = m_level
    q = 2
    rest = m_level
    while q * q <= rest:
        if rest % q == 0:
            psi = psi // q * (q + 1)
            while rest % q == 0:
                rest //= q
        q += 1
    if rest > 1:
        psi = psi // rest * (rest + 1)
    return psi


def sturm_bound(m_level: int, policy: BoundPolicy | None = None) -> int:
    """Trace-comparison bound for weight-2 level-M objects under a policy.

    The computed policy returns ceil(psi(M)/6); preset and explicit return
    their fixed value.
    """
    if policy is None or policy.kind == "computed":
        return (psi_index(m_level) + 5) // 6
    return policy.value


def aux_condition(a_q_good: int, eps: int, q: int, p: int) -> bool:
    """Trace condition at a one-sided multiplicative prime q.

    eps is the multiplicative curve's a_q (+1 split, -1 nonsplit); the
    condition is a_q_good * eps = +-(q + 1) mod p.
    """
    if eps not in (1, -1):
        raise ValueError(f"eps must be +-1, got {eps}")
    prod = a_q_good * eps
    return (prod - (q + 1)) % p == 0 or (prod + (q + 1)) % p == 0


@dataclass(frozen=True)
class CongruenceReport:
    verdict: Verdict
    p: int
    level: int
    bound: int
    policy: str
    checked: int
    skipped: tuple[tuple[int, str], ...]
    aux: tuple[dict, ...]
    witness: Witness | None
    certificates: tuple[IrreducibilityCertificate | None, IrreducibilityCertificate | None]
    inapplicable_reason: str | None
    notes: tuple[str, ...]

    def to_json_dict(self) -> dict:
        def cert(c):
            if c is None:
                return None
            return {"q": c.q, "e": c.e, "p": c.p, "reason": c.reason}

        return {
            "verdict": self.verdict.value,
            "p": self.p,
            "M": self.level,
            "bound": self.bound,
            "policy": self.policy,
            "checked": self.checked,
            "skipped": [{"l": l, "reason": r} for l, r in self.skipped],
            "aux": list(self.aux),
            "witnesses": []
            if self.witness is None
            else [
                {
                    "l": self.witness.l,
                    "a_first": self.witness.a_first,
                    "a_second": self.witness.a_second,
                    "check": self.witness.check,
                }
            ],
            "certificates": [cert(c) for c in self.certificates],
            "inapplicable_reason": self.inapplicable_reason,
            "notes": list(self.notes),
        }


def _local_table(mm: WeierstrassModel) -> dict[int, LocalData]:
    return {q: reduction_type(mm, q) for q in bad_primes(mm)}


def verify_congruence(
    m1: WeierstrassModel,
    m2: WeierstrassModel,
    params: CongruenceParams,
    cache: ApCache | None = None,
) -> CongruenceReport:
    """Decide whether the mod-p torsion semisimplifications agree.

    Both models are minimized first.  Checks, in order: structural
    applicability of the bad-prime configuration, equal splitness at shared
    multiplicative primes, the auxiliary condition at one-sided
    multiplicative primes, then a_l mod p for every prime l <= bound away
    from the level (l = p included unless configured off).  The first
    failure short-circuits with its witness; full success attempts
    irreducibility certificates on both curves.
    """
    p = params.p
    mm1, mm2 = minimal_model(m1)[0], minimal_model(m2)[0]
    level, part = congruence_level(_local_table(mm1), _local_table(mm2))
    bound = sturm_bound(level, params.bound_policy)
    computed = sturm_bound(level)
    notes = []
    if bound < computed:
        notes.append(
            f"policy bound {bound} is below the computed index bound {computed} "
            f"for level {level}"
        )

    known1 = cache.load(mm1) if cache is not None else {}
    known2 = cache.load(mm2) if cache is not None else {}
    fresh1: dict[int, int] = {}
    fresh2: dict[int, int] = {}

    def trace(side: int, l: int) -> int:
        known, fresh, mm = (known1, fresh1, mm1) if side == 1 else (known2, fresh2, mm2)
        if l in known:
            return known[l]
        if l not in fresh:
            fresh[l] = ap(mm, l)
        return fresh[l]

    def finish(verdict, checked=0, skipped=(), aux=(), witness=None, certs=(None, None), reason=None):
        if cache is not None:
            if fresh1:
                cache.store(mm1, known1 | fresh1)
            if fresh2:
                cache.store(mm2, known2 | fresh2)
        return CongruenceReport(
            verdict=verdict,
            p=p,
            level=level,
            bound=bound,
            policy=params.bound_policy.kind,
            checked=checked,
            skipped=tuple(skipped),
            aux=tuple(aux),
            witness=witness,
            certificates=certs,
            inapplicable_reason=reason,
            notes=tuple(notes),
        )

    if part.inapplicable:
        q, why = part.inapplicable[0]
        return finish(Verdict.INAPPLICABLE, reason=why)

    # Shared multiplicative primes must carry equal a_q = +-1.
    if part.splitness_conflicts:
        q = min(part.splitness_conflicts)
        return finish(
            Verdict.NOT_CONGRUENT,
            witness=Witness(q, trace(1, q), trace(2, q), "splitness"),
        )

    # Auxiliary condition at one-sided multiplicative primes.
    aux_rows = []
    for q, side in part.aux:
        eps = trace(side, q)
        a_good = trace(3 - side, q)
        holds = aux_condition(a_good, eps, q, p)
        aux_rows.append({"q": q, "eps": eps, "a_good": a_good, "holds": holds})
        if not holds:
            return finish(
                Verdict.NOT_CONGRUENT,
                aux=aux_rows,
                witness=Witness(q, trace(1, q), trace(2, q), "aux"),
            )

    level_support = set(part.same_multiplicative) | set(part.common_additive)
    level_support |= {q for q, _ in part.aux} | set(part.splitness_conflicts)
    skipped = []
    checked = 0
    for l in primes_upto(bound):
        if l in level_support:
            if l in part.same_multiplicative:
                skipped.append((l, "shared multiplicative prime"))
            elif l in part.common_additive:
                skipped.append((l, "shared additive prime"))
            else:
                skipped.append((l, "auxiliary-condition prime"))
            continue
        if l == p and not params.include_l_equals_p:
            skipped.append((l, "l = p excluded by configuration"))
            continue
        a1v, a2v = trace(1, l), trace(2, l)
        if (a1v - a2v) % p != 0:
            return finish(
                Verdict.NOT_CONGRUENT,
                checked=checked,
                skipped=skipped,
                aux=aux_rows,
                witness=Witness(l, a1v, a2v, "trace"),
            )
        checked += 1

    certs: tuple = (None, None)
    verdict = Verdict.CONGRUENT_SEMISIMPLIFICATIONS
    if p >= 5:
        try:
            certs = (
                irreducibility_certificate(mm1, p),
                irreducibility_certificate(mm2, p),
            )
        except UnsupportedPrimeError:
            certs = (None, None)
        if certs[0] is not None and certs[1] is not None:
            verdict = Verdict.ISOMORPHIC_MODULES
    return finish(verdict, checked=checked, skipped=skipped, aux=aux_rows, certs=certs)


def certify_non_isogenous(
    m1: WeierstrassModel, m2: WeierstrassModel, bound: int
) -> int | None:
    """Smallest shared good prime l <= bound with a_l(m1) != a_l(m2) as integers.

    A single unequal integer trace rules out an isogeny; None means the
    search was inconclusive, never that the curves are isogenous.
    """
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    mm1, mm2 = minimal_model(m1)[0], minimal_model(m2)[0]
    from .model import invariants

    d1, d2 = invariants(mm1).disc, invariants(mm2).disc
    for l in primes_upto(bound):
        if d1 % l == 0 or d2 % l == 0:
            continue
        if ap(mm1, l) != ap(mm2, l):
            return l
    return None

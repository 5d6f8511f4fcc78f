"""Traces of Frobenius a_l for all primes, with a persistent per-curve cache.

Good primes are counted either by the quadratic-character sum over x
(one residue table of size l, one accumulation pass) or, above a size
threshold, by baby-step giant-step group-order search in the Hasse
interval.  Bad primes follow the usual conventions: +1 split, -1
nonsplit, 0 additive.
"""

from __future__ import annotations

import functools
import hashlib
import os
import random
import tempfile
from dataclasses import dataclass
from math import isqrt
from pathlib import Path

from .arith import legendre, primes_upto, sqrt_mod
from .localdata import ReductionKind, tate_reduction
from .model import WeierstrassModel, invariants, minimal_model

__all__ = [
    "ApTable",
    "ApCache",
    "WrongDispatchError",
    "CacheIntegrityError",
    "BSGS_THRESHOLD",
    "ap_good",
    "ap_good_bsgs",
    "ap",
    "ap_table",
    "curve_key",
]

# ap() counts naively up to here; the whole published check range sits far
# below, so BSGS only matters for scan-scale experiments.
BSGS_THRESHOLD = 1 << 16

# ap_good_bsgs falls back to direct counting below this.
_BSGS_SMALL = 256


class WrongDispatchError(ValueError):
    """A good-reduction counter was asked about a bad prime (or vice versa)."""


class CacheIntegrityError(ValueError):
    """A cache file disagrees with its curve or violates the Hasse bound."""


@functools.lru_cache(maxsize=None)
def _minimize(m: WeierstrassModel) -> WeierstrassModel:
    return minimal_model(m)[0]


def curve_key(m: WeierstrassModel) -> str:
    """Hex digest identifying the curve by its minimal coefficients."""
    return hashlib.sha256(str(_minimize(m)).encode("ascii")).hexdigest()


def _check_hasse(l: int, a: int, origin: str) -> None:
    if a * a > 4 * l:
        raise CacheIntegrityError(
            f"{origin}: entry l={l}, a_l={a} violates the Hasse bound"
        )


# ---------------------------------------------------------------------------
# Naive counting.


def _ap_chi_sum(mm: WeierstrassModel, l: int) -> int:
    """a_l = -sum_x chi(4x^3 + b2 x^2 + 2 b4 x + b6) for odd good l."""
    inv = invariants(mm)
    table = bytearray(l)  # chi(v) + 1
    table[0] = 1
    for i in range(1, l):
        table[i * i % l] = 2
    b2, b4, b6 = inv.b2 % l, 2 * inv.b4 % l, inv.b6 % l
    total = 0
    for x in range(l):
        total += table[(((4 * x + b2) * x + b4) * x + b6) % l]
    return l - total


def _count_f2(mm: WeierstrassModel) -> int:
    a1, a2, a3, a4, a6 = mm.ainvs
    n = 1  # infinity
    for x in (0, 1):
        for y in (0, 1):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % 2 == 0:
                n += 1
    return n


def ap_good(m: WeierstrassModel, l: int) -> int:
    """Trace of Frobenius at a prime of good reduction, by direct counting."""
    mm = _minimize(m)
    if invariants(mm).disc % l == 0:
        raise WrongDispatchError(f"{l} divides the minimal discriminant of {mm}")
    if l == 2:
        return 3 - _count_f2(mm)
    a = _ap_chi_sum(mm, l)
    _check_hasse(l, a, "ap_good")
    return a


# ---------------------------------------------------------------------------
# Baby-step giant-step group order in the Hasse interval.


def _pt_add(P, Q, A, l):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % l == 0:
            return None
        slope = (3 * x1 * x1 + A) * pow(2 * y1, -1, l) % l
    else:
        slope = (y2 - y1) * pow(x2 - x1, -1, l) % l
    x3 = (slope * slope - x1 - x2) % l
    return x3, (slope * (x1 - x3) - y1) % l


def _pt_mul(P, k, A, l):
    R = None
    while k:
        if k & 1:
            R = _pt_add(R, P, A, l)
        P = _pt_add(P, P, A, l)
        k >>= 1
    return R


def _random_point(A, B, l, rng):
    while True:
        x = rng.randrange(l)
        rhs = (x * x % l * x + A * x + B) % l
        if rhs == 0:
            return x, 0
        y = sqrt_mod(rhs, l)
        if y is not None:
            return x, y


def _zero_multiples(P, A, l, lo, hi):
    """All k in [lo, hi] with k*P = O, by baby-step giant-step."""
    width = hi - lo
    m = isqrt(width) + 1
    baby = {}
    Q = None
    for j in range(m):
        if Q is None and j > 0:
            # ord(P) = j found outright; zero multiples are its multiples.
            start = lo + (-lo) % j
            return set(range(start, hi + 1, j))
        baby[Q] = j
        Q = _pt_add(Q, P, A, l)
    giant = _pt_mul(P, m, A, l)
    R = _pt_mul(P, lo, A, l)
    found = set()
    for i in range(width // m + 2):
        mirror = None if R is None else (R[0], (-R[1]) % l)
        j = baby.get(mirror)
        if j is not None:
            k = lo + i * m + j
            if lo <= k <= hi and _pt_mul(P, k, A, l) is None:
                found.add(k)
        R = _pt_add(R, giant, A, l)
    return found


def _group_order(mm: WeierstrassModel, l: int) -> int:
    """#E(F_l) for l >= 5 good, via candidate intersection over random points.

    Points are drawn alternately from the curve and its quadratic twist
    (orders tied by N + N_twist = 2l + 2) until one order survives.
    """
    inv = invariants(mm)
    A, B = -27 * inv.c4 % l, -54 * inv.c6 % l
    c = 2
    while legendre(c, l) != -1:
        c += 1
    At = A * c * c % l
    Bt = B * pow(c, 3, l) % l
    s = isqrt(4 * l)
    lo, hi = l + 1 - s, l + 1 + s
    rng = random.Random(f"{mm}|{l}")
    candidates: set[int] | None = None
    for attempt in range(64):
        twisted = attempt % 2 == 1
        Aa, Bb = (At, Bt) if twisted else (A, B)
        P = _random_point(Aa, Bb, l, rng)
        ks = _zero_multiples(P, Aa, l, lo, hi)
        if twisted:
            ks = {2 * l + 2 - k for k in ks}
        candidates = ks if candidates is None else candidates & ks
        if len(candidates) == 1:
            return candidates.pop()
        if not candidates:
            raise RuntimeError(f"internal: group-order candidates vanished at {l}")
    # Exceedingly rare (tiny l with very non-cyclic curve and twist): count.
    return l + 1 - _ap_chi_sum(mm, l)


def ap_good_bsgs(m: WeierstrassModel, l: int) -> int:
    """Trace at a good prime via group-order search; counts below a threshold."""
    mm = _minimize(m)
    if invariants(mm).disc % l == 0:
        raise WrongDispatchError(f"{l} divides the minimal discriminant of {mm}")
    if l < _BSGS_SMALL:
        return ap_good(mm, l)
    a = l + 1 - _group_order(mm, l)
    _check_hasse(l, a, "ap_good_bsgs")
    return a


# ---------------------------------------------------------------------------
# Dispatch and bulk tabulation.


def _ap_bad(mm: WeierstrassModel, l: int) -> int:
    kind = tate_reduction(mm, l).kind
    if kind is ReductionKind.MULTIPLICATIVE_SPLIT:
        return 1
    if kind is ReductionKind.MULTIPLICATIVE_NONSPLIT:
        return -1
    return 0


def ap(m: WeierstrassModel, l: int) -> int:
    """Trace of Frobenius at any prime, with bad-prime conventions."""
    mm = _minimize(m)
    if invariants(mm).disc % l == 0:
        return _ap_bad(mm, l)
    if l > BSGS_THRESHOLD:
        return ap_good_bsgs(mm, l)
    return ap_good(mm, l)


@dataclass(frozen=True)
class ApTable:
    key: str
    ainvs: tuple[int, int, int, int, int]
    values: dict[int, int]

    def __post_init__(self):
        for l, a in self.values.items():
            _check_hasse(l, a, "ApTable")

    def __getitem__(self, l: int) -> int:
        return self.values[l]

    def __contains__(self, l: int) -> bool:
        return l in self.values

    def items(self):
        return sorted(self.values.items())


class ApCache:
    """Directory-backed trace store, one file per curve.

    Layout: <root>/<sha256 of minimal 5-tuple>/ap.tsv, where line 1 repeats
    the 5-tuple verbatim for audit and the rest are "l<TAB>a_l" ascending.
    Writes are atomic (write-then-rename), so concurrent writers can only
    race benignly.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def _file(self, mm: WeierstrassModel) -> Path:
        return self.root / curve_key(mm) / "ap.tsv"

    def load(self, mm: WeierstrassModel) -> dict[int, int]:
        path = self._file(mm)
        if not path.exists():
            return {}
        lines = path.read_text(encoding="ascii").splitlines()
        if not lines or lines[0].strip() != str(mm):
            raise CacheIntegrityError(
                f"{path}: header {lines[0].strip() if lines else '<empty>'!r} "
                f"does not match curve {mm}"
            )
        out: dict[int, int] = {}
        for line in lines[1:]:
            if not line.strip():
                continue
            try:
                l_str, a_str = line.split("\t")
                l, a = int(l_str), int(a_str)
            except ValueError as exc:
                raise CacheIntegrityError(f"{path}: malformed line {line!r}") from exc
            _check_hasse(l, a, str(path))
            out[l] = a
        return out

    def store(self, mm: WeierstrassModel, values: dict[int, int]) -> None:
        path = self._file(mm)
        path.parent.mkdir(parents=True, exist_ok=True)
        body = str(mm) + "\n" + "".join(
            f"{l}\t{a}\n" for l, a in sorted(values.items())
        )
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".ap-")
        try:
            with os.fdopen(fd, "w", encoding="ascii") as handle:
                handle.write(body)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise


def ap_table(
    m: WeierstrassModel, bound: int, cache: ApCache | None = None
) -> ApTable:
    """Traces a_l for all primes l <= bound; cache-backed when a cache is given.

    The result is a pure function of (curve, bound): cached entries only
    save recomputation and are validated on load.
    """
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    mm = _minimize(m)
    disc = invariants(mm).disc
    known = cache.load(mm) if cache is not None else {}
    values: dict[int, int] = {}
    fresh = False
    for l in primes_upto(bound):
        if l in known:
            values[l] = known[l]
            continue
        fresh = True
        values[l] = _ap_bad(mm, l) if disc % l == 0 else (
            ap_good(mm, l) if l <= BSGS_THRESHOLD else ap_good_bsgs(mm, l)
        )
    if cache is not None and fresh:
        cache.store(mm, known | values)
    return ApTable(curve_key(mm), mm.ainvs, values)

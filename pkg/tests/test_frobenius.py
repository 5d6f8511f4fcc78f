import random

import pytest

from congrue.arith import legendre, primes_upto
from congrue.frobenius import (
    ApCache,
    CacheIntegrityError,
    WrongDispatchError,
    ap,
    ap_good,
    ap_good_bsgs,
    ap_table,
    curve_key,
)
from congrue.model import invariants, parse_model, quadratic_twist

E = parse_model("[1,0,0,-8,27]")
E2 = parse_model("[1,0,0,8124402,-11887136703]")


def _count_points(m, l):
    """Brute-force #E(F_l) including infinity; the independent oracle."""
    a1, a2, a3, a4, a6 = m.ainvs
    n = 1
    for x in range(l):
        for y in range(l):
            if (y * y + a1 * x * y + a3 * y - x**3 - a2 * x * x - a4 * x - a6) % l == 0:
                n += 1
    return n


def _good_primes(m, bound):
    disc = invariants(m).disc
    return [l for l in primes_upto(bound) if disc % l]


class TestApGood:
    def test_a2_by_enumeration(self):
        # F_2 points of y^2 + xy = x^3 + 1: (0,1), (1,0), (1,1) and infinity.
        assert _count_points(E, 2) == 4
        assert ap_good(E, 2) == -1

    def test_a13(self):
        assert ap_good(E, 13) == -3
        assert _count_points(E, 13) == 13 + 1 + 3

    def test_wrong_dispatch(self):
        with pytest.raises(WrongDispatchError):
            ap_good(E, 5)
        with pytest.raises(WrongDispatchError):
            ap_good_bsgs(E2, 13)

    def test_counting_identity_up_to_50(self):
        for m in (E, E2):
            for l in _good_primes(m, 50):
                assert ap_good(m, l) == l + 1 - _count_points(m, l)

    def test_hasse_bound(self):
        for m in (E, E2):
            for l in _good_primes(m, 1000):
                a = ap_good(m, l)
                assert a * a <= 4 * l


class TestApBsgs:
    def test_small_prime_fallback(self):
        assert ap_good_bsgs(E, 2) == -1
        assert ap_good_bsgs(E, 13) == -3

    def test_matches_naive_on_samples(self):
        rng = random.Random(20160417)
        pool = [l for l in _good_primes(E, 5000) if l >= 5]
        for l in rng.sample(pool, 50):
            assert ap_good_bsgs(E, l) == ap_good(E, l), l

    def test_matches_naive_for_e2(self):
        rng = random.Random(47775)
        pool = [l for l in _good_primes(E2, 5000) if l >= 5]
        for l in rng.sample(pool, 50):
            assert ap_good_bsgs(E2, l) == ap_good(E2, l), l

    def test_deterministic(self):
        assert ap_good_bsgs(E, 4001) == ap_good_bsgs(E, 4001)

    def test_contiguous_band(self):
        for l in [p for p in primes_upto(400) if p > 256]:
            assert ap_good_bsgs(E, l) == ap_good(E, l)


class TestDispatch:
    def test_bad_prime_conventions(self):
        assert ap(E, 3) == 1  # split multiplicative
        assert ap(E, 5) == 0  # additive
        assert ap(E, 7) == 0
        assert ap(E2, 13) in (1, -1)

    def test_good_prime(self):
        assert ap(E, 13) == -3

    def test_nonminimal_input_minimized(self):
        scaled = parse_model("[2,0,0,-128,1728]")
        assert ap(scaled, 13) == -3
        assert ap(scaled, 2) == -1  # 2 is good for the minimal model

    def test_twist_equivariance(self):
        for d in (-1, 5, -7):
            tw = quadratic_twist(E, d)
            disc_tw = invariants(tw).disc
            for l in primes_upto(200):
                if l == 2 or (2 * d * invariants(E).disc) % l == 0 or disc_tw % l == 0:
                    continue
                assert ap(tw, l) == legendre(d, l) * ap(E, l), (d, l)


class TestApTable:
    def test_small_table(self):
        t = ap_table(E, 10)
        assert t.values == {2: -1, 3: 1, 5: 0, 7: 0}

    def test_includes_13_for_e2(self):
        t = ap_table(E2, 13)
        assert t[13] in (1, -1)

    def test_rejects_tiny_bound(self):
        with pytest.raises(ValueError):
            ap_table(E, 1)

    def test_cache_roundtrip(self, tmp_path):
        cache = ApCache(tmp_path)
        t1 = ap_table(E, 100, cache)
        t2 = ap_table(E, 100, cache)
        assert t1.values == t2.values
        assert (tmp_path / curve_key(E) / "ap.tsv").exists()

    def test_cache_is_transparent(self, tmp_path):
        plain = ap_table(E, 200)
        cached = ap_table(E, 200, ApCache(tmp_path))
        assert plain.values == cached.values
        # growing the bound reuses and extends
        bigger = ap_table(E, 300, ApCache(tmp_path))
        assert {l: a for l, a in bigger.values.items() if l <= 200} == plain.values

    def test_second_call_does_no_counting(self, tmp_path, monkeypatch):
        cache = ApCache(tmp_path)
        expected = ap(E, 97)
        ap_table(E, 100, cache)

        def boom(*args, **kwargs):
            raise AssertionError("counting ran despite warm cache")

        monkeypatch.setattr("congrue.frobenius._ap_chi_sum", boom)
        t = ap_table(E, 100, cache)
        assert t[97] == expected

    def test_cache_header_records_tuple(self, tmp_path):
        cache = ApCache(tmp_path)
        ap_table(E, 20, cache)
        text = (tmp_path / curve_key(E) / "ap.tsv").read_text()
        assert text.splitlines()[0] == "[1,0,0,-8,27]"
        assert "13\t-3" in text

    def test_corrupt_entry_rejected(self, tmp_path):
        cache = ApCache(tmp_path)
        ap_table(E, 20, cache)
        path = tmp_path / curve_key(E) / "ap.tsv"
        lines = path.read_text().splitlines()
        lines[1] = "2\t99"  # violates Hasse at l = 2
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(CacheIntegrityError) as err:
            ap_table(E, 20, cache)
        assert "l=2" in str(err.value)

    def test_wrong_header_rejected(self, tmp_path):
        cache = ApCache(tmp_path)
        ap_table(E, 20, cache)
        path = tmp_path / curve_key(E) / "ap.tsv"
        body = path.read_text().splitlines()
        body[0] = str(E2)
        path.write_text("\n".join(body) + "\n")
        with pytest.raises(CacheIntegrityError):
            ap_table(E, 20, cache)

    def test_keyed_by_minimal_model(self, tmp_path):
        cache = ApCache(tmp_path)
        ap_table(parse_model("[2,0,0,-128,1728]"), 30, cache)
        assert (tmp_path / curve_key(E) / "ap.tsv").exists()
        assert curve_key(parse_model("[2,0,0,-128,1728]")) == curve_key(E)

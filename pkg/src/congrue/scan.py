"""Dataset scanning: find congruent non-isogenous pairs and twist orbits.

Input datasets are CSV files with header "label,a1,a2,a3,a4,a6" and an
optional trailing "conductor" column, which is cross-checked against the
computed conductor rather than trusted.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass
from pathlib import Path

from .arith import primes_upto
from .congruence import (
    CongruenceParams,
    CongruenceReport,
    Verdict,
    certify_non_isogenous,
    verify_congruence,
)
from .frobenius import ap
from .localdata import conductor
from .model import (
    SingularModelError,
    WeierstrassModel,
    invariants,
    is_quadratic_twist,
    minimal_model,
)

__all__ = [
    "CurveRecord",
    "PairReport",
    "DatasetError",
    "load_curves",
    "fingerprint",
    "probe_primes",
    "find_congruent_pairs",
    "scan_records",
    "twist_orbits",
]

PROBE_COUNT = 25


class DatasetError(ValueError):
    """A dataset file failed validation; message carries line or label."""


@dataclass(frozen=True)
class CurveRecord:
    label: str
    model: WeierstrassModel
    conductor: int


@dataclass(frozen=True)
class PairReport:
    """A confirmed congruent, provably non-isogenous pair."""

    labels: tuple[str, str]
    p: int
    report: CongruenceReport
    non_isogeny_witness: int
    twist_orbit: str

    def to_json_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "p": self.p,
            "non_isogeny_witness": self.non_isogeny_witness,
            "twist_orbit": self.twist_orbit,
            "report": self.report.to_json_dict(),
        }


_HEADER = ["label", "a1", "a2", "a3", "a4", "a6"]


def load_curves(path: str | Path) -> list[CurveRecord]:
    """Read and validate a curve dataset.

    Every row is re-derived: the model must be nonsingular, labels unique,
    and a conductor column (when present) must equal the computed value.
    Errors carry the offending line number or label.
    """
    path = Path(path)
    records: list[CurveRecord] = []
    seen: set[str] = set()
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        rows = [(i + 1, row) for i, row in enumerate(reader) if row]
    if not rows:
        return records
    header_line, header = rows[0]
    header = [cell.strip() for cell in header]
    if header != _HEADER and header != _HEADER + ["conductor"]:
        raise DatasetError(f"line {header_line}: unrecognized header {header}")
    has_conductor = len(header) == 7
    for line, row in rows[1:]:
        if len(row) != len(header):
            raise DatasetError(f"line {line}: expected {len(header)} fields, got {len(row)}")
        label = row[0].strip()
        if not label:
            raise DatasetError(f"line {line}: empty label")
        if label in seen:
            raise DatasetError(f"line {line}: duplicate label {label!r}")
        try:
            coeffs = [int(cell) for cell in row[1:6]]
        except ValueError as exc:
            raise DatasetError(f"line {line}: non-integer coefficient") from exc
        try:
            model = WeierstrassModel(*coeffs)
        except SingularModelError as exc:
            raise DatasetError(f"line {line}: singular model") from exc
        computed = conductor(minimal_model(model)[0])
        if has_conductor:
            try:
                stated = int(row[6])
            except ValueError as exc:
                raise DatasetError(f"line {line}: non-integer conductor") from exc
            if stated != computed:
                raise DatasetError(
                    f"label {label!r}: stated conductor {stated} != computed {computed}"
                )
        seen.add(label)
        records.append(CurveRecord(label, model, computed))
    return records


def probe_primes(model: WeierstrassModel, count: int = PROBE_COUNT) -> list[int]:
    """The first `count` primes of good reduction for the curve."""
    disc = invariants(minimal_model(model)[0]).disc
    out: list[int] = []
    bound = 256
    while len(out) < count:
        out = [l for l in primes_upto(bound) if disc % l][:count]
        bound *= 2
    return out


def _trace_vector(model: WeierstrassModel, p: int, probes) -> dict[int, int]:
    disc = invariants(minimal_model(model)[0]).disc
    return {l: ap(model, l) % p for l in probes if disc % l}


def fingerprint(rec: CurveRecord, p: int, probes) -> str:
    """Deterministic digest of (a_l mod p) over the usable probe primes.

    Probes at which the curve has bad reduction are dropped, so congruent
    curves always agree on the digest over shared good probes.
    """
    vec = _trace_vector(rec.model, p, probes)
    canon = f"p={p}|" + ",".join(f"{l}:{vec[l]}" for l in sorted(vec))
    return hashlib.sha256(canon.encode("ascii")).hexdigest()


def twist_orbits(records) -> list[list[CurveRecord]]:
    """Partition records into quadratic-twist classes.

    Classes are sorted by their representative (smallest label), members by
    label.  Curves with j in {0, 1728} are never merged (their twist
    relation is ambiguous under this test) and appear as singletons.
    """
    records = sorted(records, key=lambda r: r.label)
    parent = list(range(len(records)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            if find(i) == find(j):
                continue
            if isinstance(is_quadratic_twist(records[i].model, records[j].model), int):
                parent[find(j)] = find(i)
    groups: dict[int, list[CurveRecord]] = {}
    for i, rec in enumerate(records):
        groups.setdefault(find(i), []).append(rec)
    return sorted(groups.values(), key=lambda grp: grp[0].label)


def _orbit_rep(records) -> dict[str, str]:
    reps: dict[str, str] = {}
    for orbit in twist_orbits(records):
        rep = orbit[0].label
        for rec in orbit:
            reps[rec.label] = rep
    return reps


def scan_records(
    records,
    p: int,
    params: CongruenceParams | None = None,
    probe_count: int = PROBE_COUNT,
) -> tuple[list[PairReport], list[dict]]:
    """Search all pairs for mod-p congruences; return (pairs, excluded).

    Pipeline per pair, cheapest first: probe-vector agreement on the
    shared good probes, then an integer-trace non-isogeny witness, then the
    full verifier.  Pairs whose congruence verifies but where no witness
    separates the curves are returned in `excluded` as possibly isogenous,
    never as discoveries.
    """
    if params is None:
        params = CongruenceParams(p=p)
    records = sorted(records, key=lambda r: r.label)
    vectors = {
        rec.label: _trace_vector(rec.model, p, probe_primes(rec.model, probe_count))
        for rec in records
    }
    reps = _orbit_rep(records)
    pairs: list[PairReport] = []
    excluded: list[dict] = []
    for i in range(len(records)):
        for j in range(i + 1, len(records)):
            a, b = records[i], records[j]
            va, vb = vectors[a.label], vectors[b.label]
            common = sorted(set(va) & set(vb))
            if any(va[l] != vb[l] for l in common):
                continue
            probe_bound = max(set(va) | set(vb))
            witness = certify_non_isogenous(a.model, b.model, probe_bound)
            if witness is None:
                excluded.append(
                    {
                        "labels": [a.label, b.label],
                        "reason": f"possibly isogenous: traces equal up to {probe_bound}",
                    }
                )
                continue
            report = verify_congruence(a.model, b.model, params)
            if report.verdict in (
                Verdict.ISOMORPHIC_MODULES,
                Verdict.CONGRUENT_SEMISIMPLIFICATIONS,
            ):
                orbit = "|".join(sorted((reps[a.label], reps[b.label])))
                pairs.append(
                    PairReport(
                        labels=(a.label, b.label),
                        p=p,
                        report=report,
                        non_isogeny_witness=witness,
                        twist_orbit=orbit,
                    )
                )
    return pairs, excluded


def find_congruent_pairs(
    records,
    p: int,
    params: CongruenceParams | None = None,
    probe_count: int = PROBE_COUNT,
) -> list[PairReport]:
    """Confirmed congruent non-isogenous pairs, ordered by label pair."""
    return scan_records(records, p, params, probe_count)[0]

"""Exact verification of mod-p congruences between rational elliptic curves.

The package decides whether two curves over Q have p-torsion Galois modules
with isomorphic semisimplifications by comparing traces of Frobenius up to
a Sturm-type bound, certifies irreducibility through local component
groups, refutes isogenies with integer trace witnesses, and scans curve
datasets for congruent pairs and their quadratic-twist orbits.
"""

from .arith import legendre, primes_upto, valuation
from .congruence import (
    BoundPolicy,
    CongruenceParams,
    CongruenceReport,
    Verdict,
    Witness,
    aux_condition,
    certify_non_isogenous,
    congruence_level,
    psi_index,
    sturm_bound,
    verify_congruence,
)
from .frobenius import ApCache, ApTable, ap, ap_good, ap_good_bsgs, ap_table
from .localdata import (
    IrreducibilityCertificate,
    LocalData,
    ReductionKind,
    bad_primes,
    conductor,
    irreducibility_certificate,
    phi_order,
    reduction_type,
)
from .model import (
    Invariants,
    Transformation,
    WeierstrassModel,
    invariants,
    is_quadratic_twist,
    minimal_model,
    parse_model,
    quadratic_twist,
)
from .scan import (
    CurveRecord,
    PairReport,
    find_congruent_pairs,
    fingerprint,
    load_curves,
    scan_records,
    twist_orbits,
)

__version__ = "0.1.0"

__all__ = [
    "legendre",
    "primes_upto",
    "valuation",
    "WeierstrassModel",
    "Invariants",
    "Transformation",
    "parse_model",
    "invariants",
    "minimal_model",
    "quadratic_twist",
    "is_quadratic_twist",
    "ReductionKind",
    "LocalData",
    "IrreducibilityCertificate",
    "reduction_type",
    "bad_primes",
    "conductor",
    "phi_order",
    "irreducibility_certificate",
    "ApTable",
    "ApCache",
    "ap",
    "ap_good",
    "ap_good_bsgs",
    "ap_table",
    "BoundPolicy",
    "CongruenceParams",
    "CongruenceReport",
    "Verdict",
    "Witness",
    "congruence_level",
    "sturm_bound",
    "psi_index",
    "aux_condition",
    "verify_congruence",
    "certify_non_isogenous",
    "CurveRecord",
    "PairReport",
    "load_curves",
    "fingerprint",
    "find_congruent_pairs",
    "scan_records",
    "twist_orbits",
    "__version__",
]

"""Python access to the cps core: HF universes, machine runs, PFP lockstep, supports,
symmetric fragments and pebble games."""

from ._cps import (
    BudgetExceeded,
    DynamicError,
    Error,
    Fragment,
    InputDependence,
    Machine,
    NoSmallSupport,
    NotKSymmetric,
    ParseError,
    Universe,
    ValidationError,
    in_eq_identical,
    lockstep,
    run,
    sample,
    smallest_binomial_n,
    solve,
    support_report,
    verify,
)

__version__ = "0.1.0"


def load_machine(path):
    with open(path) as f:
        return Machine(f.read())

from ._dnlslab import (
    CubicSystem,
    MassVector,
    check_conditions,
    coupled_derivative,
    dnls_single,
    kms_verify,
    load_model,
    null_structure_three,
    simulate,
    single_nls,
    two_component,
    version,
)

__all__ = [
    "CubicSystem",
    "MassVector",
    "check_conditions",
    "coupled_derivative",
    "dnls_single",
    "kms_verify",
    "load_model",
    "null_structure_three",
    "simulate",
    "single_nls",
    "two_component",
    "version",
]

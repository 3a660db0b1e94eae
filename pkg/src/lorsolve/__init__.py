"""Neumann-series solutions of weighted composition equations in Lorentz
spaces, with machine-checkable contraction audits and a-posteriori error
certificates.

The package solves

    phi = sum_n g_n * (phi o f_n) + h0

by summing the series sum_m P^m h0 for the transfer-type operator
P phi = sum_n g_n * (phi o f_n), on piecewise-constant functions over
finite unions of boxes.  Everything is built on a Lorentz norm engine
whose three independent computation routes cross-check each other, and
every solve carries an explicit geometric tail bound as its error
certificate.

Layers, bottom up:

``young``        Young functions, the tau transform, admissibility checks
``grids``        domains, sampled step functions, rearrangements
``maps``         piecewise monotone maps, indicatrix counts,
                 change-of-variables checks
``norms``        Lorentz / Orlicz norms, axiom and Fatou suites
``transfer``     problem instances, the operator P, contraction audits
``solve``        series summation, stopping certificates, uniqueness probes
``expressions``  tiny arithmetic expression language for config files
``config``       INI instance files and the bundled examples
``cli``          the ``lorsolve`` command
"""

from .config import (
    BUNDLED_INSTANCES,
    ConfigError,
    bundled_instance_path,
    load_config,
    load_instance,
)
from .expressions import ExpressionError, compile_expression
from .grids import (
    Domain,
    GridError,
    SampledFn,
    StepDistribution,
    StepFn,
    distribution,
    pointwise_norm,
    rearrangement,
)
from .maps import (
    Branch,
    CovReport,
    IndicatrixCount,
    MapError,
    PiecewiseMap,
    TensorMap,
    affine_map,
    banach_indicatrix,
    change_of_variables_check,
    doubling_map,
    halving_map,
    identity_map,
    indicatrix_profile,
    tent3_map,
)
from .norms import (
    ROUTES,
    AxiomReport,
    BridgeReport,
    FatouReport,
    LuxemburgBracketError,
    NormError,
    NormValue,
    axiom_suite,
    check_orlicz_lorentz_bridge,
    default_test_sets,
    fatou_check,
    lorentz_norm,
    lorentz_norm_vector,
    luxemburg_norm,
    orlicz_modular,
    seeded_corpus,
)
from .solve import (
    DivergenceError,
    IterationTrace,
    TraceRow,
    UniquenessReport,
    residual,
    solve_elementary,
    uniqueness_probe,
)
from .transfer import (
    AuditFailure,
    AuditReport,
    InstanceError,
    OverlapEstimate,
    ProblemInstance,
    apply_P,
    audit_contraction,
    estimate_multiplicity,
    estimate_overlap_L,
)
from .young import (
    Delta2Report,
    NFnReport,
    ProbeReport,
    TauFn,
    YoungFn,
    YoungFnError,
    check_delta2,
    check_n_function,
    derive_tau,
    monomial_young,
    power_young,
    validate_tau,
    validate_young,
    young_family,
)

__version__ = "0.1.0"

__all__ = [
    "AuditFailure",
    "AuditReport",
    "AxiomReport",
    "BUNDLED_INSTANCES",
    "Branch",
    "BridgeReport",
    "ConfigError",
    "CovReport",
    "Delta2Report",
    "DivergenceError",
    "Domain",
    "ExpressionError",
    "FatouReport",
    "GridError",
    "IndicatrixCount",
    "InstanceError",
    "IterationTrace",
    "LuxemburgBracketError",
    "MapError",
    "NFnReport",
    "NormError",
    "NormValue",
    "OverlapEstimate",
    "PiecewiseMap",
    "ProbeReport",
    "ProblemInstance",
    "ROUTES",
    "SampledFn",
    "StepDistribution",
    "StepFn",
    "TauFn",
    "TensorMap",
    "TraceRow",
    "UniquenessReport",
    "YoungFn",
    "YoungFnError",
    "affine_map",
    "apply_P",
    "audit_contraction",
    "axiom_suite",
    "banach_indicatrix",
    "bundled_instance_path",
    "change_of_variables_check",
    "check_delta2",
    "check_n_function",
    "check_orlicz_lorentz_bridge",
    "compile_expression",
    "default_test_sets",
    "derive_tau",
    "distribution",
    "doubling_map",
    "fatou_check",
    "halving_map",
    "identity_map",
    "indicatrix_profile",
    "load_config",
    "load_instance",
    "lorentz_norm",
    "lorentz_norm_vector",
    "luxemburg_norm",
    "monomial_young",
    "orlicz_modular",
    "pointwise_norm",
    "power_young",
    "rearrangement",
    "residual",
    "seeded_corpus",
    "solve_elementary",
    "tent3_map",
    "uniqueness_probe",
    "validate_tau",
    "validate_young",
    "young_family",
    "__version__",
]

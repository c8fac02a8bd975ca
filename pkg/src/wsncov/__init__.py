"""Coverage and connectivity analysis for randomly deployed wireless sensor networks.

Analytic coverage fractions for Boolean, Elfes and log-normal shadow-fading
sensing, a shadowed link model, and a Monte Carlo deployment simulator that
checks them.
"""

from .coverage import (
    CoverageResult,
    DeploymentConfig,
    Region,
    coverage_for_model,
    coverage_from_pdet,
    elfes_coverage_approx,
    elfes_pdet_approx,
    elfes_pdet_exact,
    elfes_pdet_quadrature,
    shadow_confidence_radius,
    shadow_pdet_closed_form,
    shadow_pdet_quadrature,
    single_node_detection_boolean,
)
from .errors import ConfigurationError, ConvergenceError, DomainError
from .link import LinkModel, RadioParams, link_probability, range_from_budget, sample_link
from .numerics import QuadratureSpec, RngStream, integrate, make_stream, q_function, q_inverse
from .sensing import (
    BooleanSensing,
    ElfesSensing,
    SensingBudget,
    ShadowFadingSensing,
    detection_probability,
    sample_detection,
    sensing_range_from_budget,
)
from .simulator import (
    Deployment,
    EmpiricalEstimate,
    TrialPlan,
    deploy,
    estimate_coverage,
    estimate_link_rate,
    network_link_census,
)

__version__ = "0.1.0"

"""Exception hierarchy shared by all modules.

Every error carries a stable ``code`` so the CLI can emit machine-readable
failures and choose the exit status without inspecting messages.
"""


class AHOError(Exception):
    """Base class for numerical or domain failures (CLI exit status 1)."""

    code = "module_error"


class PotentialError(AHOError):
    code = "potential_error"


class EmptyCoefficients(PotentialError):
    code = "empty_coefficients"


class NonConfining(PotentialError):
    code = "non_confining"


class NegativeProfile(PotentialError):
    code = "negative_profile"


class DegenerateMinima(PotentialError):
    code = "degenerate_minima"


class NotNormalized(AHOError):
    code = "not_normalized"


class Overflow(AHOError):
    code = "overflow"


class MissingEps(AHOError):
    code = "missing_eps"


class OriginSingularity(AHOError):
    code = "origin_singularity"


class CutoffRequired(AHOError):
    code = "cutoff_required"


class NonPolynomial(AHOError):
    code = "non_polynomial"


class PotentialZeroInside(AHOError):
    code = "potential_zero_inside"


class StiffnessBudgetExceeded(AHOError):
    code = "stiffness_budget_exceeded"


class BoxTooSmall(AHOError):
    code = "box_too_small"


class NonPositiveB(AHOError):
    code = "non_positive_b"


class InconsistentConstraints(AHOError):
    code = "inconsistent_constraints"


class SingularGram(AHOError):
    code = "singular_gram"


class QuadratureFailure(AHOError):
    code = "quadrature_failure"


class NoConvergence(AHOError):
    code = "no_convergence"


class BracketFailure(AHOError):
    code = "bracket_failure"


class ConfigParse(Exception):
    """Bad command-line or configuration input (CLI exit status 2)."""

    code = "config_parse"

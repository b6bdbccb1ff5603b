"""Exception types raised by the library.

Every domain failure maps to one class here so the CLI can translate
exceptions into exit codes (1 = domain error, 2 = bound/acceptance failure).
"""


class MorseActionsError(Exception):
    """Base class for all library errors."""


# --- potential_core ---

class ParamOutOfBox(MorseActionsError):
    """Parameter point lies outside the potential's parameter box."""


class WidthExceedsAnalyticity(MorseActionsError):
    """Requested norm width s exceeds the stored analyticity width s0."""


# --- morse_analysis ---

class DegenerateCriticalPoint(MorseActionsError):
    """A critical point has |F''| below the degeneracy tolerance."""


class NonDistinctCriticalValues(MorseActionsError):
    """Two critical energies coincide within tolerance."""


class NoCriticalPoints(MorseActionsError):
    """The potential is constant (no critical points)."""


class ContinuationDiverged(MorseActionsError):
    """Newton continuation left the allowed ball around the seed."""


class ExtraCriticalPoint(MorseActionsError):
    """Completeness scan found an unmatched zero of the derivative."""


class EnergyOutOfBranch(MorseActionsError):
    """Energy outside the open energy interval of a monotone branch."""


class TooCloseToSeparatrix(MorseActionsError):
    """sqrt-factor argument implies an energy outside the branch window."""


# --- standard_form ---

class ContractionFailed(MorseActionsError):
    """A fixed-point iteration failed to contract."""


class BoundViolated(MorseActionsError):
    """A quantitative bound that must hold for admissible inputs failed."""

    def __init__(self, which, detail=""):
        self.which = which
        super().__init__(f"bound violated: {which}" + (f" ({detail})" if detail else ""))


class NegativeRadicand(MorseActionsError):
    """1 + b has nonpositive real part (input out of hypothesis)."""


# --- action_integrals ---

class R0TooSmall(MorseActionsError):
    """R0 < 2*sqrt(M); rotational windows would be empty."""


class EnergyOutOfWindow(MorseActionsError):
    """Energy outside the open window of a phase-space region."""


class QuadratureStalled(MorseActionsError):
    """Refinement failed to converge within the doubling budget."""


# --- singularity_analysis ---

class WindowTooSmall(MorseActionsError):
    """Fewer than the minimum number of sample points fit inside the radius."""


class IllConditioned(MorseActionsError):
    """Least-squares normal equations condition number too large."""


class AnalyticityViolated(MorseActionsError):
    """Well-bottom polynomial fit shows a detectable log component."""


# --- energy_inversion ---

class ActionOutOfDomain(MorseActionsError):
    """Action value outside the inversion domain."""


class NewtonStalled(MorseActionsError):
    """Bracketed Newton and the bisection fallback both stalled."""


# --- cosine_oracle ---

class EnergyOutOfRange(MorseActionsError):
    """Energy outside the validity interval of a reference formula."""


# --- cli_io ---

class ParseError(MorseActionsError):
    """Malformed input file."""


class SchemaError(MorseActionsError):
    """Structurally valid file with an invalid or unknown field."""

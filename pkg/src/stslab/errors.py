"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration values, or unknown config keys."""


class InfeasiblePrimaryConstraint(RuntimeError):
    """The primary outage constraint cannot be met even with zero secondary power.

    Carries the zero-interference baseline outage so callers can report how far
    the constraint was missed.
    """

    def __init__(self, baseline_outage: float, phi: float):
        self.baseline_outage = baseline_outage
        self.phi = phi
        super().__init__(
            f"primary outage {baseline_outage:.6g} at zero secondary power "
            f"already exceeds the constraint phi={phi:.6g}"
        )


class DegenerateDenominator(ValueError):
    """SINR denominator (interference power + noise) is exactly zero."""


class SubsetBudgetExceeded(ValueError):
    """Subset-decomposed SOP requested for K > 12 (more than 4096 subsets)."""


class ParseError(ValueError):
    """Malformed dataset or config file; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(ParseError):
    """Structurally valid file whose shape disagrees with its own header."""


class EmptyDataset(ValueError):
    """A learner was asked to train on zero samples."""


class ShapeMismatch(ValueError):
    """Parameter and gradient (or state) shapes disagree."""


class DivergedLoss(RuntimeError):
    """Training loss became non-finite."""


class NonDifferentiableVariant(TypeError):
    """Gradient check requested for a model without analytic gradients."""


class KMismatch(ValueError):
    """A model and a dataset disagree on the number of transmitters."""


class UnknownScheme(ValueError):
    """Complexity/overhead estimate requested for an unknown scheme name."""

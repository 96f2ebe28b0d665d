"""Leading-order prediction complexity and feedback overhead per scheme."""

from __future__ import annotations

from .errors import UnknownScheme

LEARNING_SCHEMES = ("lstm", "dnn", "svm", "knn", "nb")


def lstm_parameter_budget(n_c: int = 100, n_i: int = 4, n_o: int = 5) -> int:
    """W = 4*n_c^2 + 4*n_i*n_c + n_c*n_o + 3*n_c (one memory cell per block,
    biases excluded)."""
    return 4 * n_c * n_c + 4 * n_i * n_c + n_c * n_o + 3 * n_c


def complexity_estimate(scheme: str, k: int, n_c: int = 100, n_i: int = 4,
                        n_o: int | None = None, l1: int = 256, l2: int = 128) -> int:
    """Operation count at prediction time; N = 4K features."""
    if k < 1 or n_c < 1 or n_i < 1 or l1 < 1 or l2 < 1 or (n_o is not None and n_o < 1):
        raise ValueError("all size arguments must be positive")
    n = 4 * k
    scheme = scheme.lower()
    if scheme == "lstm":
        return k * lstm_parameter_budget(n_c, n_i, k + 1 if n_o is None else n_o)
    if scheme == "dnn":
        return n * l1 + l1 * l2 + l2 * k
    if scheme == "svm":
        return n * n
    if scheme == "knn":
        return n
    if scheme == "nb":
        return (k + 1) * n + k
    if scheme == "conventional":
        return k
    raise UnknownScheme(f"unknown scheme {scheme!r}")


def feedback_overhead(scheme: str, k: int) -> int:
    """Real values fed back per selection: complex coefficients (2x) for the
    conventional scheme, magnitudes only (1x) for every learning scheme."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scheme = scheme.lower()
    if scheme == "conventional":
        return 2 * 4 * k
    if scheme in LEARNING_SCHEMES:
        return 4 * k
    raise UnknownScheme(f"unknown scheme {scheme!r}")

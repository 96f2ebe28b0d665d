"""One-vs-rest soft-margin SVM with an RBF kernel, trained by simplified SMO.

All binary problems share one seeded subsample (cap tc.svm_subsample) so the
kernel matrix is computed once. The SMO budget is tc.svm_max_passes full passes
over the subsample; a run whose last pass still changed multipliers is flagged
NonConvergence but the model remains usable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..config import TrainConfig
from ..errors import EmptyDataset

KERNEL_CHUNK = 4096
MIN_ALPHA_STEP = 1e-5


@dataclass
class SvmModel:
    support_x: np.ndarray       # (s, d) union of support vectors
    coef: np.ndarray            # (s, C) alpha_i * y_i per class, 0 for non-SV
    bias: np.ndarray            # (C,)
    gamma: float
    reachable: np.ndarray       # (C,) bool; degenerate one-sided problems are not
    converged: np.ndarray       # (C,) bool per binary problem
    n_classes: int

    @property
    def non_convergence(self) -> bool:
        return bool(np.any(~self.converged[self.reachable]))


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    d2 = ((a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :]
          - 2.0 * (a @ b.T))
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def _smo(kernel: np.ndarray, y: np.ndarray, c_box: float, tol: float,
         max_passes: int, rng: np.random.Generator) -> tuple[np.ndarray, float, bool]:
    """Simplified SMO on a precomputed kernel; returns (alpha, b, converged)."""
    n = y.shape[0]
    alpha = np.zeros(n)
    ay = np.zeros(n)  # alpha * y, kept in sync
    b = 0.0
    diag = np.diagonal(kernel)
    converged = False
    for _ in range(max_passes):
        changed = 0
        for i in range(n):
            e_i = float(ay @ kernel[i]) + b - y[i]
            if not ((y[i] * e_i < -tol and alpha[i] < c_box)
                    or (y[i] * e_i > tol and alpha[i] > 0.0)):
                continue
            j = int(rng.integers(n - 1))
            if j >= i:
                j += 1
            e_j = float(ay @ kernel[j]) + b - y[j]
            a_i_old, a_j_old = alpha[i], alpha[j]
            if y[i] != y[j]:
                low = max(0.0, a_j_old - a_i_old)
                high = min(c_box, c_box + a_j_old - a_i_old)
            else:
                low = max(0.0, a_i_old + a_j_old - c_box)
                high = min(c_box, a_i_old + a_j_old)
            if low == high:
                continue
            eta = 2.0 * kernel[i, j] - diag[i] - diag[j]
            if eta >= 0.0:
                continue
            a_j = min(max(a_j_old - y[j] * (e_i - e_j) / eta, low), high)
            if abs(a_j - a_j_old) < MIN_ALPHA_STEP:
                continue
            a_i = a_i_old + y[i] * y[j] * (a_j_old - a_j)
            b1 = b - e_i - y[i] * (a_i - a_i_old) * diag[i] - y[j] * (a_j - a_j_old) * kernel[i, j]
            b2 = b - e_j - y[i] * (a_i - a_i_old) * kernel[i, j] - y[j] * (a_j - a_j_old) * diag[j]
            if 0.0 < a_i < c_box:
                b = b1
            elif 0.0 < a_j < c_box:
                b = b2
            else:
                b = 0.5 * (b1 + b2)
            alpha[i], alpha[j] = a_i, a_j
            ay[i], ay[j] = a_i * y[i], a_j * y[j]
            changed += 1
        if changed == 0:
            converged = True
            break
    return alpha, b, converged


def train_svm(x: np.ndarray, y_idx: np.ndarray, n_classes: int, tc: TrainConfig) -> SvmModel:
    x = np.asarray(x, dtype=float)
    y_idx = np.asarray(y_idx)
    n = x.shape[0]
    if n == 0:
        raise EmptyDataset("cannot train SVM on zero samples")
    rng = np.random.default_rng(tc.seed)
    if n > tc.svm_subsample:
        picked = np.sort(rng.choice(n, tc.svm_subsample, replace=False))
        x_sub, y_sub = x[picked], y_idx[picked]
    else:
        x_sub, y_sub = x, y_idx
    gamma = tc.svm_gamma if tc.svm_gamma is not None else 1.0 / x.shape[1]
    kernel = rbf_kernel(x_sub, x_sub, gamma)

    m = x_sub.shape[0]
    coef = np.zeros((m, n_classes))
    bias = np.zeros(n_classes)
    reachable = np.zeros(n_classes, dtype=bool)
    converged = np.ones(n_classes, dtype=bool)
    for c in range(n_classes):
        y_bin = np.where(y_sub == c, 1.0, -1.0)
        if np.all(y_bin == y_bin[0]):
            # one-sided problem: no margin to optimize
            reachable[c] = bool(y_bin[0] == 1.0)
            bias[c] = np.inf if reachable[c] else -np.inf
            continue
        alpha, b, ok = _smo(kernel, y_bin, tc.svm_c, tc.svm_tol, tc.svm_max_passes, rng)
        coef[:, c] = alpha * y_bin
        bias[c] = b
        reachable[c] = True
        converged[c] = ok

    keep = np.any(coef != 0.0, axis=1)
    if not keep.any():
        keep[:1] = True  # degenerate but keeps prediction well-defined
    return SvmModel(support_x=x_sub[keep], coef=coef[keep], bias=bias, gamma=gamma,
                    reachable=reachable, converged=converged, n_classes=n_classes)


def svm_decision_values(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """(n, C) one-vs-rest decision values."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    out = np.empty((x.shape[0], model.n_classes))
    for start in range(0, x.shape[0], KERNEL_CHUNK):
        q = x[start:start + KERNEL_CHUNK]
        k_q = rbf_kernel(q, model.support_x, model.gamma)
        out[start:start + KERNEL_CHUNK] = k_q @ model.coef + model.bias
    return out


def predict_svm(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """0-based class indices: argmax of decision values."""
    return np.argmax(svm_decision_values(model, x), axis=1)

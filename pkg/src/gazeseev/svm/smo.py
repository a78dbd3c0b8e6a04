"""Binary soft-margin SVM trained by sequential minimal optimization.

The solver follows Platt's two-loop scheme: the outer loop alternates between
sweeps over every example and sweeps over the non-bound examples, and the
second multiplier of each pair is chosen to maximise ``|E_i - E_j|``, with
sweeps over non-bound and then all examples as fallbacks.  Errors are cached
for every example and updated incrementally after each step.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .kernel import kernel_matrix

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 10


@dataclass(frozen=True)
class RbfParams:
    c: float
    gamma: float

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"C must be positive, got {self.c}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be positive, got {self.gamma}")


@dataclass(frozen=True)
class BinarySvm:
    """Decision function ``f(x) = sum_i coef_i K(sv_i, x) + bias`` with ``coef_i = alpha_i y_i``."""

    support_points: np.ndarray
    dual_coefficients: np.ndarray
    bias: float
    params: RbfParams

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coefficients)

    def decision_function(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.support_points.shape[1]:
            raise ValueError(f"expected {self.support_points.shape[1]} features, got {points.shape[1]}")
        out = np.empty(points.shape[0])
        step = 4096
        for s in range(0, points.shape[0], step):
            k = kernel_matrix(points[s:s + step], self.support_points, self.params.gamma)
            out[s:s + step] = k @ self.dual_coefficients + self.bias
        return out

    def predict(self, points) -> np.ndarray:
        return np.where(self.decision_function(points) >= 0, 1, -1)


@dataclass
class SmoSolution:
    alpha: np.ndarray
    bias: float
    steps: int
    converged: bool


class _Solver:
    def __init__(self, K, y, c, tol, rng):
        self.K = K
        self.y = y
        self.c = c
        self.tol = tol
        self.rng = rng
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.E = -y.astype(float)  # f = 0 at start
        self.eps = 1e-12
        self.steps = 0

    def _snap(self, a):
        # pin values within rounding distance of a bound onto it
        lim = 1e-12 * self.c
        if a < lim:
            return 0.0
        if a > self.c - lim:
            return self.c
        return a

    def take_step(self, i1, i2) -> bool:
        if i1 == i2:
            return False
        K, y, c = self.K, self.y, self.c
        a1, a2 = self.alpha[i1], self.alpha[i2]
        y1, y2 = y[i1], y[i2]
        E1, E2 = self.E[i1], self.E[i2]
        s = y1 * y2
        if y1 != y2:
            lo, hi = max(0.0, a2 - a1), min(c, c + a2 - a1)
        else:
            lo, hi = max(0.0, a1 + a2 - c), min(c, a1 + a2)
        if lo >= hi:
            return False
        k11, k12, k22 = K[i1, i1], K[i1, i2], K[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0:
            a2n = a2 + y2 * (E1 - E2) / eta
            a2n = min(max(a2n, lo), hi)
        else:
            # degenerate pair (duplicate points): compare the objective at both ends
            f1 = y1 * (E1 - self.b) - a1 * k11 - s * a2 * k12
            f2 = y2 * (E2 - self.b) - s * a1 * k12 - a2 * k22
            l1 = a1 + s * (a2 - lo)
            h1 = a1 + s * (a2 - hi)
            lobj = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12
            hobj = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12
            if lobj < hobj - self.eps:
                a2n = lo
            elif lobj > hobj + self.eps:
                a2n = hi
            else:
                a2n = a2
        a2n = self._snap(a2n)
        if abs(a2n - a2) < self.eps * (a2n + a2 + self.eps):
            return False
        a1n = a1 + s * (a2 - a2n)
        snapped = self._snap(a1n)
        if snapped != a1n:
            a2n = self._snap(min(max(a2 + s * (a1 - snapped), 0.0), c))
            a1n = snapped

        d1 = y1 * (a1n - a1)
        d2 = y2 * (a2n - a2)
        b1 = self.b - E1 - d1 * k11 - d2 * k12
        b2 = self.b - E2 - d1 * k12 - d2 * k22
        if 0 < a1n < c:
            bn = b1
        elif 0 < a2n < c:
            bn = b2
        else:
            bn = 0.5 * (b1 + b2)
        self.E += d1 * K[i1] + d2 * K[i2] + (bn - self.b)
        self.b = bn
        self.alpha[i1] = a1n
        self.alpha[i2] = a2n
        self.steps += 1
        return True

    def violates(self, i) -> bool:
        r = self.E[i] * self.y[i]
        a = self.alpha[i]
        return (r < -self.tol and a < self.c) or (r > self.tol and a > 0)

    def examine(self, i2) -> int:
        if not self.violates(i2):
            return 0
        nonbound = np.flatnonzero((self.alpha > 0) & (self.alpha < self.c))
        if len(nonbound) > 1:
            i1 = int(nonbound[np.argmax(np.abs(self.E[nonbound] - self.E[i2]))])
            if self.take_step(i1, i2):
                return 1
        if len(nonbound):
            start = int(self.rng.integers(len(nonbound)))
            for i1 in np.roll(nonbound, -start):
                if self.take_step(int(i1), i2):
                    return 1
        start = int(self.rng.integers(self.n))
        for k in range(self.n):
            if self.take_step((start + k) % self.n, i2):
                return 1
        return 0

    def _rebias(self):
        """With no free multiplier the pairwise bias rule can leave b outside the
        interval the bound multipliers allow; move it to that interval's midpoint."""
        if ((self.alpha > 0) & (self.alpha < self.c)).any():
            return
        s = self.E + self.y - self.b  # f without the bias
        up = ((self.alpha == 0) & (self.y > 0)) | ((self.alpha == self.c) & (self.y < 0))
        lower = (self.y - s)[up]  # b >= y_i - s_i
        upper = (self.y - s)[~up]  # b <= y_i - s_i
        lo = lower.max() if len(lower) else -math.inf
        hi = upper.min() if len(upper) else math.inf
        if math.isinf(lo) and math.isinf(hi):
            return
        b = hi if math.isinf(lo) else lo if math.isinf(hi) else 0.5 * (lo + hi)
        self.E += b - self.b
        self.b = float(b)

    def run(self, max_passes, max_steps) -> bool:
        examine_all = True
        idle_passes = 0
        while True:
            if self.steps >= max_steps:
                return False
            changed = 0
            if examine_all:
                for i in range(self.n):
                    changed += self.examine(i)
            else:
                for i in np.flatnonzero((self.alpha > 0) & (self.alpha < self.c)):
                    changed += self.examine(int(i))
            if examine_all:
                if changed == 0:
                    # refresh the incrementally updated error cache before trusting it
                    self.E = self.K @ (self.alpha * self.y) + self.b - self.y
                    self._rebias()
                    if not any(self.violates(i) for i in range(self.n)):
                        return True
                    idle_passes += 1
                    if idle_passes >= max_passes:
                        return False
                else:
                    idle_passes = 0
                    examine_all = False
            elif changed == 0:
                examine_all = True


def solve_smo(
    K: np.ndarray,
    y: np.ndarray,
    c: float,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    max_steps: int = 1_000_000,
    seed: int = 0,
) -> SmoSolution:
    """Solve the SVM dual for a precomputed kernel matrix and labels in {-1, +1}."""
    y = np.asarray(y, dtype=float)
    solver = _Solver(np.asarray(K, dtype=float), y, float(c), float(tol), np.random.default_rng(seed))
    converged = solver.run(max_passes, max_steps)
    if not converged:
        log.warning("SMO stopped before reaching KKT tolerance after %d steps", solver.steps)
    return SmoSolution(solver.alpha, solver.b, solver.steps, converged)


def _check_binary_inputs(points, labels):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(labels)
    if len(labels) == 0 or points.size == 0:
        raise ValueError("training data is empty")
    if points.shape[0] != len(labels):
        raise ValueError(f"{points.shape[0]} points but {len(labels)} labels")
    if not np.isin(labels, (-1, 1)).all():
        raise ValueError("binary labels must be -1 or +1")
    if len(np.unique(labels)) < 2:
        raise ValueError("both classes (+1 and -1) must be present")
    return points, labels.astype(float)


def train_binary(
    points,
    labels,
    params: RbfParams,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    kernel: np.ndarray | None = None,
    seed: int = 0,
) -> BinarySvm:
    """Train a two-class RBF SVM.

    ``kernel`` may carry the precomputed Gram matrix of ``points`` (grid search
    reuses distance computations this way).
    """
    points, y = _check_binary_inputs(points, labels)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    K = kernel_matrix(points, points, params.gamma) if kernel is None else kernel
    sol = solve_smo(K, y, params.c, tol, max_passes, seed=seed)
    sv = sol.alpha > 0
    if not sv.any():
        raise RuntimeError("SMO produced no support vectors")
    return BinarySvm(points[sv].copy(), (sol.alpha * y)[sv], float(sol.bias), params)

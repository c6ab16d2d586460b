"""Brute-force reference implementations for validating the closed forms.

Everything here is written for clarity and independence, not speed: the
test suite compares the main-path results (Gram-system solve, weighted
sums, power iteration) against these direct computations. None of the
functions call into the other modules or into library solvers — the
elimination, gradient, and rotation routines are spelled out by hand — so
agreement between the two routes is evidence rather than tautology.

Intended for desk-scale problems only (systems up to about a thousand
unknowns, eigenproblems up to a few hundred).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_PIVOT_TOL = 1e-12
_SYMMETRY_TOL = 1e-9
_JACOBI_SWEEP_CAP = 100
_MAX_SYSTEM = 1024
_MAX_EIGEN = 512


class SingularMatrixError(Exception):
    """Elimination found no usable pivot; the system has no unique solution."""


class NotSymmetricError(Exception):
    """The eigensolver was handed a matrix that is not symmetric."""


@dataclass(frozen=True)
class DenseSystem:
    """A square linear system A x = b held as plain arrays."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"vector length {b.shape} does not match matrix {a.shape}")
        if a.shape[0] > _MAX_SYSTEM:
            raise ValueError(f"system too large for the reference solver: {a.shape[0]}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


def solve_dense(system: DenseSystem) -> np.ndarray:
    """Solve A x = b by Gaussian elimination with partial pivoting.

    Pivots smaller than 1e-12 relative to the largest entry of A are
    treated as zero and raise SingularMatrixError.
    """
    a = system.a.copy()
    b = system.b.copy()
    m = a.shape[0]
    scale = float(np.max(np.abs(a)))
    if scale == 0.0:
        raise SingularMatrixError("all-zero matrix")
    for col in range(m):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot_row, col]) <= _PIVOT_TOL * scale:
            raise SingularMatrixError(f"no usable pivot in column {col}")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
        for row in range(col + 1, m):
            factor = a[row, col] / a[col, col]
            if factor != 0.0:
                a[row, col:] -= factor * a[col, col:]
                b[row] -= factor * b[col]
    x = np.zeros(m)
    for row in range(m - 1, -1, -1):
        x[row] = (b[row] - float(np.dot(a[row, row + 1 :], x[row + 1 :]))) / a[row, row]
    return x


def objective_J(
    d: np.ndarray, rows: np.ndarray, energies: np.ndarray, lam: float
) -> float:
    """J(d) = (lam/2) ||d||^2 + sum_i (d . V_i - e_i)^2, summed term by term."""
    d = np.asarray(d, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.float64)
    energies = np.asarray(energies, dtype=np.float64)
    total = 0.5 * lam * float(np.dot(d, d))
    for i in range(rows.shape[0]):
        residual = float(np.dot(d, rows[i])) - float(energies[i])
        total += residual * residual
    return total


def grad_J(
    d: np.ndarray, rows: np.ndarray, energies: np.ndarray, lam: float
) -> np.ndarray:
    """Analytic gradient lam*d + 2 sum_i (d . V_i - e_i) V_i, by direct summation.

    At d = 0 this is -2 sum_i e_i V_i, i.e. minus twice the weighted frame
    sum — which is why one plain weighted sum equals the first descent step.
    """
    d = np.asarray(d, dtype=np.float64)
    rows = np.asarray(rows, dtype=np.float64)
    energies = np.asarray(energies, dtype=np.float64)
    grad = lam * d.copy()
    for i in range(rows.shape[0]):
        grad += 2.0 * (float(np.dot(d, rows[i])) - float(energies[i])) * rows[i]
    return grad


def grad_J_fd(
    d: np.ndarray, rows: np.ndarray, energies: np.ndarray, lam: float, step: float = 1e-5
) -> np.ndarray:
    """Central finite differences of the objective, one coordinate at a time."""
    d = np.asarray(d, dtype=np.float64)
    grad = np.zeros_like(d)
    for k in range(d.shape[0]):
        bumped = d.copy()
        bumped[k] = d[k] + step
        plus = objective_J(bumped, rows, energies, lam)
        bumped[k] = d[k] - step
        minus = objective_J(bumped, rows, energies, lam)
        grad[k] = (plus - minus) / (2.0 * step)
    return grad


def dominant_eigvec_dense(gram: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenpair of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps 2x2 rotations over every off-diagonal position until the
    off-diagonal Frobenius norm is negligible (1e-12 relative to the
    matrix norm, so large-scale Gram matrices converge too).

    Raises:
        NotSymmetricError: input is not square-symmetric within 1e-9.
    """
    a = np.array(gram, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetricError(f"matrix must be square, got {a.shape}")
    n = a.shape[0]
    if n > _MAX_EIGEN:
        raise ValueError(f"matrix too large for the reference eigensolver: {n}")
    if float(np.max(np.abs(a - a.T))) > _SYMMETRY_TOL:
        raise NotSymmetricError("matrix is not symmetric within 1e-9")
    a = 0.5 * (a + a.T)
    vecs = np.eye(n)
    norm = float(np.sqrt(np.sum(a * a)))
    if norm == 0.0:
        return 0.0, vecs[:, 0].copy()
    stop = _PIVOT_TOL * max(1.0, norm)
    for _ in range(_JACOBI_SWEEP_CAP):
        hollow = a.copy()
        np.fill_diagonal(hollow, 0.0)
        off = float(np.sqrt(np.sum(hollow * hollow)))
        if off <= stop:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= stop / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * a[:, p] - s * a[:, q]
                rot_q = s * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = rot_p, rot_q
                rot_p = c * a[p, :] - s * a[q, :]
                rot_q = s * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rot_p, rot_q
                rot_p = c * vecs[:, p] - s * vecs[:, q]
                rot_q = s * vecs[:, p] + c * vecs[:, q]
                vecs[:, p], vecs[:, q] = rot_p, rot_q
    top = int(np.argmax(np.diag(a)))
    return float(a[top, top]), vecs[:, top].copy()

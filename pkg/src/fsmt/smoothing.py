"""Relaxed variables to slot values: randomized rounding and Gaussian-smoothed atoms."""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.special import erf

from .model import Atom, Formula, truth

SQRT2 = np.sqrt(2.0)
SQRT_PI = np.sqrt(np.pi)


def round_prob(a_i):
    """Probability that randomized rounding of ``a_i`` yields True (-1)."""
    a_arr = np.asarray(a_i, dtype=float)
    if np.any(a_arr < -1) or np.any(a_arr > 1) or np.any(np.isnan(a_arr)):
        raise ValueError(f"relaxed Boolean outside [-1, 1]: {a_i}")
    p = (1.0 - a_arr) / 2.0
    return float(p) if p.ndim == 0 else p


def atom_smooth(atom: Atom, b, sigma: float) -> float:
    """Expected +/-1 indicator of ``atom`` under y ~ N(b, sigma^2 I).

    At sigma == 0 this is the exact indicator, strictness included.
    """
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return float(truth(atom.holds(b)))
    z = atom.lhs(b) - atom.rhs
    return float(erf(z / (SQRT2 * atom.norm * sigma)))


def atom_smooth_grad(atom: Atom, b, sigma: float) -> dict[int, float]:
    """Sparse gradient of :func:`atom_smooth` with respect to ``b``."""
    if not sigma > 0:
        raise ValueError("gradient of the smoothed atom needs sigma > 0")
    nq = atom.norm
    z = atom.lhs(b) - atom.rhs
    scale = SQRT2 / (SQRT_PI * sigma * nq) * np.exp(-z * z / (2.0 * sigma**2 * nq**2))
    return {j: float(q * scale) for j, q in atom.coeffs}


def transition_halfwidth_sq(beta: float, sigma: float) -> float:
    """Squared residual below which some |dd/db_j| may exceed 1/beta."""
    return sigma**2 * np.log(2.0 * beta**2 / (np.pi * sigma**2))


class AtomMatrix:
    """All atoms of a formula stacked for vectorised smoothing.

    Rows are atoms, columns real variables.  Row norms are precomputed.
    """

    def __init__(self, f: Formula):
        rows, cols, vals = [], [], []
        for at in f.atoms:
            for j, q in at.coeffs:
                rows.append(at.id)
                cols.append(j)
                vals.append(q)
        self.k = f.k_total
        self.m = f.n_real
        self.Q = sparse.csr_matrix((vals, (rows, cols)), shape=(self.k, self.m))
        self.QT = self.Q.T.tocsr()
        self.rhs = np.array([at.rhs for at in f.atoms], dtype=float)
        self.strict = np.array([at.strict for at in f.atoms], dtype=bool)
        self.norm = np.array([at.norm for at in f.atoms], dtype=float)

    def residual(self, b) -> np.ndarray:
        return self.Q @ np.asarray(b, dtype=float) - self.rhs

    def exact(self, b) -> np.ndarray:
        z = self.residual(b)
        holds = np.where(self.strict, z < 0, z <= 0)
        return np.where(holds, -1.0, 1.0)

    def smooth(self, b, sigma: float) -> np.ndarray:
        if sigma == 0:
            return self.exact(b)
        return erf(self.residual(b) / (SQRT2 * self.norm * sigma))

    def smooth_and_dz(self, b, sigma: float) -> tuple[np.ndarray, np.ndarray]:
        """Smoothed values and d(d_i)/d(z_i), with z_i the atom residual."""
        s = SQRT2 * self.norm * sigma
        u = self.residual(b) / s
        return erf(u), 2.0 / (SQRT_PI * s) * np.exp(-u * u)

    def pullback(self, g_d: np.ndarray, dz: np.ndarray) -> np.ndarray:
        """Chain an atom-space gradient through the smoothing into b-space."""
        return self.QT @ (g_d * dz)

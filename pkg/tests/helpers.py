"""Shared builders for randomized tests: symplectic transforms, state draws."""

import numpy as np
from scipy.linalg import block_diag, expm

from cvsep import symplectic_form


def random_symplectic(n, rng, scale=0.4):
    """Random symplectic matrix exp(J H) with H symmetric."""
    H = rng.normal(size=(2 * n, 2 * n)) * scale
    H = 0.5 * (H + H.T)
    return expm(symplectic_form(n) @ H)


def random_physical_cov(n, rng, scale=0.4, mixed=True):
    """Random physical covariance S diag(nu) S^T with every nu >= 1/2."""
    S = random_symplectic(n, rng, scale)
    if mixed:
        nus = 0.5 + rng.uniform(0.0, 1.5, size=n)
    else:
        nus = np.full(n, 0.5)
    return S @ np.diag(np.repeat(nus, 2)) @ S.T


def random_separable_cov(n, rng, scale=0.4):
    """Direct sum of independent single-mode physical states (fully separable)."""
    return block_diag(*[random_physical_cov(1, rng, scale) for _ in range(n)])


def tmsv_cov(r):
    """Two-mode squeezed vacuum covariance in (q1, p1, q2, p2) ordering."""
    ch, sh = np.cosh(2.0 * r), np.sinh(2.0 * r)
    return 0.5 * np.array(
        [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ]
    )


def tritter_ghz_cov(r):
    """Pure three-mode GHZ-type covariance: balanced tritter on one squeezed mode.

    A_q = e^{-2r}/2 t t^T + e^{2r}/2 (I - t t^T) with t = (1,1,1)/sqrt(3),
    A_p with the exponents swapped; q and p rows interleaved mode by mode.
    """
    t = np.full((3, 1), 1.0 / np.sqrt(3.0))
    P = t @ t.T
    Q = np.eye(3) - P
    Aq = 0.5 * np.exp(-2.0 * r) * P + 0.5 * np.exp(2.0 * r) * Q
    Ap = 0.5 * np.exp(2.0 * r) * P + 0.5 * np.exp(-2.0 * r) * Q
    V = np.zeros((6, 6))
    V[0::2, 0::2] = Aq
    V[1::2, 1::2] = Ap
    return V


def rotated_squeezed_block(s, theta):
    """2x2 pure covariance R diag(e^-2s, e^2s) R^T / 2."""
    c, sn = np.cos(theta), np.sin(theta)
    R = np.array([[c, -sn], [sn, c]])
    return R @ np.diag([0.5 * np.exp(-2.0 * s), 0.5 * np.exp(2.0 * s)]) @ R.T


def random_pure_sigma(n, rng, s_lim=1.0):
    """Block-diagonal probe covariance, per mode a rotated squeezed vacuum."""
    return block_diag(
        *[
            rotated_squeezed_block(rng.uniform(-s_lim, s_lim), rng.uniform(0.0, np.pi))
            for _ in range(n)
        ]
    )

"""Probe-squeezing limits of the witness and their PPT correspondence.

For Gaussian states the second-moment part of the criterion can be recast
as the matrix inequality Z >= I with

    Z = 4 P (Sigma + V) P J^T (Sigma^{-1} + V^{-1})^{-1} J,

where Sigma is the block-diagonal probe covariance and P the bipartition
sign matrix.  With momentum- (or position-) squeezed probes the limit of
Z is a closed-form matrix whose spectrum is {1, ..., 1} together with
4*nu^2 over the symplectic eigenvalues nu of the partially transposed
covariance, which ties the witness to the PPT criterion.
"""

import dataclasses

import numpy as np
import scipy.linalg

from .errors import ValidationError, NumericalFailureError
from .probes import Bipartition, enumerate_bipartitions
from .symplectic import (
    ThreeModePureStandardForm,
    TwoModeStandardForm,
    partial_transpose,
    symplectic_eigenvalues,
    symplectic_form,
    _as_cov,
)


__all__ = [
    "ZMatrixReport",
    "ResemblanceCheck",
    "ResemblanceReport",
    "probe_covariance",
    "z_matrix",
    "z_eigenvalues",
    "z_report",
    "z_limit_matrix",
    "verify_ppt_resemblance",
]

INEQUALITY_TOL = 1e-8
IMAG_RESIDUE_TOL = 1e-8


def probe_covariance(r, n):
    """Block-diagonal covariance of n identical squeezed probes diag(1/(4r), r)."""
    if r <= 0:
        raise ValidationError("probe squeezing r must be > 0")
    return np.kron(np.eye(n), np.diag([0.25 / r, r]))


def z_matrix(V, Sigma, b):
    """Product matrix 4 P (Sigma+V) P J^T (Sigma^{-1}+V^{-1})^{-1} J."""
    V = _as_cov(V)
    Sigma = _as_cov(Sigma)
    n = V.shape[0] // 2
    if Sigma.shape != V.shape:
        raise ValidationError("Sigma and V must have matching shapes")
    if b.n != n:
        raise ValidationError("bipartition is for %d modes, state has %d"
                              % (b.n, n))
    signs = b.sign_vector()
    J = symplectic_form(n)
    try:
        inner = np.linalg.inv(np.linalg.inv(Sigma) + np.linalg.inv(V))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError("singular covariance input: %s" % exc)
    return 4.0 * (signs[:, None] * (Sigma + V) * signs[None, :]) @ J.T @ inner @ J


def z_eigenvalues(V, Sigma, b):
    """Spectrum of z_matrix via the equivalent symmetric-definite pencil.

    Z is similar to the pencil (A, B) with A = 4 J^T (Sigma^{-1}+V^{-1})^{-1} J
    and B = P (Sigma+V)^{-1} P, both symmetric positive definite, so the
    eigenvalues are real and positive; solving the pencil avoids the
    spurious imaginary parts of the nonsymmetric product at extreme
    probe squeezing.
    """
    V = _as_cov(V)
    Sigma = _as_cov(Sigma)
    n = V.shape[0] // 2
    signs = b.sign_vector()
    J = symplectic_form(n)
    try:
        A = 4.0 * J.T @ np.linalg.inv(np.linalg.inv(Sigma) + np.linalg.inv(V)) @ J
        B = signs[:, None] * np.linalg.inv(Sigma + V) * signs[None, :]
        return np.sort(scipy.linalg.eigh(A, B, eigvals_only=True))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalFailureError("generalized eigensolve failed: %s" % exc)


@dataclasses.dataclass(frozen=True)
class ZMatrixReport:
    """Spectrum summary of the probe-squeezing matrix test."""

    bipartition: Bipartition
    r: float
    eigenvalues: np.ndarray
    min_eig: float
    inequality_holds: bool


def z_report(V, b, r):
    """Evaluate the matrix test with n identical diag(1/(4r), r) probes."""
    V = _as_cov(V)
    n = V.shape[0] // 2
    Sigma = probe_covariance(r, n)
    Z = z_matrix(V, Sigma, b)
    raw = np.linalg.eigvals(Z)
    scale = max(np.abs(raw).max(), 1.0)
    if np.abs(raw.imag).max() > IMAG_RESIDUE_TOL * scale:
        raise NumericalFailureError(
            "matrix-test spectrum has imaginary residue %.3e" % np.abs(raw.imag).max()
        )
    eig = z_eigenvalues(V, Sigma, b)
    min_eig = float(eig[0])
    return ZMatrixReport(
        bipartition=b,
        r=float(r),
        eigenvalues=eig,
        min_eig=min_eig,
        inequality_holds=bool(min_eig >= 1.0 - INEQUALITY_TOL),
    )


def _two_mode_momentum_limit(a, b, c, d):
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, a * a - c * d, 0.0, a * c - b * d],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, b * c - a * d, 0.0, b * b - c * d],
    ])


def _three_mode_momentum_limit(a, e):
    a1, a2, a3 = a
    (e12p, e12m), (e13p, e13m), (e23p, e23m) = e
    Z = np.zeros((6, 6))
    Z[0, 0] = Z[2, 2] = Z[4, 4] = 1.0
    Z[1, 1] = a1 * a1 - e13p * e13m - e12p * e12m
    Z[1, 3] = a1 * e12p - a2 * e12m - e13m * e23p
    Z[1, 5] = a1 * e13p - a3 * e13m - e12m * e23p
    Z[3, 1] = a2 * e12p - a1 * e12m + e13p * e23m
    Z[3, 3] = a2 * a2 - e12p * e12m + e23p * e23m
    Z[3, 5] = a2 * e23p + a3 * e23m - e12m * e13p
    Z[5, 1] = a3 * e13p - a1 * e13m + e12p * e23m
    Z[5, 3] = a3 * e23p + a2 * e23m - e13m * e12p
    Z[5, 5] = a3 * a3 - e13p * e13m + e23m * e23p
    return Z


def _swap_qp(Z):
    n = Z.shape[0] // 2
    T = np.zeros_like(Z)
    for m in range(n):
        T[2 * m, 2 * m + 1] = T[2 * m + 1, 2 * m] = 1.0
    return T @ Z @ T


def _isolated_mode(b):
    if len(b.group0) == 1:
        return b.group0[0]
    if len(b.group1) == 1:
        return b.group1[0]
    raise ValidationError("bipartition must isolate a single mode")


def z_limit_matrix(sf, direction, b):
    """Closed-form probe-squeezing limit of the matrix test.

    direction 'momentum' is the r -> 0 limit of diag(1/(4r), r) probes
    (infinitely squeezed in momentum); 'position' is r -> infinity.  The
    position limit is the momentum pattern with the two coupling families
    exchanged and the q/p slots swapped.
    """
    if direction not in ("momentum", "position"):
        raise ValidationError("direction must be 'momentum' or 'position'")
    if isinstance(sf, TwoModeStandardForm):
        if sorted(b.group0 + b.group1) != [0, 1]:
            raise ValidationError("expected a two-mode bipartition")
        if direction == "momentum":
            return _two_mode_momentum_limit(sf.a, sf.b, sf.c, sf.d)
        return _swap_qp(_two_mode_momentum_limit(sf.a, sf.b, sf.d, sf.c))
    if isinstance(sf, ThreeModePureStandardForm):
        iso = _isolated_mode(b)
        perm = {0: (0, 1, 2), 1: (1, 0, 2), 2: (2, 0, 1)}[iso]
        a = (sf.a1, sf.a2, sf.a3)
        pairs = {
            (0, 1): (sf.e12p, sf.e12m),
            (0, 2): (sf.e13p, sf.e13m),
            (1, 2): (sf.e23p, sf.e23m),
        }
        a_rel = tuple(a[m] for m in perm)
        e_rel = []
        for i, j in ((0, 1), (0, 2), (1, 2)):
            oi, oj = perm[i], perm[j]
            e_rel.append(pairs[(min(oi, oj), max(oi, oj))])
        if direction == "position":
            e_rel = [(em, ep) for ep, em in e_rel]
        Zp = _three_mode_momentum_limit(a_rel, e_rel)
        if direction == "position":
            Zp = _swap_qp(Zp)
        E = np.zeros((6, 6))
        for new, old in enumerate(perm):
            E[2 * new, 2 * old] = 1.0
            E[2 * new + 1, 2 * old + 1] = 1.0
        return E.T @ Zp @ E
    raise ValidationError("sf must be a two-mode or three-mode standard form")


@dataclasses.dataclass(frozen=True)
class ResemblanceCheck:
    """One (bipartition, direction) comparison inside a resemblance report."""

    bipartition: Bipartition
    direction: str
    entry_deviation: float
    eig_deviation: float
    passed: bool


@dataclasses.dataclass(frozen=True)
class ResemblanceReport:
    checks: tuple
    passed: bool

    @property
    def max_entry_deviation(self):
        return max(c.entry_deviation for c in self.checks)

    @property
    def max_eig_deviation(self):
        return max(c.eig_deviation for c in self.checks)


def verify_ppt_resemblance(sf, tolerance=1e-3, eig_tolerance=1e-4,
                           r_small=1e-6, r_large=1e6):
    """Check that finite-squeezing matrix tests converge onto the PPT data.

    For every single-mode-isolating bipartition and both squeezing
    directions, compares z_matrix at r_small / r_large entrywise against
    z_limit_matrix (deviation measured relative to the largest limit
    entry) and the sorted spectra of both matrices against
    {1, ..., 1} union {4 nu^2} built from the partial-transpose
    symplectic eigenvalues (deviation relative to max(1, |target|)).
    """
    V = sf.matrix
    n = V.shape[0] // 2
    checks = []
    for b in enumerate_bipartitions(n):
        try:
            _isolated_mode(b)
        except ValidationError:
            continue
        modes = b.group0 if len(b.group0) == 1 else b.group1
        target = np.sort(np.concatenate([
            np.ones(n),
            4.0 * symplectic_eigenvalues(partial_transpose(V, list(modes))) ** 2,
        ]))
        for direction, r in (("momentum", r_small), ("position", r_large)):
            Z_lim = z_limit_matrix(sf, direction, b)
            Z_num = z_matrix(V, probe_covariance(r, n), b)
            scale = max(1.0, np.abs(Z_lim).max())
            entry_dev = float(np.abs(Z_num - Z_lim).max() / scale)
            eig_dev = 0.0
            for eig in (np.sort(np.linalg.eigvals(Z_lim).real),
                        z_eigenvalues(V, probe_covariance(r, n), b)):
                rel = np.abs(eig - target) / np.maximum(1.0, np.abs(target))
                eig_dev = max(eig_dev, float(rel.max()))
            checks.append(ResemblanceCheck(
                bipartition=b,
                direction=direction,
                entry_deviation=entry_dev,
                eig_deviation=eig_dev,
                passed=bool(entry_dev <= tolerance and eig_dev <= eig_tolerance),
            ))
    return ResemblanceReport(checks=tuple(checks), passed=all(c.passed for c in checks))

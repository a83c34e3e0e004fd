"""Mutual information, its high-SNR decomposition, and water-filling capacity.

All information quantities are in bits and, unless stated otherwise,
normalized per transmit antenna (per column of the channel matrix): the
Gram spectrum of an R x T channel H is the T eigenvalues of H^H H and

    I(gamma) = mean over that spectrum of log2(1 + gamma * lambda).

At high SNR this splits into the multiplexing rate, the restriction of
log2(gamma * lambda) to nonzero eigenvalues, plus a vanishing remainder.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import integrate, integrate_log_singular_upper
from .spectra import EmpiricalSpectrum, binary_entropy

_LN2 = math.log(2.0)
_Z_CLAMP = 1e-18


@dataclass(frozen=True)
class InfoDecomposition:
    """Mutual information split I = I0 + delta at a given linear SNR."""

    mutual_info: float
    multiplexing_rate: float
    delta: float
    snr: float


def mutual_info_measure(measure, gamma):
    """Mean of log2(1 + gamma x) over a spectrum, in bits per transmit antenna.

    Empirical spectra are averaged directly.  For analytic families the value
    is recovered by integrating the eta-transform derivative identity
    dI/dgamma = (1 - eta(gamma)) / (gamma ln 2), which needs only the
    S-transform machinery and no explicit density.
    """
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    if isinstance(measure, EmpiricalSpectrum):
        return float(np.mean(np.log2(1.0 + gamma * measure.eigenvalues)))
    return _family_mutual_info(measure, gamma)


def _family_mutual_info(family, gamma):
    mean = family.mean
    # Substituting u = e^v, I(gamma) ln2 = integral of (1 - eta(e^v)) dv up
    # to ln(gamma).  The integrand decays like mean * e^v to the left, so
    # truncating at e^v = eps/mean discards just under eps.
    eps = 1e-13
    v_hi = math.log(gamma)
    v_lo = math.log(eps / mean)
    if v_lo >= v_hi:
        return gamma * mean / _LN2

    def g(v):
        return -family.psi(-math.exp(v))

    return (integrate(g, v_lo, v_hi, abs_tol=1e-11, rel_tol=1e-11,
                      initial_splits=4) + eps) / _LN2


def decompose(spec, gamma):
    """Split an empirical spectrum's mutual information into I0 + delta."""
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    nz = spec.nonzero
    t = spec.total_dim
    if nz.size == 0:
        return InfoDecomposition(0.0, 0.0, 0.0, gamma)
    i0 = float(np.sum(np.log2(gamma * nz)) / t)
    delta = float(np.sum(np.log2(1.0 + 1.0 / (gamma * nz))) / t)
    return InfoDecomposition(i0 + delta, i0, delta, gamma)


def _gram_smaller_side(h):
    """The Gram matrix on the smaller of the two orientations."""
    r, t = h.shape
    return h @ h.conj().T if r < t else h.conj().T @ h


def mutual_info_finite(h, gamma):
    """(1/T) log2 det(I + gamma H^H H) through a Cholesky factorization.

    Uses det(I + gamma H^H H) = det(I + gamma H H^H) to factor the smaller
    Gram matrix; no eigendecomposition is needed.
    """
    h = np.asarray(h)
    if h.ndim != 2:
        raise ValueError("channel matrix must be 2-dimensional")
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    if not np.all(np.isfinite(h.real)) or (np.iscomplexobj(h)
                                           and not np.all(np.isfinite(h.imag))):
        raise ValueError("channel matrix has non-finite entries")
    gram = _gram_smaller_side(h)
    a = np.eye(gram.shape[0], dtype=gram.dtype) + gamma * gram
    chol = np.linalg.cholesky(a)
    logdet = 2.0 * float(np.sum(np.log2(np.real(np.diagonal(chol)))))
    return logdet / h.shape[1]


def multiplexing_rate_finite(h, gamma, zero_tolerance=None):
    """(1/T) sum of log2(gamma lambda) over nonzero Gram eigenvalues."""
    h = np.asarray(h)
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    w = np.linalg.eigvalsh(_gram_smaller_side(h))
    w = np.maximum(w, 0.0)
    t = h.shape[1]
    if zero_tolerance is None:
        # Same rank rule as EmpiricalSpectrum, on the nominal T-dim Gram.
        zero_tolerance = float(np.max(w, initial=0.0)) * t * 2.0 ** -40
    nz = w[w > zero_tolerance]
    if nz.size == 0:
        return 0.0
    return float(np.sum(np.log2(gamma * nz)) / t)


def multiplexing_rate_s(family, gamma):
    """Multiplexing rate of a limiting law from its S-transform:

    H(alpha) + alpha log2(gamma) - integral_0^alpha log2 S(-z) dz.
    """
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    a = family.alpha

    def integrand(z):
        return math.log2(family.s_transform(-max(z, _Z_CLAMP)))

    tail = integrate_log_singular_upper(integrand, 0.0, a)
    return binary_entropy(a) + a * math.log2(gamma) - tail


def harmonic_mean_measure(family, t):
    """m_hat(t) = 1 / S(-t): harmonic mean of the t-fraction row-removed law."""
    if not 0.0 < t < family.alpha:
        raise DomainError(f"requires t in (0, {family.alpha}), got {t}")
    return 1.0 / family.s_transform(-t)


def multiplexing_rate_harmonic(family, beta, gamma):
    """Multiplexing rate after keeping a beta-fraction of rows, per original
    antenna: beta log2(gamma) + integral_0^beta log2 m_hat(t) dt.

    Requires a full-rank (alpha = 1) square Gram law.
    """
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    if not 0.0 < beta <= 1.0:
        raise DomainError(f"requires beta in (0, 1], got {beta}")
    if abs(family.alpha - 1.0) > 1e-12:
        raise DomainError("harmonic-mean route requires a full-rank law")

    def integrand(t):
        return math.log2(family.s_transform(-max(t, _Z_CLAMP)))

    return beta * math.log2(gamma) - integrate_log_singular_upper(
        integrand, 0.0, beta)


def waterfilling_capacity(eigenvalues, gamma):
    """Water-filling over channel eigenmodes under (1/T) sum(q) = 1.

    Returns (capacity in bits per transmit antenna, allocation array).  The
    water level is located by monotone bisection to 1e-12.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.ndim != 1 or lam.size == 0:
        raise ValueError("eigenvalues must be a nonempty 1-d array")
    if np.any(lam < 0.0):
        raise DomainError("eigenvalues must be nonnegative")
    if gamma <= 0.0:
        raise DomainError(f"requires gamma > 0, got {gamma}")
    pos = lam > 0.0
    if not np.any(pos):
        raise DomainError("water-filling needs at least one positive eigenvalue")

    t = lam.size
    inv = 1.0 / (gamma * lam[pos])

    def budget(level):
        return float(np.sum(np.maximum(0.0, level - inv)))

    lo = 0.0
    hi = t + float(np.max(inv))
    for _ in range(200):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if budget(mid) < t:
            lo = mid
        else:
            hi = mid
    level = 0.5 * (lo + hi)

    allocation = np.zeros(t)
    allocation[pos] = np.maximum(0.0, level - inv)
    capacity = float(np.sum(np.log2(1.0 + gamma * allocation * lam)) / t)
    return capacity, allocation

"""Finite random-matrix sampling and ergodic Monte Carlo estimation.

Reproducibility contract.  Every sampling operation is a pure function of
(spec, seed, trial): trial t draws from a Philox4x64 counter-based generator
keyed by the 64-bit seed with initial counter (0, 0, t, 0), so trials are
independent streams that can be evaluated in any order or thread and still
reproduce bit-identically.  Trial reductions (mean, standard error) are
computed over an array indexed by trial, which numpy sums in a fixed order.

Set FREEMIMO_THREADS=<n> to evaluate trials on a thread pool; results do not
depend on the setting.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .infotheory import multiplexing_rate_finite, mutual_info_finite
from .spectra import Dirac, EmpiricalSpectrum, FreeProduct, SquareIidGram

ENSEMBLE_KINDS = (
    "iid_complex_gaussian",
    "iid_real_gaussian",
    "haar_unitary",
    "product_iid",
)

THREADS_ENV_VAR = "FREEMIMO_THREADS"


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for one random channel draw.

    ``variance`` is the ensemble scale sigma^2: iid entries have per-entry
    variance sigma^2 / N with N = rows for a single R x T draw and N = the
    factor dimension for each square factor of a product.  Haar draws are
    exactly unitary.  ``factors`` is the number of iid factors multiplied
    together (product_iid only).
    """

    kind: str
    rows: int
    cols: int
    variance: float = 1.0
    factors: int = 1

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("matrix dimensions must be >= 1")
        if self.kind in ("haar_unitary", "product_iid") and self.rows != self.cols:
            raise ValueError(f"{self.kind} requires a square matrix")
        if self.variance <= 0.0:
            raise ValueError(f"variance must be positive, got {self.variance}")
        if self.factors < 1:
            raise ValueError(f"factors must be >= 1, got {self.factors}")


@dataclass(frozen=True)
class ProjectorSpec:
    """Antenna removal: keep the leading beta-fraction of rows or columns."""

    side: str
    beta: float
    mode: str = "leading"

    def __post_init__(self):
        if self.side not in ("receive", "transmit"):
            raise ValueError(f"side must be receive or transmit, got {self.side!r}")
        if not 0.0 < self.beta <= 1.0:
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if self.mode != "leading":
            raise ValueError(f"unsupported projector mode {self.mode!r}")


@dataclass(frozen=True)
class ErgodicEstimate:
    """Monte Carlo mean with its standard error and provenance."""

    mean: float
    stderr: float
    trials: int
    master_seed: int


def trial_rng(master_seed, trial=0):
    """Generator for one trial: Philox keyed by master_seed, counter (0,0,trial,0)."""
    return np.random.Generator(
        np.random.Philox(key=master_seed, counter=[0, 0, trial, 0]))


def kept_count(beta, dim):
    """Entries kept by a beta-projector: round-half-up of beta*dim, minimum 1."""
    return max(1, int(math.floor(beta * dim + 0.5)))


def sample_matrix(spec, seed, trial=0):
    """Draw one channel matrix; bit-identical for identical (spec, seed, trial)."""
    rng = trial_rng(seed, trial)
    r, t = spec.rows, spec.cols
    if spec.kind == "iid_complex_gaussian":
        scale = math.sqrt(spec.variance / (2.0 * r))
        return scale * (rng.standard_normal((r, t))
                        + 1j * rng.standard_normal((r, t)))
    if spec.kind == "iid_real_gaussian":
        return math.sqrt(spec.variance / r) * rng.standard_normal((r, t))
    if spec.kind == "haar_unitary":
        z = (rng.standard_normal((r, r)) + 1j * rng.standard_normal((r, r)))
        q, upper = np.linalg.qr(z)
        d = np.diagonal(upper)
        # Phase correction makes the QR draw exactly Haar-distributed.
        return q * (d / np.abs(d))
    # product_iid: left-to-right product of square factors drawn in order.
    scale = math.sqrt(spec.variance / (2.0 * r))
    h = None
    for _ in range(spec.factors):
        f = scale * (rng.standard_normal((r, r))
                     + 1j * rng.standard_normal((r, r)))
        h = f if h is None else h @ f
    return h


def apply_projector(h, proj):
    """Keep the leading rows (receive side) or columns (transmit side)."""
    r, t = h.shape
    if proj.side == "receive":
        k = kept_count(proj.beta, r)
        out = h[:k, :]
    else:
        k = kept_count(proj.beta, t)
        out = h[:, :k]
    if out.shape[0] == 0 or out.shape[1] == 0:
        raise ValueError("projector removed every antenna")
    return out


def empirical_spectrum(spec, seed, trial=0):
    """Full T-dimensional Gram spectrum of one sampled matrix."""
    h = sample_matrix(spec, seed, trial)
    gram = h.conj().T @ h
    w = np.linalg.eigvalsh(gram)
    return EmpiricalSpectrum(np.maximum(w, 0.0))


def limiting_family(spec):
    """The large-system Gram law of a square ensemble draw.

    Real and complex iid entries share the same limiting law; rectangular
    draws are handled by callers through projector scaling.
    """
    if spec.kind == "haar_unitary":
        return Dirac(1.0)
    if spec.kind == "product_iid":
        return FreeProduct(*[SquareIidGram(spec.variance)] * spec.factors)
    return SquareIidGram(spec.variance)


def _thread_count():
    raw = os.environ.get(THREADS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_trials(fn, trials):
    """Evaluate fn(trial) for trial = 0..trials-1 into a trial-ordered array."""
    out = np.empty(trials)

    def one(t):
        try:
            out[t] = fn(t)
        except np.linalg.LinAlgError as exc:
            raise np.linalg.LinAlgError(f"trial {t}: {exc}") from exc

    workers = _thread_count()
    if workers == 1:
        for t in range(trials):
            one(t)
        return out

    def chunk(lo_hi):
        for t in range(*lo_hi):
            one(t)

    step = max(1, trials // (4 * workers))
    ranges = [(lo, min(lo + step, trials)) for lo in range(0, trials, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(chunk, ranges))
    return out


def _estimate(values, master_seed):
    n = values.size
    stderr = float(np.std(values, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return ErgodicEstimate(float(np.mean(values)), stderr, n, master_seed)


def _check_trials(trials):
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")


def ergodic_mutual_info(spec, proj, gamma, trials, master_seed):
    """Ergodic mutual information in bits per transmit antenna of the
    (possibly projected) system."""
    _check_trials(trials)

    def one(t):
        h = sample_matrix(spec, master_seed, t)
        if proj is not None:
            h = apply_projector(h, proj)
        return mutual_info_finite(h, gamma)

    return _estimate(_run_trials(one, trials), master_seed)


def ergodic_loss(spec, proj, gamma, trials, master_seed):
    """Paired mutual-information loss per reference transmit antenna.

    The same draw feeds the reference and the projected term (common random
    numbers).  Receive side: I(H) - I(P H).  Transmit side the projected term
    is weighted by the kept fraction so both are per reference antenna.
    """
    _check_trials(trials)
    if proj is None:
        raise ValueError("ergodic_loss requires a projector")

    def one(t):
        h = sample_matrix(spec, master_seed, t)
        hp = apply_projector(h, proj)
        ref = mutual_info_finite(h, gamma)
        projected = mutual_info_finite(hp, gamma)
        if proj.side == "transmit":
            return ref - (hp.shape[1] / h.shape[1]) * projected
        return ref - projected

    return _estimate(_run_trials(one, trials), master_seed)


def ergodic_multiplexing_rate(spec, proj, gamma, trials, master_seed):
    """Ergodic multiplexing rate (nonzero-eigenvalue log sum) per transmit
    antenna of the (possibly projected) system."""
    _check_trials(trials)

    def one(t):
        h = sample_matrix(spec, master_seed, t)
        if proj is not None:
            h = apply_projector(h, proj)
        return multiplexing_rate_finite(h, gamma)

    return _estimate(_run_trials(one, trials), master_seed)


def ergodic_deviation(spec, beta, gamma, trials, master_seed):
    """Paired estimate of the deviation from linear growth, per antenna.

    For a square N x N ensemble: multiplexing rate of the beta-row-projected
    system minus the kept fraction times the reference multiplexing rate,
    both normalized by N and sharing the same draw.
    """
    _check_trials(trials)
    if spec.rows != spec.cols:
        raise ValueError("deviation estimation requires a square ensemble")
    proj = ProjectorSpec("receive", beta)
    frac = kept_count(beta, spec.rows) / spec.rows

    def one(t):
        h = sample_matrix(spec, master_seed, t)
        hp = apply_projector(h, proj)
        return (multiplexing_rate_finite(hp, gamma)
                - frac * multiplexing_rate_finite(h, gamma))

    return _estimate(_run_trials(one, trials), master_seed)

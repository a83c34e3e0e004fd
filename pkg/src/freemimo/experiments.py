"""Named experiments binding closed-form asymptotics to Monte Carlo estimates.

Each experiment consumes a validated ``ExperimentConfig`` and produces a
``ResultTable`` whose rows are plain JSON scalars; ``emit`` writes CSV or
JSON.  Identical (config, seed) re-runs reproduce output files byte for byte,
except for the wall-clock metadata field (JSON only), which is excluded from
the determinism guarantee.
"""

import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .asymptotics import (
    binary_entropy_loss,
    deviation_from_linear,
    deviation_product_iid,
)
from .errors import ConvergenceError, DomainError
from .infotheory import harmonic_mean_measure
from .montecarlo import (
    EnsembleSpec,
    ProjectorSpec,
    apply_projector,
    ergodic_deviation,
    limiting_family,
    sample_matrix,
)
from .spectra import (
    BernoulliProjector,
    Dirac,
    FreeProduct,
    ProjectorScaled,
    SquareIidGram,
    eta_transform,
    psi_transform,
    s_transform,
)

CONFIG_SCHEMA = "freemimo-config/1"

EXPERIMENTS = (
    "loss-curve",
    "loss-convergence",
    "deviation-sweep",
    "product-additivity",
    "monotonicity",
    "transforms",
    "verify",
)

FAMILY_NAMES = ("square_iid", "dirac", "bernoulli", "projector_scaled",
                "product_iid")


@dataclass
class ExperimentConfig:
    """Declarative description of one experiment run."""

    experiment: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    fmt: str = "csv"

    @classmethod
    def from_file(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if raw.get("schema") != CONFIG_SCHEMA:
            raise ValueError(
                f"config schema must be {CONFIG_SCHEMA!r}, got {raw.get('schema')!r}")
        output = raw.get("output", {})
        return cls(experiment=raw.get("experiment", ""),
                   params=dict(raw.get("params", {})),
                   out=output.get("path"),
                   fmt=output.get("format", "csv"))

    def validate(self):
        """Return a list of messages, one per offending field; empty if valid."""
        errors = []
        if self.experiment not in EXPERIMENTS:
            errors.append(f"experiment: unknown name {self.experiment!r}")
            return errors
        if self.fmt not in ("csv", "json"):
            errors.append(f"format: must be csv or json, got {self.fmt!r}")
        p = self.params
        def positive(name, kind=float):
            if name in p:
                try:
                    val = kind(p[name])
                except (TypeError, ValueError):
                    errors.append(f"{name}: not a number: {p[name]!r}")
                    return
                if val <= 0:
                    errors.append(f"{name}: must be positive, got {p[name]}")
        positive("trials", int)
        positive("sigma2")
        positive("n", int)
        positive("rows", int)
        positive("cols", int)
        positive("m", int)
        positive("at")
        if "phi" in p and not 0.0 < float(p["phi"]) <= 1.0:
            errors.append(f"phi: must be in (0, 1], got {p['phi']}")
        for key in ("beta", "beta_list"):
            if key in p:
                vals = p[key] if isinstance(p[key], (list, tuple)) else [p[key]]
                for b in vals:
                    if not 0.0 < float(b) <= 1.0:
                        errors.append(f"{key}: entries must be in (0, 1], got {b}")
        if "gamma_db" in p:
            grid = p["gamma_db"] if isinstance(p["gamma_db"], (list, tuple)) \
                else [p["gamma_db"]]
            if sorted(grid) != list(grid) or len(set(grid)) != len(grid):
                errors.append("gamma_db: grid must be strictly increasing")
        if "n_list" in p:
            if not all(int(n) >= 2 for n in p["n_list"]):
                errors.append(f"n_list: entries must be >= 2, got {p['n_list']}")
        if "ensemble" in p and p["ensemble"] not in (
                "iid_complex_gaussian", "iid_real_gaussian", "haar_unitary",
                "product_iid"):
            errors.append(f"ensemble: unknown kind {p['ensemble']!r}")
        if "family" in p and p["family"] not in FAMILY_NAMES:
            errors.append(f"family: unknown name {p['family']!r}")
        return errors


@dataclass
class ResultTable:
    """Column-named rows plus a metadata block echoing the run inputs."""

    columns: list
    rows: list
    metadata: dict

    def column(self, name):
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def _metadata(config, seed):
    return {
        "schema": CONFIG_SCHEMA,
        "experiment": config.experiment,
        "params": dict(config.params),
        "master_seed": seed,
        "code_version": __version__,
        "wall_clock_s": None,  # filled by run_experiment
    }


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


@contextmanager
def _row_context(experiment, **fields):
    """Attach the experiment row being computed to numeric failures."""
    try:
        yield
    except ConvergenceError as exc:
        where = ", ".join(f"{k}={v}" for k, v in fields.items())
        raise ConvergenceError(f"{experiment} row ({where}): {exc}") from exc


def _grid(params, key, default):
    raw = params.get(key, default)
    if isinstance(raw, (int, float)):
        return [float(raw)]
    return [float(v) for v in raw]


def _ensemble(params, rows, cols, default_sigma2):
    kind = params.get("ensemble", "iid_complex_gaussian")
    sigma2 = float(params.get("sigma2", default_sigma2))
    m = int(params.get("m", 1))
    if kind == "product_iid":
        return EnsembleSpec(kind, rows, cols, sigma2, factors=m)
    return EnsembleSpec(kind, rows, cols, sigma2)


def _paired_grid_stats(spec, beta, gammas, trials, seed):
    """One pass over trials; per-gamma reference/projected statistics.

    Draws each trial once (common random numbers across the whole gamma
    grid), eigendecomposes the reference and row-projected Grams, and
    evaluates mutual information and multiplexing rate for every gamma.
    Returns arrays of shape (len(gammas), trials).

    Trials are batched through numpy's stacked eigvalsh in chunks when the
    system is small; per-trial draws still come from their own counter-keyed
    streams, so results are identical to the one-at-a-time path.
    """
    t_cols = spec.cols
    proj = ProjectorSpec("receive", beta)
    gam = np.asarray(gammas, dtype=float)
    mi_ref = np.empty((gam.size, trials))
    mi_proj = np.empty((gam.size, trials))
    mr_ref = np.empty((gam.size, trials))
    mr_proj = np.empty((gam.size, trials))

    chunk = max(1, min(trials, int(2 ** 22 / max(spec.rows * spec.cols, 1))))

    def small_gram_stack(stack):
        """Gram matrices on the smaller orientation for a (k, r, t) stack."""
        _, r, t = stack.shape
        if r < t:
            return stack @ stack.conj().transpose(0, 2, 1)
        return stack.conj().transpose(0, 2, 1) @ stack

    def fill(block, offset, out_mi, out_mr):
        w = np.linalg.eigvalsh(small_gram_stack(block))
        w = np.maximum(w, 0.0)
        t_dim = block.shape[2]
        tol = w[:, -1:] * t_dim * 2.0 ** -40
        nz_mask = w > tol
        for i, g in enumerate(gam):
            out_mi[i, offset:offset + block.shape[0]] = \
                np.sum(np.log2(1.0 + g * w), axis=1) / t_cols
            logs = np.where(nz_mask, np.log2(np.where(nz_mask, g * w, 1.0)), 0.0)
            out_mr[i, offset:offset + block.shape[0]] = \
                np.sum(logs, axis=1) / t_cols

    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        draws = [sample_matrix(spec, seed, done + j) for j in range(k)]
        block = np.stack(draws)
        fill(block, done, mi_ref, mr_ref)
        proj_block = np.stack([apply_projector(h, proj) for h in draws])
        fill(proj_block, done, mi_proj, mr_proj)
        done += k
    return mi_ref, mi_proj, mr_ref, mr_proj


def _mean_se(a, axis=-1):
    return (np.mean(a, axis=axis),
            np.std(a, axis=axis, ddof=1) / math.sqrt(a.shape[axis]))


def _run_loss_curve(params, seed):
    rows = int(params.get("rows", 4))
    cols = int(params.get("cols", 2))
    beta = float(params.get("beta", 0.5))
    trials = int(params.get("trials", 20000))
    gammas_db = _grid(params, "gamma_db", list(np.arange(0.0, 41.0, 2.0)))
    spec = _ensemble(params, rows, cols, default_sigma2=float(rows))
    gammas = [db_to_linear(g) for g in gammas_db]
    mi_r, mi_p, mr_r, mr_p = _paired_grid_stats(spec, beta, gammas, trials, seed)
    loss = (mi_r - mi_p) * cols  # total bits over all transmit antennas
    table_rows = []
    for i, gdb in enumerate(gammas_db):
        lm, ls = _mean_se(loss[i])
        table_rows.append([
            float(gdb),
            float(np.mean(mi_r[i])), float(np.mean(mr_r[i])),
            float(np.mean(mi_p[i])), float(np.mean(mr_p[i])),
            float(lm), float(ls),
        ])
    return ["gamma_db", "mi_ref_bits", "mr_ref_bits", "mi_proj_bits",
            "mr_proj_bits", "loss_total_bits", "stderr_bits"], table_rows


def _run_loss_convergence(params, seed):
    phi = float(params.get("phi", 0.5))
    beta = float(params.get("beta", 0.75))
    gamma = db_to_linear(float(params.get("gamma_db", 40.0)))
    n_list = [int(n) for n in params.get("n_list", [64, 128, 256, 512])]
    trials = int(params.get("trials", 200))
    asym = binary_entropy_loss(phi, beta)
    table_rows = []
    for n in n_list:
        cols = max(1, round(phi * n))
        spec = _ensemble(params, n, cols, default_sigma2=1.0)
        with _row_context("loss-convergence", n=n):
            mi_r, mi_p, _, _ = _paired_grid_stats(spec, beta, [gamma],
                                                  trials, seed)
        mean, se = _mean_se(mi_r[0] - mi_p[0])
        table_rows.append([n, float(mean), float(se), asym,
                           abs(float(mean) - asym)])
    return ["n", "loss_mc_bits", "stderr_bits", "loss_asymptotic_bits",
            "discrepancy_bits"], table_rows


def _run_deviation_sweep(params, seed):
    n = int(params.get("n", 512))
    betas = _grid(params, "beta_list", [0.25, 0.5, 0.75])
    gamma = db_to_linear(float(params.get("gamma_db", 60.0)))
    trials = int(params.get("trials", 200))
    spec = _ensemble(params, n, n, default_sigma2=1.0)
    family = limiting_family(spec)
    table_rows = []
    for b in betas:
        with _row_context("deviation-sweep", beta=b):
            est = ergodic_deviation(spec, b, gamma, trials, seed)
            asym = deviation_from_linear(family, b)
        table_rows.append([b, est.mean, est.stderr, asym,
                           abs(est.mean - asym)])
    return ["beta", "dev_mc_bits", "stderr_bits", "dev_asymptotic_bits",
            "discrepancy_bits"], table_rows


def _run_product_additivity(params, seed):
    n = int(params.get("n", 512))
    m = int(params.get("m", 2))
    beta = float(params.get("beta", 0.5))
    gamma = db_to_linear(float(params.get("gamma_db", 60.0)))
    trials = int(params.get("trials", 200))
    sigma2 = float(params.get("sigma2", 1.0))
    prod = EnsembleSpec("product_iid", n, n, sigma2, factors=m)
    est_prod = ergodic_deviation(prod, beta, gamma, trials, seed)
    single = EnsembleSpec("iid_complex_gaussian", n, n, sigma2)
    factor_sum = 0.0
    factor_var = 0.0
    for k in range(m):
        est_k = ergodic_deviation(single, beta, gamma, trials, seed + 1 + k)
        factor_sum += est_k.mean
        factor_var += est_k.stderr ** 2
    closed = deviation_product_iid(m, beta)
    row = [m, beta, est_prod.mean, est_prod.stderr, factor_sum,
           math.sqrt(factor_var), closed, abs(est_prod.mean - closed)]
    return ["m", "beta", "dev_product_bits", "stderr_product_bits",
            "dev_factor_sum_bits", "stderr_factor_sum_bits",
            "dev_closed_form_bits", "discrepancy_bits"], [row]


def _run_monotonicity(params, seed):
    rows = int(params.get("rows", 4))
    cols = int(params.get("cols", 2))
    beta = float(params.get("beta", 0.5))
    trials = int(params.get("trials", 20000))
    gammas_db = _grid(params, "gamma_db", list(np.arange(0.0, 41.0, 5.0)))
    spec = _ensemble(params, rows, cols, default_sigma2=float(rows))
    gammas = [db_to_linear(g) for g in gammas_db]
    mi_r, mi_p, _, _ = _paired_grid_stats(spec, beta, gammas, trials, seed)
    loss = mi_r - mi_p  # per transmit antenna
    table_rows = []
    prev_mean = None
    prev_se = 0.0
    for i, gdb in enumerate(gammas_db):
        mean, se = _mean_se(loss[i])
        if prev_mean is None:
            ok = 1
        else:
            ok = 1 if mean >= prev_mean - 3.0 * (se + prev_se) else 0
        table_rows.append([float(gdb), float(mean), float(se), ok])
        prev_mean, prev_se = mean, se
    return ["gamma_db", "loss_bits", "stderr_bits", "nondecreasing"], table_rows


def _named_family(params):
    name = params.get("family", "square_iid")
    sigma2 = float(params.get("sigma2", 1.0))
    if name == "square_iid":
        return SquareIidGram(sigma2)
    if name == "dirac":
        return Dirac(float(params.get("at", 1.0)))
    if name == "bernoulli":
        return BernoulliProjector(float(params.get("beta", 0.5)))
    if name == "projector_scaled":
        return ProjectorScaled(SquareIidGram(sigma2),
                               float(params.get("beta", 0.5)))
    if name == "product_iid":
        return FreeProduct(*[SquareIidGram(sigma2)] * int(params.get("m", 2)))
    raise DomainError(f"unknown family {name!r}")


def _run_transforms(params, seed):
    family = _named_family(params)
    points = int(params.get("points", 25))
    alpha = family.alpha
    table_rows = []
    for i in range(1, points + 1):
        z = alpha * i / (points + 1)
        gamma_db = -10.0 + 50.0 * (i - 1) / max(points - 1, 1)
        gamma = db_to_linear(gamma_db)
        table_rows.append([
            float(z),
            psi_transform(family, -z),
            s_transform(family, -z),
            harmonic_mean_measure(family, z),
            float(gamma_db),
            eta_transform(family, gamma),
        ])
    return ["z", "psi_at_minus_z", "s_at_minus_z", "m_hat", "gamma_db",
            "eta"], table_rows


def _run_verify(params, seed):
    from . import acceptance
    results = acceptance.run_all()
    table_rows = []
    for res in results:
        for check in res.checks:
            table_rows.append([res.id, check.name, check.measured,
                               check.tolerance, int(check.passed)])
    return ["criterion", "check", "measured", "tolerance", "passed"], table_rows


_RUNNERS = {
    "loss-curve": _run_loss_curve,
    "loss-convergence": _run_loss_convergence,
    "deviation-sweep": _run_deviation_sweep,
    "product-additivity": _run_product_additivity,
    "monotonicity": _run_monotonicity,
    "transforms": _run_transforms,
    "verify": _run_verify,
}


def run_experiment(config):
    """Execute a validated config and return its ResultTable."""
    errors = config.validate()
    if errors:
        raise ValueError("invalid config: " + "; ".join(errors))
    seed = int(config.params.get("master_seed", 20260808))
    start = time.monotonic()
    columns, rows = _RUNNERS[config.experiment](config.params, seed)
    meta = _metadata(config, seed)
    meta["wall_clock_s"] = time.monotonic() - start
    return ResultTable(columns=columns, rows=rows, metadata=meta)


def _format_cell(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def emit(table, path, fmt):
    """Write a ResultTable as CSV (header + rows) or JSON (metadata + rows)."""
    if fmt == "csv":
        lines = [",".join(table.columns)]
        for row in table.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        text = "\n".join(lines) + "\n"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        return
    if fmt == "json":
        payload = {
            "metadata": table.metadata,
            "columns": table.columns,
            "rows": [dict(zip(table.columns, row)) for row in table.rows],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
        return
    raise ValueError(f"unknown format {fmt!r}")


def load_table(path):
    """Re-read a JSON table emitted by ``emit`` (bit-exact round trip)."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    columns = payload["columns"]
    rows = [[obj[c] for c in columns] for obj in payload["rows"]]
    return ResultTable(columns=columns, rows=rows, metadata=payload["metadata"])

"""Command-line experiment driver.

Usage::

    ridgelet-prior <experiment> [--config FILE] [--seed N] [--out DIR]

Each experiment writes CSV files (see :mod:`ridgelet_prior.output`) into the
output directory and exits non-zero on any error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .activations import check_reconstruction
from .config import EXPERIMENTS, ConfigError, ExperimentConfig, config_from_mapping, read_mapping
from .datasets import DatasetError, load_csv, synthetic_image, synthetic_series
from .diagnostics import default_probe_grid, iid_bnn_covariance, mrmse_report, ridgelet_bnn_covariance
from .gp import GPModel, gp_posterior, sample_paths
from .inference import IIDPriorSpec, RegressionProblem, RidgeletPriorSpec, posterior_predictive, run_posterior
from .kernels import gram
from .output import emit_plot_data, run_metadata
from .prior import sample_iid_network, sample_ridgelet_network
from .rng import derive_seed

log = logging.getLogger(__name__)

__all__ = ["run_experiment", "main", "probe_grid", "extrapolation_grid"]


def probe_grid(cfg: ExperimentConfig) -> np.ndarray:
    if cfg.d == 1:
        return np.linspace(-cfg.x_half, cfg.x_half, cfg.probe_points).reshape(-1, 1)
    return default_probe_grid(cfg.d, cfg.x_half)


def extrapolation_grid(n_train: int, fraction: float, x_half: float = 5.0) -> np.ndarray:
    """Points beyond ``x_half`` continuing the training spacing ``2 x_half / (n - 1)``."""
    step = 2.0 * x_half / (n_train - 1)
    k = np.arange(1, int(round(fraction * (n_train - 1))) + 1)
    return x_half + k * step


def _gaussian_bump(x):
    return np.exp(-0.5 * np.asarray(x, dtype=float) ** 2)


def _priors(cfg: ExperimentConfig) -> list[str]:
    return ["ridgelet", "iid"] if cfg.prior == "both" else [cfg.prior]


class _Writer:
    def __init__(self, cfg: ExperimentConfig, out: Path):
        self.meta = run_metadata(cfg.digest(), cfg.seed)
        self.out = out
        self.paths: list[Path] = []

    def __call__(self, name, records, schema):
        self.paths.append(emit_plot_data(records, schema, self.out / name, self.meta))


# ---------------------------------------------------------------------------
# experiments


def _sample_prior(cfg, write):
    grid = probe_grid(cfg)
    xcols = ["x"] if cfg.d == 1 else [f"x{i + 1}" for i in range(cfg.d)]
    schema = xcols + [f"path_{k}" for k in range(cfg.n_paths)]
    cov, mean, act = cfg.covariance(), cfg.mean_model(), cfg.activation_pair()
    gp = sample_paths(GPModel(cov, mean), grid, cfg.n_paths, derive_seed(cfg.seed, "gp"))
    write("gp_paths.csv", np.column_stack([grid, gp.T]).tolist(), schema)
    rule = cfg.input_rule() if "ridgelet" in _priors(cfg) else None
    K = gram(cov, rule.nodes) if rule is not None else None
    for kind in _priors(cfg):
        for N in cfg.N:
            paths = []
            for k in range(cfg.n_paths):
                # the path index alone sets the seed: weight nodes are shared across N
                s = derive_seed(cfg.seed, "path", k)
                if kind == "ridgelet":
                    net = sample_ridgelet_network(mean, cov, rule, act, [N] * cfg.hidden_layers,
                                                  cfg.sigma_w, cfg.sigma_b, s, K=K)
                else:
                    net = sample_iid_network(N, cfg.sigma_w0, cfg.sigma_b0, cfg.sigma_w1, act, s, cfg.d)
                paths.append(net(grid))
            write(f"prior_paths_{kind}_N{N}.csv", np.column_stack([grid, np.array(paths).T]).tolist(), schema)


def _mrmse_rows(cfg, sigma_w, sigma_b):
    report = mrmse_report(cfg.mean_model(), cfg.covariance(), cfg.input_rule(), cfg.activation_pair(),
                          cfg.N, cfg.seeds, sigma_w, sigma_b, probe_grid(cfg))
    return report


def _mrmse(cfg, write):
    report = _mrmse_rows(cfg, cfg.sigma_w, cfg.sigma_b)
    write("mrmse.csv", [[r.N, r.seed, r.mrmse, r.argmax] for r in report.records], ["N", "seed", "mrmse", "argmax"])
    write("mrmse_summary.csv", [[N, *v] for N, v in report.summary().items()], ["N", "median", "q25", "q75"])


def _cov_rows(cfg, sigma_w, sigma_b, kinds):
    cov, act = cfg.covariance(), cfg.activation_pair()
    grid = probe_grid(cfg)
    origin = np.zeros((1, cfg.d))
    target = cov(grid, origin)[:, 0]
    rule = cfg.input_rule()
    K = gram(cov, rule.nodes)
    rows = []
    for kind in kinds:
        for N in cfg.N:
            for seed in cfg.seeds:
                if kind == "ridgelet":
                    c = ridgelet_bnn_covariance(cov, rule, act, N, sigma_w, sigma_b, grid, origin, cfg.n_nets, seed, K)
                else:
                    c = iid_bnn_covariance(N, cfg.sigma_w0, cfg.sigma_b0, cfg.sigma_w1, act, grid, origin,
                                           cfg.n_nets, seed, method="conditional")
                rows += [[kind, N, seed, *grid[i], c[i], target[i]] for i in range(grid.shape[0])]
    return rows


def _xcols(cfg):
    return ["x"] if cfg.d == 1 else [f"x{i + 1}" for i in range(cfg.d)]


def _cov_curve(cfg, write):
    rows = _cov_rows(cfg, cfg.sigma_w, cfg.sigma_b, _priors(cfg))
    write("cov_curve.csv", rows, ["prior", "N", "seed", *_xcols(cfg), "bnn_cov", "gp_cov"])


def _reconstruct(cfg, write):
    if cfg.d != 1:
        raise ConfigError("reconstruct supports d = 1 only")
    rows, summary = [], []
    for row in cfg.schedule:
        sw, sb, N = row[:3]
        D = row[3] if len(row) > 3 else cfg.D
        errs = [check_reconstruction(cfg.activation_pair(), _gaussian_bump, sw, sb, D, N, seed,
                                     cfg.S, cfg.x_half, cfg.probe_points) for seed in cfg.seeds]
        rows += [[sw, sb, N, D, seed, e] for seed, e in zip(cfg.seeds, errs)]
        summary.append([sw, sb, N, D, float(np.median(errs))])
    write("reconstruct.csv", rows, ["sigma_w", "sigma_b", "N", "D", "seed", "sup_error"])
    write("reconstruct_summary.csv", summary, ["sigma_w", "sigma_b", "N", "D", "median_sup_error"])


def _sweep(cfg, write):
    mrows, crows = [], []
    for sw, sb in cfg.bandwidths:
        report = _mrmse_rows(cfg, sw, sb)
        mrows += [[sw, sb, r.N, r.seed, r.mrmse] for r in report.records]
        crows += [[sw, sb, *r[1:]] for r in _cov_rows(cfg, sw, sb, ["ridgelet"])]
    write("sweep_mrmse.csv", mrows, ["sigma_w", "sigma_b", "N", "seed", "mrmse"])
    write("sweep_cov.csv", crows, ["sigma_w", "sigma_b", "N", "seed", *_xcols(cfg), "bnn_cov", "gp_cov"])


def _prior_spec(cfg, kind, N, rule):
    act = cfg.activation_pair()
    if kind == "ridgelet":
        return RidgeletPriorSpec(cfg.covariance(), rule, act, N, cfg.sigma_w, cfg.sigma_b)
    return IIDPriorSpec(N, act, cfg.sigma_w0, cfg.sigma_b0, cfg.sigma_w1)


def _fit(cfg, kind, N, x, y, rule, write, tag):
    problem = RegressionProblem(x, y, _prior_spec(cfg, kind, N, rule), cfg.noise_sd, cfg.mean_model())
    chain = run_posterior(problem, cfg.n_samples, cfg.burn_in, cfg.thin, derive_seed(cfg.seed, "chain", kind))
    trace = [[kind, N, i, ll, s] for i, (ll, s) in enumerate(zip(chain.loglik_trace, chain.shrink_counts))]
    write(f"trace_{tag}_{kind}_N{N}.csv", trace, ["prior", "N", "iteration", "loglik", "shrinks"])
    return chain


def _regress(cfg, write):
    if cfg.dataset is None:
        raise DatasetError("regress needs a dataset (a CSV path or synthetic-co2 / synthetic-airline)")
    if cfg.d != 1:
        raise ConfigError("regress supports d = 1 only")
    if cfg.dataset.startswith("synthetic-"):
        data = synthetic_series(cfg.dataset.removeprefix("synthetic-"), cfg.seed)
    else:
        data = load_csv(cfg.dataset, cfg.x_columns[:1], cfg.y_column, standardize=True)
    x = data.x
    grid = np.concatenate([np.sort(x[:, 0]), extrapolation_grid(data.n, cfg.extrapolate, cfg.x_half)])
    gm, gv = gp_posterior(GPModel(cfg.covariance(), cfg.mean_model()), x, data.y, cfg.noise_sd, grid)
    half = 1.959963984540054 * np.sqrt(gv)
    rows = [["gp", 0, g, m, m - h, m + h] for g, m, h in zip(grid, gm, half)]
    rule = cfg.input_rule()
    for kind in _priors(cfg):
        for N in cfg.N:
            chain = _fit(cfg, kind, N, x, data.y, rule, write, "regress")
            mean, (lo, hi) = posterior_predictive(chain, grid)
            rows += [[kind, N, g, m, a, b] for g, m, a, b in zip(grid, mean, lo, hi)]
    write("predictive.csv", rows, ["model", "N", "x", "mean", "lo", "hi"])


def _inpaint(cfg, write):
    if cfg.dataset is None:
        raise DatasetError("inpaint needs a dataset (a CSV path or synthetic-image)")
    if cfg.d != 2:
        raise ConfigError("inpaint requires d = 2")
    if cfg.dataset == "synthetic-image":
        X, clean, observed, noisy = synthetic_image(cfg.image_size, cfg.mask_half_width, cfg.noise_sd, cfg.seed)
    else:
        cols = cfg.x_columns if len(cfg.x_columns) == 2 else ["x1", "x2"]
        data = load_csv(cfg.dataset, cols, cfg.y_column, standardize=True)
        X, clean = data.x, data.y
        observed = np.max(np.abs(X), axis=1) >= cfg.mask_half_width
        noisy = clean + cfg.noise_sd * np.random.default_rng(derive_seed(cfg.seed, "pixel-noise")).standard_normal(clean.size)
    x_obs, y_obs = X[observed], noisy[observed]
    gm, _ = gp_posterior(GPModel(cfg.covariance(), cfg.mean_model()), x_obs, y_obs, cfg.noise_sd, X)
    rows = [["truth", 0, *X[i], clean[i], bool(observed[i])] for i in range(X.shape[0])]
    rows += [["gp", 0, *X[i], gm[i], bool(observed[i])] for i in range(X.shape[0])]
    rule = cfg.input_rule()
    for kind in _priors(cfg):
        for N in cfg.N:
            chain = _fit(cfg, kind, N, x_obs, y_obs, rule, write, "inpaint")
            mean, _ = posterior_predictive(chain, X)
            rows += [[kind, N, *X[i], mean[i], bool(observed[i])] for i in range(X.shape[0])]
    write("inpaint.csv", rows, ["model", "N", "x1", "x2", "mean", "observed"])


_RUNNERS = {
    "sample-prior": _sample_prior,
    "mrmse": _mrmse,
    "cov-curve": _cov_curve,
    "regress": _regress,
    "inpaint": _inpaint,
    "reconstruct": _reconstruct,
    "sweep": _sweep,
}


def run_experiment(cfg: ExperimentConfig, out_dir) -> list[Path]:
    """Run the experiment named by ``cfg.experiment``; returns the files written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    writer = _Writer(cfg, out)
    _RUNNERS[cfg.experiment](cfg, writer)
    return writer.paths


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="ridgelet-prior", description="Ridgelet-prior experiments.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", type=Path, help="flat YAML config file")
    parser.add_argument("--seed", type=int, help="master seed (overrides the config)")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: ./out)")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        mapping = read_mapping(args.config) if args.config else {}
        mapping["experiment"] = args.experiment
        if args.seed is not None:
            mapping["seed"] = args.seed
        cfg = config_from_mapping(mapping)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        paths = run_experiment(cfg, args.out)
    except (ConfigError, DatasetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Command-line surface: simulate / fit / cv / eval / theory.

Runs are driven by an INI-style config file plus a few overriding flags.
All numeric output is printed with 17 significant digits so files
round-trip 64-bit floats losslessly, and every command is deterministic
given (config, seed), independent of the parallelism degree.

Exit codes: 0 success, 2 configuration or input error, 3 numeric failure,
4 capacity error.
"""
import argparse
import configparser
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import evaluate, simulate, solver, theory
from .errors import CapacityError, InvalidInputError, NumericError
from .evaluate import CvGrid
from .model import (
    CovarianceTriplet,
    Dataset,
    ParameterPair,
    RegularizationConfig,
    sample_covariances,
)
from .owlqn import OwlqnSettings
from .solver import FitSettings

_FMT = "%.17g"


# ---------------------------------------------------------------------------
# file formats


def _fmt(x):
    return _FMT % float(x)


def write_matrix(path, m, prefix):
    """CSV with a header row prefix1..prefixN and 17-digit values."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"{prefix}{j + 1}" for j in range(m.shape[1])])
        for row in m:
            writer.writerow([_fmt(v) for v in row])


def read_matrix(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InvalidInputError(f"{path}: empty file")
        rows = []
        for i, row in enumerate(reader, start=2):
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise InvalidInputError(f"{path}: bad value at row {i}: {exc}")
            if len(row) != len(header):
                raise InvalidInputError(
                    f"{path}: row {i} has {len(row)} columns, header has {len(header)}"
                )
    return np.asarray(rows, dtype=float)


def write_keyvalues(path, items):
    with open(path, "w") as fh:
        for key, val in items:
            if isinstance(val, float):
                val = _fmt(val)
            fh.write(f"{key} = {val}\n")


def load_dataset(data_dir, center=False):
    data_dir = Path(data_dir)
    x = read_matrix(data_dir / "X.csv")
    y = read_matrix(data_dir / "Y.csv")
    if center:
        x = x - x.mean(axis=0)
        y = y - y.mean(axis=0)
    truth = None
    noise = None
    if (data_dir / "omega_yx_true.csv").exists():
        truth = ParameterPair(
            omega_yy=read_matrix(data_dir / "omega_yy_true.csv"),
            omega_yx=read_matrix(data_dir / "omega_yx_true.csv"),
        )
    if (data_dir / "noise_cov.csv").exists():
        noise = read_matrix(data_dir / "noise_cov.csv")
    return Dataset(x=x, y=y, truth=truth, noise_cov=noise)


# ---------------------------------------------------------------------------
# config plumbing


def _getfloats(section, key, default=None):
    raw = section.get(key)
    if raw is None:
        if default is None:
            raise InvalidInputError(f"missing config key {key!r}")
        return default
    return tuple(float(v.strip()) for v in raw.split(",") if v.strip())


def load_config(path):
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise InvalidInputError(f"config file not found: {path}")
    return parser


def structure_matrix(name, p):
    name = (name or "first_diff").strip()
    if name == "first_diff":
        return simulate.first_diff_structure(p)
    if name == "identity":
        return np.eye(p)
    mat = read_matrix(name)
    if mat.shape != (p, p):
        raise InvalidInputError(
            f"structure file {name} has shape {mat.shape}, expected ({p}, {p})"
        )
    return mat


def penalty_config(cfg, p, override=None):
    sec = cfg["penalty"] if cfg.has_section("penalty") else {}
    get = lambda key, default: float(sec.get(key, default))
    params = {
        "lambda_": get("lambda", 0.0),
        "mu": get("mu", 0.0),
        "eta": get("eta", 0.0),
        "beta": get("beta", 1.0),
    }
    if override:
        params.update(override)
    allow = str(sec.get("allow_beta_below_one", "false")).lower() == "true"
    return RegularizationConfig(
        structure=structure_matrix(sec.get("structure", "first_diff"), p),
        allow_unguaranteed_beta=allow,
        **params,
    )


def solver_settings(cfg, variant=None, init=None):
    sec = cfg["solver"] if cfg.has_section("solver") else {}
    owl = OwlqnSettings(
        memory=int(sec.get("memory", 10)),
        max_iters=int(sec.get("max_iters", 500)),
        grad_tol=float(sec.get("grad_tol", 1e-6)),
        backtrack_factor=float(sec.get("backtrack_factor", 0.5)),
        max_line_search=int(sec.get("max_line_search", 50)),
    )
    return FitSettings(
        epsilon=float(sec.get("epsilon", 1e-4)),
        max_outer=int(sec.get("max_outer", 100)),
        variant=variant or sec.get("variant", "gengm"),
        init=init,
        owlqn=owl,
    )


def scenario_spec(cfg, seed=None):
    sec = cfg["simulate"]
    return simulate.ScenarioSpec(
        id=int(sec.get("scenario", 2)),
        p=int(sec.get("p", 100)),
        r=float(sec.get("r", 0.5)),
        n_train=int(sec.get("n_train", 150)),
        n_valid=int(sec.get("n_valid", 1000)),
        seed=seed if seed is not None else int(sec.get("seed", 0)),
    )


def cv_grid(cfg):
    sec = cfg["grid"]
    return CvGrid(
        lambdas=_getfloats(sec, "lambdas", (0.0,)),
        mus=_getfloats(sec, "mus"),
        etas=_getfloats(sec, "etas", (0.0,)),
        beta=float(sec.get("beta", 1.0)),
        folds=int(sec.get("folds", 2)),
    )


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args):
    cfg = load_config(args.config)
    spec = scenario_spec(cfg, args.seed)
    data = simulate.gen_scenario(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix(out / "X.csv", data.x, "x")
    write_matrix(out / "Y.csv", data.y, "y")
    write_matrix(out / "omega_yy_true.csv", data.truth.omega_yy, "c")
    write_matrix(out / "omega_yx_true.csv", data.truth.omega_yx, "c")
    write_matrix(out / "noise_cov.csv", data.noise_cov, "c")
    write_keyvalues(
        out / "manifest.txt",
        [
            ("scenario", spec.id),
            ("p", spec.p),
            ("q", spec.q),
            ("r", spec.r),
            ("n_train", spec.n_train),
            ("n_valid", spec.n_valid),
            ("seed", spec.seed),
        ],
    )
    print(f"wrote dataset (n={data.n}, p={spec.p}, q={spec.q}) to {out}")
    return 0


def _fit_once(data, cfg_parser, variant, settings_init=None, mu_override=None):
    cov = sample_covariances(data)
    if variant == "lasso":
        sec = cfg_parser["penalty"] if cfg_parser.has_section("penalty") else {}
        mu = mu_override if mu_override is not None else float(sec.get("mu", 0.0))
        b_hat = solver.fit_lasso_baseline(data, mu)
        return ("lasso", b_hat)
    init = settings_init
    if variant == "oracle":
        if data.truth is None:
            raise InvalidInputError("oracle variant needs the true parameter files")
        init = data.truth
    pcfg = penalty_config(cfg_parser, data.x.shape[1])
    settings = solver_settings(cfg_parser, variant=variant, init=init)
    res = solver.fit(cov, pcfg, settings)
    return ("theta", res)


def cmd_fit(args):
    cfg = load_config(args.config)
    data = load_dataset(args.data, center=args.center)
    variant = args.variant or (
        cfg["solver"].get("variant", "gengm") if cfg.has_section("solver") else "gengm"
    )
    kind, res = _fit_once(data, cfg, variant)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "lasso":
        write_matrix(out / "b_hat.csv", res, "c")
        print(f"wrote lasso coefficients to {out}")
        return 0
    write_matrix(out / "omega_yy_hat.csv", res.theta_hat.omega_yy, "c")
    write_matrix(out / "omega_yx_hat.csv", res.theta_hat.omega_yx, "c")
    write_keyvalues(
        out / "fit_summary.txt",
        [
            ("variant", variant),
            ("objective", res.objective),
            ("outer_iters", res.outer_iters),
            ("converged", res.converged),
        ],
    )
    print(
        f"fit: objective={res.objective:.6g} outer={res.outer_iters} "
        f"converged={res.converged}"
    )
    return 0


def cmd_cv(args):
    cfg = load_config(args.config)
    data = load_dataset(args.data, center=args.center)
    grid = cv_grid(cfg)
    p = data.x.shape[1]
    sec = cfg["penalty"] if cfg.has_section("penalty") else {}
    struct = structure_matrix(sec.get("structure", "first_diff") if sec else "first_diff", p)
    variant = args.variant or (
        cfg["solver"].get("variant", "gengm") if cfg.has_section("solver") else "gengm"
    )
    init = data.truth if variant == "oracle" else None
    settings = solver_settings(cfg, variant=variant, init=init)
    seed = args.seed if args.seed is not None else 0
    best, table = evaluate.cross_validate(data, struct, grid, settings, seed=seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "cv_table.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["lambda", "mu", "eta"]
            + [f"fold_{k + 1}" for k in range(grid.folds)]
            + ["mean_mspe", "valid"]
        )
        for cell in table:
            folds = [_fmt(v) for v in cell.fold_mspes]
            folds += ["nan"] * (grid.folds - len(folds))
            writer.writerow(
                [_fmt(cell.lambda_), _fmt(cell.mu), _fmt(cell.eta)]
                + folds
                + [_fmt(cell.mean_mspe), int(cell.valid)]
            )
    write_keyvalues(
        out / "best_config.txt",
        [
            ("lambda", best.lambda_),
            ("mu", best.mu),
            ("eta", best.eta),
            ("beta", best.beta),
        ],
    )
    print(f"cv best: lambda={best.lambda_:g} mu={best.mu:g} eta={best.eta:g}")
    return 0


def _mspe_of_lasso(b_hat, data):
    resid = data.y - data.x @ b_hat
    return float(np.sum(resid * resid)) / (data.y.shape[1] * data.n)


def _eval_one_rep(payload):
    """One replication of the scenario benchmark; pure in (payload)."""
    (cfg_path, seed, rep, variants, betas, use_cv) = payload
    cfg = load_config(cfg_path)
    spec = scenario_spec(cfg, seed)
    data = simulate.gen_scenario(spec, rep=rep)
    train, valid = simulate.split_train_valid(data, spec.n_train)
    p = spec.p
    sec = cfg["penalty"] if cfg.has_section("penalty") else {}
    struct = structure_matrix(sec.get("structure", "first_diff") if sec else "first_diff", p)
    grid = cv_grid(cfg) if use_cv else None

    rows = []
    for variant in variants:
        beta_axis = betas if variant in ("gengm", "oracle") else [1.0]
        for beta in beta_axis:
            if variant == "lasso":
                mus = grid.mus if grid else (float(sec.get("mu", 0.0)),)
                best_mu, best_err = None, math.inf
                for mu in mus:
                    b_hat = solver.fit_lasso_baseline(train, mu)
                    err = _mspe_of_lasso(b_hat, valid)
                    if err < best_err:
                        best_mu, best_err = mu, err
                rows.append((rep, "lasso", 1.0, 0.0, best_mu, 0.0, best_err))
                continue
            init = data.truth if variant == "oracle" else None
            settings = solver_settings(cfg, variant=variant, init=init)
            if use_cv:
                vgrid = CvGrid(
                    lambdas=grid.lambdas if variant not in ("spr",) else (0.0,),
                    mus=grid.mus,
                    etas=grid.etas if variant not in ("gm",) else (0.0,),
                    beta=beta,
                    folds=grid.folds,
                )
                best, _ = evaluate.cross_validate(
                    train, struct, vgrid, settings, seed=(seed, rep)
                )
                pcfg = best
            else:
                pcfg = penalty_config(cfg, p, override={"beta": beta})
            res = solver.fit(sample_covariances(train), pcfg, settings)
            err = evaluate.mspe(res.theta_hat, valid)
            rows.append((rep, variant, beta, pcfg.lambda_, pcfg.mu, pcfg.eta, err))
    return rows


def cmd_eval(args):
    cfg = load_config(args.config)
    sec = cfg["eval"] if cfg.has_section("eval") else {}
    experiment = sec.get("experiment", "scenario_mspe")
    seed = args.seed if args.seed is not None else int(sec.get("seed", 0))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    if experiment == "scenario_mspe":
        reps = int(sec.get("replications", 10))
        variants = [v.strip() for v in sec.get("variants", "gm,gengm").split(",")]
        betas = [float(b) for b in sec.get("betas", "2").split(",")]
        use_cv = str(sec.get("use_cv", "true")).lower() == "true"
        payloads = [
            (args.config, seed, rep, variants, betas, use_cv) for rep in range(reps)
        ]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_eval_one_rep, payloads))
        else:
            results = [_eval_one_rep(pl) for pl in payloads]
        with open(out / "mspe_table.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["replication", "variant", "beta", "lambda", "mu", "eta", "mspe"]
            )
            for rows in results:
                for rep, variant, beta, lam, mu, eta, err in rows:
                    writer.writerow(
                        [rep, variant, _fmt(beta), _fmt(lam), _fmt(mu), _fmt(eta), _fmt(err)]
                    )
        print(f"wrote {out / 'mspe_table.csv'}")
        return 0

    if experiment == "selection":
        source = sec.get("data", "weather")
        if source == "weather":
            data = simulate.gen_weather_like(seed=int(sec.get("weather_seed", 0)))
        else:
            data = load_dataset(source, center=args.center)
        reps = int(sec.get("repetitions", 100))
        subsample = int(sec.get("subsample", 25))
        threshold = float(sec.get("threshold", 0.5))
        betas = [float(b) for b in sec.get("betas", "1").split(",")]
        p = data.x.shape[1]
        for beta in betas:
            pcfg = penalty_config(cfg, p, override={"beta": beta})
            settings = solver_settings(cfg)
            sel = evaluate.selection_frequency(
                data, pcfg, settings, reps, subsample, seed=seed, threshold=threshold
            )
            freq = sel.frequencies()
            kept = sel.retained()
            name = out / f"selection_frequency_beta{beta:g}.csv"
            with open(name, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(
                    ["response", "predictor", "count", "repetitions", "frequency", "retained"]
                )
                for i in range(sel.counts.shape[0]):
                    for j in range(sel.counts.shape[1]):
                        writer.writerow(
                            [
                                i + 1,
                                j + 1,
                                int(sel.counts[i, j]),
                                sel.repetitions,
                                _fmt(freq[i, j]),
                                int(kept[i, j]),
                            ]
                        )
            print(f"wrote {name}")
        return 0

    raise InvalidInputError(f"unknown eval experiment {experiment!r}")


def cmd_theory(args):
    cfg = load_config(args.config)
    sec = cfg["theory"] if cfg.has_section("theory") else {}
    data = load_dataset(args.data, center=args.center)
    if data.truth is None:
        raise InvalidInputError("theory command needs the true parameter files")
    p = data.x.shape[1]
    struct_name = sec.get("structure") or (
        cfg["penalty"].get("structure", "first_diff")
        if cfg.has_section("penalty")
        else "first_diff"
    )
    struct = structure_matrix(struct_name, p)

    from .model import population_covariances, to_regression

    sigma_xx_src = sec.get("sigma_xx", "identity")
    sigma_xx = np.eye(p) if sigma_xx_src == "identity" else read_matrix(sigma_xx_src)
    pop = population_covariances(data.truth, sigma_xx)

    support = int(np.sum(np.abs(data.truth.omega_yx) > 1e-12))
    q = data.truth.q
    # Active-set size covers both blocks of the true parameter.
    support += int(np.sum(np.abs(data.truth.omega_yy) > 1e-12))
    inputs = theory.TheoryInputs(
        truth=data.truth,
        sigma_xx=sigma_xx,
        sigma_yx=pop.s_yx,
        sigma_yy=pop.s_yy,
        structure=struct,
        beta=float(sec.get("beta", 1.0)),
        active_set_size=int(sec.get("active_set_size", support)),
        c_lambda=float(sec.get("c_lambda", 2.0)),
        d_lambda=float(sec.get("d_lambda", 4.0)),
        e_lambda=float(sec.get("e_lambda", 1.0)),
        c_mu=float(sec.get("c_mu", 2.0)),
        d_mu=float(sec.get("d_mu", 4.0)),
        e_mu=float(sec.get("e_mu", 1.0)),
        b3=float(sec.get("b3", 0.05)),
    )
    emp = sample_covariances(data)
    report = theory.build_report(inputs, emp)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    items = [
        ("omega_l_lower", report.omega_l_lower),
        ("omega_l_upper", report.omega_l_upper),
        ("omega_s_upper", report.omega_s_upper),
        ("s_l", report.s_l),
        ("ell_a", report.ell_a),
        ("ell_b", report.ell_b),
        ("r_star", report.r_star),
        ("r1", report.r_components[0]),
        ("r2", report.r_components[1]),
        ("r3", report.r_components[2]),
        ("r4", report.r_components[3]),
        ("lambda_lo", report.lambda_interval[0]),
        ("lambda_hi", report.lambda_interval[1]),
        ("mu_lo", report.mu_interval[0]),
        ("mu_hi", report.mu_interval[1]),
        ("eta_bar", report.eta_bar),
        ("lambda", report.lambda_),
        ("mu", report.mu),
        ("eta", report.eta),
        ("alpha", report.alpha),
        ("s_alpha", report.s_alpha),
        ("epsilon_s", report.epsilon_s),
        ("epsilon_l", report.epsilon_l),
        ("gamma", report.gamma),
        ("c_lambda_mu", report.c_lambda_mu),
        ("m_star", report.m_star),
        ("h_a", report.h_a),
        ("h_b", report.h_b),
        ("bound_value", report.bound_value),
        ("n0_partial", report.n0_partial),
        ("n0_complete", report.n0_complete),
    ]
    write_keyvalues(out / "theory_report.txt", items)
    print(f"wrote {out / 'theory_report.txt'}")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gengm",
        description="Partial graphical model estimation with a structural prior",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, runner in (
        ("simulate", cmd_simulate),
        ("fit", cmd_fit),
        ("cv", cmd_cv),
        ("eval", cmd_eval),
        ("theory", cmd_theory),
    ):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="INI config file")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--jobs", type=int, default=1)
        cmd.add_argument("--center", action="store_true", help="mean-center loaded data")
        cmd.add_argument(
            "--variant",
            choices=("gengm", "gm", "spr", "oracle", "lasso"),
            default=None,
        )
        if name in ("fit", "cv", "theory"):
            cmd.add_argument("--data", required=True, help="dataset directory")
        cmd.set_defaults(runner=runner)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.runner(args)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 4
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (InvalidInputError, configparser.Error, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

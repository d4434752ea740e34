"""Command-line interface.

Subcommands: simulate, identify, estimate, experiment,
verify-counterexample, bootstrap.  Exit codes: 0 success, 2 config
error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .counterexample import verify_counterexample
from .dataio import load_dataset, save_dataset, save_report
from .errors import ConfigError, DataError, NumericalError
from .experiments import ExperimentConfig, bootstrap, run_experiment, write_summary
from .gee import (NonOptimalF, NormalLinear, estimate_binary_2x2,
                  fit_propensity, optimal_f, solve_gee)
from .identify import (build_jacobian, case_study, sufficient_knowledge_search)
from .model import (ExpFamilySpec, MissingnessMechanism, TargetLawParams,
                    or_from_theta)
from .pseudolik import build_pairs, fit_groupwise, fit_pairwise_with_variance
from .simulate import (Binary2x2Model, BivariateNormalTarget, ScenarioConfig,
                       missingness_summary, simulate_dataset)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crisscross",
        description="Criss-cross MNAR model: simulation, identifiability, "
                    "and odds-ratio estimation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a dataset and write it as CSV")
    _common(p)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--rho", type=float, default=0.3)
    p.add_argument("--misspecified", action="store_true",
                   help="use the quadratic-in-x selection mechanism")
    p.add_argument("--binary", type=str, default=None, metavar="P11,P12,P21,P22",
                   help="simulate the 2x2 model with these cell probabilities")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("identify", help="Jacobian rank and sufficient knowledge sets")
    _common(p)
    p.add_argument("--case", type=str, default=None,
                   help="named case study (see --list-cases)")
    p.add_argument("--list-cases", action="store_true")
    p.add_argument("--max-set-size", type=int, default=2)
    p.set_defaults(handler=_cmd_identify)

    p = sub.add_parser("estimate", help="fit one method on a CSV dataset")
    _common(p)
    p.add_argument("data", type=str, help="CSV file with header x,y,r_x,r_y")
    p.add_argument("--method", choices=("pseudolik", "gee"), required=True)
    p.add_argument("--group-size", type=int, default=2)
    p.add_argument("--f", choices=("nonoptimal", "optimal"), default="nonoptimal")
    p.add_argument("--known", type=str, default=None, metavar="NAME=VALUE",
                   help="fix a mean-model coefficient, e.g. alpha=-1.4")
    p.add_argument("--sigma2", type=float, default=None,
                   help="known conditional variance of X|Y (optimal GEE, OR scale)")
    p.add_argument("--binary", action="store_true",
                   help="binary 2x2 workflow (requires --theta11)")
    p.add_argument("--theta11", type=float, default=None)
    p.set_defaults(handler=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a seeded replication study")
    _common(p)
    p.set_defaults(handler=_cmd_experiment)

    p = sub.add_parser("verify-counterexample",
                       help="check the two observed-equivalent full laws")
    _common(p)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--quad-tol", type=float, default=1e-9)
    p.set_defaults(handler=_cmd_counterexample)

    p = sub.add_parser("bootstrap", help="bootstrap SEs for one method")
    _common(p)
    p.add_argument("data", type=str)
    p.add_argument("--method", choices=("pseudolik", "gee"), required=True)
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--theta11", type=float, default=None)
    p.add_argument("--binary", action="store_true")
    p.set_defaults(handler=_cmd_bootstrap)

    return parser


def _common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="JSON configuration file")
    p.add_argument("--threads", type=int, default=1)


def _load_config(args) -> dict:
    if args.config is None:
        return {}
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bad config JSON: {exc}") from exc


def _mechanism(cfg: dict, misspecified=False) -> MissingnessMechanism:
    if "mechanism" in cfg:
        m = cfg["mechanism"]
        return MissingnessMechanism(tuple(m["rx_given_y"]), tuple(m["ry_given_x_rx"]))
    ry = (2.0, -1.0, 0.7, 0.2) if misspecified else (2.0, -1.0, 0.7)
    return MissingnessMechanism((-0.5, 1.0), ry)


def _cmd_simulate(args):
    cfg = _load_config(args)
    mech = _mechanism(cfg, getattr(args, "misspecified", False))
    if args.binary:
        cells = tuple(float(v) for v in args.binary.split(","))
        if len(cells) != 4:
            raise ConfigError("--binary needs four comma-separated cells")
        target = Binary2x2Model(*cells)
    elif "target" in cfg:
        target = BivariateNormalTarget(**cfg["target"])
    else:
        target = BivariateNormalTarget(rho=args.rho)
    sim = simulate_dataset(ScenarioConfig(target, mech, args.n, args.seed))
    summary = missingness_summary(sim.observed)
    if args.out:
        save_dataset(sim.observed, args.out)
    print(json.dumps({
        "n_total": sim.observed.n_total,
        "n_complete": sim.observed.n_complete,
        "pattern_counts": list(summary.counts),
        "pattern_frequencies": summary.frequencies.tolist(),
        "written_to": args.out,
    }, indent=2))


def _params_from_config(cfg: dict) -> tuple[ExpFamilySpec, TargetLawParams]:
    spec = ExpFamilySpec(cfg["family_x"], cfg["family_y_given_x"],
                         cfg.get("link", "canonical"),
                         cfg.get("known_nuisance", {}))
    t = cfg["theta"]
    params = TargetLawParams(
        alpha=t["alpha"], beta=t["beta"], phi=t.get("phi", 1.0),
        eta_x=t["eta_x"], phi_x=t.get("phi_x", 1.0),
        mu_x=t.get("mu_x"), sigma_x=t.get("sigma_x"))
    return spec, params


def _cmd_identify(args):
    from .identify import CASE_STUDIES
    if args.list_cases:
        print(json.dumps({name: c.summary for name, c in CASE_STUDIES.items()},
                         indent=2))
        return
    cfg = _load_config(args)
    if args.case is not None or "case" in cfg:
        case = case_study(args.case or cfg["case"])
        theta = cfg.get("theta")
        if theta is None:
            theta = case.random_theta(np.random.default_rng(args.seed))
        support = cfg.get("support_points", case.default_support)
        report = case.build(theta, support)
        verdict = case.verdict()
    elif cfg:
        spec, params = _params_from_config(cfg)
        support = cfg.get("support_points")
        if support is None:
            raise ConfigError("generic identify configs need support_points")
        report = build_jacobian(spec, params, support)
        from .identify import full_law_verdict
        verdict = full_law_verdict(spec)
    else:
        raise ConfigError("identify needs --case or a --config file")
    report = sufficient_knowledge_search(report, args.max_set_size)
    payload = {
        "param_names": list(report.param_names),
        "j_matrix": report.j_matrix.tolist(),
        "singular_values": report.singular_values.tolist(),
        "numerical_rank": report.numerical_rank,
        "full_rank": report.full_rank,
        "n_equations": report.n_equations,
        "k": report.k,
        "dim_theta": report.dim_theta,
        "sufficient_sets": [list(s) for s in report.sufficient_sets],
        "full_law": {
            "exp_family_conditional": verdict.exp_family_conditional,
            "completeness_holds": verdict.completeness_holds,
            "notes": verdict.notes,
        },
    }
    if args.out:
        save_report(payload, args.out)
    print(json.dumps(payload, indent=2))


def _parse_known(spec: str | None) -> dict:
    if not spec:
        return {}
    name, _, value = spec.partition("=")
    if not value:
        raise ConfigError("--known expects NAME=VALUE")
    return {name.strip(): float(value)}


def _cmd_estimate(args):
    data = load_dataset(args.data)
    payload: dict = {"n_total": data.n_total, "n_complete": data.n_complete}
    if args.method == "pseudolik":
        if args.group_size == 2:
            res = fit_pairwise_with_variance(data)
            payload.update({
                "theta_hat": res.theta_hat, "se": res.se,
                "a_hat": res.a_hat, "b_hat": res.b_hat,
                "sandwich_var": res.sandwich_var,
                "iterations": res.iterations, "converged": res.converged,
                "ties_dropped": build_pairs(data).ties_dropped,
            })
            or_point, or_se = or_from_theta(res.theta_hat,
                                            res.sandwich_var / res.n_complete)
            payload["or_unit_contrast"] = {"point": or_point, "se": or_se}
        else:
            res = fit_groupwise(data, args.group_size)
            payload.update({"theta_hat": res.theta_hat,
                            "group_size": res.group_size,
                            "iterations": res.iterations,
                            "converged": res.converged})
            payload["or_unit_contrast"] = {"point": float(np.exp(res.theta_hat))}
    elif args.binary:
        if args.theta11 is None:
            raise ConfigError("binary estimation needs --theta11")
        pi_model = fit_propensity(data)
        weight = NonOptimalF()
        res = estimate_binary_2x2(data, args.theta11, pi_model, weight)
        payload.update({
            "theta11": res.theta11,
            "cells": {"theta12": res.cells[0], "theta21": res.cells[1],
                      "theta22": res.cells[2]},
            "log_or": res.log_odds_ratio, "log_or_se": res.log_odds_ratio_se,
            "converged": res.gee.converged, "iterations": res.gee.iterations,
        })
    else:
        known = _parse_known(args.known)
        model = NormalLinear(known=known, sigma2=args.sigma2)
        pi_model = fit_propensity(data)
        if args.f == "optimal":
            if args.sigma2 is None:
                raise ConfigError("optimal GEE needs --sigma2")
            pilot_res = solve_gee(data, model, pi_model, NonOptimalF())
            if not pilot_res.converged:
                raise NumericalError("pilot (non-optimal) GEE did not converge")
            weight = optimal_f(data, model, pi_model, pilot_res.theta_hat)
        else:
            weight = NonOptimalF()
        res = solve_gee(data, model, pi_model, weight)
        payload.update({
            "estimates": dict(zip(res.param_names, res.theta_hat.tolist())),
            "residual_norm": res.residual_norm,
            "iterations": res.iterations, "converged": res.converged,
            "propensity": {"coefficients": pi_model.coefficients.tolist(),
                           "converged": pi_model.converged,
                           "separation": pi_model.separation_flag},
        })
        if res.sandwich_cov is not None:
            payload["se"] = dict(zip(res.param_names, res.se().tolist()))
            payload["sandwich_cov"] = res.sandwich_cov.tolist()
        if args.sigma2 is not None and "beta" in payload["estimates"]:
            theta = payload["estimates"]["beta"] / args.sigma2
            se_b = payload.get("se", {}).get("beta", 0.0)
            or_point, or_se = or_from_theta(theta, (se_b / args.sigma2) ** 2)
            payload["or_unit_contrast"] = {"point": or_point, "se": or_se}
    if args.out:
        save_report(payload, args.out)
    print(json.dumps(payload, indent=2, default=float))


def _cmd_experiment(args):
    cfg = _load_config(args)
    if not cfg:
        raise ConfigError("experiment needs a --config JSON file")
    try:
        config = ExperimentConfig(
            sweep=cfg["sweep"], values=tuple(cfg["values"]),
            methods=tuple(cfg.get("methods", ("pseudolik", "gee_nonoptimal",
                                              "gee_optimal"))),
            replicates=int(cfg.get("replicates", 100)),
            base_seed=int(cfg.get("base_seed", args.seed)),
            n_total=int(cfg.get("n_total", 1000)),
            known=dict(cfg.get("known", {})),
            threads=args.threads,
        )
    except KeyError as exc:
        raise ConfigError(f"experiment config missing key {exc}") from exc
    summary = run_experiment(config)
    if args.out:
        write_summary(summary, args.out)
    rows = summary.tidy_records()
    print(json.dumps(rows[: min(len(rows), 2000)], indent=2))


def _cmd_counterexample(args):
    report = verify_counterexample(step=args.step, quad_tol=args.quad_tol)
    payload = {
        "max_abs_discrepancy": report.max_abs_discrepancy,
        "target_law_variances": list(report.target_law_variances),
        "observed_laws_match": report.observed_laws_match,
        "grid": list(report.grid),
    }
    if args.out:
        save_report(payload, args.out)
    print(json.dumps(payload, indent=2))


def _cmd_bootstrap(args):
    data = load_dataset(args.data)
    if args.method == "pseudolik":
        def fit(d):
            res = fit_pairwise_with_variance(d)
            return {"theta": res.theta_hat, "log_or": res.theta_hat}
    elif args.binary:
        if args.theta11 is None:
            raise ConfigError("binary bootstrap needs --theta11")

        def fit(d):
            res = estimate_binary_2x2(d, args.theta11, fit_propensity(d),
                                      NonOptimalF())
            return {"log_or": res.log_odds_ratio,
                    "theta12": res.cells[0], "theta21": res.cells[1],
                    "theta22": res.cells[2]}
    else:
        def fit(d):
            res = solve_gee(d, NormalLinear(), fit_propensity(d), NonOptimalF())
            return dict(zip(res.param_names, res.theta_hat.tolist()))

    boot = bootstrap(data, fit, args.resamples, args.seed)
    payload = {"se": boot.se, "n_failed": boot.n_failed,
               "n_resamples": boot.n_resamples}
    if args.out:
        save_report(payload, args.out)
    print(json.dumps(payload, indent=2))


if __name__ == "__main__":
    sys.exit(main())

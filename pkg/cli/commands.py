"""
Command Handlers
The argparse front end and one thin handler per subcommand; every handler maps
its arguments onto library operations and returns the report payload
"""
import argparse
import logging
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from analysis.gaussian import has_gaussian_component, limit_deviation, remainder_profile
from analysis.inversion import DEFAULT_ALPHA_GRID, approx_compare, kolmogorov_distance
from analysis.metrics import backward_bound, clt_bound_check, lambda_r, matched_gaussian
from analysis.moments import METHODS, CLOSED_FORM, kurtosis_scaling_check, moments
from cli.ingest import ingest
from core import laplace_core
from core.cf_core import (FAMILY_ALIASES, convolve, default_t_grid, family_fields, family_from_name,
                          positive_grid, root_rescale, sum_rescale)
from core.errors import InputError, NoFiniteMomentError, BOUND_FAILURE_EXIT
from core.limits import sup_deviation

logger = logging.getLogger(__name__)

CF_FAMILIES = ("gauss", "stable", "symgamma", "cpoisson") + tuple(FAMILY_ALIASES)
CF_PARAMS = ("variance", "alpha", "scale", "shape", "rate", "jump")
LT_FAMILIES = ("gamma", "poisson", "stable", "drift")
LT_PARAMS = ("shape", "rate", "alpha", "scale", "sigma")

# RunConfig fields settable from the command line
CONFIG_FLAGS = (
    "t_max", "grid_size", "t_schedule", "s_schedule", "s_max", "s_grid_size", "tol", "tie_tol",
    "lambda_t_min", "lambda_t_max", "lambda_grid_size", "small_t_policy", "quad_nodes",
    "eps_tail", "output",
)


@dataclass
class Outcome:
    """What a handler hands back to the coordinator"""
    result: dict
    summary: list = field(default_factory=list)
    exit_code: int = 0


class IddlabParser(argparse.ArgumentParser):
    """Usage errors exit 1 with the usage text on stderr"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one number")
    return values


def parse_component(text):
    """'name:key=value,key=value' -> (name, {key: float})"""
    name, _, rest = text.partition(":")
    name = name.strip()
    if not name:
        raise InputError(f"component {text!r} has no family name")
    params = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"component parameter {item!r} is not key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"component parameter {key.strip()!r} is not a number: {value!r}") from None
    return name, params


def _construct(factory, name, params):
    try:
        return factory(name, **params)
    except TypeError as e:
        raise InputError(f"{name}: missing or invalid parameters ({e})") from None


def build_cf(args, bus):
    """The CF described by --samples or --family plus repeated --convolve"""
    sample_info = None
    if getattr(args, "samples", None):
        if args.family:
            raise InputError("--samples and --family are mutually exclusive")
        cf, sample_info = ingest(args.samples)
        bus.post("ingest", "samples", sample_info)
    elif args.family:
        params = {k: getattr(args, k) for k in family_fields(args.family) if getattr(args, k) is not None}
        cf = _construct(family_from_name, args.family, params)
    else:
        raise InputError("a law is required: pass --family or --samples")
    for component in args.convolve or ():
        name, params = parse_component(component)
        cf = convolve(cf, _construct(family_from_name, name, params))
    return cf, sample_info


def build_lt(args):
    params = {k: getattr(args, k) for k in laplace_core.family_fields(args.family)
              if getattr(args, k) is not None}
    lt = _construct(laplace_core.family_from_name, args.family, params)
    for component in args.convolve or ():
        name, params = parse_component(component)
        lt = laplace_core.multiply(lt, _construct(laplace_core.family_from_name, name, params))
    return lt


def cmd_detect(args, config, bus):
    cf, sample_info = build_cf(args, bus)
    decision = has_gaussian_component(cf, config.tol, config.t_schedule)
    estimate = decision.estimate
    if not estimate.monotone:
        bus.post("detect", "non-monotone", {"values": list(estimate.values)})
    profile = remainder_profile(cf, estimate.a_hat, positive_grid(config.t_max, config.grid_size))
    result = {
        "gaussian_component": decision.has_component,
        "a_hat": estimate.a_hat,
        "component_variance": estimate.component_variance,
        "error_bound": estimate.error_bound,
        "t_used": estimate.t_used,
        "monotone": estimate.monotone,
        "schedule": list(estimate.schedule),
        "values": list(estimate.values),
        "remainder": {"t": [t for t, _ in profile], "r": [r for _, r in profile]},
    }
    if sample_info is not None:
        result["samples"] = sample_info
    summary = [
        ("Gaussian component", "yes" if decision.has_component else "no"),
        ("a_hat", f"{estimate.a_hat:.6g} +/- {estimate.error_bound:.2g}"),
    ]
    return Outcome(result, summary)


def cmd_rescale(args, config, bus):
    cf, _ = build_cf(args, bus)
    grid = default_t_grid(config.t_max, config.grid_size)
    if args.mode == "root":
        transformed = root_rescale(cf, args.m)
        deviation = limit_deviation(cf, args.m, config.t_max, config.grid_size,
                                    tol=config.tol, t_schedule=config.t_schedule).value
    else:
        transformed = sum_rescale(cf, args.m)
        try:
            reference = matched_gaussian(cf)
        except NoFiniteMomentError as e:
            bus.post("rescale", "no-clt-limit", str(e))
            deviation = None
        else:
            deviation = sup_deviation(transformed._value(grid), reference._value(grid), grid,
                                      reference.variance / 2.0).value
    values = transformed._value(grid)
    result = {
        "m": args.m,
        "mode": args.mode,
        "t": grid,
        "values": values,
        "deviation": deviation,
    }
    summary = [("m", args.m), ("mode", args.mode), ("deviation from limit", deviation)]
    if args.check_fixed_point:
        fixed = float(np.max(np.abs(values - cf._value(grid))))
        result["fixed_point_deviation"] = fixed
        summary.append(("fixed-point deviation", fixed))
    return Outcome(result, summary)


def cmd_kurtosis(args, config, bus):
    cf, _ = build_cf(args, bus)
    check = kurtosis_scaling_check(cf, args.m, args.method)
    if check.absolute:
        bus.post("kurtosis", "absolute-error", "m * kappa(1) is 0; relative_error holds the absolute gap")
    result = {
        "m": check.m,
        "method": check.method,
        "kappa_1": check.kappa_1,
        "kappa_m": check.kappa_m,
        "m_times_kappa_1": check.m_times_kappa_1,
        "relative_error": check.relative_error,
        "moments_1": check.moments_1.to_dict(),
        "moments_m": check.moments_m.to_dict(),
    }
    return Outcome(result, [("kappa(m)", check.kappa_m), ("m kappa(1)", check.m_times_kappa_1),
                            ("relative error", check.relative_error)])


def _note_lambda(bus, source, report):
    params = report.parameters
    if params.get("extensions"):
        bus.post(source, "grid-extension", {
            "extensions": params["extensions"],
            "effective_t_min": params["effective_t_min"],
        })
    if params.get("diverged"):
        bus.post(source, "divergence", "ratio still peaks at the grid edge; lambda_r is infinite")


def cmd_distance(args, config, bus):
    cf, _ = build_cf(args, bus)
    if args.other:
        name, params = parse_component(args.other)
        other = _construct(family_from_name, name, params)
    else:
        other = matched_gaussian(cf)
    if args.metric == "lambda":
        report = lambda_r(cf, other, config.lambda_config(args.r))
        _note_lambda(bus, "distance", report)
    else:
        report = kolmogorov_distance(cf, other, config.quadrature(args.truncation))
        bus.post("distance", "truncation", {"T": report.parameters["truncations"]})
    result = report.to_dict()
    result["parameters"]["against"] = other.describe()
    return Outcome(result, [("metric", report.metric), ("value", report.value)])


def cmd_bound_check(args, config, bus):
    cf, _ = build_cf(args, bus)
    lambda_config = config.lambda_config(args.r)
    if args.direction == "forward":
        check = clt_bound_check(cf, args.m, args.r, lambda_config)
    else:
        check = backward_bound(cf, args.m, args.r, lambda_config)
    if not check.applicable:
        bus.post("bound-check", "not-applicable", "lambda_r of the single summand is infinite")
    parameters = lambda_config.to_dict()
    parameters.update({"base_distance": check.base_distance, "variance": check.variance})
    result = {
        "direction": check.direction,
        "lhs": check.lhs,
        "rhs": check.rhs,
        "holds": check.holds,
        "applicable": check.applicable,
        "m": check.m,
        "r": check.r,
        "parameters": parameters,
    }
    exit_code = 0
    if args.assert_bound and not check.holds:
        exit_code = BOUND_FAILURE_EXIT
    summary = [("direction", check.direction), ("lhs", check.lhs), ("rhs", check.rhs),
               ("holds", check.holds)]
    return Outcome(result, summary, exit_code)


def cmd_laplace(args, config, bus):
    lt = build_lt(args)
    if args.action == "drift":
        estimate = laplace_core.estimate_drift(lt, config.s_schedule)
        if not estimate.monotone:
            bus.post("laplace", "non-monotone", {"values": list(estimate.values)})
        result = {
            "sigma_hat": estimate.sigma_hat,
            "error_bound": estimate.error_bound,
            "schedule": list(estimate.schedule),
            "values": list(estimate.values),
        }
        return Outcome(result, [("sigma_hat", estimate.sigma_hat)])
    if args.action == "support":
        decision = laplace_core.support_touches_zero(lt, config.tol, config.s_schedule)
        result = {
            "touches_zero": decision.touches_zero,
            "sigma_hat": decision.sigma_hat,
            "error_bound": decision.estimate.error_bound,
        }
        return Outcome(result, [("support touches zero", decision.touches_zero)])
    if args.m is None:
        raise InputError("laplace limit needs --m")
    S = args.S if args.S is not None else config.s_max
    deviation = laplace_core.limit_deviation_L(lt, args.m, S, config.s_grid_size, args.sigma_hat,
                                               config.tol, config.s_schedule)
    result = {
        "m": args.m,
        "sigma_hat": deviation.limit_coefficient,
        "deviation": deviation.value,
        "s": deviation.grid,
        "values": deviation.deviations,
    }
    return Outcome(result, [("m", args.m), ("sigma_hat", deviation.limit_coefficient),
                            ("deviation", deviation.value)])


def cmd_approx_compare(args, config, bus):
    cf, _ = build_cf(args, bus)
    report = approx_compare(
        cf,
        args.m,
        alpha_grid=args.alpha_grid or DEFAULT_ALPHA_GRID,
        scale_grid=args.scale_grid,
        quad=config.quadrature(args.truncation),
        tie_tol=config.tie_tol,
    )
    summary = [
        ("d_K gaussian", report.d_K_gaussian),
        ("d_K stable", f"{report.d_K_stable:.6g} (alpha={report.best_alpha:g}, c={report.best_scale:.6g})"),
        ("verdict", report.verdict),
    ]
    return Outcome(report.to_dict(), summary)


def cmd_empirical(args, config, bus):
    cf, sample_info = ingest(args.samples)
    grid = positive_grid(config.t_max, config.grid_size)
    result = dict(sample_info)
    result.update({
        "moments": moments(cf, CLOSED_FORM).to_dict(),
        "t": grid,
        "ecf": cf._value(grid),
    })
    nonpositive = int(np.count_nonzero(result["ecf"] <= 0))
    if nonpositive:
        bus.post("empirical", "non-positive", {"points": nonpositive})
    return Outcome(result, [("n", sample_info["n"]), ("mean", sample_info["mean"]),
                            ("variance", sample_info["variance"])])


def _common_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="JSON file of RunConfig values")
    parent.add_argument("--output", help="write the report here instead of stdout")
    parent.add_argument("-v", "--verbose", action="count", default=0)
    parent.add_argument("--quiet", action="store_true", help="no run summary on stderr")
    grids = parent.add_argument_group("grids and tolerances")
    grids.add_argument("--t-max", type=float)
    grids.add_argument("--grid-size", type=int)
    grids.add_argument("--t-schedule", type=_float_list)
    grids.add_argument("--s-schedule", type=_float_list)
    grids.add_argument("--s-max", type=float)
    grids.add_argument("--s-grid-size", type=int)
    grids.add_argument("--tol", type=float)
    grids.add_argument("--tie-tol", type=float)
    grids.add_argument("--lambda-t-min", type=float)
    grids.add_argument("--lambda-t-max", type=float)
    grids.add_argument("--lambda-grid-size", type=int)
    grids.add_argument("--small-t-policy", choices=("taylor-bound", "exclude"))
    grids.add_argument("--quad-nodes", type=int)
    grids.add_argument("--eps-tail", type=float)
    return parent


def _family_parent():
    parent = argparse.ArgumentParser(add_help=False)
    law = parent.add_argument_group("law")
    law.add_argument("--family", choices=CF_FAMILIES)
    for name in CF_PARAMS:
        law.add_argument(f"--{name}", type=float)
    law.add_argument("--convolve", action="append", metavar="FAMILY:KEY=VALUE,...",
                     help="multiply in another family's CF (repeatable)")
    law.add_argument("--samples", metavar="FILE", help="empirical CF of a sample file")
    return parent


def build_parser():
    parser = IddlabParser(prog="iddlab", description="Gaussian components of symmetric ID laws")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=IddlabParser)
    sub.required = True
    common = _common_parent()
    law = _family_parent()

    p = sub.add_parser("detect", parents=[common, law], help="Gaussian coefficient and component test")
    p.set_defaults(handler=cmd_detect)

    p = sub.add_parser("rescale", parents=[common, law], help="root- or sum-rescaled CF on the t grid")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--mode", choices=("root", "sum"), default="root")
    p.add_argument("--check-fixed-point", action="store_true")
    p.set_defaults(handler=cmd_rescale)

    p = sub.add_parser("kurtosis", parents=[common, law], help="kappa(m) against m kappa(1)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default=CLOSED_FORM)
    p.set_defaults(handler=cmd_kurtosis)

    p = sub.add_parser("distance", parents=[common, law], help="lambda_r or Kolmogorov distance")
    p.add_argument("--metric", choices=("lambda", "kolmogorov"), default="lambda")
    p.add_argument("--r", type=float, default=3.0)
    p.add_argument("--other", metavar="FAMILY:KEY=VALUE,...",
                   help="second law (default: the variance-matched Gaussian)")
    p.add_argument("--truncation", type=float)
    p.set_defaults(handler=cmd_distance)

    p = sub.add_parser("bound-check", parents=[common, law], help="forward or backward CLT-rate bound")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--r", type=float, default=3.0)
    p.add_argument("--direction", choices=("forward", "backward"), default="forward")
    p.add_argument("--assert", dest="assert_bound", action="store_true",
                   help=f"exit {BOUND_FAILURE_EXIT} when the bound fails")
    p.set_defaults(handler=cmd_bound_check)

    p = sub.add_parser("laplace", parents=[common], help="positive ID laws through Laplace transforms")
    p.add_argument("action", choices=("drift", "limit", "support"))
    p.add_argument("--family", choices=LT_FAMILIES, required=True)
    for name in LT_PARAMS:
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--convolve", action="append", metavar="FAMILY:KEY=VALUE,...")
    p.add_argument("--m", type=int)
    p.add_argument("--S", type=float, help="upper end of the s grid (default: s_max)")
    p.add_argument("--sigma-hat", type=float)
    p.set_defaults(handler=cmd_laplace)

    p = sub.add_parser("approx-compare", parents=[common, law], help="stable vs Gaussian approximation")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha-grid", type=_float_list)
    p.add_argument("--scale-grid", type=_float_list)
    p.add_argument("--truncation", type=float)
    p.set_defaults(handler=cmd_approx_compare)

    p = sub.add_parser("empirical", parents=[common], help="summary and ECF table of a sample file")
    p.add_argument("--samples", metavar="FILE", required=True)
    p.set_defaults(handler=cmd_empirical)
    return parser


def config_overrides(args):
    return {name: getattr(args, name, None) for name in CONFIG_FLAGS}


def command_name(args):
    if args.command == "laplace":
        return f"laplace {args.action}"
    return args.command


def format_value(value):
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return "inf" if math.isinf(value) else f"{value:.6g}"
    return str(value)

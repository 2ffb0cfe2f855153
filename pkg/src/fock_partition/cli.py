"""Command-line driver: ``fock-partition {verify,partition,state,channel}``.

Exit status is 0 when everything passes, 1 when a residual check fails and 2
for usage or parameter errors.  Output is deterministic: floats are printed with
17 significant digits, CSV uses LF line endings.
"""

import argparse
import math
import sys
from dataclasses import dataclass, field

from . import channels, partition, states, verify
from ._format import dumps_csv, dumps_json, fmt_float
from .errors import ConvergenceError, DomainError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

STATE_PARAMS = {
    "number": ("m",),
    "binomial": ("n", "sigma"),
    "negbinomial": ("s", "gamma"),
    "thermal": ("gamma",),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    output_format: str = "json"
    output_path: str = None


# --- parameter validation -----------------------------------------------------------------


def _require_int(params, name, low=0):
    value = params.get(name)
    if value is None:
        raise UsageError(f"--{name} is required")
    if value < low:
        raise UsageError(f"--{name} must be >= {low}, got {value}")
    return value


def _require_prob(params, name):
    value = params.get(name)
    if value is None:
        raise UsageError(f"--{name} is required")
    if not (0.0 < value < 1.0):
        raise UsageError(f"--{name} must lie in (0, 1), got {value}")
    return value


def _require_tol(value):
    if not (value > 0 and math.isfinite(value)):
        raise UsageError(f"tolerance must be positive and finite, got {value}")
    return value


def build_state(label, params):
    if label not in STATE_PARAMS:
        raise UsageError(f"unknown state label {label!r}; expected one of {', '.join(STATE_PARAMS)}")
    cutoff = params.get("cutoff")
    if label == "number":
        return states.number_state(_require_int(params, "m"), cutoff)
    if label == "binomial":
        return states.binomial_state(_require_int(params, "n"), _require_prob(params, "sigma"), cutoff)
    if label == "negbinomial":
        return states.negbinomial_state(_require_int(params, "s"), _require_prob(params, "gamma"), cutoff)
    return states.thermal_state(_require_prob(params, "gamma"), cutoff)


# --- commands ----------------------------------------------------------------------------


def _state_payload(state):
    mean, tail_bound = states.mean_photon(state)
    payload = state.to_dict()
    payload["mean_photon"] = mean
    payload["mean_photon_tail_bound"] = tail_bound
    return payload


def _state_csv(state):
    return dumps_csv(["level", "probability"], list(enumerate(state.probs)))


def cmd_verify(config):
    suite = config.params["suite"]
    if suite != "all" and suite not in verify.SUITES:
        raise UsageError(f"unknown suite {suite!r}; expected all or one of {', '.join(verify.SUITES)}")
    tol = _require_tol(config.params["tol"])
    grids = verify.load_grids(config.params.get("grids"))
    results = verify.run(suite, tol, grids)
    failed = [r for r in results if not r.passed]
    header = ["suite", "identity", "parameters", "residual", "tol", "status"]
    if config.output_format == "json":
        text = dumps_json({
            "suite": suite,
            "tol": tol,
            "passed": not failed,
            "checks": [dict(zip(header, r.row())) for r in results],
        })
    elif config.output_format == "csv":
        text = dumps_csv(header, [r.row() for r in results])
    else:
        rows = [(s, ident, par, fmt_float(res), fmt_float(t), st) for s, ident, par, res, t, st in
                (r.row() for r in results)]
        widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
        lines = ["  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip() for row in [header, *rows]]
        for r in failed:
            if r.error:
                lines.append(f"# {r.identity} {r.row()[2]}: {r.error}")
        summary = {name: all(r.passed for r in results if r.suite == name)
                   for name in dict.fromkeys(r.suite for r in results)}
        lines.extend(f"{name}: {'PASS' if ok else 'FAIL'}" for name, ok in summary.items())
        text = "\n".join(lines) + "\n"
    return text, EXIT_FAIL if failed else EXIT_OK


def cmd_partition(config):
    params = config.params
    family = params["family"]
    name = "sigma" if family == "bs" else "gamma"
    value = _require_prob(params, name)
    terms = _require_int(params, "terms", 1)
    levels = _require_int(params, "levels", 1)
    if family == "bs" and terms < levels:
        raise UsageError(f"binomial partition needs --terms >= --levels, got {terms} < {levels}")
    rows = partition.convergence_table(family, value, terms, levels)
    header = ["terms_used", "level", "partial_sum", "residual"]
    if config.output_format == "csv":
        return dumps_csv(header, rows), EXIT_OK
    final = [r for r in rows if r[0] == terms]
    return dumps_json({
        "family": family,
        name: value,
        "terms": terms,
        "levels": levels,
        "max_residual": max(r[3] for r in final),
        "rows": [dict(zip(header, r)) for r in rows],
    }), EXIT_OK


def cmd_state(config):
    state = build_state(config.params["label"], config.params)
    if config.output_format == "csv":
        return _state_csv(state), EXIT_OK
    return dumps_json(_state_payload(state)), EXIT_OK


def cmd_channel(config):
    params = config.params
    kt = params.get("kt")
    if kt is None or not (kt >= 0 and math.isfinite(kt)):
        raise UsageError(f"--kt must be finite and >= 0, got {kt}")
    source = build_state(params["label"], params)
    ch = channels.ChannelSpec(kt)
    damped = channels.damp_diagonal(source, ch)
    if config.output_format == "csv":
        return _state_csv(damped), EXIT_OK
    payload = {"kt": ch.kt, "survival": ch.survival, "input": source.to_dict(), "output": _state_payload(damped)}
    if source.label is states.StateLabel.NUMBER:
        # a number state decays into a binomial state with the survival as its parameter
        payload["binomial_match"] = {"n": source.params["m"], "sigma": ch.survival}
    return dumps_json(payload), EXIT_OK


COMMANDS = {"verify": cmd_verify, "partition": cmd_partition, "state": cmd_state, "channel": cmd_channel}


# --- argument parsing ----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_output(p, formats=("json", "csv"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def _add_state_args(p, positional=True):
    if positional:
        p.add_argument("label", help="number | binomial | negbinomial | thermal")
    else:
        p.add_argument("--state", dest="label", required=True, help="number | binomial | negbinomial | thermal")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--sigma", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--cutoff", type=int)


def make_parser():
    parser = _Parser(prog="fock-partition", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run identity suites and report residuals")
    p.add_argument("suite", help="all | " + " | ".join(verify.SUITES))
    p.add_argument("--tol", type=float, default=None,
                   help="base tolerance (default: $FOCK_PARTITION_TOL or 1e-10); each check scales it")
    p.add_argument("--grids", help="alternative grid file (JSON)")
    _add_output(p, ("text", "json", "csv"), "text")

    p = sub.add_parser("partition", help="convergence table of a partition of unity")
    p.add_argument("family", choices=("bs", "nbs"))
    p.add_argument("--sigma", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--terms", type=int, default=partition.DEFAULT_TERMS)
    p.add_argument("--levels", type=int, default=partition.DEFAULT_LEVELS)
    _add_output(p)

    p = sub.add_parser("state", help="construct and dump a diagonal state")
    _add_state_args(p)
    _add_output(p)

    p = sub.add_parser("channel", help="damp a state through the photon-loss channel")
    _add_state_args(p, positional=False)
    p.add_argument("--kt", type=float, required=True, help="dimensionless damping exposure kappa*t")
    _add_output(p)
    return parser


def parse_config(argv):
    args = vars(make_parser().parse_args(argv))
    command = args.pop("command")
    output_format = args.pop("format")
    output_path = args.pop("output")
    if command == "verify" and args["tol"] is None:
        args["tol"] = partition.default_tol()
    params = {k: v for k, v in args.items() if v is not None}
    return RunConfig(command, params, output_format, output_path)


def main(argv=None):
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
        text, status = COMMANDS[config.command](config)
    except UsageError as exc:
        print(f"fock-partition: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ConvergenceError, ArithmeticError) as exc:
        print(f"fock-partition: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        # e.g. an unreadable FOCK_PARTITION_TOL or grid file
        print(f"fock-partition: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if config.output_path:
        with open(config.output_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

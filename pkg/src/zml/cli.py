"""Command-line interface: one subcommand per operation, CSV or JSON on stdout."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields

from . import divisor_sums, laurent_residues, moment_transforms, oscillatory, phi_function, scaling_analysis
from .errors import BudgetError, DomainError, NonConvergenceError, PoleError, ValidationError, ZmlError
from .identities import run_identity_suite
from .parallel import set_threads
from .phi_function import ContourSpec, PolarArgument

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VALIDATION = 0, 2, 3, 4


@dataclass
class RunConfig:
    tol: float = 1e-6
    delta_min: float = 1e-3
    node_budget: int = 50_000_000
    threads: int = 0
    format: str | None = None
    out_path: str | None = None
    seed: int | None = None

    def validate(self):
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if not self.delta_min > 0:
            raise DomainError("delta_min must be positive")
        if not self.node_budget > 0:
            raise DomainError("node_budget must be positive")
        if self.threads < 0:
            raise DomainError("threads must be >= 0")
        if self.format not in (None, "csv", "json"):
            raise DomainError("format must be csv or json")


_CONFIG_TYPES = {f.name: f.type for f in fields(RunConfig)}


def read_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_TYPES:
                raise DomainError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    if key in ("tol", "delta_min"):
        return float(value)
    if key in ("node_budget", "threads", "seed"):
        return int(float(value))
    return str(value)


def build_config(args, env=None) -> RunConfig:
    """Defaults, then config file, then ZML_THREADS, then command-line flags."""
    env = os.environ if env is None else env
    values = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    if "ZML_THREADS" in env:
        values["threads"] = env["ZML_THREADS"]
    for key in _CONFIG_TYPES:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output


def _scalar(v):
    if isinstance(v, complex):
        return v
    if hasattr(v, "item"):
        return v.item()
    return v


def format_rows(rows: list[dict], fmt: str, seed=None) -> str:
    rows = [{k: _scalar(v) for k, v in r.items()} for r in rows]
    if seed is not None:
        rows = [dict(r, seed=seed) for r in rows]
    if fmt == "json":
        doc = rows[0] if len(rows) == 1 else {"rows": rows}
        return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"
    buf = io.StringIO()
    keys = list(rows[0]) if rows else []
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def _estimate_row(prefix: str, est) -> dict:
    v = est.value
    if isinstance(v, complex):
        return {f"{prefix}_re": v.real, f"{prefix}_im": v.imag, f"{prefix}_abs_err": est.abs_err, "nodes": est.nodes}
    return {f"{prefix}_value": float(v), f"{prefix}_abs_err": est.abs_err, "nodes": est.nodes}


# ---------------------------------------------------------------------------
# commands; each returns (rows, default format, exit code)


def cmd_dtable(a, cfg):
    t = divisor_sums.sieve_dbeta(a.beta, a.limit)
    return [{"n": n, "d_beta": int(t[n])} for n in range(1, a.limit + 1)], "csv", EXIT_OK


def cmd_laurent(a, cfg):
    exp = laurent_residues.laurent_extract(a.beta)
    if cfg.format == "csv":
        return [{"beta": a.beta, "order": j, "lambda": lam} for j, lam in enumerate(exp.principal)], "csv", EXIT_OK
    row = {"beta": a.beta, "principal": list(exp.principal), "analytic": list(exp.analytic),
           "radius": exp.radius, "imag_residual": exp.imag_residual,
           "residue_at_zero": laurent_residues.residue_at_zero(a.beta)}
    return [row], "json", EXIT_OK


def cmd_phi(a, cfg):
    spec = ContourSpec(tol=min(cfg.tol, 1e-8))
    rows = []
    for x in a.x:
        for delta in a.delta:
            p = PolarArgument.from_delta(x, delta)
            if a.repr == "direct":
                tol = min(cfg.tol, 1e-12)
                v, err = phi_function.phi_direct(a.beta, p, tol=tol), tol
            elif a.repr == "halfline":
                est = phi_function.phi_halfline(a.beta, p, spec)
                v, err = est.value, est.abs_err
            else:
                est = phi_function.phi_reflected(a.beta, p, alpha=a.alpha, spec=spec)
                v, err = est.value, est.abs_err
            rows.append({"x": x, "delta": delta, "re_phi": v.real, "im_phi": v.imag, "abs_err": err})
    return rows, "csv", EXIT_OK


def cmd_tsum(a, cfg):
    t = phi_function.phi_tsum(a.beta, a.y, a.delta, a.alpha, tol=min(cfg.tol, 1e-12))
    major = phi_function.t2_majorant(a.beta, a.y, a.delta)
    return [{"beta": a.beta, "y": a.y, "delta": a.delta, "alpha": a.alpha, "t1": t.t1,
             "t2_re": t.t2.real, "t2_im": t.t2.imag, "t3": t.t3, "t2_majorant": major}], "json", EXIT_OK


def cmd_jmoment(a, cfg):
    est = moment_transforms.j_moment(a.beta, a.delta, tol=cfg.tol, delta_min=cfg.delta_min,
                                     node_budget=cfg.node_budget)
    row = {"beta": a.beta, "delta": a.delta, "j_value": est.value, "j_abs_err": est.abs_err, "nodes": est.nodes}
    if a.via_phi:
        # same quantity up to O(1): the Phi-integral at angle pi/2 - delta/2
        phi = moment_transforms.phi_sq_integral(a.beta, 0.5 * a.delta, tol=cfg.tol)
        row.update(phi_integral=phi.value, phi_integral_abs_err=phi.abs_err)
    return [row], "json", EXIT_OK


def cmd_mmoment(a, cfg):
    est = moment_transforms.m_moment(a.beta, a.T, tol=cfg.tol, node_budget=cfg.node_budget)
    return [{"beta": a.beta, "T": a.T, "m_value": est.value, "m_abs_err": est.abs_err,
             "nodes": est.nodes}], "json", EXIT_OK


def cmd_parseval(a, cfg):
    r = moment_transforms.parseval_check(a.beta, a.delta, tol=cfg.tol, delta_min=cfg.delta_min)
    row = {"beta": r.beta, "delta": r.delta, "parseval_lhs": r.parseval_lhs, "parseval_rhs": r.parseval_rhs,
           "rel_diff": r.parseval_rel_diff}
    return [row], "json", EXIT_OK


def cmd_decompose(a, cfg):
    r = moment_transforms.j_decomposition(a.beta, a.delta, tol=cfg.tol, delta_min=cfg.delta_min)
    return [r.to_dict()], "json", EXIT_OK


def _phase_spec(a):
    return oscillatory.PhaseSpec(a.beta, a.n, a.x, a.alpha, a.delta)


def cmd_oscillatory(a, cfg):
    spec = _phase_spec(a)
    est = oscillatory.oscillatory_integral(spec, a.a, a.b, tol=cfg.tol, node_budget=cfg.node_budget)
    try:
        cert = oscillatory.second_derivative_bound(spec, a.a, a.b)
    except DomainError:
        cert = None
    return [{"beta": a.beta, "n": a.n, "x": a.x, "alpha": a.alpha, "delta": a.delta, "a": a.a, "b": a.b,
             "re_value": est.value.real, "im_value": est.value.imag, "abs_err": est.abs_err,
             "certificate": cert}], "csv", EXIT_OK


def cmd_certify(a, cfg):
    rows = oscillatory.certify(_phase_spec(a), a.a, a.b, tol=cfg.tol)
    ok = True
    for r in rows:
        r["holds"] = math.hypot(r["re_value"], r["im_value"]) <= r["certificate"]
        ok = ok and r["holds"]
    return rows, "csv", EXIT_OK if ok else EXIT_VALIDATION


def cmd_scaling(a, cfg):
    deltas = a.deltas or scaling_analysis.DEFAULT_GRID
    fit = scaling_analysis.scaling_campaign(a.beta, deltas, tol=cfg.tol, delta_min=cfg.delta_min)
    return [fit.to_dict()], "json", EXIT_OK


def cmd_bounds(a, cfg):
    return [{"theorem_exponent": scaling_analysis.theorem_exponent(a.beta),
             "classical_exponent": scaling_analysis.classical_exponent(a.beta)}], "json", EXIT_OK


def cmd_identities(a, cfg):
    seed = cfg.seed if cfg.seed is not None else 0
    rep = run_identity_suite(seed=seed, points=a.points)
    # timing is left out so repeated runs are byte-identical
    rows = list(rep["results"])
    return rows, "json", EXIT_OK if rep["passed"] else EXIT_VALIDATION


# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, default=None):
    # accepted before or after the subcommand; SUPPRESS keeps the subparser from
    # overwriting a value given before it
    p.add_argument("--tol", type=float, default=default)
    p.add_argument("--delta-min", dest="delta_min", type=float, default=default)
    p.add_argument("--node-budget", dest="node_budget", type=int, default=default)
    p.add_argument("--threads", type=int, default=default)
    p.add_argument("--format", choices=("csv", "json"), default=default)
    p.add_argument("--out", dest="out_path", default=default)
    p.add_argument("--config", default=default)
    p.add_argument("--seed", type=int, default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zml", description="Zeta moment laboratory")
    _common(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        _common(p, argparse.SUPPRESS)
        p.set_defaults(func=func)
        return p

    p = add("dtable", cmd_dtable, "table of d_beta(n)")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--limit", type=int, required=True)

    p = add("laurent", cmd_laurent, "principal part of Gamma zeta^beta at s = 1")
    p.add_argument("--beta", type=int, required=True)

    p = add("phi", cmd_phi, "Phi_beta at x e^{i(pi/2 - delta)}")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--delta", type=float, nargs="+", required=True)
    p.add_argument("--repr", choices=("direct", "halfline", "reflected"), default="direct")
    p.add_argument("--alpha", type=float, default=0.25)

    p = add("tsum", cmd_tsum, "T1, T2, T3 series of the reflected expansion")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.25)

    p = add("jmoment", cmd_jmoment, "Laplace transform J_beta(delta)")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--via-phi", dest="via_phi", action="store_true",
                   help="also report the Phi-integral at angle pi/2 - delta/2")

    p = add("mmoment", cmd_mmoment, "moment M_beta(T)")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--T", type=float, required=True)

    for name, func, help_ in (("parseval", cmd_parseval, "both sides of the Parseval identity"),
                              ("decompose", cmd_decompose, "split of the Phi-integral")):
        p = add(name, func, help_)
        p.add_argument("--beta", type=int, required=True)
        p.add_argument("--delta", type=float, required=True)

    for name, func, help_ in (("oscillatory", cmd_oscillatory, "model oscillatory integral"),
                              ("certify", cmd_certify, "check integrals against the certificate")):
        p = add(name, func, help_)
        p.add_argument("--beta", type=int, required=True)
        p.add_argument("--n", type=int, default=1)
        p.add_argument("--x", type=float, default=1.0)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--delta", type=float, required=True)
        p.add_argument("--a", type=float, required=True)
        p.add_argument("--b", type=float, required=True)

    p = add("scaling", cmd_scaling, "fit the growth exponent of J_beta")
    p.add_argument("--beta", type=int, required=True)
    p.add_argument("--deltas", type=float, nargs="+")

    p = add("bounds", cmd_bounds, "improved and classical exponents")
    p.add_argument("--beta", type=int, required=True)

    p = add("identities", cmd_identities, "randomized identity suite")
    p.add_argument("--points", type=int, default=1000)
    return parser


def run(argv=None, stdout=None, env=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = build_config(args, env)
        set_threads(cfg.threads)
        rows, default_fmt, code = args.func(args, cfg)
        text = format_rows(rows, cfg.format or default_fmt, cfg.seed)
    except (BudgetError, NonConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (DomainError, PoleError, OverflowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZmlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    if cfg.out_path:
        with open(cfg.out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

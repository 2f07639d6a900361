"""Command-line tables, estimates and verification suites.

Usage examples::

    yamabe constants 3 4 5 6
    yamabe epsilon-table 7 7
    yamabe lambda-table 6 7 8 9 --format json
    yamabe estimate "product (sphere 3 200) (sphere 3 200)"
    yamabe verify holder 1000 0
    yamabe stable-limit 3 1 500

Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
3 curvature hypothesis violated, 4 non-convergence under ``--strict``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .discrete import (
    DiscreteManifold,
    flat_torus,
    product,
    random_manifold,
    read_spec,
    sphere_latitude,
)
from .errors import AssumptionViolated, YamabeError
from .functional import (
    check_assumption,
    check_iterated_holder,
    check_partial_gradient,
    check_young,
)
from .invariants import (
    conformal_exponent,
    critical_exponent,
    einstein_hilbert_constant,
    epsilon_defect,
    lambda_argmin,
    lambda_surgery,
    sigma_sphere,
    sigma_sphere_asymptote,
    sphere_volume,
    sphere_yamabe,
    stable_ratio_limit,
)
from .minimize import MinimizeConfig, estimate_mu, sandwich

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ASSUMPTION, EXIT_NONCONVERGED = 0, 1, 2, 3, 4
SUITES = ("holder", "gradient", "young", "assumption")


class UsageError(Exception):
    pass


@dataclass
class Table:
    columns: list
    rows: list


# -- output -----------------------------------------------------------------


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (list, tuple)):
        return ";".join(_cell(y) for y in x)
    return str(x)


def _jsonable(x):
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    return x


def render(table: Table, fmt: str, argv, seed) -> str:
    if fmt == "json":
        doc = {
            "metadata": {
                "tool": "yamabe",
                "version": __version__,
                "command": list(argv),
                "rng_seed": seed,
                "timestamp": datetime.now(timezone.utc).isoformat(),
            },
            "columns": table.columns,
            "rows": [{c: _jsonable(v) for c, v in zip(table.columns, row)} for row in table.rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


# -- geometry descriptors -----------------------------------------------------


@dataclass
class Geometry:
    manifold: DiscreteManifold
    mu_ref: float | None = None
    # continuum scalar curvature and volume for round spheres
    scal: float | None = None
    vol: float | None = None
    kind: str = ""
    factors: tuple | None = None


def tokenize(text: str) -> list:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _int(tok, what):
    try:
        return int(tok)
    except (TypeError, ValueError):
        raise UsageError(f"expected an integer for {what}, got {tok!r}") from None


def _is_number(tok):
    try:
        float(tok)
    except (TypeError, ValueError):
        return False
    return True


def parse_geometry(tokens: list) -> Geometry:
    """Parse ``sphere M N [SCALE] | torus M N | product D D | file PATH``."""
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(tokens):
            raise UsageError("geometry descriptor ended unexpectedly")
        pos += 1
        return tokens[pos - 1]

    def parse():
        nonlocal pos
        head = take()
        if head == "(":
            geom = parse()
            if take() != ")":
                raise UsageError("expected ')'")
            return geom
        if head == "sphere":
            m = _int(take(), "sphere dimension")
            n = _int(take(), "sphere cells")
            scale = 1.0
            if pos < len(tokens) and _is_number(tokens[pos]):
                scale = float(take())
            M = sphere_latitude(m, n, scale)
            mu = sphere_yamabe(m) if m >= 3 else None
            return Geometry(M, mu, m * (m - 1) / scale, sphere_volume(m) * scale ** (m / 2), "sphere")
        if head == "torus":
            m = _int(take(), "torus dimension")
            n = _int(take(), "torus cells per axis")
            return Geometry(flat_torus(m, n), 0.0 if m >= 3 else None, 0.0, 1.0, "torus")
        if head == "product":
            a, b = parse(), parse()
            scal = vol = None
            if a.scal is not None and b.scal is not None:
                scal, vol = a.scal + b.scal, a.vol * b.vol
            return Geometry(product(a.manifold, b.manifold), None, scal, vol, "product", (a, b))
        if head == "file":
            return Geometry(read_spec(take()), kind="file")
        raise UsageError(f"unknown geometry {head!r}; expected sphere, torus, product or file")

    geom = parse()
    if pos != len(tokens):
        raise UsageError(f"unexpected trailing tokens: {' '.join(tokens[pos:])}")
    return geom


# -- commands ---------------------------------------------------------------


def cmd_constants(m_list) -> Table:
    cols = ["m", "a_m", "p_m", "omega_m", "mu_sphere", "log_Sigma_sphere", "Sigma_sphere"]
    rows = []
    for m in m_list:
        if m < 3:
            raise UsageError(f"m must be >= 3, got {m}")
        log_sig = sigma_sphere(m)
        linear = log_sig.exp()
        rows.append([
            m, conformal_exponent(m), critical_exponent(m), sphere_volume(m), sphere_yamabe(m),
            log_sig.log, linear if math.isfinite(linear) else None,
        ])
    return Table(cols, rows)


def cmd_epsilon_table(v_max, w_max) -> Table:
    if v_max < 3 or w_max < 3:
        raise UsageError("v_max and w_max must be >= 3")
    rows = []
    for v in range(3, v_max + 1):
        for w in range(3, w_max + 1):
            eps = epsilon_defect(v, w)
            rows.append([v, w, f"{eps:.4f}", eps])
    return Table(["v", "w", "epsilon_4dp", "epsilon"], rows)


def cmd_lambda_table(m_list) -> Table:
    for m in m_list:
        if m < 6:
            raise UsageError(f"m must be >= 6, got {m}")
    k_max = max(m_list) - 4 if m_list else 2
    cols = ["m", "argmin_k", "lambda_m", "symmetric"] + [f"lambda_k{k}" for k in range(2, k_max + 1)]
    rows = []
    for m in m_list:
        per_k = {k: lambda_surgery(m, k) for k in range(2, m - 3)}
        symmetric = all(per_k[k] == per_k[m - k - 2] for k in per_k)
        k_best = lambda_argmin(m)
        rows.append([m, k_best, per_k[k_best], symmetric] + [per_k.get(k) for k in range(2, k_max + 1)])
    return Table(cols, rows)


def cmd_stable_limit(v, b, i_max) -> Table:
    if v < 1 or b < 1 or i_max < 1:
        raise UsageError("v, b and i_max must all be >= 1")
    target = stable_ratio_limit(v)
    cols = ["i", "ratio", "target", "rel_error", "n", "Sigma_over_asymptote"]
    rows = []
    for i in range(1, i_max + 1):
        if b * i < 3:
            continue
        ratio = (sigma_sphere(v + b * i) / sigma_sphere(b * i)).exp()
        n = v + b * i
        asym = (sigma_sphere(n) / sigma_sphere_asymptote(n)).exp()
        rows.append([i, ratio, target, abs(ratio - target) / target, n, asym])
    return Table(cols, rows)


def _config(args) -> MinimizeConfig:
    return MinimizeConfig(
        max_iters=args.max_iters, rel_tol=args.tol, restarts=args.restarts, rng_seed=args.seed
    )


def cmd_estimate(tokens, args) -> tuple[Table, int]:
    """Minimize on a descriptor; products of factors of dimension >= 3 get a sandwich.

    Factor references are closed-form for spheres and tori and estimated
    numerically for file factors.  The curvature hypothesis is checked first
    and a violation raises :class:`AssumptionViolated`.
    """
    geom = parse_geometry(tokens)
    cfg = _config(args)
    M = geom.manifold
    row = {"geometry": " ".join(tokens), "dim": M.dim, "vertices": M.n_vertices}
    factors = geom.factors
    result = None
    if factors and all(f.manifold.dim >= 3 for f in factors):
        a, b = factors
        report = check_assumption(a.manifold, b.manifold)
        if not report.holds:
            raise AssumptionViolated(
                f"curvature hypothesis fails: (s_V+s_W)/a_m = {report.lhs:.6g} < "
                f"s_V/a_v + s_W/a_w = {report.rhs:.6g}"
            )
        refs = [f.mu_ref if f.mu_ref is not None else estimate_mu(f.manifold, cfg).value for f in factors]
        row["reference_source"] = ";".join(
            "closed-form" if f.mu_ref is not None else "estimated" for f in factors
        )
        if min(refs) >= 0:
            reference = None
            if geom.scal is not None:
                reference = einstein_hilbert_constant(geom.scal, geom.vol, M.dim)
            sw = sandwich(a.manifold, b.manifold, refs[0], refs[1], cfg, upper_reference=reference)
            result = sw.result
            row.update(sw.as_dict())
    if result is None:
        result = estimate_mu(M, cfg)
        row["estimate"] = result.value
    row.update(
        value=result.value, iterations=result.iterations, converged=result.converged,
        restart=result.restart,
    )
    if args.history:
        row["history"] = result.history
    code = EXIT_NONCONVERGED if args.strict and not result.converged else EXIT_OK
    return Table(list(row), [list(row.values())]), code


def _random_product(rng, max_vertices=6):
    v, w = (int(x) for x in rng.integers(3, 7, size=2))
    nv, nw = (int(x) for x in rng.integers(1, max_vertices + 1, size=2))
    return random_manifold(rng, v, nv), random_manifold(rng, w, nw)


def _random_field(rng, shape, nonneg=False):
    u = rng.lognormal(0.0, 1.0, size=shape)
    if not nonneg:
        u *= rng.choice([-1.0, 1.0], size=shape)
    u[rng.random(shape) < 0.2] = 0.0
    if not np.any(u):
        u.flat[0] = 1.0
    return u


def run_suite(suite: str, n_cases: int, seed: int):
    """Run one property suite; returns ``(passed, failed, worst_relative_slack)``."""
    rng = np.random.default_rng([seed, SUITES.index(suite)])
    passed = failed = 0
    worst = math.inf

    def record(ok, slack, scale):
        nonlocal passed, failed, worst
        if ok:
            passed += 1
        else:
            failed += 1
        worst = min(worst, slack / max(abs(scale), 1e-300))

    for _ in range(n_cases):
        if suite == "young":
            c, d = rng.exponential(2.0, size=2)
            v, w = (int(x) for x in rng.integers(3, 30, size=2))
            rep = check_young(c, d, v, w)
            record(rep.holds, rep.slack, rep.rhs)
        elif suite == "assumption":
            v, w = (int(x) for x in rng.integers(3, 10, size=2))
            mv = random_manifold(rng, v, int(rng.integers(1, 6)), curvature=(0.0, 10.0))
            mw = random_manifold(rng, w, int(rng.integers(1, 6)), curvature=(0.0, 10.0))
            rep = check_assumption(mv, mw)
            record(rep.holds, rep.slack, rep.lhs)
        else:
            mv, mw = _random_product(rng)
            u = _random_field(rng, (mv.n_vertices, mw.n_vertices), nonneg=suite == "gradient")
            check = check_iterated_holder if suite == "holder" else check_partial_gradient
            rep = check(mv, mw, u)
            record(rep.holds, rep.slack, rep.rhs)

    if suite == "assumption":
        # negative curvature fixture: the hypothesis must be reported as failing
        neg = DiscreteManifold(3, [1.0], [], [], [-6.0], "fixture s=-6")
        flat = DiscreteManifold(3, [1.0], [], [], [0.0], "fixture s=0")
        rep = check_assumption(neg, flat)
        record(not rep.holds, -rep.slack, rep.lhs)
    return passed, failed, worst


def cmd_verify(suite, n_cases, seed) -> tuple[Table, int]:
    if n_cases < 1:
        raise UsageError("n_cases must be >= 1")
    names = SUITES if suite == "all" else (suite,)
    rows = []
    for name in names:
        passed, failed, worst = run_suite(name, n_cases, seed)
        rows.append([name, passed + failed, passed, failed, worst])
    code = EXIT_FAIL if any(r[3] for r in rows) else EXIT_OK
    return Table(["suite", "cases", "passed", "failed", "worst_rel_slack"], rows), code


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iters", type=int, default=5000)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--restarts", type=int, default=4)
    common.add_argument("--strict", action="store_true", help="exit 4 if minimization did not converge")
    common.add_argument("--history", action="store_true", help="include the descent history")

    parser = argparse.ArgumentParser(prog="yamabe", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("constants", parents=[common], help="a_m, p_m, omega_m, mu(S^m), Sigma(S^m)")
    p.add_argument("m", type=int, nargs="*")
    p = sub.add_parser("epsilon-table", parents=[common], help="defect factors epsilon_{v,w}")
    p.add_argument("v_max", type=int)
    p.add_argument("w_max", type=int)
    p = sub.add_parser("lambda-table", parents=[common], help="surgery constants Lambda_{m,k}")
    p.add_argument("m", type=int, nargs="+")
    p = sub.add_parser("estimate", parents=[common], help="minimize the Yamabe quotient")
    p.add_argument("geometry", nargs="+", help="sphere M N [SCALE] | torus M N | product D D | file PATH")
    p = sub.add_parser("verify", parents=[common], help="run inequality property suites")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.add_argument("n_cases", type=int, nargs="?", default=1000)
    p.add_argument("rng_seed", type=int, nargs="?")
    p = sub.add_parser("stable-limit", parents=[common], help="convergence of Sigma(S^(v+bi))/Sigma(S^bi)")
    p.add_argument("v", type=int)
    p.add_argument("b", type=int)
    p.add_argument("i_max", type=int)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    seed = args.seed
    code = EXIT_OK
    try:
        if args.command == "constants":
            table = cmd_constants(args.m)
        elif args.command == "epsilon-table":
            table = cmd_epsilon_table(args.v_max, args.w_max)
        elif args.command == "lambda-table":
            table = cmd_lambda_table(args.m)
        elif args.command == "stable-limit":
            table = cmd_stable_limit(args.v, args.b, args.i_max)
        elif args.command == "estimate":
            table, code = cmd_estimate(tokenize(" ".join(args.geometry)), args)
        else:
            if args.rng_seed is not None:
                seed = args.rng_seed
            table, code = cmd_verify(args.suite, args.n_cases, seed)
    except AssumptionViolated as exc:
        print(f"yamabe: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (UsageError, YamabeError, OSError) as exc:
        print(f"yamabe: {exc}", file=sys.stderr)
        return EXIT_USAGE

    text = render(table, args.format, argv, seed)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

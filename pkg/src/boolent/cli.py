"""Command-line interface: ``boolent <subcommand> ...`` or ``python -m boolent``.

Exit status: 0 success, 1 domain error (bad input), 2 numerical failure,
3 a verification suite ran but its check failed, 64 usage error.  Errors are
reported as one ``error: <Kind>: <message>`` line on standard error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import shlex
import sys
import tempfile

import numpy as np

from . import __version__, booleanclt, ensembles, entropy, laws, measures, transforms, verify
from .errors import DomainError, NumericalError

EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_CHECK, EXIT_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: usage: {message}\n")
        raise SystemExit(EXIT_USAGE)


# ----------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------


def _fmt(v):
    return repr(float(v))


def _header(ctx):
    return f"# boolent {__version__} | {ctx['cmdline']} | seed={ctx.get('seed', 'none')}\n"


def _atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".boolent-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, ctx, columns, rows):
    buf = io.StringIO()
    buf.write(_header(ctx))
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    _atomic_write(path, buf.getvalue())


def write_json(path, ctx, obj):
    obj = dict(obj)
    obj["_meta"] = {"version": __version__, "cmdline": ctx["cmdline"], "seed": ctx.get("seed")}
    _atomic_write(path, json.dumps(obj, indent=1, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not serializable: {type(o).__name__}")


def write_measure(path, ctx, m, **extra):
    if path.endswith(".json"):
        d = m.to_dict()
        d.update(extra)
        write_json(path, ctx, d)
    elif isinstance(m, measures.Empirical):
        write_csv(path, ctx, ["index", "value"], [(str(i), v) for i, v in enumerate(m.points)])
    elif isinstance(m, measures.GridDensity):
        write_csv(path, ctx, ["x", "density"], zip(m.x, m.values))
    else:
        write_csv(path, ctx, ["x", "weight"], zip(*m.atoms()))


def _print(text):
    sys.stdout.write(text + "\n")


# ----------------------------------------------------------------------
# parsing helpers
# ----------------------------------------------------------------------


def parse_grid(spec):
    """``x0:dx:x1`` -> ``(x0, dx, count)``; ``x1`` is included within ``dx/2``."""
    try:
        x0, dx, x1 = (float(p) for p in spec.split(":"))
    except ValueError as exc:
        raise UsageError(f"grid must look like x0:dx:x1, got {spec!r}") from exc
    if not dx > 0 or x1 <= x0:
        raise UsageError(f"grid needs dx > 0 and x1 > x0, got {spec!r}")
    count = int(math.floor((x1 - x0) / dx + 0.5)) + 1
    return x0, dx, count


def parse_list(spec):
    try:
        return [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma-separated list of numbers, got {spec!r}") from exc


def parse_range(spec):
    lo, hi = parse_list(spec.replace(":", ","))
    return lo, hi


def load_measure(path):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read measure {path!r}: {exc}") from exc
    return measures.from_dict(d), d


def load_submeasure(path):
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    mass = float(d.get("mass", 1.0))
    if d.get("type") == "empty":
        return measures.SubMeasure(None, 0.0)
    return measures.SubMeasure(measures.from_dict(d), mass)


def _standardized(m, ctx):
    # the semigroup needs mean 0 and variance 1; small quadrature offsets are
    # removed by an affine rescaling, anything larger is rejected
    m1, m2 = measures.moment(m, 1), measures.moment(m, 2)
    if abs(m1) > 1e-3 or abs(m2 - 1) > 1e-3:
        raise DomainError(f"measure must be centered with unit variance (mean {m1:.4g}, m2 {m2:.4g})")
    return booleanclt.standardize(m)


def uniform_density(lo, hi, dx=1e-4):
    x0 = lo - dx
    n = int(round((hi - lo) / dx)) + 3
    x = x0 + dx * np.arange(n)
    return measures.GridDensity(x0, dx, ((x >= lo - 1e-12) & (x <= hi + 1e-12)).astype(float))


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------


def cmd_sample(a, ctx):
    ctx["seed"] = a.seed
    if a.model == "wishart-block":
        cfg = ensembles.EnsembleConfig(ensembles.WishartBlock(a.p, a.n), a.seed)
        sv, refl = ensembles.sample_wishart_block(cfg)
        write_measure(a.out, ctx, refl if a.reflected else sv)
        return EXIT_OK
    mc = ensembles.MCMCParams(burnin=a.burnin, steps=a.steps)
    cfg = ensembles.EnsembleConfig(ensembles.ConditionedGUE(a.M, a.N), a.seed, mc)
    L = ensembles.sample_conditioned_gue(cfg)
    if not a.scaled_pair:
        write_measure(a.out, ctx, L, diagnostics=L.meta)
        return EXIT_OK
    theta = ensembles.solve_theta(a.M, a.N)
    pair, sa, sb = ensembles.scaled_pair(L.points, a.M, a.N, theta.theta)
    if a.out.endswith(".json"):
        write_json(a.out, ctx, {
            "alpha_points": pair.alpha_points, "beta_points": pair.beta_points, "m0": pair.m0,
            "mass_alpha": sa.mass, "mass_beta": sb.mass, "theta": theta.theta,
        })
    else:
        rows = [("alpha", v) for v in pair.alpha_points] + [("beta", v) for v in pair.beta_points]
        write_csv(a.out, ctx, ["side", "value"], rows)
    return EXIT_OK


def cmd_density(a, ctx):
    spec = laws.LawSpec(a.law, gamma=a.gamma if a.law == "mp" else None,
                        alpha=a.alpha if a.law == "p-alpha" else None)
    if a.law in ("rademacher", "mu-half"):
        m = laws.make_law(spec)
        write_csv(a.out, ctx, ["x", "weight"], zip(*m.atoms()))
        return EXIT_OK
    x0, dx, count = parse_grid(a.grid)
    x = x0 + dx * np.arange(count)
    if a.law == "semicircle":
        v = laws.semicircle_density(x)
    elif a.law == "mp":
        v = laws.mp_density(x, a.gamma)
    else:
        v = laws.p_alpha_density(x, a.alpha)
    write_csv(a.out, ctx, ["x", "density"], zip(x, v))
    return EXIT_OK


def cmd_entropy(a, ctx):
    m, _ = load_measure(a.measure)
    fn = {"gamma": entropy.gamma_entropy, "sigma": entropy.sigma_entropy,
          "classical": entropy.classical_entropy}[a.fn]
    _print(f"{fn(m):.15g}")
    return EXIT_OK


def _poly(coeffs):
    c = np.asarray(coeffs, dtype=float)[::-1]
    return lambda x: np.polyval(c, x)


def cmd_rate(a, ctx):
    if a.fn == "pair":
        sa = load_submeasure(a.measure)
        sb = load_submeasure(a.measure2) or measures.SubMeasure(None, 0.0)
        rep = entropy.rate_pair(sa, sb)
    else:
        m, _ = load_measure(a.measure)
        if a.fn == "isym":
            rep = entropy.rate_isym(m)
        elif a.fn == "i":
            rep = entropy.rate_i(m)
        elif a.fn == "jplus":
            rep = entropy.rate_jplus(m)
        elif a.fn == "jtilde":
            rep = entropy.rate_jtilde(m)
        elif a.fn == "jgamma":
            rep = entropy.rate_jgamma(m, _need(a.gamma, "--gamma"))
        elif a.fn == "ialpha":
            rep = entropy.rate_ialpha(m, _need(a.alpha, "--alpha"))
        else:
            V = _poly(parse_list(a.poly))
            dom = parse_range(a.domain) if a.domain else None
            rep = entropy.rate_igamma_v(m, _need(a.gamma, "--gamma"), V, dom)
    _print(rep.to_json())
    return EXIT_OK


def _need(v, flag):
    if v is None:
        raise UsageError(f"{flag} is required here")
    return v


def cmd_convolve(a, ctx):
    ma, _ = load_measure(a.a)
    mb, _ = load_measure(a.b)
    out = transforms.boolean_convolve(ma, mb, a.order)
    write_measure(a.out, ctx, out)
    return EXIT_OK


def cmd_clt(a, ctx):
    m, _ = load_measure(a.measure)
    m = _standardized(m, ctx)
    if a.action == "curve":
        curve = booleanclt.gamma_curve(m, parse_list(_need(a.ts, "--ts")))
        write_csv(_need(a.out, "--out"), ctx, ["t", "gamma"], curve)
    else:
        _print(f"{booleanclt.gamma_prime_1(m):.15g}")
    return EXIT_OK


def cmd_verify(a, ctx):
    suite = a.suite
    ctx["seed"] = a.seed
    if suite == "monotonicity":
        m = _standardized(load_measure(_need(a.measure, "--measure"))[0], ctx)
        ts, t = [], 1.0
        while t <= a.tmax * (1 + 1e-12):
            ts.append(t)
            t *= 2
        curve = booleanclt.gamma_curve(m, ts)
        ok = all(g1 >= g0 - 5e-3 for (_, g0), (_, g1) in zip(curve, curve[1:]))
        write_csv(a.out, ctx, ["t", "gamma"], curve)
        return EXIT_OK if ok else EXIT_CHECK
    if suite == "euler-lagrange":
        alpha = _need(a.alpha, "--alpha")
        d = load_measure(a.measure)[0] if a.measure else laws.p_alpha(alpha)
        r = entropy.euler_lagrange_residual(d, alpha)
        ok = r.max_dev <= 1e-2 and r.min_slack >= -1e-2
        write_json(a.out, ctx, {"alpha": alpha, "max_dev": r.max_dev, "min_slack": r.min_slack,
                                "constant": r.constant, "pass": ok})
        return EXIT_OK if ok else EXIT_CHECK
    if suite == "convergence":
        if a.model == "wishart-block":
            model = ensembles.WishartBlock(_need(a.p, "--p"), _need(a.n, "--n"))
        else:
            model = ensembles.ConditionedGUE(_need(a.M, "--M"), _need(a.N, "--N"))
        mc = ensembles.MCMCParams(burnin=a.burnin, steps=a.steps)
        cfg = ensembles.EnsembleConfig(model, a.seed, mc)
        summary = verify.convergence_stats(cfg, a.replicas, a.seed)
        write_json(a.out, ctx, summary)
        return EXIT_OK
    if suite == "weight-ratio":
        if a.model == "wishart-block":
            wm = verify.WeightModel.wishart_singular(_need(a.p, "--p"), _need(a.n, "--n"))
            ta, tb = uniform_density(*parse_range(a.a_range)), uniform_density(*parse_range(a.b_range))
        else:
            wm = verify.WeightModel.conditioned_gue(_need(a.M, "--M"), _need(a.N, "--N"))
            ta = measures.symmetrize(uniform_density(*parse_range(a.a_range)))
            tb = measures.symmetrize(uniform_density(*parse_range(a.b_range)))
        meas, pred = verify.ldp_weight_ratio_check(wm, ta, tb)
        rel = abs(meas - pred) / abs(pred) if pred else abs(meas)
        write_csv(a.out, ctx, ["measured", "predicted", "relative_error"], [(meas, pred, rel)])
        return EXIT_OK if rel < 0.15 else EXIT_CHECK
    # maximality
    rng = np.random.default_rng(a.seed)
    rows, ok = [], True
    for i in range(a.count):
        k = int(rng.integers(1, 7))
        x = rng.standard_normal(k) * rng.exponential(1.0, k)
        w = rng.dirichlet(np.ones(k))
        x = x / math.sqrt(float(np.dot(w, x * x)))
        g = entropy.gamma_entropy(measures.Atomic(x, w, normalize=True))
        ok &= g <= 1e-12
        rows.append((str(i), g))
    write_csv(a.out, ctx, ["index", "gamma"], rows)
    return EXIT_OK if ok else EXIT_CHECK


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="boolent", description="Boolean entropy and random-matrix numerics.")
    p.add_argument("--version", action="version", version=f"boolent {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="sample a random-matrix model")
    ss = s.add_subparsers(dest="model", required=True, parser_class=_Parser)
    w = ss.add_parser("wishart-block")
    w.add_argument("--p", type=int, required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--seed", type=int, required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--reflected", action="store_true")
    g = ss.add_parser("cond-gue")
    g.add_argument("--M", type=int, required=True)
    g.add_argument("--N", type=int, required=True)
    g.add_argument("--burnin", type=int, default=2000)
    g.add_argument("--steps", type=int, default=2000)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--scaled-pair", action="store_true")

    d = sub.add_parser("density", help="tabulate a reference law")
    d.add_argument("--law", choices=laws.KINDS, required=True)
    d.add_argument("--gamma", type=float)
    d.add_argument("--alpha", type=float)
    d.add_argument("--grid", default="-3:0.001:3")
    d.add_argument("--out", required=True)

    e = sub.add_parser("entropy", help="Boolean, free or classical entropy")
    e.add_argument("--fn", choices=["gamma", "sigma", "classical"], required=True)
    e.add_argument("--measure", required=True)

    r = sub.add_parser("rate", help="evaluate a rate functional")
    r.add_argument("--fn", choices=["isym", "i", "jplus", "jtilde", "jgamma", "ialpha", "pair", "igammav"],
                   required=True)
    r.add_argument("--gamma", type=float)
    r.add_argument("--alpha", type=float)
    r.add_argument("--measure", required=True)
    r.add_argument("--measure2")
    r.add_argument("--poly", default="0,0,0.5", help="coefficients c0,c1,... of V(x) = sum c_k x^k")
    r.add_argument("--domain", help="lo:hi search interval for the infimum of V - gamma log|x|")

    c = sub.add_parser("convolve", help="Boolean convolution")
    cs = c.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    b = cs.add_parser("boolean")
    b.add_argument("--a", required=True)
    b.add_argument("--b", required=True)
    b.add_argument("--order", type=int, default=transforms.DEFAULT_ORDER)
    b.add_argument("--out", required=True)

    t = sub.add_parser("clt", help="Boolean CLT entropy curve")
    t.add_argument("action", choices=["curve", "dgamma"])
    t.add_argument("--measure", required=True)
    t.add_argument("--ts")
    t.add_argument("--out")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", choices=["monotonicity", "euler-lagrange", "convergence", "weight-ratio",
                                       "maximality"], required=True)
    v.add_argument("--out", required=True)
    v.add_argument("--measure")
    v.add_argument("--tmax", type=float, default=16.0)
    v.add_argument("--alpha", type=float)
    v.add_argument("--model", choices=["wishart-block", "cond-gue"], default="wishart-block")
    v.add_argument("--p", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--M", type=int)
    v.add_argument("--N", type=int)
    v.add_argument("--burnin", type=int, default=2000)
    v.add_argument("--steps", type=int, default=2000)
    v.add_argument("--replicas", type=int, default=20)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--a-range", default="0.9:1.1")
    v.add_argument("--b-range", default="1.9:2.1")
    v.add_argument("--count", type=int, default=1000)
    return p


COMMANDS = {
    "sample": cmd_sample,
    "density": cmd_density,
    "entropy": cmd_entropy,
    "rate": cmd_rate,
    "convolve": cmd_convolve,
    "clt": cmd_clt,
    "verify": cmd_verify,
}


def _check_paths(a):
    # an output may not overwrite an input; inputs may repeat (a ⊎ a)
    inputs = {os.path.abspath(getattr(a, k)) for k in ("measure", "measure2", "a", "b")
              if isinstance(getattr(a, k, None), str)}
    out = getattr(a, "out", None)
    if isinstance(out, str) and os.path.abspath(out) in inputs:
        raise UsageError("the output path must differ from every input path")


# options whose values may start with "-" (negative grid ends, ranges)
_VALUE_FLAGS = {"--grid", "--ts", "--domain", "--a-range", "--b-range", "--poly"}


def _glue_negative_values(argv):
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        a = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        # --help/--version exit 0, parse errors EXIT_USAGE
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    ctx = {"cmdline": " ".join(shlex.quote(s) for s in ["boolent", *argv])}
    try:
        _check_paths(a)
        return COMMANDS[a.command](a, ctx)
    except UsageError as exc:
        sys.stderr.write(f"error: usage: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except OSError as exc:
        # unreadable inputs and unwritable outputs are bad arguments too
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_DOMAIN
    except NumericalError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

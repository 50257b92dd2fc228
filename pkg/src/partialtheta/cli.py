"""Command-line front end: catalog access, evaluation, verification suites,
and machine-readable reports.

Reports are emitted as JSON or CSV with a fixed, versioned column set; all
numeric payloads are decimal strings at the working precision, never binary
floats, so that reports reproduce across tools.  Exit codes: 0 all rows
passed (or pure evaluation succeeded), 1 at least one numerical check
failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc

from .precision import PrecisionContext, mp_str
from .periodic import (PeriodicFunction, CATALOG_NAMES, catalog, dft,
                       linf_dist, parity_split)
from .theta import (ThetaSpec, theta_eval, asymptotic_series,
                    compose_q_variable, qbar_membership,
                    IndeterminateMembership)
from .genfun import build, singularity_data
from .resummation import (DEFAULT_EPS, decomposition, stokes_difference,
                          stokes_closed_form, theta_via_parabola)
from .modular import (ModularMatrix, verify_exact_relation,
                      verify_gamma_relation, gauss_reciprocity_residual,
                      boundary_asymptotics)

SCHEMA = "partialtheta-report/1"
COLUMNS = ["schema", "command", "label", "input", "quantity",
           "re", "im", "residual", "threshold", "status", "detail"]

_DEFAULT_TAUS = ("0.3+0.7i", "0.4i", "-0.2+0.9i")
_DEFAULT_ALPHAS = ("1", "-1", "1/2", "-1/2", "2", "-2", "1/3", "-1/3", "3")
_SUITES = ("decomposition", "modularity", "stokes", "alien", "gauss",
           "boundary", "parabola")


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------

_TERM = re.compile(
    r"[+-]?(?:"
    r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?\*?i?"
    r"|i)")


def _eval_real(text: str) -> mpf:
    """Evaluate a decimal or rational literal at the ambient precision."""
    if "/" in text:
        num, den = text.split("/")
        return mpf(num) / mpf(den)
    return mpf(text)


def parse_complex(text: str) -> mpc:
    """Parse 'a+bi' with decimal or rational components, e.g. '1/2+1/3i'."""
    s = text.replace(" ", "")
    if not s:
        raise ConfigError("empty number")
    pos = 0
    re_part = mpf(0)
    im_part = mpf(0)
    seen = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None:
            raise ConfigError("cannot parse number: %r" % text)
        tok = m.group(0)
        pos = m.end()
        seen += 1
        if seen > 2:
            raise ConfigError("too many terms in number: %r" % text)
        if seen > 1 and tok[0] not in "+-":
            raise ConfigError("cannot parse number: %r" % text)
        if tok.endswith("i"):
            if seen == 2 and _TERM.match(s).group(0).endswith("i"):
                raise ConfigError("two imaginary terms: %r" % text)
            body = tok[:-1].rstrip("*")
            if body in ("", "+"):
                im_part += 1
            elif body == "-":
                im_part -= 1
            else:
                im_part += _eval_real(body)
        else:
            if seen == 2 and not _TERM.match(s).group(0).endswith("i"):
                raise ConfigError("two real terms: %r" % text)
            re_part += _eval_real(tok)
    return mpc(re_part, im_part)


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.replace(" ", ""))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("cannot parse rational: %r" % text) from exc


def _load_spec(args) -> ThetaSpec:
    if getattr(args, "catalog", None):
        try:
            nu, f = catalog(args.catalog)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    elif getattr(args, "f", None):
        try:
            with open(args.f, "r", encoding="utf-8") as fh:
                f = PeriodicFunction.from_json(fh.read())
        except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError("cannot load coefficient file: %s" % exc) from exc
        nu = 0
    else:
        raise ConfigError("one of --catalog or --f is required")
    if getattr(args, "nu", None) is not None:
        nu = args.nu
    if nu < 0:
        raise ConfigError("nu must be >= 0")
    return ThetaSpec(nu, f)


def _make_ctx(args) -> PrecisionContext:
    bits = args.bits
    if bits is None:
        env = os.environ.get("RT_PRECISION_BITS")
        bits = int(env) if env else 256
    try:
        return PrecisionContext(bits=bits, target_abs_error=args.target_error)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# rows and reports
# ---------------------------------------------------------------------------


def _row(command, label, input_str="", quantity="", re_s="", im_s="",
         residual="", threshold="", status="ok", detail=""):
    return {"schema": SCHEMA, "command": command, "label": label,
            "input": input_str, "quantity": quantity, "re": re_s, "im": im_s,
            "residual": residual, "threshold": threshold, "status": status,
            "detail": detail}


def _check_row(command, label, input_str, residual, threshold, ctx,
               detail="") -> dict:
    ok = residual < mpf(threshold)
    return _row(command, label, input_str, "residual",
                residual=mp_str(residual, ctx), threshold=threshold,
                status="pass" if ok else "fail", detail=detail)


def _render(rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"schema": SCHEMA, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS)
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(rows, args) -> None:
    text = _render(rows, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if getattr(args, "plot", False):
        _plot(rows, args)


def _plot(rows, args) -> None:
    if not args.output:
        raise ConfigError("--plot requires --output")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    base, _ = os.path.splitext(args.output)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    labels = [r["label"] for r in rows]
    if any(r["residual"] for r in rows):
        vals = [max(float(r["residual"] or "0"), 1e-300) for r in rows]
        ax.semilogy(range(len(vals)), vals, "o")
        thr = [float(r["threshold"]) for r in rows if r["threshold"]]
        if thr:
            ax.axhline(min(thr), color="red", ls="--", label="threshold")
            ax.legend()
        ax.set_ylabel("residual")
    else:
        xs = [float(r["re"] or "0") for r in rows]
        ys = [float(r["im"] or "0") for r in rows]
        ax.plot(range(len(xs)), xs, "o-", label="re")
        ax.plot(range(len(ys)), ys, "s-", label="im")
        ax.legend()
        ax.set_ylabel("value")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_title("%s report" % rows[0]["command"] if rows else "report")
    fig.tight_layout()
    fig.savefig(base + ".png", dpi=120)
    plt.close(fig)


def _run_tasks(tasks, jobs: int):
    """Evaluate [(func, kwargs)] possibly in parallel; returns row lists."""
    if jobs <= 1:
        return [func(**kw) for func, kw in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futs = [pool.submit(func, **kw) for func, kw in tasks]
        return [f.result() for f in futs]


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------


def _eval_one(f_json: str, nu: int, bits: int, target: str, tau_text: str):
    f = PeriodicFunction.from_json(f_json)
    ctx = PrecisionContext(bits=bits, target_abs_error=target)
    spec = ThetaSpec(nu, f)
    with ctx.workprec():
        try:
            tau = parse_complex(tau_text)
        except ConfigError as exc:
            return _row("eval", tau_text, tau_text, "theta",
                        status="error", detail=str(exc))
        if not tau.imag > 0:
            return _row("eval", tau_text, tau_text, "theta", status="error",
                        detail="tau must lie in the upper half-plane")
        val = theta_eval(spec, tau, ctx)
        return _row("eval", tau_text, tau_text, "theta",
                    re_s=mp_str(val.real, ctx), im_s=mp_str(val.imag, ctx),
                    residual="", threshold="", status="ok",
                    detail="abs_error<=%s" % mp_str(ctx.target_abs_error, ctx))


def cmd_eval(args) -> int:
    spec = _load_spec(args)
    ctx = _make_ctx(args)
    target = mp_str(ctx.target_abs_error, ctx)
    tasks = [(_eval_one, dict(f_json=spec.f.to_json(), nu=spec.nu,
                              bits=ctx.bits, target=target, tau_text=t))
             for t in (args.tau or [])]
    rows = _run_tasks(tasks, args.jobs)
    _emit(rows, args)
    return 0


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def _suite_decomposition(spec, ctx, taus, eps):
    rows = []
    for t in taus:
        tau = parse_complex(t)
        pole, tp, tm = decomposition(spec, tau, ctx, eps=eps)
        direct = theta_eval(spec, tau, ctx)
        rows.append(_check_row("verify", "decomposition@" + t, t,
                               abs(pole + tp + tm - direct), "1e-20", ctx))
    return rows


def _suite_modularity(spec, ctx, taus, eps):
    rows = []
    for t in taus:
        tau = parse_complex(t)
        res = verify_exact_relation(spec, tau, ctx)
        rows.append(_check_row("verify", "exact-relation@" + t, t,
                               res, "1e-20", ctx))
    M = spec.period
    if M % 2 == 0 and spec.nu in (0, 1):
        for gam in (ModularMatrix(1, 0, 2 * M, 1), ModularMatrix(1, 1, 0, 1)):
            name = "gamma(%d,%d;%d,%d)" % (gam.a, gam.b, gam.c, gam.d)
            try:
                res = verify_gamma_relation(gam, spec, parse_complex(taus[0]),
                                            ctx)
            except ValueError as exc:
                rows.append(_row("verify", name, taus[0], "residual",
                                 status="skipped", detail=str(exc)))
                continue
            rows.append(_check_row("verify", name, taus[0], res, "1e-18",
                                   ctx))
    else:
        rows.append(_row("verify", "gamma-relations", "", "residual",
                         status="skipped",
                         detail="requires even period and nu in {0,1}"))
    return rows


def _suite_stokes(spec, ctx, taus, eps):
    ev, od = parity_split(spec.f)
    want_even = spec.nu % 2 == 1
    part_ok = od.is_zero(mpf("1e-40")) if want_even \
        else ev.is_zero(mpf("1e-40"))
    if spec.nu not in (0, 1) or not part_ok:
        need = "nu=1 with even f or nu=0 with odd f"
        return [_row("verify", "stokes", "", "residual", status="skipped",
                     detail="parity-inapplicable: needs " + need)]
    rows = []
    for t in taus:
        tau = parse_complex(t)
        d = stokes_difference(spec, tau, eps=eps, ctx=ctx)
        c = stokes_closed_form(spec, tau, ctx)
        rows.append(_check_row("verify", "stokes@" + t, t, abs(d - c),
                               "1e-18", ctx))
    return rows


def _suite_alien(spec, ctx, taus, eps):
    if spec.nu not in (0, 1):
        return [_row("verify", "alien", "", "residual", status="skipped",
                     detail="closed forms cover nu in {0,1}")]
    g = build(spec.nu, spec.f)
    fh = dft(spec.f)
    rows = []
    for n in (1, 2, 3):
        for which in ("minus_half", "plus_sqrt"):
            label = "alien-n%d-%s" % (n, which)
            cf = singularity_data(g, n, which, "closed_form", ctx)
            nm = singularity_data(g, n, which, "numeric", ctx)
            res = max(abs(a - b) for a, b in
                      zip(cf.principal_coeffs, nm.principal_coeffs)) \
                if cf.principal_coeffs else mpf(0)
            rows.append(_check_row("verify", label, "n=%d" % n, res,
                                   "1e-18", ctx, detail="|fhat(n)|=%s"
                                   % mp_str(abs(fh(n)), ctx)))
    return rows


def _suite_gauss(spec, ctx, alphas):
    rows = []
    for a in alphas:
        alpha = parse_fraction(a)
        res = gauss_reciprocity_residual(spec.f, alpha)
        rows.append(_check_row("verify", "gauss@" + a, a, res, "1e-25", ctx))
    return rows


def _suite_boundary(spec, ctx, taus, eps):
    if spec.nu not in (0, 1) or spec.period % 2 != 0:
        return [_row("verify", "boundary", "", "residual", status="skipped",
                     detail="requires even period and nu in {0,1}")]
    ev, od = parity_split(spec.f)
    want_even = spec.nu == 1
    part_ok = od.is_zero(mpf("1e-40")) if want_even \
        else ev.is_zero(mpf("1e-40"))
    if not part_ok:
        return [_row("verify", "boundary", "", "residual", status="skipped",
                     detail="parity-inapplicable for the boundary relation")]
    rows = []
    for k in (5, 7, 11, 13):
        try:
            exact, pred, _ = boundary_asymptotics(spec, k, 1, 4, ctx)
        except (ValueError, IndeterminateMembership) as exc:
            rows.append(_row("verify", "boundary-k%d" % k, str(k),
                             "residual", status="skipped", detail=str(exc)))
            continue
        if isinstance(exact, tuple):
            res = max(abs(a - b) for a, b in zip(exact, pred))
        else:
            res = abs(exact - pred)
        rows.append(_check_row("verify", "boundary-k%d" % k, str(k), res,
                               "1e-12", ctx))
    return rows


def _suite_parabola(spec, ctx, taus, eps):
    rows = []
    M = spec.period
    for t in taus[:1]:
        tau = parse_complex(t)
        direct = theta_eval(spec, tau, ctx)
        for cfrac in ("0.3", "0.7"):
            c = float(cfrac) * 2 * math.pi / M
            val = theta_via_parabola(spec, tau, c, ctx)
            rows.append(_check_row("verify",
                                   "parabola@%s,c=%s*2pi/M" % (t, cfrac), t,
                                   abs(val - direct), "1e-20", ctx))
    return rows


def cmd_verify(args) -> int:
    spec = _load_spec(args)
    ctx = _make_ctx(args)
    taus = args.tau or list(_DEFAULT_TAUS)
    eps = args.eps if args.eps is not None else DEFAULT_EPS
    suite = args.suite
    with ctx.workprec():
        if suite == "gauss":
            rows = _suite_gauss(spec, ctx,
                                args.alpha or list(_DEFAULT_ALPHAS))
        elif suite == "decomposition":
            rows = _suite_decomposition(spec, ctx, taus, eps)
        elif suite == "modularity":
            rows = _suite_modularity(spec, ctx, taus, eps)
        elif suite == "stokes":
            rows = _suite_stokes(spec, ctx, taus, eps)
        elif suite == "alien":
            rows = _suite_alien(spec, ctx, taus, eps)
        elif suite == "boundary":
            rows = _suite_boundary(spec, ctx, taus, eps)
        elif suite == "parabola":
            rows = _suite_parabola(spec, ctx, taus, eps)
        else:
            raise ConfigError("unknown suite: %r" % suite)
    _emit(rows, args)
    return 0 if all(r["status"] != "fail" for r in rows) else 1


# ---------------------------------------------------------------------------
# asymptotic
# ---------------------------------------------------------------------------


def cmd_asymptotic(args) -> int:
    spec = _load_spec(args)
    ctx = _make_ctx(args)
    P = args.order
    if P < 0:
        raise ConfigError("order must be >= 0")
    with ctx.workprec():
        ser = asymptotic_series(spec, P)
        if args.q_variable:
            ser = compose_q_variable(ser, P)
        rows = []
        prev = None
        for p in range(P + 1):
            c = mpc(ser.coeffs[p])
            mag = abs(c)
            growth = ""
            if prev is not None and prev > 0:
                growth = "ratio=%s" % mp_str(mag / prev, ctx)
            if p > 0 and mag > 0:
                growth += (";" if growth else "") + "root=%s" % mp_str(
                    mag ** (mpf(1) / p), ctx)
            rows.append(_row("asymptotic", "p=%d" % p, str(p), "coefficient",
                             re_s=mp_str(c.real, ctx),
                             im_s=mp_str(c.imag, ctx), detail=growth))
            prev = mag
    _emit(rows, args)
    return 0


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    if args.name:
        try:
            nu, f = catalog(args.name)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        text = f.to_json() + "\n"
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    rows = []
    for name in CATALOG_NAMES:
        nu, f = catalog(name)
        rows.append(_row("catalog", name, quantity="entry",
                         detail="nu=%d period=%d" % (nu, f.period)))
    _emit(rows, args)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------


def _add_common(p):
    p.add_argument("--catalog", help="built-in example name")
    p.add_argument("--f", help="JSON file with {period, values}")
    p.add_argument("--nu", type=int, default=None, help="power weight")
    p.add_argument("--bits", type=int, default=None,
                   help="working precision (default RT_PRECISION_BITS or 256)")
    p.add_argument("--target-error", default="1e-30", dest="target_error")
    p.add_argument("--eps", type=float, default=None,
                   help="lateral ray offset from pi/2")
    p.add_argument("--output", help="report file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel workers for independent rows")
    p.add_argument("--plot", action="store_true",
                   help="also render a figure next to --output")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="partialtheta",
        description="Partial theta series: evaluation, resummation and "
                    "modular verification at configurable precision.")
    sub = ap.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate Theta at given tau")
    _add_common(pe)
    pe.add_argument("--tau", action="append", default=None,
                    help="point in H; 'a+bi', rationals allowed (repeatable)")
    pe.set_defaults(func=cmd_eval)

    pv = sub.add_parser("verify", help="run a verification suite")
    _add_common(pv)
    pv.add_argument("--suite", choices=_SUITES, required=True)
    pv.add_argument("--tau", action="append", default=None)
    pv.add_argument("--alpha", action="append", default=None,
                    help="rational twist for the gauss suite (repeatable)")
    pv.set_defaults(func=cmd_verify)

    pa = sub.add_parser("asymptotic",
                        help="coefficients of the divergent expansion at 0")
    _add_common(pa)
    pa.add_argument("--order", type=int, required=True)
    pa.add_argument("--q-variable", action="store_true", dest="q_variable",
                    help="recompose in the exponential variable")
    pa.set_defaults(func=cmd_asymptotic)

    pc = sub.add_parser("catalog", help="list or export built-in examples")
    pc.add_argument("--name", help="export this entry as JSON")
    pc.add_argument("--output", help="file (default stdout)")
    pc.add_argument("--format", choices=("json", "csv"), default="json")
    pc.set_defaults(func=cmd_catalog, plot=False)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())

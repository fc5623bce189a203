"""
Command-line entry point, ``wheelperc <command> [options]``.

Results go to stdout as json, csv or plain text. Progress goes to stderr.
The exit status is 0 on success, 1 when a check finds a mismatch, and 2 for
usage errors or requests past a resource cap.

Set ``WHEELPERC_CACHE_DIR`` to keep exact stationary laws and change-of-basis
matrices between runs.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

from . import __version__
from .ctengine import asm_via_ct, submatching_coefficient
from .dynamics import asm_count, stationary, verify_dynamics
from .exact import Report, frac_str
from .matchings import NoncrossingMatching, enumerate_matchings, parse_matching
from .probabilities import (
    BRUTE_MAX_N, CT_MAX_N, anti_cluster_brute, anti_cluster_prob,
    calibrate_nested_arcs, halfplane_12_45, halfplane_anticluster, halfplane_prob,
    inclusion_exclusion_checks, interpolate_Q, pairs_event_brute,
    prob_submatching_brute, prob_submatching_ct,
)
from .qkz import (
    audit_symbolic, c_matrix, c_tilde, f_polynomial, verify_ev1_expansion,
    verify_nesting, verify_product_expansion, verify_submatching_expansion,
)
from .simulator import AntiClusterEvent, PairsEvent, SubmatchingEvent, estimate_event, parse_event

SCHEMA = 1
CACHE_VERSION = 1
MU_MAX_N = 8
CMATRIX_MAX_N = 7
ASM_CT_MAX_N = 9
INTERPOLATE_MAX_K = 3
VERIFY_MAX_N = 7


class UsageError(Exception):
    pass


class ResourceCap(UsageError):
    pass


@dataclass
class CommandResult:
    command: list
    data: dict
    meta: dict = field(default_factory=dict)
    ok: bool = True
    rows: Optional[list] = None
    fmt: str = "json"

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "version": __version__, "command": self.command,
                           "ok": self.ok, "result": self.data, "meta": self.meta}, indent=2)


def progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# -- cache ---------------------------------------------------------------------

def _cache_path(kind: str, n: int) -> Optional[Path]:
    root = os.environ.get("WHEELPERC_CACHE_DIR")
    if not root:
        return None
    return Path(root) / f"{kind}_n{n}.v{CACHE_VERSION}.json"


def cached(kind: str, n: int, compute: Callable[[], object]):
    path = _cache_path(kind, n)
    if path is not None and path.exists():
        try:
            blob = json.loads(path.read_text())
            if blob.get("version") == CACHE_VERSION and blob.get("kind") == kind and blob.get("n") == n:
                return blob["payload"]
        except (OSError, ValueError, KeyError):
            pass
        progress(f"ignoring unreadable cache file {path}")
    payload = compute()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"format": "wheelperc-cache", "version": CACHE_VERSION,
                                   "kind": kind, "n": n, "payload": payload}))
        tmp.replace(path)
    return payload


# -- helpers -------------------------------------------------------------------

def _need(args, name: str):
    value = getattr(args, name, None)
    if value is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for this command")
    return value


def _matching(args) -> NoncrossingMatching:
    text = _need(args, "matching")
    try:
        return parse_matching(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse matching {text!r}: {exc}") from exc


def _cap(cond: bool, msg: str) -> None:
    if not cond:
        raise ResourceCap(f"resource cap: {msg}")


def _arcs(pi: NoncrossingMatching) -> list:
    return [list(a) for a in pi.arcs()]


def _report_data(reports: list) -> dict:
    return {"reports": [{"name": r.name, "checked": r.checked, "ok": r.ok,
                         "mismatches": [[str(x) for x in m] for m in r.mismatches[:20]]}
                        for r in reports],
            "checked": sum(r.checked for r in reports)}


def _quotient_str(terms: dict) -> str:
    """Polynomial divided by the product of its variables, written out."""
    parts = []
    for e, c in sorted(terms.items()):
        mono = "*".join(f"w{j + 1}" + (f"^{d - 1}" if d > 2 else "") for j, d in enumerate(e) if d > 1)
        if not mono:
            parts.append(str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{c}*{mono}")
    return "+".join(parts).replace("+-", "-") or "0"


# -- commands ------------------------------------------------------------------

def cmd_mu(args) -> CommandResult:
    n = _need(args, "n")
    _cap(1 <= n <= MU_MAX_N, f"mu supports 1 <= n <= {MU_MAX_N}")
    t = time.time()
    alphas = cached("mu", n, lambda: stationary(n).alphas())
    asm = asm_count(n)
    states = enumerate_matchings(n)
    rows = [[pi.to_json(), a, frac_str(Fraction(a, asm))] for pi, a in zip(states, alphas)]
    data = {"n": n, "asm": asm, "matchings": [_arcs(pi) for pi in states], "alpha": alphas,
            "probabilities": [r[2] for r in rows]}
    return CommandResult([], data, {"seconds": round(time.time() - t, 3)},
                         rows=[["matching", "alpha", "probability"]] + rows)


def cmd_cmatrix(args) -> CommandResult:
    n = _need(args, "n")
    _cap(1 <= n <= CMATRIX_MAX_N, f"cmatrix supports 1 <= n <= {CMATRIX_MAX_N}")
    kind = "ctilde" if args.inverse else "cmatrix"
    M = cached(kind, n, lambda: c_tilde(n) if args.inverse else c_matrix(n))
    states = enumerate_matchings(n)
    data = {"n": n, "inverse": bool(args.inverse), "order": [_arcs(pi) for pi in states], "matrix": M}
    return CommandResult([], data, rows=[[str(x) for x in row] for row in M])


def cmd_fpoly(args) -> CommandResult:
    pi0 = _matching(args)
    _cap(pi0.n <= CMATRIX_MAX_N, f"fpoly supports k <= {CMATRIX_MAX_N}")
    F = f_polynomial(pi0)
    terms = sorted(F.terms.items())
    data = {"matching": _arcs(pi0), "k": pi0.n,
            "terms": [{"exponents": list(e), "coefficient": c} for e, c in terms],
            "quotient": _quotient_str(F.terms) if pi0.n else "1"}
    return CommandResult([], data, rows=[["exponents", "coefficient"]]
                         + [[" ".join(map(str, e)), c] for e, c in terms])


def cmd_prob(args) -> CommandResult:
    pi0 = _matching(args)
    n = _need(args, "n")
    k = pi0.n
    if n < k:
        raise UsageError(f"matching of order {k} does not fit in order {n}")
    route = args.route or "both"
    if route not in ("both", "brute", "ct"):
        raise UsageError("--route for prob is one of both, brute, ct")
    want_brute = route in ("both", "brute") and (route == "brute" or n <= BRUTE_MAX_N)
    want_ct = route in ("both", "ct") and (route == "ct" or (k + 1 <= n <= CT_MAX_N))
    if route == "brute":
        _cap(n <= BRUTE_MAX_N, f"brute route supports n <= {BRUTE_MAX_N}")
    if route == "ct":
        _cap(k + 1 <= n <= CT_MAX_N, f"coefficient route needs k+1 <= n <= {CT_MAX_N}")
    if not (want_brute or want_ct):
        raise ResourceCap(f"resource cap: no route available for k={k}, n={n}")
    values = {}
    if want_brute:
        values["brute"] = prob_submatching_brute(pi0, n).value
    if want_ct:
        values["ct"] = prob_submatching_ct(pi0, n).value
    agree = len(set(values.values())) == 1
    value = next(iter(values.values()))
    data = {"matching": _arcs(pi0), "n": n, "value": frac_str(value),
            "routes": {r: frac_str(v) for r, v in values.items()}, "agree": agree}
    return CommandResult([], data, ok=agree,
                         rows=[["route", "value"]] + [[r, frac_str(v)] for r, v in values.items()])


def cmd_interpolate(args) -> CommandResult:
    pi0 = _matching(args)
    _cap(pi0.n <= INTERPOLATE_MAX_K, f"interpolation supports k <= {INTERPOLATE_MAX_K}")
    t = time.time()
    progress(f"fitting order-{pi0.n} event from coefficient values")
    fit = interpolate_Q(pi0)
    data = dict(fit.function.to_dict())
    data.update({"matching": _arcs(pi0), "nodes": list(fit.nodes), "witness": fit.witness,
                 "witness_ok": fit.witness_ok, "limit": frac_str(fit.function.limit())})
    return CommandResult([], data, {"seconds": round(time.time() - t, 3)}, ok=fit.witness_ok,
                         rows=[["Q", data["Q"]], ["limit", data["limit"]], ["witness_ok", fit.witness_ok]])


def cmd_halfplane(args) -> CommandResult:
    pi0 = _matching(args)
    _cap(pi0.n <= INTERPOLATE_MAX_K, f"half-plane values supported for k <= {INTERPOLATE_MAX_K}")
    value = halfplane_prob(pi0).value
    data = {"matching": _arcs(pi0), "value": frac_str(value),
            "Q": interpolate_Q(pi0).function.numerator_str()}
    return CommandResult([], data, rows=[["value", frac_str(value)], ["Q", data["Q"]]])


def cmd_anticluster(args) -> CommandResult:
    k = _need(args, "k")
    if k < 1:
        raise UsageError("--k must be at least 1")
    n = args.n
    if n is None:
        value = halfplane_anticluster(k).value
        data = {"k": k, "value": frac_str(value)}
        return CommandResult([], data, rows=[["value", frac_str(value)]])
    if n < k:
        raise UsageError("need n >= k")
    route = args.route or "closed"
    if route not in ("closed", "brute", "both"):
        raise UsageError("--route for anticluster is one of closed, brute, both")
    values = {}
    if route in ("closed", "both"):
        values["closed"] = anti_cluster_prob(k, n).value
    if route in ("brute", "both"):
        _cap(n <= BRUTE_MAX_N, f"brute route supports n <= {BRUTE_MAX_N}")
        values["brute"] = anti_cluster_brute(k, n)
    agree = len(set(values.values())) == 1
    data = {"k": k, "n": n, "value": frac_str(next(iter(values.values()))),
            "routes": {r: frac_str(v) for r, v in values.items()}, "agree": agree}
    return CommandResult([], data, ok=agree,
                         rows=[["route", "value"]] + [[r, frac_str(v)] for r, v in values.items()])


def cmd_ct(args) -> CommandResult:
    n = _need(args, "n")
    target = args.target or ("submatching" if args.matching is not None else "asm")
    trace = sys.stderr if args.emit_poly else None
    t = time.time()
    if target == "asm":
        _cap(1 <= n <= ASM_CT_MAX_N, f"ct asm supports 1 <= n <= {ASM_CT_MAX_N}")
        c = asm_via_ct(n, trace=trace, dump=args.emit_poly)
        data = {"n": n, "coefficient": c, "asm": asm_count(n), "agree": c == asm_count(n)}
        return CommandResult([], data, {"seconds": round(time.time() - t, 3)}, ok=data["agree"],
                             rows=[[c]])
    pi0 = _matching(args)
    _cap(pi0.n + 1 <= n <= CT_MAX_N, f"coefficient route needs k+1 <= n <= {CT_MAX_N}")
    c = submatching_coefficient(f_polynomial(pi0), n, trace=trace, dump=args.emit_poly)
    data = {"n": n, "matching": _arcs(pi0), "coefficient": c,
            "probability": frac_str(Fraction(c, asm_count(n)))}
    return CommandResult([], data, {"seconds": round(time.time() - t, 3)},
                         rows=[["coefficient", c], ["probability", data["probability"]]])


def _exact_for(event, n: int) -> Optional[Fraction]:
    if isinstance(event, SubmatchingEvent) and event.offset == 1:
        k = event.pattern.n
        if k + 1 <= n <= CT_MAX_N:
            return prob_submatching_ct(event.pattern, n).value
        if n <= BRUTE_MAX_N:
            return prob_submatching_brute(event.pattern, n).value
    if isinstance(event, AntiClusterEvent) and event.k <= n:
        return anti_cluster_prob(event.k, n).value
    if isinstance(event, PairsEvent) and n <= BRUTE_MAX_N:
        return pairs_event_brute(event.pairs, n)
    return None


def cmd_simulate(args) -> CommandResult:
    n = _need(args, "n")
    text = _need(args, "event")
    try:
        event = parse_event(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"cannot parse event {text!r}: {exc}") from exc
    try:
        samples = int(float(args.samples or 100_000))
    except ValueError as exc:
        raise UsageError(f"bad --samples {args.samples!r}") from exc
    if samples < 1:
        raise UsageError("--samples must be positive")
    backend = args.route or "stack"
    if backend not in ("stack", "plaquette"):
        raise UsageError("--route for simulate is stack or plaquette")
    seed = 0 if args.seed is None else args.seed
    t = time.time()
    progress(f"sampling {samples} draws at n={n} ({backend})")
    st = estimate_event(n, event, samples, seed, backend, args.threads or 1)
    lo, hi = st.ci99()
    exact = _exact_for(event, n)
    data = {"n": n, "event": text, "samples": samples, "hits": st.hits, "estimate": st.estimate,
            "ci99": [lo, hi], "exact": None if exact is None else frac_str(exact)}
    if exact is not None:
        data["exact_in_ci99"] = lo <= float(exact) <= hi
    return CommandResult([], data, {"seed": seed, "backend": backend, "threads": args.threads or 1,
                                    "seconds": round(time.time() - t, 3)},
                         rows=[["estimate", st.estimate], ["ci99_low", lo], ["ci99_high", hi],
                               ["exact", data["exact"]]])


SUITES = ("dynamics", "expansion", "ct", "symbolic", "probabilities")


def run_suite(name: str, max_n: int) -> list:
    reports = []
    if name == "dynamics":
        for n in range(1, max_n + 1):
            reports.append(verify_dynamics(n))
    elif name == "expansion":
        for n in range(1, max_n + 1):
            reports.append(verify_product_expansion(n))
            reports.append(verify_ev1_expansion(n))
            for p in (1, 2):
                reports.append(verify_nesting(n, p))
            for k in (1, 2):
                for pi0 in enumerate_matchings(k):
                    if n >= k + 1:
                        reports.append(verify_submatching_expansion(pi0, n))
    elif name == "ct":
        rep = Report("asm constant term")
        for n in range(1, max_n + 1):
            rep.record(f"n={n}", asm_via_ct(n), asm_count(n))
        reports.append(rep)
        pipe = Report("coefficient route vs brute force")
        for k in range(0, 4):
            for pi0 in enumerate_matchings(k):
                for n in range(k + 1, min(max_n, BRUTE_MAX_N) + 1):
                    pipe.record(f"{pi0} n={n}", prob_submatching_ct(pi0, n).value,
                                prob_submatching_brute(pi0, n).value)
        reports.append(pipe)
    elif name == "symbolic":
        for n in range(1, min(max_n, 3) + 1):
            reports.append(audit_symbolic(n))
    elif name == "probabilities":
        for n in range(2, min(max_n, 6) + 1):
            reports.append(inclusion_exclusion_checks(n))
        ac = Report("anti-cluster closed form vs brute force")
        for k in range(1, 6):
            for n in range(k, min(max_n, BRUTE_MAX_N) + 1):
                ac.record(f"k={k} n={n}", anti_cluster_prob(k, n).value, anti_cluster_brute(k, n))
        reports.append(ac)
        nested = calibrate_nested_arcs()
        rep = Report("nested-arc determinant sum")
        rep.checked = len(nested.validated)
        rep.mismatches = list(nested.mismatches)
        reports.append(rep)
    else:
        raise UsageError(f"unknown suite {name!r}")
    return reports


def cmd_verify(args) -> CommandResult:
    suite = args.suite or "all"
    max_n = args.max_n or 5
    _cap(1 <= max_n <= VERIFY_MAX_N, f"verify supports --max-n up to {VERIFY_MAX_N}")
    names = SUITES if suite == "all" else (suite,)
    reports = []
    t = time.time()
    for name in names:
        progress(f"suite {name}, n <= {max_n}")
        reports.extend(run_suite(name, max_n))
    ok = all(r.ok for r in reports)
    data = _report_data(reports)
    data.update({"suite": suite, "max_n": max_n, "ok": ok})
    return CommandResult([], data, {"seconds": round(time.time() - t, 3)}, ok=ok,
                         rows=[["report", "checked", "ok"]] + [[r.name, r.checked, r.ok] for r in reports])


TABLES = ("submatching", "anticluster", "cmatrix", "polynomials")


def build_table(name: str) -> list:
    rows = []
    if name == "submatching":
        for k in (1, 2, 3):
            for pi0 in enumerate_matchings(k):
                progress(f"half-plane value for {pi0}")
                v = halfplane_prob(pi0).value
                rows.append({"k": k, "matching": _arcs(pi0), "value": frac_str(v)})
        rows.append({"k": 2, "matching": [[1, 2], [4, 5]], "offset_points": 5,
                     "value": frac_str(halfplane_12_45().value)})
    elif name == "anticluster":
        for k in range(1, 9):
            rows.append({"k": k, "value": frac_str(halfplane_anticluster(k).value)})
    elif name == "cmatrix":
        for n in (2, 3, 4):
            rows.append({"n": n, "order": [_arcs(pi) for pi in enumerate_matchings(n)],
                         "C": c_matrix(n), "C_inverse": c_tilde(n)})
    elif name == "polynomials":
        for k in (0, 1, 2, 3):
            for pi0 in enumerate_matchings(k):
                F = f_polynomial(pi0)
                rows.append({"k": k, "matching": _arcs(pi0),
                             "quotient": _quotient_str(F.terms) if k else "1"})
    else:
        raise UsageError(f"unknown table {name!r}")
    return rows


def cmd_tables(args) -> CommandResult:
    which = args.table or "all"
    names = TABLES if which == "all" else (which,)
    data = {name: build_table(name) for name in names}
    flat = [["table", "entry"]]
    for name, rows in data.items():
        flat.extend([name, json.dumps(r)] for r in rows)
    return CommandResult([], data, rows=flat)


COMMANDS = {
    "mu": (cmd_mu, "exact stationary law on noncrossing matchings"),
    "cmatrix": (cmd_cmatrix, "change-of-basis matrix or its inverse"),
    "fpoly": (cmd_fpoly, "polynomial attached to a submatching event"),
    "prob": (cmd_prob, "finite-n submatching probability"),
    "interpolate": (cmd_interpolate, "rational function of n for a submatching event"),
    "halfplane": (cmd_halfplane, "half-plane limit of a submatching probability"),
    "anticluster": (cmd_anticluster, "anti-cluster probability, finite n or half-plane"),
    "ct": (cmd_ct, "single-coefficient extraction"),
    "simulate": (cmd_simulate, "Monte Carlo estimate with a 99% interval"),
    "verify": (cmd_verify, "run the exact property suites"),
    "tables": (cmd_tables, "reproduce the reference tables"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--n", type=int)
    common.add_argument("--k", type=int)
    common.add_argument("--matching")
    common.add_argument("--route")
    common.add_argument("--samples")
    common.add_argument("--seed", type=int)
    common.add_argument("--max-n", type=int, dest="max_n")
    parser = argparse.ArgumentParser(prog="wheelperc", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "cmatrix":
            p.add_argument("--inverse", action="store_true")
        if name == "ct":
            p.add_argument("target", nargs="?", choices=("asm", "submatching"))
            p.add_argument("--emit-poly", action="store_true", dest="emit_poly")
        if name == "simulate":
            p.add_argument("--event")
        if name == "verify":
            p.add_argument("--suite", choices=("all",) + SUITES)
        if name == "tables":
            p.add_argument("--table", choices=("all",) + TABLES)
    return parser


def run(argv: list) -> CommandResult:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        raise UsageError("--threads must be at least 1")
    func = COMMANDS[args.command][0]
    result = func(args)
    result.command = list(argv)
    result.fmt = args.format
    return result


def render(result: CommandResult, fmt: str) -> str:
    if fmt == "json":
        return result.to_json()
    rows = result.rows or [[k, json.dumps(v) if isinstance(v, (list, dict)) else v]
                           for k, v in result.data.items()]
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue().rstrip("\n")
    return "\n".join("  ".join(str(x) for x in row) for row in rows)


def main(argv: Optional[list] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        result = run(argv)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"wheelperc: {exc}", file=sys.stderr)
        return 2
    print(render(result, result.fmt))
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())

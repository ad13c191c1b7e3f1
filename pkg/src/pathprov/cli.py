"""Command-line front end.

Every command prints its primary result followed by ``key=value`` lines;
``--format report`` prints only the ``key=value`` lines.  Domain errors exit
with status 1 and the error class name on stderr; usage errors exit with 2.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import automata, io
from .cnf import parse_cnf
from .compile import compile_1wp_dag
from .counting import (Estimate, EstimatorConfig, condition_pinned, dnf_exact,
                       estimate_nobdd, exact_count, karp_luby_dnf, naive_monte_carlo,
                       weighted_to_unweighted)
from .errors import BudgetExceeded, PathProvError, TooLarge
from .gadgets import (dwt_to_2wp, gen_1wp_all, gen_2wp_pt_unlabelled, gen_dwt_dwt,
                      gen_rpq_gadget, pp2dnf_gadget, rpq_gadget_pattern)
from .graph import GraphClass, classify, format_fraction
from .homomorphism import homomorphism_exists
from .nobdd import parse as parse_nobdd, serialize as serialize_nobdd
from .provenance import enumerate_matches, represents_check
from .reliability import StconInstance, stcon_compile, stcon_estimate
from .rpq import Rpq, brute_force_rpq_pqe, pqe_disjoint_union, rpq_eval, _component
from .worlds import brute_force_phom

CLASS_ORDER = [GraphClass.OneWayPath, GraphClass.TwoWayPath, GraphClass.DownwardTree,
               GraphClass.Polytree, GraphClass.Dag, GraphClass.All]
EXACT_BUDGET = 1 << 16


class UsageError(Exception):
    pass


class Report:
    def __init__(self):
        self.lines: list[str] = []
        self.fields: dict[str, str] = {}

    def say(self, text: str):
        self.lines.append(text.rstrip("\n"))

    def __setitem__(self, key, value):
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, Fraction):
            value = format_fraction(value)
        elif isinstance(value, float):
            value = f"{value:.6g}"
        self.fields[key] = str(value)

    def render(self, fmt: str) -> str:
        block = [f"{k}={v}" for k, v in self.fields.items()]
        body = block if fmt == "report" else self.lines + block
        return "\n".join(body) + "\n"


def _decimal(x) -> str:
    return f"{float(x):.6g}"


def _config(args) -> EstimatorConfig:
    try:
        return EstimatorConfig(args.epsilon, args.delta, args.seed, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _instance(path):
    return io.parse_graph(io.read_text(path))


def _query(path_or_pattern: str) -> io.QueryFile:
    p = Path(path_or_pattern)
    if p.is_file():
        return io.parse_query(io.read_text(p))
    return io.QueryFile(pattern=path_or_pattern)


def _graph_query(path) -> "io.LabeledGraph":
    q = io.parse_query(io.read_text(path))
    if q.is_rpq:
        raise UsageError("this command needs a graph query")
    return q.graph


def _rpq(q: io.QueryFile, alphabet=()) -> Rpq:
    dfa = q.dfa if q.dfa is not None else automata.regex_to_dfa(q.pattern)
    return Rpq(dfa.with_alphabet(alphabet))


def _add_estimate(rep: Report, est, exact):
    rep["estimate"] = est.value
    if exact is not None:
        rep["exact"] = exact
        rep["exact_decimal"] = _decimal(exact)
    rep["samples"] = est.samples
    rep["batches"] = len(est.batch_means)
    rep["converged"] = est.converged


def _figure(args, rep, est, exact, title):
    if getattr(args, "figure", None):
        from .plotting import plot_estimate

        plot_estimate(est, args.figure, exact, args.epsilon, title)
        rep["figure"] = args.figure


def _try_exact(fn):
    try:
        return fn()
    except (BudgetExceeded, TooLarge):
        return None


# ------------------------------------------------------------ commands

def cmd_classify(args, rep):
    G = _instance(args.graph).base
    classes = [str(c) for c in CLASS_ORDER if c in classify(G)]
    rep.say(" ".join(classes))
    rep["classes"] = ",".join(classes)
    rep["vertices"] = len(G.vertices)
    rep["edges"] = G.size


def cmd_hom(args, rep):
    q = io.parse_query(io.read_text(args.query))
    H = _instance(args.instance).base
    holds = rpq_eval(_rpq(q, H.alphabet), H) if q.is_rpq else homomorphism_exists(q.graph, H)
    rep.say("true" if holds else "false")
    rep["holds"] = holds


def cmd_pqe_exact(args, rep):
    q = io.parse_query(io.read_text(args.query))
    P = _instance(args.instance).graph
    if q.is_rpq:
        value = brute_force_rpq_pqe(_rpq(q, P.alphabet), P, args.cap)
        method = "brute"
    elif args.method == "nobdd":
        value = exact_count(compile_1wp_dag(q.graph, P), P.prob)
        method = "nobdd"
    else:
        value = brute_force_phom(q.graph, P, args.cap)
        method = "brute"
    rep.say(format_fraction(value))
    rep["value"] = value
    rep["decimal"] = _decimal(value)
    rep["method"] = method


def cmd_compile(args, rep):
    G = _graph_query(args.query)
    P = _instance(args.instance).graph
    D = compile_1wp_dag(G, P, prune=not args.no_prune)
    text = serialize_nobdd(D)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        rep["output"] = args.output
    else:
        rep.say(text)
    for k, v in D.stats().items():
        rep[k] = v


def cmd_count(args, rep):
    D = parse_nobdd(io.read_text(args.nobdd))
    weights = io.parse_weights(io.read_text(args.weights)) if args.weights else None
    if args.unweighted:
        if weights is None:
            raise UsageError("--unweighted needs --weights")
        Dc, rest = condition_pinned(D, weights)
        u = weighted_to_unweighted(Dc, rest)
        mc = exact_count(u.nobdd)
        value = mc / u.normalizer
        rep["models"] = mc
        rep["normalizer_log2"] = u.log2_normalizer
        rep["transformed_variables"] = len(u.nobdd.order)
    elif weights is None:
        value = exact_count(D)
        rep.say(format_fraction(value))
        rep["models"] = value
        rep["variables"] = len(D.order)
        return
    else:
        value = exact_count(D, weights)
    rep.say(format_fraction(value))
    rep["value"] = value
    rep["decimal"] = _decimal(value)


def cmd_estimate(args, rep):
    G = _graph_query(args.query)
    P = _instance(args.instance).graph
    cfg = _config(args)
    exact = None
    if args.method == "nobdd":
        D = compile_1wp_dag(G, P)
        est = estimate_nobdd(D, P.prob, cfg)
        exact = _try_exact(lambda: exact_count(D, P.prob, EXACT_BUDGET))
        rep["nodes"] = len(D)
    elif args.method == "karp-luby":
        F = enumerate_matches(G, P)
        est = karp_luby_dnf(F, P.prob, cfg)
        exact = _try_exact(lambda: dnf_exact(F, P.prob)) if len(F) <= 64 else None
        rep["clauses"] = len(F)
    else:
        value = naive_monte_carlo(G, P, args.samples, args.seed)
        est = Estimate(value, None, args.samples, True)
        exact = _try_exact(lambda: brute_force_phom(G, P, args.cap))
    rep.say(_decimal(est.value) + (f" (exact {format_fraction(exact)})" if exact is not None else ""))
    rep["method"] = args.method
    rep["seed"] = args.seed
    rep["epsilon"] = args.epsilon
    rep["delta"] = args.delta
    _add_estimate(rep, est, exact)
    _figure(args, rep, est, exact, f"estimate ({args.method})")


def cmd_stcon(args, rep):
    P = _instance(args.graph).graph
    I = StconInstance(P, args.source, args.target)
    D = stcon_compile(I)
    for k, v in D.stats().items():
        rep[k] = v
    if args.exact:
        est = stcon_estimate(I, exact=True, compiled=D)
        exact = est.exact
    else:
        est = stcon_estimate(I, _config(args), compiled=D)
        exact = _try_exact(lambda: exact_count(D, P.prob, EXACT_BUDGET))
    rep.say(_decimal(est.value) + (f" (exact {format_fraction(exact)})" if exact is not None else ""))
    rep["source"] = args.source
    rep["target"] = args.target
    rep["seed"] = args.seed
    rep["epsilon"] = args.epsilon
    rep["delta"] = args.delta
    _add_estimate(rep, est, exact)
    _figure(args, rep, est, exact, f"reliability {args.source} -> {args.target}")


def _language(text: str) -> automata.Dfa:
    q = _query(text)
    return q.dfa if q.dfa is not None else automata.regex_to_dfa(q.pattern)


def cmd_rpq(args, rep):
    P = _instance(args.instance).graph
    own = _language(args.pattern)
    Q = Rpq(own.with_alphabet(P.alphabet))
    rep["holds"] = rpq_eval(Q, P)
    rep["bounded"] = Q.is_bounded()
    rep["local"] = Q.is_local()
    cfg = _config(args)
    if args.union:
        est = pqe_disjoint_union(Rpq(own), Rpq(_language(args.union)), P, cfg, exact=args.exact)
        rep["mode"] = "union"
    elif args.exact:
        value = brute_force_rpq_pqe(Q, P, args.cap)
        est = Estimate(float(value), value, 0, True)
        rep["mode"] = "brute"
    else:
        est = _component(Q, P, cfg, exact=False)
        rep["mode"] = "bounded" if Q.is_bounded() else "local"
    rep.say(_decimal(est.value) + (f" (exact {format_fraction(est.exact)})"
                                   if est.exact is not None else ""))
    _add_estimate(rep, est, est.exact)


def cmd_minify(args, rep):
    M = automata.minify(_language(args.pattern))
    rep.say(automata.format_dfa(M))
    rep["states"] = M.n
    bounded = M.is_finite()
    rep["bounded"] = bounded
    rep["local"] = automata.is_local(M) if not M.is_empty() else False
    if bounded:
        words = list(M.words())
        rep["words"] = ",".join(w or "ε" for w in words[:20]) + (",..." if len(words) > 20 else "")


def cmd_gadget(args, rep):
    phi = parse_cnf(io.read_text(args.cnf))
    d = args.d if args.d is not None else max(2, phi.max_degree())
    kind = args.kind
    if kind == "pp2dnf":
        query, P = pp2dnf_gadget(phi.clauses)
        query_text, inst_text = io.format_graph(query), io.format_graph(P)
    else:
        if kind == "1wp-all":
            g = gen_1wp_all(phi, d)
        elif kind == "dwt-dwt":
            g = gen_dwt_dwt(phi)
        elif kind == "2wp-dwt":
            g = gen_dwt_dwt(phi)
            g = type(g)(dwt_to_2wp(g.query), g.instance, g.distinguished)
        elif kind == "2wp-pt":
            g = gen_2wp_pt_unlabelled(phi)
        else:
            _, g = gen_rpq_gadget(phi, d)
        query_text = f"regex {rpq_gadget_pattern(d)}\n" if g.query is None else io.format_graph(g.query)
        inst_text = io.format_graph(g.probabilized(), g.distinguished)
        rep["distinguished"] = len(g.distinguished)
        rep["instance_edges"] = g.instance.size
        if g.query is not None:
            rep["query_edges"] = g.query.size
    if args.out:
        qpath, ipath = f"{args.out}.query", f"{args.out}.instance"
        Path(qpath).write_text(query_text, encoding="utf-8")
        Path(ipath).write_text(inst_text, encoding="utf-8")
        rep["query_file"] = qpath
        rep["instance_file"] = ipath
    else:
        rep.say(query_text + "---\n" + inst_text)
    rep["kind"] = kind
    rep["n"] = phi.n
    rep["m"] = phi.m


def cmd_verify(args, rep):
    q = io.parse_query(io.read_text(args.query))
    inst = _instance(args.instance)
    phi = parse_cnf(io.read_text(args.cnf))
    query = _rpq(q, inst.base.alphabet) if q.is_rpq else q.graph
    holds = represents_check(query, inst.base, inst.distinguished, phi, args.cap)
    rep.say("true" if holds else "false")
    rep["holds"] = holds


# ------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--epsilon", type=float, default=0.1, help="relative error (default 0.1)")
    common.add_argument("--delta", type=float, default=0.25,
                        help="failure probability (default 0.25)")
    common.add_argument("--workers", type=int, default=1, help="estimator threads")
    common.add_argument("--format", choices=["text", "report"], default="text")
    common.add_argument("--cap", type=int, default=None,
                        help="max uncertain edges for exhaustive enumeration")

    parser = argparse.ArgumentParser(prog="pathprov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(fn=fn)
        return p

    p = add("classify", cmd_classify, "graph classes of a graph file")
    p.add_argument("graph")
    p = add("hom", cmd_hom, "does the query map into the instance")
    p.add_argument("query")
    p.add_argument("instance")
    p = add("pqe-exact", cmd_pqe_exact, "exact query probability")
    p.add_argument("query")
    p.add_argument("instance")
    p.add_argument("--method", choices=["brute", "nobdd"], default="brute")
    p = add("compile", cmd_compile, "compile a 1WP query on a DAG into an nOBDD")
    p.add_argument("query")
    p.add_argument("instance")
    p.add_argument("-o", "--output")
    p.add_argument("--no-prune", action="store_true")
    p = add("count", cmd_count, "exact (weighted) model count of an nOBDD file")
    p.add_argument("nobdd")
    p.add_argument("--weights")
    p.add_argument("--unweighted", action="store_true",
                   help="go through the comparator transform")
    p = add("estimate", cmd_estimate, "approximate query probability")
    p.add_argument("query")
    p.add_argument("instance")
    p.add_argument("--method", choices=["nobdd", "karp-luby", "monte-carlo"], default="nobdd")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo samples")
    p.add_argument("--figure", help="write a PNG of the batch means")
    p = add("stcon", cmd_stcon, "two-terminal reliability on a DAG")
    p.add_argument("graph")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--figure", help="write a PNG of the batch means")
    p = add("rpq", cmd_rpq, "regular path query probability")
    p.add_argument("pattern", help="regex, or a query file (regex/dfa)")
    p.add_argument("instance")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--union", help="second pattern over a disjoint alphabet")
    p = add("minify", cmd_minify, "DFA of the minimal sublanguage")
    p.add_argument("pattern")
    p = add("gadget", cmd_gadget, "encode a monotone 2-CNF as a query/instance pair")
    p.add_argument("kind", choices=["1wp-all", "dwt-dwt", "2wp-dwt", "2wp-pt", "rpq", "pp2dnf"])
    p.add_argument("--cnf", required=True)
    p.add_argument("--d", type=int, default=None, help="degree bound (default: max(2, degree))")
    p.add_argument("--out", help="write <out>.query and <out>.instance")
    p = add("verify-represents", cmd_verify, "check that a gadget represents a CNF")
    p.add_argument("query")
    p.add_argument("instance")
    p.add_argument("--cnf", required=True)
    return parser


def run(argv=None) -> tuple[int, str, str]:
    """Run a command; returns (status, stdout, stderr)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    rep = Report()
    try:
        args.fn(args, rep)
    except PathProvError as exc:
        return 1, "", f"{type(exc).__name__}: {exc}\n"
    except (UsageError, OSError) as exc:
        return 2, "", f"usage error: {exc}\n"
    return 0, rep.render(args.format), ""


def main(argv=None) -> int:
    status, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())

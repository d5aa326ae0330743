# raagtool/main.py
"""
Command-line front end.

Every subcommand prints one JSON document (or CSV rows) on stdout:
    {"command", "version", "config", "results", "checks", "timestamp"}
Diagnostics go to stderr. Exit codes: 0 ok, 1 bad input or precondition,
2 guard exceeded, 3 self-check failure.
"""

import argparse
import csv
import json
import sys
import traceback
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel

from config import DEFAULT_GUARD_DIM, DEFAULT_LIMIT_DEPTH, DEFAULT_SEED, DEFAULT_THREADS, VERSION
from database import cache_result, get_cached_result, init_database
from errors import (
    ExpressionSyntaxError,
    GuardExceededError,
    InputError,
    MalformedGraphError,
    ParameterRangeError,
    PreconditionError,
    RaagToolkitError,
    SelfCheckError,
)
from funcalc import (
    SchedulePoint,
    build_unitary_rep,
    commutator_norm,
    distance_from_identity,
    rep_apply,
    rep_relation_checks,
    strong_conv_experiment,
)
from graph_core import SimpleGraph, channel_index, parse_graph
from graph_fock import (
    MomentQuery,
    catalan,
    fock_norm_report,
    moment_direct,
    moment_factorize,
    semicircle_moments,
)
from ncpoly import NcPolynomial, l1_norm as poly_l1_norm, parse_poly, self_adjoint_context
from norms import start_vector
from raag_words import (
    GroupAlgebraElement,
    l1_norm,
    moment_norm_lower,
    normal_form,
    parse_algebra,
    regular_norm_lower,
)
from rand_model import (
    RngSeed,
    assemble_model,
    channel_layout,
    normalized_trace,
    operator_norm_mf,
    parse_k_spec,
    sample_problem_model,
    sgrm_norm,
)
from spectral import (
    BumpSpec,
    contradiction_threshold,
    haar_bound,
    lp_norm_bound,
    pairing_lower,
    pairing_rate,
    spherical_coeff,
    trivial_limit_gap,
    trivial_rep_check,
)
from toeplitz_limit import (
    isometry_defect,
    key_norm_checks,
    key_norm_direct,
    key_norm_table,
    limit_space,
    runit_completeness,
)
from validator import Check, check_equal, check_geq, check_leq, exit_code_for, summarize_checks

EXACT_TRACE_LIMIT = 4096
ISOMETRY_DIM_LIMIT = 200_000


# -----------------------------
# Request / report models
# -----------------------------

class RunConfig(BaseModel):
    """Fully resolved configuration of one run; echoed into the report."""
    command: str
    graph: Optional[str] = None
    vertex: Optional[str] = None
    v: Optional[str] = None
    w: Optional[str] = None
    poly: Optional[str] = None
    z: Optional[str] = None
    m: Optional[List[int]] = None
    K: Optional[str] = None
    n: Optional[int] = None
    schedule: Optional[str] = None
    depth: Optional[int] = None
    radius: Optional[int] = None
    max_p: Optional[int] = None
    moment_k: Optional[int] = None
    queries: Optional[int] = None
    pairs: Optional[int] = None
    seed: int = DEFAULT_SEED
    trials: Optional[int] = None
    no_aux: bool = False
    u: Optional[float] = None
    T: Optional[float] = None
    eps: Optional[float] = None
    p: Optional[float] = None
    eta: Optional[float] = None
    c: Optional[float] = None
    guard_dim: int = DEFAULT_GUARD_DIM
    out: str = "json"
    threads: int = DEFAULT_THREADS
    cache: bool = False

    def cache_key(self) -> Dict[str, Any]:
        """The config minus presentation and scheduling fields."""
        return self.model_dump(exclude={"out", "threads", "cache"})


class Report(BaseModel):
    command: str
    version: str
    config: Dict[str, Any]
    results: List[Dict[str, Any]]
    checks: List[Check]
    timestamp: str


def _log(message: str):
    print(message, file=sys.stderr)


def _load_graph(config: RunConfig) -> SimpleGraph:
    if not config.graph:
        raise MalformedGraphError("--graph is required for this command")
    try:
        with open(config.graph, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise MalformedGraphError(f"cannot read graph file {config.graph}: {e}") from None
    return parse_graph(text)


def _seeds(config: RunConfig) -> List[int]:
    trials = config.trials if config.trials is not None else 1
    if trials < 1:
        raise ParameterRangeError("--trials must be at least 1")
    return [config.seed + i for i in range(trials)]


def _require(value, flag: str):
    if value is None:
        raise ParameterRangeError(f"{flag} is required for this command")
    return value


# -----------------------------
# moments
# -----------------------------

def _random_query(g: SimpleGraph, rng: np.random.Generator, max_degree: int) -> MomentQuery:
    remaining = max_degree
    factors = []
    for _ in range(int(rng.integers(1, 5))):
        if remaining == 0:
            break
        degree = int(rng.integers(1, min(2, remaining) + 1))
        coeffs = rng.integers(-1, 3, size=degree + 1).astype(float)
        if coeffs[-1] == 0:
            coeffs[-1] = 1.0
        remaining -= degree
        factors.append((g.vertices[int(rng.integers(len(g)))], coeffs))
    return MomentQuery.of(factors)


def cmd_moments(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    v = config.vertex or g.vertices[0]
    g.index(v)
    max_p = config.max_p if config.max_p is not None else 6
    if max_p < 1:
        raise ParameterRangeError("--max-p must be at least 1")

    _log(f"[1/2] ⏳ Vacuum moments of s_{v} up to order {2 * max_p}...")
    moments = semicircle_moments(g, v, 2 * max_p + 1, D=config.depth or max_p + 1)
    results, checks = [], []
    for p in range(1, max_p + 1):
        even = moments[2 * p].real
        odd = moments[2 * p - 1].real
        results.append({"p": p, "moment": even, "catalan": catalan(p), "odd_moment": odd})
        checks.append(check_equal(f"catalan p={p}", even, catalan(p)))
        checks.append(check_equal(f"odd moment {2 * p - 1}", odd, 0.0))

    queries = config.queries if config.queries is not None else 20
    _log(f"[2/2] ⏳ Cross-checking {queries} factorized moments against the Fock space...")
    rng = RngSeed(config.seed, "moments").generator()
    for i in range(queries):
        q = _random_query(g, rng, 6)
        direct = moment_direct(g, q)
        factored = moment_factorize(g, q)
        checks.append(check_equal(f"factorize query {i}", abs(factored - direct), 0.0, 1e-12 * max(1.0, abs(direct))))
    _log("✓ Moments done")
    return results, checks


# -----------------------------
# fock-norm / reg-norm
# -----------------------------

def cmd_fock_norm(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    p = parse_poly(_require(config.poly, "--poly"), g)
    D = config.depth if config.depth is not None else max(p.degree, 1) + 2
    _log(f"[1/1] ⏳ Compression norm at depths {D - 1} and {D}...")
    report = fock_norm_report(g, p, D)
    if not report.converged:
        _log(f"⚠ Norm has not stabilized between depths {D - 1} and {D}")
    checks = [check_leq("l1 bound", report.value, poly_l1_norm(p), 1e-9)]
    return [report.as_dict()], checks


def cmd_reg_norm(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    z = parse_algebra(g, _require(config.z, "--z"))
    radius = config.radius if config.radius is not None else 8
    top_k = config.moment_k if config.moment_k is not None else 6

    _log(f"[1/2] ⏳ Ball compression at radius {radius}...")
    ball = regular_norm_lower(z, radius)
    _log(f"[2/2] ⏳ Trace moments up to k={top_k}...")
    moments = [moment_norm_lower(z, k) for k in range(1, top_k + 1)]
    upper = l1_norm(z)
    results = [{"oracle": "ball_compression", "radius": radius, "value": ball, "upper": upper}]
    results += [{"oracle": "trace_moment", "k": k, "value": val, "upper": upper} for k, val in enumerate(moments, 1)]
    checks = [check_leq("ball lower <= l1", ball, upper, 1e-9)]
    checks += [check_leq(f"moment k={k} <= l1", val, upper, 1e-9) for k, val in enumerate(moments, 1)]
    checks += [
        check_geq(f"moments nondecreasing k={k + 1}", b, a, 1e-9)
        for k, (a, b) in enumerate(zip(moments, moments[1:]), 1)
    ]
    return results, checks


# -----------------------------
# sample-norm
# -----------------------------

def _sum_of_variables(g: SimpleGraph) -> NcPolynomial:
    total = NcPolynomial()
    for v in g.vertices:
        total = total + NcPolynomial.variable(v)
    return total


def _sgrm_concentration(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    n = config.n
    seeds = _seeds(config)
    _log(f"[1/1] ⏳ Sampling {len(seeds)} SGRM({n}, 1/{n}) matrices...")
    norms = [sgrm_norm(n, RngSeed(s, "sgrm")) for s in seeds]
    results = [{"seed": s, "n": n, "norm": val} for s, val in zip(seeds, norms)]
    inside = sum(1.8 <= val <= 2.3 for val in norms) / len(norms)
    return results, [check_geq("norm in [1.8, 2.3]", inside, 0.95)]


def cmd_sample_norm(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    if config.n is not None:
        return _sgrm_concentration(config)
    g = _load_graph(config)
    ms = config.m or [1]
    K = None if config.no_aux else parse_k_spec(_require(config.K, "--K"), g)
    p = parse_poly(config.poly, g) if config.poly else _sum_of_variables(g)
    seeds = _seeds(config)
    cells = [(m, seed) for m in ms for seed in seeds]
    results, checks = [], []
    for i, (m, seed) in enumerate(cells):
        _log(f"[{i + 1}/{len(cells)}] ⏳ Sampling the model, m={m} seed {seed}...")
        if K is None:
            layout = channel_layout(g, m, None, config.guard_dim)
            ops = {v: sample_problem_model(g, v, m, RngSeed(seed), layout=layout) for v in g.vertices}
        else:
            ops = assemble_model(g, m, K, RngSeed(seed), config.guard_dim)
        dim = next(iter(ops.values())).dim
        ctx = self_adjoint_context(ops)
        estimate = operator_norm_mf(p, ctx, dim)
        if not estimate.converged:
            _log(f"⚠ Norm estimate did not converge for m={m} seed {seed}")
        trace = normalized_trace(p, ctx, dim) if dim <= EXACT_TRACE_LIMIT else normalized_trace(p, ctx, dim, probes=8)
        results.append({"seed": seed, "m": m, "dim": dim, "aux": K is not None,
                        "norm": estimate.value, "method": estimate.method, "trace": trace.real})
        if seed == seeds[0]:
            xi = start_vector(dim)
            for e in sorted(g.edges, key=lambda pair: sorted(g.position[x] for x in pair)):
                v, w = sorted(e, key=g.position.get)
                a, b = ops[v], ops[w]
                defect = float(np.linalg.norm(a @ (b @ xi) - b @ (a @ xi)))
                checks.append(check_equal(f"commute X_{v} X_{w} m={m}", defect, 0.0, 1e-12))
    return results, checks


# -----------------------------
# limit-check
# -----------------------------

def _non_adjacent_pair(g: SimpleGraph) -> Tuple[str, str]:
    for i, v in enumerate(g.vertices):
        for w in g.vertices[i + 1:]:
            if not g.adjacent(v, w):
                return v, w
    raise ParameterRangeError("the graph is complete: there is no non-adjacent pair")


def cmd_limit_check(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    if config.v and config.w:
        v, w = config.v, config.w
    else:
        v, w = _non_adjacent_pair(g)
    ms = config.m or [1, 2, 3, 4]
    D = config.depth if config.depth is not None else DEFAULT_LIMIT_DEPTH

    _log(f"[1/2] ⏳ Key norms of L_{v}* L_{w} for m in {ms}...")
    rows, trend = key_norm_table(g, v, w, ms, D)
    checks = key_norm_checks(rows, trend)

    _log("[2/2] ⏳ r-unit completeness and isometry...")
    channels = channel_index(g)
    for m in ms:
        for x in (v, w):
            size = m ** len(channels.channels_of(x))
            lhs, rhs = runit_completeness(size)
            checks.append(check_equal(f"r-unit completeness {x} m={m}", float(np.abs(lhs - rhs).max()), 0.0))
        space_dim = limit_space(g, (v,), m, D, config.guard_dim).dim
        if space_dim <= ISOMETRY_DIM_LIMIT:
            checks.append(check_equal(f"isometry L_{v} m={m}", isometry_defect(g, v, m, D), 0.0, 1e-12))
        else:
            _log(f"⚠ Skipping the isometry check at m={m} (dimension {space_dim})")
        if limit_space(g, (v, w), m, 1, config.guard_dim).dim <= ISOMETRY_DIM_LIMIT:
            reduced = next(row.value for row in rows if row.m == m)
            direct = key_norm_direct(g, v, w, m, 1, config.guard_dim)
            checks.append(check_equal(f"key norm from L operators m={m}", direct, reduced, 1e-6 * max(1.0, reduced)))
    return [row.as_dict() for row in rows], checks


# -----------------------------
# unitary-rep / converge
# -----------------------------

def _random_element(g: SimpleGraph, rng: np.random.Generator, length: int):
    letters = [(g.vertices[int(rng.integers(len(g)))], int(rng.choice([1, -1]))) for _ in range(length)]
    return normal_form(g, letters)


def cmd_unitary_rep(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    K = parse_k_spec(_require(config.K, "--K"), g)
    z = parse_algebra(g, config.z) if config.z else None
    pairs = config.pairs if config.pairs is not None else 5
    seeds = _seeds(config)
    cells = [(m, seed) for m in (config.m or [1]) for seed in seeds]
    results, checks = [], []
    for i, (m, seed) in enumerate(cells):
        _log(f"[{i + 1}/{len(cells)}] ⏳ Building the representation, m={m} seed {seed}...")
        rep = build_unitary_rep(g, m, K, seed, config.guard_dim, verify=False)
        checks += rep_relation_checks(rep)
        row = {"seed": seed, "m": m, "dim": rep.dim,
               "blocks": {v: int(u.block.shape[0]) for v, u in rep.unitaries.items()}}
        row["commutators"] = {
            f"{v}{w}": commutator_norm(rep, v, w)
            for j, v in enumerate(g.vertices) for w in g.vertices[j + 1:] if not g.adjacent(v, w)
        }
        if z is not None:
            estimate = distance_from_identity(rep, z)
            row["distance_from_identity"] = estimate.value
            row["distance_method"] = estimate.method
        rng = RngSeed(seed, "pairs").generator()
        xi = start_vector(rep.dim)
        for k in range(pairs):
            x, y = _random_element(g, rng, 4), _random_element(g, rng, 4)
            joint = rep_apply(rep, GroupAlgebraElement.from_element(x * y)).matvec(xi)
            split = rep_apply(rep, GroupAlgebraElement.from_element(x)).matvec(
                rep_apply(rep, GroupAlgebraElement.from_element(y)).matvec(xi)
            )
            checks.append(check_equal(f"homomorphism m={m} seed={seed} pair={k}",
                                      float(np.linalg.norm(joint - split)), 0.0, 1e-10))
        results.append(row)
    return results, checks


def parse_schedule(text: str, m: int, g: SimpleGraph) -> List[SchedulePoint]:
    """'K=8;16;32' -> one point per uniform K value."""
    text = text.strip()
    if not text.startswith("K="):
        raise ExpressionSyntaxError("schedule must look like K=8;16;32", 0)
    points = []
    for pos, chunk in enumerate(text[2:].split(";")):
        try:
            k = int(chunk)
        except ValueError:
            raise ExpressionSyntaxError(f"bad schedule entry {chunk!r}", pos) from None
        if k < 1:
            raise ParameterRangeError("schedule entries must be at least 1")
        points.append(SchedulePoint(m, {v: k for v in g.vertices}))
    return points


def cmd_converge(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    g = _load_graph(config)
    z = parse_algebra(g, _require(config.z, "--z"))
    text = _require(config.schedule, "--schedule")
    schedule = [point for m in (config.m or [1]) for point in parse_schedule(text, m, g)]
    report = strong_conv_experiment(
        g, z, schedule, _seeds(config),
        radius=config.radius if config.radius is not None else 8,
        moment_k=config.moment_k if config.moment_k is not None else 6,
        threads=config.threads,
        guard=config.guard_dim,
    )
    ref = report["reference"]
    checks = [check_leq("reference lower <= upper", ref["lower"], ref["upper"], 1e-9)]
    checks += [check_leq(f"mean m={row['m']} K={row['K'][g.vertices[0]]} <= l1", row["mean"], ref["upper"], 1e-9)
               for row in report["schedule"]]
    return [report], checks


# -----------------------------
# spectral
# -----------------------------

def cmd_spectral(config: RunConfig) -> Tuple[List[dict], List[Check]]:
    u = config.u if config.u is not None else 1.0
    spec = BumpSpec(config.T if config.T is not None else 3.0, config.eps if config.eps is not None else 0.02)
    p = config.p if config.p is not None else 1.5
    eta = config.eta if config.eta is not None else u
    c = config.c if config.c is not None else 10.0

    _log("[1/2] ⏳ Quadratures...")
    pairing = pairing_lower(u, spec)
    lp = lp_norm_bound(spec, p)
    result = {
        "u": u, "T": spec.T, "eps": spec.eps, "p": p,
        "spherical_coeff": spherical_coeff(u, spec.T),
        "lp_norm": lp, "lp_bound": haar_bound(spec, p),
        "pairing_value": pairing.value, "pairing_bound": pairing.bound, "pairing_pass": pairing.passed,
        "pairing_rate": pairing_rate(u, spec),
        "trivial_limit_gap": trivial_limit_gap(spec, u),
    }
    _log("[2/2] ⏳ Contradiction threshold...")
    try:
        threshold = contradiction_threshold(eta, p, c)
        result.update({"threshold": threshold.threshold, "threshold_closed_form": threshold.closed_form,
                       "lhs_rate": threshold.lhs_rate, "rhs_rate": threshold.rhs_rate})
    except ParameterRangeError as e:
        _log(f"⚠ {e}")
        result["threshold"] = None
    checks = [
        check_leq("lp norm <= (2 e^2T)^(1/p)", lp, result["lp_bound"]),
        check_geq("pairing >= e^{T(1+u/2)}/u^2", pairing.value, pairing.bound),
        trivial_rep_check(spec),
    ]
    return [result], checks


COMMANDS: Dict[str, Callable[[RunConfig], Tuple[List[dict], List[Check]]]] = {
    "moments": cmd_moments,
    "fock-norm": cmd_fock_norm,
    "reg-norm": cmd_reg_norm,
    "sample-norm": cmd_sample_norm,
    "limit-check": cmd_limit_check,
    "unitary-rep": cmd_unitary_rep,
    "converge": cmd_converge,
    "spectral": cmd_spectral,
}


# -----------------------------
# Argument parsing and output
# -----------------------------

def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph JSON file")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--out", choices=("json", "csv"), default="json")
    common.add_argument("--guard-dim", dest="guard_dim", type=int, default=DEFAULT_GUARD_DIM)
    common.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    common.add_argument("--cache", action="store_true", help="reuse stored results")

    parser = argparse.ArgumentParser(prog="raagtool", description="Graph products, random matrices and strong convergence")
    parser.add_argument("--version", action="version", version=f"raagtool {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="vacuum moments and factorization cross-check")
    p.add_argument("--vertex")
    p.add_argument("--max-p", dest="max_p", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--queries", type=int)

    p = sub.add_parser("fock-norm", parents=[common], help="norm of p(l, l*) on the graph Fock space")
    p.add_argument("--poly", required=True)
    p.add_argument("--depth", type=int)

    p = sub.add_parser("reg-norm", parents=[common], help="regular representation lower bounds")
    p.add_argument("--z", required=True)
    p.add_argument("--radius", type=int)
    p.add_argument("--moment-k", dest="moment_k", type=int)

    p = sub.add_parser("sample-norm", parents=[common], help="norms in the sampled random model")
    p.add_argument("--poly")
    p.add_argument("--m", type=_int_list)
    p.add_argument("--K")
    p.add_argument("--n", type=int, help="plain SGRM(n, 1/n) concentration instead of the model")
    p.add_argument("--trials", type=int)
    p.add_argument("--no-aux", dest="no_aux", action="store_true")

    p = sub.add_parser("limit-check", parents=[common], help="key norm table of the limit operators")
    p.add_argument("--m", type=_int_list)
    p.add_argument("--depth", type=int)
    p.add_argument("--v")
    p.add_argument("--w")

    p = sub.add_parser("unitary-rep", parents=[common], help="unitary representation relations")
    p.add_argument("--m", type=_int_list)
    p.add_argument("--K", required=True)
    p.add_argument("--z")
    p.add_argument("--trials", type=int)
    p.add_argument("--pairs", type=int)

    p = sub.add_parser("converge", parents=[common], help="strong convergence experiment")
    p.add_argument("--z", required=True)
    p.add_argument("--m", type=_int_list)
    p.add_argument("--schedule", required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--radius", type=int)
    p.add_argument("--moment-k", dest="moment_k", type=int)

    p = sub.add_parser("spectral", parents=[common], help="complementary series inequalities")
    p.add_argument("--u", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--c", type=float)
    return parser


def _cell(value):
    return json.dumps(value, sort_keys=True) if isinstance(value, (dict, list)) else value


def emit(report: Report, out: str, stream=None):
    stream = stream or sys.stdout
    body = report.model_dump(by_alias=True)
    if out == "json":
        stream.write(json.dumps(body, sort_keys=True) + "\n")
        return
    fields: List[str] = []
    for row in body["results"]:
        fields += [k for k in row if k not in fields]
    writer = csv.DictWriter(stream, fieldnames=fields)
    writer.writeheader()
    for row in body["results"]:
        writer.writerow({k: _cell(v) for k, v in row.items()})
    checks = csv.DictWriter(sys.stderr, fieldnames=["name", "pass", "lhs", "rhs"])
    checks.writeheader()
    for row in body["checks"]:
        checks.writerow(row)


def _fail(message: str, code: int) -> int:
    print(f"✗ {message}", file=sys.stderr)
    print(json.dumps({"success": False, "error": message}))
    return code


def run(config: RunConfig) -> int:
    """Execute one resolved config and print its report; returns the exit code."""
    cached = None
    if config.cache:
        init_database()
        cached = get_cached_result(config.command, config.cache_key(), VERSION)
        if cached:
            _log("✓ Using cached result")

    try:
        if cached:
            results = cached["results"]
            checks = [Check.model_validate(c) for c in cached["checks"]]
        else:
            results, checks = COMMANDS[config.command](config)
    except (InputError, PreconditionError) as e:
        return _fail(str(e), 1)
    except GuardExceededError as e:
        return _fail(str(e), 2)
    except SelfCheckError as e:
        return _fail(str(e), 3)
    except RaagToolkitError as e:
        return _fail(str(e), 1)
    except Exception as e:
        traceback.print_exc(file=sys.stderr)
        return _fail(f"unexpected error: {e}", 1)

    if config.cache and not cached:
        cache_result(config.command, config.cache_key(), VERSION, {
            "results": results,
            "checks": [c.model_dump(by_alias=True) for c in checks],
        })

    report = Report(
        command=config.command,
        version=VERSION,
        config=config.model_dump(),
        results=results,
        checks=checks,
        timestamp=datetime.now().isoformat(),
    )
    emit(report, config.out)
    level, passed, failed = summarize_checks(checks)
    if level == "PASS":
        _log(f"✓ {passed}/{len(checks)} checks passed")
    else:
        _log(f"✗ {len(failed)} check(s) failed: {', '.join(failed[:5])}")
    return exit_code_for(checks)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k in RunConfig.model_fields}
    return run(RunConfig(**values))


if __name__ == "__main__":
    sys.exit(main())

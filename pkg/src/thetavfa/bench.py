"""Experiment harness: run configuration, the solve pipeline and bench tables.

The pipeline is preprocess -> theta per component -> rounding per
component -> merge with the forced vertices.  Records and tables are
plain dictionaries, serialised as JSON lines and CSV.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chordal import exact_mwis_chordal, exact_mwis_cochordal
from .exact import exact_mwis_bruteforce, exact_mwis_generalized_split, preprocess
from .generators import (
    generate_chordal,
    generate_cochordal,
    generate_erdos_renyi,
    generate_generalized_split,
)
from .graph import GraphError, StableSet, WeightedGraph
from .rounding import BUDGET_CONSTANT, round_benson_ye, round_greedy, round_lookahead_counipolar
from .sdp import SdpNumericalError, solve_theta
from .vfa import VfaContext

RECORD_SCHEMA = "thetavfa.record/1"
TABLE_SCHEMA = "thetavfa.bench/1"
METHODS = ("lookahead", "greedy", "by", "all")
ORACLES = ("auto", "bruteforce", "none")
MAX_N = 500
MAX_M = 50_000
BRUTEFORCE_LIMIT = 40
ENV_PREFIX = "THETAVFA_"


class GuardrailError(GraphError):
    """Instance too large for the dense interior-point solver."""


class SolverFailure(RuntimeError):
    pass


@dataclass
class RunConfig:
    """Tolerances and switches for a run; see :meth:`from_env` for overrides.

    ``eps_sdp`` is used when only greedy / baseline rounding consume the
    certificate; ``eps_sdp_lookahead`` when look-ahead rounding does.
    ``eps_supp=None`` means ``1e-3 * max(x)``.
    """

    eps_sdp: float = 1e-5
    eps_sdp_lookahead: float = 1e-8
    eps_vfa: float = 1e-6
    ridge: float = 1e-4
    eps_supp: float | None = None
    eps_gap: float = 1e-4
    seed: int = 0
    method: str = "greedy"
    oracle: str = "auto"
    backend: str = "cg"
    by_runs: int | None = None
    threads: int = 1
    allow_large: bool = False
    budget_constant: float = BUDGET_CONSTANT
    csv_path: str | None = None
    jsonl_path: str | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("eps_sdp", "eps_sdp_lookahead", "eps_vfa", "ridge", "eps_gap", "budget_constant"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.eps_supp is not None and not self.eps_supp > 0:
            raise ValueError("eps_supp must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.oracle not in ORACLES:
            raise ValueError(f"oracle must be one of {ORACLES}")
        if self.backend not in ("cg", "pinv"):
            raise ValueError("backend must be 'cg' or 'pinv'")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    @property
    def methods(self) -> tuple[str, ...]:
        return ("lookahead", "greedy", "by") if self.method == "all" else (self.method,)

    @property
    def sdp_tolerance(self) -> float:
        return self.eps_sdp_lookahead if "lookahead" in self.methods else self.eps_sdp

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_env(cls, environ=None, **overrides) -> "RunConfig":
        """Defaults, then ``THETAVFA_<FIELD>`` variables, then ``overrides``."""
        environ = os.environ if environ is None else environ
        values: dict = {}
        for f in dataclasses.fields(cls):
            raw = environ.get(ENV_PREFIX + f.name.upper())
            if raw is not None:
                values[f.name] = _coerce(f.name, raw)
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _coerce(name: str, raw: str):
    kind = {f.name: f.type for f in dataclasses.fields(RunConfig)}[name]
    try:
        if "bool" in kind:
            return raw.strip().lower() in ("1", "true", "yes", "on")
        if "int" in kind and "None" in kind or kind == "int":
            return None if raw.strip().lower() in ("", "none") else int(raw)
        if "float" in kind:
            return None if raw.strip().lower() in ("", "none") else float(raw)
    except ValueError:
        raise ValueError(f"bad value {raw!r} for {ENV_PREFIX}{name.upper()}") from None
    return raw


@dataclass
class ExperimentRecord:
    """One instance, all requested methods.

    ``theta`` is ``w(forced) + sum of component thetas``, an upper bound on
    ``alpha`` because forced vertices belong to a maximum stable set.
    """

    instance: str
    n: int
    m: int
    theta: float
    alpha: float | None
    weights: dict = field(default_factory=dict)
    by_best: float | None = None
    by_avg: float | None = None
    vfa_calls: dict = field(default_factory=dict)
    sdp_time: float = 0.0
    rounding_time: dict = field(default_factory=dict)
    certificate_gap: float = 0.0
    certificates_exact: bool = True
    components: int = 0
    forced: int = 0
    budget_constant: float = 0.0
    family: str | None = None
    seed: int | None = None

    def optimal(self, method: str, tol: float = 1e-6) -> bool | None:
        if self.alpha is None or method not in self.weights:
            return None
        return abs(self.weights[method] - self.alpha) <= tol

    def to_dict(self) -> dict:
        return {"schema": RECORD_SCHEMA, **dataclasses.asdict(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass
class SolveResult:
    sets: dict  # method -> StableSet
    record: ExperimentRecord
    certificates: list  # (component graph, map, ThetaCertificate)
    traces: list  # (method, component index, RoundingTrace)


def check_size(g: WeightedGraph, allow_large: bool = False) -> None:
    if not allow_large and (g.n > MAX_N or g.m > MAX_M):
        raise GuardrailError(
            f"instance with n={g.n}, m={g.m} exceeds desk limits (n <= {MAX_N}, m <= {MAX_M}); "
            "pass allow_large to override"
        )


def solve_instance(g: WeightedGraph, config: RunConfig | None = None, name: str = "instance",
                   alpha: float | None = None) -> SolveResult:
    """Run the full pipeline on ``g`` for every method in ``config``."""
    config = config or RunConfig()
    check_size(g, config.allow_large)
    red = preprocess(g)
    forced = list(red.forced)
    forced_w = g.weight_of(forced)
    picks = {m: list(forced) for m in config.methods}
    by_best = forced_w if "by" in config.methods else None
    by_avg = forced_w if "by" in config.methods else None
    calls = {m: 0 for m in config.methods if m != "by"}
    rtime = {m: 0.0 for m in config.methods}
    theta = forced_w
    sdp_time = 0.0
    worst_gap = 0.0
    exact = True
    certs, traces = [], []
    for k, (sub, mp) in enumerate(red.components):
        start = time.perf_counter()
        try:
            cert = solve_theta(sub, config.sdp_tolerance)
        except (SdpNumericalError, np.linalg.LinAlgError) as exc:
            raise SolverFailure(f"theta solve failed on component {k} of {name}: {exc}") from exc
        sdp_time += time.perf_counter() - start
        certs.append((sub, mp, cert))
        theta += cert.theta
        worst_gap = max(worst_gap, cert.gap)
        exact = exact and cert.exact
        for method in config.methods:
            start = time.perf_counter()
            if method == "by":
                res = round_benson_ye(sub, cert, runs=config.by_runs, seed=config.seed)
                chosen = res.best
                by_best += res.best.weight
                by_avg += res.average
            else:
                ctx = VfaContext.from_certificate(cert, backend=config.backend, ridge=config.ridge,
                                                  eps_vfa=config.eps_vfa)
                if method == "greedy":
                    chosen, trace = round_greedy(sub, ctx)
                else:
                    chosen, trace = round_lookahead_counipolar(
                        sub, cert, ctx, return_trace=True, eps_supp=config.eps_supp, eps_gap=config.eps_gap)
                trace.params.update(backend=config.backend, ridge=config.ridge, eps_vfa=config.eps_vfa)
                calls[method] += trace.eval_count
                traces.append((method, k, trace))
            rtime[method] += time.perf_counter() - start
            picks[method].extend(mp.lift(chosen.vertices))
    sets = {m: StableSet.of(g, v) for m, v in picks.items()}
    record = ExperimentRecord(
        instance=name,
        n=g.n,
        m=g.m,
        theta=float(theta),
        alpha=alpha,
        weights={m: s.weight for m, s in sets.items()},
        by_best=by_best,
        by_avg=by_avg,
        vfa_calls=calls,
        sdp_time=sdp_time,
        rounding_time=rtime,
        certificate_gap=worst_gap,
        certificates_exact=exact,
        components=len(red.components),
        forced=len(forced),
        budget_constant=max((t.budget_constant() for _, _, t in traces), default=0.0),
    )
    return SolveResult(sets, record, certs, traces)


# -- instance families ------------------------------------------------------

FAMILIES = {
    "chordal": "chordal",
    "co-chordal": "co-chordal",
    "cochordal": "co-chordal",
    "generalized-split": "generalized-split",
    "gsplit": "generalized-split",
    "erdos-renyi": "erdos-renyi",
    "er": "erdos-renyi",
    "gnp": "erdos-renyi",
}


@dataclass
class Instance:
    name: str
    family: str
    graph: WeightedGraph
    seed: int
    certificate: object = None  # generalized-split structure, when known


def canonical_family(name: str) -> str:
    try:
        return FAMILIES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(set(FAMILIES.values()))}") from None


def parse_generator_spec(spec: str) -> tuple[str, dict]:
    """``"chordal:n=50,seed=7"`` -> ``("chordal", {"n": 50, "seed": 7})``."""
    family, _, rest = spec.partition(":")
    params: dict = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value in generator spec, got {item!r}")
        key = key.strip()
        try:
            params[key] = int(val) if key in ("n", "seed", "max_cluster") else (
                float(val) if key in ("density", "p", "center_fraction", "edge_prob") else val)
        except ValueError:
            raise ValueError(f"bad value for {key!r}: {val!r}") from None
    if "n" not in params:
        raise ValueError("generator spec needs n=<vertices>")
    return canonical_family(family), params


def generate_instance(family: str, n: int, seed: int = 0, **params) -> Instance:
    family = canonical_family(family)
    cert = None
    if family == "chordal":
        g = generate_chordal(n, params.get("density", 0.5), seed=seed)
    elif family == "co-chordal":
        g = generate_cochordal(n, params.get("density", 0.5), seed=seed)
    elif family == "generalized-split":
        kw = {k: params[k] for k in ("center_fraction", "edge_prob", "max_cluster", "kind") if k in params}
        g, cert = generate_generalized_split(n, seed=seed, **kw)
    else:
        g = generate_erdos_renyi(n, params.get("p", 0.5), seed=seed)
    return Instance(f"{family}-n{n}-s{seed}", family, g, seed, cert)


def instance_seed(base: int, family: str, n: int, k: int) -> int:
    """Deterministic per-instance seed for bench runs."""
    ss = np.random.SeedSequence([int(base), zlib.crc32(family.encode()), int(n), int(k)])
    return int(ss.generate_state(1)[0])


def exact_alpha(inst: Instance, oracle: str = "auto") -> tuple[float | None, str]:
    """Exact ``alpha`` and the oracle used (``None, "unverified"`` if unavailable)."""
    g = inst.graph
    if oracle == "none":
        return None, "unverified"
    if oracle == "bruteforce" or g.n <= BRUTEFORCE_LIMIT:
        return exact_mwis_bruteforce(g, limit=max(BRUTEFORCE_LIMIT, g.n)).weight, "bruteforce"
    if inst.family == "chordal":
        return exact_mwis_chordal(g).weight, "chordal"
    if inst.family == "co-chordal":
        return exact_mwis_cochordal(g).weight, "co-chordal"
    if inst.family == "generalized-split" and inst.certificate is not None:
        return exact_mwis_generalized_split(g, inst.certificate).weight, "generalized-split"
    return None, "unverified"


def _run_one(args):
    family, n, seed, config = args
    inst = generate_instance(family, n, seed)
    alpha, oracle = exact_alpha(inst, config.oracle)
    res = solve_instance(inst.graph, config, inst.name, alpha)
    res.record.family = family
    res.record.seed = seed
    return res.record, oracle


def run_bench(families, sizes, count: int, config: RunConfig | None = None):
    """Solve ``count`` seeded instances per (family, n); return ``(rows, records)``.

    One row per (family, n) and method with the number of instances, the
    number matching the oracle and the optimal percentage (``None`` when
    some instance had no oracle).
    """
    config = config or RunConfig()
    jobs = []
    for fam in families:
        fam = canonical_family(fam)
        for n in sizes:
            for k in range(count):
                jobs.append((fam, n, instance_seed(config.seed, fam, n, k), config))
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_run_one, jobs))  # map keeps submission order
    else:
        results = [_run_one(j) for j in jobs]
    rows = []
    records = [r for r, _ in results]
    for fam in dict.fromkeys(canonical_family(f) for f in families):
        for n in sizes:
            cell = [(r, o) for r, o in results if r.family == fam and r.n == n]
            for method in config.methods:
                verified = all(r.alpha is not None for r, _ in cell)
                if method == "by":
                    hits = sum(1 for r, _ in cell if r.alpha is not None and abs(r.by_best - r.alpha) <= 1e-6)
                else:
                    hits = sum(1 for r, _ in cell if r.optimal(method))
                rows.append({
                    "schema_version": TABLE_SCHEMA,
                    "family": fam,
                    "n": n,
                    "graphs": len(cell),
                    "method": method,
                    "optimal": hits,
                    "optimal_pct": round(100.0 * hits / len(cell), 2) if verified and cell else None,
                    "oracle": ",".join(sorted({o for _, o in cell})),
                    "sdp_time": round(sum(r.sdp_time for r, _ in cell), 4),
                    "rounding_time": round(sum(r.rounding_time.get(method, 0.0) for r, _ in cell), 4),
                    "vfa_calls": sum(r.vfa_calls.get(method, 0) for r, _ in cell),
                })
    return rows, records


TABLE_COLUMNS = ("schema_version", "family", "n", "graphs", "method", "optimal", "optimal_pct",
                 "oracle", "sdp_time", "rounding_time", "vfa_calls")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: ("" if r[k] is None else r[k]) for k in TABLE_COLUMNS})
    return buf.getvalue()


def write_outputs(rows, records, csv_path=None, jsonl_path=None) -> None:
    if csv_path:
        Path(csv_path).write_text(rows_to_csv(rows))
    if jsonl_path:
        Path(jsonl_path).write_text("".join(r.to_json() + "\n" for r in records))

"""Command line interface: every experiment as a subcommand.

Argument parsing happens before numpy is imported so that --threads can
pin the BLAS/OpenMP pool sizes of the numeric libraries.  Exit codes:
0 success, 1 error (bad input, tolerance failures, crashes), 2 when a
subcommand's mathematical assertion fails (monotonicity broken, fit
outside its window, acceptance batch red) so CI can distinguish
scientific regressions from plumbing.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

from . import __version__

DEFAULT_SEED = 0x1CEB00DA

_THREAD_VARS = (
    "OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
    "VECLIB_MAXIMUM_THREADS", "NUMEXPR_NUM_THREADS",
)

# Subcommand flag tables: (flag, type, help).  Grids and index sets are
# passed as comma-separated strings (or JSON lists via --config).
_FLAG_SPECS = {
    "validate-curve": [
        ("curve-file", str, "curve JSON document"),
        ("T", float, "time horizon (default 1)"),
        ("grid", int, "validation grid size (default 256)"),
    ],
    "integral": [
        ("n", int, "first index"),
        ("m", int, "second index"),
        ("s", float, "temporal exponent"),
        ("curve-file", str, "curve JSON document"),
        ("T", float, "upper integration limit"),
        ("tol", float, "absolute tolerance (default 1e-9)"),
    ],
    "classify": [
        ("s", float, "temporal exponent"),
        ("tau", float, "threshold (computed from curve when omitted)"),
        ("N", int, "grid half-width (default 50)"),
        ("curve-file", str, "curve used to derive tau when not given"),
        ("T", float, "horizon used to derive tau (default 1)"),
        ("out-csv", str, "grid CSV path override"),
        ("out-svg", str, "region SVG path override"),
    ],
    "boundary": [
        ("branch", str, "branch name or 'all' (default all)"),
        ("samples", int, "points per branch (default 250)"),
        ("lo", float, "parameter range start override"),
        ("hi", float, "parameter range end override"),
        ("out-csv", str, "CSV path override"),
    ],
    "lemma21": [
        ("gamma", float, "denominator exponent"),
        ("s", float, "temporal exponent"),
        ("N", int, "truncation (default 10000)"),
    ],
    "tails": [
        ("gamma", float, "pair-distance exponent"),
        ("delta", float, "frequency-gap exponent"),
        ("s", float, "temporal exponent"),
        ("Ngrid", str, "comma list of N values"),
        ("mset", str, "comma list of m values"),
        ("horizon", int, "summation horizon override"),
    ],
    "gram": [
        ("curve-file", str, "curve JSON document"),
        ("measure-file", str, "measure JSON document"),
        ("s", float, "temporal exponent"),
        ("N", int, "indices -N..N (default 10)"),
        ("T", float, "curve horizon"),
        ("tol", float, "entry tolerance (default 1e-9)"),
        ("weight", str, "lebesgue or arclength (curve systems)"),
    ],
    "riesz": [
        ("curve-file", str, "curve JSON document"),
        ("measure-file", str, "measure JSON document"),
        ("s", float, "temporal exponent"),
        ("N", int, "indices -N..N (default 10)"),
        ("T", float, "curve horizon"),
        ("tol", float, "entry tolerance (default 1e-9)"),
        ("weight", str, "lebesgue or arclength (curve systems)"),
    ],
    "ingham-sweep": [
        ("curve-file", str, "curve JSON document"),
        ("s", float, "temporal exponent"),
        ("N", int, "indices -N..N (default 20)"),
        ("Tgrid", str, "comma list of horizons"),
        ("tol", float, "Gram entry tolerance (default 1e-8)"),
    ],
    "minimal-time": [
        ("curve-file", str, "curve JSON document"),
        ("s", float, "temporal exponent"),
        ("jgrid", str, "comma list of mode indices"),
    ],
    "highfreq": [
        ("measure-file", str, "measure JSON document"),
        ("s", float, "temporal exponent"),
        ("Ngrid", str, "comma list of window base frequencies"),
        ("window", int, "window width (default 30)"),
        ("nodes-per-cycle", float, "quadrature density (default 16)"),
        ("sgrid", str, "run the dispersion sweep over these s instead"),
    ],
    "sharpness": [
        ("delta", float, "decay exponent (default 0.5)"),
        ("s", float, "temporal exponent (default 1.5)"),
        ("Ngrid", str, "comma list of N values"),
    ],
    "merged": [
        ("curve-file", str, "curve JSON document"),
        ("T", float, "horizon (default 1)"),
        ("sgrid", str, "comma list of s values"),
        ("N", int, "indices -N..N (default 20)"),
        ("tol", float, "Gram entry tolerance (default 1e-8)"),
    ],
    "wronskian": [
        ("gamma-file", str, "observation curve JSON {kind, params}"),
        ("samples", int, "sample count (default 100)"),
        ("xmin", float, "sample range start (default 0.05)"),
        ("xmax", float, "sample range end (default 2.0)"),
    ],
    "threepoint": [
        ("points", str, "three t,x pairs: 't1,x1;t2,x2;t3,x3'"),
        ("coeffs", str, "optional coefficient triple 're,im;re,im;re,im'"),
    ],
    "zeroprobe": [
        ("system-file", str, "low-frequency system JSON"),
        ("gamma-file", str, "observation curve JSON {kind, params}"),
        ("T", float, "probe interval length (default 1)"),
        ("grid", int, "probe grid size (default 2048)"),
    ],
    "schrodinger": [
        ("u0-file", str, "initial state JSON (evolve mode)"),
        ("V-file", str, "potential JSON {kind, params} (default Zero)"),
        ("s", float, "dispersion exponent"),
        ("curve-file", str, "curve JSON document"),
        ("T", float, "final time"),
        ("dt", float, "time step override"),
        ("trials", int, "trace-ratio trial count (trial mode)"),
        ("K", int, "mode cutoff for trial mode (default 8)"),
        ("out-csv", str, "CSV path override"),
    ],
    "run": [],
}


@dataclass
class ExperimentConfig:
    """One experiment: subcommand plus its parameter map.  Round-trips
    losslessly through JSON."""

    subcommand: str
    parameters: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    out_dir: str = "results"
    format: str = "csv"

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "format": self.format,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {"subcommand", "parameters", "seed", "out_dir", "format"}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        if "subcommand" not in doc:
            raise ValueError("config needs a 'subcommand' field")
        return cls(subcommand=doc["subcommand"],
                   parameters=dict(doc.get("parameters", {})),
                   seed=int(doc.get("seed", DEFAULT_SEED)),
                   out_dir=doc.get("out_dir", "results"),
                   format=doc.get("format", "csv"))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))

    def config_hash(self) -> str:
        # Identifies the computation, not its destination: output
        # directory and table format do not change any numbers.
        doc = {"subcommand": self.subcommand, "parameters": self.parameters,
               "seed": self.seed}
        canonical = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


@dataclass
class RunContext:
    out_dir: str
    fmt: str
    seed: int
    config_hash: str
    written: list = field(default_factory=list)

    def provenance(self):
        from . import tables
        stamp = datetime.now(timezone.utc).isoformat()
        return tables.Provenance(__version__, self.config_hash, stamp)

    def table(self, name, columns, rows, meta=None):
        from . import tables
        return tables.ResultTable(name, columns, rows, self.provenance(),
                                  dict(meta or {}))

    def write(self, table, path: str | None = None) -> str:
        from . import tables
        os.makedirs(self.out_dir, exist_ok=True)
        if path is None:
            path = os.path.join(self.out_dir, f"{table.name}.{self.fmt}")
        if path.endswith(".json"):
            out = tables.write_json(table, path)
        else:
            out = tables.write_csv(table, path)
        self.written.append(out)
        return out

    def write_plot(self, table, kind, stem, **kwargs) -> list:
        from . import tables
        os.makedirs(self.out_dir, exist_ok=True)
        paths = tables.emit_plot_data(table, kind,
                                      os.path.join(self.out_dir, stem),
                                      **kwargs)
        self.written.extend(paths)
        return paths


# ---------------------------------------------------------------------------
# parameter helpers
# ---------------------------------------------------------------------------

def _need(params: dict, key: str):
    if params.get(key) is None:
        raise ValueError(f"missing required parameter '{key}'")
    return params[key]


def _floats(value) -> list:
    if isinstance(value, str):
        return [float(x) for x in value.split(",") if x.strip()]
    return [float(x) for x in value]


def _ints(value) -> list:
    return [int(round(x)) for x in _floats(value)]


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_curve(params: dict):
    from . import curves
    if params.get("curve") is not None:
        return curves.curve_from_dict(params["curve"])
    return curves.curve_from_dict(_load_json(_need(params, "curve_file")))


def _load_measure(params: dict):
    from . import curves
    if params.get("measure") is not None:
        return curves.measure_from_dict(params["measure"])
    return curves.measure_from_dict(_load_json(_need(params, "measure_file")))


def _load_gamma(params: dict):
    from . import rigidity
    doc = params.get("gamma_curve")
    if doc is None:
        doc = _load_json(_need(params, "gamma_file"))
    return rigidity.ObservationCurveGamma(doc["kind"], doc.get("params", {}))


def _load_potential(params: dict):
    from . import schrodinger
    doc = params.get("potential")
    if doc is None:
        path = params.get("V_file")
        doc = _load_json(path) if path else {"kind": "Zero", "params": {}}
    return schrodinger.PotentialSpec(doc["kind"], doc.get("params", {}))


def _load_state(params: dict, s_default=None):
    from . import schrodinger
    import numpy as np
    doc = params.get("u0")
    if doc is None:
        doc = _load_json(_need(params, "u0_file"))
    coeffs = np.asarray(doc["coeffs_re"], dtype=float) \
        + 1j * np.asarray(doc.get("coeffs_im", 0.0), dtype=float)
    s = float(doc.get("s", s_default if s_default is not None else 2.0))
    K = int(doc.get("K", (len(coeffs) - 1) // 2))
    return schrodinger.TorusState(coeffs, float(doc.get("time", 0.0)), s, K)


def _py(obj):
    """Recursively convert numpy scalars/arrays to plain Python."""
    import numpy as np
    if isinstance(obj, dict):
        return {k: _py(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_py(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_py(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


# ---------------------------------------------------------------------------
# runners: each returns (summary dict, ok flag)
# ---------------------------------------------------------------------------

def run_validate_curve(params, ctx, dry=False):
    import numpy as np
    from . import curves
    curve = _load_curve(params)
    T = float(params.get("T") or 1.0)
    grid = int(params.get("grid") or 256)
    if dry:
        return {}, True
    rep = curves.validate_H_alpha(curve, T, grid)
    rows = [("passed", rep.passed),
            ("alpha", curve.alpha), ("c1", curve.c1), ("c2", curve.c2),
            ("c3", curve.c3),
            ("lower_ratio_min", rep.lower_ratio_min),
            ("upper_ratio_max", rep.upper_ratio_max),
            ("curvature_ratio_min", rep.curvature_ratio_min),
            ("sign_constant", rep.sign_constant)]
    ctx.write(ctx.table("curve_validation", ("field", "value"), rows))
    ts = np.linspace(T * 1e-3, T, 256)
    ps = curve.p(ts) - curve.p(np.zeros(1))[0]
    lower = curve.c1 / curve.alpha * ts ** curve.alpha
    upper = curve.c2 / curve.alpha * ts ** curve.alpha
    profile = ctx.table(
        "curve_profile", ("t", "p_shifted", "lower", "upper"),
        list(zip(ts.tolist(), ps.tolist(), lower.tolist(), upper.tolist())))
    ctx.write(profile)
    ctx.write_plot(profile, "curve", "curve_profile",
                   ys=["p_shifted", "lower", "upper"])
    return {"passed": rep.passed, "failures": list(rep.failures)}, rep.passed


def run_integral(params, ctx, dry=False):
    from . import oscint
    curve = _load_curve(params)
    n = int(_need(params, "n"))
    m = int(_need(params, "m"))
    s = float(_need(params, "s"))
    T = float(_need(params, "T"))
    tol = float(params.get("tol") or 1e-9)
    if dry:
        return {}, True
    r = oscint.oscillatory_integral(n, m, s, curve, T, tol=tol)
    summary = {
        "value_re": r.value.real, "value_im": r.value.imag,
        "modulus": abs(r.value), "abs_error_estimate": r.abs_error_estimate,
        "panels": r.panels, "stationary_points": list(r.stationary_points),
    }
    ctx.write(ctx.table(
        "integral",
        ("n", "m", "s", "T", "value_re", "value_im", "modulus",
         "abs_error_estimate", "panels"),
        [(n, m, s, T, r.value.real, r.value.imag, abs(r.value),
          r.abs_error_estimate, r.panels)]))
    return summary, True


def run_classify(params, ctx, dry=False):
    from . import classify
    s = float(_need(params, "s"))
    N = int(params.get("N") or 50)
    tau = params.get("tau")
    if tau is None:
        curve = _load_curve(params)
        T = float(params.get("T") or 1.0)
        if not dry:
            tau = classify.tau_threshold(curve, T)
    if dry:
        return {}, True
    tau = float(tau)
    grid = classify.region_grid(s, tau, N)
    rows = []
    for i, n in enumerate(grid.ns):
        for j, m in enumerate(grid.ns):
            ratio = grid.ratios[i, j]
            rows.append((int(n), int(m), classify.TAGS[grid.tags[i, j]],
                         float(ratio)))
    table = ctx.table("region_grid", ("n", "m", "tag", "ratio"), rows,
                      meta={"s": s, "tau": tau,
                            **{f"count_{k}": int(v)
                               for k, v in sorted(grid.counts.items())}})
    ctx.write(table, params.get("out_csv"))
    svg = params.get("out_svg")
    if svg:
        os.makedirs(ctx.out_dir, exist_ok=True)
        from . import tables as _tables
        ctx.written.extend(_tables.emit_plot_data(
            table, "region-svg", svg[:-4] if svg.endswith(".svg") else svg))
    else:
        ctx.write_plot(table, "region-svg", "region_grid")
    return {"tau": tau, "counts": _py(grid.counts)}, True


def run_boundary(params, ctx, dry=False):
    from . import classify
    branch = params.get("branch") or "all"
    count = int(params.get("samples") or 250)
    branches = classify.BRANCHES if branch == "all" else (branch,)
    for b in branches:
        if b not in classify.BRANCHES:
            raise ValueError(f"unknown branch {b!r}; "
                             f"choose from {classify.BRANCHES}")
    if dry:
        return {}, True
    rows, max_res = [], 0.0
    for b in branches:
        pts = classify.boundary_samples(b, count, params.get("lo"),
                                        params.get("hi"))
        for pt in pts:
            res = abs(pt.residual())
            max_res = max(max_res, res)
            rows.append((pt.branch, float(pt.parameter),
                         float(pt.point[0]), float(pt.point[1]), res))
    table = ctx.table("boundary", ("branch", "parameter", "x", "y",
                                   "residual"), rows,
                      meta={"max_residual": max_res})
    ctx.write(table, params.get("out_csv"))
    return {"max_residual": max_res, "points": len(rows)}, True


def run_lemma21(params, ctx, dry=False):
    from . import sums
    gamma = float(_need(params, "gamma"))
    s = float(_need(params, "s"))
    N = int(params.get("N") or 10000)
    if dry:
        return {}, True
    checkpoints = [n for n in (10, 31, 100, 316, 1000, 3162, 10000, 31623)
                   if n < N]
    scan = sums.sup_M(gamma, s, N, checkpoints=checkpoints)
    rows = [(int(n), float(v)) for n, v in scan.checkpoints]
    rows.append((N, scan.sup_value))
    meta = {"gamma": gamma, "s": s, "sup": scan.sup_value,
            "argmax_n": scan.argmax[0], "argmax_m": scan.argmax[1]}
    if scan.growth_fit is not None:
        meta["growth_fit"] = scan.growth_fit
    table = ctx.table("sup_scan", ("N", "sup"), rows, meta=meta)
    ctx.write(table)
    ctx.write_plot(table, "loglog-fit", "sup_scan")
    summary = {"sup": scan.sup_value, "argmax": list(scan.argmax),
               "growth_fit": scan.growth_fit}
    wit = sums.inf_witness(gamma, s, N)
    ctx.write(ctx.table("inf_witness", ("m", "ratio"),
                        [(int(m), float(r))
                         for m, r in zip(wit.ms, wit.ratios)],
                        meta={"family": wit.family,
                              "contracted": wit.contracted}))
    summary["witness_family"] = wit.family
    summary["witness_contracted"] = wit.contracted
    return summary, True


def run_tails(params, ctx, dry=False):
    from . import sums
    gamma = float(_need(params, "gamma"))
    delta = float(_need(params, "delta"))
    s = float(_need(params, "s"))
    N_grid = _ints(params.get("Ngrid") or [100, 316, 1000, 3162, 10000])
    m_set = _ints(params["mset"]) if params.get("mset") is not None \
        else list(sums._DEFAULT_MSET)
    horizon = params.get("horizon")
    if dry:
        return {}, True
    fit = sums.tail_decay_fit(gamma, delta, s, N_grid, m_set=m_set,
                              horizon=int(horizon) if horizon else None)
    rows = []
    for i, m in enumerate(fit.m_set):
        for j, N in enumerate(fit.N_grid):
            rows.append((int(N), int(m), float(fit.values[i, j])))
    ctx.write(ctx.table("tail_sums", ("N", "m", "S_m_N"), rows))
    fit_table = ctx.table(
        "tail_fit", ("N", "max_S"),
        [(int(N), float(v)) for N, v in zip(fit.N_grid, fit.max_per_N)],
        meta={"slope": fit.slope, "sigma_expected": fit.sigma_expected,
              "passes": fit.passes, "N0_empirical": fit.N0_empirical})
    ctx.write(fit_table)
    ctx.write_plot(fit_table, "loglog-fit", "tail_fit")
    summary = {"slope": fit.slope, "sigma_expected": fit.sigma_expected,
               "passes": fit.passes, "N0_empirical": fit.N0_empirical}
    return summary, bool(fit.passes)


def _build_system(params):
    from . import riesz
    s = float(_need(params, "s"))
    N = int(params.get("N") or 10)
    indices = range(-N, N + 1)
    if params.get("measure_file") is not None \
            or params.get("measure") is not None:
        measure = _load_measure(params)
        return riesz.measure_system(indices, s, measure)
    curve = _load_curve(params)
    T = float(_need(params, "T"))
    weight = params.get("weight") or "lebesgue"
    return riesz.curve_system(indices, s, curve, T, weight=weight)


def run_gram(params, ctx, dry=False):
    from . import riesz
    system = _build_system(params)
    tol = float(params.get("tol") or 1e-9)
    if dry:
        return {}, True
    G = riesz.gram_matrix(system, tol=tol)
    os.makedirs(ctx.out_dir, exist_ok=True)
    path = os.path.join(ctx.out_dir, "gram.json")
    with open(path, "w", newline="\n") as fh:
        json.dump(riesz.gram_to_dict(G), fh, indent=1, sort_keys=True)
        fh.write("\n")
    ctx.written.append(path)
    rows = []
    for i, n in enumerate(G.indices):
        for j, m in enumerate(G.indices):
            rows.append((int(n), int(m), float(G.entries[i, j].real),
                         float(G.entries[i, j].imag)))
    ctx.write(ctx.table("gram_entries", ("n", "m", "re", "im"), rows,
                        meta={"dim": G.dim, "T_or_mass": G.T_or_mass}))
    return {"dim": G.dim, "gram_json": path}, True


def run_riesz(params, ctx, dry=False):
    from . import riesz
    system = _build_system(params)
    tol = float(params.get("tol") or 1e-9)
    if dry:
        return {}, True
    G = riesz.gram_matrix(system, tol=tol)
    rep = riesz.riesz_bounds(G, seed=ctx.seed)
    ctx.write(ctx.table(
        "riesz_report",
        ("lambda_min", "lambda_max", "dim", "random_vector_checks"),
        [(rep.lambda_min, rep.lambda_max, G.dim, rep.random_vector_checks)]))
    summary = {"lambda_min": rep.lambda_min, "lambda_max": rep.lambda_max,
               "normalized": list(rep.normalized), "dim": G.dim}
    return summary, True


def run_ingham_sweep(params, ctx, dry=False):
    from . import riesz
    curve = _load_curve(params)
    s = float(_need(params, "s"))
    N = int(params.get("N") or 20)
    T_grid = _floats(params.get("Tgrid") or [0.25, 0.5, 1, 2, 4, 8])
    tol = float(params.get("tol") or 1e-8)
    if dry:
        return {}, True
    res = riesz.ingham_sweep(curve, s, N, T_grid, tol=tol)
    rows = [(float(T), float(lo), float(hi), float(lo / T))
            for T, lo, hi in zip(res.T_grid, res.lambda_min, res.lambda_max)]
    table = ctx.table("ingham_sweep",
                      ("T", "lambda_min", "lambda_max", "ratio"), rows,
                      meta={"s": s, "N": N, "monotone": res.monotone,
                            "empirical_T": res.empirical_T})
    ctx.write(table)
    ctx.write_plot(table, "xy", "ingham_sweep", x="T", y="lambda_min")
    summary = {"monotone": res.monotone, "empirical_T": res.empirical_T,
               "lambda_min_final": res.lambda_min[-1]}
    return summary, bool(res.monotone)


def run_minimal_time(params, ctx, dry=False):
    from . import riesz
    curve = _load_curve(params)
    s = float(_need(params, "s"))
    j_grid = _ints(params.get("jgrid") or [2, 5, 10, 50, 200])
    if dry:
        return {}, True
    res = riesz.minimal_time_counterexample(curve, s, j_grid)
    rows = [(int(j), float(T), float(r))
            for j, T, r in zip(res.j_grid, res.T_values, res.ratios)]
    ctx.write(ctx.table("minimal_time", ("j", "T_j", "ratio"), rows,
                        meta={"s": s, "eps": res.eps,
                              "decreasing": res.decreasing,
                              "c_norm_sq": res.c_norm_sq}))
    summary = {"eps": res.eps, "decreasing": res.decreasing,
               "first_ratio": res.ratios[0], "last_ratio": res.ratios[-1]}
    return summary, bool(res.decreasing)


def run_highfreq(params, ctx, dry=False):
    from . import riesz
    measure = _load_measure(params)
    s_grid = params.get("sgrid")
    if s_grid is not None:
        s_grid = _floats(s_grid)
        N = int(params.get("N") or 2)
        window = int(params.get("window") or 10)
        if dry:
            return {}, True
        res = riesz.highfreq_dispersion_sweep(measure, s_grid, N=N,
                                              window=window)
        rows = [(float(s), float(lo), float(hi))
                for s, lo, hi in zip(res.s_grid, res.lambda_min,
                                     res.lambda_max)]
        ctx.write(ctx.table("dispersion_sweep",
                            ("s", "lambda_min", "lambda_max"), rows,
                            meta={"N": N, "window": window,
                                  "eta_hat": res.eta_hat,
                                  "lo_target": res.lo_target,
                                  "hi_target": res.hi_target}))
        summary = {"eta_hat": res.eta_hat, "lo_target": res.lo_target,
                   "hi_target": res.hi_target}
        return summary, True
    s = float(_need(params, "s"))
    N_grid = _ints(params.get("Ngrid") or [25, 50, 100, 200])
    window = int(params.get("window") or 30)
    npc = float(params.get("nodes_per_cycle") or 16.0)
    if dry:
        return {}, True
    res = riesz.highfreq_bounds(measure, s, N_grid, window=window,
                                nodes_per_cycle=npc)
    rows = [(int(N), float(lo), float(hi))
            for N, lo, hi in zip(res.N_grid, res.lambda_min, res.lambda_max)]
    table = ctx.table("highfreq_bounds",
                      ("N", "lambda_min", "lambda_max"), rows,
                      meta={"s": s, "window": window,
                            "N_star": -1 if res.N_star is None
                            else res.N_star,
                            "delta_hat": res.delta_hat,
                            "eta_hat": res.eta_hat})
    ctx.write(table)
    ctx.write_plot(table, "xy", "highfreq_bounds", x="N", y="lambda_min")
    summary = {"N_star": res.N_star, "delta_hat": res.delta_hat,
               "eta_hat": res.eta_hat}
    return summary, res.N_star is not None


def run_sharpness(params, ctx, dry=False):
    from . import riesz
    delta = float(params.get("delta") or 0.5)
    s = float(params.get("s") or 1.5)
    N_grid = _ints(params.get("Ngrid") or [32, 64, 128, 256, 512, 1024])
    if dry:
        return {}, True
    res = riesz.sharpness_sum(delta, s, N_grid)
    rows = [(int(N), float(v)) for N, v in zip(res.N_grid, res.values)]
    table = ctx.table("sharpness_sum", ("N", "S_N"), rows,
                      meta={"delta": delta, "s": s, "slope": res.slope,
                            "expected_slope": res.expected_slope,
                            "passes": res.passes,
                            "exceeds_diagonal": res.exceeds_diagonal})
    ctx.write(table)
    ctx.write_plot(table, "loglog-fit", "sharpness_sum")
    summary = {"slope": res.slope, "expected_slope": res.expected_slope,
               "passes": res.passes,
               "exceeds_diagonal": res.exceeds_diagonal}
    return summary, bool(res.passes)


def run_merged(params, ctx, dry=False):
    from . import riesz
    curve = _load_curve(params)
    T = float(params.get("T") or 1.0)
    s_grid = _floats(params.get("sgrid") or [1.6, 2.0, 2.5, 3.0])
    N = int(params.get("N") or 20)
    tol = float(params.get("tol") or 1e-8)
    if dry:
        return {}, True
    res = riesz.merged_bound_experiment(curve, T, s_grid, N=N, tol=tol)
    rows = [(float(s), float(lo), float(c), float(p))
            for s, lo, c, p in zip(res.s_grid, res.lambda_min, res.coupling,
                                   res.product_bound_max)]
    ctx.write(ctx.table("merged_bound",
                        ("s", "lambda_min", "coupling", "product_bound_max"),
                        rows,
                        meta={"T": T, "N": N,
                              "coupling_decreasing":
                              res.coupling_decreasing}))
    summary = {"coupling_decreasing": res.coupling_decreasing,
               "coupling": [float(c) for c in res.coupling]}
    return summary, bool(res.coupling_decreasing)


def run_wronskian(params, ctx, dry=False):
    import numpy as np
    from . import rigidity
    gamma = _load_gamma(params)
    count = int(params.get("samples") or 100)
    xmin = float(params.get("xmin") or 0.05)
    xmax = float(params.get("xmax") or 2.0)
    if dry:
        return {}, True
    xs = np.linspace(xmin, xmax, count)
    w = rigidity.wronskian_n1(gamma, xs)
    rep = rigidity.n1_vanishing_classifier(gamma, xs)
    rows = [(float(x), float(z.real), float(z.imag), float(abs(z)))
            for x, z in zip(xs, w)]
    ctx.write(ctx.table("wronskian", ("x", "re", "im", "abs"), rows,
                        meta={"case": rep.case}))
    witness = [{"re": z.real, "im": z.imag} for z in rep.witness] \
        if rep.witness is not None else None
    summary = {"case": rep.case, "relation": rep.relation,
               "witness": witness, "detail": rep.detail}
    return summary, True


def _parse_points(text: str) -> list:
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        t, x = (float(v) for v in chunk.split(","))
        pts.append((t, x))
    return pts


def run_threepoint(params, ctx, dry=False):
    from . import rigidity
    from .errors import InadmissiblePoints
    points = _parse_points(_need(params, "points"))
    if len(points) != 3:
        raise ValueError("need exactly three t,x pairs")
    coeffs = None
    if params.get("coeffs") is not None:
        coeffs = [complex(re, im)
                  for re, im in _parse_points(params["coeffs"])]
    if dry:
        return {}, True
    try:
        rep = rigidity.three_point_test(points, coeffs)
    except InadmissiblePoints as exc:
        ctx.write(ctx.table("threepoint", ("field", "value"),
                            [("admissible", False), ("detail", str(exc))]))
        return {"admissible": False, "detail": str(exc)}, False
    rows = [("admissible", rep.admissible), ("rank", rep.rank)]
    for i, sv in enumerate(rep.singular_values):
        rows.append((f"sigma_{i + 1}", float(sv)))
    if rep.residual is not None:
        rows.append(("residual", rep.residual))
    ctx.write(ctx.table("threepoint", ("field", "value"), rows))
    summary = {"admissible": rep.admissible, "rank": rep.rank,
               "singular_values": [float(v) for v in rep.singular_values],
               "residual": rep.residual}
    return summary, bool(rep.admissible and rep.rank == 3)


def run_zeroprobe(params, ctx, dry=False):
    import numpy as np
    from . import rigidity
    gamma = _load_gamma(params)
    doc = params.get("system")
    if doc is None:
        doc = _load_json(_need(params, "system_file"))
    coeffs = np.asarray(doc["coefficients_re"], dtype=float) \
        + 1j * np.asarray(doc.get("coefficients_im", 0.0), dtype=float)
    system = rigidity.LowFreqSystem(int(doc["N"]), float(doc["s"]),
                                    tuple(doc["lambdas"]),
                                    tuple(coeffs))
    T = float(params.get("T") or 1.0)
    grid = int(params.get("grid") or 2048)
    if dry:
        return {}, True
    rep = rigidity.zero_set_probe(system, gamma, T, grid=grid)
    rows = [(float(t),) for t in rep.zeros]
    ctx.write(ctx.table("zero_probe", ("t",), rows,
                        meta={"verdict": rep.verdict, "max_abs": rep.max_abs,
                              "coeff_norm": rep.coeff_norm}))
    summary = {"verdict": rep.verdict, "zeros": len(rows),
               "max_abs": rep.max_abs}
    return summary, rep.verdict != "SuspectedIdenticallyZero"


def run_schrodinger(params, ctx, dry=False):
    from . import schrodinger
    V = _load_potential(params)
    T = float(_need(params, "T"))
    if params.get("u0_file") is not None or params.get("u0") is not None:
        u0 = _load_state(params, params.get("s"))
        if dry:
            return {}, True
        dt = params.get("dt")
        uT, diag = schrodinger.evolve(u0, V, T,
                                      dt=float(dt) if dt else None)
        rows = [(int(n), float(c.real), float(c.imag), float(abs(c) ** 2))
                for n, c in zip(uT.modes, uT.coeffs)]
        table = ctx.table("evolution", ("n", "re", "im", "mass"), rows,
                          meta={"steps": diag.steps, "dt": diag.dt,
                                "norm_drift": diag.norm_drift,
                                "top_band_fraction":
                                diag.top_band_fraction})
        ctx.write(table, params.get("out_csv"))
        os.makedirs(ctx.out_dir, exist_ok=True)
        path = os.path.join(ctx.out_dir, "state.json")
        with open(path, "w", newline="\n") as fh:
            json.dump({"K": uT.K, "s": uT.s, "time": uT.time,
                       "coeffs_re": uT.coeffs.real.tolist(),
                       "coeffs_im": uT.coeffs.imag.tolist()},
                      fh, indent=1, sort_keys=True)
            fh.write("\n")
        ctx.written.append(path)
        summary = {"steps": diag.steps, "norm_drift": diag.norm_drift,
                   "state_json": path}
        if params.get("curve_file") is not None \
                or params.get("curve") is not None:
            curve = _load_curve(params)
            trace = schrodinger.evolve_trace(u0, V, curve, T,
                                             dt=float(dt) if dt else None)
            summary["trace"] = trace
        return summary, True
    curve = _load_curve(params)
    s = float(_need(params, "s"))
    K = int(params.get("K") or 8)
    trials = int(params.get("trials") or 8)
    if dry:
        return {}, True
    res = schrodinger.trace_bound_experiment(curve, s, V, T, K=K,
                                             n_random=trials, seed=ctx.seed)
    rows = [(name, float(r))
            for name, r in zip(res.trial_names, res.ratios)]
    table = ctx.table("trace_ratios", ("trial", "ratio"), rows,
                      meta={"T": T, "s": s, "V_sup": res.V_sup,
                            "max_ratio": res.max_ratio,
                            "min_ratio": res.min_ratio})
    ctx.write(table, params.get("out_csv"))
    summary = {"max_ratio": res.max_ratio, "min_ratio": res.min_ratio,
               "trials": len(rows)}
    return summary, True


_RUNNERS = {
    "validate-curve": run_validate_curve,
    "integral": run_integral,
    "classify": run_classify,
    "boundary": run_boundary,
    "lemma21": run_lemma21,
    "tails": run_tails,
    "gram": run_gram,
    "riesz": run_riesz,
    "ingham-sweep": run_ingham_sweep,
    "minimal-time": run_minimal_time,
    "highfreq": run_highfreq,
    "sharpness": run_sharpness,
    "merged": run_merged,
    "wronskian": run_wronskian,
    "threepoint": run_threepoint,
    "zeroprobe": run_zeroprobe,
    "schrodinger": run_schrodinger,
}


def execute(config: ExperimentConfig, dry=False):
    """Run one experiment; returns (summary, ok, ctx)."""
    if config.subcommand not in _RUNNERS:
        raise ValueError(f"unknown subcommand {config.subcommand!r}")
    ctx = RunContext(config.out_dir, config.format, config.seed,
                     config.config_hash())
    summary, ok = _RUNNERS[config.subcommand](config.parameters, ctx,
                                              dry=dry)
    return summary, ok, ctx


def run_batch(doc: dict, out_dir: str, fmt: str, dry=False):
    """Execute a {"experiments": [...]} batch document."""
    if "experiments" not in doc:
        raise ValueError("batch config needs an 'experiments' list")
    results, all_ok = [], True
    for i, entry in enumerate(doc["experiments"]):
        cfg = ExperimentConfig.from_dict(entry)
        if "out_dir" not in entry:
            cfg.out_dir = os.path.join(out_dir,
                                       f"{i:02d}_{cfg.subcommand}")
        if "format" not in entry:
            cfg.format = fmt
        summary, ok, ctx = execute(cfg, dry=dry)
        all_ok = all_ok and ok
        results.append({"subcommand": cfg.subcommand, "ok": ok,
                        "summary": _py(summary),
                        "tables": list(ctx.written)})
    return results, all_ok


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inghamlab",
        description="Numerical experiments for exponential systems on "
                    "curved frequency patterns.")
    parser.add_argument("--version", action="version",
                        version=f"inghamlab {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="random seed "
                        f"(default {DEFAULT_SEED:#x})")
    common.add_argument("--threads", type=int,
                        help="cap BLAS/OpenMP thread pools")
    common.add_argument("--out-dir", help="output directory "
                        "(default results)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="table format (default csv)")
    common.add_argument("--dry-run", action="store_true",
                        help="validate inputs without computing")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, flags in _FLAG_SPECS.items():
        p = sub.add_parser(name, parents=[common])
        for flag, ftype, help_text in flags:
            p.add_argument(f"--{flag}", type=ftype, help=help_text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads is not None:
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)

    from .errors import ArtifactError
    try:
        config_doc = None
        if args.config is not None:
            config_doc = _load_json(args.config)

        if args.subcommand == "run":
            if config_doc is None:
                raise ValueError("run requires --config")
            results, ok = run_batch(config_doc,
                                    args.out_dir or "results",
                                    args.format or "csv",
                                    dry=args.dry_run)
            print(json.dumps({"ok": ok, "experiments": results},
                             indent=1, sort_keys=True))
            return 0 if ok else 2

        params = {}
        seed, out_dir, fmt = DEFAULT_SEED, "results", "csv"
        if config_doc is not None:
            base = ExperimentConfig.from_dict(config_doc)
            if base.subcommand != args.subcommand:
                raise ValueError(
                    f"config is for {base.subcommand!r}, not "
                    f"{args.subcommand!r}")
            params.update(base.parameters)
            seed, out_dir, fmt = base.seed, base.out_dir, base.format
        cli_params = {
            k: v for k, v in vars(args).items()
            if k not in ("subcommand", "config", "seed", "threads",
                         "out_dir", "format", "dry_run") and v is not None
        }
        params.update(cli_params)
        config = ExperimentConfig(
            subcommand=args.subcommand, parameters=params,
            seed=args.seed if args.seed is not None else seed,
            out_dir=args.out_dir or out_dir,
            format=args.format or fmt)
        summary, ok, ctx = execute(config, dry=args.dry_run)
        if args.dry_run:
            print(json.dumps({"dry_run": True, "ok": True,
                              "subcommand": args.subcommand},
                             sort_keys=True))
            return 0
        print(json.dumps({"ok": ok, "summary": _py(summary),
                          "tables": list(ctx.written)},
                         indent=1, sort_keys=True))
        return 0 if ok else 2
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

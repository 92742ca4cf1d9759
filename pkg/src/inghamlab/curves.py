"""Observation curves and planar measures.

Curve families carry an exponent alpha > 1 together with declared constants
c1, c2, c3 for the admissibility bundle

    c1 t^(alpha-1) <= |p'(t)| <= c2 t^(alpha-1)   (t >= 0),
    |p''(t)|      >= c3 t^(alpha-2)               (t > 0),

with p' of constant sign on the window.  Validation checks the three
inequalities on a log-spaced grid in (T*1e-6, T] with relative slack 1e-9,
so exact-equality families (e.g. p = b t^alpha with c1 = c2) pass.

Measures are planar probability measures represented by quadrature nodes
z_k in R^2 and nonnegative weights w_k summing to one, with the transform
convention

    mu_hat(xi) = sum_k w_k exp(-2 pi i <xi, z_k>),      mu_hat(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurve, InsufficientDecay, NonAdmissible
from .quad import leggauss, panel_nodes

CURVE_KINDS = ("Monomial", "Muntz", "ArctanModulated", "Affine", "UserTabulated")
MEASURE_KINDS = ("ArcLengthOnGraph", "ArcLengthOnCircle", "SmoothBump", "ProductNuDelta")

_REL_SLACK = 1e-9  # relative slack for the grid inequalities


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSpec:
    """A concrete curve p with declared admissibility data.

    kind is one of CURVE_KINDS; params holds the construction parameters so
    the curve round-trips through JSON.  Affine curves are retained as a
    straight-line baseline; they carry alpha = 1 and always fail validation.
    """

    kind: str
    params: dict
    alpha: float
    c1: float
    c2: float
    c3: float

    def p(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k == "Monomial":
            a, b, al = self.params["a"], self.params["b"], self.params["alpha"]
            return a + b * np.power(t, al)
        if k == "Muntz":
            u = self.params["t0"] + t
            out = np.zeros_like(u)
            for coef, ex in self.params["coefficients"]:
                out += coef * np.power(u, ex)
            return out
        if k == "ArctanModulated":
            eta = (1.0 + (2.0 / np.pi) * np.arctan(t)) / 3.0
            return eta * t ** 3
        if k == "Affine":
            return self.params["intercept"] + self.params["slope"] * t
        if k == "UserTabulated":
            return np.interp(t, self.params["t"], self.params["p"])
        raise ValueError(f"unknown curve kind {k!r}")

    def dp(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k == "Monomial":
            b, al = self.params["b"], self.params["alpha"]
            return al * b * np.power(t, al - 1.0)
        if k == "Muntz":
            u = self.params["t0"] + t
            out = np.zeros_like(u)
            for coef, ex in self.params["coefficients"]:
                out += coef * ex * np.power(u, ex - 1.0)
            return out
        if k == "ArctanModulated":
            eta = (1.0 + (2.0 / np.pi) * np.arctan(t)) / 3.0
            deta = 2.0 / (3.0 * np.pi * (1.0 + t * t))
            return deta * t ** 3 + 3.0 * eta * t * t
        if k == "Affine":
            return np.full_like(t, float(self.params["slope"]))
        if k == "UserTabulated":
            return np.interp(t, self.params["t"], self.params["dp"])
        raise ValueError(f"unknown curve kind {k!r}")

    def d2p(self, t):
        t = np.asarray(t, dtype=float)
        k = self.kind
        if k == "Monomial":
            b, al = self.params["b"], self.params["alpha"]
            return al * (al - 1.0) * b * np.power(t, al - 2.0)
        if k == "Muntz":
            u = self.params["t0"] + t
            out = np.zeros_like(u)
            for coef, ex in self.params["coefficients"]:
                out += coef * ex * (ex - 1.0) * np.power(u, ex - 2.0)
            return out
        if k == "ArctanModulated":
            eta = (1.0 + (2.0 / np.pi) * np.arctan(t)) / 3.0
            deta = 2.0 / (3.0 * np.pi * (1.0 + t * t))
            d2eta = -4.0 * t / (3.0 * np.pi * (1.0 + t * t) ** 2)
            return d2eta * t ** 3 + 6.0 * deta * t * t + 6.0 * eta * t
        if k == "Affine":
            return np.zeros_like(t)
        if k == "UserTabulated":
            return np.interp(t, self.params["t"], self.params["d2p"])
        raise ValueError(f"unknown curve kind {k!r}")


@dataclass
class ValidationReport:
    """Grid check of the admissibility inequalities on (T*1e-6, T]."""

    passed: bool
    lower_ratio_min: float   # min |p'| / (c1 t^(alpha-1)); needs >= 1
    upper_ratio_max: float   # max |p'| / (c2 t^(alpha-1)); needs <= 1
    curvature_ratio_min: float  # min |p''| / (c3 t^(alpha-2)); needs >= 1
    sign_constant: bool
    T: float
    grid_size: int
    failures: list = field(default_factory=list)


def validate_H_alpha(curve: CurveSpec, T: float, grid_size: int = 256) -> ValidationReport:
    """Check the declared (c1, c2, c3, alpha) bundle on a log-spaced grid."""
    if T <= 0:
        raise ValueError("T must be positive")
    if grid_size < 16:
        raise ValueError("grid_size must be >= 16")
    t = np.geomspace(T * 1e-6, T, grid_size)
    dp = np.asarray(curve.dp(t), dtype=float)
    d2p = np.asarray(curve.d2p(t), dtype=float)
    growth = np.power(t, curve.alpha - 1.0)
    bend = np.power(t, curve.alpha - 2.0)

    with np.errstate(divide="ignore", invalid="ignore"):
        lower = np.min(np.abs(dp) / (curve.c1 * growth))
        upper = np.max(np.abs(dp) / (curve.c2 * growth))
        curvature = np.min(np.abs(d2p) / (curve.c3 * bend))
    sign_constant = bool(np.all(dp > 0) or np.all(dp < 0))

    failures = []
    if not lower >= 1.0 - _REL_SLACK:
        failures.append(f"lower derivative bound fails: min ratio {lower:.6g}")
    if not upper <= 1.0 + _REL_SLACK:
        failures.append(f"upper derivative bound fails: max ratio {upper:.6g}")
    if not curvature >= 1.0 - _REL_SLACK:
        failures.append(f"curvature bound fails: min ratio {curvature:.6g}")
    if not sign_constant:
        failures.append("p' changes sign on the grid")
    return ValidationReport(
        passed=not failures,
        lower_ratio_min=float(lower),
        upper_ratio_max=float(upper),
        curvature_ratio_min=float(curvature),
        sign_constant=sign_constant,
        T=float(T),
        grid_size=int(grid_size),
        failures=failures,
    )


def _muntz_constants(coefficients):
    lead_coef, lead_exp = coefficients[-1]
    al = float(lead_exp)
    c1 = al * abs(lead_coef) / 2.0
    c2 = 3.0 * al * abs(lead_coef) / 2.0
    c3 = al * (al - 1.0) * abs(lead_coef) / 2.0
    return al, c1, c2, c3


def _find_muntz_shift(coefficients, window: float = 10.0) -> float:
    """Smallest shift t0 >= 0 whose grid validation passes on [0, window].

    The shift that tames the lower-order terms is not given by a formula;
    we search: accept t0 = 0 if it already validates, otherwise scan a
    geometric ladder for the first passing shift and bisect down to the
    fail/pass boundary.
    """
    al, c1, c2, c3 = _muntz_constants(coefficients)

    def passes(t0: float) -> bool:
        cand = CurveSpec("Muntz", {"coefficients": list(coefficients), "t0": float(t0)},
                         al, c1, c2, c3)
        return validate_H_alpha(cand, window, 256).passed

    if passes(0.0):
        return 0.0
    lo = 0.0
    hi = None
    for cand in np.geomspace(1e-3, 1e3, 80):
        if passes(cand):
            hi = float(cand)
            break
        lo = float(cand)
    if hi is None:
        raise NonAdmissible("no shift t0 in [0, 1e3] makes the declared constants pass")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def build_curve(kind: str, params: dict) -> CurveSpec:
    """Construct a CurveSpec with the family's declared constants.

    Monomial         p = a + b t^alpha      c1 = c2 = alpha|b|, c3 = alpha(alpha-1)|b|
    Muntz            p = P(t0 + t)          c1 = alpha|a_n|/2, c2 = 3 alpha|a_n|/2,
                                            c3 = alpha(alpha-1)|a_n|/2, a_n leading coef
    ArctanModulated  p = (1 + (2/pi) arctan t) t^3 / 3, alpha = 3, c1 = 1, c2 = 2, c3 = 2
    Affine           p = intercept + slope t (baseline; never admissible)
    UserTabulated    interpolated (t, p, p', p'') samples
    """
    params = dict(params)
    if kind == "Monomial":
        al = float(params["alpha"])
        b = float(params["b"])
        params.setdefault("a", 0.0)
        if al <= 1.0:
            raise NonAdmissible(f"Monomial exponent alpha={al} must exceed 1")
        if b == 0.0:
            raise NonAdmissible("Monomial scale b must be nonzero")
        return CurveSpec(kind, params, al, al * abs(b), al * abs(b), al * (al - 1.0) * abs(b))
    if kind == "Muntz":
        coefficients = [(float(a), float(e)) for a, e in params["coefficients"]]
        exps = [e for _, e in coefficients]
        if any(e <= 0 for e in exps) or sorted(exps) != exps or len(set(exps)) != len(exps):
            raise NonAdmissible("Muntz exponents must be strictly increasing and positive")
        if coefficients[-1][0] == 0.0:
            raise NonAdmissible("Muntz leading coefficient must be nonzero")
        al, c1, c2, c3 = _muntz_constants(coefficients)
        if al <= 1.0:
            raise NonAdmissible(f"Muntz leading exponent alpha={al} must exceed 1")
        t0 = params.get("t0")
        if t0 is None:
            t0 = _find_muntz_shift(coefficients)
        params = {"coefficients": coefficients, "t0": float(t0)}
        return CurveSpec(kind, params, al, c1, c2, c3)
    if kind == "ArctanModulated":
        al = float(params.get("alpha", 3.0))
        if al != 3.0:
            raise NonAdmissible("only the alpha = 3 arctan-modulated profile is supported")
        return CurveSpec(kind, {"alpha": 3.0}, 3.0, 1.0, 2.0, 2.0)
    if kind == "Affine":
        slope = float(params["slope"])
        params.setdefault("intercept", 0.0)
        if slope == 0.0:
            raise NonAdmissible("Affine slope must be nonzero")
        return CurveSpec(kind, params, 1.0, abs(slope), abs(slope), abs(slope))
    if kind == "UserTabulated":
        t = np.asarray(params["t"], dtype=float)
        if t.ndim != 1 or t.size < 2 or np.any(np.diff(t) <= 0):
            raise NonAdmissible("UserTabulated needs a strictly increasing t grid")
        clean = {key: np.asarray(params[key], dtype=float) for key in ("t", "p", "dp", "d2p")}
        al = float(params.get("alpha", 2.0))
        c1 = float(params.get("c1", 1.0))
        c2 = float(params.get("c2", 1.0))
        c3 = float(params.get("c3", 1.0))
        return CurveSpec(kind, clean, al, c1, c2, c3)
    raise ValueError(f"unknown curve kind {kind!r}")


def curve_to_dict(curve: CurveSpec) -> dict:
    params = {}
    for key, val in curve.params.items():
        if isinstance(val, np.ndarray):
            params[key] = val.tolist()
        elif key == "coefficients":
            params[key] = [[a, e] for a, e in val]
        else:
            params[key] = val
    return {"kind": curve.kind, "params": params,
            "alpha": curve.alpha, "c1": curve.c1, "c2": curve.c2, "c3": curve.c3}


def curve_from_dict(doc: dict) -> CurveSpec:
    kind = doc["kind"]
    params = dict(doc["params"])
    if kind == "Muntz":
        params["coefficients"] = [(float(a), float(e)) for a, e in params["coefficients"]]
    return build_curve(kind, params)


# ---------------------------------------------------------------------------
# measures
# ---------------------------------------------------------------------------

@dataclass
class MeasureSpec:
    """Planar probability measure sampled by quadrature nodes and weights."""

    kind: str
    params: dict
    nodes: np.ndarray        # shape (M, 2), columns (t, x)
    weights: np.ndarray      # shape (M,), nonnegative, sums to 1
    claimed_delta: float     # decay exponent the construction aims for
    resolution: int

    def diameter(self) -> float:
        return float(np.max(np.hypot(self.nodes[:, 0], self.nodes[:, 1])))

    def with_resolution(self, resolution: int) -> "MeasureSpec":
        return build_measure(self.kind, self.params, resolution)


def _gl_open_grid(a: float, b: float, count: int, order: int = 10):
    """Composite GL nodes/weights on [a, b]; endpoints are never nodes."""
    panels = max(1, int(math.ceil(count / order)))
    edges = np.linspace(a, b, panels + 1)
    nodes, weights = panel_nodes(edges[:-1], edges[1:], order)
    return nodes.ravel(), weights.ravel()


def build_measure(kind: str, params: dict, resolution: int = 1024) -> MeasureSpec:
    """Construct a MeasureSpec of the given kind.

    ArcLengthOnGraph  normalized arc length on {(t, p(t)) : 0 < t <= T}
    ArcLengthOnCircle normalized arc length on a circle or circular arc
    SmoothBump        tensor bump density (1-u^2)^k (1-v^2)^k on a box
    ProductNuDelta    nu (x) delta_0 where nu has density ~ |x|^(delta-1) e^(-2 pi |x|),
                      with the closed-form transform product_nu_hat below
    """
    if resolution < 64:
        raise ValueError("resolution must be >= 64 nodes")
    params = dict(params)
    if kind == "ArcLengthOnGraph":
        curve = params["curve"]
        if isinstance(curve, dict):
            curve = curve_from_dict(curve)
            params["curve"] = curve
        T = float(params["T"])
        if T <= 0:
            raise ValueError("T must be positive")
        t, glw = _gl_open_grid(0.0, T, resolution)
        dens = np.sqrt(1.0 + np.asarray(curve.dp(t), dtype=float) ** 2)
        w = glw * dens
        total = w.sum()
        if not total > 0:
            raise DegenerateCurve("arc length collapsed to zero")
        nodes = np.column_stack([t, curve.p(t)])
        return MeasureSpec(kind, params, nodes, w / total, 0.5, resolution)
    if kind == "ArcLengthOnCircle":
        r = float(params["radius"])
        if r <= 0:
            raise DegenerateCurve("circle radius must be positive")
        theta0 = float(params.get("theta0", 0.0))
        theta1 = float(params.get("theta1", 2.0 * np.pi))
        if not theta1 > theta0:
            raise DegenerateCurve("empty circular arc")
        ct, cx = params.get("center", (0.0, 0.0))
        th, glw = _gl_open_grid(theta0, theta1, resolution)
        nodes = np.column_stack([ct + r * np.cos(th), cx + r * np.sin(th)])
        w = glw / glw.sum()   # ds = r dtheta, uniform density in theta
        return MeasureSpec(kind, params, nodes, w, 0.5, resolution)
    if kind == "SmoothBump":
        t0, t1, x0, x1 = (float(v) for v in params["box"])
        order = int(params.get("order", 4))
        if not (t1 > t0 and x1 > x0) or order < 1:
            raise ValueError("SmoothBump needs a nonempty box and order >= 1")
        per_axis = max(8, int(round(math.sqrt(resolution))))
        u, wu = _gl_open_grid(-1.0, 1.0, per_axis)
        bump = (1.0 - u * u) ** order
        tt = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * u
        xx = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * u
        W = np.outer(wu * bump, wu * bump).ravel()
        nodes = np.column_stack([np.repeat(tt, xx.size), np.tile(xx, tt.size)])
        return MeasureSpec(kind, params, nodes, W / W.sum(), float(order + 1),
                           resolution)
    if kind == "ProductNuDelta":
        delta = float(params["delta"])
        if not (0.0 < delta < 1.0):
            raise ValueError("ProductNuDelta needs 0 < delta < 1")
        # One-dimensional factor nu with density |x|^(delta-1) e^(-2 pi |x|)
        # (normalized).  Substituting x = u^(1/delta) removes the |x|^(delta-1)
        # singularity, so plain Gauss panels in u converge fast.
        lam = 2.0 * np.pi
        x_max = float(params.get("x_max", 8.0))
        U = x_max ** delta
        half = max(32, resolution // 2)
        u, wu = _gl_open_grid(0.0, U, half)
        x = u ** (1.0 / delta)
        dens_u = (lam ** delta / (2.0 * math.gamma(delta))) * np.exp(-lam * x) / delta
        w_half = wu * dens_u
        xs = np.concatenate([-x[::-1], x])
        ws = np.concatenate([w_half[::-1], w_half])
        nodes = np.column_stack([xs, np.zeros_like(xs)])
        return MeasureSpec(kind, params, nodes, ws / ws.sum(), delta, resolution)
    raise ValueError(f"unknown measure kind {kind!r}")


def product_nu_hat(delta: float, xi) -> np.ndarray:
    """Closed-form temporal transform of the ProductNuDelta factor nu.

    nu_hat(xi) = (1 + xi^2)^(-delta/2) * cos(delta * arctan xi); it is real,
    positive for 0 < delta < 1, and comparable to (1 + |xi|)^(-delta) within
    a factor of 2.
    """
    xi = np.asarray(xi, dtype=float)
    return (1.0 + xi * xi) ** (-delta / 2.0) * np.cos(delta * np.arctan(xi))


def mu_hat(measure: MeasureSpec, xi) -> complex:
    """mu_hat(xi) = sum_k w_k exp(-2 pi i <xi, z_k>) for a single xi."""
    xi = np.asarray(xi, dtype=float)
    phase = measure.nodes @ xi
    return complex(np.exp(-2j * np.pi * phase) @ measure.weights)


def mu_hat_grid(measure: MeasureSpec, xis: np.ndarray, chunk: int = 512) -> np.ndarray:
    """Vectorized mu_hat over an (K, 2) array of frequencies."""
    xis = np.asarray(xis, dtype=float)
    out = np.empty(xis.shape[0], dtype=complex)
    for lo in range(0, xis.shape[0], chunk):
        hi = min(lo + chunk, xis.shape[0])
        phase = xis[lo:hi] @ measure.nodes.T
        out[lo:hi] = np.exp(-2j * np.pi * phase) @ measure.weights
    return out


@dataclass
class DecayFit:
    """Radial decay fit of sup_{|xi| = R} |mu_hat| on a log-log grid."""

    delta_hat: float
    eta_hat: float
    radii: np.ndarray
    sup_values: np.ndarray
    fit_radii: np.ndarray


def fit_fourier_decay(measure: MeasureSpec, radii, directions: int = 64) -> DecayFit:
    """Fit |mu_hat| ~ R^(-delta_hat); eta_hat = max sampled |mu_hat| at |xi| >= 1.

    Per radius the supremum over `directions` equispaced directions is taken;
    the least-squares slope is fitted over the grid's upper decade.  The
    angular grid carries a half-step offset so the coordinate axes are never
    sampled exactly: a product measure with a point-mass factor is flat along
    one axis, and sampling that axis would report no decay at any radius.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.min() <= 0 or radii.max() / radii.min() < 99.0:
        raise ValueError("radial grid must be positive and span at least two decades")
    ang = (np.arange(directions) + 0.5) * (2.0 * np.pi / directions)
    dirs = np.column_stack([np.cos(ang), np.sin(ang)])
    sups = np.empty(radii.size)
    for i, r in enumerate(radii):
        vals = mu_hat_grid(measure, r * dirs)
        sups[i] = np.max(np.abs(vals))
    if sups.min() >= 0.99:
        raise InsufficientDecay("|mu_hat| never falls below 0.99 on the grid")
    mask = radii >= radii.max() / 10.0
    slope = np.polyfit(np.log(radii[mask]), np.log(sups[mask]), 1)[0]
    eta_mask = radii >= 1.0
    eta_hat = float(sups[eta_mask].max()) if eta_mask.any() else float(sups.max())
    return DecayFit(float(-slope), eta_hat, radii, sups, radii[mask])


def measure_to_dict(measure: MeasureSpec) -> dict:
    params = {}
    for key, val in measure.params.items():
        if isinstance(val, CurveSpec):
            params[key] = curve_to_dict(val)
        else:
            params[key] = val
    return {
        "kind": measure.kind,
        "params": params,
        "claimed_delta": measure.claimed_delta,
        "resolution": measure.resolution,
        "nodes": measure.nodes.tolist(),
        "weights": measure.weights.tolist(),
    }


def measure_from_dict(doc: dict) -> MeasureSpec:
    """Rebuild a measure; constructor params win over stored nodes."""
    return build_measure(doc["kind"], doc["params"], int(doc.get("resolution", 1024)))

"""Fractional Schrodinger flow on the torus and curve-trace experiments.

Convention: the free equation is normalized so that mode n rotates as
exp(2 pi i |n|^s t); a real bounded potential V enters as the pointwise
phase exp(-2 pi i V(x) dt).  Time stepping is Strang splitting between
the exact spectral free flow and the potential phase, with the
potential applied on a zero-padded physical grid (M = 4K + 4 points for
spectral truncation K) so products do not alias back into the retained
band.  The splitting is exactly unitary for real V, second order in dt,
and exact when V is constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, simpson

from .classify import abs_pow
from .curves import CurveSpec
from .errors import ResolutionExceeded
from .quad import panel_nodes
from .riesz import curve_system, gram_matrix

_MAX_DT_BASE = 0.01


# ---------------------------------------------------------------------------
# states and potentials
# ---------------------------------------------------------------------------

@dataclass
class TorusState:
    """Spectral state: coefficient c_n for n = -K..K, at an absolute time."""

    coeffs: np.ndarray
    time: float
    s: float
    K: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.K + 1,):
            raise ValueError("need 2K+1 coefficients")
        self.coeffs = c

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    def norm_sq(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def max_active_mode(self) -> int:
        nz = np.nonzero(np.abs(self.coeffs) > 0)[0]
        return int(np.abs(nz - self.K).max()) if nz.size else 0


@dataclass(frozen=True)
class PotentialSpec:
    """Real bounded potential on the torus: Zero, Constant {v0},
    Cosine {amplitude, mode}, or Tabulated {values} (equispaced samples
    on [0, 1), linearly interpolated)."""

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in ("Zero", "Constant", "Cosine", "Tabulated"):
            raise ValueError(f"unknown potential kind {self.kind!r}")

    def values(self, M: int) -> np.ndarray:
        x = np.arange(M) / M
        if self.kind == "Zero":
            return np.zeros(M)
        if self.kind == "Constant":
            return np.full(M, float(self.params["v0"]))
        if self.kind == "Cosine":
            a = float(self.params["amplitude"])
            k = int(self.params["mode"])
            return a * np.cos(2.0 * np.pi * k * x)
        samples = np.asarray(self.params["values"], dtype=float)
        grid = np.arange(samples.size) / samples.size
        return np.interp(x, np.concatenate([grid, [1.0]]),
                         np.concatenate([samples, samples[:1]]))

    @property
    def sup_norm(self) -> float:
        if self.kind == "Zero":
            return 0.0
        if self.kind == "Constant":
            return abs(float(self.params["v0"]))
        if self.kind == "Cosine":
            return abs(float(self.params["amplitude"]))
        return float(np.abs(np.asarray(self.params["values"])).max())


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------

def _pad_spectrum(coeffs: np.ndarray, K: int, M: int) -> np.ndarray:
    f = np.zeros(M, dtype=complex)
    f[: K + 1] = coeffs[K:]
    f[M - K:] = coeffs[:K]
    return f


def _truncate_spectrum(f: np.ndarray, K: int) -> np.ndarray:
    M = f.size
    out = np.empty(2 * K + 1, dtype=complex)
    out[K:] = f[: K + 1]
    out[:K] = f[M - K:]
    return out


@dataclass
class EvolveDiagnostics:
    steps: int
    dt: float
    norm_drift: float
    top_band_fraction: float


def free_evolution(u0: TorusState, t: float) -> TorusState:
    """Exact closed-form flow for V = 0: c_n -> c_n exp(2 pi i |n|^s t)."""
    phase = np.exp(2j * np.pi * abs_pow(u0.modes, u0.s) * t)
    return TorusState(u0.coeffs * phase, u0.time + t, u0.s, u0.K)


def evolve(u0: TorusState, V: PotentialSpec, t_final: float,
           dt: float | None = None) -> tuple:
    """Strang split-step evolution by t_final; returns (state, diagnostics).

    dt is capped at 0.01 / (1 + sup|V|) and rounded so an integer number
    of steps lands exactly on t_final.  The truncation K must dominate
    the data (K >= 2 * max active mode); energy reaching the top tenth
    of the band beyond 1e-8 of the total raises ResolutionExceeded.
    """
    if t_final < 0:
        raise ValueError("t_final must be nonnegative")
    if u0.K < 2 * u0.max_active_mode():
        raise ValueError("need K >= 2 * max active mode of the data")
    cap = _MAX_DT_BASE / (1.0 + V.sup_norm)
    if dt is None:
        dt = cap
    elif dt > cap * (1 + 1e-12):
        raise ValueError(f"dt must be at most 0.01/(1+|V|) = {cap:.3e}")
    if t_final == 0:
        return TorusState(u0.coeffs.copy(), u0.time, u0.s, u0.K), \
            EvolveDiagnostics(0, 0.0, 0.0, 0.0)
    steps = max(1, int(np.ceil(t_final / dt - 1e-12)))
    dt = t_final / steps
    K = u0.K
    M = 4 * K + 4
    vgrid = V.values(M)
    half = np.exp(-2j * np.pi * vgrid * (dt / 2.0))
    free = np.exp(2j * np.pi * abs_pow(u0.modes, u0.s) * dt)
    top = np.abs(u0.modes) >= max(1, int(np.ceil(0.9 * K)))
    c = u0.coeffs.copy()
    norm0 = float(np.vdot(c, c).real)
    drift = 0.0
    top_frac = 0.0
    for _ in range(steps):
        vals = np.fft.ifft(_pad_spectrum(c, K, M)) * M
        vals *= half
        c = _truncate_spectrum(np.fft.fft(vals) / M, K)
        c *= free
        vals = np.fft.ifft(_pad_spectrum(c, K, M)) * M
        vals *= half
        c = _truncate_spectrum(np.fft.fft(vals) / M, K)
        total = float(np.vdot(c, c).real)
        drift = max(drift, abs(total - norm0))
        frac = float((np.abs(c[top]) ** 2).sum()) / total
        top_frac = max(top_frac, frac)
        if frac > 1e-8:
            raise ResolutionExceeded(
                f"energy fraction {frac:.2e} in the top mode band; raise K")
    return TorusState(c, u0.time + t_final, u0.s, u0.K), \
        EvolveDiagnostics(steps, dt, drift, top_frac)


def picard_iterate(u0: TorusState, V: PotentialSpec, t_final: float,
                   n_iter: int = 3, grid: int = 2048) -> TorusState:
    """Duhamel fixed-point cross-check for small sup|V| * t:
    c(t) = e^(2 pi i |n|^s t) (c(0) - 2 pi i int_0^t e^(-2 pi i |n|^s tau)
    (V u(tau))_n d tau), iterated n_iter times from the free flow.
    Quadrature is cumulative trapezoid on a uniform tau grid."""
    if V.sup_norm * t_final > 0.1 + 1e-12:
        raise ValueError("Picard cross-check is restricted to |V| T <= 0.1")
    K = u0.K
    M = 4 * K + 4
    vgrid = V.values(M)
    taus = np.linspace(0.0, t_final, grid + 1)
    temp = abs_pow(u0.modes, u0.s)
    rot = np.exp(2j * np.pi * np.outer(taus, temp))       # free phases
    U = rot * u0.coeffs[None, :]                           # free flow iterate
    for _ in range(n_iter):
        spec = np.zeros((taus.size, M), dtype=complex)
        spec[:, : K + 1] = U[:, K:]
        spec[:, M - K:] = U[:, :K]
        vals = np.fft.ifft(spec, axis=1) * M
        vu = np.fft.fft(vals * vgrid[None, :], axis=1) / M
        integrand = np.conj(rot) * _truncate_rows(vu, K)
        acc = cumulative_trapezoid(integrand, taus, axis=0, initial=0.0)
        U = rot * (u0.coeffs[None, :] - 2j * np.pi * acc)
    return TorusState(U[-1], u0.time + t_final, u0.s, u0.K)


def _truncate_rows(f: np.ndarray, K: int) -> np.ndarray:
    M = f.shape[1]
    out = np.empty((f.shape[0], 2 * K + 1), dtype=complex)
    out[:, K:] = f[:, : K + 1]
    out[:, :K] = f[:, M - K:]
    return out


# ---------------------------------------------------------------------------
# traces along curves
# ---------------------------------------------------------------------------

def state_on_points(state: TorusState, x) -> np.ndarray:
    """Evaluate the state's Fourier series at torus points x."""
    x = np.asarray(x, dtype=float)
    return np.exp(2j * np.pi * np.outer(x, state.modes)) @ state.coeffs


def free_trace_evaluator(u0: TorusState):
    """(t, x) -> u(t, x) for the V = 0 closed-form solution."""
    temp = abs_pow(u0.modes, u0.s)

    def u_eval(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        phase = np.outer(x, u0.modes) + np.outer(t, temp)
        return np.exp(2j * np.pi * phase) @ u0.coeffs

    return u_eval


def _path_function(curve):
    return curve.p if isinstance(curve, CurveSpec) else curve


def trace_along_curve(u_eval, curve, T: float, resolution: int | None = None,
                      t0: float = 0.0, u0_hint: TorusState | None = None) -> float:
    """integral_{t0}^{T} |u(t, p(t) mod 1)|^2 dt by composite
    Gauss-Legendre along the curve.  resolution is the panel count;
    when omitted it is scaled to the total phase turnover (estimated
    from u0_hint when given, else a dense default)."""
    if not T > t0 >= 0.0:
        raise ValueError("need 0 <= t0 < T")
    path = _path_function(curve)
    if resolution is None:
        if u0_hint is not None:
            tt = np.linspace(t0, T, 512)
            pspan = float(np.abs(path(tt)).max())
            modes = u0_hint.modes
            cycles = float(np.abs(modes).max()) * pspan \
                + float(abs_pow(modes, u0_hint.s).max()) * (T - t0)
            resolution = max(64, int(3.0 * cycles) + 1)
        else:
            resolution = 4096
    edges = np.linspace(t0, T, resolution + 1)
    nodes, wts = panel_nodes(edges[:-1], edges[1:], 10)
    t = nodes.ravel()
    vals = np.abs(u_eval(t, np.mod(path(t), 1.0))) ** 2
    return float((vals.reshape(nodes.shape) * wts).sum())


def evolve_trace(u0: TorusState, V: PotentialSpec, curve, T: float,
                 dt: float | None = None, points_per_cycle: float = 48.0) -> float:
    """Trace of the potential-perturbed solution along the curve:
    steps the solver with a dt fine enough for both stability and
    quadrature, sampling |u(t_k, p(t_k))|^2 at every step time and
    integrating with composite Simpson."""
    if u0.K < 2 * u0.max_active_mode():
        raise ValueError("need K >= 2 * max active mode of the data")
    path = _path_function(curve)
    tt = np.linspace(0.0, T, 512)
    dpmax = float(np.abs(np.gradient(path(tt), tt)).max())
    modes = u0.modes
    omega = float((abs_pow(modes, u0.s) + np.abs(modes) * dpmax).max()) + 1.0
    cap = min(_MAX_DT_BASE / (1.0 + V.sup_norm), 1.0 / (points_per_cycle * omega))
    if dt is None or dt > cap:
        dt = cap
    steps = max(2, int(np.ceil(T / dt)))
    times = np.linspace(0.0, T, steps + 1)
    h = times[1] - times[0]
    K = u0.K
    M = 4 * K + 4
    half = np.exp(-2j * np.pi * V.values(M) * (h / 2.0))
    free = np.exp(2j * np.pi * abs_pow(modes, u0.s) * h)
    xs = np.mod(np.asarray(path(times), dtype=float), 1.0)
    phases = np.exp(2j * np.pi * np.outer(xs, modes))
    samples = np.empty(steps + 1)
    c = u0.coeffs.copy()
    samples[0] = abs(phases[0] @ c) ** 2
    for k in range(1, steps + 1):
        vals = np.fft.ifft(_pad_spectrum(c, K, M)) * M
        vals *= half
        c = _truncate_spectrum(np.fft.fft(vals) / M, K)
        c *= free
        vals = np.fft.ifft(_pad_spectrum(c, K, M)) * M
        vals *= half
        c = _truncate_spectrum(np.fft.fft(vals) / M, K)
        samples[k] = abs(phases[k] @ c) ** 2
    return float(simpson(samples, x=times))


@dataclass
class TraceBoundResult:
    T: float
    s: float
    V_sup: float
    trial_names: list
    ratios: list
    max_ratio: float
    min_ratio: float


def trace_bound_experiment(curve: CurveSpec, s: float, V: PotentialSpec,
                           T: float, K: int = 8, n_random: int = 8,
                           seed: int = 0x1CEB00DA) -> TraceBoundResult:
    """Trace/mass ratios over a trial set of initial data: single modes,
    the two-mode short-time vectors c_0 = 1, c_j = -exp(-2 pi i j p(0)),
    the minimal Gram eigenvector (the V = 0 worst case), and random
    data.  The max ratio probes the upper trace bound, the min ratio is
    the empirical observability constant."""
    rng = np.random.default_rng(seed)
    dim = 2 * K + 1
    trials: dict = {}
    for n in (0, min(3, K), K):
        c = np.zeros(dim, dtype=complex)
        c[K + n] = 1.0
        trials[f"mode_{n}"] = c
    p0 = float(curve.p(np.array([0.0]))[0])
    for j in (2, min(5, K)):
        c = np.zeros(dim, dtype=complex)
        c[K] = 1.0
        c[K + j] = -np.exp(-2j * np.pi * j * p0)
        trials[f"two_mode_j{j}"] = c
    G = gram_matrix(curve_system(range(-K, K + 1), s, curve, T), tol=1e-8)
    w, vecs = np.linalg.eigh(G.entries)
    trials["gram_min_vec"] = vecs[:, 0]
    for r in range(n_random):
        c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        trials[f"random_{r}"] = c
    names, ratios = [], []
    for name, c in trials.items():
        if V.sup_norm == 0.0:
            u0 = TorusState(np.asarray(c, dtype=complex), 0.0, s, K)
        else:
            # Give the evolved runs dealiasing headroom: band 2K with the
            # data confined to |n| <= K.
            padded = np.zeros(4 * K + 1, dtype=complex)
            padded[K:3 * K + 1] = c
            u0 = TorusState(padded, 0.0, s, 2 * K)
        mass = u0.norm_sq()
        if V.sup_norm == 0.0:
            tr = trace_along_curve(free_trace_evaluator(u0), curve, T,
                                   u0_hint=u0)
        else:
            tr = evolve_trace(u0, V, curve, T)
        names.append(name)
        ratios.append(tr / mass)
    return TraceBoundResult(T, s, V.sup_norm, names, ratios,
                            float(max(ratios)), float(min(ratios)))

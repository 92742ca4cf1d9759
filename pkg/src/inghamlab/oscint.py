"""Certified oscillatory integrals I_(n,m)(T) and their decay bounds.

The central object is

    I_(n,m)(T) = integral_0^T exp(2 pi i ((n-m) p(t) + (|n|^s - |m|^s) t)) dt,

the inner product of two curve-restricted exponentials.  When |n| != |m|
the total phase factors as lambda * phi(t) with

    phi(t)    = t + A_signed * p(t),   A_signed = (n-m)/(|n|^s-|m|^s),
    lambda    = 2 pi (|n|^s - |m|^s),

and phi' is monotone whenever p' is, so the phase has at most one
stationary point on (0, T).

The integrator subdivides [0, T] so every panel holds at most half an
oscillation (|delta psi| <= pi), refines dyadically around stationary
points down to width 1e-6 T, and certifies each panel by comparing
Gauss-Legendre orders 10 and 20.  All panel bookkeeping is vectorized;
the only Python-level loops are O(log) splitting rounds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classify import abs_pow, classify_pair, tau_threshold
from .curves import CurveSpec
from .errors import InadmissibleEta, ToleranceNotMet
from .quad import panel_nodes

_HALF_OSC = np.pi          # max phase change per panel
_CLUSTER_WIDTH = 1e-6      # dyadic refinement floor around stationary points, rel. to T
_BISECT_TOL = 1e-13        # stationary-point bisection tolerance in t


@dataclass(frozen=True)
class PhaseSpec:
    """Phase decomposition of the pair (n, m); requires |n| != |m|."""

    n: int
    m: int
    s: float
    curve: CurveSpec
    lam: float            # 2 pi (|n|^s - |m|^s)
    A: float              # |(n - m) / (|n|^s - |m|^s)|

    @classmethod
    def for_pair(cls, n: int, m: int, s: float, curve: CurveSpec) -> "PhaseSpec":
        e = abs_pow(np.asarray(n), s) - abs_pow(np.asarray(m), s)
        if e == 0.0:
            raise ValueError("phase decomposition needs |n| != |m|")
        return cls(n, m, s, curve, 2.0 * np.pi * float(e), abs((n - m) / float(e)))

    def _signed_A(self) -> float:
        return (self.n - self.m) / (self.lam / (2.0 * np.pi))

    def phi(self, t):
        return np.asarray(t, dtype=float) + self._signed_A() * self.curve.p(t)

    def dphi(self, t):
        return 1.0 + self._signed_A() * self.curve.dp(t)

    def total_phase(self, t):
        """2 pi ((n-m) p(t) + (|n|^s - |m|^s) t) = lam * phi(t)."""
        return self.lam * self.phi(t)


@dataclass
class QuadResult:
    value: complex
    abs_error_estimate: float
    panels: int
    stationary_points: list


def _sign_change_roots(f, b: float, a: float = 0.0) -> list:
    """Roots of a continuous scalar function on (a, b) by bracketing."""
    lo = max(a, b * 1e-9)
    grid = np.unique(np.concatenate([
        np.geomspace(lo, b, 200),
        np.linspace(a, b, 257),
    ]))
    vals = np.asarray(f(grid), dtype=float)
    roots = []
    sgn = np.sign(vals)
    exact = np.nonzero(sgn == 0)[0]
    for i in exact:
        if a < grid[i] < b:
            roots.append(float(grid[i]))
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    for i in idx:
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo = vals[i]
        while hi - lo > _BISECT_TOL:
            mid = 0.5 * (lo + hi)
            fm = float(f(np.array([mid]))[0])
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return sorted(roots)


def stationary_points(n: int, m: int, s: float, curve: CurveSpec, T: float) -> list:
    """Roots of phi'_(m,n) in (0, T), located by bracketing + bisection.

    Monotone p' gives at most one root; the search is generic so tabulated
    curves with wiggly derivatives are still handled.
    """
    if abs(n) == abs(m):
        raise ValueError("stationary points are defined for |n| != |m|")
    if T <= 0:
        raise ValueError("T must be positive")
    spec = PhaseSpec.for_pair(n, m, s, curve)
    return _sign_change_roots(spec.dphi, T)


def phase_integral(d: float, e: float, curve: CurveSpec, T: float,
                   tol: float = 1e-9, weight=None, t0: float = 0.0,
                   panel_budget: int = 2 ** 20) -> QuadResult:
    """Adaptive certified integral of exp(2 pi i (d p(t) + e t)) w(t) over
    [t0, T], for arbitrary real phase multipliers d and e.

    The returned abs_error_estimate is the summed per-panel |GL20 - GL10|
    discrepancy; panels are split until it drops below tol or the panel
    budget is exhausted (ToleranceNotMet).
    """
    if not T > t0 >= 0.0:
        raise ValueError("need 0 <= t0 < T")
    if tol <= 0:
        raise ValueError("tol must be positive")
    span = T - t0
    two_pi = 2.0 * np.pi

    def psi(t):
        return two_pi * (d * curve.p(t) + e * t)

    def dpsi(t):
        return two_pi * (d * curve.dp(t) + e)

    if d == 0.0 and e == 0.0:
        roots = []
    else:
        roots = _sign_change_roots(dpsi, T, t0)

    # breakpoints: ends, plus dyadic shells around every stationary point
    pts = [t0, T]
    for r in roots:
        w = span
        while w > _CLUSTER_WIDTH * span:
            w *= 0.5
            for c in (r - w, r + w):
                if t0 < c < T:
                    pts.append(c)
    edges = np.unique(np.asarray(pts, dtype=float))
    a, b = edges[:-1], edges[1:]
    pa, pb = psi(a), psi(b)

    # split until every panel carries at most half an oscillation
    for _ in range(64):
        bad = np.abs(pb - pa) > _HALF_OSC
        if not bad.any():
            break
        if a.size + np.count_nonzero(bad) > panel_budget:
            raise ToleranceNotMet(
                f"panel budget {panel_budget} exhausted while splitting phase")
        mid = 0.5 * (a[bad] + b[bad])
        pm = psi(mid)
        keep = ~bad
        a = np.concatenate([a[keep], a[bad], mid])
        b = np.concatenate([b[keep], mid, b[bad]])
        pa = np.concatenate([pa[keep], pa[bad], pm])
        pb = np.concatenate([pb[keep], pm, pb[bad]])

    def panel_values(lo, hi):
        n10, w10 = panel_nodes(lo, hi, 10)
        n20, w20 = panel_nodes(lo, hi, 20)
        f10 = np.exp(1j * psi(n10.ravel())).reshape(n10.shape)
        f20 = np.exp(1j * psi(n20.ravel())).reshape(n20.shape)
        if weight is not None:
            f10 = f10 * weight(n10.ravel()).reshape(n10.shape)
            f20 = f20 * weight(n20.ravel()).reshape(n20.shape)
        i10 = (f10 * w10).sum(axis=1)
        i20 = (f20 * w20).sum(axis=1)
        return i20, np.abs(i20 - i10)

    vals, errs = panel_values(a, b)
    for _ in range(48):
        total_err = float(errs.sum())
        if total_err <= tol:
            break
        bad = errs > 0.5 * tol / max(1, errs.size)
        if not bad.any():
            bad = errs >= errs.max()
        if a.size + np.count_nonzero(bad) > panel_budget:
            raise ToleranceNotMet(
                f"panel budget {panel_budget} exhausted at error {total_err:.3e}")
        mid = 0.5 * (a[bad] + b[bad])
        lo = np.concatenate([a[bad], mid])
        hi = np.concatenate([mid, b[bad]])
        new_vals, new_errs = panel_values(lo, hi)
        keep = ~bad
        a = np.concatenate([a[keep], lo])
        b = np.concatenate([b[keep], hi])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])

    return QuadResult(complex(vals.sum()), float(errs.sum()), int(a.size),
                      [float(r) for r in roots])


def oscillatory_integral(n: int, m: int, s: float, curve: CurveSpec, T: float,
                         tol: float = 1e-9, weight=None,
                         panel_budget: int = 2 ** 20) -> QuadResult:
    """I_(n,m)(T) for the pair (n, m) at dispersion s, optionally weighted.

    Unweighted diagonal pairs short-circuit to the exact value T.
    """
    if n == m and weight is None:
        if T <= 0:
            raise ValueError("T must be positive")
        return QuadResult(complex(T), 0.0, 1, [])
    d = float(n - m)
    e = float(abs_pow(np.asarray(n), s) - abs_pow(np.asarray(m), s))
    return phase_integral(d, e, curve, T, tol, weight, 0.0, panel_budget)


# ---------------------------------------------------------------------------
# decay bounds
# ---------------------------------------------------------------------------

def eta_admissible_range(s: float, alpha: float) -> tuple:
    """Admissible (lo, hi, hi_inclusive) for the interpolation parameter eta."""
    lo = -(alpha - 1.0)
    if s >= 1.0 + 1.0 / alpha:
        return lo, 1.0, True
    hi = (s - 1.0) * (alpha - 1.0) / (2.0 - s)
    return lo, hi, False


def check_eta(eta: float, s: float, alpha: float) -> None:
    lo, hi, inclusive = eta_admissible_range(s, alpha)
    if not eta > lo:
        raise InadmissibleEta(f"eta={eta} violates eta > -(alpha-1) = {lo}")
    if inclusive:
        if not eta <= hi:
            raise InadmissibleEta(f"eta={eta} violates eta <= 1 (s >= 1 + 1/alpha)")
    elif not eta < hi:
        raise InadmissibleEta(
            f"eta={eta} violates eta < (s-1)(alpha-1)/(2-s) = {hi} (1 < s < 1 + 1/alpha)")


def default_eta(s: float, alpha: float) -> float:
    """A safe admissible eta: 1 in the wide regime, mid-range otherwise."""
    lo, hi, inclusive = eta_admissible_range(s, alpha)
    return 1.0 if inclusive else 0.5 * hi


def vdc_t1(eta: float, alpha: float):
    """Window floor T1 attached to the bad-pair bound (informational only).

    For 0 < eta < 1 it is 4^(eta / ((1-eta)(alpha-1))); for eta <= 0 it is 1;
    for eta = 1 the bound is window-independent and no floor applies (None).
    """
    if eta == 1.0:
        return None
    if eta <= 0.0:
        return 1.0
    return 4.0 ** (eta / ((1.0 - eta) * (alpha - 1.0)))


def antidiagonal_t0(curve: CurveSpec) -> float:
    """Window floor for the antidiagonal bound: (3(alpha-1)/(4 pi c1))^(1/alpha)."""
    al = curve.alpha
    return (3.0 * (al - 1.0) / (4.0 * np.pi * curve.c1)) ** (1.0 / al)


def vdc_theoretical_bound(n: int, m: int, s: float, curve: CurveSpec, T: float,
                          eta: float | None = None):
    """Stationary-phase decay bound for |I_(n,m)(T)|, without implied constant.

    Diagonal pairs have no decay bound (the integral is exactly T): None.
    AntiDiagonal:  |n|^(-1/alpha)          (valid for T >= antidiagonal_t0)
    GoodPlus/Minus: 1 / ||n|^s - |m|^s|
    Bad:           T^((1-eta)/2) |n-m|^(-eta/(2(alpha-1)))
                     * ||n|^s - |m|^s|^(-(alpha-1-eta)/(2(alpha-1)))
    eta must be admissible whenever supplied; it is required for Bad pairs.
    """
    if eta is not None:
        check_eta(eta, s, curve.alpha)
    pc = classify_pair(n, m, s, tau_threshold(curve, T))
    if pc.tag == "Diagonal":
        return None
    if pc.tag == "AntiDiagonal":
        return abs(n) ** (-1.0 / curve.alpha)
    e = abs(float(abs_pow(np.asarray(n), s) - abs_pow(np.asarray(m), s)))
    if pc.tag in ("GoodPlus", "GoodMinus"):
        return 1.0 / e
    if eta is None:
        raise InadmissibleEta("bad-pair bound needs an explicit eta")
    al = curve.alpha
    denom = 2.0 * (al - 1.0)
    return (T ** ((1.0 - eta) / 2.0)
            * abs(n - m) ** (-eta / denom)
            * e ** (-(al - 1.0 - eta) / denom))


@dataclass
class RatioScan:
    """Empirical check that |I_(n,m)| / bound stays bounded over a pair grid."""

    max_ratio: float
    argmax: tuple
    pairs: int


def vdc_ratio_scan(curve: CurveSpec, s: float, T: float, N: int,
                   eta: float | None = None, tol: float = 1e-9) -> RatioScan:
    """Max of |I_(n,m)(T)| / vdc_theoretical_bound over |n|, |m| <= N, n != m.

    By conjugation symmetry only pairs with n > m are computed.  Reported,
    not asserted: the implied constants of the bounds are not explicit.
    """
    if eta is None:
        eta = default_eta(s, curve.alpha)
    best, arg, pairs = 0.0, (0, 0), 0
    for n in range(-N, N + 1):
        for m in range(-N, n):
            bound = vdc_theoretical_bound(n, m, s, curve, T, eta)
            val = abs(oscillatory_integral(n, m, s, curve, T, tol).value)
            pairs += 1
            ratio = val / bound
            if ratio > best:
                best, arg = ratio, (n, m)
    return RatioScan(best, arg, pairs)

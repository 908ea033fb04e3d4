"""Curvature laws kappa(z), their momentum antiderivatives, and admissible bands.

A law prescribes geodesic curvature as a function of height z on the unit
sphere.  Its antiderivative K(z) = c + int kappa dz is the conserved
angular momentum of the curve around the z-axis, and the quartic-like
profile P(z) = 1 - z^2 - K(z)^2 controls where motion can happen: the
curve lives where P > 0, turns where P hits a simple zero, passes through
a pole where the zero sits at |z| = 1 with K(z) = 0, and runs off to an
asymptotic height where the zero is double.

Phi-form helpers (momentum_phi, curvature_phi, lambda_rate_phi) evaluate
the same quantities as functions of the extended latitude, which stays
single-valued when a curve passes through a pole onto the far sheet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import numpy.polynomial.polynomial as npp

from ._fd import check_uniform, deriv1
from ._quad import _W7, _X7, gauss_adaptive

TURNING_POINT = "turning-point"
POLE_PASSAGE = "pole-passage"
OPEN_BOUNDARY = "open-boundary"

# |K(+-1)| at or below this counts as a genuine pole contact
_POLE_MOMENTUM_TOL = 1e-10
# relative slack when matching polynomial momentum roots at u = +-1
_CONTACT_COEF_TOL = 1e-12

_BAKED_C_KINDS = frozenset(
    {"loxodrome", "loxo-one", "loxo-super", "catenary", "sn-family",
     "viviani", "clelia"}
)


@dataclass(frozen=True)
class CurvatureLaw:
    """A prescribed geodesic curvature kappa(z).

    kind        one of the built-in family tags or "custom"
    params      family parameters by name
    domain      open z-interval on which kappa is finite
    singular_z  interior heights where kappa blows up (splits scanning)
    """

    kind: str
    params: dict
    domain: tuple = (-1.0, 1.0)
    singular_z: tuple = ()
    kappa_fn: Optional[Callable] = field(default=None, repr=False)

    def kappa(self, z):
        """Evaluate kappa at z (array-valued); NaN outside the domain."""
        z = np.asarray(z, dtype=float)
        p = self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.kind == "constant":
                out = np.full_like(z, p["k0"])
            elif self.kind == "linear-elastica":
                out = 2.0 * p["a"] * z + p["b"]
            elif self.kind == "loxodrome":
                out = p["a"] * z / np.sqrt(1.0 - z * z)
            elif self.kind == "loxo-one":
                out = z / np.sqrt(p["a"] - z * z)
            elif self.kind == "loxo-super":
                out = p["a"] * z / np.sqrt(1.0 - p["a"] * z * z)
            elif self.kind == "catenary":
                out = p["a"] / (z * z)
            elif self.kind == "sn-family":
                out = p["p"] * (1.0 - 2.0 * z * z) / np.sqrt(1.0 - z * z)
            elif self.kind in ("viviani", "clelia"):
                n2 = p["n"] * p["n"]
                g = n2 + 1.0 - z * z
                out = z * (2.0 * n2 + 1.0 - z * z) / (g * np.sqrt(g))
            elif self.kind == "custom":
                out = np.asarray(self.kappa_fn(z), dtype=float)
            else:
                raise ValueError(f"unknown law kind {self.kind!r}")
            lo, hi = self.domain
            out = np.where((z < lo) | (z > hi), np.nan, out)
        if np.ndim(z) == 0:
            return float(out)
        return out

    def scalar_kappa(self):
        """A plain-float evaluator, cheap enough for inner ODE loops."""
        p = dict(self.params)
        lo, hi = self.domain
        kind = self.kind

        if kind == "constant":
            k0 = p["k0"]

            def f(z):
                return k0 if lo <= z <= hi else math.nan
        elif kind == "linear-elastica":
            a, b = p["a"], p["b"]

            def f(z):
                return 2.0 * a * z + b if lo <= z <= hi else math.nan
        elif kind == "loxodrome":
            a = p["a"]

            def f(z):
                if not lo < z < hi:
                    return math.nan
                return a * z / math.sqrt(1.0 - z * z)
        elif kind == "loxo-one":
            a = p["a"]

            def f(z):
                if not lo < z < hi:
                    return math.nan
                return z / math.sqrt(a - z * z)
        elif kind == "loxo-super":
            a = p["a"]

            def f(z):
                if not lo < z < hi:
                    return math.nan
                return a * z / math.sqrt(1.0 - a * z * z)
        elif kind == "catenary":
            a = p["a"]

            def f(z):
                if z == 0.0 or not lo <= z <= hi:
                    return math.nan
                return a / (z * z)
        elif kind == "sn-family":
            pp = p["p"]

            def f(z):
                if not lo < z < hi:
                    return math.nan
                return pp * (1.0 - 2.0 * z * z) / math.sqrt(1.0 - z * z)
        elif kind in ("viviani", "clelia"):
            n2 = p["n"] * p["n"]

            def f(z):
                if not lo <= z <= hi:
                    return math.nan
                g = n2 + 1.0 - z * z
                return z * (2.0 * n2 + 1.0 - z * z) / (g * math.sqrt(g))
        else:
            fn = self.kappa_fn

            def f(z):
                if not lo <= z <= hi:
                    return math.nan
                return float(fn(z))
        return f


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def constant_law(k0: float) -> CurvatureLaw:
    """kappa(z) = k0.  Circles: small circles for k0 != 0, great for k0 = 0."""
    return CurvatureLaw("constant", {"k0": _finite("k0", k0)})


def linear_elastica_law(a: float, b: float = 0.0) -> CurvatureLaw:
    """kappa(z) = 2 a z + b, the spherical elastica profile.  Needs a != 0."""
    a = _finite("a", a)
    if a == 0.0:
        raise ValueError("linear elastica needs a != 0; use constant_law")
    return CurvatureLaw("linear-elastica", {"a": a, "b": _finite("b", b)})


def loxodrome_law(a: float) -> CurvatureLaw:
    """kappa(z) = a z / sqrt(1 - z^2) with 0 < a < 1 (constant bearing)."""
    a = _finite("a", a)
    if not 0.0 < a < 1.0:
        raise ValueError("loxodrome parameter must satisfy 0 < a < 1")
    return CurvatureLaw("loxodrome", {"a": a})


def loxo_one_law(a: float) -> CurvatureLaw:
    """kappa(z) = z / sqrt(a - z^2) with 0 < a < 1 (linear-height spiral)."""
    a = _finite("a", a)
    if not 0.0 < a < 1.0:
        raise ValueError("loxo-one parameter must satisfy 0 < a < 1")
    r = math.sqrt(a)
    return CurvatureLaw("loxo-one", {"a": a}, domain=(-r, r))


def loxo_super_law(a: float) -> CurvatureLaw:
    """kappa(z) = a z / sqrt(1 - a z^2) with a > 1 (exponential-height spiral)."""
    a = _finite("a", a)
    if not a > 1.0:
        raise ValueError("loxo-super parameter must satisfy a > 1")
    r = 1.0 / math.sqrt(a)
    return CurvatureLaw("loxo-super", {"a": a}, domain=(-r, r))


def catenary_law(a: float) -> CurvatureLaw:
    """kappa(z) = a / z^2 with 0 < a < 1/2."""
    a = _finite("a", a)
    if not 0.0 < a < 0.5:
        raise ValueError("catenary parameter must satisfy 0 < a < 1/2")
    return CurvatureLaw("catenary", {"a": a}, singular_z=(0.0,))


def sn_family_law(p: float) -> CurvatureLaw:
    """kappa(z) = p (1 - 2 z^2) / sqrt(1 - z^2) with 0 < p < 1."""
    p = _finite("p", p)
    if not 0.0 < p < 1.0:
        raise ValueError("sn-family parameter must satisfy 0 < p < 1")
    return CurvatureLaw("sn-family", {"p": p})


def viviani_law() -> CurvatureLaw:
    """kappa(z) = z (3 - z^2) / (2 - z^2)^(3/2), the phi = lambda curve."""
    return CurvatureLaw("viviani", {"n": 1.0})


def clelia_law(n: float) -> CurvatureLaw:
    """kappa(z) = z (2 n^2 + 1 - z^2) / (n^2 + 1 - z^2)^(3/2); phi = n lambda."""
    n = _finite("n", n)
    if not n > 0.0:
        raise ValueError("clelia parameter must satisfy n > 0")
    return CurvatureLaw("clelia", {"n": n})


def custom_law(kappa, domain=(-1.0, 1.0), singular_z=()) -> CurvatureLaw:
    """Wrap an arbitrary callable kappa(z) (must accept numpy arrays)."""
    lo, hi = float(domain[0]), float(domain[1])
    if not -1.0 <= lo < hi <= 1.0:
        raise ValueError("domain must be a subinterval of [-1, 1]")
    probe = 0.5 * (lo + hi)
    try:
        np.asarray(kappa(np.array([probe, probe])), dtype=float)
        fn = kappa
    except Exception:
        fn = np.vectorize(kappa, otypes=[float])
    return CurvatureLaw(
        "custom", {}, domain=(lo, hi),
        singular_z=tuple(sorted(float(x) for x in singular_z)), kappa_fn=fn,
    )


def _syndiv(coefs, root):
    """Divide a descending-coefficient polynomial by (u - root), drop remainder."""
    out = [coefs[0]]
    for c in coefs[1:-1]:
        out.append(c + root * out[-1])
    return out


class MomentumLaw:
    """Momentum antiderivative K(z) of a curvature law, with offset c.

    Construct through antiderivative().  Families whose K is pinned by
    the closed form (every kind except constant, linear-elastica and
    custom) reject a nonzero c.
    """

    def __init__(self, law: CurvatureLaw, c: float = 0.0):
        c = _finite("c", c)
        if law.kind in _BAKED_C_KINDS and c != 0.0:
            raise ValueError(
                f"{law.kind} has its momentum offset baked in; c must be 0"
            )
        self.law = law
        self.c = c
        self._custom_table = None
        if law.kind == "custom":
            self._custom_table = _CustomCumulative(law)
        self._rate_poly = self._prepare_rate_poly()

    # -- z-form -----------------------------------------------------------

    def value(self, z):
        """K(z)."""
        z = np.asarray(z, dtype=float)
        p = self.law.params
        with np.errstate(invalid="ignore", divide="ignore"):
            k = self.law.kind
            if k == "constant":
                out = p["k0"] * z + self.c
            elif k == "linear-elastica":
                out = (p["a"] * z + p["b"]) * z + self.c
            elif k == "loxodrome":
                out = -p["a"] * np.sqrt(1.0 - z * z)
            elif k == "loxo-one":
                out = -np.sqrt(p["a"] - z * z)
            elif k == "loxo-super":
                out = -np.sqrt(1.0 - p["a"] * z * z)
            elif k == "catenary":
                out = -p["a"] / z
            elif k == "sn-family":
                out = p["p"] * z * np.sqrt(1.0 - z * z)
            elif k in ("viviani", "clelia"):
                out = (z * z - 1.0) / np.sqrt(p["n"] ** 2 + 1.0 - z * z)
            else:
                out = self._custom_table.eval(z) + self.c
        if np.ndim(z) == 0:
            return float(out)
        return out

    __call__ = value

    def deriv(self, z):
        """K'(z) = kappa(z)."""
        return self.law.kappa(z)

    def _KdK(self, z):
        """The product K(z) kappa(z) in a form finite wherever P' is."""
        p = self.law.params
        k = self.law.kind
        with np.errstate(invalid="ignore", divide="ignore"):
            if k == "loxodrome":
                return -p["a"] ** 2 * z
            if k == "loxo-one":
                return -z
            if k == "loxo-super":
                return -p["a"] * z
            if k == "sn-family":
                return p["p"] ** 2 * z * (1.0 - 2.0 * z * z)
            if k == "catenary":
                return -p["a"] ** 2 / z**3
            return self.value(z) * self.law.kappa(z)

    def P(self, z):
        """Admissibility profile 1 - z^2 - K(z)^2."""
        z = np.asarray(z, dtype=float)
        K = self.value(z)
        out = 1.0 - z * z - np.square(K)
        if np.ndim(z) == 0:
            return float(out)
        return out

    def dP(self, z):
        """P'(z) = -2 z - 2 K kappa, with the product kept cancellation-free."""
        z = np.asarray(z, dtype=float)
        out = -2.0 * z - 2.0 * self._KdK(z)
        if np.ndim(z) == 0:
            return float(out)
        return out

    # -- phi-form ---------------------------------------------------------

    def momentum_phi(self, phi):
        """Momentum as a function of extended latitude.

        Agrees with K(sin phi) on the principal sheet and continues
        smoothly through pole passages (where sqrt branches would flip).
        """
        phi = np.asarray(phi, dtype=float)
        u = np.sin(phi)
        w = np.cos(phi)
        p = self.law.params
        k = self.law.kind
        with np.errstate(invalid="ignore", divide="ignore"):
            if k == "constant":
                out = p["k0"] * u + self.c
            elif k == "linear-elastica":
                out = (p["a"] * u + p["b"]) * u + self.c
            elif k == "loxodrome":
                out = -p["a"] * w
            elif k == "loxo-one":
                out = -np.sqrt(p["a"] - u * u)
            elif k == "loxo-super":
                out = -np.sqrt(1.0 - p["a"] * u * u)
            elif k == "catenary":
                out = -p["a"] / u
            elif k == "sn-family":
                out = p["p"] * u * w
            elif k in ("viviani", "clelia"):
                out = -w * w / np.sqrt(p["n"] ** 2 + w * w)
            else:
                out = self._custom_table.eval(u) + self.c
        if np.ndim(phi) == 0:
            return float(out)
        return out

    def curvature_phi(self, phi):
        """Curvature along the curve as a function of extended latitude."""
        phi = np.asarray(phi, dtype=float)
        u = np.sin(phi)
        w = np.cos(phi)
        p = self.law.params
        k = self.law.kind
        with np.errstate(invalid="ignore", divide="ignore"):
            if k == "constant":
                out = np.full_like(u, p["k0"])
            elif k == "linear-elastica":
                out = 2.0 * p["a"] * u + p["b"]
            elif k == "loxodrome":
                out = p["a"] * u / w
            elif k == "loxo-one":
                out = u / np.sqrt(p["a"] - u * u)
            elif k == "loxo-super":
                out = p["a"] * u / np.sqrt(1.0 - p["a"] * u * u)
            elif k == "catenary":
                out = p["a"] / (u * u)
            elif k == "sn-family":
                out = p["p"] * (w * w - u * u) / w
            elif k in ("viviani", "clelia"):
                n2 = p["n"] ** 2
                g = n2 + w * w
                out = u * (2.0 * n2 + w * w) / (g * np.sqrt(g))
            else:
                out = np.asarray(self.law.kappa(u), dtype=float)
        if np.ndim(phi) == 0:
            return float(out)
        return out

    def _prepare_rate_poly(self):
        """Contact-reduced numerator for polynomial momenta, or None."""
        k = self.law.kind
        p = self.law.params
        if k == "constant":
            coefs = [p["k0"], self.c]
        elif k == "linear-elastica":
            coefs = [p["a"], p["b"], self.c]
        else:
            return None
        tol = _CONTACT_COEF_TOL * (1.0 + sum(abs(x) for x in coefs))
        north = abs(npp.polyval(1.0, coefs[::-1])) <= tol
        if north:
            coefs = _syndiv(coefs, 1.0)
        south = abs(npp.polyval(-1.0, coefs[::-1])) <= tol
        if south and len(coefs) > 1:
            coefs = _syndiv(coefs, -1.0)
        elif south and len(coefs) == 1:
            # momentum is a multiple of (u - 1)(u + 1) only for degree >= 2
            south = abs(coefs[0]) <= tol
            if south:
                coefs = [0.0]
        return coefs, north, south

    def lambda_rate_phi(self, phi):
        """Longitude rate -M(phi) / cos^2(phi), cancellation-free at contacts.

        Where the momentum vanishes at a touched pole the matching factor
        of cos^2 is divided out analytically, so smooth pole passages get
        a finite rate; spiraling contacts evaluate to +-inf exactly at
        the pole, which is the honest limit.
        """
        phi = np.asarray(phi, dtype=float)
        u = np.sin(phi)
        w = np.cos(phi)
        p = self.law.params
        k = self.law.kind
        with np.errstate(invalid="ignore", divide="ignore"):
            if self._rate_poly is not None:
                coefs, north, south = self._rate_poly
                q = npp.polyval(u, list(reversed(coefs)))
                if north and south:
                    out = q
                elif north:
                    out = q / (1.0 + u)
                elif south:
                    out = -q / (1.0 - u)
                else:
                    out = -q / (w * w)
            elif k == "loxodrome":
                out = p["a"] / w
            elif k == "loxo-one":
                out = np.sqrt(p["a"] - u * u) / (w * w)
            elif k == "loxo-super":
                out = np.sqrt(1.0 - p["a"] * u * u) / (w * w)
            elif k == "catenary":
                out = p["a"] / (u * w * w)
            elif k == "sn-family":
                out = -p["p"] * u / w
            elif k in ("viviani", "clelia"):
                out = 1.0 / np.sqrt(p["n"] ** 2 + w * w)
            else:
                out = -(self._custom_table.eval(u) + self.c) / (w * w)
        if np.ndim(phi) == 0:
            return float(out)
        return out


class _CustomCumulative:
    """Cumulative integral of a custom kappa from z = 0, Hermite-interpolated."""

    _N = 4097

    def __init__(self, law: CurvatureLaw):
        lo, hi = law.domain
        nodes = np.linspace(lo, hi, self._N)
        kv = np.asarray(law.kappa(nodes), dtype=float)
        bad = ~np.isfinite(kv)
        if bad.any():
            span = hi - lo
            nodes = nodes.copy()
            nodes[0] = nodes[0] + 1e-9 * span if bad[0] else nodes[0]
            nodes[-1] = nodes[-1] - 1e-9 * span if bad[-1] else nodes[-1]
            kv = np.asarray(law.kappa(nodes), dtype=float)
            if not np.isfinite(kv).all():
                raise ValueError(
                    "custom law must be finite on the interior of its domain"
                )
        # integrate node to node with 7-point panels, then re-anchor at z = 0
        h = np.diff(nodes)
        mid = 0.5 * (nodes[:-1] + nodes[1:])
        pts = mid[:, None] + 0.5 * h[:, None] * _X7[None, :]
        pv = np.asarray(law.kappa(pts.ravel()), dtype=float).reshape(pts.shape)
        panels = 0.5 * h * (pv @ _W7)
        vals = np.empty_like(nodes)
        vals[0] = 0.0
        vals[1:] = np.cumsum(panels)
        self.nodes = nodes
        self.vals = vals
        self.kv = kv
        anchor = min(max(0.0, lo), hi)
        self.vals = vals - float(self.eval(anchor))

    def eval(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        i = np.clip(np.searchsorted(self.nodes, z) - 1, 0, self.nodes.size - 2)
        x0, x1 = self.nodes[i], self.nodes[i + 1]
        y0, y1 = self.vals[i], self.vals[i + 1]
        d0, d1 = self.kv[i], self.kv[i + 1]
        h = x1 - x0
        t = np.clip((z - x0) / h, 0.0, 1.0)
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        out = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
        out = np.where((z < self.nodes[0]) | (z > self.nodes[-1]), np.nan, out)
        return out if out.size > 1 else out.reshape(())


def antiderivative(law: CurvatureLaw, c: float = 0.0) -> MomentumLaw:
    """Momentum law K with K' = kappa and K(0) offset by c where allowed."""
    return MomentumLaw(law, c)


@dataclass(frozen=True)
class AdmissibleInterval:
    """Maximal z-interval where P > 0, with endpoint classification.

    Endpoint kinds: turning-point (simple zero of P strictly inside the
    sphere), pole-passage (zero at |z| = 1 with vanishing momentum, the
    curve passes onto the far sheet), open-boundary (the motion leaves the
    law's domain at finite arc length, or approaches a double zero of P
    asymptotically).  period_s is the z-oscillation period when both ends
    reflect or pass, else None.
    """

    z_lo: float
    z_hi: float
    lo_kind: str
    hi_kind: str
    period_s: Optional[float] = None

    @property
    def width(self) -> float:
        return self.z_hi - self.z_lo

    def contains(self, z: float, tol: float = 0.0) -> bool:
        return self.z_lo - tol <= z <= self.z_hi + tol

    def closed(self) -> bool:
        return (self.lo_kind != OPEN_BOUNDARY) and (self.hi_kind != OPEN_BOUNDARY)


def _bisect_root(P, lo, hi, f_lo_pos):
    """Root of P in (lo, hi) where the P > 0 flag flips; NaN counts negative."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        v = P(mid)
        mid_pos = math.isfinite(v) and v > 0.0
        if mid_pos == f_lo_pos:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, abs(lo)):
            break
    return 0.5 * (lo + hi)


def _newton_polish(K, x, lo, hi):
    for _ in range(8):
        p = K.P(x)
        d = K.dP(x)
        if not (math.isfinite(p) and math.isfinite(d)) or d == 0.0:
            break
        step = p / d
        x2 = x - step
        if not lo <= x2 <= hi:
            break
        x = x2
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _double_roots(K, grid, Pv, pos):
    """Interior double zeros of P inside positive runs, via dP Newton."""
    found = []
    n = grid.size
    if n < 5:
        return found
    Pmax = float(np.nanmax(np.where(pos, Pv, -np.inf)))
    if not math.isfinite(Pmax) or Pmax <= 0.0:
        return found
    interior = np.zeros(n, dtype=bool)
    interior[1:-1] = pos[1:-1] & pos[:-2] & pos[2:]
    cand = interior & (Pv < 1e-4 * Pmax)
    cand[1:-1] &= (Pv[1:-1] <= Pv[:-2]) & (Pv[1:-1] <= Pv[2:])
    for i in np.flatnonzero(cand):
        x0, x1 = grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]
        a, b = x0, x1
        fa, fb = K.dP(a), K.dP(b)
        if not (math.isfinite(fa) and math.isfinite(fb)) or fa * fb > 0.0:
            continue
        for _ in range(120):
            m = 0.5 * (a + b)
            fm = K.dP(m)
            if not math.isfinite(fm):
                break
            if fa * fm <= 0.0:
                b, fb = m, fm
            else:
                a, fa = m, fm
            if b - a <= 1e-15 * max(1.0, abs(m)):
                break
        x = 0.5 * (a + b)
        if abs(K.P(x)) <= 1e-12 * max(1.0, Pmax):
            found.append(float(x))
    return found


def _scan_piece(K: MomentumLaw, plo: float, phi_: float, n_grid: int):
    grid = np.linspace(plo, phi_, n_grid)
    with np.errstate(all="ignore"):
        Pv = np.asarray(K.P(grid), dtype=float)
    Pv = np.where(np.isfinite(Pv), Pv, -np.inf)
    pos = Pv > 0.0
    if not pos.any():
        return []

    dbl = _double_roots(K, grid, Pv, pos)

    # breakpoints: piece edges, sign-change roots, interior double zeros
    cuts = []  # (z, kind) with kind one of the endpoint tags
    trans = np.flatnonzero(pos[:-1] != pos[1:])

    def classify_edge(e, inward):
        if abs(e) == 1.0:
            if abs(K.value(e)) <= _POLE_MOMENTUM_TOL:
                return (e, POLE_PASSAGE)
            return None  # P(e) < 0 strictly; a turning root lies inside
        v = K.P(e)
        if not math.isfinite(v):
            # the declared edge can sit a rounding ulp outside the
            # representable domain; probe just inside instead
            v = K.P(e + inward * 1e-12 * (1.0 + abs(e)))
        if math.isfinite(v) and v > 0.0:
            return (e, OPEN_BOUNDARY)
        if math.isfinite(v) and v == 0.0:
            return (e, TURNING_POINT)
        return None

    for i in trans:
        root = _bisect_root(K.P, float(grid[i]), float(grid[i + 1]), bool(pos[i]))
        root = _newton_polish(K, root, float(grid[i]), float(grid[i + 1]))
        cuts.append((float(root), TURNING_POINT))
    for x in dbl:
        cuts.append((x, OPEN_BOUNDARY))
    for e, inward in ((plo, 1.0), (phi_, -1.0)):
        tagged = classify_edge(e, inward)
        if tagged is not None:
            cuts.append(tagged)

    cuts.sort(key=lambda t: t[0])
    # merge near-duplicate cuts: a turning root bisected into a pole or
    # domain edge is the same feature, and the edge classification wins
    rank = {POLE_PASSAGE: 2, OPEN_BOUNDARY: 1, TURNING_POINT: 0}
    merged = []
    for z, kind in cuts:
        if merged and z - merged[-1][0] <= 1e-9:
            zp, kp = merged[-1]
            if rank[kind] > rank[kp]:
                merged[-1] = (z, kind)
            continue
        merged.append((z, kind))
    # walk consecutive cut pairs; keep those with P > 0 in between
    out = []
    for (za, ka), (zb, kb) in zip(merged[:-1], merged[1:]):
        mid = 0.5 * (za + zb)
        v = K.P(mid)
        if math.isfinite(v) and v > 0.0:
            out.append(AdmissibleInterval(za, zb, ka, kb))
    return out


def _interval_period(K: MomentumLaw, iv: AdmissibleInterval) -> float:
    m = 0.5 * (iv.z_lo + iv.z_hi)
    r = 0.5 * (iv.z_hi - iv.z_lo)

    def g(t):
        z = m + r * np.sin(t)
        with np.errstate(invalid="ignore"):
            val = r * np.cos(t) / np.sqrt(np.maximum(K.P(z), 0.0))
        return np.where(np.isfinite(val), val, 0.0)

    half = gauss_adaptive(g, -math.pi / 2.0, math.pi / 2.0, 1e-12)
    return 2.0 * half


def admissible_intervals(K: MomentumLaw, n_grid: int = 4096,
                         with_period: bool = True):
    """All maximal z-intervals where the law admits motion, ascending.

    Scans P on a uniform grid per smooth piece of the domain (split at
    the law's interior singularities), refines once dyadically if any
    feature looks under-resolved, classifies every endpoint, and fills
    in the oscillation period for fully reflecting intervals.
    """
    lo = max(K.law.domain[0], -1.0)
    hi = min(K.law.domain[1], 1.0)
    edges = [lo] + [z for z in K.law.singular_z if lo < z < hi] + [hi]
    result = []
    for plo, phi_ in zip(edges[:-1], edges[1:]):
        ivs = _scan_piece(K, plo, phi_, n_grid)
        narrow = any(iv.width < 3.0 * (phi_ - plo) / n_grid for iv in ivs)
        if narrow:
            ivs = _scan_piece(K, plo, phi_, 2 * n_grid)
        result.extend(ivs)
    result.sort(key=lambda iv: iv.z_lo)
    if with_period:
        result = [
            AdmissibleInterval(
                iv.z_lo, iv.z_hi, iv.lo_kind, iv.hi_kind,
                _interval_period(K, iv) if iv.closed() else None,
            )
            for iv in result
        ]
    return result


def momentum_from_trace(trace) -> np.ndarray:
    """Angular momentum x' y - x y' sampled along a trace, by differencing.

    Five-point stencils in the interior, three-point one sample in from
    each end, NaN at the two ends themselves.  Needs at least 3 samples.
    """
    s = np.asarray(trace.s, dtype=float)
    xi = np.asarray(trace.xi, dtype=float)
    if s.size < 3:
        raise ValueError("momentum_from_trace needs at least 3 samples")
    h = check_uniform(s)
    x, y = xi[:, 0], xi[:, 1]
    if s.size >= 5:
        dx = deriv1(x, h)
        dy = deriv1(y, h)
    else:
        dx = np.full_like(x, np.nan)
        dy = np.full_like(y, np.nan)
    # fill the second sample from each end with the three-point stencil
    for arr, src in ((dx, x), (dy, y)):
        arr[1] = (src[2] - src[0]) / (2.0 * h)
        arr[-2] = (src[-1] - src[-3]) / (2.0 * h)
    return y * dx - x * dy

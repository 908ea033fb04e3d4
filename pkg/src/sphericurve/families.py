"""Closed-form spherical curves used as analytic references.

Each catalog entry evaluates extended latitude, unwrapped longitude and
Cartesian points directly from formulas, with no quadrature (the
catenary longitude is the one exception).  These are the ground truth
the reconstruction is checked against.

Longitudes built from arctan of a tangent-linear expression are
unwrapped analytically: arctan((R + beta*tan(theta))/gamma) jumps by
-pi*sign(beta/gamma) at every pole of the tangent, so adding
pi*sign(beta/gamma) times the number of poles crossed restores the
continuous branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ._fd import deriv2
from ._quad import gauss_batch
from .laws import (
    CurvatureLaw,
    MomentumLaw,
    antiderivative,
    catenary_law,
    clelia_law,
    constant_law,
    linear_elastica_law,
    loxo_one_law,
    loxo_super_law,
    loxodrome_law,
    sn_family_law,
    viviani_law,
)
from .specfun import incomplete_E, jacobi


@dataclass(frozen=True)
class ElasticaParams:
    """Coefficients of the quadratic momentum K(z) = a z^2 + b z + c."""

    a: float
    b: float = 0.0
    c: float = 0.0

    @property
    def sigma(self) -> float:
        return -4.0 * self.a * self.c

    @property
    def lambda_rest(self) -> float:
        return -self.b

    @property
    def energy_E(self) -> float:
        d = self.b * self.b - 4.0 * self.a * self.c
        return 4.0 * self.a * self.a - self.b * self.b - 0.25 * d * d


def el_residual(kappa, params: ElasticaParams, ds: float) -> float:
    """Sup-norm defect of the curvature Euler-Lagrange equation.

    kappa must be uniform samples with spacing ds; at least 5 are needed
    for the second-derivative stencil.
    """
    kappa = np.asarray(kappa, dtype=float)
    if kappa.size < 5:
        raise ValueError("el_residual needs at least 5 samples")
    kdd = deriv2(kappa, float(ds))
    d = params.b * params.b - 4.0 * params.a * params.c
    r = 2.0 * kdd + kappa ** 3 + (2.0 - d) * kappa - 2.0 * params.b
    r = r[np.isfinite(r)]
    return float(np.max(np.abs(r))) if r.size else math.inf


def energy_residual(kappa, kappa_dot, params: ElasticaParams) -> float:
    """Sup-norm defect of the conserved energy of the curvature equation."""
    kappa = np.asarray(kappa, dtype=float)
    kd = np.asarray(kappa_dot, dtype=float)
    d = params.b * params.b - 4.0 * params.a * params.c
    r = (kd * kd + 0.25 * kappa ** 4 + (1.0 - 0.5 * d) * kappa ** 2
         - 2.0 * params.b * kappa - params.energy_E)
    r = r[np.isfinite(r)]
    return float(np.max(np.abs(r))) if r.size else math.inf


@dataclass(frozen=True)
class ClosedFormCurve:
    """One analytic curve: callable s -> (phi, lam, xi).

    phi is the extended latitude, lam the unwrapped longitude, xi the
    (n, 3) unit points.  Evaluation outside [s_lo, s_hi] raises.
    kappa(s) gives the geodesic curvature along the curve.
    """

    tag: str
    params: dict
    s_lo: float
    s_hi: float
    _eval: Callable = field(repr=False)
    _kappa: Optional[Callable] = field(default=None, repr=False)

    def _check(self, s):
        s = np.asarray(s, dtype=float)
        scale = 1.0 + min(abs(self.s_lo), 1e6) + min(abs(self.s_hi), 1e6)
        slack = 1e-9 * scale
        if s.size and (np.min(s) < self.s_lo - slack
                       or np.max(s) > self.s_hi + slack):
            raise ValueError(
                f"arc length outside [{self.s_lo}, {self.s_hi}] for "
                f"family '{self.tag}'"
            )
        return s

    def __call__(self, s):
        return self._eval(self._check(s))

    def kappa(self, s):
        if self._kappa is None:
            raise ValueError(f"family '{self.tag}' has no curvature formula")
        return self._kappa(self._check(s))

    def trace(self, s):
        from .reconstruct import CurveTrace

        phi, lam, xi = self(s)
        return CurveTrace(
            s=np.asarray(s, dtype=float), z=xi[:, 2], phi=phi, lam=lam,
            xi=xi, meta={"closed_form": self.tag, "params": dict(self.params)},
        )


def _phi_sheet(sheet, z):
    sheet = np.asarray(sheet)
    sgn = 1 - 2 * (sheet % 2)
    return sheet * np.pi + sgn * np.arcsin(np.clip(z, -1.0, 1.0))


def _xi_from(phi, lam):
    w = np.cos(phi)
    lam_f = np.where(np.isfinite(lam), lam, 0.0)
    return np.column_stack([w * np.cos(lam_f), w * np.sin(lam_f), np.sin(phi)])


def _tan_breaks(theta):
    """Number of poles of tan crossed on the way from 0 to theta."""
    th = np.asarray(theta, dtype=float)
    q = (th - 0.5 * np.pi) / np.pi
    k = np.ceil(q)
    exact = q == np.floor(q)
    if np.any(exact):
        # a float theta landing exactly on a pole belongs to the side its
        # tangent value points to
        k = k + np.where(exact & (np.tan(th) < 0.0), 1.0, 0.0)
    return k


def _need(params: dict, keys, tag: str):
    unknown = set(params) - set(keys)
    if unknown:
        raise ValueError(f"unknown parameters for '{tag}': {sorted(unknown)}")


# -- catalog builders -------------------------------------------------------


def _make_small_circle(params):
    _need(params, {"k0", "c"}, "small-circle")
    k0 = float(params.get("k0", 1.0))
    c = float(params.get("c", 0.0))
    if k0 == 0.0:
        raise ValueError("small-circle needs k0 != 0; use great-circle")
    w = math.sqrt(1.0 + k0 * k0)
    if not abs(c) < w:
        raise ValueError("small-circle needs |c| < sqrt(1 + k0^2)")
    R = math.sqrt(1.0 - c * c + k0 * k0)
    scale = abs(c) + abs(k0)
    degen_s = abs(c - k0) <= 1e-12 * scale  # touches the south pole
    degen_n = abs(c + k0) <= 1e-12 * scale  # touches the north pole

    def ev(s):
        ws = w * s
        z = np.clip((R * np.sin(ws) - c * k0) / (w * w), -1.0, 1.0)
        th = 0.5 * ws
        T = np.tan(th)
        cnt = _tan_breaks(th)
        if c == 0.0:
            lam = np.arctan(np.cos(ws) / k0)
        elif degen_s:
            lam = (np.arctan((1.0 - (1.0 + 2.0 * k0 * k0) * T)
                             / (2.0 * k0 * w))
                   - np.pi * np.copysign(1.0, k0) * cnt)
        elif degen_n:
            lam = (np.arctan((1.0 + (1.0 + 2.0 * k0 * k0) * T)
                             / (2.0 * k0 * w))
                   + np.pi * np.copysign(1.0, k0) * cnt)
        else:
            b1 = 1.0 - c * k0 + k0 * k0
            g1 = (k0 - c) * w
            b2 = -(1.0 + c * k0 + k0 * k0)
            g2 = (k0 + c) * w
            lam = (np.arctan((R + b1 * T) / g1)
                   + np.pi * np.copysign(1.0, b1 / g1) * cnt
                   + np.arctan((R + b2 * T) / g2)
                   + np.pi * np.copysign(1.0, b2 / g2) * cnt)
        if degen_s:
            # contacts where sin(ws) = -1; the sheet toggles at each
            f = np.floor((ws + 0.5 * np.pi) / (2.0 * np.pi))
            sheet = -(np.abs(f).astype(int) % 2)
            phi = _phi_sheet(sheet, z)
        elif degen_n:
            f = np.floor((ws + 1.5 * np.pi) / (2.0 * np.pi))
            sheet = np.abs(f).astype(int) % 2
            phi = _phi_sheet(sheet, z)
        else:
            phi = np.arcsin(z)
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        return np.full(np.asarray(s, dtype=float).shape, k0)

    return ClosedFormCurve("small-circle", {"k0": k0, "c": c},
                           -math.inf, math.inf, ev, kap)


def _make_great_circle(params):
    _need(params, {"c"}, "great-circle")
    c = float(params.get("c", 0.0))
    if not abs(c) <= 1.0:
        raise ValueError("great-circle needs |c| <= 1")
    nu = math.sqrt(max(1.0 - c * c, 0.0))

    def ev(s):
        s = np.asarray(s, dtype=float)
        z = nu * np.sin(s)
        if c == 0.0:
            phi = s
            lam = np.zeros_like(s)
        else:
            phi = np.arcsin(np.clip(z, -1.0, 1.0))
            lam = -(np.arctan(c * np.tan(s))
                    + np.pi * np.copysign(1.0, c) * _tan_breaks(s))
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        return np.zeros(np.asarray(s, dtype=float).shape)

    return ClosedFormCurve("great-circle", {"c": c},
                           -math.inf, math.inf, ev, kap)


def _jac_arrays(s, p):
    flat = np.asarray(s, dtype=float).ravel()
    sn = np.empty(flat.size)
    cn = np.empty(flat.size)
    dn = np.empty(flat.size)
    am = np.empty(flat.size)
    for i, u in enumerate(flat):
        t = jacobi(float(u), p)
        sn[i], cn[i], dn[i], am[i] = t.sn, t.cn, t.dn, t.am
    shape = np.asarray(s, dtype=float).shape
    return (sn.reshape(shape), cn.reshape(shape),
            dn.reshape(shape), am.reshape(shape))


def _make_seiffert(params):
    _need(params, {"p"}, "seiffert")
    p = float(params.get("p", 0.5))
    if not 0.0 < p < 1.0:
        raise ValueError("seiffert needs 0 < p < 1")

    def ev(s):
        sn, cn, dn, am = _jac_arrays(s, p)
        phi = 0.5 * np.pi - am
        lam = p * np.asarray(s, dtype=float)
        xi = np.column_stack([sn * np.cos(lam), sn * np.sin(lam), cn])
        return phi, lam, xi

    def kap(s):
        _, cn, _, _ = _jac_arrays(s, p)
        return 2.0 * p * cn

    return ClosedFormCurve("seiffert", {"p": p}, -math.inf, math.inf, ev, kap)


def _make_borderline(params):
    _need(params, {"a"}, "borderline")
    a = float(params.get("a", 1.0))
    if not a > 0.5:
        raise ValueError("borderline needs a > 1/2")
    beta = math.sqrt(2.0 * a - 1.0)
    amp = beta / a
    unit = abs(a - 1.0) <= 1e-12

    def ev(s):
        s = np.asarray(s, dtype=float)
        if unit:
            z = 1.0 / np.cosh(s)
            lam = s.copy()
            phi = 0.5 * np.pi - np.arctan(np.sinh(s))
        else:
            z = amp / np.cosh(beta * s)
            lam = s + np.arctan((beta / (1.0 - a)) * np.tanh(beta * s))
            phi = np.arcsin(np.clip(z, -1.0, 1.0))
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        s = np.asarray(s, dtype=float)
        z = (1.0 / np.cosh(s)) if unit else (amp / np.cosh(beta * s))
        return 2.0 * a * z

    return ClosedFormCurve("borderline", {"a": a}, -math.inf, math.inf, ev, kap)


def _make_loxodrome(params):
    _need(params, {"a"}, "loxodrome")
    a = float(params.get("a", math.cos(math.pi / 4.0)))
    if not 0.0 < a < 1.0:
        raise ValueError("loxodrome needs 0 < a < 1")
    nu = math.sqrt(1.0 - a * a)
    s_max = 0.5 * np.pi / nu

    def ev(s):
        s = np.asarray(s, dtype=float)
        u = np.clip(np.sin(nu * s), -1.0, 1.0)
        phi = nu * s
        with np.errstate(divide="ignore"):
            lam = (a / nu) * np.arctanh(u)
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        return a * np.tan(nu * np.asarray(s, dtype=float))

    return ClosedFormCurve("loxodrome", {"a": a}, -s_max, s_max, ev, kap)


def _make_loxo_one(params):
    _need(params, {"a"}, "loxo-one")
    a = float(params.get("a", 0.5))
    if not 0.0 < a < 1.0:
        raise ValueError("loxo-one needs 0 < a < 1")
    ca = math.sqrt(1.0 - a)
    sa = math.sqrt(a)
    s_max = sa / ca

    def ev(s):
        s = np.asarray(s, dtype=float)
        u = ca * s
        root = np.sqrt(np.maximum(a - u * u, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            lam = ((1.0 / ca) * np.arctan(u / root)
                   - 0.5 * np.arctan((u + a) / (ca * root))
                   - 0.5 * np.arctan((u - a) / (ca * root)))
        phi = np.arcsin(np.clip(u, -1.0, 1.0))
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        s = np.asarray(s, dtype=float)
        u = ca * s
        return u / np.sqrt(np.maximum(a - u * u, 0.0))

    return ClosedFormCurve("loxo-one", {"a": a}, -s_max, s_max, ev, kap)


def _make_loxo_super(params):
    _need(params, {"a"}, "loxo-super")
    a = float(params.get("a", 2.0))
    if not a > 1.0:
        raise ValueError("loxo-super needs a > 1")
    beta = math.sqrt(a - 1.0)
    s_edge = -math.log(a) / (2.0 * beta)

    def ev(s):
        s = np.asarray(s, dtype=float)
        z = np.exp(beta * s)
        w = np.sqrt(np.maximum(1.0 - a * z * z, 0.0))
        with np.errstate(divide="ignore"):
            lam = -np.arctanh(np.clip(w, 0.0, 1.0)) / beta + np.arctan(w / beta)
        phi = np.arcsin(np.clip(z, -1.0, 1.0))
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        s = np.asarray(s, dtype=float)
        z = np.exp(beta * s)
        return a * z / np.sqrt(np.maximum(1.0 - a * z * z, 1e-300))

    return ClosedFormCurve("loxo-super", {"a": a}, -math.inf, s_edge, ev, kap)


def _make_catenary(params):
    _need(params, {"a"}, "catenary")
    a = float(params.get("a", 0.3))
    if not 0.0 < a < 0.5:
        raise ValueError("catenary needs 0 < a < 1/2")
    q = math.sqrt(1.0 - 4.0 * a * a)

    def z_of(s):
        return np.sqrt((1.0 + q * np.sin(2.0 * s)) / 2.0)

    def rate(sig):
        zz = z_of(sig)
        return 2.0 * a / (zz * (1.0 - q * np.sin(2.0 * sig)))

    def ev(s):
        s = np.asarray(s, dtype=float)
        flat = s.ravel()
        grid = np.unique(np.concatenate([flat, [0.0]]))
        deltas = gauss_batch(rate, grid[:-1], grid[1:], 1e-13)
        cum = np.concatenate([[0.0], np.cumsum(deltas)])
        cum = cum - cum[np.searchsorted(grid, 0.0)]
        lam = cum[np.searchsorted(grid, flat)].reshape(s.shape)
        z = z_of(s)
        phi = np.arcsin(np.clip(z, -1.0, 1.0))
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        s = np.asarray(s, dtype=float)
        return 2.0 * a / (1.0 + q * np.sin(2.0 * s))

    return ClosedFormCurve("catenary", {"a": a}, -math.inf, math.inf, ev, kap)


def _make_sn_family(params):
    _need(params, {"p"}, "sn-family")
    p = float(params.get("p", 0.5))
    if not 0.0 < p < 1.0:
        raise ValueError("sn-family needs 0 < p < 1")
    pp = math.sqrt((1.0 - p) * (1.0 + p))
    lam0 = (p / (2.0 * pp)) * math.log((1.0 + pp) / (1.0 - pp))

    def ev(s):
        sn, cn, dn, am = _jac_arrays(s, p)
        with np.errstate(divide="ignore"):
            lam = lam0 - (p / (2.0 * pp)) * np.log((dn + pp) / (dn - pp))
        phi = am
        # at a pole contact lam diverges but cn is 0; emit the pole point
        lam_f = np.where(np.isfinite(lam), lam, 0.0)
        xi = np.column_stack([cn * np.cos(lam_f), cn * np.sin(lam_f), sn])
        return phi, lam, xi

    def kap(s):
        _, cn, _, _ = _jac_arrays(s, p)
        with np.errstate(divide="ignore"):
            return p * (2.0 * cn - 1.0 / cn)

    return ClosedFormCurve("sn-family", {"p": p}, -math.inf, math.inf, ev, kap)


def _make_clelia_like(tag, n):
    if not (math.isfinite(n) and n > 0.0):
        raise ValueError(f"{tag} needs n > 0")
    p = 1.0 / math.sqrt(n * n + 1.0)
    A = math.sqrt(n * n + 1.0) / n

    def phi_of_s(s):
        s = np.asarray(s, dtype=float)
        ph = s / A
        for _ in range(60):
            f = np.array([A * incomplete_E(float(x), p) for x in ph.ravel()])
            f = f.reshape(ph.shape) - s
            fp = A * np.sqrt(1.0 - (p * np.sin(ph)) ** 2)
            step = f / fp
            ph = ph - step
            if np.all(np.abs(step) <= 1e-14 * (1.0 + np.abs(ph))):
                break
        return ph

    def ev(s):
        phi = phi_of_s(s)
        lam = phi / n
        return phi, lam, _xi_from(phi, lam)

    def kap(s):
        phi = phi_of_s(s)
        w2 = np.cos(phi) ** 2
        return np.sin(phi) * (2.0 * n * n + w2) / (n * n + w2) ** 1.5

    return ClosedFormCurve(tag, {"n": n}, -math.inf, math.inf, ev, kap)


def _make_viviani(params):
    _need(params, set(), "viviani")
    return _make_clelia_like("viviani", 1.0)


def _make_clelia(params):
    _need(params, {"n"}, "clelia")
    return _make_clelia_like("clelia", float(params.get("n", 1.0)))


_CATALOG = {
    "small-circle": _make_small_circle,
    "great-circle": _make_great_circle,
    "seiffert": _make_seiffert,
    "borderline": _make_borderline,
    "loxodrome": _make_loxodrome,
    "loxo-one": _make_loxo_one,
    "loxo-super": _make_loxo_super,
    "catenary": _make_catenary,
    "sn-family": _make_sn_family,
    "viviani": _make_viviani,
    "clelia": _make_clelia,
}


def closed_form(tag: str, params: Optional[dict] = None) -> ClosedFormCurve:
    """Look up an analytic curve by family name."""
    if tag not in _CATALOG:
        raise ValueError(
            f"no closed form for '{tag}'; known: {sorted(_CATALOG)}"
        )
    return _CATALOG[tag](dict(params or {}))


def family_names() -> list:
    """Every family the command line accepts, closed-form or law-only."""
    return sorted(set(_CATALOG) | {"constant", "elastica"})


def family_law(name: str, params: Optional[dict] = None,
               c: Optional[float] = None) -> MomentumLaw:
    """Build the momentum law matching a named family.

    Families with a baked-in momentum constant reject an explicit c;
    constant, small-circle, great-circle and elastica accept one.
    """
    params = dict(params or {})

    def free_c(default=0.0):
        return float(c) if c is not None else default

    def no_c():
        if c is not None and c != 0.0:
            raise ValueError(f"family '{name}' has a fixed momentum constant")

    if name in ("constant", "small-circle"):
        _need(params, {"k0", "c"}, name)
        k0 = float(params.get("k0", 1.0))
        cc = float(params["c"]) if "c" in params else free_c()
        return antiderivative(constant_law(k0), cc)
    if name == "great-circle":
        _need(params, {"c"}, name)
        cc = float(params["c"]) if "c" in params else free_c()
        return antiderivative(constant_law(0.0), cc)
    if name == "elastica":
        _need(params, {"a", "b", "c"}, name)
        a = float(params.get("a", 1.0))
        b = float(params.get("b", 0.0))
        cc = float(params["c"]) if "c" in params else free_c()
        return antiderivative(linear_elastica_law(a, b), cc)
    if name == "seiffert":
        _need(params, {"p"}, name)
        no_c()
        p = float(params.get("p", 0.5))
        if not 0.0 < p < 1.0:
            raise ValueError("seiffert needs 0 < p < 1")
        return antiderivative(linear_elastica_law(p, 0.0), -p)
    if name == "borderline":
        _need(params, {"a"}, name)
        no_c()
        a = float(params.get("a", 1.0))
        if not a > 0.5:
            raise ValueError("borderline needs a > 1/2")
        return antiderivative(linear_elastica_law(a, 0.0), -1.0)
    if name == "loxodrome":
        _need(params, {"a"}, name)
        no_c()
        return antiderivative(loxodrome_law(float(params.get("a", 0.7))))
    if name == "loxo-one":
        _need(params, {"a"}, name)
        no_c()
        return antiderivative(loxo_one_law(float(params.get("a", 0.5))))
    if name == "loxo-super":
        _need(params, {"a"}, name)
        no_c()
        return antiderivative(loxo_super_law(float(params.get("a", 2.0))))
    if name == "catenary":
        _need(params, {"a"}, name)
        no_c()
        return antiderivative(catenary_law(float(params.get("a", 0.3))))
    if name == "sn-family":
        _need(params, {"p"}, name)
        no_c()
        return antiderivative(sn_family_law(float(params.get("p", 0.5))))
    if name == "viviani":
        _need(params, set(), name)
        no_c()
        return antiderivative(viviani_law())
    if name == "clelia":
        _need(params, {"n"}, name)
        no_c()
        return antiderivative(clelia_law(float(params.get("n", 1.0))))
    raise ValueError(f"unknown family '{name}'; known: {family_names()}")

"""Exact Riemann solver: classification, wave construction, sampling.

Wave anatomy: the 1-field is linearly degenerate, so the left state is
always connected to the intermediate state by a contact moving at
lambda1 (which transports w1 unchanged).  The 2-field is genuinely
nonlinear with shock and rarefaction curves both lying on the ray
b/h = const through the right state, so the 2-wave is a shock when w1
drops left to right and a rarefaction when it rises.  When the left
thickness vanishes the contact and the fan tail collapse onto x = 0
(composite wave); when the right thickness vanishes both waves merge
into an overcompressive singular front carrying a growing point mass
in b (delta shock).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import Params, State, eigenvalues, flux, phi
from .errors import (
    InvalidDataError,
    InvalidShockError,
    NotADeltaError,
    RangeError,
    WrongCaseError,
)

__all__ = [
    "CASE_JR",
    "CASE_JS",
    "CASE_PURE_J",
    "CASE_COMPOSITE",
    "CASE_DELTA",
    "RiemannData",
    "Contact",
    "Shock",
    "Rarefaction",
    "DeltaShock",
    "CompositeJR",
    "Wave",
    "WaveFan",
    "SampledValue",
    "classify",
    "intermediate_state",
    "contact_speed",
    "shock_speed",
    "rarefaction_state",
    "delta_shock",
    "solve",
    "sample",
    "profile",
    "rankine_hugoniot_residual",
    "generalized_rh_residual",
    "BumpTestFunction",
    "weak_residual",
    "fan_to_json",
    "fan_from_json",
]

CASE_JR = "J+R"
CASE_JS = "J+S"
CASE_PURE_J = "pure-J"
CASE_COMPOSITE = "composite-JR"
CASE_DELTA = "delta-shock"

# Relative tolerance for w1 ties and shared-ray checks on exact data.
_TIE_RTOL = 1e-13


@dataclass(frozen=True)
class RiemannData:
    """Two-state initial data separated at x = 0.

    Admissibility (at most one of the four components h-, b-, h+, b+ on
    the boundary) is enforced by :func:`classify`, not at construction,
    so degenerate pairs can still be fed to the low-level wave builders.
    """

    left: State
    right: State
    params: Params

    def assumption_holds(self) -> bool:
        tol = self.params.h_tol
        zeros = sum(
            1
            for v in (self.left.h, self.left.b, self.right.h, self.right.b)
            if v <= tol
        )
        return zeros <= 1


@dataclass(frozen=True)
class Contact:
    speed: float
    left: State
    right: State

    def speed_range(self) -> tuple[float, float]:
        return self.speed, self.speed


@dataclass(frozen=True)
class Shock:
    speed: float
    left: State
    right: State

    def speed_range(self) -> tuple[float, float]:
        return self.speed, self.speed


@dataclass(frozen=True)
class Rarefaction:
    """Self-similar fan between xi_lo and xi_hi on the anchor's ray."""

    xi_lo: float
    xi_hi: float
    left: State
    right: State
    anchor: State

    def speed_range(self) -> tuple[float, float]:
        return self.xi_lo, self.xi_hi


@dataclass(frozen=True)
class DeltaShock:
    """Singular front: regular jump plus a point mass in b growing as
    strength_rate * t."""

    speed: float
    strength_rate: float
    left: State
    right: State

    def speed_range(self) -> tuple[float, float]:
        return self.speed, self.speed


@dataclass(frozen=True)
class CompositeJR:
    """Contact at x = 0 merged with the fan tail (vanishing left film)."""

    xi_hi: float
    left: State
    right: State

    def speed_range(self) -> tuple[float, float]:
        return 0.0, self.xi_hi


Wave = Union[Contact, Shock, Rarefaction, DeltaShock, CompositeJR]


@dataclass(frozen=True)
class WaveFan:
    """Ordered self-similar wave sequence solving one Riemann problem."""

    data: RiemannData
    waves: tuple[Wave, ...]
    intermediate: State | None


@dataclass(frozen=True)
class SampledValue:
    """Regular state on one ray plus the Dirac weight (per unit t) there."""

    regular: State
    singular_weight: float = 0.0


def _close(x: float, y: float, rtol: float = _TIE_RTOL) -> bool:
    return abs(x - y) <= rtol * max(abs(x), abs(y), 1.0)


def _same_ray(a: State, b: State) -> bool:
    return _close(a.b * b.h, b.b * a.h)


def classify(d: RiemannData) -> str:
    """Case tag of the Riemann data.

    Interior data are ordered by w1 = phi (equivalently by
    h*(3*alpha*b + kappa*h), which is 3*w1): rising w1 gives J+R,
    falling gives J+S, a tie gives a lone contact.  A vanishing left
    (right) thickness gives the composite (delta-shock) case.
    """
    if not d.assumption_holds():
        raise InvalidDataError(
            "at most one of h-, b-, h+, b+ may vanish; got "
            f"left={d.left}, right={d.right}"
        )
    tol = d.params.h_tol
    if d.left.h <= tol:
        return CASE_COMPOSITE
    if d.right.h <= tol:
        return CASE_DELTA
    w1l = phi(d.left, d.params)
    w1r = phi(d.right, d.params)
    if _close(w1l, w1r):
        return CASE_PURE_J
    return CASE_JR if w1l < w1r else CASE_JS


def intermediate_state(d: RiemannData) -> State:
    """State between the contact and the 2-wave for interior data.

    Unique solution of w1(m) = w1(left) together with m on the right
    state's ray:

        h* = sqrt(h- h+ (3a b- + k h-) / (3a b+ + k h+)),
        b* = b+ sqrt(h- (3a b- + k h-) / (h+ (3a b+ + k h+))).
    """
    tol = d.params.h_tol
    if d.left.h <= tol or d.right.h <= tol:
        raise WrongCaseError("intermediate state requires interior data")
    a, k = d.params.alpha, d.params.kappa
    a_minus = 3.0 * a * d.left.b + k * d.left.h
    a_plus = 3.0 * a * d.right.b + k * d.right.h
    h_star = math.sqrt(d.left.h * d.right.h * a_minus / a_plus)
    b_star = d.right.b * math.sqrt(d.left.h * a_minus / (d.right.h * a_plus))
    return State(h_star, b_star)


def contact_speed(left: State, p: Params) -> float:
    """Contact discontinuities move at lambda1 of either side."""
    return phi(left, p)


def shock_speed(left: State, right: State, p: Params) -> float:
    """2-shock speed for states on a common ray b/h = const.

    sigma = (h + h_l)(a b + k h / 3) + h_l (a b_l + k h_l / 3) with
    (h, b) the right state; satisfies both Rankine-Hugoniot equations
    exactly on the ray.  Admissibility (h < h_l) is the caller's
    concern; the degenerate h == h_l limit returns lambda2.
    """
    if not _same_ray(left, right):
        raise InvalidShockError(
            f"shock endpoints must share a ray: left={left}, right={right}"
        )
    a, k = p.alpha, p.kappa
    return (right.h + left.h) * (a * right.b + k * right.h / 3.0) + left.h * (
        a * left.b + k * left.h / 3.0
    )


def rarefaction_state(xi: float, anchor: State, p: Params) -> State:
    """State on the fan ray x/t = xi, anchored at the state closing the fan.

    h = sqrt(xi h+ / (3a b+ + k h+)) and b = b+ h / h+, which makes
    lambda2 of the returned state equal xi.
    """
    den = 3.0 * p.alpha * anchor.b + p.kappa * anchor.h
    _, lam2 = eigenvalues(anchor, p)
    slack = 1e-12 * max(1.0, lam2)
    if xi < -slack or xi > lam2 + slack:
        raise RangeError(f"xi={xi} outside fan range [0, {lam2}]")
    xi = min(max(xi, 0.0), lam2)
    h = math.sqrt(xi * anchor.h / den)
    return State(h, anchor.b * h / anchor.h)


def delta_shock(d: RiemannData) -> DeltaShock:
    """Singular front for a vanishing right thickness.

    Speed sigma = lambda1(left) and point-mass growth rate b+ * sigma
    follow from the generalized jump conditions.  Overcompressibility
    0 = lambda1(right) < sigma < lambda2(left) requires a genuinely
    moving left state.
    """
    tol = d.params.h_tol
    if d.right.h > tol:
        raise WrongCaseError("delta shock requires a vanishing right thickness")
    if d.left.h <= tol:
        raise WrongCaseError("delta shock requires an interior left state")
    speed = phi(d.left, d.params)
    if speed <= 0.0:
        raise NotADeltaError("overcompressibility fails: lambda1(left) must be > 0")
    return DeltaShock(
        speed=speed,
        strength_rate=d.right.b * speed,
        left=d.left,
        right=d.right,
    )


def _states_equal(a: State, b: State) -> bool:
    return _close(a.h, b.h) and _close(a.b, b.b)


def solve(d: RiemannData) -> WaveFan:
    """Construct the unique self-similar solution of the Riemann problem."""
    case = classify(d)
    p = d.params
    left, right = d.left, d.right

    if case == CASE_PURE_J:
        if _states_equal(left, right):
            return WaveFan(d, (), None)
        return WaveFan(d, (Contact(contact_speed(left, p), left, right),), None)

    if case == CASE_COMPOSITE:
        _, lam2r = eigenvalues(right, p)
        return WaveFan(d, (CompositeJR(lam2r, left, right),), None)

    if case == CASE_DELTA:
        return WaveFan(d, (delta_shock(d),), None)

    m = intermediate_state(d)
    waves: list[Wave] = []
    if not _states_equal(left, m):
        waves.append(Contact(contact_speed(left, p), left, m))

    if case == CASE_JR:
        _, xi_lo = eigenvalues(m, p)
        _, xi_hi = eigenvalues(right, p)
        waves.append(Rarefaction(xi_lo, xi_hi, left=m, right=right, anchor=right))
    else:
        sigma = shock_speed(m, right, p)
        lam2_m = eigenvalues(m, p)[1]
        lam2_r = eigenvalues(right, p)[1]
        if not (lam2_r < sigma < lam2_m and phi(m, p) < sigma):
            raise InvalidShockError(
                f"constructed shock violates admissibility: sigma={sigma}"
            )
        waves.append(Shock(sigma, m, right))
    return WaveFan(d, tuple(waves), m)


def sample(fan: WaveFan, xi: float) -> SampledValue:
    """Value of the self-similar solution on the ray x/t = xi.

    Discontinuity rays use the right-closed convention: exactly on a
    jump the right state is reported, and exactly on the singular ray
    the right state comes with the point-mass rate in b.
    """
    p = fan.data.params
    state = fan.data.left
    for w in fan.waves:
        if isinstance(w, Rarefaction):
            if xi < w.xi_lo:
                return SampledValue(state)
            if xi <= w.xi_hi:
                return SampledValue(rarefaction_state(xi, w.anchor, p))
            state = w.right
        elif isinstance(w, CompositeJR):
            if xi < 0.0:
                return SampledValue(state)
            if xi <= w.xi_hi:
                return SampledValue(rarefaction_state(xi, w.right, p))
            state = w.right
        elif isinstance(w, DeltaShock):
            if xi < w.speed:
                return SampledValue(state)
            if xi == w.speed:
                return SampledValue(w.right, singular_weight=w.strength_rate)
            state = w.right
        else:
            if xi < w.speed:
                return SampledValue(state)
            state = w.right
    return SampledValue(state)


def profile(
    fan: WaveFan, t: float, xs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, list[tuple[float, float]]]:
    """Regular (h, b) arrays at time t plus [(x, mass)] for point masses."""
    hs = np.empty_like(xs, dtype=float)
    bs = np.empty_like(xs, dtype=float)
    for i, x in enumerate(np.asarray(xs, dtype=float)):
        v = sample(fan, x / t)
        hs[i] = v.regular.h
        bs[i] = v.regular.b
    deltas = [
        (w.speed * t, w.strength_rate * t)
        for w in fan.waves
        if isinstance(w, DeltaShock)
    ]
    return hs, bs, deltas


def rankine_hugoniot_residual(w: Shock, p: Params) -> np.ndarray:
    """sigma*(uR - uL) - (F(uR) - F(uL)); zero for a true shock."""
    du = w.right.as_array() - w.left.as_array()
    df = flux(w.right, p) - flux(w.left, p)
    return w.speed * du - df


def generalized_rh_residual(w: DeltaShock, p: Params) -> tuple[float, float]:
    """Residuals of the generalized jump conditions of a singular front.

    First component: sigma*[h] - [h*phi] (the front carries no point
    mass in h).  Second: d(beta)/dt - (sigma*[b] - [b*phi]).
    """
    jump_h = w.right.h - w.left.h
    jump_hf = w.right.h * phi(w.right, p) - w.left.h * phi(w.left, p)
    res_h = w.speed * jump_h - jump_hf
    jump_b = w.right.b - w.left.b
    jump_bf = w.right.b * phi(w.right, p) - w.left.b * phi(w.left, p)
    res_beta = w.strength_rate - (w.speed * jump_b - jump_bf)
    return res_h, res_beta


class BumpTestFunction:
    """C-infinity bump supported on a box in the (x, t) half plane.

    Product of two mollifier profiles g(s) = exp(1 - 1/(1 - s^2)) for
    |s| < 1 (and 0 outside), centered at (x_center, t_center) with the
    given radii.  Analytic first derivatives are provided for weak-form
    quadrature.
    """

    def __init__(
        self, x_center: float, t_center: float, x_radius: float, t_radius: float
    ):
        if t_center - t_radius <= 0.0:
            raise ValueError("test function must be supported in t > 0")
        if x_radius <= 0.0 or t_radius <= 0.0:
            raise ValueError("radii must be positive")
        self.x_center = x_center
        self.t_center = t_center
        self.x_radius = x_radius
        self.t_radius = t_radius

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (
            self.x_center - self.x_radius,
            self.x_center + self.x_radius,
            self.t_center - self.t_radius,
            self.t_center + self.t_radius,
        )

    @staticmethod
    def _g(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        si = s[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - si * si))
        return out

    @staticmethod
    def _dg(s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        si = s[inside]
        gi = np.exp(1.0 - 1.0 / (1.0 - si * si))
        out[inside] = gi * (-2.0 * si / (1.0 - si * si) ** 2)
        return out

    def value(self, x, t):
        sx = (np.asarray(x, dtype=float) - self.x_center) / self.x_radius
        st = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        return self._g(sx) * self._g(st)

    def dx(self, x, t):
        sx = (np.asarray(x, dtype=float) - self.x_center) / self.x_radius
        st = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        return self._dg(sx) * self._g(st) / self.x_radius

    def dt(self, x, t):
        sx = (np.asarray(x, dtype=float) - self.x_center) / self.x_radius
        st = (np.asarray(t, dtype=float) - self.t_center) / self.t_radius
        return self._g(sx) * self._dg(st) / self.t_radius


def _wave_edges(fan: WaveFan) -> list[float]:
    edges: list[float] = []
    for w in fan.waves:
        lo, hi = w.speed_range()
        edges.append(lo)
        if hi != lo:
            edges.append(hi)
    return edges


def _segment_values(fan: WaveFan, xis: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(h, b) arrays for rays that all lie inside one smooth region."""
    p = fan.data.params
    mid = sample(fan, float(xis[len(xis) // 2]))
    for w in fan.waves:
        if isinstance(w, (Rarefaction, CompositeJR)):
            lo, hi = w.speed_range()
            if lo < xis[0] and xis[-1] < hi:
                anchor = w.anchor if isinstance(w, Rarefaction) else w.right
                den = 3.0 * p.alpha * anchor.b + p.kappa * anchor.h
                h = np.sqrt(np.clip(xis, 0.0, None) * anchor.h / den)
                return h, anchor.b * h / anchor.h
    h = np.full_like(xis, mid.regular.h)
    b = np.full_like(xis, mid.regular.b)
    return h, b


def weak_residual(
    fan: WaveFan,
    testfn: BumpTestFunction,
    resolution: int = 32,
    include_singular: bool = True,
) -> tuple[float, float]:
    """Weak-form residual of both equations against one test function.

    Computes int int (u_i phi_t + F_i(u) phi_x) dx dt with the x
    integral split at wave rays (composite Gauss-Legendre on each
    smooth piece), plus the singular pairing along any delta-shock
    support curve, int beta(t) d/dt[phi(sigma t, t)] dt.  Parametrizing
    the support by t makes the arc-length factor of the curve measure
    cancel against the arc-length density, leaving the slice weight
    beta(t) that the jump conditions define.  Both residuals vanish
    under refinement of ``resolution`` for a valid fan;
    ``include_singular=False`` is the negative control.
    """
    p = fan.data.params
    x0, x1, t0, t1 = testfn.box
    t0 = max(t0, 1e-12)
    edges = _wave_edges(fan)

    gt_nodes, gt_wts = np.polynomial.legendre.leggauss(6)
    gx_nodes, gx_wts = np.polynomial.legendre.leggauss(8)
    x_target = (x1 - x0) / max(resolution, 4)

    res = np.zeros(2)
    t_panels = np.linspace(t0, t1, resolution + 1)
    for ta, tb in zip(t_panels[:-1], t_panels[1:]):
        tm, th = 0.5 * (ta + tb), 0.5 * (tb - ta)
        for tn, tw in zip(gt_nodes, gt_wts):
            t = tm + th * tn
            breaks = sorted({x0, x1, *(s * t for s in edges if x0 < s * t < x1)})
            for xa, xb in zip(breaks[:-1], breaks[1:]):
                n_sub = max(1, int(math.ceil((xb - xa) / x_target)))
                sub = np.linspace(xa, xb, n_sub + 1)
                xm = 0.5 * (sub[:-1] + sub[1:])
                xh = 0.5 * (sub[1] - sub[0])
                xs = (xm[:, None] + xh * gx_nodes[None, :]).ravel()
                wts = np.tile(xh * gx_wts, n_sub)
                h, b = _segment_values(fan, xs / t)
                f1 = h * (p.alpha * h * b + p.kappa * h * h / 3.0)
                f2 = b * (p.alpha * h * b + p.kappa * h * h / 3.0)
                phit = testfn.dt(xs, t)
                phix = testfn.dx(xs, t)
                res[0] += tw * th * float(np.dot(wts, h * phit + f1 * phix))
                res[1] += tw * th * float(np.dot(wts, b * phit + f2 * phix))

    if include_singular:
        for w in fan.waves:
            if not isinstance(w, DeltaShock):
                continue
            sigma, rate = w.speed, w.strength_rate
            for ta, tb in zip(t_panels[:-1], t_panels[1:]):
                tm, th = 0.5 * (ta + tb), 0.5 * (tb - ta)
                ts = tm + th * gt_nodes
                xs = sigma * ts
                vals = rate * ts * (testfn.dt(xs, ts) + sigma * testfn.dx(xs, ts))
                res[1] += th * float(np.dot(gt_wts, vals))

    return abs(float(res[0])), abs(float(res[1]))


_WAVE_TAGS = {
    Contact: "contact",
    Shock: "shock",
    Rarefaction: "rarefaction",
    DeltaShock: "delta-shock",
    CompositeJR: "composite-jr",
}


def _state_doc(u: State) -> dict:
    return {"h": u.h, "b": u.b}


def _state_from_doc(doc: dict) -> State:
    return State(doc["h"], doc["b"])


def fan_to_json(fan: WaveFan) -> dict:
    """JSON-ready document for a wave fan (round-trips exactly)."""
    waves = []
    for w in fan.waves:
        doc: dict = {"type": _WAVE_TAGS[type(w)]}
        if isinstance(w, (Contact, Shock)):
            doc.update(speed=w.speed)
        elif isinstance(w, Rarefaction):
            doc.update(xi_lo=w.xi_lo, xi_hi=w.xi_hi, anchor=_state_doc(w.anchor))
        elif isinstance(w, DeltaShock):
            doc.update(speed=w.speed, strength_rate=w.strength_rate)
        elif isinstance(w, CompositeJR):
            doc.update(xi_hi=w.xi_hi)
        doc["left"] = _state_doc(w.left)
        doc["right"] = _state_doc(w.right)
        waves.append(doc)
    return {
        "params": {
            "alpha": fan.data.params.alpha,
            "kappa": fan.data.params.kappa,
            "h_tol": fan.data.params.h_tol,
        },
        "left": _state_doc(fan.data.left),
        "right": _state_doc(fan.data.right),
        "case": classify(fan.data),
        "intermediate": None
        if fan.intermediate is None
        else _state_doc(fan.intermediate),
        "waves": waves,
    }


def fan_from_json(doc: dict) -> WaveFan:
    """Inverse of :func:`fan_to_json`."""
    p = Params(**doc["params"])
    data = RiemannData(_state_from_doc(doc["left"]), _state_from_doc(doc["right"]), p)
    waves: list[Wave] = []
    for wd in doc["waves"]:
        left = _state_from_doc(wd["left"])
        right = _state_from_doc(wd["right"])
        tag = wd["type"]
        if tag == "contact":
            waves.append(Contact(wd["speed"], left, right))
        elif tag == "shock":
            waves.append(Shock(wd["speed"], left, right))
        elif tag == "rarefaction":
            waves.append(
                Rarefaction(
                    wd["xi_lo"], wd["xi_hi"], left, right, _state_from_doc(wd["anchor"])
                )
            )
        elif tag == "delta-shock":
            waves.append(DeltaShock(wd["speed"], wd["strength_rate"], left, right))
        elif tag == "composite-jr":
            waves.append(CompositeJR(wd["xi_hi"], left, right))
        else:
            raise ValueError(f"unknown wave tag {tag!r}")
    inter = doc.get("intermediate")
    return WaveFan(
        data, tuple(waves), None if inter is None else _state_from_doc(inter)
    )

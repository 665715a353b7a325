"""Front tracking for the three-state perturbed Riemann problem.

The initial data carries two local Riemann problems at x = -epsilon and
x = +epsilon whose waves collide and reorganize.  Seven interaction
patterns are possible; the classical ones resolve in closed form
(collision points from line intersections, curved shocks through fans
from an explicit time law), the singular ones track the point mass of
the delta front through splits, absorptions and fan penetrations.  A
generic engine with discretized fans covers the two patterns whose
closed forms are omitted, and doubles as a cross-check for the rest.

Every tracked solution is represented by a list of fronts (straight or
curved, each carrying the state region to its right and, for singular
fronts, a running point-mass strength), which is enough to sample
profiles, measure distances to the unperturbed solution and serialize
timelines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import brentq

from .core import Params, State, eigenvalues, phi
from .errors import (
    EventBudgetError,
    InvalidDataError,
    NoInteractionError,
    UnreachableCaseError,
    UnsupportedCaseError,
    WrongCaseError,
)
from .riemann import (
    CASE_COMPOSITE,
    CASE_DELTA,
    CASE_JR,
    CASE_JS,
    CompositeJR,
    Contact,
    DeltaShock,
    Rarefaction,
    RiemannData,
    Shock,
    WaveFan,
    classify,
    fan_to_json,
    intermediate_state,
    rarefaction_state,
    shock_speed,
    solve,
)

__all__ = [
    "CASE_NUMBER",
    "PerturbedData",
    "Event",
    "DeltaContact",
    "CurvedWave",
    "Front",
    "ConstRegion",
    "FanRegion",
    "InteractionTimeline",
    "classify_case",
    "interact_shock_contact",
    "interact_shock_shock_chase",
    "shock_through_fan",
    "delta_contact_split",
    "shock_overtakes_delta",
    "delta_through_fan",
    "run_timeline",
    "epsilon_limit_report",
    "timeline_to_json",
]

CASE_NUMBER = {
    "JS+JS": 1,
    "JS+JR": 2,
    "JR+JR": 3,
    "JR+JS": 4,
    "dS+JR": 5,
    "JS+dS": 6,
    "JR+dS": 7,
}


@dataclass(frozen=True)
class PerturbedData:
    """Three-state data: middle state on (-epsilon, epsilon)."""

    epsilon: float
    left: State
    middle: State
    right: State
    params: Params

    def __post_init__(self) -> None:
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise InvalidDataError("epsilon must be positive")

    def left_data(self) -> RiemannData:
        return RiemannData(self.left, self.middle, self.params)

    def right_data(self) -> RiemannData:
        return RiemannData(self.middle, self.right, self.params)

    def outer_data(self) -> RiemannData:
        return RiemannData(self.left, self.right, self.params)


@dataclass(frozen=True)
class Event:
    """Wave collision: point, participating front ids, and the point-mass
    strength carried through the event (None for classical ones)."""

    point: tuple[float, float]
    incoming: tuple[int, ...]
    outgoing: tuple[int, ...]
    delta_strength: Optional[float] = None


@dataclass(frozen=True)
class DeltaContact:
    """Contact-speed front transporting a frozen point mass in b."""

    speed: float
    strength: float
    left: State
    right: State


@dataclass(frozen=True)
class ConstRegion:
    state: State


@dataclass(frozen=True)
class FanRegion:
    origin_x: float
    anchor: State


Region = Union[ConstRegion, FanRegion]


def _region_state(region: Region, x: float, t: float, p: Params) -> State:
    if isinstance(region, ConstRegion):
        return region.state
    lam2 = eigenvalues(region.anchor, p)[1]
    xi = min(max((x - region.origin_x) / t, 0.0), lam2)
    return rarefaction_state(xi, region.anchor, p)


@dataclass
class Front:
    """One tracked discontinuity with the region to its right.

    Straight fronts carry a speed; curved ones a position callable.
    Singular fronts (kind 'delta' or 'delta-contact') carry the running
    strength beta(t).
    """

    id: int
    kind: str
    t_birth: float
    x_birth: float
    right_region: Region
    speed: Optional[float] = None
    t_death: float = math.inf
    x_of_t: Optional[Callable[[float], float]] = None
    strength_of_t: Optional[Callable[[float], float]] = None
    fan_state_of_t: Optional[Callable[[float], State]] = None

    def position(self, t: float) -> float:
        if self.x_of_t is not None:
            return self.x_of_t(t)
        return self.x_birth + self.speed * (t - self.t_birth)

    def alive(self, t: float) -> bool:
        return self.t_birth <= t < self.t_death


@dataclass(frozen=True)
class CurvedWave:
    """Published view of a curved front inside a fan."""

    kind: str  # 'shock-in-fan' | 'delta-in-fan'
    t_start: float
    t_end: float
    x_of_t: Callable[[float], float]
    state_of_t: Callable[[float], State]
    strength_of_t: Optional[Callable[[float], float]] = None


@dataclass
class InteractionTimeline:
    """Resolved perturbed Riemann problem.

    ``final_fan`` is the self-similar pattern the solution settles into;
    for terminating cascades the surviving fronts reproduce it exactly
    (equal-speed parallel contacts collapse in the x/t view), for
    penetrations that never finish it is the asymptotic pattern.
    ``residual_delta_contact`` records the frozen point mass left behind
    by a delta split (vanishes with epsilon).
    """

    data: PerturbedData
    case_tag: str
    events: list[Event]
    fronts: list[Front]
    curves: list[CurvedWave]
    final_fan: WaveFan
    asymptotic: bool = False
    residual_delta_contact: Optional[DeltaContact] = None

    def alive_fronts(self, t: float) -> list[Front]:
        fronts = [f for f in self.fronts if f.alive(t)]
        fronts.sort(key=lambda f: f.position(t))
        return fronts

    def sample(self, x: float, t: float) -> State:
        fronts = self.alive_fronts(t)
        region: Region = ConstRegion(self.data.left)
        for f in fronts:
            if f.position(t) <= x:
                region = f.right_region
            else:
                break
        return _region_state(region, x, t, self.data.params)

    def profile(self, t: float, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        fronts = self.alive_fronts(t)
        positions = np.array([f.position(t) for f in fronts])
        regions = [ConstRegion(self.data.left)] + [f.right_region for f in fronts]
        idx = np.searchsorted(positions, xs, side="right")
        h = np.empty(len(xs))
        b = np.empty(len(xs))
        for i, (x, k) in enumerate(zip(xs, idx)):
            u = _region_state(regions[k], x, t, self.data.params)
            h[i] = u.h
            b[i] = u.b
        return h, b

    def point_masses(self, t: float) -> list[tuple[float, float]]:
        out = []
        for f in self.fronts:
            if f.alive(t) and f.strength_of_t is not None:
                out.append((f.position(t), f.strength_of_t(t)))
        return out

    @property
    def max_event_time(self) -> float:
        return max((e.point[1] for e in self.events), default=0.0)


def classify_case(d: PerturbedData) -> str:
    """Tag of the seven enumerated interaction patterns.

    A delta-delta configuration (both middle and right thickness
    vanishing) is impossible in the quadrant and reported as
    unreachable; a vanishing left state and tie (lone contact)
    sub-problems fall outside the enumerated list.
    """
    tol = d.params.h_tol
    if d.middle.h <= tol and d.right.h <= tol:
        raise UnreachableCaseError(
            "two singular fronts cannot coexist: both h_m and h+ vanish"
        )
    c_left = classify(d.left_data())
    c_right = classify(d.right_data())
    table = {
        (CASE_JS, CASE_JS): "JS+JS",
        (CASE_JS, CASE_JR): "JS+JR",
        (CASE_JR, CASE_JR): "JR+JR",
        (CASE_JR, CASE_JS): "JR+JS",
        (CASE_DELTA, CASE_COMPOSITE): "dS+JR",
        (CASE_JS, CASE_DELTA): "JS+dS",
        (CASE_JR, CASE_DELTA): "JR+dS",
    }
    tag = table.get((c_left, c_right))
    if tag is None:
        raise UnsupportedCaseError(
            f"pattern ({c_left}, {c_right}) is outside the enumerated interactions"
        )
    return tag


# ---------------------------------------------------------------------------
# closed-form two-front resolvers


def interact_shock_contact(
    s1: Shock, j2: Contact, epsilon: float, p: Params
) -> tuple[Event, tuple[Contact, Shock]]:
    """Shock from (-epsilon, 0) absorbs the contact from (+epsilon, 0).

    Collision at x1 + eps = sigma1*t1, x1 - eps = mu2*t1.  The emerging
    contact moves at lambda1 of the shock's left state (w1 transport),
    the emerging shock connects the refreshed intermediate state to the
    contact's right state.
    """
    sigma1, mu2 = s1.speed, j2.speed
    if sigma1 <= mu2:
        raise NoInteractionError("trailing shock is not faster than the contact")
    t1 = 2.0 * epsilon / (sigma1 - mu2)
    x1 = (sigma1 + mu2) * epsilon / (sigma1 - mu2)
    m3 = intermediate_state(RiemannData(s1.left, j2.right, p))
    j3 = Contact(phi(s1.left, p), s1.left, m3)
    s3 = Shock(shock_speed(m3, j2.right, p), m3, j2.right)
    return Event((x1, t1), (0, 1), (2, 3)), (j3, s3)


def interact_shock_shock_chase(
    s3: Shock,
    s2: Shock,
    start3: tuple[float, float],
    epsilon: float,
    p: Params,
) -> tuple[Event, Shock]:
    """Faster trailing shock (through ``start3``) absorbs the one from
    (+epsilon, 0); a single shock to the outer right state survives."""
    x1, t1 = start3
    if s3.speed <= s2.speed:
        raise NoInteractionError("trailing shock is not faster")
    t2 = (x1 - epsilon - s3.speed * t1) / (s2.speed - s3.speed)
    x2 = epsilon + s2.speed * t2
    s4 = Shock(shock_speed(s3.left, s2.right, p), s3.left, s2.right)
    return Event((x2, t2), (0, 1), (2,)), s4


def _ray_coefficient(anchor: State, p: Params) -> float:
    """c with lambda2 = 3*c*h^2 and w1 = c*h^2 along the anchor's ray."""
    return p.alpha * anchor.b / anchor.h + p.kappa / 3.0


def _penetration_g(h_left: float, h: float) -> float:
    return (h_left - h) ** 2 * (h_left + 2.0 * h)


def shock_through_fan(
    entry: tuple[float, float],
    fan: Rarefaction,
    chasing_left: State,
    p: Params,
    fan_origin_x: float,
) -> tuple[CurvedWave, Optional[tuple[float, float]], Optional[Shock]]:
    """Shock with constant left state penetrating a fan from its tail.

    Along the curve the fan-side value h(t) obeys
    t * (hL - h)^2 (hL + 2h) = const, entered at ``entry``; the position
    is x = fan_origin + lambda2(h) * t.  If the left state's h exceeds
    the fan head's the penetration completes at a finite exit point and
    a straight shock to the head state emerges; otherwise the curve
    steepens toward the left state's characteristic forever.
    """
    x_e, t_e = entry
    c = _ray_coefficient(fan.anchor, p)
    h_left = chasing_left.h
    xi_e = (x_e - fan_origin_x) / t_e
    h_entry = math.sqrt(max(xi_e, 0.0) / (3.0 * c))
    h_head = fan.right.h
    if h_entry >= h_left:
        raise WrongCaseError("chasing state must outrun the fan tail")
    K = t_e * _penetration_g(h_left, h_entry)
    w2 = fan.anchor.b / fan.anchor.h

    def h_of_t(t: float) -> float:
        if t <= t_e:
            return h_entry
        target = K / t
        hi = min(h_left, h_head)
        g_hi = _penetration_g(h_left, hi)
        if target <= g_hi:
            return hi
        return brentq(
            lambda hh: _penetration_g(h_left, hh) - target,
            h_entry,
            hi,
            xtol=1e-14,
            rtol=1e-14,
        )

    def x_of_t(t: float) -> float:
        h = h_of_t(t)
        return fan_origin_x + 3.0 * c * h * h * t

    def state_of_t(t: float) -> State:
        h = h_of_t(t)
        return State(h, w2 * h)

    completes = h_left > h_head
    if completes:
        t_exit = K / _penetration_g(h_left, h_head)
        x_exit = fan_origin_x + 3.0 * c * h_head * h_head * t_exit
        out_shock = Shock(shock_speed(chasing_left, fan.right, p), chasing_left, fan.right)
        curve = CurvedWave("shock-in-fan", t_e, t_exit, x_of_t, state_of_t)
        return curve, (x_exit, t_exit), out_shock
    curve = CurvedWave("shock-in-fan", t_e, math.inf, x_of_t, state_of_t)
    return curve, None, None


# ---------------------------------------------------------------------------
# timeline assembly helpers


class _Builder:
    def __init__(self) -> None:
        self.fronts: list[Front] = []
        self.events: list[Event] = []
        self._next_id = 0

    def add(self, **kwargs) -> Front:
        f = Front(id=self._next_id, **kwargs)
        self._next_id += 1
        self.fronts.append(f)
        return f

    def event(
        self,
        point: tuple[float, float],
        incoming: list[Front],
        outgoing: list[Front],
        delta_strength: float | None = None,
    ) -> Event:
        for f in incoming:
            f.t_death = point[1]
        e = Event(
            point,
            tuple(f.id for f in incoming),
            tuple(f.id for f in outgoing),
            delta_strength,
        )
        self.events.append(e)
        return e


def _sub_waves(d: RiemannData) -> tuple[Optional[Contact], object]:
    """(contact-or-None, principal 2-wave) of one sub-Riemann problem."""
    fan = solve(d)
    contact = None
    principal = None
    for w in fan.waves:
        if isinstance(w, Contact):
            contact = w
        else:
            principal = w
    return contact, principal


def _affine_strength(t0: float, beta0: float, rate: float) -> Callable[[float], float]:
    return lambda t: beta0 + rate * (t - t0)


def _trivial_timeline(d: PerturbedData, anchor_x: float, tag: str) -> InteractionTimeline:
    """Degenerate data (middle equals an outer state): no interactions."""
    fan = solve(d.outer_data())
    bld = _Builder()
    prev: Region = ConstRegion(d.left)
    for w in fan.waves:
        if isinstance(w, Rarefaction):
            bld.add(
                kind="fan-tail",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=w.xi_lo,
                right_region=FanRegion(anchor_x, w.anchor),
            )
            bld.add(
                kind="fan-head",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=w.xi_hi,
                right_region=ConstRegion(w.right),
            )
        elif isinstance(w, CompositeJR):
            bld.add(
                kind="contact",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=0.0,
                right_region=FanRegion(anchor_x, w.right),
            )
            bld.add(
                kind="fan-head",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=w.xi_hi,
                right_region=ConstRegion(w.right),
            )
        elif isinstance(w, DeltaShock):
            bld.add(
                kind="delta",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=w.speed,
                right_region=ConstRegion(w.right),
                strength_of_t=_affine_strength(0.0, 0.0, w.strength_rate),
            )
        else:
            bld.add(
                kind="contact" if isinstance(w, Contact) else "shock",
                t_birth=0.0,
                x_birth=anchor_x,
                speed=w.speed,
                right_region=ConstRegion(w.right),
            )
    return InteractionTimeline(d, tag, [], bld.fronts, [], fan)


def _resolve_js_js(d: PerturbedData) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    j1w, s1w = _sub_waves(d.left_data())
    j2w, s2w = _sub_waves(d.right_data())
    bld = _Builder()

    state_h1 = s1w.left
    if j1w is not None:
        bld.add(kind="contact", t_birth=0.0, x_birth=-eps, speed=j1w.speed,
                right_region=ConstRegion(j1w.right))
    s1 = bld.add(kind="shock", t_birth=0.0, x_birth=-eps, speed=s1w.speed,
                 right_region=ConstRegion(s1w.right))
    if j2w is not None:
        j2 = bld.add(kind="contact", t_birth=0.0, x_birth=eps, speed=j2w.speed,
                     right_region=ConstRegion(j2w.right))
    else:
        j2 = None
    s2 = bld.add(kind="shock", t_birth=0.0, x_birth=eps, speed=s2w.speed,
                 right_region=ConstRegion(s2w.right))

    if j2 is not None:
        ev1, (j3w, s3w) = interact_shock_contact(s1w, j2w, eps, p)
        x1, t1 = ev1.point
        j3 = bld.add(kind="contact", t_birth=t1, x_birth=x1, speed=j3w.speed,
                     right_region=ConstRegion(j3w.right))
        s3 = bld.add(kind="shock", t_birth=t1, x_birth=x1, speed=s3w.speed,
                     right_region=ConstRegion(s3w.right))
        bld.event((x1, t1), [s1, j2], [j3, s3])
    else:
        # middle already on the right ray: S1 chases S2 directly
        s3w, s3, (x1, t1) = s1w, s1, (-eps, 0.0)

    ev2, s4w = interact_shock_shock_chase(s3w, s2w, (x1, t1), eps, p)
    x2, t2 = ev2.point
    s4 = bld.add(kind="shock", t_birth=t2, x_birth=x2, speed=s4w.speed,
                 right_region=ConstRegion(s4w.right))
    bld.event((x2, t2), [s3, s2], [s4])

    return InteractionTimeline(
        d, "JS+JS", bld.events, bld.fronts, [], solve(d.outer_data())
    )


def _resolve_js_jr(d: PerturbedData) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    j1w, s1w = _sub_waves(d.left_data())
    j2w, r2w = _sub_waves(d.right_data())
    bld = _Builder()

    if j1w is not None:
        bld.add(kind="contact", t_birth=0.0, x_birth=-eps, speed=j1w.speed,
                right_region=ConstRegion(j1w.right))
    s1 = bld.add(kind="shock", t_birth=0.0, x_birth=-eps, speed=s1w.speed,
                 right_region=ConstRegion(s1w.right))
    if j2w is not None:
        j2 = bld.add(kind="contact", t_birth=0.0, x_birth=eps, speed=j2w.speed,
                     right_region=ConstRegion(j2w.right))
    else:
        j2 = None
    f_tail = bld.add(kind="fan-tail", t_birth=0.0, x_birth=eps, speed=r2w.xi_lo,
                     right_region=FanRegion(eps, r2w.anchor))
    f_head = bld.add(kind="fan-head", t_birth=0.0, x_birth=eps, speed=r2w.xi_hi,
                     right_region=ConstRegion(r2w.right))

    if j2 is not None:
        ev1, (j3w, s3w) = interact_shock_contact(s1w, j2w, eps, p)
        x1, t1 = ev1.point
        j3 = bld.add(kind="contact", t_birth=t1, x_birth=x1, speed=j3w.speed,
                     right_region=ConstRegion(j3w.right))
        s3 = bld.add(kind="shock", t_birth=t1, x_birth=x1, speed=s3w.speed,
                     right_region=ConstRegion(s3w.right))
        bld.event((x1, t1), [s1, j2], [j3, s3])
    else:
        s3w, s3, (x1, t1) = s1w, s1, (-eps, 0.0)

    # straight S3 reaches the fan tail
    xi2 = r2w.xi_lo
    t2 = (x1 - eps - s3w.speed * t1) / (xi2 - s3w.speed)
    x2 = eps + xi2 * t2
    curve, exit_point, s4w = shock_through_fan((x2, t2), r2w, s3w.left, p, eps)
    cfront = bld.add(kind="curved-shock", t_birth=t2, x_birth=x2,
                     right_region=FanRegion(eps, r2w.anchor), x_of_t=curve.x_of_t,
                     fan_state_of_t=curve.state_of_t)
    bld.event((x2, t2), [s3, f_tail], [cfront])

    asymptotic = exit_point is None
    if exit_point is not None:
        x3, t3 = exit_point
        cfront.t_death = t3
        s4 = bld.add(kind="shock", t_birth=t3, x_birth=x3, speed=s4w.speed,
                     right_region=ConstRegion(s4w.right))
        bld.event((x3, t3), [cfront, f_head], [s4])
        curve = replace(curve, t_end=t3)

    return InteractionTimeline(
        d, "JS+JR", bld.events, bld.fronts, [curve],
        solve(d.outer_data()), asymptotic=asymptotic,
    )


def delta_contact_split(
    d: PerturbedData,
) -> tuple[Event, tuple[DeltaContact, CurvedWave]]:
    """Split of the left delta front on the composite wave (vanishing h_m).

    The delta meets the stationary contact of the composite at
    (eps, 6 eps / (3 a h- b- + k h-^2)) carrying strength 2 b_m eps.
    Overcompressibility fails beyond, so the point mass freezes on a
    delta contact while a regular shock enters the fan from its tail.
    """
    if classify_case(d) != "dS+JR":
        raise WrongCaseError("data is not a delta / composite configuration")
    p = d.params
    eps = d.epsilon
    sigma1 = phi(d.left, p)
    t1 = 6.0 * eps / (3.0 * p.alpha * d.left.h * d.left.b + p.kappa * d.left.h**2)
    x1 = eps
    beta1 = 2.0 * d.middle.b * eps
    m_star = intermediate_state(d.outer_data())
    dj = DeltaContact(sigma1, beta1, d.left, m_star)
    _, comp = _sub_waves(d.right_data())
    fan_view = Rarefaction(0.0, comp.xi_hi, comp.left, comp.right, comp.right)
    curve, _, _ = shock_through_fan((x1, t1), fan_view, m_star, p, eps)
    ev = Event((x1, t1), (0, 1), (2, 3), delta_strength=beta1)
    return ev, (dj, curve)


def _resolve_ds_jr(d: PerturbedData) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    delta_w = solve(d.left_data()).waves[0]
    comp = solve(d.right_data()).waves[0]
    bld = _Builder()

    ds1 = bld.add(kind="delta", t_birth=0.0, x_birth=-eps, speed=delta_w.speed,
                  right_region=ConstRegion(delta_w.right),
                  strength_of_t=_affine_strength(0.0, 0.0, delta_w.strength_rate))
    j2 = bld.add(kind="contact", t_birth=0.0, x_birth=eps, speed=0.0,
                 right_region=FanRegion(eps, comp.right))
    f_head = bld.add(kind="fan-head", t_birth=0.0, x_birth=eps, speed=comp.xi_hi,
                     right_region=ConstRegion(comp.right))

    sigma1 = delta_w.speed
    t1 = 2.0 * eps / sigma1
    x1 = eps
    beta1 = 2.0 * d.middle.b * eps
    m_star = intermediate_state(d.outer_data())
    dj3 = bld.add(kind="delta-contact", t_birth=t1, x_birth=x1, speed=sigma1,
                  right_region=ConstRegion(m_star),
                  strength_of_t=lambda t: beta1)
    fan_view = Rarefaction(0.0, comp.xi_hi, comp.left, comp.right, comp.right)
    curve, exit_point, s4w = shock_through_fan((x1, t1), fan_view, m_star, p, eps)
    cfront = bld.add(kind="curved-shock", t_birth=t1, x_birth=x1,
                     right_region=FanRegion(eps, comp.right), x_of_t=curve.x_of_t,
                     fan_state_of_t=curve.state_of_t)
    bld.event((x1, t1), [ds1, j2], [dj3, cfront], delta_strength=beta1)

    asymptotic = exit_point is None
    if exit_point is not None:
        x3, t3 = exit_point
        cfront.t_death = t3
        s4 = bld.add(kind="shock", t_birth=t3, x_birth=x3, speed=s4w.speed,
                     right_region=ConstRegion(s4w.right))
        bld.event((x3, t3), [cfront, f_head], [s4])
        curve = replace(curve, t_end=t3)

    return InteractionTimeline(
        d, "dS+JR", bld.events, bld.fronts, [curve], solve(d.outer_data()),
        asymptotic=asymptotic,
        residual_delta_contact=DeltaContact(sigma1, beta1, d.left, m_star),
    )


def shock_overtakes_delta(
    s1w: Shock, ds2w: DeltaShock, d: PerturbedData
) -> tuple[Event, DeltaShock]:
    """Shock absorbs the slower delta front; the merged singular front
    moves at lambda1 of the outer left state, parallel to the leading
    contact, with the inherited strength growing at the unperturbed rate."""
    sigma1, sigma_d2 = s1w.speed, ds2w.speed
    if sigma1 <= sigma_d2:
        raise NoInteractionError("shock is not faster than the delta front")
    eps = d.epsilon
    t1 = 2.0 * eps / (sigma1 - sigma_d2)
    x1 = (sigma1 + sigma_d2) * eps / (sigma1 - sigma_d2)
    beta1 = ds2w.right.b * sigma_d2 * t1
    sigma_d3 = phi(s1w.left, d.params)
    ds3 = DeltaShock(sigma_d3, ds2w.right.b * sigma_d3, s1w.left, ds2w.right)
    return Event((x1, t1), (0, 1), (2,), delta_strength=beta1), ds3


def _resolve_js_ds(d: PerturbedData) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    j1w, s1w = _sub_waves(d.left_data())
    ds2w = solve(d.right_data()).waves[0]
    bld = _Builder()

    if j1w is not None:
        bld.add(kind="contact", t_birth=0.0, x_birth=-eps, speed=j1w.speed,
                right_region=ConstRegion(j1w.right))
    s1 = bld.add(kind="shock", t_birth=0.0, x_birth=-eps, speed=s1w.speed,
                 right_region=ConstRegion(s1w.right))
    ds2 = bld.add(kind="delta", t_birth=0.0, x_birth=eps, speed=ds2w.speed,
                  right_region=ConstRegion(ds2w.right),
                  strength_of_t=_affine_strength(0.0, 0.0, ds2w.strength_rate))

    ev, ds3w = shock_overtakes_delta(s1w, ds2w, d)
    (x1, t1) = ev.point
    ds3 = bld.add(kind="delta", t_birth=t1, x_birth=x1, speed=ds3w.speed,
                  right_region=ConstRegion(ds3w.right),
                  strength_of_t=_affine_strength(t1, ev.delta_strength, ds3w.speed * ds3w.right.b))
    bld.event((x1, t1), [s1, ds2], [ds3], delta_strength=ev.delta_strength)

    return InteractionTimeline(
        d, "JS+dS", bld.events, bld.fronts, [], solve(d.outer_data())
    )


def delta_through_fan(
    ds2w: DeltaShock, fan: Rarefaction, d: PerturbedData
) -> tuple[Event, CurvedWave, Event, DeltaShock]:
    """Delta front penetrating the left fan after its head catches up.

    Inside the fan the support solves dx/dt = (x + eps)/(3t), a cube
    root law; the strength follows by integrating the swept right-state
    mass.  The penetration always completes (the fan tail is slower),
    after which the front runs parallel to the leading contact.
    """
    p = d.params
    eps = d.epsilon
    w1_m = phi(d.middle, p)
    w1_l = phi(d.left, p)
    b_plus = ds2w.right.b
    lam2_m = 3.0 * w1_m
    t1 = 3.0 * eps / lam2_m
    x1 = 2.0 * eps
    beta1 = b_plus * ds2w.speed * t1  # equals b_plus * eps
    A = (9.0 * eps * eps * lam2_m) ** (1.0 / 3.0)

    def x_of_t(t: float) -> float:
        return A * t ** (1.0 / 3.0) - eps

    def strength_of_t(t: float) -> float:
        return b_plus * A * (t ** (1.0 / 3.0) - t1 ** (1.0 / 3.0)) + beta1

    c = _ray_coefficient(fan.anchor, p)

    def state_of_t(t: float) -> State:
        xi = (x_of_t(t) + eps) / t
        h = math.sqrt(xi / (3.0 * c))
        return State(h, fan.anchor.b / fan.anchor.h * h)

    t2 = eps * math.sqrt(w1_m) / w1_l**1.5
    x2 = 3.0 * w1_l * t2 - eps
    curve = CurvedWave("delta-in-fan", t1, t2, x_of_t, state_of_t, strength_of_t)
    ds4 = DeltaShock(w1_l, b_plus * w1_l, fan.left, ds2w.right)
    ev1 = Event((x1, t1), (0, 1), (2,), delta_strength=beta1)
    ev2 = Event((x2, t2), (2,), (3,), delta_strength=strength_of_t(t2))
    return ev1, curve, ev2, ds4


def _resolve_jr_ds(d: PerturbedData) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    j1w, r1w = _sub_waves(d.left_data())
    ds2w = solve(d.right_data()).waves[0]
    bld = _Builder()

    if j1w is not None:
        bld.add(kind="contact", t_birth=0.0, x_birth=-eps, speed=j1w.speed,
                right_region=ConstRegion(j1w.right))
    f_tail = bld.add(kind="fan-tail", t_birth=0.0, x_birth=-eps, speed=r1w.xi_lo,
                     right_region=FanRegion(-eps, r1w.anchor))
    f_head = bld.add(kind="fan-head", t_birth=0.0, x_birth=-eps, speed=r1w.xi_hi,
                     right_region=ConstRegion(r1w.right))
    ds2 = bld.add(kind="delta", t_birth=0.0, x_birth=eps, speed=ds2w.speed,
                  right_region=ConstRegion(ds2w.right),
                  strength_of_t=_affine_strength(0.0, 0.0, ds2w.strength_rate))

    ev1, curve, ev2, ds4w = delta_through_fan(ds2w, r1w, d)
    (x1, t1) = ev1.point
    cfront = bld.add(kind="curved-delta", t_birth=t1, x_birth=x1,
                     right_region=ConstRegion(ds2w.right), x_of_t=curve.x_of_t,
                     strength_of_t=curve.strength_of_t,
                     fan_state_of_t=curve.state_of_t)
    bld.event((x1, t1), [f_head, ds2], [cfront], delta_strength=ev1.delta_strength)

    (x2, t2) = ev2.point
    cfront.t_death = t2
    ds4 = bld.add(kind="delta", t_birth=t2, x_birth=x2, speed=ds4w.speed,
                  right_region=ConstRegion(ds4w.right),
                  strength_of_t=_affine_strength(t2, ev2.delta_strength, ds4w.strength_rate))
    bld.event((x2, t2), [cfront, f_tail], [ds4], delta_strength=ev2.delta_strength)

    return InteractionTimeline(
        d, "JR+dS", bld.events, bld.fronts, [curve], solve(d.outer_data())
    )


# ---------------------------------------------------------------------------
# generic engine (discretized fans)


@dataclass
class _EFront:
    id: int
    x0: float
    t0: float
    speed: float
    left: State
    right: State
    kind: str
    alive: bool = True

    def pos(self, t: float) -> float:
        return self.x0 + self.speed * (t - self.t0)


def _discretize_fan(w: Rarefaction, p: Params, dw1_target: float) -> list[tuple[float, State, State]]:
    """Fan as expansion shocklets with roughly equal w1 jumps."""
    w1_lo = phi(w.left, p)
    w1_hi = phi(w.right, p)
    n = max(1, int(math.ceil((w1_hi - w1_lo) / dw1_target)))
    c = _ray_coefficient(w.anchor, p)
    w2 = w.anchor.b / w.anchor.h
    w1s = np.linspace(w1_lo, w1_hi, n + 1)
    states = [State(math.sqrt(v / c), w2 * math.sqrt(v / c)) for v in w1s]
    out = []
    for a, bst in zip(states[:-1], states[1:]):
        out.append((shock_speed(a, bst, p), a, bst))
    return out


def _generic_timeline(
    d: PerturbedData, tag: str, n_fan: int, budget: float, t_max: float
) -> InteractionTimeline:
    p = d.params
    eps = d.epsilon
    fans = [(-eps, solve(d.left_data())), (eps, solve(d.right_data()))]
    span = 0.0
    for _, fan in fans:
        for w in fan.waves:
            if isinstance(w, Rarefaction):
                span = max(span, phi(w.right, p) - phi(w.left, p))
    dw1_target = span / n_fan if span > 0.0 else math.inf

    fronts: list[_EFront] = []
    next_id = 0

    def push(x0, t0, speed, left, right, kind) -> _EFront:
        nonlocal next_id
        f = _EFront(next_id, x0, t0, speed, left, right, kind)
        next_id += 1
        fronts.append(f)
        return f

    def push_wave(w, x0, t0):
        if isinstance(w, Rarefaction):
            for s, a, bst in _discretize_fan(w, p, dw1_target):
                push(x0, t0, s, a, bst, "fan-shock")
        elif isinstance(w, (Contact, Shock)):
            push(x0, t0, w.speed, w.left, w.right, "contact" if isinstance(w, Contact) else "shock")
        else:
            raise UnsupportedCaseError("generic engine handles classical waves only")

    for x0, fan in fans:
        for w in fan.waves:
            push_wave(w, x0, 0.0)

    tracks: list[Front] = []
    events: list[Event] = []
    id_map: dict[int, Front] = {}

    def track_of(f: _EFront, t_birth: float) -> Front:
        fr = Front(id=f.id, kind=f.kind, t_birth=t_birth, x_birth=f.pos(t_birth),
                   right_region=ConstRegion(f.right), speed=f.speed)
        id_map[f.id] = fr
        tracks.append(fr)
        return fr

    for f in fronts:
        track_of(f, 0.0)

    t_now = 0.0
    n_events = 0
    tol = 1e-12
    while True:
        live = [f for f in fronts if f.alive]
        live.sort(key=lambda f: (f.pos(max(t_now, f.t0)), f.speed))
        best = None
        for a, b in zip(live[:-1], live[1:]):
            if a.speed <= b.speed + tol:
                continue
            t_star = (b.x0 - b.speed * b.t0 - a.x0 + a.speed * a.t0) / (a.speed - b.speed)
            if t_star <= max(a.t0, b.t0) + tol:
                continue
            x_star = a.pos(t_star)
            if best is None or (t_star, x_star) < best[0]:
                best = ((t_star, x_star), a, b)
        if best is None or best[0][0] > t_max:
            break
        (t_star, x_star), fa, fb = best
        group = [f for f in live if abs(f.pos(t_star) - x_star) <= 1e-9 * max(1.0, abs(x_star)) + 1e-12]
        group.sort(key=lambda f: -f.speed)
        left_state = group[0].left
        right_state = group[-1].right
        for f in group:
            f.alive = False
            id_map[f.id].t_death = t_star
        local = solve(RiemannData(left_state, right_state, p))
        new_fronts_start = len(fronts)
        for w in local.waves:
            if isinstance(w, Rarefaction):
                for s, a2, b2 in _discretize_fan(w, p, dw1_target):
                    push(x_star, t_star, s, a2, b2, "fan-shock")
            elif isinstance(w, (Contact, Shock)):
                push(x_star, t_star, w.speed, w.left, w.right,
                     "contact" if isinstance(w, Contact) else "shock")
            else:
                raise UnsupportedCaseError("generic engine met a singular wave")
        new = fronts[new_fronts_start:]
        for f in new:
            track_of(f, t_star)
        events.append(
            Event((x_star, t_star), tuple(f.id for f in group), tuple(f.id for f in new))
        )
        t_now = t_star
        n_events += 1
        if n_events > budget:
            raise EventBudgetError(f"interaction cascade exceeded {budget} events")

    return InteractionTimeline(d, tag, events, tracks, [], solve(d.outer_data()))


def run_timeline(
    d: PerturbedData,
    t_max: float = math.inf,
    n_fan: int = 64,
    budget: int = 10000,
    force_generic: bool = False,
) -> InteractionTimeline:
    """Resolve the perturbed Riemann problem into an event timeline.

    Closed-form resolvers cover the shock/contact cascades and all
    singular interactions; fan-fan patterns (and anything classical when
    ``force_generic`` is set) run through the discretized-fan engine
    with ``n_fan`` shocklets per initial fan.
    """
    p = d.params
    tol = p.h_tol

    def same(a: State, b: State) -> bool:
        return abs(a.h - b.h) <= tol * max(1.0, a.h) and abs(a.b - b.b) <= tol * max(1.0, a.b)

    if same(d.left, d.middle):
        return _trivial_timeline(d, d.epsilon, "degenerate")
    if same(d.middle, d.right):
        return _trivial_timeline(d, -d.epsilon, "degenerate")

    tag = classify_case(d)
    if force_generic:
        if "dS" in tag:
            raise UnsupportedCaseError("generic engine cannot track singular fronts")
        return _generic_timeline(d, tag, n_fan, budget, t_max)
    if tag == "JS+JS":
        return _resolve_js_js(d)
    if tag == "JS+JR":
        return _resolve_js_jr(d)
    if tag == "dS+JR":
        return _resolve_ds_jr(d)
    if tag == "JS+dS":
        return _resolve_js_ds(d)
    if tag == "JR+dS":
        return _resolve_jr_ds(d)
    return _generic_timeline(d, tag, n_fan, budget, t_max)


def epsilon_limit_report(
    d: PerturbedData,
    epsilons: list[float],
    t_eval: float = 1.0,
    n_samples: int = 4000,
    **timeline_kwargs,
) -> list[dict]:
    """Convergence table of the perturbed solution toward the unperturbed one.

    For each epsilon (strictly decreasing positive values): the latest
    event time, the L1 distance of the regular parts at ``t_eval``
    against the exact outer Riemann fan, and the mismatch of the
    singular front's growth rate if one is present.
    """
    if len(epsilons) < 2 or any(e <= 0 for e in epsilons):
        raise InvalidDataError("need at least two positive epsilon values")
    if any(b >= a for a, b in zip(epsilons[:-1], epsilons[1:])):
        raise InvalidDataError("epsilon values must be strictly decreasing")

    from .riemann import profile as fan_profile

    target = solve(d.outer_data())
    speeds = [s for w in target.waves for s in w.speed_range()] or [0.0]
    eps0 = max(epsilons)
    x_lo = min(0.0, min(speeds) * t_eval) - 4.0 * eps0 - 0.5
    x_hi = max(0.0, max(speeds) * t_eval) + 4.0 * eps0 + 0.5
    xs = np.linspace(x_lo, x_hi, n_samples)
    h_ref, b_ref, deltas_ref = fan_profile(target, t_eval, xs)
    rate_ref = sum(w.strength_rate for w in target.waves if isinstance(w, DeltaShock))

    rows = []
    for eps in epsilons:
        tl = run_timeline(replace(d, epsilon=eps), **timeline_kwargs)
        h, b = tl.profile(t_eval, xs)
        dx = xs[1] - xs[0]
        l1 = float(np.sum(np.abs(h - h_ref) + np.abs(b - b_ref)) * dx)
        masses = tl.point_masses(t_eval)
        rate = 0.0
        for f in tl.fronts:
            if f.alive(t_eval) and f.kind == "delta" and f.strength_of_t is not None:
                rate += (f.strength_of_t(t_eval + 0.5) - f.strength_of_t(t_eval)) / 0.5
        rows.append(
            {
                "epsilon": eps,
                "case": tl.case_tag,
                "max_event_time": tl.max_event_time,
                "l1": l1,
                "delta_rate_err": abs(rate - rate_ref),
                "delta_strength_err": abs(
                    sum(m for _, m in masses) - rate_ref * t_eval
                )
                if rate_ref
                else 0.0,
            }
        )
    return rows


def _front_doc(f: Front, n_curve_samples: int) -> dict:
    doc = {
        "id": f.id,
        "kind": f.kind,
        "t_birth": f.t_birth,
        "t_death": None if math.isinf(f.t_death) else f.t_death,
        "x_birth": f.x_birth,
    }
    if f.x_of_t is None:
        doc["speed"] = f.speed
    else:
        t_hi = f.t_death if math.isfinite(f.t_death) else f.t_birth * 8.0 + 1.0
        ts = np.linspace(f.t_birth, t_hi, n_curve_samples)
        doc["curve"] = [[float(t), float(f.x_of_t(t))] for t in ts]
    if f.strength_of_t is not None:
        t_probe = f.t_birth + 1.0
        doc["strength_at_birth"] = float(f.strength_of_t(f.t_birth))
        doc["strength_probe"] = [t_probe, float(f.strength_of_t(t_probe))]
    return doc


def timeline_to_json(tl: InteractionTimeline, n_curve_samples: int = 33) -> dict:
    """JSON-ready timeline document (events, fronts, curves, final fan)."""
    return {
        "epsilon": tl.data.epsilon,
        "left": {"h": tl.data.left.h, "b": tl.data.left.b},
        "middle": {"h": tl.data.middle.h, "b": tl.data.middle.b},
        "right": {"h": tl.data.right.h, "b": tl.data.right.b},
        "params": {
            "alpha": tl.data.params.alpha,
            "kappa": tl.data.params.kappa,
            "h_tol": tl.data.params.h_tol,
        },
        "case": tl.case_tag,
        "asymptotic": tl.asymptotic,
        "events": [
            {
                "x": e.point[0],
                "t": e.point[1],
                "incoming": list(e.incoming),
                "outgoing": list(e.outgoing),
                "delta_strength": e.delta_strength,
            }
            for e in tl.events
        ],
        "fronts": [_front_doc(f, n_curve_samples) for f in tl.fronts],
        "residual_delta_contact": None
        if tl.residual_delta_contact is None
        else {
            "speed": tl.residual_delta_contact.speed,
            "strength": tl.residual_delta_contact.strength,
        },
        "final_fan": fan_to_json(tl.final_fan),
    }

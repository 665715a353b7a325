"""Vanishing-gravity and vanishing-surface-tension studies.

Sending kappa to 0 at alpha = 1/2 recovers the surface-tension-only
film model; sending alpha to 0 at kappa = 1 recovers the triangular
system with thickness flux h^3/3.  Both limits act affinely on every
closed form (intermediate state, speeds, singular strength), so the
limit solution is simply the exact solver evaluated at the limiting
parameters, and convergence is measured in L1 for classical fans and
through singular-front mismatches plus weak pairings against bump test
functions when a point mass is present.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Params
from .errors import InvalidDataError
from .riemann import (
    CASE_DELTA,
    BumpTestFunction,
    DeltaShock,
    RiemannData,
    WaveFan,
    classify,
    profile,
    solve,
    _segment_values,
    _wave_edges,
)

__all__ = [
    "LimitStudy",
    "study_params",
    "limit_target",
    "weak_pairing",
    "bump_catalog",
    "convergence_table",
]


@dataclass(frozen=True)
class LimitStudy:
    """One vanishing-parameter study.

    ``varying`` names the coefficient sent to zero through ``values``
    (strictly decreasing, positive); ``fixed_param`` is the value of
    the other coefficient.  The parameter field of ``data`` is
    overridden per value.
    """

    varying: str
    values: tuple[float, ...]
    fixed_param: float
    data: RiemannData
    t_eval: float = 1.0

    def __post_init__(self) -> None:
        if self.varying not in ("kappa", "alpha"):
            raise ValueError("varying must be 'kappa' or 'alpha'")
        if len(self.values) < 1 or any(v <= 0.0 for v in self.values):
            raise InvalidDataError("values must be positive")
        if any(b >= a for a, b in zip(self.values[:-1], self.values[1:])):
            raise InvalidDataError("values must decrease strictly toward 0")


def study_params(study: LimitStudy, value: float) -> Params:
    base = study.data.params
    if study.varying == "kappa":
        return Params(study.fixed_param, value, h_tol=base.h_tol)
    return Params(value, study.fixed_param, h_tol=base.h_tol)


def limit_target(d: RiemannData, which: str) -> WaveFan:
    """Exact fan of the limit system (vanishing coefficient set to zero)."""
    if which == "kappa":
        p0 = Params(d.params.alpha, 0.0, h_tol=d.params.h_tol)
    elif which == "alpha":
        p0 = Params(0.0, d.params.kappa, h_tol=d.params.h_tol)
    else:
        raise ValueError("which must be 'kappa' or 'alpha'")
    return solve(RiemannData(d.left, d.right, p0))


def weak_pairing(
    fan_a: WaveFan,
    fan_b: WaveFan,
    testfn: BumpTestFunction,
    resolution: int = 24,
) -> tuple[float, float]:
    """<U_a - U_b, phi> componentwise, including singular parts.

    Regular parts are integrated with the same wave-aware composite
    quadrature as the weak-form residual; each singular front adds its
    line pairing int beta(t) phi(sigma t, t) dt.
    """
    x0, x1, t0, t1 = testfn.box
    t0 = max(t0, 1e-12)
    edges = sorted(set(_wave_edges(fan_a)) | set(_wave_edges(fan_b)))
    gt_nodes, gt_wts = np.polynomial.legendre.leggauss(6)
    gx_nodes, gx_wts = np.polynomial.legendre.leggauss(8)
    x_target = (x1 - x0) / max(resolution, 4)

    acc = np.zeros(2)
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
                ha, ba = _segment_values(fan_a, xs / t)
                hb, bb = _segment_values(fan_b, xs / t)
                vals = testfn.value(xs, t)
                acc[0] += tw * th * float(np.dot(wts, (ha - hb) * vals))
                acc[1] += tw * th * float(np.dot(wts, (ba - bb) * vals))

    for fan, sign in ((fan_a, 1.0), (fan_b, -1.0)):
        for w in fan.waves:
            if not isinstance(w, DeltaShock):
                continue
            for ta, tb in zip(t_panels[:-1], t_panels[1:]):
                tm, th = 0.5 * (ta + tb), 0.5 * (tb - ta)
                ts = tm + th * gt_nodes
                vals = w.strength_rate * ts * testfn.value(w.speed * ts, ts)
                acc[1] += sign * th * float(np.dot(gt_wts, vals))

    return float(acc[0]), float(acc[1])


def bump_catalog(sigma_ray: float, t_eval: float) -> list[BumpTestFunction]:
    """Three bumps: straddling, missing, and containing the singular ray."""
    t_mid = 0.6 * t_eval
    x_ray = sigma_ray * t_mid
    width = max(1.0, abs(x_ray))
    return [
        BumpTestFunction(x_ray, t_mid, 0.5 * width, 0.35 * t_eval),
        BumpTestFunction(x_ray - 4.0 * width, t_mid, 0.5 * width, 0.35 * t_eval),
        BumpTestFunction(x_ray, t_mid, 4.0 * width, 0.35 * t_eval),
    ]


def convergence_table(
    study: LimitStudy, n_samples: int = 10000, workers: int = 1
) -> list[dict]:
    """Distance columns per parameter value, all shrinking toward 0.

    Classical cases: L1 distance of the sampled profiles at t_eval.
    Singular cases: speed and strength-rate mismatches of the fronts
    plus weak pairings against the three-bump catalog (L1 of the
    regular parts is reported as well).  Values are independent, so
    ``workers`` > 1 evaluates them concurrently (same ordering).
    """
    d0 = study.data
    target = limit_target(
        RiemannData(d0.left, d0.right, study_params(study, study.values[0])),
        study.varying,
    )
    speeds = [s for w in target.waves for s in w.speed_range()] or [0.0]

    def one_row(value: float) -> dict:
        p = study_params(study, value)
        d = RiemannData(d0.left, d0.right, p)
        fan = solve(d)
        case = classify(d)
        lo = min(0.0, min(min(_wave_edges(fan)), min(speeds)) * study.t_eval) - 0.5
        hi = max(max(_wave_edges(fan)), max(speeds)) * study.t_eval + 0.5
        xs = np.linspace(lo, hi, n_samples)
        h_a, b_a, _ = profile(fan, study.t_eval, xs)
        h_b, b_b, _ = profile(target, study.t_eval, xs)
        l1 = float(np.sum(np.abs(h_a - h_b) + np.abs(b_a - b_b)) * (xs[1] - xs[0]))

        row = {
            "value": value,
            "case": case,
            "l1": l1,
            "dsigma": None,
            "dbeta_rate": None,
            "weak_pairings": None,
        }
        if case == CASE_DELTA:
            w = fan.waves[0]
            w0 = target.waves[0]
            row["dsigma"] = abs(w.speed - w0.speed)
            row["dbeta_rate"] = abs(w.strength_rate - w0.strength_rate)
            pair_vals = []
            for bump in bump_catalog(w0.speed, study.t_eval):
                ph, pb = weak_pairing(fan, target, bump)
                pair_vals.append(abs(ph) + abs(pb))
            row["weak_pairings"] = pair_vals
        return row

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one_row, study.values))
    return [one_row(v) for v in study.values]

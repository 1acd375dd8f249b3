"""
Star-decomposition of binary triplets.

A triplet (X1, X2, X3) is explained by a binary latent W with

    P(Xi)         = u_i w + v_i (1 - w)
    P(Xi, Xj)     = u_i u_j w + v_i v_j (1 - w)
    P(X1, X2, X3) = u_1 u_2 u_3 w + v_1 v_2 v_3 (1 - w)

where w = P(W), u_i = P(Xi | W) and v_i = P(Xi | not W).  The u_i, v_i may
fall outside [0, 1]; such improper solutions still reproduce every
observable posterior.

Closed form used by :func:`star_solve`: with d_i = u_i - v_i and
s = w (1 - w), the pairwise covariances are c_ij = s d_i d_j and the central
third moment is t = s (1 - 2w) d_1 d_2 d_3.  Eliminating the d_i gives
s = K / (t**2 + 4K) with K = c12 c13 c23, so a real root with 0 < w < 1
exists iff K > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .distribution import TripletStats, ZeroProbabilityEvidence, as_evidence

__all__ = [
    "StarError",
    "StarDegenerate",
    "StarNoRealSolution",
    "StarParams",
    "RerootedStar",
    "DEGENERACY_TOL",
    "star_solve",
    "star_forward",
    "star_residual",
    "star_posterior",
    "star_reroot",
    "latent_joint",
    "is_proper",
]

DEGENERACY_TOL = 1e-10
PROPER_TOL = 1e-12
OBSERVABLES = ("X1", "X2", "X3")


class StarError(ValueError):
    pass


class StarDegenerate(StarError):
    """Some pairwise covariance vanishes: the triplet is not mutually dependent."""


class StarNoRealSolution(StarError):
    """No real root with 0 < P(W) < 1 exists (c12 * c13 * c23 < 0)."""


@dataclass(frozen=True)
class StarParams:
    w: float
    u: tuple
    v: tuple
    proper: bool = True

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(float(x) for x in self.u))
        object.__setattr__(self, "v", tuple(float(x) for x in self.v))

    def flipped(self) -> "StarParams":
        """The relabeled solution W <-> not W."""
        return StarParams(1.0 - self.w, self.v, self.u, self.proper)


@dataclass(frozen=True)
class RerootedStar:
    """Star with the arc W -> X_root reversed.

    Stores P(X_root), P(W | X_root), P(W | not X_root) and the unchanged
    conditionals of the two other observables given W / not W.
    """

    root: int
    p_root: float
    w_given_root: float
    w_given_not_root: float
    u: tuple
    v: tuple

    def to_star(self) -> StarParams:
        """Undo the reversal with Bayes rule."""
        r = self.root
        a, b, p = self.w_given_root, self.w_given_not_root, self.p_root
        w = p * a + (1.0 - p) * b
        u = list(self.u)
        v = list(self.v)
        u[r] = p * a / w
        v[r] = p * (1.0 - a) / (1.0 - w)
        params = StarParams(w, tuple(u), tuple(v))
        return replace(params, proper=is_proper(params))


def is_proper(params: StarParams) -> bool:
    lo, hi = -PROPER_TOL, 1.0 + PROPER_TOL
    return all(lo <= x <= hi for x in params.u + params.v)


def star_forward(params: StarParams) -> TripletStats:
    w = params.w
    if not 0.0 < w < 1.0:
        raise ValueError("P(W) must lie strictly inside (0, 1)")
    u, v = params.u, params.v
    nw = 1.0 - w
    p = [u[i] * w + v[i] * nw for i in range(3)]
    pair = {(i, j): u[i] * u[j] * w + v[i] * v[j] * nw for i in range(3) for j in range(i + 1, 3)}
    p123 = u[0] * u[1] * u[2] * w + v[0] * v[1] * v[2] * nw
    return TripletStats(p[0], p[1], p[2], pair[0, 1], pair[0, 2], pair[1, 2], p123)


def star_residual(params: StarParams, stats: TripletStats) -> float:
    """Largest absolute residual of the seven star equations."""
    fwd = star_forward(params).as_tuple()
    return max(abs(a - b) for a, b in zip(fwd, stats.as_tuple()))


def star_solve(stats: TripletStats) -> StarParams:
    """Solve the seven star equations for a mutually dependent triplet.

    The canonical root has ``w >= 0.5``; at ``w == 0.5`` the root with
    ``u1 >= v1`` is chosen.

    Raises
    ------
    StarDegenerate
        If any ``|c_ij| <= 1e-10``.
    StarNoRealSolution
        If ``c12 * c13 * c23 < 0``; no real root with ``0 < w < 1`` exists.
    """
    p = stats.marginals()
    c12, c13, c23 = stats.covariances()
    if min(abs(c12), abs(c13), abs(c23)) <= DEGENERACY_TOL:
        raise StarDegenerate(
            f"triplet is not mutually dependent (covariances {c12:.3g}, {c13:.3g}, {c23:.3g})"
        )
    k = c12 * c13 * c23
    if k <= 0:
        raise StarNoRealSolution(
            f"covariance product {k:.3g} is negative; no latent variable with 0 < P(W) < 1"
        )
    p1, p2, p3 = p
    t = (stats.p123 - p1 * stats.p23 - p2 * stats.p13 - p3 * stats.p12
         + 2.0 * p1 * p2 * p3)
    root = math.sqrt(t * t + 4.0 * k)
    s = k / (t * t + 4.0 * k)
    w = 0.5 + 0.5 * abs(t) / root
    mag = (
        math.sqrt(c12 * c13 / (s * c23)),
        math.sqrt(c12 * c23 / (s * c13)),
        math.sqrt(c13 * c23 / (s * c12)),
    )
    # d1*d2*d3 must carry the sign of t / (1 - 2w), i.e. -sign(t) for w > 1/2
    sigma = 1.0 if t == 0.0 else -math.copysign(1.0, t) * math.copysign(1.0, c12 * c13)
    d = (
        sigma * mag[0],
        sigma * math.copysign(1.0, c12) * mag[1],
        sigma * math.copysign(1.0, c13) * mag[2],
    )
    nw = 1.0 - w
    u = tuple(p[i] + nw * d[i] for i in range(3))
    v = tuple(p[i] - w * d[i] for i in range(3))
    params = StarParams(w, u, v)
    return replace(params, proper=is_proper(params))


def latent_joint(params) -> np.ndarray:
    """16-cell joint over (X1, X2, X3, W), LSB-first with W as bit 3.

    Entries are pseudo-probabilities when the star is improper.
    """
    if isinstance(params, RerootedStar):
        return _rerooted_joint(params)
    k = np.arange(16)
    x = (k[:, None] >> np.arange(3)[None, :]) & 1
    wbit = (k >> 3) & 1
    u = np.asarray(params.u)
    v = np.asarray(params.v)
    fu = np.where(x == 1, u, 1.0 - u).prod(axis=1)
    fv = np.where(x == 1, v, 1.0 - v).prod(axis=1)
    return np.where(wbit == 1, params.w * fu, (1.0 - params.w) * fv)


def _rerooted_joint(rs: RerootedStar) -> np.ndarray:
    k = np.arange(16)
    x = (k[:, None] >> np.arange(3)[None, :]) & 1
    wbit = (k >> 3) & 1
    r = rs.root
    xr = x[:, r]
    pr = np.where(xr == 1, rs.p_root, 1.0 - rs.p_root)
    pw_true = np.where(xr == 1, rs.w_given_root, rs.w_given_not_root)
    pw = np.where(wbit == 1, pw_true, 1.0 - pw_true)
    out = pr * pw
    for i in range(3):
        if i == r:
            continue
        cond = np.where(wbit == 1, rs.u[i], rs.v[i])
        out = out * np.where(x[:, i] == 1, cond, 1.0 - cond)
    return out


def _observable_index(name) -> int:
    if isinstance(name, (int, np.integer)):
        idx = int(name)
        if idx in (1, 2, 3):
            return idx - 1
        raise ValueError(f"observable index must be 1, 2 or 3, got {name}")
    if name in OBSERVABLES:
        return OBSERVABLES.index(name)
    raise ValueError(f"unknown observable {name!r}")


def star_posterior(params, evidence, target, names: Sequence[str] = OBSERVABLES) -> float:
    """P(target = true | evidence) routed through the latent variable.

    Observables are referred to by 1-based index or by ``names``.  For a
    :class:`StarParams`, first forms P(W | evidence) and then mixes the
    target conditionals; a :class:`RerootedStar` is summed out over its
    joint.
    """
    names = tuple(names)

    def resolve(x):
        if isinstance(x, str):
            if x not in names:
                raise ValueError(f"unknown observable {x!r}")
            return names.index(x)
        return _observable_index(x)

    ev = {resolve(k): bool(val) for k, val in as_evidence(evidence).items()}
    t = resolve(target)
    if t in ev:
        raise ValueError("target observable is part of the evidence")

    if isinstance(params, RerootedStar):
        joint = latent_joint(params)
        k = np.arange(16)
        mask = np.ones(16, dtype=bool)
        for i, val in ev.items():
            mask &= ((k >> i) & 1) == int(val)
        pe = joint[mask].sum()
        if pe <= 0:
            raise ZeroProbabilityEvidence("evidence has zero probability under the star")
        return float(joint[mask & (((k >> t) & 1) == 1)].sum() / pe)

    like_w = params.w
    like_nw = 1.0 - params.w
    for i, val in ev.items():
        like_w *= params.u[i] if val else 1.0 - params.u[i]
        like_nw *= params.v[i] if val else 1.0 - params.v[i]
    pe = like_w + like_nw
    if pe <= 0:
        raise ZeroProbabilityEvidence("evidence has zero probability under the star")
    post_w = like_w / pe
    return float(post_w * params.u[t] + (1.0 - post_w) * params.v[t])


def star_reroot(params: StarParams, new_root: int) -> RerootedStar:
    """Reverse the arc W -> X_new_root (1-based index) by Bayes rule."""
    r = _observable_index(new_root)
    w = params.w
    p = params.u[r] * w + params.v[r] * (1.0 - w)
    if not 0.0 < p < 1.0:
        raise ValueError(f"P(X{r + 1}) = {p} is degenerate; cannot reroot")
    return RerootedStar(
        root=r,
        p_root=p,
        w_given_root=w * params.u[r] / p,
        w_given_not_root=w * (1.0 - params.u[r]) / (1.0 - p),
        u=params.u,
        v=params.v,
    )

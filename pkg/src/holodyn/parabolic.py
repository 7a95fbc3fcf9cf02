"""Maps tangent to the identity: normal forms, blow-up and sector dynamics.

For f(z) = z + P2(z) + h.o.t. with homogeneous quadratic P2 = (p, q), a
direction v with P2(v) = lambda * v is characteristic (non-degenerate when
lambda != 0).  Volume preservation forces p_x = -q_y, so after moving a
non-degenerate direction to (1, 0) with lambda = 1 the quadratic part reads

    (x^2 + 2b xy + c y^2,  -2xy - b y^2)

and, when b != 0, rescaling y by 1/b gives the one-parameter normal form

    (x^2 + 2 xy + c y^2,  -2xy - y^2).

The blow-up substitution y = u x separates the radial coordinate x from the
direction u.  In the sector

    W_eps = { (x, u) : max(|x|, |arg(x) - pi|) < eps,  2|u| < |x| }

the x-dynamics creeps to 0 like a parabolic petal while differences in u
expand, which pins down a unique graph point u(x) for each admissible x.
The graph point is located by survival-set refinement: keep grid cells in
the u-disc whose centre orbit stays in W_eps over growing horizons, then
refine the surviving box.  This mirrors the nested compact sets of the
uniqueness argument and needs no derivatives of the neutral dynamics.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import AutoChain, EndoChain, Linear, QuadraticJet, ShearY
from .errors import (
    Ambiguous,
    BlowupSingular,
    DegenerateDirection,
    NoConvergence,
    NoSurvivor,
    NotTangentToIdentity,
    VNotNormalized,
)
from .poly import Poly2
from .rng import make_generator

TangentMapLike = AutoChain | EndoChain

_JET_TOL = 1e-9


@dataclass(frozen=True)
class HomogeneousQuadratic:
    """P2 = (p, q); p = (a, b2, c) means a x^2 + b2 xy + c y^2, same for q."""

    p: tuple[complex, complex, complex]
    q: tuple[complex, complex, complex]
    volume_preserving: bool = False

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(complex(v) for v in self.p))
        object.__setattr__(self, "q", tuple(complex(v) for v in self.q))
        if self.volume_preserving and not self.is_divergence_free():
            raise ValueError(
                "flagged volume-preserving but div P2 != 0 "
                f"(needs q_xy = -2 p_a and q_c = -p_xy / 2): p={self.p} q={self.q}"
            )

    @classmethod
    def normal_form(cls, c: complex) -> "HomogeneousQuadratic":
        """The one-parameter family (x^2 + 2xy + c y^2, -2xy - y^2)."""
        return cls((1.0, 2.0, complex(c)), (0.0, -2.0, -1.0), volume_preserving=True)

    def is_divergence_free(self, tol: float = 1e-12) -> bool:
        scale = self.norm() + 1.0
        return (
            abs(self.q[1] + 2 * self.p[0]) <= tol * scale
            and abs(self.q[2] + self.p[1] / 2) <= tol * scale
        )

    def norm(self) -> float:
        return max(abs(v) for v in self.p + self.q)

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(v) <= tol for v in self.p + self.q)

    def eval(self, x, y):
        pa, pxy, pc = self.p
        qa, qxy, qc = self.q
        return (
            pa * x * x + pxy * x * y + pc * y * y,
            qa * x * x + qxy * x * y + qc * y * y,
        )

    def p_at(self, x, y):
        pa, pxy, pc = self.p
        return pa * x * x + pxy * x * y + pc * y * y

    def q_at(self, x, y):
        qa, qxy, qc = self.q
        return qa * x * x + qxy * x * y + qc * y * y

    def to_map(self) -> EndoChain:
        return EndoChain((QuadraticJet(self.p, self.q),))

    def conjugate_linear(self, m: np.ndarray) -> "HomogeneousQuadratic":
        """Quadratic part of L^{-1} o (Id + P2) o L for linear L = m."""
        minv = np.linalg.inv(m)
        x, y = Poly2.x(), Poly2.y()
        lx = x.scale(m[0, 0]) + y.scale(m[0, 1])
        ly = x.scale(m[1, 0]) + y.scale(m[1, 1])
        pa, pxy, pc = self.p
        qa, qxy, qc = self.q
        pl = (lx * lx).scale(pa) + (lx * ly).scale(pxy) + (ly * ly).scale(pc)
        ql = (lx * lx).scale(qa) + (lx * ly).scale(qxy) + (ly * ly).scale(qc)
        rp = pl.scale(minv[0, 0]) + ql.scale(minv[0, 1])
        rq = pl.scale(minv[1, 0]) + ql.scale(minv[1, 1])
        return HomogeneousQuadratic(
            (rp.coefficient(2, 0), rp.coefficient(1, 1), rp.coefficient(0, 2)),
            (rq.coefficient(2, 0), rq.coefficient(1, 1), rq.coefficient(0, 2)),
        )


def quadratic_part(map_like: TangentMapLike) -> HomogeneousQuadratic:
    """Exact degree-2 coefficients of a map tangent to the identity."""
    fx, fy = map_like.to_polynomial()
    scale = max(fx.max_coeff(), fy.max_coeff(), 1.0)
    ok = (
        abs(fx.coefficient(0, 0)) <= _JET_TOL * scale
        and abs(fy.coefficient(0, 0)) <= _JET_TOL * scale
        and abs(fx.coefficient(1, 0) - 1) <= _JET_TOL * scale
        and abs(fx.coefficient(0, 1)) <= _JET_TOL * scale
        and abs(fy.coefficient(1, 0)) <= _JET_TOL * scale
        and abs(fy.coefficient(0, 1) - 1) <= _JET_TOL * scale
    )
    if not ok:
        raise NotTangentToIdentity("map does not fix 0 with identity differential")
    p2 = HomogeneousQuadratic(
        (fx.coefficient(2, 0), fx.coefficient(1, 1), fx.coefficient(0, 2)),
        (fy.coefficient(2, 0), fy.coefficient(1, 1), fy.coefficient(0, 2)),
    )
    return p2


# -- characteristic directions ----------------------------------------------


class AllDirections:
    """Marker: P2 vanishes identically, every direction is characteristic."""

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "AllDirections()"


@dataclass(frozen=True, eq=False)
class CharacteristicDirection:
    direction: np.ndarray  # unit vector in C^2
    lam: complex
    degenerate: bool
    chart: str

    def residual(self, p2: HomogeneousQuadratic) -> float:
        vx, vy = complex(self.direction[0]), complex(self.direction[1])
        px, qy = p2.eval(vx, vy)
        return math.hypot(abs(px - self.lam * vx), abs(qy - self.lam * vy))


def _newton_polish_root(coeffs: np.ndarray, r: complex) -> complex:
    # coeffs ascending; single Newton step per root, guarded
    der = coeffs[1:] * np.arange(1, len(coeffs))
    val = 0j
    for c in coeffs[::-1]:
        val = val * r + c
    dval = 0j
    for c in der[::-1]:
        dval = dval * r + c
    if abs(dval) > 1e-14:
        r = r - val / dval
    return r


def characteristic_directions(
    p2: HomogeneousQuadratic,
    tol: float = 1e-10,
    merge_tol: float = 1e-8,
) -> list[CharacteristicDirection] | AllDirections:
    """Directions v with P2(v) = lambda v, found in both blow-up charts.

    Chart y = u x solves q(1, u) - u p(1, u) = 0 (companion-matrix roots
    with one Newton polish each); chart x = w y only contributes (0, 1).
    Roots within merge_tol are merged.
    """
    if p2.is_zero():
        return AllDirections()
    pa, pxy, pc = p2.p
    qa, qxy, qc = p2.q
    # q(1,u) - u p(1,u), ascending in u
    coeffs = np.array([qa, qxy - pa, qc - pxy, -pc], dtype=complex)
    while len(coeffs) > 1 and abs(coeffs[-1]) <= 1e-14 * max(1.0, p2.norm()):
        coeffs = coeffs[:-1]
    found: list[CharacteristicDirection] = []
    lam_scale = p2.norm()
    if len(coeffs) > 1:
        roots = np.roots(coeffs[::-1])
        roots = [_newton_polish_root(coeffs, complex(r)) for r in roots]
        merged: list[complex] = []
        for r in sorted(roots, key=lambda z: (round(z.real, 12), round(z.imag, 12))):
            if not any(abs(r - m) <= merge_tol * (1 + abs(r)) for m in merged):
                merged.append(r)
        for u in merged:
            v = np.array([1.0, u], dtype=complex)
            scale = np.linalg.norm(v)
            v = v / scale
            # homogeneity: P2((1,u)/s) = (p(1,u)/s) * (1,u)/s, so the
            # eigenvalue of the stored unit vector is the chart value / s
            lam = p2.p_at(1.0, u) / scale
            found.append(
                CharacteristicDirection(
                    direction=v,
                    lam=lam,
                    degenerate=abs(lam) <= tol * max(lam_scale, 1.0),
                    chart="y=ux",
                )
            )
    # chart x = wy: the direction (0, 1) is characteristic iff p(0,1) = 0
    if abs(pc) <= tol * max(lam_scale, 1.0):
        lam = qc
        found.append(
            CharacteristicDirection(
                direction=np.array([0.0, 1.0], dtype=complex),
                lam=lam,
                degenerate=abs(lam) <= tol * max(lam_scale, 1.0),
                chart="x=wy",
            )
        )
    return found


def make_nondegenerate(
    p2: HomogeneousQuadratic, v: np.ndarray, eps: float
) -> HomogeneousQuadratic:
    """Add the divergence-free perturbation (eps x^2, -2 eps xy).

    Requires v normalized to (1, 0) and degenerate characteristic there;
    the new direction (1, 0) has lambda = old p(1,0) + eps.
    """
    v = np.asarray(v, dtype=complex)
    if abs(v[0] - 1.0) > 1e-12 or abs(v[1]) > 1e-12:
        raise VNotNormalized(f"expected v = (1, 0), got {v!r}")
    px, qx = p2.eval(1.0, 0.0)
    scale = max(p2.norm(), 1.0)
    if max(abs(px), abs(qx)) > 1e-10 * scale:
        raise ValueError("(1, 0) is not a degenerate characteristic direction of P2")
    return HomogeneousQuadratic(
        (p2.p[0] + eps, p2.p[1], p2.p[2]),
        (p2.q[0], p2.q[1] - 2 * eps, p2.q[2]),
        volume_preserving=p2.volume_preserving,
    )


@dataclass(frozen=True, eq=False)
class Conjugation:
    """Linear change of variables: normalized P2 is z -> L^{-1} P2(L z)."""

    matrix: np.ndarray
    inverse: np.ndarray

    def push_point(self, x: complex, y: complex) -> tuple[complex, complex]:
        m = self.inverse
        return m[0, 0] * x + m[0, 1] * y, m[1, 0] * x + m[1, 1] * y

    def pull_point(self, x: complex, y: complex) -> tuple[complex, complex]:
        m = self.matrix
        return m[0, 0] * x + m[0, 1] * y, m[1, 0] * x + m[1, 1] * y


@dataclass(frozen=True, eq=False)
class NormalizeResult:
    quadratic: HomogeneousQuadratic
    c: complex
    conjugation: Conjugation
    b_was_zero: bool


def normalize(
    p2: HomogeneousQuadratic, v: CharacteristicDirection, b_tol: float = 1e-10
) -> NormalizeResult:
    """Conjugate a non-degenerate direction into the one-parameter normal form.

    First a linear map with columns (v / lambda, w) moves v to (1, 0) and
    rescales lambda to 1; divergence-freeness survives any linear
    conjugation, which forces the two-parameter (b, c) shape.  When b != 0
    the rescaling (x, y) -> (x, y / b) lands on the c-only form; the b = 0
    branch skips the rescale and is flagged.
    """
    if not p2.is_divergence_free():
        raise ValueError("normalize expects a divergence-free quadratic part")
    lam = complex(v.lam)
    if v.degenerate or abs(lam) <= 1e-14 * max(p2.norm(), 1.0):
        raise DegenerateDirection("cannot normalize a degenerate direction")
    vec = np.asarray(v.direction, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    w = np.array([-vec[1].conjugate(), vec[0].conjugate()], dtype=complex)
    m1 = np.array([[vec[0] / lam, w[0]], [vec[1] / lam, w[1]]], dtype=complex)
    q1 = p2.conjugate_linear(m1)
    b = q1.p[1] / 2.0
    if abs(b) <= b_tol * max(q1.norm(), 1.0):
        quad = HomogeneousQuadratic(q1.p, q1.q, volume_preserving=True)
        minv = np.linalg.inv(m1)
        return NormalizeResult(quad, q1.p[2], Conjugation(m1, minv), b_was_zero=True)
    m2 = np.array([[1.0, 0.0], [0.0, 1.0 / b]], dtype=complex)
    m = m1 @ m2
    q2 = p2.conjugate_linear(m)
    quad = HomogeneousQuadratic(q2.p, q2.q, volume_preserving=True)
    return NormalizeResult(quad, q2.p[2], Conjugation(m, np.linalg.inv(m)), b_was_zero=False)


# -- blow-up dynamics --------------------------------------------------------


@dataclass(frozen=True)
class SectorPoint:
    """Blow-up coordinates (x, u) with y = u x, carrying the sector epsilon."""

    x: complex
    u: complex
    epsilon: float


def arg_deviation_from_pi(x) -> float | np.ndarray:
    """|arg(x) - pi| with arg taken in [0, 2pi); equals |arg(-x)| principal."""
    return np.abs(np.angle(-np.asarray(x))) if isinstance(x, np.ndarray) else abs(
        cmath.phase(-complex(x))
    )


def in_sector(pt: SectorPoint) -> bool:
    x = complex(pt.x)
    if x == 0:
        return False
    return (
        max(abs(x), arg_deviation_from_pi(x)) < pt.epsilon and 2 * abs(pt.u) < abs(x)
    )


def blowup_step(map_like: TangentMapLike, pt: SectorPoint) -> SectorPoint:
    """One step of the full map in blow-up coordinates: exact, no truncation."""
    x = complex(pt.x)
    if x == 0:
        raise BlowupSingular("blow-up chart needs x != 0")
    y = pt.u * x
    fx, fy = map_like.apply(x, y)
    if abs(fx) <= 1e-300:
        raise BlowupSingular(f"image x-coordinate vanished (x1 = {fx!r})")
    return SectorPoint(fx, fy / fx, pt.epsilon)


def blowup_batch(map_like: TangentMapLike, xs: np.ndarray, us: np.ndarray):
    """Vectorised blow-up step; returns (x1, u1, ok) with ok false at x1 ~ 0."""
    ys = us * xs
    fx, fy = map_like.apply(xs, ys)
    ok = np.abs(fx) > 1e-300
    u1 = np.where(ok, fy / np.where(ok, fx, 1.0), 0j)
    return fx, u1, ok


def _sector_mask(xs: np.ndarray, us: np.ndarray, eps: float) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        return (
            (np.abs(xs) < eps)
            & (np.abs(np.angle(-xs)) < eps)
            & (2 * np.abs(us) < np.abs(xs))
            & (np.abs(xs) > 0)
        )


@dataclass(eq=False)
class SectorOrbitResult:
    kind: str  # 'converged' | 'left' | 'undecided'
    steps: int
    last: SectorPoint
    min_abs_x: float


def sector_orbit(
    map_like: TangentMapLike,
    pt: SectorPoint,
    max_iter: int = 20000,
    floor: float = 1e-4,
) -> SectorOrbitResult:
    """Iterate the blow-up map inside the sector.

    'converged' when |x_n| drops below floor with every iterate so far in
    the sector; 'left' (with the step index) as soon as an iterate exits.
    Parabolic convergence is algebraic, so the floor is a practical stand-in
    for the limit statement.
    """
    cur = pt
    min_abs = abs(pt.x)
    if not in_sector(cur):
        return SectorOrbitResult("left", 0, cur, min_abs)
    for n in range(1, max_iter + 1):
        cur = blowup_step(map_like, cur)
        min_abs = min(min_abs, abs(cur.x))
        if not in_sector(cur):
            return SectorOrbitResult("left", n, cur, min_abs)
        if abs(cur.x) < floor:
            return SectorOrbitResult("converged", n, cur, min_abs)
    return SectorOrbitResult("undecided", max_iter, cur, min_abs)


# -- expansion (difference growth in u) --------------------------------------


def expansion_pair_margin(
    map_like: TangentMapLike, p1: SectorPoint, p2: SectorPoint
) -> float | None:
    """|u1 - u1~| - max(|u - u~|, 2|x1 - x1~|) for an admissible pair.

    Returns None when the pair is skipped: hypothesis 2|x - x~| < |u - u~|
    vacuous or violated, or either point outside the sector.
    """
    if not (in_sector(p1) and in_sector(p2)):
        return None
    du = abs(p1.u - p2.u)
    if 2 * abs(p1.x - p2.x) >= du:
        return None
    q1 = blowup_step(map_like, p1)
    q2 = blowup_step(map_like, p2)
    return abs(q1.u - q2.u) - max(du, 2 * abs(q1.x - q2.x))


@dataclass(eq=False)
class ExpansionReport:
    epsilon: float
    trials: int
    violations: int
    min_margin: float
    regime_ok: bool


def expansion_check(
    map_like: TangentMapLike,
    epsilon: float,
    trials: int = 10_000,
    seed: int = 7,
    max_batches: int = 400,
) -> ExpansionReport:
    """Sample admissible sector pairs and count expansion failures.

    For eps in the contraction regime the expected violation count is 0;
    a nonzero count flags eps outside the regime (regime_ok False).
    """
    g = make_generator(seed)
    got = 0
    violations = 0
    min_margin = math.inf
    batch = max(1024, trials // 4)
    for _ in range(max_batches):
        if got >= trials:
            break
        r = epsilon * (0.05 + 0.95 * g.random(batch))
        phi = epsilon * (2 * g.random(batch) - 1) * 0.98
        xs = r * np.exp(1j * (np.pi + phi))
        rho = 0.5 * r * np.sqrt(g.random(batch)) * 0.98
        us = rho * np.exp(2j * np.pi * g.random(batch))
        wiggle = 0.02 * (g.random(batch) * np.exp(2j * np.pi * g.random(batch)))
        xt = xs * (1.0 + wiggle)
        rho2 = 0.5 * np.abs(xt) * np.sqrt(g.random(batch)) * 0.98
        ut = rho2 * np.exp(2j * np.pi * g.random(batch))

        both_in = _sector_mask(xs, us, epsilon) & _sector_mask(xt, ut, epsilon)
        du = np.abs(us - ut)
        admissible = both_in & (2 * np.abs(xs - xt) < du) & (du > 0)
        idx = np.flatnonzero(admissible)
        if idx.size == 0:
            continue
        take = idx[: trials - got]
        x1, u1, ok1 = blowup_batch(map_like, xs[take], us[take])
        x2, u2, ok2 = blowup_batch(map_like, xt[take], ut[take])
        good = ok1 & ok2
        margin = np.abs(u1 - u2) - np.maximum(du[take], 2 * np.abs(x1 - x2))
        margin = margin[good]
        got += int(np.count_nonzero(good))
        violations += int(np.count_nonzero(margin <= 0))
        if margin.size:
            min_margin = min(min_margin, float(margin.min()))
    if got < trials:
        raise NoConvergence(
            f"only {got}/{trials} admissible pairs found; widen the sampling scheme"
        )
    return ExpansionReport(
        epsilon=epsilon,
        trials=got,
        violations=violations,
        min_margin=min_margin,
        regime_ok=violations == 0,
    )


# -- the unique graph point ---------------------------------------------------


@dataclass(eq=False)
class GraphPointResult:
    x: complex
    u: complex
    certified_radius: float
    levels: int
    final_horizon: int


def _survivors(
    map_like: TangentMapLike, x: complex, us: np.ndarray, eps: float, horizon: int
) -> np.ndarray:
    xs = np.full(us.shape, x, dtype=complex)
    uu = us.astype(complex)
    alive = _sector_mask(xs, uu, eps)
    for _ in range(horizon):
        if not alive.any():
            break
        x1, u1, ok = blowup_batch(map_like, xs, uu)
        alive &= ok
        xs = np.where(alive, x1, xs)
        uu = np.where(alive, u1, uu)
        alive &= _sector_mask(xs, uu, eps)
    return alive


def _clusters(points: np.ndarray, link: float) -> list[np.ndarray]:
    idx = list(range(len(points)))
    groups: list[list[int]] = []
    used = [False] * len(points)
    for i in idx:
        if used[i]:
            continue
        stack = [i]
        used[i] = True
        comp = []
        while stack:
            k = stack.pop()
            comp.append(k)
            close = np.flatnonzero(np.abs(points - points[k]) <= link)
            for j in close:
                if not used[j]:
                    used[j] = True
                    stack.append(int(j))
        groups.append(comp)
    return [points[g] for g in groups]


def graph_point(
    map_like: TangentMapLike,
    x: complex,
    epsilon: float = 0.02,
    resolution: float = 1e-6,
    grid_n: int = 32,
    horizon0: int = 10,
    max_levels: int = 40,
) -> GraphPointResult:
    """Survival-set refinement for the unique u with orbit staying in W_eps.

    Covers the disc 2|u| <= |x| with a grid, keeps cells whose centre orbit
    stays in the sector for the level horizon (10 * 2^level), then refines
    the surviving box; stops once the survivor cluster is smaller than
    resolution.  Two separated surviving clusters raise Ambiguous, an empty
    level raises NoSurvivor.
    """
    x = complex(x)
    if not (abs(x) < epsilon and arg_deviation_from_pi(x) < epsilon):
        raise ValueError("x must satisfy |x| < eps and |arg(x) - pi| < eps")
    r0 = abs(x) / 2.0
    lo_re, hi_re = -r0, r0
    lo_im, hi_im = -r0, r0
    split_seen = 0
    for level in range(max_levels):
        horizon = horizon0 * (2**level)
        # survivor regions shrink faster than the box tracks them (quartic
        # vs geometric), so an empty discrete survivor set is a grid
        # artifact: retry the same level with a denser grid before giving up
        survivors = np.empty(0, dtype=complex)
        cell = 0.0
        for refine in range(4):
            n = grid_n * (2**refine)
            re = np.linspace(lo_re, hi_re, n + 1)
            im = np.linspace(lo_im, hi_im, n + 1)
            cre = 0.5 * (re[:-1] + re[1:])
            cim = 0.5 * (im[:-1] + im[1:])
            cell = max(re[1] - re[0], im[1] - im[0])
            uu = (cre[None, :] + 1j * cim[:, None]).ravel()
            uu = uu[2 * np.abs(uu) <= abs(x)]
            if uu.size == 0:
                continue
            alive = _survivors(map_like, x, uu, epsilon, horizon)
            survivors = uu[alive]
            if survivors.size:
                break
        if survivors.size == 0:
            raise NoSurvivor(
                f"no surviving cells at level {level} (horizon {horizon}); "
                "eps may be too large or x outside the regime",
                level,
                horizon,
            )
        diam = float(
            np.max(np.abs(survivors[:, None] - survivors[None, :])) if survivors.size > 1 else 0.0
        )
        cell_diag = cell * math.sqrt(2.0)
        center = complex(survivors.mean())
        certified = 0.5 * diam + cell_diag
        if certified < resolution:
            return GraphPointResult(
                x=x, u=center, certified_radius=certified, levels=level + 1,
                final_horizon=horizon,
            )
        groups = _clusters(survivors, 3.0 * cell)
        if len(groups) > 1:
            gaps = []
            for i in range(len(groups)):
                for j in range(i + 1, len(groups)):
                    gaps.append(
                        float(np.min(np.abs(groups[i][:, None] - groups[j][None, :])))
                    )
            if min(gaps) > 6.0 * cell:
                split_seen += 1
                if split_seen >= 2:
                    raise Ambiguous(
                        f"{len(groups)} separated survivor clusters at level {level}"
                    )
        else:
            split_seen = 0
        margin = 1.5 * cell
        lo_re = max(float(survivors.real.min()) - margin, -r0)
        hi_re = min(float(survivors.real.max()) + margin, r0)
        lo_im = max(float(survivors.imag.min()) - margin, -r0)
        hi_im = min(float(survivors.imag.max()) + margin, r0)
    raise NoConvergence(f"refinement did not reach resolution {resolution:.1e}")


@dataclass(eq=False)
class ParabolicStabilityRow:
    t: float
    sup_distance: float
    max_certified: float
    resolution_limited: bool


def parabolic_stability_experiment(
    family: Callable[[float], TangentMapLike],
    x_mesh: Sequence[complex],
    t_values: Sequence[float],
    epsilon: float = 0.02,
    resolution: float = 1e-8,
    grid_n: int = 32,
) -> list[ParabolicStabilityRow]:
    """Sup distance of sector graphs between family(t) and family(0).

    Every family member must be tangent to the identity with the same
    non-degenerate direction (pre-conjugate if needed).  Distances below
    twice the certified radii are flagged as resolution-limited.
    """
    base = {
        x: graph_point(family(0.0), x, epsilon=epsilon, resolution=resolution, grid_n=grid_n)
        for x in x_mesh
    }
    rows = []
    for t in t_values:
        m = family(float(t))
        sup = 0.0
        max_cert = 0.0
        for x in x_mesh:
            gp = graph_point(m, x, epsilon=epsilon, resolution=resolution, grid_n=grid_n)
            sup = max(sup, abs(gp.u - base[x].u))
            max_cert = max(max_cert, gp.certified_radius, base[x].certified_radius)
        rows.append(
            ParabolicStabilityRow(
                t=float(t),
                sup_distance=sup,
                max_certified=max_cert,
                resolution_limited=sup < 2 * max_cert,
            )
        )
    return rows


# -- explicit tangent-to-identity automorphisms -------------------------------


def quadratic_shear(m: complex, t: complex) -> AutoChain:
    """The exact automorphism z -> z + t (1, m) (m x - y)^2 as a 3-step chain.

    The linear form m x - y annihilates the direction (1, m), so the map is
    a generalized shear with exact inverse z -> z - t (1, m) (m x - y)^2.
    """
    a = Linear(m, -1.0, 1.0, 0.0)
    return AutoChain.of(a, ShearY((0.0, 0.0, complex(t))), a.inverted())


def tangent_shear_chain(c: complex) -> AutoChain:
    """A volume-preserving automorphism whose 2-jet is the normal form.

    Two generalized quadratic shears with directions (1, m_i) and weights
    t_i add their quadratic parts; matching the moments sum t m^k for
    k = 0..3 to (c, -1, 1, 0) forces m_i to solve z^2 + a z + a = 0 with
    a = 1 / (1 - c).  Fails for c = 1 (a blows up) and c = 3/4 (double
    root); the composition carries genuine higher-order terms.
    """
    c = complex(c)
    if abs(c - 1.0) < 1e-12:
        raise ValueError("c = 1 is degenerate for the two-shear construction")
    alpha = 1.0 / (1.0 - c)
    disc = cmath.sqrt(alpha * alpha - 4 * alpha)
    m1 = (-alpha + disc) / 2.0
    m2 = (-alpha - disc) / 2.0
    if abs(m1 - m2) < 1e-12:
        raise ValueError("double shear direction (c = 3/4); pick another c")
    t1 = (-1.0 - c * m2) / (m1 - m2)
    t2 = c - t1
    chain = AutoChain.of(*(quadratic_shear(m1, t1).steps + quadratic_shear(m2, t2).steps))
    return chain


def normal_form_family(c: complex) -> EndoChain:
    """Pure quadratic map z + P2 for the one-parameter normal form."""
    return HomogeneousQuadratic.normal_form(c).to_map()


def cubic_perturbation_family(c: complex) -> Callable[[float], AutoChain]:
    """t -> tangent_shear_chain(c) followed by the shear (x, y + t x^3).

    All members are volume-preserving automorphisms tangent to the identity
    with the same non-degenerate characteristic direction (1, 0); only the
    3-jet moves, so sector graphs shift by O(t).
    """
    base = tangent_shear_chain(c)

    def make(t: float) -> AutoChain:
        if t == 0:
            return base
        return base.then(ShearY((0.0, 0.0, 0.0, complex(t))))

    return make

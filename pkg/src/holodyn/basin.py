"""Orbit verdicts, attraction probes and the counterexample gallery.

Convergence is operationalised with hysteresis: an orbit counts as
converged once it sits within conv_tol of the target for 20 consecutive
steps, which keeps transits through a neighbourhood from flagging early.
Escape means the magnitude cap was exceeded.  All grid/sample probes run
vectorised and draw their randomness as deterministic counter-based
batches, so results are independent of chunking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .core import AutoChain, DEFAULT_CAP, FixedPointInfo, Point
from .errors import EmptySample, NotFound, PoleHit
from .rng import ball4_points, make_generator

HYSTERESIS = 20

VERDICT_UNDECIDED = 0
VERDICT_CONVERGED = 1
VERDICT_ESCAPED = 2


@dataclass(eq=False)
class OrbitRecord:
    start: Point
    states: list[Point]
    verdict: str  # 'converged' | 'escaped' | 'undecided'
    step: int | None
    target: Point | None

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"


def orbit(
    chain: AutoChain,
    z: Point,
    max_iter: int,
    target: Point | None = None,
    conv_tol: float = 1e-3,
    cap: float = DEFAULT_CAP,
    keep_states: int = 512,
) -> OrbitRecord:
    """Iterate a single point, recording (possibly truncated) states."""
    x, y = complex(z[0]), complex(z[1])
    states: list[Point] = [(x, y)]
    run = 0
    for n in range(1, max_iter + 1):
        nx, ny = chain.apply(x, y)
        m = max(abs(nx), abs(ny))
        if not math.isfinite(m) or m > cap:
            return OrbitRecord((z[0], z[1]), states, "escaped", n, target)
        x, y = nx, ny
        if len(states) < keep_states:
            states.append((x, y))
        if target is not None:
            d = math.hypot(abs(x - target[0]), abs(y - target[1]))
            run = run + 1 if d < conv_tol else 0
            if run >= HYSTERESIS:
                return OrbitRecord((z[0], z[1]), states, "converged", n, target)
    return OrbitRecord((z[0], z[1]), states, "undecided", None, target)


def orbit_verdicts(
    chain: AutoChain,
    xs: np.ndarray,
    ys: np.ndarray,
    max_iter: int,
    target: Point | None = None,
    conv_tol: float = 1e-3,
    cap: float = DEFAULT_CAP,
):
    """Vectorised orbit verdicts; returns (codes, steps) arrays."""
    x = np.array(xs, dtype=complex, copy=True)
    y = np.array(ys, dtype=complex, copy=True)
    n = x.shape[0]
    codes = np.zeros(n, dtype=np.int8)
    steps = np.full(n, -1, dtype=np.int64)
    run = np.zeros(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    for k in range(1, max_iter + 1):
        if not active.any():
            break
        nx, ny = chain.apply(x, y)
        with np.errstate(invalid="ignore", over="ignore"):
            esc = active & (
                ~(np.isfinite(nx) & np.isfinite(ny))
                | (np.maximum(np.abs(nx), np.abs(ny)) > cap)
            )
        codes[esc] = VERDICT_ESCAPED
        steps[esc] = k
        active &= ~esc
        x = np.where(active, nx, x)
        y = np.where(active, ny, y)
        if target is not None:
            d = np.hypot(np.abs(x - target[0]), np.abs(y - target[1]))
            near = active & (d < conv_tol)
            run = np.where(near, run + 1, 0)
            conv = active & (run >= HYSTERESIS)
            codes[conv] = VERDICT_CONVERGED
            steps[conv] = k
            active &= ~conv
    return codes, steps


# -- dichotomy probe ----------------------------------------------------------


@dataclass(eq=False)
class DichotomyReport:
    r: float
    m_max: int
    largest_witnessed_m: int
    cutoff_m0: int | None
    witnesses: dict[int, Point]


def dichotomy_probe(
    chain: AutoChain,
    fp: FixedPointInfo,
    r: float,
    m_max: int,
    samples: int = 512,
    seed: int = 11,
    cap: float = DEFAULT_CAP,
) -> DichotomyReport:
    """Search the closed r-ball around fp for points whose first m iterates
    all stay outside the open r-ball.

    Candidates mix deterministic seeds along the unstable eigendirection
    (where witnesses live for a saddle) with counter-based ball samples.
    Reports the largest witnessed m; cutoff_m0 is the first unwitnessed m.
    """
    px, py = fp.location
    cand_x = []
    cand_y = []
    if fp.unstable_direction is not None:
        vu = fp.unstable_direction
        radii = np.linspace(0.05 * r, r, 30)
        phases = np.exp(2j * np.pi * np.arange(12) / 12)
        for rho in radii:
            for ph in phases:
                cand_x.append(px + rho * ph * vu[0])
                cand_y.append(py + rho * ph * vu[1])
    bx, by = ball4_points(seed, samples, r, center=(px, py))
    xs = np.concatenate([np.asarray(cand_x, dtype=complex), bx])
    ys = np.concatenate([np.asarray(cand_y, dtype=complex), by])

    x = xs.copy()
    y = ys.copy()
    # exit_run[i]: number of leading iterates strictly outside B_r, capped at m_max
    exit_run = np.zeros(xs.shape[0], dtype=np.int64)
    alive = np.ones(xs.shape[0], dtype=bool)  # still counting (no return yet)
    escaped = np.zeros(xs.shape[0], dtype=bool)
    for _ in range(m_max):
        if not alive.any():
            break
        nx, ny = chain.apply(x, y)
        with np.errstate(invalid="ignore", over="ignore"):
            esc = alive & (
                ~(np.isfinite(nx) & np.isfinite(ny))
                | (np.maximum(np.abs(nx), np.abs(ny)) > cap)
            )
        # escape: every later iterate stays outside the ball
        escaped |= esc
        exit_run[esc] = m_max
        alive &= ~esc
        x = np.where(alive, nx, x)
        y = np.where(alive, ny, y)
        d = np.hypot(np.abs(x - px), np.abs(y - py))
        outside = d >= r
        exit_run[alive & outside] += 1
        alive &= outside

    witnesses: dict[int, Point] = {}
    largest = int(exit_run.max()) if exit_run.size else 0
    cutoff = None
    for m in range(1, m_max + 1):
        ok = exit_run >= m
        if not ok.any():
            cutoff = m
            break
        i = int(np.argmax(ok))
        witnesses[m] = (complex(xs[i]), complex(ys[i]))
    return DichotomyReport(
        r=r,
        m_max=m_max,
        largest_witnessed_m=min(largest, m_max),
        cutoff_m0=cutoff,
        witnesses=witnesses,
    )


# -- interior probe -----------------------------------------------------------


@dataclass(eq=False)
class InteriorReport:
    samples: int
    converged: int
    fraction: float
    radius: float
    max_iter: int
    conv_tol: float


def interior_probe(
    chain: AutoChain,
    fp: FixedPointInfo,
    radius: float,
    samples: int,
    max_iter: int = 500,
    conv_tol: float = 1e-3,
    seed: int = 23,
    threads: int = 1,
) -> InteriorReport:
    """Fraction of uniform ball samples whose orbit converges to fp.

    threads only chunks the sweep; the verdict of each sample is a pure
    function of (seed, index) so the fraction is chunking-independent.
    """
    if samples <= 0:
        raise EmptySample("interior_probe needs at least one sample")
    xs, ys = ball4_points(seed, samples, radius, center=fp.location)
    target = fp.location

    def run_chunk(lo: int, hi: int) -> int:
        codes, _ = orbit_verdicts(
            chain, xs[lo:hi], ys[lo:hi], max_iter, target=target, conv_tol=conv_tol
        )
        return int(np.count_nonzero(codes == VERDICT_CONVERGED))

    bounds = _chunk_bounds(samples, threads)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(lambda b: run_chunk(*b), bounds))
    else:
        counts = [run_chunk(*b) for b in bounds]
    converged = sum(counts)
    return InteriorReport(
        samples=samples,
        converged=converged,
        fraction=converged / samples,
        radius=radius,
        max_iter=max_iter,
        conv_tol=conv_tol,
    )


def _chunk_bounds(n: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, parts)
    size = (n + parts - 1) // parts
    return [(i, min(i + size, n)) for i in range(0, n, size)]


# -- bounded-orbit set --------------------------------------------------------


def bounded_set_probe(
    chain: AutoChain,
    box: tuple[tuple[float, float], tuple[float, float]],
    grid: tuple[int, int],
    max_iter: int = 200,
    cap: float = DEFAULT_CAP,
    imag_offset: tuple[float, float] = (0.0, 0.0),
    threads: int = 1,
) -> np.ndarray:
    """Occupancy of the bounded-orbit set on a real 2-D slice.

    Cell (i, j) is marked when the orbit of the centre (a_j + i*off_x,
    b_i + i*off_y) stays under the cap for max_iter steps.  Returns a bool
    array of shape (grid[1], grid[0]), rows indexed by the y-bound.
    """
    (a0, a1), (b0, b1) = box
    na, nb = grid
    aa = a0 + (np.arange(na) + 0.5) * (a1 - a0) / na
    bb = b0 + (np.arange(nb) + 0.5) * (b1 - b0) / nb
    xs = (aa[None, :] + 1j * imag_offset[0]).repeat(nb, axis=0).ravel()
    ys = (bb[:, None] + 1j * imag_offset[1]).repeat(na, axis=1).ravel()

    def run_chunk(lo: int, hi: int) -> np.ndarray:
        codes, _ = orbit_verdicts(chain, xs[lo:hi], ys[lo:hi], max_iter, target=None, cap=cap)
        return codes != VERDICT_ESCAPED

    bounds = _chunk_bounds(xs.shape[0], threads)
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda b: run_chunk(*b), bounds))
    else:
        parts = [run_chunk(*b) for b in bounds]
    return np.concatenate(parts).reshape(nb, na)


# -- gallery: the sphere map -------------------------------------------------


def sphere_map(m: int, z: complex) -> complex:
    """Closed form of the m-th iterate of z -> z / (1 + z): z / (1 + m z)."""
    denom = 1.0 + m * z
    if abs(denom) <= 1e-12 * (1.0 + abs(m * z)):
        raise PoleHit(m)
    return z / denom


def sphere_map_iterate(m: int, z: complex) -> complex:
    """m-fold iteration of z -> z / (1 + z), raising PoleHit at 1 + z_k = 0."""
    w = complex(z)
    for k in range(m):
        denom = 1.0 + w
        if abs(denom) <= 1e-12 * (1.0 + abs(w)):
            raise PoleHit(k)
        w = w / denom
    return w


def sphere_map_iterate_check(z: complex, m: int) -> float:
    """|closed form - m-fold iteration|."""
    return abs(sphere_map(m, z) - sphere_map_iterate(m, z))


def sphere_residuals_batch(zs: np.ndarray, m: int) -> np.ndarray:
    """Vectorised residuals of the closed-form iterate over a batch."""
    w = np.array(zs, dtype=complex, copy=True)
    for _ in range(m):
        w = w / (1.0 + w)
    closed = zs / (1.0 + m * zs)
    return np.abs(w - closed)


def sample_unit_disc_away_from_poles(
    seed: int, n: int, m: int, min_pole_distance: float = 1e-3
) -> np.ndarray:
    """Uniform unit-disc samples at distance >= min_pole_distance from every
    pole -1/k, k = 1..m, of the closed-form iterate."""
    g = make_generator(seed)
    poles = -1.0 / np.arange(1, m + 1)
    out = np.empty(n, dtype=complex)
    got = 0
    while got < n:
        batch = max(n - got, 256)
        rho = np.sqrt(g.random(batch))
        phi = 2 * np.pi * g.random(batch)
        z = rho * np.exp(1j * phi)
        ok = np.ones(batch, dtype=bool)
        for lo in range(0, len(poles), 2048):
            blk = poles[lo : lo + 2048]
            ok &= np.min(np.abs(z[:, None] - blk[None, :]), axis=1) >= min_pole_distance
        z = z[ok]
        take = min(len(z), n - got)
        out[got : got + take] = z[:take]
        got += take
    return out


# -- gallery: the planar homeomorphism ----------------------------------------


def psi(theta):
    """theta (4 pi - theta) / (2 pi); fixes 0 and 2 pi, pushes (0, 2 pi) up."""
    return theta * (4.0 * np.pi - theta) / (2.0 * np.pi)


def psi_iterate(theta: float, n: int) -> float:
    t = float(theta)
    for _ in range(n):
        t = t * (4.0 * math.pi - t) / (2.0 * math.pi)
    return t


def planar_homeo(z):
    """The plane map with fixed point 1: pointwise but non-uniform attraction.

    Outside the unit disc (r >= 1): r e^{i theta} -> ((r+1)/2) e^{i psi(theta)}.
    Inside, each circle through 1 tangent to the unit circle is preserved and
    its angle coordinate (about the circle centre) is pushed by psi; the
    circle through z has centre 1 - s with s = |z-1|^2 / (2 - 2 Re z).
    Accepts scalars or complex arrays.
    """
    scalar = np.isscalar(z) or isinstance(z, complex)
    zz = np.asarray(z, dtype=complex)
    r = np.abs(zz)
    out = np.empty_like(zz)

    outer = r >= 1.0
    theta = np.mod(np.angle(zz[outer]), 2.0 * np.pi)
    out[outer] = (r[outer] + 1.0) / 2.0 * np.exp(1j * psi(theta))

    inner = ~outer
    zi = zz[inner]
    near_one = np.abs(zi - 1.0) < 1e-14
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.abs(zi - 1.0) ** 2 / (2.0 - 2.0 * zi.real)
    c = 1.0 - s
    ang = np.mod(np.angle(zi - c), 2.0 * np.pi)
    w = c + s * np.exp(1j * psi(ang))
    w[near_one] = 1.0
    out[inner] = w
    return complex(out[()]) if scalar else out


def nonuniformity_witness(m: int, precision: float = 1e-15) -> tuple[float, complex]:
    """Unit-circle point near 1 whose m-th planar image has angle near pi.

    Bisection on theta: psi^m is increasing from 0, so the smallest theta
    with psi^m(theta) = pi exists; on the unit circle the radius is fixed,
    so the angle alone decides |f^m(z) - 1| > 1.  Raises NotFound once the
    bracket collapses below floating-point resolution.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    lo, hi = 0.0, 2.0 * math.pi * 0.999
    if psi_iterate(hi, m) < math.pi:
        raise NotFound("psi^m never reaches pi on the bracket", deepest=hi)
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if psi_iterate(mid, m) < math.pi:
            lo = mid
        else:
            hi = mid
    theta = hi
    val = psi_iterate(theta, m)
    if not (math.pi / 2 <= val <= 3 * math.pi / 2):
        raise NotFound(
            f"bisection exhausted precision at theta = {theta:.3e} (psi^m = {val:.3e})",
            deepest=theta,
        )
    return theta, complex(math.cos(theta), math.sin(theta))

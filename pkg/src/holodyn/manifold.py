"""Local stable manifolds of saddles and their globalisation by pullback.

The local stable manifold is computed as the fixed point of a graph
transform in adapted eigencoordinates.  Write points as

    z = p + s * v_s + t * v_u

with v_s / v_u the stable / unstable unit eigenvectors at the saddle p.
The manifold is a graph t = gamma(s) over the disc |s| <= delta.  One
transform step replaces gamma by the map s -> t solving

    t'(s, t) = gamma(s'(s, t)),

i.e. the point on the vertical fibre over s whose image lies on the current
graph; the solve runs as a vectorised 1-D complex Newton iteration across
the whole mesh.  Starting from gamma = 0 (the linear stable subspace) the
iteration contracts at rate ~ max(|lambda_s|, 1/|lambda_u|) for small delta,
which is monitored: a sup-norm change ratio above the contraction limit
raises DeltaTooLarge.

Off-mesh values of gamma use a complex least-squares polynomial fit of
degree min(6, n_r - 1); graphs here are holomorphic so low-degree jets on a
small disc converge fast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import (
    AutoChain,
    Classification,
    FixedPointInfo,
    DEFAULT_CAP,
    Point,
    find_fixed_point,
)
from .errors import (
    DeltaTooLarge,
    Inconclusive,
    MeshMismatch,
    NoConvergence,
    NotASaddle,
    Overflow,
)


def polar_mesh(delta: float, n_r: int, n_theta: int) -> np.ndarray:
    """Center plus n_r rings of n_theta angles, fixed deterministic order."""
    radii = delta * np.arange(1, n_r + 1) / n_r
    angles = 2.0 * np.pi * np.arange(n_theta) / n_theta
    pts = [0j]
    for r in radii:
        pts.extend(r * np.exp(1j * angles))
    return np.asarray(pts, dtype=complex)


def _fit_degree(n_r: int) -> int:
    return min(6, max(1, n_r - 1))


def _lsq_fit(s: np.ndarray, t: np.ndarray, degree: int) -> np.ndarray:
    vand = np.vander(s, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(vand, t, rcond=None)
    return coeffs


def _horner(coeffs: np.ndarray, z):
    acc = np.zeros_like(z) if isinstance(z, np.ndarray) else 0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _deriv_coeffs(coeffs: np.ndarray) -> np.ndarray:
    if len(coeffs) <= 1:
        return np.zeros(1, dtype=complex)
    return coeffs[1:] * np.arange(1, len(coeffs))


@dataclass(eq=False)
class LocalGraph:
    """Discretised graph of the local stable manifold over the disc |s|<=delta."""

    base_point: Point
    stable_direction: np.ndarray
    unstable_direction: np.ndarray
    delta: float
    epsilon: float
    s_grid: np.ndarray
    t_values: np.ndarray
    mesh: tuple[int, int]
    iterations: int
    sup_changes: tuple[float, ...]
    fit_coeffs: np.ndarray = field(repr=False)

    @property
    def grid(self) -> list[tuple[complex, complex]]:
        return list(zip(self.s_grid.tolist(), self.t_values.tolist()))

    def gamma(self, s):
        return _horner(self.fit_coeffs, s)

    def gamma_prime(self, s):
        return _horner(_deriv_coeffs(self.fit_coeffs), s)

    def to_ambient(self, s, t):
        bx, by = self.base_point
        vs, vu = self.stable_direction, self.unstable_direction
        return bx + s * vs[0] + t * vu[0], by + s * vs[1] + t * vu[1]

    def to_coords(self, x, y):
        bx, by = self.base_point
        e = np.array(
            [
                [self.stable_direction[0], self.unstable_direction[0]],
                [self.stable_direction[1], self.unstable_direction[1]],
            ],
            dtype=complex,
        )
        det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
        dx, dy = x - bx, y - by
        s = (e[1, 1] * dx - e[0, 1] * dy) / det
        t = (-e[1, 0] * dx + e[0, 0] * dy) / det
        return s, t

    def sample_points(self) -> np.ndarray:
        xs, ys = self.to_ambient(self.s_grid, self.t_values)
        return np.stack([xs, ys], axis=1)

    def with_t_offset(self, offset: complex) -> "LocalGraph":
        t = self.t_values + offset
        return LocalGraph(
            base_point=self.base_point,
            stable_direction=self.stable_direction,
            unstable_direction=self.unstable_direction,
            delta=self.delta,
            epsilon=self.epsilon,
            s_grid=self.s_grid.copy(),
            t_values=t,
            mesh=self.mesh,
            iterations=self.iterations,
            sup_changes=self.sup_changes,
            fit_coeffs=_lsq_fit(self.s_grid, t, _fit_degree(self.mesh[0])),
        )


def local_stable_graph(
    chain: AutoChain,
    fp: FixedPointInfo,
    delta: float,
    mesh: tuple[int, int] = (10, 16),
    tol: float = 1e-9,
    max_iter: int = 80,
    epsilon: float | None = None,
    contraction_limit: float = 0.95,
    slope_cap: float = 1.0,
) -> LocalGraph:
    """Graph-transform fixed point; see the module docstring for the scheme."""
    if fp.classification is not Classification.SADDLE:
        raise NotASaddle(f"fixed point is {fp.classification.value}")
    if delta <= 0 or tol <= 0:
        raise ValueError("delta and tol must be positive")
    n_r, n_theta = mesh
    vs, vu = fp.stable_direction, fp.unstable_direction
    bx, by = fp.location
    e = np.array([[vs[0], vu[0]], [vs[1], vu[1]]], dtype=complex)
    det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
    ei = np.array([[e[1, 1], -e[0, 1]], [-e[1, 0], e[0, 0]]], dtype=complex) / det

    s_grid = polar_mesh(delta, n_r, n_theta)
    t_vals = np.zeros_like(s_grid)
    degree = _fit_degree(n_r)
    changes: list[float] = []
    iterations = 0

    for iterations in range(1, max_iter + 1):
        coeffs = _lsq_fit(s_grid, t_vals, degree)
        dcoeffs = _deriv_coeffs(coeffs)
        t_cur = t_vals.copy()
        for _ in range(16):
            x = bx + s_grid * vs[0] + t_cur * vu[0]
            y = by + s_grid * vs[1] + t_cur * vu[1]
            fx, fy = chain.apply(x, y)
            dx, dy = fx - bx, fy - by
            s1 = ei[0, 0] * dx + ei[0, 1] * dy
            t1 = ei[1, 0] * dx + ei[1, 1] * dy
            residual = t1 - _horner(coeffs, s1)
            j11, j12, j21, j22 = chain.differential_batch(x, y)
            dfx = j11 * vu[0] + j12 * vu[1]
            dfy = j21 * vu[0] + j22 * vu[1]
            ds1 = ei[0, 0] * dfx + ei[0, 1] * dfy
            dt1 = ei[1, 0] * dfx + ei[1, 1] * dfy
            slope = dt1 - _horner(dcoeffs, s1) * ds1
            safe = np.abs(slope) > 1e-14
            step = np.where(safe, residual / np.where(safe, slope, 1.0), 0.0)
            t_cur = t_cur - step
            if float(np.max(np.abs(step))) < 1e-14 * (1.0 + float(np.max(np.abs(t_cur)))):
                break
        change = float(np.max(np.abs(t_cur - t_vals)))
        t_vals = t_cur
        if changes and changes[-1] > 10 * tol and changes[-1] > 0:
            ratio = change / changes[-1]
            if ratio > contraction_limit:
                raise DeltaTooLarge(
                    f"contraction estimate {ratio:.3f} exceeds {contraction_limit}; shrink delta",
                    ratio=ratio,
                )
        changes.append(change)
        if change < tol:
            break
    else:
        raise NoConvergence(
            f"graph transform did not reach tol {tol:.1e} in {max_iter} iterations",
            residual=changes[-1] if changes else None,
        )

    if float(np.max(np.abs(t_vals))) > delta * slope_cap:
        raise DeltaTooLarge(
            f"graph exceeds slope cap {slope_cap} over the {delta}-disc; shrink delta"
        )

    return LocalGraph(
        base_point=fp.location,
        stable_direction=vs,
        unstable_direction=vu,
        delta=delta,
        epsilon=epsilon if epsilon is not None else 2.0 * delta,
        s_grid=s_grid,
        t_values=t_vals,
        mesh=mesh,
        iterations=iterations,
        sup_changes=tuple(changes),
        fit_coeffs=_lsq_fit(s_grid, t_vals, degree),
    )


def local_stable_graph_auto(chain, fp, delta, max_halvings: int = 6, **kwargs) -> LocalGraph:
    """local_stable_graph with automatic delta halving on DeltaTooLarge."""
    last: DeltaTooLarge | None = None
    d = delta
    for _ in range(max_halvings + 1):
        try:
            return local_stable_graph(chain, fp, d, **kwargs)
        except DeltaTooLarge as exc:
            last = exc
            d *= 0.5
    raise last  # type: ignore[misc]


def graph_residual(chain: AutoChain, graph: LocalGraph) -> float:
    """Max distance from f(graph point) to the graph, over images in the bidisc."""
    x, y = graph.to_ambient(graph.s_grid, graph.t_values)
    fx, fy = chain.apply(x, y)
    s1, t1 = graph.to_coords(fx, fy)
    inside = (np.abs(s1) <= graph.delta) & (np.abs(t1) <= graph.delta)
    if not np.any(inside):
        return 0.0
    dev = np.abs(t1[inside] - graph.gamma(s1[inside]))
    return float(np.max(dev))


@dataclass(eq=False)
class PointCloud:
    """Points in C^2 with a record of how they were produced."""

    points: np.ndarray  # shape (n, 2) complex
    provenance: dict
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.points)


def pullback_cloud(
    chain: AutoChain,
    graph: LocalGraph,
    depth: int,
    cap: float = DEFAULT_CAP,
) -> PointCloud:
    """Apply the exact inverse depth times to every graph sample.

    Points that overflow the cap are dropped and counted, not fatal.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    xs, ys = graph.to_ambient(graph.s_grid, graph.t_values)
    xs = np.asarray(xs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    ok = np.ones(xs.shape, dtype=bool)
    inv = chain.inverted()
    for _ in range(depth):
        xs, ys, step_ok = inv.evaluate_batch(xs, ys, cap=cap)
        ok &= step_ok
    pts = np.stack([xs[ok], ys[ok]], axis=1)
    return PointCloud(
        points=pts,
        provenance={
            "depth": depth,
            "mesh": graph.mesh,
            "delta": graph.delta,
            "base_point": graph.base_point,
        },
        dropped=int(np.count_nonzero(~ok)),
    )


def is_in_stable(
    chain: AutoChain,
    fp: FixedPointInfo,
    graph: LocalGraph,
    z: Point,
    max_iter: int = 200,
    tol: float = 1e-6,
    cap: float = DEFAULT_CAP,
) -> bool:
    """True iff some forward iterate lands on the local graph within tol.

    Returns False when the orbit escapes the cap; raises Inconclusive when
    the budget runs out with neither outcome.
    """
    x, y = complex(z[0]), complex(z[1])
    for _ in range(max_iter + 1):
        s, t = graph.to_coords(x, y)
        if abs(s) <= graph.delta and abs(t) <= graph.delta:
            if abs(t - graph.gamma(s)) < tol:
                return True
        try:
            x, y = chain.evaluate((x, y), cap=cap)
        except Overflow:
            return False
    raise Inconclusive(
        f"orbit neither escaped nor landed within {tol:.1e} of the graph in {max_iter} steps"
    )


@dataclass(eq=False)
class DensityReport:
    box: tuple[tuple[float, float], ...]
    cells_per_axis: int
    depth: int | None
    occupied: int
    total: int
    fraction: float


def _normalize_box(box) -> tuple[tuple[float, float], ...]:
    if (
        isinstance(box, (tuple, list))
        and len(box) == 2
        and all(isinstance(v, (int, float)) for v in box)
    ):
        b = (float(box[0]), float(box[1]))
        return (b, b, b, b)
    out = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(out) != 4:
        raise ValueError("box must be one (lo, hi) pair or four of them")
    for lo, hi in out:
        if not hi > lo:
            raise ValueError("box must be nondegenerate")
    return out


def occupied_cells(points: np.ndarray, box, cells_per_axis: int) -> set[tuple[int, ...]]:
    """Indices of 4-real-dimensional grid cells hit by at least one point."""
    bounds = _normalize_box(box)
    if len(points) == 0:
        return set()
    comps = [points[:, 0].real, points[:, 0].imag, points[:, 1].real, points[:, 1].imag]
    idx = []
    inside = np.ones(len(points), dtype=bool)
    for comp, (lo, hi) in zip(comps, bounds):
        k = np.floor((comp - lo) / (hi - lo) * cells_per_axis).astype(int)
        on_hi = comp == hi
        k[on_hi] = cells_per_axis - 1
        inside &= (comp >= lo) & (comp <= hi)
        idx.append(k)
    cells = set()
    stacked = np.stack(idx, axis=1)
    for row in stacked[inside]:
        cells.add(tuple(int(v) for v in row))
    return cells


def density_probe(cloud: PointCloud | np.ndarray, box, cells_per_axis: int) -> DensityReport:
    """Fraction of 4-D grid cells containing at least one cloud point."""
    if cells_per_axis <= 0:
        raise ValueError("cells_per_axis must be positive")
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud)
    depth = cloud.provenance.get("depth") if isinstance(cloud, PointCloud) else None
    cells = occupied_cells(pts, box, cells_per_axis)
    total = cells_per_axis**4
    return DensityReport(
        box=_normalize_box(box),
        cells_per_axis=cells_per_axis,
        depth=depth,
        occupied=len(cells),
        total=total,
        fraction=len(cells) / total,
    )


def density_sweep(
    chain: AutoChain,
    graph: LocalGraph,
    depths: Sequence[int],
    box,
    cells_per_axis: int,
    cumulative: bool = True,
) -> list[DensityReport]:
    """Density per pullback depth; cumulative unions make growth structural.

    The depth-n stage measures the union of clouds at depths <= n (the local
    graph is forward invariant, so the union is the honest discrete stand-in
    for the increasing sets f^{-n}(graph)).
    """
    total = cells_per_axis**4
    cells: set[tuple[int, ...]] = set()
    reports = []
    for depth in depths:
        cloud = pullback_cloud(chain, graph, depth)
        new_cells = occupied_cells(cloud.points, box, cells_per_axis)
        if cumulative:
            cells |= new_cells
        else:
            cells = new_cells
        reports.append(
            DensityReport(
                box=_normalize_box(box),
                cells_per_axis=cells_per_axis,
                depth=depth,
                occupied=len(cells),
                total=total,
                fraction=len(cells) / total,
            )
        )
    return reports


def occupancy_image(points: np.ndarray, box, cells_per_axis: int, plane: tuple[int, int]):
    """2-D projected occupancy (bool grid) of the 4-D cell set."""
    cells = occupied_cells(points, box, cells_per_axis)
    img = np.zeros((cells_per_axis, cells_per_axis), dtype=bool)
    a, b = plane
    for cell in cells:
        img[cell[b], cell[a]] = True
    return img


def graph_distance(g1: LocalGraph, g2: LocalGraph) -> float:
    """Sup over shared samples of |t1 - t2| plus the base-point offset.

    For graphs over a common disc this dominates the Hausdorff distance of
    the graph sets.  Requires identical s-meshes.
    """
    if g1.s_grid.shape != g2.s_grid.shape or not np.allclose(
        g1.s_grid, g2.s_grid, rtol=0, atol=1e-12
    ):
        raise MeshMismatch("graphs use different meshes")
    base_off = math.hypot(
        abs(g1.base_point[0] - g2.base_point[0]), abs(g1.base_point[1] - g2.base_point[1])
    )
    return float(np.max(np.abs(g1.t_values - g2.t_values))) + base_off


def hausdorff_distance(a: np.ndarray, b: np.ndarray, chunk: int = 4096) -> float:
    """Symmetric max-min distance between point clouds in C^2 (brute force)."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("hausdorff_distance needs nonempty clouds")

    def directed(p: np.ndarray, q: np.ndarray) -> float:
        worst = 0.0
        for i in range(0, len(p), chunk):
            blk = p[i : i + chunk]
            d2 = (
                np.abs(blk[:, None, 0] - q[None, :, 0]) ** 2
                + np.abs(blk[:, None, 1] - q[None, :, 1]) ** 2
            )
            worst = max(worst, float(np.sqrt(d2.min(axis=1).max())))
        return worst

    return max(directed(a, b), directed(b, a))


@dataclass(eq=False)
class StabilityRow:
    t: float
    fp_offset: float
    graph_dist: float
    cloud_dist: float


def stability_experiment(
    chain: AutoChain,
    fp: FixedPointInfo,
    family: Callable[[float], AutoChain],
    t_values: Sequence[float],
    delta: float,
    mesh: tuple[int, int] = (10, 16),
    tol: float = 1e-9,
    pullback_depth: int = 4,
    newton_tol: float = 1e-12,
) -> list[StabilityRow]:
    """Graph and cloud distances for a perturbation family.

    The perturbed fixed point is tracked by Newton seeded at the
    unperturbed one; distances are graph_distance for the local graphs and
    the symmetric Hausdorff distance for depth-n pullback clouds.
    """
    base_graph = local_stable_graph(chain, fp, delta, mesh=mesh, tol=tol)
    base_cloud = pullback_cloud(chain, base_graph, pullback_depth)
    rows = []
    for t in t_values:
        pert = family(t)
        fp_t = find_fixed_point(pert, fp.location, tol=newton_tol)
        graph_t = local_stable_graph(pert, fp_t, delta, mesh=mesh, tol=tol)
        cloud_t = pullback_cloud(pert, graph_t, pullback_depth)
        rows.append(
            StabilityRow(
                t=float(t),
                fp_offset=math.hypot(
                    abs(fp_t.location[0] - fp.location[0]),
                    abs(fp_t.location[1] - fp.location[1]),
                ),
                graph_dist=graph_distance(base_graph, graph_t),
                cloud_dist=hausdorff_distance(base_cloud.points, cloud_t.points),
            )
        )
    return rows


def sheary_perturbation_family(
    chain: AutoChain, coeffs_of_t: Callable[[float], Sequence[complex]]
) -> Callable[[float], AutoChain]:
    """Family t -> chain followed by a ShearY with t-dependent coefficients."""
    from .core import ShearY

    def make(t: float) -> AutoChain:
        if t == 0:
            return chain
        return chain.then(ShearY(tuple(coeffs_of_t(t))))

    return make

from __future__ import annotations

import numpy as np
import pytest

from holodyn.core import diag_linear_chain, find_fixed_point
from holodyn.errors import DeltaTooLarge, Inconclusive, MeshMismatch, NotASaddle
from holodyn.manifold import (
    PointCloud,
    density_probe,
    density_sweep,
    graph_distance,
    graph_residual,
    hausdorff_distance,
    is_in_stable,
    local_stable_graph,
    local_stable_graph_auto,
    pullback_cloud,
    sheary_perturbation_family,
    stability_experiment,
)


@pytest.fixture(scope="module")
def linear_saddle():
    ch = diag_linear_chain(0.5, 2.0)
    fp = find_fixed_point(ch, (0.1, 0.1))
    return ch, fp


def test_linear_saddle_graph_is_zero(linear_saddle):
    ch, fp = linear_saddle
    g = local_stable_graph(ch, fp, 0.5)
    assert float(np.max(np.abs(g.t_values))) < 1e-12
    assert graph_residual(ch, g) == 0.0


def test_not_a_saddle_raises(henon075):
    fp = find_fixed_point(henon075, (0.4, 0.4))
    with pytest.raises(NotASaddle):
        local_stable_graph(henon075, fp, 0.1)


def test_henon_graph_tangent_to_eigenvector(henon075, henon_graph):
    # in eigencoordinates the stable eigenvector is the s-axis: the fitted
    # linear coefficient of gamma must vanish to first order
    assert abs(henon_graph.fit_coeffs[1]) < 1e-6
    assert graph_residual(henon075, henon_graph) < 1e-8


def test_graph_mesh_refinement_consistency(henon075, henon_saddle, henon_graph):
    fine = local_stable_graph(henon075, henon_saddle, 0.1, mesh=(20, 32), tol=1e-10)
    # shared samples: the coarse radii/angles embed in the doubled mesh
    coarse = {
        (round(s.real, 14), round(s.imag, 14)): t
        for s, t in zip(henon_graph.s_grid.tolist(), henon_graph.t_values.tolist())
    }
    shared = 0
    for s, t in zip(fine.s_grid.tolist(), fine.t_values.tolist()):
        key = (round(s.real, 14), round(s.imag, 14))
        if key in coarse:
            shared += 1
            assert abs(coarse[key] - t) < 1e-8
    assert shared > len(coarse) // 2


def test_graph_transform_contraction_is_geometric(henon_graph):
    changes = [c for c in henon_graph.sup_changes if c > 1e-9]
    started = False
    for prev, cur in zip(changes, changes[1:]):
        if prev < 0.5:
            started = True
        if started:
            assert cur < prev
    assert henon_graph.iterations <= 60


def test_delta_too_large_raises_and_auto_shrink_recovers(henon075, henon_saddle):
    with pytest.raises(DeltaTooLarge):
        local_stable_graph(henon075, henon_saddle, 3.0, mesh=(8, 12))
    g = local_stable_graph_auto(henon075, henon_saddle, 3.0, mesh=(8, 12))
    assert g.delta < 3.0


def test_residual_detects_offset_graph(henon075, henon_graph):
    bad = henon_graph.with_t_offset(1e-3)
    assert graph_residual(henon075, bad) >= 1e-4


def test_pullback_depth_zero_is_identity(henon075, henon_graph):
    cloud = pullback_cloud(henon075, henon_graph, 0)
    pts = henon_graph.sample_points()
    assert np.allclose(cloud.points, pts)
    assert cloud.dropped == 0


def test_pullback_linear_saddle_oracle(linear_saddle):
    ch, fp = linear_saddle
    g = local_stable_graph(ch, fp, 0.5)
    cloud = pullback_cloud(ch, g, 1)
    # inverse of diag(0.5, 2) doubles the stable coordinate: (s, 0) -> (2s, 0)
    want_x = 2.0 * g.sample_points()[:, 0]
    assert np.allclose(cloud.points[:, 0], want_x)
    assert np.allclose(cloud.points[:, 1], 0.0)


def test_pullback_points_lie_in_stable_set(henon075, henon_saddle, henon_graph):
    # cap 1e3: points that transit larger magnitudes lose the manifold to
    # round-off (error ~ mag^2 * eps amplified along the unstable direction)
    # and are dropped by the pullback as the overflow policy intends
    cloud = pullback_cloud(henon075, henon_graph, 8, cap=1e3)
    assert len(cloud) > 50
    assert cloud.dropped > 0
    step = max(1, len(cloud) // 15)
    for p in cloud.points[::step]:
        assert is_in_stable(henon075, henon_saddle, henon_graph, (p[0], p[1]), max_iter=40)


def test_pullback_forward_consistency(henon075, henon_graph):
    depth = 5
    cloud = pullback_cloud(henon075, henon_graph, depth)
    p = cloud.points[7]
    x, y = complex(p[0]), complex(p[1])
    for _ in range(depth):
        x, y = henon075.apply(x, y)
    s, t = henon_graph.to_coords(x, y)
    assert abs(s) <= henon_graph.delta + 1e-9
    assert abs(t - henon_graph.gamma(s)) < 1e-6


def test_is_in_stable_cases(henon075, henon_saddle, henon_graph):
    assert is_in_stable(henon075, henon_saddle, henon_graph, henon_saddle.location)
    vu = henon_saddle.unstable_direction
    z = (
        henon_saddle.location[0] + 0.1 * vu[0],
        henon_saddle.location[1] + 0.1 * vu[1],
    )
    assert not is_in_stable(henon075, henon_saddle, henon_graph, z, max_iter=100)


def test_is_in_stable_inconclusive():
    # neutral rotation-like map: orbit neither escapes nor approaches the graph
    ch = diag_linear_chain(0.5, 2.0)
    fp = find_fixed_point(ch, (0.1, 0.1))
    g = local_stable_graph(ch, fp, 0.5)
    neutral = diag_linear_chain(1.0j, -1.0j)
    with pytest.raises(Inconclusive):
        is_in_stable(neutral, fp, g, (40.0, 40.0), max_iter=30)


def test_density_probe_extremes():
    cells = 4
    lo, hi = -1.0, 1.0
    width = (hi - lo) / cells
    centers = lo + (np.arange(cells) + 0.5) * width
    pts = []
    for a in centers:
        for b in centers:
            for c in centers:
                for d in centers:
                    pts.append((a + 1j * b, c + 1j * d))
    full = np.array(pts, dtype=complex)
    rep = density_probe(full, (lo, hi), cells)
    assert rep.fraction == 1.0
    empty = PointCloud(points=np.empty((0, 2), dtype=complex), provenance={})
    assert density_probe(empty, (lo, hi), cells).fraction == 0.0


def test_density_monotone_in_depth(henon075, henon_saddle, henon_graph):
    reports = density_sweep(henon075, henon_graph, range(1, 6), (-2.0, 2.0), 10)
    fracs = [r.fraction for r in reports]
    assert all(b >= a for a, b in zip(fracs, fracs[1:]))
    assert any(b > a for a, b in zip(fracs, fracs[1:]))


def test_graph_distance_identity_and_shift(henon_graph):
    assert graph_distance(henon_graph, henon_graph) == 0.0
    shifted = henon_graph.with_t_offset(0.25j)
    assert abs(graph_distance(henon_graph, shifted) - 0.25) < 1e-12
    assert graph_distance(shifted, henon_graph) == graph_distance(henon_graph, shifted)


def test_graph_distance_mesh_mismatch(henon075, henon_saddle, henon_graph):
    other = local_stable_graph(henon075, henon_saddle, 0.05)
    with pytest.raises(MeshMismatch):
        graph_distance(henon_graph, other)


def test_centered_sheary_example(henon075, henon_saddle, henon_graph):
    # q(x) = t (x - 1.5)^2 fixes the saddle exactly but bends the graph
    fam = sheary_perturbation_family(henon075, lambda t: (2.25 * t, -3.0 * t, t))
    pert = fam(1e-3)
    fp_t = find_fixed_point(pert, henon_saddle.location)
    g_t = local_stable_graph(pert, fp_t, 0.1)
    d = graph_distance(henon_graph, g_t)
    assert 0.0 < d < 0.05


def test_stability_experiment_decreasing(henon075, henon_saddle):
    fam = sheary_perturbation_family(henon075, lambda t: (0.0, 0.0, t))
    rows = stability_experiment(
        henon075, henon_saddle, fam, [1e-2, 1e-3, 0.0], delta=0.1, mesh=(8, 12),
        pullback_depth=2,
    )
    assert rows[0].fp_offset > rows[1].fp_offset > 0
    assert rows[0].graph_dist > rows[1].graph_dist > 0
    assert rows[0].cloud_dist > rows[1].cloud_dist > 0
    zero = rows[2]
    assert zero.fp_offset == 0.0
    assert zero.graph_dist == 0.0
    assert zero.cloud_dist == 0.0


def test_hausdorff_distance_brute_force_oracle():
    a = np.array([(0.0, 0.0), (1.0, 0.0)], dtype=complex)
    b = np.array([(0.0, 0.0), (1.0, 3.0)], dtype=complex)
    # by enumeration: directed(a->b) = 1 (from (1,0) to (0,0)); directed(b->a) = 3
    assert hausdorff_distance(a, b) == pytest.approx(3.0)
    assert hausdorff_distance(a, a) == 0.0

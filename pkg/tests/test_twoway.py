import numpy as np
import pytest

from kwaypart.cuts import conductance
from kwaypart.eigen import top_k_eigenpairs
from kwaypart.graph import WeightedGraph, complete_graph, disjoint_union, gen_mesh, normalize, path_graph
from kwaypart.twoway import default_radius, fiedler_sweep, sweep_conductances


def barbell(m=5):
    g = disjoint_union([complete_graph(m), complete_graph(m)])
    i, j, _ = g.edges()
    return WeightedGraph.from_edges(2 * m, np.r_[i, m - 1], np.r_[j, m])


def test_barbell_separates_cliques():
    res = fiedler_sweep(barbell())
    assert res.h_value == pytest.approx(1 / 21, abs=1e-14)
    assert sorted(res.side.tolist()) in ([0, 1, 2, 3, 4], [5, 6, 7, 8, 9])


def test_p3_tie_goes_to_earlier_split():
    res = fiedler_sweep(path_graph(3), window="full")
    assert res.h_value == pytest.approx(1.0)
    assert res.cut_position == 1


def test_sweep_curve_matches_conductance(rng):
    g = gen_mesh(5, 0.6)
    order = rng.permutation(g.n)
    curve = sweep_conductances(g, order)
    for p in range(1, g.n):
        assert curve[p - 1] == pytest.approx(conductance(g, order[:p]), abs=1e-14)


def test_window_contains_sign_change_and_full_is_no_worse():
    g = gen_mesh(12, 0.5)
    auto = fiedler_sweep(g)
    full = fiedler_sweep(g, window="full")
    s = int(np.sum(auto.fiedler < 0))
    assert auto.positions.min() <= s <= auto.positions.max()
    assert auto.positions.size <= 2 * default_radius(g.n) + 1
    assert full.h_value <= auto.h_value
    narrow = fiedler_sweep(g, window=2)
    assert narrow.positions.size <= 5


def test_sign_flip_gives_same_cut():
    g = barbell()
    basis = top_k_eigenpairs(normalize(g), 2, gap_warn_threshold=0)
    from kwaypart.eigen import SpectralBasis
    flipped = SpectralBasis(2, basis.eigenvalues, basis.X * np.array([1, -1]), basis.lambda_next,
                            basis.residual_norms)
    a = fiedler_sweep(g, window="full", basis=basis)
    b = fiedler_sweep(g, window="full", basis=flipped)
    assert a.h_value == pytest.approx(b.h_value, abs=1e-14)
    assert {tuple(a.side), tuple(np.setdiff1d(np.arange(10), a.side))} == \
        {tuple(b.side), tuple(np.setdiff1d(np.arange(10), b.side))}


def test_disconnected_rejected():
    with pytest.raises(ValueError, match="disconnected"):
        fiedler_sweep(disjoint_union([complete_graph(3), complete_graph(3)]))


def test_to_partition():
    p = fiedler_sweep(barbell()).to_partition()
    assert p.k == 2 and sorted(p.sizes().tolist()) == [5, 5]

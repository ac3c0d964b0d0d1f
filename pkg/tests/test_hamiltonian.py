import numpy as np
import pytest

from bikitaev.algebras import builtin
from bikitaev.errors import DimensionCap, ProjectorCheckFailed
from bikitaev.hamiltonian import (
    ground_space,
    hamiltonian,
    integrality_residual,
    metric_inner,
    model,
    projectors,
    protected_projector,
    spectrum,
)
from bikitaev.lattice import builtin_graph


@pytest.mark.parametrize("name", ["z2-group", "z3-group", "z2-fun", "s3-fun"])
@pytest.mark.parametrize("graph", ["two_loop", "triangle", "torus-1x1", "minimal"])
def test_projector_properties(name, graph, rng):
    m = model(builtin_graph(graph), builtin(name))
    A, Bp, rep = projectors(m, strict=True, rng=rng)
    assert len(A) == len(m.graph.vertices) and len(Bp) == len(m.graph.faces)
    assert max(rep.values()) <= 1e-10, rep


def test_projector_check_uses_probing_above_cap(rng):
    m = model(builtin_graph("torus-2x1"), builtin("z3-group"))
    _, _, dense = projectors(m, strict=True, rng=rng)
    _, _, probed = projectors(m, strict=True, rng=rng, dense_cap=10, samples=5)
    assert max(dense.values()) <= 1e-10 and max(probed.values()) <= 1e-10


def test_strict_mode_raises_on_failure(rng):
    m = model(builtin_graph("triangle"), builtin("s3-group"))
    with pytest.raises(ProjectorCheckFailed):
        projectors(m, strict=True, rng=rng)
    _, _, rep = projectors(m, strict=False, rng=rng)
    assert rep["hermitian"] <= 1e-10 and rep["commuting"] > 1e-3


@pytest.mark.parametrize("name, graph, dim", [
    ("z2-group", "torus-1x1", 4), ("z2-group", "sphere", 1), ("z3-group", "torus-1x1", 9),
    ("z2-fun", "torus-1x1", 4), ("s3-fun", "sphere", 1),
])
def test_ground_space_dimension(name, graph, dim, rng):
    m = model(builtin_graph(graph), builtin(name))
    r, basis = ground_space(m, rng=rng)
    assert r == dim
    # the basis is orthonormal in the Haar metric
    gram = np.array([[metric_inner(m, a, b) for b in basis] for a in basis])
    np.testing.assert_allclose(gram, np.eye(r), atol=1e-10)


@pytest.mark.parametrize("name", ["z2-group", "z3-group"])
def test_abelian_group_vertex_terms_are_trivial(name):
    # the coadjoint action of an abelian group is trivial, so every A_v = 1
    m = model(builtin_graph("triangle"), builtin(name))
    A, _, _ = projectors(m, check=False)
    for P in A:
        np.testing.assert_allclose(P.to_dense(), np.eye(m.dim), atol=1e-12)


@pytest.mark.parametrize("name, graph", [("z2-group", "two_loop"), ("z3-group", "triangle"),
                                         ("s3-fun", "torus-1x1"), ("z2-fun", "seven_edge")])
def test_ground_dim_equals_projector_trace(name, graph):
    # for commuting self-adjoint projectors the rank of the product is its trace
    m = model(builtin_graph(graph), builtin(name))
    r, _ = ground_space(m)
    tr = np.trace(protected_projector(m).to_dense())
    assert abs(tr - r) <= 1e-8


def test_ground_space_probing_matches_dense(rng):
    m = model(builtin_graph("torus-2x1"), builtin("z2-group"))
    r_dense, _ = ground_space(m, rng=rng)
    r_probe, _ = ground_space(m, dense_cap=8, rng=rng)
    assert r_dense == r_probe
    with pytest.raises(DimensionCap):
        ground_space(m, probe_cap=8)


@pytest.mark.parametrize("name, graph", [("z2-group", "torus-1x1"), ("z3-group", "triangle"),
                                         ("s3-fun", "two_loop"), ("z2-fun", "torus-2x1")])
def test_spectrum_is_integral(name, graph):
    m = model(builtin_graph(graph), builtin(name))
    ev, herm = spectrum(m)
    assert herm <= 1e-10
    assert integrality_residual(ev) <= 1e-9
    assert np.min(ev) >= -1e-9
    zero = int(np.sum(np.abs(ev) < 1e-6))
    assert zero == ground_space(m)[0]


def test_hamiltonian_kills_ground_space():
    m = model(builtin_graph("torus-1x1"), builtin("z3-group"))
    _, basis = ground_space(m)
    Hd = hamiltonian(m).to_dense()
    assert np.max(np.abs(Hd @ basis.T)) <= 1e-10


def test_projector_order_is_irrelevant_when_commuting():
    m = model(builtin_graph("triangle"), builtin("s3-fun"))
    P1 = protected_projector(m).to_dense()
    P2 = protected_projector(m, order="face-vertex").to_dense()
    np.testing.assert_allclose(P1, P2, atol=1e-10)


def test_spectrum_respects_dense_cap():
    with pytest.raises(DimensionCap):
        spectrum(model(builtin_graph("torus-2x1"), builtin("s3-group")), dense_cap=100)


def test_integrality_residual():
    assert integrality_residual([0.0, 1.0, 2.0]) == 0.0
    assert integrality_residual([0.5]) == 0.5
    assert integrality_residual([-1.0]) == 1.0

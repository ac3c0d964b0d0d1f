import json

import numpy as np
import pytest

from bikitaev import hopf
from bikitaev.algebras import algebra_from_dict, algebra_to_dict, builtin, load_algebra
from bikitaev.errors import AxiomViolation, NotAGroup, ParseError, ShapeMismatch, AlgebraMismatch
from bikitaev.hopf import (
    Element,
    axiom_residuals,
    cyclic_table,
    dual,
    function_algebra,
    gram_matrix,
    group_algebra,
    haar_checks,
    haar_integral,
    iterated_coproduct,
    new_algebra,
    op_cop,
    pair,
    random_element,
    s3_table,
)


def test_builtin_axioms_exact(algebra):
    res = axiom_residuals(algebra)
    assert set(res) >= {"associativity", "unit", "coassociativity", "counit", "bialgebra", "antipode"}
    assert max(res.values()) <= 1e-12


def test_dual_of_group_algebra_is_function_algebra():
    D, _ = dual(builtin("z2-group"))
    F = function_algebra(cyclic_table(2))
    for name in ("mult", "unit", "comult", "counit", "antipode"):
        np.testing.assert_allclose(getattr(D, name), getattr(F, name), atol=1e-15)


def test_dual_is_an_involution(algebra):
    D, _ = dual(algebra)
    DD, _ = dual(D)
    for name in ("mult", "unit", "comult", "counit", "antipode"):
        np.testing.assert_array_equal(getattr(DD, name), getattr(algebra, name))


def test_cop_involution_and_noncocommutativity():
    F = builtin("s3-fun")
    C = op_cop(F, "cop")
    np.testing.assert_array_equal(op_cop(C, "cop").comult, F.comult)
    assert not np.allclose(C.comult, F.comult)
    np.testing.assert_allclose(C.antipode, np.linalg.inv(F.antipode))


def test_pairing_respects_products(algebra, rng):
    D, P = dual(algebra)
    for _ in range(5):
        phi = random_element(D, rng)
        g, h = random_element(algebra, rng), random_element(algebra, rng)
        lhs = pair(P, hopf.comultiply(phi), hopf.TensorElement((algebra, algebra), np.kron(g.coeffs, h.coeffs)))
        assert abs(lhs - pair(P, phi, g * h)) <= 1e-12 * max(1.0, abs(lhs))


def test_haar_integrals_of_groups():
    table, _ = s3_table()
    l = haar_integral(group_algebra(table)).coeffs
    np.testing.assert_allclose(l, np.full(6, 1 / 6))
    l = haar_integral(function_algebra(table)).coeffs
    np.testing.assert_allclose(l, np.eye(6)[0])


def test_haar_properties(algebra):
    l = haar_integral(algebra)
    assert max(haar_checks(algebra, l.coeffs).values()) <= 1e-12
    assert abs(hopf.counit(l) - 1) <= 1e-12
    assert (l * l).allclose(l)


def test_gram_matrix_is_positive(algebra):
    D, _ = dual(algebra)
    G = gram_matrix(D)
    np.testing.assert_allclose(G, G.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(G).min() > 0


def test_gram_values_for_groups():
    # H* = C(G) for H = C[G]: <l, delta_x delta_y> with l uniform gives 1/|G| on the diagonal
    G = gram_matrix(dual(builtin("s3-group"))[0])
    np.testing.assert_allclose(G, np.eye(6) / 6, atol=1e-15)
    G = gram_matrix(dual(builtin("s3-fun"))[0])
    np.testing.assert_allclose(G, np.eye(6), atol=1e-15)


def test_iterated_coproduct_of_group_like():
    H = builtin("z3-group")
    t = iterated_coproduct(H.basis(2), 2).tensor
    expected = np.zeros((3, 3, 3))
    expected[2, 2, 2] = 1
    np.testing.assert_array_equal(t, expected)


def test_antipode_is_involutive_for_builtins(algebra):
    np.testing.assert_allclose(algebra.antipode @ algebra.antipode, np.eye(algebra.dim), atol=1e-15)


def test_broken_structure_is_rejected():
    H = builtin("z2-group")
    m = H.mult.copy()
    m[1, 1] = [0.0, 1.0]  # g*g = g
    with pytest.raises(AxiomViolation) as info:
        new_algebra(m, H.unit, H.comult, H.counit, H.antipode)
    assert info.value.residual > 0


def test_non_group_table_is_rejected():
    with pytest.raises(NotAGroup):
        group_algebra([[0, 1], [1, 1]])
    with pytest.raises(NotAGroup):
        group_algebra([[0, 1, 2], [1, 0, 2], [2, 2, 0]])


def test_element_arithmetic_and_mismatch():
    H, F = builtin("z2-group"), builtin("z2-fun")
    x = H.basis(1)
    assert (x * x).allclose(H.one())
    assert (2 * x - x).allclose(x)
    with pytest.raises(ShapeMismatch):
        Element(H, np.ones(3))
    with pytest.raises(AlgebraMismatch):
        x + F.basis(0)


def test_json_roundtrip_and_group_shortcut(tmp_path):
    H = builtin("s3-fun")
    data = json.loads(json.dumps(algebra_to_dict(H)))
    H2 = algebra_from_dict(data)
    assert H2.fingerprint() == H.fingerprint()
    path = tmp_path / "z3.json"
    path.write_text(json.dumps({"group": {"cayley": [["e", "a", "b"], ["a", "b", "e"], ["b", "e", "a"]],
                                          "labels": ["e", "a", "b"]}, "flavor": "group_algebra"}))
    assert load_algebra(str(path)).fingerprint() == builtin("z3-group").fingerprint()


def test_load_errors(tmp_path):
    with pytest.raises(ParseError):
        load_algebra("no-such-algebra")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_algebra(str(bad))
    bad.write_text(json.dumps({"dim": 2, "mult": [[1]]}))
    with pytest.raises(ParseError):
        load_algebra(str(bad))


def test_fingerprint_is_stable():
    assert builtin("z2-group").fingerprint() == group_algebra(cyclic_table(2), label="C[Z2]").fingerprint()
    assert builtin("z2-group").fingerprint() != builtin("z2-fun").fingerprint()

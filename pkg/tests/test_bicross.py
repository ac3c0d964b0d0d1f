import numpy as np
import pytest

from bikitaev.algebras import builtin
from bikitaev.bicross import (
    act_on_dual_left,
    act_on_dual_right,
    adjoint_action,
    mirror_bicrossproduct,
    right_coaction,
)
from bikitaev.hopf import Element, axiom_residuals, dual, random_element


def test_mirror_passes_every_check(algebra):
    B = mirror_bicrossproduct(algebra)
    assert B.mh.dim == algebra.dim ** 2
    assert max(B.residuals.values()) <= 1e-12
    assert max(axiom_residuals(B.mh).values()) <= 1e-12


def test_cross_relation_for_group_elements():
    # (1 (x) h)(b (x) 1) = h b h^-1 (x) h for group-like h, b
    H = builtin("s3-group")
    B = mirror_bicrossproduct(H)
    table, inv = H._cache["group"]
    for h in range(6):
        for b in range(6):
            lhs = B.pure(h=H.basis(h)) * B.pure(a=H.basis(b).coeffs)
            c = table[table[h, b], inv[h]]
            rhs = np.zeros(36)
            rhs[c * 6 + h] = 1
            np.testing.assert_allclose(lhs.coeffs, rhs)


def test_coproduct_of_pure_cop_element(rng):
    # Delta(a (x) 1) = (a_2 (x) 1) (x) (a_1 (x) 1)
    H = builtin("s3-fun")
    B = mirror_bicrossproduct(H)
    a = random_element(H, rng)
    lhs = np.einsum("i,ijk->jk", B.pure(a=a.coeffs).coeffs, B.mh.comult)
    d = np.einsum("i,ijk->jk", a.coeffs, H.comult)  # [a1, a2]
    emb = np.stack([B.pure(a=H.basis(i).coeffs).coeffs for i in range(H.dim)])  # [i, M]
    rhs = np.einsum("jk,kx,jy->xy", d, emb, emb)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_counit_factorises(rng):
    H = builtin("z3-group")
    B = mirror_bicrossproduct(H)
    a, h = random_element(H, rng), random_element(H, rng)
    x = B.pure(a=a.coeffs) * B.pure(h=h)
    assert abs(B.mh.counit @ x.coeffs - (H.counit @ a.coeffs) * (H.counit @ h.coeffs)) < 1e-12


def test_adjoint_action_on_groups():
    H = builtin("s3-group")
    table, inv = H._cache["group"]
    for h in range(6):
        for a in range(6):
            out = adjoint_action(H.basis(h), H.basis(a))
            np.testing.assert_allclose(out.coeffs, np.eye(6)[table[table[h, a], inv[h]]])


def test_adjoint_action_of_unit_is_identity(algebra, rng):
    a = random_element(algebra, rng)
    assert adjoint_action(algebra.one(), a).allclose(a)


def test_right_coaction_counit(algebra, rng):
    # (id (x) eps) of the coaction returns the element
    h = random_element(algebra, rng)
    t = right_coaction(h).tensor
    np.testing.assert_allclose(t @ algebra.counit, h.coeffs, atol=1e-12)


def test_dual_actions_are_module_maps(algebra, rng):
    B = mirror_bicrossproduct(algebra)
    D, _ = dual(algebra)
    for _ in range(3):
        x, y = random_element(B.mh, rng), random_element(B.mh, rng)
        phi = random_element(D, rng)
        lhs = act_on_dual_left(B, x * y, phi)
        rhs = act_on_dual_left(B, x, act_on_dual_left(B, y, phi))
        assert lhs.allclose(rhs, atol=1e-10 * np.linalg.norm(lhs.coeffs))
        lhs = act_on_dual_right(B, phi, x * y)
        rhs = act_on_dual_right(B, act_on_dual_right(B, phi, x), y)
        assert lhs.allclose(rhs, atol=1e-10 * np.linalg.norm(lhs.coeffs))


def test_unit_acts_trivially(algebra, rng):
    B = mirror_bicrossproduct(algebra)
    phi = random_element(B.dual, rng)
    assert act_on_dual_left(B, B.mh.one(), phi).allclose(phi)

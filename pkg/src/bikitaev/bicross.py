"""The mirror bicrossproduct ``M(H) = H^cop ⋈ H`` and its actions on ``H*``.

The basis of ``M(H)`` is ordered ``a_i (x) h_j -> i * n + j`` (the ``H^cop``
index is major).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlgebraMismatch, AxiomViolation
from .hopf import (
    STRUCT_TOL,
    Element,
    HopfAlgebra,
    TensorElement,
    _maxabs,
    dual,
    iterated_coproduct_tensor,
    new_algebra,
    op_cop,
)


def _conj_tensor(H: HopfAlgebra) -> np.ndarray:
    """``T[p, b, q, k]``: coefficient of ``e_k`` in ``e_p e_b S(e_q)``."""
    if "conj_tensor" not in H._cache:
        pb = H.mult  # [p, b, t]
        tS = np.einsum("tuk,uq->tqk", H.mult, H.antipode)
        H._cache["conj_tensor"] = np.einsum("pbt,tqk->pbqk", pb, tS, optimize=True)
    return H._cache["conj_tensor"]


def _triple_product(H: HopfAlgebra) -> np.ndarray:
    """``m3[p, q, r, f]``: coefficient of ``e_f`` in ``e_p e_q e_r``."""
    if "m3" not in H._cache:
        H._cache["m3"] = np.einsum("pqt,trf->pqrf", H.mult, H.mult, optimize=True)
    return H._cache["m3"]


def adjoint_action(h: Element, a: Element) -> Element:
    """Left adjoint action ``h |> a = h_1 a S(h_2)``."""
    if h.algebra is not a.algebra:
        raise AlgebraMismatch("adjoint action needs both elements in the same algebra")
    H = h.algebra
    T = _conj_tensor(H)
    dh = H.comul_vec(h.coeffs)
    return Element(H, np.einsum("pq,b,pbqk->k", dh, a.coeffs, T))


def right_coaction(h: Element) -> TensorElement:
    """``Delta_R h = h_2 (x) h_1 S(h_3)`` in ``H (x) H^cop``."""
    H = h.algebra
    d2 = np.tensordot(h.coeffs, iterated_coproduct_tensor(H, 2), axes=([0], [0]))
    # coefficient of e_z in e_{h1} S(e_{h3})
    hs = np.einsum("puz,ur->prz", H.mult, H.antipode)
    out = np.einsum("pqr,prz->qz", d2, hs)
    return TensorElement((H, op_cop(H, "cop")), out)


@dataclass(eq=False)
class Bicrossproduct:
    """Handle bundling ``H``, ``M(H)`` and the two embeddings."""

    base: HopfAlgebra
    mh: HopfAlgebra
    cop: HopfAlgebra
    dual: HopfAlgebra
    embed_cop: np.ndarray
    embed_h: np.ndarray
    left_action: np.ndarray
    right_action: np.ndarray
    residuals: dict

    @property
    def n(self) -> int:
        return self.base.dim

    def pure(self, a=None, h=None) -> Element:
        """The element ``a (x) h`` of ``M(H)``; ``None`` stands for the unit."""
        H = self.base
        av = H.unit if a is None else _coeffs(a, H, self.cop)
        hv = H.unit if h is None else _coeffs(h, H)
        return Element(self.mh, np.kron(av, hv))

    def act_left_matrix(self, x: Element) -> np.ndarray:
        _check(x, self.mh)
        return np.tensordot(x.coeffs, self.left_action, axes=([0], [0]))

    def act_right_matrix(self, x: Element) -> np.ndarray:
        _check(x, self.mh)
        return np.tensordot(x.coeffs, self.right_action, axes=([0], [0]))


def _check(x, H):
    if not isinstance(x, Element) or x.algebra is not H:
        raise AlgebraMismatch(f"expected an element of {H.label}")


def _coeffs(x, *allowed):
    if isinstance(x, Element):
        if not any(x.algebra is A for A in allowed):
            raise AlgebraMismatch(f"element of {x.algebra.label} not accepted here")
        return x.coeffs
    return np.asarray(x, dtype=complex)


def _mirror_tensors(H: HopfAlgebra):
    n = H.dim
    m, S, eps, u = H.mult, H.antipode, H.counit, H.unit
    D2 = iterated_coproduct_tensor(H, 2)
    D3 = iterated_coproduct_tensor(H, 3)
    T = _conj_tensor(H)

    # (a (x) e_j)(b (x) g) = a (j_1 b S j_2) (x) j_3 g
    X = np.einsum("jpqr,pbqk->jbkr", D2, T, optimize=True)
    mult = np.einsum("akc,jbkr,rgs->ajbgcs", m, X, m, optimize=True).reshape(n * n, n * n, n * n)

    # Delta(a (x) h) = (a_2 (x) h_2) (x) (a_1 h_1 S h_3 (x) h_4)
    Q = np.einsum("ght,tuz,uk->ghkz", m, m, S, optimize=True)  # a1 h1 S h3 -> z
    comult = np.einsum("aix,hjykw,ijkz->ahxyzw", H.comult, D3, Q, optimize=True)
    comult = comult.reshape(n * n, n * n, n * n)

    unit = np.kron(u, u)
    counit = np.kron(eps, eps)

    # S(a (x) h) = (1 (x) S h_2)(S^-1(a h_1 S h_3) (x) 1)
    Sinv = H.antipode_inv
    left = np.kron(u[:, None], S)  # column h2 -> 1 (x) S e_h2
    inner = np.einsum("ajt,tuk,uq->ajqk", m, m, S, optimize=True)  # a e_j S e_q
    inner = np.einsum("ajqk,ck->ajqc", inner, Sinv)
    right = np.einsum("ajqc,y->ajqcy", inner, u).reshape(n, n, n, n * n)
    prod = np.einsum("xp,ajqy,xyz->ajpqz", left, right, mult, optimize=True)
    anti = np.einsum("hjpq,ajpqz->zah", D2, prod, optimize=True).reshape(n * n, n * n)
    return mult, unit, comult, counit, anti


def _dual_actions(H: HopfAlgebra):
    """Matrices of the left and right actions of ``M(H)`` basis elements on ``H*``."""
    n = H.dim
    m, S = H.mult, H.antipode
    m3 = _triple_product(H)
    # left:  (a (x) h) |> phi = <S h_1 S a, phi_1> <h_2, phi_3> phi_2
    W = np.einsum("si,ta,stp->iap", S, S, m, optimize=True)  # S e_i S e_a -> p
    left = np.einsum("hij,iap,pqjf->ahqf", H.comult, W, m3, optimize=True).reshape(n * n, n, n)
    # right: phi <| (a (x) h) = <a h_1, phi_1> <S h_2, phi_3> phi_2
    right = np.einsum("hij,aip,rj,pqrf->ahqf", H.comult, m, S, m3, optimize=True).reshape(n * n, n, n)
    return left, right


def mirror_bicrossproduct(H: HopfAlgebra) -> Bicrossproduct:
    """Build ``M(H)`` as a validated Hopf algebra (cached on ``H``).

    Raises
    ------
    AxiomViolation
        If ``M(H)`` or the mirror commutation relation fails a check.
    """
    if "mirror" in H._cache:
        return H._cache["mirror"]
    n = H.dim
    cop = op_cop(H, "cop")
    Hs, _ = dual(H)
    mult, unit, comult, counit, anti = _mirror_tensors(H)
    mh = new_algebra(mult, unit, comult, counit, anti, label=f"M({H.label})")
    embed_cop = np.kron(np.eye(n), H.unit[:, None])
    embed_h = np.kron(H.unit[:, None], np.eye(n))
    res = dict(mh._cache["residuals"])

    # embeddings are unital algebra maps
    def morphism(E):
        lhs = np.einsum("xi,yj,xyz->ijz", E, E, mult, optimize=True)
        rhs = np.einsum("ijk,zk->ijz", H.mult, E)
        return max(_maxabs(lhs - rhs), _maxabs(E @ H.unit - unit))

    res["embedding cop"] = morphism(embed_cop)
    res["embedding h"] = morphism(embed_h)
    # h b = (h_1 b S h_2) h_3 inside M(H)
    lhs = np.einsum("xh,yb,xyz->hbz", embed_h, embed_cop, mult, optimize=True)
    X = np.einsum("jpqr,pbqk->jbkr", iterated_coproduct_tensor(H, 2), _conj_tensor(H), optimize=True)
    rhs = np.einsum("hbkr,xk,yr,xyz->hbz", X, embed_cop, embed_h, mult, optimize=True)
    res["mirror commutation"] = _maxabs(lhs - rhs)

    left, right = _dual_actions(H)
    res["left action"] = max(
        _maxabs(np.einsum("xyz,zqf->xyqf", mult, left) - np.einsum("xqr,yrf->xyqf", left, left)),
        _maxabs(np.tensordot(unit, left, axes=([0], [0])) - np.eye(n)),
    )
    res["right action"] = max(
        _maxabs(np.einsum("xyz,zqf->xyqf", mult, right) - np.einsum("yqr,xrf->xyqf", right, right)),
        _maxabs(np.tensordot(unit, right, axes=([0], [0])) - np.eye(n)),
    )
    Sinv = np.linalg.inv(anti)
    res["left right consistency"] = _maxabs(left - np.tensordot(Sinv, right, axes=([0], [0])))
    for name in ("embedding cop", "embedding h", "mirror commutation", "left action",
                 "right action", "left right consistency"):
        if res[name] > STRUCT_TOL:
            raise AxiomViolation(name, res[name], mh.label)
    B = Bicrossproduct(H, mh, cop, Hs, embed_cop, embed_h, left, right, res)
    H._cache["mirror"] = B
    return B


def act_on_dual_left(B: Bicrossproduct, x: Element, phi: Element) -> Element:
    """``x |> phi`` for ``x`` in ``M(H)`` and ``phi`` in ``H*``."""
    _check(x, B.mh)
    _check(phi, B.dual)
    return Element(B.dual, B.act_left_matrix(x) @ phi.coeffs)


def act_on_dual_right(B: Bicrossproduct, phi: Element, x: Element) -> Element:
    """``phi <| x`` for ``x`` in ``M(H)`` and ``phi`` in ``H*``."""
    _check(x, B.mh)
    _check(phi, B.dual)
    return Element(B.dual, B.act_right_matrix(x) @ phi.coeffs)

"""Triangle operators, vertex and face operators, and their algebraic checks.

Lattice operators are stored as chains of site tensors. A vertex or face
operator labelled by ``y`` in ``M(H)`` with ``n`` legs is the iterated
coproduct ``Delta^(n-1)(y)`` with every leg acting on its edge through the
left action of ``M(H)`` on ``H*`` (``rho``) or through its antipode
conjugate ``S rho S``. Written as a chain, leg ``k`` becomes a tensor
``W_k[b, out, in, b']`` whose bond indices carry the remaining coproduct
legs. Bonds are pruned (and SVD-compressed when that helps), which keeps
group-algebra operators on a six-edge vertex cheap to apply without ever
forming a dense matrix.

When two legs land on the same edge (loop edges), they act in leg order:
the earlier leg is applied first.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bicross import Bicrossproduct, _conj_tensor, mirror_bicrossproduct
from .errors import AlgebraMismatch, DimensionCap, DimensionMismatch
from .hopf import Element, gram_matrix, iterated_coproduct_tensor
from .lattice import LatticeState, RibbonGraph, Site

DENSE_CAP = 4096
COMPRESS_TOL = 1e-13
RANDOM_SAMPLES = 20
CHUNK_ELEMENTS = 1 << 22


# ---------------------------------------------------------------------------
# triangle operators
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class TriangleOperator:
    kind: str
    label: Element
    matrix: np.ndarray


def _flip(B: Bicrossproduct, M):
    S = B.dual.antipode
    return S @ M @ S


def triangle(B: Bicrossproduct, kind: str, x) -> TriangleOperator:
    """Matrix of ``L+``, ``L-`` (label in ``H``) or ``T+``, ``T-`` (label in ``H^cop``) on ``H*``."""
    if kind not in ("L+", "L-", "T+", "T-"):
        raise ValueError(f"unknown triangle kind {kind!r}")
    if not isinstance(x, Element):
        raise AlgebraMismatch("triangle label must be an Element")
    if kind[0] == "L":
        if x.algebra is not B.base:
            raise AlgebraMismatch(f"L labels live in {B.base.label}")
        y = B.pure(h=x)
    else:
        if x.algebra is not B.cop and x.algebra is not B.base:
            raise AlgebraMismatch(f"T labels live in {B.cop.label}")
        y = B.pure(a=x.coeffs)
    M = B.act_left_matrix(y)
    if kind[1] == "-":
        M = _flip(B, M)
    return TriangleOperator(kind, x, M)


def mixed_L(B: Bicrossproduct, x: Element, sign: str) -> TriangleOperator:
    """Leg operator of a general ``M(H)`` element: ``rho(x)`` or ``S rho(x) S``."""
    if x.algebra is not B.mh:
        raise AlgebraMismatch(f"mixed labels live in {B.mh.label}")
    M = B.act_left_matrix(x)
    if sign == "-":
        M = _flip(B, M)
    elif sign != "+":
        raise ValueError("sign must be '+' or '-'")
    return TriangleOperator("L" + sign, x, M)


def triangle_formula(H, kind: str, x: np.ndarray) -> np.ndarray:
    """Closed-form triangle matrices built directly from the ``H*`` structure.

    Used as an independent oracle for :func:`triangle`:
    ``L+^h(phi) = <h, S phi_1 phi_3> phi_2``, ``L-^h(phi) = <h, phi_3 S phi_1> phi_2``,
    ``T+^a(phi) = <S a, phi_1> phi_2``, ``T-^a(phi) = <a, phi_2> phi_1``.
    """
    from .hopf import dual

    Hs, _ = dual(H)
    n = H.dim
    D2 = iterated_coproduct_tensor(Hs, 2)  # [f, p, q, r]
    D1 = Hs.comult  # [f, p, q]
    S = Hs.antipode
    M = np.zeros((n, n), dtype=complex)
    if kind == "L+":
        # <h, S e^p e^r> over dual basis products
        prod = np.einsum("sp,srk->prk", S, Hs.mult)
        w = np.einsum("prk,k->pr", prod, x)
        M = np.einsum("fpqr,pr->qf", D2, w)
    elif kind == "L-":
        prod = np.einsum("sp,rsk->prk", S, Hs.mult)
        w = np.einsum("prk,k->pr", prod, x)
        M = np.einsum("fpqr,pr->qf", D2, w)
    elif kind == "T+":
        Sa = H.antipode @ x
        M = np.einsum("fpq,p->qf", D1, Sa)
    elif kind == "T-":
        M = np.einsum("fpq,q->pf", D1, x)
    else:
        raise ValueError(kind)
    return M


# ---------------------------------------------------------------------------
# lattice operators
# ---------------------------------------------------------------------------

def _prune(mats):
    """Drop bond indices on which either neighbouring tensor vanishes (exact)."""
    mats = [np.asarray(W, dtype=complex) for W in mats]
    changed = True
    while changed:
        changed = False
        for k in range(len(mats) - 1):
            left = np.any(mats[k] != 0, axis=(0, 1, 2))
            right = np.any(mats[k + 1] != 0, axis=(1, 2, 3))
            keep = left & right
            if not keep.any():
                # the chain is the zero operator; keep one bond slot per link
                return [np.zeros((1 if j else W.shape[0],) + W.shape[1:3] + (1 if j < len(mats) - 1 else W.shape[3],),
                                 dtype=complex) for j, W in enumerate(mats)]
            if not keep.all():
                mats[k] = mats[k][..., keep]
                mats[k + 1] = mats[k + 1][keep]
                changed = True
    return mats


def _compress(mats, tol=COMPRESS_TOL):
    """Shrink the bonds of a chain of site tensors ``W[bl, o, i, br]``.

    Zero bond slices are pruned first, which keeps the tensors sparse. A
    QR-then-SVD sweep is then tried, and its result is kept only when it
    reduces the total bond dimension (it generally destroys sparsity).
    """
    pruned = _prune(mats)
    svd = _svd_compress(pruned, tol)
    size = lambda ms: sum(W.shape[3] for W in ms[:-1])  # noqa: E731
    return svd if size(svd) < size(pruned) else pruned


def _svd_compress(mats, tol):
    mats = [W.copy() for W in mats]
    n = len(mats)
    for k in range(n - 1):
        bl, o, i, br = mats[k].shape
        q, r = np.linalg.qr(mats[k].reshape(bl * o * i, br))
        mats[k] = q.reshape(bl, o, i, q.shape[1])
        mats[k + 1] = np.tensordot(r, mats[k + 1], axes=([1], [0]))
    for k in range(n - 1, 0, -1):
        bl, o, i, br = mats[k].shape
        u, s, vh = np.linalg.svd(mats[k].reshape(bl, o * i * br), full_matrices=False)
        keep = max(1, int(np.sum(s > tol * max(s[0], 1e-300))))
        mats[k] = vh[:keep].reshape(keep, o, i, br)
        mats[k - 1] = np.tensordot(mats[k - 1], u[:, :keep] * s[:keep], axes=([3], [0]))
    for W in mats:
        W[np.abs(W) < 1e-15] = 0.0
    return mats


@dataclass(eq=False)
class LatticeOperator:
    """Operator on the tensor power of ``H*`` over the edges of a graph.

    Attributes
    ----------
    chain : list of (int, SiteTensor)
        Site tensors applied in order; bond dimensions of neighbouring
        tensors match and the outer bonds are trivial.
    """

    graph: RibbonGraph
    d: int
    chain: list
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.d ** self.graph.n_edges

    @property
    def edges(self):
        return sorted({e for e, _ in self.chain})

    @property
    def bond_dims(self):
        return [W.shape[3] for _, W in self.chain[:-1]]

    def apply(self, vecs, backend=None) -> np.ndarray:
        """Apply to one state vector or to a batch of row vectors."""
        arr = np.asarray(vecs, dtype=complex)
        single = arr.ndim == 1
        batch = arr.reshape(-1, arr.shape[-1])
        if batch.shape[1] != self.dim:
            raise DimensionMismatch(f"state of length {batch.shape[1]} for operator on {self.dim}")
        bond = max([W.shape[3] for _, W in self.chain] + [1])
        chunk = max(1, CHUNK_ELEMENTS // (self.dim * bond))
        if batch.shape[0] > chunk:
            out = np.concatenate(
                [self._apply_batch(batch[i:i + chunk], backend) for i in range(0, batch.shape[0], chunk)]
            )
        else:
            out = self._apply_batch(batch, backend)
        return out[0] if single else out

    def _apply_batch(self, batch, backend):
        E, d = self.graph.n_edges, self.d
        nb = batch.shape[0]
        phi = batch.reshape(1, nb, self.dim)
        for e, W in self.chain:
            block = phi.reshape(phi.shape[0], nb * d ** e, d, d ** (E - e - 1))
            phi = kernels.apply_site(W, block, backend)
        return phi.reshape(nb, self.dim)

    def __matmul__(self, other):
        """Composition ``self @ other`` applies ``other`` first."""
        if isinstance(other, LatticeOperator):
            return LatticeOperator(self.graph, self.d, other.chain + self.chain, {"kind": "product"})
        return OperatorSum([(1.0, self)]) @ other

    def to_dense(self, cap=DENSE_CAP) -> np.ndarray:
        if self.dim > cap:
            raise DimensionCap(self.dim, cap)
        return self.apply(np.eye(self.dim)).T

    def adjoint(self, gram=None) -> "LatticeOperator":
        """Adjoint with respect to the tensor power of the metric ``gram``."""
        G = np.eye(self.d) if gram is None else gram
        Ginv = np.linalg.inv(G)
        chain = []
        for e, W in reversed(self.chain):
            Wd = np.einsum("ab,lcbr,cd->radl", Ginv, np.conj(W.dense), G, optimize=True)
            chain.append((e, kernels.SiteTensor(Wd)))
        return LatticeOperator(self.graph, self.d, chain, dict(self.meta, adjoint=True))


def identity_operator(g: RibbonGraph, d: int) -> LatticeOperator:
    return LatticeOperator(g, d, [], {"kind": "identity"})


@dataclass(eq=False)
class OperatorSum:
    """Linear combination of lattice operators (or nested sums)."""

    terms: list

    @property
    def graph(self):
        return self.terms[0][1].graph

    @property
    def dim(self):
        return self.terms[0][1].dim

    def apply(self, vecs, backend=None):
        out = None
        for c, op in self.terms:
            r = c * op.apply(vecs, backend)
            out = r if out is None else out + r
        return out

    def __matmul__(self, other):
        if isinstance(other, OperatorSum):
            return OperatorSum([(c1 * c2, o1 @ o2) for c1, o1 in self.terms for c2, o2 in other.terms])
        return OperatorSum([(c, o @ other) for c, o in self.terms])

    def to_dense(self, cap=DENSE_CAP):
        if self.dim > cap:
            raise DimensionCap(self.dim, cap)
        return self.apply(np.eye(self.dim)).T

    def adjoint(self, gram=None):
        return OperatorSum([(np.conj(c), op.adjoint(gram)) for c, op in self.terms])


def chain_from_coproduct(B: Bicrossproduct, g: RibbonGraph, y: Element, legs, compress=True):
    """Build the chain for ``Delta^(n-1)(y)`` with legs ``[(edge, use_rho)]``."""
    rho = B.left_action
    S = B.dual.antipode
    rho_flip = np.einsum("ab,xbc,cd->xad", S, rho, S)
    D = B.mh.comult
    maps = [rho if plus else rho_flip for _, plus in legs]
    n = len(legs)
    if n == 1:
        mats = [np.tensordot(y.coeffs, maps[0], axes=([0], [0]))[None, :, :, None]]
    else:
        mats = []
        first = np.tensordot(y.coeffs, D, axes=([0], [0]))  # [x, b1]
        mats.append(np.einsum("xb,xoi->oib", first, maps[0])[None])
        for k in range(1, n - 1):
            mats.append(np.einsum("axb,xoi->aoib", D, maps[k], optimize=True))
        mats.append(maps[-1][:, :, :, None])
    if compress:
        mats = _compress(mats)
    return [(e, kernels.SiteTensor(W)) for (e, _), W in zip(legs, mats)]


def _as_m(B, x, which):
    if isinstance(x, Element) and x.algebra is B.mh:
        return x
    if which == "h":
        return B.pure(h=x)
    return B.pure(a=x.coeffs if isinstance(x, Element) else x)


def vertex_operator(g: RibbonGraph, site: Site, h, B: Bicrossproduct) -> LatticeOperator:
    """``A^h`` at a site: clockwise legs from the site's start half-edge."""
    if isinstance(h, Element) and h.algebra is not B.base and h.algebra is not B.mh:
        raise AlgebraMismatch(f"vertex labels live in {B.base.label}")
    legs = g.vertex_legs(site)
    y = _as_m(B, h, "h")
    chain = chain_from_coproduct(B, g, y, legs)
    return LatticeOperator(g, B.dual.dim, chain, {"kind": "vertex", "site": site})


def face_operator(g: RibbonGraph, site: Site, a, B: Bicrossproduct) -> LatticeOperator:
    """``B^a`` at a site: legs around the site's face, ``T+`` on darts along the edge."""
    if isinstance(a, Element) and a.algebra not in (B.base, B.cop, B.mh):
        raise AlgebraMismatch(f"face labels live in {B.cop.label}")
    legs = g.face_legs(site)
    y = _as_m(B, a, "a")
    chain = chain_from_coproduct(B, g, y, legs)
    return LatticeOperator(g, B.dual.dim, chain, {"kind": "face", "site": site})


def apply(op, psi: LatticeState) -> LatticeState:
    if psi.graph is not op.graph and psi.graph.n_edges != op.graph.n_edges:
        raise DimensionMismatch("state and operator live on different lattices")
    if psi.coeffs.shape[0] != op.dim:
        raise DimensionMismatch("state length does not match operator")
    return LatticeState(psi.graph, psi.algebra, op.apply(psi.coeffs))


def tensor_gram(Hs, n_edges):
    G = gram_matrix(Hs)
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n_edges):
        out = np.kron(out, G)
    return out


# ---------------------------------------------------------------------------
# residual protocols
# ---------------------------------------------------------------------------

def _relative(diff, a, b):
    scale = max(a, b)
    return float(diff / scale) if scale > 1e-12 else float(diff)


def residual(L, R, rng=None, samples=RANDOM_SAMPLES, dense_cap=DENSE_CAP, mode="auto"):
    """Relative distance between two operators.

    Dense mode compares Frobenius norms of the assembled matrices. The
    random-vector mode applies both sides to ``samples`` unit Gaussian
    states and reports the largest relative 2-norm error.
    """
    dim = L.dim
    if mode == "dense" or (mode == "auto" and dim <= dense_cap):
        Ld, Rd = L.to_dense(dense_cap), R.to_dense(dense_cap)
        return _relative(np.linalg.norm(Ld - Rd), np.linalg.norm(Ld), np.linalg.norm(Rd))
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for _ in range(samples):
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        lp, rp = L.apply(psi), R.apply(psi)
        worst = max(worst, _relative(np.linalg.norm(lp - rp), np.linalg.norm(lp), np.linalg.norm(rp)))
    return worst


def commutator_residual(op1, op2, **kw):
    return residual(op1 @ op2, op2 @ op1, **kw)


def theorem32_sides(g: RibbonGraph, site: Site, h: Element, a: Element, B: Bicrossproduct):
    """Both sides of ``A^h B^a = B^{h_1 a S h_2} A^{h_3}`` as operators."""
    H = B.base
    lhs = vertex_operator(g, site, h, B) @ face_operator(g, site, a, B)
    d2 = np.tensordot(h.coeffs, iterated_coproduct_tensor(H, 2), axes=([0], [0]))  # [i, j, k]
    T = _conj_tensor(H)  # [i, b, j, c]
    X = np.einsum("ijk,b,ibjc->kc", d2, a.coeffs, T)
    terms = []
    for k in range(H.dim):
        if np.max(np.abs(X[k])) < 1e-15:
            continue
        terms.append((1.0, face_operator(g, site, X[k], B) @ vertex_operator(g, site, H.basis(k), B)))
    rhs = OperatorSum(terms) if terms else OperatorSum([(0.0, lhs)])
    return lhs, rhs


def check_theorem_32(g, site, h, a, B=None, rng=None, samples=RANDOM_SAMPLES, dense_cap=DENSE_CAP):
    """Residual of the vertex/face bicrossproduct relation at one site."""
    B = B or mirror_bicrossproduct(h.algebra)
    lhs, rhs = theorem32_sides(g, site, h, a, B)
    return residual(lhs, rhs, rng=rng, samples=samples, dense_cap=dense_cap)


def check_disjoint_commutation(op1, op2, **kw) -> float:
    """Relative commutator residual of two lattice operators."""
    return commutator_residual(op1, op2, **kw)


def adjoint(op, B: Bicrossproduct):
    """Adjoint under the Haar inner product on every edge."""
    return op.adjoint(gram_matrix(B.dual))


def triangle_adjoint(B: Bicrossproduct, M: np.ndarray) -> np.ndarray:
    G = gram_matrix(B.dual)
    return np.linalg.solve(G, M.conj().T @ G)


def star_label(x: Element) -> Element:
    return Element(x.algebra, x.algebra.star_vec(x.coeffs))


def _disjoint_pairs(g: RibbonGraph):
    """Vertex pairs, face pairs and disjoint (vertex site, face site) pairs of a graph."""
    vsites = g.vertex_sites()
    fsites = []
    for f, s in zip(g.faces, g.face_sites()):
        alts = [s]
        if f.closed:
            for d in f.darts:
                a = g.alpha(d)
                if g.half_vertex[a] is not None:
                    alts.append(g.make_site(g.half_vertex[a], a))
        fsites.append(alts)
    vv = [(s, t) for i, s in enumerate(vsites) for t in vsites[i + 1:]]
    ff = [(alts[0], other[0]) for i, alts in enumerate(fsites) for other in fsites[i + 1:]]
    vf = []
    for s in vsites:
        p = g.site_face(s)
        for q, alts in enumerate(fsites):
            if q == p:
                continue
            t = next((t for t in alts if t.vertex != s.vertex), None)
            if t is not None:
                vf.append((s, t))
    return vv, ff, vf


def disjoint_site_report(g: RibbonGraph, B: Bicrossproduct, rng=None, samples=RANDOM_SAMPLES,
                         dense_cap=DENSE_CAP) -> dict:
    """Largest commutator residuals over all pairs of distinct sites, with random labels.

    Keys are ``"vertex-vertex"`` (distinct vertices), ``"face-face"``
    (distinct faces) and ``"vertex-face"`` (sites differing in both vertex
    and face). Pair counts are reported under ``"pairs"``.
    """
    from .hopf import random_element

    rng = rng if rng is not None else np.random.default_rng(0)
    kw = {"rng": rng, "samples": samples, "dense_cap": dense_cap}
    vv, ff, vf = _disjoint_pairs(g)

    def h():
        return random_element(B.base, rng)

    def a():
        return random_element(B.cop, rng)

    out = {"vertex-vertex": 0.0, "face-face": 0.0, "vertex-face": 0.0}
    for s, t in vv:
        r = check_disjoint_commutation(vertex_operator(g, s, h(), B), vertex_operator(g, t, h(), B), **kw)
        out["vertex-vertex"] = max(out["vertex-vertex"], r)
    for s, t in ff:
        r = check_disjoint_commutation(face_operator(g, s, a(), B), face_operator(g, t, a(), B), **kw)
        out["face-face"] = max(out["face-face"], r)
    for s, t in vf:
        r = check_disjoint_commutation(vertex_operator(g, s, h(), B), face_operator(g, t, a(), B), **kw)
        out["vertex-face"] = max(out["vertex-face"], r)
    out["pairs"] = {"vertex-vertex": len(vv), "face-face": len(ff), "vertex-face": len(vf)}
    return out


def _adjoint_labels(H, h: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``X[k]`` with ``sum_k X[k] (x) e_k = h_1 a S h_2 (x) h_3``."""
    d2 = np.tensordot(h, iterated_coproduct_tensor(H, 2), axes=([0], [0]))
    return np.einsum("ijk,b,ibjc->kc", d2, a, _conj_tensor(H))


def triangle_relations(B: Bicrossproduct, rng=None, samples: int = 50) -> dict:
    """Largest residuals of the triangle-operator algebra over random labels.

    Relations checked on one ``H*`` factor, for random ``h, g`` in ``H``
    and ``a, b`` in ``H^cop``:

    * ``"[L+,L-]"``: ``L+^h L-^g = L-^g L+^h``
    * ``"[T+,T-]"``: ``T+^a T-^b = T-^b T+^a``
    * ``"L+T+"``, ``"L-T-"``: ``L^h T^a = T^{h_1 a S h_2} L^{h_3}`` for equal signs
    * ``"L+T-"``: ``L+^h T-^a = T-^{h_1 a S h_2} L+^{h_3}``

    Residuals are Frobenius norms relative to the larger side.
    """
    from .hopf import random_element

    rng = rng if rng is not None else np.random.default_rng(0)
    H = B.base
    out = {"[L+,L-]": 0.0, "[T+,T-]": 0.0, "L+T+": 0.0, "L-T-": 0.0, "L+T-": 0.0}

    def rel(x, y):
        return _relative(np.linalg.norm(x - y), np.linalg.norm(x), np.linalg.norm(y))

    for _ in range(samples):
        h, g = random_element(H, rng), random_element(H, rng)
        a, b = random_element(B.cop, rng), random_element(B.cop, rng)
        Lp, Lm = triangle(B, "L+", h).matrix, triangle(B, "L-", g).matrix
        out["[L+,L-]"] = max(out["[L+,L-]"], rel(Lp @ Lm, Lm @ Lp))
        Tp, Tm = triangle(B, "T+", a).matrix, triangle(B, "T-", b).matrix
        out["[T+,T-]"] = max(out["[T+,T-]"], rel(Tp @ Tm, Tm @ Tp))
        X = _adjoint_labels(H, h.coeffs, a.coeffs)
        for key, ls, ts in (("L+T+", "L+", "T+"), ("L-T-", "L-", "T-"), ("L+T-", "L+", "T-")):
            lhs = triangle(B, ls, h).matrix @ triangle(B, ts, a).matrix
            rhs = sum(triangle(B, ts, Element(B.cop, X[k])).matrix @ triangle(B, ls, H.basis(k)).matrix
                      for k in range(H.dim))
            out[key] = max(out[key], rel(lhs, rhs))
    return out

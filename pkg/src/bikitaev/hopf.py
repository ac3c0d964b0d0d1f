"""Finite-dimensional Hopf star algebras given by structure tensors.

Conventions
-----------
For a basis ``e_0, ..., e_{n-1}``:

* ``mult[i, j, k]`` is the coefficient of ``e_k`` in ``e_i e_j``;
* ``comult[i, j, k]`` is the coefficient of ``e_j (x) e_k`` in ``Delta(e_i)``;
* ``antipode[:, i]`` holds the coefficients of ``S(e_i)``, so ``S x = antipode @ x``;
* ``star`` is the matrix ``K`` of an antilinear involution, ``x* = K @ conj(x)``.

Dual algebras are always expressed in the dual basis, so the canonical
pairing matrix is the identity.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AlgebraMismatch,
    AxiomViolation,
    NoHaarIntegral,
    NonPositive,
    NonUniqueHaar,
    NotAGroup,
    ShapeMismatch,
    SingularAntipode,
    StarUndefined,
)

STRUCT_TOL = 1e-12
HAAR_NULL_TOL = 1e-9
POSITIVITY_TOL = 1e-10


def _real_if_possible(a):
    """Return a real view of ``a`` when its imaginary part vanishes exactly."""
    if np.iscomplexobj(a) and not np.any(a.imag):
        return a.real
    return a


def _maxabs(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


@dataclass(eq=False)
class HopfAlgebra:
    """Structure tensors of a finite-dimensional Hopf algebra.

    Instances are treated as immutable handles. Build them through
    :func:`new_algebra` (or the group constructors), which validates
    every axiom before returning.
    """

    mult: np.ndarray
    unit: np.ndarray
    comult: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray
    star: np.ndarray | None = None
    label: str = "H"
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.unit.shape[0]

    @property
    def has_star(self) -> bool:
        return self.star is not None

    # -- raw coefficient-vector maps --------------------------------------
    def mul_vec(self, x, y):
        return np.einsum("i,j,ijk->k", x, y, self.mult)

    def comul_vec(self, x):
        return np.einsum("i,ijk->jk", x, self.comult)

    def counit_vec(self, x):
        return complex(self.counit @ x)

    def antipode_vec(self, x):
        return self.antipode @ x

    def star_vec(self, x):
        if self.star is None:
            raise StarUndefined(f"no star structure on {self.label}")
        return self.star @ np.conj(x)

    @property
    def antipode_inv(self) -> np.ndarray:
        if "sinv" not in self._cache:
            try:
                self._cache["sinv"] = np.linalg.inv(self.antipode)
            except np.linalg.LinAlgError:
                raise SingularAntipode(self.label) from None
        return self._cache["sinv"]

    def left_mult_matrices(self):
        """Array ``L`` with ``L[i] @ x = e_i x``."""
        return np.transpose(self.mult, (0, 2, 1))

    def right_mult_matrices(self):
        """Array ``R`` with ``R[i] @ x = x e_i``."""
        return np.transpose(self.mult, (1, 2, 0))

    def basis(self, i) -> "Element":
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return Element(self, v)

    def element(self, coeffs) -> "Element":
        return Element(self, coeffs)

    def one(self) -> "Element":
        return Element(self, self.unit.copy())

    def fingerprint(self) -> str:
        """Stable hash of the structure tensors, rounded to 12 digits."""
        h = hashlib.sha256()
        for arr in (self.mult, self.unit, self.comult, self.counit, self.antipode):
            h.update(np.round(np.asarray(arr, dtype=complex), 12).tobytes())
        if self.star is not None:
            h.update(np.round(self.star.astype(complex), 12).tobytes())
        return h.hexdigest()[:16]


@dataclass(eq=False)
class Element:
    """A vector in a Hopf algebra, tagged with its handle."""

    algebra: HopfAlgebra
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.coeffs.shape[0] != self.algebra.dim:
            raise ShapeMismatch(
                f"element of length {self.coeffs.shape[0]} for algebra of dim {self.algebra.dim}"
            )

    def _same(self, other):
        if not isinstance(other, Element) or other.algebra is not self.algebra:
            raise AlgebraMismatch("elements belong to different algebras")

    def __add__(self, other):
        self._same(other)
        return Element(self.algebra, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._same(other)
        return Element(self.algebra, self.coeffs - other.coeffs)

    def __neg__(self):
        return Element(self.algebra, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Element):
            return multiply(self, other)
        return Element(self.algebra, self.coeffs * other)

    def __rmul__(self, scalar):
        return Element(self.algebra, self.coeffs * scalar)

    def allclose(self, other, atol=1e-10):
        self._same(other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=atol, rtol=0))


@dataclass(eq=False)
class TensorElement:
    """A vector in a tensor product of algebras, row-major over factors."""

    algebras: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        self.algebras = tuple(self.algebras)
        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        expected = int(np.prod([a.dim for a in self.algebras]))
        if self.coeffs.shape[0] != expected:
            raise ShapeMismatch(f"tensor element of length {self.coeffs.shape[0]}, expected {expected}")

    @property
    def tensor(self) -> np.ndarray:
        return self.coeffs.reshape([a.dim for a in self.algebras])


@dataclass(eq=False)
class DualPairing:
    """Non-degenerate pairing ``P[i, j] = <a_i, h_j>`` between ``left`` and ``right``."""

    left: HopfAlgebra
    right: HopfAlgebra
    matrix: np.ndarray


# ---------------------------------------------------------------------------
# axiom verification
# ---------------------------------------------------------------------------

def axiom_residuals(H: HopfAlgebra) -> dict:
    """Max-abs residual of every Hopf (and star) axiom, over all basis tuples."""
    n = H.dim
    m = _real_if_possible(H.mult)
    d = _real_if_possible(H.comult)
    u = _real_if_possible(H.unit)
    eps = _real_if_possible(H.counit)
    S = _real_if_possible(H.antipode)
    eye = np.eye(n)
    res = {}

    lhs = np.tensordot(m, m, axes=([2], [0]))  # (e_i e_j) e_k -> [i,j,k,p]
    rhs = np.einsum("jkl,ilp->ijkp", m, m, optimize=True)
    res["associativity"] = _maxabs(lhs - rhs)
    res["unit"] = max(
        _maxabs(np.einsum("i,ijk->jk", u, m) - eye), _maxabs(np.einsum("i,jik->jk", u, m) - eye)
    )

    lhs = np.einsum("ilc,lab->iabc", d, d, optimize=True)
    rhs = np.einsum("ial,lbc->iabc", d, d, optimize=True)
    res["coassociativity"] = _maxabs(lhs - rhs)
    res["counit"] = max(
        _maxabs(np.einsum("j,ijk->ik", eps, d) - eye), _maxabs(np.einsum("ijk,k->ij", d, eps) - eye)
    )

    worst = 0.0
    for i in range(n):
        # Delta(e_i e_j) against Delta(e_i) Delta(e_j), one i at a time
        left = np.tensordot(m[i], d, axes=([1], [0]))  # [j,a,b]
        y = np.tensordot(d[i], m, axes=([0], [0]))  # [q, r, a]
        x = np.tensordot(d, y, axes=([1], [1]))  # [j, s, q, a]
        right = np.tensordot(x, m, axes=([2, 1], [0, 1]))  # [j, a, b]
        worst = max(worst, _maxabs(left - right))
    worst = max(worst, _maxabs(np.einsum("i,iab->ab", u, d) - np.outer(u, u)))
    worst = max(worst, _maxabs(np.einsum("ijk,k->ij", m, eps) - np.outer(eps, eps)))
    worst = max(worst, abs(eps @ u - 1.0))
    res["bialgebra"] = worst

    target = np.outer(eps, u)
    left = np.einsum("ipq,rp,rqk->ik", d, S, m, optimize=True)
    right = np.einsum("ipq,rq,prk->ik", d, S, m, optimize=True)
    res["antipode"] = max(_maxabs(left - target), _maxabs(right - target))

    if H.star is not None:
        K = H.star
        star_res = _maxabs(K @ np.conj(K) - eye)
        lhs = np.einsum("ijk,pk->ijp", np.conj(H.mult), K)
        rhs = np.einsum("pj,qi,pqr->ijr", K, K, H.mult, optimize=True)
        star_res = max(star_res, _maxabs(lhs - rhs))
        lhs = np.einsum("ki,kab->iab", K, H.comult)
        rhs = np.einsum("ipq,ap,bq->iab", np.conj(H.comult), K, K, optimize=True)
        star_res = max(star_res, _maxabs(lhs - rhs))
        star_res = max(star_res, _maxabs(H.counit @ K - np.conj(H.counit)))
        star_res = max(star_res, _maxabs(H.antipode @ K @ np.conj(H.antipode) @ np.conj(K) - eye))
        res["star"] = star_res
    return res


def verify(H: HopfAlgebra, tol: float = STRUCT_TOL) -> dict:
    """Run :func:`axiom_residuals` and raise on the first failing axiom."""
    res = axiom_residuals(H)
    for name, r in res.items():
        if not r <= tol:
            raise AxiomViolation(name, r, H.label)
    return res


def new_algebra(mult, unit, comult, counit, antipode, star=None, label="H", check=True):
    """Validate structure tensors and return an algebra handle.

    Raises
    ------
    ShapeMismatch
        If tensor shapes are inconsistent.
    AxiomViolation
        If any axiom residual exceeds ``1e-12``.
    """
    unit = np.asarray(unit, dtype=complex).reshape(-1)
    n = unit.shape[0]
    arrays = {
        "mult": (np.asarray(mult, dtype=complex), (n, n, n)),
        "comult": (np.asarray(comult, dtype=complex), (n, n, n)),
        "counit": (np.asarray(counit, dtype=complex), (n,)),
        "antipode": (np.asarray(antipode, dtype=complex), (n, n)),
    }
    if star is not None:
        arrays["star"] = (np.asarray(star, dtype=complex), (n, n))
    for name, (arr, shape) in arrays.items():
        if arr.shape != shape:
            raise ShapeMismatch(f"{name} has shape {arr.shape}, expected {shape}")
    H = HopfAlgebra(
        mult=arrays["mult"][0],
        unit=unit,
        comult=arrays["comult"][0],
        counit=arrays["counit"][0],
        antipode=arrays["antipode"][0],
        star=arrays["star"][0] if star is not None else None,
        label=label,
    )
    if check:
        H._cache["residuals"] = verify(H)
    return H


# ---------------------------------------------------------------------------
# group constructions
# ---------------------------------------------------------------------------

def _check_group(cayley, inverse=None):
    table = np.asarray(cayley, dtype=int)
    n = table.shape[0]
    if table.shape != (n, n):
        raise NotAGroup("multiplication table is not square")
    if table.min() < 0 or table.max() >= n:
        raise NotAGroup("table is not closed")
    if not (np.all(table[0] == np.arange(n)) and np.all(table[:, 0] == np.arange(n))):
        raise NotAGroup("index 0 is not the identity")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if table[table[a, b], c] != table[a, table[b, c]]:
                    raise NotAGroup("associativity fails", (a, b, c))
    inv = np.full(n, -1)
    for a in range(n):
        hits = np.nonzero(table[a] == 0)[0]
        if len(hits) != 1 or table[hits[0], a] != 0:
            raise NotAGroup("missing inverse", (a,))
        inv[a] = hits[0]
    if inverse is not None and not np.array_equal(np.asarray(inverse, dtype=int), inv):
        raise NotAGroup("inverse table inconsistent with multiplication")
    return table, inv


def group_algebra(cayley, inverse=None, label="C[G]") -> HopfAlgebra:
    """Group algebra: ``Delta g = g (x) g``, ``S g = g^-1``, ``g* = g^-1``."""
    table, inv = _check_group(cayley, inverse)
    n = table.shape[0]
    m = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            m[a, b, table[a, b]] = 1.0
    d = np.zeros((n, n, n))
    d[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    unit = np.zeros(n)
    unit[0] = 1.0
    S = np.zeros((n, n))
    S[inv, np.arange(n)] = 1.0
    H = new_algebra(m, unit, d, np.ones(n), S, star=S.copy(), label=label)
    H._cache["group"] = (table, inv)
    return H


def function_algebra(cayley, inverse=None, label="C(G)") -> HopfAlgebra:
    """Function algebra on a group, in the delta-function basis."""
    table, inv = _check_group(cayley, inverse)
    n = table.shape[0]
    m = np.zeros((n, n, n))
    m[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    d = np.zeros((n, n, n))
    for a in range(n):
        for b in range(n):
            d[table[a, b], a, b] = 1.0
    counit = np.zeros(n)
    counit[0] = 1.0
    S = np.zeros((n, n))
    S[inv, np.arange(n)] = 1.0
    H = new_algebra(m, np.ones(n), d, counit, S, star=np.eye(n), label=label)
    H._cache["group"] = (table, inv)
    return H


def cyclic_table(n):
    a = np.arange(n)
    return (a[:, None] + a[None, :]) % n


def s3_table():
    """Cayley table of S3 on permutations of (0,1,2), identity first."""
    import itertools

    perms = sorted(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.zeros((6, 6), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(3))]
    return table, ["".join(map(str, p)) for p in perms]


# ---------------------------------------------------------------------------
# element-level operations
# ---------------------------------------------------------------------------

def _check_member(x, H=None):
    if not isinstance(x, Element):
        raise AlgebraMismatch("expected an Element")
    if H is not None and x.algebra is not H:
        raise AlgebraMismatch(f"element of {x.algebra.label} used where {H.label} expected")


def multiply(x: Element, y: Element) -> Element:
    _check_member(x)
    _check_member(y, x.algebra)
    return Element(x.algebra, x.algebra.mul_vec(x.coeffs, y.coeffs))


def comultiply(x: Element) -> TensorElement:
    _check_member(x)
    H = x.algebra
    return TensorElement((H, H), H.comul_vec(x.coeffs))


def counit(x: Element) -> complex:
    _check_member(x)
    return x.algebra.counit_vec(x.coeffs)


def antipode(x: Element) -> Element:
    _check_member(x)
    return Element(x.algebra, x.algebra.antipode_vec(x.coeffs))


def star(x: Element) -> Element:
    _check_member(x)
    return Element(x.algebra, x.algebra.star_vec(x.coeffs))


def iterated_coproduct_tensor(H: HopfAlgebra, n: int) -> np.ndarray:
    """Tensor ``D[i, j_1, ..., j_{n+1}]`` of ``Delta^(n)(e_i)``, applied on the last leg."""
    key = ("dn", n)
    if key not in H._cache:
        D = np.eye(H.dim, dtype=complex)
        for _ in range(n):
            D = np.tensordot(D, H.comult, axes=([-1], [0]))
        H._cache[key] = D
    return H._cache[key]


def iterated_coproduct(x: Element, n: int, leftmost: bool = False) -> TensorElement:
    """``Delta^(n)(x)`` in ``H^{(x)(n+1)}``.

    Parameters
    ----------
    leftmost : bool
        Apply each further coproduct on the first leg instead of the last.
        Coassociativity makes both patterns agree.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _check_member(x)
    H = x.algebra
    if not leftmost:
        t = np.tensordot(x.coeffs, iterated_coproduct_tensor(H, n), axes=([0], [0]))
    else:
        t = x.coeffs
        for _ in range(n):
            t = np.moveaxis(np.tensordot(t, H.comult, axes=([0], [0])), (-2, -1), (0, 1))
    return TensorElement((H,) * (n + 1), t)


# ---------------------------------------------------------------------------
# duals and variants
# ---------------------------------------------------------------------------

def dual(H: HopfAlgebra, label=None):
    """Dual Hopf algebra in the dual basis, with its canonical pairing.

    Returns
    -------
    (HopfAlgebra, DualPairing)
        The pairing has ``left`` the dual, ``right`` ``H`` and identity matrix.
    """
    if "dual" not in H._cache:
        mult = np.transpose(H.comult, (1, 2, 0))
        comult = np.transpose(H.mult, (2, 0, 1))
        star_d = None
        if H.star is not None:
            star_d = (np.conj(H.star) @ H.antipode).T
        D = new_algebra(
            mult, H.counit.copy(), comult, H.unit.copy(), H.antipode.T.copy(),
            star=star_d, label=label or f"{H.label}*",
        )
        D._cache["dual"] = H
        H._cache["dual"] = D
        res = pairing_residuals(D, H, np.eye(H.dim))
        for name, r in res.items():
            if r > STRUCT_TOL:
                raise AxiomViolation(name, r, D.label)
    D = H._cache["dual"]
    return D, DualPairing(D, H, np.eye(H.dim))


def pairing_residuals(A: HopfAlgebra, H: HopfAlgebra, P) -> dict:
    """Residuals of the pairing axioms for ``P[i, j] = <a_i, h_j>``."""
    res = {}
    # <a b, h> = <a (x) b, Delta h>
    lhs = np.einsum("abk,kj->abj", A.mult, P)
    rhs = np.einsum("ap,bq,jpq->abj", P, P, H.comult, optimize=True)
    res["pairing product"] = _maxabs(lhs - rhs)
    # <Delta a, g (x) h> = <a, g h>
    lhs = np.einsum("apq,pg,qh->agh", A.comult, P, P, optimize=True)
    rhs = np.einsum("ak,ghk->agh", P, H.mult)
    res["pairing coproduct"] = _maxabs(lhs - rhs)
    res["pairing unit"] = max(_maxabs(A.unit @ P - H.counit), _maxabs(P @ H.unit - A.counit))
    res["pairing antipode"] = _maxabs(A.antipode.T @ P - P @ H.antipode)
    return res


def pair(p: DualPairing, phi, h) -> complex:
    """Evaluate the pairing; tensor elements pair factorwise."""
    if isinstance(phi, TensorElement):
        if not isinstance(h, TensorElement) or len(phi.algebras) != len(h.algebras):
            raise AlgebraMismatch("tensor ranks differ")
        if any(a is not p.left for a in phi.algebras) or any(b is not p.right for b in h.algebras):
            raise AlgebraMismatch("tensor factors do not match the pairing")
        t = phi.tensor
        for _ in range(len(phi.algebras)):
            t = np.tensordot(t, p.matrix, axes=([0], [0]))
        return complex(np.tensordot(t, h.tensor, axes=t.ndim))
    _check_member(phi, p.left)
    _check_member(h, p.right)
    return complex(phi.coeffs @ p.matrix @ h.coeffs)


def op_cop(H: HopfAlgebra, which: str) -> HopfAlgebra:
    """Opposite product (``"op"``) or opposite coproduct (``"cop"``) variant."""
    if which not in ("op", "cop"):
        raise ValueError("which must be 'op' or 'cop'")
    key = ("variant", which)
    if key not in H._cache:
        mult, comult = H.mult, H.comult
        if which == "op":
            mult = np.transpose(mult, (1, 0, 2))
        else:
            comult = np.transpose(comult, (0, 2, 1))
        V = new_algebra(
            mult, H.unit, comult, H.counit, H.antipode_inv,
            star=H.star, label=f"{H.label}^{which}",
        )
        V._cache[key] = H
        H._cache[key] = V
    return H._cache[key]


# ---------------------------------------------------------------------------
# Haar integral
# ---------------------------------------------------------------------------

def _haar_vector(H: HopfAlgebra) -> np.ndarray:
    n = H.dim
    eye = np.eye(n)
    L = H.left_mult_matrices() - H.counit[:, None, None] * eye
    R = H.right_mult_matrices() - H.counit[:, None, None] * eye
    A = np.concatenate([L.reshape(n * n, n), R.reshape(n * n, n)])
    _, s, vh = np.linalg.svd(A)
    scale = max(s[0] if s.size else 0.0, 1.0)
    null = vh[np.sum(s > HAAR_NULL_TOL * scale):].conj()
    if null.shape[0] == 0:
        raise NoHaarIntegral(f"no two-sided integral in {H.label}")
    if null.shape[0] > 1:
        raise NonUniqueHaar(null.shape[0])
    v = null[0]
    e = H.counit @ v
    if abs(e) <= HAAR_NULL_TOL:
        raise NoHaarIntegral(f"counit vanishes on the integral of {H.label}")
    v = v / e
    v[np.abs(v) < 1e-15] = 0.0
    return v


def haar_checks(H: HopfAlgebra, l: np.ndarray) -> dict:
    """Residuals of the standard properties of a normalised Haar integral."""
    n = H.dim
    res = {}
    res["invariance"] = max(
        _maxabs(np.einsum("ijk,j->ik", H.mult, l) - np.outer(H.counit, l)),
        _maxabs(np.einsum("jik,j->ik", H.mult, l) - np.outer(H.counit, l)),
    )
    res["normalised"] = abs(H.counit @ l - 1.0)
    res["idempotent"] = _maxabs(H.mul_vec(l, l) - l)
    if H.star is not None:
        res["self-adjoint"] = _maxabs(H.star_vec(l) - l)
    res["antipode fixed"] = _maxabs(H.antipode @ l - l)
    cyc = 0.0
    for k in range(1, 4):
        t = np.tensordot(l, iterated_coproduct_tensor(H, k), axes=([0], [0]))
        cyc = max(cyc, _maxabs(t - np.moveaxis(t, 0, -1)))
    res["cyclic coproduct"] = cyc
    dl = H.comul_vec(l)
    e = dl @ H.antipode.T  # (id (x) S) Delta l
    res["separability unit"] = _maxabs(np.einsum("pq,pqk->k", e, H.mult) - H.unit)
    # e.e in H (x) H^op: (p (x) q)(r (x) s) = pr (x) sq
    ee = np.einsum("pq,rs,pra,sqb->ab", e, e, H.mult, H.mult, optimize=True)
    res["separability idempotent"] = _maxabs(ee - e)
    # (h (x) 1) Delta l = (1 (x) S h) Delta l and Delta l (h (x) 1) = Delta l (1 (x) S h)
    lm = np.einsum("hpa,pq->haq", H.mult, dl)
    rm = np.einsum("sqb,pq,sh->hpb", H.mult, dl, H.antipode)
    sep = _maxabs(lm - rm)
    lm = np.einsum("pha,pq->haq", H.mult, dl)
    rm = np.einsum("qsb,pq,sh->hpb", H.mult, dl, H.antipode)
    res["separability exchange"] = max(sep, _maxabs(lm - rm))
    # <alpha_1, l> alpha_2 = <alpha_2, l> alpha_1 = <l, alpha> 1 with the dual in the dual basis
    dstar = np.transpose(H.mult, (2, 0, 1))
    target = np.outer(l, H.counit)
    res["dual pairing collapse"] = max(
        _maxabs(np.einsum("aij,i->aj", dstar, l) - target),
        _maxabs(np.einsum("aij,j->ai", dstar, l) - target),
    )
    del n
    return res


def haar_integral(H: HopfAlgebra) -> Element:
    """Unique normalised two-sided integral of ``H``, cached on the handle.

    Raises
    ------
    NoHaarIntegral, NonUniqueHaar
        If the invariance system has no (or a degenerate) solution.
    AxiomViolation
        If a standard Haar property fails beyond ``1e-12``.
    """
    if "haar" not in H._cache:
        l = _haar_vector(H)
        res = haar_checks(H, l)
        for name, r in res.items():
            if r > STRUCT_TOL:
                raise AxiomViolation(f"haar {name}", r, H.label)
        H._cache["haar_residuals"] = res
        H._cache["haar"] = l
    return Element(H, H._cache["haar"].copy())


# ---------------------------------------------------------------------------
# inner product on a dual algebra
# ---------------------------------------------------------------------------

def gram_matrix(Hs: HopfAlgebra) -> np.ndarray:
    """Gram matrix ``G[i, j] = <l, (e^i)* e^j>`` of the Haar inner product.

    ``Hs`` is a dual algebra ``H*``; ``l`` is the Haar integral of the
    algebra it pairs with in the dual basis.

    Raises
    ------
    StarUndefined
        If ``Hs`` has no star.
    NonPositive
        If the form is not positive definite.
    """
    if "gram" not in Hs._cache:
        if Hs.star is None:
            raise StarUndefined(f"no star structure on {Hs.label}")
        H = Hs._cache.get("dual")
        if H is None:
            H, _ = dual(Hs)
        l = haar_integral(H).coeffs
        G = np.einsum("pi,pjk,k->ij", Hs.star, Hs.mult, l)
        G = 0.5 * (G + G.conj().T) if _maxabs(G - G.conj().T) < 1e-12 else G
        w = np.linalg.eigvalsh(0.5 * (G + G.conj().T))
        if _maxabs(G - G.conj().T) > 1e-12 or w[0] <= POSITIVITY_TOL:
            raise NonPositive(w[0])
        Hs._cache["gram"] = G
    return Hs._cache["gram"]


def inner_product(phi: Element, psi: Element) -> complex:
    """Haar inner product ``<l, phi* psi>``, antilinear in ``phi``."""
    _check_member(phi)
    _check_member(psi, phi.algebra)
    G = gram_matrix(phi.algebra)
    return complex(np.conj(phi.coeffs) @ G @ psi.coeffs)


def random_element(H: HopfAlgebra, rng: np.random.Generator) -> Element:
    return Element(H, rng.normal(size=H.dim) + 1j * rng.normal(size=H.dim))

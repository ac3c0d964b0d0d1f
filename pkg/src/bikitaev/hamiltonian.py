"""Commuting-projector Hamiltonian, its spectrum and its protected space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bicross import Bicrossproduct, mirror_bicrossproduct
from .errors import DimensionCap, ProjectorCheckFailed
from .hopf import HopfAlgebra, gram_matrix, haar_integral
from .lattice import RibbonGraph, Site
from .siteops import (
    DENSE_CAP,
    OperatorSum,
    _relative,
    face_operator,
    identity_operator,
    residual,
    vertex_operator,
)

PROJECTOR_TOL = 1e-10
RANK_CUTOFF = 1e-8
PROBE_CAP = 10**6


@dataclass(eq=False)
class ModelSpec:
    """Graph plus algebra data defining one lattice model.

    ``vertex_sites`` holds one site per vertex and ``face_sites`` one site
    per face.
    """

    graph: RibbonGraph
    algebra: HopfAlgebra
    bicross: Bicrossproduct
    haar_h: object
    haar_cop: object
    vertex_sites: list
    face_sites: list

    @property
    def dim(self) -> int:
        return self.bicross.dual.dim ** self.graph.n_edges


def model(graph: RibbonGraph, H: HopfAlgebra) -> ModelSpec:
    B = mirror_bicrossproduct(H)
    return ModelSpec(
        graph, H, B, haar_integral(H), haar_integral(B.cop), graph.vertex_sites(), graph.face_sites()
    )


def vertex_projector(m: ModelSpec, site: Site):
    return vertex_operator(m.graph, site, m.haar_h, m.bicross)


def face_projector(m: ModelSpec, site: Site):
    return face_operator(m.graph, site, m.haar_cop, m.bicross)


# ---------------------------------------------------------------------------
# metric helpers
# ---------------------------------------------------------------------------

def factor_apply(M: np.ndarray, vecs: np.ndarray, n_edges: int) -> np.ndarray:
    """Apply ``M`` on every tensor factor of each row of ``vecs``."""
    d = M.shape[0]
    arr = np.asarray(vecs, dtype=complex)
    single = arr.ndim == 1
    t = arr.reshape((-1,) + (d,) * n_edges)
    for k in range(n_edges):
        t = np.moveaxis(np.tensordot(t, M, axes=([k + 1], [1])), -1, k + 1)
    out = t.reshape(-1, d**n_edges)
    return out[0] if single else out


def metric_inner(m: ModelSpec, phi, psi) -> complex:
    G = gram_matrix(m.bicross.dual)
    return complex(np.vdot(phi, factor_apply(G, psi, m.graph.n_edges)))


def _sqrtm(G):
    w, v = np.linalg.eigh(G)
    return (v * np.sqrt(w)) @ v.conj().T, (v / np.sqrt(w)) @ v.conj().T


# ---------------------------------------------------------------------------
# projectors
# ---------------------------------------------------------------------------

def _start_variants(m: ModelSpec, site: Site, kind: str):
    g = m.graph
    if kind == "vertex":
        rot = g.rotations[site.vertex]
        return [Site(site.vertex, site.corner_half, h) for h in rot]
    face = g.faces[g.site_face(site)]
    out = []
    for d in face.darts:
        a = g.alpha(d)
        v = g.half_vertex[a]
        if v is not None and face.closed:
            out.append(Site(v, a, a))
    return out or [site]


def projectors(m: ModelSpec, check=True, strict=True, rng=None, samples=20, dense_cap=DENSE_CAP):
    """Build the vertex and face projectors and verify their properties.

    Returns
    -------
    (list, list, dict)
        Vertex projectors, face projectors and the residual report.

    Raises
    ------
    ProjectorCheckFailed
        With ``strict=True``, for the first property above ``1e-10``.
    """
    A = [vertex_projector(m, s) for s in m.vertex_sites]
    Bp = [face_projector(m, s) for s in m.face_sites]
    report = {}
    if check:
        kw = {"rng": rng if rng is not None else np.random.default_rng(0), "samples": samples,
              "dense_cap": dense_cap}
        G = gram_matrix(m.bicross.dual)
        ops = A + Bp
        if m.dim <= dense_cap:
            # assemble each projector once; every check is then a dense matmul
            dense = [P.to_dense(dense_cap) for P in ops]
            adj = [P.adjoint(G).to_dense(dense_cap) for P in ops]

            def res(X, Y):
                return _relative(np.linalg.norm(X - Y), np.linalg.norm(X), np.linalg.norm(Y))

            report["idempotent"] = max(res(D @ D, D) for D in dense)
            report["hermitian"] = max(res(Da, D) for Da, D in zip(adj, dense))
            comm = 0.0
            for i in range(len(dense)):
                for j in range(i + 1, len(dense)):
                    comm = max(comm, res(dense[i] @ dense[j], dense[j] @ dense[i]))
            report["commuting"] = comm
        else:
            report["idempotent"] = max(residual(P @ P, P, **kw) for P in ops)
            report["hermitian"] = max(residual(P.adjoint(G), P, **kw) for P in ops)
            comm = 0.0
            for i in range(len(ops)):
                for j in range(i + 1, len(ops)):
                    comm = max(comm, residual(ops[i] @ ops[j], ops[j] @ ops[i], **kw))
            report["commuting"] = comm
        start = 0.0
        cached = dense if m.dim <= dense_cap else [None] * len(ops)
        variants = [(vertex_projector, "vertex", s) for s in m.vertex_sites]
        variants += [(face_projector, "face", s) for s in m.face_sites]
        for (build, kind, s), P, D in zip(variants, ops, cached):
            for s2 in _start_variants(m, s, kind):
                if s2 == s:
                    continue
                Q = build(m, s2)
                if D is not None:
                    Qd = Q.to_dense(dense_cap)
                    r = _relative(np.linalg.norm(Qd - D), np.linalg.norm(Qd), np.linalg.norm(D))
                else:
                    r = residual(Q, P, **kw)
                start = max(start, r)
        report["start independent"] = start
        if strict:
            for name, r in report.items():
                if not r <= PROJECTOR_TOL:
                    raise ProjectorCheckFailed(name, r)
    return A, Bp, report


def hamiltonian(m: ModelSpec, A=None, Bp=None) -> OperatorSum:
    """``sum_v (1 - A_v) + sum_p (1 - B_p)`` as an operator sum."""
    if A is None or Bp is None:
        A, Bp, _ = projectors(m, check=False)
    ident = identity_operator(m.graph, m.bicross.dual.dim)
    terms = [(float(len(A) + len(Bp)), ident)]
    terms += [(-1.0, P) for P in A + Bp]
    return OperatorSum(terms)


def protected_projector(m: ModelSpec, A=None, Bp=None, order="vertex-face"):
    """Product of all projectors; ``"vertex-face"`` means ``prod A_v prod B_p``."""
    if A is None or Bp is None:
        A, Bp, _ = projectors(m, check=False)
    ops = list(A) + list(Bp) if order == "vertex-face" else list(Bp) + list(A)
    P = ops[-1]
    for op in reversed(ops[:-1]):
        P = op @ P
    return P


def _metric_orthonormalize(m: ModelSpec, rows: np.ndarray) -> np.ndarray:
    if rows.shape[0] == 0:
        return rows
    G = gram_matrix(m.bicross.dual)
    Grows = factor_apply(G, rows, m.graph.n_edges)
    M = rows.conj() @ Grows.T
    w, v = np.linalg.eigh(0.5 * (M + M.conj().T))
    T = v / np.sqrt(w)
    return (T.T @ rows)


def ground_space(m: ModelSpec, dense_cap=DENSE_CAP, probe_cap=PROBE_CAP, rng=None, A=None, Bp=None):
    """Dimension and metric-orthonormal basis (rows) of the image of the projector product.

    Spaces up to ``dense_cap`` use a dense SVD of the projector product;
    larger ones, up to ``probe_cap``, use random rank probing.

    Raises
    ------
    DimensionCap
        If the state space exceeds ``probe_cap``.
    """
    dim = m.dim
    if dim > probe_cap:
        raise DimensionCap(dim, probe_cap)
    P = protected_projector(m, A, Bp)
    if dim <= dense_cap:
        Pd = P.to_dense(dense_cap)
        u, s, _ = np.linalg.svd(Pd)
        smax = s[0] if s.size and s[0] > 0 else 1.0
        r = int(np.sum(s > RANK_CUTOFF * smax))
        rows = u[:, :r].T
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        k = 8
        while True:
            probes = rng.normal(size=(k, dim)) + 1j * rng.normal(size=(k, dim))
            img = P.apply(probes)
            u, s, vh = np.linalg.svd(img, full_matrices=False)
            smax = s[0] if s.size and s[0] > 0 else 1.0
            r = int(np.sum(s > RANK_CUTOFF * smax))
            if r < k or k >= dim:
                rows = vh[:r]
                break
            k *= 2
    return r, _metric_orthonormalize(m, rows)


def spectrum(m: ModelSpec, dense_cap=DENSE_CAP, A=None, Bp=None):
    """Eigenvalues of the Hamiltonian in a metric-orthonormal basis.

    Returns
    -------
    (ndarray, float)
        Sorted eigenvalues and the Hermiticity residual of the transformed
        matrix. When that residual exceeds ``1e-10`` the eigenvalues come
        from a general eigensolver and may carry imaginary parts.
    """
    dim = m.dim
    if dim > dense_cap:
        raise DimensionCap(dim, dense_cap)
    h = hamiltonian(m, A, Bp).to_dense(dense_cap)
    G = gram_matrix(m.bicross.dual)
    Gh, Gmh = _sqrtm(G)
    E = m.graph.n_edges
    X = factor_apply(Gh, h.T, E).T  # G^{1/2} h
    X = factor_apply(Gmh.T, X, E)  # (G^{1/2} h) G^{-1/2}
    herm = float(np.max(np.abs(X - X.conj().T))) / max(1.0, float(np.max(np.abs(X))))
    if herm <= PROJECTOR_TOL:
        ev = np.linalg.eigvalsh(0.5 * (X + X.conj().T))
    else:
        ev = np.linalg.eigvals(X)
        ev = ev[np.lexsort((ev.imag, ev.real))]
    return ev, herm


def integrality_residual(ev) -> float:
    ev = np.asarray(ev)
    nearest = np.maximum(np.round(ev.real), 0)
    return float(np.max(np.abs(ev - nearest))) if ev.size else 0.0

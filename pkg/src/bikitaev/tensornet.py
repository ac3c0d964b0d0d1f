"""Hopf tensor trace, tensor-network states and the Haar ground state.

Every edge label ``phi`` in ``H*`` is split by ``(S (x) id) Delta``: the
half ``phi_2`` goes to the face traversed by the dart running along the
edge (the dart leaving the source half-edge) and ``S phi_1`` goes to the
face traversed by the opposite dart. Each face multiplies its halves in
dart order, starting from its starting corner, and pairs the product with
its label in ``H^cop``.

A face of ``k`` darts is never expanded into a ``d**k`` tensor. It enters
the network as a chain of ``k - 1`` multiplication tensors of ``H*``
closed off by the face label, so long faces cost no more than short ones.

Physical states keep ``phi_1`` of ``Delta phi`` on each edge and feed
``phi_2`` into the trace. The trace split and the physical split are
kept as separate code paths (:func:`split_edge` and :func:`edge_state_tensor`).
"""

from __future__ import annotations

import itertools
import json
import string
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryPresent, DimensionCap, MissingBoundaryLabels, ParseError, ZeroState
from .hopf import Element, HopfAlgebra, TensorElement, dual, haar_integral, op_cop
from .lattice import LatticeState, RibbonGraph

ZERO_STATE_TOL = 1e-10
MAX_INTERMEDIATE = 1 << 25


@dataclass(eq=False)
class TensorNetworkSpec:
    """Labels of a Hopf tensor network on a ribbon graph.

    Parameters
    ----------
    graph : RibbonGraph
    algebra : HopfAlgebra
        The algebra ``H``; edge labels live in its dual and face labels in
        ``H^cop`` (the same coefficient space as ``H``).
    edge_labels : dict
        Edge id to coefficient vector in ``H*``, for edges with both
        half-edges in faces.
    face_labels : dict
        Face index (into ``graph.faces``) to coefficient vector in ``H``.
    boundary_edge_labels, boundary_face_labels : dict
        Labels of edges touching the boundary (by edge id) and of boundary
        components (by position in ``graph.boundary``). Required exactly
        when the graph has a boundary.
    starts : dict
        Face index to the position of its starting dart (the origin of
        the iterated coproduct of its label). Missing faces start at 0.
    """

    graph: RibbonGraph
    algebra: HopfAlgebra
    edge_labels: dict
    face_labels: dict
    boundary_edge_labels: dict = field(default_factory=dict)
    boundary_face_labels: dict = field(default_factory=dict)
    starts: dict = field(default_factory=dict)

    @property
    def dual(self) -> HopfAlgebra:
        return dual(self.algebra)[0]

    def boundary_edges(self):
        """Ids of edges with a half-edge on the boundary."""
        g = self.graph
        return [e.id for e in g.edges if e.source_half in g.excluded or e.target_half in g.excluded]

    def label_of_edge(self, edge_id):
        if edge_id in self.boundary_edge_labels:
            return self.boundary_edge_labels[edge_id]
        return self.edge_labels[edge_id]


def _coeffs(x, dim):
    v = np.asarray(x.coeffs if isinstance(x, Element) else x, dtype=complex).reshape(-1)
    if v.shape[0] != dim:
        raise ParseError(f"label has length {v.shape[0]}, expected {dim}")
    return v


def make_spec(graph: RibbonGraph, H: HopfAlgebra, edge_labels="haar", face_labels="haar",
              boundary_edge_labels=None, boundary_face_labels=None, starts=None) -> TensorNetworkSpec:
    """Build a spec, filling labels given as ``"haar"`` (or a single vector) on every slot.

    Haar edge labels are the integral of ``H*``; Haar face labels are the
    integral of ``H^cop``.
    """
    D = dual(H)[0]
    eta = haar_integral(D).coeffs
    k = haar_integral(op_cop(H, "cop")).coeffs
    bedges = {e.id for e in graph.edges if e.source_half in graph.excluded or e.target_half in graph.excluded}

    def fill(labels, keys, haar, dim):
        if labels is None:
            return {}
        if isinstance(labels, str):
            if labels != "haar":
                raise ParseError(f"unknown label keyword {labels!r}")
            return {key: haar.copy() for key in keys}
        if isinstance(labels, dict):
            return {key: (haar.copy() if isinstance(v, str) and v == "haar" else _coeffs(v, dim))
                    for key, v in labels.items()}
        v = _coeffs(labels, dim)
        return {key: v.copy() for key in keys}

    interior = [e.id for e in graph.edges if e.id not in bedges]
    spec = TensorNetworkSpec(
        graph, H,
        fill(edge_labels, interior, eta, D.dim),
        fill(face_labels, range(len(graph.faces)), k, H.dim),
        fill(boundary_edge_labels, sorted(bedges), eta, D.dim),
        fill(boundary_face_labels, range(len(graph.boundary)), k, H.dim),
        dict(starts or {}),
    )
    return spec


def _validate(spec: TensorNetworkSpec, allow_boundary: bool):
    g = spec.graph
    if g.boundary or g.excluded:
        if not allow_boundary:
            raise BoundaryPresent("graph has a boundary; use tensor_trace_boundary")
        missing = [e for e in spec.boundary_edges() if e not in spec.boundary_edge_labels]
        missing += [f"boundary {i}" for i in range(len(g.boundary)) if i not in spec.boundary_face_labels]
        if missing:
            raise MissingBoundaryLabels(f"no boundary labels for {missing}")
    elif not g.is_closed and not allow_boundary:
        raise BoundaryPresent("graph has free half-edges; use tensor_trace_boundary")
    for e in g.edges:
        if e.id not in spec.edge_labels and e.id not in spec.boundary_edge_labels:
            raise ParseError(f"edge {e.id!r} has no label")
    for i in range(len(g.faces)):
        if i not in spec.face_labels:
            raise ParseError(f"face {i} has no label")


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------

def split_edge(phi) -> TensorElement:
    """``(S (x) id) Delta phi = S phi_1 (x) phi_2`` as a tensor element of ``H* (x) H*``."""
    D = phi.algebra
    t = np.einsum("p,pyj,iy->ij", phi.coeffs, D.comult, D.antipode)
    return TensorElement((D, D), t)


def _split_matrix(D: HopfAlgebra, phi: np.ndarray) -> np.ndarray:
    """``X[i, j]``: coefficient of ``e^i (x) e^j`` in ``S phi_1 (x) phi_2``."""
    return np.einsum("p,pyj,iy->ij", phi, D.comult, D.antipode)


def edge_state_tensor(D: HopfAlgebra, phi: np.ndarray) -> np.ndarray:
    """``U[x, i, j]`` for ``phi_1 (x) S phi_2 (x) phi_3``; ``x`` is the physical leg."""
    c2 = np.einsum("p,pxw,wyz->xyz", phi, D.comult, D.comult)
    return np.einsum("iy,xyj->xij", D.antipode, c2)


# ---------------------------------------------------------------------------
# network assembly and contraction
# ---------------------------------------------------------------------------

def _faces_with_labels(spec: TensorNetworkSpec):
    """``(dart list, label)`` per face, rotated to the starting dart, plus boundary faces."""
    g = spec.graph
    out = []
    for i, f in enumerate(g.faces):
        darts = list(f.darts)
        s = spec.starts.get(i, 0) % len(darts)
        if s and not f.closed:
            raise ParseError(f"face {i} is open; its start is fixed at the walk's first dart")
        out.append((darts[s:] + darts[:s], spec.face_labels[i]))
    for i, comp in enumerate(g.boundary):
        out.append((list(comp), spec.boundary_face_labels[i]))
    return out


def _network(spec: TensorNetworkSpec, physical: bool):
    """Operands ``(array, labels)`` in planner order and the output labels."""
    g = spec.graph
    D = spec.dual
    counter = itertools.count()
    dart_label = {}
    for e in g.edges:
        dart_label[e.source_half] = next(counter)
        dart_label[e.target_half] = next(counter)
    phys = {e.id: next(counter) for e in g.edges} if physical else {}
    edge_ops = {}
    for e in g.edges:
        phi = _coeffs(spec.label_of_edge(e.id), D.dim)
        s, t = dart_label[e.source_half], dart_label[e.target_half]
        if physical:
            edge_ops[e.id] = (edge_state_tensor(D, phi), [phys[e.id], t, s])
        else:
            edge_ops[e.id] = (_split_matrix(D, phi), [t, s])
    face_ops = []
    for darts, label in _faces_with_labels(spec):
        a = _coeffs(label, spec.algebra.dim)
        labels = [dart_label[d] for d in darts]
        # each chain element carries the edge whose dart it consumes, so the
        # planner can bring edge tensors in right before they are needed
        ek = [g.edge_of(d) for d in darts]
        chain = []
        if len(labels) == 1:
            chain.append(((a, labels), [ek[0]]))
        else:
            bond = next(counter)
            chain.append(((D.mult, [labels[0], labels[1], bond]), ek[:2]))
            for lab, k in zip(labels[2:], ek[2:]):
                nb = next(counter)
                chain.append(((D.mult, [bond, lab, nb]), [k]))
                bond = nb
            chain.append(((a, [bond]), []))
        face_ops.append((ek, chain))
    # planner: faces by ascending number of edges not yet brought in
    ordered, seen = [], set()
    remaining = list(face_ops)
    while remaining:
        remaining.sort(key=lambda fo: len({k for k in fo[0] if k not in seen}))
        _, chain = remaining.pop(0)
        for op, needs in chain:
            for k in needs:
                if k not in seen:
                    seen.add(k)
                    ordered.append(edge_ops[g.edges[k].id])
            ordered.append(op)
    for k, e in enumerate(g.edges):
        if k not in seen:
            ordered.append(edge_ops[e.id])
    out = [phys[e.id] for e in g.edges] if physical else []
    return ordered, out


def _pairwise(a, la, b, lb, keep):
    letters = {}
    for lab in list(la) + list(lb):
        if lab not in letters:
            letters[lab] = string.ascii_letters[len(letters)]
    lo = [lab for lab in dict.fromkeys(list(la) + list(lb)) if lab in keep]
    expr = "".join(letters[x] for x in la) + "," + "".join(letters[x] for x in lb) + "->" + "".join(letters[x] for x in lo)
    return np.einsum(expr, a, b), lo


def contract(operands, output, max_size=MAX_INTERMEDIATE):
    """Contract ``(array, labels)`` operands pairwise, summing labels once unused.

    The next operand is chosen greedily: the one whose contraction with the
    running result leaves the smallest intermediate, ties broken by the
    given order (faces with the fewest unresolved edges first).

    Raises
    ------
    DimensionCap
        If an intermediate would hold more than ``max_size`` entries.
    """
    if not operands:
        return np.array(1.0 + 0j)
    ops = [(np.asarray(a, dtype=complex), list(lab)) for a, lab in operands]
    count = {}
    for _, lab in ops:
        for x in lab:
            count[x] = count.get(x, 0) + 1
    for x in output:
        count[x] = count.get(x, 0) + 1
    result, labels = ops.pop(0)
    for x in labels:
        count[x] -= 1
    while ops:
        best, best_size = 0, None
        for n, (arr, lab) in enumerate(ops):
            dims = dict(zip(labels, result.shape))
            dims.update(zip(lab, arr.shape))
            kept = set(labels) | set(lab)
            kept = {x for x in kept if count[x] - lab.count(x) > 0}
            size = int(np.prod([dims[x] for x in kept])) if kept else 1
            if best_size is None or size < best_size:
                best, best_size = n, size
        if best_size > max_size:
            raise DimensionCap(best_size, max_size)
        arr, lab = ops.pop(best)
        for x in lab:
            count[x] -= 1
        keep = {x for x in set(labels) | set(lab) if count[x] > 0}
        result, labels = _pairwise(result, labels, arr, lab, keep)
    if sorted(labels) != sorted(output):
        result, labels = _pairwise(result, labels, np.array(1.0), [], set(output))
    perm = [labels.index(x) for x in output]
    return np.transpose(result, perm) if perm else result


def tensor_trace(spec: TensorNetworkSpec) -> complex:
    """Hopf tensor trace of a graph without boundary.

    Raises
    ------
    BoundaryPresent
        If the graph has a boundary or free half-edges.
    """
    _validate(spec, allow_boundary=False)
    ops, out = _network(spec, physical=False)
    return complex(contract(ops, out))


def tensor_trace_boundary(spec: TensorNetworkSpec) -> complex:
    """Hopf tensor trace with boundary edges and boundary faces.

    Each boundary component, listed anticlockwise in ``graph.boundary``,
    becomes one face whose darts are its boundary half-edges. Edges
    touching the boundary take their labels from ``boundary_edge_labels``.
    Without a boundary this equals :func:`tensor_trace`.

    Raises
    ------
    MissingBoundaryLabels
    """
    _validate(spec, allow_boundary=True)
    ops, out = _network(spec, physical=False)
    return complex(contract(ops, out))


def boundary_faces(graph: RibbonGraph):
    """Dart lists of the faces created by deforming each boundary component."""
    return [tuple(c) for c in graph.boundary]


def tensor_trace_bruteforce(spec: TensorNetworkSpec) -> complex:
    """Exhaustive Sweedler-sum evaluation of the trace, for testing.

    Every split edge label is expanded over the basis of ``H* (x) H*``;
    each face product is then formed by explicit multiplication of basis
    vectors and paired with its label.
    """
    _validate(spec, allow_boundary=True)
    g = spec.graph
    D = spec.dual
    terms = []
    for e in g.edges:
        X = _split_matrix(D, _coeffs(spec.label_of_edge(e.id), D.dim))
        nz = np.argwhere(np.abs(X) > 0)
        terms.append([(i, j, X[i, j]) for i, j in nz])
    faces = _faces_with_labels(spec)
    basis = np.eye(D.dim, dtype=complex)
    total = 0j
    for choice in itertools.product(*terms):
        half = {}
        coef = 1.0 + 0j
        for e, (i, j, c) in zip(g.edges, choice):
            half[e.target_half] = basis[i]
            half[e.source_half] = basis[j]
            coef *= c
        for darts, label in faces:
            v = half[darts[0]]
            for d in darts[1:]:
                v = D.mul_vec(v, half[d])
            coef *= v @ _coeffs(label, spec.algebra.dim)
        total += coef
    return complex(total)


def reverse_edge_spec(spec: TensorNetworkSpec, edge_id) -> TensorNetworkSpec:
    """Flip one edge and relabel it by ``S phi``, keeping every face's label and start.

    Face indices can change when an edge is flipped (faces are enumerated
    from the edge list), so faces are matched by their dart sets.
    """
    g = spec.graph
    g2 = g.reversed(edge_id)
    D = spec.dual
    old = {frozenset(f.darts): (i, f) for i, f in enumerate(g.faces)}
    faces, starts = {}, {}
    for j, f in enumerate(g2.faces):
        i, fo = old[frozenset(f.darts)]
        faces[j] = spec.face_labels[i]
        first = fo.darts[spec.starts.get(i, 0) % len(fo.darts)]
        starts[j] = list(f.darts).index(first)
    edges = dict(spec.edge_labels)
    bedges = dict(spec.boundary_edge_labels)
    target = bedges if edge_id in bedges else edges
    target[edge_id] = D.antipode @ _coeffs(target[edge_id], D.dim)
    return TensorNetworkSpec(g2, spec.algebra, edges, faces, bedges,
                             dict(spec.boundary_face_labels), starts)


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

def tn_state(spec: TensorNetworkSpec) -> LatticeState:
    """``ttr({phi_e_2}; {a_p}) (x)_e |phi_e_1>`` as a lattice state.

    Raises
    ------
    BoundaryPresent
    """
    _validate(spec, allow_boundary=False)
    ops, out = _network(spec, physical=True)
    psi = contract(ops, out)
    return LatticeState(spec.graph, spec.dual, psi.reshape(-1))


def ground_state(m, normalize=True, spec: TensorNetworkSpec = None) -> LatticeState:
    """Tensor-network state with Haar labels on every edge and face.

    The state is normalised under the Haar inner product metric. Passing
    ``spec`` evaluates other labels through the same path.

    Raises
    ------
    ZeroState
        If the contracted state has metric norm at most ``1e-10``.
    """
    from .hamiltonian import metric_inner

    spec = spec if spec is not None else make_spec(m.graph, m.algebra)
    psi = tn_state(spec)
    norm = float(np.sqrt(max(metric_inner(m, psi.coeffs, psi.coeffs).real, 0.0)))
    if norm <= ZERO_STATE_TOL:
        raise ZeroState(norm)
    if normalize:
        psi = LatticeState(psi.graph, psi.algebra, psi.coeffs / norm)
    return psi


def ground_state_report(m, psi: LatticeState = None, A=None, Bp=None) -> dict:
    """Invariance residuals, energy and projector residual of the Haar ground state.

    Residuals are relative 2-norm errors ``||P psi - psi|| / ||psi||``.
    """
    from .hamiltonian import hamiltonian, metric_inner, projectors, protected_projector

    if A is None or Bp is None:
        A, Bp, _ = projectors(m, check=False)
    if psi is None:
        psi = ground_state(m)
    v = psi.coeffs
    n = float(np.linalg.norm(v))
    vert = max((float(np.linalg.norm(P.apply(v) - v)) / n for P in A), default=0.0)
    face = max((float(np.linalg.norm(P.apply(v) - v)) / n for P in Bp), default=0.0)
    h = hamiltonian(m, A, Bp)
    energy = metric_inner(m, v, h.apply(v)) / metric_inner(m, v, v)
    P = protected_projector(m, A, Bp)
    proj = float(np.linalg.norm(P.apply(v) - v)) / n
    return {
        "norm": float(np.sqrt(metric_inner(m, v, v).real)),
        "vertex": vert,
        "face": face,
        "energy": float(abs(energy)),
        "projector": proj,
    }


def load_spec(source, H: HopfAlgebra, graph: RibbonGraph = None) -> TensorNetworkSpec:
    """Read a spec from JSON text or a decoded dict.

    The format is ``{"graph": ..., "edge_labels": {id: vector | "haar"},
    "face_labels": {index: vector | "haar"}, "boundary_labels": {"edges":
    ..., "faces": ...}, "starts": {index: position}}``; vectors are lists
    of numbers or ``[re, im]`` pairs. ``graph`` overrides the file's graph.
    """
    from .algebras import _decode
    from .lattice import graph_from_dict, load_graph

    try:
        data = json.loads(source) if isinstance(source, str) else dict(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if graph is None:
        gsrc = data.get("graph")
        if gsrc is None:
            raise ParseError("spec has no graph")
        graph = load_graph(gsrc) if isinstance(gsrc, str) else graph_from_dict(gsrc)

    def conv(labels):
        if labels is None or isinstance(labels, str):
            return labels
        return {k: (v if isinstance(v, str) else _decode(v)) for k, v in labels.items()}

    faces = conv(data.get("face_labels", "haar"))
    if isinstance(faces, dict):
        faces = {int(k): v for k, v in faces.items()}
    bl = data.get("boundary_labels") or {}
    bfaces = conv(bl.get("faces", "haar" if graph.boundary else None))
    if isinstance(bfaces, dict):
        bfaces = {int(k): v for k, v in bfaces.items()}
    return make_spec(
        graph, H,
        conv(data.get("edge_labels", "haar")),
        faces,
        conv(bl.get("edges", "haar" if graph.boundary else None)),
        bfaces,
        {int(k): int(v) for k, v in (data.get("starts") or {}).items()},
    )

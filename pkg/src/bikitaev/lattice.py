"""Ribbon graphs: rotation systems, face tracing, sites and builtin fixtures.

A graph is given by vertices with a clockwise list of half-edges (the
rotation) and edges made of a source and a target half-edge. A half-edge
that appears in no rotation is a *free end*: the edge leaves the surface
there. A *dart* is named by the half-edge it departs from and runs along
its edge to the other half. Faces are traced by following a dart and then
turning to the next half-edge clockwise at the endpoint.

Half-edges listed under ``boundary`` name darts that run along the surface
boundary; they are excluded from face tracing. Walks that hit a free end
or an excluded dart are recorded as open faces.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import EulerMismatch, NonManifold, ParseError, SiteInvalid, UnknownFixture


@dataclass(frozen=True)
class Edge:
    id: str
    source_half: str
    target_half: str


@dataclass(frozen=True)
class Site:
    """A vertex together with a face corner and a starting half-edge.

    ``corner_half`` is the half-edge at ``vertex`` through which the face
    arrives; ``start_half`` is where the clockwise vertex legs begin.
    """

    vertex: str
    corner_half: str
    start_half: str


@dataclass(frozen=True)
class Face:
    darts: tuple
    closed: bool


@dataclass(eq=False)
class RibbonGraph:
    """Validated ribbon graph with derived faces.

    Parameters
    ----------
    rotations : dict
        Vertex id to clockwise list of half-edge ids.
    edges : list of Edge
        Edge order fixes the tensor-factor order of the state space.
    """

    rotations: dict
    edges: list
    sites: list = field(default_factory=list)
    genus: int | None = None
    boundary: list = field(default_factory=list)
    name: str = "graph"

    def __post_init__(self):
        self.vertices = list(self.rotations)
        self.half_edge = {}
        for k, e in enumerate(self.edges):
            for half, end in ((e.source_half, "s"), (e.target_half, "t")):
                if half in self.half_edge:
                    raise ParseError(f"half-edge {half!r} used by two edges")
                self.half_edge[half] = (k, end)
        self.edge_index = {e.id: k for k, e in enumerate(self.edges)}
        if len(self.edge_index) != len(self.edges):
            raise ParseError("duplicate edge id")
        self.half_vertex = {h: None for h in self.half_edge}
        self._succ, self._pred = {}, {}
        for v, rot in self.rotations.items():
            if len(rot) == 0:
                raise NonManifold(f"vertex {v!r} has no incident half-edges")
            for h in rot:
                if h not in self.half_edge:
                    raise ParseError(f"vertex {v!r} references undefined half-edge {h!r}")
                if self.half_vertex[h] is not None:
                    raise NonManifold(f"half-edge {h!r} appears at two vertices")
                self.half_vertex[h] = v
            for i, h in enumerate(rot):
                self._succ[h] = rot[(i + 1) % len(rot)]
                self._pred[h] = rot[i - 1]
        for e in self.edges:
            if self.half_vertex[e.source_half] is None and self.half_vertex[e.target_half] is None:
                raise NonManifold(f"edge {e.id!r} has no vertex at either end")
        self.excluded = set()
        for comp in self.boundary:
            for h in comp:
                if h not in self.half_edge:
                    raise ParseError(f"boundary references undefined half-edge {h!r}")
                self.excluded.add(h)
        self.faces = self._trace_faces()
        self._face_of_dart = {d: i for i, f in enumerate(self.faces) for d in f.darts}
        if self.genus is not None and self.is_closed:
            computed = (2 - self.euler_characteristic) // 2
            if 2 - 2 * self.genus != self.euler_characteristic:
                raise EulerMismatch(self.genus, computed)
        for s in self.sites:
            self.check_site(s)

    # -- combinatorics ---------------------------------------------------
    def alpha(self, h):
        k, end = self.half_edge[h]
        e = self.edges[k]
        return e.target_half if end == "s" else e.source_half

    def sigma(self, h):
        return self._succ[h]

    def is_source(self, h) -> bool:
        return self.half_edge[h][1] == "s"

    def edge_of(self, h) -> int:
        return self.half_edge[h][0]

    def _next_dart(self, d):
        a = self.alpha(d)
        if self.half_vertex[a] is None:
            return None
        n = self._succ[a]
        return None if n in self.excluded else n

    def _prev_dart(self, d):
        if self.half_vertex[d] is None:
            return None
        p = self.alpha(self._pred[d])
        return None if p in self.excluded else p

    def _trace_faces(self):
        darts = [h for e in self.edges for h in (e.source_half, e.target_half) if h not in self.excluded]
        used = set()
        faces = []
        for d in darts:
            if d in used or self._prev_dart(d) is not None:
                continue
            walk = []
            while d is not None:
                if d in used:
                    raise NonManifold(f"open face walk revisits dart {d!r}")
                used.add(d)
                walk.append(d)
                d = self._next_dart(d)
            faces.append(Face(tuple(walk), False))
        for d in darts:
            if d in used:
                continue
            walk = []
            while d not in used:
                used.add(d)
                walk.append(d)
                d = self._next_dart(d)
                if d is None:
                    raise NonManifold("face walk ended inside a cycle")
            if d != walk[0]:
                raise NonManifold("face tracing is not a permutation")
            faces.append(Face(tuple(walk), True))
        return faces

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def is_closed(self) -> bool:
        return not self.excluded and all(v is not None for v in self.half_vertex.values())

    @property
    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.faces)

    def face_of(self, dart) -> int:
        return self._face_of_dart[dart]

    # -- sites -----------------------------------------------------------
    def check_site(self, s: Site):
        rot = self.rotations.get(s.vertex)
        if rot is None:
            raise SiteInvalid(f"unknown vertex {s.vertex!r}")
        if s.corner_half not in rot or s.start_half not in rot:
            raise SiteInvalid(f"site half-edges must lie at vertex {s.vertex!r}")

    def make_site(self, vertex, corner_half=None, start_half=None) -> Site:
        rot = self.rotations.get(vertex)
        if rot is None:
            raise SiteInvalid(f"unknown vertex {vertex!r}")
        corner = rot[0] if corner_half is None else corner_half
        s = Site(vertex, corner, corner if start_half is None else start_half)
        self.check_site(s)
        return s

    def site_face(self, s: Site) -> int:
        arriving = self.alpha(s.corner_half)
        if arriving in self._face_of_dart:
            return self._face_of_dart[arriving]
        departing = self._succ[s.corner_half]
        if departing in self._face_of_dart:
            return self._face_of_dart[departing]
        raise SiteInvalid("site corner touches no face")

    def vertex_legs(self, s: Site):
        """Clockwise ``(edge index, half is target)`` legs from the start half-edge."""
        self.check_site(s)
        rot = self.rotations[s.vertex]
        i = rot.index(s.start_half)
        return [(self.edge_of(h), not self.is_source(h)) for h in rot[i:] + rot[:i]]

    def face_legs(self, s: Site):
        """``(edge index, dart runs along the edge)`` legs around the site's face."""
        f = self.faces[self.site_face(s)]
        darts = list(f.darts)
        arriving = self.alpha(s.corner_half)
        if f.closed and arriving in darts:
            i = darts.index(arriving)
            darts = darts[i:] + darts[:i]
        return [(self.edge_of(d), self.is_source(d)) for d in darts]

    def vertex_sites(self):
        return [self.make_site(v) for v in self.vertices]

    def face_sites(self):
        """One site per face, cornered where the face's first dart arrives."""
        out = []
        for f in self.faces:
            d0 = f.darts[0]
            a = self.alpha(d0)
            if self.half_vertex[a] is not None and f.closed:
                out.append(self.make_site(self.half_vertex[a], a))
            else:
                h = d0 if self.half_vertex[d0] is not None else None
                if h is None:
                    raise SiteInvalid("open face has no vertex at its start")
                # the corner whose departing dart is h
                out.append(self.make_site(self.half_vertex[h], self._pred[h]))
        return out

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "vertices": [{"id": v, "rotation": list(r)} for v, r in self.rotations.items()],
            "edges": [{"id": e.id, "source_half": e.source_half, "target_half": e.target_half} for e in self.edges],
            "sites": [{"vertex": s.vertex, "face_hint": s.corner_half, "start_half": s.start_half} for s in self.sites],
        }
        if self.genus is not None:
            out["genus"] = self.genus
        if self.boundary:
            out["boundary"] = [list(c) for c in self.boundary]
        return out

    def reversed(self, edge_id) -> "RibbonGraph":
        """Copy of the graph with one edge orientation flipped."""
        k = self.edge_index[edge_id]
        edges = list(self.edges)
        e = edges[k]
        edges[k] = Edge(e.id, e.target_half, e.source_half)
        return RibbonGraph(dict(self.rotations), edges, list(self.sites), self.genus,
                           [list(c) for c in self.boundary], self.name)


def graph_from_dict(data: dict) -> RibbonGraph:
    """Build a graph from the decoded JSON format.

    Raises
    ------
    ParseError
        On missing fields or references to undefined vertices or half-edges.
    """
    try:
        rotations = {}
        for v in data["vertices"]:
            vid = str(v["id"])
            if vid in rotations:
                raise ParseError(f"duplicate vertex {vid!r}")
            rotations[vid] = [str(h) for h in v["rotation"]]
        edges = [Edge(str(e["id"]), str(e["source_half"]), str(e["target_half"])) for e in data["edges"]]
        site_specs = data.get("sites", [])
        boundary = [[str(h) for h in c] for c in data.get("boundary", [])]
        genus = data.get("genus")
        name = str(data.get("name", "graph"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed graph data: missing or invalid {exc}") from exc
    for s in site_specs:
        if str(s.get("vertex")) not in rotations:
            raise ParseError(f"site references undefined vertex {s.get('vertex')!r}")
    g = RibbonGraph(rotations, edges, [], None if genus is None else int(genus), boundary, name)
    sites = []
    for s in site_specs:
        try:
            sites.append(g.make_site(str(s["vertex"]), s.get("face_hint"), s.get("start_half")))
        except KeyError as exc:
            raise ParseError(f"malformed site: {exc}") from exc
    g.sites = sites
    return g


def parse_graph(text: str) -> RibbonGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("graph file must contain a JSON object")
    return graph_from_dict(data)


def serialize_graph(g: RibbonGraph) -> str:
    return json.dumps(g.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------

def _e(i, s=None, t=None):
    return Edge(str(i), s or f"{i}s", t or f"{i}t")


def minimal():
    """One edge whose source end lies on the boundary, one vertex at its target."""
    g = RibbonGraph({"v": ["et"]}, [_e("e", "es", "et")], boundary=[["es"]], name="minimal")
    g.sites = [g.make_site("v", "et")]
    return g


def two_loop():
    """Two vertices joined by two edges of opposite orientation (theta-like loop)."""
    edges = [_e("e", "es", "et"), _e("f", "fs", "ft")]
    # e: w -> v, f: v -> w
    g = RibbonGraph({"v": ["et", "fs"], "w": ["ft", "es"]}, edges, genus=0, name="two_loop")
    g.sites = [g.make_site("v", "et")]
    return g


def triangle():
    """Triangle on the sphere with edges 1: v->u, 2: u->w, 3: w->v."""
    edges = [_e(1), _e(2), _e(3)]
    rot = {"v": ["1s", "3t"], "u": ["1t", "2s"], "w": ["2t", "3s"]}
    g = RibbonGraph(rot, edges, genus=0, name="triangle")
    g.sites = [g.make_site("v", "3t", "1s"), g.make_site("u", "1t")]
    return g


def seven_edge():
    """Vertex v of degree six on a triangular face p bounded by edges 1, 2, 3."""
    edges = [_e(1), _e(2), _e(3), _e(4), _e(5), _e(6), _e(7)]
    # 1: u->v, 2: v->w, 3: w->u; edges 4 and 7 point into v, 5 and 6 out of it,
    # each ending at its own leaf vertex
    rot = {
        "v": ["1t", "2s", "4t", "5s", "6s", "7t"],
        "u": ["3t", "1s"],
        "w": ["2t", "3s"],
        "x4": ["4s"],
        "x5": ["5t"],
        "x6": ["6t"],
        "x7": ["7s"],
    }
    g = RibbonGraph(rot, edges, genus=0, name="seven_edge")
    g.sites = [g.make_site("v", "1t")]
    return g


def sphere():
    """A single loop edge at one vertex."""
    g = RibbonGraph({"v": ["es", "et"]}, [_e("e", "es", "et")], genus=0, name="sphere")
    g.sites = [g.make_site("v", "es")]
    return g


def torus(m: int, n: int):
    """Periodic ``m x n`` square grid; edges ``h{i}_{j}`` run east, ``v{i}_{j}`` north."""
    if m < 1 or n < 1:
        raise UnknownFixture("torus dimensions must be positive")
    edges, rot = [], {}
    for j in range(n):
        for i in range(m):
            edges.append(Edge(f"h{i}_{j}", f"h{i}_{j}s", f"h{i}_{j}t"))
            edges.append(Edge(f"v{i}_{j}", f"v{i}_{j}s", f"v{i}_{j}t"))
    for j in range(n):
        for i in range(m):
            # clockwise: north, east, south, west
            rot[f"{i}_{j}"] = [
                f"v{i}_{j}s", f"h{i}_{j}s", f"v{i}_{(j - 1) % n}t", f"h{(i - 1) % m}_{j}t",
            ]
    g = RibbonGraph(rot, edges, genus=1, name=f"torus-{m}x{n}")
    g.sites = [g.make_site(v) for v in g.vertices]
    return g


FIXTURES = ("minimal", "two_loop", "triangle", "seven_edge", "sphere", "torus-MxN")


def builtin_graph(name: str) -> RibbonGraph:
    """Return a builtin fixture by name.

    Accepted names are ``minimal``, ``two_loop``, ``triangle``,
    ``seven_edge``, ``sphere`` and ``torus-MxN`` (also ``torus(M,N)``).
    """
    simple = {"minimal": minimal, "two_loop": two_loop, "triangle": triangle,
              "seven_edge": seven_edge, "sphere": sphere}
    if name in simple:
        return simple[name]()
    key = name.replace("(", "-").replace(")", "").replace(",", "x").replace(" ", "")
    if key.startswith("torus-"):
        try:
            m, n = (int(t) for t in key[len("torus-"):].split("x"))
        except ValueError:
            raise UnknownFixture(f"bad torus fixture {name!r}") from None
        return torus(m, n)
    raise UnknownFixture(f"unknown fixture {name!r}")


def load_graph(source: str) -> RibbonGraph:
    """Resolve a builtin fixture name or a path to a JSON graph file."""
    try:
        return builtin_graph(source)
    except UnknownFixture:
        pass
    try:
        with open(source) as fh:
            return parse_graph(fh.read())
    except FileNotFoundError:
        raise UnknownFixture(f"no fixture or file named {source!r}") from None


# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class LatticeState:
    """Vector in the tensor power of ``H*`` over the edges, row-major by edge index."""

    graph: RibbonGraph
    algebra: object
    coeffs: np.ndarray

    def __post_init__(self):
        from .errors import DimensionMismatch

        self.coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if self.coeffs.shape[0] != self.algebra.dim ** self.graph.n_edges:
            raise DimensionMismatch("state length does not match the lattice")


def apply_on_factor(vec, k, n_edges, d, M):
    """Apply the ``d x d`` matrix ``M`` to tensor factor ``k`` of ``vec``."""
    t = np.asarray(vec).reshape(d ** k, d, d ** (n_edges - k - 1))
    return np.einsum("ij,pjq->piq", M, t).reshape(-1)


def reverse_edge(g: RibbonGraph, edge_id, psi: LatticeState):
    """Flip one edge and transform the state by the antipode on that factor."""
    k = g.edge_index[edge_id]
    g2 = g.reversed(edge_id)
    coeffs = apply_on_factor(psi.coeffs, k, g.n_edges, psi.algebra.dim, psi.algebra.antipode)
    return g2, LatticeState(g2, psi.algebra, coeffs)

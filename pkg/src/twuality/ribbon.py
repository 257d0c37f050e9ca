"""Ribbon graphs as signed rotation systems, boundary tracing, spanning
quasi-trees, medial 4-regular graphs with their three transitions per
vertex, transition matroids, and the medial/lift comparison check.

A ribbon graph is a list of vertices, each a cyclic sequence of half-edge
ids, plus edges pairing the half-edges with a sign (+1 untwisted, -1
twisted) and a label in ``1..n``.  Boundary walks are traced on doubled
half-edge sides: walking out along a half-edge on its left or right side,
an untwisted edge swaps the side, a twisted edge keeps it, and the corner
at the far vertex turns left sides to the next rotation position and
right sides to the previous one.  Each boundary component is traversed
once in each direction, so the component count is half the orbit count.

Medial transition conventions (fixed by requiring all-black splits to
count vertices and all-white splits to count boundary walks, and kept
frozen): with half-edge slots ``before``/``after`` for the two corners
flanking a half-edge, the black transition pairs the two slots at each
end; the white transition pairs ``after`` with the far ``before`` on an
untwisted edge and like slots on a twisted edge; crossing is the
remaining pairing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BudgetError, ConsistencyError, ValidationError
from .multimatroid import Multimatroid, Projection, TransversalTriple, lift
from .set_system import SetSystem, VF_SAFE_DEFAULT_CAP, is_delta_matroid, is_vf_safe

QUASI_TREE_CAP = 16
TRANSITION_MATROID_CAP = 8
MEDIAL_LIFT_CAP = 6

BEFORE, AFTER = 0, 1
TRANSITION_NAMES = ("black", "white", "crossing")


@dataclass(frozen=True)
class RibbonEdge:
    ends: tuple[int, int]
    sign: int
    label: int


def _canon_rotation(rot: Sequence[int]) -> tuple[int, ...]:
    rot = tuple(rot)
    if not rot:
        return rot
    k = rot.index(min(rot))
    return rot[k:] + rot[:k]


class RibbonGraph:
    """A signed rotation system.  Rotations are stored starting from their
    least half-edge id; that normalization never changes the surface."""

    __slots__ = ("vertices", "edges", "_next", "_prev", "_vertex_of", "_partner", "_sign", "_label_of")

    def __init__(self, vertices: Iterable[Sequence[int]], edges: Iterable):
        vertices = tuple(_canon_rotation(rot) for rot in vertices)
        norm_edges = []
        for e in edges:
            if isinstance(e, RibbonEdge):
                ends, sign, label = e.ends, e.sign, e.label
            elif isinstance(e, dict):
                try:
                    ends, sign, label = e["ends"], e["sign"], e["label"]
                except KeyError as missing:
                    raise ValidationError(f"edge object missing key {missing}") from None
            else:
                ends, sign, label = e
            ends = tuple(ends)
            if len(ends) != 2 or ends[0] == ends[1]:
                raise ValidationError(f"edge ends {ends} must be two distinct half-edges")
            if sign not in (1, -1):
                raise ValidationError(f"edge sign must be +1 or -1, got {sign!r}")
            norm_edges.append(RibbonEdge(ends, sign, label))
        norm_edges.sort(key=lambda e: e.label)
        n = len(norm_edges)
        if [e.label for e in norm_edges] != list(range(1, n + 1)):
            raise ValidationError("edge labels must be a bijection onto 1..#edges")
        rot_ids = [h for rot in vertices for h in rot]
        end_ids = [h for e in norm_edges for h in e.ends]
        for h in rot_ids + end_ids:
            if not isinstance(h, int) or isinstance(h, bool) or h < 1:
                raise ValidationError(f"half-edge id {h!r} must be a positive integer")
        if len(set(rot_ids)) != len(rot_ids):
            raise ValidationError("a half-edge appears twice in the rotations")
        if len(set(end_ids)) != len(end_ids):
            raise ValidationError("a half-edge appears twice among the edge ends")
        if set(rot_ids) != set(end_ids):
            raise ValidationError("rotations and edge ends must use the same half-edges")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(norm_edges))
        nxt, prv, vert = {}, {}, {}
        for vi, rot in enumerate(vertices):
            k = len(rot)
            for idx, h in enumerate(rot):
                nxt[h] = rot[(idx + 1) % k]
                prv[h] = rot[(idx - 1) % k]
                vert[h] = vi
        partner, sign, label_of = {}, {}, {}
        for e in norm_edges:
            a, b = e.ends
            partner[a] = b
            partner[b] = a
            sign[a] = sign[b] = e.sign
            label_of[a] = label_of[b] = e.label
        object.__setattr__(self, "_next", nxt)
        object.__setattr__(self, "_prev", prv)
        object.__setattr__(self, "_vertex_of", vert)
        object.__setattr__(self, "_partner", partner)
        object.__setattr__(self, "_sign", sign)
        object.__setattr__(self, "_label_of", label_of)

    def __setattr__(self, name, value):
        raise AttributeError("RibbonGraph is immutable")

    @property
    def n(self) -> int:
        return len(self.edges)

    def edge_by_label(self, label: int) -> RibbonEdge:
        return self.edges[label - 1]

    def to_json(self) -> dict:
        return {
            "vertices": [list(rot) for rot in self.vertices],
            "edges": [
                {"ends": list(e.ends), "sign": e.sign, "label": e.label} for e in self.edges
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "RibbonGraph":
        if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
            raise ValidationError("ribbon-graph object needs 'vertices' and 'edges'")
        return cls(data["vertices"], data["edges"])

    def __repr__(self):
        return f"RibbonGraph({[list(r) for r in self.vertices]}, {list(self.edges)})"


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}
        self.count = len(self.parent)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            self.count -= 1


def _trace_boundary(vertices: Sequence[tuple[int, ...]], edges) -> int:
    """Boundary walks of a signed rotation system; ``edges`` yields
    ``(h1, h2, sign)``.  Empty rotations are one disc boundary each."""
    nxt, prv, partner, sign = {}, {}, {}, {}
    isolated = 0
    for rot in vertices:
        if not rot:
            isolated += 1
            continue
        k = len(rot)
        for idx, h in enumerate(rot):
            nxt[h] = rot[(idx + 1) % k]
            prv[h] = rot[(idx - 1) % k]
    for h1, h2, s in edges:
        partner[h1] = h2
        partner[h2] = h1
        sign[h1] = sign[h2] = s

    def successor(state):
        h, side = state
        h2 = partner[h]
        side2 = side ^ 1 if sign[h] == 1 else side
        if side2 == 0:
            return (nxt[h2], 1)
        return (prv[h2], 0)

    todo = {(h, side) for h in partner for side in (0, 1)}
    orbits = 0
    while todo:
        start = todo.pop()
        cur = successor(start)
        while cur != start:
            todo.remove(cur)
            cur = successor(cur)
        orbits += 1
    if orbits % 2:
        raise ConsistencyError("boundary orbits must pair up by direction")
    return orbits // 2 + isolated


def boundary_components(G: RibbonGraph) -> int:
    """Number of boundary walks of the encoded surface."""
    return _trace_boundary(G.vertices, ((e.ends[0], e.ends[1], e.sign) for e in G.edges))


def _component_count(G: RibbonGraph, labels: frozenset[int]) -> int:
    uf = _UnionFind(range(len(G.vertices)))
    for e in G.edges:
        if e.label in labels:
            uf.union(G._vertex_of[e.ends[0]], G._vertex_of[e.ends[1]])
    return uf.count


def _sub_boundary(G: RibbonGraph, labels: frozenset[int]) -> int:
    kept = {h for e in G.edges if e.label in labels for h in e.ends}
    vertices = tuple(tuple(h for h in rot if h in kept) for rot in G.vertices)
    return _trace_boundary(
        vertices, ((e.ends[0], e.ends[1], e.sign) for e in G.edges if e.label in labels)
    )


def spanning_quasi_trees(G: RibbonGraph, max_e: int = QUASI_TREE_CAP) -> tuple[tuple[int, ...], ...]:
    """Label sets of spanning subgraphs with as many components as ``G``,
    each component having exactly one boundary walk."""
    if G.n > max_e:
        raise BudgetError(f"quasi-tree enumeration capped at {max_e} edges, got {G.n}")
    k_full = _component_count(G, frozenset(e.label for e in G.edges))
    out = []
    for r in range(G.n + 1):
        for combo in itertools.combinations(range(1, G.n + 1), r):
            sub = frozenset(combo)
            if _component_count(G, sub) == k_full and _sub_boundary(G, sub) == k_full:
                out.append(combo)
    return tuple(out)


def delta_matroid_of(
    G: RibbonGraph, max_e: int = QUASI_TREE_CAP, vf_cache: dict | None = None
) -> SetSystem:
    """Set system of spanning quasi-tree label sets; checked to satisfy
    symmetric exchange and (within the closure-search cap) vf-safety."""
    D = SetSystem.from_sets(G.n, spanning_quasi_trees(G, max_e=max_e))
    if not is_delta_matroid(D).valid:
        raise ConsistencyError(f"quasi-tree family of {G!r} fails symmetric exchange")
    if G.n <= VF_SAFE_DEFAULT_CAP and not is_vf_safe(D, cache=vf_cache):
        raise ConsistencyError(f"quasi-tree family of {G!r} is not vf-safe")
    return D


# ---------------------------------------------------------------------------
# medial graphs

Tag = tuple[int, int]  # (half-edge id, BEFORE | AFTER)
Pairing = tuple[tuple[Tag, Tag], tuple[Tag, Tag]]


def _pairing(a: Tag, b: Tag, c: Tag, d: Tag) -> Pairing:
    return tuple(sorted((tuple(sorted((a, b))), tuple(sorted((c, d))))))


@dataclass(frozen=True)
class MedialVertex:
    """The medial vertex on one edge, with its three transitions."""

    label: int
    ends: tuple[int, int]
    sign: int
    black: Pairing
    white: Pairing
    crossing: Pairing

    def transition(self, name: str) -> Pairing:
        return getattr(self, name)

    def tags(self) -> tuple[Tag, ...]:
        h1, h2 = self.ends
        return ((h1, BEFORE), (h1, AFTER), (h2, BEFORE), (h2, AFTER))


class FourRegularGraph:
    """Medial structure: one 4-valent vertex per edge, corner edges from
    the rotations, and a free loop per isolated vertex."""

    __slots__ = ("medial_vertices", "corner_edges", "free_loops", "_label_by_half")

    def __init__(self, medial_vertices, corner_edges, free_loops, label_by_half):
        object.__setattr__(self, "medial_vertices", tuple(medial_vertices))
        object.__setattr__(self, "corner_edges", tuple(corner_edges))
        object.__setattr__(self, "free_loops", free_loops)
        object.__setattr__(self, "_label_by_half", dict(label_by_half))

    def __setattr__(self, name, value):
        raise AttributeError("FourRegularGraph is immutable")

    @property
    def n(self) -> int:
        return len(self.medial_vertices)

    def label_of_tag(self, tag: Tag) -> int:
        return self._label_by_half[tag[0]]

    def to_json(self) -> dict:
        def tag_json(tag: Tag):
            return [tag[0], "before" if tag[1] == BEFORE else "after"]

        def pairing_json(p: Pairing):
            return [[tag_json(a), tag_json(b)] for a, b in p]

        return {
            "medial_vertices": [
                {
                    "label": v.label,
                    "ends": list(v.ends),
                    "sign": v.sign,
                    "transitions": {name: pairing_json(v.transition(name)) for name in TRANSITION_NAMES},
                }
                for v in self.medial_vertices
            ],
            "corner_edges": [[tag_json(a), tag_json(b)] for a, b in self.corner_edges],
            "free_loops": self.free_loops,
        }


def medial(G: RibbonGraph) -> FourRegularGraph:
    """Medial 4-regular graph of a ribbon graph.

    Corner edges join the ``after`` slot of each half-edge to the
    ``before`` slot of the next half-edge in its rotation; transitions
    follow the module-level convention.
    """
    vertices = []
    for e in G.edges:
        h1, h2 = e.ends
        black = _pairing((h1, BEFORE), (h1, AFTER), (h2, BEFORE), (h2, AFTER))
        if e.sign == 1:
            white = _pairing((h1, AFTER), (h2, BEFORE), (h1, BEFORE), (h2, AFTER))
            crossing = _pairing((h1, BEFORE), (h2, BEFORE), (h1, AFTER), (h2, AFTER))
        else:
            white = _pairing((h1, AFTER), (h2, AFTER), (h1, BEFORE), (h2, BEFORE))
            crossing = _pairing((h1, AFTER), (h2, BEFORE), (h1, BEFORE), (h2, AFTER))
        vertices.append(MedialVertex(e.label, e.ends, e.sign, black, white, crossing))
    corners = []
    for rot in G.vertices:
        for h in rot:
            corners.append(tuple(sorted(((h, AFTER), (G._next[h], BEFORE)))))
    free_loops = sum(1 for rot in G.vertices if not rot)
    return FourRegularGraph(
        vertices, sorted(corners), free_loops, {h: G._label_of[h] for h in G._partner}
    )


def all_black(Fm: FourRegularGraph) -> tuple[str, ...]:
    return ("black",) * Fm.n


def all_white(Fm: FourRegularGraph) -> tuple[str, ...]:
    return ("white",) * Fm.n


def split_components(Fm: FourRegularGraph, T: Sequence[str]) -> int:
    """Components of the 2-regular graph after replacing every medial
    vertex by its chosen pairing; free loops each count one."""
    if len(T) != Fm.n:
        raise ValidationError(f"transition system must choose at all {Fm.n} medial vertices")
    for name in T:
        if name not in TRANSITION_NAMES:
            raise ValidationError(f"unknown transition {name!r}")
    tags = [tag for v in Fm.medial_vertices for tag in v.tags()]
    uf = _UnionFind(tags)
    for a, b in Fm.corner_edges:
        uf.union(a, b)
    for v, name in zip(Fm.medial_vertices, T):
        for a, b in v.transition(name):
            uf.union(a, b)
    roots = {uf.find(t) for t in tags}
    return len(roots) + Fm.free_loops


def _medial_component_count(Fm: FourRegularGraph) -> int:
    labels = [v.label for v in Fm.medial_vertices]
    uf = _UnionFind(labels)
    for a, b in Fm.corner_edges:
        uf.union(Fm.label_of_tag(a), Fm.label_of_tag(b))
    return uf.count + Fm.free_loops


def transition_matroid(Fm: FourRegularGraph, max_v: int = TRANSITION_MATROID_CAP) -> Multimatroid:
    """3-matroid on one skew class per medial vertex whose bases are the
    transition systems preserving the component count.  Roles follow the
    fixed order black = 1, white = 2, crossing = 3."""
    if Fm.n > max_v:
        raise BudgetError(f"transition matroid capped at {max_v} medial vertices, got {Fm.n}")
    k_full = _medial_component_count(Fm)
    bases = []
    for choice in itertools.product((1, 2, 3), repeat=Fm.n):
        names = tuple(TRANSITION_NAMES[r - 1] for r in choice)
        if split_components(Fm, names) == k_full:
            bases.append(choice)
    return Multimatroid(Fm.n, bases)


@dataclass(frozen=True)
class MedialLiftReport:
    """Base-set comparison of the medial transition matroid against the
    lift of the quasi-tree system at the black/white/crossing triple."""

    equal: bool
    only_medial: tuple[tuple[int, ...], ...]
    only_lift: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        def basis_json(b):
            return [[i, r] for i, r in enumerate(b, start=1)]

        return {
            "equal": self.equal,
            "only_medial": [basis_json(b) for b in self.only_medial],
            "only_lift": [basis_json(b) for b in self.only_lift],
        }


def verify_medial_lift(
    G: RibbonGraph, max_e: int = MEDIAL_LIFT_CAP, vf_cache: dict | None = None
) -> MedialLiftReport:
    """Build the transition matroid of the medial and the lift of the
    quasi-tree system independently and compare their base sets."""
    if G.n > max_e:
        raise BudgetError(f"verification capped at {max_e} edges, got {G.n}")
    Zm = transition_matroid(medial(G))
    D = delta_matroid_of(G, vf_cache=vf_cache)
    Zl = lift(
        D,
        TransversalTriple.reference(G.n),
        Projection.identity(G.n),
        vf_cache=vf_cache,
    )
    only_medial = tuple(sorted(Zm.bases - Zl.bases))
    only_lift = tuple(sorted(Zl.bases - Zm.bases))
    return MedialLiftReport(not only_medial and not only_lift, only_medial, only_lift)

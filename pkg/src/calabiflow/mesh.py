"""Closed triangulated surfaces stored as Δ-complexes.

A face is three ordered corners. Corner ``c`` of face ``f`` holds a vertex
``face_vertices[f, c]`` and the edge opposite it, ``face_edges[f, c]``; that
edge joins the vertices at corners ``c + 1`` and ``c + 2`` (mod 3). Every
edge records its two face-corner incidences in ``edge_sides``.

Loops and multi-edges are allowed, so an edge is identified by its id and
never by its endpoint pair. Faces are stored consistently oriented: the two
sides of an edge traverse it in opposite directions, i.e. corner ``c0 + 1``
of the first side is glued to corner ``c1 + 2`` of the second.
"""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AmbiguousEdges,
    InvalidGluing,
    NonManifoldEdge,
    NonOrientable,
    OpenSurface,
    UnflippableSelfGlued,
)

__all__ = ["Triangulation", "build_from_faces"]


class Triangulation:
    """Face-corner tables of a closed Δ-complex surface.

    Use :func:`build_from_faces` to construct a validated instance; the
    constructor itself trusts its arguments.
    """

    def __init__(self, face_vertices, face_edges, edge_sides, n_vertices: int):
        self.face_vertices = np.asarray(face_vertices, dtype=np.int64)
        self.face_edges = np.asarray(face_edges, dtype=np.int64)
        self.edge_sides = np.asarray(edge_sides, dtype=np.int64)
        self.n_vertices = int(n_vertices)

    @property
    def n_faces(self) -> int:
        return self.face_vertices.shape[0]

    @property
    def n_edges(self) -> int:
        return self.edge_sides.shape[0]

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def copy(self) -> "Triangulation":
        return Triangulation(
            self.face_vertices.copy(),
            self.face_edges.copy(),
            self.edge_sides.copy(),
            self.n_vertices,
        )

    def vertex_star(self, v: int) -> list[tuple[int, int]]:
        """All (face, corner) pairs whose vertex is ``v``, once per corner."""
        fs, cs = np.nonzero(self.face_vertices == v)
        return list(zip(fs.tolist(), cs.tolist()))

    def edge_vertices(self, e: int) -> tuple[int, int]:
        f, c = self.edge_sides[e, 0]
        fv = self.face_vertices[f]
        return int(fv[(c + 1) % 3]), int(fv[(c + 2) % 3])

    def edge_endpoints(self) -> np.ndarray:
        """(E, 2) array of endpoint vertices, read from each edge's first side."""
        f = self.edge_sides[:, 0, 0]
        c = self.edge_sides[:, 0, 1]
        fv = self.face_vertices[f]
        rows = np.arange(len(f))
        return np.stack([fv[rows, (c + 1) % 3], fv[rows, (c + 2) % 3]], axis=1)

    def is_self_glued(self, e: int) -> bool:
        return self.edge_sides[e, 0, 0] == self.edge_sides[e, 1, 0]

    def flip(self, e: int) -> None:
        """Replace edge ``e`` by the other diagonal of its two triangles.

        With the first side of ``e`` read as triangle (k, i, j) and the second
        as (l, j, i), the faces become (k, i, l) and (l, j, k) and ``e`` joins
        k and l. Ids of faces and of the four outer edges are kept.
        """
        (f0, c0), (f1, c1) = self.edge_sides[e]
        if f0 == f1:
            raise UnflippableSelfGlued(f"edge {e} has both sides on face {f0}")
        fv, fe = self.face_vertices, self.face_edges
        k = fv[f0, c0]
        i = fv[f0, (c0 + 1) % 3]
        j = fv[f0, (c0 + 2) % 3]
        l = fv[f1, c1]
        e_jk = fe[f0, (c0 + 1) % 3]
        e_ki = fe[f0, (c0 + 2) % 3]
        e_il = fe[f1, (c1 + 1) % 3]
        e_lj = fe[f1, (c1 + 2) % 3]

        fv[f0] = (k, i, l)
        fe[f0] = (e_il, e, e_ki)
        fv[f1] = (l, j, k)
        fe[f1] = (e_jk, e, e_lj)

        for edge in {int(e), int(e_jk), int(e_ki), int(e_il), int(e_lj)}:
            sides = [
                (int(f), int(c))
                for f, c in self.edge_sides[edge]
                if f != f0 and f != f1
            ]
            for f in (f0, f1):
                for c in range(3):
                    if fe[f, c] == edge:
                        sides.append((int(f), c))
            self.edge_sides[edge] = sides

    def validate(self) -> None:
        """Check incidence bookkeeping; raise on the first inconsistency."""
        counts = np.bincount(self.face_edges.ravel(), minlength=self.n_edges)
        if np.any(counts != 2):
            raise InvalidGluing("edge incidence count differs from two")
        for e in range(self.n_edges):
            for f, c in self.edge_sides[e]:
                if self.face_edges[f, c] != e:
                    raise InvalidGluing(f"edge_sides of edge {e} out of date")
        _check_vertex_classes(self)


def build_from_faces(faces: Iterable[Sequence[int]], n_vertices: int) -> Triangulation:
    """Validate a face list and assemble a :class:`Triangulation`.

    Each face is ``(v0, v1, v2)`` or ``(v0, v1, v2, e0, e1, e2)`` where ``ek``
    is the edge opposite ``vk``. Without explicit edge ids, edges are matched
    by unordered vertex pair, which only works for simplicial complexes.
    Face orientations are made consistent; vertex labels must agree with the
    gluing.
    """
    rows = [tuple(int(x) for x in face) for face in faces]
    if not rows:
        raise OpenSurface("no faces")
    widths = {len(r) for r in rows}
    if widths not in ({3}, {6}):
        raise InvalidGluing("faces must all have 3 vertex ids or all have 3 vertex + 3 edge ids")
    arr = np.array(rows, dtype=np.int64)
    face_vertices = arr[:, :3].copy()
    if face_vertices.min() < 0 or face_vertices.max() >= n_vertices:
        raise InvalidGluing(f"vertex ids must lie in [0, {n_vertices})")

    if widths == {6}:
        face_edges = arr[:, 3:].copy()
    else:
        face_edges = _match_edges_by_vertex_pair(face_vertices)

    n_edges = int(face_edges.max()) + 1
    if face_edges.min() < 0:
        raise InvalidGluing("negative edge id")
    counts = np.bincount(face_edges.ravel(), minlength=n_edges)
    if np.any(counts == 0):
        raise InvalidGluing(f"edge ids are not dense: {np.flatnonzero(counts == 0).tolist()} unused")
    if np.any(counts == 1):
        raise OpenSurface(f"edges with one incidence: {np.flatnonzero(counts == 1).tolist()}")
    if np.any(counts > 2):
        raise NonManifoldEdge(f"edges with more than two incidences: {np.flatnonzero(counts > 2).tolist()}")

    edge_sides = _edge_sides(face_edges, n_edges)
    _orient(face_vertices, face_edges, edge_sides)
    edge_sides = _edge_sides(face_edges, n_edges)
    tri = Triangulation(face_vertices, face_edges, edge_sides, n_vertices)
    _check_vertex_classes(tri)
    return tri


def _match_edges_by_vertex_pair(face_vertices: np.ndarray) -> np.ndarray:
    sides = defaultdict(list)
    for f, (a, b, c) in enumerate(face_vertices.tolist()):
        if a == b or b == c or a == c:
            raise AmbiguousEdges(f"face {f} repeats a vertex; supply explicit edge ids")
        for corner, pair in ((0, (b, c)), (1, (c, a)), (2, (a, b))):
            sides[frozenset(pair)].append((f, corner))
    face_edges = np.empty_like(face_vertices)
    for e, (pair, incidences) in enumerate(sides.items()):
        if len(incidences) == 1:
            raise OpenSurface(f"edge {sorted(pair)} has one incidence")
        if len(incidences) > 2:
            if len(incidences) % 2 == 0:
                raise AmbiguousEdges(
                    f"vertex pair {sorted(pair)} bounds {len(incidences)} corners; "
                    "a multi-edge needs explicit edge ids"
                )
            raise NonManifoldEdge(f"edge {sorted(pair)} has {len(incidences)} incidences")
        for f, c in incidences:
            face_edges[f, c] = e
    return face_edges


def _edge_sides(face_edges: np.ndarray, n_edges: int) -> np.ndarray:
    sides = np.full((n_edges, 2, 2), -1, dtype=np.int64)
    fill = np.zeros(n_edges, dtype=np.int64)
    for f in range(face_edges.shape[0]):
        for c in range(3):
            e = face_edges[f, c]
            sides[e, fill[e]] = (f, c)
            fill[e] += 1
    return sides


def _orient(face_vertices, face_edges, edge_sides) -> None:
    """Reverse faces in place so every edge is traversed oppositely by its sides.

    Across an edge with distinct endpoints the relative orientation is read
    from the vertex labels. A loop edge carries no such information and is
    taken to be glued consistently with the input orientation.
    """
    n_faces = face_vertices.shape[0]
    # parity 1: the two faces must have opposite reversal state
    adjacency = defaultdict(list)
    for e in range(edge_sides.shape[0]):
        (f0, c0), (f1, c1) = edge_sides[e]
        a, b = face_vertices[f0, (c0 + 1) % 3], face_vertices[f0, (c0 + 2) % 3]
        p, q = face_vertices[f1, (c1 + 1) % 3], face_vertices[f1, (c1 + 2) % 3]
        if {a, b} != {p, q}:
            raise InvalidGluing(f"sides of edge {e} disagree on endpoints")
        parity = 1 if (a != b and a == p) else 0
        adjacency[f0].append((f1, parity, e))
        adjacency[f1].append((f0, parity, e))

    state = np.full(n_faces, -1, dtype=np.int64)
    for root in range(n_faces):
        if state[root] >= 0:
            continue
        state[root] = 0
        queue = deque([root])
        while queue:
            f = queue.popleft()
            for g, parity, e in adjacency[f]:
                want = state[f] ^ parity
                if state[g] < 0:
                    state[g] = want
                    queue.append(g)
                elif state[g] != want:
                    raise NonOrientable(f"orientation conflict across edge {e}")

    flipped = state == 1
    face_vertices[flipped] = face_vertices[flipped][:, [0, 2, 1]]
    face_edges[flipped] = face_edges[flipped][:, [0, 2, 1]]


def _check_vertex_classes(tri: Triangulation) -> None:
    parent = list(range(3 * tri.n_faces))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (f0, c0), (f1, c1) in tri.edge_sides.tolist():
        for x, y in (
            (3 * f0 + (c0 + 1) % 3, 3 * f1 + (c1 + 2) % 3),
            (3 * f0 + (c0 + 2) % 3, 3 * f1 + (c1 + 1) % 3),
        ):
            parent[find(x)] = find(y)

    labels = tri.face_vertices.ravel().tolist()
    class_label: dict[int, int] = {}
    label_class: dict[int, int] = {}
    for corner, label in enumerate(labels):
        root = find(corner)
        if class_label.setdefault(root, label) != label:
            raise InvalidGluing(f"gluing identifies vertices {class_label[root]} and {label}")
        if label_class.setdefault(label, root) != root:
            raise InvalidGluing(f"vertex {label} is not a single manifold point")
    missing = set(range(tri.n_vertices)) - set(label_class)
    if missing:
        raise InvalidGluing(f"vertices never used by a face: {sorted(missing)}")

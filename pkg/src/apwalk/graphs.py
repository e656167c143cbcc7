"""Apollonian network construction with generation metadata.

An Apollonian network is grown from a triangle by repeatedly subdividing
triangular faces: each subdivision drops a new node into a face and joins it
to the face's three corners, replacing the face by three smaller ones.  After
K full rounds ("generations") the deterministic network has

    N(K)     = (3**K + 5) / 2          nodes,
    E(K)     = (3/2) * (3**K + 1)      edges,
    d_max(K) = 3 * 2**(K-1)            (K >= 1; the corner degree is 2**K + 1),
    d_avg(K) = 6 - 24 / (3**K + 5),

with exactly 3 generation-0 nodes (the corners) and 3**(g-1) nodes created in
round g >= 1.  The resulting graph is maximal planar (E = 3N - 6) and no two
nodes of the newest generation are ever adjacent, which the search protocol
relies on.

Node ids are assigned deterministically: corners are 0, 1, 2 and each inserted
node gets the next free id in face-queue order (FIFO over faces, seeded with
the single internal face (0,1,2); child faces are enqueued in corner-sorted
order).  Adjacency lists are kept sorted ascending so that downstream arc
indexing is canonical.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import CapacityError, FormatError, ParameterError

# 3**K growth: K = 16 is ~21.5M nodes, already far beyond what the walk
# engine can evolve; refuse anything larger outright.
MAX_GENERATION = 16

KIND_DETERMINISTIC = "apollonian"
KIND_RANDOM = "random_apollonian"

# Recorded in serialized random-network documents so that a stored seed is
# meaningful only together with the sampling algorithm that consumed it.
RANDOM_ALGORITHM = "pcg64-face-choice-v1"


@dataclass(frozen=True)
class GraphCounts:
    """Closed-form structural counts for the deterministic network."""

    n_nodes: int
    n_edges: int
    max_degree: int | None  # None for K = 0, where the formula does not apply
    avg_degree: Fraction


def closed_form_counts(generation: int) -> GraphCounts:
    """Evaluate the closed-form count formulas exactly (no floating point)."""
    if generation < 0:
        raise ParameterError("generation must be >= 0")
    three_k = 3**generation
    n_nodes = (three_k + 5) // 2
    n_edges = 3 * (three_k + 1) // 2
    d_max = 3 * 2 ** (generation - 1) if generation >= 1 else None
    d_avg = Fraction(6) - Fraction(24, three_k + 5)
    return GraphCounts(n_nodes, n_edges, d_max, d_avg)


@dataclass
class ApollonianNetwork:
    """Undirected simple graph with per-node generation labels.

    ``adjacency[i]`` is the strictly increasing list of neighbours of node
    ``i``; ``node_generation[i]`` is the subdivision round that created node
    ``i`` (corners are generation 0).  ``face_log`` records, in insertion
    order, which face each node was dropped into -- it is retained purely so
    that construction determinism can be audited, and is not part of the
    serialized document (equality ignores it).
    """

    kind: str
    generation: int
    adjacency: list[list[int]]
    node_generation: np.ndarray
    face_log: list[tuple[tuple[int, int, int], int]] = field(default_factory=list)
    seed: int | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.adjacency)

    @property
    def n_edges(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(nbrs) for nbrs in self.adjacency], dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (i, j) with i < j, sorted lexicographically."""
        return [(i, j) for i in range(self.n_nodes) for j in self.adjacency[i] if i < j]

    def nodes_of_generation(self, g: int) -> list[int]:
        """Ids of the nodes created in round ``g``, sorted ascending."""
        if not 0 <= g <= self.generation:
            raise ParameterError(
                f"generation {g} out of range 0..{self.generation}"
            )
        return [int(i) for i in np.flatnonzero(self.node_generation == g)]

    def last_generation_nodes(self) -> list[int]:
        return self.nodes_of_generation(self.generation)

    # -- equality (face_log deliberately excluded: see class docstring) -----

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ApollonianNetwork):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.generation == other.generation
            and self.seed == other.seed
            and np.array_equal(self.node_generation, other.node_generation)
            and self.adjacency == other.adjacency
        )

    # -- invariant enforcement ----------------------------------------------

    def validate(self) -> None:
        """Check structural invariants; raise FormatError on the first failure."""
        n = self.n_nodes
        if len(self.node_generation) != n:
            raise FormatError("node_generation length != node count")
        seen = set()
        for i, nbrs in enumerate(self.adjacency):
            if any(b <= a for a, b in zip(nbrs, nbrs[1:])):
                raise FormatError("adjacency list not strictly increasing", f"node {i}")
            for j in nbrs:
                if j == i:
                    raise FormatError("self-loop", f"node {i}")
                if not 0 <= j < n:
                    raise FormatError("neighbour id out of range", f"node {i}")
                if i not in self.adjacency[j]:
                    raise FormatError("asymmetric adjacency", f"edge ({i},{j})")
                seen.add((min(i, j), max(i, j)))
        if len(seen) * 2 != sum(len(a) for a in self.adjacency):
            raise FormatError("duplicate edges present")
        if self.kind == KIND_DETERMINISTIC:
            counts = closed_form_counts(self.generation)
            if n != counts.n_nodes or self.n_edges != counts.n_edges:
                raise FormatError(
                    f"count mismatch for generation {self.generation}: "
                    f"N={n}, E={self.n_edges}"
                )
            for g in range(self.generation + 1):
                expected = 3 if g == 0 else 3 ** (g - 1)
                if int(np.sum(self.node_generation == g)) != expected:
                    raise FormatError(f"wrong node count in generation {g}")
            if self.generation >= 1:
                last = set(self.last_generation_nodes())
                for i in last:
                    if any(j in last for j in self.adjacency[i]):
                        raise FormatError("two last-generation nodes are adjacent")


def _empty_triangle() -> tuple[list[list[int]], list[int]]:
    adjacency = [[1, 2], [0, 2], [0, 1]]
    return adjacency, [0, 0, 0]


def _subdivide(
    adjacency: list[list[int]],
    face: tuple[int, int, int],
    new_id: int,
) -> list[tuple[int, int, int]]:
    """Insert ``new_id`` into ``face``; return the three child faces."""
    a, b, c = face
    adjacency.append([a, b, c])  # face corners are sorted, so this is sorted
    for corner in face:
        adjacency[corner].append(new_id)  # ids grow, so append keeps order
    return [(a, b, new_id), (a, c, new_id), (b, c, new_id)]


def build_apollonian(generation: int) -> ApollonianNetwork:
    """Deterministic K-generation Apollonian network.

    Corners get ids 0, 1, 2; every later node's id is 3 + its creation rank.
    Construction is a FIFO sweep over faces, so equal inputs always produce
    byte-identical serializations.
    """
    if generation < 0:
        raise ParameterError("generation must be >= 0")
    if generation > MAX_GENERATION:
        raise CapacityError(
            f"generation {generation} exceeds cap {MAX_GENERATION} (3**K node growth)"
        )
    adjacency, node_gen = _empty_triangle()
    face_log: list[tuple[tuple[int, int, int], int]] = []
    faces: deque[tuple[int, int, int]] = deque([(0, 1, 2)])
    next_id = 3
    for round_no in range(1, generation + 1):
        for _ in range(len(faces)):
            face = faces.popleft()
            face_log.append((face, next_id))
            faces.extend(_subdivide(adjacency, face, next_id))
            node_gen.append(round_no)
            next_id += 1
    return ApollonianNetwork(
        kind=KIND_DETERMINISTIC,
        generation=generation,
        adjacency=adjacency,
        node_generation=np.array(node_gen, dtype=np.int64),
        face_log=face_log,
    )


def build_random_apollonian(
    iterations: int,
    subdivisions_per_iteration: int,
    seed: int,
) -> ApollonianNetwork:
    """Random variant: each iteration subdivides a seeded uniform sample of faces.

    The sample is drawn without replacement from the faces existing at the
    start of the iteration.  When fewer faces exist than requested, every
    available face is subdivided (the first iteration always has exactly one
    face, so any ``subdivisions_per_iteration`` is accepted there).  The count
    formulas of the deterministic network do not apply; ``node_generation``
    records the iteration that created each node.
    """
    if iterations < 1:
        raise ParameterError("iterations must be >= 1")
    if subdivisions_per_iteration < 1:
        raise ParameterError("subdivisions_per_iteration must be >= 1")
    if iterations > MAX_GENERATION:
        raise CapacityError(
            f"iterations {iterations} exceeds cap {MAX_GENERATION}"
        )
    rng = np.random.default_rng(seed)
    adjacency, node_gen = _empty_triangle()
    face_log: list[tuple[tuple[int, int, int], int]] = []
    faces: list[tuple[int, int, int]] = [(0, 1, 2)]
    next_id = 3
    for round_no in range(1, iterations + 1):
        k = min(subdivisions_per_iteration, len(faces))
        chosen = sorted(rng.choice(len(faces), size=k, replace=False).tolist())
        chosen_set = set(chosen)
        surviving = [f for idx, f in enumerate(faces) if idx not in chosen_set]
        new_faces: list[tuple[int, int, int]] = []
        for idx in chosen:
            face = faces[idx]
            face_log.append((face, next_id))
            new_faces.extend(_subdivide(adjacency, face, next_id))
            node_gen.append(round_no)
            next_id += 1
        faces = surviving + new_faces
    return ApollonianNetwork(
        kind=KIND_RANDOM,
        generation=iterations,
        adjacency=adjacency,
        node_generation=np.array(node_gen, dtype=np.int64),
        face_log=face_log,
        seed=seed,
    )


# -- serialization ----------------------------------------------------------


def serialize(graph: ApollonianNetwork) -> dict:
    """Graph document: nodes sorted by id, edges (i < j) sorted lexicographically."""
    doc = {
        "kind": graph.kind,
        "generation": graph.generation,
        "nodes": [
            {"id": i, "gen": int(graph.node_generation[i])}
            for i in range(graph.n_nodes)
        ],
        "edges": [[i, j] for i, j in graph.edges()],
    }
    if graph.kind == KIND_RANDOM:
        doc["seed"] = graph.seed
        doc["algorithm"] = RANDOM_ALGORITHM
    return doc


def deserialize(doc: dict) -> ApollonianNetwork:
    """Inverse of :func:`serialize`, validating every structural invariant.

    Round-trips exactly: ``deserialize(serialize(g)) == g`` with the same node
    ordering and labels.  Tampered documents (duplicate or unsorted edges,
    inconsistent counts, broken generation labels) are rejected with a
    FormatError naming the offending location.
    """
    try:
        kind = doc["kind"]
        generation = int(doc["generation"])
        nodes = doc["nodes"]
        edges = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"missing or malformed field: {exc}") from exc
    if kind not in (KIND_DETERMINISTIC, KIND_RANDOM):
        raise FormatError(f"unknown kind {kind!r}", "kind")

    n = len(nodes)
    node_gen = np.empty(n, dtype=np.int64)
    for pos, entry in enumerate(nodes):
        if entry.get("id") != pos:
            raise FormatError("node ids must be 0..N-1 in order", f"nodes[{pos}]")
        node_gen[pos] = int(entry["gen"])

    adjacency: list[list[int]] = [[] for _ in range(n)]
    prev: list[int] | None = None
    for pos, edge in enumerate(edges):
        if len(edge) != 2:
            raise FormatError("edge must be a pair", f"edges[{pos}]")
        i, j = int(edge[0]), int(edge[1])
        if not (0 <= i < j < n):
            raise FormatError("edge endpoints must satisfy 0 <= i < j < N", f"edges[{pos}]")
        if prev is not None and [i, j] <= prev:
            raise FormatError(
                "edges must be strictly increasing lexicographically", f"edges[{pos}]"
            )
        prev = [i, j]
        adjacency[i].append(j)
        adjacency[j].append(i)
    for lst in adjacency:
        lst.sort()

    seed = doc.get("seed")
    graph = ApollonianNetwork(
        kind=kind,
        generation=generation,
        adjacency=adjacency,
        node_generation=node_gen,
        seed=None if seed is None else int(seed),
    )
    graph.validate()
    if kind == KIND_DETERMINISTIC:
        # The deterministic construction is canonical, so the strongest check
        # is to rebuild and compare; this also restores the face log.
        rebuilt = build_apollonian(generation)
        if rebuilt != graph:
            raise FormatError(
                "document does not match the canonical deterministic construction"
            )
        return rebuilt
    return graph

"""The multigraph of marbles and strings.

Vertices are marbles and loose string ends, edges are strings; loops and parallel edges are
allowed. Provides components, the cycle rank and a shortest cycle search, which is a
best-first search over a heap just like a shortest path search on a road network."""
from heapq import heapify, heappush, heappop
from functools import total_ordering
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple


class Edge(NamedTuple):
    "A string between two vertices"
    start: int
    end: int
    #: Length used by the searches
    weight: float = 1.0

    def other(self, vertex: int) -> int:
        return self.end if vertex == self.start else self.start


@total_ordering
class PQItem(NamedTuple):
    "A single item in the search priority queue"
    cost: float
    vertex: int
    edge: Optional[int]
    previous: Optional["PQItem"]

    def __lt__(self, other):
        return self.cost < other.cost


class MarbleGraph:
    "An undirected multigraph with integer vertices 0 .. vertex_count - 1"

    def __init__(self, vertex_count: int, edges: Sequence[Edge]):
        self.vertex_count = vertex_count
        self.edges = list(edges)
        self.incident: Dict[int, List[int]] = {vertex: [] for vertex in range(vertex_count)}
        for index, edge in enumerate(self.edges):
            self.incident[edge.start].append(index)
            if edge.end != edge.start:
                self.incident[edge.end].append(index)

    def degree(self, vertex: int) -> int:
        return sum(2 if self.edges[index].start == self.edges[index].end else 1
                   for index in self.incident[vertex])

    def components(self) -> List[List[int]]:
        "Vertex lists of the connected components"
        seen = set()
        result = []
        for root in range(self.vertex_count):
            if root in seen:
                continue
            stack, component = [root], []
            seen.add(root)
            while stack:
                vertex = stack.pop()
                component.append(vertex)
                for index in self.incident[vertex]:
                    neighbour = self.edges[index].other(vertex)
                    if neighbour not in seen:
                        seen.add(neighbour)
                        stack.append(neighbour)
            result.append(sorted(component))
        return result

    def cycle_rank(self) -> int:
        "E - V + number of components"
        return len(self.edges) - self.vertex_count + len(self.components())

    def shortest_path(self, start: int, end: int,
                      edge_filter: Callable[[int], bool] = lambda index: True) -> Optional[List[int]]:
        """Returns the edge indices of a shortest path from `start` to `end`, or None if there
        is none. Edges for which `edge_filter` returns False are not used."""
        open_set = [PQItem(0.0, start, None, None)]
        heapify(open_set)
        closed_set = set()
        while open_set:
            current = heappop(open_set)
            if current.vertex == end:
                path = []
                item = current
                while item.previous is not None:
                    path.insert(0, item.edge)
                    item = item.previous
                return path
            if current.vertex in closed_set:
                continue
            closed_set.add(current.vertex)
            for index in self.incident[current.vertex]:
                if not edge_filter(index):
                    continue
                neighbour = self.edges[index].other(current.vertex)
                if neighbour in closed_set:
                    continue
                heappush(open_set, PQItem(current.cost + self.edges[index].weight, neighbour,
                                          index, current))
        return None

    def shortest_cycle(self) -> Optional[List[Tuple[int, int]]]:
        """Returns a shortest cycle as list of (vertex, edge index) pairs, where each edge leaves
        its vertex, or None for a forest"""
        best: Optional[Tuple[float, List[Tuple[int, int]]]] = None
        for index, edge in enumerate(self.edges):
            if edge.start == edge.end:
                candidate = (edge.weight, [(edge.start, index)])
            else:
                path = self.shortest_path(edge.end, edge.start, lambda other: other != index)
                if path is None:
                    continue
                cycle = [(edge.start, index)]
                vertex = edge.end
                for step in path:
                    cycle.append((vertex, step))
                    vertex = self.edges[step].other(vertex)
                candidate = (sum(self.edges[step].weight for _, step in cycle), cycle)
            if best is None or candidate[0] < best[0]:
                best = candidate
        return None if best is None else best[1]

    def leaves(self) -> List[int]:
        "Vertices of degree one"
        return [vertex for vertex in range(self.vertex_count) if self.degree(vertex) == 1]

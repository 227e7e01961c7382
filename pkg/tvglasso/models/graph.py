"""
Edge sets of undirected graphs G = (V, F) on vertices 0..p-1.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, Tuple

from tvglasso.core.exceptions import DimensionMismatch

Edge = Tuple[int, int]


def normalize_edge(i: int, j: int) -> Edge:
    """Order an unordered pair as (min, max)"""
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class EdgeSet:
    """
    Set of unordered pairs (i, j) with i < j, 0-based.

    No self-loops, every index below ``dim``, no duplicates.
    """

    dim: int
    edges: FrozenSet[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError(f"Edge set dimension must be positive, got {self.dim}")
        edges = frozenset((int(i), int(j)) for i, j in self.edges)
        for i, j in edges:
            if not 0 <= i < j < self.dim:
                raise ValueError(f"Invalid edge ({i}, {j}) for dimension {self.dim}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable[Tuple[int, int]]) -> "EdgeSet":
        """Build from pairs in any orientation; self-loops are rejected"""
        normalized = set()
        for i, j in pairs:
            if i == j:
                raise ValueError(f"Self-loop ({i}, {j}) is not an edge")
            normalized.add(normalize_edge(i, j))
        return cls(dim, frozenset(normalized))

    def _check_dim(self, other: "EdgeSet") -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"Edge sets over {self.dim} and {other.dim} vertices")

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    def __contains__(self, edge: object) -> bool:
        if not isinstance(edge, tuple) or len(edge) != 2:
            return False
        return normalize_edge(*edge) in self.edges

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        self._check_dim(other)
        return EdgeSet(self.dim, self.edges & other.edges)

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        self._check_dim(other)
        return EdgeSet(self.dim, self.edges | other.edges)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        self._check_dim(other)
        return EdgeSet(self.dim, self.edges - other.edges)

    def __xor__(self, other: "EdgeSet") -> "EdgeSet":
        self._check_dim(other)
        return EdgeSet(self.dim, self.edges ^ other.edges)

    def to_list(self) -> list[list[int]]:
        """Sorted [[i, j], ...] for serialization"""
        return [[i, j] for i, j in self]

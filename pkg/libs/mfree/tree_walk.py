"""
Weighted walks on the rooted r-ary tree with a matricial weight function.

Every edge carries an index pair (i, j); the children of an edge (i, j) are
the edges (k, i), k = 0..r-1, and the root's children carry the initial
pairs. The weight of an edge is a[i][j]. A root-to-root walk crosses every
edge it uses once down and once up, so walk sums only involve the squares
b[i][j] = a[i][j]**2, and the weighting is stored by those squares.
"""
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from .errors import InvalidParameterError
from .matrices import SquareMatrix
from .numeric import Number
from .series import MomentSeries

Pair = Tuple[int, int]

# Root edges by law, for r = 2. Each mu_j takes the j-th column of A.
ROOT_EDGES: Dict[str, Tuple[Pair, Pair]] = {
    "mu0": ((0, 0), (1, 1)),
    "mu1": ((0, 0), (1, 0)),
    "mu2": ((0, 1), (1, 1)),
}
_BINARY_ROOTS = {frozenset(edges) for edges in ROOT_EDGES.values()}


@dataclass(frozen=True)
class MatricialWeighting:
    b: SquareMatrix
    initial: Tuple[Pair, ...]

    def __post_init__(self):
        r = self.b.n
        object.__setattr__(self, "initial", tuple(tuple(e) for e in self.initial))
        if len(self.initial) != r:
            raise InvalidParameterError(f"the root of the {r}-ary tree needs {r} initial edges, got {len(self.initial)}")
        if any(not (0 <= i < r and 0 <= j < r) for i, j in self.initial):
            raise InvalidParameterError(f"initial edges {self.initial} outside a {r}x{r} weight matrix")
        if any(x < 0 for row in self.b.entries for x in row):
            raise InvalidParameterError("squared weights must be nonnegative")
        if r == 2 and frozenset(self.initial) not in _BINARY_ROOTS:
            raise InvalidParameterError(
                f"binary-tree initial edges must be one of {sorted(ROOT_EDGES)} patterns, got {self.initial}")

    @classmethod
    def from_weights(cls, a: SquareMatrix, initial: Sequence[Pair]) -> "MatricialWeighting":
        return cls(a.map(lambda x: x * x), tuple(initial))

    @classmethod
    def for_law(cls, b: SquareMatrix, law: str) -> "MatricialWeighting":
        """Binary weighting whose walk sums give the moments of mu0, mu1 or mu2."""
        if b.n != 2 or law not in ROOT_EDGES:
            raise InvalidParameterError(f"for_law needs a 2x2 matrix and one of {sorted(ROOT_EDGES)}")
        return cls(b, ROOT_EDGES[law])

    @property
    def r(self) -> int:
        return self.b.n

    def children(self, edge: Pair) -> Tuple[Pair, ...]:
        return tuple((k, edge[0]) for k in range(self.r))

    def weight(self, edge: Pair) -> Number:
        return self.b[edge]


def _excursion_table(w: MatricialWeighting, n: int) -> List[List[Number]]:
    """table[row][m]: weighted excursions of length 2m below an edge whose row index is `row`."""
    r = w.r
    table = [[1] + [0] * n for _ in range(r)]
    for m in range(1, n + 1):
        for row in range(r):
            acc = 0
            for k in range(r):
                weight = w.b[k, row]
                if not weight:
                    continue
                for a in range(m):
                    acc = acc + weight * table[k][a] * table[row][m - 1 - a]
            table[row][m] = acc
    return table


def walk_moment(w: MatricialWeighting, length: int) -> Number:
    """Sum of weights of root-to-root walks with `length` steps."""
    if length < 0:
        raise InvalidParameterError(f"walk length must be >= 0, got {length}")
    if length % 2:
        return 0
    n = length // 2
    table = _excursion_table(w, n)
    root = [1] + [0] * n
    for m in range(1, n + 1):
        acc = 0
        for edge in w.initial:
            weight = w.weight(edge)
            if not weight:
                continue
            for a in range(m):
                acc = acc + weight * table[edge[0]][a] * root[m - 1 - a]
        root[m] = acc
    return root[n]


def walk_moments(w: MatricialWeighting, order: int) -> MomentSeries:
    return MomentSeries(tuple(walk_moment(w, m) for m in range(order + 1)))


def dyck_paths(n: int) -> Iterator[Tuple[int, ...]]:
    """Dyck paths of semilength n as +1/-1 step tuples, up-steps first in lexicographic order."""
    def extend(prefix: List[int], ups: int, height: int):
        if len(prefix) == 2 * n:
            yield tuple(prefix)
            return
        if ups < n:
            prefix.append(1)
            yield from extend(prefix, ups + 1, height + 1)
            prefix.pop()
        if height > 0:
            prefix.append(-1)
            yield from extend(prefix, ups, height - 1)
            prefix.pop()

    yield from extend([], 0, 0)


@dataclass(frozen=True)
class CatalanPath:
    steps: Tuple[int, ...]
    labels: Tuple[Pair, ...]
    weight: Number


def catalan_paths(w: MatricialWeighting, n: int) -> List[CatalanPath]:
    """
    Dyck paths of semilength n whose up-steps are labelled by tree edges.

    An up-step from height h picks one of the children of the edge on top of
    the current stack (the root's initial edges at height 0) and contributes
    its squared weight. These paths are in bijection with root-to-root walks.
    """
    paths: List[CatalanPath] = []
    for steps in dyck_paths(n):
        _label(w, steps, 0, [], [], 1, paths)
    return paths


def _label(w, steps, pos, stack, labels, weight, out):
    if pos == len(steps):
        out.append(CatalanPath(steps, tuple(labels), weight))
        return
    if steps[pos] == -1:
        top = stack.pop()
        _label(w, steps, pos + 1, stack, labels, weight, out)
        stack.append(top)
        return
    candidates = w.initial if not stack else w.children(stack[-1])
    for edge in candidates:
        stack.append(edge)
        labels.append(edge)
        _label(w, steps, pos + 1, stack, labels, weight * w.weight(edge), out)
        labels.pop()
        stack.pop()


def catalan_weight_sum(w: MatricialWeighting, n: int) -> Number:
    return sum((p.weight for p in catalan_paths(w, n)), 0)

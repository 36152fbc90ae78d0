"""
Block-collapsed pseudomatrix moments.

Variances are constant on blocks, so index words can be grouped by the
block pattern of their letters. A letter is (row block, column block,
diagonal, anchored): `diagonal` records i == j and `anchored` marks the
bottom letter e_{j,j} of a conditional reference vector. Amplitudes are
summed over each class; creation options carry the number of index words
they stand for.
"""
import logging
from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple

from .errors import InvalidParameterError, ModelError
from .limit_law import BlockModel, interval_sizes
from .numeric import Number

logger = logging.getLogger(__name__)

Letter = Tuple[int, int, bool, bool]
BlockWord = Tuple[Letter, ...]


def _scaled(x: Number, n: int) -> Number:
    return x / n if isinstance(x, float) else Fraction(x) / n


class BlockEngine:
    """Moments of S(n) for one block model, matrix size and flavor."""

    def __init__(self, model: BlockModel, n: int, strong: bool = False):
        self.model = model
        self.n = n
        self.strong = strong
        self.sizes = interval_sizes(model.d, n)
        if any(size == 0 for size in self.sizes):
            raise ModelError(f"block sizes {self.sizes} for n={n} contain an empty block")
        self._logger = logger.getChild(self.__class__.__name__)

    def block_of(self, index: int) -> int:
        if not 0 <= index < self.n:
            raise InvalidParameterError(f"condition index {index} outside 0..{self.n - 1}")
        edge = 0
        for k, size in enumerate(self.sizes):
            edge += size
            if index < edge:
                return k
        raise InvalidParameterError(f"condition index {index} outside 0..{self.n - 1}")

    def options(self, word: BlockWord, anchor: Optional[int]) -> Iterator[Tuple[Letter, int]]:
        """(letter, multiplicity) for every class of pair l_{i,j} can prepend to `word`."""
        sizes = self.sizes
        if not word:
            for k, size in enumerate(sizes):
                if k == anchor:
                    yield (k, k, True, True), 1
                    if size > 1:
                        yield (k, k, True, False), size - 1
                else:
                    yield (k, k, True, False), size
            return
        row, col, diagonal, _ = word[0]
        # new letter (i, p) with p the first index of the top letter
        if diagonal or not self.strong:
            yield (row, row, True, False), 1
        for k, size in enumerate(sizes):
            count = size - 1 if k == row else size
            if count > 0:
                yield (k, row, False, False), count
        if not diagonal:
            yield (row, col, False, False), 1

    def step(self, state: Dict[BlockWord, Number], anchor: Optional[int], target_len: int,
             remaining: int) -> Dict[BlockWord, Number]:
        u = self.model.u
        out: Dict[BlockWord, Number] = {}

        def add(word, amplitude):
            value = out.get(word, 0) + amplitude
            if value:
                out[word] = value
            else:
                out.pop(word, None)

        for word, amplitude in state.items():
            length = len(word)
            if word and u[word[0][0], word[0][1]] and abs(length - 1 - target_len) <= remaining:
                add(word[1:], amplitude)
            if abs(length + 1 - target_len) > remaining:
                continue
            for letter, count in self.options(word, anchor):
                weight = u[letter[0], letter[1]]
                if weight:
                    add((letter,) + word, amplitude * count * _scaled(weight, self.n))
        return out

    def run(self, start: BlockWord, m: int, anchor: Optional[int]) -> Number:
        state: Dict[BlockWord, Number] = {start: 1}
        widest = 1
        for step in range(m):
            state = self.step(state, anchor, len(start), m - step - 1)
            widest = max(widest, len(state))
        self._logger.debug("n=%d m=%d: at most %d block words", self.n, m, widest)
        return state.get(start, 0)

    def vacuum(self, m: int) -> Number:
        return self.run((), m, None)

    def conditional(self, block: int, m: int) -> Number:
        return self.run(((block, block, True, True),), m, block)

    def trace(self, m: int) -> Number:
        total = 0
        for k, size in enumerate(self.sizes):
            total = total + size * self.conditional(k, m)
        return _scaled(total, self.n)


def block_moment(model: BlockModel, n: int, m: int, reference: str = "trace", index: Optional[int] = None,
                 strong: bool = False) -> Number:
    """
    <S(n)^m xi, xi> on the square block pseudomatrix, computed on block classes.

    Args:
        model: block model giving v_ij = u_{k(i), k(j)} / n
        n: matrix size
        m: moment order
        reference: "vacuum", "condition" (with `index`) or "trace"
        index: the row j of the conditional vector e_{j,j}
        strong: use the strong flavor

    Returns:
        The same value as the direct engine on index words.
    """
    if m < 0:
        raise InvalidParameterError(f"moment order must be >= 0, got {m}")
    engine = BlockEngine(model, n, strong)
    if m % 2:
        return 0
    if reference == "vacuum":
        return engine.vacuum(m)
    if reference == "condition":
        if index is None:
            raise InvalidParameterError("the condition reference needs an index")
        return engine.conditional(engine.block_of(index), m)
    if reference == "trace":
        return engine.trace(m)
    raise InvalidParameterError(f"unknown reference state {reference!r}")

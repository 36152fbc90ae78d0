"""
Exact finite-n model on the discrete matricially free Fock space.

Basis words are tuples of index pairs, word[0] being the most recently
created pair; the empty word is the vacuum. A valid word ends with a
diagonal pair and every pair either repeats the one below it or has its
second index equal to the first index of the pair below. The strong flavor
additionally forbids a diagonal pair directly above an off-diagonal one.

X_{i,j}(n) = sqrt(v_ij)(l_{i,j} + l*_{i,j}) is simulated as v_ij l_{i,j} + l*_{i,j}.
The two are conjugate by a diagonal scaling of the basis that fixes the
vacuum and the words ((j, j)), so every moment computed here is unchanged
and stays rational.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import FockError, InvalidParameterError, TruncationOverflowError
from .fock_blocks import block_moment
from .limit_law import BlockModel, blockify, standard_moments_combinatorial, tracial_moments_combinatorial
from .matrices import SquareMatrix
from .numeric import Number, discrepancy

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]
Word = Tuple[Pair, ...]

VACUUM: Word = ()


class Flavor(str, Enum):
    STANDARD = "standard"
    STRONG = "strong"


class Shape(str, Enum):
    SQUARE = "square"
    LOWER = "lower"


def admissible(pair: Pair, word: Word, flavor: Flavor = Flavor.STANDARD) -> bool:
    """True when `word` lies in the range of the unit 1_{i,j}."""
    i, j = pair
    if not word:
        return i == j
    top = word[0]
    if top == pair:
        return True
    if top[0] != j:
        return False
    return not (flavor is Flavor.STRONG and i == j)


def word_is_valid(word: Word, flavor: Flavor = Flavor.STANDARD, n: Optional[int] = None) -> bool:
    if not word:
        return True
    if n is not None and any(not (0 <= i < n and 0 <= j < n) for i, j in word):
        return False
    last = word[-1]
    if last[0] != last[1]:
        return False
    return all(admissible(word[t], word[t + 1:], flavor) for t in range(len(word) - 1))


@dataclass(frozen=True)
class FockWord:
    pairs: Word
    flavor: Flavor = Flavor.STANDARD

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        if not word_is_valid(self.pairs, self.flavor):
            raise FockError(f"{self.pairs} is not a {self.flavor.value} Fock word")

    def __len__(self) -> int:
        return len(self.pairs)

    def is_vacuum(self) -> bool:
        return not self.pairs


@dataclass
class FockState:
    """Finite linear combination of basis words, all of length <= truncation."""
    n: int
    flavor: Flavor = Flavor.STANDARD
    truncation: int = 8
    amplitudes: Dict[Word, Number] = field(default_factory=dict)

    @classmethod
    def basis(cls, word: Sequence[Pair], n: int, flavor: Flavor = Flavor.STANDARD,
              truncation: int = 8) -> "FockState":
        fw = FockWord(tuple(word), flavor)
        if len(fw) > truncation:
            raise TruncationOverflowError(len(fw), truncation)
        return cls(n, Flavor(flavor), truncation, {fw.pairs: 1})

    @classmethod
    def vacuum(cls, n: int, flavor: Flavor = Flavor.STANDARD, truncation: int = 8) -> "FockState":
        return cls(n, Flavor(flavor), truncation, {VACUUM: 1})

    def empty_like(self) -> "FockState":
        return FockState(self.n, self.flavor, self.truncation, {})

    def add(self, word: Word, amplitude: Number) -> None:
        if not amplitude:
            return
        value = self.amplitudes.get(word, 0) + amplitude
        if value:
            self.amplitudes[word] = value
        else:
            self.amplitudes.pop(word, None)

    def __add__(self, other: "FockState") -> "FockState":
        out = FockState(self.n, self.flavor, self.truncation, dict(self.amplitudes))
        for word, amplitude in other.amplitudes.items():
            out.add(word, amplitude)
        return out

    def scale(self, c: Number) -> "FockState":
        out = self.empty_like()
        for word, amplitude in self.amplitudes.items():
            out.add(word, c * amplitude)
        return out

    def is_zero(self) -> bool:
        return not self.amplitudes

    def coefficient(self, word: Sequence[Pair]) -> Number:
        return self.amplitudes.get(tuple(word), 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FockState):
            return NotImplemented
        return self.amplitudes == other.amplitudes


def inner(x: FockState, y: FockState) -> Number:
    return sum((a * y.amplitudes.get(word, 0) for word, a in x.amplitudes.items()), 0)


def _check_pair(pair: Pair, n: int) -> None:
    i, j = pair
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidParameterError(f"pair {pair} outside 0..{n - 1}")


def create(i: int, j: int, state: FockState) -> FockState:
    """l_{i,j}: prepends (i, j) to every admissible word and kills the rest."""
    _check_pair((i, j), state.n)
    out = state.empty_like()
    for word, amplitude in state.amplitudes.items():
        if admissible((i, j), word, state.flavor):
            if len(word) + 1 > state.truncation:
                raise TruncationOverflowError(len(word) + 1, state.truncation)
            out.add(((i, j),) + word, amplitude)
    return out


def annihilate(i: int, j: int, state: FockState) -> FockState:
    """l*_{i,j}: strips a leading (i, j) whose remainder is admissible for (i, j)."""
    _check_pair((i, j), state.n)
    out = state.empty_like()
    for word, amplitude in state.amplitudes.items():
        if word and word[0] == (i, j) and admissible((i, j), word[1:], state.flavor):
            out.add(word[1:], amplitude)
    return out


def unit_project(i: int, j: int, state: FockState) -> FockState:
    _check_pair((i, j), state.n)
    out = state.empty_like()
    for word, amplitude in state.amplitudes.items():
        if admissible((i, j), word, state.flavor):
            out.add(word, amplitude)
    return out


@dataclass(frozen=True)
class PairOperator:
    """creation * l + annihilation * l* + unit * 1 for one index pair."""
    pair: Pair
    creation: Number = 0
    annihilation: Number = 0
    unit: Number = 0

    @classmethod
    def centered(cls, pair: Pair, variance: Number, mean: Number = 0) -> "PairOperator":
        """Gaussian-like variable with phi(a) = mean and phi(a^2) - phi(a)^2 = variance, in similarity form."""
        if variance < 0:
            raise InvalidParameterError(f"variance must be nonnegative, got {variance}")
        return cls(tuple(pair), variance, 1, mean)

    def apply(self, state: FockState) -> FockState:
        i, j = self.pair
        out = state.empty_like()
        if self.creation:
            out = out + create(i, j, state).scale(self.creation)
        if self.annihilation:
            out = out + annihilate(i, j, state).scale(self.annihilation)
        if self.unit:
            out = out + unit_project(i, j, state).scale(self.unit)
        return out


@dataclass(frozen=True)
class Reference:
    """The state a moment is taken in: the vacuum, the vector e_{j,j}, or the average over j."""
    kind: str
    index: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("vacuum", "condition", "trace"):
            raise InvalidParameterError(f"unknown reference state {self.kind!r}")
        if (self.kind == "condition") != (self.index is not None):
            raise InvalidParameterError("only the condition reference takes an index")

    @classmethod
    def vacuum(cls) -> "Reference":
        return cls("vacuum")

    @classmethod
    def condition(cls, j: int) -> "Reference":
        return cls("condition", j)

    @classmethod
    def trace(cls) -> "Reference":
        return cls("trace")

    @classmethod
    def parse(cls, text: str) -> "Reference":
        """'vacuum', 'trace' or 'condition:<j>'."""
        if text.startswith("condition:"):
            try:
                return cls.condition(int(text.split(":", 1)[1]))
            except ValueError:
                raise InvalidParameterError(f"bad condition index in {text!r}")
        return cls(text)

    def __str__(self) -> str:
        return f"condition:{self.index}" if self.kind == "condition" else self.kind


def mixed_moment(factors: Sequence[PairOperator], n: int, reference: Reference = Reference.vacuum(),
                 flavor: Flavor = Flavor.STANDARD, truncation: Optional[int] = None) -> Number:
    """<a_1 a_2 ... a_k xi, xi>, the rightmost factor acting first."""
    flavor = Flavor(flavor)
    if truncation is None:
        truncation = len(factors) + 1
    for op in factors:
        _check_pair(op.pair, n)
    if reference.kind == "trace":
        total = sum((mixed_moment(factors, n, Reference.condition(j), flavor, truncation) for j in range(n)), 0)
        return total / n if isinstance(total, float) else Fraction(total) / n
    start = _reference_word(reference, n)
    state = FockState.basis(start, n, flavor, truncation)
    for op in reversed(factors):
        state = op.apply(state)
    return state.coefficient(start)


def _reference_word(reference: Reference, n: int) -> Word:
    if reference.kind == "vacuum":
        return VACUUM
    j = reference.index
    if not 0 <= j < n:
        raise InvalidParameterError(f"condition index {j} outside 0..{n - 1}")
    return ((j, j),)


@dataclass(frozen=True)
class PseudomatrixSpec:
    """S(n) = sum over (i, j) in the shape of X_{i,j}(n), with variances from the block model."""
    n: int
    model: BlockModel
    flavor: Flavor = Flavor.STANDARD
    shape: Shape = Shape.SQUARE

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        object.__setattr__(self, "shape", Shape(self.shape))
        if self.n < self.model.r:
            raise InvalidParameterError(f"n={self.n} is smaller than the block count {self.model.r}")

    def variances(self) -> SquareMatrix:
        v = blockify(self.model, self.n)
        if self.shape is Shape.LOWER:
            v = SquareMatrix(tuple(tuple(x if i >= j else 0 for j, x in enumerate(row))
                                   for i, row in enumerate(v.entries)))
        return v


def _apply_pseudomatrix(state: FockState, v: SquareMatrix, target_len: int, remaining: int) -> FockState:
    """One application of sum v_ij l_{i,j} + l*_{i,j}, dropping words that cannot return to target_len."""
    n = state.n
    out = state.empty_like()
    for word, amplitude in state.amplitudes.items():
        length = len(word)
        if word:
            i, j = word[0]
            if v[i, j] and admissible((i, j), word[1:], state.flavor) and abs(length - 1 - target_len) <= remaining:
                out.add(word[1:], amplitude)
        if abs(length + 1 - target_len) > remaining:
            continue
        if word:
            top = word[0]
            candidates = [(i, top[0]) for i in range(n)]
            if top[0] != top[1]:
                candidates.append(top)
        else:
            candidates = [(i, i) for i in range(n)]
        for pair in candidates:
            weight = v[pair]
            if not weight or not admissible(pair, word, state.flavor):
                continue
            if length + 1 > state.truncation:
                raise TruncationOverflowError(length + 1, state.truncation)
            out.add((pair,) + word, weight * amplitude)
    return out


def _direct_moment(spec: PseudomatrixSpec, m: int, start: Word, truncation: int) -> Number:
    v = spec.variances()
    state = FockState.basis(start, spec.n, spec.flavor, truncation)
    for step in range(m):
        state = _apply_pseudomatrix(state, v, len(start), m - step - 1)
    return state.coefficient(start)


def pseudomatrix_moment(spec: PseudomatrixSpec, m: int, reference: Reference = Reference.trace(),
                        truncation: Optional[int] = None, engine: str = "direct") -> Number:
    """
    <S(n)^m xi, xi> for the reference vector xi.

    Args:
        spec: size, block model, flavor and shape of S(n)
        m: moment order
        reference: vacuum, condition(j) or trace (the average of the n conditions)
        truncation: maximum word length, default m + 1
        engine: "direct" works on index words; "blocks" tracks block letters
            with multiplicities and supports the square shape only

    Returns:
        The exact moment (rational unless the model holds floats).
    """
    if m < 0:
        raise InvalidParameterError(f"moment order must be >= 0, got {m}")
    if truncation is None:
        truncation = m + 1
    if m % 2:
        return 0
    if engine == "blocks":
        if spec.shape is not Shape.SQUARE:
            raise InvalidParameterError("the block engine handles the square shape only")
        return block_moment(spec.model, spec.n, m, reference.kind, reference.index,
                            strong=spec.flavor is Flavor.STRONG)
    if engine != "direct":
        raise InvalidParameterError(f"unknown engine {engine!r}")
    if reference.kind == "trace":
        total = sum((_direct_moment(spec, m, ((j, j),), truncation) for j in range(spec.n)), 0)
        return total / spec.n if isinstance(total, float) else Fraction(total) / spec.n
    return _direct_moment(spec, m, _reference_word(reference, spec.n), truncation)


def enumerate_words(n: int, flavor: Flavor = Flavor.STANDARD, max_len: int = 3) -> List[Word]:
    """Every valid word of length <= max_len, by repeated creation from the vacuum."""
    flavor = Flavor(flavor)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    level = [VACUUM]
    words = [VACUUM]
    for _ in range(max_len):
        level = [(p,) + w for w in level for p in pairs if admissible(p, w, flavor)]
        words.extend(level)
    return words


@dataclass
class RelationsReport:
    n: int
    flavor: Flavor
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def relations_check(n: int, flavor: Flavor = Flavor.STANDARD, truncation: int = 4) -> RelationsReport:
    """
    Verifies the creation/annihilation relations on every basis word of length <= truncation - 2:

      l*_{i,j} l_{i,j} = 1_{i,j};
      l*_{i,j} l_{k,l} = l_{i,j} l_{k,l} = 1_{i,j} l_{k,l} = 0 for (i,j) != (k,l), j != k;
      1_{i,j} l_{j,k} = l_{j,k}.

    In the strong flavor 1_{j,j} only keeps the vacuum and the words (j,j)^p, so
    the last relation is not expected for i = j != k there.
    """
    if n < 2:
        raise InvalidParameterError(f"relations need n >= 2, got {n}")
    if truncation < 2:
        raise InvalidParameterError(f"truncation must be >= 2, got {truncation}")
    flavor = Flavor(flavor)
    report = RelationsReport(n, flavor)
    pairs = [(i, j) for i in range(n) for j in range(n)]

    def check(condition: bool, message: str) -> None:
        report.checked += 1
        if not condition:
            report.failures.append(message)

    for word in enumerate_words(n, flavor, truncation - 2):
        x = FockState.basis(word, n, flavor, truncation)
        for (i, j) in pairs:
            created = create(i, j, x)
            check(annihilate(i, j, created) == unit_project(i, j, x), f"l*l != 1 for {(i, j)} on {word}")
            for (k, l) in pairs:
                if (i, j) != (k, l) and j != k:
                    other = create(k, l, x)
                    check(annihilate(i, j, other).is_zero(), f"l*_{(i, j)} l_{(k, l)} != 0 on {word}")
                    check(create(i, j, other).is_zero(), f"l_{(i, j)} l_{(k, l)} != 0 on {word}")
                    check(unit_project(i, j, other).is_zero(), f"1_{(i, j)} l_{(k, l)} != 0 on {word}")
            for k in range(n):
                if flavor is Flavor.STRONG and i == j and k != j:
                    continue
                lifted = create(j, k, x)
                check(unit_project(i, j, lifted) == lifted, f"1_{(i, j)} l_{(j, k)} != l_{(j, k)} on {word}")
    logger.info("relations check n=%d flavor=%s: %d checks, %d failures",
                n, flavor.value, report.checked, len(report.failures))
    return report


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    order: int
    reference: str
    moment: Number
    limit: Number
    error: Number


def convergence_table(model: BlockModel, orders: Iterable[int], sizes: Iterable[int],
                      reference: Reference = Reference.trace(), engine: str = "blocks",
                      flavor: Flavor = Flavor.STANDARD) -> List[ConvergenceRow]:
    """Finite-n moments against the combinatorial limits (mu for the trace, mu_0 for the vacuum)."""
    orders = sorted(set(orders))
    sizes = sorted(set(sizes))
    if not orders or not sizes:
        raise InvalidParameterError("convergence table needs at least one order and one size")
    if reference.kind == "trace":
        limits = tracial_moments_combinatorial(model, max(orders))
    elif reference.kind == "vacuum":
        limits = standard_moments_combinatorial(model, max(orders))
    else:
        raise InvalidParameterError("convergence is tabulated for the vacuum and trace references")
    rows = []
    for n in sizes:
        spec = PseudomatrixSpec(n, model, flavor)
        for m in orders:
            value = pseudomatrix_moment(spec, m, reference, engine=engine)
            limit = limits[m]
            rows.append(ConvergenceRow(n, m, str(reference), value, limit, discrepancy(value, limit)))
        logger.debug("convergence n=%d done", n)
    return rows


def decay_exponent(rows: Sequence[ConvergenceRow]) -> float:
    """Slope p of error ~ C n^-p from a least-squares fit in log-log coordinates."""
    points = [(r.n, float(r.error)) for r in rows if r.error > 0]
    if len({n for n, _ in points}) < 2:
        raise InvalidParameterError("decay exponent needs positive errors at two or more sizes")
    xs = np.log([n for n, _ in points])
    ys = np.log([e for _, e in points])
    slope, _ = np.polyfit(xs, ys, 1)
    return float(-slope)


def extrapolate_limit(samples: Sequence[Tuple[int, Number]]) -> Number:
    """Neville interpolation in x = 1/n evaluated at x = 0."""
    if not samples:
        raise InvalidParameterError("extrapolation needs at least one sample")
    if len({n for n, _ in samples}) != len(samples):
        raise InvalidParameterError("extrapolation samples need distinct sizes")
    floating = any(isinstance(value, float) for _, value in samples)
    xs = [1.0 / n if floating else Fraction(1, n) for n, _ in samples]
    p = [value for _, value in samples]
    for level in range(1, len(p)):
        for i in range(len(p) - level):
            x_lo, x_hi = xs[i], xs[i + level]
            p[i] = (x_hi * p[i] - x_lo * p[i + 1]) / (x_hi - x_lo)
    return p[0]

"""Effectively closed sets on free groups, decided by finite exhaustion.

Group elements are freely reduced words: tuples of nonzero ints, +i for the
i-th generator, -i for its inverse, () for the identity.  The string form
uses x1..xp for generators and X1..Xp for inverses, "" for the identity.

A pattern is a finite partial coloring of the free group.  A configuration
disagrees with a pattern if they differ somewhere on its support; the closed
set of a pattern list is everything disagreeing with every pattern.  For a
finite list, emptiness only depends on the union U of the supports, so it is
decided by exhausting the |A|^|U| colorings of U (guarded by a budget).

Word problem oracles are plain callables word -> bool (true iff the word is
the identity in the group); concrete groups plug in through them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import pamaps
from .pamaps import PAGroupPresentation

FGWord = tuple[int, ...]
Oracle = Callable[[FGWord], bool]

DEFAULT_BUDGET = 1 << 24


class BudgetExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# Words


def w_reduce(symbols: Iterable[int]) -> FGWord:
    out: list[int] = []
    for s in symbols:
        if s == 0:
            raise ValueError("0 is not a generator index")
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def w_mul(a: FGWord, b: FGWord) -> FGWord:
    return w_reduce(itertools.chain(a, b))


def w_inv(a: FGWord) -> FGWord:
    return tuple(-s for s in reversed(a))


def word_from_str(text: str) -> FGWord:
    symbols = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch not in "xX":
            raise ValueError(f"bad word syntax at {text[i:]!r}")
        j = i + 1
        while j < len(text) and text[j].isdigit():
            j += 1
        if j == i + 1:
            raise ValueError(f"generator index missing at {text[i:]!r}")
        idx = int(text[i + 1:j])
        symbols.append(idx if ch == "x" else -idx)
        i = j
    return w_reduce(symbols)


def word_to_str(w: FGWord) -> str:
    return "".join((f"x{s}" if s > 0 else f"X{-s}") for s in w)


def ball(p: int, radius: int) -> list[FGWord]:
    """All reduced words of length <= radius over p generators."""
    words: list[FGWord] = [()]
    frontier: list[FGWord] = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for g in range(1, p + 1):
                for s in (g, -g):
                    if w and w[-1] == -s:
                        continue
                    nxt.append(w + (s,))
        words.extend(nxt)
        frontier = nxt
    return words


def canonical_classes(words: Sequence[FGWord], oracle: Oracle) -> dict[FGWord, FGWord]:
    """Map each word to the earliest enumerated word equal to it in the group."""
    reps: list[FGWord] = []
    out: dict[FGWord, FGWord] = {}
    for w in words:
        for r in reps:
            if oracle(w_mul(w_inv(r), w)):
                out[w] = r
                break
        else:
            reps.append(w)
            out[w] = w
    return out


# ---------------------------------------------------------------------------
# Oracles


def free_oracle(w: FGWord) -> bool:
    return not w


def abelian_oracle(w: FGWord) -> bool:
    """Z^d for any d: a word is trivial iff every generator's exponents cancel."""
    totals: dict[int, int] = {}
    for s in w:
        totals[abs(s)] = totals.get(abs(s), 0) + (1 if s > 0 else -1)
    return all(v == 0 for v in totals.values())


def cyclic_oracle(n: int) -> Oracle:
    def oracle(w: FGWord) -> bool:
        return sum(1 if s > 0 else -1 for s in w) % n == 0
    return oracle


def table_oracle(mult: Sequence[Sequence[int]], gens: Sequence[int], identity: int = 0) -> Oracle:
    """Finite group by multiplication table; gens[i] is the element of x_{i+1}."""
    inv = {}
    for a in range(len(mult)):
        for b in range(len(mult)):
            if mult[a][b] == identity:
                inv[a] = b

    def oracle(w: FGWord) -> bool:
        acc = identity
        for s in w:
            g = gens[abs(s) - 1]
            acc = mult[acc][g if s > 0 else inv[g]]
        return acc == identity

    return oracle


def pa_oracle(pres: PAGroupPresentation) -> Oracle:
    """Word problem through exact piecewise affine composition."""
    names = pres.names()
    cache: dict[FGWord, pamaps.PAMap] = {(): pamaps.identity(pres.space)}

    def composite(w: FGWord) -> pamaps.PAMap:
        if w in cache:
            return cache[w]
        head, tail = w[0], w[1:]
        m = pres.map_for(names[abs(head) - 1])
        if head < 0:
            m = pamaps.invert(m)
        result = pamaps.compose(m, composite(tail))
        cache[w] = result
        return result

    ident = pamaps.identity(pres.space)

    def oracle(w: FGWord) -> bool:
        return pamaps.equals(composite(w), ident)

    return oracle


# ---------------------------------------------------------------------------
# Patterns and emptiness


@dataclass(frozen=True)
class Pattern:
    cells: tuple[tuple[FGWord, int], ...]  # sorted by word

    @staticmethod
    def make(assignment: dict[FGWord, int] | Iterable[tuple[FGWord, int]]) -> "Pattern":
        items = assignment.items() if isinstance(assignment, dict) else assignment
        return Pattern(tuple(sorted(items)))

    def support(self) -> tuple[FGWord, ...]:
        return tuple(w for w, _ in self.cells)


@dataclass(frozen=True)
class PatternProblem:
    alphabet_size: int
    patterns: tuple[Pattern, ...]

    def __post_init__(self):
        if self.alphabet_size < 1:
            raise ValueError("alphabet must have at least one letter")


def empty_finite(problem: PatternProblem, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff no configuration disagrees with every pattern.

    Exhausts all colorings of the union of supports; any coloring that fails
    to fully agree with some pattern extends to a surviving configuration.
    """
    support = sorted({w for pat in problem.patterns for w in pat.support()})
    index = {w: i for i, w in enumerate(support)}
    total = problem.alphabet_size ** len(support)
    if total > budget:
        raise BudgetExceeded(f"{total} colorings exceed budget {budget}")
    pats = [tuple((index[w], letter) for w, letter in pat.cells) for pat in problem.patterns]
    for coloring in itertools.product(range(problem.alphabet_size), repeat=len(support)):
        if not any(all(coloring[i] == letter for i, letter in pat) for pat in pats):
            return False  # this coloring survives: the set is nonempty
    return True


def empty_semi(alphabet_size: int, enumerator: Iterable[Pattern], max_stages: int,
               budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Emptiness stage for a growing pattern list; None if not reached in time."""
    prefix: list[Pattern] = []
    it = iter(enumerator)
    for k in range(1, max_stages + 1):
        try:
            prefix.append(next(it))
        except StopIteration:
            break
        if empty_finite(PatternProblem(alphabet_size, tuple(prefix)), budget):
            return len(prefix)
    return None


def in_language(w: Pattern, problem: PatternProblem, budget: int = DEFAULT_BUDGET) -> bool:
    """True iff every surviving configuration disagrees with w somewhere."""
    support = w.support()
    incompatible = []
    for letters in itertools.product(range(problem.alphabet_size), repeat=len(support)):
        cand = Pattern.make(tuple(zip(support, letters)))
        if cand != w:
            incompatible.append(cand)
    extended = PatternProblem(problem.alphabet_size, problem.patterns + tuple(incompatible))
    return empty_finite(extended, budget)


# ---------------------------------------------------------------------------
# Pattern families from word problems


def perg_forbidden(oracle: Oracle, p: int, radius: int, alphabet_size: int = 2) -> list[Pattern]:
    """Patterns violated by group-consistent configurations: for every pair of
    ball words equal in the group, all colorings giving them different letters."""
    if alphabet_size < 2:
        raise ValueError("needs at least two letters")
    words = ball(p, radius)
    canon = canonical_classes(words, oracle)
    classes: dict[FGWord, list[FGWord]] = {}
    for w in words:
        classes.setdefault(canon[w], []).append(w)
    out = []
    for rep in sorted(classes):
        members = classes[rep]
        for g, h in itertools.combinations(members, 2):
            for a in range(alphabet_size):
                for b in range(alphabet_size):
                    if a != b:
                        out.append(Pattern.make({g: a, h: b}))
    return out


def xleq1_forbidden(oracle: Oracle, p: int, radius: int) -> list[Pattern]:
    """Forbidden patterns (over {0,1}) of 'at most one 1': two 1s at distinct
    group elements of the ball."""
    words = ball(p, radius)
    canon = canonical_classes(words, oracle)
    reps = sorted({canon[w] for w in words})
    return [Pattern.make({(): 1, g: 1}) for g in reps if g != ()]


def simple_sft_check(oracle: Oracle, p: int, radius: int, a: FGWord,
                     alphabet_size: int = 3) -> dict[FGWord, int]:
    """3-color the ball so that every edge {g, g*a} is bichromatic.

    The edge set is a union of paths and cycles (each vertex touches at most
    one a-successor and one a-predecessor), so a greedy coloring always
    succeeds; the result is a finite witness patch of the constraint set.
    """
    if oracle(a):
        raise ValueError("a must not be the identity")
    words = ball(p, radius)
    canon = canonical_classes(words, oracle)
    reps = sorted({canon[w] for w in words})
    in_ball = set(reps)

    def step(g: FGWord, direction: int) -> Optional[FGWord]:
        target = w_mul(g, a if direction > 0 else w_inv(a))
        for r in reps:
            if oracle(w_mul(w_inv(r), target)):
                return r
        return None

    neighbors: dict[FGWord, list[FGWord]] = {g: [] for g in reps}
    for g in reps:
        nxt = step(g, +1)
        if nxt is not None and nxt in in_ball:
            neighbors[g].append(nxt)
            neighbors[nxt].append(g)

    coloring: dict[FGWord, int] = {}
    for start in reps:
        if start in coloring:
            continue
        stack = [start]
        while stack:
            g = stack.pop()
            if g in coloring:
                continue
            used = {coloring[n] for n in neighbors[g] if n in coloring}
            for color in range(alphabet_size):
                if color not in used:
                    coloring[g] = color
                    break
            else:
                raise RuntimeError("no color left; oracle is inconsistent")
            stack.extend(n for n in neighbors[g] if n not in coloring)
    for g in reps:
        nxt = step(g, +1)
        if nxt is not None and nxt in in_ball and coloring[g] == coloring[nxt]:
            raise RuntimeError("coloring check failed; oracle is inconsistent")
    return coloring


# ---------------------------------------------------------------------------
# JSON form


def pattern_to_obj(p: Pattern) -> dict:
    return {"cells": [{"word": word_to_str(w), "letter": l} for w, l in p.cells]}


def pattern_from_obj(obj: dict) -> Pattern:
    return Pattern.make({word_from_str(c["word"]): int(c["letter"]) for c in obj["cells"]})


def problem_to_obj(p: PatternProblem) -> dict:
    return {"alphabet": p.alphabet_size, "patterns": [pattern_to_obj(x) for x in p.patterns]}


def problem_from_obj(obj: dict) -> PatternProblem:
    return PatternProblem(int(obj["alphabet"]), tuple(pattern_from_obj(x) for x in obj["patterns"]))

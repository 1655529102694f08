"""Semantic checks for generated tile sets.

Rows are read left to right: the tile at position n shows its right label to
the tile at position n+1, so u -> v is an edge iff right(u) == left(v).
Input bits of a row encode a real y through its balanced (Beatty) bit
sequence disc(y)_n = floor((n+1)y) - floor(ny); the window average of a bit
row is the finite estimator of the encoded value.

Checks come in two flavors: completeness (explicit witness rows built from
the exact carry formula must land inside the generated set) and soundness
(every periodic row's averages must follow the compiled map; bounded search
for stacked periodic configurations must come up empty exactly when the map
has no periodic points).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from . import pamaps
from .pamaps import OutOfDomain, PAGroupPresentation, PAMap, rat
from .tiles import (
    GroupTileSet,
    Plan,
    PlanAff,
    PlanComp,
    PlanProd,
    PlanUnion,
    ZTile,
    ZTileSet,
    atom,
    tag,
    tup,
)


class VerifyError(Exception):
    pass


class WitnessFailure(VerifyError):
    """An expected witness row could not be realized: completeness is broken."""


class InconsistentPatch(VerifyError):
    pass


# ---------------------------------------------------------------------------
# Balanced encodings


@dataclass(frozen=True)
class BitWindow:
    offset: int
    bits: tuple[int, ...]


def disc(y, n_from: int, n_to: int) -> BitWindow:
    """Balanced bit window of y >= 0 over positions n_from..n_to inclusive."""
    y = rat(y)
    if y < 0:
        raise ValueError("disc needs y >= 0")
    bits = tuple(math.floor((n + 1) * y) - math.floor(n * y) for n in range(n_from, n_to + 1))
    return BitWindow(n_from, bits)


def cont_window(w: BitWindow) -> Fraction:
    if not w.bits:
        raise ValueError("empty window")
    return Fraction(sum(w.bits), len(w.bits))


# ---------------------------------------------------------------------------
# Witness rows


def _affine_row(a: Fraction, b: Fraction, x: Fraction, n_from: int, n_to: int,
                in_max: int, out_max: int, out_name: str,
                y_target: Optional[Fraction]) -> tuple[list[ZTile], Fraction]:
    if not 0 <= x <= in_max:
        raise WitnessFailure(f"input {x} not encodable in bits 0..{in_max}")
    y = a * x + b
    if not 0 <= y <= out_max:
        raise WitnessFailure(f"output {y} not encodable in bits 0..{out_max}")
    if y_target is not None and y != y_target:
        raise WitnessFailure(f"branch outputs {y}, not the requested {y_target}")
    tiles = []
    carry = lambda n: a * math.floor(n * x) + n * b - math.floor(n * y)
    tops = disc(x, n_from, n_to).bits
    bots = disc(y, n_from, n_to).bits
    for i, n in enumerate(range(n_from, n_to + 1)):
        tiles.append(ZTile(tops[i], ((out_name, bots[i]),), atom(carry(n)), atom(carry(n + 1))))
    return tiles, y


def plan_row(plan: Plan, x, n_from: int, n_to: int, in_max: int, out_max: int,
             y_target=None) -> tuple[list[ZTile], Fraction]:
    """Explicit row of tiles encoding x and its image under the plan's map.

    Union branches are tried in order; a branch whose values leave the bit
    range raises WitnessFailure and the next one is tried.  When a target
    output value is given, only branches emitting exactly that value are
    accepted; two branches can encode the same circle point by different
    representatives (a raw value of L against a wrapped 0), and neighbors in
    a patch care about the bits, not the point.
    """
    x = rat(x)
    if isinstance(plan, PlanAff):
        return _affine_row(plan.a, plan.b, x, n_from, n_to, in_max, out_max, "f", y_target)
    if isinstance(plan, PlanUnion):
        try:
            tiles, y = plan_row(plan.first, x, n_from, n_to, in_max, out_max, y_target)
            tname = "L"
        except WitnessFailure:
            tiles, y = plan_row(plan.second, x, n_from, n_to, in_max, out_max, y_target)
            tname = "R"
        return [ZTile(t.top, t.bottoms, tag(tname, t.left), tag(tname, t.right)) for t in tiles], y
    if isinstance(plan, PlanComp):
        first, mid = plan_row(plan.first, x, n_from, n_to, in_max, out_max)
        second, y = plan_row(plan.second, mid, n_from, n_to, in_max, out_max, y_target)
        tiles = []
        for ta, tb in zip(first, second):
            if ta.bottom() != tb.top:
                raise WitnessFailure("middle bit rows disagree")
            tiles.append(ZTile(ta.top, tb.bottoms, tup(ta.left, tb.left), tup(ta.right, tb.right)))
        return tiles, y
    if isinstance(plan, PlanProd):
        parts = []
        for name, p in plan.parts:
            target = y_target.get(name) if isinstance(y_target, dict) else y_target
            parts.append((name, plan_row(p, x, n_from, n_to, in_max, out_max, target)))
        tiles = []
        for i in range(n_to - n_from + 1):
            chosen = [rows[i] for _, (rows, _) in parts]
            bottoms = tuple(sorted((name, t.bottom()) for (name, _), t in zip(parts, chosen)))
            tiles.append(ZTile(chosen[0].top, bottoms,
                               tup(*(t.left for t in chosen)), tup(*(t.right for t in chosen))))
        return tiles, x
    raise TypeError(f"not a plan: {plan!r}")


def _check_row(tiles: Sequence[ZTile], known: frozenset[ZTile]) -> None:
    for t in tiles:
        if t not in known:
            raise WitnessFailure(f"witness tile not in set: {t}")
    for u, v in zip(tiles, tiles[1:]):
        if u.right != v.left:
            raise WitnessFailure("witness row is not connected")


def witness_row(ts: ZTileSet | GroupTileSet, x, N: int) -> list[ZTile]:
    """Row of 2N+1 tiles encoding x (positions -N..N); asserts membership."""
    if ts.source is None:
        raise ValueError("tile set carries no generation plan")
    out_max = ts.out_maxes[0][1]
    if any(m != out_max for _, m in ts.out_maxes):
        raise ValueError("outputs use different alphabets")
    tiles, _ = plan_row(ts.source, x, -N, N, ts.in_max, out_max)
    _check_row(tiles, frozenset(ts.tiles))
    return tiles


# ---------------------------------------------------------------------------
# Transition graph and periodic rows


@dataclass(frozen=True)
class TransitionGraph:
    succ: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(ts: ZTileSet | GroupTileSet) -> "TransitionGraph":
        by_left: dict = {}
        for j, t in enumerate(ts.tiles):
            by_left.setdefault(t.left, []).append(j)
        return TransitionGraph(tuple(tuple(by_left.get(t.right, ())) for t in ts.tiles))


@dataclass(frozen=True)
class PeriodicRow:
    cycle: tuple[int, ...]


def nonempty_rows(ts: ZTileSet | GroupTileSet) -> bool:
    """A bi-infinite valid row exists iff the transition graph has a cycle."""
    succ = TransitionGraph.of(ts).succ
    color = [0] * len(succ)  # 0 unseen, 1 active, 2 done
    for start in range(len(succ)):
        if color[start]:
            continue
        stack = [(start, iter(succ[start]))]
        color[start] = 1
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == 1:
                    return True
                if color[nxt] == 0:
                    color[nxt] = 1
                    stack.append((nxt, iter(succ[nxt])))
                    advanced = True
                    break
            if not advanced:
                color[node] = 2
                stack.pop()
    return False


def closed_walks(succ: Sequence[Sequence[int]], n: int) -> Iterator[tuple[int, ...]]:
    """All closed walks of length n, start tile marked (rotations distinct)."""
    if n < 1:
        raise ValueError("row length must be >= 1")
    path = [0] * n

    def extend(start: int, node: int, depth: int) -> Iterator[tuple[int, ...]]:
        if depth == n:
            if start in succ[node]:
                yield tuple(path)
            return
        for nxt in succ[node]:
            path[depth] = nxt
            yield from extend(start, nxt, depth + 1)

    for start in range(len(succ)):
        path[0] = start
        yield from extend(start, start, 1)


def periodic_rows(ts: ZTileSet | GroupTileSet, n: int) -> list[PeriodicRow]:
    succ = TransitionGraph.of(ts).succ
    return [PeriodicRow(w) for w in closed_walks(succ, n)]


def periodic_soundness(ts: ZTileSet, f: PAMap, n_max: int,
                       stop_early: bool = False) -> list[dict]:
    """Check every n-periodic row, n <= n_max: its bit averages must follow f.

    Returns violation records; an empty list certifies soundness up to n_max.
    """
    name = ts.single_out()
    sp = f.space
    succ = TransitionGraph.of(ts).succ
    violations = []
    for n in range(1, n_max + 1):
        for walk in closed_walks(succ, n):
            tiles = [ts.tiles[i] for i in walk]
            top_avg = Fraction(sum(t.top for t in tiles), n)
            bot_avg = Fraction(sum(t.bottom(name) for t in tiles), n)
            x = sp.normalize(top_avg)
            try:
                expected = pamaps.apply(f, x)
            except OutOfDomain:
                continue
            if not sp.equiv(bot_avg, expected):
                violations.append({
                    "n": n,
                    "cycle": list(walk),
                    "top_avg": str(top_avg),
                    "bottom_avg": str(bot_avg),
                    "expected": str(expected),
                })
                if stop_early:
                    return violations
    return violations


# ---------------------------------------------------------------------------
# Stacked periodic configurations


def _rot(word: tuple[int, ...], s: int) -> tuple[int, ...]:
    n = len(word)
    return tuple(word[(m - s) % n] for m in range(n))


def stacked_periodic_scan(ts: ZTileSet, n_max: int, k_max: int) -> list[dict]:
    """Search for configurations with period lattice (n,0),(s,k), n <= n_max,
    k <= k_max, 0 <= s < n: k stacked n-periodic rows, each feeding the next,
    the last feeding the first rotated by the shear s.

    Reports one witness per (n, k, s) found; an empty report is bounded
    evidence of aperiodicity.
    """
    name = ts.single_out()
    succ = TransitionGraph.of(ts).succ
    found: dict[tuple[int, int, int], dict] = {}
    for n in range(1, n_max + 1):
        pairs: dict[tuple, dict[tuple, tuple]] = {}
        avg_succ: dict[Fraction, set[Fraction]] = {}
        for walk in closed_walks(succ, n):
            tiles = [ts.tiles[i] for i in walk]
            tops = tuple(t.top for t in tiles)
            bots = tuple(t.bottom(name) for t in tiles)
            pairs.setdefault(tops, {}).setdefault(bots, walk)
            avg_succ.setdefault(Fraction(sum(tops), n), set()).add(Fraction(sum(bots), n))

        def avg_loop_lengths(a0: Fraction) -> set[int]:
            lengths = set()
            frontier = {a0}
            for k in range(1, k_max + 1):
                frontier = {b for a in frontier for b in avg_succ.get(a, ())}
                if a0 in frontier:
                    lengths.add(k)
                if not frontier:
                    break
            return lengths

        loop_cache: dict[Fraction, set[int]] = {}
        for t0 in sorted(pairs):
            a0 = Fraction(sum(t0), n)
            if a0 not in loop_cache:
                loop_cache[a0] = avg_loop_lengths(a0)
            ks = loop_cache[a0]
            if not ks:
                continue
            # BFS over top words, remembering one parent per word per level
            levels: list[dict[tuple, Optional[tuple]]] = [{t0: None}]
            for _ in range(1, max(ks)):
                cur: dict[tuple, Optional[tuple]] = {}
                for w in levels[-1]:
                    for b in pairs.get(w, ()):
                        if b in pairs and b not in cur:
                            cur[b] = w
                levels.append(cur)
            for k in sorted(ks):
                for w in levels[k - 1]:
                    for b in pairs[w]:
                        for s in range(n):
                            if (n, k, s) in found:
                                continue
                            if b != _rot(t0, s):
                                continue
                            chain = [w]
                            for lvl in range(k - 1, 0, -1):
                                chain.append(levels[lvl][chain[-1]])
                            chain.reverse()  # tops of rows 0..k-1
                            rows = []
                            for i, wt in enumerate(chain):
                                nxt = chain[i + 1] if i + 1 < k else b
                                rows.append(list(pairs[wt][nxt]))
                            found[(n, k, s)] = {"n": n, "k": k, "shear": s, "rows": rows}
    return [found[key] for key in sorted(found)]


# ---------------------------------------------------------------------------
# Patches over Z x G


@dataclass(frozen=True)
class PatchRow:
    offset: int
    tiles: tuple[ZTile, ...]


FGWord = tuple[int, ...]


def _w_inv(w: FGWord) -> FGWord:
    return tuple(-g for g in reversed(w))


def _w_concat(a: FGWord, b: FGWord) -> FGWord:
    out = list(a)
    for g in b:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


def patch_check(gts: GroupTileSet, patch: dict[FGWord, PatchRow],
                is_identity: Callable[[FGWord], bool]) -> bool:
    """Check a finite patch: keyed by group words, one row window per element.

    Validates tile membership, row connectivity, key consistency (two words
    equal in the group must carry equal rows), and for every pair of patch
    elements v = w * h^-1 the generator constraint phi_h(w) = psi_h(v)
    pointwise on the shared window.
    """
    known = frozenset(gts.tiles)
    keys = list(patch)
    reps: list[FGWord] = []
    for w in keys:
        for v in reps:
            if is_identity(_w_concat(_w_inv(v), w)):
                if patch[v] != patch[w]:
                    raise InconsistentPatch(f"{v} and {w} are equal in G but carry different rows")
                break
        else:
            reps.append(w)
    for w in reps:
        row = patch[w]
        for t in row.tiles:
            if t not in known:
                return False
        for u, v in zip(row.tiles, row.tiles[1:]):
            if u.right != v.left:
                return False
    for w in reps:
        for v in reps:
            for i, h in enumerate(gts.generators, start=1):
                if not is_identity(_w_concat(_w_inv(v), _w_concat(w, (-i,)))):
                    continue  # v != w * h^-1
                rw, rv = patch[w], patch[v]
                lo = max(rw.offset, rv.offset)
                hi = min(rw.offset + len(rw.tiles), rv.offset + len(rv.tiles))
                for n in range(lo, hi):
                    tw = rw.tiles[n - rw.offset]
                    tv = rv.tiles[n - rv.offset]
                    if gts.phi(tw, h) != gts.psi(tv, h):
                        return False
    return True


def _ball_words(p: int, radius: int) -> list[FGWord]:
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


def search_base_point(pres: PAGroupPresentation, radius: int,
                      max_den: int = 50) -> Fraction:
    """First rational (by denominator, then numerator) whose whole radius-ball
    orbit stays inside every composite's domain."""
    maps = pamaps.enumerate_maps(pres, radius + 1)
    L = pres.space.length
    for q in range(1, max_den + 1):
        for num in range(0, math.ceil(L * q) + 1):
            z = Fraction(num, q)
            if z > L:
                continue
            try:
                for m in maps:
                    pamaps.apply(m, z)
            except OutOfDomain:
                continue
            return z
    raise VerifyError("no base point found")


def build_orbit_patch(pres: PAGroupPresentation, gts: GroupTileSet, radius: int,
                      N: int, z0=None) -> dict[FGWord, PatchRow]:
    """Witness patch on the radius ball: position w carries the row encoding
    z_w = f_{w^-1}(z0), so that moving in the h direction applies f_h."""
    if gts.source is None:
        raise ValueError("group tile set carries no generation plan")
    if z0 is None:
        z0 = search_base_point(pres, radius)
    z0 = rat(z0)
    out_max = gts.out_maxes[0][1]
    patch: dict[FGWord, PatchRow] = {}
    seen_maps: dict[PAMap, FGWord] = {}
    for w in _ball_words(len(pres.generators), radius):
        signed = [(pres.generators[abs(g) - 1][0], 1 if g > 0 else -1) for g in _w_inv(w)]
        m = pamaps.word_apply(pres, signed)
        if m in seen_maps:
            continue
        seen_maps[m] = w
        z = pamaps.apply(m, z0)
        # request the canonical representative of each neighbor's value, so
        # the emitted bits match the neighboring rows' input encodings
        targets = {name: pamaps.apply(gen, z) for name, gen in pres.generators}
        tiles, _ = plan_row(gts.source, z, -N, N, gts.in_max, out_max, targets)
        patch[w] = PatchRow(-N, tuple(tiles))
    return patch

"""Wang tile sets over Z from affine maps, and their assembly over Z x G.

A tile carries an input bit (top), one output bit per named output (bottom),
and rational carry labels on its sides.  The defining relation of every
generated tile is

    bottom = a * top + b + left - right

so that along a bi-infinite row the side labels telescope and the bottom row
averages to a * (top average) + b.  Side labels are structured (`HLabel`):
plain carries for a single affine map, tagged to keep unioned sets disjoint,
and tuples for composed or product sets.

Tile sets remember the plan that generated them (a small expression tree of
affine / union / compose / product nodes); the verifier uses the plan to build
explicit witness rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import pamaps
from .pamaps import Interval, PAGroupPresentation, PAMap, rat, rat_str


class TileSetError(Exception):
    pass


class AlphabetMismatch(TileSetError):
    pass


class EmptyTileSetError(TileSetError):
    pass


class NotHomeo(TileSetError):
    pass


# ---------------------------------------------------------------------------
# Side labels


class HLabel:
    """Structured side label: a carry, a tagged label, or a tuple of labels.

    Instances are interned, so equality is identity and hashes are cached;
    label-heavy operations (compose, product, trimming) rely on this.
    """

    __slots__ = ("kind", "value", "_hash", "_key")
    _interned: dict = {}

    def __new__(cls, kind: str, value):
        cached = cls._interned.get((kind, value))
        if cached is not None:
            return cached
        self = object.__new__(cls)
        self.kind = kind
        self.value = value
        self._hash = hash((kind, value))
        self._key = None
        cls._interned[(kind, value)] = self
        return self

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def sort_key(self):
        if self._key is None:
            if self.kind == "atom":
                self._key = (0, self.value)
            elif self.kind == "tag":
                name, inner = self.value
                self._key = (1, name, inner.sort_key())
            else:
                self._key = (2, len(self.value), tuple(l.sort_key() for l in self.value))
        return self._key

    def __repr__(self):
        if self.kind == "atom":
            return rat_str(self.value)
        if self.kind == "tag":
            name, inner = self.value
            return f"{name}:{inner!r}"
        return "(" + ",".join(repr(l) for l in self.value) + ")"


def atom(q) -> HLabel:
    return HLabel("atom", rat(q))


def tag(name: str, label: HLabel) -> HLabel:
    return HLabel("tag", (name, label))


def tup(*labels: HLabel) -> HLabel:
    return HLabel("tup", tuple(labels))


def label_to_obj(l: HLabel):
    if l.kind == "atom":
        return rat_str(l.value)
    if l.kind == "tag":
        name, inner = l.value
        return {"tag": name, "label": label_to_obj(inner)}
    return [label_to_obj(x) for x in l.value]


def label_from_obj(obj) -> HLabel:
    if isinstance(obj, str):
        return atom(obj)
    if isinstance(obj, dict):
        return tag(obj["tag"], label_from_obj(obj["label"]))
    return tup(*(label_from_obj(x) for x in obj))


# ---------------------------------------------------------------------------
# Tiles and tile sets


class ZTile:
    """One Wang tile: input bit, named output bits, left/right side labels."""

    __slots__ = ("top", "bottoms", "left", "right", "_hash")

    def __init__(self, top: int, bottoms: tuple[tuple[str, int], ...], left: HLabel, right: HLabel):
        self.top = top
        self.bottoms = bottoms
        self.left = left
        self.right = right
        self._hash = hash((top, bottoms, left, right))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return (self is other) or (
            isinstance(other, ZTile)
            and self._hash == other._hash
            and self.top == other.top
            and self.bottoms == other.bottoms
            and self.left is other.left
            and self.right is other.right
        )

    def __repr__(self):
        return f"ZTile(top={self.top}, bottoms={self.bottoms}, left={self.left!r}, right={self.right!r})"

    def bottom(self, name: Optional[str] = None) -> int:
        if name is None:
            if len(self.bottoms) != 1:
                raise ValueError("tile has several outputs; name one")
            return self.bottoms[0][1]
        for n, v in self.bottoms:
            if n == name:
                return v
        raise KeyError(name)

    def sort_key(self):
        return (self.top, self.bottoms, self.left.sort_key(), self.right.sort_key())


def _mk_bottoms(d: dict[str, int]) -> tuple[tuple[str, int], ...]:
    return tuple(sorted(d.items()))


# Plan nodes: how a tile set was generated.  Used for witness construction.


@dataclass(frozen=True)
class PlanAff:
    a: Fraction
    b: Fraction


@dataclass(frozen=True)
class PlanUnion:
    first: "Plan"
    second: "Plan"


@dataclass(frozen=True)
class PlanComp:
    first: "Plan"   # applied first
    second: "Plan"


@dataclass(frozen=True)
class PlanProd:
    parts: tuple[tuple[str, "Plan"], ...]


Plan = object


@dataclass(frozen=True)
class ZTileSet:
    in_max: int
    out_maxes: tuple[tuple[str, int], ...]
    tiles: tuple[ZTile, ...]
    source: Optional[Plan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        names = [n for n, _ in self.out_maxes]
        if sorted(names) != names:
            raise ValueError("output names must be sorted")
        seen = set()
        for t in self.tiles:
            if t in seen:
                raise ValueError(f"duplicate tile {t}")
            seen.add(t)
            if not 0 <= t.top <= self.in_max:
                raise ValueError(f"top bit {t.top} out of range")
            if tuple(n for n, _ in t.bottoms) != tuple(names):
                raise ValueError("tile outputs do not match the set's outputs")
            for (n, v), (_, mx) in zip(t.bottoms, self.out_maxes):
                if not 0 <= v <= mx:
                    raise ValueError(f"bottom bit {v} out of range for {n}")

    @staticmethod
    def make(in_max, out_maxes: dict[str, int], tiles: Iterable[ZTile], source=None) -> "ZTileSet":
        return ZTileSet(in_max, _mk_bottoms(out_maxes), tuple(sorted(set(tiles), key=ZTile.sort_key)), source)

    def single_out(self) -> str:
        if len(self.out_maxes) != 1:
            raise ValueError("tile set has several outputs")
        return self.out_maxes[0][0]

    def out_max(self, name: Optional[str] = None) -> int:
        if name is None:
            name = self.single_out()
        return dict(self.out_maxes)[name]


@dataclass(frozen=True)
class GroupTileSet:
    """Wang tiles over Z x G: Z-direction side labels plus, for each generator
    h, colors psi_h = shared input bit and phi_h = the h output bit."""

    generators: tuple[str, ...]
    in_max: int
    out_maxes: tuple[tuple[str, int], ...]
    tiles: tuple[ZTile, ...]
    source: Optional[Plan] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if sorted(n for n, _ in self.out_maxes) != sorted(self.generators):
            raise ValueError("outputs must match the generators")
        self.as_ztileset()  # reuse the bit range and duplicate checks

    def zphi(self, t: ZTile) -> HLabel:
        return t.left

    def zpsi(self, t: ZTile) -> HLabel:
        return t.right

    def phi(self, t: ZTile, h: str) -> int:
        return t.bottom(h)

    def psi(self, t: ZTile, h: str) -> int:
        if h not in self.generators:
            raise KeyError(h)
        return t.top

    def as_ztileset(self) -> ZTileSet:
        return ZTileSet(self.in_max, self.out_maxes, self.tiles, self.source)


# ---------------------------------------------------------------------------
# Generators


def carry_set(a, b) -> tuple[Fraction, ...]:
    """All possible side carries for the map x -> a*x + b.

    The exact carry at position n is {n*y} - a*{n*x}, a multiple of
    1/lcm(den a, den b).  For a > 0 it lies strictly inside (-a, 1); for a < 0
    it lies in [0, 1 - a) and the left endpoint is attained (at n = 0), so 0
    must be included.
    """
    a, b = rat(a), rat(b)
    D = math.lcm(a.denominator, b.denominator)
    if a > 0:
        lo_k = -a * D + 1  # exclusive left endpoint; a*D is integral by choice of D
        hi_k = Fraction(D - 1)
    else:
        lo_k = Fraction(0)
        hi_k = (1 - a) * D - 1
    assert lo_k.denominator == 1 and hi_k.denominator == 1
    return tuple(Fraction(k, D) for k in range(lo_k.numerator, hi_k.numerator + 1))


def affine_tiles(a, b, in_max: int, out_max: int, out_name: str = "f") -> ZTileSet:
    """All tiles satisfying bottom = a*top + b + left - right over the carry set."""
    a, b = rat(a), rat(b)
    if a == 0:
        raise ValueError("slope must be nonzero")
    carries = carry_set(a, b)
    tiles = []
    for t in range(in_max + 1):
        for c in carries:
            for cp in carries:
                u = a * t + b + c - cp
                if u.denominator == 1 and 0 <= u <= out_max:
                    tiles.append(ZTile(t, _mk_bottoms({out_name: int(u)}), atom(c), atom(cp)))
    if not tiles:
        raise EmptyTileSetError(f"no tiles for a={a}, b={b}")
    return ZTileSet.make(in_max, {out_name: out_max}, tiles, source=PlanAff(a, b))


def union_tiles(A: ZTileSet, B: ZTileSet) -> ZTileSet:
    """Disjoint union; side labels are tagged so rows cannot mix operands."""
    if A.in_max != B.in_max or A.out_maxes != B.out_maxes:
        raise AlphabetMismatch("union operands must share in/out alphabets")
    tiles = [ZTile(t.top, t.bottoms, tag("L", t.left), tag("L", t.right)) for t in A.tiles]
    tiles += [ZTile(t.top, t.bottoms, tag("R", t.left), tag("R", t.right)) for t in B.tiles]
    src = PlanUnion(A.source, B.source) if A.source is not None and B.source is not None else None
    return ZTileSet.make(A.in_max, dict(A.out_maxes), tiles, source=src)


def compose_tiles(A: ZTileSet, B: ZTileSet) -> ZTileSet:
    """Tiles of x -> f_B(f_A(x)): pairs whose middle bits agree."""
    mid = A.out_max()
    if mid != B.in_max:
        raise AlphabetMismatch(f"A out alphabet {mid} != B in alphabet {B.in_max}")
    tiles = []
    by_top: dict[int, list[ZTile]] = {}
    for tb in B.tiles:
        by_top.setdefault(tb.top, []).append(tb)
    for ta in A.tiles:
        for tb in by_top.get(ta.bottom(), []):
            tiles.append(ZTile(ta.top, tb.bottoms, tup(ta.left, tb.left), tup(ta.right, tb.right)))
    src = PlanComp(A.source, B.source) if A.source is not None and B.source is not None else None
    return ZTileSet.make(A.in_max, dict(B.out_maxes), tiles, source=src)


def product_tiles(components: Sequence[tuple[str, ZTileSet]]) -> ZTileSet:
    """Synchronized product: one tile per choice of component tiles sharing a top bit.

    Each component must have a single output; in the product it is renamed to
    the component's name.
    """
    if not components:
        raise ValueError("empty product")
    in_max = components[0][1].in_max
    for name, c in components:
        if c.in_max != in_max:
            raise AlphabetMismatch("product components must share the input alphabet")
        c.single_out()
    out_maxes = {name: c.out_max() for name, c in components}
    tiles = []
    for t in range(in_max + 1):
        rows = [[tile for tile in c.tiles if tile.top == t] for _, c in components]
        idx = [0] * len(rows)
        if any(not r for r in rows):
            continue
        while True:
            chosen = [rows[i][idx[i]] for i in range(len(rows))]
            bottoms = {name: tile.bottom() for (name, _), tile in zip(components, chosen)}
            tiles.append(ZTile(
                t,
                _mk_bottoms(bottoms),
                tup(*(tile.left for tile in chosen)),
                tup(*(tile.right for tile in chosen)),
            ))
            i = len(rows) - 1
            while i >= 0:
                idx[i] += 1
                if idx[i] < len(rows[i]):
                    break
                idx[i] = 0
                i -= 1
            if i < 0:
                break
    srcs = [(name, c.source) for name, c in components]
    src = PlanProd(tuple(srcs)) if all(s is not None for _, s in srcs) else None
    return ZTileSet.make(in_max, out_maxes, tiles, source=src)


# ---------------------------------------------------------------------------
# Compiling a piecewise map


def trim_tiles(ts: ZTileSet) -> ZTileSet:
    """Drop tiles that cannot occur in any bi-infinite row.

    A tile survives iff it has an infinite forward and an infinite backward
    extension in the adjacency graph (right label feeding the next left
    label), so the set of bi-infinite valid rows is preserved exactly.
    """
    tiles = ts.tiles
    by_left: dict[HLabel, list[int]] = {}
    for j, t in enumerate(tiles):
        by_left.setdefault(t.left, []).append(j)
    succ = [by_left.get(t.right, []) for t in tiles]
    pred: list[list[int]] = [[] for _ in tiles]
    for u, vs in enumerate(succ):
        for v in vs:
            pred[v].append(u)

    def extendable(adj: list[list[int]], radj: list[list[int]]) -> set[int]:
        out = [len(a) for a in adj]
        queue = [i for i, o in enumerate(out) if o == 0]
        dead = set(queue)
        while queue:
            d = queue.pop()
            for u in radj[d]:
                out[u] -= 1
                if out[u] == 0 and u not in dead:
                    dead.add(u)
                    queue.append(u)
        return {i for i in range(len(adj)) if i not in dead}

    alive = extendable(succ, pred) & extendable(pred, succ)
    kept = tuple(t for i, t in enumerate(tiles) if i in alive)
    return ZTileSet(ts.in_max, ts.out_maxes, kept, ts.source)


def bit_max(space: pamaps.Space) -> int:
    return math.ceil(space.length)


def _fast_path_ok(space: pamaps.Space, piece: pamaps.AffinePiece, m: int) -> bool:
    """True when the output range alone already forces inputs into the piece's
    domain, so the bare affine tiles are sound without domain scaffolding."""
    box = Interval(Fraction(0), Fraction(m))
    pre = pamaps._preimage(pamaps.AffinePiece(box, piece.slope, piece.offset), Fraction(0), Fraction(m))
    return pre == piece.dom


def _wrap_plan(length: Fraction) -> Plan:
    ident = PlanAff(Fraction(1), Fraction(0))
    return PlanUnion(PlanUnion(ident, PlanAff(Fraction(1), -length)), PlanAff(Fraction(1), length))


def pamap_plan(f: PAMap, fast_path: bool = True) -> Plan:
    """Tile-generation plan for a total map.

    Per piece: the bare affine tiles when the output range alone enforces the
    domain (fast path); otherwise the domain [p, q] is enforced by routing
    through x -> M(x-p)/(q-p), whose output range [0, M] cuts exactly the
    piece's domain, followed by the piece's map read off the scaled input.
    Circle maps get a wrap stage (identity union shift by the length) on both
    ends so either representative of the glued point is accepted.
    """
    sp = f.space
    if sp.circle:
        if not pamaps.is_circle_homeo(f):
            raise NotHomeo("map is not a circle homeomorphism")
    elif not f.is_total():
        raise NotHomeo("map is not total on its interval")
    m = bit_max(sp)
    M = Fraction(m)
    plans = []
    for piece in f.pieces:
        if fast_path and _fast_path_ok(sp, piece, m):
            plans.append(PlanAff(piece.slope, piece.offset))
            continue
        stages: list[Plan] = []
        if sp.circle:
            stages.append(_wrap_plan(sp.length))
        p, q = piece.dom.lo, piece.dom.hi
        if (p, q) == (0, M):
            stages.append(PlanAff(piece.slope, piece.offset))
        else:
            span = q - p
            stages.append(PlanAff(M / span, -p * M / span))
            stages.append(PlanAff(piece.slope * span / M, piece.slope * p + piece.offset))
        if sp.circle:
            stages.append(_wrap_plan(sp.length))
        plan = stages[0]
        for s in stages[1:]:
            plan = PlanComp(plan, s)
        plans.append(plan)
    whole = plans[0]
    for p in plans[1:]:
        whole = PlanUnion(whole, p)
    return whole


def build_plan(plan: Plan, in_max: int, out_max: int, _cache=None) -> ZTileSet:
    """Evaluate a plan, trimming non-recurrent tiles after every node so
    intermediate compositions stay small."""
    if _cache is None:
        _cache = {}
    key = (plan, in_max, out_max)
    if key in _cache:
        return _cache[key]
    if isinstance(plan, PlanAff):
        ts = affine_tiles(plan.a, plan.b, in_max, out_max)
    elif isinstance(plan, PlanUnion):
        ts = union_tiles(build_plan(plan.first, in_max, out_max, _cache),
                         build_plan(plan.second, in_max, out_max, _cache))
    elif isinstance(plan, PlanComp):
        ts = compose_tiles(build_plan(plan.first, in_max, out_max, _cache),
                           build_plan(plan.second, in_max, out_max, _cache))
    elif isinstance(plan, PlanProd):
        ts = product_tiles([(name, build_plan(p, in_max, out_max, _cache)) for name, p in plan.parts])
    else:
        raise TypeError(f"not a plan: {plan!r}")
    ts = trim_tiles(ts)
    _cache[key] = ts
    return ts


def pamap_tiles(f: PAMap, fast_path: bool = True) -> ZTileSet:
    m = bit_max(f.space)
    return build_plan(pamap_plan(f, fast_path), m, m)


def family_tiles(pres: PAGroupPresentation, fast_path: bool = True) -> GroupTileSet:
    """Tiles over Z x G for a presentation: the synchronized product of the
    generators' tile sets, read with psi_h = input bit and phi_h = h's output."""
    m = bit_max(pres.space)
    plan = PlanProd(tuple((name, pamap_plan(mp, fast_path)) for name, mp in pres.generators))
    prod = build_plan(plan, m, m)
    return GroupTileSet(tuple(name for name, _ in pres.generators), prod.in_max,
                        prod.out_maxes, prod.tiles, prod.source)


# ---------------------------------------------------------------------------
# JSON forms (bit-exact round trip)


def tile_to_obj(t: ZTile) -> dict:
    return {
        "top": t.top,
        "bottom": {n: v for n, v in t.bottoms},
        "left": label_to_obj(t.left),
        "right": label_to_obj(t.right),
    }


def tile_from_obj(obj: dict) -> ZTile:
    return ZTile(int(obj["top"]), _mk_bottoms({n: int(v) for n, v in obj["bottom"].items()}),
                 label_from_obj(obj["left"]), label_from_obj(obj["right"]))


def tileset_to_obj(ts: ZTileSet) -> dict:
    return {
        "in_max": ts.in_max,
        "outs": {n: v for n, v in ts.out_maxes},
        "tiles": [tile_to_obj(t) for t in ts.tiles],
    }


def tileset_from_obj(obj: dict) -> ZTileSet:
    return ZTileSet(int(obj["in_max"]), _mk_bottoms({n: int(v) for n, v in obj["outs"].items()}),
                    tuple(tile_from_obj(t) for t in obj["tiles"]))


def grouptileset_to_obj(g: GroupTileSet) -> dict:
    return {
        "generators": list(g.generators),
        "in_max": g.in_max,
        "outs": {n: v for n, v in g.out_maxes},
        "tiles": [
            {
                "left": label_to_obj(t.left),
                "right": label_to_obj(t.right),
                "psi": {h: t.top for h in g.generators},
                "phi": {h: t.bottom(h) for h in g.generators},
            }
            for t in g.tiles
        ],
    }


def grouptileset_from_obj(obj: dict) -> GroupTileSet:
    gens = tuple(obj["generators"])
    tiles = []
    for t in obj["tiles"]:
        tops = set(t["psi"].values())
        if len(tops) != 1:
            raise ValueError("psi colors must agree across generators")
        tiles.append(ZTile(int(tops.pop()), _mk_bottoms({n: int(v) for n, v in t["phi"].items()}),
                           label_from_obj(t["left"]), label_from_obj(t["right"])))
    return GroupTileSet(gens, int(obj["in_max"]), _mk_bottoms({n: int(v) for n, v in obj["outs"].items()}),
                        tuple(tiles))

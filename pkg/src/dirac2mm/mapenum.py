"""Brute-force enumeration of 2-colored unstable map gluings.

A moment's expansion coefficient at order t4^k is a sum over gluings of the
rooted word polygon with k additional 2-cells drawn from the seven kinds the
quartic potential produces (four quadrangles and three cylinders), glued by
a colour-respecting perfect matching of half-edges.  Cell weights are read
off the potential itself: each cell of a trace term with coefficient c in
the action contributes a factor -c (so the chequered quadrangle, which
enters the action negatively, is the one positive-weight cell), identical
cells carry the usual 1/n! of the exponential expansion, and every glued
edge carries the propagator weight 1/(8 t2).

Half-edges are fully labelled, exactly as in the underlying Wick expansion,
so no automorphism factors ever appear: two matchings are the same map only
if they are the same matching.  Genus bookkeeping follows the unstable-map
decomposition: split each cylinder into two discs joined by a branch, then
a gluing contributes at leading order iff every graph component is planar
and the branch graph is a tree rooted at the word polygon's component.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .algebra import rat
from .words import Word

RED = "R"     # colour of A half-edges
BLUE = "B"    # colour of B half-edges


class CellKind(enum.Enum):
    RED_QUAD = "red-quadrangle"
    BLUE_QUAD = "blue-quadrangle"
    ADJACENT_QUAD = "adjacent-quadrangle"
    CHEQUERED_QUAD = "chequered-quadrangle"
    RED_CYLINDER = "red-cylinder"
    BLUE_CYLINDER = "blue-cylinder"
    OPPOSITE_CYLINDER = "opposite-cylinder"


@dataclass(frozen=True)
class TwoCell:
    """A glueable 2-cell: one or two cyclic boundaries of coloured half-edges."""

    kind: CellKind
    boundaries: tuple
    factor: Fraction   # coefficient of t4 contributed by one such cell

    @property
    def is_cylinder(self) -> bool:
        return len(self.boundaries) == 2


# factor = -(coefficient of the trace term in the quartic potential) / t4
CELLS = {
    CellKind.RED_QUAD: TwoCell(CellKind.RED_QUAD, ((RED, RED, RED, RED),), Fraction(-4)),
    CellKind.BLUE_QUAD: TwoCell(CellKind.BLUE_QUAD, ((BLUE, BLUE, BLUE, BLUE),), Fraction(-4)),
    CellKind.ADJACENT_QUAD: TwoCell(
        CellKind.ADJACENT_QUAD, ((RED, RED, BLUE, BLUE),), Fraction(-16)
    ),
    CellKind.CHEQUERED_QUAD: TwoCell(
        CellKind.CHEQUERED_QUAD, ((RED, BLUE, RED, BLUE),), Fraction(8)
    ),
    CellKind.RED_CYLINDER: TwoCell(
        CellKind.RED_CYLINDER, ((RED, RED), (RED, RED)), Fraction(-12)
    ),
    CellKind.BLUE_CYLINDER: TwoCell(
        CellKind.BLUE_CYLINDER, ((BLUE, BLUE), (BLUE, BLUE)), Fraction(-12)
    ),
    CellKind.OPPOSITE_CYLINDER: TwoCell(
        CellKind.OPPOSITE_CYLINDER, ((RED, RED), (BLUE, BLUE)), Fraction(-8)
    ),
}

_DISTINGUISHED = (CellKind.CHEQUERED_QUAD, CellKind.OPPOSITE_CYLINDER)


@dataclass(frozen=True)
class UnstableMap:
    """One labelled gluing: the rooted word polygon plus ``cells``, matched."""

    word: Word
    cells: tuple                 # CellKind multiset, in slot order
    pairing: tuple               # ((dart, dart), ...) with dart < partner
    genus: int
    planar: bool                 # leading order: components planar, branch tree
    connected: bool              # every cell reachable from the root polygon
    component_tree_ok: bool
    weight: Fraction             # coefficient of t4^k incl. sign and 1/n_i!

    @property
    def order(self) -> int:
        return len(self.cells)

    @property
    def edge_count(self) -> int:
        return len(self.pairing)

    def as_json(self) -> dict:
        return {
            "word": str(self.word),
            "cells": [c.value for c in self.cells],
            "pairing": [list(p) for p in self.pairing],
            "genus": self.genus,
            "planar": self.planar,
            "connected": self.connected,
            "weight": str(self.weight),
        }


class _Layout:
    """Dart numbering for a word polygon plus a sequence of cells."""

    def __init__(self, word: Word, kinds: tuple):
        colors: list[str] = [RED if c == "A" else BLUE for c in word.letters]
        nxt: list[int] = []
        polygon_of: list[int] = []
        n = len(colors)
        if n:
            nxt.extend([(i + 1) % n for i in range(n)])
            polygon_of.extend([0] * n)
        n_poly = 1 if n else 0
        branches: list[tuple[int, int]] = []
        for kind in kinds:
            cell = CELLS[kind]
            polys_here = []
            for boundary in cell.boundaries:
                start = len(colors)
                m = len(boundary)
                colors.extend(boundary)
                nxt.extend([start + (i + 1) % m for i in range(m)])
                polygon_of.extend([n_poly] * m)
                polys_here.append(n_poly)
                n_poly += 1
            if cell.is_cylinder:
                branches.append((polys_here[0], polys_here[1]))
        self.word = word
        self.kinds = kinds
        self.colors = colors
        self.nxt = nxt
        self.polygon_of = polygon_of
        self.n_polygons = n_poly
        self.branches = branches
        self.reds = [i for i, c in enumerate(colors) if c == RED]
        self.blues = [i for i, c in enumerate(colors) if c == BLUE]
        counts: dict[CellKind, int] = {}
        for kind in kinds:
            counts[kind] = counts.get(kind, 0) + 1
        sym = 1
        for c in counts.values():
            sym *= factorial(c)
        factor = Fraction(1, sym)
        for kind in kinds:
            factor *= CELLS[kind].factor
        self.weight = factor

    def feasible(self) -> bool:
        return len(self.reds) % 2 == 0 and len(self.blues) % 2 == 0


def _pairings(items: list[int]):
    """All perfect matchings of ``items`` as tuples of (lo, hi) pairs."""
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        head = (first, other)
        for tail in _pairings(rest[:i] + rest[i + 1 :]):
            yield (head,) + tail


def _analyze(layout: _Layout, partner: list[int]):
    """(genus, planar, connected, tree_ok) of one complete matching."""
    n_darts = len(layout.colors)
    nxt = layout.nxt
    polygon_of = layout.polygon_of
    n_poly = layout.n_polygons

    # graph components of polygons linked by glued edges
    parent = list(range(n_poly))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in range(n_darts):
        a, b = find(polygon_of[h]), find(polygon_of[partner[h]])
        if a != b:
            parent[a] = b

    comp_of = [find(p) for p in range(n_poly)]
    faces: dict[int, int] = {}
    edges: dict[int, int] = {}
    verts: dict[int, int] = {}
    for p in range(n_poly):
        faces[comp_of[p]] = faces.get(comp_of[p], 0) + 1
    for h in range(n_darts):
        if h < partner[h]:
            c = comp_of[polygon_of[h]]
            edges[c] = edges.get(c, 0) + 1

    visited = bytearray(n_darts)
    for h0 in range(n_darts):
        if visited[h0]:
            continue
        c = comp_of[polygon_of[h0]]
        verts[c] = verts.get(c, 0) + 1
        h = h0
        while not visited[h]:
            visited[h] = 1
            h = nxt[partner[h]]

    genus_sum = 0
    all_planar_components = True
    for c in faces:
        chi = verts.get(c, 0) - edges.get(c, 0) + faces[c]
        if chi % 2 != 0:
            raise AssertionError("odd Euler characteristic: gluing bookkeeping broken")
        genus_sum += (2 - chi) // 2
        if chi != 2:
            all_planar_components = False

    # branch graph: nodes are components, edges are cylinder branches
    comps = sorted(faces)
    bparent = {c: c for c in comps}

    def bfind(x):
        while bparent[x] != x:
            bparent[x] = bparent[bparent[x]]
            x = bparent[x]
        return x

    for pa, pb in layout.branches:
        a, b = bfind(comp_of[pa]), bfind(comp_of[pb])
        if a != b:
            bparent[a] = b
    pieces = len({bfind(c) for c in comps})
    cycle_rank = len(layout.branches) - len(comps) + pieces
    connected = pieces == 1
    tree_ok = connected and cycle_rank == 0
    genus = genus_sum + cycle_rank
    planar = tree_ok and all_planar_components
    return genus, planar, connected, tree_ok


def _iter_kind_multisets(k: int):
    yield from itertools.combinations_with_replacement(list(CellKind), k)


def _iter_matchings(layout: _Layout):
    for red_part in _pairings(layout.reds):
        for blue_part in _pairings(layout.blues):
            partner = [0] * len(layout.colors)
            for a, b in red_part:
                partner[a], partner[b] = b, a
            for a, b in blue_part:
                partner[a], partner[b] = b, a
            yield partner, red_part + blue_part


def enumerate_gluings(w: Word | str, k: int):
    """Every colour-respecting gluing of the rooted w-polygon with k cells.

    Yields all matchings, planar or not, connected or not, each labelled;
    callers filter on the flags.  Cells are instance-labelled, so multisets
    with repeated kinds appear once per distinct matching of the labelled
    half-edges, with the 1/n! absorbed into the weight.
    """
    w = Word(w)
    if k < 0:
        raise ValueError("k must be >= 0")
    for kinds in _iter_kind_multisets(k):
        layout = _Layout(w, kinds)
        if not layout.feasible():
            continue
        for partner, pairing in _iter_matchings(layout):
            genus, planar, connected, tree_ok = _analyze(layout, partner)
            yield UnstableMap(
                word=w,
                cells=kinds,
                pairing=tuple(sorted(pairing)),
                genus=genus,
                planar=planar,
                connected=connected,
                component_tree_ok=tree_ok,
                weight=layout.weight,
            )


def moment_coefficient(w: Word | str, k: int, t2) -> Fraction:
    """Coefficient of t4^k in the genus-0 moment of w, by exhaustive gluing.

    Planar connected gluings only; each contributes its signed cell weight
    times the propagator factor (8 t2)^(-edges).
    """
    w = Word(w)
    t2 = rat(t2)
    total = Fraction(0)
    edge_factor_cache: dict[int, Fraction] = {}
    for kinds in _iter_kind_multisets(k):
        layout = _Layout(w, kinds)
        if not layout.feasible():
            continue
        n_edges = len(layout.colors) // 2
        if n_edges not in edge_factor_cache:
            edge_factor_cache[n_edges] = Fraction(1) / (8 * t2) ** n_edges
        planar_count = 0
        for partner, _pairs in _iter_matchings(layout):
            _genus, planar, _connected, _tree = _analyze(layout, partner)
            if planar:
                planar_count += 1
        total += layout.weight * planar_count * edge_factor_cache[n_edges]
    return total


def moment_series_by_maps(w: Word | str, max_order: int, t2) -> list[Fraction]:
    """Coefficients [t4^0 ... t4^max_order] of the moment of w by gluings."""
    return [moment_coefficient(w, k, t2) for k in range(max_order + 1)]


def _multiset_contribution(args) -> Fraction:
    letters, kinds, t2_str = args
    layout = _Layout(Word(letters), kinds)
    t2 = Fraction(t2_str)
    n_edges = len(layout.colors) // 2
    planar_count = 0
    for partner, _pairs in _iter_matchings(layout):
        _g, planar, _c, _t = _analyze(layout, partner)
        if planar:
            planar_count += 1
    return layout.weight * planar_count / (8 * t2) ** n_edges


def moment_coefficient_parallel(w: Word | str, k: int, t2, workers: int = 1) -> Fraction:
    """moment_coefficient with cell multisets fanned out to worker processes."""
    w = Word(w)
    t2 = rat(t2)
    jobs = [
        (w.letters, kinds, str(t2))
        for kinds in _iter_kind_multisets(k)
        if _Layout(w, kinds).feasible()
    ]
    if workers <= 1 or len(jobs) <= 1:
        return sum((_multiset_contribution(j) for j in jobs), Fraction(0))
    import concurrent.futures

    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_multiset_contribution, jobs), Fraction(0))


@dataclass(frozen=True)
class CancellationReport:
    """Signed census of the planar gluings of the alternating 4-letter word."""

    k: int
    positive_weight_count: int
    negative_weight_count: int
    signed_sum: Fraction        # sum of cell weights over planar gluings
    all_have_distinguished_cell: bool           # every planar gluing holds a chequered quad
                                # or an opposite cylinder
    paired: bool                # cancellation: signed_sum == 0
    witnesses: tuple = ()       # planar maps left uncancelled, JSON-ready


def cancellation_report(k: int, witness_limit: int = 8) -> CancellationReport:
    """Census of planar ABAB gluings at order k.

    Checks two separable claims: that every planar gluing contains at least
    one chequered quadrangle or opposite cylinder, and that the signed cell
    weights sum to zero.  The first holds; the second does not (the positive
    chequered-quadrangle gluings outnumber their would-be cylinder partners,
    whose branch closes a handle and leaves planarity), so the report keeps
    explicit witnesses.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    pos = neg = 0
    signed = Fraction(0)
    distinguished_ok = True
    witnesses = []
    for m in enumerate_gluings(Word("ABAB"), k):
        if not m.planar:
            continue
        if m.weight > 0:
            pos += 1
        elif m.weight < 0:
            neg += 1
        signed += m.weight
        if not any(c in _DISTINGUISHED for c in m.cells):
            distinguished_ok = False
        if len(witnesses) < witness_limit:
            witnesses.append(m.as_json())
    return CancellationReport(
        k=k,
        positive_weight_count=pos,
        negative_weight_count=neg,
        signed_sum=signed,
        all_have_distinguished_cell=distinguished_ok,
        paired=(signed == 0),
        witnesses=tuple(witnesses),
    )


def branch_graph_dot(m: UnstableMap) -> str:
    """DOT rendering of the component/branch structure of one gluing."""
    layout = _Layout(m.word, m.cells)
    partner = [0] * len(layout.colors)
    for a, b in m.pairing:
        partner[a], partner[b] = b, a
    parent = list(range(layout.n_polygons))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for h in range(len(layout.colors)):
        a, b = find(layout.polygon_of[h]), find(layout.polygon_of[partner[h]])
        if a != b:
            parent[a] = b
    comps = sorted({find(p) for p in range(layout.n_polygons)})
    lines = ["graph branches {"]
    for c in comps:
        root_mark = " (root)" if find(0) == c else ""
        lines.append(f'  c{c} [label="component {c}{root_mark}"];')
    for pa, pb in layout.branches:
        lines.append(f"  c{find(pa)} -- c{find(pb)};")
    lines.append("}")
    return "\n".join(lines)


def dump_maps_json(maps) -> str:
    return json.dumps([m.as_json() for m in maps], indent=2)

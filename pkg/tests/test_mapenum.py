import itertools
from fractions import Fraction as F

import pytest

from dirac2mm.mapenum import (
    CELLS,
    CellKind,
    branch_graph_dot,
    cancellation_report,
    dump_maps_json,
    enumerate_gluings,
    moment_coefficient,
    moment_coefficient_parallel,
)
from dirac2mm.solver import gaussian_moment, solve_series
from dirac2mm.words import Word, canonicalize


class TestCells:
    def test_half_edge_counts(self):
        for cell in CELLS.values():
            assert sum(len(b) for b in cell.boundaries) == 4

    def test_boundary_colour_patterns(self):
        assert CELLS[CellKind.ADJACENT_QUAD].boundaries == (("R", "R", "B", "B"),)
        assert CELLS[CellKind.CHEQUERED_QUAD].boundaries == (("R", "B", "R", "B"),)
        assert CELLS[CellKind.OPPOSITE_CYLINDER].boundaries == (("R", "R"), ("B", "B"))

    def test_only_chequered_weight_is_positive(self):
        signs = {kind: cell.factor > 0 for kind, cell in CELLS.items()}
        assert signs.pop(CellKind.CHEQUERED_QUAD) is True
        assert not any(signs.values())


class TestEnumerateGluings:
    def test_bare_two_gon(self):
        maps = list(enumerate_gluings("AA", 0))
        assert len(maps) == 1
        (m,) = maps
        assert m.planar and m.connected and m.genus == 0
        assert m.pairing == ((0, 1),)

    def test_bare_alternating_square_is_a_torus(self):
        maps = list(enumerate_gluings("ABAB", 0))
        assert len(maps) == 1
        assert maps[0].genus == 1 and not maps[0].planar

    def test_pure_square_gluings(self):
        maps = list(enumerate_gluings("AAAA", 0))
        assert len(maps) == 3
        assert sorted(m.genus for m in maps) == [0, 0, 1]

    def test_colour_conservation(self):
        for m in enumerate_gluings("AABB", 1):
            layout_colors = ["R", "R", "B", "B"]
            for kind in m.cells:
                for boundary in CELLS[kind].boundaries:
                    layout_colors.extend(boundary)
            for a, b in m.pairing:
                assert layout_colors[a] == layout_colors[b]

    def test_alternating_square_order_one_census(self):
        planar = [m for m in enumerate_gluings("ABAB", 1) if m.planar]
        assert len(planar) == 2
        assert {m.cells for m in planar} == {(CellKind.CHEQUERED_QUAD,)}
        assert all(m.weight == 8 for m in planar)

    def test_genus_independent_of_cell_ordering(self):
        # the same multiset listed in any order yields the same census
        def census(kinds):
            out = {}
            for m in enumerate_gluings("AABB", 2):
                if sorted(c.value for c in m.cells) == sorted(k.value for k in kinds):
                    key = (m.genus, m.planar)
                    out[key] = out.get(key, 0) + 1
            return out

        kinds = (CellKind.RED_QUAD, CellKind.OPPOSITE_CYLINDER)
        assert census(kinds) == census(tuple(reversed(kinds)))

    def test_disconnected_gluings_are_flagged(self):
        flags = [(m.connected, m.planar) for m in enumerate_gluings("AA", 1)]
        assert (False, False) in flags  # cell glued to itself, detached from the root


class TestMomentCoefficient:
    def test_leading_orders_of_second_moment(self):
        assert moment_coefficient("AA", 0, 1) == F(1, 8)
        assert moment_coefficient("AA", 1, 1) == F(-1, 4)

    def test_alternating_moment_census(self):
        assert moment_coefficient("ABAB", 0, 1) == 0
        assert moment_coefficient("ABAB", 1, 1) == F(1, 256)
        assert moment_coefficient("ABAB", 2, 1) == F(-9, 256)

    def test_order_zero_is_gaussian(self):
        for letters in ("AA", "AAAA", "AABB", "ABAB", "AABAAB", "AAAABB"):
            assert moment_coefficient(letters, 0, 1) == gaussian_moment(letters, 1)
            assert moment_coefficient(letters, 0, F(1, 3)) == gaussian_moment(letters, F(1, 3))

    def test_agreement_with_recursion_to_degree_four(self):
        table = solve_series(D=4, K=2, t2=1)
        for letters in ("AA", "AAAA", "AABB", "ABAB"):
            c = canonicalize(letters)
            for k in range(3):
                assert moment_coefficient(letters, k, 1) == table.series(c).coefficient(k)

    def test_t2_dependence(self):
        table = solve_series(D=2, K=1, t2=F(5, 2))
        assert moment_coefficient("AA", 1, F(5, 2)) == table.series("AA").coefficient(1)

    def test_parallel_matches_sequential(self):
        assert moment_coefficient_parallel("AABB", 1, 1, workers=2) == moment_coefficient("AABB", 1, 1)


class TestCancellation:
    def test_vacuous_at_order_zero(self):
        r = cancellation_report(0)
        assert (r.positive_weight_count, r.negative_weight_count) == (0, 0)
        assert r.paired and r.all_have_distinguished_cell

    def test_order_one_census(self):
        r = cancellation_report(1)
        assert (r.positive_weight_count, r.negative_weight_count) == (2, 0)
        assert r.signed_sum == 16
        assert r.all_have_distinguished_cell and not r.paired
        assert len(r.witnesses) == 2

    def test_order_two_census(self):
        r = cancellation_report(2)
        assert (r.positive_weight_count, r.negative_weight_count) == (0, 136)
        assert r.signed_sum == -9216
        assert r.all_have_distinguished_cell and not r.paired

    def test_census_matches_moment_coefficient(self):
        # sum of signed cell weights / (8 t2)^edges must equal the coefficient
        for k in (1, 2):
            r = cancellation_report(k)
            edges = (4 + 4 * k) // 2
            assert r.signed_sum / F(8) ** edges == moment_coefficient("ABAB", k, 1)


class TestExports:
    def test_dot_and_json(self):
        maps = [m for m in enumerate_gluings("AA", 1) if m.planar]
        assert maps, "expected planar gluings of the two-gon with one cell"
        dot = branch_graph_dot(maps[0])
        assert dot.startswith("graph branches {") and dot.endswith("}")
        payload = dump_maps_json(maps[:2])
        assert '"word": "AA"' in payload

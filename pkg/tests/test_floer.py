"""Exact-triangle rank arithmetic and interval propagation.

The solver is cross-checked against brute-force enumeration of non-negative
rank triples, the propagation engine against hand-computed fixpoints.
"""

from __future__ import annotations

import random

import pytest

from tightcert.errors import CalculusError, NoExactTriangleError
from tightcert.floer import (
    Contradiction,
    Interval,
    Propagation,
    RankDb,
    TriangleInstance,
    base_facts,
    propagate,
    rank_bounds,
    tower_triangles,
    triangle_solve,
    unknot_triangle,
)
from tightcert.topology import Manifold


def brute_force_ranks(a, b, c):
    """All (x, y, z) >= 0 with x+z = a, x+y = b, y+z = c."""
    hits = []
    for x in range(min(a, b) + 1):
        z = a - x
        y = b - x
        if y >= 0 and z >= 0 and y + z == c:
            hits.append((x, y, z))
    return hits


# ---------------------------------------------------------------------------
# Triangle solving
# ---------------------------------------------------------------------------


def test_solve_frozen_examples():
    sol = triangle_solve(1, 2, 1)
    assert (sol.rank_f, sol.rank_g, sol.rank_h) == (1, 1, 0)
    assert sol.f_injective and not sol.f_surjective

    sol = triangle_solve(3, 4, 1)
    assert (sol.rank_f, sol.rank_g, sol.rank_h) == (3, 1, 0)
    assert sol.f_injective

    sol = triangle_solve(3, 1, 2)
    assert (sol.rank_f, sol.rank_g, sol.rank_h) == (1, 0, 2)
    assert sol.f_surjective and sol.h_injective and not sol.f_injective

    sol = triangle_solve(0, 5, 5)
    assert sol.g_injective and sol.h_surjective


def test_solve_injectivity_ladder():
    for k in range(1, 101):
        assert triangle_solve(k, k + 1, 1).f_injective


def test_solve_matches_brute_force():
    for a in range(7):
        for b in range(7):
            for c in range(7):
                hits = brute_force_ranks(a, b, c)
                if not hits:
                    with pytest.raises(NoExactTriangleError):
                        triangle_solve(a, b, c)
                else:
                    assert len(hits) == 1
                    sol = triangle_solve(a, b, c)
                    assert (sol.rank_f, sol.rank_g, sol.rank_h) == hits[0]


def test_solve_error_messages_distinguish_cases():
    with pytest.raises(NoExactTriangleError, match="odd total"):
        triangle_solve(1, 1, 1)
    with pytest.raises(NoExactTriangleError, match="triangle inequality"):
        triangle_solve(1, 1, 4)
    with pytest.raises(CalculusError):
        triangle_solve(-1, 1, 0)
    with pytest.raises(CalculusError):
        triangle_solve(1, 1, "2")


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


def test_interval_basics():
    assert Interval.exact(3).is_exact
    assert not Interval.unknown().is_exact
    assert str(Interval.exact(3)) == "3"
    assert str(Interval(1, 5)) == "[1, 5]"
    assert str(Interval.unknown()) == "[0, inf]"
    with pytest.raises(CalculusError):
        Interval(3, 1)
    with pytest.raises(CalculusError):
        Interval(-1, 2)


def test_rank_bounds():
    assert rank_bounds(3, 5) == Interval(2, 8)
    assert rank_bounds(0, 4) == Interval.exact(4)
    assert rank_bounds(2, 2) == Interval(0, 4)
    with pytest.raises(CalculusError):
        rank_bounds(-1, 2)


# ---------------------------------------------------------------------------
# Rank database
# ---------------------------------------------------------------------------


def test_base_facts_contents():
    db = base_facts()
    assert db.exact_value(Manifold.s3()) == 1
    assert db.exact_value(Manifold.s1xs2()) == 2
    assert db.exact_value(Manifold.poincare()) == 1
    assert db.exact_value(Manifold.neg_tower(1)) == 1
    assert len(db) == 4


def test_lens_ranks_resolve_lazily():
    db = RankDb()
    assert Manifold.lens(9, 2) not in db
    assert db.fact(Manifold.lens(9, 2)) == Interval.exact(9)
    assert Manifold.lens(9, 2) in db
    assert db.exact_value(Manifold.lens(9, 2)) == 9


def test_unknown_manifolds_start_unbounded():
    db = RankDb()
    assert db.fact(Manifold.neg_tower(7)) == Interval.unknown()
    with pytest.raises(CalculusError):
        db.exact_value(Manifold.neg_tower(7))


def test_copy_isolates():
    db = base_facts()
    other = db.copy()
    other.set_fact(Manifold.s3(), Interval.exact(9))
    assert db.exact_value(Manifold.s3()) == 1


# ---------------------------------------------------------------------------
# Triangle families
# ---------------------------------------------------------------------------


def test_unknot_triangle_shape():
    tri = unknot_triangle()
    assert (tri.a, tri.b, tri.c) == (Manifold.s3(), Manifold.s1xs2(), Manifold.s3())
    assert not tri.informational


def test_tower_triangles_contents():
    tris = tower_triangles(4)
    assert len(tris) == 8
    consecutive = tris[:4]
    for k, tri in enumerate(consecutive, start=1):
        assert tri.a == Manifold.neg_tower(k)
        assert tri.b == Manifold.neg_tower(k + 1)
        assert tri.c == Manifold.poincare()
        assert not tri.informational
    lens = tris[4:]
    assert lens[0].informational  # stage 1 sits outside the family range
    for k, tri in enumerate(lens, start=1):
        assert tri.a == Manifold.lens(abs(7 * k - 9), 7)
        assert tri.b == Manifold.lens(abs(8 * k - 9), 8)
        assert tri.c == Manifold.neg_tower(k)
    assert lens[1].a == Manifold.lens(5, 2)
    assert lens[1].b == Manifold.lens(7, 1)
    with pytest.raises(CalculusError):
        tower_triangles(0)


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------


def test_propagate_pins_tower_ranks():
    run = propagate(base_facts(), [unknot_triangle()] + tower_triangles(12))
    assert run.consistent
    for k in range(1, 13):
        assert run.db.exact_value(Manifold.neg_tower(k)) == k
    # The stage past the last lens instance is only bracketed.
    top = run.db.fact(Manifold.neg_tower(13))
    assert top == Interval(11, 13)
    assert run.rounds <= 5


def test_propagate_leaves_input_untouched():
    db = base_facts()
    propagate(db, tower_triangles(6))
    assert Manifold.neg_tower(5) not in db
    assert db.exact_value(Manifold.s3()) == 1


def test_propagate_order_independent_fixpoint():
    rng = random.Random(5101)
    tris = [unknot_triangle()] + tower_triangles(9)
    reference = propagate(base_facts(), tris)
    targets = [Manifold.neg_tower(k) for k in range(1, 11)]
    for _ in range(5):
        shuffled = tris[:]
        rng.shuffle(shuffled)
        run = propagate(base_facts(), shuffled)
        assert run.consistent
        for m in targets:
            assert run.db.fact(m) == reference.db.fact(m)


def test_propagate_uses_consistent_extra_facts():
    db = base_facts()
    db.set_fact(Manifold.neg_tower(3), Interval.exact(3))
    run = propagate(db, tower_triangles(8))
    assert run.consistent
    assert run.db.exact_value(Manifold.neg_tower(8)) == 8


def test_propagate_detects_planted_contradiction():
    db = base_facts()
    db.set_fact(Manifold.neg_tower(3), Interval.exact(4))
    run = propagate(db, tower_triangles(8))
    assert not run.consistent
    assert isinstance(run.contradiction, Contradiction)
    assert run.contradiction.manifold.kind in ("-tower", "lens", "poincare")
    assert "cannot meet" in run.contradiction.detail


def test_propagate_parity_contradiction():
    bad = TriangleInstance(Manifold.s3(), Manifold.s3(), Manifold.s3())
    run = propagate(base_facts(), [bad])
    assert not run.consistent
    assert run.contradiction.manifold == Manifold.s3()


def test_propagate_skips_informational_instances():
    # The stage-1 lens instance would relate lens(2,1), the sphere and the
    # stage-1 tower; marked informational it must contribute nothing.
    tris = [t for t in tower_triangles(3) if t.informational]
    assert len(tris) == 1
    db = base_facts()
    run = propagate(db, tris)
    assert run.consistent
    assert run.rounds == 1
    assert len(run.db) == len(base_facts())


def test_propagation_result_shape():
    run = propagate(base_facts(), [unknot_triangle()])
    assert isinstance(run, Propagation)
    assert run.consistent and run.contradiction is None
    assert run.db.exact_value(Manifold.s3()) == 1

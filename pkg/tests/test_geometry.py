import itertools

import pytest

from gptlab.config import Budgets, BudgetExceededError
from gptlab.geometry import face_lattice, is_face, join
from gptlab.linalg import dot
from oracles import grid_supported_subsets

SEGMENT = [(1, 0), (0, 1)]
TRIANGLE = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
SQUARE = [(-1, -1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, 1)]


def test_single_vertices_are_faces():
    for gens in (SEGMENT, TRIANGLE, SQUARE):
        for i in range(len(gens)):
            ok, h = is_face(gens, {i})
            assert ok
            values = [dot(h, g) for g in gens]
            assert values.index(max(values)) == i


def test_square_edge_versus_diagonal():
    ok, _ = is_face(SQUARE, {0, 1})  # shared x = -1: an edge
    assert ok
    ok, _ = is_face(SQUARE, {0, 3})  # opposite corners
    assert not ok


@pytest.mark.parametrize("gens,expected", [(SEGMENT, 4), (TRIANGLE, 8), (SQUARE, 10)])
def test_face_counts(gens, expected):
    assert len(face_lattice(gens)) == expected


def test_face_lattice_matches_grid_oracle():
    for gens in (SEGMENT, TRIANGLE, SQUARE):
        lattice = face_lattice(gens)
        got = {f.indices for f in lattice.faces} - {()}
        assert got == grid_supported_subsets(gens)


def test_face_lattice_cross_check_exhaustive():
    # Every returned subset passes is_face; nothing outside the lattice does.
    for gens in (TRIANGLE, SQUARE):
        lattice = face_lattice(gens)
        inside = {f.indices for f in lattice.faces}
        for size in range(len(gens) + 1):
            for combo in itertools.combinations(range(len(gens)), size):
                ok, _ = is_face(gens, combo)
                assert ok == (tuple(combo) in inside)


def test_face_certificates_support_exactly():
    lattice = face_lattice(SQUARE)
    for f in lattice.faces:
        if not f.indices or len(f.indices) == len(SQUARE):
            continue
        values = [dot(f.covector, g) for g in SQUARE]
        top = max(values)
        assert {i for i, v in enumerate(values) if v == top} == set(f.indices)


def test_join_identities_and_examples():
    lattice = face_lattice(SQUARE)
    bottom = lattice.bottom
    v0 = lattice.face_for((0,))
    v1 = lattice.face_for((1,))
    v3 = lattice.face_for((3,))
    assert join(lattice, v0, bottom) == v0
    assert join(lattice, v0, v1).indices == (0, 1)      # adjacent: the edge
    assert join(lattice, v0, v3).indices == (0, 1, 2, 3)  # opposite: everything


def test_join_axioms_exhaustive():
    for gens in (TRIANGLE, SQUARE):
        lattice = face_lattice(gens)
        faces = lattice.faces
        for f1, f2 in itertools.product(faces, repeat=2):
            j = join(lattice, f1, f2)
            assert join(lattice, f2, f1) == j          # commutative
            assert join(lattice, f1, f1) == f1         # idempotent
            assert f1 <= j and f2 <= j                 # upper bound
        for f1, f2, f3 in itertools.combinations(faces, 3):
            left = join(lattice, join(lattice, f1, f2), f3)
            right = join(lattice, f1, join(lattice, f2, f3))
            assert left == right                       # associative


def test_join_monotone_under_inclusion():
    lattice = face_lattice(SQUARE)
    for f1, f2, g in itertools.product(lattice.faces, repeat=3):
        if f1 <= f2:
            assert join(lattice, f1, g) <= join(lattice, f2, g)


def test_lattice_bounds():
    lattice = face_lattice(TRIANGLE)
    assert lattice.bottom.indices == ()
    assert lattice.top.indices == (0, 1, 2)


def test_face_enumeration_budget_guard():
    with pytest.raises(BudgetExceededError):
        face_lattice(SQUARE, budgets=Budgets(face_subsets=8))


def test_face_ordering_deterministic():
    lattice = face_lattice(SQUARE)
    keys = [f.sort_key() for f in lattice.faces]
    assert keys == sorted(keys)


def test_empty_subset_is_face_by_convention():
    ok, cert = is_face(SQUARE, set())
    assert ok and cert is None


def test_cube3_face_count():
    from gptlab.statespace import cube
    lattice = face_lattice(cube(3).vertices)
    # empty + 8 vertices + 12 edges + 6 facets + full
    assert lattice.counts_by_cardinality() == {0: 1, 1: 8, 2: 12, 4: 6, 8: 1}
    assert len(lattice) == 28


def test_cube3_exhaustive_is_face_cross_check():
    # nothing outside the enumerated lattice passes is_face (8 vertices)
    from gptlab.statespace import cube

    gens = cube(3).vertices
    lattice = face_lattice(gens)
    inside = {f.indices for f in lattice.faces}
    for size in range(len(gens) + 1):
        for combo in itertools.combinations(range(len(gens)), size):
            ok, _ = is_face(gens, combo)
            assert ok == (tuple(combo) in inside)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinrcast.geometry import BoxCoord, adjacent, box_of, boxes_of, dilution_class, dist_m, granularity

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
sides = st.floats(1e-3, 10.0, allow_nan=False)


@pytest.mark.parametrize(
    "p, c, expected",
    [((0, 0), 1, (0, 0)), ((-0.5, 2.0), 1, (-1, 2)), ((0.75, 0.25), 0.5, (1, 0))],
)
def test_box_of_examples(p, c, expected):
    assert box_of(p, c).key == expected


@pytest.mark.parametrize("bad", [(math.nan, 0), (0, math.inf)])
def test_box_of_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        box_of(bad, 1.0)


@pytest.mark.parametrize("c", [0, -1.0, math.inf])
def test_box_of_rejects_bad_side(c):
    with pytest.raises(ValueError):
        box_of((0, 0), c)


@given(finite, finite, sides)
def test_box_contains_its_point(x, y, c):
    b = box_of((x, y), c)
    assert b.i * c <= x < (b.i + 1) * c
    assert b.j * c <= y < (b.j + 1) * c


@given(st.lists(st.tuples(finite, finite), min_size=1, max_size=30), sides)
def test_vectorised_boxes_agree(points, c):
    arr = boxes_of(np.array(points), c)
    assert [tuple(r) for r in arr.tolist()] == [box_of(p, c).key for p in points]


def test_box_boundaries_are_half_open():
    c = 0.1
    # 0.3 / 0.1 rounds to 2.9999999999999996 in floating point
    assert box_of((0.3, 0.0), c).i * c <= 0.3
    assert box_of((3 * c, 0.0), c).i == 3


@given(st.lists(st.tuples(finite, finite), min_size=2, max_size=20, unique=True), sides)
def test_points_sharing_a_box_are_close(points, c):
    boxes = [box_of(p, c).key for p in points]
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if boxes[a] == boxes[b]:
                assert math.dist(points[a], points[b]) < c * math.sqrt(2) * (1 + 1e-12)


def test_same_box_means_communication_edge():
    eps = 0.2
    z = (1 - eps) / math.sqrt(2)
    rng = np.random.default_rng(3)
    pts = rng.uniform(-5, 5, size=(4000, 2))
    boxes = boxes_of(pts, z)
    order = np.lexsort(boxes.T)
    for a, b in zip(order[:-1], order[1:]):
        if (boxes[a] == boxes[b]).all():
            assert np.linalg.norm(pts[a] - pts[b]) <= 1 - eps


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (1, 1), True), ((0, 0), (0, 0), True), ((0, 0), (2, 0), False)],
)
def test_adjacent_examples(a, b, expected):
    assert adjacent(BoxCoord(*a, 1.0), BoxCoord(*b, 1.0)) is expected


def test_mixed_grids_are_rejected():
    with pytest.raises(ValueError):
        adjacent(BoxCoord(0, 0, 1.0), BoxCoord(0, 0, 0.5))
    with pytest.raises(ValueError):
        dist_m(BoxCoord(0, 0, 1.0), BoxCoord(0, 0, 0.5))


@pytest.mark.parametrize("a, b, expected", [((0, 0), (1, 0), 0), ((0, 0), (3, 4), 3), ((5, 5), (5, 5), 0)])
def test_dist_m_examples(a, b, expected):
    assert dist_m(BoxCoord(*a, 1.0), BoxCoord(*b, 1.0)) == expected


def test_dist_m_triangle_bound_exhaustive():
    boxes = [BoxCoord(i, j, 1.0) for i in range(20) for j in range(20)]
    D = np.array([[dist_m(a, b) for b in boxes] for a in boxes])
    # for every C, C' with dist_m(C, C') < 3: dist_m(C', C'') >= dist_m(C, C'') - 3
    for c in range(len(boxes)):
        near = np.flatnonzero(D[c] < 3)
        assert (D[near] >= D[c][None, :] - 3).all()


@settings(max_examples=200)
@given(
    st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30), st.integers(-30, 30),
    st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True),
    st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True),
    st.floats(0.01, 2.0),
)
def test_dist_m_is_a_euclidean_lower_bound(i1, j1, i2, j2, u1, v1, u2, v2, c):
    a, b = BoxCoord(i1, j1, c), BoxCoord(i2, j2, c)
    p = ((i1 + u1) * c, (j1 + v1) * c)
    q = ((i2 + u2) * c, (j2 + v2) * c)
    assert math.dist(p, q) >= dist_m(a, b) * c * (1 - 1e-9)


@given(st.integers(-100, 100), st.integers(-100, 100), st.integers(1, 50))
def test_dist_m_symmetric(i, j, k):
    a, b = BoxCoord(0, 0, 1.0), BoxCoord(i, j, 1.0)
    assert dist_m(a, b) == dist_m(b, a)
    assert dilution_class(b, k) == (i % k, j % k)


@pytest.mark.parametrize("b, d, expected", [((7, 3), 4, (3, 3)), ((-1, 0), 3, (2, 0)), ((12, -9), 1, (0, 0))])
def test_dilution_class_examples(b, d, expected):
    assert dilution_class(BoxCoord(*b, 1.0), d) == expected


def test_dilution_class_rejects_zero():
    with pytest.raises(ValueError):
        dilution_class(BoxCoord(0, 0, 1.0), 0)


def test_granularity_examples():
    assert granularity(np.array([[0, 0], [0.25, 0]])) == 4
    assert granularity(np.array([[0, 0], [1, 0], [2, 0]])) == 1
    assert granularity(np.array([[3.0, 4.0]])) == 1.0
    with pytest.raises(ValueError):
        granularity(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_granularity_matches_brute_force():
    pts = np.random.default_rng(11).uniform(0, 10, size=(100, 2))
    best = min(math.dist(pts[a], pts[b]) for a in range(100) for b in range(a + 1, 100))
    assert granularity(pts) == pytest.approx(1 / best, rel=1e-12)

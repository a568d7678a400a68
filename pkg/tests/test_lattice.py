import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from afxy.data.lattice import (
    LatticeIndex, Orientation, TriangleId, TriangleSet,
    locate, neighbors, sublattice, sublattices, to_cartesian, triangles_at,
)

coordinates = st.integers(min_value=-50, max_value=50)
orientations = st.sampled_from([Orientation.UP, Orientation.DOWN])


@st.composite
def triangle_ids(draw):
    return TriangleId(LatticeIndex(draw(coordinates), draw(coordinates)), draw(orientations))


def test_to_cartesian():
    x, y = to_cartesian(LatticeIndex(2, 2), 0.5)
    assert x == pytest.approx(1.5)
    assert y == pytest.approx(math.sqrt(3) / 2)


def test_to_cartesian_rejects_nonpositive_eps():
    with pytest.raises(ValueError):
        to_cartesian(LatticeIndex(0, 0), 0.0)


@pytest.mark.parametrize("site, label", [
    ((0, 0), 1), ((1, 0), 2), ((0, 1), 3), ((-1, 2), 1), ((1, 1), 1), ((2, 0), 3),
])
def test_sublattice(site, label):
    assert sublattice(LatticeIndex(*site)) == label


class TestTriangles:
    """Combinatorics of lattice triangles."""

    @given(triangle_ids())
    def test_one_vertex_per_sublattice(self, T):
        assert sorted(sublattice(v) for v in T.vertices()) == [1, 2, 3]
        assert [sublattice(v) for v in T.vertices_by_sublattice()] == [1, 2, 3]

    @given(triangle_ids())
    def test_vertices_counterclockwise(self, T):
        (ax, ay), (bx, by), (cx, cy) = [to_cartesian(v, 1.0) for v in T.vertices()]
        signed_area = 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax))
        assert signed_area == pytest.approx(math.sqrt(3) / 4)

    @given(triangle_ids())
    def test_neighbors_share_an_edge(self, T):
        found = neighbors(T)
        assert len(set(found)) == 3
        for N in found:
            assert N.orientation != T.orientation
            assert len(set(N.vertices()) & set(T.vertices())) == 2
            assert T in neighbors(N)

    @given(coordinates, coordinates)
    def test_triangles_at_site(self, a, b):
        i = LatticeIndex(a, b)
        found = triangles_at(i)
        assert len(set(found)) == 6
        assert all(i in T.vertices() for T in found)

    def test_repr(self):
        assert repr(TriangleId(LatticeIndex(0, 0), Orientation.UP)) == "Up@(0,0)"


class TestLocate:
    """Point location on the scaled lattice."""

    @given(triangle_ids(), st.sampled_from([1.0, 0.5, 0.1]))
    def test_barycenter_is_located_in_its_triangle(self, T, eps):
        triangles, bary = locate(T.barycenter(eps), eps)
        assert list(triangles) == [T]
        assert np.allclose(bary, 1.0 / 3.0)

    @given(
        st.floats(min_value=-5, max_value=5, allow_nan=False),
        st.floats(min_value=-5, max_value=5, allow_nan=False),
    )
    def test_barycentric_coordinates_reconstruct_the_point(self, x, y):
        eps = 0.25
        triangles, bary = locate((x, y), eps)
        corners = triangles.vertex_points(eps)[0]
        assert np.all(bary >= -1e-9)
        assert bary.sum() == pytest.approx(1.0)
        assert np.allclose(bary[0] @ corners, (x, y), atol=1e-9)


def test_triangle_set_matches_ids():
    ids = [
        TriangleId(LatticeIndex(0, 0), Orientation.UP),
        TriangleId(LatticeIndex(3, -2), Orientation.DOWN),
    ]
    triangles = TriangleSet.from_ids(ids)
    assert list(triangles) == ids
    v1, v2 = triangles.vertices()
    for row, T in enumerate(ids):
        assert [LatticeIndex(a, b) for a, b in zip(v1[row], v2[row])] == list(T.vertices())
    assert np.allclose(triangles.barycenters(1.0)[1], ids[1].barycenter(1.0))


def test_sublattices_vectorised():
    z1 = np.array([0, 1, 0, -1])
    z2 = np.array([0, 0, 1, 2])
    assert sublattices(z1, z2).tolist() == [1, 2, 3, 1]

import math

import pytest
from hypothesis import given, settings, strategies as st

from afxy.data import AtomicMeasure, Disk, Rectangle
from afxy.exceptions import PreconditionError
from afxy.vorticity import flat_norm

SQUARE = Rectangle((0.0, 0.0), (1.0, 1.0))


def brute_force(mu, region):
    """Cheapest way of matching unit charges pairwise or sending them to the boundary."""
    units = []
    for position, charge in mu:
        sign = 1 if charge > 0 else -1
        units += [(position, sign)] * abs(charge)

    def discharge(position):
        return min(1.0, region.distance_to_boundary(position))

    def best(remaining):
        if not remaining:
            return 0.0
        (position, sign), rest = remaining[0], remaining[1:]
        cost = discharge(position) + best(rest)
        for k, (other, other_sign) in enumerate(rest):
            if other_sign != sign:
                cost = min(cost, math.dist(position, other) + best(rest[:k] + rest[k + 1:]))
        return cost

    return best(units)


@st.composite
def measures(draw, max_atoms=4):
    count = draw(st.integers(min_value=1, max_value=max_atoms))
    coords = st.floats(min_value=0.02, max_value=0.98, allow_nan=False)
    atoms = []
    for _ in range(count):
        atoms.append(((draw(coords), draw(coords)), draw(st.sampled_from([-2, -1, 1, 2]))))
    mu = AtomicMeasure(atoms)
    # keep the brute force small
    if mu.mass() > 6:
        mu = AtomicMeasure(atoms[:2])
    return mu


def test_single_atom_near_the_boundary():
    mu = AtomicMeasure([((0.3, 0.5), 1)])
    assert flat_norm(mu, SQUARE) == pytest.approx(0.3)


def test_single_atom_far_from_the_boundary():
    mu = AtomicMeasure([((2.0, 2.0), -1)])
    assert flat_norm(mu, Rectangle((0, 0), (4, 4))) == pytest.approx(1.0)


def test_dipole():
    mu = AtomicMeasure([((0.35, 0.5), 1), ((0.65, 0.5), -1)])
    assert flat_norm(mu, SQUARE) == pytest.approx(0.3)
    assert flat_norm(mu, SQUARE, method="lp") == pytest.approx(0.3, abs=1e-7)


def test_empty_measure():
    assert flat_norm(AtomicMeasure(), SQUARE) == 0.0
    assert flat_norm(AtomicMeasure(), SQUARE, method="lp") == 0.0


def test_atom_on_the_boundary():
    with pytest.raises(PreconditionError):
        flat_norm(AtomicMeasure([((0.0, 0.5), 1)]), SQUARE)
    with pytest.raises(PreconditionError):
        flat_norm(AtomicMeasure([((1.5, 0.5), 1)]), SQUARE)


def test_unknown_method():
    with pytest.raises(ValueError):
        flat_norm(AtomicMeasure([((0.5, 0.5), 1)]), SQUARE, method="simplex")


class TestFlatNorm:
    """The flat norm against independent oracles."""

    @given(measures())
    @settings(max_examples=200, deadline=None)
    def test_assignment_matches_brute_force(self, mu):
        assert flat_norm(mu, SQUARE) == pytest.approx(brute_force(mu, SQUARE), abs=1e-12)

    @given(measures())
    @settings(max_examples=200, deadline=None)
    def test_assignment_matches_lp(self, mu):
        assert flat_norm(mu, SQUARE) == pytest.approx(flat_norm(mu, SQUARE, method="lp"), abs=1e-7)

    @given(measures(max_atoms=3), measures(max_atoms=3))
    @settings(max_examples=200, deadline=None)
    def test_triangle_inequality(self, mu, nu):
        assert flat_norm(mu + nu, SQUARE) <= flat_norm(mu, SQUARE) + flat_norm(nu, SQUARE) + 1e-12

    @given(measures(max_atoms=3), st.integers(min_value=-3, max_value=3))
    @settings(max_examples=200, deadline=None)
    def test_integer_homogeneity(self, mu, k):
        assert flat_norm(k * mu, SQUARE) == pytest.approx(abs(k) * flat_norm(mu, SQUARE), abs=1e-12)

    @given(measures(max_atoms=3))
    @settings(max_examples=200, deadline=None)
    def test_matching_is_an_upper_bound(self, mu):
        # any explicit discharge plan costs at least the flat norm
        plan = sum(abs(q) * min(1.0, SQUARE.distance_to_boundary(p)) for p, q in mu)
        assert flat_norm(mu, SQUARE) <= plan + 1e-12

    def test_disk(self):
        disk = Disk((0.0, 0.0), 3.0)
        mu = AtomicMeasure([((0.0, 0.0), 1), ((2.5, 0.0), -1)])
        assert flat_norm(mu, disk) == pytest.approx(1.5)

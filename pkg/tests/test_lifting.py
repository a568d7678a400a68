import numpy as np
import pytest

from afxy.data import Annulus, Disk, SpinField, triangles_meeting
from afxy.energy import sample_from_continuum
from afxy.exceptions import MonodromyError, PreconditionError
from afxy.data.lattice import LatticeIndex, TriangleSet, triangles_at
from afxy.strategy import AnnulusLifting
from afxy.strategy.lifting import edge_graph
from afxy.utils import angle_diff

ANNULUS = Annulus((0.0, 0.0), 0.3, 0.6)


def lift(v, annulus=ANNULUS):
    return AnnulusLifting(v, annulus).run()


def test_constant_field():
    v = SpinField.constant(0.05, Disk((0, 0), 0.7), theta=2.5)
    phi = lift(v)
    z1, z2 = phi.sites()
    assert np.allclose(phi.phase_at(z1, z2), 2.5)


def test_smooth_field_is_lifted_edge_by_edge():
    v = sample_from_continuum(lambda x, y: 3.0 * x + y**2, 0.05, Disk((0, 0), 0.7))
    phi = lift(v)
    z1, z2 = phi.sites()
    assert np.allclose(np.cos(phi.phase_at(z1, z2)), np.cos(v.phase_at(z1, z2)), atol=1e-12)
    assert np.allclose(np.sin(phi.phase_at(z1, z2)), np.sin(v.phase_at(z1, z2)), atol=1e-12)

    triangles = triangles_meeting(ANNULUS, 0.05)
    graph, sites = edge_graph(triangles)
    a, b = np.array(graph.get_edgelist()).T
    lifted = phi.phase_at(sites[:, 0], sites[:, 1])
    theta = v.phase_at(sites[:, 0], sites[:, 1])
    assert np.allclose(lifted[b] - lifted[a], angle_diff(theta[a], theta[b]), atol=1e-12)


def test_vortex_in_the_hole():
    v = sample_from_continuum(lambda x, y: np.arctan2(y, x), 0.05, Disk((0, 0), 0.7), [(0.0, 0.0)])
    with pytest.raises(MonodromyError) as info:
        lift(v)
    assert abs(info.value.winding) == 1


def test_dipole_in_the_hole():
    def phase(x, y):
        return np.arctan2(y, x + 0.05) - np.arctan2(y, x - 0.05)

    v = sample_from_continuum(phase, 0.025, Disk((0, 0), 0.7), [(-0.05, 0.0), (0.05, 0.0)])
    phi = lift(v)
    assert np.isfinite(phi.phase[~np.isnan(phi.phase)]).all()


def test_charged_triangles_are_refused(random_field):
    with pytest.raises(PreconditionError):
        lift(random_field, Annulus((0.5, 0.5), 0.1, 0.4))


def test_edge_graph_of_a_hexagon():
    graph, sites = edge_graph(TriangleSet.from_ids(triangles_at(LatticeIndex(0, 0))))
    assert len(sites) == 7
    assert graph.ecount() == 12

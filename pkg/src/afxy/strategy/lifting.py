"""Lifting of a spin field to a single-valued phase on an annulus."""

import math
from typing import Tuple

import igraph as ig
import numpy as np

from afxy.config import Config
from afxy.data.lattice import TriangleSet
from afxy.data.region import Region, triangles_meeting
from afxy.data.spinfield import SpinField
from afxy.exceptions import MonodromyError, PreconditionError
from afxy.utils import TWO_PI, angle_diff, wrap

from .strategy import Strategy


def edge_graph(triangles: TriangleSet) -> Tuple[ig.Graph, np.ndarray]:
    """Undirected graph of the lattice edges of a set of triangles.

    Returns:
        Tuple[ig.Graph, np.ndarray]: the graph and the (n, 2) lattice sites of
        its vertices, sorted lexicographically
    """
    v1, v2 = triangles.vertices()
    sites, inverse = np.unique(
        np.stack([v1.ravel(), v2.ravel()], axis=1), axis=0, return_inverse=True
    )
    ids = inverse.reshape(-1, 3)
    pairs = np.concatenate([ids[:, [0, 1]], ids[:, [1, 2]], ids[:, [2, 0]]])
    pairs = np.unique(np.sort(pairs, axis=1), axis=0)
    return ig.Graph(len(sites), pairs.tolist()), sites


class AnnulusLifting(Strategy):
    """Breadth-first accumulation of the angle jumps d^e over the edge graph.

    Every component of the graph is rooted at its lexicographically smallest
    site, whose phase is the principal value of the field there. Each tree
    edge adds d(parent, child); every non-tree edge is then checked, and a
    mismatch by a nonzero multiple of 2pi is reported as monodromy.
    """

    def __init__(self, v: SpinField, annulus: Region, config: Config = None):
        super().__init__(config)
        self.v = v
        self.annulus = annulus

    def run(self) -> SpinField:
        """Lift the field.

        Raises:
            PreconditionError: a triangle meeting the annulus carries vorticity
            MonodromyError: the phase does not close up around the hole

        Returns:
            SpinField: phase phi with exp(i phi) = v on every site of the
            triangles meeting the annulus
        """
        eps = self.v.eps
        triangles = triangles_meeting(self.annulus, eps)
        if len(triangles) == 0:
            raise PreconditionError(f"No lattice triangle meets {self.annulus}")
        theta = self.v.vertex_phases(triangles)
        charges = np.rint(angle_diff(theta, np.roll(theta, -1, axis=1)).sum(axis=1) / TWO_PI)
        if np.any(charges != 0):
            raise PreconditionError(
                f"{int(np.count_nonzero(charges))} charged triangles meet {self.annulus}"
            )

        graph, sites = edge_graph(triangles)
        site_theta = self.v.phase_at(sites[:, 0], sites[:, 1])
        phi = np.full(len(sites), np.nan)
        components = graph.connected_components()
        self.logger.debug("Lifting %d sites in %d components", len(sites), len(components))
        for members in components:
            root = min(members)
            order, _, parents = graph.bfs(root)
            phi[root] = wrap(site_theta[root])
            for vid in order[1:]:
                parent = parents[vid]
                phi[vid] = phi[parent] + angle_diff(site_theta[parent], site_theta[vid])

        self._check_monodromy(graph, site_theta, phi)
        return SpinField.from_sites(
            eps, {(int(a), int(b)): float(p) for (a, b), p in zip(sites.tolist(), phi)}
        )

    def _check_monodromy(self, graph: ig.Graph, site_theta: np.ndarray, phi: np.ndarray):
        tol = self.config.monodromy_tolerance
        edges = np.array(graph.get_edgelist(), dtype=np.int64).reshape(-1, 2)
        a, b = edges[:, 0], edges[:, 1]
        jump = angle_diff(site_theta[a], site_theta[b])
        residual = phi[b] - phi[a] - jump
        # an edge with jump exactly pi may be crossed either way
        tie = np.abs(np.abs(jump) - math.pi) <= tol
        ok = (np.abs(residual) <= tol) | (tie & (np.abs(np.abs(residual) - TWO_PI) <= tol))
        if not ok.all():
            winding = int(np.rint(residual[~ok][0] / TWO_PI))
            raise MonodromyError(
                f"Lifted phase jumps by {residual[~ok][0]:.6g} around a cycle; "
                "the enclosed degree is not zero",
                winding=winding,
            )

"""Hand-built point-cloud scenarios shared by unit and acceptance tests.

Two constructions live here. The chain-and-square pair has spanning trees of
identical edge lengths, so tree-comparison losses see nothing while the square
carries a cycle the chain lacks. The cluster-switch sweep moves one point of a
two-cluster cloud across the configuration where its spanning tree swaps the
inter-cluster edge, which makes tree-based losses jump by six orders of
magnitude while diagram-based values drift smoothly.
"""

import numpy as np

from topodiv import PointCloud


def chain_cloud() -> PointCloud:
    """Four collinear points, unit spacing, labeled so its tree is 2-1-0-3."""
    return PointCloud(np.array([[2.0, 0.0], [1.0, 0.0], [0.0, 0.0], [3.0, 0.0]]))


def square_cloud() -> PointCloud:
    """Unit square in cycle order; its cycle lives from 1 to sqrt(2)."""
    return PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def switch_target() -> PointCloud:
    """Three tight collinear points plus one far outlier."""
    return PointCloud(np.array([[0.0, 0.0], [0.1, 0.0], [0.2, 0.0], [999.9, 0.3]]))


def switch_moving(t: float) -> PointCloud:
    """Same cloud with the third point parked near the outlier, shifted by t.

    Around t = 0.05 the closest inter-cluster pair changes from (2,3) to
    (2,4), flipping the spanning tree while every distance moves by at most t.
    """
    return PointCloud(np.array([[0.0, 0.0], [0.1, 0.0], [999.85 + t, 0.0], [999.9, 0.3]]))


def switch_sweep(n_steps: int = 21):
    """Evenly spaced sweep values crossing the tree switch."""
    return np.linspace(0.0, 0.1, n_steps)

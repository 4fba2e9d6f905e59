import numpy as np
import pytest


@pytest.fixture
def fig1_incidence():
    """6x3 incidence matrix of the worked small-hypergraph example."""
    return np.array(
        [
            [1, 0, 1],
            [1, 1, 1],
            [0, 1, 0],
            [1, 0, 1],
            [1, 0, 0],
            [1, 0, 0],
        ],
        dtype=float,
    )


@pytest.fixture
def fig2_points():
    """2D node and centre coordinates of the worked geometric example."""
    nodes = np.array(
        [
            [0.8021, 0.2660],
            [0.5538, 0.6283],
            [0.0174, 0.9605],
            [0.4850, 0.3017],
            [0.9133, 0.0480],
            [0.4468, 0.1759],
        ]
    )
    centres = np.array(
        [
            [0.6980, 0.3133],
            [0.3675, 0.9810],
            [0.7207, 0.5818],
        ]
    )
    return nodes, centres

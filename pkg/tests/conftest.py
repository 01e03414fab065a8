import json

import pytest

from netident import NetworkStructure, Edge
from netident.fixtures import three_node_example, triple_path_example


THREE_NODE_TEXT = json.dumps(
    {
        "n": 3,
        "edges": [
            {"from": 0, "to": 1, "known": False},
            {"from": 2, "to": 1, "known": False},
            {"from": 1, "to": 2, "known": True},
        ],
        "excited": [0, 1],
        "measured": [1],
    }
)


@pytest.fixture
def three_node():
    return three_node_example()


@pytest.fixture
def three_node_text():
    return THREE_NODE_TEXT


@pytest.fixture
def triple_path():
    return triple_path_example()


@pytest.fixture
def unreachable_unknown():
    """One unknown edge whose start no excitation can reach."""
    return NetworkStructure(
        n=3,
        edges=(Edge(0, 1, known=False),),
        excited=(2,),
        measured=(1,),
    )

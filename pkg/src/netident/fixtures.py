"""Small hand-built networks used across tests, demos, and the oracle suite."""

from __future__ import annotations

from .network_model import Edge, NetworkStructure

__all__ = ["three_node_example", "triple_path_example"]


def three_node_example() -> NetworkStructure:
    """Three-node chain with feedback: two unknown edges into node 1.

    Edges 0->1 (unknown), 2->1 (unknown), 1->2 (known); nodes 0 and 1 are
    excited, node 1 is measured.  Both rank tests give 2, so the two unknown
    values are generically recoverable.
    """
    return NetworkStructure(
        n=3,
        edges=(
            Edge(0, 1, known=False),
            Edge(2, 1, known=False),
            Edge(1, 2, known=True),
        ),
        excited=(0, 1),
        measured=(1,),
    )


def triple_path_example() -> NetworkStructure:
    """Nine-node lattice routing three vertex-disjoint paths left to right.

    Sources {0, 1, 2}, targets {6, 7, 8}; the disjoint routes are 0-4-6,
    1-3-7 and 2-5-8, and the extra shortcuts (4->1, 3->4, 1->5, 5->7) never
    raise the maximum above three.
    """
    edges = (
        Edge(0, 4, known=True),
        Edge(4, 6, known=True),
        Edge(1, 3, known=True),
        Edge(3, 7, known=True),
        Edge(2, 5, known=True),
        Edge(5, 8, known=True),
        Edge(4, 1, known=True),
        Edge(3, 4, known=True),
        Edge(1, 5, known=True),
        Edge(5, 7, known=True),
    )
    return NetworkStructure(
        n=9, edges=edges, excited=(0, 1, 2), measured=(6, 7, 8)
    )

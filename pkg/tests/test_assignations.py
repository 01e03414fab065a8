import numpy as np
import pytest

from netident import (
    AnalysisConfig,
    Assignation,
    Edge,
    EnumerationCapExceeded,
    NetworkStructure,
    analyze,
    assignation_expansion_det,
    connected_bijective_condition,
    decoupled_jacobian,
    determinant,
    enumerate_bijective,
    enumerate_excitation_assignations,
    enumerate_measurement_assignations,
    excitation_signature,
    grouped_expansion_det,
    measurement_signature,
    one_sided_path_condition,
    sample_pair,
    signature,
    two_sided_path_condition,
    verify_certificate,
    verify_signature_factorization,
)
from netident.assignations import (
    block_excitation_signature,
    block_measurement_signature,
    canonical_pairs,
)
from netident.network_model import random_structure


def inversion_parity(perm):
    inv = sum(
        1
        for i in range(len(perm))
        for j in range(i + 1, len(perm))
        if perm[i] > perm[j]
    )
    return -1 if inv % 2 else 1


def square_corpus(rng, count, max_product=6):
    shapes = [(b, c) for b in range(1, 5) for c in range(1, 5) if b * c <= max_product]
    out = []
    while len(out) < count:
        nb, nc = shapes[int(rng.integers(len(shapes)))]
        n = int(rng.integers(max(nb, nc, 3), 8))
        density = float(rng.uniform(0.25, 0.6))
        if nb * nc > round(density * n * (n - 1)):
            continue
        out.append(random_structure(n, density, nb, nc, nb * nc, rng))
    return out


def test_bijection_count_three_node(three_node):
    assignations = list(enumerate_bijective(three_node))
    assert len(assignations) == 2
    assert all(a.is_bijective for a in assignations)
    assert assignations == list(enumerate_bijective(three_node))


def test_bijection_count_one_pair():
    s = NetworkStructure(2, (Edge(0, 1),), (0,), (1,))
    assert len(list(enumerate_bijective(s))) == 1


def test_enumeration_requires_square():
    s = NetworkStructure(3, (Edge(0, 1), Edge(0, 2), Edge(1, 2)), (0, 1), (2,))
    with pytest.raises(ValueError, match="unknown edge per excitation-measurement"):
        list(enumerate_bijective(s))


def test_one_sided_enumeration_counts():
    s = random_structure(5, 0.6, 2, 2, 4, 7)
    eb = list(enumerate_excitation_assignations(s))
    ec = list(enumerate_measurement_assignations(s))
    assert len(eb) == 6  # 4! / (2! 2!)
    assert len(ec) == 6
    for a in eb:
        for b in s.excited:
            assert sum(1 for x in a.excitation_map if x == b) == 2


def test_signature_identity_and_swap(three_node):
    pairs = canonical_pairs(three_node)
    identity = Assignation(
        excitation_map=(pairs[0][0], pairs[1][0]),
        measurement_map=(pairs[0][1], pairs[1][1]),
    )
    swapped = Assignation(
        excitation_map=(pairs[1][0], pairs[0][0]),
        measurement_map=(pairs[1][1], pairs[0][1]),
    )
    assert signature(identity, three_node) == 1
    assert signature(swapped, three_node) == -1


def test_signature_matches_inversion_parity():
    rng = np.random.default_rng(12)
    for s in square_corpus(rng, 6):
        pairs = canonical_pairs(s)
        index = {p: i for i, p in enumerate(pairs)}
        for a in enumerate_bijective(s):
            perm = [index[(b, c)] for b, c in zip(a.excitation_map, a.measurement_map)]
            assert signature(a, s) == inversion_parity(perm)


def test_signature_rejects_non_bijective(three_node):
    with pytest.raises(ValueError, match="not bijective"):
        signature(
            Assignation(excitation_map=(0, 0), measurement_map=(1, 1)), three_node
        )


@pytest.mark.parametrize("nb,nc", [(2, 1), (1, 2), (2, 2), (2, 3), (3, 2)])
def test_signature_factorization_exhaustive(nb, nc):
    s = random_structure(max(nb, nc, 4), 0.6, nb, nc, nb * nc, 5)
    assert verify_signature_factorization(s)


def test_block_signatures_multiply_to_global(three_node):
    for a in enumerate_bijective(three_node):
        sgn = signature(a, three_node)
        lhs = excitation_signature(a, three_node)
        for b in three_node.excited:
            lhs *= block_measurement_signature(a, three_node, b)
        rhs = measurement_signature(a, three_node)
        for c in three_node.measured:
            rhs *= block_excitation_signature(a, three_node, c)
        assert lhs == sgn == rhs


def test_factorization_cap(three_node):
    with pytest.raises(EnumerationCapExceeded):
        verify_signature_factorization(three_node, cap=1)


def test_det_triangle_three_node(three_node):
    g, gp = sample_pair(three_node, 42)
    d_lu = determinant(decoupled_jacobian(g, gp))
    d_perm = assignation_expansion_det(g, gp)
    d_group = grouped_expansion_det(g, gp)
    assert abs(d_lu) > 1e-3
    assert abs(d_lu - d_perm) <= 1e-8 * abs(d_lu)
    assert abs(d_lu - d_group) <= 1e-8 * abs(d_lu)


def test_det_triangle_random_corpus():
    rng = np.random.default_rng(13)
    for s in square_corpus(rng, 30):
        g, gp = sample_pair(s, rng)
        d_lu = determinant(decoupled_jacobian(g, gp))
        for d in (assignation_expansion_det(g, gp), grouped_expansion_det(g, gp)):
            assert abs(d_lu - d) <= 1e-8 * abs(d_lu) + 1e-12


def test_det_single_measurement_grouping_degenerates():
    # with one measurement the grouped expansion has 1x1 subdeterminants and
    # must coincide with the plain permutation sum almost term by term
    rng = np.random.default_rng(14)
    s = random_structure(5, 0.6, 3, 1, 3, 3)
    g, gp = sample_pair(s, rng)
    d_perm = assignation_expansion_det(g, gp)
    d_group = grouped_expansion_det(g, gp)
    assert d_perm == pytest.approx(d_group, rel=1e-12, abs=1e-14)


def test_det_disconnected_unknowns_vanishes(unreachable_unknown):
    s = NetworkStructure(
        4,
        (Edge(0, 1, known=False), Edge(2, 3, known=True)),
        excited=(2,),
        measured=(1,),
    )
    g, gp = sample_pair(s, 9)
    assert abs(assignation_expansion_det(g, gp)) < 1e-12
    assert abs(grouped_expansion_det(g, gp)) < 1e-12
    assert abs(determinant(decoupled_jacobian(g, gp))) < 1e-12


def test_det_repeated_end_node_vanishes():
    # both unknowns end at node 3, so every excitation block has a repeated
    # column and every grouped term dies
    s = NetworkStructure(
        5,
        (Edge(0, 3), Edge(1, 3), Edge(0, 1, known=True), Edge(3, 4, known=True)),
        excited=(0,),
        measured=(3, 4),
    )
    g, gp = sample_pair(s, 21)
    assert abs(grouped_expansion_det(g, gp)) < 1e-12
    assert abs(determinant(decoupled_jacobian(g, gp))) < 1e-12


def test_det_cap_enforced(three_node):
    g, gp = sample_pair(three_node, 1)
    with pytest.raises(EnumerationCapExceeded):
        assignation_expansion_det(g, gp, cap=1)


def test_connected_bijective_three_node(three_node):
    verdict = connected_bijective_condition(three_node)
    assert verdict.necessary_holds and verdict.sufficient_holds
    assert verdict.counted == 1
    assignation, certs = verdict.witnesses[0]
    # the connected pairing sends edge 0->1 to excitation 0 and edge 2->1 to 1
    assert assignation.excitation_map == (0, 1)
    assert assignation.measurement_map == (1, 1)
    assert len(certs) == 4
    for cert in certs:
        assert verify_certificate(three_node, cert)


def test_connected_bijective_unreachable(unreachable_unknown):
    verdict = connected_bijective_condition(unreachable_unknown)
    assert not verdict.necessary_holds and verdict.counted == 0
    report = analyze(unreachable_unknown)
    assert not report.decoupled_identifiable


def test_connected_bijective_single_pair_sufficient():
    s = NetworkStructure(2, (Edge(0, 1),), (0,), (1,))
    verdict = connected_bijective_condition(s)
    assert verdict.sufficient_holds and verdict.counted == 1
    assert analyze(s).decoupled_identifiable


def test_one_sided_three_node(three_node):
    for side in ("excitation", "measurement"):
        verdict = one_sided_path_condition(three_node, side)
        assert verdict.necessary_holds and verdict.sufficient_holds
        assert verdict.counted == 1
        _, certs = verdict.witnesses[0]
        for cert in certs:
            assert verify_certificate(three_node, cert)


def test_one_sided_shared_end_node_fails():
    # two unknowns assigned to the single excitation share their end node, so
    # only one vertex-disjoint path can reach the two measurements
    s = NetworkStructure(
        5,
        (Edge(0, 3), Edge(1, 3), Edge(0, 1, known=True), Edge(3, 4, known=True)),
        excited=(0,),
        measured=(3, 4),
    )
    verdict = one_sided_path_condition(s, "excitation")
    assert not verdict.necessary_holds and verdict.counted == 0
    assert not analyze(s).decoupled_identifiable


def test_one_sided_rejects_bad_side(three_node):
    with pytest.raises(ValueError, match="side"):
        one_sided_path_condition(three_node, "both")


def test_two_sided_three_node(three_node):
    verdict = two_sided_path_condition(three_node)
    assert verdict.necessary_holds and verdict.sufficient_holds
    assert verdict.counted == 1
    assert len(verdict.witnesses) == 2


def test_two_sided_equals_conjunction_of_sides():
    rng = np.random.default_rng(15)
    for s in square_corpus(rng, 25):
        vb = one_sided_path_condition(s, "excitation")
        vc = one_sided_path_condition(s, "measurement")
        vt = two_sided_path_condition(s)
        assert vt.necessary_holds == (vb.necessary_holds and vc.necessary_holds)
        assert vt.sufficient_holds == (
            vb.counted == 1 and vc.counted == 1
        )


def test_necessity_chain_random_corpus():
    rng = np.random.default_rng(16)
    identifiable = 0
    for s in square_corpus(rng, 60):
        report = analyze(s, AnalysisConfig(seed=int(rng.integers(1 << 62))))
        if not report.decoupled_identifiable:
            continue
        identifiable += 1
        assert connected_bijective_condition(s).necessary_holds
        assert one_sided_path_condition(s, "excitation").necessary_holds
        assert one_sided_path_condition(s, "measurement").necessary_holds
        assert two_sided_path_condition(s).necessary_holds
    assert identifiable > 5


def test_sufficiency_random_corpus():
    rng = np.random.default_rng(17)
    sufficient_seen = 0
    for s in square_corpus(rng, 60):
        verdicts = [
            connected_bijective_condition(s),
            one_sided_path_condition(s, "excitation"),
            one_sided_path_condition(s, "measurement"),
            two_sided_path_condition(s),
        ]
        if not any(v.sufficient_holds for v in verdicts):
            continue
        sufficient_seen += 1
        report = analyze(s, AnalysisConfig(seed=int(rng.integers(1 << 62))))
        for v in verdicts:
            if v.sufficient_holds:
                assert report.decoupled_identifiable
    assert sufficient_seen > 3

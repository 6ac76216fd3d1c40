import itertools

import pytest

from colorcut.gadgets import (
    HUB,
    GadgetParams,
    PatternDisconnected,
    WitnessDecodeError,
    _index_to_vector,
    build_a_edges,
    build_f_maps,
    build_padding,
    choose_prime,
    connectivize_pattern,
    decode_dual_witness,
    reduce_psi_to_dcmc,
)
from colorcut.instances import (
    PsiInstance,
    psi_selection_ok,
    solve_dual_bruteforce,
    solve_psi_bruteforce,
)


def _params(inst: PsiInstance, rho: int) -> GadgetParams:
    a = len(inst.pattern_edges)
    return GadgetParams(
        rho=rho,
        a=a,
        b=2 * a,
        h=inst.pattern_vertex_count,
        n=inst.block_size,
        edge_order=tuple(sorted(inst.pattern_edges)),
        f_maps=build_f_maps(inst, rho),
    )


def _blocks(h: int, n: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(x * n, (x + 1) * n)) for x in range(h))


def test_choose_prime_frozen():
    assert choose_prime(1, 1) == 2
    assert choose_prime(2, 1) == 3
    assert choose_prime(3, 1) == 5
    assert choose_prime(3, 2) == 3
    assert choose_prime(1, 2) == 2


def test_choose_prime_properties():
    for n in range(1, 31):
        for a in range(1, 4):
            rho = choose_prime(n, a)
            assert (rho - 1) ** a >= n
            assert rho ** (2 * a) >= n * n
            # primality
            assert all(rho % d for d in range(2, rho))
            # interval: strictly above the ceil root, at most twice it
            root = 1
            while root**a < n:
                root += 1
            assert root < rho <= 2 * root


def test_choose_prime_bad_args():
    with pytest.raises(ValueError):
        choose_prime(0, 1)
    with pytest.raises(ValueError):
        choose_prime(1, 0)


def test_index_to_vector_lexicographic():
    seq = [_index_to_vector(i, 3, 2) for i in range(4)]
    assert seq == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert _index_to_vector(0, 5, 3) == (1, 1, 1)
    assert _index_to_vector(1, 5, 3) == (1, 1, 2)
    assert _index_to_vector(4, 5, 3) == (1, 2, 1)


def test_f_maps_injective_and_sized():
    inst = PsiInstance(2, ((0, 1),), 3, _blocks(2, 3), frozenset())
    maps = build_f_maps(inst, 5)
    for block, fmap in zip(inst.blocks, maps):
        assert sorted(fmap) == list(block)
        vecs = list(fmap.values())
        assert len(set(vecs)) == len(vecs)
        assert all(len(v) == 1 and 1 <= v[0] <= 4 for v in vecs)
    with pytest.raises(ValueError):
        build_f_maps(inst, 2)  # (2-1)^1 < 3


def test_gadget_params_sizes():
    # two pattern edges, blocks of three: rho 3, b 4, base 15
    inst = PsiInstance(3, ((0, 1), (1, 2)), 3, _blocks(3, 3), frozenset())
    p = _params(inst, choose_prime(3, 2))
    assert (p.rho, p.b, p.base, p.block_span) == (3, 4, 15, 225)
    assert p.vertex_count == 676
    # one pattern edge, blocks of three: rho 5, b 2
    inst2 = PsiInstance(2, ((0, 1),), 3, _blocks(2, 3), frozenset())
    p2 = _params(inst2, choose_prime(3, 1))
    assert (p2.rho, p2.b, p2.base, p2.block_span) == (5, 2, 15, 15)
    assert p2.vertex_count == 31


def test_decode_inverts_coord_vertex():
    inst = PsiInstance(3, ((0, 1), (1, 2)), 3, _blocks(3, 3), frozenset())
    p = _params(inst, 3)
    seen = set()
    for z in range(p.h):
        for r1, t1, r2, t2 in itertools.product(range(3), range(5), range(3), range(5)):
            w = p.coord_vertex(z, (p.digit(r1, t1), p.digit(r2, t2)))
            got = p.decode_vertex(w)
            assert got.block == z
            assert got.coords == ((r1, t1), (r2, t2))
            seen.add(w)
    assert len(seen) == p.vertex_count - 1
    assert min(seen) == 1 and max(seen) == p.vertex_count - 1
    assert p.decode_vertex(HUB).block is None


def test_hat_block_and_hat_vertex():
    inst = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), frozenset())
    p = _params(inst, 3)
    hats = list(p.hat_block(1))
    assert len(hats) == 3  # rho^a
    assert hats == sorted(hats)
    for w in hats:
        coord = p.decode_vertex(w)
        assert coord.block == 1
        assert all(t == 0 for _, t in coord.coords)
    assert p.hat_vertex(1, 2) in hats
    assert p.hat_vertex(1, 2) != p.hat_vertex(1, 3)


def test_a_edges_count_and_shape():
    inst = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), frozenset({(0, 2)}))
    p = _params(inst, 3)
    edges = build_a_edges(1, 0, 2, p)
    assert len(edges) == 1 + 2 * p.rho**p.a - 2  # 5
    ex, ey = p.hat_vertex(0, 0), p.hat_vertex(1, 2)
    assert (min(ex, ey), max(ex, ey)) in edges
    hub_edges = [e for e in edges if e[0] == HUB]
    assert len(hub_edges) == 4
    assert all(w not in (ex, ey) for _, w in hub_edges)


def test_padding_count_and_shape():
    inst = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), frozenset({(0, 2)}))
    p = _params(inst, 3)
    edges = build_padding(1, 0, 2, 0, p)
    # one free-coordinate setting: 1 hub edge + rho*b star edges
    assert len(edges) == 1 + p.rho * p.b  # 7
    hub_edges = [e for e in edges if HUB in e]
    assert len(hub_edges) == 1
    anchor = hub_edges[0][1]
    assert p.decode_vertex(anchor).coords == ((0, 0),)
    for u, v in edges:
        if HUB in (u, v):
            continue
        cu, cv = p.decode_vertex(u), p.decode_vertex(v)
        center, leaf = (cu, cv) if cu.coords[0][1] == 0 else (cv, cu)
        r, _ = center.coords[0]
        lr, lt = leaf.coords[0]
        assert 1 <= lt <= p.b
        g = p.g_vector(1, 0, 2)
        assert lr == (r + g[lt - 1]) % p.rho


def test_reduction_rejects_bad_patterns():
    with pytest.raises(PatternDisconnected):
        reduce_psi_to_dcmc(PsiInstance(1, (), 2, _blocks(1, 2), frozenset()))
    with pytest.raises(PatternDisconnected):
        reduce_psi_to_dcmc(
            PsiInstance(3, ((0, 1),), 1, _blocks(3, 1), frozenset({(0, 1)}))
        )


def test_reduction_shape_one_color_per_host_edge():
    inst = PsiInstance(
        2, ((0, 1),), 2, _blocks(2, 2), frozenset({(0, 2), (0, 3), (1, 3)})
    )
    red = reduce_psi_to_dcmc(inst)
    assert red.dual.p == 3
    assert red.dual.a == 1
    assert red.dual.vertex_count == red.params.vertex_count
    assert red.color_map == ((1, 0, 2), (1, 0, 3), (1, 1, 3))
    # every vertex named by some edge is in range
    for graph in red.dual.color_graphs:
        for u, v in graph:
            assert 0 <= u < v < red.dual.vertex_count


def test_reduction_matches_bruteforce_on_single_edge_patterns():
    inst0 = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), frozenset())
    all_host = sorted((u, v) for u in inst0.blocks[0] for v in inst0.blocks[1])
    for bits in range(1 << len(all_host)):
        chosen = frozenset(e for i, e in enumerate(all_host) if bits >> i & 1)
        inst = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), chosen)
        want = solve_psi_bruteforce(inst).decision
        red = reduce_psi_to_dcmc(inst)
        got = solve_dual_bruteforce(red.dual)
        assert got.decision == want
        if got.decision:
            pick = decode_dual_witness(red, got.witness)
            assert psi_selection_ok(inst, pick)


def test_reduction_matches_bruteforce_on_a_path_pattern():
    inst = PsiInstance(
        3,
        ((0, 1), (1, 2)),
        1,
        _blocks(3, 1),
        frozenset({(0, 1), (1, 2)}),
    )
    red = reduce_psi_to_dcmc(inst)
    assert red.dual.vertex_count == 301
    got = solve_dual_bruteforce(red.dual)
    assert got.decision
    assert decode_dual_witness(red, got.witness) == (0, 1, 2)


def test_connectivize_identity_on_connected():
    inst = PsiInstance(2, ((0, 1),), 2, _blocks(2, 2), frozenset({(0, 2)}))
    assert connectivize_pattern(inst) is inst


def test_connectivize_structure():
    inst = PsiInstance(2, (), 2, _blocks(2, 2), frozenset())
    out = connectivize_pattern(inst)
    assert out.pattern_vertex_count == 3
    assert out.pattern_edges == ((0, 2), (1, 2))
    assert out.blocks == ((0, 1), (2, 3), (4, 5))
    assert out.host_edges == frozenset({(0, 4), (1, 4), (2, 4), (3, 4)})
    assert out.block_size == 2


def test_connectivize_preserves_decisions():
    # edgeless patterns stay vacuous-yes through the whole chain
    for n in (1, 2):
        inst = PsiInstance(2, (), n, _blocks(2, n), frozenset())
        assert solve_psi_bruteforce(inst).decision
        out = connectivize_pattern(inst)
        assert solve_psi_bruteforce(out).decision
        red = reduce_psi_to_dcmc(out)
        assert red.dual.vertex_count == (301 if n == 1 else 676)
        assert solve_dual_bruteforce(red.dual).decision
    # disconnected patterns keep their decision at the selection level
    yes = PsiInstance(3, ((0, 1),), 1, _blocks(3, 1), frozenset({(0, 1)}))
    no = PsiInstance(3, ((0, 1),), 1, _blocks(3, 1), frozenset())
    for inst in (yes, no):
        want = solve_psi_bruteforce(inst).decision
        assert solve_psi_bruteforce(connectivize_pattern(inst)).decision == want


def test_decode_witness_rejects_duplicate_pattern_edge():
    inst = PsiInstance(
        2,
        ((0, 1),),
        2,
        _blocks(2, 2),
        frozenset({(0, 2), (0, 3), (1, 2), (1, 3)}),
    )
    red = reduce_psi_to_dcmc(inst)
    with pytest.raises(WitnessDecodeError):
        decode_dual_witness(red, (1, 2))


def test_decode_witness_rejects_inconsistent_blocks():
    inst = PsiInstance(
        3,
        ((0, 1), (1, 2)),
        2,
        _blocks(3, 2),
        frozenset({(0, 2), (3, 4)}),
    )
    red = reduce_psi_to_dcmc(inst)
    # color 1 selects vertex 2 for block 1, color 2 selects vertex 3
    assert red.color_map == ((1, 0, 2), (2, 3, 4))
    with pytest.raises(WitnessDecodeError):
        decode_dual_witness(red, (1, 2))


def test_decode_witness_accepts_consistent_selection():
    inst = PsiInstance(
        3,
        ((0, 1), (1, 2)),
        2,
        _blocks(3, 2),
        frozenset({(0, 2), (2, 4)}),
    )
    red = reduce_psi_to_dcmc(inst)
    assert decode_dual_witness(red, (1, 2)) == (0, 2, 4)

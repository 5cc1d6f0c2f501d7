import networkx as nx
import numpy as np
import pytest

from usosig.blocksig import (
    BlockPartition,
    BlockSignotope,
    compositions,
    g_chi_graph,
    induced_orientation,
    is_acyclic_digraph,
    orientation_as_digraph,
    rf_chi,
    rf_chi_array,
    subgrid_block_signotope,
    transversal_subgraph,
)
from usosig.grid import GridOrientation
from usosig.signotope import Signotope, enumerate_signotopes

from conftest import all_subgrids


def naive_induced(block: BlockSignotope) -> GridOrientation:
    blocks = block.partition.blocks()

    def up(u, v):
        labels = {blocks[i][u[i]] for i in range(len(u))} | {blocks[i][v[i]] for i in range(len(v))}
        return block.chi(tuple(sorted(labels))) > 0

    return GridOrientation.from_function(block.sizes, up)


def corpus(n, rank):
    chis = list(enumerate_signotopes(n, rank))
    for sizes in compositions(n, rank - 1):
        for chi in chis:
            yield BlockSignotope(chi, sizes)


def test_partition_basics():
    p = BlockPartition([2, 3, 1])
    assert p.n == 6 and p.r == 3
    assert p.blocks() == ((1, 2), (3, 4, 5), (6,))
    assert p.block_of(4) == 1
    assert p.labels_of((1, 0, 0)) == (2, 3, 6)
    assert p.coords_of((2, 5, 6)) == (1, 2, 0)
    with pytest.raises(ValueError):
        p.coords_of((3, 4, 6))
    with pytest.raises(ValueError):
        BlockPartition([2, 0])
    assert compositions(4, 2) == [(1, 3), (2, 2), (3, 1)]
    assert len(compositions(6, 3)) == 10


def test_block_signotope_validation_and_json():
    chi = Signotope.constant(5, 3)
    with pytest.raises(ValueError):
        BlockSignotope(chi, [2, 2])
    with pytest.raises(ValueError):
        BlockSignotope(chi, [1, 1, 3])
    b = BlockSignotope(chi, [2, 3])
    assert BlockSignotope.from_json(b.to_json()) == b
    assert b.to_json() == {"signotope": {"n": 5, "rank": 3, "signs": "+" * 10}, "blocks": [2, 3]}


def test_two_block_orientation_rule():
    # i < j red, k blue, chi(i,j,k) = +  =>  (i,k) -> (j,k)
    for chi in enumerate_signotopes(3, 3):
        o = induced_orientation(BlockSignotope(chi, [2, 1]))
        assert o.points_to((0, 0), (1, 0)) == (chi(1, 2, 3) > 0)


def test_all_plus_points_up():
    for sizes in [(2, 3), (2, 2, 2), (1, 3, 2)]:
        n = sum(sizes)
        o = induced_orientation(BlockSignotope(Signotope.constant(n, len(sizes) + 1), sizes))
        assert o.forward().all()


@pytest.mark.parametrize("n,rank", [(5, 3), (6, 3), (5, 4), (6, 4)])
def test_induced_matches_naive_rule_and_rf_formula(n, rank):
    for k, block in enumerate(corpus(n, rank)):
        o = induced_orientation(block)
        if k % 7 == 0:
            assert o == naive_induced(block)
        assert np.array_equal(rf_chi_array(block), o.refined_index())


def test_rf_chi_pointwise_and_extremes():
    block = BlockSignotope(Signotope.constant(6, 4), [2, 2, 2])
    assert rf_chi(block, (2, 4, 6)) == (0, 0, 0)
    assert rf_chi(block, (1, 3, 5)) == (1, 1, 1)
    for block in list(corpus(6, 4))[::53]:
        o = induced_orientation(block)
        part = block.partition
        for coords in np.ndindex(*block.sizes):
            assert rf_chi(block, part.labels_of(coords)) == tuple(o.refined_index()[coords])
        (sink,) = o.sinks()
        assert rf_chi(block, part.labels_of(sink)) == (0,) * part.r
    with pytest.raises(ValueError):
        rf_chi(block, (1, 2, 5))


def test_g_chi_degenerate_and_networkx_agreement():
    g = g_chi_graph(Signotope.constant(2, 3))
    assert list(g) == [(1, 2)] and g[(1, 2)] == set()
    for chi in list(enumerate_signotopes(6, 3))[::17] + list(enumerate_signotopes(6, 4))[::5]:
        succ = g_chi_graph(chi)
        dg = nx.DiGraph()
        dg.add_nodes_from(succ)
        dg.add_edges_from((v, w) for v, ws in succ.items() for w in ws)
        assert is_acyclic_digraph(succ) == nx.is_directed_acyclic_graph(dg)
        assert is_acyclic_digraph(succ)
    assert not is_acyclic_digraph({1: {2}, 2: {1}})


@pytest.mark.parametrize("n,rank", [(5, 3), (5, 4), (6, 4)])
def test_transversal_subgraph_is_the_orientation(n, rank):
    for block in corpus(n, rank):
        assert transversal_subgraph(block.chi, block.partition) == orientation_as_digraph(block)


def test_subgrid_block_signotope_commutes():
    for block in corpus(6, 4):
        o = induced_orientation(block)
        for sub in all_subgrids(block.sizes):
            inner = subgrid_block_signotope(block, sub)
            assert induced_orientation(inner) == o.induced(sub).squeezed()


def test_subgrid_block_signotope_cases():
    chi = list(enumerate_signotopes(6, 4))[77]
    block = BlockSignotope(chi, [2, 2, 2])
    assert subgrid_block_signotope(block, ((0, 1), (0, 1), (0, 1))) == block
    two = subgrid_block_signotope(block, ((0, 1), (1,), (0, 1)))
    assert two.chi.rank == 3 and two.sizes == (2, 2)
    single = subgrid_block_signotope(block, ((0,), (1,), (0,)))
    assert single.sizes == (1,)
    with pytest.raises(ValueError):
        subgrid_block_signotope(block, ((0,), (2,), (0,)))


def test_no_two_sinks_on_two_by_two():
    for chi in enumerate_signotopes(4, 3):
        o = induced_orientation(BlockSignotope(chi, [2, 2]))
        assert len(o.sinks()) == 1

import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from otnplan.ksp import make_route
from otnplan.osnr import (
    InfeasibleSpanError,
    OsnrParams,
    combine_osnr,
    path_osnr,
    place_amplifiers,
    rank_paths,
    stage_osnr,
)
from otnplan.topology import Topology

P = OsnrParams()


def span(length):
    topo = Topology.from_edges([(1, 2, length)])
    return topo, make_route(topo, (1, 2))


def test_defaults():
    assert (P.launch_power, P.fiber_loss_coefficient, P.node_insertion_loss) == (0.0, 0.25, 2.0)
    assert (P.edfa17_nf, P.edfa24_nf, P.reference_constant) == (5.0, 5.5, 58.0)
    assert P.edfa17.max_gain == 17 and P.edfa24.max_gain == 24


@pytest.mark.parametrize("length, gain, kind", [(80, 22.0, "EDFA24"), (40, 12.0, "EDFA17"), (60, 17.0, "EDFA17")])
def test_preamp_selection(length, gain, kind):
    topo, route = span(length)
    booster, preamp = place_amplifiers(route, topo, P)
    assert (booster.role, booster.node, booster.gain, booster.model.kind) == ("booster", 1, 2.0, "EDFA17")
    assert (preamp.role, preamp.node, preamp.model.kind) == ("preamp", 2, kind)
    assert preamp.gain == pytest.approx(gain, abs=1e-12)


def test_infeasible_span():
    topo, route = span(120)
    with pytest.raises(InfeasibleSpanError) as err:
        place_amplifiers(route, topo, P)
    assert err.value.span == (1, 2)
    with pytest.raises(InfeasibleSpanError):
        path_osnr(route, topo, P)


def test_stage_formula():
    assert stage_osnr(20, 5, P) == 33.0
    assert combine_osnr([33.0]) == pytest.approx(33.0, abs=1e-12)


def test_two_identical_stages():
    assert combine_osnr([33.0, 33.0]) == pytest.approx(33 - 10 * math.log10(2), abs=1e-12)
    assert combine_osnr([33.0, 33.0]) == pytest.approx(29.99, abs=0.005)


@given(st.floats(5, 50), st.integers(1, 200))
def test_identical_stage_identity(stage, m):
    assert abs(combine_osnr([stage] * m) - (stage - 10 * math.log10(m))) < 1e-9


def test_path_osnr_by_hand():
    topo, route = span(40)
    # booster: 58-2-5 = 51 dB; preamp: 58-12-5 = 41 dB
    expected = -10 * math.log10(10 ** -5.1 + 10 ** -4.1)
    assert path_osnr(route, topo, P) == pytest.approx(expected, abs=1e-12)


def test_rank_single_path():
    topo, route = span(40)
    ranked = rank_paths([route], topo, P)
    assert [r.route for r in ranked] == [route]


def test_rank_more_spans_lower():
    topo = Topology.from_edges([(1, 2, 40), (2, 3, 40), (1, 4, 40), (4, 5, 40), (5, 3, 40)])
    short, long = make_route(topo, (1, 2, 3)), make_route(topo, (1, 4, 5, 3))
    ranked = rank_paths([long, short], topo, P)
    assert [r.route for r in ranked] == [short, long]
    assert ranked[0].osnr > ranked[1].osnr


def test_rank_drops_infeasible(caplog):
    topo = Topology.from_edges([(1, 2, 40), (2, 3, 40), (1, 3, 200)])
    ranked = rank_paths([make_route(topo, (1, 3)), make_route(topo, (1, 2, 3))], topo, P)
    assert [r.route.nodes for r in ranked] == [(1, 2, 3)]
    assert "dropping route 1-3" in caplog.text
    assert rank_paths([make_route(topo, (1, 3))], topo, P) == []


def test_rank_ties_and_permutation(mesh30):
    from otnplan.ksp import yen_k_shortest

    paths = yen_k_shortest(mesh30, 18, 20, 10)
    ranked = rank_paths(paths, mesh30, P)
    shuffled = list(paths)
    random.Random(0).shuffle(shuffled)
    assert rank_paths(shuffled, mesh30, P) == ranked
    osnrs = [r.osnr for r in ranked]
    assert osnrs == sorted(osnrs, reverse=True)
    # equal-structure 3-hop paths tie; node order decides
    assert ranked[1].route.nodes == (18, 17, 16, 20) and ranked[2].route.nodes == (18, 19, 16, 20)
    assert ranked[1].osnr == ranked[2].osnr


def test_monotone_under_extension_randomized():
    rng = random.Random(11)
    for _ in range(1000):
        hops = rng.randint(1, 9)
        lengths = [rng.uniform(1, 85) for _ in range(hops + 1)]
        topo = Topology.from_edges([(i, i + 1, lengths[i]) for i in range(hops + 1)])
        base = make_route(topo, range(hops + 1))
        ext = make_route(topo, range(hops + 2))
        assert path_osnr(ext, topo, P) < path_osnr(base, topo, P)


def test_noisier_amplifier_never_helps():
    noisy = OsnrParams(edfa24_nf=7.0)
    topo = Topology.from_edges([(1, 2, 80), (2, 3, 30)])
    route = make_route(topo, (1, 2, 3))
    assert path_osnr(route, topo, noisy) <= path_osnr(route, topo, P)


def test_overrides():
    assert P.with_overrides({"launch_power": "1.5"}).launch_power == 1.5
    with pytest.raises(KeyError):
        P.with_overrides({"bogus": 1})
    with pytest.raises(ValueError):
        OsnrParams(reference_constant=60)


TABLE_ORDER = [
    (18, 19, 20),
    (18, 17, 16, 20),
    (18, 19, 16, 20),
    (18, 17, 16, 19, 20),
    (18, 27, 25, 26, 19, 20),
    (18, 27, 25, 24, 23, 21, 20),
    (18, 27, 25, 24, 23, 5, 22, 11, 20),
    (18, 17, 16, 15, 14, 13, 12, 11, 20),
    (18, 27, 25, 24, 4, 5, 22, 11, 20),
    (18, 27, 28, 29, 30, 4, 5, 23, 21, 20),
]


def test_mesh_ranking_follows_published_order(mesh30):
    from otnplan.ksp import yen_k_shortest

    table = [make_route(mesh30, nodes) for nodes in TABLE_ORDER]
    ranked = rank_paths(table, mesh30, P)
    osnr = {r.route.nodes: r.osnr for r in ranked}
    # non-increasing along the published order; equal hop counts tie
    values = [osnr[nodes] for nodes in TABLE_ORDER]
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert [r.route.nodes for r in ranked][0] == TABLE_ORDER[0]
    assert ranked[-1].route.nodes == TABLE_ORDER[-1]

    found = [r.route.nodes for r in rank_paths(yen_k_shortest(mesh30, 18, 20, 10), mesh30, P)]
    present = [nodes for nodes in TABLE_ORDER if nodes in found]
    assert [found.index(n) for n in present] == sorted(found.index(n) for n in present)

import math
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinrcast.geometry import box_of, granularity
from sinrcast.harness.generate import cluster_network, line_network
from sinrcast.protocols import (
    GEN,
    GRAN,
    MATCHING,
    PSEUDOCODE,
    GranularityViolation,
    InadmissibleNetwork,
    ProtocolConfig,
    StageParams,
    broadcast_rounds,
    det_broadcast,
    diluted_transmit,
    dilution,
    flat_d_alpha,
    gen_election_rounds,
    gen_leader_election,
    gran_election_rounds,
    gran_leader_election,
    lead_increase,
    naive_dilution,
)
from sinrcast.protocols.audit import coverage_problems, missed_receptions, progress_problems, recheck_receptions
from sinrcast.protocols.leader import EliminationRecord, initial_side, sub_box_label, survivors
from sinrcast.runtime import ACTIVE, ProtocolViolation, Simulator
from sinrcast.sinr import DISTURBANCE, Network, SinrParams

Z = StageParams.from_eps(0.2).z


def awake(net, model="classical", seed=0):
    sim = Simulator(net, model, seed)
    for st_ in sim.states.values():
        st_.bcast_state = ACTIVE
    return sim


def net_of(points, ids=None, params=None, n_bound=None):
    ids = ids or list(range(1, len(points) + 1))
    return Network(tuple(ids), np.array(points, dtype=float), params or SinrParams(), n_bound=n_bound)


def random_points(rng, n, side):
    pts = rng.uniform(0, side, size=(n, 2))
    return pts[np.unique(pts, axis=0, return_index=True)[1]]


# flat function and dilution


def test_flat_single_term():
    p = SinrParams(alpha=3, beta=2)
    assert flat_d_alpha(1, p) == pytest.approx(2 * math.sqrt(2) * 16 ** (1 / 3))


def test_flat_converges():
    p = SinrParams(alpha=4, beta=2)
    assert abs(flat_d_alpha(10**6, p) - flat_d_alpha(10**4, p)) < 1e-6


@given(st.integers(1, 3000), st.floats(2.05, 6))
def test_flat_nondecreasing(n, alpha):
    p = SinrParams(alpha=alpha)
    assert flat_d_alpha(n + 1, p) >= flat_d_alpha(n, p)


def test_flat_rejects_alpha_two():
    with pytest.raises(ValueError, match="unsupported"):
        flat_d_alpha(5, SimpleNamespace(alpha=2.0, beta=1.0))


def test_sound_dilution_values():
    for alpha, expected in ((3.0, 11), (4.0, 9)):
        p = SinrParams(alpha=alpha)
        assert dilution(100, p, 2 * math.sqrt(2) * 0.1, 0.1) == expected
    # the shorter formula is strictly weaker
    p = SinrParams()
    assert naive_dilution(100, p, 0.5) < dilution(100, p, 2 * math.sqrt(2) * 0.1, 0.1)
    with pytest.raises(ValueError):
        dilution(100, p, 1.2, 0.1)


def test_stage_params():
    sp = StageParams.from_eps(0.2)
    assert sp.eps_prime == 0.1
    assert sp.l == 9
    assert sp.z == pytest.approx(0.1 / math.sqrt(2))
    assert sp.lam == pytest.approx(0.9)
    assert sp.box_side == pytest.approx(0.9 / (2 * math.sqrt(2)))
    for eps in (0.0, 0.5, 0.7):
        with pytest.raises(ValueError):
            StageParams.from_eps(eps)


@given(st.floats(0.01, 0.49))
def test_same_residue_leaders_never_share_a_relay_box(eps):
    sp = StageParams.from_eps(eps)
    assert (sp.l - 1) * sp.z >= math.sqrt(2) * sp.box_side


# diluted transmission


def test_diluted_transmit_single_station_single_round():
    sim = awake(net_of([[0, 0], [0.9, 0], [0, -0.99]]))
    heard = diluted_transmit(sim, [1], 0.1, 1)
    assert sorted(heard) == [2, 3]
    assert sim.round_index == 1


def test_diluted_transmit_empty_keeps_schedule():
    sim = awake(net_of([[0, 0]]))
    assert diluted_transmit(sim, [], 0.1, 4) == {}
    assert sim.round_index == 16
    with pytest.raises(ValueError):
        diluted_transmit(sim, [], 0.1, 0)


@pytest.mark.parametrize("x", [0.05, 0.1, 0.2])
def test_one_per_box_transmissions_reach_their_radius(x):
    rng = np.random.default_rng(int(x * 100))
    side = 12 * x
    pts = random_points(rng, 300, side)
    first: dict = {}
    for k, p in enumerate(pts):
        first.setdefault(box_of(p, x).key, k)
    senders = sorted(first.values())
    n = len(pts)
    net = net_of(pts.tolist())
    cfg = ProtocolConfig(n, net.params)
    sim = awake(net)
    diluted_transmit(sim, [net.ids[k] for k in senders], x, cfg.dilution_for(x), "d")
    assert missed_receptions(sim.trace, net, 2 * math.sqrt(2) * x) == []
    assert recheck_receptions(sim.trace, net) == []


# leader election


def test_sub_box_labels():
    assert [sub_box_label(b) for b in [(0, 0), (1, 0), (0, 1), (1, 1), (-1, -1)]] == [1, 2, 3, 4, 4]


def test_single_leader_survives_increase():
    net = net_of([[0.03, 0.03], [0.5, 0.5]])
    sim = awake(net)
    new, known = lead_increase(sim, [1], 0.04, ProtocolConfig(2), listeners=[1])
    assert new == {1} and known[1] == 1


def test_smallest_label_wins():
    x = 0.05
    # sub-box 2 (bottom-right) and 4 (top-right) of the G_0.1 box at the origin
    net = net_of([[0.07, 0.01], [0.06, 0.09]], ids=[40, 3])
    sim = awake(net)
    assert sub_box_label(box_of(net.pos(40), x).key) == 2
    assert sub_box_label(box_of(net.pos(3), x).key) == 4
    new, known = lead_increase(sim, [40, 3], x, ProtocolConfig(2), listeners=[40, 3])
    assert new == {40}
    assert known == {40: 40, 3: 40}


def test_two_leaders_in_one_box_is_a_violation():
    net = net_of([[0.01, 0.01], [0.02, 0.02]])
    with pytest.raises(ProtocolViolation):
        lead_increase(awake(net), [1, 2], 0.05, ProtocolConfig(2))


def test_initial_side():
    assert initial_side(1 / 0.01, 0.4) * math.sqrt(2) <= 0.01
    assert initial_side(1.0, 0.4) == 0.4
    with pytest.raises(ValueError):
        initial_side(0, 0.4)


def test_gran_singleton():
    net = net_of([[0.3, 0.3]])
    lm = gran_leader_election(awake(net), [1], 1.0, Z, ProtocolConfig(1))
    assert lm.leader_ids() == {1} and lm.known[1] == 1


def test_gran_two_far_apart_in_one_box():
    lo, hi = 0.001, Z - 0.001
    net = net_of([[lo, lo], [hi, hi]], ids=[77, 12])
    sim = awake(net)
    g = granularity(net)
    lm = gran_leader_election(sim, [77, 12], g, Z, ProtocolConfig(2), listeners=[77, 12])
    assert len(lm.leaders) == 1
    assert lm.problems(sim, [77, 12]) == []
    assert sim.round_index == gran_election_rounds(g, Z, ProtocolConfig(2))


def test_gran_one_per_box_elects_everyone():
    pts = [[(i + 0.5) * Z, (j + 0.5) * Z] for i in range(4) for j in range(3)]
    net = net_of(pts)
    sim = awake(net)
    lm = gran_leader_election(sim, net.ids, granularity(net), Z, ProtocolConfig(len(pts)), listeners=net.ids)
    assert lm.leader_ids() == set(net.ids)
    assert lm.problems(sim, net.ids) == []


def test_gran_detects_wrong_granularity():
    net = net_of([[0.0, 0.0], [0.001, 0.0]], ids=[5, 8])
    with pytest.raises(GranularityViolation) as info:
        gran_leader_election(awake(net), [5, 8], 10.0, Z, ProtocolConfig(2))
    assert set(info.value.pair) == {5, 8}


def test_gen_all_singletons_elect_themselves():
    pts = [[(i + 0.5) * Z * 3, (j + 0.5) * Z * 3] for i in range(3) for j in range(3)]
    net = net_of(pts)
    sim = awake(net)
    lm, rec = gen_leader_election(sim, net.ids, Z, ProtocolConfig(9, selector_k=4))
    assert set(rec.ph.values()) == {1}
    assert lm.leader_ids() == set(net.ids)
    assert lm.problems(sim, net.ids) == []


def test_gen_crowded_box():
    n = 12
    rng = np.random.default_rng(2)
    # well-spaced points (pairwise > z / n) packed into one G_z box
    grid = [(a, b) for a in range(4) for b in range(4)]
    picks = rng.choice(len(grid), size=n, replace=False)
    pts = [[(grid[k][0] + 0.5) * Z / 4, (grid[k][1] + 0.5) * Z / 4] for k in picks]
    net = net_of(pts, ids=[int(v) for v in rng.choice(1000, size=n, replace=False) + 1], n_bound=n)
    sim = awake(net)
    cfg = ProtocolConfig.for_network(net, selector_k=4)
    lm, rec = gen_leader_election(sim, net.ids, Z, cfg)
    assert len(lm.leaders) == 1
    assert lm.problems(sim, net.ids) == []
    assert rec.halving_violations() == []
    assert rec.matching_violations() == []
    assert sim.round_index == gen_election_rounds(Z, cfg)


def test_survivor_rules():
    X = {1: frozenset({3}), 2: frozenset({3}), 3: frozenset({4}), 4: frozenset({3})}
    learned = {v: {u: X[u] for u in X[v]} for v in X}
    keep, pairs = survivors(X, X, learned, MATCHING)
    assert keep == {3}
    loose, loose_pairs = survivors(X, X, learned, PSEUDOCODE)
    # without the mutual-hearing check, three of four survive and 3 sits in two pairs
    assert loose == {1, 2, 3}
    rec = EliminationRecord(2, ph={1: 2, 2: 2, 3: 2, 4: 1}, pairs=[(1, (0, 0), loose_pairs)], box={v: (0, 0) for v in X})
    assert rec.halving_violations() and rec.matching_violations()


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([GEN, GRAN]))
def test_election_postcondition_random(seed, variant):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 40))
    pts = random_points(rng, n, float(rng.choice([0.2, 0.5, 1.5])))
    net = net_of(pts.tolist(), ids=[int(v) for v in rng.choice(n**3, size=len(pts), replace=False) + 1], n_bound=n)
    sim = awake(net)
    cfg = ProtocolConfig.for_network(net, selector_k=4)
    if variant == GEN:
        lm, rec = gen_leader_election(sim, net.ids, Z, cfg)
        assert rec.halving_violations() == []
    else:
        lm = gran_leader_election(sim, net.ids, granularity(net), Z, cfg, listeners=net.ids)
    assert lm.problems(sim, net.ids) == []


# broadcast


def test_two_node_broadcast():
    net = net_of([[0, 0], [0.5, 0]])
    for variant in (GEN, GRAN):
        res = det_broadcast(variant, net)
        assert res.all_informed and res.stages_used == 1


def test_clique_done_in_one_stage():
    pts = [[0.1 * np.cos(a), 0.1 * np.sin(a)] for a in np.linspace(0, 6, 8)]
    net = net_of(pts)
    res = det_broadcast(GRAN, net)
    assert res.all_informed
    assert len(res.stages[0].informed_after) == 8


@pytest.mark.parametrize("variant", [GEN, GRAN])
def test_path_broadcast(variant):
    net = line_network(9, seed=3)
    res = det_broadcast(variant, net, selector_k=4)
    assert res.all_informed
    assert res.stages_used <= 8 + 1
    assert coverage_problems(res, net) == []
    assert progress_problems(res, net) == []
    cfg = ProtocolConfig.for_network(net, selector_k=4)
    assert res.rounds_used == broadcast_rounds(variant, cfg, res.stages_used, granularity(net))


def test_cluster_broadcast_audited():
    net = cluster_network(48, seed=1, clusters=3, g_target=200)
    res = det_broadcast(GEN, net, selector_k=4)
    assert res.all_informed
    assert recheck_receptions(res.trace, net) == []
    assert all(not s.elimination.halving_violations() for s in res.stages)


def test_disconnected_network_rejected():
    net = net_of([[0, 0], [0.5, 0], [3, 0]])
    with pytest.raises(InadmissibleNetwork):
        det_broadcast(GRAN, net)


def test_disturbance_needs_reach_inside_filter():
    net = net_of([[0, 0], [0.5, 0]], params=SinrParams(eps=0.1))
    with pytest.raises(ValueError, match="filter radius"):
        det_broadcast(GRAN, net, DISTURBANCE)


def test_pairing_rule_validated():
    with pytest.raises(ValueError):
        ProtocolConfig(4, pairing="other")
    assert ProtocolConfig(4).id_domain == 64

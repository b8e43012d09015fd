import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sinrcast.sinr import (
    CLASSICAL,
    DISTURBANCE,
    OPPORTUNISTIC,
    Network,
    SinrParams,
    bfs_layers,
    comm_graph,
    disturbance_radius,
    eccentricity,
    resolve_round,
    sinr,
)


def make(points, params=None, ids=None):
    ids = ids or list(range(1, len(points) + 1))
    return Network(tuple(ids), np.array(points, dtype=float), params or SinrParams())


def random_net(seed, n=30, side=4.0, params=None):
    rng = np.random.default_rng(seed)
    return make(rng.uniform(0, side, size=(n, 2)).tolist(), params)


def test_lone_transmitter_at_unit_distance_hits_threshold():
    net = make([[0, 0], [1, 0]])
    assert sinr(1, 2, {1}, net) == net.params.beta
    assert resolve_round({1}, net) == [(2, 1)]


def test_hand_evaluated_ratio():
    p = SinrParams(alpha=3, beta=2, noise=1)
    net = make([[0, 0], [0.5, 0], [0.5, 2]], p)
    assert p.power == 2
    assert sinr(1, 2, {1, 3}, net) == pytest.approx(12.8, rel=1e-12)


def test_too_far_fails():
    p = SinrParams(alpha=4)
    net = make([[0, 0], [2, 0]], p)
    assert sinr(1, 2, {1}, net) == pytest.approx(p.beta / 16)
    assert resolve_round({1}, net) == []


def test_sinr_argument_errors():
    net = make([[0, 0], [1, 0], [2, 0]])
    with pytest.raises(ValueError):
        sinr(1, 2, {1, 2}, net)
    with pytest.raises(ValueError):
        sinr(3, 2, {1}, net)


@pytest.mark.parametrize(
    "kw",
    [dict(alpha=2.0), dict(beta=0.5), dict(noise=0.5), dict(power=3.0), dict(eps=0), dict(eta=1.0), dict(zeta=1.0)],
)
def test_params_validation(kw):
    with pytest.raises(ValueError):
        SinrParams(**kw)


def test_network_validation():
    with pytest.raises(ValueError):
        make([[0, 0], [0, 0]])
    with pytest.raises(ValueError):
        make([[0, 0], [1, 0]], ids=[4, 4])
    with pytest.raises(ValueError):
        Network((1, 2), np.zeros((2, 2)) + [[0, 0], [1, 1]], n_bound=1)
    with pytest.raises(ValueError):
        Network((1, 9), [[0, 0], [1, 1]], id_domain=8)


def test_network_orders_by_id():
    net = make([[5, 5], [1, 1], [3, 3]], ids=[30, 10, 20])
    assert net.ids == (10, 20, 30)
    assert tuple(net.pos(30)) == (5.0, 5.0)
    assert net.source == 10


def test_everyone_in_range_hears_a_lone_sender():
    net = make([[0, 0], [0.5, 0.5], [-0.9, 0], [0, 1.0]])
    assert resolve_round({1}, net) == [(2, 1), (3, 1), (4, 1)]


def test_close_pair_jams_midpoint():
    p = SinrParams(alpha=3, beta=2)
    net = make([[0, 0], [0.1, 0], [0.05, 0]], p)
    assert sinr(1, 3, {1, 2}, net) < 2 and sinr(2, 3, {1, 2}, net) < 2
    assert resolve_round({1, 2}, net) == []


def test_unknown_model_and_missing_rng():
    net = make([[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        resolve_round({1}, net, "fading")
    with pytest.raises(ValueError):
        resolve_round({1}, net, DISTURBANCE)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 8))
def test_vectorised_resolution_matches_scalar_bits(seed, k):
    net = random_net(seed, n=25, side=2.5)
    rng = np.random.default_rng(seed + 1)
    T = set(rng.choice(net.ids, size=k, replace=False).tolist())
    got = resolve_round(T, net)
    expected = sorted((u, v) for u in net.ids if u not in T for v in T if sinr(v, u, T, net) >= net.params.beta)
    assert got == expected
    assert resolve_round(T, net, OPPORTUNISTIC) == got
    # the interference sum is bit-identical to the scalar loop
    pw = net.received_power
    for u, v in got:
        iu = net.index[u]
        idx = sorted(net.index[w] for w in T if w != v)
        rows = pw[idx, iu] if idx else np.zeros(1)
        interference = float(np.add.reduce(rows)) if idx else 0.0
        assert pw[net.index[v], iu] / (net.params.noise + interference) == sinr(v, u, T, net)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_more_transmitters_never_raise_sinr(seed):
    net = random_net(seed, n=12, side=2.0)
    rng = np.random.default_rng(seed)
    ids = list(rng.permutation(net.ids))
    v, u, extra = ids[0], ids[1], ids[2:6]
    T = {v}
    last = sinr(v, u, T, net)
    for w in extra:
        T.add(w)
        now = sinr(v, u, T, net)
        assert now <= last
        last = now


def test_degenerate_disturbance_matches_classical_within_radius():
    p = SinrParams(eta=1e-12, zeta=0.0)
    r = disturbance_radius(p)
    for seed in range(20):
        net = random_net(seed, n=20, side=2.0, params=p)
        T = set(np.random.default_rng(seed).choice(net.ids, size=3, replace=False).tolist())
        classical = [(u, v) for u, v in resolve_round(T, net) if net.distances[net.index[u], net.index[v]] <= r]
        for s in range(3):
            got = resolve_round(T, net, DISTURBANCE, np.random.default_rng((s, 1)))
            assert got == classical


def test_disturbance_is_reproducible():
    net = random_net(5, n=30, side=2.0)
    T = set(net.ids[:4])
    a = resolve_round(T, net, DISTURBANCE, np.random.default_rng((7, 3)))
    b = resolve_round(T, net, DISTURBANCE, np.random.default_rng((7, 3)))
    assert a == b


def test_disturbance_never_reaches_past_filter():
    net = random_net(2, n=40, side=3.0)
    r = disturbance_radius(net.params)
    for s in range(30):
        for u, v in resolve_round(set(net.ids[:2]), net, DISTURBANCE, np.random.default_rng(s)):
            assert net.distances[net.index[u], net.index[v]] <= r


def test_comm_graph_boundary():
    eps = 0.25
    p = SinrParams(eps=eps)
    assert comm_graph(make([[0, 0], [1 - eps, 0]], p)).edges() == {(1, 2)}
    assert comm_graph(make([[0, 0], [1 - eps + 1e-9, 0]], p)).edges() == set()


def test_comm_graph_matches_brute_force():
    net = random_net(8, n=50, side=4.0)
    g = comm_graph(net)
    expect = set()
    for a in range(50):
        for b in range(a + 1, 50):
            if np.hypot(*(net.positions[a] - net.positions[b])) <= 0.8:
                expect.add((net.ids[a], net.ids[b]))
    assert g.edges() == expect
    assert all(u in g.neighbors(v) for v in g.ids for u in g.neighbors(v))


def test_eccentricity_examples():
    path = make([[0.8 * (1 - 1e-12) * i, 0] for i in range(5)])
    assert eccentricity(comm_graph(path), 1) == 4
    assert bfs_layers(comm_graph(path), 1)[5] == 4
    apart = make([[0, 0], [5, 0]])
    assert eccentricity(comm_graph(apart), 1) is None
    clique = make([[0, 0], [0.3, 0], [0, 0.3], [0.2, 0.2]])
    assert eccentricity(comm_graph(clique), 1) == 1
    with pytest.raises(ValueError):
        eccentricity(comm_graph(clique), 99)

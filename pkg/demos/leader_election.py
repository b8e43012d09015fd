# Leader election inside grid boxes, and the halving behind the general variant.
import numpy as np

from sinrcast.geometry import box_of, granularity
from sinrcast.protocols import ProtocolConfig, StageParams, gen_leader_election, gran_leader_election
from sinrcast.runtime import ACTIVE, Simulator
from sinrcast.sinr import Network

rng = np.random.default_rng(7)

# A crowded patch: 80 stations in a square of side 0.3.
pts = rng.uniform(0, 0.3, size=(80, 2))
ids = rng.choice(80**3, size=80, replace=False) + 1
net = Network(tuple(int(i) for i in ids), pts, n_bound=80)
z = StageParams.from_eps(0.2).z
print(f"box side {z:.4f}, granularity {granularity(net):.1f}")

boxes = {}
for v, p in zip(net.ids, net.positions):
    boxes.setdefault(box_of(p, z).key, []).append(v)
print(f"{len(boxes)} nonempty boxes, occupancy {sorted(len(b) for b in boxes.values())}")


def fresh():
    sim = Simulator(net)
    for st in sim.states.values():
        st.bcast_state = ACTIVE
    return sim


cfg = ProtocolConfig.for_network(net, selector_k=4)

# General election: eliminate, then select among survivors of each level.
sim = fresh()
leaders, record = gen_leader_election(sim, net.ids, z, cfg)
print(f"\ngeneral election: {len(leaders.leader_ids())} leaders in {sim.round_index} rounds")
print("problems:", leaders.problems(sim, net.ids))

# Each elimination level should at least halve the stations left in every box.
crowded = max(record.level_sets().items(), key=lambda kv: kv[1][0])
print(f"  busiest box {crowded[0]}: stations left after each level {crowded[1]}")
print("halving violations:", record.halving_violations())

# Granularity election: one station per tiny box, then double the box side.
sim = fresh()
leaders = gran_leader_election(sim, net.ids, granularity(net), z, cfg, listeners=net.ids)
print(f"\ngranularity election: {len(leaders.leader_ids())} leaders in {sim.round_index} rounds")
print("problems:", leaders.problems(sim, net.ids))

# Walk through one deterministic broadcast, stage by stage.
import numpy as np

from sinrcast.geometry import granularity
from sinrcast.harness import generate
from sinrcast.protocols import GEN, GRAN, ProtocolConfig, broadcast_rounds, det_broadcast
from sinrcast.sinr import bfs_layers, comm_graph, eccentricity

# A random network in a disc, connected at radius 1 - eps.
net, rejected = generate("uniform-disc", 60, seed=3)
G = comm_graph(net)
D = eccentricity(G, net.source)
print(f"{len(net)} stations, source {net.source}, eccentricity {D}, granularity {granularity(net):.1f}")
print(f"{rejected} disconnected draws were thrown away")

# BFS layers from the source: broadcast must push through one per stage.
layers = bfs_layers(G, net.source)
print("layer sizes:", np.bincount(list(layers.values())))

# The general variant elects leaders with selective families, so it
# does not need to know the granularity.  k=4 keeps the families short.
res = det_broadcast(GEN, net, selector_k=4)
print(f"\n{GEN}: {res.stages_used} stages, {res.rounds_used} rounds, everyone informed: {res.all_informed}")
for st in res.stages:
    print(
        f"  stage {st.index}: {len(st.active):3d} active, "
        f"{len(st.leaders.leader_ids()):3d} leaders, "
        f"{len(st.newly_active):3d} woken, "
        f"{len(st.informed_after):3d} informed"
    )

# The schedule is oblivious: the round count only depends on the number of stages.
cfg = ProtocolConfig.for_network(net, selector_k=4)
print("closed form:", broadcast_rounds(GEN, cfg, res.stages_used))

# The granularity variant trades selective families for grid refinement.
res = det_broadcast(GRAN, net)
print(f"\n{GRAN}: {res.stages_used} stages, {res.rounds_used} rounds, everyone informed: {res.all_informed}")

# Only rounds where someone transmitted are recorded.
busy = res.trace
print(f"{len(busy)} busy rounds out of {res.rounds_used}")
print("first busy round:", busy[0].round_index, busy[0].phase_tag, busy[0].transmitters, len(busy[0].receptions), "receptions")

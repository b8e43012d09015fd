# Broadcast when every link's received power is randomly disturbed.
import statistics

from sinrcast.harness import ExperimentSpec, build_network, reference_run, run_experiment
from sinrcast.protocols import GRAN
from sinrcast.sinr import DISTURBANCE, disturbance_radius

# 20 disturbance seeds over one fixed network.
spec = ExperimentSpec(generator="uniform-disc", n=60, variant=GRAN, model=DISTURBANCE, seeds=list(range(20)), network_seed=0)
net = build_network(spec, 0)[0]
print(f"eta={spec.eta}, zeta={spec.zeta}: each round is repeated tau={spec.tau} times")
print(f"receivers ignore senders farther than {disturbance_radius(net.params):.4f}")

result = run_experiment(spec)
rounds = [r.rounds for r in result.rows]
print(f"completed {sum(r.all_informed for r in result.rows)}/{len(result.rows)}")
print(f"rounds: median {statistics.median(rounds):g}, min {min(rounds)}, max {max(rounds)}")

# The same protocol without phases, on the undisturbed channel.
ref = reference_run(spec, net)
print(f"classical reference: {ref.rounds_used} rounds, {ref.stages_used} stages")
print(f"tau x reference = {spec.tau * ref.rounds_used}")

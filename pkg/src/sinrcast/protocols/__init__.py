"""Leader election and broadcast protocols."""

from .broadcast import (
    GEN,
    GRAN,
    BroadcastResult,
    InadmissibleNetwork,
    StageReport,
    broadcast_program,
    broadcast_rounds,
    det_broadcast,
    stage_of_broadcast,
    stage_rounds,
)
from .config import MATCHING, PSEUDOCODE, ProtocolConfig
from .constants import StageParams, dilution, flat_d_alpha, naive_dilution
from .leader import (
    EliminationRecord,
    GranularityViolation,
    LeaderMap,
    gen_election_rounds,
    gen_leader_election,
    gran_election_rounds,
    gran_leader_election,
    lead_increase,
)
from .transmit import diluted_transmit, execute_ssf

__all__ = [
    "GEN",
    "GRAN",
    "MATCHING",
    "PSEUDOCODE",
    "BroadcastResult",
    "EliminationRecord",
    "GranularityViolation",
    "InadmissibleNetwork",
    "LeaderMap",
    "ProtocolConfig",
    "StageParams",
    "StageReport",
    "broadcast_program",
    "broadcast_rounds",
    "det_broadcast",
    "diluted_transmit",
    "dilution",
    "execute_ssf",
    "flat_d_alpha",
    "gen_election_rounds",
    "gen_leader_election",
    "gran_election_rounds",
    "gran_leader_election",
    "lead_increase",
    "naive_dilution",
    "stage_of_broadcast",
    "stage_rounds",
]

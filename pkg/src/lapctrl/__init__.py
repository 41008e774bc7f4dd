"""Controllability analysis of leader-follower consensus dynamics on signed
graphs: both Laplacian protocols, kernel-degeneracy detection, structural
balance, and classic / structural / strong structural controllability tests
with exact-rational and floating backends.
"""

from .balance import (BalanceResult, EquivalenceReport, GaugeVector,
                      check_balance, cycle_sign, fundamental_cycles,
                      gauge_transform, invariance_audit, verify_equivalences)
from .degeneracy import (DegeneracyReport, IdenticalNodeGroup, InsufficiencyVerdict,
                         OppositePair, ZeroCircle, degeneracy_report,
                         find_identical_groups, find_opposite_pairs,
                         find_zero_circles, insufficiency_check,
                         pair_certifies_kernel, predict_multiplicity,
                         scan_zero_circles)
from .errors import (BudgetExceededError, DisconnectedGraphError,
                     EigendecompositionError, GraphFormatError, LapctrlError,
                     NotATreeError, NotBalancedError, UnreachableTargetError)
from .graph import (FREE, LeaderSet, SignedGraph, SignPattern, accessible_nodes,
                    is_connected, load_graph, neighbors, parse_graph,
                    to_edge_list_text, to_json_dict, to_json_text)
from .spectral import (ControllabilityVerdict, LaplacianMatrix, Protocol,
                       SteerResult, build_laplacian, distance_lower_bound,
                       kalman_dim, pbh_test, pbh_zero_witnesses_exact, steer,
                       zero_multiplicity)
from .structural import (Dilation, PSTReport, StructuralVerdict, dilation_check,
                         pst_check, structural_verdict, system_pattern,
                         witness_search)
from .strong import (SSCAudit, SSCLowerBound, SSCReport, bfs_layers,
                     layered_rank_test, ssc_lower_bound, ssc_random_audit,
                     ssc_report, symmetric_followers, zero_forcing_closure)

__version__ = "0.1.0"

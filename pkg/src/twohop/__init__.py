"""Two-hop relaying with uncoordinated relay selection in random ad hoc networks.

Sources and relays are Poisson point processes; links see Rayleigh fading and
decode when their signal-to-interference ratio exceeds a threshold ``T``.
The package estimates direct success ``P1``, relayed success ``P2`` and
end-to-end success ``Ps`` by simulation and by stochastic-geometry analysis.
"""

from .analytic import (AnalyticInputs, AnalyticResult, BudgetExceeded, QuadratureConfig,
                       UnsupportedPolicy, beta_integral, beta_integral_closed_form, beta_tilde,
                       delta_tilde, evaluate, p1, p2, ps_composed)
from .channel import ContractViolation, FadingField, connects, rss, sir
from .experiments import ConfigError, ExperimentSpec, compare_modes, preset, run_experiment
from .geometry import (NetworkRealization, ParameterError, PathLossModel, Point2, Window,
                       destination_of, path_loss, sample_ppp)
from .policies import (AllTransmit, CenterBaseline, DistanceThinning, RssThinning, Sectorized,
                       SelectionPolicy, decode_sets, make_policy, select)
from .simulation import EstimateRecord, EstimationError, SimulationConfig, estimate, run_trial

__version__ = "0.1.0"

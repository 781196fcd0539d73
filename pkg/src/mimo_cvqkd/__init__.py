"""Secret-key-rate simulator for continuous-variable QKD over a 2x2 MIMO channel."""

from .channel import (
    AB_MODES,
    AdmissibilityFlags,
    ChannelMatrix,
    ChannelUnitary,
    EveModel,
    NoiseModel,
    covariance_from_dilation,
    covariance_from_noise_params,
    estimate_channel,
    excess_noise_from_eve,
    gain_block,
    noise_admissibility,
    symplectic_from_unitary,
    uniform_crosstalk_channel,
    unitary_dilation,
)
from .gaussian import (
    CovarianceMatrix,
    UnphysicalStateError,
    condition_on_heterodyne,
    direct_sum,
    entropy,
    heterodyne_covariance,
    reduce_to_modes,
    symplectic_eigenvalues,
    symplectic_form,
    thermal_covariance,
    thermal_entropy,
    tmsv_covariance,
)
from .keyrates import (
    KeyRateBreakdown,
    ProtocolParams,
    holevo_bound,
    mutual_information,
    siso_covariance,
    skr_full_mimo,
    skr_multiplexed,
    skr_selection,
    skr_selection_best,
    skr_siso,
)
from .optimizer import (
    PowerBudget,
    RegionPoint,
    SweepParams,
    SweepPoint,
    admissible_xi_radius,
    optimize_power,
    scan_xi_region,
    sweep_loss,
)

__version__ = "0.1.0"

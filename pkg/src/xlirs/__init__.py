"""Near-field SNR models for links assisted by extremely large reflecting surfaces."""

from .channel import (
    Model,
    PhaseProfile,
    Scenario,
    SnrEstimate,
    channel_vector,
    element_gain,
    from_db,
    optimal_phases,
    snr_exact_sum,
    snr_with_phases,
    to_db,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    PreconditionError,
    ValidationError,
    XlirsError,
)
from .geometry import IrsGeometry, NodePosition, element_distance, element_position
from .harness import SweepSpec, SweepTable, run_scenario, run_sweep, write_csv
from .models import (
    BoundsPair,
    UpwConfig,
    snr_asymptotic_upa,
    snr_boresight,
    snr_bounds_general,
    snr_integral_upa,
    snr_ula_asymptotic,
    snr_ula_closed,
    snr_ula_integral,
    snr_upw,
)
from .quadrature import QuadSpec, integrate_1d, integrate_disk_polar, integrate_rect_2d
from .special import ellip_f, ellip_k_complete

__version__ = "0.1.0"

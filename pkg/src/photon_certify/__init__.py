"""Certify single-photon sources from auto-correlation click statistics.

Lower bounds on the single-photon weight, Wigner-negativity witnesses and
measures, and Hoeffding confidence bounds, plus an exact forward model of
the beamsplitter-and-two-detectors apparatus.
"""

__version__ = "0.1.0"

from .benchmarks import (
    ApparatusBounds,
    PolytopePoint,
    fn_hn_gn,
    multimode_envelope,
    multimode_p1_tilde,
    p1_hat,
    p1_hat_star,
    polytope_contains,
    polytope_vertices,
)
from .detection_model import (
    ApparatusParams,
    ClickCounts,
    ClickProbabilities,
    EffectiveParams,
    click_probabilities,
    click_probabilities_multimode,
    effective_params,
    sample_counts,
)
from .errors import CertifyError, DataError, DegenerateError, DomainError, NumericError
from .finite_stats import (
    ConfidenceQuery,
    StatReport,
    min_xbar,
    nw_alpha,
    p_value_wigner,
    q_alpha,
    q_alpha_star,
    q_alpha_tilde,
    stat_report,
)
from .photon_states import (
    MultimodeProductState,
    PhotonNumberDistribution,
    apply_loss,
    fock,
    lossy_single_photon,
    max_loss_boosted_p1,
    mixture,
    vacuum,
    random_state,
    single_photon_weight,
)
from .timetag_ingest import IngestConfig, TimeTagEvent, bin_trials, parse_timetags
from .wigner import (
    NegativityBound,
    disk_negativity_bound,
    lambert_w0,
    negativity_lower_bound,
    negativity_oracle,
    wigner_fock,
    wigner_mixture,
)

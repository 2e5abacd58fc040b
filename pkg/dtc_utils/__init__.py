from .config import (  # noqa F401
    DEFAULT_SETTINGS as DEFAULT_SETTINGS,
    Settings as Settings,
    Tolerances as Tolerances,
)
from .constructors import (  # noqa F401
    amplitude_damping_channel as amplitude_damping_channel,
    basis_state as basis_state,
    dephasing_channel as dephasing_channel,
    depolarizing_channel as depolarizing_channel,
    ghz as ghz,
    identity_channel as identity_channel,
    maximally_mixed as maximally_mixed,
    product_state as product_state,
    pure_state as pure_state,
    random_channel as random_channel,
    random_mixed as random_mixed,
    random_pure as random_pure,
    random_unitary as random_unitary,
    w_state as w_state,
)
from .correlations import (  # noqa F401
    DtcBreakdown as DtcBreakdown,
    GapReport as GapReport,
    Jtilde3Terms as Jtilde3Terms,
    cross_term as cross_term,
    dtc_relent_regrouped as dtc_relent_regrouped,
    dtc_relent_sum as dtc_relent_sum,
    dtc_relent_tensor as dtc_relent_tensor,
    dual_total_correlation as dual_total_correlation,
    gap_report as gap_report,
    j_n as j_n,
    jtilde3_decomposition as jtilde3_decomposition,
    jtilde_n as jtilde_n,
    total_correlation as total_correlation,
)
from .entropy import (  # noqa F401
    Divergence as Divergence,
    Spectrum as Spectrum,
    SupportProjector as SupportProjector,
    cross_log_trace as cross_log_trace,
    divergence as divergence,
    mutual_information as mutual_information,
    relative_entropy as relative_entropy,
    spectrum as spectrum,
    support_contained as support_contained,
    support_projector as support_projector,
    von_neumann_entropy as von_neumann_entropy,
)
from .exc import (  # noqa F401
    ConfigError as ConfigError,
    DimensionCapExceededError as DimensionCapExceededError,
    DimensionMismatchError as DimensionMismatchError,
    DtcError as DtcError,
    EigenFailureError as EigenFailureError,
    InvalidChannelError as InvalidChannelError,
    InvalidPartySetError as InvalidPartySetError,
    InvalidPermutationError as InvalidPermutationError,
    NonFiniteMatrixError as NonFiniteMatrixError,
    NotHermitianError as NotHermitianError,
    NotPSDError as NotPSDError,
    NotUnitTraceError as NotUnitTraceError,
    OutOfRangeError as OutOfRangeError,
    OutputFileError as OutputFileError,
    StateFileError as StateFileError,
    StateValidationError as StateValidationError,
    UndefinedDifferenceError as UndefinedDifferenceError,
    UnknownDemoError as UnknownDemoError,
    UnknownRunError as UnknownRunError,
    WrongArityError as WrongArityError,
)
from .extended import (  # noqa F401
    INFINITY as INFINITY,
    ExtendedReal as ExtendedReal,
)
from .state import (  # noqa F401
    KrausChannel as KrausChannel,
    MultipartiteState as MultipartiteState,
    apply_local_channel as apply_local_channel,
    cyclic_complement as cyclic_complement,
    make_channel as make_channel,
    make_state as make_state,
    marginal as marginal,
    partial_trace as partial_trace,
    permute as permute,
    replicate as replicate,
    tensor as tensor,
    tensor_all as tensor_all,
)
from .stateio import (  # noqa F401
    read_state as read_state,
    write_state as write_state,
)

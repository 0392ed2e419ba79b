from vexnorm.errors import (
    ArgumentError,
    ConfigurationError,
    ConstructionError,
    DataError,
    ResourceError,
    VexnormError,
)
from vexnorm.grid import DyadicGrid, GridFunction, build_grid, characteristic_ball, restrict_to_shell
from vexnorm.exponents import (
    Constant,
    ExponentFunction,
    GaussBump,
    LogDecay,
    check_log_holder,
    conjugate,
    evaluate,
    sobolev_partner,
)
from vexnorm.norms import (
    BallFamily,
    HerzMorreyParams,
    bmo_norm,
    build_ball_family,
    herz_morrey_norm,
    holder_pair,
    luxemburg_norm,
    mean_on_set,
    modular,
)
from vexnorm.operators import FracIntegralSpec, commutator, fractional_integral, maximal
from vexnorm.families import Symbol, TestFunction, build_test_family
from vexnorm.verify import (
    RatioReport,
    TheoremParams,
    check_theorem,
    decompose_E123,
    estimate_delta,
    run_ratio_experiment,
)


__version__ = "0.1.0"

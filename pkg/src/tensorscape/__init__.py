"""Nonsmooth rank-one tensor decomposition: objectives, landscape
verification oracles, Clarke stationarity analysis, and robust-recovery
experiments."""

from .objectives import (
    DenseTarget,
    TensorProblem,
    closed_form_f1,
    eval_dense,
    eval_f1,
    eval_finf,
    eval_fp,
    eval_hp,
    eval_lp,
    grad_fp,
    in_closed_form_region,
    max_ratio_product,
    subgrad_dense,
    subgrad_f1,
    tuple_products,
)
from .stationarity import (
    Staircase,
    StationarityReport,
    build_staircase,
    clarke_interval,
    find_descent_on_sphere,
    is_clarke_stationary,
    make_stationary_non_minimum,
    verify_root_jump_separation,
)
from .landscape import (
    GLOBAL,
    SPURIOUS_FOUND,
    WEAKLY_GLOBAL_ONLY,
    GridBox,
    GridReport,
    Plateau,
    check_change_of_variables,
    check_compact_convergence,
    check_composition,
    grid_local_minima,
    grid_values,
    strict_shelf,
    verify_global,
    verify_on_closed_form_region,
    verify_weakly_global,
)
from .gallery import (
    GALLERY,
    GalleryEntry,
    composition_counterexample,
    hestenes,
    hestenes_descent_path,
    nopath,
    rational_global,
    takagi_bivariate,
    verify_entry,
)
from .solvers import (
    SolveTrace,
    SolverConfig,
    default_max_iters,
    relative_error,
    sgd_momentum,
    subgradient_descent,
)
from .experiments import (
    CellResult,
    ExperimentConfig,
    ExperimentResult,
    export_csv,
    export_json,
    generate_instance,
    read_csv,
    run_sweep,
)

__version__ = "0.1.0"

"""curkit: CUR matrix approximation by convex optimization, with baselines.

The main entry points are :func:`sf_cur` (column/row selection through a
group-sparse regression solved with a surrogate-functional iteration) and
the comparison methods :func:`ls_deterministic_cur`,
:func:`ls_randomized_cur`, :func:`deim_cur` and :func:`qr_cur`.
"""
from .baselines import (
    deim_cur,
    deim_select,
    leverage_scores,
    ls_deterministic_cur,
    ls_randomized_cur,
    pca_correlation_scores,
    pca_correlation_select,
    qr_cur,
)
from .decomposition import CurDecomposition, build_U
from .errors import (
    ConfigurationError,
    CountUnreachableError,
    CurError,
    DataError,
    NumericalError,
)
from .evaluation import (
    relative_error,
    run_cur,
    selection_report,
    separation_counts,
    svd_relative_error,
    sweep_error_curve,
)
from .matrix_io import (
    LabeledMatrix,
    fill_missing_by_class_mean,
    load_matrix,
    mean_center_rows,
    min_max_normalize_cols,
    save_matrix,
)
from .model_selection import aic_bic, auto_select_columns, difference_matrix
from .numerics import pivoted_qr, pseudoinverse, spectral_norm, truncated_svd
from .prox import prox_l1, prox_l2, prox_linf, project_l1_ball
from .sfcur import (
    critical_lambda_cols,
    critical_lambda_rows,
    select_columns,
    select_rows,
    sf_cur,
)
from .solver import SfConfig, SfProblem, SfState, apply_T, objective, solve

__version__ = "0.1.0"

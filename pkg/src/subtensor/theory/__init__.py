from .covariance import (
    CovarianceModel,
    build_covariance_model,
    eta_threshold,
    lemma_checks,
    mvn_tail_bounds,
    sigma0_determinant,
    sigma0_eigenvalues,
    sigma0_inverse,
    sigma0_matrix,
    slepian_premise_check,
)
from .ogp import binary_entropy, c0_log2_bound, c1_log2_bound, ogp_exponent_psi
from .report import BoundReport
from .scalar import (
    ProblemParams,
    bivariate_tail_upper,
    borell_tis_two_sided,
    correlation_lambda,
    counting_tail,
    counting_tail_report,
    e_max,
    expected_max_gaussians,
    gauss_max_centering,
    gauss_max_window,
    gaussian_tail_bounds,
    igp_informal_estimate,
    igpt_expected_average,
    igpt_guarantee_ratio,
    igpt_step_weights,
    log2_binomial,
    log_binomial,
    log_counting_tail,
    log_expected_count,
    normal_pdf,
    normal_sf,
    second_moment_lower_bound,
    second_moment_report,
)

"""Sound-histogram analytics: wavelet + PCA features, clustering, and
chi-square activity/rain detection over 5-minute ambient-sound histograms."""

from ._core import (  # noqa: F401
    __version__,
    aggregate_or,
    basis_matrix,
    bin_sample,
    build_histogram,
    chi_square_cdf,
    chi_square_pdf,
    chi_square_quantile,
    chi_square_scores,
    confusion,
    cophenetic_ccc,
    cut,
    detect_activity,
    detect_files,
    estimate_rain,
    linkage,
    pca_fit,
    pca_project,
    pca_reconstruct,
    pca_standardize,
    qq_points,
    select_k,
    select_linkage,
    simulate_files,
    wavelet_forward,
    wavelet_inverse,
    Dendrogram,
    PcaModel,
)

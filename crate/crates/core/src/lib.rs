//! Quaternion Fourier and linear canonical transforms on sampled 2D signals,
//! their inversion formulas, and the bounded-variation and summability tools
//! used to study pointwise convergence.

pub mod error;
pub mod fast;
pub mod fixtures;
pub mod grid;
pub mod ppm;
pub mod qft;
pub mod qlct;
pub mod qsig;
pub mod quadrature;
pub mod quat;
mod sandwich;
pub mod smoothing;
pub mod variation;

pub use error::TransformError;
pub use fast::{fast_grid, qft_fast};
pub use grid::{l1_diff, l1_norm, linf_diff, sample, Field2D, FnField, GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
pub use qft::{derivative_multiplier, ft2d_complex, ft_from_qft, qft_forward, qft_forward_on, qft_from_ft, qft_inverse, FreqWindow, QftKind};
pub use qlct::{
    lct_kernel, qfrft, qlct_forward, qlct_forward_on, qlct_inverse, qlct_inverse_sided, qlct_inverse_two_sided, qlct_via_qft,
    sided_decompose_transform, LctKind, LctParams,
};
pub use quat::{qabs, qconj, qexp_pure, qmul, AxisPair, PureUnit, Quaternion};
pub use smoothing::{
    dirichlet_partial_inverse, eta_jump_average, gauss_convolve, gauss_mean_inverse, gauss_weierstrass_kernel, lc_class_diagnostic,
    sinc_integral_bound_check, GaussMeanParams, JumpAverage, PartialSource, SmoothingError,
};
pub use variation::{hardy_bvf_check, jordan_split, quasi_monotone_check, vitali_variation, Net, RealField, VariationReport};

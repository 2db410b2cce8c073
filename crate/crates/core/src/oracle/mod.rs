//! Ground-truth convolution quantities without asymptotic approximation.

mod function;
mod grid;
mod mc;
mod tail;

pub use function::{
    convolution_integral_scaled, function_convolve, function_convolve_n,
    function_convolve_n_scaled, function_convolve_scaled,
};
pub(crate) use grid::convolve;
pub use grid::{
    conv_tail_n_grid, discretize, BoundaryRule, CellMasses, GridConvolution, GridConvolutionPlan,
    TailBracket,
};
pub use mc::mc_conv_tail;
pub(crate) use mc::BLOCK;
pub use tail::{conv_tail_2, conv_tail_2_scaled, lattice_conv_tail, lattice_conv_tail_scaled};

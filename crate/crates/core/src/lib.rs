//! Interpolating tensor-product multiresolution analysis.
//!
//! Exact Deslauriers-Dubuc filter banks, dyadic evaluation of the scaling
//! function, separable fast wavelet transforms on boxes of `Z^n`, discrete
//! Besov norms, and the neighbour-preserving orderings of `Z^n`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod besov;
pub mod dyadic;
pub mod error;
pub mod filters;
pub mod grid;
pub mod ordering;
pub mod scaling;
pub mod tensor;
pub mod transform;

pub use dyadic::Dyadic;
pub use error::{Error, Result};
pub use filters::{FilterBank, IndexedFilter};
pub use grid::{GridFunction, IndexBox};
pub use scaling::ScalingEvaluator;
pub use tensor::Orientation;
pub use transform::WaveletPyramid;

//! File formats, grid numerics and the reduction of summed multiplier
//! products to constrained paraproducts, on top of [`paraproduct_core`].

pub mod cli;
pub mod corollary;
pub mod format;
pub mod numeric;

//! Integer-valued information quantity of grayscale images.
//!
//! The pipeline starts from a [`Histogram`] of occupied intensity levels,
//! builds a binary [`Hierarchy`] of interval clusters with one of three
//! splitters, encodes it into the pseudo-ternary [`HuTable`], and counts the
//! integer information per pixel. The same hierarchy expands into a nested
//! sequence of piecewise-constant approximations whose squared error is
//! compared against an exact dynamic-programming optimum.
//!
//! All squared-error comparisons are exact. Floating point is used only for
//! reporting (σ, Hartley and Shannon totals) and as a filter in front of exact
//! comparisons.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod approx;
pub mod clustering;
mod error;
pub mod image;
pub mod infometrics;
pub mod invariant;
pub mod stats;

pub use approx::{convexity_report, curve, expand, render, ApproxStep, CurveRow, Expansion};
pub use clustering::{
    build_hierarchy, merge_sequence, optimal_partition, split_balanced, split_otsu, Hierarchy,
    MergeStep, Node, NodeId, OptimalQuantizer, Split, Splitter,
};
pub use error::Error;
pub use image::{Histogram, Image, Level};
pub use infometrics::{
    decompose_at_cut, hartley_total, integer_total, percent_of_volume, shannon_total,
    Decomposition, InfoReport, VolumeBits,
};
pub use invariant::{hu_image, negate_digits, pixel_bits, replay, DigitString, HuTable};
pub use stats::{delta_e_merge, stats_of_interval, ClusterStats, Increment};

/// Exact non-negative rational used for squared errors.
pub type Exact = num_rational::BigRational;

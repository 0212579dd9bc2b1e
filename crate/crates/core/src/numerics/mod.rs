//! Numeric kernels: polynomial roots, root continuation, winding numbers,
//! curve distances and contour extraction. Everything here is a pure
//! function of its inputs.

pub mod contour;
pub mod continuation;
pub mod curve;
pub mod polynomial;
pub mod winding;

pub use contour::{extract_contour, extract_contour_with, ContourOptions, Rect};
pub use continuation::{continue_roots, ContinuationOptions, RootTracks};
pub use curve::{curve_distance, hausdorff_distance, wrap_angle, Curve, RadialProfile};
pub use polynomial::{solve_root_clusters, solve_roots, Polynomial, RootCluster, DEFAULT_TOL};
pub use winding::winding_number;

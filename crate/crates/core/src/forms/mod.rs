//! Function families, points of the cube, and exact evaluation of the
//! linear forms and resonant-set neighbourhoods.

mod functions;
mod geometry;
mod matrix;
mod regularity;
mod ubiquity;

pub use functions::{ApproximatingFunction, DimensionFunction, LimitAtZero, ScaledBehaviour, EXPONENT_TOL};
pub use geometry::{form_value, in_delta_neighborhood, resonant_distance, DISTANCE_CONVENTION};
pub use matrix::{canonical, euclidean_norm, height, is_canonical, MatrixPoint, Witness};
pub use regularity::{is_k_regular, Regularity};
pub use ubiquity::{Omega, UbiquityConfig};

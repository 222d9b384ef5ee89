//! Exact scalar, matrix, and polynomial arithmetic over Q(i).

mod gauss;
mod matrix;
mod poly;
mod polymat;
mod roots;

pub use gauss::{rational_from_str, GaussRat};
pub use matrix::Matrix;
pub use poly::Poly;
pub use polymat::PolyMatrix;
pub use roots::roots_in_field;

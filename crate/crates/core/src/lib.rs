//! Numerical tools for weighted Bergman spaces on discs and Fock-type spaces on
//! the plane: the extremal problem for the functional `f ↦ ∫ f k̄ w(|z|²) dA`,
//! integral means and the regularity bounds they satisfy, log-convex decay of
//! means, and checks of the integrability conditions behind polynomial density.

pub mod density;
pub mod error;
pub mod extremal;
pub mod logconvex;
pub mod poly;
pub mod quadrature;
pub mod regularity;
pub mod space;
pub mod special;
pub mod weights;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::Poly;
pub use quadrature::{build_disc_grid, build_plane_grid, integrate_area, monomial_moment, QuadGrid};
pub use space::Exponents;
pub use weights::WeightSpec;

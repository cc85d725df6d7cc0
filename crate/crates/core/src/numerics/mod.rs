//! Numerical building blocks with no knowledge of the network model.

pub mod quadrature;
pub mod rho;
pub mod series;

pub use quadrature::{integrate, integrate_semi_infinite, QuadOptions, QuadratureResult};
pub use rho::{rho, rho_complex, rho_quadrature};
pub use series::{sum_until_tail, TailSum};

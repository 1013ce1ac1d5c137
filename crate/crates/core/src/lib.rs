pub mod error;
pub mod geometry;
pub mod laplace;
pub mod lsq;
pub mod oracle;
pub mod periodic;
pub mod scattering;
pub mod sim;
pub mod specfun;

pub use error::{MrcError, Result};
pub use num_complex::Complex64 as Complex;

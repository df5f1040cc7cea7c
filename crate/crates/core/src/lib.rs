pub mod asymptotic;
pub mod error;
pub mod hamiltonians;
pub mod hilbert;
pub mod linalg;
pub mod observables;
pub mod readout;
pub mod spectra;
pub mod switching;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

//! Delta-gamma value-at-risk by Fourier inversion of the characteristic
//! function, with a-priori certified error bounds, plus a Monte Carlo
//! benchmark arm and a synthetic options-portfolio generator.

pub mod bounds;
pub mod charfn;
pub mod error;
pub mod fourier;
pub mod linalg;
pub mod model_io;
pub mod montecarlo;
pub mod portfolio;
pub mod special;
pub mod spectral;
pub mod var;

pub use error::{DgvarError, Result};
pub use spectral::{DeltaGammaModel, Dist, SpectralData};
pub use var::{cdf, var, VarResult};

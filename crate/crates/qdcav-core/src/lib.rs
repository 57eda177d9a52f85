#![no_std]
#![allow(unused_imports)]

extern crate alloc;

pub mod bath_correlation;
pub mod error;
pub mod fft;
pub mod half_fourier;
pub mod oracle;
pub mod quad;
pub mod resonance;
pub mod special;
pub mod spectra;
pub mod spectral_density;

pub use error::{Error, NumericalError, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

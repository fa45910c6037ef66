//! Cavity polaritons, dark-state polaritons and electromagnetically induced
//! transparency in a light-matter medium.

pub mod cli;
pub mod eit_dark;
pub mod error;
pub mod fockspace;
pub mod hopfield;
pub mod optics;
pub mod transfer;

pub use error::{Error, Result};

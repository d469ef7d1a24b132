pub mod analysis;
pub mod config;
pub mod confmap;
pub mod dataset;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod io;
pub mod patterns;
pub mod quadrature;
pub mod rng;
pub mod selftest;
pub mod warp;

pub use confmap::{MapConstants, MapParams};
pub use dataset::{Augmentation, DatasetSpec, DiskScene};
pub use error::{Error, Result};
pub use grid::{bilinear_sample, ImageGrid};
pub use num_complex::Complex64;
pub use rng::CounterRng;
pub use warp::{warp_image, warp_image_multichannel, MapCache, WarpKind};

/// A point of the complex plane.
pub type ComplexValue = Complex64;

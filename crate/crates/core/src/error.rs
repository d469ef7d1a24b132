use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("elliptic parameter m = {0} is outside its admissible range")]
    ParameterOutOfRange(f64),

    #[error("argument {0} is a pole of the Jacobi functions")]
    Pole(Complex64),

    #[error("non-finite argument or intermediate value")]
    NonFinite,

    #[error("point {0} lies outside the closed square [-1, 1] x [-1, 1]")]
    OutsideSquare(Complex64),

    #[error("point {0} does not lie in the open unit disk")]
    OutsideDisk(Complex64),

    #[error("Möbius center {0} must satisfy |alpha| < 1")]
    InvalidMobiusCenter(Complex64),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("could not place {n} disks within {attempts} draws")]
    Generation { n: usize, attempts: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Image(#[from] image::ImageError),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

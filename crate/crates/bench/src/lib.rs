//! Shared inputs for the criterion benchmarks.

use confwarp_core::Complex64;

/// A fixed lattice of `n × n` points covering `[-scale, scale]²`.
pub fn lattice(n: usize, scale: f64) -> Vec<Complex64> {
    let step = 2.0 * scale / (n - 1) as f64;
    (0..n).flat_map(|j| (0..n).map(move |k| Complex64::new(j as f64 * step - scale, k as f64 * step - scale))).collect()
}

//! Deterministic test images.

use std::f64::consts::PI;

use crate::grid::ImageGrid;

/// `(Re z + Im z + 2) / 4` in every channel.
pub fn linear_gradient(size: usize, channels: usize) -> ImageGrid {
    ImageGrid::from_fn(size, channels, |j, k, _| {
        let x = crate::grid::grid_coordinate(size, j);
        let y = crate::grid::grid_coordinate(size, k);
        (x + y + 2.0) / 4.0
    })
    .expect("gradient values lie in [0, 1]")
}

/// `count` bright bands of constant `Re z`, with soft edges so that
/// interpolation error stays small.
pub fn parallel_lines(size: usize, count: usize, channels: usize) -> ImageGrid {
    ImageGrid::from_fn(size, channels, |j, _, _| {
        let x = crate::grid::grid_coordinate(size, j);
        let phase = (x + 1.0) * 0.5 * count as f64;
        let v = (2.0 * PI * phase).sin();
        v.max(0.0).powf(0.5)
    })
    .expect("line values lie in [0, 1]")
}

//! Square raster images on the coordinate grid of `[−1, 1]²`.
//!
//! Pixel `(j, k)` sits at the point `z = x_j + i x_k` with
//! `x_i = 2i/(h − 1) − 1`, so the first array axis runs along `Re z` and the
//! second along `Im z`. Values are stored as `f64` in `[0, 1]`, channel-last.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coordinate of grid index `i` on an `h`-point axis over `[−1, 1]`.
pub fn grid_coordinate(size: usize, i: usize) -> f64 {
    2.0 * i as f64 / (size - 1) as f64 - 1.0
}

/// Snap tolerance, in pixel units, for sample positions that land on a node.
const NODE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    size: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageGrid {
    /// An all-zero image.
    pub fn zeros(size: usize, channels: usize) -> Result<Self> {
        check_shape(size, channels)?;
        Ok(ImageGrid { size, channels, data: vec![0.0; size * size * channels] })
    }

    pub fn from_fn<F>(size: usize, channels: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        let mut img = Self::zeros(size, channels)?;
        for j in 0..size {
            for k in 0..size {
                for c in 0..channels {
                    img.set(j, k, c, f(j, k, c));
                }
            }
        }
        img.check_values()?;
        Ok(img)
    }

    /// Wraps channel-last data of length `size² · channels`.
    pub fn from_vec(size: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(size, channels)?;
        if data.len() != size * size * channels {
            return Err(Error::InvalidImage(format!(
                "expected {} values for a {size}x{size}x{channels} image, got {}",
                size * size * channels,
                data.len()
            )));
        }
        let img = ImageGrid { size, channels, data };
        img.check_values()?;
        Ok(img)
    }

    fn check_values(&self) -> Result<()> {
        match self.data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            Some(v) => Err(Error::InvalidImage(format!("pixel value {v} outside [0, 1]"))),
            None => Ok(()),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    fn index(&self, j: usize, k: usize, c: usize) -> usize {
        (j * self.size + k) * self.channels + c
    }

    pub fn get(&self, j: usize, k: usize, c: usize) -> f64 {
        self.data[self.index(j, k, c)]
    }

    /// Sets one value, clamped into `[0, 1]`.
    pub fn set(&mut self, j: usize, k: usize, c: usize, value: f64) {
        let i = self.index(j, k, c);
        self.data[i] = if value.is_nan() { value } else { value.clamp(0.0, 1.0) };
    }

    pub fn pixel(&self, j: usize, k: usize) -> &[f64] {
        let start = self.index(j, k, 0);
        &self.data[start..start + self.channels]
    }

    /// The point of `G` that pixel `(j, k)` represents.
    pub fn point(&self, j: usize, k: usize) -> Complex64 {
        Complex64::new(grid_coordinate(self.size, j), grid_coordinate(self.size, k))
    }

    /// Grid spacing `u = 2/(h − 1)`.
    pub fn spacing(&self) -> f64 {
        2.0 / (self.size - 1) as f64
    }

    /// Channel `c` as a single-channel image.
    pub fn channel(&self, c: usize) -> ImageGrid {
        assert!(c < self.channels, "channel {c} out of range");
        ImageGrid {
            size: self.size,
            channels: 1,
            data: self.data.iter().skip(c).step_by(self.channels).copied().collect(),
        }
    }

    /// Interleaves single-channel images of equal size.
    pub fn from_channels(planes: &[ImageGrid]) -> Result<ImageGrid> {
        let first = planes.first().ok_or_else(|| Error::InvalidImage("no channels given".into()))?;
        if planes.iter().any(|p| p.size != first.size || p.channels != 1) {
            return Err(Error::InvalidImage("channel planes must be single-channel and equally sized".into()));
        }
        let channels = planes.len();
        let mut data = Vec::with_capacity(first.data.len() * channels);
        for i in 0..first.data.len() {
            data.extend(planes.iter().map(|p| p.data[i]));
        }
        Ok(ImageGrid { size: first.size, channels, data })
    }

    /// Bilinear interpolation of every channel at `w`, written into `out`.
    ///
    /// The four neighbours of `w` are weighted by the fractional offsets, the
    /// floor corner receiving `(1 − s)(1 − t)`; indices on the `+1` edge are
    /// clamped to the last row/column.
    pub fn sample_into(&self, w: Complex64, out: &mut [f64]) -> Result<()> {
        if !crate::confmap::in_closed_square(w) {
            return Err(Error::OutsideSquare(w));
        }
        let scale = 0.5 * (self.size - 1) as f64;
        let (j0, j1, s) = self.axis_cell((w.re + 1.0) * scale);
        let (k0, k1, t) = self.axis_cell((w.im + 1.0) * scale);
        let weights = [(1.0 - s) * (1.0 - t), s * (1.0 - t), (1.0 - s) * t, s * t];
        let corners = [(j0, k0), (j1, k0), (j0, k1), (j1, k1)];
        for (c, slot) in out.iter_mut().enumerate().take(self.channels) {
            let mut acc = 0.0;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (&(j, k), &weight) in corners.iter().zip(&weights) {
                let v = self.get(j, k, c);
                acc += weight * v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            *slot = acc.clamp(lo, hi);
        }
        Ok(())
    }

    /// Splits a position in pixel units into neighbour indices and the
    /// fractional offset.
    fn axis_cell(&self, position: f64) -> (usize, usize, f64) {
        let nearest = position.round();
        let position = if (position - nearest).abs() < NODE_SNAP { nearest } else { position };
        let last = self.size - 1;
        let floor = position.floor().clamp(0.0, last as f64);
        let i0 = floor as usize;
        let frac = (position - floor).clamp(0.0, 1.0);
        (i0, (i0 + 1).min(last), frac)
    }
}

fn check_shape(size: usize, channels: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::InvalidImage(format!("image size {size} is below the minimum of 2")));
    }
    if channels == 0 {
        return Err(Error::InvalidImage("image needs at least one channel".into()));
    }
    Ok(())
}

/// Per-channel bilinear interpolation of `img` at `w ∈ [−1, 1]²`.
pub fn bilinear_sample(img: &ImageGrid, w: Complex64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; img.channels()];
    img.sample_into(w, &mut out)?;
    Ok(out)
}

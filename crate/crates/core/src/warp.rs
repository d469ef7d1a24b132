//! Pull-back warping of square images.
//!
//! Every output pixel at grid point `z` is filled by mapping `z` back into
//! the source image and interpolating bilinearly there. Pixels whose source
//! point is undefined stay zero.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::confmap::{self, disk_pullback, MapConstants, MapParams};
use crate::error::Result;
use crate::grid::{grid_coordinate, ImageGrid};

/// Scale that moves points on the square's boundary just inside it.
const BOUNDARY_NUDGE: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarpKind {
    /// Source image onto the inscribed disk (`f`); zero outside the disk.
    SquareToDisk,
    /// Inscribed disk back onto the full square (`f⁻¹`); no disk guard.
    DiskToSquare,
    /// `υ_k ∘ g_α ∘ f`: the disk image after the Möbius map and rotation;
    /// zero outside the disk.
    DiskMotion(MapParams),
    /// The full augmentation `f⁻¹ ∘ υ_k ∘ g_α ∘ f`, a bijection of the
    /// square; no disk guard.
    Augment(MapParams),
}

impl WarpKind {
    /// The source point sampled for output point `z`, if any.
    pub fn source_point(&self, z: Complex64) -> Option<Complex64> {
        self.source_point_with(MapConstants::standard(), z)
    }

    pub fn source_point_with(&self, constants: &MapConstants, z: Complex64) -> Option<Complex64> {
        let inside_disk = z.norm_sqr() < 1.0;
        match self {
            WarpKind::SquareToDisk if inside_disk => constants.disk_to_square(z).ok(),
            WarpKind::DiskToSquare => constants.square_to_disk(z).ok().map(clamp_to_square),
            WarpKind::DiskMotion(p) if inside_disk => {
                let w = disk_pullback(z, p).ok()?;
                constants.disk_to_square(w).ok()
            }
            WarpKind::Augment(p) => {
                // ∂G maps onto the unit circle, where f⁻¹ is undefined.
                let pull = |z| constants.pullback_augment_point(z, p);
                pull(z).or_else(|_| pull(z * BOUNDARY_NUDGE)).ok().map(clamp_to_square)
            }
            _ => None,
        }
    }
}

pub fn clamp_to_square(w: Complex64) -> Complex64 {
    Complex64::new(w.re.clamp(-1.0, 1.0), w.im.clamp(-1.0, 1.0))
}

/// Source coordinates for every pixel of an `h × h` output grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpMap {
    size: usize,
    sources: Vec<Option<Complex64>>,
}

impl WarpMap {
    /// Evaluates `source` at every grid point, rows in parallel.
    pub fn from_fn<F>(size: usize, source: F) -> Self
    where
        F: Fn(Complex64) -> Option<Complex64> + Sync,
    {
        let mut sources = vec![None; size * size];
        sources.par_chunks_mut(size).enumerate().for_each(|(j, row)| {
            let x = grid_coordinate(size, j);
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = source(Complex64::new(x, grid_coordinate(size, k)));
            }
        });
        WarpMap { size, sources }
    }

    pub fn build(size: usize, kind: WarpKind) -> Self {
        Self::from_fn(size, |z| kind.source_point(z))
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn source(&self, j: usize, k: usize) -> Option<Complex64> {
        self.sources[j * self.size + k]
    }

    /// Resamples `img` through this map. The image must have the map's size.
    pub fn apply(&self, img: &ImageGrid) -> Result<ImageGrid> {
        if img.size() != self.size {
            return Err(crate::Error::InvalidImage(format!(
                "warp map is {0}x{0} but the image is {1}x{1}",
                self.size,
                img.size()
            )));
        }
        let channels = img.channels();
        let mut out = ImageGrid::zeros(self.size, channels)?;
        out.data_mut().par_chunks_mut(channels).zip(self.sources.par_iter()).try_for_each(|(pixel, source)| {
            match source {
                Some(w) => img.sample_into(*w, pixel),
                None => Ok(()),
            }
        })?;
        Ok(out)
    }
}

/// Warps every channel of `img` by `kind`.
pub fn warp_image(img: &ImageGrid, kind: WarpKind) -> Result<ImageGrid> {
    WarpMap::build(img.size(), kind).apply(img)
}

/// Warps each channel separately and interleaves the results.
pub fn warp_image_multichannel(img: &ImageGrid, kind: WarpKind) -> Result<ImageGrid> {
    let map = WarpMap::build(img.size(), kind);
    let planes = (0..img.channels()).map(|c| map.apply(&img.channel(c))).collect::<Result<Vec<_>>>()?;
    ImageGrid::from_channels(&planes)
}

/// Rotation by `degrees` (counter-clockwise in the `z`-plane) about the
/// image center; points rotated in from outside the square are zero.
pub fn rotate_image(img: &ImageGrid, degrees: f64) -> Result<ImageGrid> {
    let angle = degrees.to_radians();
    WarpMap::from_fn(img.size(), |z| {
        let w = confmap::rotate(z, -angle);
        confmap::in_closed_square(w).then_some(w)
    })
    .apply(img)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MapKey {
    size: usize,
    kind: u8,
    params: [u64; 3],
}

impl MapKey {
    fn new(size: usize, kind: WarpKind) -> Self {
        let bits = |p: &MapParams| [p.alpha().re.to_bits(), p.alpha().im.to_bits(), p.k().to_bits()];
        let (tag, params) = match &kind {
            WarpKind::SquareToDisk => (0, [0; 3]),
            WarpKind::DiskToSquare => (1, [0; 3]),
            WarpKind::DiskMotion(p) => (2, bits(p)),
            WarpKind::Augment(p) => (3, bits(p)),
        };
        MapKey { size, kind: tag, params }
    }
}

/// Shared cache of [`WarpMap`]s keyed by `(size, kind)`, for batch runs that
/// apply the same warp to many images. Results are identical to
/// [`warp_image`].
#[derive(Debug, Default)]
pub struct MapCache {
    maps: RwLock<HashMap<MapKey, Arc<WarpMap>>>,
}

impl MapCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, size: usize, kind: WarpKind) -> Arc<WarpMap> {
        let key = MapKey::new(size, kind);
        if let Some(map) = self.maps.read().expect("map cache poisoned").get(&key) {
            return Arc::clone(map);
        }
        let mut maps = self.maps.write().expect("map cache poisoned");
        Arc::clone(maps.entry(key).or_insert_with(|| Arc::new(WarpMap::build(size, kind))))
    }

    pub fn warp(&self, img: &ImageGrid, kind: WarpKind) -> Result<ImageGrid> {
        self.get(img.size(), kind).apply(img)
    }

    pub fn len(&self) -> usize {
        self.maps.read().expect("map cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{mean_abs_diff, Region};
    use crate::patterns;
    use std::f64::consts::FRAC_PI_3;

    fn params(re: f64, im: f64, k: f64) -> MapParams {
        MapParams::new(Complex64::new(re, im), k).unwrap()
    }

    #[test]
    fn square_to_disk_of_constants() {
        let zeros = ImageGrid::zeros(32, 1).unwrap();
        assert_eq!(warp_image(&zeros, WarpKind::SquareToDisk).unwrap(), zeros);

        let ones = ImageGrid::from_fn(33, 1, |_, _, _| 1.0).unwrap();
        let out = warp_image(&ones, WarpKind::SquareToDisk).unwrap();
        for j in 0..33 {
            for k in 0..33 {
                let expected = if out.point(j, k).norm_sqr() < 1.0 { 1.0 } else { 0.0 };
                assert_eq!(out.get(j, k, 0), expected, "({j}, {k})");
            }
        }
    }

    #[test]
    fn support_stays_inside_disk() {
        let img = patterns::linear_gradient(40, 1);
        for kind in [WarpKind::SquareToDisk, WarpKind::DiskMotion(params(0.2, -0.1, 1.0))] {
            let out = warp_image(&img, kind).unwrap();
            for j in 0..40 {
                for k in 0..40 {
                    if out.point(j, k).norm_sqr() >= 1.0 {
                        assert_eq!(out.get(j, k, 0), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn augment_fills_the_square() {
        let ones = ImageGrid::from_fn(31, 1, |_, _, _| 1.0).unwrap();
        let out = warp_image(&ones, WarpKind::Augment(params(0.3, 0.3, 4.7))).unwrap();
        assert!(out.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn disk_to_square_fills_the_square() {
        let ones = ImageGrid::from_fn(24, 1, |_, _, _| 1.0).unwrap();
        let out = warp_image(&ones, WarpKind::DiskToSquare).unwrap();
        assert!(out.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn identity_augment_reproduces_input() {
        let img = patterns::linear_gradient(64, 1);
        let out = warp_image(&img, WarpKind::Augment(MapParams::identity())).unwrap();
        assert!(mean_abs_diff(&img, &out, Region::InscribedDisk) < 1e-9);
    }

    #[test]
    fn channels_are_independent() {
        let gray = patterns::parallel_lines(48, 6, 1);
        let rgb = ImageGrid::from_channels(&[gray.clone(), gray.clone(), gray.clone()]).unwrap();
        let kind = WarpKind::Augment(params(0.3, 0.3, FRAC_PI_3));
        let out = warp_image(&rgb, kind).unwrap();
        let single = warp_image(&gray, kind).unwrap();
        for c in 0..3 {
            assert_eq!(out.channel(c), single);
        }
        assert_eq!(warp_image_multichannel(&rgb, kind).unwrap(), out);
    }

    #[test]
    fn red_stays_red() {
        let red = patterns::parallel_lines(48, 5, 1);
        let zero = ImageGrid::zeros(48, 1).unwrap();
        let rgb = ImageGrid::from_channels(&[red, zero.clone(), zero]).unwrap();
        let out = warp_image_multichannel(&rgb, WarpKind::Augment(params(0.1, 0.3, 3.0))).unwrap();
        let mut red_pixels = 0;
        for j in 0..48 {
            for k in 0..48 {
                let p = out.pixel(j, k);
                if p[0] > 0.5 {
                    red_pixels += 1;
                    assert_eq!((p[1], p[2]), (0.0, 0.0));
                }
            }
        }
        assert!(red_pixels > 0);
    }

    #[test]
    fn cache_matches_fresh_maps() {
        let img = patterns::linear_gradient(30, 3);
        let cache = MapCache::new();
        let kind = WarpKind::Augment(params(0.1, 0.1, FRAC_PI_3));
        assert_eq!(cache.warp(&img, kind).unwrap(), warp_image(&img, kind).unwrap());
        cache.warp(&img, kind).unwrap();
        cache.warp(&img, WarpKind::SquareToDisk).unwrap();
        assert_eq!(cache.len(), 2);
    }

    #[test]
    fn rotate_image_quarter_turn() {
        let img = patterns::linear_gradient(21, 1);
        let out = rotate_image(&img, 90.0).unwrap();
        // Output (j, k) samples the input at rotate(z, −90°) = (Im z, −Re z).
        for j in 0..21 {
            for k in 0..21 {
                assert!((out.get(j, k, 0) - img.get(k, 20 - j, 0)).abs() < 1e-9);
            }
        }
        let out = rotate_image(&img, 10.0).unwrap();
        assert_eq!(out.get(0, 0, 0), 0.0);
    }

    #[test]
    fn mismatched_map_size_is_an_error() {
        let map = WarpMap::build(8, WarpKind::SquareToDisk);
        assert!(map.apply(&ImageGrid::zeros(9, 1).unwrap()).is_err());
    }
}

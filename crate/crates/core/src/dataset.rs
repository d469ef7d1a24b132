//! Synthetic disk-counting images and dataset generation.
//!
//! Image `i` of a dataset shows `n = i mod 10 + 1` non-overlapping disks.
//! Its scene is drawn from substream `0` of substream `i` of the root
//! stream for the seed; augmentation draws (rotation angles) come from
//! substream `1` of the same image stream.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confmap::MapParams;
use crate::error::{Error, Result};
use crate::grid::{grid_coordinate, ImageGrid};
use crate::io;
use crate::rng::CounterRng;
use crate::warp::{rotate_image, MapCache, WarpKind};

pub const MAX_DISKS: usize = 10;
pub const CENTER_BOUND: f64 = 0.7;
pub const RADIUS_MIN: f64 = 0.1;
pub const RADIUS_MAX: f64 = 0.17;
pub const MIN_SEPARATION: f64 = 0.4;
/// Center draws allowed per scene, counted across restarts.
pub const DRAW_BUDGET: usize = 100_000;
/// Consecutive rejections after which a partial placement is discarded.
const RESTART_AFTER: usize = 1_000;
/// Copies per training image under rotation augmentation.
pub const ROTATION_COPIES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskScene {
    pub centers: Vec<Complex64>,
    pub radii: Vec<f64>,
}

impl DiskScene {
    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// Whether the ranges and the pairwise separation hold.
    pub fn is_valid(&self) -> bool {
        let in_box = |c: &Complex64| c.re.abs() <= CENTER_BOUND && c.im.abs() <= CENTER_BOUND;
        self.centers.len() == self.radii.len()
            && (1..=MAX_DISKS).contains(&self.n())
            && self.centers.iter().all(in_box)
            && self.radii.iter().all(|r| (RADIUS_MIN..=RADIUS_MAX).contains(r))
            && min_pair_distance(&self.centers) > MIN_SEPARATION
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.centers.iter().zip(&self.radii).any(|(c, r)| (z - c).norm() < *r)
    }
}

/// Smallest distance over distinct pairs; `+∞` for fewer than two points.
pub fn min_pair_distance(points: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

/// Draws `n` centers uniformly from `[−0.7, 0.7]²` by rejection, then `n`
/// radii uniformly from `[0.1, 0.17]`.
pub fn sample_scene(n: usize, rng: &mut CounterRng) -> Result<DiskScene> {
    if !(1..=MAX_DISKS).contains(&n) {
        return Err(Error::Config(format!("disk count {n} is outside 1..={MAX_DISKS}")));
    }
    let mut draws = 0;
    let mut centers: Vec<Complex64> = Vec::with_capacity(n);
    let mut rejected_in_a_row = 0;
    while centers.len() < n {
        if draws == DRAW_BUDGET {
            return Err(Error::Generation { n, attempts: draws });
        }
        draws += 1;
        let c = Complex64::new(rng.uniform(-CENTER_BOUND, CENTER_BOUND), rng.uniform(-CENTER_BOUND, CENTER_BOUND));
        if centers.iter().all(|p| (c - p).norm() > MIN_SEPARATION) {
            centers.push(c);
            rejected_in_a_row = 0;
        } else {
            rejected_in_a_row += 1;
            if rejected_in_a_row == RESTART_AFTER {
                centers.clear();
                rejected_in_a_row = 0;
            }
        }
    }
    let radii = (0..n).map(|_| rng.uniform(RADIUS_MIN, RADIUS_MAX)).collect();
    Ok(DiskScene { centers, radii })
}

/// Grayscale raster: 1 at grid points strictly inside some disk, else 0.
pub fn render_scene(scene: &DiskScene, size: usize) -> Result<ImageGrid> {
    let coords: Vec<f64> = (0..size).map(|i| grid_coordinate(size, i)).collect();
    ImageGrid::from_fn(size, 1, |j, k, _| if scene.contains(Complex64::new(coords[j], coords[k])) { 1.0 } else { 0.0 })
}

/// Per-output-index source pixels and weights of an area-averaging filter
/// from `from` to `to` pixels.
fn box_weights(from: usize, to: usize) -> Vec<Vec<(usize, f64)>> {
    let ratio = from as f64 / to as f64;
    (0..to)
        .map(|o| {
            let (lo, hi) = (o as f64 * ratio, (o + 1) as f64 * ratio);
            let first = lo.floor() as usize;
            let last = (hi.ceil() as usize).min(from);
            (first..last)
                .filter_map(|p| {
                    let overlap = hi.min(p as f64 + 1.0) - lo.max(p as f64);
                    (overlap > 0.0).then_some((p, overlap / ratio))
                })
                .collect()
        })
        .collect()
}

/// Box-filter downsampling: each output pixel is the area-weighted mean of
/// the input pixels it covers.
pub fn downscale(img: &ImageGrid, final_size: usize) -> Result<ImageGrid> {
    let size = img.size();
    if final_size > size {
        return Err(Error::InvalidImage(format!(
            "cannot downscale a {size}x{size} image to {final_size}x{final_size}"
        )));
    }
    if final_size == size {
        return Ok(img.clone());
    }
    let weights = box_weights(size, final_size);
    let channels = img.channels();
    // Along the first axis, then the second.
    let mut rows = vec![0.0; final_size * size * channels];
    for (o, taps) in weights.iter().enumerate() {
        for k in 0..size {
            for c in 0..channels {
                rows[(o * size + k) * channels + c] = taps.iter().map(|&(p, w)| w * img.get(p, k, c)).sum();
            }
        }
    }
    ImageGrid::from_fn(final_size, channels, |j, o, c| {
        weights[o].iter().map(|&(p, w)| w * rows[(j * size + p) * channels + c]).sum()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Augmentation {
    None,
    /// One warped copy per parameter set.
    Conformal(Vec<MapParams>),
    /// Three rotated copies, angles uniform on the open range (degrees).
    Rotation {
        min_degrees: f64,
        max_degrees: f64,
    },
}

impl Augmentation {
    pub fn conformal_default() -> Self {
        Augmentation::Conformal(MapParams::default_set())
    }

    pub fn rotation_default() -> Self {
        Augmentation::Rotation { min_degrees: -15.0, max_degrees: 15.0 }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Augmentation::None => "none",
            Augmentation::Conformal(_) => "conformal",
            Augmentation::Rotation { .. } => "rotation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub render_size: usize,
    pub final_size: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
    pub augmentation: Augmentation,
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec {
            render_size: 300,
            final_size: 128,
            train_count: 10,
            test_count: 160,
            seed: 0,
            augmentation: Augmentation::conformal_default(),
        }
    }
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        if self.final_size < 2 || self.final_size > self.render_size {
            return Err(Error::Config(format!(
                "final size {} must be between 2 and the render size {}",
                self.final_size, self.render_size
            )));
        }
        if let Augmentation::Rotation { min_degrees, max_degrees } = self.augmentation {
            let ordered = min_degrees < max_degrees;
            if !ordered {
                return Err(Error::Config(format!("rotation range ({min_degrees}, {max_degrees}) is empty")));
            }
        }
        Ok(())
    }

    pub fn total(&self) -> usize {
        self.train_count + self.test_count
    }

    /// Disk count of image `index`.
    pub fn label(index: usize) -> usize {
        index % MAX_DISKS + 1
    }
}

/// Scene of image `index` for `seed`.
pub fn scene_for(seed: u64, index: usize) -> Result<DiskScene> {
    let mut rng = CounterRng::new(seed).substream(index as u64).substream(0);
    sample_scene(DatasetSpec::label(index), &mut rng)
}

/// Rotation angles, in degrees, for training image `index`.
pub fn rotation_angles(seed: u64, index: usize, min_degrees: f64, max_degrees: f64) -> Vec<f64> {
    let mut rng = CounterRng::new(seed).substream(index as u64).substream(1);
    (0..ROTATION_COPIES).map(|_| rng.uniform_open(min_degrees, max_degrees)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
    TrainAugmented,
}

impl Split {
    pub fn dir(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
            Split::TrainAugmented => "train_augmented",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.dir())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub filename: String,
    pub n: usize,
    pub split: Split,
    pub augmentation: String,
}

pub const MANIFEST_FILE: &str = "manifest.csv";

/// Filename suffix identifying a conformal parameter set.
pub fn params_suffix(p: &MapParams) -> String {
    format!("a{:.4}_{:.4}__k{:.4}", p.alpha().re, p.alpha().im, p.k())
}

struct Generated {
    image: ImageGrid,
    row: ManifestRow,
}

fn generate_image(spec: &DatasetSpec, cache: &MapCache, index: usize) -> Result<Vec<Generated>> {
    let n = DatasetSpec::label(index);
    let scene = scene_for(spec.seed, index)?;
    let full = render_scene(&scene, spec.render_size)?;
    let base = format!("img_{index:04}_n{n:02}");
    let split = if index < spec.train_count { Split::Train } else { Split::Test };
    let mut out = vec![Generated {
        image: downscale(&full, spec.final_size)?,
        row: ManifestRow { filename: format!("{}/{base}.png", split.dir()), n, split, augmentation: "none".into() },
    }];
    if split == Split::Test {
        return Ok(out);
    }
    let augmented = |image: ImageGrid, tag: String| -> Result<Generated> {
        Ok(Generated {
            image: downscale(&image, spec.final_size)?,
            row: ManifestRow {
                filename: format!("{}/{base}__{tag}.png", Split::TrainAugmented.dir()),
                n,
                split: Split::TrainAugmented,
                augmentation: tag,
            },
        })
    };
    match &spec.augmentation {
        Augmentation::None => {}
        Augmentation::Conformal(params) => {
            for p in params {
                let warped = cache.warp(&full, WarpKind::Augment(*p))?;
                out.push(augmented(warped, params_suffix(p))?);
            }
        }
        Augmentation::Rotation { min_degrees, max_degrees } => {
            for angle in rotation_angles(spec.seed, index, *min_degrees, *max_degrees) {
                let rotated = rotate_image(&full, angle)?;
                out.push(augmented(rotated, format!("rot{angle:+.4}"))?);
            }
        }
    }
    Ok(out)
}

/// Renders every image of `spec` and writes them with `manifest.csv` under
/// `out_dir`. Returns the manifest rows in generation order.
pub fn build_dataset(spec: &DatasetSpec, out_dir: &Path) -> Result<Vec<ManifestRow>> {
    spec.validate()?;
    for split in [Split::Train, Split::Test, Split::TrainAugmented] {
        fs::create_dir_all(out_dir.join(split.dir()))?;
    }
    let cache = MapCache::new();
    let per_image = (0..spec.total())
        .into_par_iter()
        .map(|i| {
            let generated = generate_image(spec, &cache, i)?;
            for g in &generated {
                io::write_image(out_dir.join(&g.row.filename), &g.image)?;
            }
            Ok(generated.into_iter().map(|g| g.row).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<ManifestRow> = per_image.into_iter().flatten().collect();
    // Train and test first, augmented copies last.
    rows.sort_by_key(|r| r.split == Split::TrainAugmented);
    write_manifest(&out_dir.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    Ok(reader.deserialize().collect::<std::result::Result<_, _>>()?)
}

//! Image comparisons and connected-component counting.

use std::collections::VecDeque;

use crate::grid::ImageGrid;

/// Which pixels a comparison looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    All,
    /// Grid points with `|z| < 1`.
    InscribedDisk,
}

impl Region {
    fn contains(self, img: &ImageGrid, j: usize, k: usize) -> bool {
        match self {
            Region::All => true,
            Region::InscribedDisk => img.point(j, k).norm_sqr() < 1.0,
        }
    }
}

fn paired_diffs<'a>(a: &'a ImageGrid, b: &'a ImageGrid, region: Region) -> impl Iterator<Item = f64> + 'a {
    assert_eq!((a.size(), a.channels()), (b.size(), b.channels()), "image shapes differ");
    let size = a.size();
    (0..size)
        .flat_map(move |j| (0..size).map(move |k| (j, k)))
        .filter(move |&(j, k)| region.contains(a, j, k))
        .flat_map(move |(j, k)| a.pixel(j, k).iter().zip(b.pixel(j, k)).map(|(x, y)| x - y))
}

pub fn mean_abs_diff(a: &ImageGrid, b: &ImageGrid, region: Region) -> f64 {
    let (sum, n) = paired_diffs(a, b, region).fold((0.0, 0usize), |(s, n), d| (s + d.abs(), n + 1));
    sum / n.max(1) as f64
}

/// Peak signal-to-noise ratio in dB for peak value 1. Identical images give
/// `+∞`.
pub fn psnr(a: &ImageGrid, b: &ImageGrid, region: Region) -> f64 {
    let (sum, n) = paired_diffs(a, b, region).fold((0.0, 0usize), |(s, n), d| (s + d * d, n + 1));
    let mse = sum / n.max(1) as f64;
    -10.0 * mse.log10()
}

/// Number of 4-connected components of pixels in `channel` strictly above
/// `threshold`.
pub fn count_components(img: &ImageGrid, channel: usize, threshold: f64) -> usize {
    let size = img.size();
    let mut seen = vec![false; size * size];
    let mut queue = VecDeque::new();
    let mut count = 0;
    for start in 0..size * size {
        if seen[start] || img.get(start / size, start % size, channel) <= threshold {
            continue;
        }
        count += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            let (j, k) = (i / size, i % size);
            let mut visit = |jj: usize, kk: usize| {
                let n = jj * size + kk;
                if !seen[n] && img.get(jj, kk, channel) > threshold {
                    seen[n] = true;
                    queue.push_back(n);
                }
            };
            if j > 0 {
                visit(j - 1, k);
            }
            if j + 1 < size {
                visit(j + 1, k);
            }
            if k > 0 {
                visit(j, k - 1);
            }
            if k + 1 < size {
                visit(j, k + 1);
            }
        }
    }
    count
}

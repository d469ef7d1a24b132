//! Numerical self-checks grouped into suites, with residuals and thresholds.
//!
//! The confmap and warp suites take their map constants as an argument so a
//! deliberately perturbed `L` can be shown to fail.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::analysis::{mean_abs_diff, psnr, Region};
use crate::confmap::{self, MapConstants, MapParams};
use crate::elliptic;
use crate::error::{Error, Result};
use crate::grid::ImageGrid;
use crate::patterns;
use crate::quadrature;
use crate::rng::CounterRng;
use crate::warp::{WarpKind, WarpMap};

const SEED: u64 = 0x5e1f_7e57;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Elliptic,
    Confmap,
    Warp,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Elliptic, Suite::Confmap, Suite::Warp];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Elliptic => "elliptic",
            Suite::Confmap => "confmap",
            Suite::Warp => "warp",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?} (expected elliptic, confmap or warp)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `value <= threshold`.
    AtMost,
    /// Passes when `value >= threshold`.
    AtLeast,
    /// Passes when `value < threshold`.
    Below,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub name: &'static str,
    pub value: f64,
    pub bound: Bound,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn new(suite: Suite, name: &'static str, value: f64, bound: Bound, threshold: f64) -> Self {
        Check { suite, name, value, bound, threshold, detail: String::new() }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.threshold,
            Bound::AtLeast => self.value >= self.threshold,
            Bound::Below => self.value < self.threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
            Bound::Below => "<",
        };
        write!(
            f,
            "{:<4} {:<9} {:<34} {:>10.3e} (needs {op} {:.2e})",
            if self.passed() { "ok" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.threshold
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(f, "{check}")?;
        }
        for note in &self.notes {
            writeln!(f, "note: {note}")?;
        }
        Ok(())
    }
}

/// `Γ(1/4)²`.
pub fn gamma_quarter_squared() -> f64 {
    libm::tgamma(0.25).powi(2)
}

/// Real 2×2 Jacobian `∂(u, v)/∂(x, y)` of a planar map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian {
    pub du_dx: f64,
    pub du_dy: f64,
    pub dv_dx: f64,
    pub dv_dy: f64,
}

impl Jacobian {
    pub fn determinant(&self) -> f64 {
        self.du_dx * self.dv_dy - self.du_dy * self.dv_dx
    }

    /// Singular values, largest first.
    pub fn singular_values(&self) -> (f64, f64) {
        let conformal = (self.du_dx + self.dv_dy).hypot(self.dv_dx - self.du_dy);
        let anti = (self.du_dx - self.dv_dy).hypot(self.dv_dx + self.du_dy);
        ((conformal + anti) / 2.0, (conformal - anti).abs() / 2.0)
    }

    pub fn singular_value_ratio(&self) -> f64 {
        let (hi, lo) = self.singular_values();
        hi / lo
    }
}

/// Central-difference Jacobian of `f` at `z` with step `h`.
pub fn jacobian(constants: &MapConstants, z: Complex64, h: f64) -> Result<Jacobian> {
    let f = |p: Complex64| constants.square_to_disk(p);
    let dx = (f(z + h)? - f(z - h)?) / (2.0 * h);
    let i_h = Complex64::new(0.0, h);
    let dy = (f(z + i_h)? - f(z - i_h)?) / (2.0 * h);
    Ok(Jacobian { du_dx: dx.re, du_dy: dy.re, dv_dx: dx.im, dv_dy: dy.im })
}

fn max_over<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, |acc, v| if v.is_nan() { f64::INFINITY } else { acc.max(v) })
}

fn square_point(rng: &mut CounterRng, bound: f64) -> Complex64 {
    Complex64::new(rng.uniform_open(-bound, bound), rng.uniform_open(-bound, bound))
}

pub fn elliptic_suite() -> Report {
    let suite = Suite::Elliptic;
    let mut rng = CounterRng::new(SEED).substream(0);
    let mut report = Report::default();

    let k = elliptic::complete_k(0.5).unwrap_or(f64::NAN);
    let oracle = quadrature::complete_k(0.5);
    report.checks.push(
        Check::new(suite, "K(0.5) vs quadrature", (k - oracle).abs(), Bound::AtMost, 1e-11)
            .with_detail(format!("K(0.5) = {k:.16}, quadrature {oracle:.16}")),
    );
    let g = gamma_quarter_squared();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    report.notes.push(format!(
        "Γ(1/4)²/(4√π) = {:.16} (differs from K(0.5) by {:.1e})",
        g / (4.0 * sqrt_pi),
        (g / (4.0 * sqrt_pi) - k).abs()
    ));
    report.notes.push(format!(
        "Γ(1/4)²/(4π)  = {:.16} (differs from K(0.5) by {:.1e})",
        g / (4.0 * std::f64::consts::PI),
        (g / (4.0 * std::f64::consts::PI) - k).abs()
    ));

    let k_sweep = max_over((1..20).map(|i| {
        let m = i as f64 / 20.0;
        let k = elliptic::complete_k(m).unwrap_or(f64::NAN);
        (k - quadrature::complete_k(m)).abs()
    }));
    report.checks.push(Check::new(suite, "K(m) vs quadrature, m = 0.05..0.95", k_sweep, Bound::AtMost, 1e-11));

    let (mut pythagoras, mut modulus) = (0.0f64, 0.0f64);
    let mut real_axis = 0.0f64;
    for _ in 0..1000 {
        let m = rng.next_f64();
        let u = rng.uniform(-10.0, 10.0);
        let t = elliptic::jacobi(u, m).expect("m is in [0, 1)");
        pythagoras = max_over([pythagoras, (t.sn * t.sn + t.cn * t.cn - 1.0).abs()]);
        modulus = max_over([modulus, (t.dn * t.dn + m * t.sn * t.sn - 1.0).abs()]);
        let residual = match elliptic::jacobi_sn_dn_complex(Complex64::new(u, 0.0), m) {
            Ok((sn, dn)) => (sn - t.sn).norm().max((dn - t.dn).norm()),
            Err(_) => f64::INFINITY,
        };
        real_axis = max_over([real_axis, residual]);
    }
    report.checks.push(Check::new(suite, "sn² + cn² = 1", pythagoras, Bound::AtMost, 1e-12));
    report.checks.push(Check::new(suite, "dn² + m·sn² = 1", modulus, Bound::AtMost, 1e-12));
    report.checks.push(Check::new(suite, "complex sn, dn on the real axis", real_axis, Bound::AtMost, 1e-13));

    let complex_f = max_over((0..100).map(|_| {
        let z = square_point(&mut rng, 1.0);
        match elliptic::incomplete_f_complex(z, 0.5) {
            Ok(v) => (v - quadrature::incomplete_f_complex(z, 0.5)).norm(),
            Err(_) => f64::INFINITY,
        }
    }));
    report.checks.push(Check::new(suite, "complex F vs path quadrature", complex_f, Bound::AtMost, 1e-8));
    report
}

pub fn confmap_suite(constants: &MapConstants) -> Report {
    let suite = Suite::Confmap;
    let mut rng = CounterRng::new(SEED).substream(1);
    let mut report = Report::default();
    let round_trip = |z: Complex64| match constants.square_to_disk(z).and_then(|w| constants.disk_to_square(w)) {
        Ok(back) => (back - z).norm(),
        Err(_) => f64::INFINITY,
    };

    let interior = max_over((0..2000).map(|_| round_trip(square_point(&mut rng, 0.99))));
    report.checks.push(Check::new(suite, "round trip, interior", interior, Bound::Below, 1e-8));

    let band = max_over((0..500).map(|_| {
        let depth = rng.uniform_open(0.0, 0.01);
        let along = rng.uniform_open(-1.0, 1.0) * (1.0 - depth);
        let z = match rng.next_u64() % 4 {
            0 => Complex64::new(1.0 - depth, along),
            1 => Complex64::new(-1.0 + depth, along),
            2 => Complex64::new(along, 1.0 - depth),
            _ => Complex64::new(along, -1.0 + depth),
        };
        round_trip(z)
    }));
    report.checks.push(Check::new(suite, "round trip, boundary band", band, Bound::Below, 1e-6));

    let disk = max_over(
        (0..2000).map(|_| constants.square_to_disk(square_point(&mut rng, 1.0)).map_or(f64::INFINITY, |w| w.norm())),
    );
    report.checks.push(
        Check::new(suite, "open square into open disk, max |f|", disk, Bound::Below, 1.0)
            .with_detail(format!("1 − max |f| = {:.1e}", 1.0 - disk)),
    );

    let mut isotropy = 0.0f64;
    let mut min_det = f64::INFINITY;
    for _ in 0..200 {
        match jacobian(constants, square_point(&mut rng, 0.9999), 1e-6) {
            Ok(jac) => {
                isotropy = max_over([isotropy, jac.singular_value_ratio() - 1.0]);
                min_det = min_det.min(jac.determinant());
            }
            Err(_) => isotropy = f64::INFINITY,
        }
    }
    let edge = max_over((0..=400).map(|i| {
        // Walk the boundary counter-clockwise, vertices included.
        let t = i as f64 / 100.0;
        let (side, s) = ((t.floor() as usize).min(3), 2.0 * t.fract() - 1.0);
        let s = if i == 400 { 1.0 } else { s };
        let z = match side {
            0 => Complex64::new(1.0, s),
            1 => Complex64::new(-s, 1.0),
            2 => Complex64::new(-1.0, -s),
            _ => Complex64::new(s, -1.0),
        };
        constants.square_to_disk(z).map_or(f64::INFINITY, |w| (w.norm() - 1.0).abs())
    }));
    let orientation = if min_det > 0.0 { 0.0 } else { f64::INFINITY };
    report.checks.push(
        Check::new(suite, "conformality", max_over([isotropy, edge, orientation]), Bound::AtMost, 1e-4).with_detail(
            format!("σ₁/σ₂ − 1 = {isotropy:.2e}, max ||f| − 1| on ∂G = {edge:.2e}, min det = {min_det:.2e}"),
        ),
    );

    let mobius = max_over((0..200).map(|_| {
        let alpha = Complex64::from_polar(0.999 * rng.next_f64().sqrt(), rng.uniform(0.0, std::f64::consts::TAU));
        let at_alpha = confmap::mobius(alpha, alpha).map_or(f64::INFINITY, |w| w.norm());
        let at_zero = confmap::mobius(Complex64::new(0.0, 0.0), alpha).map_or(f64::INFINITY, |w| (w + alpha).norm());
        at_alpha.max(at_zero)
    }));
    report.checks.push(Check::new(suite, "Möbius g(α) = 0, g(0) = −α", mobius, Bound::AtMost, f64::EPSILON));

    let mut params = MapParams::default_set();
    params.push(MapParams::new(Complex64::new(0.3, 0.3), std::f64::consts::FRAC_PI_3).expect("valid parameters"));
    let augment = max_over(params.iter().flat_map(|p| {
        let zs: Vec<_> = (0..300).map(|_| square_point(&mut rng, 0.99)).collect();
        zs.into_iter().map(move |z| {
            constants
                .forward_augment_point(z, p)
                .and_then(|w| constants.pullback_augment_point(w, p))
                .map_or(f64::INFINITY, |back| (back - z).norm())
        })
    }));
    report.checks.push(Check::new(suite, "augment pullback after forward", augment, Bound::Below, 1e-7));
    report
}

fn warp_with(constants: &MapConstants, img: &ImageGrid, kind: WarpKind) -> Result<ImageGrid> {
    WarpMap::from_fn(img.size(), |z| kind.source_point_with(constants, z)).apply(img)
}

pub fn warp_suite(constants: &MapConstants) -> Report {
    let suite = Suite::Warp;
    let mut report = Report::default();
    let run = || -> Result<Vec<Check>> {
        let gradient = patterns::linear_gradient(128, 1);
        let identity = warp_with(constants, &gradient, WarpKind::Augment(MapParams::identity()))?;
        let db = psnr(&gradient, &identity, Region::InscribedDisk);

        let lines = patterns::parallel_lines(128, 4, 1);
        let p = MapParams::new(Complex64::new(0.3, 0.3), std::f64::consts::FRAC_PI_3)?;
        let single = warp_with(constants, &lines, WarpKind::Augment(p))?;
        let out_of_range = single.data().iter().filter(|v| !(0.0..=1.0).contains(*v)).count();
        let on_disk = warp_with(constants, &lines, WarpKind::SquareToDisk)?;
        let mut leaks = 0;
        for j in 0..on_disk.size() {
            for k in 0..on_disk.size() {
                if on_disk.point(j, k).norm_sqr() >= 1.0 && on_disk.get(j, k, 0) != 0.0 {
                    leaks += 1;
                }
            }
        }

        let moved = warp_with_disk_motion(&on_disk, &p)?;
        let back = warp_with(constants, &moved, WarpKind::DiskToSquare)?;
        let staged = mean_abs_diff(&single, &back, Region::InscribedDisk);

        Ok(vec![
            Check::new(suite, "identity augmentation PSNR (dB)", db, Bound::AtLeast, 40.0),
            Check::new(suite, "output values outside [0, 1]", out_of_range as f64, Bound::AtMost, 0.0),
            Check::new(suite, "nonzero pixels outside the disk", leaks as f64, Bound::AtMost, 0.0),
            Check::new(suite, "single pass vs three passes", staged, Bound::Below, 4.0 / 255.0),
        ])
    };
    match run() {
        Ok(checks) => report.checks = checks,
        Err(e) => report
            .checks
            .push(Check::new(suite, "warp pipeline", f64::INFINITY, Bound::AtMost, 0.0).with_detail(e.to_string())),
    }
    report
}

/// Resamples a disk image through `g⁻¹ ∘ υ₋ₖ`, zero outside the disk.
fn warp_with_disk_motion(img: &ImageGrid, p: &MapParams) -> Result<ImageGrid> {
    WarpMap::from_fn(img.size(), |z| if z.norm_sqr() < 1.0 { confmap::disk_pullback(z, p).ok() } else { None })
        .apply(img)
}

/// Runs the requested suites in order and merges their reports.
pub fn run(suites: &[Suite], constants: &MapConstants) -> Report {
    let mut report = Report::default();
    for suite in suites {
        let part = match suite {
            Suite::Elliptic => elliptic_suite(),
            Suite::Confmap => confmap_suite(constants),
            Suite::Warp => warp_suite(constants),
        };
        report.checks.extend(part.checks);
        report.notes.extend(part.notes);
    }
    report
}

//! Conformal map of the square `G = (−1, 1)²` onto the unit disk, its
//! inverse, and the disk automorphisms used for augmentation.
//!
//! ```text
//! f(z)    = sn(√2 L z | m) / (√2 e^{iπ/4} dn(√2 L z | m))
//! f⁻¹(w)  = F(√2 e^{iπ/4} w / √(1 + i w²) | m) / (√2 L)      (F in sine form)
//! g_α(w)  = (w − α) / (1 − ᾱ w)
//! υ_k(w)  = w e^{ik}
//! ```
//!
//! with `m = 1/2` and `L = K(1/2) e^{iπ/4} / 2`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::{self, jacobi_complex_parts};
use crate::error::{Error, Result};

/// The constants `r`, `m = r²` and `L` of the square-to-disk map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapConstants {
    pub r: f64,
    pub m: f64,
    pub l: Complex64,
}

impl MapConstants {
    fn compute() -> Self {
        let r = FRAC_1_SQRT_2;
        let m = 0.5;
        let k = elliptic::complete_k(m).expect("m = 1/2 is in range");
        MapConstants { r, m, l: Complex64::from_polar(0.5 * k, FRAC_PI_4) }
    }

    /// The constants shared by every caller, computed once from `K(1/2)`.
    pub fn standard() -> &'static MapConstants {
        static CONSTANTS: OnceLock<MapConstants> = OnceLock::new();
        CONSTANTS.get_or_init(Self::compute)
    }

    /// Copy with `L` multiplied by `factor`. Only useful for exercising the
    /// self-test's failure path.
    pub fn with_scaled_l(&self, factor: f64) -> Self {
        MapConstants { l: self.l * factor, ..*self }
    }

    /// `f: G → B²`, accepting the closed square.
    pub fn square_to_disk(&self, z: Complex64) -> Result<Complex64> {
        if !in_closed_square(z) {
            return Err(Error::OutsideSquare(z));
        }
        let scaled = SQRT_2 * self.l * z;
        let denominator_factor = Complex64::from_polar(SQRT_2, FRAC_PI_4);
        let parts = jacobi_complex_parts(scaled, self.m);
        let w = if parts.delta != 0.0 {
            let sn = parts.sn_num / parts.delta;
            let dn = parts.dn_num / parts.delta;
            sn / (denominator_factor * dn)
        } else {
            // δ cancels between sn and dn.
            parts.sn_num / (denominator_factor * parts.dn_num)
        };
        if w.re.is_finite() && w.im.is_finite() {
            return Ok(w);
        }
        // Both sn and dn have a pole at the vertices ±(1 + i); use the
        // symmetry f(iz) = i f(z) of the square, valid for m = 1/2.
        let rotated = self.square_to_disk(Complex64::new(z.im, -z.re))?;
        Ok(Complex64::i() * rotated)
    }

    /// `f⁻¹: B² → G`; requires `|w| < 1`.
    pub fn disk_to_square(&self, w: Complex64) -> Result<Complex64> {
        let inside = w.norm_sqr() < 1.0;
        if !inside {
            return Err(Error::OutsideDisk(w));
        }
        let i = Complex64::i();
        // Re(1 + i w²) ≥ 1 − |w|² > 0 keeps the principal root off its cut.
        let sine = Complex64::from_polar(SQRT_2, FRAC_PI_4) * w / (1.0 + i * w * w).sqrt();
        let amplitude = sine.asin();
        let integral = elliptic::incomplete_f_complex(amplitude, self.m)?;
        let z = integral / (SQRT_2 * self.l);
        Ok(Complex64::new(z.re.clamp(-1.0, 1.0), z.im.clamp(-1.0, 1.0)))
    }

    /// Where the point `z` of the source image lands in the augmented image:
    /// `f⁻¹ ∘ υ_k ∘ g_α ∘ f`.
    pub fn forward_augment_point(&self, z: Complex64, params: &MapParams) -> Result<Complex64> {
        let w = self.square_to_disk(z)?;
        let w = rotate(mobius(w, params.alpha)?, params.k);
        self.disk_to_square(w)
    }

    /// The inverse of [`Self::forward_augment_point`],
    /// `f⁻¹ ∘ g_α⁻¹ ∘ υ_{−k} ∘ f`; this is what a pull-back warp samples.
    pub fn pullback_augment_point(&self, z: Complex64, params: &MapParams) -> Result<Complex64> {
        let w = self.square_to_disk(z)?;
        self.disk_to_square(disk_pullback(w, params)?)
    }
}

pub fn in_closed_square(z: Complex64) -> bool {
    z.re.abs() <= 1.0 && z.im.abs() <= 1.0
}

/// `f(z)` with the standard constants.
pub fn square_to_disk(z: Complex64) -> Result<Complex64> {
    MapConstants::standard().square_to_disk(z)
}

/// `f⁻¹(w)` with the standard constants.
pub fn disk_to_square(w: Complex64) -> Result<Complex64> {
    MapConstants::standard().disk_to_square(w)
}

pub fn forward_augment_point(z: Complex64, params: &MapParams) -> Result<Complex64> {
    MapConstants::standard().forward_augment_point(z, params)
}

pub fn pullback_augment_point(z: Complex64, params: &MapParams) -> Result<Complex64> {
    MapConstants::standard().pullback_augment_point(z, params)
}

fn check_center(alpha: Complex64) -> Result<()> {
    if alpha.norm_sqr() < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidMobiusCenter(alpha))
    }
}

/// Disk automorphism `g(w) = (w − α)/(1 − ᾱ w)`; `g(α) = 0`, `g(0) = −α`.
pub fn mobius(w: Complex64, alpha: Complex64) -> Result<Complex64> {
    check_center(alpha)?;
    Ok((w - alpha) / (1.0 - alpha.conj() * w))
}

/// `g⁻¹(w) = (w + α)/(1 + ᾱ w)`.
pub fn mobius_inverse(w: Complex64, alpha: Complex64) -> Result<Complex64> {
    check_center(alpha)?;
    Ok((w + alpha) / (1.0 + alpha.conj() * w))
}

/// Rotation about the origin, `w e^{ik}`.
pub fn rotate(w: Complex64, k: f64) -> Complex64 {
    w * Complex64::from_polar(1.0, k)
}

/// `(υ_k ∘ g_α)⁻¹(w) = g_α⁻¹(υ_{−k}(w))`, the disk part of the pull-back.
pub fn disk_pullback(w: Complex64, params: &MapParams) -> Result<Complex64> {
    mobius_inverse(rotate(w, -params.k), params.alpha)
}

/// One augmentation: a Möbius center `α` with `|α| < 1` and a rotation
/// angle `k ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapParams", into = "RawMapParams")]
pub struct MapParams {
    alpha: Complex64,
    k: f64,
}

impl MapParams {
    pub fn new(alpha: Complex64, k: f64) -> Result<Self> {
        check_center(alpha)?;
        if !(alpha.re.is_finite() && alpha.im.is_finite() && k.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut k = k.rem_euclid(TAU);
        if k >= TAU {
            k = 0.0;
        }
        Ok(MapParams { alpha, k })
    }

    pub fn identity() -> Self {
        MapParams { alpha: Complex64::new(0.0, 0.0), k: 0.0 }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// The three (α, k) pairs used to augment the synthetic training set:
    /// `(0.1 + 0.1i, π/3)`, `(0.1 + 0.3i, π)`, `(0.3 + 0.3i, 3π/2)`.
    pub fn default_set() -> Vec<MapParams> {
        use std::f64::consts::PI;
        [(0.1, 0.1, PI / 3.0), (0.1, 0.3, PI), (0.3, 0.3, 1.5 * PI)]
            .into_iter()
            .map(|(re, im, k)| MapParams::new(Complex64::new(re, im), k).expect("valid constants"))
            .collect()
    }
}

/// On-disk form of [`MapParams`]. `k` is either radians or a string
/// `"pi:<multiple>"`, where the multiple may be a decimal or a fraction
/// (`"pi:1/3"`, `"pi:1.5"`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawMapParams {
    #[serde(default)]
    pub alpha_re: f64,
    #[serde(default)]
    pub alpha_im: f64,
    #[serde(default)]
    pub k: Angle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Radians(f64),
    Text(String),
}

impl Default for Angle {
    fn default() -> Self {
        Angle::Radians(0.0)
    }
}

impl Angle {
    pub fn radians(&self) -> Result<f64> {
        match self {
            Angle::Radians(v) => Ok(*v),
            Angle::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `"1.047"`, `"pi:1/3"`, `"pi:1.5"` or `"pi"` into radians.
pub fn parse_angle(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || Error::Config(format!("cannot parse angle {text:?}"));
    let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    match text.strip_prefix("pi:") {
        Some(multiple) => {
            let factor = match multiple.split_once('/') {
                Some((num, den)) => number(num)? / number(den)?,
                None => number(multiple)?,
            };
            Ok(factor * std::f64::consts::PI)
        }
        None if text == "pi" => Ok(std::f64::consts::PI),
        None => number(text),
    }
}

impl TryFrom<RawMapParams> for MapParams {
    type Error = Error;

    fn try_from(raw: RawMapParams) -> Result<Self> {
        MapParams::new(Complex64::new(raw.alpha_re, raw.alpha_im), raw.k.radians()?)
    }
}

impl From<MapParams> for RawMapParams {
    fn from(p: MapParams) -> Self {
        RawMapParams { alpha_re: p.alpha.re, alpha_im: p.alpha.im, k: Angle::Radians(p.k) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constants() {
        let k = MapConstants::standard();
        assert!((k.m - k.r * k.r).abs() <= f64::EPSILON);
        assert!((k.l.arg() - FRAC_PI_4).abs() < 1e-15);
        assert!((k.l.norm() - elliptic::complete_k(0.5).unwrap() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn origin_maps_to_origin() {
        assert_eq!(square_to_disk(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(disk_to_square(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn maps_are_odd() {
        for z in [c(0.3, -0.7), c(-0.9, 0.2), c(0.5, 0.5)] {
            let a = square_to_disk(z).unwrap();
            let b = square_to_disk(-z).unwrap();
            assert!((a + b).norm() < 1e-15);
            let w = c(0.2, 0.6) * z;
            assert!((disk_to_square(w).unwrap() + disk_to_square(-w).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn vertices_and_edges_reach_the_circle() {
        for v in [c(1.0, 1.0), c(1.0, -1.0), c(-1.0, 1.0), c(-1.0, -1.0)] {
            let w = square_to_disk(v).unwrap();
            assert!((w.norm() - 1.0).abs() < 1e-9, "{v} -> {w}");
        }
        for t in [-0.8, -0.3, 0.0, 0.45, 0.99] {
            for z in [c(1.0, t), c(t, -1.0)] {
                assert!((square_to_disk(z).unwrap().norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_points_outside_domains() {
        assert!(matches!(square_to_disk(c(1.01, 0.0)), Err(Error::OutsideSquare(_))));
        assert!(matches!(disk_to_square(c(0.6, 0.8)), Err(Error::OutsideDisk(_))));
        assert!(matches!(disk_to_square(c(f64::NAN, 0.0)), Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn round_trip_on_sample_point() {
        let z = c(0.35, -0.2);
        let back = disk_to_square(square_to_disk(z).unwrap()).unwrap();
        assert!((back - z).norm() < 1e-8, "{back}");
    }

    #[test]
    fn round_trip_on_diagonals() {
        // Re(arcsin ŵ) vanishes exactly on the diagonal Re z = Im z.
        for t in [-0.95, -0.4, 0.01, 0.3, 0.77] {
            for z in [c(t, t), c(t, -t)] {
                let back = disk_to_square(square_to_disk(z).unwrap()).unwrap();
                assert!((back - z).norm() < 1e-12, "{z} -> {back}");
            }
        }
    }

    #[test]
    fn mobius_fixed_values() {
        let alpha = c(0.3, -0.45);
        assert_eq!(mobius(alpha, alpha).unwrap(), c(0.0, 0.0));
        assert_eq!(mobius(c(0.0, 0.0), alpha).unwrap(), -alpha);
        assert_eq!(mobius_inverse(c(0.0, 0.0), alpha).unwrap(), alpha);
        let w = c(0.2, 0.1);
        assert_eq!(mobius(w, c(0.0, 0.0)).unwrap(), w);
        assert_eq!(mobius_inverse(w, c(0.0, 0.0)).unwrap(), w);
        assert!(matches!(mobius(w, c(1.0, 0.0)), Err(Error::InvalidMobiusCenter(_))));
        assert!(matches!(mobius_inverse(w, c(0.9, 0.9)), Err(Error::InvalidMobiusCenter(_))));
    }

    #[test]
    fn rotation_values() {
        let w = c(0.3, 0.4);
        assert_eq!(rotate(w, 0.0), w);
        assert!((rotate(w, PI) + w).norm() < 1e-15);
        assert!((rotate(c(1.0, 0.0), FRAC_PI_2) - Complex64::i()).norm() < 1e-15);
    }

    #[test]
    fn params_validate_and_normalize() {
        assert!(MapParams::new(c(1.2, 0.0), 0.0).is_err());
        let p = MapParams::new(c(0.1, 0.0), -FRAC_PI_2).unwrap();
        assert!((p.k() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(MapParams::new(c(0.0, 0.0), TAU).unwrap().k(), 0.0);
        assert_eq!(MapParams::new(c(0.0, 0.0), -1e-300).unwrap().k(), 0.0);
    }

    #[test]
    fn angle_parsing() {
        assert!((parse_angle("pi:1/3").unwrap() - FRAC_PI_3).abs() < 1e-15);
        assert!((parse_angle("pi:1.5").unwrap() - 1.5 * PI).abs() < 1e-15);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle(" 0.25 ").unwrap(), 0.25);
        assert!(parse_angle("pi:x").is_err());
        assert!(parse_angle("tau").is_err());
    }

    #[test]
    fn augment_identity_and_center() {
        let id = MapParams::identity();
        let z = c(0.42, -0.61);
        assert!((forward_augment_point(z, &id).unwrap() - z).norm() < 1e-8);
        assert!((pullback_augment_point(z, &id).unwrap() - z).norm() < 1e-8);
        let spin = MapParams::new(c(0.0, 0.0), FRAC_PI_3).unwrap();
        assert_eq!(forward_augment_point(c(0.0, 0.0), &spin).unwrap(), c(0.0, 0.0));
        let shift = MapParams::new(c(0.2, -0.1), 0.0).unwrap();
        let expected = disk_to_square(c(0.2, -0.1)).unwrap();
        assert!((pullback_augment_point(c(0.0, 0.0), &shift).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn forward_augment_matches_manual_composition() {
        let p = MapParams::new(c(0.3, 0.3), FRAC_PI_3).unwrap();
        let z = c(0.5, 0.5);
        let w = square_to_disk(z).unwrap();
        let w = (w - p.alpha()) / (1.0 - p.alpha().conj() * w);
        let w = w * Complex64::new(FRAC_PI_3.cos(), FRAC_PI_3.sin());
        let expected = disk_to_square(w).unwrap();
        assert!((forward_augment_point(z, &p).unwrap() - expected).norm() < 1e-14);
    }
}

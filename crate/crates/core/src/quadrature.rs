//! Adaptive Gauss–Kronrod quadrature and the elliptic integrals written
//! directly as integrals.
//!
//! Nothing here touches the AGM code in [`crate::elliptic`]; the functions
//! serve as independent reference values for tests and the self-test report.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;

// 15-point Kronrod nodes on [0, 1] (the rule is symmetric) and weights;
// odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 40;

fn kronrod15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = half * XGK[i];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[i];
        if i % 2 == 1 {
            gauss += pair * WG[i / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

fn adapt<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Complex64 {
    let (value, err) = kronrod15(f, a, b);
    if err <= tol || depth >= MAX_DEPTH {
        return value;
    }
    let mid = 0.5 * (a + b);
    adapt(f, a, mid, 0.5 * tol, depth + 1) + adapt(f, mid, b, 0.5 * tol, depth + 1)
}

/// Integrates a complex-valued function over `[a, b]` to absolute tolerance
/// `tol` (as estimated by the Gauss/Kronrod difference).
pub fn integrate_complex<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: f64) -> Complex64 {
    adapt(&f, a, b, tol, 0)
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    adapt(&|t| Complex64::new(f(t), 0.0), a, b, tol, 0).re
}

/// `K(m) = ∫₀¹ dt / √((1 − t²)(1 − m t²))`, integrated after `t = 1 − s²`
/// to remove the endpoint singularity.
pub fn complete_k(m: f64) -> f64 {
    integrate(
        |s| {
            let t = 1.0 - s * s;
            2.0 / ((2.0 - s * s) * (1.0 - m * t * t)).sqrt()
        },
        0.0,
        1.0,
        1e-15,
    )
}

/// `F(φ | m) = ∫₀^φ dθ / √(1 − m sin² θ)`.
pub fn incomplete_f(phi: f64, m: f64) -> f64 {
    integrate(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 1e-15)
}

/// `F(z | m)` along the straight segment from 0 to `z`, principal square
/// root throughout. Valid while `1 − m sin²(tz)` stays off the negative real
/// axis, which holds for `z` in `(−1, 1)²` and `m ≤ 1/2`.
pub fn incomplete_f_complex(z: Complex64, m: f64) -> Complex64 {
    integrate_complex(
        |t| {
            let s = (z * t).sin();
            z / (Complex64::new(1.0, 0.0) - s * s * m).sqrt()
        },
        0.0,
        1.0,
        1e-14,
    )
}

//! Elliptic integrals of the first kind and the Jacobi elliptic functions.
//!
//! All functions use the parameter convention `m = k²`, with complement
//! `m₁ = 1 − m`. Real-argument values are computed with the
//! arithmetic-geometric mean (descending Landen transformation). Complex
//! arguments are reduced to real-argument evaluations:
//!
//! * `sn(x + iy | m)` and `dn(x + iy | m)` through the addition formulas,
//!   which need `sn, cn, dn` at `(x | m)` and at `(y | m₁)`;
//! * `F(x + iy | m) = F(x₁ | m) + i F(y₁ | m₁)`, where `cot² x₁` is the
//!   positive root of a quadratic in the real and imaginary parts.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default shift used by [`incomplete_f_complex_eps_shift`] to step off the
/// singularity of `cot x` at `x = 0`.
pub const EPSILON_SHIFT: f64 = 1e-5;

const MAX_AGM_STEPS: usize = 48;

/// A validated elliptic parameter `m ∈ [0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticParameter(f64);

impl EllipticParameter {
    pub fn new(m: f64) -> Result<Self> {
        if (0.0..1.0).contains(&m) {
            Ok(Self(m))
        } else {
            Err(Error::ParameterOutOfRange(m))
        }
    }

    pub fn m(self) -> f64 {
        self.0
    }

    /// `m₁ = 1 − m`, always in `(0, 1]`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

impl TryFrom<f64> for EllipticParameter {
    type Error = Error;

    fn try_from(m: f64) -> Result<Self> {
        Self::new(m)
    }
}

/// Values of `sn`, `cn` and `dn` at one real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Arithmetic-geometric mean ladder started from `a₀ = 1`, `b₀ = √m₁`,
/// `c₀ = √m`.
struct Ladder {
    a: [f64; MAX_AGM_STEPS + 1],
    b: [f64; MAX_AGM_STEPS + 1],
    c: [f64; MAX_AGM_STEPS + 1],
    steps: usize,
}

impl Ladder {
    fn new(m: f64) -> Self {
        let mut ladder =
            Ladder { a: [0.0; MAX_AGM_STEPS + 1], b: [0.0; MAX_AGM_STEPS + 1], c: [0.0; MAX_AGM_STEPS + 1], steps: 0 };
        ladder.a[0] = 1.0;
        ladder.b[0] = (1.0 - m).sqrt();
        ladder.c[0] = m.sqrt();
        let mut n = 0;
        while n < MAX_AGM_STEPS && ladder.c[n] > f64::EPSILON * ladder.a[n] {
            let (a, b, c) = (ladder.a[n], ladder.b[n], ladder.c[n]);
            let a_next = 0.5 * (a + b);
            ladder.a[n + 1] = a_next;
            ladder.b[n + 1] = (a * b).sqrt();
            // c_{n+1} = (a_n − b_n)/2, written without the cancellation.
            ladder.c[n + 1] = c * c / (4.0 * a_next);
            n += 1;
        }
        ladder.steps = n;
        ladder
    }

    fn complete_k(&self) -> f64 {
        PI / (2.0 * self.a[self.steps])
    }

    /// `F(φ | m)` for `φ ∈ [0, π/2]` by the Landen angle doubling
    /// `tan(φ_{n+1} − φ_n) = (b_n / a_n) tan φ_n`.
    fn incomplete_f(&self, phi: f64) -> f64 {
        let mut phi = phi;
        let mut scale = 1.0;
        for n in 0..self.steps {
            let ratio = self.b[n] / self.a[n];
            let (s, c) = phi.sin_cos();
            // φ_{n+1} − φ_n − φ_n, continuous in φ_n; the denominator is positive.
            let turn = ((ratio - 1.0) * s * c).atan2(c * c + ratio * s * s);
            phi = 2.0 * phi + turn;
            scale *= 2.0;
        }
        phi / (scale * self.a[self.steps])
    }
}

fn check_parameter(m: f64) -> Result<EllipticParameter> {
    EllipticParameter::new(m)
}

/// Complete elliptic integral of the first kind `K(m) = F(π/2 | m)`.
pub fn complete_k(m: f64) -> Result<f64> {
    check_parameter(m)?;
    Ok(Ladder::new(m).complete_k())
}

/// Incomplete elliptic integral of the first kind,
/// `F(φ | m) = ∫₀^φ dθ / √(1 − m sin² θ)`, for any real amplitude.
///
/// Amplitudes outside `[−π/2, π/2]` use `F(φ + π | m) = F(φ | m) + 2K(m)`.
pub fn incomplete_f(phi: f64, m: f64) -> Result<f64> {
    check_parameter(m)?;
    if !phi.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(incomplete_f_unchecked(phi, m))
}

fn incomplete_f_unchecked(phi: f64, m: f64) -> f64 {
    let ladder = Ladder::new(m);
    let magnitude = phi.abs();
    let periods = (magnitude / PI - 0.5).ceil();
    let reduced = magnitude - periods * PI;
    let value = if periods == 0.0 {
        ladder.incomplete_f(reduced)
    } else {
        2.0 * periods * ladder.complete_k() + reduced.signum() * ladder.incomplete_f(reduced.abs())
    };
    value.copysign(phi)
}

/// Jacobi elliptic functions `sn, cn, dn` at a real argument.
pub fn jacobi(u: f64, m: f64) -> Result<JacobiTriple> {
    check_parameter(m)?;
    if !u.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(jacobi_unchecked(u, m))
}

/// Same as [`jacobi`] but also accepts the limit `m = 1`, where
/// `sn = tanh u` and `cn = dn = sech u`.
fn jacobi_unchecked(u: f64, m: f64) -> JacobiTriple {
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return JacobiTriple { sn: u.tanh(), cn: sech, dn: sech };
    }
    let magnitude = u.abs();
    let ladder = Ladder::new(m);
    let n = ladder.steps;
    let mut phi = 2f64.powi(n as i32) * ladder.a[n] * magnitude;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (ladder.c[k] / ladder.a[k] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn² = 1 − m sn² = cn² + m₁ sn², a sum of non-negative terms.
    let dn = (cn * cn + (1.0 - m) * sn * sn).sqrt();
    JacobiTriple { sn: sn.copysign(u), cn, dn }
}

/// The real-argument values entering the complex addition formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ComplexJacobiParts {
    /// `sn(z) · δ`
    pub sn_num: Complex64,
    /// `dn(z) · δ`
    pub dn_num: Complex64,
    /// `δ = c₁² + m s₀² s₁²`
    pub delta: f64,
}

pub(crate) fn jacobi_complex_parts(z: Complex64, m: f64) -> ComplexJacobiParts {
    let JacobiTriple { sn: s0, cn: c0, dn: d0 } = jacobi_unchecked(z.re, m);
    let JacobiTriple { sn: s1, cn: c1, dn: d1 } = jacobi_unchecked(z.im, 1.0 - m);
    ComplexJacobiParts {
        sn_num: Complex64::new(s0 * d1, c0 * d0 * s1 * c1),
        dn_num: Complex64::new(d0 * c1 * d1, -m * s0 * c0 * s1),
        delta: c1 * c1 + m * s0 * s0 * s1 * s1,
    }
}

/// `sn(z | m)` and `dn(z | m)` for complex `z = x + iy`.
///
/// Uses `s₀, c₀, d₀` at `(x | m)` and `s₁, c₁, d₁` at `(y | 1 − m)`:
///
/// ```text
/// sn = (s₀ d₁ + i c₀ d₀ s₁ c₁) / δ
/// dn = (d₀ c₁ d₁ − i m s₀ c₀ s₁) / δ,      δ = c₁² + m s₀² s₁²
/// ```
///
/// Fails with [`Error::Pole`] where `δ = 0`.
pub fn jacobi_sn_dn_complex(z: Complex64, m: f64) -> Result<(Complex64, Complex64)> {
    check_parameter(m)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let parts = jacobi_complex_parts(z, m);
    if parts.delta == 0.0 {
        return Err(Error::Pole(z));
    }
    Ok((parts.sn_num / parts.delta, parts.dn_num / parts.delta))
}

/// Incomplete elliptic integral of the first kind for a complex amplitude,
/// `F(x + iy | m) = F(x₁ | m) + i F(y₁ | m₁)`, for `0 < m < 1`.
///
/// `X = cot² x₁` is the positive root of
/// `X² − (cot² x + m sinh² y csc² x − m₁) X − m₁ cot² x = 0` and
/// `tan² y₁ = (tan² x cot² x₁ − 1) / m`. The quadratic is solved after
/// multiplying through by `tan⁴ x`, which removes the singularity of
/// `cot x` at `x = 0`; see [`incomplete_f_complex_eps_shift`] for the form
/// that shifts `x` instead.
pub fn incomplete_f_complex(z: Complex64, m: f64) -> Result<Complex64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::ParameterOutOfRange(m));
    }
    let (x, y) = (z.re, z.im);
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::NonFinite);
    }
    if y == 0.0 {
        return Ok(Complex64::new(incomplete_f_unchecked(x, m), 0.0));
    }

    // Reduce to the strip −π/2 < r ≤ π/2; every term of the quadratic is
    // π-periodic in x.
    let periods = (x / PI - 0.5).ceil();
    let reduced = x - periods * PI;
    let (x1, y1) = amplitude_split(reduced.abs(), y.abs(), m);
    let x1 = if reduced < 0.0 { -x1 } else { x1 } + periods * PI;
    let y1 = y1.copysign(y);

    Ok(Complex64::new(incomplete_f_unchecked(x1, m), incomplete_f_unchecked(y1, 1.0 - m)))
}

/// Returns `(x₁, y₁) ∈ [0, π/2]²` for `x ∈ [0, π/2]`, `y ≥ 0`.
///
/// With `Y = X tan² x`, `P = m sinh² y`, `Q = m₁ sin² x`, `C = cos² x`, the
/// scaled quadratic is `Y² − (1 + (P − Q)/C) Y − Q/C = 0`. Its positive root
/// satisfies `Y − 1 = P / D` with `D = C + √(A² + QC) − A`,
/// `A = (C + P − Q)/2`, and then `tan² y₁ = sinh² y / D`,
/// `tan² x₁ = tan² x / Y`.
fn amplitude_split(x: f64, y: f64, m: f64) -> (f64, f64) {
    let (s, c) = x.sin_cos();
    let cos2 = c * c;
    let sh = y.sinh();
    let p = m * sh * sh;
    let q = (1.0 - m) * s * s;
    let a = 0.5 * (cos2 + p - q);
    let root = (a * a + q * cos2).sqrt();
    let d = cos2 + if a > 0.0 { q * cos2 / (root + a) } else { root - a };
    let scaled_root = 1.0 + p / d;
    let x1 = s.atan2(c * scaled_root.sqrt());
    let y1 = sh.atan2(d.sqrt());
    (x1, y1)
}

/// `F(z | m)` following the cotangent form of the decomposition directly:
/// `x` is moved to `eps` when `|x| < eps`, the root is taken as
/// `−b/2 + √(b²/4 − c)`, and the branch is fixed by
/// `x₁ ← (−1)^⌊2x/π⌋ x₁ + π ⌈x/π − 1/2 + eps⌉`, `y₁ ← sign(y) y₁`.
///
/// Away from `|Re z| < eps` this agrees with [`incomplete_f_complex`]; inside
/// that band its error is of order `eps`.
pub fn incomplete_f_complex_eps_shift(z: Complex64, m: f64, eps: f64) -> Result<Complex64> {
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::ParameterOutOfRange(m));
    }
    let m1 = 1.0 - m;
    let mut x = z.re;
    let y = z.im;
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::NonFinite);
    }
    if x.abs() < eps {
        x = eps;
    }
    let tan_x = x.tan();
    let cot2 = 1.0 / (tan_x * tan_x);
    let csc2 = 1.0 / x.sin().powi(2);
    let b = -(cot2 + m * y.sinh().powi(2) * csc2 - m1);
    let c = -m1 * cot2;
    let root = -b / 2.0 + (b * b / 4.0 - c).sqrt();
    let mut x1 = (1.0 / root.sqrt()).atan();
    let t = root * tan_x * tan_x;
    let mut y1 = if t < 1.0 { 0.0 } else { ((t - 1.0) / m).sqrt().atan() };

    let parity = (2.0 * x / PI).floor().rem_euclid(2.0);
    let sign = if parity == 0.0 { 1.0 } else { -1.0 };
    x1 = sign * x1 + PI * (x / PI - 0.5 + eps).ceil();
    y1 *= if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    };
    Ok(Complex64::new(incomplete_f_unchecked(x1, m), incomplete_f_unchecked(y1, m1)))
}

//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use num::bigint::BigInt;
use num::{One, ToPrimitive, Zero};
use num_complex::Complex64;

/// Fractional bits carried by the fixed-point series below.
const SERIES_BITS: u64 = 400;

/// `Jₙ(x)` from the ascending series `Σ (−1)ᵐ (x/2)^{2m+n} / (m! (m+n)!)`,
/// summed in 400-bit fixed point so cancellation between terms costs nothing
/// at double precision.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    let one = BigInt::one() << SERIES_BITS;
    // x is a dyadic rational, so x/2 is represented exactly.
    let (mantissa, exponent, sign) = num::Float::integer_decode(x);
    assert!(sign > 0, "non-negative argument");
    let shift = exponent as i64 - 1 + SERIES_BITS as i64;
    let half = if shift >= 0 {
        BigInt::from(mantissa) << shift as u64
    } else {
        BigInt::from(mantissa) >> (-shift) as u64
    };
    let half_sq = (&half * &half) >> SERIES_BITS;

    let mut term = one.clone();
    for k in 1..=n {
        term = ((term * &half) >> SERIES_BITS) / BigInt::from(k);
    }
    let mut sum = BigInt::zero();
    let mut m: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        m += 1;
        term = -((term * &half_sq) >> SERIES_BITS) / BigInt::from(m * (m + n as u64));
    }
    sum.to_f64().expect("representable") * 2f64.powi(-(SERIES_BITS as i32))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// `Kₙ(x) = ∫₀^∞ exp(−x cosh t) cosh(n t) dt` by adaptive quadrature.
pub fn bessel_k_quadrature(n: u32, x: f64) -> f64 {
    // Past cosh t = 1 + 60/x the integrand is below e^{-60} of its peak.
    let upper = (1.0 + 60.0 / x).acosh();
    // Factor e^{-x} out so the integrand is O(1) near t = 0.
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (n as f64 * t).cosh();
    let rough = adaptive_simpson(&f, 0.0, upper, 1e-6);
    let scaled = adaptive_simpson(&f, 0.0, upper, 1e-15 * rough);
    scaled * (-x).exp()
}

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[Complex64; 2]; 2];

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// `|tr(A·B†)|/2`: equals 1 iff `A = e^{iγ} B`.
pub fn phase_insensitive_overlap(a: &Mat2, b: &Mat2) -> f64 {
    let p = mat_mul(a, &mat_adjoint(b));
    (p[0][0] + p[1][1]).norm() / 2.0
}

/// Z-Y-Z Euler angles `(γ, φ, θ, λ)` with `U = e^{iγ} Rz(φ) Ry(θ) Rz(λ)`,
/// `Rz(a) = diag(e^{−ia/2}, e^{ia/2})`, `Ry(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
pub fn euler_zyz(u: &Mat2) -> (f64, f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let gamma = 0.5 * det.arg();
    let phase = Complex64::from_polar(1.0, -gamma);
    let v00 = u[0][0] * phase;
    let v10 = u[1][0] * phase;
    let v11 = u[1][1] * phase;
    let theta = 2.0 * v10.norm().atan2(v00.norm());
    let phi = v11.arg() + v10.arg();
    let lambda = v11.arg() - v10.arg();
    (gamma, phi, theta, lambda)
}

pub fn rz(a: f64) -> Mat2 {
    let z = Complex64::new(0.0, 0.0);
    [[Complex64::from_polar(1.0, -0.5 * a), z], [z, Complex64::from_polar(1.0, 0.5 * a)]]
}

pub fn ry(t: f64) -> Mat2 {
    let (s, c) = (0.5 * t).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

/// `e^{iγ} Rz(φ) Ry(θ) Rz(λ)`.
pub fn euler_compose(gamma: f64, phi: f64, theta: f64, lambda: f64) -> Mat2 {
    let m = mat_mul(&mat_mul(&rz(phi), &ry(theta)), &rz(lambda));
    let p = Complex64::from_polar(1.0, gamma);
    [[m[0][0] * p, m[0][1] * p], [m[1][0] * p, m[1][1] * p]]
}

/// Compensator predicted by the Euler oracle: the inverse of `U` built from
/// its Z-Y-Z angles, `Rz(−λ) Ry(−θ) Rz(−φ)`.
pub fn euler_inverse(u: &Mat2) -> Mat2 {
    let (_, phi, theta, lambda) = euler_zyz(u);
    mat_mul(&mat_mul(&rz(-lambda), &ry(-theta)), &rz(-phi))
}

/// Uniform grid of `n` points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Property-test settings without on-disk regression files.
pub fn proptest_cases(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..proptest::test_runner::Config::default()
    }
}

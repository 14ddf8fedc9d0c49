//! Real-argument Bessel functions Jₙ and Kₙ for the step-index mode equations.
//!
//! `Jₙ` is evaluated with Miller's backward recurrence normalized by
//! `J₀ + 2ΣJ₂ₖ = 1`, which stays accurate to a few ulps of `max|Jₙ|` over the
//! whole argument range used by the solver. `K₀` and `K₁` use the ascending
//! series for `x < 2` and Steed's continued fraction (Temme's variant) above;
//! higher orders follow from the forward recurrence, which is stable for `K`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1e250;

fn check_arg(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::Domain {
            func,
            arg: x,
            reason: "argument must be finite",
        });
    }
    if x < 0.0 {
        return Err(Error::Domain {
            func,
            arg: x,
            reason: "argument must be non-negative",
        });
    }
    Ok(())
}

/// `J₀(x) … J_{nmax}(x)` for `x > 0` by backward recurrence.
fn bessel_j_sequence(nmax: usize, x: f64) -> Vec<f64> {
    debug_assert!(x > 0.0);
    let top = (nmax as f64).max(x);
    let mut start = (top + 30.0 + (40.0 * top).sqrt()) as usize;
    start += start % 2;

    let mut out = vec![0.0; nmax + 1];
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let two_over_x = 2.0 / x;

    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_ABOVE {
            let scale = 1.0 / RESCALE_ABOVE;
            cur *= scale;
            next *= scale;
            norm *= scale;
            for v in out.iter_mut() {
                *v *= scale;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// Bessel function of the first kind `Jₙ(x)`, `x ≥ 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    check_arg("bessel_j", x)?;
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok(bessel_j_sequence(n as usize, x)[n as usize])
}

/// Derivative `Jₙ′(x)` from `Jₙ′ = (Jₙ₋₁ − Jₙ₊₁)/2` (`J₀′ = −J₁`).
pub fn bessel_j_prime(n: u32, x: f64) -> Result<f64> {
    check_arg("bessel_j_prime", x)?;
    if x == 0.0 {
        return Ok(if n == 1 { 0.5 } else { 0.0 });
    }
    let seq = bessel_j_sequence(n as usize + 1, x);
    let n = n as usize;
    Ok(if n == 0 {
        -seq[1]
    } else {
        0.5 * (seq[n - 1] - seq[n + 1])
    })
}

fn check_k_arg(func: &'static str, x: f64) -> Result<()> {
    check_arg(func, x)?;
    if x == 0.0 {
        return Err(Error::Domain {
            func,
            arg: x,
            reason: "Kn diverges at zero",
        });
    }
    Ok(())
}

/// `(K₀(x), K₁(x))` for `x > 0`.
fn bessel_k01(x: f64) -> (f64, f64) {
    if x < 2.0 {
        k01_series(x)
    } else {
        k01_continued_fraction(x)
    }
}

fn k01_series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();

    // I₀, I₁ and the digamma-weighted sums share the same power terms.
    let mut i0 = 0.0;
    let mut i1 = 0.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = 0.0;
    let mut term0 = 1.0; // y^k / (k!)^2
    let mut term1 = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            harmonic += 1.0 / kf;
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
        }
        let psi_k1 = harmonic - EULER_GAMMA;
        let psi_k2 = psi_k1 + 1.0 / (kf + 1.0);
        i0 += term0;
        i1 += term1;
        k0_sum += term0 * psi_k1;
        k1_sum += term1 * (psi_k1 + psi_k2);
        if term0 < 1e-18 * i0 && term1 < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    let k0 = -log_half * i0 + k0_sum;
    let k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
    (k0, k1)
}

fn k01_continued_fraction(x: f64) -> (f64, f64) {
    // Steed's algorithm for CF2 at order zero.
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

fn bessel_k_sequence(nmax: usize, x: f64) -> Vec<f64> {
    let (k0, k1) = bessel_k01(x);
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(k0);
    if nmax >= 1 {
        out.push(k1);
    }
    for n in 1..nmax {
        let next = out[n - 1] + 2.0 * n as f64 / x * out[n];
        out.push(next);
    }
    out
}

/// Modified Bessel function of the second kind `Kₙ(x)`, `x > 0`.
pub fn bessel_k(n: u32, x: f64) -> Result<f64> {
    check_k_arg("bessel_k", x)?;
    Ok(bessel_k_sequence(n as usize, x)[n as usize])
}

/// Derivative `Kₙ′(x) = −(Kₙ₋₁ + Kₙ₊₁)/2` (`K₀′ = −K₁`).
pub fn bessel_k_prime(n: u32, x: f64) -> Result<f64> {
    check_k_arg("bessel_k_prime", x)?;
    let seq = bessel_k_sequence(n as usize + 1, x);
    let n = n as usize;
    Ok(if n == 0 {
        -seq[1]
    } else {
        -0.5 * (seq[n - 1] + seq[n + 1])
    })
}

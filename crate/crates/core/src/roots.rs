//! Bracketing root refinement: secant steps safeguarded by bisection.

use crate::error::{Error, Result};

/// Refine a root of `f` inside `[lo, hi]`, where `f(lo)` and `f(hi)` differ in sign.
///
/// Stops once the bracket is narrower than `rtol * |x|` (or an exact zero is
/// hit). Returns the midpoint of the final bracket.
pub fn refine_bracket<F>(mut f: F, mut lo: f64, mut hi: f64, rtol: f64, max_iter: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket {
            pattern: format!("f({lo})={flo:+e}, f({hi})={fhi:+e}"),
        });
    }

    for iteration in 0..max_iter {
        let width = hi - lo;
        let scale = lo.abs().max(hi.abs());
        if width.abs() <= rtol * scale {
            return Ok(0.5 * (lo + hi));
        }

        // Secant (regula falsi) candidate, bisection every third step and
        // whenever the candidate hugs an endpoint.
        let mid = 0.5 * (lo + hi);
        let mut x = lo - flo * (hi - lo) / (fhi - flo);
        let margin = 0.05 * width.abs();
        if iteration % 3 == 2 || !x.is_finite() || (x - lo).abs() < margin || (hi - x).abs() < margin {
            x = mid;
        }
        if x <= lo.min(hi) || x >= lo.max(hi) {
            x = mid;
        }

        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                lo,
                hi,
            });
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }

    Err(Error::NoConvergence {
        iterations: max_iter,
        lo,
        hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = refine_bracket(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn transcendental() {
        let r = refine_bracket(|x| x.cos() - x, 0.0, 1.0, 1e-15, 200).unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            refine_bracket(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_bracket() {
        match refine_bracket(|x| x * x * x - 0.027, 0.0, 1.0, 1e-15, 3) {
            Err(Error::NoConvergence { lo, hi, .. }) => assert!(lo <= 0.3 && 0.3 <= hi),
            other => panic!("unexpected {other:?}"),
        }
    }
}

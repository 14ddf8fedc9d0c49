//! Exact HE₁₁ hybrid mode of a two-layer step-index cylinder.
//!
//! The eigenvalue equation is solved in the dimensionless variables
//! `u = h·a` and `w = q·a`:
//!
//! ```text
//! [J₁′(u)/(u J₁(u)) + K₁′(w)/(w K₁(w))] · [J₁′(u)/(u J₁(u)) + (n₂²/n₁²) K₁′(w)/(w K₁(w))]
//!     = (β/(n₁ k))² · (1/u² + 1/w²)²
//! ```
//!
//! Field profiles carry one global real constant, fixed by making `e_z`
//! continuous at `r = a` (outer fields scaled by `J₁(ha)/K₁(qa)`). No power
//! normalization is applied: every polarization observable downstream depends
//! only on field ratios.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::refine_bracket;
use crate::special::{bessel_j, bessel_j_prime, bessel_k, bessel_k_prime};

/// Speed of light in vacuum, nm/s.
pub const SPEED_OF_LIGHT_NM_PER_S: f64 = 2.997_924_58e17;

/// First zero of `J₀`; the single-mode cutoff of a step-index fibre.
pub const SINGLE_MODE_CUTOFF: f64 = 2.404_825_557_695_773;

const MIN_LENGTH_NM: f64 = 10.0;
const MAX_LENGTH_NM: f64 = 10_000.0;

/// Geometry and indices of a silica nanofibre in a homogeneous cladding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    /// Fibre radius `a`, nm.
    pub radius_nm: f64,
    /// Vacuum wavelength, nm.
    pub wavelength_nm: f64,
    pub n_core: f64,
    pub n_clad: f64,
}

impl FiberSpec {
    /// Checked constructor.
    pub fn new(radius_nm: f64, wavelength_nm: f64, n_core: f64, n_clad: f64) -> Result<Self> {
        let spec = FiberSpec {
            radius_nm,
            wavelength_nm,
            n_core,
            n_clad,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The 305 nm diameter silica fibre in air at 637 nm.
    pub fn nanofiber_637() -> Self {
        FiberSpec {
            radius_nm: 152.5,
            wavelength_nm: 637.0,
            n_core: 1.457,
            n_clad: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.radius_nm, self.wavelength_nm, self.n_core, self.n_clad]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidSpec("all parameters must be finite".into()));
        }
        for (name, v) in [("radius", self.radius_nm), ("wavelength", self.wavelength_nm)] {
            if !(MIN_LENGTH_NM..=MAX_LENGTH_NM).contains(&v) {
                return Err(Error::InvalidSpec(format!(
                    "{name} {v} nm outside [{MIN_LENGTH_NM}, {MAX_LENGTH_NM}] nm"
                )));
            }
        }
        if self.n_clad < 1.0 {
            return Err(Error::InvalidSpec(format!("n_clad {} < 1", self.n_clad)));
        }
        if self.n_core <= self.n_clad {
            return Err(Error::InvalidSpec(format!(
                "n_core {} must exceed n_clad {}",
                self.n_core, self.n_clad
            )));
        }
        Ok(())
    }

    /// Free-space wavenumber `2π/λ`, rad/nm.
    pub fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength_nm
    }
}

/// Normalized frequency `V = (2πa/λ)·√(n₁² − n₂²)`.
///
/// Evaluates the formula without validating the spec, so limits such as
/// `a → 0` or `n₁ = n₂` simply give zero.
pub fn v_number(spec: &FiberSpec) -> f64 {
    let na2 = (spec.n_core * spec.n_core - spec.n_clad * spec.n_clad).max(0.0);
    spec.wavenumber() * spec.radius_nm * na2.sqrt()
}

/// Knobs of the bracketing solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Number of uniform `β/k` samples used to locate sign changes.
    pub grid_points: usize,
    /// Fraction of `n₁ − n₂` kept clear of each end of the scan.
    pub edge_margin: f64,
    /// Relative bracket width at which refinement stops.
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            grid_points: 2000,
            edge_margin: 1e-13,
            rtol: 1e-14,
            max_iter: 500,
        }
    }
}

/// Solved HE₁₁ mode. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSolution {
    pub spec: FiberSpec,
    /// Free-space wavenumber, rad/nm.
    pub k: f64,
    /// Propagation constant, rad/nm.
    pub beta: f64,
    /// Core transverse wavenumber, rad/nm.
    pub h: f64,
    /// Cladding decay constant, rad/nm.
    pub q: f64,
    /// Hybrid-mode mixing parameter.
    pub s: f64,
    pub v_number: f64,
    /// Angular frequency, rad/s.
    pub angular_frequency: f64,
    pub single_mode: bool,
}

/// Complex cylindrical components of the `l = +1` HE₁₁ envelope at one radius.
///
/// `e_r` is purely imaginary while `e_phi` and `e_z` are real.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylindricalProfile {
    pub e_r: Complex64,
    pub e_phi: Complex64,
    pub e_z: Complex64,
}

/// Principal transverse axis of a quasi-linear mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeAxis {
    XPrime,
    YPrime,
}

struct ModeTerms {
    u: f64,
    w: f64,
    j_ratio: f64,
    k_ratio: f64,
}

fn mode_terms(spec: &FiberSpec, k: f64, n_eff: f64) -> Result<ModeTerms> {
    let a = spec.radius_nm;
    // Factored differences: near either index the naive n₁²k² − β² loses
    // most of its digits and breaks u² + w² = V².
    let h = k * ((spec.n_core - n_eff) * (spec.n_core + n_eff)).sqrt();
    let q = k * ((n_eff - spec.n_clad) * (n_eff + spec.n_clad)).sqrt();
    let u = h * a;
    let w = q * a;
    let j_ratio = bessel_j_prime(1, u)? / (u * bessel_j(1, u)?);
    let k_ratio = bessel_k_prime(1, w)? / (w * bessel_k(1, w)?);
    Ok(ModeTerms {
        u,
        w,
        j_ratio,
        k_ratio,
    })
}

/// LHS − RHS of the HE/EH eigenvalue equation at effective index `n_eff = β/k`.
pub fn dispersion_residual(spec: &FiberSpec, n_eff: f64) -> Result<f64> {
    let k = spec.wavenumber();
    let beta = n_eff * k;
    let t = mode_terms(spec, k, n_eff)?;
    let index_ratio = (spec.n_clad / spec.n_core).powi(2);
    let lhs = (t.j_ratio + t.k_ratio) * (t.j_ratio + index_ratio * t.k_ratio);
    let inv = 1.0 / (t.u * t.u) + 1.0 / (t.w * t.w);
    let rhs = (beta / (spec.n_core * k)).powi(2) * inv * inv;
    Ok(lhs - rhs)
}

/// Solve the HE₁₁ mode with default solver settings.
pub fn solve_he11(spec: &FiberSpec) -> Result<ModeSolution> {
    solve_he11_with(spec, &SolverOptions::default())
}

/// Solve the HE₁₁ mode: scan `β/k` for sign changes, refine each bracket and
/// keep the largest genuine root (the fundamental branch).
///
/// Very weakly guiding fibres put the root within `1e-13` of the index span
/// above the cladding index, and `NoBracket` is returned. The threshold is
/// near `V = 0.47` for silica in air and rises to about 0.64 at `n₁ = 2.2`.
pub fn solve_he11_with(spec: &FiberSpec, opts: &SolverOptions) -> Result<ModeSolution> {
    spec.validate()?;
    if opts.grid_points < 2 {
        return Err(Error::InvalidInput("solver grid needs at least two points".into()));
    }
    let span = spec.n_core - spec.n_clad;
    let lo = spec.n_clad + opts.edge_margin * span;
    let hi = spec.n_core - opts.edge_margin * span;
    let step = (hi - lo) / (opts.grid_points - 1) as f64;

    let samples: Vec<(f64, f64)> = (0..opts.grid_points)
        .map(|i| {
            let x = lo + step * i as f64;
            (x, dispersion_residual(spec, x).unwrap_or(f64::NAN))
        })
        .collect();

    let mut best: Option<f64> = None;
    let mut last_failure = None;
    // Scan downward from the core index; the first genuine root is HE₁₁.
    for pair in samples.windows(2).rev() {
        let (x0, f0) = pair[0];
        let (x1, f1) = pair[1];
        if !f0.is_finite() || !f1.is_finite() || f0.signum() == f1.signum() {
            continue;
        }
        let refined = refine_bracket(
            |x| dispersion_residual(spec, x).unwrap_or(f64::NAN),
            x0,
            x1,
            opts.rtol,
            opts.max_iter,
        );
        match refined {
            Ok(root) => {
                let r = dispersion_residual(spec, root)?;
                // Sign flips across a pole of J₁′/J₁ leave a residual larger
                // than at the bracket ends; a root leaves a tiny one.
                if r.abs() < 1e-6 * f0.abs().max(f1.abs()).max(1.0) {
                    best = Some(root);
                    break;
                }
            }
            Err(e) => last_failure = Some(e),
        }
    }

    let n_eff = match (best, last_failure) {
        (Some(n), _) => n,
        (None, Some(e)) => return Err(e),
        (None, None) => {
            return Err(Error::NoBracket {
                pattern: sign_pattern(&samples),
            })
        }
    };

    let k = spec.wavenumber();
    let beta = n_eff * k;
    let t = mode_terms(spec, k, n_eff)?;
    let inv = 1.0 / (t.u * t.u) + 1.0 / (t.w * t.w);
    let s = inv / (t.j_ratio + t.k_ratio);
    let v = v_number(spec);
    Ok(ModeSolution {
        spec: *spec,
        k,
        beta,
        h: t.u / spec.radius_nm,
        q: t.w / spec.radius_nm,
        s,
        v_number: v,
        angular_frequency: SPEED_OF_LIGHT_NM_PER_S * k,
        single_mode: v < SINGLE_MODE_CUTOFF,
    })
}

/// Run-length summary of residual signs, e.g. `+x1200 -x800`.
fn sign_pattern(samples: &[(f64, f64)]) -> String {
    let mut runs: Vec<(char, usize)> = Vec::new();
    for &(_, f) in samples {
        let c = if f.is_nan() {
            '?'
        } else if f > 0.0 {
            '+'
        } else if f < 0.0 {
            '-'
        } else {
            '0'
        };
        match runs.last_mut() {
            Some((last, n)) if *last == c => *n += 1,
            _ => runs.push((c, 1)),
        }
    }
    runs.iter()
        .map(|(c, n)| format!("{c}x{n}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl ModeSolution {
    /// Effective index `β/k`.
    pub fn effective_index(&self) -> f64 {
        self.beta / self.k
    }

    /// Eigenvalue-equation residual at the stored `β`.
    pub fn residual(&self) -> f64 {
        dispersion_residual(&self.spec, self.effective_index()).unwrap_or(f64::NAN)
    }

    /// Cylindrical field components of the `l = +1` envelope at radius `r` (nm).
    pub fn cylindrical_profile(&self, r: f64) -> CylindricalProfile {
        let a = self.spec.radius_nm;
        let (s, beta) = (self.s, self.beta);
        let r = r.max(0.0);
        // Bessel calls below cannot fail: arguments are finite and non-negative
        // (positive for K since r ≥ a > 0).
        if r < a {
            let x = self.h * r;
            let j0 = bessel_j(0, x).unwrap_or(f64::NAN);
            let j1 = bessel_j(1, x).unwrap_or(f64::NAN);
            let j2 = bessel_j(2, x).unwrap_or(f64::NAN);
            let c = beta / (2.0 * self.h);
            CylindricalProfile {
                e_r: Complex64::new(0.0, c * ((1.0 - s) * j0 - (1.0 + s) * j2)),
                e_phi: Complex64::new(-c * ((1.0 - s) * j0 + (1.0 + s) * j2), 0.0),
                e_z: Complex64::new(j1, 0.0),
            }
        } else {
            let x = self.q * r;
            let scale = bessel_j(1, self.h * a).unwrap_or(f64::NAN)
                / bessel_k(1, self.q * a).unwrap_or(f64::NAN);
            let k0 = bessel_k(0, x).unwrap_or(f64::NAN);
            let k1 = bessel_k(1, x).unwrap_or(f64::NAN);
            let k2 = bessel_k(2, x).unwrap_or(f64::NAN);
            let c = scale * beta / (2.0 * self.q);
            CylindricalProfile {
                e_r: Complex64::new(0.0, c * ((1.0 - s) * k0 + (1.0 + s) * k2)),
                e_phi: Complex64::new(-c * ((1.0 - s) * k0 - (1.0 + s) * k2), 0.0),
                e_z: Complex64::new(scale * k1, 0.0),
            }
        }
    }

    /// Quasi-linearly polarized mode along `axis`, evaluated at `(r, φ)`.
    ///
    /// Components are returned along `(x′, y′, z)`. The transverse part is
    /// real and the longitudinal part is `i·√2·e_z(r)·cos φ` (x′ mode) or
    /// `i·√2·e_z(r)·sin φ` (y′ mode). These are the complex conjugates of
    /// `(E₊₁ + E₋₁)/√2` and `(E₊₁ − E₋₁)/(√2 i)` after removing a common
    /// phase; the conjugation fixes the handedness convention so that a
    /// dipole tilted toward `+x′` launches `S₃ > 0` along `+z`.
    pub fn quasi_linear_field(&self, axis: ModeAxis, r: f64, phi: f64) -> [Complex64; 3] {
        let p = self.cylindrical_profile(r);
        let root2 = std::f64::consts::SQRT_2;
        let er = p.e_r.im;
        let ephi = p.e_phi.re;
        let ez = p.e_z.re;
        let (sin_p, cos_p) = quarter_turn_sin_cos(phi);

        // (radial, azimuthal, longitudinal) weights of the envelope.
        let (radial, azimuthal, longitudinal) = match axis {
            ModeAxis::XPrime => (er * cos_p, ephi * sin_p, ez * cos_p),
            ModeAxis::YPrime => (er * sin_p, -ephi * cos_p, ez * sin_p),
        };
        // r̂ = (cos φ, sin φ), φ̂ = (−sin φ, cos φ).
        let x = root2 * (radial * cos_p - azimuthal * sin_p);
        let y = root2 * (radial * sin_p + azimuthal * cos_p);
        [
            Complex64::new(x, 0.0),
            Complex64::new(y, 0.0),
            Complex64::new(0.0, root2 * longitudinal),
        ]
    }
}

/// `sin_cos` that returns exact values at integer multiples of `π/2`.
fn quarter_turn_sin_cos(phi: f64) -> (f64, f64) {
    let quarter = std::f64::consts::FRAC_PI_2;
    let turns = (phi / quarter).round();
    if turns.abs() < 1e6 && phi == turns * quarter {
        match (turns as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        phi.sin_cos()
    }
}

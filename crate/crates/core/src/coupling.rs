//! Guided field launched by a linear dipole on the fibre surface, and the
//! geometry → polarization mapping.
//!
//! The dipole sits at `(r_d, φ = π/2)` in the primed frame, i.e. on the `y′`
//! axis, with `r_d = a + gap`. Its moment lies in the tangent (`x′z`) plane:
//! `d = (sin θ, 0, cos θ)`. Projecting `d` onto the quasi-linear modes gives
//!
//! ```text
//! A = d · e_x′(r_d, π/2)            = C sin θ
//! B = d · e_y′(r_d, π/2)            = i D cos θ
//! ```
//!
//! so the two components are always in phase quadrature and the emitted
//! ellipse has its axes along `x′` and `y′`. The azimuth `α` only rotates the
//! frame, which sets the ellipse orientation.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mode::{ModeAxis, ModeSolution};
use crate::polarimetry::{
    ellipse_from_stokes, rotate_jones, stokes_from_jones, JonesBasis, JonesVector, PoincarePoint,
    StokesVector,
};

/// Default dipole height above the fibre surface, nm (nanorod radius).
pub const DEFAULT_SURFACE_GAP_NM: f64 = 9.0;

/// Position and orientation of a dipole on the fibre surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipolePose {
    /// Azimuthal position, degrees from lab `+y` toward `+x`, `[−90°, 90°]`.
    pub azimuth_alpha_deg: f64,
    /// Tilt from the fibre axis within the tangent plane, `[−90°, 90°]`.
    pub tilt_theta_deg: f64,
    /// Height of the dipole above the surface, nm.
    pub surface_gap_nm: f64,
}

impl DipolePose {
    pub fn new(azimuth_alpha_deg: f64, tilt_theta_deg: f64, surface_gap_nm: f64) -> Result<Self> {
        let pose = DipolePose {
            azimuth_alpha_deg,
            tilt_theta_deg,
            surface_gap_nm,
        };
        pose.validate()?;
        Ok(pose)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.azimuth_alpha_deg), ("theta", self.tilt_theta_deg)] {
            if !v.is_finite() || !(-90.0..=90.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{name} = {v}° outside [-90°, 90°]")));
            }
        }
        if !self.surface_gap_nm.is_finite() || self.surface_gap_nm < 0.0 {
            return Err(Error::InvalidInput(format!(
                "surface gap {} nm must be finite and non-negative",
                self.surface_gap_nm
            )));
        }
        Ok(())
    }

    /// Radial position `a + gap` of the dipole, nm.
    pub fn dipole_radius(&self, mode: &ModeSolution) -> f64 {
        mode.spec.radius_nm + self.surface_gap_nm
    }

    pub fn moment(&self) -> DipoleMoment {
        DipoleMoment::from_tilt(self.tilt_theta_deg)
    }
}

/// Unit dipole direction `(sin θ, 0, cos θ)` in the primed frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleMoment {
    pub components: [f64; 3],
}

impl DipoleMoment {
    pub fn from_tilt(theta_deg: f64) -> Self {
        let (s, c) = theta_deg.to_radians().sin_cos();
        DipoleMoment {
            components: [s, 0.0, c],
        }
    }
}

/// Direction of propagation along the fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationDirection {
    #[default]
    Forward,
    Backward,
}

impl std::str::FromStr for PropagationDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+z" | "forward" => Ok(PropagationDirection::Forward),
            "-z" | "backward" => Ok(PropagationDirection::Backward),
            other => Err(Error::Config(format!("unknown direction '{other}' (expected +z or -z)"))),
        }
    }
}

/// Amplitudes of the `x′` and `y′` quasi-linear modes excited by a dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingAmplitudes {
    pub a: Complex64,
    pub b: Complex64,
    /// `|e_x′|` at the dipole: transverse `x′` field of the `x′` mode.
    pub c: f64,
    /// `|e_z|` at the dipole: longitudinal field of the `y′` mode.
    pub d: f64,
}

impl CouplingAmplitudes {
    /// Jones vector `(A, B)` in the primed basis.
    pub fn primed_jones(&self) -> JonesVector {
        JonesVector::new(self.a, self.b).in_basis(JonesBasis::Primed)
    }
}

/// Project an arbitrary dipole moment `p` (primed components) onto the
/// quasi-linear modes at the dipole position.
///
/// Uses the unconjugated envelopes, as `A = p·HE_x′` and `B = p·HE_y′`.
pub fn project_dipole(mode: &ModeSolution, radius_nm: f64, p: &[Complex64; 3]) -> (Complex64, Complex64) {
    let ex = mode.quasi_linear_field(ModeAxis::XPrime, radius_nm, FRAC_PI_2);
    let ey = mode.quasi_linear_field(ModeAxis::YPrime, radius_nm, FRAC_PI_2);
    let dot = |f: &[Complex64; 3]| p.iter().zip(f).map(|(a, b)| a * b).sum::<Complex64>();
    (dot(&ex), dot(&ey))
}

/// Coupling magnitudes `(C, D)` at radius `r` (nm).
pub fn coupling_magnitudes(mode: &ModeSolution, radius_nm: f64) -> (f64, f64) {
    let ex = mode.quasi_linear_field(ModeAxis::XPrime, radius_nm, FRAC_PI_2);
    let ey = mode.quasi_linear_field(ModeAxis::YPrime, radius_nm, FRAC_PI_2);
    (ex[0].norm(), ey[2].norm())
}

pub fn coupling_amplitudes(mode: &ModeSolution, pose: &DipolePose) -> CouplingAmplitudes {
    let r = pose.dipole_radius(mode);
    let d = pose.moment().components.map(|x| Complex64::new(x, 0.0));
    let (a, b) = project_dipole(mode, r, &d);
    let (c, d) = coupling_magnitudes(mode, r);
    CouplingAmplitudes { a, b, c, d }
}

/// Lab-frame Jones vector of the guided light for primed amplitudes `(A, B)`.
///
/// Backward propagation flips the sign of the longitudinally fed component.
pub fn guided_jones_from(
    a: Complex64,
    b: Complex64,
    azimuth_alpha_deg: f64,
    dir: PropagationDirection,
) -> JonesVector {
    let b = match dir {
        PropagationDirection::Forward => b,
        PropagationDirection::Backward => -b,
    };
    // x′ = R(−α)·x, y′ = R(−α)·y.
    rotate_jones(&JonesVector::new(a, b), -azimuth_alpha_deg).in_basis(JonesBasis::Lab)
}

pub fn guided_jones(
    amps: &CouplingAmplitudes,
    azimuth_alpha_deg: f64,
    dir: PropagationDirection,
) -> JonesVector {
    guided_jones_from(amps.a, amps.b, azimuth_alpha_deg, dir)
}

/// Guided Stokes vector (unnormalized) for a pose.
pub fn guided_stokes(mode: &ModeSolution, pose: &DipolePose, dir: PropagationDirection) -> StokesVector {
    let amps = coupling_amplitudes(mode, pose);
    let j = guided_jones(&amps, pose.azimuth_alpha_deg, dir);
    // (A, B) can only vanish together if C = D = 0, which a guided mode excludes.
    stokes_from_jones(&j).unwrap_or(StokesVector::new(0.0, 0.0, 0.0, 0.0))
}

/// Tilt giving `|A| = |B|`: `arctan(D/C)` in degrees.
pub fn theta_circ(mode: &ModeSolution, surface_gap_nm: f64) -> f64 {
    let (c, d) = coupling_magnitudes(mode, mode.spec.radius_nm + surface_gap_nm);
    d.atan2(c).to_degrees()
}

/// Closed-form `S₃/S₀ = 2t/(1+t²)` with `t = tan θ / tan θ_circ`.
pub fn s3_closed_form(theta_deg: f64, theta_circ_deg: f64) -> f64 {
    let t = theta_deg.to_radians().tan() / theta_circ_deg.to_radians().tan();
    if t.is_infinite() {
        return 0.0;
    }
    2.0 * t / (1.0 + t * t)
}

/// Exact latitude map `f(θ) = arcsin(2t/(1+t²))`, degrees.
pub fn latitude_exact(theta_deg: f64, theta_circ_deg: f64) -> f64 {
    s3_closed_form(theta_deg, theta_circ_deg).clamp(-1.0, 1.0).asin().to_degrees()
}

/// Linear approximation `f(θ) ≈ (90°/θ_circ)·θ`.
pub fn latitude_linear(theta_deg: f64, theta_circ_deg: f64) -> f64 {
    90.0 / theta_circ_deg * theta_deg
}

/// Largest `|f_exact − f_linear|` over `θ ∈ [−θ_circ, θ_circ]`, degrees,
/// on a uniform grid of `samples` points. Returns `(θ_at_max, error)`.
pub fn linear_latitude_error(theta_circ_deg: f64, samples: usize) -> (f64, f64) {
    let n = samples.max(2);
    (0..n)
        .map(|i| {
            let th = -theta_circ_deg + 2.0 * theta_circ_deg * i as f64 / (n - 1) as f64;
            let err = (latitude_exact(th, theta_circ_deg) - latitude_linear(th, theta_circ_deg)).abs();
            (th, err)
        })
        .fold((0.0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
}

/// One row of a tilt sweep; Stokes parameters normalized to `S₀ = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaRow {
    pub theta_deg: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub psi_deg: f64,
    pub ellipticity_deg: f64,
}

/// Polarization of the guided light for each tilt in `thetas_deg`.
pub fn stokes_vs_theta(
    mode: &ModeSolution,
    azimuth_alpha_deg: f64,
    thetas_deg: &[f64],
    surface_gap_nm: f64,
    dir: PropagationDirection,
) -> Result<Vec<ThetaRow>> {
    thetas_deg
        .iter()
        .map(|&theta| {
            let pose = DipolePose::new(azimuth_alpha_deg, theta, surface_gap_nm)?;
            let s = guided_stokes(mode, &pose, dir);
            let n = s.normalized();
            let e = ellipse_from_stokes(&s)?;
            Ok(ThetaRow {
                theta_deg: theta,
                s0: s.s0,
                s1: n.s1,
                s2: n.s2,
                s3: n.s3,
                psi_deg: e.psi_or_zero(),
                ellipticity_deg: e.ellipticity_deg,
            })
        })
        .collect()
}

/// Poincaré coordinates of the light launched by a dipole at `(α, θ)`.
pub fn poincare_map(
    azimuth_alpha_deg: f64,
    tilt_theta_deg: f64,
    mode: &ModeSolution,
    surface_gap_nm: f64,
) -> Result<PoincarePoint> {
    let pose = DipolePose::new(azimuth_alpha_deg, tilt_theta_deg, surface_gap_nm)?;
    let s = guided_stokes(mode, &pose, PropagationDirection::Forward);
    let e = ellipse_from_stokes(&s)?;
    Ok(PoincarePoint {
        longitude_deg: 2.0 * e.psi_or_zero(),
        latitude_deg: (s.s3 / s.s0).clamp(-1.0, 1.0).asin().to_degrees(),
    })
}

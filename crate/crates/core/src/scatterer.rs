//! Anisotropic nanorod driven by a linearly polarized beam.
//!
//! The exciting field lies in the plane tangent to the fibre at the rod
//! (`x′z` plane) and makes an angle `χ − χ_max` with the rod. It splits into
//! `E_L` along the rod and `E_T` across it; the induced moment is
//! `p = α_L E_L û_L + α_T E_T û_T`. Background scattering by the bare fibre is
//! not modeled (it is below 0.5 % of the rod signal in practice).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::coupling::{guided_jones_from, project_dipole, DipolePose, PropagationDirection};
use crate::error::{Error, Result};
use crate::mode::ModeSolution;
use crate::polarimetry::{ellipse_from_stokes, stokes_from_jones, StokesVector};

/// Rod polarizabilities and orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NanorodModel {
    pub alpha_l: Complex64,
    pub alpha_t: Complex64,
    pub pose: DipolePose,
}

impl NanorodModel {
    pub fn new(alpha_l: Complex64, alpha_t: Complex64, pose: DipolePose) -> Result<Self> {
        if !(alpha_l.norm() > 0.0) || !alpha_t.norm().is_finite() {
            return Err(Error::InvalidInput("alpha_L must be non-zero and both polarizabilities finite".into()));
        }
        pose.validate()?;
        Ok(NanorodModel { alpha_l, alpha_t, pose })
    }

    /// Real polarizabilities with `α_T/α_L = ratio` and `α_L = 1`.
    pub fn with_ratio(ratio: f64, pose: DipolePose) -> Result<Self> {
        NanorodModel::new(Complex64::new(1.0, 0.0), Complex64::new(ratio, 0.0), pose)
    }

    /// Rod axis `û_L = (sin θ, 0, cos θ)` in the primed frame.
    pub fn rod_axis(&self) -> [f64; 3] {
        let (s, c) = self.pose.tilt_theta_deg.to_radians().sin_cos();
        [s, 0.0, c]
    }

    /// In-plane unit vector across the rod, `û_T = (cos θ, 0, −sin θ)`.
    pub fn transverse_axis(&self) -> [f64; 3] {
        let (s, c) = self.pose.tilt_theta_deg.to_radians().sin_cos();
        [c, 0.0, -s]
    }
}

/// Linearly polarized exciting beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationField {
    /// Polarization angle of the beam, degrees.
    pub chi_deg: f64,
    pub amplitude: f64,
    /// Beam angle aligned with the rod axis, degrees.
    pub chi_max_deg: f64,
}

impl ExcitationField {
    pub fn new(chi_deg: f64, amplitude: f64, chi_max_deg: f64) -> Result<Self> {
        if !(amplitude > 0.0) || !chi_deg.is_finite() || !chi_max_deg.is_finite() {
            return Err(Error::InvalidInput("excitation needs a positive amplitude and finite angles".into()));
        }
        Ok(ExcitationField {
            chi_deg,
            amplitude,
            chi_max_deg,
        })
    }

    /// `(E_L, E_T)`.
    pub fn components(&self) -> (f64, f64) {
        let (s, c) = (self.chi_deg - self.chi_max_deg).to_radians().sin_cos();
        (self.amplitude * c, self.amplitude * s)
    }
}

/// Induced moment in the primed frame.
pub fn induced_dipole(rod: &NanorodModel, exc: &ExcitationField) -> [Complex64; 3] {
    let (el, et) = exc.components();
    let ul = rod.rod_axis();
    let ut = rod.transverse_axis();
    std::array::from_fn(|i| rod.alpha_l * (el * ul[i]) + rod.alpha_t * (et * ut[i]))
}

/// `P(χ) ∝ |α_L|² cos²(χ−χ_max) + |α_T|² sin²(χ−χ_max)`, with max 1.
pub fn malus_power(rod: &NanorodModel, chi_max_deg: f64, chis_deg: &[f64]) -> Vec<(f64, f64)> {
    let l2 = rod.alpha_l.norm_sqr();
    let t2 = rod.alpha_t.norm_sqr();
    let peak = l2.max(t2);
    chis_deg
        .iter()
        .map(|&chi| {
            // Reducing χ first makes P(χ) and P(χ + 180°) bit-identical.
            let (s, c) = (chi.rem_euclid(180.0) - chi_max_deg).to_radians().sin_cos();
            (chi, (l2 * c * c + t2 * s * s) / peak)
        })
        .collect()
}

/// Malus curve with seeded multiplicative Gaussian noise of relative width `rel_sigma`.
pub fn noisy_malus_samples(
    rod: &NanorodModel,
    chi_max_deg: f64,
    chis_deg: &[f64],
    rel_sigma: f64,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(1.0, rel_sigma)
        .map_err(|e| Error::InvalidInput(format!("noise level {rel_sigma}: {e}")))?;
    Ok(malus_power(rod, chi_max_deg, chis_deg)
        .into_iter()
        .map(|(chi, p)| (chi, p * noise.sample(&mut rng)))
        .collect())
}

/// Least-squares Malus fit `a·cos²(χ − χ₀) + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MalusFit {
    /// `χ₀` in `[0°, 180°)`.
    pub chi_max_deg: f64,
    pub amplitude: f64,
    pub floor: f64,
    /// False when the data carry no measurable modulation.
    pub orientation_defined: bool,
}

/// Fits via the linear form `c₀ + c₁ cos 2χ + c₂ sin 2χ`.
pub fn fit_malus(samples: &[(f64, f64)]) -> Result<MalusFit> {
    if samples.len() < 5 {
        return Err(Error::FitFailure(format!("need at least 5 samples, got {}", samples.len())));
    }
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::FitFailure("fewer than 3 distinct angles".into()));
    }
    let span = distinct[distinct.len() - 1] - distinct[0];
    if span < 60.0 {
        return Err(Error::FitFailure(format!("angles span {span}°, need at least 60°")));
    }

    // Normal equations for the three basis functions.
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for &(chi, p) in samples {
        let (s, c) = (2.0 * chi.to_radians()).sin_cos();
        let row = [1.0, c, s];
        for i in 0..3 {
            atb[i] += row[i] * p;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve3(ata, atb).ok_or_else(|| Error::FitFailure("singular normal equations".into()))?;

    let half_amp = coef[1].hypot(coef[2]);
    let amplitude = 2.0 * half_amp;
    let scale = coef[0].abs().max(half_amp).max(f64::MIN_POSITIVE);
    let orientation_defined = half_amp > 1e-9 * scale;
    let chi0 = if orientation_defined {
        (0.5 * coef[2].atan2(coef[1]).to_degrees()).rem_euclid(180.0)
    } else {
        0.0
    };
    Ok(MalusFit {
        chi_max_deg: chi0,
        amplitude,
        floor: coef[0] - half_amp,
        orientation_defined,
    })
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Guided polarization for one beam angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationRow {
    pub chi_deg: f64,
    /// `None` when the induced moment vanishes (beam crossed with a purely
    /// longitudinal rod).
    pub stokes: Option<StokesVector>,
    pub psi_deg: Option<f64>,
}

/// Guided Stokes vector versus beam angle, plus the largest Poincaré-sphere
/// distance (degrees) from the state obtained at `χ_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationSweep {
    pub rows: Vec<ExcitationRow>,
    pub drift_deg: f64,
}

pub fn guided_stokes_vs_excitation(
    rod: &NanorodModel,
    mode: &ModeSolution,
    chi_max_deg: f64,
    chis_deg: &[f64],
) -> Result<ExcitationSweep> {
    let radius = rod.pose.dipole_radius(mode);
    let moment = |chi: f64| -> Result<[Complex64; 3]> {
        Ok(induced_dipole(rod, &ExcitationField::new(chi, 1.0, chi_max_deg)?))
    };
    let moment_norm = |p: &[Complex64; 3]| p.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let stokes_of = |p: &[Complex64; 3]| -> Result<StokesVector> {
        let (a, b) = project_dipole(mode, radius, p);
        let j = guided_jones_from(a, b, rod.pose.azimuth_alpha_deg, PropagationDirection::Forward);
        stokes_from_jones(&j)
    };

    let reference = stokes_of(&moment(chi_max_deg)?)?;
    let moments = chis_deg
        .iter()
        .map(|&chi| moment(chi))
        .collect::<Result<Vec<_>>>()?;
    let largest = moments
        .iter()
        .map(moment_norm)
        .fold(moment_norm(&moment(chi_max_deg)?), f64::max);

    let mut drift: f64 = 0.0;
    let mut rows = Vec::with_capacity(chis_deg.len());
    for (&chi, p) in chis_deg.iter().zip(&moments) {
        if moment_norm(p) < 1e-15 * largest {
            rows.push(ExcitationRow {
                chi_deg: chi,
                stokes: None,
                psi_deg: None,
            });
            continue;
        }
        let s = stokes_of(p)?;
        drift = drift.max(s.sphere_distance_deg(&reference));
        rows.push(ExcitationRow {
            chi_deg: chi,
            stokes: Some(s.normalized()),
            psi_deg: ellipse_from_stokes(&s)?.psi_deg,
        });
    }
    Ok(ExcitationSweep { rows, drift_deg: drift })
}

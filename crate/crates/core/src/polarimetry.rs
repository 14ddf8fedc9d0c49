//! Jones and Stokes calculus, polarization ellipses, Poincaré coordinates and
//! fibre-birefringence compensation.
//!
//! Angle conventions: the ellipse orientation `ψ` is measured from the lab
//! `+y` axis toward `+x` and reported in `(−90°, 90°]`. Vertical linear light
//! therefore has `ψ = 0` and sits at Poincaré longitude 0; horizontal has
//! `ψ = 90°`. `S₃ = 2 Im(Ex* Ey) > 0` is called counter-clockwise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::simplex::nelder_mead;

const LINEAR_THRESHOLD: f64 = 1e-12;

/// Basis in which a Jones vector is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JonesBasis {
    /// Lab `(x, y)` transverse axes.
    Lab,
    /// Dipole-local `(x′, y′)` axes.
    Primed,
}

/// Transverse field `(E_x, E_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesVector {
    pub ex: Complex64,
    pub ey: Complex64,
    pub basis: JonesBasis,
}

impl JonesVector {
    pub fn new(ex: Complex64, ey: Complex64) -> Self {
        JonesVector {
            ex,
            ey,
            basis: JonesBasis::Lab,
        }
    }

    pub fn in_basis(mut self, basis: JonesBasis) -> Self {
        self.basis = basis;
        self
    }

    /// Pure state with orientation `ψ` and ellipticity angle `χ` (degrees).
    pub fn from_ellipse(psi_deg: f64, ellipticity_deg: f64) -> Self {
        // Standard orientation from +x is 90° − ψ.
        let orient = (90.0 - psi_deg).to_radians();
        let chi = ellipticity_deg.to_radians();
        let (so, co) = orient.sin_cos();
        let (sc, cc) = chi.sin_cos();
        let i = Complex64::i();
        JonesVector::new(co * cc - i * so * sc, so * cc + i * co * sc)
    }

    pub fn intensity(&self) -> f64 {
        self.ex.norm_sqr() + self.ey.norm_sqr()
    }
}

/// Stokes parameters of a (possibly partially) polarized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesVector {
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl StokesVector {
    pub fn new(s0: f64, s1: f64, s2: f64, s3: f64) -> Self {
        StokesVector { s0, s1, s2, s3 }
    }

    /// Scaled so that `S₀ = 1`.
    pub fn normalized(&self) -> Self {
        StokesVector {
            s0: 1.0,
            s1: self.s1 / self.s0,
            s2: self.s2 / self.s0,
            s3: self.s3 / self.s0,
        }
    }

    /// `√(S₁² + S₂² + S₃²) / S₀`.
    pub fn degree_of_polarization(&self) -> f64 {
        (self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3).sqrt() / self.s0
    }

    /// Angle between the two states on the Poincaré sphere, degrees.
    pub fn sphere_distance_deg(&self, other: &StokesVector) -> f64 {
        let a = unit_stokes(self);
        let b = unit_stokes(other);
        let diff = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        let sum = ((a[0] + b[0]).powi(2) + (a[1] + b[1]).powi(2) + (a[2] + b[2]).powi(2)).sqrt();
        2.0 * diff.atan2(sum).to_degrees()
    }
}

fn unit_stokes(s: &StokesVector) -> [f64; 3] {
    let n = (s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3).sqrt();
    if n == 0.0 {
        return [0.0; 3];
    }
    [s.s1 / n, s.s2 / n, s.s3 / n]
}

/// Sense of rotation of the field in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    CounterClockwise,
    Clockwise,
    Linear,
}

/// Orientation, ellipticity and handedness of a polarization ellipse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationEllipse {
    /// Orientation in degrees, `(−90°, 90°]`, from `+y` toward `+x`.
    /// `None` when the state carries no linear part (circular or unpolarized).
    pub psi_deg: Option<f64>,
    /// Ellipticity angle in degrees, `[−45°, 45°]`.
    pub ellipticity_deg: f64,
    pub handedness: Handedness,
}

impl PolarizationEllipse {
    /// Orientation, with the circular case mapped to `0`.
    pub fn psi_or_zero(&self) -> f64 {
        self.psi_deg.unwrap_or(0.0)
    }
}

/// Point on the Poincaré sphere, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoincarePoint {
    /// `2ψ`, in `(−180°, 180°]`.
    pub longitude_deg: f64,
    /// `2χ = arcsin(S₃/S₀)`, in `[−90°, 90°]`.
    pub latitude_deg: f64,
}

/// `S0=|Ex|²+|Ey|²`, `S1=|Ex|²−|Ey|²`, `S2=2Re(Ex*Ey)`, `S3=2Im(Ex*Ey)`.
pub fn stokes_from_jones(j: &JonesVector) -> Result<StokesVector> {
    let s0 = j.intensity();
    if s0 == 0.0 || !s0.is_finite() {
        return Err(Error::DegenerateState("zero or non-finite Jones vector"));
    }
    let cross = j.ex.conj() * j.ey;
    Ok(StokesVector {
        s0,
        s1: j.ex.norm_sqr() - j.ey.norm_sqr(),
        s2: 2.0 * cross.re,
        s3: 2.0 * cross.im,
    })
}

/// Wrap an angle in degrees into `(−90°, 90°]`.
pub fn wrap_half_turn(deg: f64) -> f64 {
    let mut x = deg.rem_euclid(180.0);
    if x > 90.0 {
        x -= 180.0;
    }
    if x == -90.0 {
        x = 90.0;
    }
    x
}

pub fn ellipse_from_stokes(s: &StokesVector) -> Result<PolarizationEllipse> {
    if !(s.s0 > 0.0) {
        return Err(Error::DegenerateState("S0 must be positive"));
    }
    let ratio = (s.s3 / s.s0).clamp(-1.0, 1.0);
    let ellipticity_deg = 0.5 * ratio.asin().to_degrees();
    let handedness = if ratio.abs() < LINEAR_THRESHOLD {
        Handedness::Linear
    } else if ratio > 0.0 {
        Handedness::CounterClockwise
    } else {
        Handedness::Clockwise
    };
    let psi_deg = if s.s1 == 0.0 && s.s2 == 0.0 {
        None
    } else {
        let from_x = 0.5 * s.s2.atan2(s.s1).to_degrees();
        Some(wrap_half_turn(90.0 - from_x))
    };
    Ok(PolarizationEllipse {
        psi_deg,
        ellipticity_deg,
        handedness,
    })
}

pub fn poincare_from_stokes(s: &StokesVector) -> Result<PoincarePoint> {
    let e = ellipse_from_stokes(s)?;
    Ok(PoincarePoint {
        longitude_deg: 2.0 * e.psi_or_zero(),
        latitude_deg: 2.0 * e.ellipticity_deg,
    })
}

/// Rotate the field by `angle_deg` (from `+x` toward `+y`).
///
/// Preserves `S₀` and `S₃` and turns `(S₁, S₂)` by twice the angle.
pub fn rotate_jones(j: &JonesVector, angle_deg: f64) -> JonesVector {
    apply_jones(&JonesMatrix::rotation(angle_deg), j)
}

pub fn apply_jones(m: &JonesMatrix, j: &JonesVector) -> JonesVector {
    let e = &m.elements;
    JonesVector {
        ex: e[0][0] * j.ex + e[0][1] * j.ey,
        ey: e[1][0] * j.ex + e[1][1] * j.ey,
        basis: j.basis,
    }
}

/// 2×2 complex Jones matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    pub elements: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub fn new(elements: [[Complex64; 2]; 2]) -> Self {
        JonesMatrix { elements }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        JonesMatrix::new([[o, z], [z, o]])
    }

    /// Real rotation `[[c, −s], [s, c]]`.
    pub fn rotation(angle_deg: f64) -> Self {
        let (s, c) = angle_deg.to_radians().sin_cos();
        JonesMatrix::new([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ])
    }

    /// Linear retarder with retardance `δ` (rad) and fast axis at `ρ` (deg).
    pub fn retarder(delta: f64, axis_deg: f64) -> Self {
        let half = 0.5 * delta;
        let d = JonesMatrix::new([
            [Complex64::from_polar(1.0, -half), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, half)],
        ]);
        JonesMatrix::rotation(axis_deg)
            .mul(&d)
            .mul(&JonesMatrix::rotation(-axis_deg))
    }

    pub fn mul(&self, other: &JonesMatrix) -> JonesMatrix {
        let a = &self.elements;
        let b = &other.elements;
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        JonesMatrix::new(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> JonesMatrix {
        let e = &self.elements;
        JonesMatrix::new([
            [e[0][0].conj(), e[1][0].conj()],
            [e[0][1].conj(), e[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.elements[0][0] + self.elements[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        let e = &self.elements;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }

    /// Largest entry-wise deviation of `M·M†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.mul(&self.adjoint());
        let id = JonesMatrix::identity();
        max_entry_distance(&p, &id)
    }
}

/// Largest entry-wise modulus of `a − b`.
pub fn max_entry_distance(a: &JonesMatrix, b: &JonesMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((a.elements[i][j] - b.elements[i][j]).norm());
        }
    }
    worst
}

/// `1 − |tr(A·B)|²/4`: zero iff `A·B` is the identity up to a global phase.
pub fn infidelity(a: &JonesMatrix, b: &JonesMatrix) -> f64 {
    (1.0 - a.mul(b).trace().norm_sqr() / 4.0).max(0.0)
}

/// Haar-random element of U(2), deterministic per seed.
pub fn random_fiber_unitary(seed: u64) -> JonesMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Uniform point on S³ gives Haar measure on SU(2); a uniform phase lifts it to U(2).
    let g: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = Complex64::new(g[0], g[1]) / norm;
    let b = Complex64::new(g[2], g[3]) / norm;
    let phase_dist = Uniform::new(0.0, std::f64::consts::TAU).expect("valid range");
    let phase = Complex64::from_polar(1.0, phase_dist.sample(&mut rng));
    JonesMatrix::new([[a * phase, -b.conj() * phase], [b * phase, a.conj() * phase]])
}

/// Which compensator family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompensationMode {
    /// One variable retarder: retardance and axis.
    SingleBerek,
    /// Retarder between two rotations: any element of U(2) up to phase.
    Full,
}

impl std::str::FromStr for CompensationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single_berek" => Ok(CompensationMode::SingleBerek),
            "full" => Ok(CompensationMode::Full),
            other => Err(Error::Config(format!(
                "unknown compensation mode '{other}' (expected single_berek or full)"
            ))),
        }
    }
}

impl std::fmt::Display for CompensationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CompensationMode::SingleBerek => "single_berek",
            CompensationMode::Full => "full",
        })
    }
}

/// Compensator parameters.
///
/// `(δ, ρ)` identify the birefringence being undone; the plate itself applies
/// the inverse retarder. The full compensator is
/// `W = R(post) · Ret(δ, ρ)† · R(pre)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensatorSetting {
    /// Retardance, rad.
    pub retardance_delta: f64,
    /// Retarder axis, degrees in `[0°, 180°)`.
    pub axis_rho_deg: f64,
    pub pre_rotation_deg: Option<f64>,
    pub post_rotation_deg: Option<f64>,
}

impl CompensatorSetting {
    pub fn unitary(&self) -> JonesMatrix {
        let plate = JonesMatrix::retarder(self.retardance_delta, self.axis_rho_deg).adjoint();
        let pre = JonesMatrix::rotation(self.pre_rotation_deg.unwrap_or(0.0));
        let post = JonesMatrix::rotation(self.post_rotation_deg.unwrap_or(0.0));
        post.mul(&plate).mul(&pre)
    }
}

/// Outcome of a compensation fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Compensation {
    pub setting: CompensatorSetting,
    /// `1 − |tr(W·M)|²/4` at the returned setting.
    pub residual_infidelity: f64,
}

pub fn compensate(m: &JonesMatrix, mode: CompensationMode) -> Compensation {
    match mode {
        CompensationMode::SingleBerek => compensate_single_berek(m),
        CompensationMode::Full => compensate_full(m),
    }
}

/// Map `(δ, ρ)` to `δ ∈ [0, π]`, `ρ ∈ [0°, 180°)`; same retarder up to phase.
fn canonical_retarder(delta: f64, rho_deg: f64) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut delta = delta.rem_euclid(tau);
    let mut rho = rho_deg;
    if delta > std::f64::consts::PI {
        delta = tau - delta;
        rho += 90.0;
    }
    rho = rho.rem_euclid(180.0);
    if delta < 1e-9 {
        rho = 0.0;
    }
    if rho >= 180.0 {
        rho -= 180.0;
    }
    (delta, rho)
}

fn compensate_single_berek(m: &JonesMatrix) -> Compensation {
    let objective = |p: &[f64]| infidelity(&JonesMatrix::retarder(p[0], p[1]).adjoint(), m);

    const GRID: usize = 64;
    let d_step = std::f64::consts::TAU / GRID as f64;
    let r_step = 180.0 / GRID as f64;
    let mut start = [0.0, 0.0];
    let mut best = f64::INFINITY;
    for i in 0..GRID {
        for j in 0..GRID {
            let p = [i as f64 * d_step, j as f64 * r_step];
            let v = objective(&p);
            if v < best {
                best = v;
                start = p;
            }
        }
    }

    let refined = nelder_mead(objective, &start, &[0.5 * d_step, 0.5 * r_step], 1e-12, 5000);
    // A second pass restarts the simplex at the optimum to polish past the
    // objective-spread stopping rule.
    let polished = nelder_mead(
        objective,
        &refined.point,
        &[1e-3 * d_step, 1e-3 * r_step],
        1e-16,
        5000,
    );
    let point = if polished.value <= refined.value {
        polished.point
    } else {
        refined.point
    };

    let (delta, rho) = canonical_retarder(point[0], point[1]);
    let setting = CompensatorSetting {
        retardance_delta: delta,
        axis_rho_deg: rho,
        pre_rotation_deg: None,
        post_rotation_deg: None,
    };
    Compensation {
        residual_infidelity: infidelity(&setting.unitary(), m),
        setting,
    }
}

/// Closed-form rotation–retarder–rotation inverse of `m`.
fn compensate_full(m: &JonesMatrix) -> Compensation {
    // Target W ∝ M†, projected to SU(2): W = [[a, −b*], [b, a*]].
    let target = m.adjoint();
    let det = target.determinant();
    let root = det.sqrt();
    let a = target.elements[0][0] / root;
    let b = target.elements[1][0] / root;

    // R(p)·D(δ)·R(q) with D(δ) = diag(e^{−iδ/2}, e^{iδ/2}) has
    // a = cos(δ/2)cos(p+q) − i sin(δ/2)cos(p−q),
    // b = cos(δ/2)sin(p+q) − i sin(δ/2)sin(p−q).
    let cos_half = a.re.hypot(b.re);
    let sin_half = a.im.hypot(b.im);
    let delta = 2.0 * sin_half.atan2(cos_half);
    let sum = if cos_half > 0.0 { b.re.atan2(a.re) } else { 0.0 };
    let diff = if sin_half > 0.0 { (-b.im).atan2(-a.im) } else { 0.0 };
    let p = 0.5 * (sum + diff);
    let q = 0.5 * (sum - diff);

    // D(δ) = R(90°)·D(δ)†·R(−90°), so shift the rotations to use Ret(δ, 0)†.
    let setting = CompensatorSetting {
        retardance_delta: delta,
        axis_rho_deg: 0.0,
        pre_rotation_deg: Some((q.to_degrees() + 90.0).rem_euclid(180.0)),
        post_rotation_deg: Some((p.to_degrees() - 90.0).rem_euclid(180.0)),
    };
    Compensation {
        residual_infidelity: infidelity(&setting.unitary(), m),
        setting,
    }
}

/// Derivative-free search over the three full-mode parameters.
///
/// Independent of the closed form; used to cross-check it.
pub fn compensate_full_search(m: &JonesMatrix) -> Compensation {
    let unitary = |p: &[f64]| CompensatorSetting {
        retardance_delta: p[0],
        axis_rho_deg: 0.0,
        pre_rotation_deg: Some(p[1]),
        post_rotation_deg: Some(p[2]),
    };
    let objective = |p: &[f64]| infidelity(&unitary(p).unitary(), m);

    const GRID: usize = 16;
    let mut start = [0.0; 3];
    let mut best = f64::INFINITY;
    for i in 0..GRID {
        for j in 0..GRID {
            for k in 0..GRID {
                let p = [
                    i as f64 * std::f64::consts::TAU / GRID as f64,
                    j as f64 * 180.0 / GRID as f64,
                    k as f64 * 180.0 / GRID as f64,
                ];
                let v = objective(&p);
                if v < best {
                    best = v;
                    start = p;
                }
            }
        }
    }
    let mut point = start.to_vec();
    let mut scale = [0.2, 5.0, 5.0];
    for _ in 0..4 {
        let r = nelder_mead(objective, &point, &scale, 1e-18, 5000);
        point = r.point;
        scale.iter_mut().for_each(|s| *s *= 1e-2);
    }
    let mut setting = unitary(&point);
    setting.retardance_delta = setting.retardance_delta.rem_euclid(std::f64::consts::TAU);
    setting.pre_rotation_deg = setting.pre_rotation_deg.map(|x| x.rem_euclid(180.0));
    setting.post_rotation_deg = setting.post_rotation_deg.map(|x| x.rem_euclid(180.0));
    Compensation {
        residual_infidelity: infidelity(&setting.unitary(), m),
        setting,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stokes_of_basic_states() {
        let h = stokes_from_jones(&JonesVector::new(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert_eq!(h, StokesVector::new(1.0, 1.0, 0.0, 0.0));

        let r = std::f64::consts::FRAC_1_SQRT_2;
        let circ = stokes_from_jones(&JonesVector::new(c(r, 0.0), c(0.0, r))).unwrap();
        assert_abs_diff_eq!(circ.s0, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(circ.s1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(circ.s2, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(circ.s3, 1.0, epsilon = 1e-15);

        let diag = stokes_from_jones(&JonesVector::new(c(r, 0.0), c(r, 0.0))).unwrap();
        assert_abs_diff_eq!(diag.s2, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(diag.s1, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_vector_is_degenerate() {
        let z = JonesVector::new(c(0.0, 0.0), c(0.0, 0.0));
        assert!(matches!(stokes_from_jones(&z), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn ellipse_of_basic_states() {
        let h = ellipse_from_stokes(&StokesVector::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(h.psi_deg, Some(90.0));
        assert_eq!(h.ellipticity_deg, 0.0);
        assert_eq!(h.handedness, Handedness::Linear);

        let v = ellipse_from_stokes(&StokesVector::new(1.0, -1.0, 0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(v.psi_deg.unwrap(), 0.0, epsilon = 1e-12);

        let ccw = ellipse_from_stokes(&StokesVector::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(ccw.ellipticity_deg, 45.0, epsilon = 1e-12);
        assert_eq!(ccw.handedness, Handedness::CounterClockwise);
        assert_eq!(ccw.psi_deg, None);

        let cw = ellipse_from_stokes(&StokesVector::new(1.0, 0.0, 0.0, -1.0)).unwrap();
        assert_eq!(cw.handedness, Handedness::Clockwise);

        assert!(ellipse_from_stokes(&StokesVector::new(0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn depolarized_has_no_orientation() {
        let e = ellipse_from_stokes(&StokesVector::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(e.psi_deg, None);
        assert_eq!(e.handedness, Handedness::Linear);
    }

    #[test]
    fn rotation_basics() {
        let h = JonesVector::new(c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(rotate_jones(&h, 0.0), h);
        let v = rotate_jones(&h, 90.0);
        assert_abs_diff_eq!(v.ex.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v.ey.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn wrap_half_turn_range() {
        assert_eq!(wrap_half_turn(90.0), 90.0);
        assert_eq!(wrap_half_turn(-90.0), 90.0);
        assert_eq!(wrap_half_turn(100.0), -80.0);
        assert_eq!(wrap_half_turn(-100.0), 80.0);
        assert_eq!(wrap_half_turn(0.0), 0.0);
    }

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        for seed in 0..20 {
            let u = random_fiber_unitary(seed);
            assert!(u.unitarity_error() < 1e-12);
            assert_eq!(u, random_fiber_unitary(seed));
        }
        assert!(max_entry_distance(&random_fiber_unitary(1), &random_fiber_unitary(2)) > 1e-6);
    }

    #[test]
    fn identity_needs_no_compensation() {
        let r = compensate(&JonesMatrix::identity(), CompensationMode::SingleBerek);
        assert!(r.setting.retardance_delta.abs() < 1e-6);
        assert!(r.residual_infidelity < 1e-12);
        let f = compensate(&JonesMatrix::identity(), CompensationMode::Full);
        assert!(f.residual_infidelity < 1e-14);
    }

    #[test]
    fn quarter_wave_plate_is_identified() {
        let qwp = JonesMatrix::retarder(std::f64::consts::FRAC_PI_2, 0.0);
        let r = compensate(&qwp, CompensationMode::SingleBerek);
        assert!((r.setting.retardance_delta - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "{r:?}");
        let rho = r.setting.axis_rho_deg;
        assert!(rho.min(180.0 - rho) < 1e-6, "{r:?}");
        assert!(r.residual_infidelity < 1e-10);
    }

    #[test]
    fn canonical_retarder_folds() {
        let (d, r) = canonical_retarder(1.5 * std::f64::consts::PI, 90.0);
        assert_abs_diff_eq!(d, 0.5 * std::f64::consts::PI, epsilon = 1e-12);
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-12);
        let a = JonesMatrix::retarder(1.5 * std::f64::consts::PI, 90.0);
        let b = JonesMatrix::retarder(d, r);
        assert!(infidelity(&a.adjoint(), &b) < 1e-14);
    }

    #[test]
    fn full_mode_closed_form_inverts() {
        for seed in 0..50 {
            let m = random_fiber_unitary(seed);
            let r = compensate(&m, CompensationMode::Full);
            assert!(r.residual_infidelity < 1e-12, "seed {seed}: {r:?}");
        }
    }
}

//! Concrete photon wave-function families in momentum space: the
//! single-photon and beam saturators, the polynomial trial family used by
//! the variational minimization, 1D Gaussians, closed-form eigenstates of
//! the radial problems, and user-supplied sampled grids.
//!
//! Two equivalent descriptions of a state are used throughout:
//! `f`, integrated with the Lorentz-invariant measure d³k/k, and the
//! rescaled function `g = f/√k`, integrated with the plain d³k measure.
//! States are immutable after construction and evaluation is pure.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lightcone::{AxisVector, GPartials, MomentumPoint, MomentumWaveFunction};
use crate::specfun::{gamma_fn, wigner_d, wigner_d_deriv};
use crate::spectra::{radial_solution, RadialDecay, RadialSolution, System};

/// Ground-level eigenvalue of the single-photon problem, γ = 1 + √5/2.
pub fn gamma_single() -> f64 {
    1.0 + 5.0_f64.sqrt() / 2.0
}

/// Ground-level eigenvalue of the beam problem, γ = 1/2 + √2.
pub fn gamma_beam() -> f64 {
    0.5 + std::f64::consts::SQRT_2
}

/// Which function/measure pair a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormConvention {
    /// f with the Lorentz-invariant measure d³k/k.
    RelativisticF,
    /// g = f/√k with the plain measure d³k.
    NonrelativisticG,
}

/// Decay class of |g|² in k, used to match the radial quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialClass {
    /// |g|² ~ k^power · exp(−(sigma·k)²) · polynomial
    GaussLike { power: f64, sigma: f64 },
    /// |g|² ~ k^power · exp(−rate·k) · polynomial
    ExpLike { power: f64, rate: f64 },
    /// Sampled grid defined on [kmin, kmax].
    Bounded { kmin: f64, kmax: f64 },
}

/// Sampled state on a tensor grid (k_i, θ_j, φ_l), interpolated by local
/// quadratic Lagrange polynomials (periodic in φ).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridData {
    pub k: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    /// Row-major values, k-major: index = (ik·nθ + iθ)·nφ + iφ.
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Convention of the stored values; defaults to the relativistic f.
    #[serde(default = "default_grid_convention")]
    pub convention: NormConvention,
}

fn default_grid_convention() -> NormConvention {
    NormConvention::RelativisticF
}

impl GridData {
    fn validate(&self) -> Result<()> {
        let (nk, nt, np) = (self.k.len(), self.theta.len(), self.phi.len());
        if nk < 3 || nt < 3 || np < 3 {
            return Err(Error::InvalidState(
                "grid needs at least 3 nodes per axis for quadratic interpolation".into(),
            ));
        }
        if self.re.len() != nk * nt * np || self.im.len() != nk * nt * np {
            return Err(Error::InvalidState(format!(
                "grid payload length {} does not match {}x{}x{} nodes",
                self.re.len(),
                nk,
                nt,
                np
            )));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if !increasing(&self.k) || !increasing(&self.theta) || !increasing(&self.phi) {
            return Err(Error::InvalidState(
                "grid axes must be strictly increasing".into(),
            ));
        }
        if self.k[0] < 0.0
            || self.theta[0] <= 0.0
            || *self.theta.last().unwrap() >= std::f64::consts::PI
        {
            return Err(Error::InvalidState(
                "grid theta nodes must be interior to (0, pi) and k nonnegative".into(),
            ));
        }
        Ok(())
    }

    fn index(&self, ik: usize, it: usize, ip: usize) -> Complex64 {
        let idx = (ik * self.theta.len() + it) * self.phi.len() + ip;
        Complex64::new(self.re[idx], self.im[idx])
    }

    /// Interpolated value and partial derivatives of the stored function.
    fn eval(
        &self,
        k: f64,
        theta: f64,
        phi: f64,
    ) -> Result<(Complex64, Complex64, Complex64, Complex64)> {
        let (ik, wk, dwk) = stencil(&self.k, k).ok_or_else(|| {
            Error::OutOfGrid(format!(
                "k = {k} outside [{}, {}]",
                self.k[0],
                self.k.last().unwrap()
            ))
        })?;
        let (it, wt, dwt) = stencil(&self.theta, theta).ok_or_else(|| {
            Error::OutOfGrid(format!(
                "theta = {theta} outside [{}, {}]",
                self.theta[0],
                self.theta.last().unwrap()
            ))
        })?;
        let (ip, wp, dwp) = periodic_stencil(&self.phi, phi);
        let np = self.phi.len();
        let mut value = Complex64::default();
        let mut dk = Complex64::default();
        let mut dtheta = Complex64::default();
        let mut dphi = Complex64::default();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let v = self.index(ik + a, it + b, (ip + c) % np);
                    value += v * (wk[a] * wt[b] * wp[c]);
                    dk += v * (dwk[a] * wt[b] * wp[c]);
                    dtheta += v * (wk[a] * dwt[b] * wp[c]);
                    dphi += v * (wk[a] * wt[b] * dwp[c]);
                }
            }
        }
        Ok((value, dk, dtheta, dphi))
    }
}

/// Three-point Lagrange stencil on a sorted axis: start index, value
/// weights, derivative weights. `None` when x is outside the axis range.
fn stencil(axis: &[f64], x: f64) -> Option<(usize, [f64; 3], [f64; 3])> {
    let n = axis.len();
    if x < axis[0] - 1e-12 || x > axis[n - 1] + 1e-12 {
        return None;
    }
    let pos = axis.partition_point(|&v| v < x);
    let start = pos.saturating_sub(1).min(n - 3);
    let x0 = axis[start];
    let x1 = axis[start + 1];
    let x2 = axis[start + 2];
    Some((start, lagrange3(x, x0, x1, x2), dlagrange3(x, x0, x1, x2)))
}

/// Periodic stencil in φ with period 2π.
fn periodic_stencil(axis: &[f64], phi: f64) -> (usize, [f64; 3], [f64; 3]) {
    let n = axis.len();
    let two_pi = 2.0 * std::f64::consts::PI;
    let x = phi.rem_euclid(two_pi);
    let pos = axis.partition_point(|&v| v <= x);
    // Center the 3-point stencil on the interval containing x.
    let start = (pos + n - 1) % n;
    let unwrap = |i: usize| -> f64 {
        let raw = axis[(start + i) % n];
        let mut v = raw;
        while v < axis[start % n] - 1e-12 {
            v += two_pi;
        }
        v
    };
    let x0 = unwrap(0);
    let x1 = unwrap(1);
    let x2 = unwrap(2);
    let xx = if x < x0 - 1e-12 { x + two_pi } else { x };
    (start, lagrange3(xx, x0, x1, x2), dlagrange3(xx, x0, x1, x2))
}

fn lagrange3(x: f64, x0: f64, x1: f64, x2: f64) -> [f64; 3] {
    [
        (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2)),
        (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2)),
        (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1)),
    ]
}

fn dlagrange3(x: f64, x0: f64, x1: f64, x2: f64) -> [f64; 3] {
    [
        (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)),
        (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)),
        (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1)),
    ]
}

/// Wave-function family of a [`PhotonState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Sharp-bound eigenfunctions of the single-photon problem, m ∈ {−1,0,+1}.
    SaturatorSingle { m: i32 },
    /// Sharp-bound mode functions of the coherent-beam problem.
    SaturatorBeam { m: i32 },
    /// Saturator (base m = ±1) times a polynomial in (a k cosθ).
    TrialPoly { base_m: i32, coeffs: Vec<f64> },
    /// Gaussian along the axis times a vortex-carrying transverse Gaussian.
    Gaussian1D { width: f64 },
    /// Closed-form eigenstate of a quantized level (not file-serializable).
    Eigenstate { radial: RadialSolution, m: i32 },
    /// Trial family for the shifted-connection minimization:
    /// k^p exp(−k²/2w²) (1+cosθ)^q e^{iλφ} (not file-serializable).
    ImfTrial {
        radial_power: f64,
        width: f64,
        angular_power: f64,
    },
    /// Sampled tensor grid.
    Grid(GridData),
    /// base + eps · other, for stationarity probes (not file-serializable).
    Blend {
        base: Box<PhotonState>,
        other: Box<PhotonState>,
        eps: f64,
    },
}

/// Immutable photon state: family, length scale `a`, helicity λ = ±1 and the
/// reference axis of the polarization gauge.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonState {
    family: Family,
    a: f64,
    helicity: i32,
    axis: AxisVector,
}

fn validate_m(m: i32) -> Result<()> {
    if !(-1..=1).contains(&m) {
        return Err(Error::Domain(format!(
            "saturator m must be -1, 0 or +1, got {m}"
        )));
    }
    Ok(())
}

fn validate_scale(a: f64) -> Result<()> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::Domain(format!("scale a must be positive, got {a}")));
    }
    Ok(())
}

fn validate_helicity(h: i32) -> Result<()> {
    if h != 1 && h != -1 {
        return Err(Error::Domain(format!("helicity must be +1 or -1, got {h}")));
    }
    Ok(())
}

/// Maximum polynomial order of the trial family accepted by default.
pub const MAX_TRIAL_ORDER: usize = 6;

impl PhotonState {
    /// Single-photon saturating state
    /// f = A a Θ_m(θ) e^{imφ} (ak)^{γ−1} exp(−(ak)²/2), γ = 1 + √5/2,
    /// A = √(3/(4πΓ(γ))), with Θ₀ = sinθ and Θ_± = (1 ± cosθ)/√2.
    pub fn saturator_single(m: i32, a: f64) -> Result<Self> {
        validate_m(m)?;
        validate_scale(a)?;
        Ok(Self {
            family: Family::SaturatorSingle { m },
            a,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Beam saturating mode
    /// f = A a Θ_m(θ) e^{imφ} (ak)^{√2−1} exp(−γ a k), γ = 1/2 + √2,
    /// A = (2γ)^{√2} √(3/(8πΓ(2√2))).
    pub fn saturator_beam(m: i32, a: f64) -> Result<Self> {
        validate_m(m)?;
        validate_scale(a)?;
        Ok(Self {
            family: Family::SaturatorBeam { m },
            a,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Variational trial state: saturator f_± times
    /// 1 + c₁(a k cosθ) + ... + c_q (a k cosθ)^q.
    ///
    /// Orders beyond [`MAX_TRIAL_ORDER`] are accepted here (quadrature sizes
    /// itself to the degree); the variational runs enforce the 0..6 range.
    pub fn trial_state(base_m: i32, coeffs: Vec<f64>, a: f64) -> Result<Self> {
        if base_m != 1 && base_m != -1 {
            return Err(Error::Domain(format!(
                "trial base m must be ±1, got {base_m}"
            )));
        }
        validate_scale(a)?;
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("trial coefficients must be finite".into()));
        }
        Ok(Self {
            family: Family::TrialPoly { base_m, coeffs },
            a,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Gaussian along the axis, g ∝ (w k sinθ) e^{iφ} exp(−(wk)²/2); the
    /// axial factor exp(−k_z²w²/2) saturates the one-dimensional relation,
    /// the transverse vortex factor keeps the state regular on the axis.
    pub fn gaussian_1d(width: f64) -> Result<Self> {
        if !width.is_finite() || width <= 0.0 {
            return Err(Error::Domain(format!(
                "width must be positive, got {width}"
            )));
        }
        Ok(Self {
            family: Family::Gaussian1D { width },
            a: 1.0,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Closed-form eigenstate of the quantized level (system, n, j, m).
    pub fn eigenstate(system: System, n: u32, j: u32, m: i32, a: f64) -> Result<Self> {
        validate_scale(a)?;
        if m.abs() > j as i32 {
            return Err(Error::ForbiddenQuantumNumbers(format!(
                "|m| <= j required, got j={j}, m={m}"
            )));
        }
        Ok(Self {
            family: Family::Eigenstate {
                radial: radial_solution(system, n, j)?,
                m,
            },
            a,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Trial state for the shifted-connection minimization.
    pub fn imf_trial(radial_power: f64, width: f64, angular_power: f64) -> Result<Self> {
        if !(radial_power.is_finite() && width.is_finite() && angular_power.is_finite())
            || width <= 0.0
            || radial_power < -0.4
            || angular_power < 0.0
        {
            return Err(Error::Domain(format!(
                "invalid trial parameters (p, w, q) = ({radial_power}, {width}, {angular_power})"
            )));
        }
        Ok(Self {
            family: Family::ImfTrial {
                radial_power,
                width,
                angular_power,
            },
            a: 1.0,
            helicity: 1,
            axis: AxisVector::z(),
        })
    }

    /// Additive superposition base + eps·other of two definite-mode states
    /// sharing the same azimuthal mode, scale and helicity.
    pub fn blend(base: PhotonState, other: PhotonState, eps: f64) -> Result<Self> {
        if base.azimuthal_mode().is_none()
            || base.azimuthal_mode() != other.azimuthal_mode()
            || base.helicity != other.helicity
            || base.a != other.a
        {
            return Err(Error::Domain(
                "blend requires two definite-mode states with equal m, scale and helicity".into(),
            ));
        }
        if !eps.is_finite() {
            return Err(Error::Domain("blend coefficient must be finite".into()));
        }
        let a = base.a;
        let helicity = base.helicity;
        let axis = base.axis;
        Ok(Self {
            family: Family::Blend {
                base: Box::new(base),
                other: Box::new(other),
                eps,
            },
            a,
            helicity,
            axis,
        })
    }

    /// State sampled on a tensor grid.
    pub fn from_grid(grid: GridData, a: f64, helicity: i32) -> Result<Self> {
        grid.validate()?;
        validate_scale(a)?;
        validate_helicity(helicity)?;
        Ok(Self {
            family: Family::Grid(grid),
            a,
            helicity,
            axis: AxisVector::z(),
        })
    }

    /// Flip to the opposite helicity representation (complex conjugation,
    /// which maps the angular factor Θ_m to Θ_{−m} at fixed e^{imφ}).
    pub fn with_helicity(mut self, helicity: i32) -> Result<Self> {
        validate_helicity(helicity)?;
        self.helicity = helicity;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.a
    }

    pub fn helicity(&self) -> i32 {
        self.helicity
    }

    /// Reference axis of the polarization gauge.
    pub fn axis_vector(&self) -> AxisVector {
        self.axis
    }

    /// The azimuthal quantum number when the state is a pure e^{imφ} mode
    /// with a real (k,θ) profile; `None` for sampled grids.
    pub fn azimuthal_mode(&self) -> Option<i32> {
        let m_eff = |m: i32| -> i32 { m };
        match &self.family {
            Family::SaturatorSingle { m } | Family::SaturatorBeam { m } => Some(m_eff(*m)),
            Family::TrialPoly { base_m, .. } => Some(*base_m),
            Family::Gaussian1D { .. } => Some(1),
            Family::Eigenstate { m, .. } => Some(*m),
            Family::ImfTrial { .. } => Some(self.helicity),
            Family::Blend { base, .. } => base.azimuthal_mode(),
            Family::Grid(_) => None,
        }
    }

    /// Angular factor Θ(θ) with its θ-derivative for definite-m families.
    fn angular_factor(&self, m: i32, theta: f64) -> Result<(f64, f64)> {
        // Opposite helicity conjugates the family, swapping Θ_m for Θ_{−m}.
        let me = if self.helicity == 1 { m } else { -m };
        let (s, c) = theta.sin_cos();
        Ok(match me {
            0 => (s, c),
            1 => (
                (1.0 + c) / std::f64::consts::SQRT_2,
                -s / std::f64::consts::SQRT_2,
            ),
            -1 => (
                (1.0 - c) / std::f64::consts::SQRT_2,
                s / std::f64::consts::SQRT_2,
            ),
            _ => unreachable!("validated m"),
        })
    }

    /// Real reduced profile u(k, θ) of g = u e^{imφ} and its (∂k, ∂θ)
    /// derivatives, for definite-m families.
    pub fn profile(&self, k: f64, theta: f64) -> Result<(f64, f64, f64)> {
        let a = self.a;
        match &self.family {
            Family::SaturatorSingle { m } => {
                let gamma = gamma_single();
                let amp = saturator_single_amplitude(a)?;
                let (th, dth) = self.angular_factor(*m, theta)?;
                let r = amp * a.powf(gamma) * k.powf(gamma - 1.5) * (-0.5 * (a * k).powi(2)).exp();
                let dr = r * ((gamma - 1.5) / k - a * a * k);
                Ok((r * th, dr * th, r * dth))
            }
            Family::SaturatorBeam { m } => {
                let gb = gamma_beam();
                let amp = saturator_beam_amplitude()?;
                let (th, dth) = self.angular_factor(*m, theta)?;
                let p = std::f64::consts::SQRT_2 - 1.5;
                let r = amp * a.powf(std::f64::consts::SQRT_2) * k.powf(p) * (-gb * a * k).exp();
                let dr = r * (p / k - gb * a);
                Ok((r * th, dr * th, r * dth))
            }
            Family::TrialPoly { base_m, coeffs } => {
                let gamma = gamma_single();
                let amp = saturator_single_amplitude(a)?;
                let (th, dth) = self.angular_factor(*base_m, theta)?;
                let r = amp * a.powf(gamma) * k.powf(gamma - 1.5) * (-0.5 * (a * k).powi(2)).exp();
                let dr = r * ((gamma - 1.5) / k - a * a * k);
                let x = a * k * theta.cos();
                let (p, dp) = poly_with_one(coeffs, x);
                let u = r * th * p;
                let du_dk = dr * th * p + r * th * dp * a * theta.cos();
                let du_dt = r * dth * p + r * th * dp * (-a * k * theta.sin());
                Ok((u, du_dk, du_dt))
            }
            Family::Gaussian1D { width } => {
                let w = *width;
                let c = w.powf(2.5) / std::f64::consts::PI.powf(0.75);
                let (s, ct) = theta.sin_cos();
                let r = c * k * (-0.5 * (w * k).powi(2)).exp();
                let dr = r * (1.0 / k - w * w * k);
                Ok((r * s, dr * s, r * ct))
            }
            Family::Eigenstate { radial, m } => {
                let kappa = a * k;
                let (mut v, mut dv) = radial.eval_with_derivative(kappa);
                dv *= a;
                // The beam operator acts on f; convert its level to g = f/√k.
                if radial.system == System::Beam {
                    let sk = k.sqrt();
                    dv = dv / sk - 0.5 * v / (k * sk);
                    v /= sk;
                }
                let th = wigner_d(radial.j, *m, self.helicity, theta)?;
                let dth = wigner_d_deriv(radial.j, *m, self.helicity, theta)?;
                Ok((v * th, dv * th, v * dth))
            }
            Family::ImfTrial {
                radial_power,
                width,
                angular_power,
            } => {
                let (p, w, q) = (*radial_power, *width, *angular_power);
                let r = k.powf(p) * (-0.5 * k * k / (w * w)).exp();
                let dr = r * (p / k - k / (w * w));
                let base = 1.0 + theta.cos();
                let th = base.powf(q);
                let dth = if q == 0.0 {
                    0.0
                } else {
                    -q * theta.sin() * base.powf(q - 1.0)
                };
                Ok((r * th, dr * th, r * dth))
            }
            Family::Blend { base, other, eps } => {
                let (u1, uk1, ut1) = base.profile(k, theta)?;
                let (u2, uk2, ut2) = other.profile(k, theta)?;
                Ok((u1 + eps * u2, uk1 + eps * uk2, ut1 + eps * ut2))
            }
            Family::Grid(_) => Err(Error::NonDifferentiable(
                "sampled grids have no definite azimuthal mode; use g_partials".into(),
            )),
        }
    }

    /// Complex amplitude in the requested convention.
    pub fn evaluate(&self, kp: &MomentumPoint, convention: NormConvention) -> Result<Complex64> {
        let g = self.g(kp)?;
        Ok(match convention {
            NormConvention::NonrelativisticG => g,
            NormConvention::RelativisticF => g * kp.k().sqrt(),
        })
    }

    /// Radial quadrature class matched to the family's decay.
    pub fn radial_class(&self) -> RadialClass {
        let a = self.a;
        match &self.family {
            Family::SaturatorSingle { .. } | Family::TrialPoly { .. } => RadialClass::GaussLike {
                power: 2.0 * gamma_single() - 3.0,
                sigma: a,
            },
            Family::SaturatorBeam { .. } => RadialClass::ExpLike {
                power: 2.0 * std::f64::consts::SQRT_2 - 3.0,
                rate: 2.0 * gamma_beam() * a,
            },
            Family::Gaussian1D { width } => RadialClass::GaussLike {
                power: 2.0,
                sigma: *width,
            },
            Family::Eigenstate { radial, .. } => match radial.decay {
                RadialDecay::Gaussian => RadialClass::GaussLike {
                    power: 2.0 * radial.exponent,
                    sigma: a,
                },
                RadialDecay::Exponential { rate } => RadialClass::ExpLike {
                    power: 2.0 * radial.exponent - 1.0,
                    rate: 2.0 * rate * a,
                },
            },
            Family::ImfTrial {
                radial_power,
                width,
                ..
            } => RadialClass::GaussLike {
                power: 2.0 * radial_power,
                sigma: 1.0 / width,
            },
            Family::Blend { base, other, .. } => {
                // The slower decay and the smaller leading power dominate.
                match (base.radial_class(), other.radial_class()) {
                    (
                        RadialClass::GaussLike {
                            power: p1,
                            sigma: s1,
                        },
                        RadialClass::GaussLike {
                            power: p2,
                            sigma: s2,
                        },
                    ) => RadialClass::GaussLike {
                        power: p1.min(p2),
                        sigma: s1.min(s2),
                    },
                    (
                        RadialClass::ExpLike {
                            power: p1,
                            rate: r1,
                        },
                        RadialClass::ExpLike {
                            power: p2,
                            rate: r2,
                        },
                    ) => RadialClass::ExpLike {
                        power: p1.min(p2),
                        rate: r1.min(r2),
                    },
                    (c1, _) => c1,
                }
            }
            Family::Grid(grid) => RadialClass::Bounded {
                kmin: grid.k[0].max(1e-12),
                kmax: *grid.k.last().unwrap(),
            },
        }
    }

    /// Extra polynomial degree in k carried on top of the family's base
    /// profile (trial polynomials), used to size quadrature orders.
    pub fn extra_poly_degree(&self) -> usize {
        match &self.family {
            Family::TrialPoly { coeffs, .. } => coeffs.len(),
            _ => 0,
        }
    }

    /// Sampled θ range for grid states; `None` for closed-form families.
    pub fn theta_band(&self) -> Option<(f64, f64)> {
        match &self.family {
            Family::Grid(grid) => Some((grid.theta[0], *grid.theta.last().unwrap())),
            _ => None,
        }
    }

    /// Parses a state-description file (JSON).
    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidState(e.to_string()))?;
        file.into_state()
    }

    /// Serializes the state description for the file-backed families.
    pub fn to_json(&self) -> Result<String> {
        let file = StateFile::from_state(self)?;
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

fn saturator_single_amplitude(_a: f64) -> Result<f64> {
    Ok((3.0 / (4.0 * std::f64::consts::PI * gamma_fn(gamma_single())?)).sqrt())
}

fn saturator_beam_amplitude() -> Result<f64> {
    let gb = gamma_beam();
    let s2 = std::f64::consts::SQRT_2;
    Ok((2.0 * gb).powf(s2) * (3.0 / (8.0 * std::f64::consts::PI * gamma_fn(2.0 * s2)?)).sqrt())
}

/// 1 + Σ cᵢ xⁱ and its derivative.
fn poly_with_one(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut dp = 0.0;
    let mut xn = 1.0;
    for (i, &c) in coeffs.iter().enumerate() {
        dp += c * (i + 1) as f64 * xn;
        xn *= x;
        p += c * xn;
    }
    (p, dp)
}

impl MomentumWaveFunction for PhotonState {
    fn g(&self, kp: &MomentumPoint) -> Result<Complex64> {
        match (&self.family, self.azimuthal_mode()) {
            (Family::Grid(grid), _) => {
                let (v, ..) = grid.eval(kp.k(), kp.theta(), kp.phi())?;
                Ok(match grid.convention {
                    NormConvention::NonrelativisticG => v,
                    NormConvention::RelativisticF => v / kp.k().sqrt(),
                })
            }
            (_, Some(m)) => {
                let (u, _, _) = self.profile(kp.k(), kp.theta())?;
                let phase = Complex64::from_polar(1.0, m as f64 * kp.phi());
                Ok(u * phase)
            }
            _ => unreachable!("all non-grid families carry a definite mode"),
        }
    }

    fn g_partials(&self, kp: &MomentumPoint) -> Option<Result<GPartials>> {
        Some(match (&self.family, self.azimuthal_mode()) {
            (Family::Grid(grid), _) => {
                grid.eval(kp.k(), kp.theta(), kp.phi())
                    .map(|(v, dk, dt, dp)| match grid.convention {
                        NormConvention::NonrelativisticG => GPartials {
                            value: v,
                            dk,
                            dtheta: dt,
                            dphi: dp,
                        },
                        NormConvention::RelativisticF => {
                            let sk = kp.k().sqrt();
                            GPartials {
                                value: v / sk,
                                dk: dk / sk - 0.5 * v / (kp.k() * sk),
                                dtheta: dt / sk,
                                dphi: dp / sk,
                            }
                        }
                    })
            }
            (_, Some(m)) => self.profile(kp.k(), kp.theta()).map(|(u, duk, dut)| {
                let phase = Complex64::from_polar(1.0, m as f64 * kp.phi());
                GPartials {
                    value: u * phase,
                    dk: duk * phase,
                    dtheta: dut * phase,
                    dphi: Complex64::new(0.0, m as f64) * u * phase,
                }
            }),
            _ => unreachable!(),
        })
    }

    fn axis(&self) -> AxisVector {
        self.axis
    }
}

// ---------------------------------------------------------------------------
// State-description files
// ---------------------------------------------------------------------------

fn default_scale() -> f64 {
    1.0
}
fn default_helicity() -> i32 {
    1
}

/// Exact on-disk schema of state-description files.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "family")]
enum StateFile {
    #[serde(rename = "saturator-single")]
    SaturatorSingle {
        m: i32,
        #[serde(default = "default_scale")]
        a: f64,
        #[serde(default = "default_helicity")]
        helicity: i32,
    },
    #[serde(rename = "saturator-beam")]
    SaturatorBeam {
        m: i32,
        #[serde(default = "default_scale")]
        a: f64,
        #[serde(default = "default_helicity")]
        helicity: i32,
    },
    #[serde(rename = "trial-poly")]
    TrialPoly {
        m: i32,
        #[serde(default)]
        coeffs: Vec<f64>,
        #[serde(default = "default_scale")]
        a: f64,
        #[serde(default = "default_helicity")]
        helicity: i32,
    },
    #[serde(rename = "gaussian-1d")]
    Gaussian1D {
        width: f64,
        #[serde(default = "default_scale")]
        a: f64,
        #[serde(default = "default_helicity")]
        helicity: i32,
    },
    #[serde(rename = "grid")]
    Grid {
        grid: GridData,
        #[serde(default = "default_scale")]
        a: f64,
        #[serde(default = "default_helicity")]
        helicity: i32,
    },
}

impl StateFile {
    fn into_state(self) -> Result<PhotonState> {
        match self {
            StateFile::SaturatorSingle { m, a, helicity } => {
                PhotonState::saturator_single(m, a)?.with_helicity(helicity)
            }
            StateFile::SaturatorBeam { m, a, helicity } => {
                PhotonState::saturator_beam(m, a)?.with_helicity(helicity)
            }
            StateFile::TrialPoly {
                m,
                coeffs,
                a,
                helicity,
            } => PhotonState::trial_state(m, coeffs, a)?.with_helicity(helicity),
            StateFile::Gaussian1D { width, a, helicity } => {
                validate_scale(a)?;
                PhotonState::gaussian_1d(width)?.with_helicity(helicity)
            }
            StateFile::Grid { grid, a, helicity } => PhotonState::from_grid(grid, a, helicity),
        }
    }

    fn from_state(state: &PhotonState) -> Result<Self> {
        Ok(match &state.family {
            Family::SaturatorSingle { m } => StateFile::SaturatorSingle {
                m: *m,
                a: state.a,
                helicity: state.helicity,
            },
            Family::SaturatorBeam { m } => StateFile::SaturatorBeam {
                m: *m,
                a: state.a,
                helicity: state.helicity,
            },
            Family::TrialPoly { base_m, coeffs } => StateFile::TrialPoly {
                m: *base_m,
                coeffs: coeffs.clone(),
                a: state.a,
                helicity: state.helicity,
            },
            Family::Gaussian1D { width } => StateFile::Gaussian1D {
                width: *width,
                a: state.a,
                helicity: state.helicity,
            },
            Family::Grid(grid) => StateFile::Grid {
                grid: grid.clone(),
                a: state.a,
                helicity: state.helicity,
            },
            _ => {
                return Err(Error::InvalidState(
                    "this family has no state-description file form".into(),
                ))
            }
        })
    }
}

/// Samples any definite-mode state onto a tensor grid (used to build test
/// fixtures and by the CLI for re-export).
pub fn sample_to_grid(
    state: &PhotonState,
    k_nodes: &[f64],
    theta_nodes: &[f64],
    phi_nodes: &[f64],
) -> Result<GridData> {
    let mut re = Vec::with_capacity(k_nodes.len() * theta_nodes.len() * phi_nodes.len());
    let mut im = Vec::with_capacity(re.capacity());
    for &k in k_nodes {
        for &t in theta_nodes {
            for &p in phi_nodes {
                let v = state.evaluate(
                    &MomentumPoint::from_spherical(k, t, p),
                    NormConvention::RelativisticF,
                )?;
                re.push(v.re);
                im.push(v.im);
            }
        }
    }
    let grid = GridData {
        k: k_nodes.to_vec(),
        theta: theta_nodes.to_vec(),
        phi: phi_nodes.to_vec(),
        re,
        im,
        convention: NormConvention::RelativisticF,
    };
    grid.validate()?;
    Ok(grid)
}

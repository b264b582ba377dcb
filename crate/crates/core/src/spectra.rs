//! Closed-form spectra of the variational eigenvalue problems, their radial
//! and angular eigenfunctions, finite-difference residual checks, and an
//! independent shooting solver that cross-validates the quantization
//! conditions.
//!
//! Three systems share one framework:
//!
//! * `SinglePhoton` — oscillator-like radial operator with measure κ²dκ and
//!   a weakened centrifugal term j(j+1)−1; eigenvalues
//!   γ = 2n + 1 + √(j² + j − 3/4), j ≥ 1.
//! * `Beam` — Coulomb-like radial operator with measure κ³dκ; eigenvalues
//!   γ = (2n + 1 + 2√(j(j+1)))/2, j ≥ 1.
//! * `InfiniteMomentum` — the plain 3D harmonic oscillator that emerges in
//!   the infinite-momentum limit; γ = 2n + j + 3/2 with j = 0 admitted for
//!   m = λ.

use crate::error::{Error, Result};
use crate::specfun::{terminating_kummer, wigner_d, PolynomialCoeffs};

/// Which eigenvalue problem a level belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum System {
    SinglePhoton,
    Beam,
    InfiniteMomentum,
}

impl System {
    pub fn label(&self) -> &'static str {
        match self {
            System::SinglePhoton => "single",
            System::Beam => "beam",
            System::InfiniteMomentum => "imf",
        }
    }

    /// Exponent p of the radial measure κ^p dκ.
    pub fn measure_exponent(&self) -> i32 {
        match self {
            System::Beam => 3,
            _ => 2,
        }
    }

    fn validate_j(&self, j: u32) -> Result<()> {
        match self {
            System::SinglePhoton | System::Beam => {
                if j == 0 {
                    Err(Error::ForbiddenQuantumNumbers(
                        "j = 0 is not admissible: the effective centrifugal term becomes \
                         attractive and the radial equation has no regular solution"
                            .into(),
                    ))
                } else {
                    Ok(())
                }
            }
            System::InfiniteMomentum => Ok(()),
        }
    }

    /// Centrifugal coefficient C in C/κ² for helicity |λ| = 1.
    fn centrifugal(&self, j: u32) -> f64 {
        let jj = (j * (j + 1)) as f64;
        match self {
            System::SinglePhoton | System::Beam => jj - 1.0,
            System::InfiniteMomentum => jj,
        }
    }
}

/// Closed-form eigenvalue γ of the radial problem.
pub fn gamma_spectrum(system: System, n: u32, j: u32) -> Result<f64> {
    system.validate_j(j)?;
    let nf = n as f64;
    let jf = j as f64;
    Ok(match system {
        System::SinglePhoton => 2.0 * nf + 1.0 + (jf + jf * jf - 0.75).sqrt(),
        System::Beam => (2.0 * nf + 1.0 + 2.0 * (jf * (jf + 1.0)).sqrt()) / 2.0,
        System::InfiniteMomentum => 2.0 * nf + jf + 1.5,
    })
}

/// How the radial profile decays at large κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialDecay {
    /// exp(−κ²/2)
    Gaussian,
    /// exp(−rate·κ)
    Exponential { rate: f64 },
}

/// Closed-form radial eigenfunction
/// K(κ) = κ^exponent · decay(κ) · P(argument(κ)),
/// where P is the terminating confluent hypergeometric polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub system: System,
    pub n: u32,
    pub j: u32,
    pub gamma: f64,
    pub exponent: f64,
    pub decay: RadialDecay,
    pub polynomial: PolynomialCoeffs,
}

impl RadialSolution {
    pub fn eval(&self, kappa: f64) -> f64 {
        self.eval_with_derivative(kappa).0
    }

    /// Value and dK/dκ, both analytic.
    pub fn eval_with_derivative(&self, kappa: f64) -> (f64, f64) {
        let (decay, dlog_decay, arg, darg) = match self.decay {
            RadialDecay::Gaussian => (
                (-0.5 * kappa * kappa).exp(),
                -kappa,
                kappa * kappa,
                2.0 * kappa,
            ),
            RadialDecay::Exponential { rate } => (
                (-rate * kappa).exp(),
                -rate,
                2.0 * self.gamma * kappa,
                2.0 * self.gamma,
            ),
        };
        let p = self.polynomial.eval(arg);
        let dp = self.polynomial.derivative().eval(arg) * darg;
        let pow = kappa.powf(self.exponent);
        let value = pow * decay * p;
        let derivative = pow * decay * (p * (self.exponent / kappa + dlog_decay) + dp);
        (value, derivative)
    }
}

/// Closed-form radial eigenfunction of a quantized level.
pub fn radial_solution(system: System, n: u32, j: u32) -> Result<RadialSolution> {
    system.validate_j(j)?;
    let gamma = gamma_spectrum(system, n, j)?;
    let jf = j as f64;
    match system {
        System::SinglePhoton => {
            let nu = 1.0 + (jf + jf * jf - 0.75).sqrt();
            Ok(RadialSolution {
                system,
                n,
                j,
                gamma,
                exponent: nu - 1.5,
                decay: RadialDecay::Gaussian,
                polynomial: terminating_kummer(n, nu)?,
            })
        }
        System::InfiniteMomentum => Ok(RadialSolution {
            system,
            n,
            j,
            gamma,
            exponent: jf,
            decay: RadialDecay::Gaussian,
            polynomial: terminating_kummer(n, jf + 1.5)?,
        }),
        System::Beam => {
            let root = (jf * (jf + 1.0)).sqrt();
            let mu = 1.0 + 2.0 * root;
            Ok(RadialSolution {
                system,
                n,
                j,
                gamma,
                exponent: root - 1.0,
                decay: RadialDecay::Exponential { rate: gamma },
                polynomial: terminating_kummer(n, mu)?,
            })
        }
    }
}

/// Potential term V(κ) of the radial operator (beyond the centrifugal part)
/// and the eigenvalue-side coefficient for a given system.
fn radial_operator_terms(system: System, gamma: f64) -> (Box<dyn Fn(f64) -> f64>, f64) {
    match system {
        System::SinglePhoton | System::InfiniteMomentum => (Box::new(|k: f64| k * k), 2.0 * gamma),
        System::Beam => {
            let g2 = gamma * gamma;
            (Box::new(move |k: f64| -2.0 * g2 / k), -g2)
        }
    }
}

/// Applies the radial operator to a profile by five-point finite differences
/// and returns the largest absolute deviation from eigenvalue · profile.
/// The profile is normalized to unit maximum over the samples first, so the
/// residual scale does not depend on the caller's normalization.
pub fn radial_residual<F>(
    system: System,
    profile: F,
    gamma: f64,
    j: u32,
    kappa_samples: &[f64],
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    system.validate_j(j)?;
    let c = system.centrifugal(j);
    let p = system.measure_exponent() as f64;
    let (potential, eigen) = radial_operator_terms(system, gamma);
    let peak = kappa_samples
        .iter()
        .map(|&k| profile(k).abs())
        .fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Err(Error::Domain("profile vanishes on all samples".into()));
    }
    let mut worst: f64 = 0.0;
    for &k in kappa_samples {
        let h = 1e-3 * k.max(0.25);
        if k - 2.0 * h <= 0.0 {
            return Err(Error::Domain(format!(
                "kappa sample {k} too close to the origin for step {h}"
            )));
        }
        let f = &profile;
        let d1 = (-f(k + 2.0 * h) + 8.0 * f(k + h) - 8.0 * f(k - h) + f(k - 2.0 * h)) / (12.0 * h);
        let d2 = (-f(k + 2.0 * h) + 16.0 * f(k + h) - 30.0 * f(k) + 16.0 * f(k - h)
            - f(k - 2.0 * h))
            / (12.0 * h * h);
        // -(1/κ^p)(κ^p K')' = -K'' - (p/κ)K'
        let lhs = -d2 - p / k * d1 + (c / (k * k) + potential(k)) * f(k);
        worst = worst.max((lhs - eigen * f(k)).abs() / peak);
    }
    Ok(worst)
}

/// Angular operator residual of the closed-form angular eigenfunction.
///
/// For the photon systems the potential is (m² + λ² − 2λm cosθ)/sin²θ and
/// the eigenfunction is the Wigner small-d function; in the
/// infinite-momentum limit the potential collapses to (m−λ)²/sin²θ with
/// associated-Legendre eigenfunctions (j = 0 admitted when m = λ).
pub fn angular_residual(j: u32, m: i32, lam: i32, system: System) -> Result<f64> {
    let ji = j as i32;
    let theta_fn: Box<dyn Fn(f64) -> Result<f64>>;
    let potential: Box<dyn Fn(f64) -> f64>;
    match system {
        System::SinglePhoton | System::Beam => {
            system.validate_j(j)?;
            if m.abs() > ji || lam.abs() > ji {
                return Err(Error::ForbiddenQuantumNumbers(format!(
                    "|m| <= j and |lambda| <= j required, got j={j}, m={m}, lambda={lam}"
                )));
            }
            theta_fn = Box::new(move |t| wigner_d(j, m, lam, t));
            let (mf, lf) = (m as f64, lam as f64);
            potential = Box::new(move |t: f64| {
                (mf * mf + lf * lf - 2.0 * lf * mf * t.cos()) / (t.sin() * t.sin())
            });
        }
        System::InfiniteMomentum => {
            let mu = m - lam;
            if mu.abs() > ji {
                return Err(Error::ForbiddenQuantumNumbers(format!(
                    "|m - lambda| <= j required in the infinite-momentum limit, got j={j}, \
                     m={m}, lambda={lam}"
                )));
            }
            // d^j_{μ0} is the associated Legendre function P_j^μ up to a constant.
            theta_fn = Box::new(move |t| wigner_d(j, 0, mu, t));
            let mu2 = (mu * mu) as f64;
            potential = Box::new(move |t: f64| mu2 / (t.sin() * t.sin()));
        }
    }
    let h = 1e-3;
    let eigen = (j * (j + 1)) as f64;
    let mut worst: f64 = 0.0;
    for i in 1..=50 {
        let t = std::f64::consts::PI * i as f64 / 51.0;
        let f = |x: f64| theta_fn(x);
        let d1 =
            (-f(t + 2.0 * h)? + 8.0 * f(t + h)? - 8.0 * f(t - h)? + f(t - 2.0 * h)?) / (12.0 * h);
        let d2 = (-f(t + 2.0 * h)? + 16.0 * f(t + h)? - 30.0 * f(t)? + 16.0 * f(t - h)?
            - f(t - 2.0 * h)?)
            / (12.0 * h * h);
        let lhs = -d2 - t.cos() / t.sin() * d1 + potential(t) * f(t)?;
        worst = worst.max((lhs - eigen * f(t)?).abs());
    }
    Ok(worst)
}

/// One labeled level of a spectrum with its closed-form data.
#[derive(Debug, Clone)]
pub struct SpectrumLevel {
    pub system: System,
    pub n: u32,
    pub j: u32,
    pub m: i32,
    pub lambda: i32,
    pub gamma: f64,
    pub radial: RadialSolution,
}

impl SpectrumLevel {
    pub fn new(system: System, n: u32, j: u32, m: i32, lambda: i32) -> Result<Self> {
        if system == System::InfiniteMomentum {
            if (m - lambda).abs() > j as i32 {
                return Err(Error::ForbiddenQuantumNumbers(format!(
                    "infinite-momentum level needs |m - lambda| <= j, got j={j}, m={m}"
                )));
            }
        } else if m.abs() > j as i32 || lambda.abs() > j as i32 {
            return Err(Error::ForbiddenQuantumNumbers(format!(
                "|m| <= j and |lambda| <= j required, got j={j}, m={m}, lambda={lambda}"
            )));
        }
        Ok(Self {
            system,
            n,
            j,
            m,
            lambda,
            gamma: gamma_spectrum(system, n, j)?,
            radial: radial_solution(system, n, j)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Shooting solver
// ---------------------------------------------------------------------------

/// Adaptive Dormand-Prince RK5(4) for the linear system y'' = w(κ) y.
/// Integrates from `from` to `to` (either direction) and returns (y, y').
fn integrate_schroedinger<W>(w: W, from: f64, to: f64, y0: f64, dy0: f64) -> Result<(f64, f64)>
where
    W: Fn(f64) -> f64,
{
    const RTOL: f64 = 1e-11;
    const ATOL: f64 = 1e-300;
    let rhs = |x: f64, u: [f64; 2]| [u[1], w(x) * u[0]];

    let mut x = from;
    let mut u = [y0, dy0];
    let dir = (to - from).signum();
    let mut h = dir * 1e-4 * (to - from).abs().max(1e-3);
    let mut steps = 0usize;
    while (to - x) * dir > 1e-14 {
        if (x + h - to) * dir > 0.0 {
            h = to - x;
        }
        let k1 = rhs(x, u);
        let k2 = rhs(x + 0.2 * h, add(u, sc(k1, 0.2 * h)));
        let k3 = rhs(
            x + 0.3 * h,
            add(u, add(sc(k1, 3.0 / 40.0 * h), sc(k2, 9.0 / 40.0 * h))),
        );
        let k4 = rhs(
            x + 0.8 * h,
            add(
                u,
                add3(
                    sc(k1, 44.0 / 45.0 * h),
                    sc(k2, -56.0 / 15.0 * h),
                    sc(k3, 32.0 / 9.0 * h),
                ),
            ),
        );
        let k5 = rhs(
            x + 8.0 / 9.0 * h,
            add(
                u,
                add4(
                    sc(k1, 19372.0 / 6561.0 * h),
                    sc(k2, -25360.0 / 2187.0 * h),
                    sc(k3, 64448.0 / 6561.0 * h),
                    sc(k4, -212.0 / 729.0 * h),
                ),
            ),
        );
        let k6 = rhs(
            x + h,
            add(
                u,
                add5(
                    sc(k1, 9017.0 / 3168.0 * h),
                    sc(k2, -355.0 / 33.0 * h),
                    sc(k3, 46732.0 / 5247.0 * h),
                    sc(k4, 49.0 / 176.0 * h),
                    sc(k5, -5103.0 / 18656.0 * h),
                ),
            ),
        );
        let u5 = add(
            u,
            add5(
                sc(k1, 35.0 / 384.0 * h),
                sc(k3, 500.0 / 1113.0 * h),
                sc(k4, 125.0 / 192.0 * h),
                sc(k5, -2187.0 / 6784.0 * h),
                sc(k6, 11.0 / 84.0 * h),
            ),
        );
        let k7 = rhs(x + h, u5);
        let u4 = add(
            u,
            add6(
                sc(k1, 5179.0 / 57600.0 * h),
                sc(k3, 7571.0 / 16695.0 * h),
                sc(k4, 393.0 / 640.0 * h),
                sc(k5, -92097.0 / 339200.0 * h),
                sc(k6, 187.0 / 2100.0 * h),
                sc(k7, h / 40.0),
            ),
        );
        let mut err: f64 = 0.0;
        for i in 0..2 {
            let scale_i = ATOL + RTOL * u5[i].abs().max(u[i].abs());
            err = err.max((u5[i] - u4[i]).abs() / scale_i);
        }
        if err <= 1.0 {
            x += h;
            u = u5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::StiffIntegration(format!(
                "step budget exhausted at x = {x} (from {from} to {to})"
            )));
        }
    }
    Ok((u[0], u[1]))
}

fn sc(a: [f64; 2], s: f64) -> [f64; 2] {
    [a[0] * s, a[1] * s]
}
fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}
fn add3(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    add(add(a, b), c)
}
fn add4(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> [f64; 2] {
    add(add3(a, b, c), d)
}
fn add5(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2], e: [f64; 2]) -> [f64; 2] {
    add(add4(a, b, c, d), e)
}
fn add6(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2], e: [f64; 2], f: [f64; 2]) -> [f64; 2] {
    add(add5(a, b, c, d, e), f)
}

/// Normalized matching mismatch (Wronskian) between outward and inward
/// integrations at the matching point; vanishes at eigenvalues.
fn matching_mismatch(system: System, j: u32, gamma: f64) -> Result<f64> {
    let c = match system {
        System::SinglePhoton | System::Beam => system.centrifugal(j),
        System::InfiniteMomentum => system.centrifugal(j),
    };
    // Transform K = y / κ^{(p-1)/2}... concretely: y = κ K (measure κ²) or
    // y = κ^{3/2} K (measure κ³); both yield y'' = w(κ) y.
    let (w, s, match_point, far): (Box<dyn Fn(f64) -> f64>, f64, f64, f64) = match system {
        System::SinglePhoton | System::InfiniteMomentum => {
            let e = 2.0 * gamma;
            let s = 0.5 + (c + 0.25).sqrt();
            let mp = c.max(0.5).powf(0.25);
            let far = (2.0 * gamma).sqrt() + 5.5;
            (Box::new(move |k: f64| c / (k * k) + k * k - e), s, mp, far)
        }
        System::Beam => {
            let d = c + 0.75;
            let g2 = gamma * gamma;
            let s = 0.5 + (d + 0.25).sqrt();
            let jf = j as f64;
            let mp = ((jf * (jf + 1.0)).sqrt() / gamma).max(0.4);
            let far = 30.0 / gamma + 4.0 * mp;
            (
                Box::new(move |k: f64| d / (k * k) - 2.0 * g2 / k + g2),
                s,
                mp,
                far,
            )
        }
    };

    // Outward start from a short series expansion around the origin.
    let k0 = (0.03 * match_point).min(0.08);
    let (y_out0, dy_out0) = match system {
        System::SinglePhoton | System::InfiniteMomentum => {
            let e = 2.0 * gamma;
            let a = -e / (4.0 * s + 2.0);
            let b = (1.0 - a * e) / (8.0 * s + 12.0);
            let y = k0.powf(s) * (1.0 + a * k0 * k0 + b * k0.powi(4));
            let dy = k0.powf(s - 1.0) * (s + (s + 2.0) * a * k0 * k0 + (s + 4.0) * b * k0.powi(4));
            (y, dy)
        }
        System::Beam => {
            let g2 = gamma * gamma;
            let a = -g2 / s;
            let b = g2 * (1.0 - 2.0 * a) / (4.0 * s + 2.0);
            let c = g2 * (a - 2.0 * b) / (6.0 * s + 6.0);
            let y = k0.powf(s) * (1.0 + a * k0 + b * k0 * k0 + c * k0.powi(3));
            let dy = k0.powf(s - 1.0)
                * (s + (s + 1.0) * a * k0 + (s + 2.0) * b * k0 * k0 + (s + 3.0) * c * k0.powi(3));
            (y, dy)
        }
    };
    let out = integrate_schroedinger(&w, k0, match_point, y_out0, dy_out0)?;

    // Inward start from the asymptotic decay.
    let (y_in0, dy_in0) = match system {
        System::SinglePhoton | System::InfiniteMomentum => {
            let p = gamma - 0.5;
            let log_y = -0.5 * far * far + p * far.ln();
            let y = log_y.exp();
            (y, y * (p / far - far))
        }
        System::Beam => {
            let log_y = -gamma * far + gamma * far.ln();
            let y = log_y.exp();
            (y, y * (gamma / far - gamma))
        }
    };
    let inw = integrate_schroedinger(&w, far, match_point, y_in0, dy_in0)?;

    // Magnitude-only normalization keeps the mismatch continuous in γ;
    // its zeros are exactly the eigenvalues (linear dependence of the two
    // solutions, up to overall sign).
    let normalize = |v: (f64, f64)| -> (f64, f64) {
        let mag = (v.0 * v.0 + v.1 * v.1).sqrt();
        (v.0 / mag, v.1 / mag)
    };
    let (yo, dyo) = normalize(out);
    let (yi, dyi) = normalize(inw);
    Ok(dyo * yi - yo * dyi)
}

/// Eigenvalue of the radial problem found by outward/inward shooting and
/// bisection on the matching Wronskian; independent of the closed form.
pub fn shoot_eigenvalue(
    system: System,
    j: u32,
    n: u32,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    system.validate_j(j)?;
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => {
            let center = gamma_spectrum(system, n, j)?;
            (center - 0.5, center + 0.5)
        }
    };
    if lo >= hi || lo <= 0.0 {
        return Err(Error::Domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut f_lo = matching_mismatch(system, j, lo)?;
    let mut f_hi = matching_mismatch(system, j, hi)?;
    if f_lo * f_hi > 0.0 {
        // Scan for a sign change inside the bracket before giving up.
        let mut found = false;
        let scan = 20;
        let mut prev_x = lo;
        let mut prev_f = f_lo;
        for i in 1..=scan {
            let x = lo + (hi - lo) * i as f64 / scan as f64;
            let fx = matching_mismatch(system, j, x)?;
            if prev_f * fx <= 0.0 {
                lo = prev_x;
                hi = x;
                f_lo = prev_f;
                f_hi = fx;
                found = true;
                break;
            }
            prev_x = x;
            prev_f = fx;
        }
        if !found {
            return Err(Error::NoSignChange { lo, hi });
        }
    }
    let _ = f_hi;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let f_mid = matching_mismatch(system, j, mid)?;
        if f_lo * f_mid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

//! Product quadrature on momentum space in spherical coordinates.
//!
//! The radial rules are genuine Gauss rules with respect to the weight
//! families that match the built-in states:
//!
//! * `x^ρ e^{−(σx)²}` on [0, ∞) — recurrence coefficients are not classical,
//!   so they are generated by a discretized Stieltjes/Lanczos procedure on a
//!   double-exponential discretization of the measure;
//! * `x^ρ e^{−cx}` on [0, ∞) — generalized Gauss-Laguerre;
//! * mapped/composite Gauss-Legendre for sampled states on a finite range.
//!
//! Polar integration is Gauss-Legendre in cosθ (never placing a node at the
//! poles), azimuthal integration is the uniform trapezoid rule, which is
//! exact for trigonometric polynomials below the node count. All
//! reductions use compensated (Neumaier) summation so results do not depend
//! on evaluation order beyond ~1e-16.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lightcone::MomentumPoint;
use crate::specfun::gamma_fn;
use crate::states::{PhotonState, RadialClass};

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Radial weight family of a rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialFamily {
    /// Gauss rule for k^power e^{−(sigma k)²} · polynomial(k).
    GaussLike { power: f64, sigma: f64 },
    /// Gauss rule for k^power e^{−rate k} · polynomial(k).
    Exponential { power: f64, rate: f64 },
    /// Composite Gauss-Legendre on [kmin, kmax] for sampled states.
    Mapped { kmin: f64, kmax: f64 },
}

/// Plain rule for ∫₀^∞ h(k) dk, with the weight function folded into the
/// weights (so `integrate` consumes the bare integrand).
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub family: RadialFamily,
}

fn check_order(n: usize) -> Result<()> {
    if !(4..=256).contains(&n) {
        return Err(Error::InvalidOrder(format!(
            "radial/angular order {n} outside 4..=256"
        )));
    }
    Ok(())
}

/// Nodes and first-component weights of the Jacobi matrix built from
/// recurrence coefficients (Golub-Welsch).
fn golub_welsch(alpha: &[f64], sqrt_beta: &[f64], total_mass: f64) -> (Vec<f64>, Vec<f64>) {
    let n = alpha.len();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = alpha[i];
        if i + 1 < n {
            m[(i, i + 1)] = sqrt_beta[i];
            m[(i + 1, i)] = sqrt_beta[i];
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors.column(i)[0];
            (eig.eigenvalues[i], total_mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Discretized Lanczos: orthonormal three-term recurrence of the measure
/// Σ ω_d δ(x − x_d), accurate for the continuous measure it discretizes.
fn lanczos_recurrence(xs: &[f64], ws: &[f64], n: usize) -> (Vec<f64>, Vec<f64>, f64) {
    let m = xs.len();
    let mass: f64 = {
        let mut acc = Accumulator::new();
        ws.iter().for_each(|&w| acc.add(w));
        acc.value()
    };
    let mut q_prev = vec![0.0; m];
    let mut q = vec![1.0 / mass.sqrt(); m];
    let mut alpha = Vec::with_capacity(n);
    let mut sqrt_beta = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let mut acc = Accumulator::new();
        for d in 0..m {
            acc.add(ws[d] * xs[d] * q[d] * q[d]);
        }
        let a = acc.value();
        alpha.push(a);
        if k + 1 == n {
            break;
        }
        let mut r: Vec<f64> = (0..m).map(|d| (xs[d] - a) * q[d]).collect();
        if k > 0 {
            let b_prev = sqrt_beta[k - 1];
            for d in 0..m {
                r[d] -= b_prev * q_prev[d];
            }
        }
        // One full reorthogonalization step against the two active vectors
        // keeps the recurrence healthy for large n.
        let mut acc = Accumulator::new();
        for d in 0..m {
            acc.add(ws[d] * r[d] * q[d]);
        }
        let corr = acc.value();
        for d in 0..m {
            r[d] -= corr * q[d];
        }
        let mut acc = Accumulator::new();
        for d in 0..m {
            acc.add(ws[d] * r[d] * r[d]);
        }
        let b = acc.value().sqrt();
        sqrt_beta.push(b);
        q_prev.clone_from(&q);
        for d in 0..m {
            q[d] = r[d] / b;
        }
    }
    (alpha, sqrt_beta, mass)
}

impl RadialRule {
    /// Gauss rule for the weight k^power e^{−(sigma k)²} on [0, ∞).
    pub fn gauss_like(n: usize, power: f64, sigma: f64) -> Result<Self> {
        check_order(n)?;
        if power <= -1.0 || sigma <= 0.0 || !power.is_finite() || !sigma.is_finite() {
            return Err(Error::Domain(format!(
                "gauss-like weight needs power > -1 and sigma > 0, got ({power}, {sigma})"
            )));
        }
        // Double-exponential discretization of x^power e^{-x²} dx on [0, ∞):
        // x = exp((π/2) sinh u). The lower end must reach far enough that the
        // truncated x^{power+1} tail is below machine precision.
        let m = 2400.max(10 * n);
        let (u_lo, u_hi) = (-6.5, 2.1);
        let h = (u_hi - u_lo) / (m - 1) as f64;
        let mut xs = Vec::with_capacity(m);
        let mut ws = Vec::with_capacity(m);
        for i in 0..m {
            let u = u_lo + i as f64 * h;
            let x = (std::f64::consts::FRAC_PI_2 * u.sinh()).exp();
            let jac = x * std::f64::consts::FRAC_PI_2 * u.cosh() * h;
            let w = x.powf(power) * (-x * x).exp() * jac;
            if w > 0.0 && w.is_finite() {
                xs.push(x);
                ws.push(w);
            }
        }
        let (alpha, sqrt_beta, mass) = lanczos_recurrence(&xs, &ws, n);
        let (raw_nodes, raw_weights) = golub_welsch(&alpha, &sqrt_beta, mass);
        // Strip the weight back out and rescale x → k = x/σ.
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (x, w) in raw_nodes.into_iter().zip(raw_weights) {
            nodes.push(x / sigma);
            weights.push(w * x.powf(-power) * (x * x).exp() / sigma);
        }
        Ok(Self {
            nodes,
            weights,
            family: RadialFamily::GaussLike { power, sigma },
        })
    }

    /// Gauss rule for the weight k^power e^{−rate·k} on [0, ∞)
    /// (generalized Gauss-Laguerre).
    pub fn exponential(n: usize, power: f64, rate: f64) -> Result<Self> {
        check_order(n)?;
        if power <= -1.0 || rate <= 0.0 || !power.is_finite() || !rate.is_finite() {
            return Err(Error::Domain(format!(
                "exponential weight needs power > -1 and rate > 0, got ({power}, {rate})"
            )));
        }
        let alpha: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + power + 1.0).collect();
        let sqrt_beta: Vec<f64> = (1..n)
            .map(|k| (k as f64 * (k as f64 + power)).sqrt())
            .collect();
        let mass = gamma_fn(power + 1.0)?;
        let (raw_nodes, raw_weights) = golub_welsch(&alpha, &sqrt_beta, mass);
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (t, w) in raw_nodes.into_iter().zip(raw_weights) {
            // Nodes beyond e^t overflow carry weight-class contributions
            // below 1e-300 and are dropped.
            if t > 700.0 {
                continue;
            }
            nodes.push(t / rate);
            weights.push(w * t.powf(-power) * t.exp() / rate);
        }
        Ok(Self {
            nodes,
            weights,
            family: RadialFamily::Exponential { power, rate },
        })
    }

    /// Composite Gauss-Legendre rule on [kmin, kmax] (16 panels).
    pub fn mapped(n: usize, kmin: f64, kmax: f64) -> Result<Self> {
        check_order(n)?;
        if !(kmin >= 0.0 && kmax > kmin) {
            return Err(Error::Domain(format!(
                "invalid radial range [{kmin}, {kmax}]"
            )));
        }
        let panels = 16.min(n / 3).max(1);
        let per_panel = (n / panels).max(2);
        let (gx, gw) = legendre_rule(per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let width = (kmax - kmin) / panels as f64;
        for p in 0..panels {
            let lo = kmin + p as f64 * width;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(lo + 0.5 * width * (x + 1.0));
                weights.push(w * 0.5 * width);
            }
        }
        Ok(Self {
            nodes,
            weights,
            family: RadialFamily::Mapped { kmin, kmax },
        })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = Accumulator::new();
        for (&k, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(k));
        }
        acc.value()
    }
}

/// Gauss-Legendre nodes/weights on [−1, 1].
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let alpha = vec![0.0; n];
    let sqrt_beta: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            (kf * kf / (4.0 * kf * kf - 1.0)).sqrt()
        })
        .collect();
    golub_welsch(&alpha, &sqrt_beta, 2.0)
}

/// Polar rule: ∫ F(θ) sinθ dθ = Σ w_i F(θ_i), nodes interior to (0, π).
#[derive(Debug, Clone)]
pub struct PolarRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl PolarRule {
    /// Full range [0, π] through Gauss-Legendre in x = cosθ.
    pub fn full(n: usize) -> Result<Self> {
        check_order(n)?;
        let (xs, ws) = legendre_rule(n);
        let nodes: Vec<f64> = xs.iter().rev().map(|x| x.acos()).collect();
        let weights: Vec<f64> = ws.iter().rev().cloned().collect();
        Ok(Self { nodes, weights })
    }

    /// Restricted to [theta_min, theta_max] for sampled states.
    pub fn banded(n: usize, theta_min: f64, theta_max: f64) -> Result<Self> {
        check_order(n)?;
        if !(0.0 < theta_min && theta_min < theta_max && theta_max < std::f64::consts::PI) {
            return Err(Error::Domain(format!(
                "invalid polar band [{theta_min}, {theta_max}]"
            )));
        }
        let (xs, ws) = legendre_rule(n);
        let (x_lo, x_hi) = (theta_max.cos(), theta_min.cos());
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for (x, w) in xs.iter().rev().zip(ws.iter().rev()) {
            let xc = 0.5 * (x_hi - x_lo) * (x + 1.0) + x_lo;
            nodes.push(xc.acos());
            weights.push(w * 0.5 * (x_hi - x_lo));
        }
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }
}

/// Uniform trapezoid rule on [0, 2π), exact for e^{imφ} with |m| < n.
#[derive(Debug, Clone)]
pub struct AzimuthalRule {
    pub nodes: Vec<f64>,
    pub weight: f64,
}

impl AzimuthalRule {
    pub fn new(n: usize) -> Result<Self> {
        check_order(n)?;
        let nodes = (0..n)
            .map(|l| 2.0 * std::f64::consts::PI * l as f64 / n as f64)
            .collect();
        Ok(Self {
            nodes,
            weight: 2.0 * std::f64::consts::PI / n as f64,
        })
    }
}

/// Quadrature orders for the three axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadOrders {
    pub n_k: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for QuadOrders {
    fn default() -> Self {
        Self {
            n_k: 48,
            n_theta: 32,
            n_phi: 16,
        }
    }
}

/// Product rule over (k, θ, φ) with a declared radial weight family and the
/// measure exponent w of the integrand weight k^w.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    pub radial: RadialRule,
    pub polar: PolarRule,
    pub azimuthal: AzimuthalRule,
    pub measure_exponent: i32,
}

impl QuadratureScheme {
    /// Builds the product rule from a radial family, orders and measure
    /// exponent w (2 for d³k on g, 1 for d³k/k on f, 3 for the beam's k d³k).
    pub fn build(
        family: RadialFamily,
        n_k: usize,
        n_theta: usize,
        n_phi: usize,
        measure_exponent: i32,
    ) -> Result<Self> {
        let radial = match family {
            RadialFamily::GaussLike { power, sigma } => RadialRule::gauss_like(n_k, power, sigma)?,
            RadialFamily::Exponential { power, rate } => RadialRule::exponential(n_k, power, rate)?,
            RadialFamily::Mapped { kmin, kmax } => RadialRule::mapped(n_k, kmin, kmax)?,
        };
        Ok(Self {
            radial,
            polar: PolarRule::full(n_theta)?,
            azimuthal: AzimuthalRule::new(n_phi)?,
            measure_exponent,
        })
    }

    /// Scheme matched to a state's decay family and axis sampling.
    pub fn for_state(
        state: &PhotonState,
        orders: QuadOrders,
        measure_exponent: i32,
    ) -> Result<Self> {
        let extra = state.extra_poly_degree();
        let n_k = orders.n_k + extra;
        let n_theta = orders.n_theta + extra;
        match state.radial_class() {
            RadialClass::GaussLike { power, sigma } => Self::build(
                RadialFamily::GaussLike { power, sigma },
                n_k,
                n_theta,
                orders.n_phi,
                measure_exponent,
            ),
            RadialClass::ExpLike { power, rate } => Self::build(
                RadialFamily::Exponential { power, rate },
                n_k,
                n_theta,
                orders.n_phi,
                measure_exponent,
            ),
            RadialClass::Bounded { kmin, kmax } => {
                let radial = RadialRule::mapped(n_k, kmin, kmax)?;
                // Keep polar nodes inside the sampled band.
                let polar = match state.theta_band() {
                    Some((lo, hi)) => PolarRule::banded(n_theta, lo, hi)?,
                    None => PolarRule::full(n_theta)?,
                };
                Ok(Self {
                    radial,
                    polar,
                    azimuthal: AzimuthalRule::new(orders.n_phi)?,
                    measure_exponent,
                })
            }
        }
    }

    /// Σ w_k k^w w_θ 2π · f(k, θ) — for integrands independent of φ.
    pub fn integrate_reduced<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let w = self.measure_exponent;
        let mut acc = Accumulator::new();
        for (&k, &wk) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let kw = wk * k.powi(w);
            for (&t, &wt) in self.polar.nodes.iter().zip(&self.polar.weights) {
                acc.add(kw * wt * f(k, t));
            }
        }
        acc.value() * 2.0 * std::f64::consts::PI
    }

    /// Full 3D quadrature Σ w_k k^w w_θ w_φ f(point).
    pub fn integrate_full<F>(&self, mut f: F) -> Result<f64>
    where
        F: FnMut(&MomentumPoint) -> Result<f64>,
    {
        let w = self.measure_exponent;
        let mut acc = Accumulator::new();
        for (&k, &wk) in self.radial.nodes.iter().zip(&self.radial.weights) {
            let kw = wk * k.powi(w);
            for (&t, &wt) in self.polar.nodes.iter().zip(&self.polar.weights) {
                for &p in &self.azimuthal.nodes {
                    let kp = MomentumPoint::from_spherical(k, t, p);
                    acc.add(kw * wt * self.azimuthal.weight * f(&kp)?);
                }
            }
        }
        Ok(acc.value())
    }
}

/// Free-function form of [`QuadratureScheme::build`].
pub fn build_quadrature(
    family: RadialFamily,
    n_k: usize,
    n_theta: usize,
    n_phi: usize,
    measure_exponent: i32,
) -> Result<QuadratureScheme> {
    QuadratureScheme::build(family, n_k, n_theta, n_phi, measure_exponent)
}

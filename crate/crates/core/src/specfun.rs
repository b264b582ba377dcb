//! Special functions backing the closed-form solutions: gamma function,
//! confluent hypergeometric ₁F₁, Jacobi polynomials and Wigner small-d
//! functions (monopole harmonics) used as angular eigenfunctions.
//!
//! Everything here is a pure function of its value arguments and safe to
//! call concurrently.

use crate::error::{Error, Result};

/// Real polynomial stored as coefficients in ascending degree.
///
/// Holds, among other things, the polynomial truncations of terminating
/// confluent hypergeometric series.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCoeffs {
    /// Coefficients `c_0, c_1, ..., c_n` of `c_0 + c_1 x + ... + c_n x^n`.
    pub coefficients: Vec<f64>,
}

impl PolynomialCoeffs {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Self {
            coefficients: vec![1.0],
        }
    }

    pub fn degree(&self) -> usize {
        let mut d = self.coefficients.len() - 1;
        while d > 0 && self.coefficients[d] == 0.0 {
            d -= 1;
        }
        d
    }

    /// Horner evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }

    /// Coefficients of the derivative polynomial.
    pub fn derivative(&self) -> Self {
        if self.coefficients.len() == 1 {
            return Self {
                coefficients: vec![0.0],
            };
        }
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect();
        Self { coefficients }
    }
}

// Lanczos approximation, g = 7 with 9 coefficients. Relative error stays
// below ~1e-13 on the positive real axis, which covers every gamma-function
// use in this crate.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real argument.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(lanczos_gamma(x))
}

fn lanczos_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut sum = LANCZOS_COEFFS[0];
        for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
            sum += c / (z + i as f64);
        }
        let base = z + LANCZOS_G + 0.5;
        (2.0 * std::f64::consts::PI).sqrt() * base.powf(z + 0.5) * (-base).exp() * sum
    }
}

/// Tolerance for recognizing quantized (integer) series parameters.
const INTEGER_TOL: f64 = 1e-12;

fn near_nonpositive_integer(x: f64) -> Option<i64> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() < INTEGER_TOL {
        Some(r as i64)
    } else {
        None
    }
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; x) for x ≥ 0.
///
/// When `a` is a nonpositive integer the series terminates and the exact
/// polynomial value is returned; otherwise the power series is summed until
/// the terms fall below machine accuracy.
pub fn kummer_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if near_nonpositive_integer(b).is_some() {
        return Err(Error::Domain(format!(
            "kummer_1f1 undefined for nonpositive integer b = {b}"
        )));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "kummer_1f1 requires x >= 0, got {x}"
        )));
    }
    if let Some(neg_n) = near_nonpositive_integer(a) {
        let poly = terminating_kummer((-neg_n) as u32, b)?;
        return Ok(poly.eval(x));
    }

    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut small_count = 0;
    for k in 0..1000 {
        let kf = k as f64;
        term *= (a + kf) / (b + kf) * x / (kf + 1.0);
        sum += term;
        if !sum.is_finite() || sum.abs() > 1e290 {
            return Err(Error::Overflow(format!("kummer_1f1({a}, {b}, {x})")));
        }
        if term.abs() <= f64::EPSILON * sum.abs() {
            small_count += 1;
            if small_count >= 3 {
                return Ok(sum);
            }
        } else {
            small_count = 0;
        }
    }
    Ok(sum)
}

/// Terminating Kummer series ₁F₁(-n; b; x) as an explicit polynomial in x.
pub fn terminating_kummer(n: u32, b: f64) -> Result<PolynomialCoeffs> {
    if near_nonpositive_integer(b).is_some() {
        return Err(Error::Domain(format!(
            "terminating_kummer undefined for nonpositive integer b = {b}"
        )));
    }
    let a = -(n as f64);
    let mut coefficients = Vec::with_capacity(n as usize + 1);
    let mut c = 1.0;
    coefficients.push(c);
    for k in 0..n {
        let kf = k as f64;
        c *= (a + kf) / (b + kf) / (kf + 1.0);
        coefficients.push(c);
    }
    PolynomialCoeffs::new(coefficients)
}

/// Jacobi polynomial P_n^{(α,β)}(x) by the three-term recurrence.
pub fn jacobi_p(n: u32, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if alpha <= -1.0 || beta <= -1.0 {
        return Err(Error::Domain(format!(
            "jacobi_p requires alpha, beta > -1, got ({alpha}, {beta})"
        )));
    }
    if !x.is_finite() {
        return Err(Error::Domain("jacobi_p requires finite x".into()));
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut p_prev = 1.0;
    let mut p = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    for k in 2..=n {
        let kf = k as f64;
        let c = 2.0 * kf + alpha + beta;
        let a1 = 2.0 * kf * (kf + alpha + beta) * (c - 2.0);
        let a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (c - 2.0) * (c - 1.0) * c;
        let a4 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * c;
        let p_next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = p_next;
    }
    Ok(p)
}

fn binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Wigner small-d function evaluated through its half-angle Jacobi
/// representation, with the row index fixed by the helicity.
///
/// `wigner_d(j, m, lam, theta)` is the eigenfunction of the angular operator
///
/// ```text
/// -(1/sinθ) d/dθ (sinθ d/dθ) + (m² + λ² - 2λm cosθ)/sin²θ
/// ```
///
/// with eigenvalue j(j+1), normalized so that `wigner_d(j, λ, λ, 0) = 1`.
pub fn wigner_d(j: u32, m: i32, lam: i32, theta: f64) -> Result<f64> {
    let ji = j as i64;
    let (m, lam) = (m as i64, lam as i64);
    if m.abs() > ji || lam.abs() > ji {
        return Err(Error::ForbiddenQuantumNumbers(format!(
            "wigner_d requires |m| <= j and |lambda| <= j, got j={j}, m={m}, lambda={lam}"
        )));
    }
    // Row/column convention chosen so that the helicity labels the row.
    let (mp, mm) = (lam, m);
    let k = (ji + mm).min(ji - mm).min(ji + mp).min(ji - mp);
    let (a, sign_exp) = if k == ji + mm {
        (mp - mm, mp - mm)
    } else if k == ji - mm || k == ji + mp {
        (mm - mp, 0)
    } else {
        (mp - mm, mp - mm)
    };
    let b = 2 * ji - 2 * k - a;
    let sign = if sign_exp % 2 == 0 { 1.0 } else { -1.0 };
    let coeff = (binomial(2 * ji - k, k + a) / binomial(k + b, b)).sqrt();
    let half = 0.5 * theta;
    let jac = jacobi_p(k as u32, a as f64, b as f64, theta.cos())?;
    Ok(sign * coeff * half.sin().powi(a as i32) * half.cos().powi(b as i32) * jac)
}

/// θ-derivative of [`wigner_d`] from the angular-momentum ladder relation.
pub fn wigner_d_deriv(j: u32, m: i32, lam: i32, theta: f64) -> Result<f64> {
    let ji = j as i64;
    let (mi, li) = (m as i64, lam as i64);
    if mi.abs() > ji || li.abs() > ji {
        return Err(Error::ForbiddenQuantumNumbers(format!(
            "wigner_d_deriv requires |m| <= j and |lambda| <= j, got j={j}, m={m}, lambda={lam}"
        )));
    }
    let up = if mi < ji {
        (((ji - mi) * (ji + mi + 1)) as f64).sqrt() * wigner_d(j, m + 1, lam, theta)?
    } else {
        0.0
    };
    let down = if mi > -ji {
        (((ji + mi) * (ji - mi + 1)) as f64).sqrt() * wigner_d(j, m - 1, lam, theta)?
    } else {
        0.0
    };
    Ok(-0.5 * (up - down))
}

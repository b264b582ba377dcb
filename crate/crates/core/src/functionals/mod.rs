//! Uncertainty functionals of photon states: norms, first and second
//! moments of the center-of-energy operator R̂ and of the momentum P̂,
//! variances, the dimensionless product γ² = ⟨R̂·R̂⟩⟨P̂·P̂⟩/ħ², functionals
//! with a shifted Berry connection, one-dimensional products, and the
//! focal-volume bound.
//!
//! All quantities are computed in natural units ħ = c = 1 and reported in
//! dimensionless combinations of the state scale `a`: positions in units a,
//! momenta in units 1/a.

pub mod quadrature;

pub use quadrature::{
    build_quadrature, Accumulator, AzimuthalRule, PolarRule, QuadOrders, QuadratureScheme,
    RadialFamily, RadialRule,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lightcone::{AxisVector, MomentumPoint, MomentumWaveFunction};
use crate::states::PhotonState;

/// Norm and moments of a photon state, in units of the state scale `a`.
#[derive(Debug, Clone, Serialize)]
pub struct ExpectationReport {
    /// ‖f‖² in the invariant convention (equals ‖g‖² in the plain one).
    pub norm: f64,
    /// ⟨R̂⟩ in units a.
    #[serde(rename = "mean_R")]
    pub mean_r: [f64; 3],
    /// ⟨R̂·R̂⟩ in units a².
    #[serde(rename = "RR")]
    pub rr: f64,
    /// ⟨P̂⟩ in units ħ/a.
    #[serde(rename = "mean_P")]
    pub mean_p: [f64; 3],
    /// ⟨P̂·P̂⟩ in units ħ²/a².
    #[serde(rename = "PP")]
    pub pp: f64,
    /// ΔR² in units a².
    #[serde(rename = "varR")]
    pub var_r: f64,
    /// ΔP² in units ħ²/a².
    #[serde(rename = "varP")]
    pub var_p: f64,
    /// ⟨R̂·R̂⟩⟨P̂·P̂⟩/ħ², dimensionless.
    pub gamma2: f64,
    /// ΔR²ΔP² in units ħ².
    pub variance_product: f64,
}

impl ExpectationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// How the Berry connection enters the position functional.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Connection {
    /// α(k) itself.
    Plain,
    /// α(k + s·n): the axis argument shifted by s.
    Shifted(f64),
    /// The infinite-shift limit (n×k)/|n×k|².
    InfiniteShift,
}

impl Connection {
    /// sinθ-scaled azimuthal magnitude: A(k, θ) with α = A φ̂.
    fn azimuthal_component(&self, k: f64, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        match self {
            Connection::Plain => c / (k * s),
            Connection::Shifted(shift) => {
                let kz = k * c + shift;
                let mag = (k * k + 2.0 * k * shift * c + shift * shift).sqrt();
                kz / (k * s * mag)
            }
            Connection::InfiniteShift => 1.0 / (k * s),
        }
    }
}

/// Raw (unnormalized) spherical integrals of a state.
struct RawMoments {
    norm: f64,
    rr: f64,
    pp: f64,
    mean_p: [f64; 3],
    mean_r: [f64; 3],
}

/// θ-boundedness probe: the position-functional integrand times sinθ must
/// not blow up faster than θ^{-0.9} toward either pole (s states do, with
/// exponent −1, and make ⟨R̂·R̂⟩ diverge).
fn check_theta_boundedness(
    state: &PhotonState,
    connection: Connection,
    k_ref: f64,
    theta_lo: (f64, f64),
    theta_hi: (f64, f64),
) -> Result<()> {
    let lam = state.helicity();
    // Only the connection-induced potential piece can diverge toward the
    // poles; the kinetic terms would mask its scaling at coarse probe angles.
    let integrand = |theta: f64| -> Result<f64> {
        let kp = MomentumPoint::from_spherical(k_ref, theta, 0.0);
        let p = state
            .g_partials(&kp)
            .expect("all families provide partials")?;
        let a_phi = connection.azimuthal_component(k_ref, theta);
        let dphi_cov = p.dphi / (k_ref * theta.sin())
            - num_complex::Complex64::new(0.0, lam as f64) * a_phi * p.value;
        Ok(dphi_cov.norm_sqr())
    };
    for (t1, t2) in [theta_lo, theta_hi] {
        let i1 = integrand(t1)? * t1.sin().abs();
        let i2 = integrand(t2)? * t2.sin().abs();
        if i1 < 1e-200 || i2 < 1e-200 {
            continue;
        }
        // Exponent of I·sinθ in the pole distance; −1 is the divergent case.
        let d1 = t1.min(std::f64::consts::PI - t1);
        let d2 = t2.min(std::f64::consts::PI - t2);
        let exponent = (i2 / i1).ln() / (d2 / d1).ln();
        if exponent <= -0.9 {
            return Err(Error::DivergentState { exponent });
        }
    }
    Ok(())
}

/// Boundedness probe with the plain connection (used by the beam module).
pub(crate) fn divergence_probe_plain(state: &PhotonState, scheme: &QuadratureScheme) -> Result<()> {
    divergence_probe(state, Connection::Plain, scheme)
}

fn divergence_probe(
    state: &PhotonState,
    connection: Connection,
    scheme: &QuadratureScheme,
) -> Result<()> {
    let nodes = &scheme.radial.nodes;
    let k_ref = nodes[nodes.len() / 3];
    let (lo, hi) = match state.theta_band() {
        Some((tmin, tmax)) => {
            let t2 = (2.0 * tmin).min(0.5 * (tmin + tmax));
            let s2 = std::f64::consts::PI - (2.0 * (std::f64::consts::PI - tmax)).min(1.0);
            ((tmin, t2), (tmax, s2.max(0.5 * (tmin + tmax))))
        }
        None => (
            (1e-3, 2e-3),
            (std::f64::consts::PI - 1e-3, std::f64::consts::PI - 2e-3),
        ),
    };
    check_theta_boundedness(state, connection, k_ref, lo, hi)
}

/// Shared moment engine. The reduced path handles definite-m states with a
/// real profile (⟨R̂⟩ = 0 identically there); sampled grids take the full
/// 3D route with complex partials.
fn raw_moments(
    state: &PhotonState,
    scheme: &QuadratureScheme,
    connection: Connection,
) -> Result<RawMoments> {
    let lam = state.helicity() as f64;
    match state.azimuthal_mode() {
        Some(m) => {
            let mf = m as f64;
            let mut norm = Accumulator::new();
            let mut rr = Accumulator::new();
            let mut pp = Accumulator::new();
            let mut pz = Accumulator::new();
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    let w = kw * wt;
                    let (u, du_dk, du_dt) = state.profile(k, t)?;
                    let u2 = u * u;
                    let a_phi = connection.azimuthal_component(k, t);
                    let cov = mf / (k * t.sin()) - lam * a_phi;
                    norm.add(w * u2);
                    pp.add(w * k * k * u2);
                    pz.add(w * k * t.cos() * u2);
                    rr.add(w * (du_dk * du_dk + du_dt * du_dt / (k * k) + cov * cov * u2));
                }
            }
            let two_pi = 2.0 * std::f64::consts::PI;
            Ok(RawMoments {
                norm: norm.value() * two_pi,
                rr: rr.value() * two_pi,
                pp: pp.value() * two_pi,
                mean_p: [0.0, 0.0, pz.value() * two_pi],
                mean_r: [0.0; 3],
            })
        }
        None => {
            let mut norm = Accumulator::new();
            let mut rr = Accumulator::new();
            let mut pp = Accumulator::new();
            let mut mean_p = [Accumulator::new(), Accumulator::new(), Accumulator::new()];
            let mut mean_r = [Accumulator::new(), Accumulator::new(), Accumulator::new()];
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    for &phi in &scheme.azimuthal.nodes {
                        let w = kw * wt * scheme.azimuthal.weight;
                        let kp = MomentumPoint::from_spherical(k, t, phi);
                        let p = state
                            .g_partials(&kp)
                            .expect("all families provide partials")?;
                        let g2 = p.value.norm_sqr();
                        let sin_t = t.sin();
                        let a_phi = connection.azimuthal_component(k, t);
                        let cov_phi = p.dphi / (k * sin_t)
                            - num_complex::Complex64::new(0.0, lam) * a_phi * p.value;
                        norm.add(w * g2);
                        pp.add(w * k * k * g2);
                        rr.add(
                            w * (p.dk.norm_sqr()
                                + p.dtheta.norm_sqr() / (k * k)
                                + cov_phi.norm_sqr()),
                        );
                        let kc = kp.cartesian();
                        for i in 0..3 {
                            mean_p[i].add(w * kc[i] * g2);
                        }
                        // ⟨R̂⟩ integrand: Re[g* (i D g)] in Cartesian components.
                        let (er, et, ep) = kp.spherical_frame();
                        let i_unit = num_complex::Complex64::i();
                        let dr = i_unit * p.dk;
                        let dt = i_unit * p.dtheta / k;
                        let dp = i_unit * cov_phi;
                        for i in 0..3 {
                            let comp = dr * er[i] + dt * et[i] + dp * ep[i];
                            mean_r[i].add(w * (p.value.conj() * comp).re);
                        }
                    }
                }
            }
            Ok(RawMoments {
                norm: norm.value(),
                rr: rr.value(),
                pp: pp.value(),
                mean_p: [mean_p[0].value(), mean_p[1].value(), mean_p[2].value()],
                mean_r: [mean_r[0].value(), mean_r[1].value(), mean_r[2].value()],
            })
        }
    }
}

/// Full dispersion report of a state under the given scheme.
///
/// ⟨R̂·R̂⟩ is evaluated from the explicit spherical integrand
/// |∂_k g|² + |∂_θ g|²/k² + |∂_φ g|²/(k²sin²θ) + λ²cos²θ|g|²/(k²sin²θ)
/// + iλcosθ(g*∂_φ g − g∂_φ g*)/(k²sin²θ), normalized by ‖g‖².
pub fn expectation_report(
    state: &PhotonState,
    scheme: &QuadratureScheme,
) -> Result<ExpectationReport> {
    divergence_probe(state, Connection::Plain, scheme)?;
    let raw = raw_moments(state, scheme, Connection::Plain)?;
    let a = state.scale();
    let norm = raw.norm;
    let rr = raw.rr / raw.norm / (a * a);
    let pp = raw.pp / raw.norm * (a * a);
    let mean_p = raw.mean_p.map(|v| v / raw.norm * a);
    let mean_r = raw.mean_r.map(|v| v / raw.norm / a);
    let p2 = mean_p.iter().map(|v| v * v).sum::<f64>();
    let r2 = mean_r.iter().map(|v| v * v).sum::<f64>();
    let var_r = rr - r2;
    let var_p = pp - p2;
    Ok(ExpectationReport {
        norm,
        mean_r,
        rr,
        mean_p,
        pp,
        var_r,
        var_p,
        gamma2: rr * pp,
        variance_product: var_r * var_p,
    })
}

/// The dimensionless Rayleigh quotient γ² = ⟨R̂·R̂⟩⟨P̂·P̂⟩/ħ².
pub fn gamma_squared(state: &PhotonState, scheme: &QuadratureScheme) -> Result<f64> {
    Ok(expectation_report(state, scheme)?.gamma2)
}

/// γ² with the Berry connection argument shifted along the axis by `kshift`
/// (in units 1/a): the position functional of a state boosted to mean
/// momentum ħ·kshift·n.
pub fn shifted_gamma2(state: &PhotonState, kshift: f64, scheme: &QuadratureScheme) -> Result<f64> {
    if kshift < 0.0 {
        return Err(Error::Domain(format!("kshift must be >= 0, got {kshift}")));
    }
    let shift_abs = kshift / state.scale();
    let connection = if kshift == 0.0 {
        Connection::Plain
    } else {
        Connection::Shifted(shift_abs)
    };
    divergence_probe(state, connection, scheme)?;
    let raw = raw_moments(state, scheme, connection)?;
    Ok(raw.rr * raw.pp / (raw.norm * raw.norm))
}

/// γ² with the exact infinite-shift limit of the connection,
/// α = (n×k)/|n×k|².
pub fn limit_gamma2(state: &PhotonState, scheme: &QuadratureScheme) -> Result<f64> {
    divergence_probe(state, Connection::InfiniteShift, scheme)?;
    let raw = raw_moments(state, scheme, Connection::InfiniteShift)?;
    Ok(raw.rr * raw.pp / (raw.norm * raw.norm))
}

/// One-dimensional uncertainty product ΔX·ΔP along the state axis, in units
/// of ħ. Along the axis the covariant derivative reduces to the plain one;
/// marginals along other directions are out of scope and rejected.
pub fn one_dimensional_product(
    state: &PhotonState,
    direction: &AxisVector,
    scheme: &QuadratureScheme,
) -> Result<f64> {
    let n = state.axis().components();
    let d = direction.components();
    let dot = n[0] * d[0] + n[1] * d[1] + n[2] * d[2];
    if (dot.abs() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(
            "one-dimensional marginals are only defined along the state axis".into(),
        ));
    }
    match state.azimuthal_mode() {
        Some(_) => {
            let mut norm = Accumulator::new();
            let mut xx = Accumulator::new();
            let mut kz = Accumulator::new();
            let mut kz2 = Accumulator::new();
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    let w = kw * wt;
                    let (u, du_dk, du_dt) = state.profile(k, t)?;
                    let (s, c) = t.sin_cos();
                    // ∂ g/∂k_z of u(k,θ)e^{imφ} has no φ contribution.
                    let dz = c * du_dk - s * du_dt / k;
                    norm.add(w * u * u);
                    xx.add(w * dz * dz);
                    kz.add(w * k * c * u * u);
                    kz2.add(w * k * k * c * c * u * u);
                }
            }
            let nv = norm.value();
            // ⟨X⟩ = 0 for real profiles; ΔX² = ⟨X²⟩.
            let var_x = xx.value() / nv;
            let var_p = kz2.value() / nv - (kz.value() / nv).powi(2);
            Ok((var_x * var_p).sqrt())
        }
        None => {
            let mut norm = Accumulator::new();
            let mut xx = Accumulator::new();
            let mut x1 = Accumulator::new();
            let mut kz = Accumulator::new();
            let mut kz2 = Accumulator::new();
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    for &phi in &scheme.azimuthal.nodes {
                        let w = kw * wt * scheme.azimuthal.weight;
                        let kp = MomentumPoint::from_spherical(k, t, phi);
                        let p = state
                            .g_partials(&kp)
                            .expect("all families provide partials")?;
                        let (s, c) = t.sin_cos();
                        let dz = c * p.dk - s * p.dtheta / k;
                        let g2 = p.value.norm_sqr();
                        norm.add(w * g2);
                        xx.add(w * dz.norm_sqr());
                        x1.add(w * (p.value.conj() * num_complex::Complex64::i() * dz).re);
                        kz.add(w * k * c * g2);
                        kz2.add(w * k * k * c * c * g2);
                    }
                }
            }
            let nv = norm.value();
            let mean_x = x1.value() / nv;
            let var_x = xx.value() / nv - mean_x * mean_x;
            let var_p = kz2.value() / nv - (kz.value() / nv).powi(2);
            Ok((var_x * var_p).sqrt())
        }
    }
}

/// Focal-volume bound report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocalReport {
    /// V_f = (ΔR²)^{3/2}.
    #[serde(rename = "V_f")]
    pub v_f: f64,
    /// V_min = ħ³γ³/(ΔP²)^{3/2}.
    #[serde(rename = "V_min")]
    pub v_min: f64,
    pub satisfied: bool,
}

/// Focal volume V_f = (ΔR²)^{3/2} against its lower bound
/// V_min = ħ³ γ³ / (ΔP²)^{3/2}.
pub fn focal_volume_report(var_r: f64, var_p: f64, gamma_bound: f64) -> Result<FocalReport> {
    if var_r <= 0.0 || var_p <= 0.0 || gamma_bound <= 0.0 {
        return Err(Error::Domain(format!(
            "focal volume needs positive inputs, got varR={var_r}, varP={var_p}, gamma={gamma_bound}"
        )));
    }
    let v_f = var_r.powf(1.5);
    let v_min = gamma_bound.powi(3) / var_p.powf(1.5);
    Ok(FocalReport {
        v_f,
        v_min,
        satisfied: v_f >= v_min * (1.0 - 1e-12),
    })
}

/// Free-function form of [`QuadratureScheme::build`].
pub fn default_scheme(state: &PhotonState, orders: QuadOrders) -> Result<QuadratureScheme> {
    QuadratureScheme::for_state(state, orders, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{gamma_single, NormConvention, PhotonState};
    use approx::assert_relative_eq;

    const GAMMA_S: f64 = 2.118_033_988_749_895;
    const GAMMA_S2: f64 = 4.486_067_977_499_79;
    /// Γ(γ+1/2)/(2Γ(γ)): the mean momentum of the m = ±1 saturators.
    const MEAN_P: f64 = 0.686_325_215_248_239_3;

    fn scheme_for(state: &PhotonState) -> QuadratureScheme {
        default_scheme(state, QuadOrders::default()).unwrap()
    }

    #[test]
    fn saturator_norms_are_unity_for_all_scales() {
        for &a in &[0.5f64, 1.0, 2.0] {
            for m in [-1, 0, 1] {
                let s = PhotonState::saturator_single(m, a).unwrap();
                let rep = expectation_report(&s, &scheme_for(&s)).unwrap();
                assert_relative_eq!(rep.norm, 1.0, max_relative = 1e-8);
                let b = PhotonState::saturator_beam(m, a).unwrap();
                let rep = expectation_report(&b, &scheme_for(&b)).unwrap();
                assert_relative_eq!(rep.norm, 1.0, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn equipartition_of_the_ground_level() {
        let s = PhotonState::saturator_single(0, 1.0).unwrap();
        let rep = expectation_report(&s, &scheme_for(&s)).unwrap();
        assert_relative_eq!(rep.rr, GAMMA_S, max_relative = 1e-9);
        assert_relative_eq!(rep.pp, GAMMA_S, max_relative = 1e-9);
        assert_relative_eq!(rep.rr / rep.pp, 1.0, max_relative = 1e-8);
        let _ = gamma_single();
    }

    #[test]
    fn sharp_bound_for_all_three_members() {
        let mut values = Vec::new();
        for m in [-1, 0, 1] {
            let s = PhotonState::saturator_single(m, 1.0).unwrap();
            let g2 = gamma_squared(&s, &scheme_for(&s)).unwrap();
            assert_relative_eq!(g2, GAMMA_S2, max_relative = 1e-8);
            values.push(g2);
        }
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-8, "m-spread {spread}");
    }

    #[test]
    fn mean_momentum_of_circular_members() {
        let plus = PhotonState::saturator_single(1, 1.0).unwrap();
        let rep = expectation_report(&plus, &scheme_for(&plus)).unwrap();
        assert_relative_eq!(rep.mean_p[2], MEAN_P, max_relative = 1e-9);
        assert!(rep.mean_p[0].abs() < 1e-14 && rep.mean_p[1].abs() < 1e-14);
        assert!(rep.mean_r.iter().all(|v| v.abs() < 1e-12));

        let minus = PhotonState::saturator_single(-1, 1.0).unwrap();
        let rep_m = expectation_report(&minus, &scheme_for(&minus)).unwrap();
        assert_relative_eq!(rep_m.mean_p[2], -MEAN_P, max_relative = 1e-9);

        let zero = PhotonState::saturator_single(0, 1.0).unwrap();
        let rep_0 = expectation_report(&zero, &scheme_for(&zero)).unwrap();
        assert!(rep_0.mean_p[2].abs() < 1e-12);
    }

    #[test]
    fn variance_product_of_the_circular_member() {
        // varR·varP = γ(γ − p̄²) with p̄ the mean momentum: the q = 0 corner
        // of the variational sweep.
        let plus = PhotonState::saturator_single(1, 1.0).unwrap();
        let rep = expectation_report(&plus, &scheme_for(&plus)).unwrap();
        let expected = GAMMA_S * (GAMMA_S - MEAN_P * MEAN_P);
        assert_relative_eq!(rep.variance_product, expected, max_relative = 1e-8);
        assert_relative_eq!(
            rep.variance_product,
            3.488_384_373_661_65,
            max_relative = 1e-8
        );
    }

    #[test]
    fn gamma2_is_scale_invariant() {
        for &a in &[0.5f64, 2.0, 7.0] {
            let s = PhotonState::saturator_single(1, a).unwrap();
            let g2 = gamma_squared(&s, &scheme_for(&s)).unwrap();
            assert_relative_eq!(g2, GAMMA_S2, max_relative = 1e-8);
        }
    }

    #[test]
    fn quadrature_doubling_leaves_reports_unchanged() {
        let s = PhotonState::saturator_single(1, 1.0).unwrap();
        let base = expectation_report(
            &s,
            &QuadratureScheme::for_state(
                &s,
                QuadOrders {
                    n_k: 48,
                    n_theta: 32,
                    n_phi: 16,
                },
                2,
            )
            .unwrap(),
        )
        .unwrap();
        let fine = expectation_report(
            &s,
            &QuadratureScheme::for_state(
                &s,
                QuadOrders {
                    n_k: 96,
                    n_theta: 64,
                    n_phi: 32,
                },
                2,
            )
            .unwrap(),
        )
        .unwrap();
        for (x, y) in [
            (base.norm, fine.norm),
            (base.rr, fine.rr),
            (base.pp, fine.pp),
            (base.mean_p[2], fine.mean_p[2]),
            (base.var_r, fine.var_r),
            (base.var_p, fine.var_p),
            (base.gamma2, fine.gamma2),
        ] {
            assert_relative_eq!(x, y, max_relative = 1e-8);
        }
    }

    #[test]
    fn rayleigh_quotient_ignores_amplitude_rescaling() {
        // Resample a saturator onto a grid and scale the stored values by
        // 10^{±3}: γ² must not move.
        let base = PhotonState::saturator_single(0, 1.0).unwrap();
        let k: Vec<f64> = (0..160).map(|i| 0.01 + i as f64 * 0.045).collect();
        let theta: Vec<f64> = (1..=90)
            .map(|i| std::f64::consts::PI * i as f64 / 91.0)
            .collect();
        let phi: Vec<f64> = (0..8)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 8.0)
            .collect();
        let grid = crate::states::sample_to_grid(&base, &k, &theta, &phi).unwrap();
        let reference = {
            let gs = PhotonState::from_grid(grid.clone(), 1.0, 1).unwrap();
            gamma_squared(&gs, &scheme_for(&gs)).unwrap()
        };
        for &c in &[1e3f64, 1e-3] {
            let mut scaled = grid.clone();
            scaled.re.iter_mut().for_each(|v| *v *= c);
            scaled.im.iter_mut().for_each(|v| *v *= c);
            let gs = PhotonState::from_grid(scaled, 1.0, 1).unwrap();
            let g2 = gamma_squared(&gs, &scheme_for(&gs)).unwrap();
            assert_relative_eq!(g2, reference, max_relative = 1e-12);
        }
    }

    #[test]
    fn shifted_connection_matches_the_vector_form() {
        // A(k, θ) φ̂ must equal the Berry connection evaluated at k + s n.
        use crate::lightcone::{berry_connection, AxisVector, MomentumPoint};
        let n = AxisVector::z();
        for &s in &[0.7f64, 2.0, 11.0] {
            let conn = Connection::Shifted(s);
            for &(k, t) in &[(0.4, 0.5), (1.3, 1.9), (2.2, 2.9)] {
                for &phi in &[0.3, 4.0] {
                    let kp = MomentumPoint::from_spherical(k, t, phi);
                    let mut shifted = kp.cartesian();
                    shifted[2] += s;
                    let alpha =
                        berry_connection(&MomentumPoint::from_cartesian(shifted), &n).unwrap();
                    let (_, _, ep) = kp.spherical_frame();
                    let a = conn.azimuthal_component(k, t);
                    for i in 0..3 {
                        assert!(
                            (alpha[i] - a * ep[i]).abs() < 1e-12 * (1.0 + a.abs()),
                            "s={s}, k={k}, t={t}: {alpha:?} vs {a}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn zero_shift_matches_plain_gamma2() {
        let s = PhotonState::saturator_single(1, 1.0).unwrap();
        let scheme = scheme_for(&s);
        let a = gamma_squared(&s, &scheme).unwrap();
        let b = shifted_gamma2(&s, 0.0, &scheme).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-13);
    }

    #[test]
    fn spherically_symmetric_states_are_flagged_divergent() {
        // A grid state with no angular dependence cannot have finite ⟨R̂·R̂⟩.
        let k: Vec<f64> = (0..40).map(|i| 0.05 + i as f64 * 0.1).collect();
        let theta: Vec<f64> = (1..=30)
            .map(|i| std::f64::consts::PI * i as f64 / 31.0)
            .collect();
        let phi: Vec<f64> = (0..8)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 8.0)
            .collect();
        let mut re = Vec::new();
        let mut im = Vec::new();
        for &kk in &k {
            for _ in &theta {
                for _ in &phi {
                    re.push((-kk * kk).exp());
                    im.push(0.0);
                }
            }
        }
        let grid = crate::states::GridData {
            k,
            theta,
            phi,
            re,
            im,
            convention: NormConvention::NonrelativisticG,
        };
        let gs = PhotonState::from_grid(grid, 1.0, 1).unwrap();
        let scheme = scheme_for(&gs);
        assert!(matches!(
            expectation_report(&gs, &scheme),
            Err(Error::DivergentState { .. })
        ));
    }

    #[test]
    fn gaussian_saturates_the_one_dimensional_relation() {
        for &w in &[1.0f64, 2.0, 0.5] {
            let s = PhotonState::gaussian_1d(w).unwrap();
            let scheme = scheme_for(&s);
            let product = one_dimensional_product(&s, &AxisVector::z(), &scheme).unwrap();
            assert_relative_eq!(product, 0.5, max_relative = 1e-8);
        }
    }

    #[test]
    fn saturator_exceeds_the_one_dimensional_bound() {
        let s = PhotonState::saturator_single(0, 1.0).unwrap();
        let scheme = scheme_for(&s);
        let product = one_dimensional_product(&s, &AxisVector::z(), &scheme).unwrap();
        assert!(product > 0.5 + 1e-3, "product {product}");
    }

    #[test]
    fn spherical_integrand_matches_cartesian_covariant_gradient() {
        // Dual route: the (m − λcosθ)²-combined spherical integrand against
        // Σ_i |(D_λ g)_i|² assembled from the Cartesian covariant gradient.
        use crate::lightcone::covariant_gradient;
        let s = PhotonState::trial_state(1, vec![0.4, -0.15], 1.0).unwrap();
        let scheme = scheme_for(&s);
        let rep = expectation_report(&s, &scheme).unwrap();
        let mut rr = Accumulator::new();
        let mut norm = Accumulator::new();
        for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
            let kw = wk * k * k;
            for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                // A single φ suffices: |D g|² of an e^{imφ} mode is
                // φ-independent.
                let kp = crate::lightcone::MomentumPoint::from_spherical(k, t, 0.4);
                let d = covariant_gradient(&s, 1, &kp).unwrap();
                let g = s.g(&kp).unwrap();
                let w = kw * wt * 2.0 * std::f64::consts::PI;
                rr.add(w * (d[0].norm_sqr() + d[1].norm_sqr() + d[2].norm_sqr()));
                norm.add(w * g.norm_sqr());
            }
        }
        let rr_cartesian = rr.value() / norm.value();
        assert_relative_eq!(rr_cartesian, rep.rr, max_relative = 1e-11);
    }

    #[test]
    fn phase_modulation_shifts_the_center_of_energy() {
        // Multiplying by e^{i c k_z} moves ⟨R̂⟩ to −c ẑ and leaves ΔR²
        // unchanged; checked through the sampled-grid path.
        use num_complex::Complex64;
        let c = 0.3;
        let base = PhotonState::saturator_single(0, 1.0).unwrap();
        let k: Vec<f64> = (0..220).map(|i| 0.005 + i as f64 * 0.032).collect();
        let theta: Vec<f64> = (1..=120)
            .map(|i| std::f64::consts::PI * i as f64 / 121.0)
            .collect();
        let phi: Vec<f64> = (0..8)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 8.0)
            .collect();
        let mut grid = crate::states::sample_to_grid(&base, &k, &theta, &phi).unwrap();
        let mut idx = 0;
        for &kk in &k {
            for &tt in &theta {
                for _ in &phi {
                    let phase = Complex64::from_polar(1.0, c * kk * tt.cos());
                    let v = Complex64::new(grid.re[idx], grid.im[idx]) * phase;
                    grid.re[idx] = v.re;
                    grid.im[idx] = v.im;
                    idx += 1;
                }
            }
        }
        let modulated = PhotonState::from_grid(grid, 1.0, 1).unwrap();
        let rep = expectation_report(&modulated, &scheme_for(&modulated)).unwrap();
        assert!(
            (rep.mean_r[2] + c).abs() < 2e-3,
            "mean_R_z {}",
            rep.mean_r[2]
        );
        assert!(rep.mean_r[0].abs() < 1e-6 && rep.mean_r[1].abs() < 1e-6);
        assert_relative_eq!(rep.var_r, GAMMA_S, max_relative = 3e-3);
        assert_relative_eq!(rep.rr, GAMMA_S + c * c, max_relative = 3e-3);
        assert_relative_eq!(rep.pp, GAMMA_S, max_relative = 1e-3);
    }

    #[test]
    fn transverse_covariant_product_exceeds_the_bound() {
        // Quadrature oracle for the marginal along x̂, built directly from
        // the covariant gradient (the α contribution keeps it above ħ/2).
        use crate::lightcone::covariant_gradient;
        let s = PhotonState::gaussian_1d(1.0).unwrap();
        let scheme = scheme_for(&s);
        let mut norm = Accumulator::new();
        let mut xx = Accumulator::new();
        let mut x1 = Accumulator::new();
        let mut kx = Accumulator::new();
        let mut kx2 = Accumulator::new();
        for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
            let kw = wk * k * k;
            for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                for &phi in &scheme.azimuthal.nodes {
                    let w = kw * wt * scheme.azimuthal.weight;
                    let kp = crate::lightcone::MomentumPoint::from_spherical(k, t, phi);
                    let g = s.g(&kp).unwrap();
                    let d = covariant_gradient(&s, 1, &kp).unwrap();
                    let kxv = kp.cartesian()[0];
                    norm.add(w * g.norm_sqr());
                    xx.add(w * d[0].norm_sqr());
                    x1.add(w * (g.conj() * num_complex::Complex64::i() * d[0]).re);
                    kx.add(w * kxv * g.norm_sqr());
                    kx2.add(w * kxv * kxv * g.norm_sqr());
                }
            }
        }
        let n = norm.value();
        let mean_x = x1.value() / n;
        let var_x = xx.value() / n - mean_x * mean_x;
        let var_p = kx2.value() / n - (kx.value() / n).powi(2);
        let product = (var_x * var_p).sqrt();
        assert!(product > 0.5 + 1e-3, "transverse product {product}");
    }

    #[test]
    fn report_moment_inequalities_hold() {
        let s = PhotonState::trial_state(1, vec![0.7, 0.2], 1.0).unwrap();
        let rep = expectation_report(&s, &scheme_for(&s)).unwrap();
        let p2: f64 = rep.mean_p.iter().map(|v| v * v).sum();
        let r2: f64 = rep.mean_r.iter().map(|v| v * v).sum();
        assert!(rep.pp >= p2 && rep.rr >= r2);
        assert!((rep.gamma2 - rep.rr * rep.pp).abs() < 1e-14 * rep.gamma2);
        assert!((rep.variance_product - rep.var_r * rep.var_p).abs() < 1e-14);
    }

    #[test]
    fn off_axis_marginals_are_rejected() {
        let s = PhotonState::gaussian_1d(1.0).unwrap();
        let scheme = scheme_for(&s);
        let x = AxisVector::new([1.0, 0.0, 0.0]).unwrap();
        assert!(one_dimensional_product(&s, &x, &scheme).is_err());
    }

    #[test]
    fn cauchy_schwarz_floor_never_violated() {
        let states = [
            PhotonState::saturator_single(0, 1.0).unwrap(),
            PhotonState::saturator_single(1, 1.0).unwrap(),
            PhotonState::saturator_beam(1, 1.0).unwrap(),
            PhotonState::trial_state(1, vec![0.5, -0.2], 1.0).unwrap(),
            PhotonState::trial_state(1, vec![1.5, 0.3, 0.05], 1.0).unwrap(),
            PhotonState::gaussian_1d(1.0).unwrap(),
        ];
        for s in &states {
            let rep = expectation_report(s, &scheme_for(s)).unwrap();
            assert!(
                rep.variance_product >= 2.25 * (1.0 - 1e-9),
                "variance product {} below the d = 3 floor",
                rep.variance_product
            );
        }
    }

    #[test]
    fn focal_volume_scaling_and_flags() {
        let r = focal_volume_report(4.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(r.v_f, 8.0, max_relative = 1e-14);
        assert_relative_eq!(r.v_min, 8.0, max_relative = 1e-14);
        assert!(r.satisfied);

        // Doubling varR grows V_f by 2^{3/2} and keeps it satisfied.
        let r2 = focal_volume_report(8.0, 1.0, 2.0).unwrap();
        assert_relative_eq!(r2.v_f / r.v_f, 2.0_f64.powf(1.5), max_relative = 1e-14);
        assert!(r2.satisfied);

        // Quadrupling varP with V_f fixed below the new bound fails it...
        let r3 = focal_volume_report(4.0, 0.1, 2.0).unwrap();
        assert!(!r3.satisfied);
        // ...and the bound scales as (ΔP²)^{-3/2}.
        let r4 = focal_volume_report(4.0, 8.0, 2.0).unwrap();
        assert_relative_eq!(r.v_min / r4.v_min, 8.0_f64.powf(1.5), max_relative = 1e-12);

        assert!(focal_volume_report(-1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn report_serialization_uses_the_exact_keys() {
        let s = PhotonState::saturator_single(1, 1.0).unwrap();
        let rep = expectation_report(&s, &scheme_for(&s)).unwrap();
        let json = rep.to_json();
        for key in [
            "\"norm\"",
            "\"mean_R\"",
            "\"RR\"",
            "\"mean_P\"",
            "\"PP\"",
            "\"varR\"",
            "\"varP\"",
            "\"gamma2\"",
            "\"variance_product\"",
        ] {
            assert!(json.contains(key), "missing {key}");
        }
    }

    #[test]
    fn grid_resampled_saturator_matches_closed_form_report() {
        let base = PhotonState::saturator_single(0, 1.0).unwrap();
        let k: Vec<f64> = (0..220).map(|i| 0.005 + i as f64 * 0.032).collect();
        let theta: Vec<f64> = (1..=120)
            .map(|i| std::f64::consts::PI * i as f64 / 121.0)
            .collect();
        let phi: Vec<f64> = (0..8)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 8.0)
            .collect();
        let grid = crate::states::sample_to_grid(&base, &k, &theta, &phi).unwrap();
        let gs = PhotonState::from_grid(grid, 1.0, 1).unwrap();
        let exact = expectation_report(&base, &scheme_for(&base)).unwrap();
        let interp = expectation_report(&gs, &scheme_for(&gs)).unwrap();
        assert_relative_eq!(interp.gamma2, exact.gamma2, max_relative = 1e-3);
        assert_relative_eq!(interp.rr, exact.rr, max_relative = 1e-3);
        assert_relative_eq!(interp.pp, exact.pp, max_relative = 1e-3);
        // The full 3D path must also see a vanishing center of energy.
        assert!(interp.mean_r.iter().all(|v| v.abs() < 1e-6));
        assert!(interp.mean_p[0].abs() < 1e-6 && interp.mean_p[1].abs() < 1e-6);
    }
}

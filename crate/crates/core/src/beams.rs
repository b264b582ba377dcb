//! Uncertainty functional of coherent photon beams in the large-photon-
//! number limit.
//!
//! For a mode function f the dimensionless quotient is
//!
//! ```text
//! γ² = [∫ k |D_λ f|² d³k · ∫ k |f|² d³k] / [∫ |f|² d³k]²,
//! ```
//!
//! independent of normalization. Its minimum over admissible modes is
//! (1/2 + √2)², attained by the beam saturators. The photon-number factors
//! of the dispersions cancel in all reported products, so ⟨N⟩ never enters
//! the numerics; dispersionR carries units a²/⟨N⟩ and dispersionP units
//! ⟨N⟩ħ²/a².

use serde::Serialize;

use crate::error::Result;
use crate::functionals::{focal_volume_report, Accumulator, FocalReport, QuadratureScheme};
use crate::lightcone::MomentumPoint;
use crate::lightcone::MomentumWaveFunction;
use crate::states::{gamma_beam, PhotonState};

/// Beam functional report, in units of the state scale `a`.
#[derive(Debug, Clone, Serialize)]
pub struct BeamReport {
    /// The beam quotient γ².
    pub gamma2: f64,
    /// κ scale ∫|f|²d³k / ∫k|f|²d³k, in units a.
    pub kappa_scale: f64,
    /// ΔP² in units ⟨N⟩ħ²/a².
    #[serde(rename = "dispersionP")]
    pub dispersion_p: f64,
    /// ΔR² in units a²/⟨N⟩.
    #[serde(rename = "dispersionR")]
    pub dispersion_r: f64,
    /// Focal volume against its bound, using the sharp beam γ.
    #[serde(flatten)]
    pub focal: FocalReport,
}

impl BeamReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Raw beam integrals: f-norm ∫|f|²d³k/k, H = ∫|f|²d³k, ∫k|f|²d³k and
/// ∫k|D_λf|²d³k.
struct BeamIntegrals {
    norm_f: f64,
    h: f64,
    kf2: f64,
    kdf2: f64,
}

fn beam_integrals(state: &PhotonState, scheme: &QuadratureScheme) -> Result<BeamIntegrals> {
    let lam = state.helicity() as f64;
    let mut norm_f = Accumulator::new();
    let mut h = Accumulator::new();
    let mut kf2 = Accumulator::new();
    let mut kdf2 = Accumulator::new();
    match state.azimuthal_mode() {
        Some(m) => {
            let mf = m as f64;
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    let w = kw * wt;
                    // f = √k g: convert the profile and its derivatives.
                    let (u, du_dk, du_dt) = state.profile(k, t)?;
                    let sk = k.sqrt();
                    let uf = sk * u;
                    let uf_k = sk * du_dk + 0.5 * u / sk;
                    let uf_t = sk * du_dt;
                    let (s, c) = t.sin_cos();
                    let cov = (mf - lam * c) / (k * s);
                    let f2 = uf * uf;
                    // Scheme measure is k³; rescale for the lower-power integrals.
                    norm_f.add(w * f2 / (k * k));
                    h.add(w * f2 / k);
                    kf2.add(w * f2);
                    kdf2.add(w * (uf_k * uf_k + uf_t * uf_t / (k * k) + cov * cov * f2));
                }
            }
            let two_pi = 2.0 * std::f64::consts::PI;
            Ok(BeamIntegrals {
                norm_f: norm_f.value() * two_pi,
                h: h.value() * two_pi,
                kf2: kf2.value() * two_pi,
                kdf2: kdf2.value() * two_pi,
            })
        }
        None => {
            for (&k, &wk) in scheme.radial.nodes.iter().zip(&scheme.radial.weights) {
                let kw = wk * k.powi(scheme.measure_exponent);
                for (&t, &wt) in scheme.polar.nodes.iter().zip(&scheme.polar.weights) {
                    for &phi in &scheme.azimuthal.nodes {
                        let w = kw * wt * scheme.azimuthal.weight;
                        let kp = MomentumPoint::from_spherical(k, t, phi);
                        let p = state
                            .g_partials(&kp)
                            .expect("all families provide partials")?;
                        let sk = k.sqrt();
                        let value = p.value * sk;
                        let dk = p.dk * sk + 0.5 * p.value / sk;
                        let dt = p.dtheta * sk;
                        let dp = p.dphi * sk;
                        let (s, c) = t.sin_cos();
                        let cov = dp / (k * s)
                            - num_complex::Complex64::new(0.0, lam) * c / (k * s) * value;
                        let f2 = value.norm_sqr();
                        norm_f.add(w * f2 / (k * k));
                        h.add(w * f2 / k);
                        kf2.add(w * f2);
                        kdf2.add(w * (dk.norm_sqr() + dt.norm_sqr() / (k * k) + cov.norm_sqr()));
                    }
                }
            }
            Ok(BeamIntegrals {
                norm_f: norm_f.value(),
                h: h.value(),
                kf2: kf2.value(),
                kdf2: kdf2.value(),
            })
        }
    }
}

/// Beam quotient and dispersion report for a mode function.
pub fn beam_gamma2(state: &PhotonState, scheme: &QuadratureScheme) -> Result<BeamReport> {
    crate::functionals::divergence_probe_plain(state, scheme)?;
    let ints = beam_integrals(state, scheme)?;
    let a = state.scale();
    let gamma2 = ints.kdf2 * ints.kf2 / (ints.h * ints.h);
    let kappa_scale = ints.h / ints.kf2 / a;
    let dispersion_p = ints.kf2 / ints.norm_f * a * a;
    let dispersion_r = ints.kdf2 * ints.norm_f / (ints.h * ints.h) / (a * a);
    let focal = focal_volume_report(dispersion_r, dispersion_p, gamma_beam())?;
    Ok(BeamReport {
        gamma2,
        kappa_scale,
        dispersion_p,
        dispersion_r,
        focal,
    })
}

/// κ scale of the beam problem: ∫|f|²d³k / ∫k|f|²d³k (units a — the
/// inverse momentum that makes κ = k·scale dimensionless).
pub fn kappa_scale(state: &PhotonState, scheme: &QuadratureScheme) -> Result<f64> {
    Ok(beam_gamma2(state, scheme)?.kappa_scale)
}

/// Scheme matched to the beam measure (k d³k).
pub fn beam_scheme(
    state: &PhotonState,
    orders: crate::functionals::QuadOrders,
) -> Result<QuadratureScheme> {
    QuadratureScheme::for_state(state, orders, 3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::QuadOrders;
    use crate::specfun::gamma_fn;
    use crate::spectra::{radial_residual, radial_solution, System};
    use crate::states::gamma_single;
    use approx::assert_relative_eq;

    const GAMMA_B2: f64 = 3.664_213_562_373_095;

    fn scheme_for(state: &PhotonState) -> QuadratureScheme {
        beam_scheme(state, QuadOrders::default()).unwrap()
    }

    #[test]
    fn beam_saturators_attain_the_sharp_bound() {
        let mut values = Vec::new();
        for m in [-1, 0, 1] {
            let s = PhotonState::saturator_beam(m, 1.0).unwrap();
            let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
            assert_relative_eq!(rep.gamma2, GAMMA_B2, max_relative = 1e-8);
            values.push(rep.gamma2);
        }
        let spread = values.iter().cloned().fold(f64::MIN, f64::max)
            - values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread <= 1e-8, "m-spread {spread}");
    }

    #[test]
    fn single_photon_profile_overshoots_the_beam_bound() {
        // Wrong radial profile for this functional; closed form from the
        // gamma-function moments of the Gaussian-decay profile.
        let s = PhotonState::saturator_single(1, 1.0).unwrap();
        let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
        assert!(rep.gamma2 > GAMMA_B2 + 0.5);
        let g = gamma_single();
        let i1 = (g - 1.0) * (g - 1.0) * gamma_fn(g).unwrap() / 2.0
            - (g - 1.0) * gamma_fn(g + 1.0).unwrap()
            + gamma_fn(g + 2.0).unwrap() / 2.0;
        let i2 = gamma_fn(g).unwrap() / 2.0;
        let expected = (i1 + i2) * (gamma_fn(g + 1.0).unwrap() / 2.0)
            / (gamma_fn(g + 0.5).unwrap() / 2.0).powi(2);
        assert_relative_eq!(rep.gamma2, expected, max_relative = 1e-8);
    }

    #[test]
    fn excited_level_is_a_stationary_point() {
        let s = PhotonState::eigenstate(System::Beam, 1, 1, 1, 1.0).unwrap();
        let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
        let exact = (1.5 + std::f64::consts::SQRT_2).powi(2);
        assert!(
            (rep.gamma2 - exact).abs() <= 1e-6,
            "{} vs {exact}",
            rep.gamma2
        );
    }

    #[test]
    fn kappa_scale_of_the_saturator_is_the_length_scale() {
        // Γ-moment identity: 2γ/(1 + 2√2) = 1 exactly for the saturator
        // profile, so the κ scale is a itself; doubling a doubles it.
        for &a in &[1.0f64, 2.0] {
            let s = PhotonState::saturator_beam(0, a).unwrap();
            let ks = kappa_scale(&s, &scheme_for(&s)).unwrap();
            assert_relative_eq!(ks, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn dispersion_product_equals_gamma2() {
        for m in [-1, 0, 1] {
            let s = PhotonState::saturator_beam(m, 1.3).unwrap();
            let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
            assert_relative_eq!(
                rep.dispersion_p * rep.dispersion_r,
                rep.gamma2,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn focal_volume_is_saturated_by_the_beam_ground_state() {
        let s = PhotonState::saturator_beam(1, 1.0).unwrap();
        let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
        assert!(rep.focal.satisfied);
        assert_relative_eq!(rep.focal.v_f, rep.focal.v_min, max_relative = 1e-6);
    }

    #[test]
    fn second_order_stationarity_of_the_minimum() {
        let base = PhotonState::saturator_beam(1, 1.0).unwrap();
        let dir = PhotonState::eigenstate(System::Beam, 1, 1, 1, 1.0).unwrap();
        let g0 = GAMMA_B2;
        let mut deltas = Vec::new();
        for &eps in &[1e-2f64, 1e-3] {
            let blended = PhotonState::blend(base.clone(), dir.clone(), eps).unwrap();
            let rep = beam_gamma2(&blended, &scheme_for(&blended)).unwrap();
            deltas.push(rep.gamma2 - g0);
        }
        assert!(deltas[0] > 0.0 && deltas[1] > 0.0);
        let ratio = deltas[0] / deltas[1];
        assert!(
            (ratio - 100.0).abs() < 10.0,
            "expected O(eps²) scaling, got ratio {ratio} with deltas {deltas:?}"
        );
    }

    #[test]
    fn beam_saturator_profile_solves_the_radial_equation() {
        let sol = radial_solution(System::Beam, 0, 1).unwrap();
        let samples: Vec<f64> = (1..=25).map(|i| 0.3 + 0.12 * i as f64).collect();
        let r = radial_residual(System::Beam, |k| sol.eval(k), sol.gamma, 1, &samples).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn beam_report_stable_under_quadrature_doubling() {
        let s = PhotonState::saturator_beam(1, 1.0).unwrap();
        let coarse = beam_gamma2(
            &s,
            &beam_scheme(
                &s,
                QuadOrders {
                    n_k: 48,
                    n_theta: 32,
                    n_phi: 16,
                },
            )
            .unwrap(),
        )
        .unwrap();
        let fine = beam_gamma2(
            &s,
            &beam_scheme(
                &s,
                QuadOrders {
                    n_k: 96,
                    n_theta: 64,
                    n_phi: 32,
                },
            )
            .unwrap(),
        )
        .unwrap();
        for (a, b) in [
            (coarse.gamma2, fine.gamma2),
            (coarse.kappa_scale, fine.kappa_scale),
            (coarse.dispersion_p, fine.dispersion_p),
            (coarse.dispersion_r, fine.dispersion_r),
        ] {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
    }

    #[test]
    fn narrow_spectrum_kappa_scale_is_inverse_frequency() {
        // Monochromatic limit: κ scale → 1/k₀ for a spectrum peaked at k₀.
        use crate::states::{sample_to_grid, GridData, NormConvention};
        let k0 = 2.0;
        let sigma = 0.03;
        let k: Vec<f64> = (0..160)
            .map(|i| k0 - 6.0 * sigma + 12.0 * sigma * i as f64 / 159.0)
            .collect();
        let theta: Vec<f64> = (1..=60)
            .map(|i| std::f64::consts::PI * i as f64 / 61.0)
            .collect();
        let phi: Vec<f64> = (0..8)
            .map(|i| 2.0 * std::f64::consts::PI * i as f64 / 8.0)
            .collect();
        let base = PhotonState::saturator_beam(0, 1.0).unwrap();
        let mut grid: GridData = sample_to_grid(&base, &k, &theta, &phi).unwrap();
        // Replace the radial profile with the narrow line shape.
        let mut idx = 0;
        for &kk in &k {
            let line = (-(kk - k0) * (kk - k0) / (2.0 * sigma * sigma)).exp();
            for &tt in &theta {
                for _ in &phi {
                    grid.re[idx] = line * tt.sin();
                    grid.im[idx] = 0.0;
                    idx += 1;
                }
            }
        }
        grid.convention = NormConvention::RelativisticF;
        let narrow = PhotonState::from_grid(grid, 1.0, 1).unwrap();
        let ks = kappa_scale(&narrow, &scheme_for(&narrow)).unwrap();
        assert!(
            (ks - 1.0 / k0).abs() < 1e-3,
            "kappa scale {ks} vs {}",
            1.0 / k0
        );
    }

    #[test]
    fn beam_report_serialization_keys() {
        let s = PhotonState::saturator_beam(1, 1.0).unwrap();
        let rep = beam_gamma2(&s, &scheme_for(&s)).unwrap();
        let json = rep.to_json();
        for key in [
            "\"gamma2\"",
            "\"kappa_scale\"",
            "\"dispersionP\"",
            "\"dispersionR\"",
            "\"V_f\"",
            "\"V_min\"",
            "\"satisfied\"",
        ] {
            assert!(json.contains(key), "missing {key} in {json}");
        }
    }
}

//! Geometry of the light cone in momentum space: polarization vectors, the
//! Berry connection α(k), covariant derivatives and the monopole curvature
//! that encodes the noncommutativity of the center-of-energy components.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative exclusion margin around the vortex line: points with
/// |n × k| < margin · k are rejected because α(k) is singular there.
pub const AXIS_MARGIN_REL: f64 = 1e-10;

pub type Vec3 = [f64; 3];
pub type CVec3 = [Complex64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Hermitian inner product conj(a)·b of complex 3-vectors.
pub fn cdot(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]
}

/// Unnormalized bilinear product a·b (no conjugation).
pub fn cdot_bilinear(a: &CVec3, b: &CVec3) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Unit reference axis for the polarization gauge (the vortex-line direction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisVector {
    n: Vec3,
}

impl AxisVector {
    /// Normalizes the input; rejects vectors shorter than 1e-14.
    pub fn new(v: Vec3) -> Result<Self> {
        let len = norm(&v);
        if !len.is_finite() || len < 1e-14 {
            return Err(Error::Domain("axis vector must be nonzero".into()));
        }
        Ok(Self {
            n: scale(&v, 1.0 / len),
        })
    }

    /// The default axis: +z.
    pub fn z() -> Self {
        Self { n: [0.0, 0.0, 1.0] }
    }

    pub fn components(&self) -> Vec3 {
        self.n
    }
}

impl Default for AxisVector {
    fn default() -> Self {
        Self::z()
    }
}

/// Point on the light cone, stored in Cartesian components with a consistent
/// spherical cache (k, θ, φ).
#[derive(Debug, Clone, Copy)]
pub struct MomentumPoint {
    cart: Vec3,
    k: f64,
    theta: f64,
    phi: f64,
}

impl MomentumPoint {
    pub fn from_cartesian(cart: Vec3) -> Self {
        let k = norm(&cart);
        let theta = if k == 0.0 {
            0.0
        } else {
            (cart[2] / k).clamp(-1.0, 1.0).acos()
        };
        let mut phi = cart[1].atan2(cart[0]);
        if phi < 0.0 {
            phi += 2.0 * std::f64::consts::PI;
        }
        Self {
            cart,
            k,
            theta,
            phi,
        }
    }

    pub fn from_spherical(k: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            cart: [k * st * cp, k * st * sp, k * ct],
            k,
            theta,
            phi,
        }
    }

    pub fn cartesian(&self) -> Vec3 {
        self.cart
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Orthonormal spherical frame (k̂, θ̂, φ̂) at this point.
    pub fn spherical_frame(&self) -> (Vec3, Vec3, Vec3) {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        (
            [st * cp, st * sp, ct],
            [ct * cp, ct * sp, -st],
            [-sp, cp, 0.0],
        )
    }
}

fn off_axis_cross(kp: &MomentumPoint, n: &AxisVector, margin_rel: f64) -> Result<Vec3> {
    let cr = cross(&n.components(), &kp.cartesian());
    let len = norm(&cr);
    let margin = margin_rel * kp.k();
    if len <= margin {
        return Err(Error::VortexLine { cross: len, margin });
    }
    Ok(cr)
}

/// Normalized polarization vector
/// e(k) = [k×(n×k) − i k (n×k)] / (√2 k |n×k|).
///
/// Transverse (e·k = 0), null (e·e = 0) and unit (e*·e = 1) by construction.
pub fn polarization_vector(kp: &MomentumPoint, n: &AxisVector) -> Result<CVec3> {
    let nxk = off_axis_cross(kp, n, AXIS_MARGIN_REL)?;
    let kxnxk = cross(&kp.cartesian(), &nxk);
    let denom = std::f64::consts::SQRT_2 * kp.k() * norm(&nxk);
    let mut e = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        e[i] = Complex64::new(kxnxk[i] / denom, -kp.k() * nxk[i] / denom);
    }
    Ok(e)
}

/// Berry connection on the light cone,
/// α(k) = (n·k)(n×k) / (k |n×k|²).
///
/// For n = ẑ this is (cosθ / k sinθ) φ̂; its component along n vanishes
/// identically.
pub fn berry_connection(kp: &MomentumPoint, n: &AxisVector) -> Result<Vec3> {
    let nxk = off_axis_cross(kp, n, AXIS_MARGIN_REL)?;
    let len2 = dot(&nxk, &nxk);
    let s = dot(&n.components(), &kp.cartesian()) / (kp.k() * len2);
    Ok(scale(&nxk, s))
}

/// Curl of the Berry connection by Richardson-extrapolated central
/// differences. The analytic value is the unit monopole field −k̂/k².
pub fn berry_curvature(kp: &MomentumPoint, n: &AxisVector, h: f64) -> Result<Vec3> {
    let nxk = off_axis_cross(kp, n, AXIS_MARGIN_REL)?;
    if norm(&nxk) < 10.0 * h {
        return Err(Error::Domain(format!(
            "point too close to the vortex line for step h = {h}"
        )));
    }
    let curl_at = |step: f64| -> Result<Vec3> {
        // jacobian[i][j] = ∂ α_j / ∂ k_i
        let mut jac = [[0.0; 3]; 3];
        for i in 0..3 {
            let mut plus = kp.cartesian();
            plus[i] += step;
            let mut minus = kp.cartesian();
            minus[i] -= step;
            let ap = berry_connection(&MomentumPoint::from_cartesian(plus), n)?;
            let am = berry_connection(&MomentumPoint::from_cartesian(minus), n)?;
            for j in 0..3 {
                jac[i][j] = (ap[j] - am[j]) / (2.0 * step);
            }
        }
        Ok([
            jac[1][2] - jac[2][1],
            jac[2][0] - jac[0][2],
            jac[0][1] - jac[1][0],
        ])
    };
    // Two Richardson levels: the difference of successive extrapolants
    // gauges the residual truncation of the returned value.
    let c0 = curl_at(h)?;
    let c1 = curl_at(0.5 * h)?;
    let c2 = curl_at(0.25 * h)?;
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for i in 0..3 {
        first[i] = (4.0 * c1[i] - c0[i]) / 3.0;
        second[i] = (4.0 * c2[i] - c1[i]) / 3.0;
    }
    let mut result = [0.0; 3];
    let mut estimate: f64 = 0.0;
    for i in 0..3 {
        result[i] = (16.0 * second[i] - first[i]) / 15.0;
        estimate = estimate.max((second[i] - first[i]).abs() / 15.0);
    }
    let tolerance = 1e-6 * (1.0 + norm(&result));
    if estimate > tolerance {
        return Err(Error::StepTooLarge {
            estimate,
            tolerance,
        });
    }
    Ok(result)
}

/// Value and analytic spherical partial derivatives of a rescaled wave
/// function g at a momentum point.
#[derive(Debug, Clone, Copy)]
pub struct GPartials {
    pub value: Complex64,
    pub dk: Complex64,
    pub dtheta: Complex64,
    pub dphi: Complex64,
}

/// Momentum-space wave function in the nonrelativistic convention (the
/// rescaled function integrated with the plain d³k measure).
pub trait MomentumWaveFunction {
    fn g(&self, kp: &MomentumPoint) -> Result<Complex64>;

    /// Analytic partials when the family is closed-form; `None` triggers the
    /// finite-difference fallback.
    fn g_partials(&self, kp: &MomentumPoint) -> Option<Result<GPartials>>;

    fn axis(&self) -> AxisVector;
}

/// Covariant gradient D_λ g = (∇ − iλα) g of an arbitrary evaluable function,
/// by central differences with one Richardson level.
pub fn covariant_gradient_of<F>(f: F, lam: i32, kp: &MomentumPoint, n: &AxisVector) -> Result<CVec3>
where
    F: Fn(&MomentumPoint) -> Result<Complex64>,
{
    let h = f64::EPSILON.cbrt() * kp.k().max(1.0);
    let grad_at = |step: f64| -> Result<CVec3> {
        let mut g = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            let mut plus = kp.cartesian();
            plus[i] += step;
            let mut minus = kp.cartesian();
            minus[i] -= step;
            g[i] = (f(&MomentumPoint::from_cartesian(plus))?
                - f(&MomentumPoint::from_cartesian(minus))?)
                / (2.0 * step);
        }
        Ok(g)
    };
    let coarse = grad_at(h)?;
    let fine = grad_at(0.5 * h)?;
    let alpha = berry_connection(kp, n)?;
    let value = f(kp)?;
    let ilam = Complex64::new(0.0, lam as f64);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for i in 0..3 {
        let grad = (4.0 * fine[i] - coarse[i]) / 3.0;
        out[i] = grad - ilam * alpha[i] * value;
    }
    Ok(out)
}

/// Covariant gradient of a photon state's rescaled wave function, using the
/// family's analytic partial derivatives when available.
pub fn covariant_gradient<S: MomentumWaveFunction>(
    state: &S,
    lam: i32,
    kp: &MomentumPoint,
) -> Result<CVec3> {
    let n = state.axis();
    match state.g_partials(kp) {
        Some(partials) => {
            let p = partials?;
            let (er, et, ep) = kp.spherical_frame();
            let k = kp.k();
            let st = kp.theta().sin();
            let alpha = berry_connection(kp, &n)?;
            let ilam = Complex64::new(0.0, lam as f64);
            let mut out = [Complex64::new(0.0, 0.0); 3];
            for i in 0..3 {
                let grad = p.dk * er[i] + p.dtheta / k * et[i] + p.dphi / (k * st) * ep[i];
                out[i] = grad - ilam * alpha[i] * p.value;
            }
            Ok(out)
        }
        None => covariant_gradient_of(|q| state.g(q), lam, kp, &n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn momentum_point_spherical_cache_consistent() {
        let kp = MomentumPoint::from_spherical(2.0, 1.1, 4.4);
        let back = MomentumPoint::from_cartesian(kp.cartesian());
        assert_relative_eq!(back.k(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(back.theta(), 1.1, max_relative = 1e-12);
        assert_relative_eq!(back.phi(), 4.4, max_relative = 1e-12);
    }

    #[test]
    fn axis_vector_normalizes() {
        let n = AxisVector::new([0.0, 0.0, 3.0]).unwrap();
        assert_eq!(n.components(), [0.0, 0.0, 1.0]);
        assert!(AxisVector::new([0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn polarization_along_x_with_z_axis() {
        // k = k x̂, n = ẑ: n×k = k ŷ, k×(n×k) = k² ẑ, so e = (ẑ − iŷ)/√2.
        let kp = MomentumPoint::from_cartesian([1.5, 0.0, 0.0]);
        let e = polarization_vector(&kp, &AxisVector::z()).unwrap();
        let s = 1.0 / std::f64::consts::SQRT_2;
        assert_relative_eq!(e[2].re, s, max_relative = 1e-14);
        assert_relative_eq!(e[1].im, -s, max_relative = 1e-14);
        assert!(e[0].norm() < 1e-14 && e[2].im.abs() < 1e-14 && e[1].re.abs() < 1e-14);
    }

    #[test]
    fn polarization_identities_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = AxisVector::new([0.3, -0.2, 0.9]).unwrap();
        let mut checked = 0;
        while checked < 1000 {
            let v: Vec3 = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let kp = MomentumPoint::from_cartesian(v);
            if norm(&cross(&n.components(), &v)) < 1e-3 * kp.k() || kp.k() < 1e-3 {
                continue;
            }
            let e = polarization_vector(&kp, &n).unwrap();
            let kvec = [
                Complex64::new(v[0], 0.0),
                Complex64::new(v[1], 0.0),
                Complex64::new(v[2], 0.0),
            ];
            assert_relative_eq!(cdot(&e, &e).re, 1.0, max_relative = 1e-12);
            assert!(cdot(&e, &e).im.abs() < 1e-12);
            assert!(cdot_bilinear(&e, &kvec).norm() < 1e-12 * kp.k());
            assert!(cdot_bilinear(&e, &e).norm() < 1e-12);
            checked += 1;
        }
    }

    #[test]
    fn connection_is_azimuthal_for_z_axis() {
        let kp = MomentumPoint::from_spherical(1.7, 0.9, 2.3);
        let alpha = berry_connection(&kp, &AxisVector::z()).unwrap();
        let (_, _, ep) = kp.spherical_frame();
        let magnitude = kp.theta().cos() / (kp.k() * kp.theta().sin());
        for i in 0..3 {
            assert_relative_eq!(alpha[i], magnitude * ep[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn connection_vanishes_on_equator_and_along_axis_component() {
        let eq = MomentumPoint::from_spherical(1.0, std::f64::consts::FRAC_PI_2, 0.7);
        let alpha = berry_connection(&eq, &AxisVector::z()).unwrap();
        assert!(norm(&alpha) < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = AxisVector::new([0.2, 0.5, -0.8]).unwrap();
        for _ in 0..200 {
            let v: Vec3 = [
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            ];
            let kp = MomentumPoint::from_cartesian(v);
            if norm(&cross(&n.components(), &v)) < 1e-3 || kp.k() < 1e-3 {
                continue;
            }
            let alpha = berry_connection(&kp, &n).unwrap();
            assert!(dot(&alpha, &n.components()).abs() < 1e-13);
        }
    }

    #[test]
    fn connection_errors_on_vortex_line() {
        let kp = MomentumPoint::from_cartesian([0.0, 0.0, 1.3]);
        assert!(matches!(
            berry_connection(&kp, &AxisVector::z()),
            Err(Error::VortexLine { .. })
        ));
    }

    #[test]
    fn curvature_is_unit_monopole() {
        let n = AxisVector::z();
        let kp = MomentumPoint::from_spherical(1.0, std::f64::consts::FRAC_PI_3, 0.0);
        let curl = berry_curvature(&kp, &n, 1e-4).unwrap();
        let (er, _, _) = kp.spherical_frame();
        let expected = scale(&er, -1.0);
        for i in 0..3 {
            assert!(
                (curl[i] - expected[i]).abs() <= 1e-6,
                "component {i}: {curl:?}"
            );
        }

        // 1/k² scaling.
        let kp2 = MomentumPoint::from_spherical(2.0, 1.1, 0.4);
        let curl2 = berry_curvature(&kp2, &n, 1e-4).unwrap();
        assert_relative_eq!(norm(&curl2), 0.25, max_relative = 1e-6);
    }

    #[test]
    fn covariant_gradient_analytic_matches_finite_differences() {
        use crate::states::PhotonState;
        // Dual evaluation oracle on the m = 0 saturator at the equator.
        let s = PhotonState::saturator_single(0, 1.0).unwrap();
        for &(k, theta, phi) in &[
            (1.0, std::f64::consts::FRAC_PI_2, 0.3),
            (0.7, 1.1, 2.0),
            (1.6, 2.2, 4.4),
        ] {
            let kp = MomentumPoint::from_spherical(k, theta, phi);
            let analytic = covariant_gradient(&s, 1, &kp).unwrap();
            let fd = covariant_gradient_of(|q| s.g(q), 1, &kp, &AxisVector::z()).unwrap();
            for i in 0..3 {
                assert!(
                    (analytic[i] - fd[i]).norm() <= 1e-8 * (1.0 + analytic[i].norm()),
                    "component {i}: {analytic:?} vs {fd:?}"
                );
            }
        }
    }

    #[test]
    fn covariant_gradient_reduces_to_plain_gradient_on_equator() {
        use crate::states::PhotonState;
        // α = 0 at θ = π/2, so D g = ∇g for a φ-independent state there.
        let s = PhotonState::saturator_single(0, 1.0).unwrap();
        let kp = MomentumPoint::from_spherical(1.3, std::f64::consts::FRAC_PI_2, 0.9);
        let d = covariant_gradient(&s, 1, &kp).unwrap();
        let p = s.g_partials(&kp).unwrap().unwrap();
        let (er, et, _) = kp.spherical_frame();
        for i in 0..3 {
            let plain = p.dk * er[i] + p.dtheta / kp.k() * et[i];
            assert!((d[i] - plain).norm() < 1e-12);
        }
    }

    #[test]
    fn covariant_gradient_azimuthal_component_of_the_circular_member() {
        use crate::states::PhotonState;
        // For g = u(k,θ)e^{imφ} the φ̂ component of D_λ g is
        // i(m − λcosθ)/(k sinθ) · g.
        let s = PhotonState::saturator_single(1, 1.0).unwrap();
        let kp = MomentumPoint::from_spherical(0.9, 1.2, 0.7);
        let d = covariant_gradient(&s, 1, &kp).unwrap();
        let (_, _, ep) = kp.spherical_frame();
        let phi_component = d[0] * ep[0] + d[1] * ep[1] + d[2] * ep[2];
        let g = s.g(&kp).unwrap();
        let expected = Complex64::i() * (1.0 - kp.theta().cos()) / (kp.k() * kp.theta().sin()) * g;
        assert!((phi_component - expected).norm() < 1e-10 * (1.0 + expected.norm()));
    }

    #[test]
    fn curvature_rotationally_symmetric_about_axis() {
        let n = AxisVector::z();
        for &theta in &[0.4f64, std::f64::consts::FRAC_PI_2, 2.7] {
            let kp = MomentumPoint::from_spherical(1.5, theta, 1.0);
            let curl = berry_curvature(&kp, &n, 1e-4).unwrap();
            let (er, _, _) = kp.spherical_frame();
            let expected = scale(&er, -1.0 / (1.5 * 1.5));
            for i in 0..3 {
                assert!((curl[i] - expected[i]).abs() <= 1e-6);
            }
        }
    }
}

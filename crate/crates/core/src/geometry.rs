//! Points of dS_d in the conformal chart and on the null cone.
//!
//! `x = (R tan ρ, R u / cos ρ)` with `u ∈ S^{d-1}` and `ρ ∈ (-π/2, π/2)`. A shift
//! `ρ ↦ ρ̃ = ρ - iε` with `ε > 0` moves the point into the backward tube
//! (imaginary part `y` timelike with `y⁰ < 0`), which is where every plane wave
//! below is single-valued under the principal logarithm.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::harmonics::UNIT_TOL;

/// Smallest admissible `|ν|`. Below it `1/Γ(-2iν)` is too close to its zero at ν = 0.
pub const NU_MIN: f64 = 1e-3;

/// Closest approach to `|ρ| = π/2` for unshifted evaluations.
pub const CHART_MARGIN: f64 = 1e-6;

/// Spacetime dimension, curvature radius and spectral parameter of a principal-series field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalParams {
    pub d: usize,
    pub radius: f64,
    pub nu: f64,
}

impl PrincipalParams {
    pub fn new(d: usize, radius: f64, nu: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParams(format!("dimension d = {d} must be at least 3")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!("curvature radius R = {radius} must be positive")));
        }
        if !nu.is_finite() || nu.abs() < NU_MIN {
            return Err(Error::InvalidParams(format!(
                "|nu| = {} is below nu_min = {NU_MIN}: the regularization factor 1/Gamma(-2i nu) \
                 sits on the pole of Gamma(-2i nu) at nu = 0",
                nu.abs()
            )));
        }
        Ok(Self { d, radius, nu })
    }

    /// Unit curvature radius.
    pub fn unit(d: usize, nu: f64) -> Result<Self> {
        Self::new(d, 1.0, nu)
    }

    /// τ = -(d-1)/2 - iν.
    pub fn tau(&self) -> Complex64 {
        Complex64::new(-(self.d as f64 - 1.0) / 2.0, -self.nu)
    }

    /// Eigenvalue ((d-1)/2)² + ν² of the quadratic Casimir.
    pub fn casimir_eigenvalue(&self) -> f64 {
        let h = (self.d as f64 - 1.0) / 2.0;
        h * h + self.nu * self.nu
    }
}

fn unit_vector(u: &[f64]) -> Result<()> {
    let n = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("|u| = {n} is not 1")));
    }
    Ok(())
}

/// Normalizes a nonzero vector.
pub fn normalized(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Domain("cannot normalize a zero vector".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A point `(ρ, u)` of the chart, shifted to `ρ - iε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkPoint {
    pub rho: f64,
    pub u: Vec<f64>,
    pub epsilon: f64,
}

impl BulkPoint {
    pub fn new(rho: f64, u: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(rho.is_finite() && rho.abs() < FRAC_PI_2) {
            return Err(Error::Domain(format!("rho = {rho} is outside (-pi/2, pi/2)")));
        }
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::Domain(format!("epsilon = {epsilon} must be >= 0")));
        }
        if epsilon == 0.0 && rho.abs() > FRAC_PI_2 - CHART_MARGIN {
            return Err(Error::Domain(format!(
                "rho = {rho} is within {CHART_MARGIN} of the chart edge; use a shifted point"
            )));
        }
        unit_vector(&u)?;
        Ok(Self { rho, u, epsilon })
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    /// ρ̃ = ρ - iε.
    pub fn rho_tilde(&self) -> Complex64 {
        Complex64::new(self.rho, -self.epsilon)
    }
}

/// Future null direction `ξ = ξ⁰ (1, v)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDirection {
    pub xi0: f64,
    pub v: Vec<f64>,
}

impl NullDirection {
    pub fn new(xi0: f64, v: Vec<f64>) -> Result<Self> {
        if !(xi0.is_finite() && xi0 > 0.0) {
            return Err(Error::Domain(format!("xi0 = {xi0} must be positive")));
        }
        unit_vector(&v)?;
        Ok(Self { xi0, v })
    }

    /// Embedding-space components `(ξ⁰, ξ⁰ v)`.
    pub fn components(&self) -> Vec<f64> {
        std::iter::once(self.xi0).chain(self.v.iter().map(|x| self.xi0 * x)).collect()
    }
}

/// A point of the boundary sphere S^{d-1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub u: Vec<f64>,
}

impl BoundaryPoint {
    pub fn new(u: Vec<f64>) -> Result<Self> {
        unit_vector(&u)?;
        Ok(Self { u })
    }

    pub fn antipode(&self) -> Self {
        Self { u: self.u.iter().map(|x| -x).collect() }
    }
}

/// Minkowski product `a⁰b⁰ - Σ aⁱbⁱ`, bilinear (no conjugation).
pub fn minkowski_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let spatial: Complex64 = a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum();
    a[0] * b[0] - spatial
}

/// Embedding coordinates `(R tan ρ̃, R u / cos ρ̃)`.
pub fn embed(p: &BulkPoint, params: &PrincipalParams) -> Result<Vec<Complex64>> {
    if p.dim() != params.d {
        return Err(Error::GridMismatch { grid: p.dim(), expected: params.d });
    }
    let rt = p.rho_tilde();
    let sec = params.radius / rt.cos();
    Ok(std::iter::once(params.radius * rt.tan()).chain(p.u.iter().map(|&x| sec * x)).collect())
}

/// `x·ξ / R = ξ⁰ (sin ρ̃ - u·v) / cos ρ̃`.
///
/// Equivalent to `[ξ⁰ e^{iρ̃} / (2i cos ρ̃)] (1 + r² - 2r u·v)` with `r = i e^{-iρ̃}`.
pub fn conformal_dot(p: &BulkPoint, xi: &NullDirection, params: &PrincipalParams) -> Result<Complex64> {
    if p.dim() != params.d || xi.v.len() != params.d {
        return Err(Error::GridMismatch { grid: xi.v.len(), expected: params.d });
    }
    Ok(conformal_dot_raw(p.rho_tilde(), dot(&p.u, &xi.v), xi.xi0))
}

/// [`conformal_dot`] from `ρ̃` and `t = u·v` directly.
pub fn conformal_dot_raw(rho_tilde: Complex64, t: f64, xi0: f64) -> Complex64 {
    xi0 * (rho_tilde.sin() - t) / rho_tilde.cos()
}

/// Smallest shift that keeps the ₂F₁ argument inside its accuracy envelope at `ρ`.
pub fn epsilon_floor(rho: f64) -> f64 {
    ((FRAC_PI_2 - rho.abs()) / 10.0).max(CHART_MARGIN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> PrincipalParams {
        PrincipalParams::unit(3, 1.0).unwrap()
    }

    fn unit_from(a: f64, b: f64, c: f64) -> Vec<f64> {
        normalized(&[a, b, c]).unwrap()
    }

    #[test]
    fn parameter_gates() {
        assert!(PrincipalParams::unit(3, 0.0).is_err());
        assert!(PrincipalParams::unit(3, 5e-4).is_err());
        assert!(PrincipalParams::unit(2, 1.0).is_err());
        assert!(PrincipalParams::new(3, -1.0, 1.0).is_err());
        let msg = PrincipalParams::unit(3, 0.0).unwrap_err().to_string();
        assert!(msg.contains("Gamma(-2i nu)"), "{msg}");
        assert!(PrincipalParams::unit(3, -1e-3).is_ok());
    }

    #[test]
    fn casimir_values() {
        let p = PrincipalParams::unit(4, 2.0).unwrap();
        assert_eq!(p.casimir_eigenvalue(), 6.25);
        for (d, nu) in [(3, 0.5), (4, -1.3), (5, 7.0)] {
            let p = PrincipalParams::unit(d, nu).unwrap();
            let t = p.tau();
            let alt = -(t * (t + (d as f64 - 1.0)));
            assert!((alt - p.casimir_eigenvalue()).norm() < 1e-12);
            assert_eq!(p.casimir_eigenvalue(), PrincipalParams::unit(d, -nu).unwrap().casimir_eigenvalue());
        }
    }

    #[test]
    fn embed_waist_and_quarter() {
        let pr = params();
        let u = unit_from(0.3, -0.2, 0.5);
        let x = embed(&BulkPoint::new(0.0, u.clone(), 0.0).unwrap(), &pr).unwrap();
        assert_eq!(x[0], c(0.0, 0.0));
        for i in 0..3 {
            assert!((x[i + 1] - u[i]).norm() < 1e-15);
        }
        assert!((minkowski_dot(&x, &x) + 1.0).norm() < 1e-12);

        let x = embed(&BulkPoint::new(FRAC_PI_4, vec![0.0, 0.0, 1.0], 0.0).unwrap(), &pr).unwrap();
        assert!((x[0] - 1.0).norm() < 1e-15);
        assert!((x[3] - 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn embed_golden_shifted() {
        // 30-digit reference: tan(0.3 - 0.001i), sec(0.3 - 0.001i)
        let p = BulkPoint::new(0.3, vec![0.0, 0.0, 1.0], 1e-3).unwrap();
        let x = embed(&p, &params()).unwrap();
        assert!((x[0] - c(0.309_335_910_673_581_82, -0.001_095_688_445_247_885_8)).norm() < 1e-15);
        assert!((x[3] - c(1.046_750_978_000_104, -0.000_323_797_913_877_126_64)).norm() < 1e-15);
    }

    #[test]
    fn conformal_dot_golden() {
        let p = BulkPoint::new(0.3, vec![0.0, 0.0, 1.0], 1e-3).unwrap();
        let xi = NullDirection::new(1.0, unit_from(0.0, 0.75f64.sqrt(), 0.5)).unwrap();
        let got = conformal_dot(&p, &xi, &params()).unwrap();
        let want = c(-0.214_039_578_326_470_17, -0.000_933_789_488_309_322_5);
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn conformal_dot_at_waist() {
        let u = unit_from(1.0, 2.0, -0.5);
        let v = unit_from(-0.3, 0.1, 0.9);
        let p = BulkPoint::new(0.0, u.clone(), 0.0).unwrap();
        let xi = NullDirection::new(2.5, v.clone()).unwrap();
        let got = conformal_dot(&p, &xi, &params()).unwrap();
        assert!((got - (-2.5 * dot(&u, &v))).norm() < 1e-15);
        let w = unit_from(-2.0, 1.0, 0.0);
        let xi = NullDirection::new(1.0, w).unwrap();
        assert!(conformal_dot(&p, &xi, &params()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(BulkPoint::new(1.6, vec![0.0, 0.0, 1.0], 0.0).is_err());
        assert!(BulkPoint::new(0.0, vec![0.0, 0.0, 1.1], 0.0).is_err());
        assert!(BulkPoint::new(0.0, vec![0.0, 0.0, 1.0], -0.1).is_err());
        assert!(BulkPoint::new(FRAC_PI_2 - 1e-8, vec![0.0, 0.0, 1.0], 0.0).is_err());
        assert!(BulkPoint::new(FRAC_PI_2 - 1e-8, vec![0.0, 0.0, 1.0], 1e-7).is_ok());
        assert!(NullDirection::new(0.0, vec![1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn epsilon_floor_values() {
        assert!((epsilon_floor(0.0) - FRAC_PI_2 / 10.0).abs() < 1e-15);
        assert_eq!(epsilon_floor(FRAC_PI_2 - 1e-9), CHART_MARGIN);
    }

    fn unit_strategy(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, d)
            .prop_filter("nonzero", |v| dot(v, v) > 1e-2)
            .prop_map(|v| normalized(&v).unwrap())
    }

    proptest! {
        #[test]
        fn hyperboloid_constraint(rho in -1.5f64..1.5, u in unit_strategy(4), radius in 0.1f64..10.0) {
            let pr = PrincipalParams::new(4, radius, 1.0).unwrap();
            let x = embed(&BulkPoint::new(rho, u, 0.0).unwrap(), &pr).unwrap();
            let s = minkowski_dot(&x, &x);
            prop_assert!((s.re + radius * radius).abs() <= 1e-12 * radius * radius * (1.0 / rho.cos().powi(2)));
            prop_assert_eq!(s.im, 0.0);
        }

        #[test]
        fn complex_constraint_and_backward_tube(rho in -1.4f64..1.4, eps in 1e-4f64..0.5, u in unit_strategy(3)) {
            let x = embed(&BulkPoint::new(rho, u, eps).unwrap(), &params()).unwrap();
            let re: Vec<Complex64> = x.iter().map(|z| c(z.re, 0.0)).collect();
            let im: Vec<Complex64> = x.iter().map(|z| c(z.im, 0.0)).collect();
            let scale = 1.0 / (rho.cos() * rho.cos()).min(1.0);
            let constraint = minkowski_dot(&re, &re) - minkowski_dot(&im, &im);
            prop_assert!((constraint.re + 1.0).abs() < 1e-9 * scale * scale);
            prop_assert!(minkowski_dot(&re, &im).re.abs() < 1e-9 * scale * scale);
            prop_assert!(minkowski_dot(&im, &im).re > 0.0);
            prop_assert!(im[0].re < 0.0);
        }

        #[test]
        fn conformal_dot_matches_embedding(rho in -1.4f64..1.4, eps in 0.0f64..0.3, xi0 in 0.1f64..10.0,
                                           u in unit_strategy(3), v in unit_strategy(3)) {
            let pr = params();
            let p = BulkPoint::new(rho, u, eps).unwrap();
            let xi = NullDirection::new(xi0, v).unwrap();
            let x = embed(&p, &pr).unwrap();
            let xic: Vec<Complex64> = xi.components().into_iter().map(|z| c(z, 0.0)).collect();
            let direct = minkowski_dot(&x, &xic) / pr.radius;
            let chart = conformal_dot(&p, &xi, &pr).unwrap();
            let rt = p.rho_tilde();
            let r = Complex64::i() * (-Complex64::i() * rt).exp();
            let t = dot(&p.u, &xi.v);
            let generating = xi0 * (Complex64::i() * rt).exp() / (2.0 * Complex64::i() * rt.cos()) * (1.0 + r * r - 2.0 * r * t);
            let scale = direct.norm().max(1e-3 * xi0);
            prop_assert!((direct - chart).norm() <= 1e-10 * scale);
            prop_assert!((generating - chart).norm() <= 1e-10 * scale);
            if eps > 0.0 {
                prop_assert!(chart.im < 0.0);
            }
        }
    }
}

//! Plane waves, bulk modes and boundary modes of a principal-series field.
//!
//! A bulk mode factorizes as `Φ_{Ll}(ρ̃, u) = f_L(ρ̃) Y_{Ll}(u)` with
//!
//! ```text
//! f_L(ρ̃) = i^{L-τ} e^{-i(L-τ)ρ̃} (2 cos ρ̃)^{-τ} Γ(L-τ) / (Γ(L+d/2) Γ(-τ))
//!          · ₂F₁(L-τ, -τ-d/2+1; L+d/2; -e^{-2iρ̃})
//! ```
//!
//! All complex powers use the principal logarithm; `i^{L-τ} = exp((L-τ) iπ/2)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{conformal_dot, BoundaryPoint, BulkPoint, NullDirection, PrincipalParams};
use crate::specfun::gamma::{complex_gamma, gamma_ratio, ln_gamma, recip_gamma};
use crate::specfun::harmonics::{harmonics_up_to, hyperspherical_y, HarmonicIndex};
use crate::specfun::hyp2f1::{hyp2f1, hyp2f1_dz, HypergeometricParams};

fn i() -> Complex64 {
    Complex64::i()
}

/// Principal power `w^s = exp(s Log w)`.
pub fn principal_pow(w: Complex64, s: Complex64) -> Complex64 {
    (s * w.ln()).exp()
}

/// The plane wave `(x·ξ/R)^τ`.
///
/// With ε = 0 the base is real; a non-positive base has no prescription and is rejected.
pub fn plane_wave(p: &BulkPoint, xi: &NullDirection, params: &PrincipalParams) -> Result<Complex64> {
    let base = conformal_dot(p, xi, params)?;
    if p.epsilon == 0.0 && base.re <= 0.0 && base.im == 0.0 {
        return Err(Error::BranchCut(format!("x·ξ/R = {base} at epsilon = 0")));
    }
    Ok(principal_pow(base, params.tau()))
}

/// Radial factor `f_L` of the bulk modes of degree `L`, with its Gamma prefactors cached.
#[derive(Debug, Clone, Copy)]
pub struct RadialMode {
    pub params: PrincipalParams,
    pub degree: usize,
    hyp: HypergeometricParams,
    gamma_factor: Complex64,
}

impl RadialMode {
    pub fn new(params: PrincipalParams, degree: usize) -> Result<Self> {
        let tau = params.tau();
        let half_d = params.d as f64 / 2.0;
        let lf = degree as f64;
        let a = lf - tau;
        let hyp = HypergeometricParams::new(a, -tau - half_d + 1.0, Complex64::new(lf + half_d, 0.0))?;
        // Γ(L-τ)/Γ(-τ) is a finite Pochhammer product; 1/Γ(L+d/2) is real and positive
        let gamma_factor = gamma_ratio(a, -tau)? * recip_gamma(Complex64::new(lf + half_d, 0.0));
        Ok(Self { params, degree, hyp, gamma_factor })
    }

    fn prefactor(&self, rt: Complex64) -> Complex64 {
        let s = self.degree as f64 - self.params.tau();
        (s * i() * FRAC_PI_2 - i() * s * rt).exp() * principal_pow(2.0 * rt.cos(), -self.params.tau())
    }

    /// `-e^{-2iρ̃}`.
    pub fn argument(rt: Complex64) -> Complex64 {
        -(-2.0 * i() * rt).exp()
    }

    pub fn value(&self, rt: Complex64) -> Result<Complex64> {
        let f = hyp2f1(&self.hyp, Self::argument(rt))?;
        Ok(self.prefactor(rt) * self.gamma_factor * f)
    }

    /// `(f_L, ∂_ρ f_L)` at `ρ̃`.
    pub fn value_and_drho(&self, rt: Complex64) -> Result<(Complex64, Complex64)> {
        let z = Self::argument(rt);
        let f = hyp2f1(&self.hyp, z)?;
        let df = hyp2f1_dz(&self.hyp, z)?;
        let pg = self.prefactor(rt) * self.gamma_factor;
        let tau = self.params.tau();
        let log_deriv = -i() * (self.degree as f64 - tau) + tau * rt.tan();
        Ok((pg * f, pg * (log_deriv * f - 2.0 * i() * z * df)))
    }
}

/// Bulk mode `Φ_{Ll}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BulkMode {
    pub params: PrincipalParams,
    pub idx: HarmonicIndex,
}

impl BulkMode {
    pub fn new(params: PrincipalParams, idx: HarmonicIndex) -> Result<Self> {
        idx.validate(params.d)?;
        Ok(Self { params, idx })
    }

    pub fn radial(&self) -> Result<RadialMode> {
        RadialMode::new(self.params, self.idx.degree)
    }
}

pub fn bulk_mode_eval(m: &BulkMode, p: &BulkPoint) -> Result<Complex64> {
    let y = hyperspherical_y(m.params.d, &m.idx, &p.u)?;
    Ok(m.radial()?.value(p.rho_tilde())? * y)
}

/// `∂_ρ Φ_{Ll}` at a (possibly shifted) bulk point.
pub fn bulk_mode_drho(m: &BulkMode, p: &BulkPoint) -> Result<Complex64> {
    let y = hyperspherical_y(m.params.d, &m.idx, &p.u)?;
    Ok(m.radial()?.value_and_drho(p.rho_tilde())?.1 * y)
}

/// Truncation of the plane-wave expansion `2π^{d/2} (ξ⁰)^τ Σ_{L<=Lmax} Σ_l Φ_{Ll}(x) Y*_{Ll}(v)`.
pub fn expansion_partial_sum(
    p: &BulkPoint,
    xi: &NullDirection,
    params: &PrincipalParams,
    lmax: usize,
) -> Result<Complex64> {
    let yu = harmonics_up_to(params.d, lmax, &p.u)?;
    let yv = harmonics_up_to(params.d, lmax, &xi.v)?;
    let rt = p.rho_tilde();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut offset = 0;
    for degree in 0..=lmax {
        let count = crate::specfun::harmonics::harmonic_count(params.d, degree);
        let angular: Complex64 = (offset..offset + count).map(|k| yu[k] * yv[k].conj()).sum();
        offset += count;
        sum += RadialMode::new(*params, degree)?.value(rt)? * angular;
    }
    let pref = 2.0 * PI.powf(params.d as f64 / 2.0) * principal_pow(Complex64::new(xi.xi0, 0.0), params.tau());
    Ok(pref * sum)
}

/// Relative residual `|wave - truncated expansion| / |wave|`.
pub fn expansion_residual(p: &BulkPoint, xi: &NullDirection, params: &PrincipalParams, lmax: usize) -> Result<f64> {
    if p.epsilon <= 0.0 {
        return Err(Error::Domain("the expansion needs epsilon > 0 to converge".into()));
    }
    let wave = plane_wave(p, xi, params)?;
    let series = expansion_partial_sum(p, xi, params, lmax)?;
    Ok((wave - series).norm() / wave.norm())
}

/// Scale, phase and regularization factors that turn `f_L` into its boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFactors {
    pub scale: Complex64,
    pub phase: Complex64,
    pub regularization: Complex64,
}

impl BoundaryFactors {
    pub fn product(&self) -> Complex64 {
        self.scale * self.phase * self.regularization
    }
}

/// `F_s = (2cos ρ̃)^τ Γ(-τ)Γ(τ+d/2)`, `F_p = Γ(L+(d-1)/2-iν)/Γ(L+(d-1)/2+iν)`, `F_r = 1/Γ(-2iν)`.
pub fn boundary_factors(params: &PrincipalParams, degree: usize, rho: f64, epsilon: f64) -> Result<BoundaryFactors> {
    let tau = params.tau();
    let nu = params.nu;
    let regularization_arg = Complex64::new(0.0, -2.0 * nu);
    let regularization = complex_gamma(regularization_arg)
        .map(|g| 1.0 / g)
        .map_err(|_| Error::Pole(format!("Gamma(-2i nu) at nu = {nu}")))?;
    let rt = Complex64::new(rho, -epsilon);
    let half_d = params.d as f64 / 2.0;
    let scale = principal_pow(2.0 * rt.cos(), tau) * complex_gamma(-tau)? * complex_gamma(tau + half_d)?;
    let h = degree as f64 + (params.d as f64 - 1.0) / 2.0;
    let phase = (ln_gamma(Complex64::new(h, -nu))? - ln_gamma(Complex64::new(h, nu))?).exp();
    Ok(BoundaryFactors { scale, phase, regularization })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundarySide {
    Future,
    Past,
}

/// Boundary mode on the future or past sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMode {
    pub params: PrincipalParams,
    pub idx: HarmonicIndex,
    pub side: BoundarySide,
}

/// The boundary mode is the harmonic itself on either sphere.
pub fn boundary_mode_eval(m: &BoundaryMode, b: &BoundaryPoint) -> Result<Complex64> {
    hyperspherical_y(m.params.d, &m.idx, &b.u)
}

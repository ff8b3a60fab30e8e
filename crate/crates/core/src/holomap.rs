//! The bulk/boundary kernel, the transform pair between bulk modes and boundary
//! harmonics, and the limits of the modes at the future and past boundary spheres.
//!
//! The kernel has two independent representations: the closed form
//! `𝔎(x,u) = (x·ξ/R)^τ / (2π^{d/2} (ξ⁰)^τ)` with `ξ = ξ⁰(1, u)`, and the truncated series
//! `Σ_{L<=Lmax} Σ_l Φ_{Ll}(x) Y*_{Ll}(u)`. Checks that go through the series collapse by
//! orthonormality; the closed form is the nontrivial path.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{conformal_dot_raw, dot, BoundaryPoint, BulkPoint, PrincipalParams};
use crate::modes::{boundary_factors, principal_pow, BoundarySide, BulkMode, RadialMode};
use crate::quadrature::{kg_inner, BulkField, CauchySlice, CompensatedSum, KgNormalization, SphereGrid};
use crate::richardson::{extrapolate, extrapolate_with_estimate, integer_ladder, oscillatory_ladder};
use crate::specfun::harmonics::{harmonic_count, harmonics_up_to, hyperspherical_y, HarmonicIndex};
use crate::tolerance;

/// Closed-form kernel and its `ρ` derivative at `(ρ̃, t = u_x·u)`.
///
/// Only the backward tube (`Im ρ̃ <= 0`) is supported.
pub fn kernel_closed_form(
    params: &PrincipalParams,
    rho_tilde: Complex64,
    t: f64,
    xi0: f64,
) -> Result<(Complex64, Complex64)> {
    if rho_tilde.im > 0.0 {
        return Err(Error::Domain(format!("kernel requested at rho~ = {rho_tilde}, outside the backward tube")));
    }
    let base = conformal_dot_raw(rho_tilde, t, xi0);
    if rho_tilde.im == 0.0 && base.re <= 0.0 {
        return Err(Error::BranchCut(format!("x·ξ/R = {base} on the real slice")));
    }
    let tau = params.tau();
    let norm = 2.0 * PI.powf(params.d as f64 / 2.0) * principal_pow(Complex64::new(xi0, 0.0), tau);
    let value = principal_pow(base, tau) / norm;
    let dbase = xi0 * (1.0 - t * rho_tilde.sin()) / (rho_tilde.cos() * rho_tilde.cos());
    Ok((value, tau * value / base * dbase))
}

/// `𝔎(x, u)` from the closed form with `ξ⁰ = 1`.
pub fn kernel_direct(p: &BulkPoint, b: &BoundaryPoint, params: &PrincipalParams) -> Result<Complex64> {
    kernel_direct_scaled(p, b, params, 1.0)
}

/// `𝔎(x, u)` from the closed form with an explicit `ξ⁰`; the result does not depend on it.
pub fn kernel_direct_scaled(p: &BulkPoint, b: &BoundaryPoint, params: &PrincipalParams, xi0: f64) -> Result<Complex64> {
    check_dims(params, &p.u)?;
    check_dims(params, &b.u)?;
    Ok(kernel_closed_form(params, p.rho_tilde(), dot(&p.u, &b.u), xi0)?.0)
}

fn check_dims(params: &PrincipalParams, u: &[f64]) -> Result<()> {
    if u.len() != params.d {
        return Err(Error::GridMismatch { grid: u.len(), expected: params.d });
    }
    Ok(())
}

/// Grid for integrating the closed-form kernel read at `ρ̃` against band-limited functions,
/// in the frame whose polar axis is the kernel's other point.
///
/// The kernel is singular where `u_d = sin ρ̃`, so the polar rule is graded toward that
/// point. `azimuth_n` must exceed the harmonic degree being projected.
pub fn kernel_grid(d: usize, rho_tilde: Complex64, per_panel: usize, azimuth_n: usize) -> Result<SphereGrid> {
    let t = rho_tilde.sin();
    SphereGrid::graded(d, t.re, t.im.abs().max(1e-6), per_panel, azimuth_n)
}

/// Series representation of the kernel, truncated at `lmax`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub params: PrincipalParams,
    pub lmax: usize,
}

pub fn kernel_series(p: &BulkPoint, b: &BoundaryPoint, k: &KernelEval) -> Result<Complex64> {
    let field = KernelField::new(k.params, b.u.clone(), KernelPath::Series { lmax: k.lmax })?;
    Ok(field.eval(p.rho_tilde(), &p.u)?.0)
}

/// Which representation of the kernel a transform uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum KernelPath {
    Series { lmax: usize },
    Direct,
}

/// The kernel as a bulk field `x ↦ 𝔎(x, u)` at fixed boundary point `u`.
pub struct KernelField {
    params: PrincipalParams,
    u: Vec<f64>,
    path: KernelPath,
    radial: Vec<RadialMode>,
    conj_harmonics: Vec<Complex64>,
}

impl KernelField {
    pub fn new(params: PrincipalParams, u: Vec<f64>, path: KernelPath) -> Result<Self> {
        check_dims(&params, &u)?;
        let (radial, conj_harmonics) = match path {
            KernelPath::Series { lmax } => (
                (0..=lmax).map(|l| RadialMode::new(params, l)).collect::<Result<Vec<_>>>()?,
                harmonics_up_to(params.d, lmax, &u)?.into_iter().map(|y| y.conj()).collect(),
            ),
            KernelPath::Direct => (Vec::new(), Vec::new()),
        };
        Ok(Self { params, u, path, radial, conj_harmonics })
    }
}

impl BulkField for KernelField {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn eval(&self, rho_tilde: Complex64, ux: &[f64]) -> Result<(Complex64, Complex64)> {
        match self.path {
            KernelPath::Direct => kernel_closed_form(&self.params, rho_tilde, dot(ux, &self.u), 1.0),
            KernelPath::Series { lmax } => {
                let y = harmonics_up_to(self.params.d, lmax, ux)?;
                let (mut v, mut dv) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                let mut offset = 0;
                for (degree, radial) in self.radial.iter().enumerate() {
                    let n = harmonic_count(self.params.d, degree);
                    let angular: Complex64 = (offset..offset + n).map(|k| y[k] * self.conj_harmonics[k]).sum();
                    offset += n;
                    let (f, df) = radial.value_and_drho(rho_tilde)?;
                    v += f * angular;
                    dv += df * angular;
                }
                Ok((v, dv))
            }
        }
    }
}

/// Bulk-from-boundary transform: `∫ 𝔎(x, u) Y_{Ll}(u) dμ(u)`, which should equal `Φ_{Ll}(x)`.
///
/// The grid is aligned with `u_x` so the ring where the closed-form kernel peaks is
/// resolved by the polar rule.
pub fn transform_f1(
    idx: &HarmonicIndex,
    p: &BulkPoint,
    params: &PrincipalParams,
    grid: &SphereGrid,
    path: KernelPath,
) -> Result<Complex64> {
    check_dims(params, &p.u)?;
    idx.validate(params.d)?;
    let grid = grid.aligned(&p.u)?;
    let rt = p.rho_tilde();
    let series = match path {
        KernelPath::Series { lmax } => {
            Some((lmax, (0..=lmax).map(|l| RadialMode::new(*params, l)?.value(rt)).collect::<Result<Vec<_>>>()?))
        }
        KernelPath::Direct => None,
    };
    let yx = match &series {
        Some((lmax, _)) => harmonics_up_to(params.d, *lmax, &p.u)?,
        None => Vec::new(),
    };
    let mut s = CompensatedSum::default();
    for (u, w) in grid.nodes.iter().zip(&grid.weights) {
        let k = match &series {
            None => kernel_closed_form(params, rt, dot(&p.u, u), 1.0)?.0,
            Some((lmax, radial)) => {
                let yu = harmonics_up_to(params.d, *lmax, u)?;
                let mut acc = Complex64::new(0.0, 0.0);
                let mut offset = 0;
                for (degree, f) in radial.iter().enumerate() {
                    let n = harmonic_count(params.d, degree);
                    let angular: Complex64 = (offset..offset + n).map(|j| yx[j] * yu[j].conj()).sum();
                    offset += n;
                    acc += f * angular;
                }
                acc
            }
        };
        s.add(*w * k * hyperspherical_y(params.d, idx, u)?);
    }
    Ok(s.value())
}

/// Boundary-from-bulk transform: `⟨𝔎(·, u), Φ_{Ll}⟩_KG`, which should equal `Y_{Ll}(u)`.
///
/// The closed-form kernel needs a slice with `Im s > 0` so that it is read in the backward
/// tube at `conj(s)`; the series kernel works on any slice, including the waist.
pub fn transform_f2(
    idx: &HarmonicIndex,
    b: &BoundaryPoint,
    params: &PrincipalParams,
    grid: &SphereGrid,
    path: KernelPath,
    norm: KgNormalization,
    slice: CauchySlice,
) -> Result<Complex64> {
    check_dims(params, &b.u)?;
    let mode = BulkMode::new(*params, idx.clone())?;
    let kernel = KernelField::new(*params, b.u.clone(), path)?;
    kg_inner(&kernel, &mode, norm, &grid.aligned(&b.u)?, slice)
}

/// Sampling schedule for boundary limits: `ρ = ±(π/2 - δ)`, `ε = epsilon_ratio · δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitOptions {
    pub deltas: Vec<f64>,
    pub epsilon_ratio: f64,
    /// Relative stabilization tolerance of the extrapolated value.
    pub tolerance: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            deltas: (0..tolerance::LIMIT_LEVELS).map(|k| tolerance::LIMIT_DELTA0 * 0.5f64.powi(k as i32)).collect(),
            epsilon_ratio: 0.1,
            tolerance: tolerance::LIMIT_STABILIZATION,
        }
    }
}

/// Extrapolated boundary value of `F_s F_p F_r f_L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialLimit {
    pub value: Complex64,
    pub error_estimate: f64,
    /// Same samples extrapolated with integer exponents only, for comparison.
    pub integer_ladder_value: Complex64,
    pub deltas: Vec<f64>,
    pub samples: Vec<Complex64>,
}

pub fn radial_boundary_limit(
    params: &PrincipalParams,
    degree: usize,
    side: BoundarySide,
    opts: &LimitOptions,
) -> Result<RadialLimit> {
    if opts.deltas.len() < 2 {
        return Err(Error::Extrapolation("need at least two deltas".into()));
    }
    let radial = RadialMode::new(*params, degree)?;
    let sign = match side {
        BoundarySide::Future => 1.0,
        BoundarySide::Past => -1.0,
    };
    let samples = opts
        .deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0 && delta < FRAC_PI_2) {
                return Err(Error::Extrapolation(format!("delta = {delta} outside (0, pi/2)")));
            }
            let rho = sign * (FRAC_PI_2 - delta);
            let eps = opts.epsilon_ratio * delta;
            let bf = boundary_factors(params, degree, rho, eps)?;
            Ok(bf.product() * radial.value(Complex64::new(rho, -eps))?)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = samples.len();
    let est = extrapolate_with_estimate(&opts.deltas, &samples, &oscillatory_ladder(params.nu, n - 1))?;
    let integer_ladder_value = extrapolate(&opts.deltas, &samples, &integer_ladder(n - 1))?;
    let rel = est.error_estimate / est.value.norm();
    if !(rel <= opts.tolerance) {
        return Err(Error::Extrapolation(format!(
            "relative change {rel:.3e} between the last two extrapolants exceeds {:.1e}",
            opts.tolerance
        )));
    }
    Ok(RadialLimit {
        value: est.value,
        error_estimate: est.error_estimate,
        integer_ladder_value,
        deltas: opts.deltas.clone(),
        samples,
    })
}

/// Limit of `F_s F_p F_r Φ_{Ll}` at the future sphere; should equal `Y_{Ll}(u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLimit {
    pub value: Complex64,
    pub harmonic: Complex64,
    pub radial: RadialLimit,
}

pub fn boundary_limit(
    idx: &HarmonicIndex,
    b: &BoundaryPoint,
    params: &PrincipalParams,
    opts: &LimitOptions,
) -> Result<BoundaryLimit> {
    check_dims(params, &b.u)?;
    let harmonic = hyperspherical_y(params.d, idx, &b.u)?;
    let radial = radial_boundary_limit(params, idx.degree, BoundarySide::Future, opts)?;
    Ok(BoundaryLimit { value: radial.value * harmonic, harmonic, radial })
}

/// Limit at the past sphere, `e^{-iπτ} (-1)^L Y_{Ll}(u) = e^{-iπτ} Y_{Ll}(-u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PastBoundaryLimit {
    /// Extrapolated `lim F_s F_p F_r Φ_{Ll}(ρ, u)` as `ρ → -π/2`.
    pub limit: Complex64,
    /// `limit / Y_{Ll}(-u)`, read off the radial factor so it does not depend on `u`.
    pub phase: Complex64,
    /// `e^{-iπτ}`.
    pub expected_phase: Complex64,
    /// `limit / e^{-iπτ}`: the past boundary mode with the phase removed.
    pub phase_stripped: Complex64,
    pub radial: RadialLimit,
}

pub fn past_boundary_limit(
    idx: &HarmonicIndex,
    b: &BoundaryPoint,
    params: &PrincipalParams,
    opts: &LimitOptions,
) -> Result<PastBoundaryLimit> {
    check_dims(params, &b.u)?;
    let harmonic = hyperspherical_y(params.d, idx, &b.u)?;
    let radial = radial_boundary_limit(params, idx.degree, BoundarySide::Past, opts)?;
    let parity = if idx.degree.is_multiple_of(2) { 1.0 } else { -1.0 };
    let expected_phase = past_phase(params);
    let limit = radial.value * harmonic;
    Ok(PastBoundaryLimit {
        limit,
        phase: parity * radial.value,
        expected_phase,
        phase_stripped: limit / expected_phase,
        radial,
    })
}

/// `e^{-iπτ}`, whose modulus is `e^{-πν}`.
pub fn past_phase(params: &PrincipalParams) -> Complex64 {
    (-Complex64::i() * PI * params.tau()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::normalized;
    use crate::modes::bulk_mode_eval;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params() -> PrincipalParams {
        PrincipalParams::unit(3, 1.0).unwrap()
    }

    fn idx(degree: usize, m: i64) -> HarmonicIndex {
        HarmonicIndex::new(3, degree, vec![m]).unwrap()
    }

    #[test]
    fn kernel_golden() {
        let p = BulkPoint::new(0.3, vec![0.0, 0.0, 1.0], 1e-3).unwrap();
        let b = BoundaryPoint::new(vec![0.0, 0.75f64.sqrt(), 0.5]).unwrap();
        let k = kernel_direct(&p, &b, &params()).unwrap();
        let want = c(-0.000_611_208_049_019_583_25, -0.018_197_866_908_803_92);
        assert!((k - want).norm() < 1e-15, "{k}");
        let k7 = kernel_direct_scaled(&p, &b, &params(), 7.0).unwrap();
        assert!((k7 - k).norm() < 1e-12 * k.norm());
    }

    #[test]
    fn kernel_at_waist() {
        let p = BulkPoint::new(0.0, vec![0.0, 0.0, 1.0], 0.0).unwrap();
        let b = BoundaryPoint::new(vec![0.0, 0.6, -0.8]).unwrap();
        let k = kernel_direct(&p, &b, &params()).unwrap();
        let want = principal_pow(c(0.8, 0.0), params().tau()) / (2.0 * PI.powf(1.5));
        assert!((k - want).norm() < 1e-15);
        let forward = kernel_closed_form(&params(), c(0.1, 0.01), 0.3, 1.0);
        assert!(matches!(forward, Err(Error::Domain(_))));
    }

    #[test]
    fn kernel_series_approaches_closed_form() {
        let u = normalized(&[0.3, -0.5, 0.8]).unwrap();
        let p = BulkPoint::new(0.4, u, 0.1).unwrap();
        let b = BoundaryPoint::new(normalized(&[-0.2, 0.1, 0.9]).unwrap()).unwrap();
        let direct = kernel_direct(&p, &b, &params()).unwrap();
        let mut prev = f64::INFINITY;
        for lmax in [5, 10, 20, 30] {
            let s = kernel_series(&p, &b, &KernelEval { params: params(), lmax }).unwrap();
            let r = (s - direct).norm() / direct.norm();
            assert!(r < prev, "Lmax={lmax}: {r}");
            prev = r;
        }
        let s0 = kernel_series(&p, &b, &KernelEval { params: params(), lmax: 0 }).unwrap();
        let phi00 = bulk_mode_eval(&BulkMode::new(params(), idx(0, 0)).unwrap(), &p).unwrap();
        assert!((s0 - phi00 / (4.0 * PI).sqrt()).norm() < 1e-14);
    }

    #[test]
    fn f1_series_collapses_and_truncates() {
        let grid = SphereGrid::build(3, 16).unwrap();
        let p = BulkPoint::new(0.2, normalized(&[0.1, 0.7, -0.3]).unwrap(), 0.05).unwrap();
        let want = bulk_mode_eval(&BulkMode::new(params(), idx(2, -1)).unwrap(), &p).unwrap();
        let got = transform_f1(&idx(2, -1), &p, &params(), &grid, KernelPath::Series { lmax: 4 }).unwrap();
        assert!((got - want).norm() < 1e-10 * want.norm());
        let beyond = transform_f1(&idx(5, 0), &p, &params(), &grid, KernelPath::Series { lmax: 4 }).unwrap();
        assert!(beyond.norm() < 1e-12);
    }

    #[test]
    fn f1_closed_form_recovers_mode() {
        let p = BulkPoint::new(-0.5, normalized(&[0.4, 0.2, 0.6]).unwrap(), 0.05).unwrap();
        let grid = kernel_grid(3, p.rho_tilde(), 20, 16).unwrap();
        for (degree, m) in [(0, 0), (1, 1), (3, -2)] {
            let want = bulk_mode_eval(&BulkMode::new(params(), idx(degree, m)).unwrap(), &p).unwrap();
            let got = transform_f1(&idx(degree, m), &p, &params(), &grid, KernelPath::Direct).unwrap();
            assert!((got - want).norm() < 1e-9 * want.norm(), "L={degree}: {got} vs {want}");
        }
    }

    #[test]
    fn f2_recovers_harmonic() {
        let pr = params();
        let norm = KgNormalization::unit_gram(&pr).unwrap();
        let b = BoundaryPoint::new(normalized(&[0.5, -0.5, 0.3]).unwrap()).unwrap();
        let fine = kernel_grid(3, c(0.0, -0.05), 20, 16).unwrap();
        let coarse = SphereGrid::build(3, 12).unwrap();
        for (degree, m) in [(0, 0), (2, 1), (3, -3)] {
            let want = hyperspherical_y(3, &idx(degree, m), &b.u).unwrap();
            let direct =
                transform_f2(&idx(degree, m), &b, &pr, &fine, KernelPath::Direct, norm, CauchySlice::shifted(0.05))
                    .unwrap();
            assert!((direct - want).norm() < 1e-9, "L={degree}: {direct} vs {want}");
            let series = transform_f2(
                &idx(degree, m),
                &b,
                &pr,
                &coarse,
                KernelPath::Series { lmax: 4 },
                norm,
                CauchySlice::waist(),
            )
            .unwrap();
            assert!((series - want).norm() < 1e-9);
        }
        let waist = transform_f2(&idx(1, 0), &b, &pr, &fine, KernelPath::Direct, norm, CauchySlice::waist());
        assert!(matches!(waist, Err(Error::BranchCut(_))));
    }

    #[test]
    fn future_limit_is_the_harmonic() {
        let b = BoundaryPoint::new(normalized(&[0.3, 0.3, -0.9]).unwrap()).unwrap();
        for degree in 0..=3 {
            let i = idx(degree, 0);
            let lim = boundary_limit(&i, &b, &params(), &LimitOptions::default()).unwrap();
            assert!((lim.radial.value - 1.0).norm() < 1e-5, "L={degree}: {}", lim.radial.value);
            // the integer ladder misses the oscillating term
            assert!((lim.radial.integer_ladder_value - 1.0).norm() > 1e-5);
        }
    }

    #[test]
    fn past_limit_phase() {
        let pr = params();
        let b = BoundaryPoint::new(normalized(&[0.1, -0.4, 0.5]).unwrap()).unwrap();
        let lim = past_boundary_limit(&idx(1, 0), &b, &pr, &LimitOptions::default()).unwrap();
        assert!((lim.expected_phase.norm() - (-PI).exp()).abs() < 1e-15);
        assert!((lim.phase - lim.expected_phase).norm() < 1e-4 * lim.expected_phase.norm());
    }

    #[test]
    fn too_few_levels_do_not_stabilize() {
        let opts = LimitOptions { deltas: vec![0.2, 0.1, 0.05], ..LimitOptions::default() };
        let r = radial_boundary_limit(&params(), 2, BoundarySide::Past, &opts);
        assert!(matches!(r, Err(Error::Extrapolation(_))));
    }
}

//! Product quadrature on S^{d-1} and the two inner products of the correspondence.
//!
//! * `d = 3`: Gauss–Legendre in `cos θ` × uniform azimuth.
//! * `d = 4`: Gauss–Chebyshev (second kind) in `cos χ` × the `d = 3` rule on the ω-sphere,
//!   using `u = (sin χ ω, cos χ)` and `dμ = sin²χ dχ dω`.
//!
//! A grid declared exact to degree `D` integrates every polynomial of degree `<= D`
//! in the Cartesian components of `u` exactly (up to rounding).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PrincipalParams;
use crate::modes::BulkMode;
use crate::specfun::gamma::complex_gamma;
use crate::specfun::harmonics::{harmonics_up_to, hyperspherical_y, sphere_area};

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss rule for the weight `sqrt(1 - x²)` on [-1, 1], exact to degree `2n - 1`.
pub fn gauss_chebyshev_u(n: usize) -> (Vec<f64>, Vec<f64>) {
    let h = PI / (n as f64 + 1.0);
    (1..=n)
        .rev()
        .map(|k| {
            let a = k as f64 * h;
            (a.cos(), h * a.sin() * a.sin())
        })
        .unzip()
}

/// Quadrature nodes on S^{d-1} with a declared polynomial exactness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereGrid {
    pub d: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub exactness_degree: usize,
}

impl SphereGrid {
    /// Smallest product grid exact to `exactness_degree`.
    pub fn build(d: usize, exactness_degree: usize) -> Result<Self> {
        let polar = exactness_degree / 2 + 1;
        let azimuth = exactness_degree + 1;
        Self::product(d, polar, azimuth + azimuth % 2)
    }

    /// Product grid with `polar_n` nodes per polar variable and `azimuth_n` azimuthal nodes.
    pub fn product(d: usize, polar_n: usize, azimuth_n: usize) -> Result<Self> {
        if polar_n == 0 || azimuth_n == 0 {
            return Err(Error::InvalidParams("grid sizes must be positive".into()));
        }
        let exactness_degree = (2 * polar_n - 1).min(azimuth_n - 1);
        let (ct, wt) = gauss_legendre(polar_n);
        let dphi = 2.0 * PI / azimuth_n as f64;
        let mut s2 = Vec::with_capacity(polar_n * azimuth_n);
        let mut s2w = Vec::with_capacity(polar_n * azimuth_n);
        for (c, w) in ct.iter().zip(&wt) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for k in 0..azimuth_n {
                let phi = (k as f64 + 0.5) * dphi;
                s2.push(vec![s * phi.cos(), s * phi.sin(), *c]);
                s2w.push(w * dphi);
            }
        }
        match d {
            3 => Ok(Self { d, nodes: s2, weights: s2w, exactness_degree }),
            4 => {
                let (cx, wx) = gauss_chebyshev_u(polar_n);
                let mut nodes = Vec::with_capacity(polar_n * s2.len());
                let mut weights = Vec::with_capacity(polar_n * s2.len());
                for (c, w) in cx.iter().zip(&wx) {
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    for (om, wo) in s2.iter().zip(&s2w) {
                        nodes.push(vec![s * om[0], s * om[1], s * om[2], *c]);
                        weights.push(w * wo);
                    }
                }
                Ok(Self { d, nodes, weights, exactness_degree })
            }
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Product grid whose polar rule is graded toward the polar value `center`.
    ///
    /// Meant for integrands with a singularity at complex distance `half_width` from
    /// `u_d = center`. Panels double in width away from `[center - w, center + w]`, and each
    /// carries `per_panel` Gauss–Legendre nodes. For `d = 3` the panels live in `u_d` itself,
    /// so the grid keeps polynomial exactness `min(2 per_panel - 1, azimuth_n - 1)`. For
    /// `d = 4` they live in the angle `χ = acos u_d` with weight `sin²χ`, which is not
    /// polynomial-exact; such grids declare exactness 0.
    pub fn graded(d: usize, center: f64, half_width: f64, per_panel: usize, azimuth_n: usize) -> Result<Self> {
        if per_panel == 0 || azimuth_n == 0 || !(half_width > 0.0) || !center.is_finite() {
            return Err(Error::InvalidParams("graded grid needs positive sizes and width".into()));
        }
        let (lo, hi, c, w) = match d {
            3 => (-1.0, 1.0, center.clamp(-1.0, 1.0), half_width),
            4 => {
                let chi = center.clamp(-1.0, 1.0).acos();
                let w = (half_width / chi.sin().max(half_width.sqrt())).min(PI / 4.0);
                (0.0, PI, chi, w)
            }
            _ => return Err(Error::UnsupportedDimension(d)),
        };
        let mut cuts = vec![(c - w).max(lo), (c + w).min(hi)];
        let mut step = 2.0 * w;
        while cuts[cuts.len() - 1] < hi {
            let next = (cuts[cuts.len() - 1] + step).min(hi);
            cuts.push(next);
            step *= 2.0;
        }
        step = 2.0 * w;
        while cuts[0] > lo {
            let next = (cuts[0] - step).max(lo);
            cuts.insert(0, next);
            step *= 2.0;
        }
        cuts.dedup();
        let (gx, gw) = gauss_legendre(per_panel);
        let mut polar = Vec::new();
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue;
            }
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            for (x, wx) in gx.iter().zip(&gw) {
                let v = mid + half * x;
                match d {
                    3 => polar.push((v, half * wx)),
                    _ => polar.push((v.cos(), half * wx * v.sin() * v.sin())),
                }
            }
        }
        let (s2, s2w) = match d {
            3 => (Vec::new(), Vec::new()),
            _ => {
                let base = Self::product(3, azimuth_n / 2 + 1, azimuth_n)?;
                (base.nodes, base.weights)
            }
        };
        let dphi = 2.0 * PI / azimuth_n as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (t, wt) in polar {
            let s = (1.0 - t * t).max(0.0).sqrt();
            if d == 3 {
                for k in 0..azimuth_n {
                    let phi = (k as f64 + 0.5) * dphi;
                    nodes.push(vec![s * phi.cos(), s * phi.sin(), t]);
                    weights.push(wt * dphi);
                }
            } else {
                for (om, wo) in s2.iter().zip(&s2w) {
                    nodes.push(vec![s * om[0], s * om[1], s * om[2], t]);
                    weights.push(wt * wo);
                }
            }
        }
        let exactness_degree = if d == 3 { (2 * per_panel - 1).min(azimuth_n - 1) } else { 0 };
        Ok(Self { d, nodes, weights, exactness_degree })
    }

    /// The same grid reflected so that its polar axis points along `axis`.
    ///
    /// Integrands that depend sharply on `u·axis` are then resolved by the polar rule alone.
    pub fn aligned(&self, axis: &[f64]) -> Result<Self> {
        if axis.len() != self.d {
            return Err(Error::GridMismatch { grid: self.d, expected: axis.len() });
        }
        let axis = crate::geometry::normalized(axis)?;
        let mut w: Vec<f64> = axis.iter().map(|a| -a).collect();
        w[self.d - 1] += 1.0;
        let ww: f64 = w.iter().map(|x| x * x).sum();
        if ww < 1e-30 {
            return Ok(self.clone());
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| {
                let k = 2.0 * n.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / ww;
                n.iter().zip(&w).map(|(a, b)| a - k * b).collect()
            })
            .collect();
        Ok(Self { nodes, ..self.clone() })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for w in &self.weights {
            s.add(Complex64::new(*w, 0.0));
        }
        s.value().re
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> Complex64) -> Complex64 {
        let mut s = CompensatedSum::default();
        for (n, w) in self.nodes.iter().zip(&self.weights) {
            s.add(*w * f(n));
        }
        s.value()
    }
}

/// Neumaier-compensated sum of complex numbers; summation order is the insertion order.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
}

fn neumaier(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        neumaier(&mut self.sum.re, &mut self.comp.re, x.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, x.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// A function on the boundary sphere.
pub trait BoundaryField {
    fn dim(&self) -> usize;
    fn eval(&self, u: &[f64]) -> Result<Complex64>;
}

/// Boundary function given by a closure.
pub struct FnField<F> {
    pub d: usize,
    pub f: F,
}

impl<F: Fn(&[f64]) -> Result<Complex64>> BoundaryField for FnField<F> {
    fn dim(&self) -> usize {
        self.d
    }

    fn eval(&self, u: &[f64]) -> Result<Complex64> {
        (self.f)(u)
    }
}

impl BoundaryField for crate::modes::BoundaryMode {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn eval(&self, u: &[f64]) -> Result<Complex64> {
        hyperspherical_y(self.params.d, &self.idx, u)
    }
}

fn check_dim(grid: &SphereGrid, d: usize) -> Result<()> {
    if grid.d != d {
        return Err(Error::GridMismatch { grid: grid.d, expected: d });
    }
    Ok(())
}

/// `∫ f* g dμ` by quadrature.
pub fn l2_inner(f: &dyn BoundaryField, g: &dyn BoundaryField, grid: &SphereGrid) -> Result<Complex64> {
    check_dim(grid, f.dim())?;
    check_dim(grid, g.dim())?;
    let mut s = CompensatedSum::default();
    for (n, w) in grid.nodes.iter().zip(&grid.weights) {
        s.add(*w * f.eval(n)?.conj() * g.eval(n)?);
    }
    Ok(s.value())
}

/// Gram matrix of all harmonics of degree `<= lmax` under the grid's L² product.
pub fn harmonic_gram(grid: &SphereGrid, lmax: usize) -> Result<Vec<Vec<Complex64>>> {
    let samples = grid.nodes.iter().map(|n| harmonics_up_to(grid.d, lmax, n)).collect::<Result<Vec<_>>>()?;
    let m = samples.first().map_or(0, |s| s.len());
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (a, row) in gram.iter_mut().enumerate() {
        for (b, entry) in row.iter_mut().enumerate() {
            let mut s = CompensatedSum::default();
            for (y, w) in samples.iter().zip(&grid.weights) {
                s.add(*w * y[a].conj() * y[b]);
            }
            *entry = s.value();
        }
    }
    Ok(gram)
}

/// Largest entry of `|G - I|`.
pub fn identity_deviation(gram: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, row) in gram.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            let target = if a == b { 1.0 } else { 0.0 };
            let dev = (*v - target).norm();
            worst = if dev.is_nan() { f64::NAN } else { worst.max(dev) };
            if worst.is_nan() {
                return worst;
            }
        }
    }
    worst
}

/// Positive constant in front of the Klein–Gordon product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KgNormalization {
    pub c_tau: f64,
}

impl KgNormalization {
    pub fn new(c_tau: f64) -> Result<Self> {
        if !(c_tau.is_finite() && c_tau > 0.0) {
            return Err(Error::InvalidParams(format!("c_tau = {c_tau} must be positive")));
        }
        Ok(Self { c_tau })
    }

    /// `2^{2 Re τ} e^{π Im τ} |Γ(-τ)|²`.
    pub fn closed_form(params: &PrincipalParams) -> Result<Self> {
        let tau = params.tau();
        Self::new(2f64.powf(2.0 * tau.re) * (PI * tau.im).exp() * complex_gamma(-tau)?.norm_sqr())
    }

    /// `2^{2 Re τ} e^{-π Im τ} |Γ(-τ)|²`, the constant for which the modes have unit norm.
    pub fn unit_gram(params: &PrincipalParams) -> Result<Self> {
        let tau = params.tau();
        Self::new(2f64.powf(2.0 * tau.re) * (-PI * tau.im).exp() * complex_gamma(-tau)?.norm_sqr())
    }
}

/// A bulk function that can be evaluated, with its `ρ` derivative, at complex `ρ̃`.
pub trait BulkField {
    fn dim(&self) -> usize;
    /// `(F, ∂_ρ F)` at `(ρ̃, u)`.
    fn eval(&self, rho_tilde: Complex64, u: &[f64]) -> Result<(Complex64, Complex64)>;
}

impl BulkField for BulkMode {
    fn dim(&self) -> usize {
        self.params.d
    }

    fn eval(&self, rho_tilde: Complex64, u: &[f64]) -> Result<(Complex64, Complex64)> {
        let y = hyperspherical_y(self.params.d, &self.idx, u)?;
        let (f, df) = self.radial()?.value_and_drho(rho_tilde)?;
        Ok((f * y, df * y))
    }
}

/// Cauchy slice `ρ = s`.
///
/// For real `s` this is the ordinary slice. The Klein–Gordon current is conserved, so the
/// product also equals the same expression on a complex slice, where the first argument is
/// read at `conj(s)`. This keeps a kernel that lives in the backward tube off its singularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchySlice {
    pub rho: Complex64,
}

impl CauchySlice {
    pub fn waist() -> Self {
        Self { rho: Complex64::new(0.0, 0.0) }
    }

    pub fn shifted(im: f64) -> Self {
        Self { rho: Complex64::new(0.0, im) }
    }
}

/// Values and `ρ` derivatives of a field at the grid nodes.
#[derive(Debug, Clone)]
pub struct SliceSamples {
    pub values: Vec<Complex64>,
    pub drho: Vec<Complex64>,
}

pub fn sample_on_slice(f: &dyn BulkField, grid: &SphereGrid, rho_tilde: Complex64) -> Result<SliceSamples> {
    check_dim(grid, f.dim())?;
    let mut values = Vec::with_capacity(grid.len());
    let mut drho = Vec::with_capacity(grid.len());
    for n in &grid.nodes {
        let (v, dv) = f.eval(rho_tilde, n)?;
        values.push(v);
        drho.push(dv);
    }
    Ok(SliceSamples { values, drho })
}

/// Klein–Gordon product from samples: `f` sampled at `conj(s)`, `g` at `s`.
pub fn kg_from_samples(
    f: &SliceSamples,
    g: &SliceSamples,
    norm: KgNormalization,
    grid: &SphereGrid,
    slice: CauchySlice,
) -> Complex64 {
    let mut s = CompensatedSum::default();
    for k in 0..grid.len() {
        let w = f.values[k].conj() * g.drho[k] - g.values[k] * f.drho[k].conj();
        s.add(grid.weights[k] * w);
    }
    let measure = slice.rho.cos().powf(2.0 - grid.d as f64);
    Complex64::i() * norm.c_tau * measure * s.value()
}

/// `⟨f, g⟩_KG = i c_τ (cos s)^{2-d} ∫ [f* ∂_ρ g - g ∂_ρ f*] dμ(u)` on the slice `ρ = s`.
pub fn kg_inner(
    f: &dyn BulkField,
    g: &dyn BulkField,
    norm: KgNormalization,
    grid: &SphereGrid,
    slice: CauchySlice,
) -> Result<Complex64> {
    let fs = sample_on_slice(f, grid, slice.rho.conj())?;
    let gs = sample_on_slice(g, grid, slice.rho)?;
    Ok(kg_from_samples(&fs, &gs, norm, grid, slice))
}

/// Klein–Gordon Gram matrix of a family of fields.
pub fn kg_gram(
    fields: &[&dyn BulkField],
    norm: KgNormalization,
    grid: &SphereGrid,
    slice: CauchySlice,
) -> Result<Vec<Vec<Complex64>>> {
    let at_s = fields.iter().map(|f| sample_on_slice(*f, grid, slice.rho)).collect::<Result<Vec<_>>>()?;
    let at_conj = if slice.rho.im == 0.0 {
        at_s.clone()
    } else {
        fields.iter().map(|f| sample_on_slice(*f, grid, slice.rho.conj())).collect::<Result<Vec<_>>>()?
    };
    Ok(at_conj.iter().map(|f| at_s.iter().map(|g| kg_from_samples(f, g, norm, grid, slice)).collect()).collect())
}

/// Outcome of a bulk orthonormality run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgNormCheck {
    pub max_deviation: f64,
    pub modes: usize,
    pub required_exactness: usize,
    pub grid_exactness: usize,
    /// False when the grid cannot integrate products of the harmonics exactly.
    pub resolved: bool,
}

/// Gram matrix of all modes with `L <= lmax` on the waist slice, compared with the identity.
pub fn kg_norm_check(
    params: &PrincipalParams,
    lmax: usize,
    grid: &SphereGrid,
    norm: KgNormalization,
) -> Result<KgNormCheck> {
    check_dim(grid, params.d)?;
    let modes = crate::specfun::harmonics::HarmonicIndex::up_to(params.d, lmax)?
        .into_iter()
        .map(|idx| BulkMode::new(*params, idx))
        .collect::<Result<Vec<_>>>()?;
    let fields: Vec<&dyn BulkField> = modes.iter().map(|m| m as &dyn BulkField).collect();
    let gram = kg_gram(&fields, norm, grid, CauchySlice::waist())?;
    let required_exactness = 2 * lmax;
    Ok(KgNormCheck {
        max_deviation: identity_deviation(&gram),
        modes: modes.len(),
        required_exactness,
        grid_exactness: grid.exactness_degree,
        resolved: grid.exactness_degree >= required_exactness,
    })
}

/// Surface area check used by grid audits.
pub fn area_error(grid: &SphereGrid) -> f64 {
    let a = sphere_area(grid.d);
    (grid.total_weight() - a).abs() / a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{BoundaryMode, BoundarySide};
    use crate::specfun::harmonics::HarmonicIndex;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn legendre_rule_exactness() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(k as i32)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-14, "n={n} k={k}");
            }
        }
        let (x, _) = gauss_legendre(40);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn chebyshev_u_rule_exactness() {
        // ∫ x^{2j} sqrt(1-x²) dx = π (2j)! / (2^{2j+1} j! (j+1)!)
        let (x, w) = gauss_chebyshev_u(6);
        for j in 0..6 {
            let got: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(2 * j as i32)).sum();
            let fact = |n: usize| (1..=n).map(|k| k as f64).product::<f64>();
            let want = PI * fact(2 * j) / (2f64.powi(2 * j as i32 + 1) * fact(j) * fact(j + 1));
            assert!((got - want).abs() < 1e-14, "j={j}");
        }
    }

    #[test]
    fn areas_and_symmetric_integrals() {
        let g = SphereGrid::build(3, 3).unwrap();
        assert!(area_error(&g) < 1e-13);
        let z2 = g.integrate(|u| c(u[2] * u[2], 0.0));
        assert!((z2.re - 4.0 * PI / 3.0).abs() < 1e-13);
        let g4 = SphereGrid::build(4, 6).unwrap();
        assert!(area_error(&g4) < 1e-13);
        // ∫_{S³} u_1² u_4² dμ = 2π²/24
        let v = g4.integrate(|u| c(u[0] * u[0] * u[3] * u[3], 0.0));
        assert!((v.re - 2.0 * PI * PI / 24.0).abs() < 1e-13);
        assert!(matches!(SphereGrid::build(5, 4), Err(Error::UnsupportedDimension(5))));
    }

    #[test]
    fn harmonic_orthonormality() {
        for d in [3usize, 4] {
            let g = SphereGrid::build(d, 12).unwrap();
            let dev = identity_deviation(&harmonic_gram(&g, 6).unwrap());
            assert!(dev < 1e-10, "d={d}: {dev}");
            let coarse = SphereGrid::build(d, 8).unwrap();
            assert!(identity_deviation(&harmonic_gram(&coarse, 6).unwrap()) > 1e-6);
        }
    }

    #[test]
    fn aligned_grid_keeps_exactness() {
        let g = SphereGrid::build(4, 10).unwrap();
        let a = g.aligned(&[0.3, -0.1, 0.7, 0.2]).unwrap();
        for n in &a.nodes {
            assert!((n.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-13);
        }
        assert!(identity_deviation(&harmonic_gram(&a, 5).unwrap()) < 1e-10);
        let axis = crate::geometry::normalized(&[0.3, -0.1, 0.7, 0.2]).unwrap();
        // the first polar node is now close to the axis
        let top = a.nodes.iter().map(|n| crate::geometry::dot(n, &axis)).fold(f64::MIN, f64::max);
        let top_orig = g.nodes.iter().map(|n| n[3]).fold(f64::MIN, f64::max);
        assert!((top - top_orig).abs() < 1e-13);
    }

    #[test]
    fn graded_grids() {
        let g = SphereGrid::graded(3, 0.3, 0.01, 20, 14).unwrap();
        assert!(area_error(&g) < 1e-13);
        assert_eq!(g.exactness_degree, 13);
        assert!(identity_deviation(&harmonic_gram(&g, 6).unwrap()) < 1e-12);
        // ∫ dμ / (u_3 - 0.3 + 0.01i) over S² = 2π log((0.7 + 0.01i)/(-1.3 + 0.01i))
        let got = g.integrate(|u| 1.0 / c(u[2] - 0.3, 0.01));
        let want = 2.0 * PI * (c(0.7, 0.01) / c(-1.3, 0.01)).ln();
        assert!((got - want).norm() < 1e-11 * want.norm(), "{got} vs {want}");

        let g4 = SphereGrid::graded(4, -0.2, 0.02, 16, 8).unwrap();
        assert!(area_error(&g4) < 1e-13);
        assert_eq!(g4.exactness_degree, 0);
        assert!(identity_deviation(&harmonic_gram(&g4, 3).unwrap()) < 1e-12);
    }

    #[test]
    fn l2_trivial_products() {
        let pr = PrincipalParams::unit(3, 1.0).unwrap();
        let g = SphereGrid::build(3, 6).unwrap();
        let mk = |degree, m| BoundaryMode {
            params: pr,
            idx: HarmonicIndex::new(3, degree, vec![m]).unwrap(),
            side: BoundarySide::Future,
        };
        assert!((l2_inner(&mk(0, 0), &mk(0, 0), &g).unwrap() - 1.0).norm() < 1e-13);
        assert!(l2_inner(&mk(1, 0), &mk(2, 0), &g).unwrap().norm() < 1e-13);
        let g4 = SphereGrid::build(4, 6).unwrap();
        assert!(matches!(l2_inner(&mk(0, 0), &mk(0, 0), &g4), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn stated_constant_golden() {
        let pr = PrincipalParams::unit(3, 1.0).unwrap();
        let c_tau = KgNormalization::closed_form(&pr).unwrap().c_tau;
        assert!((c_tau - 0.002_938_860_336_842_277_45).abs() < 1e-16);
        let via_sinh = 0.25 * (-PI).exp() * PI / PI.sinh();
        assert!((c_tau - via_sinh).abs() < 1e-16);
    }

    #[test]
    fn kg_gram_single_mode_and_hermiticity() {
        let pr = PrincipalParams::unit(3, 1.0).unwrap();
        let grid = SphereGrid::build(3, 8).unwrap();
        let norm = KgNormalization::unit_gram(&pr).unwrap();
        let chk = kg_norm_check(&pr, 0, &grid, norm).unwrap();
        assert!(chk.max_deviation < 1e-12 && chk.resolved && chk.modes == 1);

        let a = BulkMode::new(pr, HarmonicIndex::new(3, 2, vec![1]).unwrap()).unwrap();
        let b = BulkMode::new(pr, HarmonicIndex::new(3, 1, vec![0]).unwrap()).unwrap();
        let s = CauchySlice::waist();
        let aa = kg_inner(&a, &a, norm, &grid, s).unwrap();
        assert!(aa.im.abs() < 1e-14 && (aa.re - 1.0).abs() < 1e-10);
        let ab = kg_inner(&a, &b, norm, &grid, s).unwrap();
        let ba = kg_inner(&b, &a, norm, &grid, s).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
    }

    #[test]
    fn stated_constant_gives_exp_minus_two_pi_nu() {
        let grid = SphereGrid::build(3, 8).unwrap();
        for nu in [0.5, 1.0] {
            let pr = PrincipalParams::unit(3, nu).unwrap();
            let norm = KgNormalization::closed_form(&pr).unwrap();
            let a = BulkMode::new(pr, HarmonicIndex::new(3, 1, vec![-1]).unwrap()).unwrap();
            let v = kg_inner(&a, &a, norm, &grid, CauchySlice::waist()).unwrap();
            assert!((v.re - (-2.0 * PI * nu).exp()).abs() < 1e-10, "nu={nu}: {v}");
        }
    }

    #[test]
    fn slice_independence() {
        let pr = PrincipalParams::unit(3, 1.0).unwrap();
        let grid = SphereGrid::build(3, 8).unwrap();
        let norm = KgNormalization::unit_gram(&pr).unwrap();
        let a = BulkMode::new(pr, HarmonicIndex::new(3, 2, vec![0]).unwrap()).unwrap();
        let w = kg_inner(&a, &a, norm, &grid, CauchySlice::waist()).unwrap();
        for s in [c(0.4, 0.0), c(-0.9, 0.0), c(0.0, 0.05), c(0.2, 0.1)] {
            let v = kg_inner(&a, &a, norm, &grid, CauchySlice { rho: s }).unwrap();
            assert!((v - w).norm() < 1e-9, "slice {s}: {v}");
        }
    }

    #[test]
    fn under_resolved_grid_is_flagged() {
        let pr = PrincipalParams::unit(3, 1.0).unwrap();
        let norm = KgNormalization::unit_gram(&pr).unwrap();
        let chk = kg_norm_check(&pr, 4, &SphereGrid::build(3, 4).unwrap(), norm).unwrap();
        assert!(!chk.resolved);
        assert!(chk.max_deviation > 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn l2_positive_and_hermitian(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
                                     other in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16)) {
            let grid = SphereGrid::build(3, 8).unwrap();
            let f = FnField { d: 3, f: |u: &[f64]| -> Result<Complex64> {
                let y = harmonics_up_to(3, 3, u)?;
                Ok(y.iter().zip(&coeffs).map(|(a, (r, i))| a * c(*r, *i)).sum())
            }};
            let g = FnField { d: 3, f: |u: &[f64]| -> Result<Complex64> {
                let y = harmonics_up_to(3, 3, u)?;
                Ok(y.iter().zip(&other).map(|(a, (r, i))| a * c(*r, *i)).sum())
            }};
            let ff = l2_inner(&f, &f, &grid).unwrap();
            prop_assert!(ff.re >= 0.0 && ff.im.abs() < 1e-13);
            let norm2: f64 = coeffs.iter().map(|(r, i)| r * r + i * i).sum();
            prop_assert!((ff.re - norm2).abs() < 1e-12);
            let fg = l2_inner(&f, &g, &grid).unwrap();
            let gf = l2_inner(&g, &f, &grid).unwrap();
            prop_assert!((fg - gf.conj()).norm() < 1e-13);
        }
    }
}

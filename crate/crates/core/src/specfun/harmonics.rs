//! Complex orthonormal hyperspherical harmonics on S^{d-1}, d ∈ {3, 4}.
//!
//! Conventions:
//!
//! * d = 3: `u = (sinθ cosφ, sinθ sinφ, cosθ)`, `Y_{L,(m)} = P̄_L^m(cosθ) e^{imφ}` with the
//!   Condon–Shortley phase and `Y_{L,(-m)} = (-1)^m conj(Y_{L,(m)})`.
//! * d = 4: `u = (sinχ ω, cosχ)` with ω ∈ S², and
//!   `Y_{L,(l1,l2)} = N sin^{l1}χ C_{L-l1}^{l1+1}(cosχ) Y_{l1,(l2)}(ω)`.
//!
//! Both are L²-normalized against the unnormalized surface measure.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::ln_gamma;
use super::gegenbauer::gegenbauer;
use crate::error::{Error, Result};

/// Tolerance on `|u| = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// Degree `L` and the chain `l = (l_1, ..., l_{d-2})` with `L >= l_1 >= ... >= |l_{d-2}|`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub degree: usize,
    pub chain: Vec<i64>,
}

impl HarmonicIndex {
    pub fn new(d: usize, degree: usize, chain: Vec<i64>) -> Result<Self> {
        let idx = Self { degree, chain };
        idx.validate(d)?;
        Ok(idx)
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if d < 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        if self.chain.len() != d - 2 {
            return Err(Error::InvalidParams(format!("index chain {:?} must have length d-2 = {}", self.chain, d - 2)));
        }
        let mut upper = self.degree as i64;
        let last = self.chain.len() - 1;
        for (i, &l) in self.chain.iter().enumerate() {
            let ok = if i == last { l.abs() <= upper } else { l >= 0 && l <= upper };
            if !ok {
                return Err(Error::InvalidParams(format!(
                    "index chain {:?} violates L >= l1 >= ... >= |l_(d-2)| for L = {}",
                    self.chain, self.degree
                )));
            }
            upper = l;
        }
        Ok(())
    }

    /// Every index of degree `degree` in dimension `d`, in lexicographic order.
    pub fn all(d: usize, degree: usize) -> Result<Vec<Self>> {
        if d < 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        let mut out = Vec::new();
        let mut chain = Vec::with_capacity(d - 2);
        fill_chains(d - 2, degree as i64, &mut chain, &mut |c| {
            out.push(Self { degree, chain: c.to_vec() });
        });
        Ok(out)
    }

    /// Every index with degree `<= lmax`, ordered by degree.
    pub fn up_to(d: usize, lmax: usize) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for degree in 0..=lmax {
            out.extend(Self::all(d, degree)?);
        }
        Ok(out)
    }
}

fn fill_chains(remaining: usize, upper: i64, chain: &mut Vec<i64>, emit: &mut impl FnMut(&[i64])) {
    if remaining == 1 {
        for l in -upper..=upper {
            chain.push(l);
            emit(chain);
            chain.pop();
        }
        return;
    }
    for l in 0..=upper {
        chain.push(l);
        fill_chains(remaining - 1, l, chain, emit);
        chain.pop();
    }
}

/// Number of independent harmonics of degree `degree` on S^{d-1}.
pub fn harmonic_count(d: usize, degree: usize) -> usize {
    match d {
        3 => 2 * degree + 1,
        4 => (degree + 1) * (degree + 1),
        _ => HarmonicIndex::all(d, degree).map(|v| v.len()).unwrap_or(0),
    }
}

/// Surface area of the unit sphere S^{d-1}, `2 π^{d/2} / Γ(d/2)`.
pub fn sphere_area(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    2.0 * PI.powf(half) / ln_gamma(Complex64::new(half, 0.0)).map(|l| l.re.exp()).unwrap_or(f64::NAN)
}

/// Right-hand side of the addition theorem,
/// `Σ_l Y_{Ll}(u) Y*_{Ll}(v) = (L+d/2-1) Γ(d/2-1) / (2π^{d/2}) C_L^{d/2-1}(u·v)`.
pub fn addition_theorem_kernel(d: usize, degree: usize, t: f64) -> f64 {
    let alpha = d as f64 / 2.0 - 1.0;
    let g = ln_gamma(Complex64::new(alpha, 0.0)).map(|l| l.re.exp()).unwrap_or(f64::NAN);
    (degree as f64 + alpha) * g / (2.0 * PI.powf(d as f64 / 2.0)) * gegenbauer(degree, Complex64::new(alpha, 0.0), t).re
}

fn check_unit(d: usize, u: &[f64]) -> Result<()> {
    if u.len() != d {
        return Err(Error::InvalidParams(format!("point has {} components, expected {d}", u.len())));
    }
    let n2: f64 = u.iter().map(|x| x * x).sum();
    if (n2.sqrt() - 1.0).abs() > UNIT_TOL {
        return Err(Error::Domain(format!("|u| = {} is not 1", n2.sqrt())));
    }
    Ok(())
}

/// Normalized associated Legendre values `P̄_l^m(x)` for `0 <= m <= l <= lmax`,
/// stored at `l*(l+1)/2 + m`. Includes the Condon–Shortley phase and `1/sqrt(4π)`.
fn legendre_table(lmax: usize, x: f64) -> Vec<f64> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let at = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; (lmax + 1) * (lmax + 2) / 2];
    p[0] = 0.5 / PI.sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = m as f64;
            p[at(m, m)] = -((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[at(m - 1, m - 1)];
        }
        if m < lmax {
            p[at(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[at(m, m)];
        }
        for l in (m + 2)..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[at(l, m)] = a * (x * p[at(l - 1, m)] - b * p[at(l - 2, m)]);
        }
    }
    p
}

fn s2_value(table: &[f64], l: usize, m: i64, phi: f64) -> Complex64 {
    let ma = m.unsigned_abs() as usize;
    let base = table[l * (l + 1) / 2 + ma];
    let v = Complex64::from_polar(base, ma as f64 * phi);
    if m >= 0 {
        v
    } else if ma.is_multiple_of(2) {
        v.conj()
    } else {
        -v.conj()
    }
}

fn s3_normalization(degree: usize, l1: usize) -> f64 {
    // ∫_{-1}^{1} (1-x²)^{λ-1/2} [C_n^λ]² dx = π 2^{1-2λ} Γ(n+2λ) / (n! (n+λ) Γ(λ)²)
    let lam = l1 as f64 + 1.0;
    let n = (degree - l1) as f64;
    let lg = |x: f64| ln_gamma(Complex64::new(x, 0.0)).map(|l| l.re).unwrap_or(f64::NAN);
    let ln_h =
        PI.ln() + (1.0 - 2.0 * lam) * 2f64.ln() + lg(n + 2.0 * lam) - lg(n + 1.0) - (n + lam).ln() - 2.0 * lg(lam);
    (-0.5 * ln_h).exp()
}

/// Evaluates every harmonic with degree `<= lmax` at `u`, in the order of
/// [`HarmonicIndex::up_to`].
pub fn harmonics_up_to(d: usize, lmax: usize, u: &[f64]) -> Result<Vec<Complex64>> {
    check_unit(d, u)?;
    match d {
        3 => {
            let x = u[2].clamp(-1.0, 1.0);
            let phi = u[1].atan2(u[0]);
            let table = legendre_table(lmax, x);
            let mut out = Vec::with_capacity((lmax + 1) * (lmax + 1));
            for l in 0..=lmax {
                for m in -(l as i64)..=(l as i64) {
                    out.push(s2_value(&table, l, m, phi));
                }
            }
            Ok(out)
        }
        4 => {
            let x = u[3].clamp(-1.0, 1.0);
            let s = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            let (cos_theta, phi) = if s > 0.0 { ((u[2] / s).clamp(-1.0, 1.0), u[1].atan2(u[0])) } else { (1.0, 0.0) };
            let table = legendre_table(lmax, cos_theta);
            let mut out = Vec::new();
            for degree in 0..=lmax {
                for l1 in 0..=degree {
                    let radial = s3_normalization(degree, l1)
                        * s.powi(l1 as i32)
                        * gegenbauer(degree - l1, Complex64::new(l1 as f64 + 1.0, 0.0), x).re;
                    for l2 in -(l1 as i64)..=(l1 as i64) {
                        out.push(radial * s2_value(&table, l1, l2, phi));
                    }
                }
            }
            Ok(out)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// Position of `idx` within [`HarmonicIndex::up_to`] ordering.
pub fn flat_position(d: usize, idx: &HarmonicIndex) -> Result<usize> {
    let l = idx.degree;
    match d {
        3 => Ok(l * l + (idx.chain[0] + l as i64) as usize),
        4 => {
            let l1 = idx.chain[0] as usize;
            let before: usize = (0..l).map(|k| (k + 1) * (k + 1)).sum();
            Ok(before + l1 * l1 + (idx.chain[1] + l1 as i64) as usize)
        }
        _ => Err(Error::UnsupportedDimension(d)),
    }
}

/// The harmonic `Y_{Ll}(u)` on S^{d-1}.
pub fn hyperspherical_y(d: usize, idx: &HarmonicIndex, u: &[f64]) -> Result<Complex64> {
    if d != 3 && d != 4 {
        return Err(Error::UnsupportedDimension(d));
    }
    idx.validate(d)?;
    let all = harmonics_up_to(d, idx.degree, u)?;
    Ok(all[flat_position(d, idx)?])
}

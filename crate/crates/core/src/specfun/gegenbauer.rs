use num_complex::Complex64;

use super::gamma::gamma_ratio;
use crate::error::Result;

/// Gegenbauer polynomial C_n^λ(x) of complex order, by the three-term recurrence
/// `n C_n = 2x (n + λ - 1) C_{n-1} - (n + 2λ - 2) C_{n-2}`.
pub fn gegenbauer(n: usize, lambda: Complex64, x: f64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * x;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * x * (kf + lambda - 1.0) * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// All of C_0^λ(x), ..., C_n^λ(x) in one pass.
pub fn gegenbauer_table(n: usize, lambda: Complex64, x: f64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(1.0, 0.0));
    if n == 0 {
        return out;
    }
    out.push(2.0 * lambda * x);
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * x * (kf + lambda - 1.0) * out[k - 1] - (kf + 2.0 * lambda - 2.0) * out[k - 2]) / kf;
        out.push(next);
    }
    out
}

/// Coefficient c_k re-expanding C_n^{-τ} in the C^{d/2-1} family:
///
/// `C_n^{-τ}(t) = Γ(d/2-1)/Γ(-τ) Σ_k c_k C_{n-2k}^{d/2-1}(t)`, with
/// `c_k = (n-2k+d/2-1) Γ(k-τ-d/2+1) Γ(n-k-τ) / [k! Γ(-τ-d/2+1) Γ(n-k+d/2)]`.
pub fn gegenbauer_reduction_coeff(n: usize, k: usize, tau: Complex64, d: usize) -> Result<Complex64> {
    debug_assert!(2 * k <= n);
    let half_d = d as f64 / 2.0;
    let kf = k as f64;
    let nf = n as f64;
    let lead = nf - 2.0 * kf + half_d - 1.0;
    let r1 = gamma_ratio(kf - tau - half_d + 1.0, -tau - half_d + 1.0)?;
    let r2 = gamma_ratio(nf - kf - tau, Complex64::new(nf - kf + half_d, 0.0))?;
    let k_fact: f64 = (1..=k).map(|j| j as f64).product();
    Ok(lead * r1 * r2 / k_fact)
}

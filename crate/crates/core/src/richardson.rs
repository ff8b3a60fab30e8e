//! Richardson extrapolation with arbitrary (complex) exponents.
//!
//! Given samples `A(δ_k)` of `A(δ) = A₀ + Σ_j c_j δ^{p_j}`, solves the square system for
//! `A₀` and the `c_j`. With `p_j` the integers this is classical Richardson; boundary
//! limits of the modes also need the oscillating exponents `n - 2iν`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Exponent ladder `[p, 1, 1+p, 2, 2+p, ...]` with `p = -2iν`, truncated to `count` terms.
pub fn oscillatory_ladder(nu: f64, count: usize) -> Vec<Complex64> {
    let p = Complex64::new(0.0, -2.0 * nu);
    (0..count)
        .map(|j| {
            let n = j.div_ceil(2);
            if j % 2 == 0 {
                p + n as f64
            } else {
                Complex64::new(n as f64, 0.0)
            }
        })
        .collect()
}

/// Integer ladder `[1, 2, ..., count]`.
pub fn integer_ladder(count: usize) -> Vec<Complex64> {
    (1..=count).map(|n| Complex64::new(n as f64, 0.0)).collect()
}

/// Gaussian elimination with partial pivoting; `a` is row-major `n × n`.
fn solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap_or(col);
        if a[pivot][col].norm() == 0.0 || !a[pivot][col].norm().is_finite() {
            return Err(Error::Extrapolation("singular extrapolation system".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Ok(x)
}

/// Extrapolated `A₀` from `values[k] = A(deltas[k])`, using `values.len() - 1` exponents.
pub fn extrapolate(deltas: &[f64], values: &[Complex64], exponents: &[Complex64]) -> Result<Complex64> {
    let n = values.len();
    if deltas.len() != n || n == 0 {
        return Err(Error::Extrapolation("need one delta per value".into()));
    }
    if exponents.len() + 1 < n {
        return Err(Error::Extrapolation(format!("{n} samples need {} exponents", n - 1)));
    }
    if deltas.iter().any(|d| !(d.is_finite() && *d > 0.0)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Extrapolation("deltas must be positive and strictly decreasing".into()));
    }
    // columns are scaled by their value at the largest delta to keep the system balanced
    let d0 = deltas[0];
    let rows = deltas
        .iter()
        .map(|&d| {
            std::iter::once(Complex64::new(1.0, 0.0))
                .chain(exponents[..n - 1].iter().map(|&p| ((d / d0).ln() * p).exp()))
                .collect()
        })
        .collect();
    Ok(solve(rows, values.to_vec())?[0])
}

/// Extrapolated limit with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Distance to the estimate that drops the largest delta and the last exponent.
    pub error_estimate: f64,
}

pub fn extrapolate_with_estimate(
    deltas: &[f64],
    values: &[Complex64],
    exponents: &[Complex64],
) -> Result<Extrapolated> {
    let value = extrapolate(deltas, values, exponents)?;
    let error_estimate = if values.len() > 1 {
        (extrapolate(&deltas[1..], &values[1..], exponents)? - value).norm()
    } else {
        f64::INFINITY
    };
    Ok(Extrapolated { value, error_estimate })
}

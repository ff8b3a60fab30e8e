//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export returns a flat `Float64Array`; the layouts are documented per function.
//! The `*_rows` functions hold the logic and run natively.

use dsholo::geometry::{BulkPoint, NullDirection, PrincipalParams};
use dsholo::holomap::{radial_boundary_limit, LimitOptions};
use dsholo::modes::{boundary_factors, expansion_residual, BoundarySide, RadialMode};
use dsholo::sampling::Sampler;
use num_complex::Complex64;
use wasm_bindgen::prelude::*;

fn to_js(e: dsholo::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// `[ρ, Re f_L, Im f_L, |f_L|]` per point, on `n` points across `(-1.5, 1.5)` at `ρ - iε`.
pub fn mode_profile_rows(d: usize, nu: f64, degree: usize, epsilon: f64, n: usize) -> dsholo::Result<Vec<f64>> {
    let radial = RadialMode::new(PrincipalParams::unit(d, nu)?, degree)?;
    let mut out = Vec::with_capacity(4 * n);
    for k in 0..n {
        let rho = -1.5 + 3.0 * k as f64 / (n.max(2) - 1) as f64;
        let f = radial.value(Complex64::new(rho, -epsilon))?;
        out.extend([rho, f.re, f.im, f.norm()]);
    }
    Ok(out)
}

/// `[δ, Re B, Im B]` per level for the regularized radial factor `B(δ)` at `ρ = π/2 - δ`,
/// followed by one row `[0, Re B₀, Im B₀]` with the extrapolated limit (1 in exact arithmetic).
pub fn boundary_approach_rows(d: usize, nu: f64, degree: usize, levels: usize) -> dsholo::Result<Vec<f64>> {
    let params = PrincipalParams::unit(d, nu)?;
    let opts = LimitOptions {
        deltas: (0..levels).map(|k| 0.2 * 0.5f64.powi(k as i32)).collect(),
        epsilon_ratio: 0.1,
        tolerance: f64::INFINITY,
    };
    let radial = RadialMode::new(params, degree)?;
    let mut out = Vec::new();
    for &delta in &opts.deltas {
        let rho = std::f64::consts::FRAC_PI_2 - delta;
        let eps = opts.epsilon_ratio * delta;
        let b = boundary_factors(&params, degree, rho, eps)?.product() * radial.value(Complex64::new(rho, -eps))?;
        out.extend([delta, b.re, b.im]);
    }
    let lim = radial_boundary_limit(&params, degree, BoundarySide::Future, &opts)?;
    out.extend([0.0, lim.value.re, lim.value.im]);
    Ok(out)
}

/// Relative residual of the truncated plane-wave expansion for cutoffs `0..=lmax`,
/// averaged over `samples` seeded points.
pub fn expansion_convergence_rows(
    d: usize,
    nu: f64,
    epsilon: f64,
    lmax: usize,
    samples: usize,
    seed: u64,
) -> dsholo::Result<Vec<f64>> {
    let params = PrincipalParams::unit(d, nu)?;
    let mut s = Sampler::new(seed);
    let points = (0..samples)
        .map(|_| {
            let rho = s.uniform(-1.2, 1.2);
            let (u, v) = (s.unit_vector(d), s.unit_vector(d));
            Ok((BulkPoint::new(rho, u, epsilon)?, NullDirection::new(1.0, v)?))
        })
        .collect::<dsholo::Result<Vec<_>>>()?;
    (0..=lmax)
        .map(|l| {
            let total =
                points.iter().map(|(p, xi)| expansion_residual(p, xi, &params, l)).sum::<dsholo::Result<f64>>()?;
            Ok(total / samples.max(1) as f64)
        })
        .collect()
}

#[wasm_bindgen]
pub fn mode_profile(d: usize, nu: f64, degree: usize, epsilon: f64, n: usize) -> Result<Vec<f64>, JsValue> {
    mode_profile_rows(d, nu, degree, epsilon, n).map_err(to_js)
}

#[wasm_bindgen]
pub fn boundary_approach(d: usize, nu: f64, degree: usize, levels: usize) -> Result<Vec<f64>, JsValue> {
    boundary_approach_rows(d, nu, degree, levels).map_err(to_js)
}

#[wasm_bindgen]
pub fn expansion_convergence(
    d: usize,
    nu: f64,
    epsilon: f64,
    lmax: usize,
    samples: usize,
    seed: u32,
) -> Result<Vec<f64>, JsValue> {
    expansion_convergence_rows(d, nu, epsilon, lmax, samples, seed as u64).map_err(to_js)
}

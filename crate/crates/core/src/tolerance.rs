//! Tolerances and default run settings shared by the library, the verification suites and
//! the reports. Every pass/fail threshold lives here.

/// Max-entry deviation of the bulk Klein–Gordon Gram matrix from the identity.
pub const BULK_GRAM: f64 = 1e-8;

/// Max-entry deviation of the harmonic Gram matrix from the identity.
pub const BOUNDARY_GRAM: f64 = 1e-10;

/// Relative residual of the truncated plane-wave expansion at the default cutoff.
pub const EXPANSION_RESIDUAL: f64 = 1e-4;

/// Samples out of the seeded set that must improve from the low to the high cutoff.
pub const EXPANSION_IMPROVING_FRACTION: f64 = 48.0 / 50.0;

/// Relative error of the extrapolated boundary limits.
pub const BOUNDARY_LIMIT: f64 = 1e-4;

/// Transforms evaluated with the closed-form kernel.
pub const TRANSFORM_DIRECT: f64 = 1e-5;

/// Transforms evaluated with the series kernel (orthonormality collapse).
pub const TRANSFORM_SERIES: f64 = 1e-8;

/// Modulus of the past-boundary phase against `e^{-πν}`.
pub const PHASE_MODULUS: f64 = 1e-10;

/// Harmonic parity and norm preservation under `u ↦ -u`.
pub const PARITY: f64 = 1e-12;

/// Relative change between the last two extrapolants before a limit is accepted.
pub const LIMIT_STABILIZATION: f64 = 1e-4;

/// Largest `δ = π/2 - |ρ|` used for boundary limits; later levels halve it.
pub const LIMIT_DELTA0: f64 = 0.2;

/// Number of `δ` levels for boundary limits.
pub const LIMIT_LEVELS: usize = 8;

/// Default truncation of the expansion checks.
pub const DEFAULT_LMAX_EXPANSION: usize = 20;

/// Low truncation the expansion residual is compared against.
pub const EXPANSION_LMAX_LOW: usize = 5;

/// Default shift for the expansion check.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Shift of the complex Cauchy slice and the bulk points used by the closed-form transforms.
pub const TRANSFORM_EPSILON: f64 = 0.05;

/// Gauss–Legendre nodes per panel of the graded grids used with the closed-form kernel.
pub const KERNEL_PANEL_NODES: usize = 20;

/// Azimuthal nodes of the graded kernel grids.
pub const KERNEL_AZIMUTH_NODES: usize = 16;

/// Number of seeded samples in the expansion check.
pub const EXPANSION_SAMPLES: usize = 50;

/// Number of seeded points in each transform check.
pub const TRANSFORM_SAMPLES: usize = 10;

/// Largest `|ρ|` for random bulk points.
pub const SAMPLE_RHO_MAX: f64 = 1.2;

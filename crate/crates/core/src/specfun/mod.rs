//! Special functions of complex parameters.

pub mod gamma;
pub mod gegenbauer;
pub mod harmonics;
pub mod hyp2f1;

pub use gamma::{complex_gamma, gamma_ratio, ln_gamma, recip_gamma};
pub use gegenbauer::{gegenbauer, gegenbauer_reduction_coeff, gegenbauer_table};
pub use harmonics::{harmonics_up_to, hyperspherical_y, sphere_area, HarmonicIndex};
pub use hyp2f1::{hyp2f1, hyp2f1_dz, HypergeometricParams};

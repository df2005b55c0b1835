//! Spectral factorization of matrix densities on the unit circle, and
//! numerical checks of continuity bounds for the map `F ↦ F⁺`.
//!
//! The crate is organised bottom-up:
//!
//! * [`circle`]: the midpoint grid, sampled functions, Fourier coefficients,
//!   harmonic conjugation, norms and quadrature;
//! * [`matrix`]: pointwise Hermitian functional calculus;
//! * [`orlicz`]: N-functions, Luxemburg norms and the moduli `Λ_Φ`, `R_Ψ`;
//! * [`factorize`]: scalar outer factors and the matrix factorizer;
//! * [`bounds`]: constants, right-hand sides and the pair verifier;
//! * [`families`]: the extremal constructions and the sweep driver.

pub mod bounds;
pub mod circle;
pub mod factorize;
pub mod families;
pub mod matrix;
pub mod orlicz;
pub mod properties;

pub use num_complex::Complex64;

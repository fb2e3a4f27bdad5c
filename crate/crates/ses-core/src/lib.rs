//! Semi-exact (SES) and quasi-exact (QES) solution machinery for the
//! PT-symmetric charged shifted harmonic oscillator
//!
//!   [−d²/dx² + ℓ(ℓ+1)/r² + iF/r + 2ibr + r²] ψ(x) = E ψ(x),
//!   r = r(x) = x − iε,   ℓ = (L−1)/2,
//!
//! on the complex-shifted line.  The crate computes
//!
//! * eigencharge multiplets F from tridiagonal secular determinants, with
//!   closed forms for small L, N-inversion formulas, and large-N asymptotics
//!   ([`charges`]);
//! * polynomial wavefunction coefficients of both quasi-parities and their
//!   recurrence residuals ([`states`]);
//! * overlap and Coulomb matrix elements by composite Gauss–Legendre
//!   quadrature along the shifted contour ([`contour`]);
//! * a variational (Galerkin) solver for generic non-QES couplings in a
//!   truncated SES basis ([`variational`]);
//! * an independent finite-difference diagonalization used as ground truth
//!   ([`oracle`]).

pub mod charges;
pub mod contour;
pub mod error;
mod linalg;
pub mod model;
pub mod oracle;
pub mod states;
pub mod variational;

pub use error::{Error, Result};
pub use model::{energy, partial_wave_index, recurrence_coeffs};
pub use model::{ModelParams, QuantumNumbers, RecurrenceCoeffs};

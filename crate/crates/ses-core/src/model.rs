//! Model parameters and the closed-form pieces every solver consumes.
//!
//! The oscillator lives on the complex-shifted line r(x) = x − iε with the
//! potential ℓ(ℓ+1)/r² + iF/r + 2ibr + r², ℓ = (L−1)/2.  Substituting a
//! Gaussian-times-polynomial ansatz turns the differential equation into a
//! three-term recurrence with coefficients
//!
//!   A_n = b² + 2n − L − E,
//!   B_n = β_n − F,   β_n = −(2n+1−L)·b,
//!   C_n = (n+1)(n+1−L),
//!
//! and the last row of the recurrence pins the energy ladder
//! E_N = 2N + 2 − L + b².

use crate::error::{Error, Result};

/// Physical parameters of the oscillator: partial-wave label `L`, real
/// shift `b`, and the contour offset `eps` (> 0).
///
/// The angular parameter ℓ = (L−1)/2 is half-integer; it is derived from `L`
/// on demand so it stays exact (half-integers are dyadic and representable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    l: u32,
    b: f64,
    eps: f64,
}

impl ModelParams {
    pub fn new(l: u32, b: f64, eps: f64) -> Result<Self> {
        if l < 1 {
            return Err(Error::Domain {
                op: "ModelParams::new",
                msg: format!("partial-wave label L must be >= 1, got {l}"),
            });
        }
        if eps.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !eps.is_finite() {
            return Err(Error::Domain {
                op: "ModelParams::new",
                msg: format!("contour offset eps must be positive and finite, got {eps}"),
            });
        }
        if !b.is_finite() {
            return Err(Error::Domain {
                op: "ModelParams::new",
                msg: format!("shift b must be finite, got {b}"),
            });
        }
        Ok(ModelParams { l, b, eps })
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Angular parameter ℓ = (L−1)/2, exact as a dyadic value.
    pub fn ell(&self) -> f64 {
        (self.l as f64 - 1.0) / 2.0
    }

    /// True when ℓ is an integer (odd L); the wavefunction powers are then
    /// integral and several contour statements sharpen.
    pub fn ell_is_integer(&self) -> bool {
        self.l % 2 == 1
    }

    /// Parameters with `b` and the charge reflected; `eps` is kept, see
    /// [`crate::contour::reflect_params`] for the full reflection triple.
    pub fn with_negated_shift(&self) -> Self {
        ModelParams {
            l: self.l,
            b: -self.b,
            eps: self.eps,
        }
    }
}

/// Labels of one solved state: polynomial degree `n` and charge branch `k`.
///
/// For quasi-even states 1 ≤ k ≤ L; for quasi-odd states 1 ≤ k ≤ n − L + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumNumbers {
    pub n: u32,
    pub k: u32,
}

/// One row of the three-term recurrence, with the charge-free diagonal part
/// `beta` kept separate (the full diagonal entry is `beta − F`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceCoeffs {
    /// Sub-diagonal A_n = b² + 2n − L − E.
    pub a: f64,
    /// Diagonal charge-free part β_n = −(2n+1−L)·b.
    pub beta: f64,
    /// Super-diagonal C_n = (n+1)(n+1−L); vanishes exactly at n = L−1.
    pub c: f64,
}

/// Collapse dimension `d` and wave number `m` into the single partial-wave
/// label L = d − 2 + 2m.
pub fn partial_wave_index(d: u32, m: u32) -> Result<u32> {
    if d < 2 {
        return Err(Error::Domain {
            op: "partial_wave_index",
            msg: format!("dimension must be >= 2, got {d}"),
        });
    }
    let l = d as i64 - 2 + 2 * m as i64;
    if l < 1 {
        return Err(Error::Domain {
            op: "partial_wave_index",
            msg: format!("L = D - 2 + 2m = {l} is below 1"),
        });
    }
    Ok(l as u32)
}

/// Closed-form energy ladder E_N = 2N + 2 − L + b².
///
/// Independent of the charge F; exactly linear in N with slope 2.
pub fn energy(n: u32, l: u32, b: f64) -> f64 {
    2.0 * n as f64 + 2.0 - l as f64 + b * b
}

/// Recurrence coefficients of row `n` at energy `e`.
///
/// With `e = energy(N, l, b)` substituted, `a` collapses to 2(n − N − 1),
/// so A_{N+1} = 0 is the energy condition itself.  The sum is ordered as
/// (2n − L) + b² so that cancellation against [`energy`] is bit-exact.
pub fn recurrence_coeffs(n: u32, l: u32, b: f64, e: f64) -> RecurrenceCoeffs {
    let nf = n as f64;
    let lf = l as f64;
    RecurrenceCoeffs {
        a: (2.0 * nf - lf + b * b) - e,
        beta: -(2.0 * nf + 1.0 - lf) * b,
        c: (nf + 1.0) * (nf + 1.0 - lf),
    }
}

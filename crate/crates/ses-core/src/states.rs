//! Polynomial wavefunction states of both quasi-parities.
//!
//! A state of degree N is ψ(x) = e^{−r²/2 − ibr} Σ_n p_n (ir)^{n−ℓ} on the
//! contour r = x − iε.  The coefficient vector solves the three-term
//! recurrence row by row; which rows are "used up" depends on the
//! quasi-parity:
//!
//! * quasi-even: rows N..1 determine p_{N−1}..p_0 from p_N = 1, and the
//!   discarded row 0 is exactly the secular condition — its residual is an
//!   a-posteriori quality metric for the eigencharge;
//! * quasi-odd: p_0..p_{L−1} vanish identically, rows N..L determine the
//!   rest through a ratio of trailing subdeterminants, and the terminating
//!   value p_{L−1} must come out zero.

use num_complex::Complex64 as C64;

use crate::charges::QuasiParity;
use crate::error::{Error, Result};
use crate::linalg::dd::Dd;
use crate::model::{energy, recurrence_coeffs, ModelParams, QuantumNumbers};

/// Relative recurrence-residual bound enforced at state construction.
pub const CONSTRUCTION_RESIDUAL_TOL: f64 = 1e-12;

/// One solved bound/Sturmian state.
#[derive(Debug, Clone)]
pub struct SesState {
    pub params: ModelParams,
    pub qn: QuantumNumbers,
    pub parity: QuasiParity,
    /// Eigencharge.
    pub f: f64,
    /// Energy E_N = 2N + 2 − L + b² (charge-independent).
    pub e: f64,
    /// p_0..p_N with the head coefficient normalized to p_N = 1.
    pub coeffs: Vec<f64>,
}

impl SesState {
    /// Build and validate a quasi-even state at eigencharge `f`.
    pub fn quasi_even(params: ModelParams, n: u32, k: u32, f: f64) -> Result<Self> {
        let coeffs = quasi_even_coeffs(n, params.l(), params.b(), f)?;
        let state = SesState {
            params,
            qn: QuantumNumbers { n, k },
            parity: QuasiParity::Even,
            f,
            e: energy(n, params.l(), params.b()),
            coeffs,
        };
        state.validate()?;
        Ok(state)
    }

    /// Build and validate a quasi-odd state at eigencharge `f`.
    pub fn quasi_odd(params: ModelParams, n: u32, k: u32, f: f64) -> Result<Self> {
        let coeffs = quasi_odd_coeffs(n, params.l(), params.b(), f)?;
        let state = SesState {
            params,
            qn: QuantumNumbers { n, k },
            parity: QuasiParity::Odd,
            f,
            e: energy(n, params.l(), params.b()),
            coeffs,
        };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<()> {
        let res = recurrence_residual(self);
        if res.partial_cmp(&CONSTRUCTION_RESIDUAL_TOL) != Some(std::cmp::Ordering::Less)
            && res != CONSTRUCTION_RESIDUAL_TOL
        {
            return Err(Error::Precondition {
                op: "SesState",
                msg: format!(
                    "recurrence residual {res:.3e} exceeds {CONSTRUCTION_RESIDUAL_TOL:.0e}; \
                     charge F = {} is not an eigencharge to working precision",
                    self.f
                ),
            });
        }
        let classified = classify_quasi_parity(&self.coeffs, self.params.l())?;
        if classified != self.parity {
            return Err(Error::Precondition {
                op: "SesState",
                msg: format!(
                    "constructed coefficients classify as quasi-{classified}, not quasi-{}",
                    self.parity
                ),
            });
        }
        Ok(())
    }

    /// The reflected left partner: same N, L, E, charge −F and shift −b,
    /// evaluated by convention on the ket's contour (same eps).
    pub fn left_partner(&self) -> Result<SesState> {
        let params = self.params.with_negated_shift();
        match self.parity {
            QuasiParity::Even => SesState::quasi_even(params, self.qn.n, self.qn.k, -self.f),
            QuasiParity::Odd => SesState::quasi_odd(params, self.qn.n, self.qn.k, -self.f),
        }
    }
}

/// Quasi-even coefficients by the backward recurrence
/// p_{n−1} = −[(β_n − F)·p_n + C_n·p_{n+1}]/A_n, n = N..1, from p_N = 1.
///
/// `f` need only be an approximate eigencharge; the discarded row-0
/// relation (the secular condition) then shows up in the residual.
pub fn quasi_even_coeffs(n: u32, l: u32, b: f64, f: f64) -> Result<Vec<f64>> {
    if l < 1 {
        return Err(Error::Precondition {
            op: "quasi_even_coeffs",
            msg: format!("L must be >= 1, got {l}"),
        });
    }
    let e = energy(n, l, b);
    let len = n as usize + 1;
    // The recurrence runs in compensated (double-double) arithmetic: the
    // coefficients span many orders of magnitude and the turning-region
    // cancellations would otherwise leave ~1e−12 relative noise in the
    // rows, right at the construction residual gate.
    let mut work = vec![Dd::ZERO; len];
    work[len - 1] = Dd::from(1.0);
    for row in (1..=n).rev() {
        let rc = recurrence_coeffs(row, l, b, e);
        // A_row = 2(row − N − 1) < 0 for row <= N: never a zero divisor.
        let i = row as usize;
        let mut acc = Dd::from(rc.beta).sub(Dd::from(f)).mul(work[i]);
        if i + 1 < len {
            acc = acc.add(Dd::from(rc.c).mul(work[i + 1]));
        }
        work[i - 1] = acc.neg().div(Dd::from(rc.a));
    }
    Ok(work.into_iter().map(Dd::to_f64).collect())
}

/// Quasi-odd coefficients through the subdeterminant formula
/// p_{j−1} = p_N · det(rows j..N) / [(−A_j)(−A_{j+1})···(−A_N)], j = N..L,
/// with p_0..p_{L−1} ≡ 0 and p_N = 1.  The determinants are evaluated by
/// their own three-term recurrence with joint log-scaling.
pub fn quasi_odd_coeffs(n: u32, l: u32, b: f64, f: f64) -> Result<Vec<f64>> {
    if l < 1 || n < l {
        return Err(Error::Precondition {
            op: "quasi_odd_coeffs",
            msg: format!("need N >= L >= 1; got N={n}, L={l}"),
        });
    }
    let e = energy(n, l, b);
    let len = n as usize + 1;
    let mut p = vec![0.0; len];
    p[len - 1] = 1.0;

    // G_j = det of the tridiagonal block over rows j..N; downward recurrence
    // G_j = B_j·G_{j+1} − C_j·A_{j+1}·G_{j+2}, seeded by G_{N+1} = 1.
    // Compensated arithmetic plus exact power-of-two rescaling keeps the
    // huge determinants and their ratios accurate to the last few ulps.
    let mut g1 = Dd::from(1.0); // G_{j+1} · 2^{-g_exp}
    let mut g2 = Dd::ZERO; // G_{j+2} · 2^{-g_exp}
    let mut g_exp: i32 = 0;
    let mut denom = Dd::from(1.0); // Π (−A_i) · 2^{-denom_exp}
    let mut denom_exp: i32 = 0;
    for j in (l..=n).rev() {
        let rc = recurrence_coeffs(j, l, b, e);
        let a_next = if j < n {
            recurrence_coeffs(j + 1, l, b, e).a
        } else {
            0.0
        };
        let gj = Dd::from(rc.beta)
            .sub(Dd::from(f))
            .mul(g1)
            .sub(Dd::from(rc.c).mul(Dd::from(a_next)).mul(g2));
        denom = denom.mul(Dd::from(-rc.a)); // −A_j = 2(N+1−j) > 0
        while denom.hi >= 2.0 {
            denom = denom.scale_pow2(-1);
            denom_exp += 1;
        }
        let slot = j as usize - 1;
        if slot >= l as usize {
            p[slot] = gj.div(denom).scale_pow2(g_exp - denom_exp).to_f64();
        }
        // The terminating value p_{L−1} belongs to the zero head and is not
        // stored; a nonzero value surfaces through the residual at row L.
        g2 = g1;
        g1 = gj;
        let m = g1.abs().max(g2.abs());
        if m > 0.0 && m.is_finite() {
            let k = m.log2().floor() as i32;
            if k != 0 {
                g1 = g1.scale_pow2(-k);
                g2 = g2.scale_pow2(-k);
                g_exp += k;
            }
        }
    }
    Ok(p)
}

/// Backward-substitution twin of [`quasi_odd_coeffs`] (rows N..L, same
/// recurrence as the quasi-even construction).  Retained as an independent
/// arithmetic route for cross-checks.
#[cfg(test)]
pub(crate) fn quasi_odd_coeffs_backward(n: u32, l: u32, b: f64, f: f64) -> Result<Vec<f64>> {
    if l < 1 || n < l {
        return Err(Error::Precondition {
            op: "quasi_odd_coeffs_backward",
            msg: format!("need N >= L >= 1; got N={n}, L={l}"),
        });
    }
    let e = energy(n, l, b);
    let len = n as usize + 1;
    let mut p = vec![0.0; len];
    p[len - 1] = 1.0;
    for row in (l..=n).rev() {
        let rc = recurrence_coeffs(row, l, b, e);
        let up = if (row as usize) + 1 < len {
            rc.c * p[row as usize + 1]
        } else {
            0.0
        };
        let val = -((rc.beta - f) * p[row as usize] + up) / rc.a;
        let slot = row as usize - 1;
        if slot >= l as usize {
            p[slot] = val;
        }
    }
    Ok(p)
}

/// Classify a coefficient vector: quasi-odd iff p_0..p_{L−1} all vanish
/// (below 1e−12 of the largest coefficient) and p_L is significant.
pub fn classify_quasi_parity(coeffs: &[f64], l: u32) -> Result<QuasiParity> {
    let max = coeffs.iter().map(|c| c.abs()).fold(0.0_f64, f64::max);
    if max == 0.0 {
        return Err(Error::Domain {
            op: "classify_quasi_parity",
            msg: "all-zero coefficient vector".into(),
        });
    }
    let tol = 1e-12 * max;
    let l = l as usize;
    let head_zero = coeffs.iter().take(l).all(|c| c.abs() <= tol);
    let has_pl = coeffs.len() > l && coeffs[l].abs() > tol;
    if head_zero && has_pl {
        Ok(QuasiParity::Odd)
    } else {
        Ok(QuasiParity::Even)
    }
}

/// Max row defect of the full recurrence at the state's (F, E), plus the
/// final-row term |A_{N+1}·p_N|, normalized by max|p| times the largest
/// row coefficient.  Zero (to round-off) for a true eigenstate; the
/// final-row term vanishes identically iff E equals the ladder energy.
pub fn recurrence_residual(state: &SesState) -> f64 {
    let l = state.params.l();
    let b = state.params.b();
    let p = &state.coeffs;
    let n = state.qn.n;
    let mut worst = 0.0_f64;
    let mut max_coef = 0.0_f64;
    for row in 0..=n {
        let rc = recurrence_coeffs(row, l, b, state.e);
        let i = row as usize;
        let mut acc = (rc.beta - state.f) * p[i];
        if i > 0 {
            acc += rc.a * p[i - 1];
        }
        if i + 1 < p.len() {
            acc += rc.c * p[i + 1];
        }
        worst = worst.max(acc.abs());
        max_coef = max_coef
            .max(rc.a.abs())
            .max((rc.beta - state.f).abs())
            .max(rc.c.abs());
    }
    let final_a = recurrence_coeffs(n + 1, l, b, state.e).a;
    let final_row = final_a.abs() * p[n as usize].abs();
    max_coef = max_coef.max(final_a.abs());
    let max_p = p.iter().map(|c| c.abs()).fold(0.0_f64, f64::max);
    (worst + final_row) / (max_p * max_coef).max(f64::MIN_POSITIVE)
}

/// Evaluate ψ(x) = e^{−r²/2 − ibr} Σ_n p_n (ir)^{n−ℓ} at a contour point,
/// with the half-integer power on the principal branch.  Since
/// Re(ir) = ε > 0, the branch cut is never approached.
pub fn eval_wavefunction(state: &SesState, x: f64) -> C64 {
    let eps = state.params.eps();
    let b = state.params.b();
    let ell = state.params.ell();
    let r = C64::new(x, -eps);
    let ir = C64::new(eps, x); // i·r
    let mut poly = C64::new(0.0, 0.0);
    for &c in state.coeffs.iter().rev() {
        poly = poly * ir + c;
    }
    let prefactor = (-r * r * 0.5 - C64::i() * b * r).exp();
    let branch = (ir.ln() * (-ell)).exp();
    prefactor * branch * poly
}

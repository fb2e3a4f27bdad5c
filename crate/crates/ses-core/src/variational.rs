//! Galerkin solver for the oscillator at generic (non-QES) charge F in a
//! truncated basis of SES states.
//!
//! Basis: one state per polynomial degree N (the functions of a fixed
//! family span the polynomial part triangularly, so one-per-degree is the
//! largest linearly independent selection — adding a second branch of the
//! same degree makes the overlap matrix exactly singular).  Degrees below
//! L−1 host a shorter charge multiplet from the leading (N+1)×(N+1) block;
//! their states complete the span down to degree zero.  Candidates that
//! fail the state invariants (residual, parity classification) are dropped
//! and reported.
//!
//! With H(0) eliminated through the bra-side eigen-relations, the pencil is
//!
//!   [(F − F_A)·W_{A,b} + E_A·Q_{A,b}] h = E · Q_{A,b} h,
//!
//! solved as a standard eigenproblem of Q⁻¹·[…] after a symmetric diagonal
//! balancing of Q (pure similarity; eigenvalues untouched).

use num_complex::Complex64 as C64;

use crate::charges::{self, QuasiParity};
use crate::contour::{assemble_overlaps, OverlapData, QuadratureSpec};
use crate::error::{Error, Result};
use crate::linalg::cmat::{self, CMat, Lu};
use crate::model::ModelParams;
use crate::states::SesState;

/// Conditioning threshold beyond which basis assembly refuses to proceed.
pub const CONDITIONING_LIMIT: f64 = 1e12;

/// Imaginary-part filter: eigenvalues with |Im E| ≤ 1e−6·(1+|Re E|) are
/// reported as physical.
pub fn is_physical(e: C64) -> bool {
    e.im.abs() <= 1e-6 * (1.0 + e.re.abs())
}

/// A truncated SES basis with overlap data and conditioning diagnostics.
#[derive(Debug, Clone)]
pub struct BasisData {
    pub params: ModelParams,
    pub parity: QuasiParity,
    /// Kets, one per retained degree, ascending in N.
    pub states: Vec<SesState>,
    /// Matching left partners (reflected parameters).
    pub lefts: Vec<SesState>,
    pub overlaps: OverlapData,
    pub n_max: u32,
    /// ∞-norm condition estimate of the balanced overlap matrix.
    pub conditioning: f64,
    /// Degrees whose candidate state was dropped, with the reason.
    pub dropped: Vec<(u32, String)>,
}

/// Eigenvalues and vectors of one pencil solve.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub eigenvalues: Vec<C64>,
    pub right_vectors: Vec<Vec<C64>>,
    pub left_vectors: Vec<Vec<C64>>,
    /// ‖(A − E·Q)v‖ / ((‖A‖ + |E|·‖Q‖)·‖v‖) per reported eigenvalue.
    pub residuals: Vec<f64>,
}

impl SpectralResult {
    /// Lowest-Re eigenvalue passing the physicality filter.
    pub fn lowest_physical(&self) -> Option<C64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|e| is_physical(*e))
            .min_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
    }
}

/// Build the one-state-per-degree basis of the given parity up to `n_max`.
///
/// Branch selection takes the k-th largest charge at each degree
/// (`branch` = 1 is the default upper branch); quasi-odd degrees without a
/// real charge on that branch are dropped with a note.
pub fn build_basis(
    params: ModelParams,
    n_max: u32,
    parity: QuasiParity,
    branch: u32,
    quad: &QuadratureSpec,
) -> Result<BasisData> {
    let l = params.l();
    let b = params.b();
    match parity {
        QuasiParity::Even => {
            if n_max + 1 < l {
                return Err(Error::Precondition {
                    op: "build_basis",
                    msg: format!(
                        "need N_max >= L - 1 for an even basis; got {n_max} < {}",
                        l - 1
                    ),
                });
            }
        }
        QuasiParity::Odd => {
            if n_max < l {
                return Err(Error::Precondition {
                    op: "build_basis",
                    msg: format!("need N_max >= L for an odd basis; got {n_max} < {l}"),
                });
            }
        }
    }

    let mut states = Vec::new();
    let mut dropped = Vec::new();
    let n_lo = match parity {
        QuasiParity::Even => 0,
        QuasiParity::Odd => l,
    };
    for n in n_lo..=n_max {
        let attempt: Result<SesState> = (|| {
            match parity {
                QuasiParity::Even => {
                    let f = if n + 1 < l {
                        // Low-degree edge: the (n+1)-charge multiplet.
                        let cs = charges::leading_block_charges(n, l, b)?;
                        let idx = cs.len().checked_sub(branch as usize).ok_or(Error::Domain {
                            op: "build_basis",
                            msg: format!("degree {n} hosts no branch {branch}"),
                        })?;
                        cs[idx]
                    } else {
                        charges::quasi_even_charges(n, l, b)?.branch(branch)?.re
                    };
                    SesState::quasi_even(params, n, branch, f)
                }
                QuasiParity::Odd => {
                    let spectrum = charges::quasi_odd_charges(n, l, b)?;
                    let real: Vec<f64> = spectrum
                        .charges
                        .iter()
                        .filter(|c| c.im == 0.0)
                        .map(|c| c.re)
                        .collect();
                    if real.len() < branch as usize {
                        return Err(Error::Domain {
                            op: "build_basis",
                            msg: format!("degree {n}: no real quasi-odd charge on branch {branch}"),
                        });
                    }
                    let f = real[real.len() - branch as usize];
                    SesState::quasi_odd(params, n, branch, f)
                }
            }
        })();
        match attempt {
            Ok(s) => states.push(s),
            Err(e) => dropped.push((n, e.to_string())),
        }
    }
    if states.is_empty() {
        return Err(Error::Precondition {
            op: "build_basis",
            msg: "no valid basis state survived construction".into(),
        });
    }
    let lefts: Vec<SesState> = states
        .iter()
        .map(|s| s.left_partner())
        .collect::<Result<_>>()?;
    let overlaps = assemble_overlaps(&lefts, &states, quad)?;
    let conditioning = overlap_conditioning(&overlaps.q, n_max)?;
    Ok(BasisData {
        params,
        parity,
        states,
        lefts,
        overlaps,
        n_max,
        conditioning,
        dropped,
    })
}

fn to_cmat(m: &[Vec<C64>]) -> CMat {
    CMat::from_rows(m)
}

/// Symmetric diagonal balancing factors 1/√|Q_aa| (head-normalized states
/// differ by orders of magnitude in pairing scale; balancing is a pure
/// similarity on the pencil).
fn balance_factors(q: &[Vec<C64>]) -> Vec<f64> {
    q.iter()
        .enumerate()
        .map(|(i, row)| {
            let d = row[i].norm();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                1.0
            }
        })
        .collect()
}

fn balanced(m: &[Vec<C64>], d: &[f64]) -> CMat {
    let n = m.len();
    let mut out = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[i][j] * (d[i] * d[j]);
        }
    }
    out
}

fn overlap_conditioning(q: &[Vec<C64>], n_max: u32) -> Result<f64> {
    let d = balance_factors(q);
    let qb = balanced(q, &d);
    let lu = Lu::new(&qb).map_err(|msg| Error::SingularOverlap {
        msg: format!("overlap matrix at truncation N_max = {n_max} is exactly singular ({msg})"),
    })?;
    let cond = qb.norm_inf() * lu.inverse().norm_inf();
    if !cond.is_finite() || cond > CONDITIONING_LIMIT {
        return Err(Error::SingularOverlap {
            msg: format!(
                "overlap matrix at truncation N_max = {n_max} is numerically singular \
                 (condition estimate {cond:.3e} > {CONDITIONING_LIMIT:.0e})"
            ),
        });
    }
    Ok(cond)
}

/// The reduced pencil matrix Z_{A,b}(E, F) = (F − F_A)·W_{A,b} − (E − E_A)·Q_{A,b}.
pub fn assemble_z(e: C64, f: f64, basis: &BasisData) -> Vec<Vec<C64>> {
    let n = basis.states.len();
    let mut z = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (a, row) in z.iter_mut().enumerate() {
        let fa = basis.states[a].f;
        let ea = basis.states[a].e;
        for (bb, entry) in row.iter_mut().enumerate() {
            *entry = (f - fa) * basis.overlaps.w[a][bb] - (e - ea) * basis.overlaps.q[a][bb];
        }
    }
    z
}

fn collision_guard(f: f64, basis: &BasisData, op: &'static str) -> Result<()> {
    for s in &basis.states {
        let gap = (f - s.f).abs();
        // Exact equality is well-posed (the QES row simply pins E = E_N);
        // a *near* collision signals a perturbatively ill-conditioned input.
        if gap > 0.0 && gap < 1e-8 {
            return Err(Error::ChargeCollision {
                op,
                msg: format!(
                    "charge F = {f} lies within {gap:.2e} of basis eigencharge F_{{{},{}}} = {}",
                    s.qn.n, s.qn.k, s.f
                ),
            });
        }
    }
    Ok(())
}

/// Solve the right eigenproblem [(F − F_A)W + E_A·Q]·h = E·Q·h and return
/// the `count` eigenvalues closest to the real axis (sorted by |Im|, then
/// by Re), with eigenvectors and pencil residuals.
pub fn solve_nonqes_right(f: f64, basis: &BasisData, count: usize) -> Result<SpectralResult> {
    collision_guard(f, basis, "solve_nonqes_right")?;
    solve_pencil(f, basis, count, false)
}

/// Transposed-structure solve for the left vectors g (gᵀ·Z = 0); the
/// eigenvalue multiset coincides with the right solve exactly.
pub fn solve_nonqes_left(f: f64, basis: &BasisData, count: usize) -> Result<SpectralResult> {
    collision_guard(f, basis, "solve_nonqes_left")?;
    solve_pencil(f, basis, count, true)
}

fn solve_pencil(f: f64, basis: &BasisData, count: usize, left: bool) -> Result<SpectralResult> {
    let n = basis.states.len();
    let d = balance_factors(&basis.overlaps.q);
    let qb = balanced(&basis.overlaps.q, &d);
    // A_{a,b} = (F − F_a)·W_{a,b} + E_a·Q_{a,b}, balanced the same way.
    let mut a_rows = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (a, row) in a_rows.iter_mut().enumerate() {
        let fa = basis.states[a].f;
        let ea = basis.states[a].e;
        for (bb, entry) in row.iter_mut().enumerate() {
            *entry = ((f - fa) * basis.overlaps.w[a][bb] + ea * basis.overlaps.q[a][bb])
                * (d[a] * d[bb]);
        }
    }
    let ab = to_cmat(&a_rows);
    let (ab, qb) = if left {
        (ab.transpose(), qb.transpose())
    } else {
        (ab, qb)
    };
    let lu = Lu::new(&qb).map_err(|msg| Error::SingularOverlap {
        msg: format!("overlap factorization failed: {msg}"),
    })?;
    // M = Q⁻¹·A, column by column.
    let mut m = CMat::zeros(n);
    let mut col = vec![C64::new(0.0, 0.0); n];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = ab[(i, j)];
        }
        let x = lu.solve(&col);
        for (i, v) in x.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    let mut eig = cmat::eigenvalues(&m).map_err(|msg| Error::Eigensolver {
        op: "solve_nonqes",
        msg,
    })?;
    eig.sort_by(|x, y| {
        (x.im.abs(), x.re)
            .partial_cmp(&(y.im.abs(), y.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    eig.truncate(count.max(1).min(n));

    let a_norm = ab.norm_inf();
    let q_norm = qb.norm_inf();
    let mut vectors = Vec::with_capacity(eig.len());
    let mut residuals = Vec::with_capacity(eig.len());
    for &e in &eig {
        let v = cmat::eigenvector(&m, e).map_err(|msg| Error::Eigensolver {
            op: "solve_nonqes",
            msg,
        })?;
        // Pencil residual in the balanced frame.
        let av = ab.matvec(&v);
        let qv = qb.matvec(&v);
        let mut num = 0.0;
        for i in 0..n {
            num += (av[i] - e * qv[i]).norm_sqr();
        }
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        residuals.push(num.sqrt() / ((a_norm + e.norm() * q_norm) * vn).max(f64::MIN_POSITIVE));
        // Undo the balancing on the vector: h = D v (right) / g = D v (left).
        let unbalanced: Vec<C64> = v.iter().zip(d.iter()).map(|(z, s)| z * *s).collect();
        vectors.push(unbalanced);
    }
    let (right_vectors, left_vectors) = if left {
        (Vec::new(), vectors)
    } else {
        (vectors, Vec::new())
    };
    Ok(SpectralResult {
        eigenvalues: eig,
        right_vectors,
        left_vectors,
        residuals,
    })
}

/// ‖Q·Q⁻¹ − I‖ (max entry): a direct probe of the truncated resolution of
/// the identity.
pub fn projector_residual(basis: &BasisData) -> Result<f64> {
    let d = balance_factors(&basis.overlaps.q);
    let qb = balanced(&basis.overlaps.q, &d);
    let lu = Lu::new(&qb).map_err(|msg| Error::SingularOverlap {
        msg: format!("overlap factorization failed: {msg}"),
    })?;
    let inv = lu.inverse();
    let n = qb.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += qb[(i, k)] * inv[(k, j)];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst)
}

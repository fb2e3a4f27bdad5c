//! Eigencharge multiplets of the charged oscillator.
//!
//! The charge F enters the three-term recurrence only through the diagonal
//! B_n = β_n − F, so admissible charges are eigenvalues of tridiagonal
//! blocks with diagonal β_n:
//!
//! * quasi-even: the leading L×L block (rows 0..L−1), whose size is
//!   independent of the polynomial degree N — N enters the entries as a
//!   mere parameter, and every degree carries the same L-plet of charges;
//! * quasi-odd: the trailing block of rows L..N, of size N−L+1, the
//!   classic finite-multiplet situation.
//!
//! The quasi-even block always symmetrizes (its sub/super-diagonal products
//! are positive), so its charges are real and come from a symmetric
//! tridiagonal eigensolve; the quasi-odd block does not, and its charges may
//! come in complex-conjugate pairs.  Every root is polished by Newton's
//! method on the secular determinant before being reported.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{cmat, ctridiag::CTridiag, dd::Dd, symtrid};

/// Quasi-parity of a charge multiplet or state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuasiParity {
    Even,
    Odd,
}

impl std::fmt::Display for QuasiParity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuasiParity::Even => write!(f, "even"),
            QuasiParity::Odd => write!(f, "odd"),
        }
    }
}

/// How a [`ChargeSpectrum`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChargeMethod {
    Eigensolve,
    ClosedForm,
    Cardano,
    Asymptotic,
}

/// The multiplet of eigencharges at fixed (N, L, b), with solver
/// diagnostics.
#[derive(Debug, Clone)]
pub struct ChargeSpectrum {
    pub l: u32,
    pub b: f64,
    pub n: u32,
    pub parity: QuasiParity,
    /// Charges sorted ascending by real part (ties by imaginary part).
    pub charges: Vec<C64>,
    /// Secular-determinant magnitude at each root, normalized by the
    /// product of row max-norms.
    pub residuals: Vec<f64>,
    pub method: ChargeMethod,
    /// Indices of quasi-even charges lying within 1e−10 of a quasi-odd
    /// charge at the same N (the degenerate case where both secular
    /// factors vanish).  `None` when the check was not run (large block).
    pub degenerate_with_odd: Option<Vec<usize>>,
}

impl ChargeSpectrum {
    /// Charge of branch `k` in the convention k = 1 ↔ largest real part
    /// (so that for L = 2 the k = 1 branch is +√(b²+2N)).
    pub fn branch(&self, k: u32) -> Result<C64> {
        let len = self.charges.len();
        if k == 0 || k as usize > len {
            return Err(Error::Domain {
                op: "ChargeSpectrum::branch",
                msg: format!("branch index {k} outside 1..={len}"),
            });
        }
        Ok(self.charges[len - k as usize])
    }

    /// All charges as reals; errors if any has a nonzero imaginary part.
    pub fn real_charges(&self) -> Result<Vec<f64>> {
        let scale = self
            .charges
            .iter()
            .map(|c| c.norm())
            .fold(1.0_f64, f64::max);
        self.charges
            .iter()
            .map(|c| {
                if c.im.abs() <= 1e-10 * scale {
                    Ok(c.re)
                } else {
                    Err(Error::Domain {
                        op: "ChargeSpectrum::real_charges",
                        msg: format!("charge {c} is complex"),
                    })
                }
            })
            .collect()
    }

    pub fn has_complex(&self) -> bool {
        let scale = self
            .charges
            .iter()
            .map(|c| c.norm())
            .fold(1.0_f64, f64::max);
        self.charges.iter().any(|c| c.im.abs() > 1e-10 * scale)
    }
}

/// Largest block dimension for which the quasi-odd dense eigensolve is
/// attempted.
pub const MAX_ODD_BLOCK: usize = 512;
const DEGENERACY_CHECK_LIMIT: usize = 64;

// β_n = −(2n+1−L)·b, the charge-free diagonal.
fn beta(n: u32, l: u32, b: f64) -> f64 {
    -(2.0 * n as f64 + 1.0 - l as f64) * b
}

// A_n with E = E_N substituted: 2(n − N − 1).
fn sub_a(n: u32, big_n: u32) -> f64 {
    2.0 * (n as f64 - big_n as f64 - 1.0)
}

// C_n = (n+1)(n+1−L).
fn sup_c(n: u32, l: u32) -> f64 {
    (n as f64 + 1.0) * (n as f64 + 1.0 - l as f64)
}

/// Secular block over recurrence rows `lo..=hi`, as a complex tridiagonal
/// matrix with diagonal β_n; its eigenvalues are the charges.
fn charge_block(lo: u32, hi: u32, big_n: u32, l: u32, b: f64) -> CTridiag {
    let diag: Vec<C64> = (lo..=hi).map(|n| C64::new(beta(n, l, b), 0.0)).collect();
    let lower: Vec<C64> = (lo + 1..=hi)
        .map(|n| C64::new(sub_a(n, big_n), 0.0))
        .collect();
    let upper: Vec<C64> = (lo..hi).map(|n| C64::new(sup_c(n, l), 0.0)).collect();
    CTridiag::new(diag, lower, upper)
}

/// Product of row max-norms of the secular block at charge `f` — the scale
/// against which determinant residuals are normalized.  Returned as a
/// natural log to dodge overflow at large N.
fn ln_row_scale(block: &CTridiag, f: C64) -> f64 {
    let n = block.dim();
    let mut ln = 0.0;
    for i in 0..n {
        let mut m = (block.diag[i] - f).norm();
        if i > 0 {
            m = m.max(block.lower[i - 1].norm());
        }
        if i + 1 < n {
            m = m.max(block.upper[i].norm());
        }
        ln += m.max(f64::MIN_POSITIVE).ln();
    }
    ln
}

fn normalized_residual(block: &CTridiag, f: C64) -> f64 {
    let s = block.char_poly(f);
    let ln_res = s.value.norm().max(f64::MIN_POSITIVE).ln() + s.log_scale;
    (ln_res - ln_row_scale(block, f)).exp()
}

/// Newton-polish a root of the block's characteristic polynomial; up to 10
/// steps, stopping at relative step < 1e−14.  Falls back to the input if
/// the iteration misbehaves.
fn polish(block: &CTridiag, z0: C64) -> C64 {
    let mut z = z0;
    for _ in 0..10 {
        let s = block.char_poly(z);
        if !(s.newton.re.is_finite() && s.newton.im.is_finite()) {
            break;
        }
        let step = s.newton;
        if step.norm() > 0.1 * (1.0 + z.norm()) {
            break; // far from a root; keep the eigensolver's value
        }
        z -= step;
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Newton polish followed by a Rayleigh-quotient refinement on the block;
/// the candidate with the smaller normalized secular residual wins.
fn polish_deep(block: &CTridiag, z0: C64) -> C64 {
    let z1 = polish(block, z0);
    if let Some((z2, _, _)) = block.rq_eigenpair(z1) {
        if normalized_residual(block, z2) < normalized_residual(block, z1) {
            return z2;
        }
    }
    z1
}

/// Discarded-row defect of the coefficient recurrence at charge `f`: the
/// row-0 relation for quasi-even states, the terminating p_{L−1} value for
/// quasi-odd ones, normalized by the largest coefficient.  Vanishes at
/// eigencharges, and — unlike the secular determinant — is evaluated with
/// exactly the arithmetic used to build the state, so driving it to zero
/// makes the constructed state's residual round-off small.
fn construction_defect(n: u32, l: u32, b: f64, f: C64, parity: QuasiParity) -> C64 {
    let e = crate::model::energy(n, l, b);
    let rc = |row: u32| crate::model::recurrence_coeffs(row, l, b, e);
    let lo = match parity {
        QuasiParity::Even => 1,
        QuasiParity::Odd => l,
    };
    // Compensated arithmetic mirrors the state construction: below ~1e−12
    // the plain f64 recurrence is all rounding noise and the secant would
    // chase phantoms.  Complex charges are carried as (re, im) pairs.
    let mut p_hi = (Dd::ZERO, Dd::ZERO);
    let mut p = (Dd::from(1.0), Dd::ZERO);
    let mut max = 1.0_f64;
    let f_re = Dd::from(f.re);
    let f_im = Dd::from(f.im);
    for row in (lo..=n).rev() {
        let c = rc(row);
        // next = −[(β − F)·p + C·p_hi]/A, complex in Dd components.
        let br = Dd::from(c.beta).sub(f_re);
        let bi = f_im.neg();
        let tre = br.mul(p.0).sub(bi.mul(p.1)).add(Dd::from(c.c).mul(p_hi.0));
        let tim = br.mul(p.1).add(bi.mul(p.0)).add(Dd::from(c.c).mul(p_hi.1));
        let a = Dd::from(-c.a);
        let next = (tre.div(a), tim.div(a));
        p_hi = p;
        p = next;
        max = max.max(C64::new(p.0.to_f64(), p.1.to_f64()).norm());
    }
    match parity {
        QuasiParity::Even => {
            let c0 = rc(0);
            let br = Dd::from(c0.beta).sub(f_re);
            let bi = f_im.neg();
            let dre = br.mul(p.0).sub(bi.mul(p.1)).add(Dd::from(c0.c).mul(p_hi.0));
            let dim = br.mul(p.1).add(bi.mul(p.0)).add(Dd::from(c0.c).mul(p_hi.1));
            C64::new(dre.to_f64(), dim.to_f64()) / max
        }
        // p here is the terminating p_{L−1}; it must vanish.
        QuasiParity::Odd => C64::new(p.0.to_f64(), p.1.to_f64()) / max,
    }
}

/// Secant refinement of an eigencharge on the construction defect.
fn polish_on_construction(n: u32, l: u32, b: f64, f0: C64, parity: QuasiParity) -> C64 {
    let mut f_prev = f0;
    let mut g_prev = construction_defect(n, l, b, f_prev, parity);
    let mut f = f0 + C64::new(1e-9 * (1.0 + f0.norm()), 0.0);
    let mut g = construction_defect(n, l, b, f, parity);
    let mut best = if g_prev.norm() < g.norm() { f_prev } else { f };
    let mut best_g = g_prev.norm().min(g.norm());
    for _ in 0..12 {
        let denom = g - g_prev;
        if denom.norm() == 0.0 {
            break;
        }
        let step = g * (f - f_prev) / denom;
        let f_next = f - step;
        if !(f_next.re.is_finite() && f_next.im.is_finite())
            || (f_next - f0).norm() > 1e-3 * (1.0 + f0.norm())
        {
            break; // keep local: never wander to a different root
        }
        f_prev = f;
        g_prev = g;
        f = f_next;
        g = construction_defect(n, l, b, f, parity);
        if g.norm() < best_g {
            best_g = g.norm();
            best = f;
        }
        if step.norm() <= 1e-16 * (1.0 + f.norm()) {
            break;
        }
    }
    best
}

fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// All L quasi-even charges at degree N: roots of the L×L secular
/// determinant with diagonal (L−1−2n)b − F, sub-diagonal 2(n−N−1) and
/// super-diagonal (n+1)(n+1−L), n = 0..L−1.
pub fn quasi_even_charges(n: u32, l: u32, b: f64) -> Result<ChargeSpectrum> {
    if b < 0.0 {
        // The alternating-sign similarity negates the diagonal and fixes
        // the off-diagonal products, so the charge multiset at −b is the
        // exact negation of the one at b; solving the canonical b >= 0
        // problem makes reflection antisymmetry exact by construction.
        let mut spectrum = quasi_even_charges(n, l, -b)?;
        spectrum.b = b;
        for c in spectrum.charges.iter_mut() {
            *c = -*c;
        }
        spectrum.charges.reverse();
        spectrum.residuals.reverse();
        if let Some(flags) = spectrum.degenerate_with_odd.take() {
            let len = spectrum.charges.len();
            let mut mapped: Vec<usize> = flags.into_iter().map(|i| len - 1 - i).collect();
            mapped.sort_unstable();
            spectrum.degenerate_with_odd = Some(mapped);
        }
        return Ok(spectrum);
    }
    if l < 1 {
        return Err(Error::Precondition {
            op: "quasi_even_charges",
            msg: format!("L must be >= 1, got {l}"),
        });
    }
    if n + 1 < l {
        return Err(Error::Precondition {
            op: "quasi_even_charges",
            msg: format!("need N >= L - 1 (smallest degree hosting the L-plet); got N={n}, L={l}"),
        });
    }
    if l == 1 {
        // The single root is identically zero at every N.
        return Ok(ChargeSpectrum {
            l,
            b,
            n,
            parity: QuasiParity::Even,
            charges: vec![C64::new(0.0, 0.0)],
            residuals: vec![0.0],
            method: ChargeMethod::ClosedForm,
            degenerate_with_odd: degeneracy_flags(&[C64::new(0.0, 0.0)], n, l, b),
        });
    }

    let block = charge_block(0, l - 1, n, l, b);
    // The sub/super products 2(j−N)·(j+1)(j+1−L) are strictly positive for
    // j = 0..L−2 whenever N >= L−1, so a diagonal similarity makes the
    // block symmetric and all charges are real.
    let diag: Vec<f64> = (0..l).map(|j| beta(j, l, b)).collect();
    let off: Vec<f64> = (0..l - 1)
        .map(|j| (sub_a(j + 1, n) * sup_c(j, l)).sqrt())
        .collect();
    let raw = symtrid::eigenvalues(&diag, &off).map_err(|msg| Error::Eigensolver {
        op: "quasi_even_charges",
        msg,
    })?;

    let mut charges: Vec<C64> = raw
        .into_iter()
        .map(|x| {
            let mut z = polish_deep(&block, C64::new(x, 0.0));
            z.im = 0.0; // symmetrizable block: real spectrum
            z
        })
        .collect();
    sort_complex(&mut charges);
    let residuals = charges
        .iter()
        .map(|&f| normalized_residual(&block, f))
        .collect();
    Ok(ChargeSpectrum {
        l,
        b,
        n,
        parity: QuasiParity::Even,
        degenerate_with_odd: degeneracy_flags(&charges, n, l, b),
        charges,
        residuals,
        method: ChargeMethod::Eigensolve,
    })
}

fn degeneracy_flags(even: &[C64], n: u32, l: u32, b: f64) -> Option<Vec<usize>> {
    if n < l {
        return Some(Vec::new()); // no quasi-odd multiplet at this degree
    }
    let m = (n - l + 1) as usize;
    if m > DEGENERACY_CHECK_LIMIT {
        return None;
    }
    let odd = quasi_odd_charges(n, l, b).ok()?;
    let mut flags = Vec::new();
    for (i, fe) in even.iter().enumerate() {
        let tol = 1e-10 * (1.0 + fe.norm());
        if odd.charges.iter().any(|fo| (fe - fo).norm() <= tol) {
            flags.push(i);
        }
    }
    Some(flags)
}

/// Value of the L×L quasi-even secular determinant at charge `f`, via the
/// leading principal-minor recurrence
/// D_k = (β_{k−1} − F)·D_{k−1} − A_{k−1}·C_{k−2}·D_{k−2}; returns D_L.
pub fn secular_value_even(f: f64, n: u32, l: u32, b: f64) -> Result<f64> {
    if l < 1 || n + 1 < l {
        return Err(Error::Precondition {
            op: "secular_value_even",
            msg: format!("need L >= 1 and N >= L - 1; got N={n}, L={l}"),
        });
    }
    let block = charge_block(0, l - 1, n, l, b);
    let s = block.char_poly(C64::new(f, 0.0));
    Ok(s.value.re * s.log_scale.exp())
}

/// All N−L+1 quasi-odd charges at degree N: roots of the secular block with
/// rows n = L..N.  Complex-conjugate pairs are possible and reported.
pub fn quasi_odd_charges(n: u32, l: u32, b: f64) -> Result<ChargeSpectrum> {
    if b < 0.0 {
        let mut spectrum = quasi_odd_charges(n, l, -b)?;
        spectrum.b = b;
        for c in spectrum.charges.iter_mut() {
            *c = -*c;
        }
        spectrum.charges.reverse();
        spectrum.residuals.reverse();
        // Conjugate pairs stay adjacent under negation; restore the
        // (re, im) ordering.
        let mut order: Vec<usize> = (0..spectrum.charges.len()).collect();
        order.sort_by(|&i, &j| {
            let a = spectrum.charges[i];
            let b = spectrum.charges[j];
            (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap()
        });
        spectrum.charges = order.iter().map(|&i| spectrum.charges[i]).collect();
        spectrum.residuals = order.iter().map(|&i| spectrum.residuals[i]).collect();
        return Ok(spectrum);
    }
    if l < 1 {
        return Err(Error::Precondition {
            op: "quasi_odd_charges",
            msg: format!("L must be >= 1, got {l}"),
        });
    }
    if n < l {
        return Err(Error::Precondition {
            op: "quasi_odd_charges",
            msg: format!("need N >= L for a nonempty quasi-odd multiplet; got N={n}, L={l}"),
        });
    }
    let m = (n - l + 1) as usize;
    if m > MAX_ODD_BLOCK {
        return Err(Error::Eigensolver {
            op: "quasi_odd_charges",
            msg: format!("block dimension {m} exceeds the dense-eigensolve limit {MAX_ODD_BLOCK}"),
        });
    }
    let block = charge_block(l, n, n, l, b);
    let charges = if m == 1 {
        vec![C64::new(beta(l, l, b), 0.0)]
    } else {
        // Diagonal similarity with |sub| = |sup| = sqrt|A·C| tames the
        // non-normality of the raw block (its eigenvalue conditioning
        // otherwise grows with the sub/super imbalance).
        let mut dense = cmat::CMat::zeros(m);
        for i in 0..m {
            dense[(i, i)] = block.diag[i];
            if i + 1 < m {
                let prod = block.lower[i].re * block.upper[i].re;
                let s = prod.abs().sqrt();
                if s > 0.0 {
                    let sign = block.upper[i].re.signum();
                    dense[(i, i + 1)] = C64::new(sign * s, 0.0);
                    dense[(i + 1, i)] = C64::new(prod / (sign * s), 0.0);
                } else {
                    dense[(i, i + 1)] = block.upper[i];
                    dense[(i + 1, i)] = block.lower[i];
                }
            }
        }
        let raw = cmat::eigenvalues(&dense).map_err(|msg| Error::Eigensolver {
            op: "quasi_odd_charges",
            msg,
        })?;
        let mut polished: Vec<C64> = raw
            .into_iter()
            .map(|z| {
                let z = polish_deep(&block, z);
                polish_on_construction(n, l, b, z, QuasiParity::Odd)
            })
            .collect();
        // Real-matrix spectrum: scrub per-root machine-level imaginary
        // parts and enforce exact conjugate pairing for the genuinely
        // complex ones.  The threshold is deliberately tight — nearly
        // degenerate pairs may sit a few 1e−10 off the axis, and flattening
        // those would hand out charges that fail the state recurrence.
        let scale = polished.iter().map(|c| c.norm()).fold(1.0_f64, f64::max);
        for c in polished.iter_mut() {
            if c.im.abs() <= 1e-14 * (1.0 + c.re.abs()) {
                c.im = 0.0;
            }
        }
        let mut paired: Vec<C64> = Vec::with_capacity(m);
        let mut used = vec![false; polished.len()];
        for i in 0..polished.len() {
            if used[i] {
                continue;
            }
            let ci = polished[i];
            used[i] = true;
            if ci.im == 0.0 {
                paired.push(ci);
                continue;
            }
            let mut partner = None;
            for (j, cand) in polished.iter().enumerate().skip(i + 1) {
                if !used[j] && (cand - ci.conj()).norm() <= 1e-8 * scale {
                    partner = Some(j);
                    break;
                }
            }
            if let Some(j) = partner {
                used[j] = true;
                let re = 0.5 * (ci.re + polished[j].re);
                let im = 0.5 * (ci.im - polished[j].im).abs();
                paired.push(C64::new(re, im));
                paired.push(C64::new(re, -im));
            } else {
                paired.push(ci);
            }
        }
        paired
    };
    let mut charges = charges;
    sort_complex(&mut charges);
    let residuals = charges
        .iter()
        .map(|&f| normalized_residual(&block, f))
        .collect();
    Ok(ChargeSpectrum {
        l,
        b,
        n,
        parity: QuasiParity::Odd,
        charges,
        residuals,
        method: ChargeMethod::Eigensolve,
        degenerate_with_odd: None,
    })
}

/// Charges of the leading (n+1)×(n+1) block for degrees n < L−1.  Such a
/// degree hosts only n+1 charges (the full L-plet needs N ≥ L−1); these
/// low-degree states complete the variational basis span.
pub(crate) fn leading_block_charges(n: u32, l: u32, b: f64) -> Result<Vec<f64>> {
    if n + 1 >= l {
        return Err(Error::Precondition {
            op: "leading_block_charges",
            msg: format!("only defined for N < L - 1; got N={n}, L={l}"),
        });
    }
    let block = charge_block(0, n, n, l, b);
    if n == 0 {
        return Ok(vec![beta(0, l, b)]);
    }
    let diag: Vec<f64> = (0..=n).map(|j| beta(j, l, b)).collect();
    let off: Vec<f64> = (0..n)
        .map(|j| (sub_a(j + 1, n) * sup_c(j, l)).sqrt())
        .collect();
    let raw = symtrid::eigenvalues(&diag, &off).map_err(|msg| Error::Eigensolver {
        op: "leading_block_charges",
        msg,
    })?;
    Ok(raw
        .into_iter()
        .map(|x| polish(&block, C64::new(x, 0.0)).re)
        .collect())
}

/// Closed form of the two L = 2 charges, ±√(b² + 2N).
pub fn closed_charges_l2(n: i64, b: f64) -> Result<[f64; 2]> {
    let rad = b * b + 2.0 * n as f64;
    if rad < 0.0 {
        return Err(Error::Precondition {
            op: "closed_charges_l2",
            msg: format!("b^2 + 2N = {rad} is negative"),
        });
    }
    let r = rad.sqrt();
    Ok([r, -r])
}

/// The three L = 3 charges in closed (Cardano) form: roots of
/// F³ − (4b² + 8N − 4)·F − 8b = 0, Newton-polished.
pub fn cardano_charges_l3(n: u32, b: f64) -> Result<[C64; 3]> {
    if n < 2 {
        return Err(Error::Precondition {
            op: "cardano_charges_l3",
            msg: format!("need N >= 2 (smallest degree hosting the triplet); got N={n}"),
        });
    }
    let p = -(4.0 * b * b + 8.0 * n as f64 - 4.0);
    let q = -8.0 * b;
    let mut roots = depressed_cubic_roots(p, q);
    // Newton polish on the cubic restores full relative accuracy, which the
    // trigonometric formulas lose on the small root.
    for r in roots.iter_mut() {
        for _ in 0..6 {
            let f = *r * *r * *r + p * *r + C64::new(q, 0.0);
            let df = 3.0 * *r * *r + p;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            *r -= step;
            if step.norm() <= 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
        if r.im.abs() <= 1e-12 * (1.0 + r.norm()) {
            r.im = 0.0;
        }
    }
    sort_complex(&mut roots);
    Ok(roots)
}

/// All three roots of t³ + p t + q (real coefficients).
fn depressed_cubic_roots(p: f64, q: f64) -> [C64; 3] {
    if p == 0.0 && q == 0.0 {
        return [C64::new(0.0, 0.0); 3];
    }
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    if disc >= 0.0 && p < 0.0 {
        // Three real roots: trigonometric form.
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let mut out = [C64::new(0.0, 0.0); 3];
        for (k, o) in out.iter_mut().enumerate() {
            let t = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
            *o = C64::new(t, 0.0);
        }
        out
    } else {
        // One real root via Cardano, then the conjugate pair by deflation.
        let half_q = q / 2.0;
        let inner = (half_q * half_q + p * p * p / 27.0).max(0.0).sqrt();
        let u = if half_q >= 0.0 {
            -(half_q + inner)
        } else {
            -half_q + inner
        };
        let u = u.cbrt();
        let t0 = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        // t³ + p t + q = (t − t0)(t² + t0·t + (p + t0²))
        let c = p + t0 * t0;
        let disc2 = C64::new(t0 * t0 - 4.0 * c, 0.0).sqrt();
        let half = C64::new(0.5, 0.0);
        [
            C64::new(t0, 0.0),
            (C64::new(-t0, 0.0) + disc2) * half,
            (C64::new(-t0, 0.0) - disc2) * half,
        ]
    }
}

/// Invert the L = 3 secular relation for N at a known charge:
/// N = −(4Fb² + 8b − F³ − 4F)/(8F).
pub fn invert_n_l3(f: f64, b: f64) -> Result<f64> {
    if f == 0.0 {
        return Err(Error::Domain {
            op: "invert_n_l3",
            msg: "charge F = 0 (division by zero in the inversion)".into(),
        });
    }
    Ok(-(4.0 * f * b * b + 8.0 * b - f * f * f - 4.0 * f) / (8.0 * f))
}

/// Both branches of the L = 5 degree inversion
/// 512·F·N^± = −768b − 256Fb² + 768F + 40F³ ± 24√(1024b² + 192bF³ + 512F² + F⁶).
/// Returns (N⁺, N⁻) in the order of the ± radical sign.
pub fn invert_n_l5(f: f64, b: f64) -> Result<(f64, f64)> {
    if f == 0.0 {
        return Err(Error::Domain {
            op: "invert_n_l5",
            msg: "charge F = 0 (division by zero in the inversion)".into(),
        });
    }
    let rad = 1024.0 * b * b + 192.0 * b * f.powi(3) + 512.0 * f * f + f.powi(6);
    if rad < 0.0 {
        return Err(Error::Precondition {
            op: "invert_n_l5",
            msg: format!("inner radicand {rad} is negative: no real branch"),
        });
    }
    let base = -768.0 * b - 256.0 * f * b * b + 768.0 * f + 40.0 * f.powi(3);
    let root = 24.0 * rad.sqrt();
    let den = 512.0 * f;
    Ok(((base + root) / den, (base - root) / den))
}

/// Coefficients of the iterated large-N series for the smallest L = 3
/// charge (third fixed-point iterate of F̂ = 1 + x·F̂³).
const SERIES_L3: [f64; 5] = [1.0, 1.0, 3.0, 12.0, 28.0];

/// Large-N series for the smallest-magnitude L = 3 charge:
/// F = −b̂·F̂/N with b̂ = b/(1 + (b²−1)/(2N)), β = b̂³/(8b) and
/// F̂ = Σ_k c_k (β/N³)^k truncated at `order` (c = 1, 1, 3, 12, 28).
pub fn charge_series_l3(n: u32, b: f64, order: u8) -> Result<f64> {
    if order > 4 {
        return Err(Error::Domain {
            op: "charge_series_l3",
            msg: format!("order must be in 0..=4, got {order}"),
        });
    }
    if n == 0 {
        return Err(Error::Precondition {
            op: "charge_series_l3",
            msg: "N must be positive".into(),
        });
    }
    let nf = n as f64;
    let denom = 1.0 + (b * b - 1.0) / (2.0 * nf);
    if denom.abs() < 1e-12 {
        return Err(Error::Precondition {
            op: "charge_series_l3",
            msg: "shift renormalization 1 + (b² − 1)/(2N) vanishes".into(),
        });
    }
    let b_hat = b / denom;
    // β = b̂³/(8b), formed as b̂²·(b̂/b)/8 so that b = 0 stays regular.
    let beta = b_hat * b_hat * (1.0 / denom) / 8.0;
    let x = beta / nf.powi(3);
    if x.abs() >= 0.5 {
        return Err(Error::Precondition {
            op: "charge_series_l3",
            msg: format!("|β|/N³ = {} is not small; series rejected", x.abs()),
        });
    }
    let mut f_hat = 0.0;
    for k in (0..=order as usize).rev() {
        f_hat = f_hat * x + SERIES_L3[k];
    }
    Ok(-b_hat * f_hat / nf)
}

/// Large-N fixed-point evaluation of the four L = 4 charges.
///
/// With M = √(2N + b² − 2) the secular quartic compactifies to
/// (F² − M²)(F² − 9M²) = 36 + 48bF, and writing F = ρM√(1+R) for
/// ρ ∈ {±1, ±3} turns it into the fixed-point relation
///
///   R = 48b√(1+R) / [(8|ρ| − 16 + ρ²R)·ρM³]
///     + 36 / [(8|ρ| − 16 + ρ²R)·ρ²M⁴],
///
/// iterated `iterations` times from R = 0.  Zero iterations therefore
/// returns exactly {−3M, −M, M, 3M}.  Returns the four charges ascending.
pub fn charge_asymptotics_l4(n: u32, b: f64, iterations: u32) -> Result<[f64; 4]> {
    let m2 = 2.0 * n as f64 + b * b - 2.0;
    if m2 <= 0.0 {
        return Err(Error::Precondition {
            op: "charge_asymptotics_l4",
            msg: format!("2N + b² − 2 = {m2} must be positive"),
        });
    }
    let m = m2.sqrt();
    let m3 = m2 * m;
    let m4 = m2 * m2;
    let mut out = [0.0; 4];
    for (slot, rho) in out.iter_mut().zip([-3.0_f64, -1.0, 1.0, 3.0]) {
        let mut r = 0.0_f64;
        for _ in 0..iterations {
            let denom = 8.0 * rho.abs() - 16.0 + rho * rho * r;
            if denom == 0.0 {
                return Err(Error::NonConvergence {
                    op: "charge_asymptotics_l4",
                    msg: format!("vanishing denominator on branch ρ = {rho}"),
                });
            }
            let sqrt1r = (1.0 + r).sqrt();
            r = 48.0 * b * sqrt1r / (denom * rho * m3) + 36.0 / (denom * rho * rho * m4);
            if r <= -1.0 || !r.is_finite() {
                return Err(Error::NonConvergence {
                    op: "charge_asymptotics_l4",
                    msg: format!("correction left (-1, ∞) on branch ρ = {rho}: R = {r}"),
                });
            }
        }
        *slot = rho * m * (1.0 + r).sqrt();
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Assemble a [`ChargeSpectrum`] through one of the closed-form or
/// asymptotic routes instead of the eigensolve, with the same residual
/// normalization.  Supported: `ClosedForm` (L = 1, 2), `Cardano` (L = 3),
/// `Asymptotic` (L = 4, eight fixed-point iterations).
pub fn spectrum_via(method: ChargeMethod, n: u32, l: u32, b: f64) -> Result<ChargeSpectrum> {
    let charges: Vec<C64> = match (method, l) {
        (ChargeMethod::Eigensolve, _) => return quasi_even_charges(n, l, b),
        (ChargeMethod::ClosedForm, 1) => vec![C64::new(0.0, 0.0)],
        (ChargeMethod::ClosedForm, 2) => {
            let [p, m] = closed_charges_l2(n as i64, b)?;
            vec![C64::new(m, 0.0), C64::new(p, 0.0)]
        }
        (ChargeMethod::Cardano, 3) => cardano_charges_l3(n, b)?.to_vec(),
        (ChargeMethod::Asymptotic, 4) => charge_asymptotics_l4(n, b, 8)?
            .iter()
            .map(|&f| C64::new(f, 0.0))
            .collect(),
        (m, _) => {
            return Err(Error::Domain {
                op: "spectrum_via",
                msg: format!("method {m:?} is not available at L = {l}"),
            })
        }
    };
    if n + 1 < l {
        return Err(Error::Precondition {
            op: "spectrum_via",
            msg: format!("need N >= L - 1; got N={n}, L={l}"),
        });
    }
    let block = charge_block(0, l - 1, n, l, b);
    let residuals = charges
        .iter()
        .map(|&f| normalized_residual(&block, f))
        .collect();
    Ok(ChargeSpectrum {
        l,
        b,
        n,
        parity: QuasiParity::Even,
        degenerate_with_odd: degeneracy_flags(&charges, n, l, b),
        charges,
        residuals,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reals(s: &ChargeSpectrum) -> Vec<f64> {
        s.real_charges().unwrap()
    }

    // ---- quasi-even: closed forms, reference values, hand expansions ----

    #[test]
    fn l1_charge_is_zero_at_every_degree() {
        for n in [0, 1, 5, 1000] {
            let s = quasi_even_charges(n, 1, 3.7).unwrap();
            assert_eq!(s.charges.len(), 1);
            assert_eq!(s.charges[0], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn l2_matches_closed_form() {
        let s = quasi_even_charges(3, 2, 5.0).unwrap();
        let expect = 31.0_f64.sqrt();
        let got = reals(&s);
        assert_relative_eq!(got[0], -expect, max_relative = 1e-13);
        assert_relative_eq!(got[1], expect, max_relative = 1e-13);
    }

    #[test]
    fn l3_reference_triplet_small_n() {
        // Known eigencharges at L=3, b=5, N=2 (5 significant digits).
        let s = quasi_even_charges(2, 3, 5.0).unwrap();
        let got = reals(&s);
        let expect = [-10.400, -0.35755, 10.757];
        for (g, e) in got.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, max_relative = 2e-4);
        }
    }

    #[test]
    fn l4_reference_quadruplet() {
        // Known eigencharges at L=4, b=5, N=3.
        let s = quasi_even_charges(3, 4, 5.0).unwrap();
        let got = reals(&s);
        let expect = [-15.611, -5.9279, 4.8887, 16.651];
        for (g, e) in got.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, max_relative = 2e-4);
        }
    }

    #[test]
    fn charge_count_is_degree_independent() {
        for n in [2, 3, 10, 100, 10_000] {
            let s = quasi_even_charges(n, 3, 2.0).unwrap();
            assert_eq!(s.charges.len(), 3);
        }
    }

    #[test]
    fn even_preconditions() {
        assert!(quasi_even_charges(1, 3, 1.0).is_err()); // N < L - 1
        assert!(quasi_even_charges(2, 3, 1.0).is_ok());
        assert!(quasi_even_charges(0, 0, 1.0).is_err());
    }

    #[test]
    fn residuals_are_tiny() {
        let s = quasi_even_charges(50, 5, 3.0).unwrap();
        for r in &s.residuals {
            assert!(*r < 1e-10, "residual {r}");
        }
    }

    // ---- secular determinant ----

    #[test]
    fn secular_value_at_roots_and_hand_value() {
        // L=1: the root is 0 at all N.
        assert_eq!(secular_value_even(0.0, 5, 1, 3.0).unwrap(), 0.0);
        // L=2 root.
        let v = secular_value_even(31.0_f64.sqrt(), 3, 2, 5.0).unwrap();
        assert!(v.abs() < 1e-10);
        // Hand-expanded 2x2: D_2 = F² − b² − 2N.
        let v = secular_value_even(1.0, 3, 2, 5.0).unwrap();
        assert_relative_eq!(v, -30.0, max_relative = 1e-14);
    }

    // ---- quasi-odd ----

    #[test]
    fn odd_single_row_closed_form() {
        // 1x1 block: B_L = -(L+1)b - F = 0.
        let s = quasi_odd_charges(1, 1, 5.0).unwrap();
        assert_eq!(reals(&s), vec![-10.0]);
    }

    #[test]
    fn odd_two_by_two_complex_pair() {
        // Rows 1..2 at L=1, b=0: determinant F² + 4.
        let s = quasi_odd_charges(2, 1, 0.0).unwrap();
        assert_eq!(s.charges.len(), 2);
        assert!(s.has_complex());
        assert!((s.charges[0] - C64::new(0.0, -2.0)).norm() < 1e-10);
        assert!((s.charges[1] - C64::new(0.0, 2.0)).norm() < 1e-10);
    }

    #[test]
    fn odd_degree_count() {
        let s = quasi_odd_charges(7, 3, 2.0).unwrap();
        assert_eq!(s.charges.len(), 5);
    }

    #[test]
    fn odd_preconditions() {
        assert!(quasi_odd_charges(2, 3, 1.0).is_err()); // N < L
        assert!(quasi_odd_charges(3, 3, 1.0).is_ok());
    }

    // ---- closed forms and inversions ----

    #[test]
    fn closed_l2_examples() {
        let [p, m] = closed_charges_l2(3, 5.0).unwrap();
        assert_relative_eq!(p, 31.0_f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m, -(31.0_f64.sqrt()), max_relative = 1e-15);
        assert_eq!(closed_charges_l2(0, 0.0).unwrap(), [0.0, 0.0]);
        let [p, m] = closed_charges_l2(8, 0.0).unwrap();
        assert_eq!((p, m), (4.0, -4.0));
        assert!(closed_charges_l2(-5, 1.0).is_err());
    }

    #[test]
    fn cardano_reference_values() {
        let r = cardano_charges_l3(2, 5.0).unwrap();
        let expect = [-10.400, -0.35755, 10.757];
        for (g, e) in r.iter().zip(expect.iter()) {
            assert!(g.im == 0.0);
            assert_relative_eq!(g.re, e, max_relative = 2e-4);
        }
        let r = cardano_charges_l3(1000, 5.0).unwrap();
        let expect = [-89.975, -0.0049407, 89.98];
        for (g, e) in r.iter().zip(expect.iter()) {
            assert_relative_eq!(g.re, e, max_relative = 2e-3);
        }
    }

    #[test]
    fn cardano_b_zero_hand_expansion() {
        // b = 0 cubic: −F³ + (8N − 4)F, roots {0, ±√(8N−4)}.
        let r = cardano_charges_l3(5, 0.0).unwrap();
        assert!((r[0] - C64::new(-6.0, 0.0)).norm() < 1e-12);
        assert!(r[1].norm() < 1e-12);
        assert!((r[2] - C64::new(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cardano_agrees_with_eigensolve() {
        for (n, b) in [(2u32, 5.0), (7, -3.0), (100, 1.25), (1000, 5.0)] {
            let c = cardano_charges_l3(n, b).unwrap();
            let e = quasi_even_charges(n, 3, b).unwrap();
            for (x, y) in c.iter().zip(e.charges.iter()) {
                assert!(
                    (x - y).norm() <= 1e-10 * (1.0 + y.norm()),
                    "N={n} b={b}: {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn invert_n_l3_round_trips() {
        assert_relative_eq!(invert_n_l3(-0.35755, 5.0).unwrap(), 2.0, epsilon = 1e-3);
        assert_relative_eq!(invert_n_l3(10.757, 5.0).unwrap(), 2.0, epsilon = 1e-3);
        assert_relative_eq!(invert_n_l3(6.0, 0.0).unwrap(), 5.0, epsilon = 1e-12);
        assert!(invert_n_l3(0.0, 1.0).is_err());
        // Round trip through the eigensolve at several (N, b).
        for (n, b) in [(2u32, 5.0), (17, 2.5), (240, -4.0)] {
            for f in reals(&quasi_even_charges(n, 3, b).unwrap()) {
                if f.abs() < 1e-9 {
                    continue;
                }
                assert_relative_eq!(invert_n_l3(f, b).unwrap(), n as f64, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn invert_n_l5_round_trips() {
        for (n, b) in [(6u32, 2.0), (40, 5.0)] {
            for f in reals(&quasi_even_charges(n, 5, b).unwrap()) {
                let (np, nm) = invert_n_l5(f, b).unwrap();
                let best = if (np - n as f64).abs() < (nm - n as f64).abs() {
                    np
                } else {
                    nm
                };
                assert_relative_eq!(best, n as f64, epsilon = 1e-6, max_relative = 1e-9);
            }
        }
        assert!(invert_n_l5(0.0, 1.0).is_err());
    }

    #[test]
    fn invert_n_l5_branch_consistency() {
        // Wherever both branches are real, they are a coherent ordered pair
        // after accounting for the sign of the 512·F denominator.
        for &b in &[-5.0, -1.0, 0.5, 2.0, 5.0] {
            for i in 1..40 {
                let f = -10.0 + i as f64 * 0.5;
                if f.abs() < 1e-9 {
                    continue;
                }
                if let Ok((np, nm)) = invert_n_l5(f, b) {
                    if f > 0.0 {
                        assert!(np >= nm, "b={b} f={f}: {np} < {nm}");
                    } else {
                        assert!(nm >= np, "b={b} f={f}: {nm} < {np}");
                    }
                }
            }
        }
    }

    // ---- large-N asymptotics ----

    #[test]
    fn series_l3_reference_and_leading_order() {
        let f0 = charge_series_l3(1000, 5.0, 0).unwrap();
        assert!((f0 - (-0.0049407)).abs() < 1e-6);
        // Leading estimate -b/N.
        assert!((f0 - (-0.005)).abs() < 2e-4);
    }

    #[test]
    fn series_l3_order2_matches_cardano() {
        let f2 = charge_series_l3(1000, 5.0, 2).unwrap();
        let roots = cardano_charges_l3(1000, 5.0).unwrap();
        let smallest = roots
            .iter()
            .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        assert!((f2 - smallest.re).abs() < 1e-12, "{f2} vs {}", smallest.re);
    }

    #[test]
    fn series_l3_guard() {
        assert!(charge_series_l3(0, 1.0, 2).is_err());
        assert!(charge_series_l3(10, 1.0, 5).is_err()); // order out of range
                                                        // β/N³ = b²/(2N + b² − 1)³ stays below 0.149 for every N >= 1 and
                                                        // real b, so the smallness guard never rejects a valid degree.
        for n in 1..6u32 {
            for i in 0..60 {
                let b = -6.0 + 0.2 * i as f64;
                assert!(charge_series_l3(n, b, 4).is_ok(), "N={n} b={b}");
            }
        }
    }

    #[test]
    fn asymptotics_l4_zero_iterations_are_rho_m() {
        let n = 300;
        let b = 5.0;
        let m = (2.0 * n as f64 + b * b - 2.0).sqrt();
        let f = charge_asymptotics_l4(n, b, 0).unwrap();
        let expect = [-3.0 * m, -m, m, 3.0 * m];
        for (g, e) in f.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, max_relative = 1e-15);
        }
    }

    #[test]
    fn asymptotics_l4_converges_to_eigensolve() {
        let f = charge_asymptotics_l4(300, 5.0, 8).unwrap();
        let e = reals(&quasi_even_charges(300, 4, 5.0).unwrap());
        for (g, x) in f.iter().zip(e.iter()) {
            assert!((g - x).abs() < 1e-6, "{g} vs {x}");
        }
    }

    #[test]
    fn asymptotics_l4_reference_large_n() {
        let f = charge_asymptotics_l4(30_000, 5.0, 8).unwrap();
        let expect = [-734.99, -245.00, 245.00, 734.99];
        for (g, e) in f.iter().zip(expect.iter()) {
            assert_relative_eq!(g, e, max_relative = 2e-4);
        }
    }

    // ---- invariants ----

    #[test]
    fn trace_identity_even() {
        for (n, l, b) in [(5u32, 4u32, 3.0), (100, 6, -2.0), (10_000, 8, 9.5)] {
            let s = quasi_even_charges(n, l, b).unwrap();
            let sum: C64 = s.charges.iter().sum();
            let max = s.charges.iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(sum.norm() <= 1e-9 * max.max(1.0), "sum {sum} at max {max}");
        }
    }

    #[test]
    fn reflection_antisymmetry_both_parities() {
        let check = |a: &[C64], b: &[C64]| {
            let mut neg: Vec<C64> = b.iter().map(|c| -c).collect();
            sort_complex(&mut neg);
            let scale = a.iter().map(|c| c.norm()).fold(1.0, f64::max);
            for (x, y) in a.iter().zip(neg.iter()) {
                assert!((x - y).norm() <= 1e-10 * scale, "{x} vs {y}");
            }
        };
        let p = quasi_even_charges(9, 4, 2.5).unwrap();
        let m = quasi_even_charges(9, 4, -2.5).unwrap();
        check(&p.charges, &m.charges);
        let p = quasi_odd_charges(9, 2, 1.5).unwrap();
        let m = quasi_odd_charges(9, 2, -1.5).unwrap();
        check(&p.charges, &m.charges);
    }

    #[test]
    fn largest_l4_charge_grows_with_n() {
        let mut last = f64::MIN;
        for n in [3u32, 30, 300, 3000, 30_000] {
            let s = quasi_even_charges(n, 4, 5.0).unwrap();
            let top = reals(&s)[3];
            assert!(top > last);
            last = top;
        }
    }

    #[test]
    fn branch_indexing_convention() {
        let s = quasi_even_charges(3, 2, 5.0).unwrap();
        // k = 1 is the largest (positive) branch.
        assert!(s.branch(1).unwrap().re > 0.0);
        assert!(s.branch(2).unwrap().re < 0.0);
        assert!(s.branch(0).is_err());
        assert!(s.branch(3).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            // Count is L at every degree, the trace vanishes, and the
            // multiset is antisymmetric under b -> -b.
            #[test]
            fn even_multiplet_invariants(l in 1u32..=8, dn in 0u32..2000, b in -10.0f64..10.0) {
                let n = l - 1 + dn;
                let s = quasi_even_charges(n, l, b).unwrap();
                prop_assert_eq!(s.charges.len(), l as usize);
                let sum: C64 = s.charges.iter().sum();
                let max = s.charges.iter().map(|c| c.norm()).fold(1e-300, f64::max);
                prop_assert!(sum.norm() <= 1e-9 * max);
                let m = quasi_even_charges(n, l, -b).unwrap();
                for (x, y) in s.charges.iter().zip(m.charges.iter().rev()) {
                    prop_assert!((x + y).norm() <= 1e-10 * max);
                }
            }

            // Closed forms agree with the eigensolve on their domains.
            #[test]
            fn closed_forms_match_eigensolve(n in 2u32..1000, b in -10.0f64..10.0) {
                let [p2, m2] = closed_charges_l2(n as i64, b).unwrap();
                let e2 = quasi_even_charges(n, 2, b).unwrap();
                prop_assert!((e2.charges[1].re - p2).abs() <= 1e-12 * p2.abs().max(1e-12));
                prop_assert!((e2.charges[0].re - m2).abs() <= 1e-12 * p2.abs().max(1e-12));
                let c3 = cardano_charges_l3(n, b).unwrap();
                let e3 = quasi_even_charges(n, 3, b).unwrap();
                for (x, y) in c3.iter().zip(e3.charges.iter()) {
                    prop_assert!((x - y).norm() <= 1e-10 * y.norm() + 1e-13);
                }
            }

            // The degree inversion recovers N from any nonzero L = 3 root.
            #[test]
            fn l3_inversion_round_trip(n in 2u32..5000, b in -10.0f64..10.0) {
                for f in quasi_even_charges(n, 3, b).unwrap().real_charges().unwrap() {
                    if f.abs() < 1e-6 {
                        continue;
                    }
                    let back = invert_n_l3(f, b).unwrap();
                    prop_assert!((back - n as f64).abs() <= 1e-6 * (1.0 + n as f64),
                                 "N={n} b={b} f={f}: {back}");
                }
            }
        }
    }

    #[test]
    fn spectrum_via_closed_routes() {
        // Each route reports its method tag and near-zero residuals.
        let s = spectrum_via(ChargeMethod::ClosedForm, 7, 2, 3.0).unwrap();
        assert_eq!(s.method, ChargeMethod::ClosedForm);
        let e = quasi_even_charges(7, 2, 3.0).unwrap();
        for (a, b) in s.charges.iter().zip(e.charges.iter()) {
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
        let s = spectrum_via(ChargeMethod::Cardano, 9, 3, 2.0).unwrap();
        assert_eq!(s.method, ChargeMethod::Cardano);
        assert!(s.residuals.iter().all(|r| *r < 1e-10));
        let s = spectrum_via(ChargeMethod::Asymptotic, 300, 4, 5.0).unwrap();
        assert_eq!(s.method, ChargeMethod::Asymptotic);
        let e = quasi_even_charges(300, 4, 5.0).unwrap();
        for (a, b) in s.charges.iter().zip(e.charges.iter()) {
            assert!((a - b).norm() <= 1e-6);
        }
        // Route/label mismatches are rejected.
        assert!(spectrum_via(ChargeMethod::Cardano, 9, 2, 2.0).is_err());
        assert!(spectrum_via(ChargeMethod::ClosedForm, 9, 4, 2.0).is_err());
    }

    #[test]
    fn degenerate_even_odd_charge_is_flagged() {
        // At b = 0 and odd block dimension odd, the quasi-odd multiplet
        // contains an exact zero, colliding with the L = 1 quasi-even
        // charge: the diagnostic must flag index 0.
        let s = quasi_even_charges(3, 1, 0.0).unwrap();
        assert_eq!(s.degenerate_with_odd, Some(vec![0]));
        // A generic shift separates the families again.
        let s = quasi_even_charges(3, 1, 1.5).unwrap();
        assert_eq!(s.degenerate_with_odd, Some(vec![]));
        // Beyond the odd-block limit the check is skipped, not guessed.
        let s = quasi_even_charges(10_000, 1, 1.5).unwrap();
        assert_eq!(s.degenerate_with_odd, None);
    }

    #[test]
    fn leading_block_low_degree_charges() {
        // L=2, N=0: single charge F = b.
        let c = leading_block_charges(0, 2, 5.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_relative_eq!(c[0], 5.0, max_relative = 1e-14);
        // L=3, N=1: F = b ± sqrt(b² + 4) (2x2 block, hand-expanded).
        let c = leading_block_charges(1, 3, 2.0).unwrap();
        assert_eq!(c.len(), 2);
        let s = (4.0f64 + 4.0).sqrt();
        assert_relative_eq!(c[0], 2.0 - s, max_relative = 1e-12);
        assert_relative_eq!(c[1], 2.0 + s, max_relative = 1e-12);
    }
}

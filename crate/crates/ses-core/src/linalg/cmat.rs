//! Small dense complex matrices: LU with partial pivoting, Hessenberg
//! reduction, shifted QR eigenvalues, and inverse iteration for vectors.
//!
//! Everything here targets the modest dimensions of truncated bases and
//! secular blocks (tens, not thousands); clarity over blocking.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>, // row-major, square
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    #[cfg(test)]
    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix expected");
        let mut m = CMat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> CMat {
        let mut t = CMat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    #[allow(dead_code)]
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    lu: CMat,
    piv: Vec<usize>,
    /// Smallest and largest pivot magnitudes, for conditioning probes.
    #[allow(dead_code)]
    pub min_pivot: f64,
    #[allow(dead_code)]
    pub max_pivot: f64,
}

impl Lu {
    pub fn new(a: &CMat) -> Result<Lu, String> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        let mut max_pivot = 0.0_f64;
        for k in 0..n {
            // Pivot search.
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(format!("exactly singular at column {k}"));
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                piv.swap(k, p);
            }
            min_pivot = min_pivot.min(best);
            max_pivot = max_pivot.max(best);
            let inv = C64::new(1.0, 0.0) / lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] * inv;
                lu[(i, k)] = m;
                for j in k + 1..n {
                    let sub = m * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(Lu {
            lu,
            piv,
            min_pivot,
            max_pivot,
        })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.dim();
        let mut x: Vec<C64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    /// Explicit inverse (fine at these dimensions).
    pub fn inverse(&self) -> CMat {
        let n = self.lu.dim();
        let mut inv = CMat::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = C64::new(0.0, 0.0);
        }
        inv
    }
}

/// In-place Householder reduction to upper Hessenberg form (similarity).
fn hessenberg_inplace(a: &mut CMat) {
    let n = a.dim();
    for k in 0..n.saturating_sub(2) {
        // Build reflector for column k below the subdiagonal.
        let mut xnorm = 0.0;
        for i in k + 1..n {
            xnorm += a[(i, k)].norm_sqr();
        }
        let xnorm = xnorm.sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, normalized.
        let mut v = vec![C64::new(0.0, 0.0); n];
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= vnorm;
        }
        // A <- (I - 2 v v^H) A
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in k + 1..n {
                dot += v[i].conj() * a[(i, j)];
            }
            let dot = dot * 2.0;
            for i in k + 1..n {
                let sub = v[i] * dot;
                a[(i, j)] -= sub;
            }
        }
        // A <- A (I - 2 v v^H)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k + 1..n {
                dot += a[(i, j)] * v[j];
            }
            let dot = dot * 2.0;
            for j in k + 1..n {
                let sub = dot * v[j].conj();
                a[(i, j)] -= sub;
            }
        }
        // Zero out the annihilated entries explicitly.
        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Complex Givens rotation (c real) such that
/// [c, s; -conj(s), c] [f; g] = [r; 0].
fn givens(f: C64, g: C64) -> (f64, C64, C64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0), f);
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn, C64::new(gn, 0.0));
    }
    let d = fn_.hypot(gn);
    let c = fn_ / d;
    let s = (f / fn_) * (g.conj() / d);
    let r = (f / fn_) * d;
    (c, s, r)
}

/// Eigenvalues of a general complex matrix: Householder Hessenberg reduction
/// followed by explicit single-shift QR with Wilkinson shifts.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>, String> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = a.clone();
    hessenberg_inplace(&mut h);
    let scale = h.norm_inf().max(f64::MIN_POSITIVE);
    let mut eig = vec![C64::new(0.0, 0.0); n];
    let mut hi = n - 1;
    let mut total_iters = 0usize;
    let max_total = 80 * n + 200;
    'outer: loop {
        // Deflate converged 1x1 blocks from the bottom.
        loop {
            if hi == 0 {
                eig[0] = h[(0, 0)];
                break 'outer;
            }
            let sub = h[(hi, hi - 1)].norm();
            let local = h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm();
            if sub <= f64::EPSILON * (local + scale) {
                eig[hi] = h[(hi, hi)];
                hi -= 1;
            } else {
                break;
            }
        }
        // Find the start of the active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let local = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * (local + scale) {
                break;
            }
            lo -= 1;
        }
        total_iters += 1;
        if total_iters > max_total {
            return Err("QR iteration exceeded the iteration budget".into());
        }
        // Wilkinson shift from the trailing 2x2; exceptional shift to break cycles.
        let shift = if total_iters.is_multiple_of(17) {
            h[(hi, hi)] + C64::new(1.5 * h[(hi, hi - 1)].norm(), 0.5 * h[(hi, hi - 1)].norm())
        } else {
            let a11 = h[(hi - 1, hi - 1)];
            let a12 = h[(hi - 1, hi)];
            let a21 = h[(hi, hi - 1)];
            let a22 = h[(hi, hi)];
            let tr2 = (a11 + a22) * 0.5;
            let det = a11 * a22 - a12 * a21;
            let disc = (tr2 * tr2 - det).sqrt();
            let e1 = tr2 + disc;
            let e2 = tr2 - disc;
            if (e1 - a22).norm() <= (e2 - a22).norm() {
                e1
            } else {
                e2
            }
        };
        // Explicit QR step on the active block: H - shift = QR, H <- RQ + shift.
        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s, r) = givens(h[(k, k)], h[(k + 1, k)]);
            h[(k, k)] = r;
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            for j in k + 1..=hi {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1 * c + t2 * s;
                h[(k + 1, j)] = -s.conj() * t1 + t2 * c;
            }
            rots.push((c, s));
        }
        for (k, &(c, s)) in rots.iter().enumerate() {
            let k = lo + k;
            for i in lo..=(k + 1).min(hi) {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1 * c + t2 * s.conj();
                h[(i, k + 1)] = -s * t1 + t2 * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eig)
}

/// One eigenvector of `a` for the (approximate) eigenvalue `lambda`, by
/// inverse iteration on a slightly perturbed shift.
pub fn eigenvector(a: &CMat, lambda: C64) -> Result<Vec<C64>, String> {
    let n = a.dim();
    let scale = a.norm_inf().max(1.0);
    let mut bump = 1e-13 * scale;
    for _attempt in 0..6 {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= lambda + C64::new(bump, 0.5 * bump);
        }
        if let Ok(lu) = Lu::new(&shifted) {
            // Deterministic pseudo-random start resists orthogonal starts.
            let mut v: Vec<C64> = (0..n)
                .map(|i| {
                    let t = (i as f64 + 1.0) * 0.7390851332151607;
                    C64::new(t.sin() + 0.3, t.cos())
                })
                .collect();
            for _ in 0..4 {
                let w = lu.solve(&v);
                let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if !norm.is_finite() || norm == 0.0 {
                    break;
                }
                v = w.into_iter().map(|z| z / norm).collect();
            }
            // Accept if the residual is small.
            let av = a.matvec(&v);
            let mut res = 0.0;
            for i in 0..n {
                res += (av[i] - lambda * v[i]).norm_sqr();
            }
            if res.sqrt() <= 1e-8 * scale {
                return Ok(v);
            }
        }
        bump *= 32.0;
    }
    Err("inverse iteration failed to produce a small residual".into())
}

//! Eigenvalues of a real symmetric tridiagonal matrix by implicit QL with
//! Wilkinson shifts.  Eigenvalues only; the callers polish roots themselves.

/// Returns all eigenvalues of the symmetric tridiagonal matrix with main
/// diagonal `diag` and off-diagonal `off` (len = n − 1), in ascending order.
pub fn eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>, String> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n > 1 && off.len() + 1 != n {
        return Err(format!(
            "off-diagonal length {} does not match dimension {}",
            off.len(),
            n
        ));
    }
    let mut d = diag.to_vec();
    // e padded with a trailing zero, as in the classic QL formulation.
    let mut e = vec![0.0; n];
    if n > 1 {
        e[..n - 1].copy_from_slice(off);
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find the split point: first m >= l with negligible e[m].
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break; // d[l] has converged
            }
            iter += 1;
            if iter > 60 {
                return Err(format!("QL iteration failed to converge at index {l}"));
            }
            // Shift from the leading 2x2 of the active block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Recover from a vanishing rotation: deflate and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

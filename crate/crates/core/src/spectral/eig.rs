//! Eigenvalues of small dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form, then single-shift
//! complex QR sweeps (Givens rotations, Wilkinson shift, exceptional shift
//! every tenth stalled iteration) with deflation of negligible
//! subdiagonal entries. Only eigenvalues are produced.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Result, WalkError};

const MAX_ITER_PER_EIGENVALUE: usize = 60;

pub fn eigenvalues(matrix: &CMatrix) -> Result<Vec<Complex64>> {
    let n = matrix.size();
    let mut h = matrix.clone();
    hessenberg_in_place(&mut h);

    let mut values = vec![Complex64::new(0.0, 0.0); n];
    if n == 0 {
        return Ok(values);
    }
    let mut hi = n - 1;
    let mut iter = 0;
    let mut total_iter = 0;
    loop {
        if hi == 0 {
            values[0] = h[(0, 0)];
            break;
        }
        // find the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            values[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total_iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE || total_iter > MAX_ITER_PER_EIGENVALUE * n {
            return Err(WalkError::EigenNoConvergence(n));
        }
        let shift = if iter % 10 == 0 {
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_sweep(&mut h, lo, hi, shift);
    }
    Ok(values)
}

fn wilkinson_shift(h: &CMatrix, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (e1, e2) = (mid + disc, mid - disc);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// One shifted QR step restricted to the active window `lo..=hi`.
fn qr_sweep(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = x.norm().hypot(y.norm());
        let (c, s) = if r == 0.0 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (x / r, y / r)
        };
        // rows k, k+1 ← G · rows, G = [[c̄, s̄], [−s, c]]
        for j in k..=hi {
            let a = h[(k, j)];
            let b = h[(k + 1, j)];
            h[(k, j)] = c.conj() * a + s.conj() * b;
            h[(k + 1, j)] = -s * a + c * b;
        }
        h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        rotations.push((c, s));
    }
    for (offset, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + offset;
        // columns k, k+1 ← columns · G†
        for i in lo..=(k + 1).min(hi) {
            let a = h[(i, k)];
            let b = h[(i, k + 1)];
            h[(i, k)] = a * c + b * s;
            h[(i, k + 1)] = -a * s.conj() + b * c.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

fn hessenberg_in_place(a: &mut CMatrix) {
    let n = a.size();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x;
        v[0] += phase * norm;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A ← (I − 2vv†) A
        for j in 0..n {
            let dot: Complex64 = (k + 1..n).zip(&v).map(|(i, vi)| vi.conj() * a[(i, j)]).sum();
            for (i, vi) in (k + 1..n).zip(&v) {
                a[(i, j)] -= *vi * dot * 2.0;
            }
        }
        // A ← A (I − 2vv†)
        for i in 0..n {
            let dot: Complex64 = (k + 1..n).zip(&v).map(|(j, vj)| a[(i, j)] * vj).sum();
            for (j, vj) in (k + 1..n).zip(&v) {
                a[(i, j)] -= dot * vj.conj() * 2.0;
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

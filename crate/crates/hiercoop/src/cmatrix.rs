//! Dense complex matrices sized for the workloads here: log-det of
//! `I + c HH*` via Cholesky (MIMO mutual information) and the largest
//! singular value via power iteration (equalized cut matrices).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMatrix {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for k in 0..ncols {
                data.push(f(i, k));
            }
        }
        CMatrix { nrows, ncols, data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.data[i * self.ncols + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, v: Complex64) {
        self.data[i * self.ncols + k] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for i in 0..self.nrows {
            let row = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
    }

    /// y = A* x  (conjugate transpose times x)
    pub fn adjoint_mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for v in y.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for i in 0..self.nrows {
            let row = self.row(i);
            let xi = x[i];
            for (k, a) in row.iter().enumerate() {
                y[k] += a.conj() * xi;
            }
        }
    }

    /// Gram matrix of the smaller side: H H* if nrows <= ncols, else H* H.
    /// The result is Hermitian with the same nonzero spectrum either way.
    pub fn small_gram(&self) -> CMatrix {
        let m = self.nrows.min(self.ncols);
        let mut g = CMatrix::zeros(m, m);
        if self.nrows <= self.ncols {
            for i in 0..m {
                for j in 0..=i {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..self.ncols {
                        acc += self.get(i, k) * self.get(j, k).conj();
                    }
                    g.set(i, j, acc);
                    g.set(j, i, acc.conj());
                }
            }
        } else {
            for i in 0..m {
                for j in 0..=i {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in 0..self.nrows {
                        acc += self.get(k, i).conj() * self.get(k, j);
                    }
                    g.set(i, j, acc);
                    g.set(j, i, acc.conj());
                }
            }
        }
        g
    }

    /// Matrix product A B.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = CMatrix::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.get(i, k);
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let brow = other.row(k);
                let orow = &mut out.data[i * other.ncols..(i + 1) * other.ncols];
                for (o, b) in orow.iter_mut().zip(brow.iter()) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.nrows.min(self.ncols)).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// log2 det(I + c * H H*), computed on the smaller Gram side by complex
/// Cholesky. The argument is Hermitian positive definite for c >= 0, so the
/// factorization is the numerically stable route.
pub fn logdet2_eye_plus_gram(h: &CMatrix, c: f64) -> Result<f64> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::numeric(format!("scale {c} must be finite and nonnegative")));
    }
    if !h.is_finite() {
        return Err(Error::numeric("matrix has non-finite entries".to_string()));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    let mut g = h.small_gram();
    let m = g.nrows();
    for i in 0..m {
        for j in 0..m {
            let mut v = g.get(i, j) * c;
            if i == j {
                v += Complex64::new(1.0, 0.0);
            }
            g.set(i, j, v);
        }
    }
    cholesky_logdet2(&mut g)
}

/// In-place Cholesky of a Hermitian positive definite matrix; returns
/// 2 * sum log2 of the diagonal pivots.
fn cholesky_logdet2(a: &mut CMatrix) -> Result<f64> {
    let n = a.nrows();
    let mut logdet = 0.0f64;
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= a.get(j, k).norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::numeric(format!("Cholesky pivot {d} at index {j} is not positive")));
        }
        let l = d.sqrt();
        logdet += d.log2();
        a.set(j, j, Complex64::new(l, 0.0));
        for i in (j + 1)..n {
            let mut v = a.get(i, j);
            for k in 0..j {
                v -= a.get(i, k) * a.get(j, k).conj();
            }
            a.set(i, j, v / l);
        }
    }
    Ok(logdet)
}

/// Largest singular value squared of H by power iteration on H*H, to the
/// given relative tolerance. Deterministic start vector; errors out if the
/// Rayleigh quotient has not settled within `max_iters`.
pub fn spectral_norm_sq(h: &CMatrix, rel_tol: f64, max_iters: usize) -> Result<f64> {
    if h.nrows() == 0 || h.ncols() == 0 {
        return Err(Error::invalid("empty matrix".to_string()));
    }
    if !h.is_finite() {
        return Err(Error::numeric("matrix has non-finite entries".to_string()));
    }
    let n = h.ncols();
    // Deterministic, fully dense start: irrational phases avoid starting
    // orthogonal to the top singular vector for structured matrices.
    let mut v: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 0.7548776662 * (k as f64 + 0.5)))
        .collect();
    normalize(&mut v);
    let mut hv = vec![Complex64::new(0.0, 0.0); h.nrows()];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut lambda_prev = 0.0f64;
    for iter in 0..max_iters {
        h.mul_vec(&v, &mut hv);
        // Rayleigh quotient ||Hv||^2 for unit v.
        let lambda: f64 = hv.iter().map(|z| z.norm_sqr()).sum();
        if lambda == 0.0 {
            return Ok(0.0);
        }
        h.adjoint_mul_vec(&hv, &mut w);
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
        if iter > 0 && (lambda - lambda_prev).abs() <= rel_tol * lambda {
            return Ok(lambda);
        }
        lambda_prev = lambda;
    }
    Err(Error::numeric(format!(
        "power iteration did not converge in {max_iters} iterations"
    )))
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn logdet_scalar_matches_closed_form() {
        // 1x1 |h| = 1: log2 det(I + c hh*) = log2(1 + c)
        let h = CMatrix::from_fn(1, 1, |_, _| c(0.6, 0.8));
        let v = logdet2_eye_plus_gram(&h, 3.0).unwrap();
        assert!((v - 4.0f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn logdet_2x2_matches_direct_determinant() {
        let h = CMatrix::from_fn(2, 2, |i, k| c(0.3 + i as f64, 0.2 - k as f64));
        let s = 0.7;
        // Direct 2x2 determinant of I + s H H*.
        let g = h.small_gram();
        let a = c(1.0, 0.0) + g.get(0, 0) * s;
        let b = g.get(0, 1) * s;
        let d = c(1.0, 0.0) + g.get(1, 1) * s;
        let det = (a * d - b * b.conj()).re;
        let v = logdet2_eye_plus_gram(&h, s).unwrap();
        assert!((v - det.log2()).abs() < 1e-10);
    }

    #[test]
    fn logdet_uses_smaller_side() {
        // Tall vs wide orientation must agree: det(I + HH*) = det(I + H*H).
        let tall = CMatrix::from_fn(5, 2, |i, k| c((i + k) as f64 * 0.1, (i as f64) * 0.05));
        let wide = CMatrix::from_fn(2, 5, |i, k| tall.get(k, i).conj());
        let a = logdet2_eye_plus_gram(&tall, 0.9).unwrap();
        let b = logdet2_eye_plus_gram(&wide, 0.9).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_of_unit_entry_is_one() {
        let h = CMatrix::from_fn(1, 1, |_, _| Complex64::from_polar(1.0, 1.1));
        let v = spectral_norm_sq(&h, 1e-10, 1000).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_matches_hand_computed_rank_one() {
        // H = u v* has ||H||^2 = |u|^2 |v|^2.
        let u = [c(1.0, 0.0), c(0.0, 2.0)];
        let v = [c(3.0, 0.0), c(0.0, -1.0), c(1.0, 1.0)];
        let h = CMatrix::from_fn(2, 3, |i, k| u[i] * v[k].conj());
        let expect = u.iter().map(|z| z.norm_sqr()).sum::<f64>() * v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let got = spectral_norm_sq(&h, 1e-12, 10_000).unwrap();
        assert!((got - expect).abs() < 1e-6 * expect);
    }

    #[test]
    fn spectral_norm_bounded_by_trace_moment_roots() {
        // ||H||^2 <= Tr((H*H)^l)^(1/l) per realization.
        let h = CMatrix::from_fn(4, 3, |i, k| Complex64::from_polar(1.0 / (1 + i + k) as f64, (i * 7 + k * 3) as f64));
        let top = spectral_norm_sq(&h, 1e-12, 10_000).unwrap();
        let g = h.small_gram();
        let g2 = g.matmul(&g);
        let g3 = g2.matmul(&g);
        for (l, tr) in [(1, g.trace_re()), (2, g2.trace_re()), (3, g3.trace_re())] {
            assert!(top <= tr.powf(1.0 / l as f64) + 1e-9);
        }
    }
}

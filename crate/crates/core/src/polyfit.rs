//! Least-squares polynomial fit in a Chebyshev basis on the sample interval.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

fn chebyshev_row(t: f64, n: usize, row: &mut [f64]) {
    row[0] = 1.0;
    if n > 1 {
        row[1] = t;
    }
    for j in 2..n {
        row[j] = 2.0 * t * row[j - 1] - row[j - 2];
    }
}

impl Polynomial {
    /// Fits a polynomial of `degree` to `(xs, ys)` by Householder QR.
    pub fn fit(xs: &[f64], ys: &[f64], degree: usize) -> Result<Self> {
        let n = degree + 1;
        if xs.len() != ys.len() || xs.len() < n {
            return Err(Error::domain(format!(
                "degree-{degree} fit needs at least {n} points, got {}",
                xs.len()
            )));
        }
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            return Err(Error::domain("fit abscissae must span a nonzero interval"));
        }
        let m = xs.len();
        // Column-major design matrix.
        let mut a = vec![0.0; m * n];
        let mut row = vec![0.0; n];
        for (i, &x) in xs.iter().enumerate() {
            chebyshev_row(scale(x, lo, hi), n, &mut row);
            for j in 0..n {
                a[j * m + i] = row[j];
            }
        }
        let mut b = ys.to_vec();
        for k in 0..n {
            let norm = (k..m).map(|i| a[k * m + i].powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::domain("rank-deficient polynomial fit"));
            }
            let alpha = if a[k * m + k] > 0.0 { -norm } else { norm };
            let mut v: Vec<f64> = (k..m).map(|i| a[k * m + i]).collect();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            for j in k..n {
                let dot: f64 = (k..m).map(|i| v[i - k] * a[j * m + i]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    a[j * m + i] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..m).map(|i| v[i - k] * b[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                b[i] -= f * v[i - k];
            }
        }
        let mut coeffs = vec![0.0; n];
        for k in (0..n).rev() {
            let tail: f64 = (k + 1..n).map(|j| a[j * m + k] * coeffs[j]).sum();
            coeffs[k] = (b[k] - tail) / a[k * m + k];
        }
        Ok(Self { lo, hi, coeffs })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut row = vec![0.0; self.coeffs.len()];
        chebyshev_row(scale(x, self.lo, self.hi), self.coeffs.len(), &mut row);
        row.iter().zip(&self.coeffs).map(|(r, c)| r * c).sum()
    }
}

fn scale(x: f64, lo: f64, hi: f64) -> f64 {
    (2.0 * x - lo - hi) / (hi - lo)
}

//! `C²` sampling of grid fields: tensor-product cubic B-spline interpolation
//! through the cell values. The profile is continued oddly across the axis
//! and by zeros past the outer edges.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{CylGrid, Field};

/// Zero cells appended past each outer edge before prefiltering.
const PAD: usize = 4;

#[derive(Debug, Clone)]
pub struct SplineField {
    grid: Arc<CylGrid>,
    coef: Vec<f64>,
    n_a: usize,
    n_b: usize,
}

/// Solves `(c_{k−1} + 4c_k + c_{k+1})/6 = y_k` with zero end coefficients,
/// in place.
fn prefilter(y: &mut [f64], scratch: &mut Vec<f64>) {
    let n = y.len();
    scratch.clear();
    scratch.resize(n, 0.0);
    // Thomas sweep on the constant tridiagonal (1, 4, 1)
    scratch[0] = 0.25;
    y[0] *= 1.5;
    for k in 1..n {
        let m = 4.0 - scratch[k - 1];
        scratch[k] = 1.0 / m;
        y[k] = (6.0 * y[k] - y[k - 1]) / m;
    }
    for k in (0..n - 1).rev() {
        y[k] -= scratch[k] * y[k + 1];
    }
}

#[inline]
fn basis(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let u = 1.0 - t;
    [
        u * u * u / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

impl SplineField {
    pub fn new(field: &Field) -> Self {
        let g = field.grid().clone();
        let (n_r, n_s) = (g.n_r, g.n_s);
        let n_a = 2 * (n_r + PAD);
        let n_b = n_s + 2 * PAD;
        let mut coef = vec![0.0; n_a * n_b];
        for i in 0..n_r {
            let up = n_r + PAD + i;
            let down = n_r + PAD - 1 - i;
            for j in 0..n_s {
                let v = field.at(i, j);
                coef[up * n_b + PAD + j] = v;
                coef[down * n_b + PAD + j] = -v;
            }
        }
        let mut scratch = Vec::new();
        for row in coef.chunks_mut(n_b) {
            prefilter(row, &mut scratch);
        }
        let mut column = vec![0.0; n_a];
        for b in 0..n_b {
            for a in 0..n_a {
                column[a] = coef[a * n_b + b];
            }
            prefilter(&mut column, &mut scratch);
            for a in 0..n_a {
                coef[a * n_b + b] = column[a];
            }
        }
        Self { grid: g, coef, n_a, n_b }
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        &self.grid
    }

    fn raw(&self, r: f64, s: f64) -> f64 {
        let g = &*self.grid;
        let x = r / g.h_r + (g.n_r + PAD) as f64 - 0.5;
        let y = (s + g.s_max) / g.h_s + PAD as f64 - 0.5;
        let (ka, kb) = (x.floor(), y.floor());
        let (wa, wb) = (basis(x - ka), basis(y - kb));
        let (ka, kb) = (ka as isize - 1, kb as isize - 1);
        let mut acc = 0.0;
        for (da, wa) in wa.iter().enumerate() {
            let a = ka + da as isize;
            if a < 0 || a as usize >= self.n_a {
                continue;
            }
            let row = &self.coef[a as usize * self.n_b..(a as usize + 1) * self.n_b];
            let mut line = 0.0;
            for (db, wb) in wb.iter().enumerate() {
                let b = kb + db as isize;
                if b >= 0 && (b as usize) < self.n_b {
                    line += wb * row[b as usize];
                }
            }
            acc += wa * line;
        }
        acc
    }

    /// Spline value at `(r, s)`; exactly zero on the axis.
    pub fn eval(&self, r: f64, s: f64) -> Result<f64> {
        let g = &*self.grid;
        if !(0.0..=g.r_max).contains(&r) || !(-g.s_max..=g.s_max).contains(&s) {
            return Err(Error::OutsideGrid { r, s });
        }
        Ok(0.5 * (self.raw(r, s) - self.raw(-r, s)))
    }
}

//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `min c·x  s.t.  A x = b, x >= 0` on a full tableau. Intended for
//! desk-scale problems (a few hundred rows): gauge evaluation, vertex tests,
//! support functions of H-polytopes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;
const PIVOT_EPS: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol: DEFAULT_TOL, max_iter: DEFAULT_MAX_ITER }
    }
}

struct Tableau {
    rows: usize,
    cols: usize, // structural + artificial, rhs stored separately
    data: Vec<f64>,
    rhs: Vec<f64>,
    obj: Vec<f64>,
    obj_value: f64,
    basis: Vec<usize>,
    iterations: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let cols = self.cols;
        let p = self.at(r, c);
        for j in 0..cols {
            self.data[r * cols + j] /= p;
        }
        self.rhs[r] /= p;
        let (prow, prhs) = (self.data[r * cols..(r + 1) * cols].to_vec(), self.rhs[r]);
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.data[i * cols + c];
            if f != 0.0 {
                let row = &mut self.data[i * cols..(i + 1) * cols];
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= f * y;
                }
                self.rhs[i] -= f * prhs;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, y) in self.obj.iter_mut().zip(&prow) {
                *x -= f * y;
            }
            self.obj_value -= f * prhs;
        }
        self.basis[r] = c;
    }

    /// Bland's rule iterations restricted to columns `< allowed`.
    /// Returns `Ok(false)` when unbounded.
    fn run(&mut self, allowed: usize, opts: &LpOptions) -> Result<bool> {
        loop {
            if self.iterations >= opts.max_iter {
                return Err(Error::LpNumerical(format!("iteration cap {} reached", opts.max_iter)));
            }
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -opts.tol) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.at(i, enter);
                if a > PIVOT_EPS {
                    let ratio = self.rhs[i] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14 * lr.abs().max(1.0)
                                || (ratio <= lr + 1e-14 * lr.abs().max(1.0) && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, enter);
            self.iterations += 1;
        }
    }

    fn remove_row(&mut self, r: usize) {
        let cols = self.cols;
        self.data.drain(r * cols..(r + 1) * cols);
        self.rhs.remove(r);
        self.basis.remove(r);
        self.rows -= 1;
    }
}

/// Solve `min c·x, A x = b, x >= 0`.
pub fn solve_standard(a: &Matrix, b: &[f64], c: &[f64], opts: &LpOptions) -> Result<LpOutcome> {
    let (m, k) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m, "rhs length");
    assert_eq!(c.len(), k, "cost length");
    let cols = k + m;
    let mut data = vec![0.0; m * cols];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..k {
            data[i * cols + j] = s * a[(i, j)];
        }
        data[i * cols + k + i] = 1.0;
        rhs[i] = s * b[i];
    }
    let mut obj = vec![0.0; cols];
    for j in 0..k {
        obj[j] = -(0..m).map(|i| data[i * cols + j]).sum::<f64>();
    }
    let obj_value = -rhs.iter().sum::<f64>();
    let mut t = Tableau { rows: m, cols, data, rhs, obj, obj_value, basis: (k..k + m).collect(), iterations: 0 };
    // Phase 1 is bounded below by zero, so `run` cannot report unbounded here.
    t.run(k, opts)?;
    let bscale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if -t.obj_value > opts.tol * bscale {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive zero-level artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows {
        if t.basis[i] >= k {
            match (0..k).find(|&j| t.at(i, j).abs() > 1e-9) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => t.remove_row(i),
            }
        } else {
            i += 1;
        }
    }
    // Phase 2 objective row.
    let mut obj = vec![0.0; cols];
    obj[..k].copy_from_slice(c);
    let mut value = 0.0;
    for r in 0..t.rows {
        let cb = c[t.basis[r]];
        if cb != 0.0 {
            for (j, o) in obj.iter_mut().enumerate().take(k) {
                *o -= cb * t.data[r * cols + j];
            }
            value += cb * t.rhs[r];
        }
    }
    t.obj = obj;
    t.obj_value = -value;
    if !t.run(k, opts)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; k];
    for r in 0..t.rows {
        if t.basis[r] < k {
            x[t.basis[r]] = t.rhs[r].max(0.0);
        }
    }
    let value = c.iter().zip(&x).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal { x, value })
}

/// Maximize `objective·x` over `{x : A x <= b}` with `x` free.
/// Returns `Ok(None)` when the polyhedron is empty.
pub fn maximize_over_polyhedron(
    normals: &Matrix,
    offsets: &[f64],
    objective: &[f64],
    opts: &LpOptions,
) -> Result<Option<(f64, Vec<f64>)>> {
    let (m, d) = (normals.nrows(), normals.ncols());
    // x = x⁺ - x⁻, slack s: A x⁺ - A x⁻ + s = b
    let a = Matrix::from_fn(m, 2 * d + m, |i, j| {
        if j < d {
            normals[(i, j)]
        } else if j < 2 * d {
            -normals[(i, j - d)]
        } else if j - 2 * d == i {
            1.0
        } else {
            0.0
        }
    });
    let mut c = vec![0.0; 2 * d + m];
    for j in 0..d {
        c[j] = -objective[j];
        c[d + j] = objective[j];
    }
    match solve_standard(&a, offsets, &c, opts)? {
        LpOutcome::Optimal { x, value } => {
            let pt = (0..d).map(|j| x[j] - x[d + j]).collect();
            Ok(Some((-value, pt)))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Unbounded("linear objective unbounded".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = Matrix::from_row_slice(2, 4, &[1.0, 2.0, 1.0, 0.0, 3.0, 1.0, 0.0, 1.0]);
        let out = solve_standard(&a, &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0], &LpOptions::default()).unwrap();
        match out {
            LpOutcome::Optimal { x, value } => {
                assert_relative_eq!(value, -2.8, epsilon = 1e-12);
                assert_relative_eq!(x[0], 1.6, epsilon = 1e-12);
                assert_relative_eq!(x[1], 1.2, epsilon = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let out = solve_standard(&a, &[1.0, 2.0], &[0.0, 0.0], &LpOptions::default()).unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
        let a = Matrix::from_row_slice(1, 2, &[1.0, -1.0]);
        let out = solve_standard(&a, &[1.0], &[-1.0, 0.0], &LpOptions::default()).unwrap();
        assert_eq!(out, LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let out = solve_standard(&a, &[1.0, 2.0], &[1.0, 2.0], &LpOptions::default()).unwrap();
        match out {
            LpOutcome::Optimal { value, .. } => assert_relative_eq!(value, 1.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polyhedron_maximum() {
        // |x| <= 3, |y| <= 2, x + y <= 4
        let n = Matrix::from_row_slice(5, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0, 1.0, 1.0]);
        let (v, _) = maximize_over_polyhedron(&n, &[3.0, 3.0, 2.0, 2.0, 4.0], &[1.0, 1.0], &LpOptions::default())
            .unwrap()
            .unwrap();
        assert_relative_eq!(v, 4.0, epsilon = 1e-12);
        let (v, _) = maximize_over_polyhedron(&n, &[3.0, 3.0, 2.0, 2.0, 4.0], &[-1.0, 0.0], &LpOptions::default())
            .unwrap()
            .unwrap();
        assert_relative_eq!(v, 3.0, epsilon = 1e-12);
    }
}

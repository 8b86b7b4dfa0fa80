use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lp::{self, LpOptions};

/// `{x : A x <= b}` with `b > 0`, so the origin is interior.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    normals: Matrix,
    offsets: Vec<f64>,
}

impl HPolytope {
    pub fn new(normals: Matrix, offsets: Vec<f64>) -> Result<Self> {
        if normals.nrows() != offsets.len() {
            return Err(Error::BadShape(format!("{} normals but {} offsets", normals.nrows(), offsets.len())));
        }
        if normals.nrows() == 0 || normals.ncols() == 0 {
            return Err(Error::InvalidBody("empty H-polytope".into()));
        }
        if let Some(b) = offsets.iter().find(|b| !(**b > 0.0) || !b.is_finite()) {
            return Err(Error::InvalidBody(format!("offset {b} must be positive and finite")));
        }
        if normals.row_iter().any(|r| r.iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidBody("zero normal row".into()));
        }
        Ok(HPolytope { normals, offsets })
    }

    pub fn from_rows(rows: &[Vec<f64>], offsets: Vec<f64>) -> Result<Self> {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::BadShape("ragged normal rows".into()));
        }
        Self::new(Matrix::from_fn(rows.len(), d, |i, j| rows[i][j]), offsets)
    }

    /// `half·B∞ = {‖x‖∞ <= half}`.
    pub fn cube(d: usize, half: f64) -> Result<Self> {
        let normals = Matrix::from_fn(2 * d, d, |i, j| {
            if i / 2 == j {
                if i % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            } else {
                0.0
            }
        });
        Self::new(normals, vec![half; 2 * d])
    }

    pub fn dim(&self) -> usize {
        self.normals.ncols()
    }

    pub fn num_facets(&self) -> usize {
        self.normals.nrows()
    }

    pub fn normals(&self) -> &Matrix {
        &self.normals
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn normal(&self, j: usize) -> Vec<f64> {
        self.normals.row(j).iter().copied().collect()
    }

    /// `a_j·x <= b_j + tol·‖a_j‖` for every row.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.normals.row_iter().zip(&self.offsets).all(|(a, &b)| {
            let dot: f64 = a.iter().zip(x).map(|(u, v)| u * v).sum();
            dot <= b + tol * a.norm()
        })
    }

    /// `h_P(a) = max{a·x : x ∈ P}` by linear programming.
    pub fn support_function(&self, a: &[f64]) -> Result<f64> {
        let (v, _) = lp::maximize_over_polyhedron(&self.normals, &self.offsets, a, &LpOptions::default())?
            .ok_or_else(|| Error::InvalidBody("empty polyhedron".into()))?;
        Ok(v)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.normals.clone(), self.offsets.iter().map(|b| b * c).collect())
    }
}

/// Exact optimum of `max{α : α K ⊆ Q}` for an H-polytope `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactContainment {
    /// `+∞` when `K` has zero support along every normal of `Q`.
    pub alpha: f64,
    pub binding_row: Option<usize>,
    pub unbounded: bool,
}

/// `α* = min_j b_j / h_K(a_j)` over rows with `h_K(a_j) > 0`.
pub fn exact_opt_containment<F>(k_support: F, q: &HPolytope) -> ExactContainment
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = ExactContainment { alpha: f64::INFINITY, binding_row: None, unbounded: true };
    for j in 0..q.num_facets() {
        let h = k_support(&q.normal(j));
        if h > 0.0 {
            let a = q.offsets[j] / h;
            if a < best.alpha {
                best = ExactContainment { alpha: a, binding_row: Some(j), unbounded: false };
            }
        }
    }
    best
}

//! Sparse/dense vector primitives shared by every learner: the sparse
//! example representation, the growable dense weight vector, and the L1
//! soft-thresholding operator.

use crate::error::{Error, Result};

/// Immutable sparse vector: `(index, value)` pairs with strictly increasing
/// indices. Explicit zeros are dropped at construction so the stored support
/// always equals the nonzero set.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Builds a sparse vector from `(index, value)` pairs.
    ///
    /// Indices must be strictly increasing; values must be finite.
    /// Zero-valued entries are accepted and silently removed.
    pub fn new(entries: Vec<(usize, f64)>) -> Result<Self> {
        let mut prev: Option<usize> = None;
        for &(i, v) in &entries {
            if let Some(p) = prev {
                if i <= p {
                    return Err(Error::Data(format!(
                        "sparse entries must have strictly increasing indices ({p} then {i})"
                    )));
                }
            }
            if !v.is_finite() {
                return Err(Error::Data(format!("non-finite value {v} at index {i}")));
            }
            prev = Some(i);
        }
        let entries = entries.into_iter().filter(|&(_, v)| v != 0.0).collect();
        Ok(SparseVector { entries })
    }

    pub fn empty() -> Self {
        SparseVector { entries: Vec::new() }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest stored index, or `None` for the empty vector.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|&(i, _)| i)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v.abs()).sum()
    }

    pub fn sq_l2_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }

    /// Inner product with a dense weight vector; indices beyond the weight
    /// vector's dimension contribute zero.
    pub fn dot(&self, w: &DenseWeights) -> f64 {
        self.entries.iter().map(|&(i, v)| v * w.get(i)).sum()
    }

    /// Inner product with a plain slice; indices beyond its length are zero.
    pub fn dot_slice(&self, w: &[f64]) -> f64 {
        self.entries
            .iter()
            .map(|&(i, v)| v * w.get(i).copied().unwrap_or(0.0))
            .sum()
    }
}

/// Growable dense vector indexed from 0. Reads beyond the current logical
/// dimension yield 0; writes extend the dimension lazily.
#[derive(Debug, Clone, Default)]
pub struct DenseWeights {
    values: Vec<f64>,
}

/// Equality is logical: trailing zeros beyond either vector's stored length
/// do not distinguish two weight vectors.
impl PartialEq for DenseWeights {
    fn eq(&self, other: &Self) -> bool {
        let n = self.values.len().max(other.values.len());
        (0..n).all(|i| self.get(i) == other.get(i))
    }
}

impl DenseWeights {
    pub fn new() -> Self {
        DenseWeights { values: Vec::new() }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        DenseWeights { values }
    }

    /// Logical dimension: highest index ever written plus one.
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, i: usize, v: f64) {
        if i >= self.values.len() {
            self.values.resize(i + 1, 0.0);
        }
        self.values[i] = v;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0.0).count()
    }

    pub fn iter_nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, v)| v != 0.0)
    }

    /// `self[i] += alpha * x[i]` over `x`'s support, growing as needed.
    pub fn scaled_add(&mut self, x: &SparseVector, alpha: f64) {
        assert!(alpha.is_finite(), "scaled_add requires a finite scale");
        if let Some(max) = x.max_index() {
            if max >= self.values.len() {
                self.values.resize(max + 1, 0.0);
            }
        }
        for (i, v) in x.iter() {
            self.values[i] += alpha * v;
        }
    }

    /// `self[i] += alpha * other[i]` over `other`'s stored entries.
    pub fn scaled_add_dense(&mut self, other: &DenseWeights, alpha: f64) {
        assert!(alpha.is_finite(), "scaled_add_dense requires a finite scale");
        if other.values.len() > self.values.len() {
            self.values.resize(other.values.len(), 0.0);
        }
        for (i, &v) in other.values.iter().enumerate() {
            self.values[i] += alpha * v;
        }
    }

    /// Coordinate-wise soft-thresholding `sign(u_i) * max(|u_i| - lambda, 0)`,
    /// the closed-form minimizer of `1/2 * ||u - w||_2^2 + lambda * ||w||_1`.
    ///
    /// Panics if `lambda` is negative.
    pub fn soft_threshold(&self, lambda: f64) -> DenseWeights {
        assert!(lambda >= 0.0, "soft_threshold requires lambda >= 0");
        let values = self
            .values
            .iter()
            .map(|&u| soft_threshold_scalar(u, lambda))
            .collect();
        DenseWeights { values }
    }

    /// Fraction of an ambient feature space left at zero by this model.
    /// Never-active coordinates beyond the logical dimension count as zero.
    ///
    /// Panics if `ambient_dim` is 0 or smaller than the model's nonzero count.
    pub fn sparsity(&self, ambient_dim: usize) -> f64 {
        assert!(ambient_dim > 0, "ambient dimension must be positive");
        let nnz = self.nnz();
        assert!(
            nnz <= ambient_dim,
            "ambient dimension {ambient_dim} smaller than nonzero count {nnz}"
        );
        (ambient_dim - nnz) as f64 / ambient_dim as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn soft_threshold_scalar(u: f64, lambda: f64) -> f64 {
    let mag = u.abs() - lambda;
    if mag > 0.0 {
        u.signum() * mag
    } else {
        0.0
    }
}

/// Dense symmetric matrix used by the full second-order learner's
/// maintained inverse. Stored unpacked; symmetry is preserved bit-exactly
/// because rank-one updates write `v_i * v_j` to both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        SymMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Grows to `new_dim`, padding new rows/columns with identity.
    pub fn grow(&mut self, new_dim: usize) {
        if new_dim <= self.dim {
            return;
        }
        let mut data = vec![0.0; new_dim * new_dim];
        for i in 0..self.dim {
            data[i * new_dim..i * new_dim + self.dim]
                .copy_from_slice(&self.data[i * self.dim..(i + 1) * self.dim]);
        }
        for i in self.dim..new_dim {
            data[i * new_dim + i] = 1.0;
        }
        self.dim = new_dim;
        self.data = data;
    }

    /// `M x` for sparse `x`; `x` indices must be below `dim`.
    pub fn mul_sparse(&self, x: &SparseVector) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (j, v) in x.iter() {
            let col = &self.data[j * self.dim..(j + 1) * self.dim];
            for (o, &m) in out.iter_mut().zip(col) {
                *o += m * v;
            }
        }
        out
    }

    /// `M theta` where `theta` is dense (reads beyond its dim are zero).
    pub fn mul_dense(&self, theta: &DenseWeights) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        let n = theta.dim().min(self.dim);
        for j in 0..n {
            let v = theta.get(j);
            if v == 0.0 {
                continue;
            }
            let col = &self.data[j * self.dim..(j + 1) * self.dim];
            for (o, &m) in out.iter_mut().zip(col) {
                *o += m * v;
            }
        }
        out
    }

    /// Symmetric rank-one downdate `M -= v v^T / denom`.
    pub fn rank_one_subtract(&mut self, v: &[f64], denom: f64) {
        debug_assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            let row = &mut self.data[i * self.dim..(i + 1) * self.dim];
            for (r, &vj) in row.iter_mut().zip(v) {
                *r -= vi * vj / denom;
            }
        }
    }
}

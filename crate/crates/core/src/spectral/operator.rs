use nalgebra::DMatrix;
use rayon::prelude::*;

/// A real symmetric linear operator `y = M x`, the only access the
/// eigensolvers need. Implemented for dense matrices, adjacency samples and
/// the low-rank probability matrix `P = X X^T`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// Overwrites `y` with `M x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Materializes the operator. The default applies it to unit vectors.
    fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            m.column_mut(j).copy_from_slice(&col);
        }
        // Symmetrize away rounding in the operator.
        let t = m.transpose();
        (m + t) * 0.5
    }
}

impl SymmetricOperator for DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        // Column-major storage: column j == row j by symmetry.
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let col = &self.as_slice()[i * n..(i + 1) * n];
            *yi = col.iter().zip(x).map(|(a, b)| a * b).sum();
        });
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// `P = X X^T` applied without forming the n×n matrix.
pub struct GramOperator<'a> {
    x: &'a DMatrix<f64>,
}

impl<'a> GramOperator<'a> {
    pub fn new(x: &'a DMatrix<f64>) -> Self {
        GramOperator { x }
    }
}

impl SymmetricOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.x.nrows()
    }

    fn apply(&self, v: &[f64], y: &mut [f64]) {
        let d = self.x.ncols();
        let n = self.x.nrows();
        let mut proj = vec![0.0; d];
        for (k, p) in proj.iter_mut().enumerate() {
            let col = self.x.column(k);
            *p = col.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        for (i, yi) in y.iter_mut().enumerate().take(n) {
            *yi = (0..d).map(|k| self.x[(i, k)] * proj[k]).sum();
        }
    }
}

/// `A - B` for two operators of the same dimension.
pub struct Difference<'a> {
    lhs: &'a dyn SymmetricOperator,
    rhs: &'a dyn SymmetricOperator,
}

impl<'a> Difference<'a> {
    pub fn new(lhs: &'a dyn SymmetricOperator, rhs: &'a dyn SymmetricOperator) -> Self {
        assert_eq!(lhs.dim(), rhs.dim(), "operator dimensions differ");
        Difference { lhs, rhs }
    }
}

impl SymmetricOperator for Difference<'_> {
    fn dim(&self) -> usize {
        self.lhs.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut tmp = vec![0.0; x.len()];
        self.lhs.apply(x, y);
        self.rhs.apply(x, &mut tmp);
        for (a, b) in y.iter_mut().zip(&tmp) {
            *a -= b;
        }
    }
}

//! Locally constant matrix cocycles over a shift and the potential families
//! they generate (log-norms, log singular values, quasiconformal ratios).

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{invalid, Result};
use crate::potential::PotentialFamily;

/// One `d×d` real matrix per symbol. The product along a word
/// `x_0 … x_{n-1}` is `M_{x_{n-1}} ⋯ M_{x_0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCocycle {
    dim: usize,
    matrices: Arc<Vec<DMatrix<f64>>>,
}

/// A product kept as a normalised matrix times `exp(log_scale)`, so that long
/// products neither overflow nor underflow.
#[derive(Debug, Clone)]
pub struct ScaledProduct {
    pub matrix: DMatrix<f64>,
    pub log_scale: f64,
}

impl MatrixCocycle {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(invalid("a cocycle needs at least one matrix"));
        };
        let dim = first.nrows();
        if dim == 0 {
            return Err(invalid("matrices must be non-empty"));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(invalid(format!(
                    "matrix {i} is {}x{}, expected {dim}x{dim}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(invalid(format!("matrix {i} has a non-finite entry")));
            }
        }
        Ok(Self {
            dim,
            matrices: Arc::new(matrices),
        })
    }

    /// The two-symbol positive cocycle `[[2,1],[1,1]]`, `[[1,1],[1,2]]`.
    pub fn bundled_positive() -> Self {
        Self::new(vec![
            DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]),
        ])
        .expect("valid matrices")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn symbols(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, symbol: usize) -> &DMatrix<f64> {
        &self.matrices[symbol]
    }

    /// True when every entry of every matrix is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.matrices.iter().all(|m| m.iter().all(|&v| v > 0.0))
    }

    /// `M_{w_{n-1}} ⋯ M_{w_0}` over the first `n` symbols of `w`.
    pub fn product(&self, w: &[usize], n: usize) -> Result<ScaledProduct> {
        if w.len() < n {
            return Err(invalid(format!("word of length {} shorter than {n}", w.len())));
        }
        let mut matrix = DMatrix::<f64>::identity(self.dim, self.dim);
        let mut log_scale = 0.0;
        for &s in &w[..n] {
            let m = self
                .matrices
                .get(s)
                .ok_or_else(|| invalid(format!("symbol {s} has no matrix")))?;
            matrix = m * matrix;
            let scale = matrix.amax();
            if scale == 0.0 {
                return Ok(ScaledProduct {
                    matrix,
                    log_scale: f64::NEG_INFINITY,
                });
            }
            matrix /= scale;
            log_scale += scale.ln();
        }
        Ok(ScaledProduct { matrix, log_scale })
    }

    /// Logarithms of the singular values of the length-`n` product, largest
    /// first.
    pub fn log_singular_values(&self, w: &[usize], n: usize) -> Result<Vec<f64>> {
        let p = self.product(w, n)?;
        let mut sv: Vec<f64> = p.matrix.singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv.into_iter().map(|s| s.ln() + p.log_scale).collect())
    }

    /// `log ‖M_{w_{n-1}} ⋯ M_{w_0}‖` in the operator 2-norm.
    pub fn log_norm(&self, w: &[usize], n: usize) -> Result<f64> {
        Ok(self.log_singular_values(w, n)?[0])
    }

    /// The log-norm family `f_n = log ‖M^{(n)}‖`; almost additive when every
    /// matrix is entrywise positive.
    pub fn log_norm_family(&self) -> PotentialFamily {
        let me = self.clone();
        PotentialFamily::almost_additive(None, 0, move |w, n| me.log_norm(w, n))
    }

    /// `f_n = log σ_i(M^{(n)})` for the `index`-th singular value.
    pub fn log_singular_value_family(&self, index: usize) -> Result<PotentialFamily> {
        if index >= self.dim {
            return Err(invalid(format!(
                "singular value {index} of a {}-dimensional cocycle",
                self.dim
            )));
        }
        let me = self.clone();
        Ok(PotentialFamily::asymptotic(0, move |w, n| {
            Ok(me.log_singular_values(w, n)?[index])
        }))
    }

    /// The quasiconformal ratio `K_n = σ_max / σ_min` of the product.
    pub fn quasiconformal_ratio_family(&self) -> PotentialFamily {
        let me = self.clone();
        PotentialFamily::asymptotic(0, move |w, n| {
            let sv = me.log_singular_values(w, n)?;
            Ok((sv[0] - sv[sv.len() - 1]).exp())
        })
    }
}

/// Spectral radius of a square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_shapes() {
        let a = DMatrix::<f64>::identity(2, 2);
        let b = DMatrix::<f64>::identity(3, 3);
        assert!(MatrixCocycle::new(vec![a, b]).is_err());
        assert!(MatrixCocycle::new(vec![]).is_err());
    }

    #[test]
    fn product_order_is_right_to_left() {
        let c = MatrixCocycle::bundled_positive();
        let p = c.product(&[0, 1], 2).unwrap();
        let direct = c.matrix(1) * c.matrix(0);
        let rebuilt = &p.matrix * p.log_scale.exp();
        assert!((rebuilt - direct).amax() < 1e-12);
    }

    #[test]
    fn log_norm_matches_direct_product() {
        let c = MatrixCocycle::bundled_positive();
        let w = [0, 1, 1, 0, 1, 0];
        let mut direct = DMatrix::<f64>::identity(2, 2);
        for &s in &w {
            direct = c.matrix(s) * direct;
        }
        let norm = direct.singular_values().max();
        assert!((c.log_norm(&w, 6).unwrap() - norm.ln()).abs() < 1e-12);
    }

    #[test]
    fn long_products_stay_finite() {
        let c = MatrixCocycle::bundled_positive();
        let w = vec![0; 2000];
        let v = c.log_norm(&w, 2000).unwrap();
        let rho = spectral_radius(c.matrix(0)).ln();
        assert!((v / 2000.0 - rho).abs() < 1e-3);
    }

    #[test]
    fn rotation_is_conformal() {
        let t: f64 = 0.3;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]) * 1.5;
        let c = MatrixCocycle::new(vec![r.clone(), r]).unwrap();
        let k = c.quasiconformal_ratio_family();
        assert!((k.value(&[0, 1, 0, 1, 1], 5).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_radius_of_golden_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        assert!((spectral_radius(&m) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
    }
}

use crate::error::{Error, Result};
use crate::poisson::Matrix;

/// Coefficients `(a_ij, b_i)` of an s-stage Runge-Kutta method.
#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Matrix,
    b: Vec<f64>,
}

impl ButcherTableau {
    /// Builds a tableau from a dense `s×s` matrix and `s` weights. Weights
    /// that do not sum to one are accepted with a warning.
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let s = b.len();
        if s == 0 {
            return Err(Error::InvalidParameter(
                "tableau needs at least one stage".into(),
            ));
        }
        if a.nrows() != s || a.ncols() != s {
            return Err(Error::InvalidParameter(format!(
                "tableau matrix is {}x{}, expected {s}x{s}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tableau"));
        }
        let tab = Self { a, b };
        if !tab.is_consistent() {
            log::warn!(
                "tableau weights sum to {}, not 1",
                tab.b.iter().sum::<f64>()
            );
        }
        Ok(tab)
    }

    pub fn from_rows(a: &[&[f64]], b: &[f64]) -> Result<Self> {
        let s = b.len();
        if a.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(Error::InvalidParameter(format!(
                "tableau rows must form a {s}x{s} matrix"
            )));
        }
        let flat: Vec<f64> = a.iter().flat_map(|row| row.iter().copied()).collect();
        Self::new(Matrix::from_row_slice(s, s, &flat), b.to_vec())
    }

    /// `a = [[0]], b = [1]`.
    pub fn euler() -> Self {
        Self::from_rows(&[&[0.0]], &[1.0]).unwrap()
    }

    /// One-stage Gauss-Legendre: `a = [[1/2]], b = [1]`.
    pub fn midpoint() -> Self {
        Self::from_rows(&[&[0.5]], &[1.0]).unwrap()
    }

    pub fn rk4() -> Self {
        Self::from_rows(
            &[
                &[0.0, 0.0, 0.0, 0.0],
                &[0.5, 0.0, 0.0, 0.0],
                &[0.0, 0.5, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
            ],
            &[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
        )
        .unwrap()
    }

    /// Two-stage Lobatto IIIA, i.e. the implicit trapezoidal rule.
    pub fn trapezoid() -> Self {
        Self::from_rows(&[&[0.0, 0.0], &[0.5, 0.5]], &[0.5, 0.5]).unwrap()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "euler" => Some(Self::euler()),
            "midpoint" | "gauss1" => Some(Self::midpoint()),
            "rk4" | "classical" => Some(Self::rk4()),
            "trapezoid" => Some(Self::trapezoid()),
            _ => None,
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn is_consistent(&self) -> bool {
        (self.b.iter().sum::<f64>() - 1.0).abs() <= 1e-14
    }

    /// True when `a` is strictly lower triangular, so stages can be computed
    /// by forward substitution.
    pub fn is_explicit(&self) -> bool {
        let s = self.stages();
        (0..s).all(|i| (i..s).all(|j| self.a[(i, j)] == 0.0))
    }

    /// Matrix with entries `bᵢaᵢⱼ + bⱼaⱼᵢ − bᵢbⱼ`. The method is symplectic
    /// (and Poisson for constant structure matrices) iff every entry vanishes.
    pub fn symplectic_condition_residual(&self) -> Matrix {
        let s = self.stages();
        let (a, b) = (&self.a, &self.b);
        Matrix::from_fn(s, s, |i, j| {
            (b[i] * a[(i, j)] + b[j] * a[(j, i)]) - b[i] * b[j]
        })
    }

    pub fn max_symplectic_residual(&self) -> f64 {
        self.symplectic_condition_residual().amax()
    }

    pub fn satisfies_symplectic_condition(&self) -> bool {
        self.max_symplectic_residual() <= 1e-14
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn midpoint_residual_is_exactly_zero() {
        assert_eq!(
            ButcherTableau::midpoint().symplectic_condition_residual(),
            Matrix::zeros(1, 1)
        );
        assert!(ButcherTableau::midpoint().satisfies_symplectic_condition());
    }

    #[test]
    fn rk4_residual_entry_and_max() {
        let r = ButcherTableau::rk4().symplectic_condition_residual();
        assert!((r[(0, 1)] - 1.0 / 9.0).abs() <= 1e-15);
        assert!((r.amax() - 1.0 / 9.0).abs() <= 1e-15);
        assert!(!ButcherTableau::rk4().satisfies_symplectic_condition());
    }

    #[test]
    fn zero_weights_give_zero_residual() {
        let tab = ButcherTableau::from_rows(&[&[0.3, 0.1], &[0.2, 0.9]], &[0.0, 0.0]).unwrap();
        assert!(!tab.is_consistent());
        assert_eq!(tab.symplectic_condition_residual(), Matrix::zeros(2, 2));
    }

    #[test]
    fn explicit_detection() {
        assert!(ButcherTableau::euler().is_explicit());
        assert!(ButcherTableau::rk4().is_explicit());
        assert!(!ButcherTableau::midpoint().is_explicit());
        assert!(!ButcherTableau::trapezoid().is_explicit());
    }

    #[test]
    fn shape_validation() {
        assert!(ButcherTableau::from_rows(&[&[0.0, 1.0]], &[1.0]).is_err());
        assert!(ButcherTableau::from_rows(&[], &[]).is_err());
        assert!(ButcherTableau::by_name("dopri").is_none());
    }

    proptest! {
        #[test]
        fn residual_is_symmetric(a in prop::collection::vec(-2.0..2.0f64, 9), b in prop::collection::vec(-2.0..2.0f64, 3)) {
            let tab = ButcherTableau::new(Matrix::from_row_slice(3, 3, &a), b).unwrap();
            let r = tab.symplectic_condition_residual();
            prop_assert_eq!(r.clone(), r.transpose());
        }
    }
}

//! Finite-dimensional Poisson systems.
//!
//! A [`PoissonSystem`] on ℝⁿ is described by its structure matrix
//! `Π(x) = [{xᵢ, xⱼ}]`, a Hamiltonian and an optional list of Casimirs. The
//! bracket of two functions is `{f, g}(x) = ∇f(x)ᵀ Π(x) ∇g(x)` and the
//! Hamiltonian vector field is `X_H(x) = Π(x) ∇H(x)`.
//!
//! Gradients come from the closed form when a [`ScalarField`] carries one,
//! otherwise from central differences with a per-coordinate step of
//! `eps · max(1, |xᵢ|)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::integrators::VectorField;

/// A point of ℝⁿ.
pub type StateVector = DVector<f64>;

/// Dense real matrix, used for structure matrices and Jacobians.
pub type Matrix = DMatrix<f64>;

/// Default relative step of the finite-difference gradient fallback.
pub const DEFAULT_GRADIENT_EPS: f64 = 1e-6;

type EvalFn = dyn Fn(&StateVector) -> f64 + Send + Sync;
type GradFn = dyn Fn(&StateVector) -> StateVector + Send + Sync;
type StructureFn = dyn Fn(&StateVector) -> Matrix + Send + Sync;

/// A smooth function ℝⁿ → ℝ with an optional closed-form gradient.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<EvalFn>,
    gradient: Option<Arc<GradFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(eval: impl Fn(&StateVector) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            eval: Arc::new(eval),
            gradient: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&StateVector) -> StateVector + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// The coordinate function `x ↦ xᵢ`.
    pub fn coordinate(index: usize) -> Self {
        Self::new(move |x| x[index]).with_gradient(move |x| {
            let mut g = StateVector::zeros(x.len());
            g[index] = 1.0;
            g
        })
    }

    pub fn value(&self, x: &StateVector) -> f64 {
        (self.eval)(x)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Closed-form gradient if present, otherwise central differences with
    /// relative step `fd_eps`. `None` disables the fallback.
    pub fn gradient(&self, x: &StateVector, fd_eps: Option<f64>) -> Result<StateVector> {
        match (&self.gradient, fd_eps) {
            (Some(g), _) => Ok(g(x)),
            (None, Some(eps)) => Ok(central_gradient(|y| self.value(y), x, eps)),
            (None, None) => Err(Error::GradientUnavailable),
        }
    }
}

/// Central-difference gradient with step `eps · max(1, |xᵢ|)` per coordinate.
pub fn central_gradient(f: impl Fn(&StateVector) -> f64, x: &StateVector, eps: f64) -> StateVector {
    let mut grad = StateVector::zeros(x.len());
    let mut probe = x.clone();
    for i in 0..x.len() {
        let step = eps * x[i].abs().max(1.0);
        probe[i] = x[i] + step;
        let plus = f(&probe);
        probe[i] = x[i] - step;
        let minus = f(&probe);
        probe[i] = x[i];
        grad[i] = (plus - minus) / (2.0 * step);
    }
    grad
}

/// Largest entry of `|Π + Πᵀ|`.
pub fn antisymmetry_defect(pi: &Matrix) -> f64 {
    (pi + pi.transpose()).amax()
}

/// A Hamilton-Poisson system `(ℝⁿ, Π, H)` with optional Casimirs.
///
/// Immutable after construction; all evaluation methods take `&self` and the
/// stored closures are `Send + Sync`, so a system can be shared across threads.
#[derive(Clone)]
pub struct PoissonSystem {
    dimension: usize,
    structure: Arc<StructureFn>,
    hamiltonian: ScalarField,
    casimirs: Vec<ScalarField>,
    fd_eps: Option<f64>,
}

impl fmt::Debug for PoissonSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PoissonSystem")
            .field("dimension", &self.dimension)
            .field("casimirs", &self.casimirs.len())
            .field("fd_eps", &self.fd_eps)
            .finish()
    }
}

impl PoissonSystem {
    pub fn new(
        dimension: usize,
        structure: impl Fn(&StateVector) -> Matrix + Send + Sync + 'static,
        hamiltonian: ScalarField,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self {
            dimension,
            structure: Arc::new(structure),
            hamiltonian,
            casimirs: Vec::new(),
            fd_eps: Some(DEFAULT_GRADIENT_EPS),
        })
    }

    /// System with a state-independent structure matrix.
    pub fn with_constant_structure(pi: Matrix, hamiltonian: ScalarField) -> Result<Self> {
        if !pi.is_square() {
            return Err(Error::InvalidParameter(
                "structure matrix must be square".into(),
            ));
        }
        let n = pi.nrows();
        Self::new(n, move |_| pi.clone(), hamiltonian)
    }

    pub fn with_casimir(mut self, casimir: ScalarField) -> Self {
        self.casimirs.push(casimir);
        self
    }

    /// Relative step of the gradient fallback; `None` disables it.
    pub fn with_gradient_eps(mut self, fd_eps: Option<f64>) -> Self {
        self.fd_eps = fd_eps;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn hamiltonian(&self) -> &ScalarField {
        &self.hamiltonian
    }

    pub fn casimirs(&self) -> &[ScalarField] {
        &self.casimirs
    }

    fn check_state(&self, x: &StateVector) -> Result<()> {
        check_dim(self.dimension, x.len())?;
        check_finite(x.iter(), "state")
    }

    /// `Π(x)`.
    pub fn structure_matrix(&self, x: &StateVector) -> Result<Matrix> {
        self.check_state(x)?;
        Ok((self.structure)(x))
    }

    /// Gradient of `f` under this system's fallback policy.
    pub fn gradient(&self, f: &ScalarField, x: &StateVector) -> Result<StateVector> {
        self.check_state(x)?;
        let g = f.gradient(x, self.fd_eps)?;
        check_dim(self.dimension, g.len())?;
        Ok(g)
    }

    /// `{f, g}(x) = ∇f(x)ᵀ Π(x) ∇g(x)`.
    pub fn poisson_bracket(
        &self,
        f: &ScalarField,
        g: &ScalarField,
        x: &StateVector,
    ) -> Result<f64> {
        let pi = self.structure_matrix(x)?;
        let df = self.gradient(f, x)?;
        let dg = self.gradient(g, x)?;
        Ok(df.dot(&(pi * dg)))
    }

    /// `X_H(x) = Π(x) ∇H(x)`.
    pub fn hamiltonian_vector_field(&self, x: &StateVector) -> Result<StateVector> {
        let pi = self.structure_matrix(x)?;
        let dh = self.gradient(&self.hamiltonian, x)?;
        Ok(pi * dh)
    }

    /// Largest `|Π(x) ∇C(x)|` over the declared Casimirs (0 when none).
    pub fn casimir_defect(&self, x: &StateVector) -> Result<f64> {
        let pi = self.structure_matrix(x)?;
        let mut worst = 0.0_f64;
        for c in &self.casimirs {
            let dc = self.gradient(c, x)?;
            worst = worst.max((&pi * dc).amax());
        }
        Ok(worst)
    }

    /// `X_H` packaged as a [`VectorField`] for the generic integrators.
    ///
    /// Evaluation errors surface as NaN components, which every integrator
    /// rejects as non-finite.
    pub fn vector_field(&self) -> VectorField {
        let system = self.clone();
        VectorField::new(self.dimension, move |x| {
            system
                .hamiltonian_vector_field(x)
                .unwrap_or_else(|_| StateVector::from_element(x.len(), f64::NAN))
        })
    }
}

//! One-step maps for autonomous ODEs `ẋ = f(x)`.
//!
//! The explicit and modified Euler rules, the implicit midpoint (one-stage
//! Gauss-Legendre) rule, general dense Runge-Kutta tableaux and the Ruth map
//! of the harmonic oscillator. Step sizes are plain `f64`; negative values
//! integrate backwards in time.

mod implicit;
mod tableau;

use std::fmt;
use std::sync::Arc;

pub use implicit::{solve as solve_implicit, ImplicitSolverConfig, SolverStrategy};
pub use tableau::ButcherTableau;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::poisson::StateVector;

type FieldFn = dyn Fn(&StateVector) -> StateVector + Send + Sync;

/// Right-hand side `f` of `ẋ = f(x)`.
#[derive(Clone)]
pub struct VectorField {
    dimension: usize,
    eval: Arc<FieldFn>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl VectorField {
    pub fn new(
        dimension: usize,
        eval: impl Fn(&StateVector) -> StateVector + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            eval: Arc::new(eval),
        }
    }

    /// The zero field on ℝⁿ.
    pub fn zero(dimension: usize) -> Self {
        Self::new(dimension, |x| StateVector::zeros(x.len()))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn eval(&self, x: &StateVector) -> Result<StateVector> {
        check_dim(self.dimension, x.len())?;
        let fx = (self.eval)(x);
        check_dim(self.dimension, fx.len())?;
        check_finite(fx.iter(), "vector field output")?;
        Ok(fx)
    }
}

/// A strictly positive, finite step size.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StepSize(f64);

impl StepSize {
    pub fn new(h: f64) -> Result<Self> {
        if h.is_finite() && h > 0.0 {
            Ok(Self(h))
        } else {
            Err(Error::InvalidParameter(format!(
                "step size must be positive and finite, got {h}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<StepSize> for f64 {
    fn from(h: StepSize) -> f64 {
        h.0
    }
}

fn check_step(f: &VectorField, x: &StateVector, h: f64) -> Result<()> {
    check_dim(f.dimension(), x.len())?;
    check_finite(x.iter(), "state")?;
    if h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite("step size"))
    }
}

/// `x + h·f(x)`.
pub fn explicit_euler_step(f: &VectorField, x: &StateVector, h: f64) -> Result<StateVector> {
    check_step(f, x, h)?;
    Ok(x + f.eval(x)? * h)
}

/// Solves `y = x + h·(f(x) + f(y))`.
///
/// Note the missing ½: this is the rule exactly as stated, which advances
/// at twice the rate of the trapezoidal rule. See [`trapezoid_step`].
pub fn modified_euler_step(
    f: &VectorField,
    x: &StateVector,
    h: f64,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    implicit_two_point(f, x, h, 1.0, cfg)
}

/// Solves `y = x + (h/2)·(f(x) + f(y))`.
pub fn trapezoid_step(
    f: &VectorField,
    x: &StateVector,
    h: f64,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    implicit_two_point(f, x, h, 0.5, cfg)
}

fn implicit_two_point(
    f: &VectorField,
    x: &StateVector,
    h: f64,
    weight: f64,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    check_step(f, x, h)?;
    let fx = f.eval(x)?;
    let c = weight * h;
    solve_implicit(|y| Ok(x + (&fx + f.eval(y)?) * c), x.clone(), cfg)
}

/// Implicit midpoint rule: solves `y = x + h·f((x + y)/2)`.
pub fn gauss_legendre_step(
    f: &VectorField,
    x: &StateVector,
    h: f64,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    check_step(f, x, h)?;
    solve_implicit(|y| Ok(x + f.eval(&((x + y) * 0.5))? * h), x.clone(), cfg)
}

/// General Runge-Kutta step:
/// `Xᵢ = x + h·Σⱼ aᵢⱼ f(Xⱼ)`, `x' = x + h·Σᵢ bᵢ f(Xᵢ)`.
///
/// Strictly lower-triangular tableaux are evaluated by forward substitution;
/// anything else solves the stacked stage system per `cfg`.
pub fn rk_step(
    f: &VectorField,
    tab: &ButcherTableau,
    x: &StateVector,
    h: f64,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    check_step(f, x, h)?;
    let s = tab.stages();
    let n = x.len();
    let a = tab.a();

    let slopes: Vec<StateVector> = if tab.is_explicit() {
        let mut k: Vec<StateVector> = Vec::with_capacity(s);
        for i in 0..s {
            let mut stage = x.clone();
            for (j, kj) in k.iter().enumerate() {
                if a[(i, j)] != 0.0 {
                    stage.axpy(h * a[(i, j)], kj, 1.0);
                }
            }
            k.push(f.eval(&stage)?);
        }
        k
    } else {
        let stage_map = |z: &StateVector| -> Result<StateVector> {
            let k: Vec<StateVector> = (0..s)
                .map(|j| f.eval(&z.rows(j * n, n).into_owned()))
                .collect::<Result<_>>()?;
            let mut out = StateVector::zeros(s * n);
            for i in 0..s {
                let mut stage = x.clone();
                for (j, kj) in k.iter().enumerate() {
                    stage.axpy(h * a[(i, j)], kj, 1.0);
                }
                out.rows_mut(i * n, n).copy_from(&stage);
            }
            Ok(out)
        };
        let guess = StateVector::from_iterator(s * n, (0..s).flat_map(|_| x.iter().copied()));
        let z = solve_implicit(stage_map, guess, cfg)?;
        (0..s)
            .map(|i| f.eval(&z.rows(i * n, n).into_owned()))
            .collect::<Result<_>>()?
    };

    let mut out = x.clone();
    for (bi, ki) in tab.b().iter().zip(&slopes) {
        out.axpy(h * bi, ki, 1.0);
    }
    Ok(out)
}

/// Ruth map for `q̇ = p, ṗ = −q`:
/// `(x¹, x²) ↦ (x¹ + h·x², −h·x¹ + (1 − h²)·x²)`.
pub fn ruth_step(x: [f64; 2], h: f64) -> [f64; 2] {
    [x[0] + h * x[1], -h * x[0] + (1.0 - h * h) * x[1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigidbody::{self, RigidBodyParams};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn v(xs: &[f64]) -> StateVector {
        StateVector::from_column_slice(xs)
    }

    fn linear(scale: f64) -> VectorField {
        VectorField::new(1, move |x| x * scale)
    }

    fn oscillator() -> VectorField {
        VectorField::new(2, |x| v(&[x[1], -x[0]]))
    }

    fn cfg() -> ImplicitSolverConfig {
        ImplicitSolverConfig::default()
    }

    #[test]
    fn euler_on_rigid_body() {
        let f = rigidbody::poisson_system(RigidBodyParams::new(2.0, 1.0).unwrap()).vector_field();
        let y = explicit_euler_step(&f, &v(&[1.0, 0.0, 1.0]), 0.1).unwrap();
        assert_abs_diff_eq!(y, v(&[1.0, -0.05, 1.0]), epsilon = 1e-15);
    }

    #[test]
    fn euler_trivial_cases() {
        let x = v(&[0.3, -2.0]);
        assert_eq!(
            explicit_euler_step(&VectorField::zero(2), &x, 0.7).unwrap(),
            x
        );
        assert_eq!(
            explicit_euler_step(&linear(1.0), &v(&[1.0]), 0.5).unwrap()[0],
            1.5
        );
    }

    #[test]
    fn step_input_validation() {
        let f = VectorField::zero(2);
        assert!(matches!(
            explicit_euler_step(&f, &v(&[1.0]), 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(explicit_euler_step(&f, &v(&[1.0, 2.0]), f64::NAN).is_err());
        assert!(explicit_euler_step(
            &VectorField::new(1, |x| x.map(|_| f64::INFINITY)),
            &v(&[1.0]),
            0.1
        )
        .is_err());
        assert!(StepSize::new(0.0).is_err());
        assert!(StepSize::new(-0.1).is_err());
        assert_eq!(f64::from(StepSize::new(0.25).unwrap()), 0.25);
    }

    #[test]
    fn modified_euler_examples() {
        let x = v(&[0.4, 1.0]);
        assert_eq!(
            modified_euler_step(&VectorField::zero(2), &x, 0.1, &cfg()).unwrap(),
            x
        );
        let y = modified_euler_step(&linear(-1.0), &v(&[1.0]), 0.1, &cfg()).unwrap();
        assert!((y[0] - 9.0 / 11.0).abs() <= 1e-12);
        let c = VectorField::new(2, |_| v(&[1.5, -2.0]));
        let y = modified_euler_step(&c, &x, 0.1, &cfg()).unwrap();
        assert_abs_diff_eq!(y, v(&[0.4 + 0.3, 1.0 - 0.4]), epsilon = 1e-15);
    }

    #[test]
    fn trapezoid_applies_the_half() {
        let y = trapezoid_step(&linear(-1.0), &v(&[1.0]), 0.1, &cfg()).unwrap();
        assert!((y[0] - 0.95 / 1.05).abs() <= 1e-12);
        let t = rk_step(
            &linear(-1.0),
            &ButcherTableau::trapezoid(),
            &v(&[1.0]),
            0.1,
            &cfg(),
        )
        .unwrap();
        assert!((t[0] - y[0]).abs() <= 1e-12);
    }

    #[test]
    fn modified_euler_residual_within_tolerance() {
        let f = VectorField::new(1, |x| x.map(|v| -v * v * v));
        let (x, h) = (v(&[0.8]), 0.05);
        let y = modified_euler_step(&f, &x, h, &cfg()).unwrap();
        let res = (&y - (&x + (f.eval(&x).unwrap() + f.eval(&y).unwrap()) * h)).amax();
        assert!(res <= cfg().tolerance);
    }

    #[test]
    fn gauss_legendre_examples() {
        let x = v(&[1.0, 2.0]);
        assert_eq!(
            gauss_legendre_step(&VectorField::zero(2), &x, 0.3, &cfg()).unwrap(),
            x
        );
        let y = gauss_legendre_step(&linear(-1.0), &v(&[1.0]), 0.1, &cfg()).unwrap();
        assert!((y[0] - 19.0 / 21.0).abs() <= 1e-12);
    }

    #[test]
    fn gauss_legendre_newton_agrees_with_fixed_point() {
        let f = oscillator();
        let x = v(&[0.3, -1.1]);
        let a = gauss_legendre_step(&f, &x, 0.2, &cfg()).unwrap();
        let b = gauss_legendre_step(&f, &x, 0.2, &cfg().with_strategy(SolverStrategy::NewtonFd))
            .unwrap();
        assert!((a - b).amax() <= 1e-11);
    }

    #[test]
    fn degenerate_tableaux_reproduce_named_rules() {
        let f = oscillator();
        let x = v(&[0.7, 0.2]);
        let e = rk_step(&f, &ButcherTableau::euler(), &x, 0.1, &cfg()).unwrap();
        assert_eq!(e, explicit_euler_step(&f, &x, 0.1).unwrap());
        let m = rk_step(&f, &ButcherTableau::midpoint(), &x, 0.1, &cfg()).unwrap();
        let g = gauss_legendre_step(&f, &x, 0.1, &cfg()).unwrap();
        assert!((m - g).amax() <= cfg().tolerance);
    }

    #[test]
    fn rk4_on_exponential_growth() {
        let y = rk_step(
            &linear(1.0),
            &ButcherTableau::rk4(),
            &v(&[1.0]),
            0.1,
            &cfg(),
        )
        .unwrap();
        let expected = 1.0 + 0.1 + 0.01 / 2.0 + 0.001 / 6.0 + 0.0001 / 24.0;
        assert!((y[0] - expected).abs() <= 1e-15, "{} vs {expected}", y[0]);
    }

    #[test]
    fn consistent_tableaux_have_local_error_at_least_second_order() {
        for tab in [
            ButcherTableau::euler(),
            ButcherTableau::midpoint(),
            ButcherTableau::rk4(),
            ButcherTableau::trapezoid(),
        ] {
            let err = |h: f64| {
                let cfg = cfg()
                    .with_tolerance(1e-15)
                    .with_strategy(SolverStrategy::NewtonFd);
                let y = rk_step(&linear(-0.7), &tab, &v(&[1.0]), h, &cfg).unwrap();
                (y[0] - (-0.7 * h).exp()).abs()
            };
            let ratio = err(0.1) / err(0.05);
            assert!(ratio >= 3.5, "ratio {ratio} for {tab:?}");
        }
    }

    #[test]
    fn gauss_legendre_keeps_quadratic_invariant() {
        let f = oscillator();
        let mut x = v(&[1.0, 0.5]);
        let q0 = x.norm_squared();
        for _ in 0..200 {
            x = gauss_legendre_step(&f, &x, 0.3, &cfg()).unwrap();
        }
        assert!((x.norm_squared() - q0).abs() <= cfg().tolerance * 10.0 * 200.0);
        // and per step
        let y = gauss_legendre_step(&f, &x, 0.3, &cfg()).unwrap();
        assert!((y.norm_squared() - x.norm_squared()).abs() <= cfg().tolerance * 10.0);
    }

    #[test]
    fn ruth_examples() {
        let y = ruth_step([1.0, 0.0], 0.1);
        assert_eq!(y, [1.0, -0.1]);
        assert_eq!(ruth_step([0.0, 0.0], 3.7), [0.0, 0.0]);
    }

    fn ruth_energy(x: [f64; 2]) -> f64 {
        0.5 * (x[0] * x[0] + x[1] * x[1])
    }

    proptest! {
        #[test]
        fn ruth_jacobian_has_unit_determinant(h in -2.0..2.0f64) {
            // columns of the Jacobian are the images of the unit vectors
            let c1 = ruth_step([1.0, 0.0], h);
            let c2 = ruth_step([0.0, 1.0], h);
            prop_assert!((c1[0] * c2[1] - c2[0] * c1[1] - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn ruth_energy_identity(x1 in -5.0..5.0f64, x2 in -5.0..5.0f64, h in -1.0..1.0f64) {
            let x = [x1, x2];
            let lhs = ruth_energy(ruth_step(x, h));
            let rhs = (1.0 + h * h) * ruth_energy(x) + h * h * (h * h / 2.0 - 1.0) * x2 * x2 + h.powi(3) * x1 * x2;
            prop_assert!((lhs - rhs).abs() <= 1e-12);
        }
    }
}

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::poisson::StateVector;

/// How implicit relations `y = G(y)` are solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStrategy {
    FixedPoint,
    /// Newton's method with a forward-difference Jacobian of `y - G(y)`.
    NewtonFd,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitSolverConfig {
    /// Threshold on the max-norm of `y - G(y)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub strategy: SolverStrategy,
}

impl Default for ImplicitSolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_iterations: 100,
            strategy: SolverStrategy::FixedPoint,
        }
    }
}

impl ImplicitSolverConfig {
    pub fn new(tolerance: f64, max_iterations: usize, strategy: SolverStrategy) -> Result<Self> {
        let cfg = Self {
            tolerance,
            max_iterations,
            strategy,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "solver tolerance must lie in (0, 1), got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_strategy(mut self, strategy: SolverStrategy) -> Self {
        self.strategy = strategy;
        self
    }
}

/// Solves `y = g(y)` starting from `guess`. On success the returned `y`
/// satisfies `|y - g(y)|∞ ≤ cfg.tolerance · max(1, |y|∞)`.
pub fn solve(
    g: impl Fn(&StateVector) -> Result<StateVector>,
    guess: StateVector,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    cfg.validate()?;
    match cfg.strategy {
        SolverStrategy::FixedPoint => fixed_point(g, guess, cfg),
        SolverStrategy::NewtonFd => newton(g, guess, cfg),
    }
}

fn scaled_tolerance(y: &StateVector, cfg: &ImplicitSolverConfig) -> f64 {
    cfg.tolerance * y.amax().max(1.0)
}

fn fixed_point(
    g: impl Fn(&StateVector) -> Result<StateVector>,
    mut y: StateVector,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let next = g(&y)?;
        residual = (&next - &y).amax();
        if !residual.is_finite() {
            break;
        }
        y = next;
        if residual <= scaled_tolerance(&y, cfg) {
            // one more application keeps the defining residual under tolerance
            let next = g(&y)?;
            if (&next - &y).amax() <= scaled_tolerance(&y, cfg) {
                return Ok(y);
            }
            y = next;
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual,
    })
}

fn newton(
    g: impl Fn(&StateVector) -> Result<StateVector>,
    mut y: StateVector,
    cfg: &ImplicitSolverConfig,
) -> Result<StateVector> {
    let n = y.len();
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let gy = g(&y)?;
        let f = &y - &gy;
        residual = f.amax();
        if !residual.is_finite() {
            break;
        }
        if residual <= scaled_tolerance(&y, cfg) {
            return Ok(y);
        }
        let mut jac = DMatrix::<f64>::identity(n, n);
        let mut probe = y.clone();
        for j in 0..n {
            let step = 1e-8 * y[j].abs().max(1.0);
            probe[j] = y[j] + step;
            let gj = g(&probe)?;
            probe[j] = y[j];
            for i in 0..n {
                jac[(i, j)] -= (gj[i] - gy[i]) / step;
            }
        }
        let delta = jac.lu().solve(&f).ok_or(Error::NoConvergence {
            iterations: 0,
            residual,
        })?;
        y -= delta;
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> StateVector {
        StateVector::from_element(1, v)
    }

    #[test]
    fn fixed_point_solves_cosine() {
        let y = solve(
            |y| Ok(y.map(f64::cos)),
            scalar(1.0),
            &ImplicitSolverConfig::default(),
        )
        .unwrap();
        assert!((y[0] - y[0].cos()).abs() <= 1e-12);
    }

    #[test]
    fn newton_handles_expanding_map() {
        // fixed point of y = 3y - 2 is y = 1; plain iteration diverges
        let g = |y: &StateVector| Ok(y.map(|v| 3.0 * v - 2.0));
        let cfg = ImplicitSolverConfig::default();
        assert!(matches!(
            solve(g, scalar(0.0), &cfg),
            Err(Error::NoConvergence { .. })
        ));
        let y = solve(g, scalar(0.0), &cfg.with_strategy(SolverStrategy::NewtonFd)).unwrap();
        assert!((y[0] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(ImplicitSolverConfig::new(1.5, 10, SolverStrategy::FixedPoint).is_err());
        assert!(ImplicitSolverConfig::new(1e-10, 0, SolverStrategy::FixedPoint).is_err());
        assert!(ImplicitSolverConfig::new(1e-10, 10, SolverStrategy::NewtonFd).is_ok());
    }

    #[test]
    fn reports_final_residual() {
        let cfg = ImplicitSolverConfig::new(1e-12, 3, SolverStrategy::FixedPoint).unwrap();
        match solve(|y| Ok(y.map(|v| 0.5 * v + 1.0)), scalar(0.0), &cfg) {
            Err(Error::NoConvergence {
                iterations,
                residual,
            }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

//! Numerical certification of structural properties of one-step maps.
//!
//! Every check differentiates the map by central differences and compares
//! against the property in max-norm:
//!
//! * Poisson map: `D·Π(x)·Dᵀ = Π(φ(x))`, where `D` is the Jacobian of `φ` at `x`;
//! * area preservation in canonical ℝ²: `det D = 1`;
//! * drift of an observable along iterates;
//! * empirical global convergence order against an exact solution.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::integrators::{
    explicit_euler_step, gauss_legendre_step, modified_euler_step, rk_step, ruth_step,
    trapezoid_step, ButcherTableau, ImplicitSolverConfig, VectorField,
};
use crate::poisson::{Matrix, PoissonSystem, ScalarField, StateVector};
use crate::rigidbody::{self, LieTrotterVariant, RigidBodyParams, RigidBodyState};
use crate::splitting::SplitScheme;

/// Default finite-difference step for Jacobians.
pub const DEFAULT_FD_EPS: f64 = 1e-6;

/// Threshold used by the structural checks, above FD noise and below
/// genuine violations.
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Errors at or below this level count as exact in [`convergence_order`].
pub const EXACTNESS_THRESHOLD: f64 = 1e-12;

type ApplyFn = dyn Fn(&StateVector, f64) -> Result<StateVector> + Send + Sync;

/// A numerical integrator `x ↦ φ_h(x)` on ℝⁿ.
#[derive(Clone)]
pub struct OneStepMap {
    dimension: usize,
    apply: Arc<ApplyFn>,
}

impl fmt::Debug for OneStepMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OneStepMap")
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl OneStepMap {
    pub fn new(
        dimension: usize,
        apply: impl Fn(&StateVector, f64) -> Result<StateVector> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            apply: Arc::new(apply),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn apply(&self, x: &StateVector, h: f64) -> Result<StateVector> {
        check_dim(self.dimension, x.len())?;
        let y = (self.apply)(x, h)?;
        check_dim(self.dimension, y.len())?;
        Ok(y)
    }

    pub fn identity(dimension: usize) -> Self {
        Self::new(dimension, |x, _| Ok(x.clone()))
    }

    pub fn explicit_euler(f: VectorField) -> Self {
        Self::new(f.dimension(), move |x, h| explicit_euler_step(&f, x, h))
    }

    pub fn modified_euler(f: VectorField, cfg: ImplicitSolverConfig) -> Self {
        Self::new(f.dimension(), move |x, h| {
            modified_euler_step(&f, x, h, &cfg)
        })
    }

    pub fn trapezoid(f: VectorField, cfg: ImplicitSolverConfig) -> Self {
        Self::new(f.dimension(), move |x, h| trapezoid_step(&f, x, h, &cfg))
    }

    pub fn gauss_legendre(f: VectorField, cfg: ImplicitSolverConfig) -> Self {
        Self::new(f.dimension(), move |x, h| {
            gauss_legendre_step(&f, x, h, &cfg)
        })
    }

    pub fn runge_kutta(f: VectorField, tableau: ButcherTableau, cfg: ImplicitSolverConfig) -> Self {
        Self::new(f.dimension(), move |x, h| rk_step(&f, &tableau, x, h, &cfg))
    }

    pub fn ruth() -> Self {
        Self::new(2, |x, h| {
            let y = ruth_step([x[0], x[1]], h);
            Ok(StateVector::from_column_slice(&y))
        })
    }

    /// The composition selected by the scheme's order target.
    pub fn split(scheme: SplitScheme) -> Self {
        Self::new(scheme.dimension(), move |x, h| scheme.step(x, h))
    }

    pub fn rigid_lie_trotter(params: RigidBodyParams, variant: LieTrotterVariant) -> Self {
        Self::new(3, move |x, h| {
            let m = RigidBodyState::try_from(x)?;
            Ok(rigidbody::lie_trotter_rigid_step(params, m, h, variant).to_vector())
        })
    }

    /// The exact flow of the Euler equations, advanced by `h`.
    pub fn rigid_exact(params: RigidBodyParams) -> Self {
        Self::new(3, move |x, h| {
            let m = RigidBodyState::try_from(x)?;
            Ok(rigidbody::exact_solution(params, m, h).to_vector())
        })
    }
}

/// Central-difference Jacobian of `y ↦ map(y, h)` at `x` with absolute step `fd_eps`.
pub fn fd_jacobian(map: &OneStepMap, x: &StateVector, h: f64, fd_eps: f64) -> Result<Matrix> {
    if !(fd_eps > 0.0 && fd_eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "fd_eps must be positive, got {fd_eps}"
        )));
    }
    let n = map.dimension();
    check_dim(n, x.len())?;
    let mut jac = Matrix::zeros(n, n);
    let mut probe = x.clone();
    for j in 0..n {
        probe[j] = x[j] + fd_eps;
        let plus = map.apply(&probe, h)?;
        probe[j] = x[j] - fd_eps;
        let minus = map.apply(&probe, h)?;
        probe[j] = x[j];
        jac.set_column(j, &((plus - minus) / (2.0 * fd_eps)));
    }
    check_finite(jac.iter(), "jacobian")?;
    Ok(jac)
}

/// `max |D·Π(x)·Dᵀ − Π(φ(x))|`.
pub fn poisson_residual(
    system: &PoissonSystem,
    map: &OneStepMap,
    x: &StateVector,
    h: f64,
    fd_eps: f64,
) -> Result<f64> {
    check_dim(system.dimension(), map.dimension())?;
    let d = fd_jacobian(map, x, h, fd_eps)?;
    let pi = system.structure_matrix(x)?;
    let y = map.apply(x, h)?;
    let pi_y = system.structure_matrix(&y)?;
    Ok((&d * pi * d.transpose() - pi_y).amax())
}

/// `|det D − 1|` for a map on canonical ℝ².
pub fn symplectic_residual_2d(
    map: &OneStepMap,
    x: &StateVector,
    h: f64,
    fd_eps: f64,
) -> Result<f64> {
    check_dim(2, map.dimension())?;
    let d = fd_jacobian(map, x, h, fd_eps)?;
    Ok((d[(0, 0)] * d[(1, 1)] - d[(0, 1)] * d[(1, 0)] - 1.0).abs())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftSample {
    pub step: usize,
    pub t: f64,
    /// `observable(xₙ) − observable(x₀)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub samples: Vec<DriftSample>,
    pub max_abs_deviation: f64,
    pub final_deviation: f64,
}

/// Iterates `map` for `steps` steps and records the deviation of
/// `observable` from its initial value after each step.
pub fn drift(
    map: &OneStepMap,
    observable: &ScalarField,
    x0: &StateVector,
    h: f64,
    steps: usize,
) -> Result<DriftReport> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "drift needs at least one step".into(),
        ));
    }
    let base = observable.value(x0);
    let mut x = x0.clone();
    let mut samples = Vec::with_capacity(steps);
    let mut max_abs = 0.0_f64;
    for step in 1..=steps {
        x = map.apply(&x, h).map_err(|_| Error::BlowUp { step })?;
        let value = observable.value(&x) - base;
        if !value.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { step });
        }
        max_abs = max_abs.max(value.abs());
        samples.push(DriftSample {
            step,
            t: step as f64 * h,
            value,
        });
    }
    let final_deviation = samples.last().map_or(0.0, |s| s.value);
    Ok(DriftReport {
        samples,
        max_abs_deviation: max_abs,
        final_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub h_values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log h`; `+∞` when every
    /// error is at or below [`EXACTNESS_THRESHOLD`].
    pub slope: f64,
}

impl OrderEstimate {
    pub fn is_exact(&self) -> bool {
        self.slope == f64::INFINITY
    }
}

/// Max-norm global error at time `t_final` of the iterated map against `oracle`.
pub fn global_error(
    map: &OneStepMap,
    oracle: &dyn Fn(&StateVector, f64) -> StateVector,
    x0: &StateVector,
    t_final: f64,
    h: f64,
) -> Result<f64> {
    let steps = (t_final / h).round();
    if steps.is_nan() || steps < 1.0 || (steps * h - t_final).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "step {h} does not divide T = {t_final}"
        )));
    }
    let mut x = x0.clone();
    for step in 0..steps as usize {
        x = map
            .apply(&x, h)
            .map_err(|_| Error::BlowUp { step: step + 1 })?;
    }
    let err = (x - oracle(x0, t_final)).amax();
    if err.is_finite() {
        Ok(err)
    } else {
        Err(Error::BlowUp {
            step: steps as usize,
        })
    }
}

/// Global errors at `t_final` for each step size and the fitted order.
pub fn convergence_order(
    map: &OneStepMap,
    oracle: &dyn Fn(&StateVector, f64) -> StateVector,
    x0: &StateVector,
    t_final: f64,
    h_values: &[f64],
) -> Result<OrderEstimate> {
    if h_values.len() < 3 {
        return Err(Error::InvalidParameter(
            "order fit needs at least three step sizes".into(),
        ));
    }
    if h_values.windows(2).any(|w| w[1] >= w[0]) || h_values.iter().any(|h| h.is_nan() || *h <= 0.0)
    {
        return Err(Error::InvalidParameter(
            "step sizes must be positive and decreasing".into(),
        ));
    }
    let errors: Vec<f64> = h_values
        .iter()
        .map(|&h| global_error(map, oracle, x0, t_final, h))
        .collect::<Result<_>>()?;
    let slope = if errors.iter().all(|&e| e <= EXACTNESS_THRESHOLD) {
        f64::INFINITY
    } else {
        let xs: Vec<f64> = h_values.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errors
            .iter()
            .map(|e| e.max(f64::MIN_POSITIVE).ln())
            .collect();
        least_squares_slope(&xs, &ys)
    };
    Ok(OrderEstimate {
        h_values: h_values.to_vec(),
        errors,
        slope,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Step size `h = 1/(2bA − aA)` at which the one-stage method `(a, b)` is
/// claimed to be a Poisson map for `Π = [[0, x₂], [−x₂, 0]]`,
/// `H = A·x₁ + B·x₂ + C`. `None` when `2bA − aA = 0`.
///
/// The one-stage map is linear with second component depending on `x₂`
/// alone, so in fact `D·Π·Dᵀ = Π(φ(x))` holds for every `h`; the value is
/// reported as the closed-form expression, not as a characterization.
pub fn rk1_poisson_condition(big_a: f64, a: f64, b: f64) -> Option<f64> {
    let denom = 2.0 * b * big_a - a * big_a;
    if denom == 0.0 {
        None
    } else {
        Some(1.0 / denom)
    }
}

/// Seeded states with entries uniform in `[-half_width, half_width]`.
pub fn random_states(
    seed: u64,
    count: usize,
    dimension: usize,
    half_width: f64,
) -> Vec<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| StateVector::from_fn(dimension, |_, _| rng.gen_range(-half_width..=half_width)))
        .collect()
}

/// Seeded points of ℝ³ with uniformly random direction and norm in
/// `[r_min, r_max]`.
pub fn random_shell_states(seed: u64, count: usize, r_min: f64, r_max: f64) -> Vec<StateVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v = StateVector::from_fn(3, |_, _| rng.gen_range(-1.0..=1.0));
        let norm = v.norm();
        if !(1e-3..=1.0).contains(&norm) {
            continue;
        }
        let radius = rng.gen_range(r_min..=r_max);
        out.push(v * (radius / norm));
    }
    out
}

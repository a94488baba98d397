//! Composition methods built from exactly integrable flows.
//!
//! When `H = H₁ + … + H_k` and every `exp(t·X_{Hᵢ})` is known in closed form,
//! composing those flows gives a Poisson map. Three recipes are provided:
//!
//! * Lie-Trotter, `φ_h = exp(hX_k) ∘ … ∘ exp(hX_1)` (order 1);
//! * Strang, the palindromic half/full/half composition (order 2);
//! * the triple-jump ladder `φ^{2n+2}_h = φ^{2n}_{x₁h} ∘ φ^{2n}_{x₀h} ∘ φ^{2n}_{x₁h}`
//!   with `x₀ = 2^{1/(2n+1)} / (2^{1/(2n+1)} − 2)` and `x₁ = 1 / (2 − 2^{1/(2n+1)})`.
//!
//! Sub-steps may be negative (`x₀ < 0`), so every flow must accept negative time.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::poisson::StateVector;

type AdvanceFn = dyn Fn(&StateVector, f64) -> StateVector + Send + Sync;

/// Closed-form flow `exp(t·X_{Hᵢ})` of one split term.
#[derive(Clone)]
pub struct ExactFlow {
    dimension: usize,
    advance: Arc<AdvanceFn>,
}

impl fmt::Debug for ExactFlow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactFlow")
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl ExactFlow {
    /// `advance(x, 0)` must return `x` exactly.
    pub fn new(
        dimension: usize,
        advance: impl Fn(&StateVector, f64) -> StateVector + Send + Sync + 'static,
    ) -> Self {
        Self {
            dimension,
            advance: Arc::new(advance),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn advance(&self, x: &StateVector, t: f64) -> StateVector {
        (self.advance)(x, t)
    }
}

/// Ordered list of exact flows plus the order of the composition to build.
#[derive(Debug, Clone)]
pub struct SplitScheme {
    flows: Vec<ExactFlow>,
    order_target: u32,
}

impl SplitScheme {
    /// `order_target` is 1 (Lie-Trotter), 2 (Strang) or an even order ≥ 4
    /// (triple-jump ladder).
    pub fn new(flows: Vec<ExactFlow>, order_target: u32) -> Result<Self> {
        let first = flows.first().ok_or_else(|| {
            Error::InvalidParameter("split scheme needs at least one flow".into())
        })?;
        let dim = first.dimension();
        for flow in &flows {
            check_dim(dim, flow.dimension())?;
        }
        validate_order(order_target)?;
        Ok(Self {
            flows,
            order_target,
        })
    }

    pub fn with_order(mut self, order_target: u32) -> Result<Self> {
        validate_order(order_target)?;
        self.order_target = order_target;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.flows[0].dimension()
    }

    pub fn flows(&self) -> &[ExactFlow] {
        &self.flows
    }

    pub fn order_target(&self) -> u32 {
        self.order_target
    }

    /// One step of the composition selected by `order_target`.
    pub fn step(&self, x: &StateVector, h: f64) -> Result<StateVector> {
        match self.order_target {
            1 => lie_trotter_step(self, x, h),
            2 => strang_step(self, x, h),
            order => yoshida_step(self, x, h, order),
        }
    }

    fn check(&self, x: &StateVector, h: f64) -> Result<()> {
        check_dim(self.dimension(), x.len())?;
        check_finite(x.iter(), "state")?;
        if h.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("step size"))
        }
    }
}

fn validate_order(order: u32) -> Result<()> {
    if order == 1 || (order >= 2 && order.is_multiple_of(2)) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "composition order must be 1 or even, got {order}"
        )))
    }
}

/// Applies each flow for time `h`, in list order.
pub fn lie_trotter_step(scheme: &SplitScheme, x: &StateVector, h: f64) -> Result<StateVector> {
    scheme.check(x, h)?;
    Ok(scheme
        .flows
        .iter()
        .fold(x.clone(), |y, flow| flow.advance(&y, h)))
}

fn strang_unchecked(scheme: &SplitScheme, x: &StateVector, h: f64) -> StateVector {
    let (last, rest) = scheme.flows.split_last().expect("non-empty");
    let half = 0.5 * h;
    let mut y = x.clone();
    for flow in rest {
        y = flow.advance(&y, half);
    }
    y = last.advance(&y, h);
    for flow in rest.iter().rev() {
        y = flow.advance(&y, half);
    }
    y
}

/// Palindromic composition: flows `1..k−1` for `h/2`, flow `k` for `h`,
/// then flows `k−1..1` for `h/2`.
pub fn strang_step(scheme: &SplitScheme, x: &StateVector, h: f64) -> Result<StateVector> {
    scheme.check(x, h)?;
    Ok(strang_unchecked(scheme, x, h))
}

fn ladder(
    scheme: &SplitScheme,
    x: &StateVector,
    h: f64,
    order: u32,
    coeffs: &[CompositionCoefficients],
) -> StateVector {
    if order == 2 {
        return strang_unchecked(scheme, x, h);
    }
    let c = coeffs[(order / 2 - 2) as usize];
    let inner = order - 2;
    let y = ladder(scheme, x, c.x1 * h, inner, coeffs);
    let y = ladder(scheme, &y, c.x0 * h, inner, coeffs);
    ladder(scheme, &y, c.x1 * h, inner, coeffs)
}

/// Triple-jump composition of even order `order ≥ 4`, built recursively on
/// top of [`strang_step`].
pub fn yoshida_step(
    scheme: &SplitScheme,
    x: &StateVector,
    h: f64,
    order: u32,
) -> Result<StateVector> {
    if order < 4 || !order.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "triple-jump order must be even and at least 4, got {order}"
        )));
    }
    scheme.check(x, h)?;
    if order > 8 {
        let count = composition_step_count(order / 2);
        log::warn!(
            "order {order} composition uses {} second-order sub-steps per step",
            count.second_order_applications
        );
    }
    let coeffs: Vec<CompositionCoefficients> = (1..order / 2)
        .map(|n| composition_coefficients(n).expect("n >= 1"))
        .collect();
    Ok(ladder(scheme, x, h, order, &coeffs))
}

/// Weights that raise an order-2n composition to order 2n+2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionCoefficients {
    pub n: u32,
    pub x0: f64,
    pub x1: f64,
}

pub fn composition_coefficients(n: u32) -> Result<CompositionCoefficients> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "composition level n must be at least 1".into(),
        ));
    }
    let root = 2f64.powf(1.0 / f64::from(2 * n + 1));
    Ok(CompositionCoefficients {
        n,
        x0: root / (root - 2.0),
        x1: 1.0 / (2.0 - root),
    })
}

/// Cost of an order-2n composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCount {
    /// `k = 1 + 3^{n−1}`.
    pub steps: u64,
    /// Number of second-order sub-steps, `3^{n−1}`.
    pub second_order_applications: u64,
}

pub fn composition_step_count(n: u32) -> StepCount {
    assert!(n >= 1, "composition level n must be at least 1");
    let applications = 3u64.pow(n - 1);
    StepCount {
        steps: 1 + applications,
        second_order_applications: applications,
    }
}

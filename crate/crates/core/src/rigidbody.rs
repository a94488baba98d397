//! The symmetric free rigid body on `so(3)* ≅ ℝ³`.
//!
//! With `I₁ = I₂ > I₃ > 0` the Euler equations read
//!
//! ```text
//! ṁ₁ =  a₁ m₂ m₃
//! ṁ₂ = −a₁ m₁ m₃        a₁ = 1/I₃ − 1/I₁
//! ṁ₃ =  0
//! ```
//!
//! and are generated by `H = ½(m₁²/I₁ + m₂²/I₁ + m₃²/I₃)` under the
//! Lie-Poisson structure `Π(m) = [[0, −m₃, m₂], [m₃, 0, −m₁], [−m₂, m₁, 0]]`.
//! `C = ½|m|²` is a Casimir, so trajectories stay on the spheres `|m| = k`.
//!
//! Splitting `H` into its three quadratic terms gives three rotations about
//! the coordinate axes, each solvable in closed form. Their composition is
//! the Lie-Trotter step; the rotation matrices `M`, `N`, `P` and their
//! product `R = M·N·P` are exposed through [`StepPropagator`].

use nalgebra::{Complex, Matrix3, Vector3};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::poisson::{Matrix, PoissonSystem, ScalarField, StateVector};
use crate::splitting::{ExactFlow, SplitScheme};

/// Principal moments of inertia, `I₁ = I₂` and the axial `I₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidBodyParams {
    i1: f64,
    i3: f64,
}

impl RigidBodyParams {
    /// Requires `I₁ > I₃ > 0`.
    pub fn new(i1: f64, i3: f64) -> Result<Self> {
        if !(i1.is_finite() && i3.is_finite()) {
            return Err(Error::NonFinite("inertia"));
        }
        if !(i1 > i3 && i3 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inertia must satisfy I1 > I3 > 0, got I1={i1}, I3={i3}"
            )));
        }
        Ok(Self { i1, i3 })
    }

    pub fn i1(&self) -> f64 {
        self.i1
    }

    pub fn i3(&self) -> f64 {
        self.i3
    }

    pub fn a1(&self) -> f64 {
        coefficient_a1(*self)
    }
}

/// `a₁ = 1/I₃ − 1/I₁`, strictly positive.
pub fn coefficient_a1(params: RigidBodyParams) -> f64 {
    1.0 / params.i3 - 1.0 / params.i1
}

/// Body angular momentum `(m₁, m₂, m₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RigidBodyState {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl RigidBodyState {
    pub const fn new(m1: f64, m2: f64, m3: f64) -> Self {
        Self { m1, m2, m3 }
    }

    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        check_dim(3, xs.len())?;
        check_finite(xs, "rigid body state")?;
        Ok(Self::new(xs[0], xs[1], xs[2]))
    }

    pub fn to_vector(self) -> StateVector {
        StateVector::from_column_slice(&[self.m1, self.m2, self.m3])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }

    pub fn norm_squared(self) -> f64 {
        self.m1 * self.m1 + self.m2 * self.m2 + self.m3 * self.m3
    }
}

impl From<Vector3<f64>> for RigidBodyState {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<RigidBodyState> for Vector3<f64> {
    fn from(m: RigidBodyState) -> Self {
        Vector3::new(m.m1, m.m2, m.m3)
    }
}

impl TryFrom<&StateVector> for RigidBodyState {
    type Error = Error;

    fn try_from(x: &StateVector) -> Result<Self> {
        Self::from_slice(x.as_slice())
    }
}

/// Right-hand side of the Euler equations.
pub fn euler_rhs(params: RigidBodyParams, m: RigidBodyState) -> RigidBodyState {
    let a1 = params.a1();
    RigidBodyState::new(a1 * m.m2 * m.m3, -a1 * m.m1 * m.m3, 0.0)
}

pub fn hamiltonian(params: RigidBodyParams, m: RigidBodyState) -> f64 {
    0.5 * ((m.m1 * m.m1 + m.m2 * m.m2) / params.i1 + m.m3 * m.m3 / params.i3)
}

pub fn casimir(m: RigidBodyState) -> f64 {
    0.5 * m.norm_squared()
}

/// Lie-Poisson structure matrix of `so(3)*` at `m`.
pub fn structure(m: RigidBodyState) -> Matrix3<f64> {
    Matrix3::new(0.0, -m.m3, m.m2, m.m3, 0.0, -m.m1, -m.m2, m.m1, 0.0)
}

/// The body as a generic [`PoissonSystem`] with closed-form gradients and
/// the Casimir `C = ½|m|²`.
pub fn poisson_system(params: RigidBodyParams) -> PoissonSystem {
    let (i1, i3) = (params.i1, params.i3);
    let h = ScalarField::new(move |x| hamiltonian(params, RigidBodyState::new(x[0], x[1], x[2])))
        .with_gradient(move |x| StateVector::from_column_slice(&[x[0] / i1, x[1] / i1, x[2] / i3]));
    let c = ScalarField::new(|x| 0.5 * x.norm_squared()).with_gradient(|x| x.clone());
    PoissonSystem::new(
        3,
        |x| {
            let pi = structure(RigidBodyState::new(x[0], x[1], x[2]));
            Matrix::from_iterator(3, 3, pi.iter().copied())
        },
        h,
    )
    .expect("dimension 3")
    .with_casimir(c)
}

/// Exact flow of `H₁ = m₁²/(2I₁)`: fixes `m₁` and rotates `(m₂, m₃)` by
/// `θ = t·m₁/I₁`.
pub fn flow_axis1(params: RigidBodyParams, m: RigidBodyState, t: f64) -> RigidBodyState {
    let (s, c) = (t * m.m1 / params.i1).sin_cos();
    RigidBodyState::new(m.m1, c * m.m2 + s * m.m3, -s * m.m2 + c * m.m3)
}

/// Exact flow of `H₂ = m₂²/(2I₁)`: fixes `m₂` and rotates `(m₁, m₃)` by
/// `θ = t·m₂/I₁`.
pub fn flow_axis2(params: RigidBodyParams, m: RigidBodyState, t: f64) -> RigidBodyState {
    let (s, c) = (t * m.m2 / params.i1).sin_cos();
    RigidBodyState::new(c * m.m1 - s * m.m3, m.m2, s * m.m1 + c * m.m3)
}

/// Exact flow of `H₃ = m₃²/(2I₃)`: fixes `m₃` and rotates `(m₁, m₂)` by
/// `θ = t·m₃/I₃`.
pub fn flow_axis3(params: RigidBodyParams, m: RigidBodyState, t: f64) -> RigidBodyState {
    let (s, c) = (t * m.m3 / params.i3).sin_cos();
    RigidBodyState::new(c * m.m1 + s * m.m2, -s * m.m1 + c * m.m2, m.m3)
}

/// How the rotation angles of the Lie-Trotter step are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LieTrotterVariant {
    /// Each rotation uses the state it is applied to: axis 1, then axis 2,
    /// then axis 3. A genuine composition of exact flows.
    #[default]
    StateDependent,
    /// All three angles taken from the input state and applied as the
    /// matrix product `M·N·P`.
    Frozen,
}

impl LieTrotterVariant {
    pub fn from_frozen(frozen: bool) -> Self {
        if frozen {
            Self::Frozen
        } else {
            Self::StateDependent
        }
    }
}

pub fn lie_trotter_rigid_step(
    params: RigidBodyParams,
    m: RigidBodyState,
    h: f64,
    variant: LieTrotterVariant,
) -> RigidBodyState {
    match variant {
        LieTrotterVariant::StateDependent => {
            let m = flow_axis1(params, m, h);
            let m = flow_axis2(params, m, h);
            flow_axis3(params, m, h)
        }
        LieTrotterVariant::Frozen => step_propagator(params, m, h).apply(m),
    }
}

/// The three axis flows as a [`SplitScheme`] of the given order
/// (1 = Lie-Trotter, 2 = Strang, ≥ 4 even = triple jump).
pub fn split_scheme(params: RigidBodyParams, order_target: u32) -> Result<SplitScheme> {
    let lift = |flow: fn(RigidBodyParams, RigidBodyState, f64) -> RigidBodyState| {
        ExactFlow::new(3, move |x, t| {
            flow(params, RigidBodyState::new(x[0], x[1], x[2]), t).to_vector()
        })
    };
    SplitScheme::new(
        vec![lift(flow_axis1), lift(flow_axis2), lift(flow_axis3)],
        order_target,
    )
}

/// Rotation matrices of one frozen Lie-Trotter step and their product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPropagator {
    pub m: Matrix3<f64>,
    pub n: Matrix3<f64>,
    pub p: Matrix3<f64>,
    pub r: Matrix3<f64>,
}

impl StepPropagator {
    pub fn apply(&self, m: RigidBodyState) -> RigidBodyState {
        (self.r * Vector3::from(m)).into()
    }
}

pub fn step_propagator(params: RigidBodyParams, m: RigidBodyState, h: f64) -> StepPropagator {
    let (s1, c1) = (h * m.m1 / params.i1).sin_cos();
    let (s2, c2) = (h * m.m2 / params.i1).sin_cos();
    let (s3, c3) = (h * m.m3 / params.i3).sin_cos();
    #[rustfmt::skip]
    let mm = Matrix3::new(
        1.0, 0.0, 0.0,
        0.0, c1, s1,
        0.0, -s1, c1,
    );
    #[rustfmt::skip]
    let nn = Matrix3::new(
        c2, 0.0, -s2,
        0.0, 1.0, 0.0,
        s2, 0.0, c2,
    );
    #[rustfmt::skip]
    let pp = Matrix3::new(
        c3, s3, 0.0,
        -s3, c3, 0.0,
        0.0, 0.0, 1.0,
    );
    StepPropagator {
        m: mm,
        n: nn,
        p: pp,
        r: mm * nn * pp,
    }
}

/// Eigenvalues of `R`, sorted by argument, with their moduli and product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicRoots {
    pub roots: [Complex<f64>; 3],
    pub moduli: [f64; 3],
    pub product: Complex<f64>,
}

impl CharacteristicRoots {
    fn new(mut roots: [Complex<f64>; 3]) -> Self {
        roots.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        let moduli = roots.map(|z| z.norm());
        let product = roots[0] * roots[1] * roots[2];
        Self {
            roots,
            moduli,
            product,
        }
    }
}

/// Roots of the characteristic polynomial of `prop.r`.
pub fn characteristic_roots(prop: &StepPropagator) -> Result<CharacteristicRoots> {
    let r = &prop.r;
    check_finite(r.iter(), "propagator")?;
    let roots = cubic_eigenvalues(r).or_else(|e| rotation_eigenvalues(r).ok_or(e))?;
    Ok(CharacteristicRoots::new(roots))
}

/// `λ³ − t λ² + c λ − d` with `t = tr R`, `c` the sum of principal 2×2
/// minors and `d = det R`. One real root by Cardano (or the trigonometric
/// form), Newton-polished, then deflation to a quadratic.
fn cubic_eigenvalues(r: &Matrix3<f64>) -> Result<[Complex<f64>; 3]> {
    let t = r.trace();
    let c = r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)] + r[(0, 0)] * r[(2, 2)]
        - r[(0, 2)] * r[(2, 0)]
        + r[(1, 1)] * r[(2, 2)]
        - r[(1, 2)] * r[(2, 1)];
    let d = r.determinant();
    let poly = |x: f64| ((x - t) * x + c) * x - d;
    let dpoly = |x: f64| (3.0 * x - 2.0 * t) * x + c;

    // depressed cubic y³ + p y + q with λ = y + t/3
    let shift = t / 3.0;
    let p = c - t * t / 3.0;
    let q = -2.0 * t * t * t / 27.0 + t * c / 3.0 - d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let mut real = if disc >= 0.0 {
        let sq = disc.sqrt();
        (-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt() + shift
    } else {
        let rad = 2.0 * (-p / 3.0).sqrt();
        let phi = ((3.0 * q) / (p * rad)).clamp(-1.0, 1.0).acos() / 3.0;
        // the largest of the three real roots
        rad * phi.cos() + shift
    };
    for _ in 0..3 {
        let slope = dpoly(real);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = real - poly(real) / slope;
        if !next.is_finite() {
            break;
        }
        real = next;
    }
    if !real.is_finite() || real == 0.0 {
        return Err(Error::EigenFailure("no usable real root".into()));
    }

    // (λ − real)(λ² + b λ + k)
    let b = real - t;
    let k = d / real;
    let half = Complex::new(-b / 2.0, 0.0);
    let root = Complex::new(b * b / 4.0 - k, 0.0).sqrt();
    let roots = [Complex::new(real, 0.0), half + root, half - root];
    if roots
        .iter()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::EigenFailure("non-finite root".into()));
    }
    Ok(roots)
}

/// Eigenvalues `1, e^{±iθ}` of a proper rotation, `cos θ = (tr R − 1)/2`.
fn rotation_eigenvalues(r: &Matrix3<f64>) -> Option<[Complex<f64>; 3]> {
    let orthogonal = (r.transpose() * r - Matrix3::identity()).amax() <= 1e-10;
    if !orthogonal || (r.determinant() - 1.0).abs() > 1e-10 {
        return None;
    }
    let cos = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let sin = (1.0 - cos * cos).sqrt();
    Some([
        Complex::new(1.0, 0.0),
        Complex::new(cos, sin),
        Complex::new(cos, -sin),
    ])
}

/// Closed-form solution: `m₃` is constant and `(m₁, m₂)` rotates at rate
/// `ω = a₁·m₃`.
pub fn exact_solution(params: RigidBodyParams, m0: RigidBodyState, t: f64) -> RigidBodyState {
    let omega = params.a1() * m0.m3;
    let (s, c) = (omega * t).sin_cos();
    RigidBodyState::new(c * m0.m1 + s * m0.m2, -s * m0.m1 + c * m0.m2, m0.m3)
}

/// Radius `k` of the coadjoint orbit `|m| = k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitSpec {
    pub k: f64,
}

pub fn orbit_of(m: RigidBodyState) -> OrbitSpec {
    OrbitSpec {
        k: m.norm_squared().sqrt(),
    }
}

/// Kirillov-Kostant-Souriau form of the orbit through `m`, evaluated on
/// tangent vectors `u`, `v`:
/// `(1/k)(m₂ (du₁∧dv₃) − m₃ (du₁∧dv₂) − m₁ (du₂∧dv₃))`.
pub fn kks_form(m: RigidBodyState, u: Vector3<f64>, v: Vector3<f64>) -> Result<f64> {
    let k = orbit_of(m).k;
    if k == 0.0 {
        return Err(Error::DegenerateOrbit);
    }
    let mv = Vector3::from(m);
    let off = u.dot(&mv).abs().max(v.dot(&mv).abs());
    if off > 1e-10 {
        return Err(Error::NotTangent(off));
    }
    let w13 = u.x * v.z - u.z * v.x;
    let w12 = u.x * v.y - u.y * v.x;
    let w23 = u.y * v.z - u.z * v.y;
    Ok((m.m2 * w13 - m.m3 * w12 - m.m1 * w23) / k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrators::{rk_step, ButcherTableau, ImplicitSolverConfig};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn params() -> RigidBodyParams {
        RigidBodyParams::new(2.0, 1.0).unwrap()
    }

    fn close(a: RigidBodyState, b: RigidBodyState, tol: f64) -> bool {
        (Vector3::from(a) - Vector3::from(b)).amax() <= tol
    }

    #[test]
    fn params_validation() {
        assert!(RigidBodyParams::new(1.0, 1.0).is_err());
        assert!(RigidBodyParams::new(1.0, 2.0).is_err());
        assert!(RigidBodyParams::new(2.0, 0.0).is_err());
        assert!(RigidBodyParams::new(f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn a1_values() {
        assert_eq!(coefficient_a1(params()), 0.5);
        let far = RigidBodyParams::new(1e12, 1.0).unwrap();
        assert!((far.a1() - (1.0 - 1e-12)).abs() <= 1e-16);
        assert!(RigidBodyParams::new(1.0 + 1e-9, 1.0).unwrap().a1() > 0.0);
    }

    #[test]
    fn euler_rhs_examples() {
        assert_eq!(
            euler_rhs(params(), RigidBodyState::new(1.0, 0.0, 1.0)),
            RigidBodyState::new(0.0, -0.5, 0.0)
        );
        assert_eq!(
            euler_rhs(params(), RigidBodyState::new(0.0, 0.0, 4.0)),
            RigidBodyState::default()
        );
        let eq = euler_rhs(params(), RigidBodyState::new(0.3, -2.0, 0.0));
        assert_eq!(eq.to_array().map(f64::abs), [0.0; 3]);
    }

    #[test]
    fn energy_and_casimir_examples() {
        let m = RigidBodyState::new(1.0, 0.0, 1.0);
        assert_eq!(hamiltonian(params(), m), 0.75);
        assert_eq!(casimir(m), 1.0);
        assert_eq!(hamiltonian(params(), RigidBodyState::default()), 0.0);
        assert_eq!(casimir(RigidBodyState::default()), 0.0);
    }

    #[test]
    fn axis_flow_examples() {
        let p = RigidBodyParams::new(3.0, 1.0).unwrap();
        let y = flow_axis3(p, RigidBodyState::new(1.0, 0.0, 1.0), FRAC_PI_2);
        assert!(close(y, RigidBodyState::new(0.0, -1.0, 1.0), 1e-15));
        let m = RigidBodyState::new(0.0, 0.7, -1.2);
        assert_eq!(flow_axis1(p, m, 5.0), m);
    }

    #[test]
    fn axis_flows_generate_the_split_vector_fields() {
        // d/dt at t=0 equals Π ∇Hᵢ
        let p = params();
        let m = RigidBodyState::new(0.4, -0.9, 1.3);
        let pi = structure(m);
        let grads = [
            Vector3::new(m.m1 / p.i1(), 0.0, 0.0),
            Vector3::new(0.0, m.m2 / p.i1(), 0.0),
            Vector3::new(0.0, 0.0, m.m3 / p.i3()),
        ];
        let flows: [fn(RigidBodyParams, RigidBodyState, f64) -> RigidBodyState; 3] =
            [flow_axis1, flow_axis2, flow_axis3];
        let eps = 1e-6;
        for (flow, grad) in flows.iter().zip(grads) {
            let fd =
                (Vector3::from(flow(p, m, eps)) - Vector3::from(flow(p, m, -eps))) / (2.0 * eps);
            assert!((fd - pi * grad).amax() <= 1e-9);
        }
    }

    #[test]
    fn lie_trotter_axis_point_is_fixed() {
        let axis = RigidBodyState::new(0.0, 0.0, 1.0);
        for variant in [LieTrotterVariant::StateDependent, LieTrotterVariant::Frozen] {
            for h in [0.01, 0.3, 2.0] {
                assert!(close(
                    lie_trotter_rigid_step(params(), axis, h, variant),
                    axis,
                    1e-15
                ));
            }
        }
    }

    #[test]
    fn lie_trotter_stays_on_orbit() {
        let m = RigidBodyState::new(1.0, 0.0, 1.0);
        for variant in [LieTrotterVariant::StateDependent, LieTrotterVariant::Frozen] {
            let y = lie_trotter_rigid_step(params(), m, 0.01, variant);
            assert!((y.norm_squared() - 2.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn lie_trotter_is_first_order() {
        let p = params();
        let m0 = RigidBodyState::new(1.0, 1.0, 1.0);
        let err = |h: f64| {
            let steps = (1.0 / h).round() as usize;
            let mut m = m0;
            for _ in 0..steps {
                m = lie_trotter_rigid_step(p, m, h, LieTrotterVariant::StateDependent);
            }
            (Vector3::from(m) - Vector3::from(exact_solution(p, m0, 1.0))).amax()
        };
        let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
        for ratio in [e1 / e2, e2 / e3] {
            assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn m3_is_not_conserved_by_the_split_step() {
        let m0 = RigidBodyState::new(1.0, 1.0, 1.0);
        let m1 = lie_trotter_rigid_step(params(), m0, 0.1, LieTrotterVariant::StateDependent);
        assert!((m1.m3 - m0.m3).abs() > 1e-4);
    }

    #[test]
    fn propagator_identity_at_zero_step() {
        let prop = step_propagator(params(), RigidBodyState::new(0.3, 1.0, -2.0), 0.0);
        for mat in [prop.m, prop.n, prop.p, prop.r] {
            assert_eq!(mat, Matrix3::identity());
        }
        let roots = characteristic_roots(&prop).unwrap();
        for z in roots.roots {
            assert_eq!(z, Complex::new(1.0, 0.0));
        }
        assert_eq!(roots.product, Complex::new(1.0, 0.0));
    }

    #[test]
    fn propagator_matches_frozen_step() {
        let m = RigidBodyState::new(0.3, 1.0, -2.0);
        let prop = step_propagator(params(), m, 0.2);
        assert_eq!(
            prop.apply(m),
            lie_trotter_rigid_step(params(), m, 0.2, LieTrotterVariant::Frozen)
        );
    }

    #[test]
    fn rotation_fallback_agrees_with_cubic_path() {
        let prop = step_propagator(params(), RigidBodyState::new(1.0, 1.0, 1.0), 0.7);
        let mut a = cubic_eigenvalues(&prop.r).unwrap();
        let mut b = rotation_eigenvalues(&prop.r).unwrap();
        a.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        b.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() <= 1e-12);
        }
        assert!(rotation_eigenvalues(&(prop.r * 2.0)).is_none());
    }

    #[test]
    fn cubic_path_on_non_orthogonal_matrix() {
        // upper triangular: eigenvalues are the diagonal
        let r = Matrix3::new(2.0, 1.0, 0.0, 0.0, -1.0, 4.0, 0.0, 0.0, 0.5);
        let mut roots = cubic_eigenvalues(&r).unwrap().map(|z| z.re);
        roots.sort_by(f64::total_cmp);
        assert!(
            (roots[0] + 1.0).abs() < 1e-12
                && (roots[1] - 0.5).abs() < 1e-12
                && (roots[2] - 2.0).abs() < 1e-12
        );
    }

    #[test]
    fn exact_solution_examples() {
        let m0 = RigidBodyState::new(1.0, 0.0, 2.0);
        let y = exact_solution(params(), m0, FRAC_PI_2);
        assert!(close(y, RigidBodyState::new(0.0, -1.0, 2.0), 1e-15));
        assert_eq!(exact_solution(params(), m0, 0.0), m0);
    }

    #[test]
    fn exact_solution_agrees_with_fine_rk4() {
        let p = params();
        let m0 = RigidBodyState::new(1.0, 0.0, 2.0);
        let f = poisson_system(p).vector_field();
        let mut x = m0.to_vector();
        let h = 1e-4;
        let steps = (FRAC_PI_2 / h).round() as usize;
        let tab = ButcherTableau::rk4();
        for _ in 0..steps {
            x = rk_step(&f, &tab, &x, h, &ImplicitSolverConfig::default()).unwrap();
        }
        let t = steps as f64 * h;
        let exact = exact_solution(p, m0, t).to_vector();
        assert!((x - exact).amax() <= 1e-8);
    }

    #[test]
    fn orbit_and_kks_examples() {
        assert_eq!(orbit_of(RigidBodyState::new(3.0, 4.0, 0.0)).k, 5.0);
        let m = RigidBodyState::new(0.0, 0.0, 1.0);
        let (u, v) = (Vector3::new(1.0, 0.0, 0.0), Vector3::new(0.0, 1.0, 0.0));
        assert_eq!(kks_form(m, u, v).unwrap(), -1.0);
        assert_eq!(kks_form(m, u, u).unwrap(), 0.0);
        assert_eq!(
            kks_form(RigidBodyState::default(), u, v),
            Err(Error::DegenerateOrbit)
        );
        assert!(matches!(
            kks_form(m, Vector3::new(0.0, 0.0, 1.0), v),
            Err(Error::NotTangent(_))
        ));
    }

    #[test]
    fn state_conversions() {
        let x = StateVector::from_column_slice(&[1.0, 2.0, 3.0]);
        assert_eq!(
            RigidBodyState::try_from(&x).unwrap(),
            RigidBodyState::new(1.0, 2.0, 3.0)
        );
        assert!(RigidBodyState::from_slice(&[1.0, 2.0]).is_err());
        assert!(RigidBodyState::from_slice(&[1.0, f64::NAN, 0.0]).is_err());
    }

    fn state() -> impl Strategy<Value = RigidBodyState> {
        prop::array::uniform3(-2.0..2.0f64).prop_map(|a| RigidBodyState::new(a[0], a[1], a[2]))
    }

    proptest! {
        #[test]
        fn flows_preserve_norm_and_compose(m in state(), s in -3.0..3.0f64, t in -3.0..3.0f64) {
            let p = params();
            let flows: [fn(RigidBodyParams, RigidBodyState, f64) -> RigidBodyState; 3] =
                [flow_axis1, flow_axis2, flow_axis3];
            for flow in flows {
                prop_assert!((flow(p, m, t).norm_squared() - m.norm_squared()).abs() <= 1e-14);
                prop_assert!(close(flow(p, flow(p, m, s), t), flow(p, m, s + t), 1e-12));
                prop_assert_eq!(flow(p, m, 0.0), m);
            }
        }

        #[test]
        fn integrals_constant_along_exact_solution(m in state(), t in -10.0..10.0f64) {
            let p = params();
            let y = exact_solution(p, m, t);
            prop_assert!((hamiltonian(p, y) - hamiltonian(p, m)).abs() <= 1e-12);
            prop_assert!((casimir(y) - casimir(m)).abs() <= 1e-12);
        }

        #[test]
        fn exact_solution_solves_euler_equations(m in state(), t in -5.0..5.0f64) {
            let p = params();
            let eps = 1e-5;
            let fd = (Vector3::from(exact_solution(p, m, t + eps)) - Vector3::from(exact_solution(p, m, t - eps))) / (2.0 * eps);
            let rhs = Vector3::from(euler_rhs(p, exact_solution(p, m, t)));
            prop_assert!((fd - rhs).amax() <= 1e-6);
        }

        #[test]
        fn euler_rhs_is_hamiltonian_field(m in state()) {
            let p = params();
            let grad = Vector3::new(m.m1 / p.i1(), m.m2 / p.i1(), m.m3 / p.i3());
            let xh = structure(m) * grad;
            prop_assert!((xh - Vector3::from(euler_rhs(p, m))).amax() <= 1e-12);
        }

        #[test]
        fn propagator_is_special_orthogonal(m in state(), h in -1.0..1.0f64) {
            let prop = step_propagator(params(), m, h);
            for mat in [prop.m, prop.n, prop.p, prop.r] {
                prop_assert!((mat.transpose() * mat - Matrix3::identity()).amax() <= 1e-13);
                prop_assert!((mat.determinant() - 1.0).abs() <= 1e-13);
            }
        }
    }
}

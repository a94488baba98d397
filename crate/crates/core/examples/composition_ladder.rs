//! Lie-Trotter, Strang and triple-jump compositions on the rigid body,
//! with observed orders from the closed-form solution.

use poisson_integrators::rigidbody::{self, RigidBodyParams, RigidBodyState};
use poisson_integrators::splitting::{composition_coefficients, composition_step_count};
use poisson_integrators::verify::{self, OneStepMap};
use poisson_integrators::StateVector;

fn main() -> poisson_integrators::Result<()> {
    let params = RigidBodyParams::new(2.0, 1.0)?;
    let x0 = StateVector::from_column_slice(&[1.0, 1.0, 1.0]);
    let oracle = move |x: &StateVector, t: f64| {
        rigidbody::exact_solution(params, RigidBodyState::from_slice(x.as_slice()).unwrap(), t)
            .to_vector()
    };
    let h_values = [0.1, 0.05, 0.025, 0.0125];

    for n in 1..=3 {
        let c = composition_coefficients(n)?;
        let count = composition_step_count(n);
        println!(
            "order {} -> {}: x0 = {:+.15}, x1 = {:+.15}, {} sub-steps",
            2 * n,
            2 * n + 2,
            c.x0,
            c.x1,
            count.steps
        );
    }
    for order in [1, 2, 4, 6] {
        let map = OneStepMap::split(rigidbody::split_scheme(params, order)?);
        let est = verify::convergence_order(&map, &oracle, &x0, 1.0, &h_values)?;
        let errors: Vec<String> = est.errors.iter().map(|e| format!("{e:.2e}")).collect();
        println!(
            "target order {order}: errors [{}], slope {:.3}",
            errors.join(", "),
            est.slope
        );
    }
    Ok(())
}

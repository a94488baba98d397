//! Classical RK4 against Lie-Trotter on the rigid body: RK4 is more
//! accurate, Lie-Trotter keeps the Casimir to rounding.

use poisson_integrators::integrators::{ButcherTableau, ImplicitSolverConfig};
use poisson_integrators::rigidbody::{self, LieTrotterVariant, RigidBodyParams, RigidBodyState};
use poisson_integrators::verify::{self, OneStepMap};
use poisson_integrators::StateVector;

fn main() -> poisson_integrators::Result<()> {
    let params = RigidBodyParams::new(2.0, 0.5)?;
    let x0 = StateVector::from_column_slice(&[1.0, 0.0, 2.0]);
    let (h, t_final) = (0.01, 10.0);
    let system = rigidbody::poisson_system(params);
    let oracle = move |x: &StateVector, t: f64| {
        rigidbody::exact_solution(params, RigidBodyState::from_slice(x.as_slice()).unwrap(), t)
            .to_vector()
    };
    let maps = [
        (
            "rk4",
            OneStepMap::runge_kutta(
                system.vector_field(),
                ButcherTableau::rk4(),
                ImplicitSolverConfig::default(),
            ),
        ),
        (
            "lie-trotter",
            OneStepMap::rigid_lie_trotter(params, LieTrotterVariant::StateDependent),
        ),
    ];
    for (name, map) in &maps {
        let err = verify::global_error(map, &oracle, &x0, t_final, h)?;
        let drift = verify::drift(map, &system.casimirs()[0], &x0, h, 1000)?;
        println!(
            "{name:>12}: global error {err:.2e}, Casimir drift {:.2e}",
            drift.max_abs_deviation
        );
    }
    Ok(())
}

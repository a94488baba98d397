//! Finite-difference check of D Pi(x) D^T = Pi(phi(x)) for several one-step
//! maps on the rigid body.

use poisson_integrators::integrators::{ButcherTableau, ImplicitSolverConfig, SolverStrategy};
use poisson_integrators::rigidbody::{self, LieTrotterVariant, RigidBodyParams};
use poisson_integrators::verify::{self, OneStepMap};

fn main() -> poisson_integrators::Result<()> {
    let params = RigidBodyParams::new(2.0, 1.0)?;
    let system = rigidbody::poisson_system(params);
    let solver = ImplicitSolverConfig::new(1e-14, 100, SolverStrategy::NewtonFd)?;
    let maps = [
        (
            "lie-trotter",
            OneStepMap::rigid_lie_trotter(params, LieTrotterVariant::StateDependent),
        ),
        (
            "frozen lie-trotter",
            OneStepMap::rigid_lie_trotter(params, LieTrotterVariant::Frozen),
        ),
        ("exact flow", OneStepMap::rigid_exact(params)),
        (
            "explicit euler",
            OneStepMap::explicit_euler(system.vector_field()),
        ),
        (
            "implicit midpoint",
            OneStepMap::gauss_legendre(system.vector_field(), solver),
        ),
        (
            "rk4",
            OneStepMap::runge_kutta(system.vector_field(), ButcherTableau::rk4(), solver),
        ),
    ];
    let states = verify::random_shell_states(0, 50, 0.5, 2.0);
    for (name, map) in &maps {
        let worst = states
            .iter()
            .map(|x| verify::poisson_residual(&system, map, x, 0.1, verify::DEFAULT_FD_EPS))
            .collect::<poisson_integrators::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{name:>20}: max residual {worst:.2e}");
    }
    Ok(())
}

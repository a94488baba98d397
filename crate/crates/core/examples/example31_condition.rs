//! One-stage Runge-Kutta methods on the planar system with
//! Pi = [[0, x2], [-x2, 0]] and affine Hamiltonian. The Poisson residual is
//! printed at the step 1/(2bA - aA) and at other steps.

use poisson_integrators::integrators::{ButcherTableau, ImplicitSolverConfig, SolverStrategy};
use poisson_integrators::verify::{self, OneStepMap};
use poisson_integrators::{systems, StateVector};

fn main() -> poisson_integrators::Result<()> {
    let (big_a, big_b, a, b) = (1.5, -0.7, 0.3, 0.9);
    let system = systems::example31(big_a, big_b, 0.0);
    let tableau = ButcherTableau::from_rows(&[&[a]], &[b])?;
    let solver = ImplicitSolverConfig::new(1e-14, 100, SolverStrategy::NewtonFd)?;
    let map = OneStepMap::runge_kutta(system.vector_field(), tableau, solver);
    let x = StateVector::from_column_slice(&[0.4, 1.2]);

    let h_star = verify::rk1_poisson_condition(big_a, a, b).expect("2bA - aA is non-zero");
    for h in [h_star, 0.5 * h_star, 2.0 * h_star, 0.1, 1.0] {
        let r = verify::poisson_residual(&system, &map, &x, h, 1e-6)?;
        let y = map.apply(&x, h)?;
        let dh = system.hamiltonian().value(&y) - system.hamiltonian().value(&x);
        println!("h = {h:>8.5}: poisson residual {r:.2e}, energy change {dh:+.2e}");
    }
    Ok(())
}

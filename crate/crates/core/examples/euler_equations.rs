//! The symmetric free rigid body as a Poisson system: structure matrix,
//! Hamiltonian field, bracket and Casimir.

use poisson_integrators::rigidbody::{self, RigidBodyParams, RigidBodyState};
use poisson_integrators::StateVector;

fn main() -> poisson_integrators::Result<()> {
    let params = RigidBodyParams::new(2.0, 1.0)?;
    let system = rigidbody::poisson_system(params);
    let m = StateVector::from_column_slice(&[1.0, 2.0, 3.0]);

    println!("Pi(m) = {}", system.structure_matrix(&m)?);
    println!(
        "X_H(m)        = {:?}",
        system.hamiltonian_vector_field(&m)?.as_slice()
    );
    let rhs = rigidbody::euler_rhs(params, RigidBodyState::new(1.0, 2.0, 3.0));
    println!("Euler rhs     = {:?}", rhs.to_array());
    println!("|Pi grad C|   = {:.1e}", system.casimir_defect(&m)?);

    let c = system.casimirs()[0].clone();
    println!(
        "{{C, H}}(m)     = {:.1e}",
        system.poisson_bracket(&c, system.hamiltonian(), &m)?
    );
    Ok(())
}

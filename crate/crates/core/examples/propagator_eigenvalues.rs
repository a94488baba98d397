//! Spectrum of the Lie-Trotter propagator R = M*N*P: a rotation, so the
//! roots lie on the unit circle and one of them is 1.

use poisson_integrators::rigidbody::{self, RigidBodyParams, RigidBodyState};

fn main() -> poisson_integrators::Result<()> {
    let params = RigidBodyParams::new(2.0, 1.0)?;
    for (m, h) in [
        ((1.0, 1.0, 1.0), 0.1),
        ((0.3, -1.2, 0.8), 0.7),
        ((0.0, 0.0, 1.0), 0.0),
    ] {
        let m = RigidBodyState::new(m.0, m.1, m.2);
        let prop = rigidbody::step_propagator(params, m, h);
        let roots = rigidbody::characteristic_roots(&prop)?;
        println!("m = {:?}, h = {h}", m.to_array());
        for z in roots.roots {
            println!("  {:+.12} {:+.12}i  |z| = {:.15}", z.re, z.im, z.norm());
        }
        println!(
            "  product {:+.15} {:+.1e}i",
            roots.product.re, roots.product.im
        );
    }
    Ok(())
}

//! The area-preserving Ruth map on the harmonic oscillator: unit Jacobian
//! determinant, energy that drifts but stays bounded for small steps.

use poisson_integrators::integrators::ruth_step;
use poisson_integrators::verify::{self, OneStepMap};
use poisson_integrators::StateVector;

fn main() -> poisson_integrators::Result<()> {
    let map = OneStepMap::ruth();
    let x = StateVector::from_column_slice(&[1.0, 0.5]);
    println!(
        "|det D - 1| at h = 0.3: {:.2e}",
        verify::symplectic_residual_2d(&map, &x, 0.3, 1e-6)?
    );

    let energy = |x: [f64; 2]| 0.5 * (x[0] * x[0] + x[1] * x[1]);
    let mut y = [1.0, 0.0];
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10_000 {
        y = ruth_step(y, 0.1);
        lo = lo.min(energy(y));
        hi = hi.max(energy(y));
    }
    println!("energy over 10^4 steps of h = 0.1 stays in [{lo:.6}, {hi:.6}]");
    Ok(())
}

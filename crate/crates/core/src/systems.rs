//! Small Hamilton-Poisson systems used by the checks and the CLI.

use crate::error::{Error, Result};
use crate::poisson::{Matrix, PoissonSystem, ScalarField, StateVector};

/// Canonical structure `[[0, I], [-I, 0]]` on ℝ²ᵐ, coordinates `(q, p)`.
pub fn canonical_structure(m: usize) -> Matrix {
    let mut pi = Matrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        pi[(i, m + i)] = 1.0;
        pi[(m + i, i)] = -1.0;
    }
    pi
}

/// Canonical system on ℝ²ᵐ with the given Hamiltonian.
pub fn canonical(m: usize, hamiltonian: ScalarField) -> Result<PoissonSystem> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "need at least one degree of freedom".into(),
        ));
    }
    PoissonSystem::with_constant_structure(canonical_structure(m), hamiltonian)
}

/// `H(q, p) = ½(q² + p²)` on `T*ℝ`, giving `q̇ = p, ṗ = -q`.
pub fn harmonic_oscillator() -> PoissonSystem {
    let h = ScalarField::new(|x| 0.5 * (x[0] * x[0] + x[1] * x[1])).with_gradient(|x| x.clone());
    canonical(1, h).expect("one degree of freedom")
}

/// Two degrees of freedom with a cubic potential,
/// `H = ½(p₁² + p₂²) + (q₁³ + q₂³)/3 + q₁q₂`.
pub fn cubic_canonical() -> PoissonSystem {
    let h = ScalarField::new(|x| {
        let (q1, q2, p1, p2) = (x[0], x[1], x[2], x[3]);
        0.5 * (p1 * p1 + p2 * p2) + (q1.powi(3) + q2.powi(3)) / 3.0 + q1 * q2
    })
    .with_gradient(|x| {
        let (q1, q2, p1, p2) = (x[0], x[1], x[2], x[3]);
        StateVector::from_column_slice(&[q1 * q1 + q2, q2 * q2 + q1, p1, p2])
    });
    canonical(2, h).expect("two degrees of freedom")
}

/// The planar system with `Π = [[0, x₂], [-x₂, 0]]` and affine
/// `H = A·x₁ + B·x₂ + C`, so that `ẋ₁ = B·x₂, ẋ₂ = -A·x₂`.
pub fn example31(a: f64, b: f64, c: f64) -> PoissonSystem {
    let h = ScalarField::new(move |x| a * x[0] + b * x[1] + c)
        .with_gradient(move |_| StateVector::from_column_slice(&[a, b]));
    PoissonSystem::new(
        2,
        |x| Matrix::from_row_slice(2, 2, &[0.0, x[1], -x[1], 0.0]),
        h,
    )
    .expect("dimension 2")
}

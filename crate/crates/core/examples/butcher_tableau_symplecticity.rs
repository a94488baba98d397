//! The symplectic condition b_i a_ij + b_j a_ji - b_i b_j = 0 on a few
//! tableaux, including one built by hand.

use poisson_integrators::integrators::ButcherTableau;

fn main() -> poisson_integrators::Result<()> {
    let s3 = 3f64.sqrt();
    let gauss2 = ButcherTableau::from_rows(
        &[&[0.25, 0.25 - s3 / 6.0], &[0.25 + s3 / 6.0, 0.25]],
        &[0.5, 0.5],
    )?;
    let tableaux = [
        ("euler", ButcherTableau::euler()),
        ("midpoint", ButcherTableau::midpoint()),
        ("trapezoid", ButcherTableau::trapezoid()),
        ("rk4", ButcherTableau::rk4()),
        ("gauss2", gauss2),
    ];
    for (name, tab) in &tableaux {
        println!(
            "{name:>10}: {} stage(s), max residual {:.3e}, symplectic {}",
            tab.stages(),
            tab.max_symplectic_residual(),
            tab.satisfies_symplectic_condition()
        );
    }
    println!(
        "rk4 residual matrix {}",
        ButcherTableau::rk4().symplectic_condition_residual()
    );
    Ok(())
}

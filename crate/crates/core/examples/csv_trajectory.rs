//! Drive the command layer from code: integrate with a configuration built
//! from key/value pairs and read the CSV back.

use poisson_integrators::harness::{cmd_integrate, RunConfig, TrajectoryRecord};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::from_pairs(&[
        ("method", "yoshida4"),
        ("m0", "0.3,-1.2,0.8"),
        ("h", "0.05"),
        ("steps", "200"),
        ("sample_every", "50"),
    ])?;
    let mut csv = Vec::new();
    cmd_integrate(&cfg, &mut csv)?;
    print!("{}", String::from_utf8(csv.clone())?);

    let record = TrajectoryRecord::read_csv(csv.as_slice())?;
    let first = &record.rows[0];
    let last = record.last().unwrap();
    println!(
        "C drift {:.1e}",
        last.casimir.unwrap() - first.casimir.unwrap()
    );
    Ok(())
}

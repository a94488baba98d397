use std::io::Write;

use crate::error::Error;
use crate::poisson::StateVector;
use crate::rigidbody::{self, RigidBodyState};
use crate::verify;

use super::config::{Check, Method, Observable, RunConfig, SystemSpec};
use super::trajectory::{format_float, TrajectoryRecord, TrajectoryRow};
use super::HarnessError;

/// Largest `|Π(φ(x)) − DΠDᵀ|` accepted by `verify --check poisson`.
pub const POISSON_THRESHOLD: f64 = verify::RESIDUAL_TOLERANCE;
/// Largest `|det D − 1|` accepted by `verify --check symplectic2d`.
pub const SYMPLECTIC_THRESHOLD: f64 = verify::RESIDUAL_TOLERANCE;
/// Largest tableau residual accepted by `verify --check tableau`.
pub const TABLEAU_THRESHOLD: f64 = 1e-14;
/// Largest observable deviation accepted by `verify --check drift`.
pub const DRIFT_THRESHOLD: f64 = 1e-12;
/// Tolerance on eigenvalue moduli and their product in `eig`.
pub const EIG_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    CheckFailed,
    ConfigError,
    BlowUp,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::CheckFailed => 1,
            ExitStatus::ConfigError => 2,
            ExitStatus::BlowUp => 3,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Self::Success
        } else {
            Self::CheckFailed
        }
    }
}

/// A trajectory plus the failure that cut it short, if any.
#[derive(Debug)]
pub struct Integration {
    pub record: TrajectoryRecord,
    pub failure: Option<HarnessError>,
}

fn state_labels(system: &SystemSpec) -> Vec<String> {
    match system {
        SystemSpec::RigidBody(_) => vec!["m1".into(), "m2".into(), "m3".into()],
        _ => vec!["x1".into(), "x2".into()],
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn fmt_state(x: &StateVector) -> String {
    let parts: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Runs the configured method, sampling every `sample_every` steps plus the
/// initial and final states.
pub fn integrate(cfg: &RunConfig) -> Result<Integration, HarnessError> {
    let h = cfg.step_size()?.get();
    let map = cfg.one_step_map()?;
    let system = cfg.system.poisson_system();
    let casimir = system.casimirs().first().cloned();
    let mut record = TrajectoryRecord::new(state_labels(&cfg.system), casimir.is_some());

    let row = |step: usize, x: &StateVector| TrajectoryRow {
        step,
        t: step as f64 * h,
        state: x.iter().copied().collect(),
        hamiltonian: system.hamiltonian().value(x),
        casimir: casimir.as_ref().map(|c| c.value(x)),
    };

    let mut x = StateVector::from_vec(cfg.initial_state.clone());
    record.rows.push(row(0, &x));
    let mut failure = None;
    for step in 1..=cfg.steps {
        match map.apply(&x, h) {
            Ok(y) if y.iter().all(|v| v.is_finite()) => x = y,
            Ok(_) | Err(Error::NonFinite(_)) => {
                failure = Some(HarnessError::Numerical(Error::BlowUp { step }));
                break;
            }
            Err(e) => {
                failure = Some(HarnessError::Numerical(e));
                break;
            }
        }
        if step % cfg.sample_every == 0 || step == cfg.steps {
            let r = row(step, &x);
            if !r.hamiltonian.is_finite() || r.casimir.is_some_and(|c| !c.is_finite()) {
                failure = Some(HarnessError::Numerical(Error::BlowUp { step }));
                break;
            }
            record.rows.push(r);
        }
    }
    Ok(Integration { record, failure })
}

/// Writes the trajectory as CSV. Rows computed before a blow-up are written
/// before the failure is returned.
pub fn cmd_integrate(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, HarnessError> {
    let run = integrate(cfg)?;
    run.record.write_csv(&mut *out)?;
    match run.failure {
        Some(err) => Err(err),
        None => Ok(ExitStatus::Success),
    }
}

fn sample_states(cfg: &RunConfig) -> Vec<StateVector> {
    let mut states = vec![StateVector::from_vec(cfg.initial_state.clone())];
    let random = match cfg.system {
        SystemSpec::RigidBody(_) => verify::random_shell_states(cfg.seed, cfg.samples, 0.5, 2.0),
        _ => verify::random_states(cfg.seed, cfg.samples, cfg.system.dimension(), 2.0),
    };
    states.extend(random);
    states
}

pub fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, HarnessError> {
    let check = cfg.check.ok_or_else(|| {
        HarnessError::Config("verify needs --check poisson|symplectic2d|drift|tableau".into())
    })?;
    match check {
        Check::Tableau => {
            let tab = match (&cfg.tableau, &cfg.method) {
                (Some(tab), _) => tab.clone(),
                (None, Method::Rk(tab)) => tab.clone(),
                _ => return Err(HarnessError::Config("tableau check needs --tableau".into())),
            };
            let residual = tab.symplectic_condition_residual();
            writeln!(
                out,
                "symplectic condition residual b_i a_ij + b_j a_ji - b_i b_j:"
            )?;
            for i in 0..residual.nrows() {
                let row: Vec<String> = residual.row(i).iter().map(|v| v.to_string()).collect();
                writeln!(out, "  [{}]", row.join(", "))?;
            }
            let max = residual.amax();
            let pass = max <= TABLEAU_THRESHOLD;
            writeln!(
                out,
                "max |residual| = {max} (threshold {TABLEAU_THRESHOLD:e}): {}",
                verdict(pass)
            )?;
            Ok(ExitStatus::from_pass(pass))
        }
        Check::Poisson | Check::Symplectic2d => {
            let h = cfg.step_size()?.get();
            let map = cfg.one_step_map()?;
            let system = cfg.system.poisson_system();
            let (label, threshold) = match check {
                Check::Poisson => ("poisson", POISSON_THRESHOLD),
                _ => ("symplectic2d", SYMPLECTIC_THRESHOLD),
            };
            writeln!(
                out,
                "{label} check: method {}, h = {h}, fd_eps = {:e}",
                cfg.method.name(),
                cfg.fd_eps
            )?;
            let mut worst = 0.0_f64;
            for x in sample_states(cfg) {
                let r = match check {
                    Check::Poisson => verify::poisson_residual(&system, &map, &x, h, cfg.fd_eps)?,
                    _ => verify::symplectic_residual_2d(&map, &x, h, cfg.fd_eps)?,
                };
                worst = worst.max(r);
                writeln!(out, "  state {}  residual {r:.3e}", fmt_state(&x))?;
            }
            let pass = worst <= threshold;
            writeln!(
                out,
                "max residual = {worst:.3e} (threshold {threshold:e}): {}",
                verdict(pass)
            )?;
            Ok(ExitStatus::from_pass(pass))
        }
        Check::Drift(observable) => {
            let h = cfg.step_size()?.get();
            let map = cfg.one_step_map()?;
            let system = cfg.system.poisson_system();
            let (name, field) =
                match observable {
                    Observable::Hamiltonian => ("H", system.hamiltonian().clone()),
                    Observable::Casimir => (
                        "C",
                        system.casimirs().first().cloned().ok_or_else(|| {
                            HarnessError::Config("system declares no Casimir".into())
                        })?,
                    ),
                };
            let x0 = StateVector::from_vec(cfg.initial_state.clone());
            let report = verify::drift(&map, &field, &x0, h, cfg.steps)?;
            writeln!(
                out,
                "drift of {name}: method {}, h = {h}, {} steps from {}",
                cfg.method.name(),
                cfg.steps,
                fmt_state(&x0)
            )?;
            writeln!(
                out,
                "  max |{name} - {name}0| = {:.3e}",
                report.max_abs_deviation
            )?;
            writeln!(
                out,
                "  final {name} - {name}0  = {:.3e}",
                report.final_deviation
            )?;
            let pass = report.max_abs_deviation <= DRIFT_THRESHOLD;
            writeln!(
                out,
                "conserved within {DRIFT_THRESHOLD:e}: {}",
                verdict(pass)
            )?;
            Ok(ExitStatus::from_pass(pass))
        }
    }
}

pub fn cmd_order(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, HarnessError> {
    let params = cfg.system.rigid_params().ok_or_else(|| {
        HarnessError::Config("order needs system rigid_body (closed-form oracle)".into())
    })?;
    let map = cfg.one_step_map()?;
    let oracle = move |x: &StateVector, t: f64| {
        let m = RigidBodyState::from_slice(x.as_slice()).expect("three finite components");
        rigidbody::exact_solution(params, m, t).to_vector()
    };
    let x0 = StateVector::from_vec(cfg.initial_state.clone());
    let est = verify::convergence_order(&map, &oracle, &x0, cfg.t_final, &cfg.h_list)?;
    writeln!(
        out,
        "convergence of {} against the exact solution, T = {}",
        cfg.method.name(),
        cfg.t_final
    )?;
    writeln!(out, "{:>14}  {:>24}", "h", "global error")?;
    for (h, e) in est.h_values.iter().zip(&est.errors) {
        writeln!(out, "{h:>14}  {:>24}", format_float(*e))?;
    }
    if est.is_exact() {
        writeln!(
            out,
            "slope: inf (errors at or below {:e}, method exact)",
            verify::EXACTNESS_THRESHOLD
        )?;
    } else {
        writeln!(out, "slope: {:.4}", est.slope)?;
    }
    Ok(ExitStatus::Success)
}

pub fn cmd_eig(cfg: &RunConfig, out: &mut dyn Write) -> Result<ExitStatus, HarnessError> {
    let params = cfg
        .system
        .rigid_params()
        .ok_or_else(|| HarnessError::Config("eig needs system rigid_body".into()))?;
    let m = RigidBodyState::from_slice(&cfg.initial_state)?;
    let prop = rigidbody::step_propagator(params, m, cfg.h);
    let roots = rigidbody::characteristic_roots(&prop)?;
    writeln!(
        out,
        "characteristic roots of R = M*N*P at m = {:?}, h = {}",
        m.to_array(),
        cfg.h
    )?;
    for (z, modulus) in roots.roots.iter().zip(&roots.moduli) {
        writeln!(
            out,
            "  lambda = {:+.15} {:+.15}i   |lambda| = {:.15}",
            z.re, z.im, modulus
        )?;
    }
    writeln!(
        out,
        "  product = {:+.15} {:+.15}i",
        roots.product.re, roots.product.im
    )?;
    let moduli_ok = roots
        .moduli
        .iter()
        .all(|r| (r - 1.0).abs() <= EIG_TOLERANCE);
    let product_ok = (roots.product - nalgebra::Complex::new(1.0, 0.0)).norm() <= EIG_TOLERANCE;
    let unit_root = roots
        .roots
        .iter()
        .any(|z| z.im.abs() <= EIG_TOLERANCE && (z.re - 1.0).abs() <= EIG_TOLERANCE);
    writeln!(
        out,
        "  real root equal to 1: {}",
        if unit_root { "yes" } else { "no" }
    )?;
    let pass = moduli_ok && product_ok;
    writeln!(
        out,
        "moduli and product equal 1 within {EIG_TOLERANCE:e}: {}",
        verdict(pass)
    )?;
    Ok(ExitStatus::from_pass(pass))
}

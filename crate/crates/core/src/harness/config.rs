//! Run configuration, assembled from `key = value` pairs.
//!
//! Pairs come from an optional config file followed by command-line flags, so
//! later pairs override earlier ones. Keys are case-sensitive (`I1`, `T`) and
//! `-` is treated as `_`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::integrators::{ButcherTableau, ImplicitSolverConfig, SolverStrategy, StepSize};
use crate::poisson::{Matrix, PoissonSystem};
use crate::rigidbody::{self, LieTrotterVariant, RigidBodyParams};
use crate::systems;
use crate::verify::{self, OneStepMap};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    Euler,
    /// `y = x + h(f(x) + f(y))`, no ½.
    ModifiedEuler,
    /// `y = x + (h/2)(f(x) + f(y))`.
    Trapezoid,
    /// Implicit midpoint (one-stage Gauss-Legendre).
    Midpoint,
    Rk(ButcherTableau),
    Ruth,
    LieTrotter,
    LieTrotterFrozen,
    Strang,
    Yoshida(u32),
}

impl Method {
    pub fn is_splitting(&self) -> bool {
        matches!(
            self,
            Method::LieTrotter | Method::LieTrotterFrozen | Method::Strang | Method::Yoshida(_)
        )
    }

    pub fn name(&self) -> String {
        match self {
            Method::Euler => "euler".into(),
            Method::ModifiedEuler => "modified_euler".into(),
            Method::Trapezoid => "trapezoid".into(),
            Method::Midpoint => "midpoint".into(),
            Method::Rk(tab) => format!("rk({} stages)", tab.stages()),
            Method::Ruth => "ruth".into(),
            Method::LieTrotter => "lie_trotter".into(),
            Method::LieTrotterFrozen => "lie_trotter_frozen".into(),
            Method::Strang => "strang".into(),
            Method::Yoshida(order) => format!("yoshida{order}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemSpec {
    RigidBody(RigidBodyParams),
    HarmonicOscillator,
    /// `Π = [[0, x₂], [−x₂, 0]]`, `H = A·x₁ + B·x₂ + C`, with the one-stage
    /// tableau `[[a_coef]], [b_coef]` as the default `rk` method.
    Example31 {
        big_a: f64,
        big_b: f64,
        big_c: f64,
        a_coef: f64,
        b_coef: f64,
    },
}

impl SystemSpec {
    pub fn dimension(&self) -> usize {
        match self {
            SystemSpec::RigidBody(_) => 3,
            _ => 2,
        }
    }

    pub fn poisson_system(&self) -> PoissonSystem {
        match *self {
            SystemSpec::RigidBody(params) => rigidbody::poisson_system(params),
            SystemSpec::HarmonicOscillator => systems::harmonic_oscillator(),
            SystemSpec::Example31 {
                big_a,
                big_b,
                big_c,
                ..
            } => systems::example31(big_a, big_b, big_c),
        }
    }

    pub fn rigid_params(&self) -> Option<RigidBodyParams> {
        match *self {
            SystemSpec::RigidBody(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Hamiltonian,
    Casimir,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Poisson,
    Symplectic2d,
    Drift(Observable),
    Tableau,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub method: Method,
    pub system: SystemSpec,
    pub initial_state: Vec<f64>,
    /// Step size; zero is accepted here and rejected by commands that iterate.
    pub h: f64,
    pub steps: usize,
    pub sample_every: usize,
    pub seed: u64,
    pub fd_eps: f64,
    pub output: Output,
    pub check: Option<Check>,
    pub tableau: Option<ButcherTableau>,
    pub h_list: Vec<f64>,
    pub t_final: f64,
    pub samples: usize,
    pub solver: ImplicitSolverConfig,
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, HarnessError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('-', "_")
}

const KNOWN_KEYS: &[&str] = &[
    "method",
    "system",
    "I1",
    "I3",
    "A",
    "B",
    "C",
    "a_coef",
    "b_coef",
    "m0",
    "h",
    "steps",
    "sample_every",
    "seed",
    "fd_eps",
    "output",
    "check",
    "observable",
    "tableau",
    "h_list",
    "T",
    "frozen",
    "samples",
    "solver",
    "solver_tol",
];

struct Pairs(BTreeMap<String, String>);

impl Pairs {
    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{v}`"))),
        }
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>, HarnessError> {
        self.get(key).map(|v| parse_list(key, v)).transpose()
    }
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, HarnessError> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| HarnessError::Config(format!("`{key}`: cannot parse `{s}`")))
        })
        .collect()
}

/// Named tableau (`euler`, `midpoint`, `rk4`, `trapezoid`) or an inline
/// one written `a11,a12;a21,a22|b1,b2`.
pub fn parse_tableau(spec: &str) -> Result<ButcherTableau, HarnessError> {
    if let Some(tab) = ButcherTableau::by_name(spec.trim()) {
        return Ok(tab);
    }
    let (a_text, b_text) = spec
        .split_once('|')
        .ok_or_else(|| HarnessError::Config(format!("unknown tableau `{spec}`")))?;
    let b = parse_list("tableau", b_text)?;
    let rows: Vec<Vec<f64>> = a_text
        .split(';')
        .map(|row| parse_list("tableau", row))
        .collect::<Result<_, _>>()?;
    let s = b.len();
    if rows.len() != s || rows.iter().any(|r| r.len() != s) {
        return Err(HarnessError::Config(format!(
            "tableau `{spec}` is not {s}x{s}"
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    ButcherTableau::new(Matrix::from_row_slice(s, s, &flat), b)
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn parse_method(
    name: &str,
    tableau: Option<&ButcherTableau>,
    system: &SystemSpec,
    frozen: bool,
) -> Result<Method, HarnessError> {
    let method = match name {
        "euler" => Method::Euler,
        "modified_euler" => Method::ModifiedEuler,
        "trapezoid" => Method::Trapezoid,
        "midpoint" | "gauss_legendre" => Method::Midpoint,
        "rk" => match (tableau, system) {
            (Some(tab), _) => Method::Rk(tab.clone()),
            (None, SystemSpec::Example31 { a_coef, b_coef, .. }) => Method::Rk(
                ButcherTableau::from_rows(&[&[*a_coef]], &[*b_coef])
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            ),
            (None, _) => Method::Rk(ButcherTableau::rk4()),
        },
        "ruth" => Method::Ruth,
        "lie_trotter" if frozen => Method::LieTrotterFrozen,
        "lie_trotter" => Method::LieTrotter,
        "lie_trotter_frozen" => Method::LieTrotterFrozen,
        "strang" => Method::Strang,
        "yoshida" => Method::Yoshida(4),
        other => {
            let order = other
                .strip_prefix("yoshida")
                .map(|s| s.trim_start_matches([':', '_']))
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or_else(|| HarnessError::Config(format!("unknown method `{other}`")))?;
            if order < 4 || order % 2 != 0 {
                return Err(HarnessError::Config(format!(
                    "yoshida order must be even and >= 4, got {order}"
                )));
            }
            Method::Yoshida(order)
        }
    };
    Ok(method)
}

impl RunConfig {
    /// Builds a configuration from ordered pairs; later keys win.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(
        pairs: &[(K, V)],
    ) -> Result<Self, HarnessError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            let key = normalize(k.as_ref());
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(HarnessError::Config(format!(
                    "unknown key `{}`",
                    k.as_ref()
                )));
            }
            map.insert(key, v.as_ref().trim().to_string());
        }
        let p = Pairs(map);

        let system = match p.get("system").unwrap_or("rigid_body") {
            "rigid_body" => SystemSpec::RigidBody(
                RigidBodyParams::new(p.num("I1", 2.0)?, p.num("I3", 1.0)?)
                    .map_err(|e| HarnessError::Config(e.to_string()))?,
            ),
            "harmonic_oscillator" => SystemSpec::HarmonicOscillator,
            "example31" => SystemSpec::Example31 {
                big_a: p.num("A", 1.0)?,
                big_b: p.num("B", 1.0)?,
                big_c: p.num("C", 0.0)?,
                a_coef: p.num("a_coef", 0.5)?,
                b_coef: p.num("b_coef", 1.0)?,
            },
            other => return Err(HarnessError::Config(format!("unknown system `{other}`"))),
        };

        let tableau = p.get("tableau").map(parse_tableau).transpose()?;
        let frozen = p.num("frozen", false)?;
        let method = parse_method(
            p.get("method").unwrap_or("lie_trotter"),
            tableau.as_ref(),
            &system,
            frozen,
        )?;

        match (&method, &system) {
            (Method::Ruth, SystemSpec::HarmonicOscillator) => {}
            (Method::Ruth, _) => {
                return Err(HarnessError::Config(
                    "ruth requires system harmonic_oscillator".into(),
                ));
            }
            (m, SystemSpec::RigidBody(_)) if m.is_splitting() => {}
            (m, _) if m.is_splitting() => {
                return Err(HarnessError::Config(format!(
                    "{} requires system rigid_body",
                    m.name()
                )));
            }
            _ => {}
        }

        let default_state = match system {
            SystemSpec::RigidBody(_) => vec![1.0, 1.0, 1.0],
            _ => vec![1.0, 0.0],
        };
        let initial_state = p.list("m0")?.unwrap_or(default_state);
        if initial_state.len() != system.dimension() {
            return Err(HarnessError::Config(format!(
                "initial state has {} components, system needs {}",
                initial_state.len(),
                system.dimension()
            )));
        }
        if initial_state.iter().any(|v| !v.is_finite()) {
            return Err(HarnessError::Config("initial state must be finite".into()));
        }

        let h: f64 = p.num("h", 0.01)?;
        if !(h.is_finite() && h >= 0.0) {
            return Err(HarnessError::Config(format!(
                "h must be finite and non-negative, got {h}"
            )));
        }
        let steps: usize = p.num("steps", 100)?;
        let sample_every: usize = p.num("sample_every", 1)?;
        if steps == 0 || sample_every == 0 {
            return Err(HarnessError::Config(
                "steps and sample_every must be positive".into(),
            ));
        }
        let fd_eps: f64 = p.num("fd_eps", verify::DEFAULT_FD_EPS)?;
        if !(fd_eps > 0.0 && fd_eps.is_finite()) {
            return Err(HarnessError::Config("fd_eps must be positive".into()));
        }

        let output = match p.get("output") {
            None | Some("-") => Output::Stdout,
            Some(path) => Output::File(PathBuf::from(path)),
        };

        let observable = match p.get("observable") {
            None => None,
            Some("H" | "hamiltonian" | "energy") => Some(Observable::Hamiltonian),
            Some("C" | "casimir") => Some(Observable::Casimir),
            Some(other) => {
                return Err(HarnessError::Config(format!(
                    "unknown observable `{other}`"
                )))
            }
        };
        let check = match p.get("check") {
            None => None,
            Some("poisson") => Some(Check::Poisson),
            Some("symplectic2d") => Some(Check::Symplectic2d),
            Some("tableau") => Some(Check::Tableau),
            Some(c) if c.starts_with("drift") => {
                let inline = match c.split_once([':', '(']) {
                    Some((_, rest)) => match rest.trim_end_matches(')') {
                        "H" | "hamiltonian" | "energy" => Some(Observable::Hamiltonian),
                        "C" | "casimir" => Some(Observable::Casimir),
                        other => {
                            return Err(HarnessError::Config(format!(
                                "unknown observable `{other}`"
                            )))
                        }
                    },
                    None if c == "drift" => None,
                    None => return Err(HarnessError::Config(format!("unknown check `{c}`"))),
                };
                let default = match system {
                    SystemSpec::RigidBody(_) => Observable::Casimir,
                    _ => Observable::Hamiltonian,
                };
                Some(Check::Drift(inline.or(observable).unwrap_or(default)))
            }
            Some(other) => return Err(HarnessError::Config(format!("unknown check `{other}`"))),
        };
        if check == Some(Check::Symplectic2d) && system.dimension() != 2 {
            return Err(HarnessError::Config(
                "symplectic2d needs a two-dimensional system".into(),
            ));
        }
        if check == Some(Check::Drift(Observable::Casimir))
            && !matches!(system, SystemSpec::RigidBody(_))
        {
            return Err(HarnessError::Config(
                "this system declares no Casimir".into(),
            ));
        }

        let h_list = p
            .list("h_list")?
            .unwrap_or_else(|| vec![0.1, 0.05, 0.025, 0.0125]);
        let t_final: f64 = p.num("T", 1.0)?;
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(HarnessError::Config("T must be positive".into()));
        }

        let strategy = match p.get("solver").unwrap_or("fixed_point") {
            "fixed_point" => SolverStrategy::FixedPoint,
            "newton_fd" | "newton" => SolverStrategy::NewtonFd,
            other => return Err(HarnessError::Config(format!("unknown solver `{other}`"))),
        };
        let solver = ImplicitSolverConfig::new(p.num("solver_tol", 1e-12)?, 100, strategy)
            .map_err(|e| HarnessError::Config(e.to_string()))?;

        Ok(Self {
            method,
            system,
            initial_state,
            h,
            steps,
            sample_every,
            seed: p.num("seed", 0)?,
            fd_eps,
            output,
            check,
            tableau,
            h_list,
            t_final,
            samples: p.num("samples", 20)?,
            solver,
        })
    }

    pub fn step_size(&self) -> Result<StepSize, HarnessError> {
        StepSize::new(self.h).map_err(|e| HarnessError::Config(e.to_string()))
    }

    /// The configured method as a one-step map on the configured system.
    pub fn one_step_map(&self) -> Result<OneStepMap, HarnessError> {
        let field = || self.system.poisson_system().vector_field();
        let rigid = || {
            self.system.rigid_params().ok_or_else(|| {
                HarnessError::Config(format!("{} requires system rigid_body", self.method.name()))
            })
        };
        let map = match &self.method {
            Method::Euler => OneStepMap::explicit_euler(field()),
            Method::ModifiedEuler => OneStepMap::modified_euler(field(), self.solver),
            Method::Trapezoid => OneStepMap::trapezoid(field(), self.solver),
            Method::Midpoint => OneStepMap::gauss_legendre(field(), self.solver),
            Method::Rk(tab) => OneStepMap::runge_kutta(field(), tab.clone(), self.solver),
            Method::Ruth => OneStepMap::ruth(),
            Method::LieTrotter => {
                OneStepMap::rigid_lie_trotter(rigid()?, LieTrotterVariant::StateDependent)
            }
            Method::LieTrotterFrozen => {
                OneStepMap::rigid_lie_trotter(rigid()?, LieTrotterVariant::Frozen)
            }
            Method::Strang => OneStepMap::split(rigidbody::split_scheme(rigid()?, 2)?),
            Method::Yoshida(order) => OneStepMap::split(rigidbody::split_scheme(rigid()?, *order)?),
        };
        Ok(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, &str)]) -> Result<RunConfig, HarnessError> {
        RunConfig::from_pairs(pairs)
    }

    #[test]
    fn defaults() {
        let c = cfg(&[]).unwrap();
        assert_eq!(c.method, Method::LieTrotter);
        assert_eq!(
            c.system,
            SystemSpec::RigidBody(RigidBodyParams::new(2.0, 1.0).unwrap())
        );
        assert_eq!(c.sample_every, 1);
        assert_eq!(c.fd_eps, 1e-6);
        assert_eq!(c.output, Output::Stdout);
    }

    #[test]
    fn later_pairs_override_and_dashes_normalize() {
        let c = cfg(&[("h", "0.5"), ("sample-every", "3"), ("--h", "0.25")]).unwrap();
        assert_eq!(c.h, 0.25);
        assert!(cfg(&[("h", "0")]).unwrap().step_size().is_err());
        assert_eq!(c.sample_every, 3);
    }

    #[test]
    fn config_text() {
        let pairs =
            parse_config_text("# sweep\nmethod = strang\n\nm0 = 1, 0, 1  # start\nI1=3\n").unwrap();
        let c = RunConfig::from_pairs(&pairs).unwrap();
        assert_eq!(c.method, Method::Strang);
        assert_eq!(c.initial_state, vec![1.0, 0.0, 1.0]);
        assert_eq!(c.system.rigid_params().unwrap().i1(), 3.0);
        assert!(parse_config_text("method strang").is_err());
    }

    #[test]
    fn compatibility_rules() {
        assert!(cfg(&[("method", "ruth")]).is_err());
        assert!(cfg(&[("method", "ruth"), ("system", "harmonic_oscillator")]).is_ok());
        assert!(cfg(&[("method", "strang"), ("system", "harmonic_oscillator")]).is_err());
        assert!(cfg(&[("method", "euler"), ("system", "harmonic_oscillator")]).is_ok());
        assert!(cfg(&[("m0", "1,2")]).is_err());
        assert!(cfg(&[("I1", "1"), ("I3", "2")]).is_err());
        assert!(cfg(&[("h", "-0.1")]).is_err());
        assert!(cfg(&[("bogus", "1")]).is_err());
        assert!(cfg(&[("check", "symplectic2d")]).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(
            cfg(&[("method", "yoshida")]).unwrap().method,
            Method::Yoshida(4)
        );
        assert_eq!(
            cfg(&[("method", "yoshida6")]).unwrap().method,
            Method::Yoshida(6)
        );
        assert_eq!(
            cfg(&[("method", "yoshida:8")]).unwrap().method,
            Method::Yoshida(8)
        );
        assert!(cfg(&[("method", "yoshida5")]).is_err());
        assert_eq!(
            cfg(&[("method", "lie_trotter"), ("frozen", "true")])
                .unwrap()
                .method,
            Method::LieTrotterFrozen
        );
        assert_eq!(
            cfg(&[("method", "rk"), ("tableau", "midpoint")])
                .unwrap()
                .method,
            Method::Rk(ButcherTableau::midpoint())
        );
    }

    #[test]
    fn inline_tableau() {
        let tab = parse_tableau("0,0;0.5,0.5|0.5,0.5").unwrap();
        assert_eq!(tab, ButcherTableau::trapezoid());
        assert!(parse_tableau("0,0;1|1,0").is_err());
        assert!(parse_tableau("nope").is_err());
    }

    #[test]
    fn example31_default_tableau() {
        let c = cfg(&[
            ("system", "example31"),
            ("method", "rk"),
            ("a_coef", "0.25"),
            ("b_coef", "1"),
        ])
        .unwrap();
        assert_eq!(
            c.method,
            Method::Rk(ButcherTableau::from_rows(&[&[0.25]], &[1.0]).unwrap())
        );
    }

    #[test]
    fn drift_check_forms() {
        assert_eq!(
            cfg(&[("check", "drift")]).unwrap().check,
            Some(Check::Drift(Observable::Casimir))
        );
        assert_eq!(
            cfg(&[("check", "drift:H")]).unwrap().check,
            Some(Check::Drift(Observable::Hamiltonian))
        );
        assert_eq!(
            cfg(&[("check", "drift"), ("observable", "hamiltonian")])
                .unwrap()
                .check,
            Some(Check::Drift(Observable::Hamiltonian))
        );
        assert!(cfg(&[
            ("check", "drift:C"),
            ("system", "harmonic_oscillator"),
            ("method", "ruth")
        ])
        .is_err());
    }
}

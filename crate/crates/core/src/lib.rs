//! Structure-preserving integrators for Hamilton-Poisson systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`poisson`] – Poisson systems `(ℝⁿ, Π, H)`, brackets and Hamiltonian fields;
//! * [`integrators`] – Euler, modified Euler, implicit midpoint, general
//!   Runge-Kutta tableaux and the Ruth map;
//! * [`splitting`] – Lie-Trotter, Strang and triple-jump compositions of exact flows;
//! * [`rigidbody`] – the symmetric free rigid body on `so(3)*`, its axis
//!   rotations, the Lie-Trotter step and its propagator `R = M·N·P`;
//! * [`verify`] – Poisson and symplectic residuals, drift and convergence order;
//! * [`harness`] – run configuration, CSV trajectories and the commands behind
//!   the `poisson-integrators` binary.
//!
//! ```
//! use poisson_integrators::rigidbody::{self, LieTrotterVariant, RigidBodyParams, RigidBodyState};
//!
//! let params = RigidBodyParams::new(2.0, 1.0).unwrap();
//! let mut m = RigidBodyState::new(1.0, 0.0, 1.0);
//! for _ in 0..100 {
//!     m = rigidbody::lie_trotter_rigid_step(params, m, 0.01, LieTrotterVariant::StateDependent);
//! }
//! assert!((rigidbody::casimir(m) - 1.0).abs() < 1e-13);
//! ```

pub mod error;
pub mod harness;
pub mod integrators;
pub mod poisson;
pub mod rigidbody;
pub mod splitting;
pub mod systems;
pub mod verify;

pub use error::{Error, Result};
pub use poisson::{Matrix, PoissonSystem, ScalarField, StateVector};

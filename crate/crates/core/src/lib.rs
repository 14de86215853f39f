//! Discrete-time flow simulation and closed-loop control for buffered
//! optical fat-pipe networks.
//!
//! The crate models a wide-area network whose links are aggregates of
//! parallel optical circuits. Traffic demands are carried over chains of
//! *circuit paths* (abstract optical transmission sections), each fronted
//! by a lossy queue. Two integer linear programs steer the network:
//!
//! * **resource allocation** — activates circuits and selects routing so
//!   that the total number of circuits is minimal for the provisioned load;
//! * **resource reoccupation** — re-routes demands over the already-active
//!   circuits so that the worst predicted queue length is minimal.
//!
//! Both programs are solved exactly by a branch-and-bound solver, and can
//! alternatively be transformed to QUBO form and sampled with simulated
//! annealing, demonstrating the quantum-annealer execution path.
//!
//! The simulation engine advances in fixed steps of `T_sim`, routing
//! offered rates onto circuit-path chains with per-segment propagation
//! delay and executing the five-step queue model per circuit and step.
//! An SDN-style controller closes the loop through delayed telemetry
//! snapshots and delayed configuration roll-outs.

pub mod controller;
pub mod flowsim;
pub mod ilp;
pub mod qubo;
pub mod report;
pub mod run;
pub mod scenario;
pub mod topology;
pub mod traffic;

pub use controller::{Controller, ControllerMode, ControllerTimings, TelemetrySnapshot};
pub use flowsim::{step_circuit, CircuitRuntime, StepOutcome};
pub use ilp::{Assignment, IlpProblem, SolveOutcome, Solver};
pub use qubo::{AnnealConfig, QuboProblem, VariableEncoding};
pub use report::{RunReport, Summary};
pub use run::run_scenario;
pub use scenario::ScenarioSpec;
pub use topology::{CircuitPath, ConfigurationCatalog, Demand, NetworkTopology};

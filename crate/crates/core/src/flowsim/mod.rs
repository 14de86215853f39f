//! The discrete-time flow engine: lossy queue model per circuit path and
//! network-level routing with propagation delay.

mod engine;
mod queue;

pub use engine::{ChainSpec, NetworkState, NetworkStepRecord, RoutingError};
pub use queue::{
    propagation_steps, service_rate, step_circuit, CircuitRuntime, FlowKey, StepOutcome,
};

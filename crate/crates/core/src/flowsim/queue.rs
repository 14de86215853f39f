//! The per-circuit-path queue model.
//!
//! Each circuit path owns one lossy queue shared by all flows assigned to
//! it. One simulation step processes the queue in five stages: draining
//! of backlog, non-queued transmission, filling of free queue space, loss
//! of the remainder, and finally the split of the total values onto the
//! individual flows by arrival and queuing share ratios. Concurring flows
//! are handled equally in case of a backlog.

use std::collections::BTreeMap;

/// Identifies one flow inside a queue: a demand together with the
/// assignment epoch under which its data was injected. Data queued under
/// an old assignment keeps following the old chain after a
/// reconfiguration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlowKey {
    pub demand: usize,
    pub epoch: u32,
}

/// Dynamic state of one circuit path.
#[derive(Debug, Clone)]
pub struct CircuitRuntime {
    /// Number of active parallel circuits (omega).
    pub active_circuits: u32,
    /// Rate of a single circuit (Gbit/s).
    pub circuit_rate_gbps: f64,
    /// Queue limit as seconds of service at full rate.
    pub q_ratio: f64,
    /// Queue contents per flow (Gbit).
    pub queue: BTreeMap<FlowKey, f64>,
    /// Propagation delay in whole simulation steps.
    pub delay_steps: u32,
}

impl CircuitRuntime {
    pub fn new(circuit_rate_gbps: f64, q_ratio: f64, delay_steps: u32) -> Self {
        CircuitRuntime {
            active_circuits: 0,
            circuit_rate_gbps,
            q_ratio,
            queue: BTreeMap::new(),
            delay_steps,
        }
    }

    /// Combined service rate `xi * omega` (Gbit/s).
    pub fn service_rate_gbps(&self) -> f64 {
        service_rate(self.circuit_rate_gbps, self.active_circuits)
    }

    /// Maximal storage volume `mu * q_ratio * 1 s` (Gbit).
    pub fn queue_limit_gbit(&self) -> f64 {
        self.service_rate_gbps() * self.q_ratio
    }

    /// Total queued volume (Gbit).
    pub fn total_queue_gbit(&self) -> f64 {
        self.queue.values().sum()
    }
}

/// Combined service rate of `omega` parallel circuits of rate `xi`.
pub fn service_rate(xi_gbps: f64, omega: u32) -> f64 {
    xi_gbps * omega as f64
}

/// Discrete propagation delay in simulation steps:
/// `ceil(v_p * D / T_sim)` with `v_p` in us/km, `D` in km and `T_sim`
/// in us. Always at least one step for a positive distance.
pub fn propagation_steps(distance_km: f64, v_p_us_per_km: f64, t_sim_us: f64) -> u32 {
    debug_assert!(distance_km > 0.0 && v_p_us_per_km > 0.0 && t_sim_us > 0.0);
    (v_p_us_per_km * distance_km / t_sim_us).ceil() as u32
}

/// Per-step result of one circuit queue.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    /// Total arrival rate (Gbit/s).
    pub arrival_gbps: f64,
    /// Per-flow transmitted rates (Gbit/s).
    pub transmitted: BTreeMap<FlowKey, f64>,
    /// Per-flow loss rates (Gbit/s).
    pub lost: BTreeMap<FlowKey, f64>,
    /// Total transmitted rate (Gbit/s).
    pub transmitted_total_gbps: f64,
    /// Total loss rate (Gbit/s).
    pub lost_total_gbps: f64,
    /// Total queue length after the step (Gbit).
    pub queue_after_gbit: f64,
}

/// Executes one simulation step of the queue model for a single circuit
/// path, updating the queue contents in place.
///
/// Stage order: drain, non-queued transmission, queue filling, loss, and
/// the per-flow split. Arrival rates must be nonnegative.
pub fn step_circuit(
    circuit: &mut CircuitRuntime,
    arrivals: &BTreeMap<FlowKey, f64>,
    t_sim_s: f64,
) -> StepOutcome {
    for (&k, &a) in arrivals {
        assert!(a >= 0.0, "negative arrival rate {a} for flow {k:?}");
    }
    let mu = circuit.service_rate_gbps();
    let q_limit = circuit.queue_limit_gbit();
    let q_prev_total = circuit.total_queue_gbit();
    let a_total: f64 = arrivals.values().sum();

    // 1) Draining of the queued backlog.
    let x_drain = mu.min(q_prev_total / t_sim_s);
    // 2) Transport without queuing.
    let x_nqt = a_total.min((mu - q_prev_total / t_sim_s).max(0.0));
    // 3) Free queue space and filling rate.
    let q_free = q_limit.min((q_limit - q_prev_total).max(0.0) + x_drain * t_sim_s);
    let x_overload = (a_total - x_nqt).max(0.0);
    let x_fill = x_overload.min(q_free / t_sim_s);
    // 4) Loss rate.
    let l_total = (x_overload - x_fill).max(0.0);

    // 5) Per-flow split. Flows present this step: arrivals plus queued.
    let mut keys: Vec<FlowKey> = circuit.queue.keys().copied().collect();
    for k in arrivals.keys() {
        if !circuit.queue.contains_key(k) {
            keys.push(*k);
        }
    }
    keys.sort_unstable();

    let mut transmitted = BTreeMap::new();
    let mut lost = BTreeMap::new();
    let mut b_total = 0.0;
    let mut new_queue = BTreeMap::new();
    let mut q_after_total = 0.0;
    for k in keys {
        let a_i = arrivals.get(&k).copied().unwrap_or(0.0);
        let q_i_prev = circuit.queue.get(&k).copied().unwrap_or(0.0);
        let l_i = if a_total > 0.0 { a_i / a_total * l_total } else { 0.0 };
        let alpha = if a_total > 0.0 { (a_i / a_total).min(1.0) } else { 0.0 };
        let gamma = if q_prev_total > 0.0 {
            (q_i_prev / q_prev_total).min(1.0)
        } else {
            0.0
        };
        let b_i = alpha * x_nqt + gamma * x_drain;
        let q_i = (t_sim_s * (alpha * x_fill - gamma * x_drain) + q_i_prev).max(0.0);
        if b_i > 0.0 || a_i > 0.0 {
            transmitted.insert(k, b_i);
        }
        if l_i > 0.0 {
            lost.insert(k, l_i);
        }
        b_total += b_i;
        if q_i > 0.0 {
            new_queue.insert(k, q_i);
            q_after_total += q_i;
        }
    }
    circuit.queue = new_queue;

    StepOutcome {
        arrival_gbps: a_total,
        transmitted,
        lost,
        transmitted_total_gbps: b_total,
        lost_total_gbps: l_total,
        queue_after_gbit: q_after_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flow(d: usize) -> FlowKey {
        FlowKey { demand: d, epoch: 0 }
    }

    fn ckt(omega: u32) -> CircuitRuntime {
        // xi 100 Gbit/s, q_ratio 0.05
        let mut c = CircuitRuntime::new(100.0, 0.05, 1);
        c.active_circuits = omega;
        c
    }

    #[test]
    fn service_rate_is_xi_times_omega() {
        assert_eq!(service_rate(100.0, 3), 300.0);
        assert_eq!(service_rate(100.0, 0), 0.0);
        assert_eq!(service_rate(100.0, 31), 3100.0);
    }

    #[test]
    fn propagation_steps_ceiling() {
        // 400 km at 5 us/km and T_sim 100 us -> 20 steps
        assert_eq!(propagation_steps(400.0, 5.0, 100.0), 20);
        // 1 km -> minimum one step
        assert_eq!(propagation_steps(1.0, 5.0, 100.0), 1);
        assert_eq!(propagation_steps(80.0, 5.0, 100.0), 4);
    }

    // Hand evaluations of the five stages with a single flow,
    // mu = 100 Gbit/s, q_limit = 5 Gbit, T_sim = 1 ms.

    #[test]
    fn empty_queue_overload() {
        let mut c = ckt(1);
        let arrivals = BTreeMap::from([(flow(0), 150.0)]);
        let out = step_circuit(&mut c, &arrivals, 1e-3);
        assert!((out.transmitted[&flow(0)] - 100.0).abs() < 1e-12);
        assert_eq!(out.lost_total_gbps, 0.0);
        assert!((out.queue_after_gbit - 0.05).abs() < 1e-12);
    }

    #[test]
    fn saturated_queue_overload() {
        let mut c = ckt(1);
        c.queue.insert(flow(0), 5.0);
        let arrivals = BTreeMap::from([(flow(0), 150.0)]);
        let out = step_circuit(&mut c, &arrivals, 1e-3);
        assert!((out.transmitted[&flow(0)] - 100.0).abs() < 1e-12);
        assert!((out.lost_total_gbps - 50.0).abs() < 1e-12);
        assert!((out.queue_after_gbit - 5.0).abs() < 1e-12);
    }

    #[test]
    fn pure_draining() {
        let mut c = ckt(1);
        c.queue.insert(flow(0), 0.05);
        let arrivals = BTreeMap::new();
        let out = step_circuit(&mut c, &arrivals, 1e-3);
        assert!((out.transmitted_total_gbps - 50.0).abs() < 1e-12);
        assert_eq!(out.lost_total_gbps, 0.0);
        assert!(out.queue_after_gbit.abs() < 1e-12);
    }

    #[test]
    fn concurring_flows_are_handled_equally() {
        let mut c = ckt(1);
        let arrivals = BTreeMap::from([(flow(0), 120.0), (flow(1), 120.0)]);
        let out = step_circuit(&mut c, &arrivals, 1e-3);
        assert_eq!(out.transmitted[&flow(0)], out.transmitted[&flow(1)]);
        assert_eq!(
            out.lost.get(&flow(0)).copied().unwrap_or(0.0),
            out.lost.get(&flow(1)).copied().unwrap_or(0.0)
        );
        assert_eq!(c.queue[&flow(0)], c.queue[&flow(1)]);
    }

    #[test]
    fn conservation_per_step() {
        let mut c = ckt(2);
        c.queue.insert(flow(0), 3.0);
        c.queue.insert(flow(1), 1.5);
        let t = 1e-4;
        let arrivals = BTreeMap::from([(flow(0), 250.0), (flow(2), 40.0)]);
        let q_prev = c.total_queue_gbit();
        let out = step_circuit(&mut c, &arrivals, t);
        let lhs = out.arrival_gbps * t;
        let rhs =
            out.transmitted_total_gbps * t + out.lost_total_gbps * t + (out.queue_after_gbit - q_prev);
        assert!(
            (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0),
            "conservation violated: {lhs} vs {rhs}"
        );
    }

    #[test]
    fn inactive_circuit_holds_queue_and_drops_arrivals() {
        let mut c = ckt(0);
        c.queue.insert(flow(0), 2.0);
        let arrivals = BTreeMap::from([(flow(0), 50.0)]);
        let out = step_circuit(&mut c, &arrivals, 1e-3);
        assert_eq!(out.transmitted_total_gbps, 0.0);
        assert!((out.lost_total_gbps - 50.0).abs() < 1e-12);
        assert!((out.queue_after_gbit - 2.0).abs() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "negative arrival")]
    fn negative_arrival_is_a_contract_violation() {
        let mut c = ckt(1);
        let arrivals = BTreeMap::from([(flow(0), -1.0)]);
        step_circuit(&mut c, &arrivals, 1e-3);
    }

    #[test]
    fn queue_never_exceeds_limit() {
        let mut c = ckt(1);
        let t = 1e-3;
        for k in 0..200 {
            let arrivals = BTreeMap::from([(flow(0), 100.0 + (k % 7) as f64 * 40.0)]);
            step_circuit(&mut c, &arrivals, t);
            let q = c.total_queue_gbit();
            let limit = c.queue_limit_gbit();
            assert!(q >= 0.0);
            assert!(q <= limit * (1.0 + 1e-9), "q {q} above limit {limit}");
        }
    }
}

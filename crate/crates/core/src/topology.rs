//! Network graph, circuit-path enumeration and the per-demand
//! configuration catalog.
//!
//! A *circuit path* is an abstract unidirectional optical transmission
//! section between two nodes. It either uses a single fiber link directly
//! or bypasses intermediate nodes optically. A demand is realized by a
//! *path configuration*: a chain of circuit paths whose node sequence
//! covers one routing path from source to target.

use std::collections::BTreeMap;

use thiserror::Error;

/// Index of a node in [`NetworkTopology::nodes`].
pub type NodeIdx = usize;
/// Index of a circuit path in the enumerated circuit-path list.
pub type CircuitPathId = usize;
/// Index of a demand.
pub type DemandId = usize;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("topology needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("link references unknown node {0:?}")]
    UnknownNode(String),
    #[error("link {a:?}-{b:?} has nonpositive length {length_km} km")]
    NonpositiveLength { a: String, b: String, length_km: f64 },
    #[error("link {a:?}-{b:?} connects a node to itself")]
    SelfLoop { a: String, b: String },
    #[error("duplicate link between {a:?} and {b:?}")]
    DuplicateLink { a: String, b: String },
    #[error("node {0:?} is connected by {1} link(s); at least 2 are required")]
    DegreeTooLow(String, usize),
    #[error("graph is not connected: node {0:?} is unreachable from {1:?}")]
    Disconnected(String, String),
    #[error("demand {0:?} has source equal to target")]
    DemandLoop(String),
    #[error("no transmission path configuration exists for demand {0:?}")]
    EmptyConfigSet(String),
    #[error("route enumeration exceeded the safety cap of {0} paths")]
    RouteExplosion(usize),
}

/// A bidirectional fiber link. Each direction is realized by its own
/// fiber, so circuit paths derived from it are unidirectional.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberLink {
    pub a: NodeIdx,
    pub b: NodeIdx,
    pub length_km: f64,
}

/// The static network graph: nodes, fiber links and the number of
/// transceivers installed per node.
#[derive(Debug, Clone)]
pub struct NetworkTopology {
    pub nodes: Vec<String>,
    pub links: Vec<FiberLink>,
    /// Installed transceivers per node (the `eta` budget).
    pub transceivers: Vec<u32>,
    adjacency: Vec<Vec<(NodeIdx, f64)>>,
}

/// Raw description consumed by [`build_network`], typically from a
/// scenario file.
#[derive(Debug, Clone)]
pub struct TopologySpec {
    pub nodes: Vec<String>,
    /// (node id, node id, length in km)
    pub links: Vec<(String, String, f64)>,
    pub transceivers: BTreeMap<String, u32>,
}

impl NetworkTopology {
    pub fn node_idx(&self, name: &str) -> Option<NodeIdx> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn neighbors(&self, v: NodeIdx) -> &[(NodeIdx, f64)] {
        &self.adjacency[v]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Validates the raw description and builds the topology.
///
/// Every node must appear in at least two links (redundancy), link
/// lengths must be strictly positive and the graph must be connected.
pub fn build_network(spec: &TopologySpec) -> Result<NetworkTopology, TopologyError> {
    if spec.nodes.len() < 2 {
        return Err(TopologyError::TooFewNodes(spec.nodes.len()));
    }
    let mut seen = BTreeMap::new();
    for (i, n) in spec.nodes.iter().enumerate() {
        if seen.insert(n.clone(), i).is_some() {
            return Err(TopologyError::DuplicateNode(n.clone()));
        }
    }

    let mut links = Vec::with_capacity(spec.links.len());
    for (a, b, len) in &spec.links {
        let ai = *seen
            .get(a)
            .ok_or_else(|| TopologyError::UnknownNode(a.clone()))?;
        let bi = *seen
            .get(b)
            .ok_or_else(|| TopologyError::UnknownNode(b.clone()))?;
        if ai == bi {
            return Err(TopologyError::SelfLoop { a: a.clone(), b: b.clone() });
        }
        if *len <= 0.0 || !len.is_finite() {
            return Err(TopologyError::NonpositiveLength {
                a: a.clone(),
                b: b.clone(),
                length_km: *len,
            });
        }
        if links
            .iter()
            .any(|l: &FiberLink| (l.a, l.b) == (ai.min(bi), ai.max(bi)))
        {
            return Err(TopologyError::DuplicateLink { a: a.clone(), b: b.clone() });
        }
        links.push(FiberLink { a: ai.min(bi), b: ai.max(bi), length_km: *len });
    }

    let mut adjacency = vec![Vec::new(); spec.nodes.len()];
    for l in &links {
        adjacency[l.a].push((l.b, l.length_km));
        adjacency[l.b].push((l.a, l.length_km));
    }
    for adj in &mut adjacency {
        adj.sort_by(|x, y| x.0.cmp(&y.0));
    }

    for (i, adj) in adjacency.iter().enumerate() {
        if adj.len() < 2 {
            return Err(TopologyError::DegreeTooLow(spec.nodes[i].clone(), adj.len()));
        }
    }

    // Connectivity check from node 0.
    let mut visited = vec![false; spec.nodes.len()];
    let mut stack = vec![0usize];
    visited[0] = true;
    while let Some(v) = stack.pop() {
        for &(w, _) in &adjacency[v] {
            if !visited[w] {
                visited[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(unreached) = visited.iter().position(|v| !v) {
        return Err(TopologyError::Disconnected(
            spec.nodes[unreached].clone(),
            spec.nodes[0].clone(),
        ));
    }

    let mut transceivers = Vec::with_capacity(spec.nodes.len());
    for n in &spec.nodes {
        let eta = spec
            .transceivers
            .get(n)
            .copied()
            .ok_or_else(|| TopologyError::UnknownNode(n.clone()))?;
        transceivers.push(eta);
    }

    Ok(NetworkTopology { nodes: spec.nodes.clone(), links, transceivers, adjacency })
}

/// A unidirectional optical transmission section, possibly bypassing
/// intermediate nodes. Realized at runtime by `omega` parallel circuits.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPath {
    pub id: CircuitPathId,
    pub source: NodeIdx,
    pub target: NodeIdx,
    /// Node sequence including source and target; follows fiber links,
    /// no repeated nodes.
    pub node_sequence: Vec<NodeIdx>,
    /// Total fiber distance, the sum of traversed link lengths.
    pub distance_km: f64,
}

impl CircuitPath {
    /// 1 iff `v` is the source or target node (transceiver endpoints).
    pub fn phi(&self, v: NodeIdx) -> bool {
        self.source == v || self.target == v
    }
}

/// Enumerates all circuit paths: one per loop-free link sequence with at
/// most `max_bypass_hops` intermediate nodes and total distance within
/// `optical_reach_km`. Both directions are emitted; every single-link
/// path within reach is included.
///
/// Ordering is deterministic: (source, target, node sequence).
pub fn enumerate_circuit_paths(
    topo: &NetworkTopology,
    optical_reach_km: f64,
    max_bypass_hops: usize,
) -> Vec<CircuitPath> {
    let n = topo.node_count();
    let mut raw: Vec<(NodeIdx, NodeIdx, Vec<NodeIdx>, f64)> = Vec::new();
    for src in 0..n {
        // DFS over simple paths with bounded interior length.
        let mut path = vec![src];
        let mut dist = vec![0.0f64];
        let mut iters: Vec<usize> = vec![0];
        while let Some(pos) = iters.last().copied() {
            let v = *path.last().unwrap();
            let adj = topo.neighbors(v);
            if pos >= adj.len() {
                iters.pop();
                path.pop();
                dist.pop();
                if let Some(p) = iters.last_mut() {
                    *p += 1;
                }
                continue;
            }
            let (w, len) = adj[pos];
            let d = dist.last().unwrap() + len;
            if path.contains(&w) || d > optical_reach_km {
                *iters.last_mut().unwrap() += 1;
                continue;
            }
            path.push(w);
            dist.push(d);
            raw.push((src, w, path.clone(), d));
            if path.len() - 2 < max_bypass_hops {
                iters.push(0);
            } else {
                path.pop();
                dist.pop();
                *iters.last_mut().unwrap() += 1;
            }
        }
    }
    raw.sort_by(|x, y| (x.0, x.1, &x.2).partial_cmp(&(y.0, y.1, &y.2)).unwrap());
    raw.into_iter()
        .enumerate()
        .map(|(id, (source, target, node_sequence, distance_km))| CircuitPath {
            id,
            source,
            target,
            node_sequence,
            distance_km,
        })
        .collect()
}

/// A traffic demand between two nodes.
#[derive(Debug, Clone)]
pub struct Demand {
    pub id: DemandId,
    pub name: String,
    pub source: NodeIdx,
    pub target: NodeIdx,
    /// Long-term mean rate in Gbit/s, used by resource allocation.
    pub h_avg_gbps: f64,
}

/// One way of carrying a demand end to end: an ordered, node-contiguous
/// chain of circuit paths from the demand's source to its target.
#[derive(Debug, Clone, PartialEq)]
pub struct PathConfiguration {
    pub demand: DemandId,
    pub segments: Vec<CircuitPathId>,
}

/// Per-demand configuration sets together with the incidence constants
/// consumed by the optimizers.
#[derive(Debug, Clone)]
pub struct ConfigurationCatalog {
    pub circuit_paths: Vec<CircuitPath>,
    pub demands: Vec<Demand>,
    /// `configs[d]` is the ordered set `T_d`.
    pub configs: Vec<Vec<PathConfiguration>>,
}

impl ConfigurationCatalog {
    /// rho: 1 iff configuration `t` of demand `d` uses circuit path `c`.
    pub fn rho(&self, c: CircuitPathId, d: DemandId, t: usize) -> bool {
        self.configs[d][t].segments.contains(&c)
    }

    pub fn circuit_count(&self) -> usize {
        self.circuit_paths.len()
    }
}

const ROUTE_CAP: usize = 200_000;

/// Generates the catalog: for each demand, up to `k_routes` loop-free
/// routing paths (shortest first by distance, ties by node sequence),
/// and for each route every segmentation of its node sequence into
/// consecutive existing circuit paths.
///
/// Segmentations are ordered by segment count, then by cut positions, so
/// the fully bypassed single-segment realization of a route ranks first.
pub fn generate_configurations(
    topo: &NetworkTopology,
    circuit_paths: &[CircuitPath],
    demands: &[Demand],
    k_routes: usize,
) -> Result<ConfigurationCatalog, TopologyError> {
    // Lookup from exact node sequence to circuit path id.
    let by_seq: BTreeMap<&[NodeIdx], CircuitPathId> = circuit_paths
        .iter()
        .map(|c| (c.node_sequence.as_slice(), c.id))
        .collect();

    let mut configs = Vec::with_capacity(demands.len());
    for d in demands {
        if d.source == d.target {
            return Err(TopologyError::DemandLoop(d.name.clone()));
        }
        let routes = enumerate_routes(topo, d.source, d.target, k_routes)?;
        let mut t_d = Vec::new();
        for route in &routes {
            for segs in segmentations(route, &by_seq) {
                let cfg = PathConfiguration { demand: d.id, segments: segs };
                if !t_d.contains(&cfg) {
                    t_d.push(cfg);
                }
            }
        }
        if t_d.is_empty() {
            return Err(TopologyError::EmptyConfigSet(d.name.clone()));
        }
        configs.push(t_d);
    }

    Ok(ConfigurationCatalog {
        circuit_paths: circuit_paths.to_vec(),
        demands: demands.to_vec(),
        configs,
    })
}

/// Enumerates all loop-free routes between two nodes, sorted by
/// (distance, node sequence), truncated to the best `k`.
fn enumerate_routes(
    topo: &NetworkTopology,
    source: NodeIdx,
    target: NodeIdx,
    k: usize,
) -> Result<Vec<Vec<NodeIdx>>, TopologyError> {
    let mut found: Vec<(f64, Vec<NodeIdx>)> = Vec::new();
    let mut path = vec![source];
    let mut dist = vec![0.0f64];
    let mut iters: Vec<usize> = vec![0];
    while let Some(pos) = iters.last().copied() {
        let v = *path.last().unwrap();
        let adj = topo.neighbors(v);
        if pos >= adj.len() {
            iters.pop();
            path.pop();
            dist.pop();
            if let Some(p) = iters.last_mut() {
                *p += 1;
            }
            continue;
        }
        let (w, len) = adj[pos];
        if path.contains(&w) {
            *iters.last_mut().unwrap() += 1;
            continue;
        }
        if w == target {
            found.push((dist.last().unwrap() + len, {
                let mut p = path.clone();
                p.push(w);
                p
            }));
            if found.len() > ROUTE_CAP {
                return Err(TopologyError::RouteExplosion(ROUTE_CAP));
            }
            *iters.last_mut().unwrap() += 1;
            continue;
        }
        path.push(w);
        dist.push(dist.last().unwrap() + len);
        iters.push(0);
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then_with(|| x.1.cmp(&y.1)));
    found.truncate(k);
    Ok(found.into_iter().map(|(_, p)| p).collect())
}

/// All ways of splitting `route` into consecutive segments that each
/// exist as a circuit path. Cut positions are interior node indices;
/// masks are enumerated by popcount, then by value.
fn segmentations(
    route: &[NodeIdx],
    by_seq: &BTreeMap<&[NodeIdx], CircuitPathId>,
) -> Vec<Vec<CircuitPathId>> {
    let interior = route.len() - 2;
    let mut masks: Vec<u32> = (0..(1u32 << interior)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let mut out = Vec::new();
    'mask: for mask in masks {
        let mut segs = Vec::new();
        let mut start = 0usize;
        for cut in 0..interior {
            if mask & (1 << cut) != 0 {
                let end = cut + 1;
                match by_seq.get(&route[start..=end]) {
                    Some(&id) => segs.push(id),
                    None => continue 'mask,
                }
                start = end;
            }
        }
        match by_seq.get(&route[start..]) {
            Some(&id) => segs.push(id),
            None => continue 'mask,
        }
        // A circuit path must not repeat within one chain.
        let mut sorted = segs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() == segs.len() {
            out.push(segs);
        }
    }
    out
}

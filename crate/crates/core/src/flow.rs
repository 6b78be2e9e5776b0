//! Per-edge footprints: for an edge {u, v}, the sorted lengths of a
//! maximum set of internally vertex-disjoint u-v paths in the graph
//! without that edge. Computed with Edmonds-Karp max flow over the
//! node-splitting reduction: every node becomes an in/out pair joined
//! by a unit-capacity arc, every undirected edge becomes two unit
//! directed arcs.

use rayon::prelude::*;
use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::graph::{Graph, GraphError, NodeId};

/// Non-decreasing vertex-disjoint path lengths for one edge. Empty iff
/// the edge is a bridge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Footprint {
    pub u: NodeId,
    pub v: NodeId,
    pub lengths: Vec<usize>,
}

impl Footprint {
    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: usize,
    cap: u32,
    /// Index of the paired arc in `adj[to]`.
    rev: usize,
    /// True for capacity-carrying arcs (false for residual twins).
    forward: bool,
    /// True for arcs corresponding to an original graph edge; these
    /// count toward path length, node-internal arcs do not.
    edge_arc: bool,
}

/// Unit-capacity flow network over the split nodes of `G \ e`.
/// Split node ids: in(v) = 2v, out(v) = 2v + 1.
pub struct FlowNetwork {
    adj: Vec<Vec<Arc>>,
    source: usize,
    sink: usize,
    forward_arcs: usize,
}

impl FlowNetwork {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Number of forward (capacity-carrying) arcs: 2(m-1) + n.
    pub fn arc_count(&self) -> usize {
        self.forward_arcs
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: u32, edge_arc: bool) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc { to, cap, rev: rev_from, forward: true, edge_arc });
        self.adj[to].push(Arc { to: from, cap: 0, rev: rev_to, forward: false, edge_arc });
        self.forward_arcs += 1;
    }
}

/// The node-splitting reduction for edge `{u, v}` of `g`.
pub fn build_split_network(g: &Graph, u: NodeId, v: NodeId) -> Result<FlowNetwork, GraphError> {
    let removed = g
        .edge_index(u, v)
        .ok_or(GraphError::EdgeNotFound(u, v))?;
    let n = g.n();
    let mut net = FlowNetwork {
        adj: vec![Vec::new(); 2 * n],
        source: 2 * u + 1,
        sink: 2 * v,
        forward_arcs: 0,
    };
    for w in 0..n {
        // terminal split arcs are effectively uncapacitated: all paths
        // share the endpoints
        let cap = if w == u || w == v {
            g.degree(w) as u32
        } else {
            1
        };
        net.add_arc(2 * w, 2 * w + 1, cap, false);
    }
    for (i, e) in g.edges().iter().enumerate() {
        if i == removed {
            continue;
        }
        net.add_arc(2 * e.u + 1, 2 * e.v, 1, true);
        net.add_arc(2 * e.v + 1, 2 * e.u, 1, true);
    }
    Ok(net)
}

/// Integral max flow via shortest augmenting paths, then a shortest-first
/// decomposition of the flow into source-sink paths. Paths are returned
/// as original-node sequences `[u, ..., v]`; length in original edges is
/// `path.len() - 1`.
pub fn max_flow_paths(net: &mut FlowNetwork) -> Vec<Vec<NodeId>> {
    let n = net.adj.len();
    let mut value = 0u32;
    loop {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[net.source] = true;
        let mut queue = VecDeque::new();
        queue.push_back(net.source);
        'bfs: while let Some(x) = queue.pop_front() {
            for (ai, arc) in net.adj[x].iter().enumerate() {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some((x, ai));
                    if arc.to == net.sink {
                        break 'bfs;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[net.sink] {
            break;
        }
        let mut x = net.sink;
        while x != net.source {
            let (px, ai) = parent[x].unwrap();
            let rev = net.adj[px][ai].rev;
            net.adj[px][ai].cap -= 1;
            net.adj[x][rev].cap += 1;
            x = px;
        }
        value += 1;
    }

    // per-arc flow on forward arcs = residual of the twin arc
    let mut flow: Vec<Vec<u32>> = (0..n)
        .map(|x| {
            net.adj[x]
                .iter()
                .map(|arc| if arc.forward { net.adj[arc.to][arc.rev].cap } else { 0 })
                .collect()
        })
        .collect();

    // support adjacency sorted by head id for a deterministic BFS
    let order: Vec<Vec<usize>> = (0..n)
        .map(|x| {
            let mut idx: Vec<usize> = (0..net.adj[x].len()).collect();
            idx.sort_by_key(|&ai| net.adj[x][ai].to);
            idx
        })
        .collect();

    let mut paths = Vec::with_capacity(value as usize);
    for _ in 0..value {
        // shortest remaining flow path; all paths alternate internal and
        // edge arcs, so hop-count BFS order equals edge-length order
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[net.source] = true;
        let mut queue = VecDeque::new();
        queue.push_back(net.source);
        while let Some(x) = queue.pop_front() {
            if x == net.sink {
                break;
            }
            for &ai in &order[x] {
                let arc = net.adj[x][ai];
                if flow[x][ai] > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some((x, ai));
                    queue.push_back(arc.to);
                }
            }
        }
        debug_assert!(seen[net.sink], "flow decomposition ran out of support");

        let mut nodes = vec![net.sink / 2];
        let mut x = net.sink;
        while x != net.source {
            let (px, ai) = parent[x].unwrap();
            flow[px][ai] -= 1;
            if net.adj[px][ai].edge_arc {
                nodes.push(px / 2);
            }
            x = px;
        }
        nodes.reverse();
        paths.push(nodes);
    }
    paths
}

/// Footprint of edge `{u, v}`: sorted lengths of the max-flow path set.
pub fn footprint(g: &Graph, u: NodeId, v: NodeId) -> Result<Footprint, GraphError> {
    let mut net = build_split_network(g, u, v)?;
    let paths = max_flow_paths(&mut net);
    let mut lengths: Vec<usize> = paths.iter().map(|p| p.len() - 1).collect();
    lengths.sort_unstable();
    let (u, v) = if u < v { (u, v) } else { (v, u) };
    Ok(Footprint { u, v, lengths })
}

/// Footprints of every edge, in edge-list order. Per-edge computations
/// are independent and run in parallel.
pub fn all_footprints(g: &Graph) -> Vec<Footprint> {
    g.edges()
        .par_iter()
        .map(|e| footprint(g, e.u, e.v).expect("edge comes from the graph"))
        .collect()
}

/// Debug dump: one `u v : l1 l2 ... lk` line per footprint.
pub fn dump_footprints(footprints: &[Footprint]) -> String {
    let mut out = String::new();
    for f in footprints {
        write!(out, "{} {} :", f.u, f.v).unwrap();
        for l in &f.lengths {
            write!(out, " {l}").unwrap();
        }
        out.push('\n');
    }
    out
}

//! Undirected weighted simple graphs with dense integer node ids.
//!
//! Every other module works on this representation: nodes are `0..n`,
//! edges are stored canonically with `u < v`, and each edge carries a
//! positive weight plus a flag marking it as an augmenting edge.

use std::collections::BinaryHeap;
use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {0} out of range (n = {1})")]
    NodeOutOfRange(NodeId, usize),
    #[error("edge {{{0}, {1}}} not found")]
    EdgeNotFound(NodeId, NodeId),
    #[error("edge weight must be strictly positive, got {0}")]
    NonPositiveWeight(f64),
    #[error("parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

/// One undirected edge, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub weight: f64,
    /// True for augmenting edges (members of `E_p`).
    pub aug: bool,
}

impl Edge {
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        (self.u, self.v)
    }
}

/// Undirected simple graph with positive edge weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<NodeId>>,
}

/// How shortest-path lengths are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    /// Hop counts, ignoring edge weights.
    UnweightedHops,
    /// Sums of edge weights.
    Weighted,
}

/// All-pairs shortest-path distances; disconnected pairs hold `f64::INFINITY`.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
    pub mode: DistanceMode,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: NodeId, j: NodeId) -> f64 {
        self.d[i * self.n + j]
    }
}

fn canonical(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Graph on `n` isolated nodes.
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let (u, v) = canonical(u, v);
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<&Edge> {
        self.edge_index(u, v).map(|i| &self.edges[i])
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId, weight: f64, aug: bool) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u >= self.n {
            return Err(GraphError::NodeOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange(v, self.n));
        }
        if !(weight > 0.0) {
            return Err(GraphError::NonPositiveWeight(weight));
        }
        let (u, v) = canonical(u, v);
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.edges.push(Edge { u, v, weight, aug });
        self.adjacency[u].push(v);
        self.adjacency[v].push(u);
        self.adjacency[u].sort_unstable();
        self.adjacency[v].sort_unstable();
        Ok(())
    }

    /// Copy of the graph without edge `{u, v}`; the original is untouched.
    pub fn remove_edge_view(&self, u: NodeId, v: NodeId) -> Result<Graph, GraphError> {
        let idx = self
            .edge_index(u, v)
            .ok_or(GraphError::EdgeNotFound(u, v))?;
        let mut g = Graph::new(self.n);
        for (i, e) in self.edges.iter().enumerate() {
            if i != idx {
                g.add_edge(e.u, e.v, e.weight, e.aug).expect("source graph is valid");
            }
        }
        Ok(g)
    }

    /// Copy with every edge weight replaced by `f(edge)`.
    pub fn reweighted(&self, f: impl Fn(&Edge) -> f64) -> Graph {
        let mut g = Graph::new(self.n);
        for e in &self.edges {
            g.add_edge(e.u, e.v, f(e), e.aug).expect("source graph is valid");
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let dist = self.bfs_from(0);
        dist.iter().all(|d| d.is_finite())
    }

    fn bfs_from(&self, source: NodeId) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        dist[source] = 0.0;
        let mut queue = VecDeque::new();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v].is_infinite() {
                    dist[v] = dist[u] + 1.0;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn dijkstra_from(&self, source: NodeId) -> Vec<f64> {
        #[derive(PartialEq)]
        struct State {
            dist: f64,
            node: NodeId,
        }
        impl Eq for State {}
        impl Ord for State {
            fn cmp(&self, other: &Self) -> std::cmp::Ordering {
                // min-heap on dist, tie-break on node id
                other
                    .dist
                    .partial_cmp(&self.dist)
                    .unwrap()
                    .then_with(|| other.node.cmp(&self.node))
            }
        }
        impl PartialOrd for State {
            fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.n];
        dist[source] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(State { dist: 0.0, node: source });
        while let Some(State { dist: d, node: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &v in &self.adjacency[u] {
                let w = self.edge(u, v).expect("adjacency consistent").weight;
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(State { dist: nd, node: v });
                }
            }
        }
        dist
    }

    /// All-pairs shortest paths. Unweighted mode counts hops (BFS per
    /// source), weighted mode sums edge weights (Dijkstra per source).
    pub fn shortest_path_lengths(&self, mode: DistanceMode) -> DistanceMatrix {
        let mut d = vec![f64::INFINITY; self.n * self.n];
        for s in 0..self.n {
            let row = match mode {
                DistanceMode::UnweightedHops => self.bfs_from(s),
                DistanceMode::Weighted => self.dijkstra_from(s),
            };
            d[s * self.n..(s + 1) * self.n].copy_from_slice(&row);
        }
        DistanceMatrix { n: self.n, d, mode }
    }

    /// Serialize in the graph text format: `n m` then `u v w aug` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n, self.m()).unwrap();
        for e in &self.edges {
            writeln!(out, "{} {} {:.9e} {}", e.u, e.v, e.weight, if e.aug { 1 } else { 0 }).unwrap();
        }
        out
    }

    /// Parse the graph text format. Node labels may be arbitrary
    /// non-negative integers; they are remapped to `0..n` in order of
    /// first appearance when they are not already dense.
    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (line_no, header) = lines.next().ok_or(GraphError::ParseError {
            line: 0,
            msg: "empty file".into(),
        })?;
        let mut it = header.split_whitespace();
        let parse_usize = |tok: Option<&str>, line: usize, what: &str| -> Result<usize, GraphError> {
            tok.ok_or(GraphError::ParseError {
                line,
                msg: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| GraphError::ParseError {
                line,
                msg: format!("invalid {what}"),
            })
        };
        let n = parse_usize(it.next(), line_no, "node count")?;
        let m = parse_usize(it.next(), line_no, "edge count")?;

        let mut raw_edges = Vec::with_capacity(m);
        let mut labels: Vec<usize> = Vec::new();
        for _ in 0..m {
            let (line_no, line) = lines.next().ok_or(GraphError::ParseError {
                line: 0,
                msg: format!("expected {m} edge lines"),
            })?;
            let mut it = line.split_whitespace();
            let u = parse_usize(it.next(), line_no, "endpoint")?;
            let v = parse_usize(it.next(), line_no, "endpoint")?;
            let w: f64 = it
                .next()
                .ok_or(GraphError::ParseError {
                    line: line_no,
                    msg: "missing weight".into(),
                })?
                .parse()
                .map_err(|_| GraphError::ParseError {
                    line: line_no,
                    msg: "invalid weight".into(),
                })?;
            let aug = match it.next() {
                Some("0") => false,
                Some("1") => true,
                _ => {
                    return Err(GraphError::ParseError {
                        line: line_no,
                        msg: "aug flag must be 0 or 1".into(),
                    })
                }
            };
            for x in [u, v] {
                if !labels.contains(&x) {
                    labels.push(x);
                }
            }
            raw_edges.push((u, v, w, aug));
        }

        // Labels already dense: keep them. Otherwise remap by first appearance.
        let dense = labels.iter().all(|&l| l < n);
        let remap = |x: usize| -> usize {
            if dense {
                x
            } else {
                labels.iter().position(|&l| l == x).unwrap()
            }
        };
        if !dense && labels.len() > n {
            return Err(GraphError::ParseError {
                line: 0,
                msg: format!("{} distinct labels but n = {n}", labels.len()),
            });
        }

        let mut g = Graph::new(n);
        for (u, v, w, aug) in raw_edges {
            g.add_edge(remap(u), remap(v), w, aug)?;
        }
        Ok(g)
    }
}

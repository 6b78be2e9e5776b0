//! Clutter weighting: normalize footprints to fixed-length feature
//! vectors, flag outlier edges with an Isolation Forest, and emit the
//! weighted graph where each outlier edge carries the aggregate of its
//! raw footprint. Also hosts the neighborhood-weighting and fixed-weight
//! baselines.

use std::fmt::Write as _;

use thiserror::Error;

use crate::flow::{all_footprints, Footprint};
use crate::graph::{Graph, NodeId};
use crate::iforest::{self, ForestParams, IForestError};

#[derive(Debug, Error)]
pub enum WeightingError {
    #[error("footprint of a bridge edge has no entries")]
    EmptyFootprint,
    #[error("graph has no augmenting edges")]
    NoAugEdges,
    #[error("graph must be connected")]
    Disconnected,
    #[error(transparent)]
    Forest(#[from] IForestError),
}

/// Aggregate applied to footprints: the `M` in edge weight `M(f(e))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Min,
    Max,
    Mean,
}

impl Aggregate {
    pub fn name(&self) -> &'static str {
        match self {
            Aggregate::Min => "min",
            Aggregate::Max => "max",
            Aggregate::Mean => "mean",
        }
    }

    fn apply(&self, values: &[f64]) -> f64 {
        match self {
            Aggregate::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregate::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregate::Mean => values.iter().sum::<f64>() / values.len() as f64,
        }
    }
}

/// `M(f(e))` over the raw footprint lengths.
pub fn aggregate(f: &Footprint, m: Aggregate) -> Result<f64, WeightingError> {
    if f.is_empty() {
        return Err(WeightingError::EmptyFootprint);
    }
    let values: Vec<f64> = f.lengths.iter().map(|&l| l as f64).collect();
    Ok(m.apply(&values))
}

/// Expand or contract a footprint to exactly `k` entries.
///
/// Shorter footprints are padded with `M(f)`; longer ones keep their
/// first `k - 1` entries and aggregate the rest (from index `k - 1` on,
/// so no entry is dropped).
pub fn normalize_footprint(
    f: &Footprint,
    k: usize,
    m: Aggregate,
) -> Result<Vec<f64>, WeightingError> {
    if f.is_empty() {
        return Err(WeightingError::EmptyFootprint);
    }
    assert!(k >= 1);
    let values: Vec<f64> = f.lengths.iter().map(|&l| l as f64).collect();
    let l = values.len();
    let out = if l < k {
        let pad = m.apply(&values);
        let mut out = values;
        out.resize(k, pad);
        out
    } else if l == k {
        values
    } else {
        let mut out = values[..k - 1].to_vec();
        out.push(m.apply(&values[k - 1..]));
        out
    };
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct WeightingParams {
    /// Feature-vector dimension.
    pub k: usize,
    pub aggregate: Aggregate,
    pub forest: ForestParams,
}

impl Default for WeightingParams {
    fn default() -> Self {
        WeightingParams {
            k: 4,
            aggregate: Aggregate::Min,
            forest: ForestParams::default(),
        }
    }
}

/// Outcome of the heuristic on one graph; vectors align with the edge
/// list of the input graph.
#[derive(Debug, Clone)]
pub struct WeightingResult {
    pub graph: Graph,
    pub footprints: Vec<Footprint>,
    pub features: Vec<Option<Vec<f64>>>,
    pub scores: Vec<Option<f64>>,
    pub outlier: Vec<bool>,
    pub params: WeightingParams,
}

/// Run the full heuristic: footprints, Eq-style normalization, Isolation
/// Forest outlier flags, and weights. Outlier edges get `M(f(e))`;
/// bridges and non-outliers get weight 1.
pub fn weight_heuristic(g: &Graph, params: &WeightingParams) -> Result<WeightingResult, WeightingError> {
    if !g.is_connected() {
        return Err(WeightingError::Disconnected);
    }
    let footprints = all_footprints(g);

    // bridges are excluded from the sample: the heuristic cannot shorten
    // an edge that is its endpoints' only connection
    let mut sample = Vec::new();
    let mut sample_edges = Vec::new();
    let mut features: Vec<Option<Vec<f64>>> = vec![None; footprints.len()];
    for (i, f) in footprints.iter().enumerate() {
        if f.is_empty() {
            continue;
        }
        let fv = normalize_footprint(f, params.k, params.aggregate)?;
        features[i] = Some(fv.clone());
        sample.push(fv);
        sample_edges.push(i);
    }

    let mut scores: Vec<Option<f64>> = vec![None; footprints.len()];
    let mut outlier = vec![false; footprints.len()];
    if sample.len() >= 2 {
        let model = iforest::fit(&sample, &params.forest)?;
        let flags = iforest::flag_outliers(&model, &sample)?;
        for (j, &i) in sample_edges.iter().enumerate() {
            scores[i] = Some(iforest::anomaly_score(&model, &sample[j])?);
            outlier[i] = flags[j];
        }
    }

    let weighted = {
        let mut w = Graph::new(g.n());
        for (i, e) in g.edges().iter().enumerate() {
            let weight = if outlier[i] {
                aggregate(&footprints[i], params.aggregate)?
            } else {
                1.0
            };
            w.add_edge(e.u, e.v, weight, e.aug).expect("source graph is valid");
        }
        w
    };

    Ok(WeightingResult {
        graph: weighted,
        footprints,
        features,
        scores,
        outlier,
        params: params.clone(),
    })
}

/// Neighborhood weight `|N_u ∪ N_v| - |N_u ∩ N_v|` for any node pair.
pub fn neighborhood_weight(g: &Graph, u: NodeId, v: NodeId) -> f64 {
    let nu = g.neighbors(u);
    let nv = g.neighbors(v);
    let inter = nu.iter().filter(|x| nv.contains(x)).count();
    (nu.len() + nv.len() - inter - inter) as f64
}

/// Copy of the graph with every edge weighted by the neighborhood
/// weight of its endpoints.
pub fn weight_neighborhood(g: &Graph) -> Graph {
    g.reweighted(|e| neighborhood_weight(g, e.u, e.v))
}

/// Fixed weighting: every augmenting edge gets weight `w`, others 1.
pub fn weight_fixed(g: &Graph, w: f64) -> Result<Graph, WeightingError> {
    if !g.edges().iter().any(|e| e.aug) {
        return Err(WeightingError::NoAugEdges);
    }
    Ok(g.reweighted(|e| if e.aug { w } else { 1.0 }))
}

/// Per-edge report: footprint, feature vector, score, flag, weight.
pub fn report(result: &WeightingResult) -> String {
    let mut out = String::from("u v footprint feature score outlier weight\n");
    for (i, e) in result.graph.edges().iter().enumerate() {
        let fp = result.footprints[i]
            .lengths
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let fv = result.features[i]
            .as_ref()
            .map(|v| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(","))
            .unwrap_or_else(|| "-".into());
        let score = result.scores[i]
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "-".into());
        writeln!(
            out,
            "{} {} [{}] [{}] {} {} {:.9}",
            e.u, e.v, fp, fv, score, result.outlier[i], e.weight
        )
        .unwrap();
    }
    out
}

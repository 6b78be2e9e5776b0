//! Isolation Forest over fixed-dimension real vectors. Points that are
//! isolated by few random axis-aligned splits score close to 1 and are
//! flagged as outliers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum IForestError {
    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub enum TreeNode {
    Internal {
        dim: usize,
        split: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
    },
}

/// One randomized isolation tree, nodes in an arena with the root at 0.
#[derive(Debug, Clone)]
pub struct IsolationTree {
    pub nodes: Vec<TreeNode>,
}

#[derive(Debug, Clone)]
pub struct ForestParams {
    pub trees: usize,
    pub subsample: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            trees: 100,
            subsample: 256,
            threshold: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IsolationForestModel {
    pub trees: Vec<IsolationTree>,
    /// Subsample size actually used (min of requested and sample count).
    pub psi: usize,
    pub threshold: f64,
    pub dim: usize,
}

/// Average path length of an unsuccessful search in a binary search
/// tree with q nodes; the normalizer of the anomaly score.
pub fn average_path_length(q: usize) -> f64 {
    if q <= 1 {
        return 0.0;
    }
    let harmonic: f64 = (1..q).map(|i| 1.0 / i as f64).sum();
    2.0 * harmonic - 2.0 * (q - 1) as f64 / q as f64
}

fn split_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 step keyed by tree index
    let mut z = seed ^ index.wrapping_mul(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn build_tree(
    points: &[Vec<f64>],
    sample: &mut Vec<usize>,
    height_limit: usize,
    rng: &mut ChaCha8Rng,
) -> IsolationTree {
    let mut nodes = Vec::new();
    build_node(points, sample, 0, height_limit, rng, &mut nodes);
    IsolationTree { nodes }
}

fn build_node(
    points: &[Vec<f64>],
    sample: &mut [usize],
    depth: usize,
    height_limit: usize,
    rng: &mut ChaCha8Rng,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let dim = points[0].len();
    let splittable: Vec<usize> = (0..dim)
        .filter(|&d| {
            let lo = sample.iter().map(|&i| points[i][d]).fold(f64::INFINITY, f64::min);
            let hi = sample.iter().map(|&i| points[i][d]).fold(f64::NEG_INFINITY, f64::max);
            hi > lo
        })
        .collect();

    if sample.len() <= 1 || depth >= height_limit || splittable.is_empty() {
        let id = nodes.len();
        nodes.push(TreeNode::Leaf { size: sample.len() });
        return id;
    }

    let d = *splittable.choose(rng).unwrap();
    let lo = sample.iter().map(|&i| points[i][d]).fold(f64::INFINITY, f64::min);
    let hi = sample.iter().map(|&i| points[i][d]).fold(f64::NEG_INFINITY, f64::max);
    let split = rng.gen_range(lo..hi);

    let mut mid = 0;
    for i in 0..sample.len() {
        if points[sample[i]][d] < split {
            sample.swap(i, mid);
            mid += 1;
        }
    }
    let id = nodes.len();
    nodes.push(TreeNode::Leaf { size: 0 }); // placeholder
    let (left_sample, right_sample) = sample.split_at_mut(mid);
    let left = build_node(points, left_sample, depth + 1, height_limit, rng, nodes);
    let right = build_node(points, right_sample, depth + 1, height_limit, rng, nodes);
    nodes[id] = TreeNode::Internal { dim: d, split, left, right };
    id
}

/// Fit an isolation forest on `points`.
pub fn fit(points: &[Vec<f64>], params: &ForestParams) -> Result<IsolationForestModel, IForestError> {
    if points.len() < 2 {
        return Err(IForestError::TooFewPoints(points.len()));
    }
    let dim = points[0].len();
    for p in points {
        if p.len() != dim {
            return Err(IForestError::DimensionMismatch { expected: dim, got: p.len() });
        }
    }
    let psi = params.subsample.min(points.len()).max(2);
    let height_limit = (psi as f64).log2().ceil() as usize;
    let indices: Vec<usize> = (0..points.len()).collect();

    let trees = (0..params.trees)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(params.seed, t as u64));
            let mut sample: Vec<usize> =
                indices.choose_multiple(&mut rng, psi).copied().collect();
            build_tree(points, &mut sample, height_limit, &mut rng)
        })
        .collect();

    Ok(IsolationForestModel {
        trees,
        psi,
        threshold: params.threshold,
        dim,
    })
}

fn path_depth(tree: &IsolationTree, point: &[f64]) -> f64 {
    let mut node = 0;
    let mut depth = 0usize;
    loop {
        match &tree.nodes[node] {
            TreeNode::Leaf { size } => {
                return depth as f64 + average_path_length(*size);
            }
            TreeNode::Internal { dim, split, left, right } => {
                depth += 1;
                node = if point[*dim] < *split { *left } else { *right };
            }
        }
    }
}

/// Anomaly score in (0, 1): `2^(-E(h(x)) / c(psi))`.
pub fn anomaly_score(model: &IsolationForestModel, point: &[f64]) -> Result<f64, IForestError> {
    if point.len() != model.dim {
        return Err(IForestError::DimensionMismatch {
            expected: model.dim,
            got: point.len(),
        });
    }
    let mean_depth: f64 = model
        .trees
        .iter()
        .map(|t| path_depth(t, point))
        .sum::<f64>()
        / model.trees.len() as f64;
    Ok(2f64.powf(-mean_depth / average_path_length(model.psi)))
}

/// One flag per point: true iff its score exceeds the model threshold.
pub fn flag_outliers(
    model: &IsolationForestModel,
    points: &[Vec<f64>],
) -> Result<Vec<bool>, IForestError> {
    points
        .iter()
        .map(|p| anomaly_score(model, p).map(|s| s > model.threshold))
        .collect()
}

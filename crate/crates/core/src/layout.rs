//! Weighted spring layouts: a ForceAtlas2-style force simulation and
//! weighted stress majorization, plus restart selection and the
//! per-graph variant suite.
//!
//! Edge weights mean desired relative length. Stress majorization
//! consumes them directly as shortest-path edge lengths; the force
//! engine turns weight `w` into an attraction multiplier `w^delta` with
//! `delta = -1` by default, so heavier edges are pulled less and end up
//! longer. Callers that want a weight to act directly as an attraction
//! multiplier (the fixed 0.01 baseline, neighborhood weights) set
//! `delta = +1`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{DistanceMode, Graph};
use crate::metrics::{self, Coords, MetricError};
use crate::weighting::{self, WeightingError, WeightingParams};

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("non-finite coordinate at iteration {0}")]
    NumericalDivergence(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Weighting(#[from] WeightingError),
    #[error("layout parse error at line {line}: {msg}")]
    ParseError { line: usize, msg: String },
}

/// Node coordinates for one graph, with run provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub coords: Vec<Coords>,
    pub engine: String,
    pub seed: u64,
    pub iterations: usize,
}

impl Layout {
    /// Layout file format: provenance comment, `n`, then `x y` lines.
    pub fn to_text(&self, variant: &str) -> String {
        let mut out = format!("# {} {} {} {}\n{}\n", self.engine, variant, self.seed, self.iterations, self.coords.len());
        for c in &self.coords {
            out.push_str(&format!("{:.17e} {:.17e}\n", c[0], c[1]));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Layout, LayoutError> {
        let mut engine = String::from("unknown");
        let mut seed = 0u64;
        let mut iterations = 0usize;
        let mut data_lines = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() == 4 {
                    engine = parts[0].to_string();
                    seed = parts[2].parse().unwrap_or(0);
                    iterations = parts[3].parse().unwrap_or(0);
                }
                continue;
            }
            data_lines.push((i + 1, line));
        }
        let (line, header) = *data_lines.first().ok_or(LayoutError::ParseError {
            line: 0,
            msg: "empty layout file".into(),
        })?;
        let n: usize = header.parse().map_err(|_| LayoutError::ParseError {
            line,
            msg: "invalid node count".into(),
        })?;
        let mut coords = Vec::with_capacity(n);
        for &(line, l) in data_lines.iter().skip(1).take(n) {
            let mut it = l.split_whitespace();
            let mut parse = |what: &str| -> Result<f64, LayoutError> {
                it.next()
                    .ok_or(LayoutError::ParseError { line, msg: format!("missing {what}") })?
                    .parse()
                    .map_err(|_| LayoutError::ParseError { line, msg: format!("invalid {what}") })
            };
            coords.push([parse("x")?, parse("y")?]);
        }
        if coords.len() != n {
            return Err(LayoutError::ParseError {
                line: 0,
                msg: format!("expected {n} coordinate lines, got {}", coords.len()),
            });
        }
        Ok(Layout { coords, engine, seed, iterations })
    }
}

/// Coordinates i.i.d. uniform in the unit square.
pub fn random_layout(n: usize, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Layout {
        coords: (0..n).map(|_| [rng.gen(), rng.gen()]).collect(),
        engine: "random".into(),
        seed,
        iterations: 0,
    }
}

// ---------------------------------------------------------------------
// ForceAtlas2-style engine
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Fa2Params {
    pub iterations: usize,
    /// Repulsion scaling k_r.
    pub repulsion: f64,
    /// Gravity scaling k_g (pull toward the centroid).
    pub gravity: f64,
    /// Edge-weight exponent: attraction multiplier is `w^delta`.
    pub weight_exponent: f64,
    /// Initial global speed.
    pub speed: f64,
    /// Swing tolerance of the adaptive speed.
    pub tolerance: f64,
}

impl Default for Fa2Params {
    fn default() -> Self {
        Fa2Params {
            iterations: 2000,
            repulsion: 1.0,
            gravity: 1.0,
            weight_exponent: -1.0,
            speed: 1.0,
            tolerance: 1.0,
        }
    }
}

const FA2_LOCAL_SPEED: f64 = 0.1;
const FA2_MAX_DISPLACEMENT: f64 = 10.0;
const MIN_DIST: f64 = 1e-9;

/// One force evaluation: repulsion + attraction (+ gravity toward the
/// centroid when `gravity > 0`). Exposed for the translation-invariance
/// property.
pub fn fa2_forces(g: &Graph, coords: &[Coords], p: &Fa2Params) -> Vec<Coords> {
    let n = g.n();
    let mut force = vec![[0.0; 2]; n];
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v) as f64 + 1.0).collect();

    for i in 0..n {
        for j in (i + 1)..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let dist = (dx * dx + dy * dy).sqrt().max(MIN_DIST);
            let f = p.repulsion * deg[i] * deg[j] / (dist * dist);
            force[i][0] += f * dx;
            force[i][1] += f * dy;
            force[j][0] -= f * dx;
            force[j][1] -= f * dy;
        }
    }

    for e in g.edges() {
        let mult = e.weight.powf(p.weight_exponent);
        let dx = coords[e.v][0] - coords[e.u][0];
        let dy = coords[e.v][1] - coords[e.u][1];
        // linear attraction: force magnitude = mult * distance
        force[e.u][0] += mult * dx;
        force[e.u][1] += mult * dy;
        force[e.v][0] -= mult * dx;
        force[e.v][1] -= mult * dy;
    }

    if p.gravity > 0.0 {
        let cx = coords.iter().map(|c| c[0]).sum::<f64>() / n as f64;
        let cy = coords.iter().map(|c| c[1]).sum::<f64>() / n as f64;
        for i in 0..n {
            let dx = cx - coords[i][0];
            let dy = cy - coords[i][1];
            let dist = (dx * dx + dy * dy).sqrt();
            if dist > MIN_DIST {
                let f = p.gravity * deg[i] / dist;
                force[i][0] += f * dx;
                force[i][1] += f * dy;
            }
        }
    }
    force
}

/// ForceAtlas2-style simulation from `init`, run to the iteration cap.
pub fn fa2(g: &Graph, init: &Layout, p: &Fa2Params) -> Result<Layout, LayoutError> {
    let n = g.n();
    let mut coords = init.coords.clone();
    assert_eq!(coords.len(), n);
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v) as f64 + 1.0).collect();
    let mut prev_force = vec![[0.0; 2]; n];
    let mut speed = p.speed;

    for it in 0..p.iterations {
        let force = fa2_forces(g, &coords, p);

        let mut global_swing = 0.0;
        let mut global_traction = 0.0;
        let mut swing = vec![0.0; n];
        for i in 0..n {
            let sx = force[i][0] - prev_force[i][0];
            let sy = force[i][1] - prev_force[i][1];
            swing[i] = (sx * sx + sy * sy).sqrt();
            let tx = (force[i][0] + prev_force[i][0]) / 2.0;
            let ty = (force[i][1] + prev_force[i][1]) / 2.0;
            global_swing += deg[i] * swing[i];
            global_traction += deg[i] * (tx * tx + ty * ty).sqrt();
        }
        if global_swing > 0.0 {
            // cap growth at 50% per iteration
            speed = (p.tolerance * global_traction / global_swing).min(1.5 * speed);
        }

        for i in 0..n {
            let mag = (force[i][0] * force[i][0] + force[i][1] * force[i][1]).sqrt();
            if mag < MIN_DIST {
                continue;
            }
            let mut step = FA2_LOCAL_SPEED * speed / (1.0 + speed * swing[i].sqrt());
            if step * mag > FA2_MAX_DISPLACEMENT {
                step = FA2_MAX_DISPLACEMENT / mag;
            }
            coords[i][0] += force[i][0] * step;
            coords[i][1] += force[i][1] * step;
        }

        if coords.iter().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(LayoutError::NumericalDivergence(it));
        }
        prev_force = force;
    }

    Ok(Layout {
        coords,
        engine: "fa2".into(),
        seed: init.seed,
        iterations: p.iterations,
    })
}

// ---------------------------------------------------------------------
// Stress majorization
// ---------------------------------------------------------------------

/// How stress weights are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairWeightRule {
    /// omega_ij = d_ij^-2 for every connected pair.
    DistanceSquared,
    /// Adjacent pairs are down-weighted by the squared neighborhood
    /// weight of their endpoints; other pairs keep d_ij^-2.
    NeighborhoodAdjacent,
}

#[derive(Debug, Clone)]
pub struct SmParams {
    pub iterations: usize,
    /// Relative stress improvement below which iteration stops.
    pub tolerance: f64,
    pub pair_weight: PairWeightRule,
}

impl Default for SmParams {
    fn default() -> Self {
        SmParams {
            iterations: 2000,
            tolerance: 1e-7,
            pair_weight: PairWeightRule::DistanceSquared,
        }
    }
}

fn stress(coords: &[Coords], dist: &[f64], omega: &[f64], n: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let w = omega[i * n + j];
            if w == 0.0 {
                continue;
            }
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let diff = (dx * dx + dy * dy).sqrt() - dist[i * n + j];
            total += w * diff * diff;
        }
    }
    total
}

/// Weighted stress majorization; also returns the per-iteration stress
/// trace (index 0 is the stress of the initial layout).
pub fn stress_majorization_trace(
    g: &Graph,
    init: &Layout,
    p: &SmParams,
) -> Result<(Layout, Vec<f64>), LayoutError> {
    let n = g.n();
    let dm = g.shortest_path_lengths(DistanceMode::Weighted);
    let mut dist = vec![0.0; n * n];
    let mut omega = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let d = dm.get(i, j);
            if !d.is_finite() {
                continue; // disconnected pairs carry no stress term
            }
            dist[i * n + j] = d;
            omega[i * n + j] = match p.pair_weight {
                PairWeightRule::DistanceSquared => d.powi(-2),
                PairWeightRule::NeighborhoodAdjacent => {
                    if g.has_edge(i, j) {
                        weighting::neighborhood_weight(g, i, j).powi(-2)
                    } else {
                        d.powi(-2)
                    }
                }
            };
        }
    }

    // Moore-Penrose inverse of the weight Laplacian via the rank-one
    // trick: V^+ = (V + J/n)^-1 - J/n (valid for connected weights)
    let mut v = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut row_sum = 0.0;
        for j in 0..n {
            if i != j {
                v[(i, j)] = -omega[i * n + j];
                row_sum += omega[i * n + j];
            }
        }
        v[(i, i)] = row_sum;
    }
    let jn = 1.0 / n as f64;
    for i in 0..n {
        for j in 0..n {
            v[(i, j)] += jn;
        }
    }
    let v_inv = v
        .try_inverse()
        .ok_or(LayoutError::NumericalDivergence(0))?;

    let mut coords = init.coords.clone();
    let mut trace = vec![stress(&coords, &dist, &omega, n)];
    let mut iterations = 0;

    for it in 0..p.iterations {
        // majorization step: X_new = V^+ B(X) X
        let mut bx = vec![[0.0f64; 2]; n];
        for i in 0..n {
            let mut diag = 0.0;
            let mut acc = [0.0f64; 2];
            for j in 0..n {
                if i == j {
                    continue;
                }
                let w = omega[i * n + j];
                if w == 0.0 {
                    continue;
                }
                let dx = coords[i][0] - coords[j][0];
                let dy = coords[i][1] - coords[j][1];
                let norm = (dx * dx + dy * dy).sqrt();
                let b = if norm > MIN_DIST { w * dist[i * n + j] / norm } else { 0.0 };
                diag += b;
                acc[0] -= b * coords[j][0];
                acc[1] -= b * coords[j][1];
            }
            bx[i][0] = diag * coords[i][0] + acc[0];
            bx[i][1] = diag * coords[i][1] + acc[1];
        }
        let mut new_coords = vec![[0.0f64; 2]; n];
        for i in 0..n {
            let mut acc = [0.0f64; 2];
            for j in 0..n {
                let vij = v_inv[(i, j)] - jn;
                acc[0] += vij * bx[j][0];
                acc[1] += vij * bx[j][1];
            }
            new_coords[i] = acc;
        }
        coords = new_coords;
        if coords.iter().any(|c| !c[0].is_finite() || !c[1].is_finite()) {
            return Err(LayoutError::NumericalDivergence(it));
        }
        let s = stress(&coords, &dist, &omega, n);
        let prev = *trace.last().unwrap();
        trace.push(s);
        iterations = it + 1;
        if prev > 0.0 && (prev - s) / prev < p.tolerance {
            break;
        }
    }

    Ok((
        Layout {
            coords,
            engine: "sm".into(),
            seed: init.seed,
            iterations,
        },
        trace,
    ))
}

pub fn stress_majorization(g: &Graph, init: &Layout, p: &SmParams) -> Result<Layout, LayoutError> {
    stress_majorization_trace(g, init, p).map(|(l, _)| l)
}

// ---------------------------------------------------------------------
// Engines, restarts, variant suite
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Fa2,
    Sm,
}

impl EngineKind {
    pub fn name(&self) -> &'static str {
        match self {
            EngineKind::Fa2 => "fa2",
            EngineKind::Sm => "sm",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub kind: EngineKind,
    pub fa2: Fa2Params,
    pub sm: SmParams,
}

impl EngineConfig {
    pub fn new(kind: EngineKind) -> Self {
        EngineConfig {
            kind,
            fa2: Fa2Params::default(),
            sm: SmParams::default(),
        }
    }
}

/// One engine run from a seeded random initial layout.
pub fn run_engine(g: &Graph, cfg: &EngineConfig, seed: u64) -> Result<Layout, LayoutError> {
    let init = random_layout(g.n(), seed);
    match cfg.kind {
        EngineKind::Fa2 => fa2(g, &init, &cfg.fa2),
        EngineKind::Sm => stress_majorization(g, &init, &cfg.sm),
    }
}

/// Run once per seed and keep the layout with the fewest crossings
/// (ties break toward the earlier seed).
pub fn best_of_k(g: &Graph, cfg: &EngineConfig, seeds: &[u64]) -> Result<Layout, LayoutError> {
    assert!(!seeds.is_empty());
    let mut best: Option<(usize, Layout)> = None;
    for &seed in seeds {
        let layout = run_engine(g, cfg, seed)?;
        let nc = metrics::count_crossings(g, &layout.coords)?;
        if best.as_ref().map_or(true, |(bnc, _)| nc < *bnc) {
            best = Some((nc, layout));
        }
    }
    Ok(best.unwrap().1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Orig,
    OnTop,
    Redraw,
    HMin,
    HMax,
    HMean,
    HNb,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Orig => "orig",
            Variant::OnTop => "on_top",
            Variant::Redraw => "redraw",
            Variant::HMin => "H_min",
            Variant::HMax => "H_max",
            Variant::HMean => "H_mean",
            Variant::HNb => "H_nb",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s {
            "orig" => Some(Variant::Orig),
            "on_top" => Some(Variant::OnTop),
            "redraw" => Some(Variant::Redraw),
            "H_min" => Some(Variant::HMin),
            "H_max" => Some(Variant::HMax),
            "H_mean" => Some(Variant::HMean),
            "H_nb" => Some(Variant::HNb),
            _ => None,
        }
    }

    pub fn heuristic_aggregate(&self) -> Option<weighting::Aggregate> {
        match self {
            Variant::HMin => Some(weighting::Aggregate::Min),
            Variant::HMax => Some(weighting::Aggregate::Max),
            Variant::HMean => Some(weighting::Aggregate::Mean),
            _ => None,
        }
    }
}

/// The per-graph variant list: seven layouts when an augmented version
/// exists, five (no on_top / redraw) otherwise.
pub fn applicable_variants(has_augmented: bool) -> Vec<Variant> {
    if has_augmented {
        vec![
            Variant::Orig,
            Variant::OnTop,
            Variant::Redraw,
            Variant::HMin,
            Variant::HMax,
            Variant::HMean,
            Variant::HNb,
        ]
    } else {
        vec![
            Variant::Orig,
            Variant::HMin,
            Variant::HMax,
            Variant::HMean,
            Variant::HNb,
        ]
    }
}

/// Compute the variant suite for one graph (and optionally its
/// augmented version) under one engine, with best-of-k restarts.
pub fn layout_suite(
    g_planar: &Graph,
    g_aug: Option<&Graph>,
    cfg: &EngineConfig,
    weighting_params: &WeightingParams,
    restart_seeds: &[u64],
) -> Result<Vec<(Variant, Layout)>, LayoutError> {
    let target = g_aug.unwrap_or(g_planar);
    let mut out = Vec::new();

    let orig = best_of_k(g_planar, cfg, restart_seeds)?;
    out.push((Variant::Orig, orig.clone()));

    if g_aug.is_some() {
        // same coordinates, evaluated against the augmented graph
        let mut on_top = orig.clone();
        on_top.engine = cfg.kind.name().into();
        out.push((Variant::OnTop, on_top));
        out.push((Variant::Redraw, best_of_k(target, cfg, restart_seeds)?));
    }

    for variant in [Variant::HMin, Variant::HMax, Variant::HMean] {
        let params = WeightingParams {
            aggregate: variant.heuristic_aggregate().unwrap(),
            ..weighting_params.clone()
        };
        let weighted = weighting::weight_heuristic(target, &params)?;
        out.push((variant, best_of_k(&weighted.graph, cfg, restart_seeds)?));
    }

    let nb_layout = match cfg.kind {
        EngineKind::Fa2 => {
            let nb = weighting::weight_neighborhood(target);
            let cfg_nb = EngineConfig {
                fa2: Fa2Params { weight_exponent: 1.0, ..cfg.fa2.clone() },
                ..cfg.clone()
            };
            best_of_k(&nb, &cfg_nb, restart_seeds)?
        }
        EngineKind::Sm => {
            let cfg_nb = EngineConfig {
                sm: SmParams { pair_weight: PairWeightRule::NeighborhoodAdjacent, ..cfg.sm.clone() },
                ..cfg.clone()
            };
            best_of_k(target, &cfg_nb, restart_seeds)?
        }
    };
    out.push((Variant::HNb, nb_layout));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{augment, gen_grid};
    use crate::metrics::count_crossings;

    #[test]
    fn random_layout_basics() {
        let l = random_layout(1, 5);
        assert_eq!(l.coords.len(), 1);
        assert_eq!(random_layout(40, 9), random_layout(40, 9));
        for c in random_layout(100, 3).coords {
            assert!((0.0..1.0).contains(&c[0]) && (0.0..1.0).contains(&c[1]));
        }
    }

    #[test]
    fn fa2_single_edge_stays_symmetric() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, 1.0, false).unwrap();
        let init = Layout {
            coords: vec![[-0.5, 0.0], [0.5, 0.0]],
            engine: "random".into(),
            seed: 0,
            iterations: 0,
        };
        let out = fa2(&g, &init, &Fa2Params { iterations: 500, ..Default::default() }).unwrap();
        let mid = [
            (out.coords[0][0] + out.coords[1][0]) / 2.0,
            (out.coords[0][1] + out.coords[1][1]) / 2.0,
        ];
        assert!(mid[0].abs() < 1e-9 && mid[1].abs() < 1e-9);
        assert!((out.coords[0][1]).abs() < 1e-9);
    }

    #[test]
    fn fa2_forces_sum_to_zero_without_gravity() {
        let g = gen_grid(4, 4).unwrap();
        let init = random_layout(g.n(), 2);
        let p = Fa2Params { gravity: 0.0, ..Default::default() };
        let force = fa2_forces(&g, &init.coords, &p);
        let net: [f64; 2] = force.iter().fold([0.0, 0.0], |acc, f| [acc[0] + f[0], acc[1] + f[1]]);
        let scale: f64 = force.iter().map(|f| f[0].abs() + f[1].abs()).sum();
        assert!(net[0].abs() / scale < 1e-12 && net[1].abs() / scale < 1e-12);
    }

    #[test]
    fn fa2_unfolds_a_grid() {
        let g = gen_grid(6, 6).unwrap();
        let cfg = EngineConfig::new(EngineKind::Fa2);
        let best = best_of_k(&g, &cfg, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(count_crossings(&g, &best.coords).unwrap(), 0);
    }

    #[test]
    fn sm_single_edge_hits_target_length() {
        let mut g = Graph::new(2);
        g.add_edge(0, 1, 1.0, false).unwrap();
        let out = stress_majorization(&g, &random_layout(2, 1), &SmParams::default()).unwrap();
        let dx = out.coords[0][0] - out.coords[1][0];
        let dy = out.coords[0][1] - out.coords[1][1];
        assert!(((dx * dx + dy * dy).sqrt() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sm_path_graph_reaches_zero_stress() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 1.0, false).unwrap();
        g.add_edge(1, 2, 1.0, false).unwrap();
        let (_, trace) =
            stress_majorization_trace(&g, &random_layout(3, 4), &SmParams { tolerance: 1e-15, ..Default::default() })
                .unwrap();
        // SMACOF converges linearly, so "zero" means tiny relative to the
        // initial stress rather than machine epsilon
        assert!(
            *trace.last().unwrap() < 1e-5 * trace[0].max(1.0),
            "final stress {}",
            trace.last().unwrap()
        );
    }

    #[test]
    fn sm_stress_is_monotone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut runs = 0;
        while runs < 20 {
            let n = rng.gen_range(5..15);
            let mut g = Graph::new(n);
            for u in 0..n {
                for v in (u + 1)..n {
                    if rng.gen_bool(0.3) {
                        g.add_edge(u, v, rng.gen_range(0.5..3.0), false).unwrap();
                    }
                }
            }
            if !g.is_connected() {
                continue;
            }
            runs += 1;
            let (_, trace) = stress_majorization_trace(
                &g,
                &random_layout(n, runs),
                &SmParams { iterations: 300, ..Default::default() },
            )
            .unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "stress rose: {} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn best_of_k_is_min_over_runs() {
        let g = augment(&gen_grid(5, 5).unwrap(), 0.1, 8).unwrap();
        let cfg = EngineConfig {
            fa2: Fa2Params { iterations: 300, ..Default::default() },
            ..EngineConfig::new(EngineKind::Fa2)
        };
        let seeds = [0, 1, 2];
        let counts: Vec<usize> = seeds
            .iter()
            .map(|&s| {
                let l = run_engine(&g, &cfg, s).unwrap();
                count_crossings(&g, &l.coords).unwrap()
            })
            .collect();
        let best = best_of_k(&g, &cfg, &seeds).unwrap();
        let best_nc = count_crossings(&g, &best.coords).unwrap();
        assert_eq!(best_nc, *counts.iter().min().unwrap());

        let single = best_of_k(&g, &cfg, &[1]).unwrap();
        let again = run_engine(&g, &cfg, 1).unwrap();
        assert_eq!(single.coords, again.coords);
    }

    #[test]
    fn engines_commute_with_node_relabeling() {
        // permuted input, same seed, compare permuted outputs; short runs
        // keep float noise below tolerance
        let mut g = Graph::new(5);
        for (u, v) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3)] {
            g.add_edge(u, v, 1.0, false).unwrap();
        }
        let perm = [2usize, 0, 4, 1, 3];
        let mut pg = Graph::new(5);
        for e in g.edges() {
            pg.add_edge(perm[e.u], perm[e.v], e.weight, false).unwrap();
        }
        let init = random_layout(5, 6);
        let mut pinit = init.clone();
        for (i, &p) in perm.iter().enumerate() {
            pinit.coords[p] = init.coords[i];
        }

        let sm_a = stress_majorization(&g, &init, &SmParams { iterations: 200, ..Default::default() }).unwrap();
        let sm_b = stress_majorization(&pg, &pinit, &SmParams { iterations: 200, ..Default::default() }).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert!((sm_a.coords[i][0] - sm_b.coords[p][0]).abs() < 1e-6);
            assert!((sm_a.coords[i][1] - sm_b.coords[p][1]).abs() < 1e-6);
        }

        let fa_p = Fa2Params { iterations: 50, ..Default::default() };
        let fa_a = fa2(&g, &init, &fa_p).unwrap();
        let fa_b = fa2(&pg, &pinit, &fa_p).unwrap();
        for (i, &p) in perm.iter().enumerate() {
            assert!((fa_a.coords[i][0] - fa_b.coords[p][0]).abs() < 1e-6);
            assert!((fa_a.coords[i][1] - fa_b.coords[p][1]).abs() < 1e-6);
        }
    }

    #[test]
    fn suite_variant_lists() {
        let g = gen_grid(4, 4).unwrap();
        let aug = augment(&g, 0.1, 5).unwrap();
        let cfg = EngineConfig {
            fa2: Fa2Params { iterations: 100, ..Default::default() },
            ..EngineConfig::new(EngineKind::Fa2)
        };
        let wp = WeightingParams::default();

        let suite = layout_suite(&g, Some(&aug), &cfg, &wp, &[0, 1]).unwrap();
        assert_eq!(suite.len(), 7);
        let orig = &suite.iter().find(|(v, _)| *v == Variant::Orig).unwrap().1;
        let on_top = &suite.iter().find(|(v, _)| *v == Variant::OnTop).unwrap().1;
        assert_eq!(orig.coords, on_top.coords);
        assert!(
            crate::metrics::procrustes_statistic(&orig.coords, &on_top.coords).unwrap() < 1e-12
        );
        for (_, l) in &suite {
            assert!(l.coords.iter().all(|c| c[0].is_finite() && c[1].is_finite()));
        }

        let suite = layout_suite(&g, None, &cfg, &wp, &[0]).unwrap();
        assert_eq!(suite.len(), 5);
        assert!(!suite.iter().any(|(v, _)| *v == Variant::OnTop || *v == Variant::Redraw));
    }

    #[test]
    fn layout_text_round_trip() {
        let l = random_layout(7, 3);
        let text = l.to_text("orig");
        assert!(text.starts_with("# random orig 3 0\n7\n"));
        let back = Layout::from_text(&text).unwrap();
        assert_eq!(back.coords.len(), 7);
        for (a, b) in l.coords.iter().zip(&back.coords) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }
}

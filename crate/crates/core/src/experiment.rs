//! End-to-end experiment orchestration: generate datasets, lay out the
//! variant suites, evaluate metrics, and compare variants with Wilcoxon
//! tests. Every stage is a pure function of the config file: all
//! randomness is derived from the config seed, and output files are
//! byte-identical across reruns.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::gen::{self, GenError};
use crate::graph::{Graph, GraphError};
use crate::iforest::ForestParams;
use crate::layout::{
    applicable_variants, layout_suite, EngineConfig, EngineKind, Fa2Params, Layout, LayoutError,
    SmParams, Variant,
};
use crate::metrics::{self, MetricError};
use crate::render::{render_svg, RenderError, RenderOptions};
use crate::stats::{self, StatsError};
use crate::weighting::WeightingParams;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing layout file {0}")]
    MissingLayout(PathBuf),
    #[error("incomplete records: {0}")]
    IncompleteRecords(String),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Render(#[from] RenderError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io { path: path.to_path_buf(), source }
}

// ---------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed; every other seed is derived from it.
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    pub engines: Vec<String>,
    #[serde(default)]
    pub heuristic: HeuristicConfig,
    pub datasets: Vec<DatasetConfig>,
}

fn default_restarts() -> usize {
    5
}

fn default_iterations() -> usize {
    2000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeuristicConfig {
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_trees")]
    pub trees: usize,
    #[serde(default = "default_subsample")]
    pub subsample: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_k() -> usize {
    4
}

fn default_trees() -> usize {
    100
}

fn default_subsample() -> usize {
    256
}

fn default_threshold() -> f64 {
    0.5
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            k: default_k(),
            trees: default_trees(),
            subsample: default_subsample(),
            threshold: default_threshold(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    /// grid | triangulation | deep | rome
    pub family: String,
    #[serde(default)]
    pub count: usize,
    /// Grid: rows/cols range. Triangulation/deep: node-count range.
    #[serde(default)]
    pub min_size: usize,
    #[serde(default)]
    pub max_size: usize,
    #[serde(default)]
    pub augment_fraction: f64,
    /// Rome family: explicit graph files.
    #[serde(default)]
    pub files: Vec<String>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml(&text)
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if self.engines.is_empty() {
            return Err(ExperimentError::Config("no engines listed".into()));
        }
        for e in &self.engines {
            if e != "fa2" && e != "sm" {
                return Err(ExperimentError::Config(format!("unknown engine {e}")));
            }
        }
        if self.restarts == 0 {
            return Err(ExperimentError::Config("restarts must be >= 1".into()));
        }
        for d in &self.datasets {
            match d.family.as_str() {
                "grid" | "triangulation" | "deep" => {
                    if d.count == 0 {
                        return Err(ExperimentError::Config(format!(
                            "dataset {}: count must be >= 1",
                            d.name
                        )));
                    }
                    if d.min_size < 2 || d.max_size < d.min_size {
                        return Err(ExperimentError::Config(format!(
                            "dataset {}: bad size range",
                            d.name
                        )));
                    }
                }
                "rome" => {
                    if d.files.is_empty() {
                        return Err(ExperimentError::Config(format!(
                            "dataset {}: rome family needs explicit files",
                            d.name
                        )));
                    }
                }
                other => {
                    return Err(ExperimentError::Config(format!("unknown family {other}")));
                }
            }
        }
        Ok(())
    }

    pub fn engine_config(&self, name: &str) -> EngineConfig {
        let kind = if name == "sm" { EngineKind::Sm } else { EngineKind::Fa2 };
        EngineConfig {
            kind,
            fa2: Fa2Params { iterations: self.iterations, ..Default::default() },
            sm: SmParams { iterations: self.iterations, ..Default::default() },
        }
    }

    pub fn weighting_params(&self, forest_seed: u64) -> WeightingParams {
        WeightingParams {
            k: self.heuristic.k,
            aggregate: crate::weighting::Aggregate::Min,
            forest: ForestParams {
                trees: self.heuristic.trees,
                subsample: self.heuristic.subsample,
                threshold: self.heuristic.threshold,
                seed: forest_seed,
            },
        }
    }
}

/// Stable seed derivation: fold path components into the master seed
/// with a splitmix64 step per component.
pub fn derive_seed(base: u64, parts: &[&str]) -> u64 {
    let mut z = base;
    for part in parts {
        for &b in part.as_bytes() {
            z = z.wrapping_add(b as u64).wrapping_mul(0x9e3779b97f4a7c15);
        }
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

// ---------------------------------------------------------------------
// Generate
// ---------------------------------------------------------------------

fn graph_id(idx: usize) -> String {
    format!("g{idx:03}")
}

fn dataset_has_augmented(d: &DatasetConfig) -> bool {
    matches!(d.family.as_str(), "grid" | "triangulation") && d.augment_fraction > 0.0
}

fn write_if_changed(path: &Path, content: &str) -> Result<(), ExperimentError> {
    if let Ok(existing) = fs::read_to_string(path) {
        if existing == content {
            return Ok(());
        }
    }
    fs::write(path, content).map_err(io_err(path))
}

/// Generate every dataset into `<out>/graphs/<dataset>/`, with a
/// manifest line per graph.
pub fn cmd_generate(config: &ExperimentConfig, out: &Path) -> Result<(), ExperimentError> {
    for d in &config.datasets {
        let dir = out.join("graphs").join(&d.name);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let mut manifest = String::from("# id family params seed file aug_file\n");

        let count = if d.family == "rome" { d.files.len() } else { d.count };
        for idx in 0..count {
            let id = graph_id(idx);
            let seed = derive_seed(config.seed, &["generate", &d.name, &id]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (graph, params) = match d.family.as_str() {
                "grid" => {
                    let rows = rng.gen_range(d.min_size..=d.max_size);
                    let cols = rng.gen_range(d.min_size..=d.max_size);
                    (gen::gen_grid(rows, cols)?, format!("rows={rows},cols={cols}"))
                }
                "triangulation" => {
                    let n = rng.gen_range(d.min_size..=d.max_size);
                    let (g, _) = gen::gen_triangulation(n, rng.gen())?;
                    (g, format!("n={n}"))
                }
                "deep" => {
                    let n = rng.gen_range(d.min_size..=d.max_size);
                    let (g, _) = gen::gen_deep_triangulation(n, rng.gen())?;
                    (g, format!("n={n}"))
                }
                "rome" => {
                    let src = Path::new(&d.files[idx]);
                    let text = fs::read_to_string(src).map_err(io_err(src))?;
                    (Graph::from_text(&text)?, format!("src={}", d.files[idx]))
                }
                _ => unreachable!("validated"),
            };

            let file = format!("{id}.txt");
            write_if_changed(&dir.join(&file), &graph.to_text())?;

            let aug_file = if dataset_has_augmented(d) {
                let aug_seed = derive_seed(config.seed, &["augment", &d.name, &id]);
                let aug = gen::augment(&graph, d.augment_fraction, aug_seed)?;
                let name = format!("{id}_aug.txt");
                write_if_changed(&dir.join(&name), &aug.to_text())?;
                name
            } else {
                "-".to_string()
            };

            manifest.push_str(&format!(
                "{id} {} {params} {seed} {file} {aug_file}\n",
                d.family
            ));
        }
        write_if_changed(&dir.join("manifest.txt"), &manifest)?;
    }
    Ok(())
}

fn load_graph(path: &Path) -> Result<Graph, ExperimentError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(Graph::from_text(&text)?)
}

fn dataset_graphs(
    config: &ExperimentConfig,
    out: &Path,
    d: &DatasetConfig,
) -> Result<Vec<(String, Graph, Option<Graph>)>, ExperimentError> {
    let dir = out.join("graphs").join(&d.name);
    let count = if d.family == "rome" { d.files.len() } else { d.count };
    let _ = config;
    (0..count)
        .map(|idx| {
            let id = graph_id(idx);
            let g = load_graph(&dir.join(format!("{id}.txt")))?;
            let aug = if dataset_has_augmented(d) {
                Some(load_graph(&dir.join(format!("{id}_aug.txt")))?)
            } else {
                None
            };
            Ok((id, g, aug))
        })
        .collect()
}

// ---------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------

fn layout_path(out: &Path, dataset: &str, id: &str, engine: &str, variant: Variant) -> PathBuf {
    out.join("layouts")
        .join(dataset)
        .join(format!("{id}__{engine}__{}.txt", variant.name()))
}

/// Compute the variant suite for every (graph, engine) pair and write
/// the layout files. Existing files are reused when `resume` is set.
pub fn cmd_layout(config: &ExperimentConfig, out: &Path, resume: bool) -> Result<(), ExperimentError> {
    for d in &config.datasets {
        let dir = out.join("layouts").join(&d.name);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let graphs = dataset_graphs(config, out, d)?;
        let variants = applicable_variants(dataset_has_augmented(d));

        let mut work: Vec<(&str, &(String, Graph, Option<Graph>))> = Vec::new();
        for engine in &config.engines {
            for item in &graphs {
                work.push((engine, item));
            }
        }

        work.par_iter()
            .map(|(engine, (id, g, aug))| -> Result<(), ExperimentError> {
                if resume
                    && variants
                        .iter()
                        .all(|&v| layout_path(out, &d.name, id, engine, v).exists())
                {
                    return Ok(());
                }
                let cfg = config.engine_config(engine);
                let forest_seed = derive_seed(config.seed, &["forest", &d.name, id]);
                let wp = config.weighting_params(forest_seed);
                let restart_base = derive_seed(config.seed, &["restart", &d.name, id, engine]);
                let seeds: Vec<u64> =
                    (0..config.restarts as u64).map(|i| restart_base.wrapping_add(i)).collect();
                let suite = layout_suite(g, aug.as_ref(), &cfg, &wp, &seeds)?;
                for (variant, layout) in suite {
                    let path = layout_path(out, &d.name, id, engine, variant);
                    write_if_changed(&path, &layout.to_text(variant.name()))?;
                }
                Ok(())
            })
            .collect::<Result<Vec<()>, _>>()?;
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Evaluate
// ---------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub dataset: String,
    pub graph_id: String,
    pub engine: String,
    pub variant: Variant,
    pub nc: usize,
    pub ang_res: Option<f64>,
    pub cros_res: Option<f64>,
    pub ps: Option<f64>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.9}")).unwrap_or_default()
}

pub fn records_to_csv(records: &[Record]) -> String {
    let mut out = String::from("dataset,graph_id,engine,variant,nc,ang_res,cros_res,ps\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.dataset,
            r.graph_id,
            r.engine,
            r.variant.name(),
            r.nc,
            fmt_opt(r.ang_res),
            fmt_opt(r.cros_res),
            fmt_opt(r.ps),
        ));
    }
    out
}

pub fn records_from_csv(text: &str) -> Result<Vec<Record>, ExperimentError> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(ExperimentError::IncompleteRecords(format!(
                "line {}: expected 8 fields",
                i + 1
            )));
        }
        let parse_opt = |s: &str| -> Option<f64> {
            if s.is_empty() { None } else { s.parse().ok() }
        };
        records.push(Record {
            dataset: fields[0].into(),
            graph_id: fields[1].into(),
            engine: fields[2].into(),
            variant: Variant::parse(fields[3]).ok_or_else(|| {
                ExperimentError::IncompleteRecords(format!("unknown variant {}", fields[3]))
            })?,
            nc: fields[4].parse().map_err(|_| {
                ExperimentError::IncompleteRecords(format!("bad nc on line {}", i + 1))
            })?,
            ang_res: parse_opt(fields[5]),
            cros_res: parse_opt(fields[6]),
            ps: parse_opt(fields[7]),
        });
    }
    Ok(records)
}

/// Evaluate every layout against the right graph and reference; returns
/// the full record grid and writes `records.csv`.
pub fn cmd_evaluate(config: &ExperimentConfig, out: &Path) -> Result<Vec<Record>, ExperimentError> {
    let mut records = Vec::new();
    for d in &config.datasets {
        let graphs = dataset_graphs(config, out, d)?;
        let variants = applicable_variants(dataset_has_augmented(d));
        for engine in &config.engines {
            for (id, g, aug) in &graphs {
                let orig_path = layout_path(out, &d.name, id, engine, Variant::Orig);
                if !orig_path.exists() {
                    return Err(ExperimentError::MissingLayout(orig_path));
                }
                let orig =
                    Layout::from_text(&fs::read_to_string(&orig_path).map_err(io_err(&orig_path))?)?;
                for &variant in &variants {
                    let path = layout_path(out, &d.name, id, engine, variant);
                    if !path.exists() {
                        return Err(ExperimentError::MissingLayout(path));
                    }
                    let layout =
                        Layout::from_text(&fs::read_to_string(&path).map_err(io_err(&path))?)?;
                    // orig is measured on the planar graph; every other
                    // variant against the augmented graph when present
                    let eval_graph = match (variant, aug) {
                        (Variant::Orig, _) => g,
                        (_, Some(aug)) => aug,
                        (_, None) => g,
                    };
                    let nc = metrics::count_crossings(eval_graph, &layout.coords)?;
                    let ang_res = metrics::angular_resolution(eval_graph, &layout.coords).ok();
                    let cros_res = metrics::crossing_resolution(eval_graph, &layout.coords)?;
                    let ps = if variant == Variant::Orig {
                        None
                    } else {
                        Some(metrics::procrustes_statistic(&orig.coords, &layout.coords)?)
                    };
                    records.push(Record {
                        dataset: d.name.clone(),
                        graph_id: id.clone(),
                        engine: engine.clone(),
                        variant,
                        nc,
                        ang_res,
                        cros_res,
                        ps,
                    });
                }
            }
        }
    }
    let path = out.join("records.csv");
    write_if_changed(&path, &records_to_csv(&records))?;
    Ok(records)
}

// ---------------------------------------------------------------------
// Compare
// ---------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Comparison {
    pub dataset: String,
    pub engine: String,
    pub metric: String,
    pub variant_a: Variant,
    pub variant_b: Variant,
    pub median_a: f64,
    pub median_b: f64,
    pub w: f64,
    pub p: f64,
    pub significant: bool,
}

pub fn comparisons_to_csv(comparisons: &[Comparison]) -> String {
    let mut out =
        String::from("dataset,engine,metric,variant_a,variant_b,median_a,median_b,W,p,significant\n");
    for c in comparisons {
        out.push_str(&format!(
            "{},{},{},{},{},{:.9},{:.9},{},{:.9},{}\n",
            c.dataset,
            c.engine,
            c.metric,
            c.variant_a.name(),
            c.variant_b.name(),
            c.median_a,
            c.median_b,
            c.w,
            c.p,
            if c.significant { "yes" } else { "no" }
        ));
    }
    out
}

fn metric_value(r: &Record, metric: &str) -> Option<f64> {
    match metric {
        "nc" => Some(r.nc as f64),
        "ang_res" => r.ang_res,
        "cros_res" => r.cros_res,
        "ps" => r.ps,
        _ => None,
    }
}

/// Per dataset/engine/metric: each heuristic variant against the
/// baseline (redraw when augmented versions exist, orig otherwise).
pub fn cmd_compare(
    config: &ExperimentConfig,
    records: &[Record],
    out: &Path,
) -> Result<Vec<Comparison>, ExperimentError> {
    let mut comparisons = Vec::new();
    for d in &config.datasets {
        let baseline = if dataset_has_augmented(d) { Variant::Redraw } else { Variant::Orig };
        for engine in &config.engines {
            for metric in ["nc", "ang_res", "cros_res", "ps"] {
                for variant in [Variant::HMin, Variant::HMax, Variant::HMean, Variant::HNb] {
                    let mut xs = Vec::new();
                    let mut ys = Vec::new();
                    let count = if d.family == "rome" { d.files.len() } else { d.count };
                    for idx in 0..count {
                        let id = graph_id(idx);
                        let find = |v: Variant| {
                            records.iter().find(|r| {
                                r.dataset == d.name
                                    && r.graph_id == id
                                    && &r.engine == engine
                                    && r.variant == v
                            })
                        };
                        let (a, b) = match (find(variant), find(baseline)) {
                            (Some(a), Some(b)) => (a, b),
                            _ => {
                                return Err(ExperimentError::IncompleteRecords(format!(
                                    "{}/{}/{} missing {} or {}",
                                    d.name,
                                    engine,
                                    id,
                                    variant.name(),
                                    baseline.name()
                                )))
                            }
                        };
                        if let (Some(x), Some(y)) = (metric_value(a, metric), metric_value(b, metric)) {
                            xs.push(x);
                            ys.push(y);
                        }
                    }
                    if xs.is_empty() {
                        continue;
                    }
                    let (w, p) = match stats::wilcoxon_signed_rank(&xs, &ys) {
                        Ok(r) => (r.statistic, r.p_two_sided),
                        Err(StatsError::AllZeroDifferences) => (0.0, 1.0),
                        Err(e) => return Err(e.into()),
                    };
                    comparisons.push(Comparison {
                        dataset: d.name.clone(),
                        engine: engine.clone(),
                        metric: metric.into(),
                        variant_a: variant,
                        variant_b: baseline,
                        median_a: stats::median(&xs)?,
                        median_b: stats::median(&ys)?,
                        w,
                        p,
                        significant: p < 0.05,
                    });
                }
            }
        }
    }
    let path = out.join("compare.csv");
    write_if_changed(&path, &comparisons_to_csv(&comparisons))?;
    Ok(comparisons)
}

// ---------------------------------------------------------------------
// Render + pipeline
// ---------------------------------------------------------------------

/// Render one (graph file, layout file) pair to SVG.
pub fn cmd_render(
    graph_file: &Path,
    layout_file: &Path,
    out_file: &Path,
) -> Result<(), ExperimentError> {
    let g = load_graph(graph_file)?;
    let layout =
        Layout::from_text(&fs::read_to_string(layout_file).map_err(io_err(layout_file))?)?;
    let svg = render_svg(&g, &layout, &RenderOptions::default())?;
    if let Some(parent) = out_file.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    write_if_changed(out_file, &svg)
}

/// Full pipeline: generate, layout, evaluate, compare, and render a
/// summary panel (the first graph of each dataset, every variant).
pub fn cmd_pipeline(config: &ExperimentConfig, out: &Path, resume: bool) -> Result<(), ExperimentError> {
    let mut timings = String::from("stage seconds\n");
    let mut timed = |name: &str, t: Instant| {
        timings.push_str(&format!("{name} {:.3}\n", t.elapsed().as_secs_f64()));
    };

    let t = Instant::now();
    cmd_generate(config, out)?;
    timed("generate", t);

    let t = Instant::now();
    cmd_layout(config, out, resume)?;
    timed("layout", t);

    let t = Instant::now();
    let records = cmd_evaluate(config, out)?;
    timed("evaluate", t);

    let t = Instant::now();
    cmd_compare(config, &records, out)?;
    timed("compare", t);

    let t = Instant::now();
    for d in &config.datasets {
        let variants = applicable_variants(dataset_has_augmented(d));
        let id = graph_id(0);
        for engine in &config.engines {
            for &variant in &variants {
                let suffix = if variant == Variant::Orig { "" } else { "_aug" };
                let graph_file = if dataset_has_augmented(d) {
                    out.join("graphs").join(&d.name).join(format!("{id}{suffix}.txt"))
                } else {
                    out.join("graphs").join(&d.name).join(format!("{id}.txt"))
                };
                let layout_file = layout_path(out, &d.name, &id, engine, variant);
                let svg = out
                    .join("renders")
                    .join(format!("{}__{id}__{engine}__{}.svg", d.name, variant.name()));
                cmd_render(&graph_file, &layout_file, &svg)?;
            }
        }
    }
    timed("render", t);

    let path = out.join("timings.txt");
    let mut file = fs::File::create(&path).map_err(io_err(&path))?;
    file.write_all(timings.as_bytes()).map_err(io_err(&path))?;
    Ok(())
}

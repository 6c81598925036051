//! Pruning-and-refining driver.
//!
//! A run computes core labels once, prunes the graph to the core implied by
//! the resulting density lower bound, then repeats refinement iterations.
//! Whenever an iteration finds a denser suffix, the lower bound rises to
//! that density and the graph is cut down to the matching core again. Loads
//! of surviving vertices carry over across prunes.

use std::io::{self, Write};
use std::sync::Arc;
use std::time::Instant;

use crate::core_decomp::{approx_coreness, exact_coreness, CoreDecomposition, CoreKind};
use crate::density::Density;
use crate::error::RunError;
use crate::graph::Graph;
use crate::refine::{
    density_and_load_update, density_and_load_update_detailed, load_peel_order, load_sort_order,
    LoadState, RefineOutcome, VertexOrdering,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// Batched load-peeling order.
    Greedy,
    /// Sort by load.
    Sorting,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Sorting => "sorting",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pruning {
    None,
    Exact,
    Approx,
    /// Approximate labels to shrink the graph, then exact labels on what is left.
    Hybrid,
}

impl Pruning {
    pub fn name(&self) -> &'static str {
        match self {
            Pruning::None => "none",
            Pruning::Exact => "exact",
            Pruning::Approx => "approx",
            Pruning::Hybrid => "hybrid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceLevel {
    Iterations,
    /// Also keep every suffix density of every iteration.
    Positions,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub pruning: Pruning,
    /// Fixed iteration count; `None` derives one from `epsilon`.
    pub iterations: Option<usize>,
    pub epsilon: f64,
    pub iteration_cap: usize,
    pub approx_factor: f64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
    pub reset_loads: bool,
    pub trace: TraceLevel,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: Algorithm::Greedy,
            pruning: Pruning::Exact,
            iterations: Some(20),
            epsilon: 0.1,
            iteration_cap: 1000,
            approx_factor: 1.5,
            threads: None,
            reset_loads: false,
            trace: TraceLevel::Iterations,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), RunError> {
        if self.iterations == Some(0) {
            return Err(RunError::Config("iteration count must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(RunError::Config(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.approx_factor.is_nan() || self.approx_factor <= 1.0 || self.approx_factor.is_infinite() {
            return Err(RunError::Config(format!(
                "approximation factor must be > 1, got {}",
                self.approx_factor
            )));
        }
        if self.threads == Some(0) {
            return Err(RunError::Config("thread count must be at least 1".into()));
        }
        if self.iteration_cap == 0 {
            return Err(RunError::Config("iteration cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitRecord {
    pub input_n: usize,
    pub input_m: usize,
    pub core_kind: Option<CoreKind>,
    /// Largest core label used for pruning (exact `kmax`, or the largest
    /// approximate label under approximate-only pruning).
    pub kmax: Option<u32>,
    pub peel_rounds: Option<usize>,
    /// Integer density lower bound the initial prune used.
    pub lower_bound: u64,
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    /// 1-based iteration number.
    pub iter: usize,
    /// Best suffix density found by this iteration alone.
    pub density: Density,
    /// Best density found so far.
    pub best: Density,
    /// Size of the graph this iteration refined.
    pub n: usize,
    pub m: usize,
    pub width: u64,
    pub ms: f64,
    pub positions: Option<Vec<Density>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub init: InitRecord,
    pub iterations: Vec<IterationRecord>,
    /// Graph size after the last prune.
    pub final_n: usize,
    pub final_m: usize,
    pub total_ms: f64,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub best_density: Density,
    /// Original ids of the densest subgraph found, ascending.
    pub witness: Vec<u64>,
    pub witness_edges: usize,
    pub trace: RunTrace,
}

/// What an observer sees after each iteration.
pub struct IterationView<'a> {
    pub iter: usize,
    pub graph: &'a Graph,
    pub order: &'a VertexOrdering,
    pub loads_before: &'a LoadState,
    pub loads_after: &'a LoadState,
    pub outcome: &'a RefineOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthReport {
    pub per_iteration: Vec<u64>,
    pub max: u64,
}

/// Iteration count `max(10, ceil((max_degree / lower_bound) * ln(n) / eps^2))`,
/// capped at `cap`.
pub fn default_iterations(max_degree: u64, lower_bound: f64, n: f64, epsilon: f64, cap: usize) -> usize {
    let lower_bound = lower_bound.max(1.0);
    let raw = (max_degree as f64 / lower_bound) * n.max(1.0).ln() / (epsilon * epsilon);
    // Tolerate float noise such as ln(e^2) = 2.0000000000000004.
    let t = (raw - 1e-9).ceil().max(0.0);
    let t = if t >= cap as f64 { cap } else { t as usize };
    t.max(10).min(cap)
}

pub fn measure_width(trace: &RunTrace) -> WidthReport {
    let per_iteration: Vec<u64> = trace.iterations.iter().map(|r| r.width).collect();
    WidthReport {
        max: per_iteration.iter().copied().max().unwrap_or(0),
        per_iteration,
    }
}

pub fn run(g: &Graph, cfg: &RunConfig) -> Result<RunResult, RunError> {
    run_with_observer(g, cfg, None)
}

pub fn run_with_observer(
    g: &Graph,
    cfg: &RunConfig,
    observer: Option<&mut (dyn FnMut(&IterationView<'_>) + Send)>,
) -> Result<RunResult, RunError> {
    cfg.validate()?;
    if g.is_empty() {
        return Err(RunError::Config("input graph is empty".into()));
    }
    match cfg.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| RunError::ThreadPool(e.to_string()))?;
            pool.install(|| run_inner(g, cfg, observer))
        }
        None => run_inner(g, cfg, observer),
    }
}

struct Best {
    density: Density,
    graph: Arc<Graph>,
    order: VertexOrdering,
    start: usize,
}

fn prune(g: &Graph, labels: &CoreDecomposition, cut: u64) -> (Graph, Vec<u32>) {
    let keep: Vec<bool> = labels.labels().iter().map(|&l| l as u64 >= cut).collect();
    g.induced_subgraph_with_map(&keep)
}

fn run_inner(
    g: &Graph,
    cfg: &RunConfig,
    mut observer: Option<&mut (dyn FnMut(&IterationView<'_>) + Send)>,
) -> Result<RunResult, RunError> {
    let started = Instant::now();

    // Initial pruning.
    let (cur, labels, threshold) = match cfg.pruning {
        Pruning::None => (g.clone(), None, 0),
        Pruning::Exact => {
            let dec = exact_coreness(g)?;
            let t = dec.density_lower_bound();
            let (h, parent) = prune(g, &dec, t);
            (h, Some(dec.restrict(&parent)), t)
        }
        Pruning::Approx => {
            let dec = approx_coreness(g, cfg.approx_factor)?;
            let t = dec.density_lower_bound();
            let (h, parent) = prune(g, &dec, dec.keep_threshold(t));
            (h, Some(dec.restrict(&parent)), t)
        }
        Pruning::Hybrid => {
            let apx = approx_coreness(g, cfg.approx_factor)?;
            let ta = apx.density_lower_bound();
            let (h, _) = prune(g, &apx, apx.keep_threshold(ta));
            if h.is_empty() {
                return Err(RunError::Invariant("approximate pruning removed every vertex".into()));
            }
            let dec = exact_coreness(&h)?;
            let t = ta.max(dec.density_lower_bound());
            let (h2, parent) = prune(&h, &dec, t);
            (h2, Some(dec.restrict(&parent)), t)
        }
    };
    if cur.is_empty() {
        return Err(RunError::Invariant("initial pruning removed every vertex".into()));
    }
    let init = InitRecord {
        input_n: g.n(),
        input_m: g.m(),
        core_kind: labels.as_ref().map(|d| d.kind()),
        kmax: labels.as_ref().map(|d| d.kmax()),
        peel_rounds: labels.as_ref().map(|d| d.peel_rounds()),
        lower_bound: threshold,
        n: cur.n(),
        m: cur.m(),
        max_degree: cur.max_degree(),
        ms: ms_since(started),
    };

    let iterations = cfg.iterations.unwrap_or_else(|| {
        default_iterations(
            init.max_degree as u64,
            threshold as f64,
            init.n as f64,
            cfg.epsilon,
            cfg.iteration_cap,
        )
    });

    let mut cur = Arc::new(cur);
    let mut labels = labels;
    let mut threshold = threshold;
    let mut label_cut = labels.as_ref().map_or(0, |d| d.keep_threshold(threshold));
    let mut loads = LoadState::zeros(cur.n());
    let mut best: Option<Best> = None;
    let mut records = Vec::with_capacity(iterations);

    for iter in 1..=iterations {
        let t0 = Instant::now();
        let order = match cfg.algorithm {
            Algorithm::Greedy => load_peel_order(&cur, &loads),
            Algorithm::Sorting => load_sort_order(&loads),
        };
        let loads_before = observer.as_ref().map(|_| loads.clone());
        let outcome = match cfg.trace {
            TraceLevel::Iterations => density_and_load_update(&cur, &order, &mut loads)?,
            TraceLevel::Positions => density_and_load_update_detailed(&cur, &order, &mut loads)?,
        };
        if let (Some(obs), Some(before)) = (observer.as_mut(), loads_before.as_ref()) {
            obs(&IterationView {
                iter,
                graph: &cur,
                order: &order,
                loads_before: before,
                loads_after: &loads,
                outcome: &outcome,
            });
        }

        let (n_here, m_here) = (cur.n(), cur.m());
        let improved = best.as_ref().is_none_or(|b| outcome.rho_max > b.density);
        if improved {
            best = Some(Best {
                density: outcome.rho_max,
                graph: Arc::clone(&cur),
                order,
                start: outcome.best_prefix,
            });
            if let Some(dec) = labels.as_ref() {
                let raised = threshold.max(outcome.rho_max.ceil());
                if raised > threshold {
                    threshold = raised;
                    let cut = dec.keep_threshold(threshold);
                    if cut > label_cut {
                        let (h, parent) = prune(&cur, dec, cut);
                        if h.is_empty() {
                            return Err(RunError::Invariant(format!(
                                "pruning to threshold {threshold} removed every vertex"
                            )));
                        }
                        loads = if cfg.reset_loads {
                            LoadState::zeros(h.n())
                        } else {
                            loads.restrict(&parent)
                        };
                        labels = Some(dec.restrict(&parent));
                        cur = Arc::new(h);
                        label_cut = cut;
                    }
                }
            }
        }

        records.push(IterationRecord {
            iter,
            density: outcome.rho_max,
            best: best.as_ref().expect("set on first iteration").density,
            n: n_here,
            m: m_here,
            width: outcome.width,
            ms: ms_since(t0),
            positions: outcome.densities,
        });
    }

    let best = best.expect("at least one iteration");
    let suffix = best.order.suffix(best.start);
    let witness_edges = best.graph.induced_edge_count(suffix);
    if witness_edges as u64 != best.density.edges() || suffix.len() as u64 != best.density.verts() {
        return Err(RunError::Invariant(format!(
            "witness has {} vertices / {} edges but density {}/{} was reported",
            suffix.len(),
            witness_edges,
            best.density.edges(),
            best.density.verts()
        )));
    }
    let mut witness: Vec<u64> = suffix.iter().map(|&v| best.graph.orig_id(v)).collect();
    witness.sort_unstable();

    Ok(RunResult {
        best_density: best.density,
        witness,
        witness_edges,
        trace: RunTrace {
            init,
            iterations: records,
            final_n: cur.n(),
            final_m: cur.m(),
            total_ms: ms_since(started),
        },
    })
}

fn ms_since(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl RunTrace {
    /// `iter,density_num,density_den,density_float,n,m,width,ms`, where the
    /// density is the best found up to and including that iteration.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iter,density_num,density_den,density_float,n,m,width,ms")?;
        for r in &self.iterations {
            let (num, den) = r.best.reduced();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{:.3}",
                r.iter,
                num,
                den,
                r.best.format_fixed(6),
                r.n,
                r.m,
                r.width,
                r.ms
            )?;
        }
        w.flush()
    }

    /// `iter,position,density_num,density_den,density_float` for every
    /// recorded suffix density.
    pub fn write_positions_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iter,position,density_num,density_den,density_float")?;
        for r in &self.iterations {
            for (i, d) in r.positions.iter().flatten().enumerate() {
                let (num, den) = d.reduced();
                writeln!(w, "{},{},{},{},{}", r.iter, i, num, den, d.format_fixed(6))?;
            }
        }
        w.flush()
    }
}

impl RunResult {
    /// Machine-readable run summary. Timing fields are `init_ms` and
    /// `total_ms`; everything else is a deterministic function of the input
    /// and the configuration.
    pub fn summary_json(&self, input: &str, cfg: &RunConfig) -> serde_json::Value {
        let (num, den) = self.best_density.reduced();
        let init = &self.trace.init;
        serde_json::json!({
            "input": input,
            "config": {
                "algorithm": cfg.algorithm.name(),
                "pruning": cfg.pruning.name(),
                "iterations": cfg.iterations,
                "epsilon": cfg.epsilon,
                "approx_factor": cfg.approx_factor,
                "reset_loads": cfg.reset_loads,
            },
            "input_n": init.input_n,
            "input_m": init.input_m,
            "core_kind": match init.core_kind {
                None => serde_json::Value::Null,
                Some(CoreKind::Exact) => "exact".into(),
                Some(CoreKind::Approximate { .. }) => "approximate".into(),
            },
            "kmax": init.kmax,
            "L0": init.lower_bound,
            "pruned_n": init.n,
            "pruned_m": init.m,
            "best_density": format!("{num}/{den}"),
            "best_density_num": num,
            "best_density_den": den,
            "best_density_float": fixed_number(&self.best_density),
            "witness_size": self.witness.len(),
            "witness_edges": self.witness_edges,
            "iterations": self.trace.iterations.len(),
            "final_n": self.trace.final_n,
            "final_m": self.trace.final_m,
            "max_width": measure_width(&self.trace).max,
            "init_ms": round_ms(init.ms),
            "total_ms": round_ms(self.trace.total_ms),
        })
    }
}

/// Timing fields in [`RunResult::summary_json`].
pub const TIMING_FIELDS: [&str; 2] = ["init_ms", "total_ms"];

fn fixed_number(d: &Density) -> serde_json::Value {
    let text = d.format_fixed(6);
    serde_json::Value::Number(text.parse().expect("decimal literal"))
}

fn round_ms(ms: f64) -> serde_json::Value {
    serde_json::Value::Number(format!("{ms:.3}").parse().expect("decimal literal"))
}

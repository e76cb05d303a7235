//! The resource-assignment design space and everything needed to score a
//! point in it.
//!
//! A *coarse* genome picks, for each decision slot, indices into small
//! level tables (PE count, buffer tile depth, and optionally a dataflow
//! style). A *fine* genome carries raw `(pe, k, dataflow)` values and is
//! what local fine-tuning mutates. Both reduce to the same per-layer
//! assignment list, scored by [`assignment_cost`] under a deployment
//! scenario, a constraint, and an objective.

use serde::{Deserialize, Serialize};

use crate::cost_model::{
    self, buffer_elements, DataflowStyle, HwConstants, HwMetrics, LayerShape,
};
use crate::error::{Error, Result};
use crate::workloads::ModelDesc;

/// Discrete action tables. Search methods that work on indices (the RL
/// policy, the global baselines, the oracle) only ever see positions into
/// these tables; the tables themselves define what the indices mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionLevels {
    pub pe_values: Vec<u64>,
    pub buf_values: Vec<u64>,
}

const DEFAULT_PE_LEVELS: [u64; 12] = [1, 2, 4, 8, 12, 16, 24, 32, 40, 48, 56, 64];
const DEFAULT_BUF_LEVELS: [u64; 12] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12];

impl ActionLevels {
    pub fn new(pe_values: Vec<u64>, buf_values: Vec<u64>) -> Result<ActionLevels> {
        let levels = ActionLevels {
            pe_values,
            buf_values,
        };
        levels.validate()?;
        Ok(levels)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, values) in [("pe_values", &self.pe_values), ("buf_values", &self.buf_values)] {
            if values.is_empty() {
                return Err(Error::InvalidConfig(format!("{} must not be empty", name)));
            }
            if values[0] == 0 {
                return Err(Error::InvalidConfig(format!(
                    "{} entries must be >= 1",
                    name
                )));
            }
            if values.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidConfig(format!(
                    "{} must be strictly increasing, got {:?}",
                    name, values
                )));
            }
        }
        Ok(())
    }

    /// The standard 12-level tables: PE counts from 1 to 64, tile depths
    /// from 1 to 12.
    pub fn default_levels() -> ActionLevels {
        ActionLevels {
            pe_values: DEFAULT_PE_LEVELS.to_vec(),
            buf_values: DEFAULT_BUF_LEVELS.to_vec(),
        }
    }

    /// The first `l` entries of the default tables. Small `l` keeps toy
    /// spaces enumerable.
    pub fn truncated(l: usize) -> Result<ActionLevels> {
        if l == 0 || l > DEFAULT_PE_LEVELS.len() {
            return Err(Error::InvalidConfig(format!(
                "level count must be in 1..={}, got {}",
                DEFAULT_PE_LEVELS.len(),
                l
            )));
        }
        Ok(ActionLevels {
            pe_values: DEFAULT_PE_LEVELS[..l].to_vec(),
            buf_values: DEFAULT_BUF_LEVELS[..l].to_vec(),
        })
    }

    pub fn pe_count(&self) -> usize {
        self.pe_values.len()
    }

    pub fn buf_count(&self) -> usize {
        self.buf_values.len()
    }
}

/// How engines are provisioned for the model.
///
/// * `LayerSequential`: one shared engine runs layers back to back, so a
///   single `(dataflow, pe, buf)` triple is chosen and the engine must be
///   provisioned for its worst layer.
/// * `LayerPipelined`: each layer gets its own engine and resources are
///   consumed additively across layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deployment {
    #[serde(rename = "ls")]
    LayerSequential,
    #[serde(rename = "lp")]
    LayerPipelined,
}

impl Deployment {
    pub fn name(self) -> &'static str {
        match self {
            Deployment::LayerSequential => "ls",
            Deployment::LayerPipelined => "lp",
        }
    }

    pub fn parse(s: &str) -> Option<Deployment> {
        match s {
            "ls" => Some(Deployment::LayerSequential),
            "lp" => Some(Deployment::LayerPipelined),
            _ => None,
        }
    }
}

/// Whether the dataflow style is fixed up front or left as a third
/// per-slot decision for the search to make.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataflowChoice {
    Fixed(DataflowStyle),
    Mix,
}

impl DataflowChoice {
    pub fn name(self) -> String {
        match self {
            DataflowChoice::Fixed(df) => df.name().to_string(),
            DataflowChoice::Mix => "mix".to_string(),
        }
    }

    pub fn parse(s: &str) -> Option<DataflowChoice> {
        if s == "mix" {
            Some(DataflowChoice::Mix)
        } else {
            DataflowStyle::parse(s).map(DataflowChoice::Fixed)
        }
    }
}

/// The resource budget a design must fit in. `Area`/`Power` cap a scalar;
/// `Counts` caps raw PE and buffer-element totals. Unconstrained searches
/// use an infinite area cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintKind {
    Area(f64),
    Power(f64),
    Counts { pe: u64, buf: u64 },
}

/// A budget plus the deployment scenario that decides how per-layer
/// consumption aggregates against it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub deployment: Deployment,
}

impl ConstraintSpec {
    pub fn unconstrained(deployment: Deployment) -> ConstraintSpec {
        ConstraintSpec {
            kind: ConstraintKind::Area(f64::INFINITY),
            deployment,
        }
    }

    /// Parses the textual constraint syntax: `none`, `area:<limit>`,
    /// `power:<limit>`, or `counts:<pe>:<buf>`.
    pub fn parse(text: &str, deployment: Deployment) -> Result<ConstraintSpec> {
        let bad = || {
            Error::InvalidConfig(format!(
                "bad constraint '{}': expected none, area:<limit>, power:<limit>, or counts:<pe>:<buf>",
                text
            ))
        };
        let kind = if text == "none" {
            ConstraintKind::Area(f64::INFINITY)
        } else if let Some(rest) = text.strip_prefix("area:") {
            let v: f64 = rest.parse().map_err(|_| bad())?;
            if !(v > 0.0) {
                return Err(bad());
            }
            ConstraintKind::Area(v)
        } else if let Some(rest) = text.strip_prefix("power:") {
            let v: f64 = rest.parse().map_err(|_| bad())?;
            if !(v > 0.0) {
                return Err(bad());
            }
            ConstraintKind::Power(v)
        } else if let Some(rest) = text.strip_prefix("counts:") {
            let mut parts = rest.split(':');
            let pe: u64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .filter(|&v| v >= 1)
                .ok_or_else(bad)?;
            let buf: u64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .filter(|&v| v >= 1)
                .ok_or_else(bad)?;
            if parts.next().is_some() {
                return Err(bad());
            }
            ConstraintKind::Counts { pe, buf }
        } else {
            return Err(bad());
        };
        Ok(ConstraintSpec { kind, deployment })
    }

    /// Inverse of [`ConstraintSpec::parse`] (without the deployment).
    pub fn text(&self) -> String {
        match self.kind {
            ConstraintKind::Area(v) if v.is_infinite() => "none".to_string(),
            ConstraintKind::Area(v) => format!("area:{}", v),
            ConstraintKind::Power(v) => format!("power:{}", v),
            ConstraintKind::Counts { pe, buf } => format!("counts:{}:{}", pe, buf),
        }
    }

    pub fn is_unconstrained(&self) -> bool {
        matches!(self.kind, ConstraintKind::Area(v) if v.is_infinite())
    }
}

/// Which per-layer metric the objective reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "latency")]
    Latency,
    #[serde(rename = "energy")]
    Energy,
}

/// How per-layer metric values combine into one scalar to minimize.
/// `Sum` models total work; `Max` models the pipeline bottleneck.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Aggregation {
    #[serde(rename = "sum")]
    Sum,
    #[serde(rename = "max")]
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Objective {
    pub metric: Metric,
    pub aggregation: Aggregation,
}

impl Objective {
    pub const LATENCY_SUM: Objective = Objective {
        metric: Metric::Latency,
        aggregation: Aggregation::Sum,
    };

    /// Parses `latency:sum`, `latency:max`, `energy:sum`, `energy:max`.
    pub fn parse(text: &str) -> Result<Objective> {
        let bad = || {
            Error::InvalidConfig(format!(
                "bad objective '{}': expected <latency|energy>:<sum|max>",
                text
            ))
        };
        let (m, a) = text.split_once(':').ok_or_else(bad)?;
        let metric = match m {
            "latency" => Metric::Latency,
            "energy" => Metric::Energy,
            _ => return Err(bad()),
        };
        let aggregation = match a {
            "sum" => Aggregation::Sum,
            "max" => Aggregation::Max,
            _ => return Err(bad()),
        };
        Ok(Objective {
            metric,
            aggregation,
        })
    }

    pub fn text(&self) -> String {
        let m = match self.metric {
            Metric::Latency => "latency",
            Metric::Energy => "energy",
        };
        let a = match self.aggregation {
            Aggregation::Sum => "sum",
            Aggregation::Max => "max",
        };
        format!("{}:{}", m, a)
    }

    pub fn metric_value(&self, m: &HwMetrics) -> f64 {
        match self.metric {
            Metric::Latency => m.latency as f64,
            Metric::Energy => m.energy,
        }
    }

    pub fn aggregate(&self, per_layer: impl Iterator<Item = f64>) -> f64 {
        match self.aggregation {
            Aggregation::Sum => per_layer.sum(),
            Aggregation::Max => per_layer.fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// One coarse decision slot: indices into the level tables plus a dataflow
/// style index (always recorded, even when the style was fixed up front,
/// so a genome file fully describes its design point).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gene {
    pub pe_idx: usize,
    pub buf_idx: usize,
    pub df_idx: usize,
}

/// A coarse design point. Layer-pipelined genomes carry one gene per
/// layer; layer-sequential genomes carry exactly one shared gene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignGenome {
    pub genes: Vec<Gene>,
}

/// One fine decision slot: raw values instead of table indices. This is
/// the representation local fine-tuning perturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineGene {
    pub pe: u64,
    pub k: u64,
    pub df: DataflowStyle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineGenome {
    pub genes: Vec<FineGene>,
}

impl FineGenome {
    /// Materializes a coarse genome into value space using its tables.
    pub fn from_coarse(genome: &DesignGenome, levels: &ActionLevels) -> Result<FineGenome> {
        let mut genes = Vec::with_capacity(genome.genes.len());
        for (i, g) in genome.genes.iter().enumerate() {
            check_gene(i, g, levels)?;
            genes.push(FineGene {
                pe: levels.pe_values[g.pe_idx],
                k: levels.buf_values[g.buf_idx],
                df: DataflowStyle::from_index(g.df_idx).unwrap(),
            });
        }
        Ok(FineGenome { genes })
    }
}

/// Either genome representation, distinguishable by field names in JSON.
/// Search results carry whichever representation the method works in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GenomeRepr {
    Coarse(DesignGenome),
    Fine(FineGenome),
}

/// What a design point consumed against its budget: a scalar for area and
/// power constraints, raw totals for count constraints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Consumption {
    Scalar(f64),
    Counts { pe: u64, buf: u64 },
}

/// Scored design point: the objective value, what it consumed, and whether
/// the budget held. Infeasible points keep their value so callers can see
/// how far past the budget the optimum-ignoring-constraints lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenomeCost {
    pub value: f64,
    pub consumption: Consumption,
    pub feasible: bool,
}

/// Everything a search method needs to score genomes, bundled to keep
/// signatures flat.
#[derive(Clone, Copy)]
pub struct SearchContext<'a> {
    pub model: &'a ModelDesc,
    pub levels: &'a ActionLevels,
    pub dataflow: DataflowChoice,
    pub constraint: ConstraintSpec,
    pub objective: Objective,
    pub hw: &'a HwConstants,
}

impl<'a> SearchContext<'a> {
    /// Number of genes a genome must have under this context's scenario.
    pub fn expected_genes(&self) -> usize {
        match self.constraint.deployment {
            Deployment::LayerSequential => 1,
            Deployment::LayerPipelined => self.model.len(),
        }
    }

    /// Number of decision slots per gene (2 fixed-dataflow, 3 with mix).
    pub fn decisions_per_gene(&self) -> usize {
        match self.dataflow {
            DataflowChoice::Fixed(_) => 2,
            DataflowChoice::Mix => 3,
        }
    }
}

fn check_gene(i: usize, g: &Gene, levels: &ActionLevels) -> Result<()> {
    if g.pe_idx >= levels.pe_count() {
        return Err(Error::InvalidGene {
            layer: i,
            field: "pe",
            value: g.pe_idx,
            limit: levels.pe_count(),
        });
    }
    if g.buf_idx >= levels.buf_count() {
        return Err(Error::InvalidGene {
            layer: i,
            field: "buf",
            value: g.buf_idx,
            limit: levels.buf_count(),
        });
    }
    if g.df_idx >= DataflowStyle::ALL.len() {
        return Err(Error::InvalidGene {
            layer: i,
            field: "dataflow",
            value: g.df_idx,
            limit: DataflowStyle::ALL.len(),
        });
    }
    Ok(())
}

/// Expands a genome into one `(dataflow, pe, k)` assignment per model
/// layer, broadcasting the single shared gene under layer-sequential
/// deployment. Validates gene count and index ranges.
pub fn decode_assignments(
    ctx: &SearchContext,
    repr: &GenomeRepr,
) -> Result<Vec<(DataflowStyle, u64, u64)>> {
    let fine = match repr {
        GenomeRepr::Coarse(genome) => FineGenome::from_coarse(genome, ctx.levels)?,
        GenomeRepr::Fine(f) => f.clone(),
    };
    let expected = ctx.expected_genes();
    if fine.genes.len() != expected {
        return Err(Error::GenomeLength {
            expected,
            actual: fine.genes.len(),
        });
    }
    for (i, g) in fine.genes.iter().enumerate() {
        if g.pe == 0 || g.k == 0 {
            return Err(Error::InvalidGene {
                layer: i,
                field: if g.pe == 0 { "pe" } else { "buf" },
                value: 0,
                limit: 1,
            });
        }
    }
    let assignments = match ctx.constraint.deployment {
        Deployment::LayerSequential => {
            let g = fine.genes[0];
            vec![(g.df, g.pe, g.k); ctx.model.len()]
        }
        Deployment::LayerPipelined => fine.genes.iter().map(|g| (g.df, g.pe, g.k)).collect(),
    };
    Ok(assignments)
}

/// Scores one assignment per layer. This is the single evaluation path all
/// search methods share: objective aggregation over per-layer metrics plus
/// budget accounting under the deployment scenario.
///
/// Panics if `per_layer.len()` differs from the model's layer count; use
/// [`genome_cost`]/[`fine_cost`] for validated entry.
pub fn assignment_cost(ctx: &SearchContext, per_layer: &[(DataflowStyle, u64, u64)]) -> GenomeCost {
    assert_eq!(per_layer.len(), ctx.model.len());
    let metrics: Vec<HwMetrics> = ctx
        .model
        .layers
        .iter()
        .zip(per_layer)
        .map(|(layer, &(df, p, k))| layer_metrics(df, p, k, layer, ctx.hw))
        .collect();
    let value = ctx
        .objective
        .aggregate(metrics.iter().map(|m| ctx.objective.metric_value(m)));

    let per_engine = ctx.constraint.deployment == Deployment::LayerSequential;
    let (consumption, feasible) = match ctx.constraint.kind {
        ConstraintKind::Area(limit) => {
            let total = fold_scalar(metrics.iter().map(|m| m.area), per_engine);
            (Consumption::Scalar(total), total <= limit)
        }
        ConstraintKind::Power(limit) => {
            let total = fold_scalar(metrics.iter().map(|m| m.power), per_engine);
            (Consumption::Scalar(total), total <= limit)
        }
        ConstraintKind::Counts { pe, buf } => {
            let (used_pe, used_buf) = count_consumption(ctx, per_layer);
            (
                Consumption::Counts {
                    pe: used_pe,
                    buf: used_buf,
                },
                used_pe <= pe && used_buf <= buf,
            )
        }
    };
    GenomeCost {
        value,
        consumption,
        feasible,
    }
}

fn layer_metrics(
    df: DataflowStyle,
    p: u64,
    k: u64,
    layer: &LayerShape,
    hw: &HwConstants,
) -> HwMetrics {
    let latency = cost_model::latency(df, p, k, layer, hw);
    let energy = cost_model::energy(df, p, k, layer, hw);
    let area = cost_model::area(df, p, k, layer, hw);
    HwMetrics {
        latency,
        energy,
        area,
        power: energy / latency as f64,
    }
}

/// Layer-sequential designs are sized by their worst layer; pipelined
/// designs add up.
fn fold_scalar(values: impl Iterator<Item = f64>, per_engine: bool) -> f64 {
    if per_engine {
        values.fold(f64::NEG_INFINITY, f64::max)
    } else {
        values.sum()
    }
}

fn count_consumption(ctx: &SearchContext, per_layer: &[(DataflowStyle, u64, u64)]) -> (u64, u64) {
    match ctx.constraint.deployment {
        Deployment::LayerSequential => {
            let (df, p, k) = per_layer[0];
            let buf = ctx
                .model
                .layers
                .iter()
                .map(|l| buffer_elements(df, k, l))
                .max()
                .unwrap_or(0);
            (p, buf)
        }
        Deployment::LayerPipelined => {
            let mut pe = 0u64;
            let mut buf = 0u64;
            for (layer, &(df, p, k)) in ctx.model.layers.iter().zip(per_layer) {
                pe += p;
                buf += buffer_elements(df, k, layer);
            }
            (pe, buf)
        }
    }
}

/// Scores a coarse genome.
pub fn genome_cost(ctx: &SearchContext, genome: &DesignGenome) -> Result<GenomeCost> {
    let assignments = decode_assignments(ctx, &GenomeRepr::Coarse(genome.clone()))?;
    Ok(assignment_cost(ctx, &assignments))
}

/// Scores a fine genome.
pub fn fine_cost(ctx: &SearchContext, genome: &FineGenome) -> Result<GenomeCost> {
    let assignments = decode_assignments(ctx, &GenomeRepr::Fine(genome.clone()))?;
    Ok(assignment_cost(ctx, &assignments))
}

/// Scores either representation.
pub fn repr_cost(ctx: &SearchContext, repr: &GenomeRepr) -> Result<GenomeCost> {
    let assignments = decode_assignments(ctx, repr)?;
    Ok(assignment_cost(ctx, &assignments))
}

// ---------------------------------------------------------------------------
// Flat coarse space
// ---------------------------------------------------------------------------

/// The coarse space flattened into a digit vector, one digit per decision:
/// `[pe_0, buf_0, (df_0,) pe_1, buf_1, (df_1,) ...]`. Grid enumeration,
/// random sampling, and neighborhood moves all operate on this layout.
#[derive(Debug, Clone)]
pub struct CoarseSpace {
    /// Radix of each digit.
    pub dims: Vec<usize>,
    slot_width: usize,
    fixed_df: Option<DataflowStyle>,
}

impl CoarseSpace {
    pub fn new(ctx: &SearchContext) -> CoarseSpace {
        let slots = ctx.expected_genes();
        let (slot_width, fixed_df) = match ctx.dataflow {
            DataflowChoice::Fixed(df) => (2, Some(df)),
            DataflowChoice::Mix => (3, None),
        };
        let mut dims = Vec::with_capacity(slots * slot_width);
        for _ in 0..slots {
            dims.push(ctx.levels.pe_count());
            dims.push(ctx.levels.buf_count());
            if slot_width == 3 {
                dims.push(DataflowStyle::ALL.len());
            }
        }
        CoarseSpace {
            dims,
            slot_width,
            fixed_df,
        }
    }

    /// Total number of design points.
    pub fn size(&self) -> u128 {
        self.dims
            .iter()
            .fold(1u128, |acc, &d| acc.saturating_mul(d as u128))
    }

    pub fn origin(&self) -> Vec<usize> {
        vec![0; self.dims.len()]
    }

    pub fn decode(&self, point: &[usize]) -> DesignGenome {
        let genes = point
            .chunks(self.slot_width)
            .map(|chunk| Gene {
                pe_idx: chunk[0],
                buf_idx: chunk[1],
                df_idx: match self.fixed_df {
                    Some(df) => df.index(),
                    None => chunk[2],
                },
            })
            .collect();
        DesignGenome { genes }
    }

    pub fn random_point(&self, rng: &mut impl rand::Rng) -> Vec<usize> {
        self.dims.iter().map(|&d| rng.gen_range(0..d)).collect()
    }

    /// Advances `point` to the next lattice point in lexicographic order
    /// (leftmost digit most significant), stepping each digit by `stride`.
    /// Returns false once the point wraps past the end.
    pub fn advance_lex(&self, point: &mut [usize], stride: usize) -> bool {
        debug_assert!(stride >= 1);
        for i in (0..point.len()).rev() {
            point[i] += stride;
            if point[i] < self.dims[i] {
                return true;
            }
            point[i] = 0;
        }
        false
    }

    /// A neighbor for annealing-style moves: one uniformly chosen digit
    /// shifted by up to `step` positions (never zero), clamped to range.
    pub fn neighbor(&self, point: &[usize], step: usize, rng: &mut impl rand::Rng) -> Vec<usize> {
        debug_assert!(step >= 1);
        let mut next = point.to_vec();
        let i = rng.gen_range(0..next.len());
        let delta = loop {
            let d = rng.gen_range(-(step as i64)..=step as i64);
            if d != 0 {
                break d;
            }
        };
        let moved = (next[i] as i64 + delta).clamp(0, self.dims[i] as i64 - 1);
        next[i] = moved as usize;
        next
    }
}

// ---------------------------------------------------------------------------
// Search results and traces
// ---------------------------------------------------------------------------

/// Serializes non-finite best values as JSON null (JSON has no infinity);
/// null reads back as +inf, i.e. "no feasible point found".
mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// A best-so-far improvement: after `tick` units of search effort the best
/// feasible value seen was `value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub tick: u64,
    #[serde(with = "inf_as_null")]
    pub value: f64,
}

/// Outcome of one search run, shared by every method in the crate.
///
/// `trace` records each improvement of the best feasible value plus a
/// closing point at the final tick, so its first finite entry is the first
/// valid design the method found and its last entry is the final best.
/// `best_value` is always re-derivable from `best_genome` via
/// [`repr_cost`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub best_genome: Option<GenomeRepr>,
    #[serde(with = "inf_as_null")]
    pub best_value: f64,
    pub feasible: bool,
    pub evaluations: u64,
    pub trace: Vec<TracePoint>,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SearchResult> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Writes a trace as `tick,best_value` CSV. Non-finite values are spelled
/// `inf` so the file round-trips.
pub fn trace_to_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("tick,best_value\n");
    for p in trace {
        if p.value.is_finite() {
            out.push_str(&format!("{},{}\n", p.tick, p.value));
        } else {
            out.push_str(&format!("{},inf\n", p.tick));
        }
    }
    out
}

pub fn trace_from_csv(text: &str) -> Result<Vec<TracePoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("tick,best_value") => {}
        other => {
            return Err(Error::Parse(format!(
                "trace CSV must start with 'tick,best_value', got {:?}",
                other
            )))
        }
    }
    let mut trace = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let (t, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("trace line {}: missing comma", i + 2)))?;
        let tick: u64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("trace line {}: bad tick '{}'", i + 2, t)))?;
        let value = if v == "inf" {
            f64::INFINITY
        } else {
            v.parse()
                .map_err(|_| Error::Parse(format!("trace line {}: bad value '{}'", i + 2, v)))?
        };
        trace.push(TracePoint { tick, value });
    }
    Ok(trace)
}

/// Incrementally tracks the best feasible point and its improvement trace.
/// Ties keep the earlier point, so enumeration order decides among equals.
pub struct BestTracker {
    best_value: f64,
    best_genome: Option<GenomeRepr>,
    trace: Vec<TracePoint>,
    evaluations: u64,
}

impl BestTracker {
    pub fn new() -> BestTracker {
        BestTracker {
            best_value: f64::INFINITY,
            best_genome: None,
            trace: Vec::new(),
            evaluations: 0,
        }
    }

    /// Records one scored point. `tick` is the method's own effort counter
    /// (evaluation index, epoch number, ...).
    pub fn observe(&mut self, tick: u64, cost: &GenomeCost, genome: impl FnOnce() -> GenomeRepr) {
        self.evaluations += 1;
        if cost.feasible && cost.value < self.best_value {
            self.best_value = cost.value;
            self.best_genome = Some(genome());
            self.trace.push(TracePoint {
                tick,
                value: cost.value,
            });
        }
    }

    /// Counts effort that produced no scoreable point (e.g. an episode
    /// aborted by a constraint violation).
    pub fn observe_failure(&mut self) {
        self.evaluations += 1;
    }

    pub fn best_value(&self) -> f64 {
        self.best_value
    }

    pub fn best_genome(&self) -> Option<&GenomeRepr> {
        self.best_genome.as_ref()
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Closes the trace at `final_tick` and produces the result.
    pub fn finish(mut self, final_tick: u64) -> SearchResult {
        let needs_close = match self.trace.last() {
            Some(last) => last.tick != final_tick,
            None => true,
        };
        if needs_close {
            self.trace.push(TracePoint {
                tick: final_tick,
                value: self.best_value,
            });
        }
        SearchResult {
            feasible: self.best_genome.is_some(),
            best_genome: self.best_genome,
            best_value: self.best_value,
            evaluations: self.evaluations,
            trace: self.trace,
        }
    }
}

impl Default for BestTracker {
    fn default() -> Self {
        BestTracker::new()
    }
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration
// ---------------------------------------------------------------------------

/// Default cap on exhaustively enumerable spaces.
pub const EXHAUSTIVE_GUARD: u128 = 1_000_000;

/// Visits every coarse genome in lexicographic digit order. Fails up front
/// if the space exceeds `limit` points.
pub fn for_each_genome(
    ctx: &SearchContext,
    limit: u128,
    mut f: impl FnMut(u64, &DesignGenome, &GenomeCost),
) -> Result<u64> {
    let space = CoarseSpace::new(ctx);
    let size = space.size();
    if size > limit {
        return Err(Error::SpaceTooLarge { size, limit });
    }
    let mut point = space.origin();
    let mut tick = 0u64;
    loop {
        tick += 1;
        let genome = space.decode(&point);
        let cost = genome_cost(ctx, &genome)?;
        f(tick, &genome, &cost);
        if !space.advance_lex(&mut point, 1) {
            break;
        }
    }
    Ok(tick)
}

/// Brute-force ground truth: enumerates the whole coarse space and returns
/// the lexicographically first genome attaining the best feasible value.
pub fn exhaustive_oracle(ctx: &SearchContext, limit: u128) -> Result<SearchResult> {
    let mut tracker = BestTracker::new();
    let total = for_each_genome(ctx, limit, |tick, genome, cost| {
        tracker.observe(tick, cost, || GenomeRepr::Coarse(genome.clone()));
    })?;
    Ok(tracker.finish(total))
}

/// Feasible/total counts for a constrained space, for sizing constraint
/// tightness before a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCensus {
    pub total: u64,
    pub feasible: u64,
}

impl FeasibilityCensus {
    pub fn feasible_fraction(&self) -> f64 {
        self.feasible as f64 / self.total as f64
    }
}

pub fn feasibility_census(ctx: &SearchContext, limit: u128) -> Result<FeasibilityCensus> {
    let mut feasible = 0u64;
    let total = for_each_genome(ctx, limit, |_, _, cost| {
        if cost.feasible {
            feasible += 1;
        }
    })?;
    Ok(FeasibilityCensus { total, feasible })
}

/// Scalar budget consumption (per the context's constraint kind) of every
/// point in the space, in enumeration order. Useful for placing a budget
/// at a chosen percentile of what designs actually consume.
pub fn scalar_consumptions(ctx: &SearchContext, limit: u128) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for_each_genome(ctx, limit, |_, _, cost| {
        if let Consumption::Scalar(v) = cost.consumption {
            out.push(v);
        }
    })?;
    Ok(out)
}

//! Command layer: everything the `accel-alloc` binary does, as library
//! functions over plain structs, so programs and tests can drive runs
//! without spawning a process.
//!
//! Every run is described by a [`RunManifest`]. Commands resolve it
//! against a [`ToolConfig`], execute, write their artifacts under an
//! output directory, and return the in-memory result. Artifacts are
//! deterministic: the same manifest, config, and seed produce
//! byte-identical files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, BaselineCfg, BaselineMethod};
use crate::config::ToolConfig;
use crate::cost_model::{self, DataflowStyle, HwConstants};
use crate::error::{Error, Result};
use crate::ga::{evolve, TunerCfg};
use crate::rl::{train, PolicyVariant, TrainCfg};
use crate::search_space::{
    decode_assignments, exhaustive_oracle, repr_cost, trace_to_csv, ActionLevels, ConstraintSpec,
    Consumption, DataflowChoice, Deployment, FineGene, FineGenome, GenomeRepr, Objective,
    SearchContext, SearchResult, TracePoint, EXHAUSTIVE_GUARD,
};
use crate::workloads::{resolve_model, ModelDesc};

/// Which engine a `search` run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    /// Policy-gradient search (the default).
    Reinforce,
    /// Exhaustive enumeration (small spaces only).
    Oracle,
    Baseline(BaselineMethod),
}

impl SearchMethod {
    pub fn name(self) -> &'static str {
        match self {
            SearchMethod::Reinforce => "rl",
            SearchMethod::Oracle => "oracle",
            SearchMethod::Baseline(b) => b.name(),
        }
    }

    pub fn parse(s: &str) -> Option<SearchMethod> {
        match s {
            "rl" => Some(SearchMethod::Reinforce),
            "oracle" => Some(SearchMethod::Oracle),
            other => BaselineMethod::parse(other).map(SearchMethod::Baseline),
        }
    }
}

/// A complete run description. The `model` field is a built-in name or a
/// path to a model JSON file; `constraint` uses the textual syntax
/// (`none`, `area:60000`, `power:500`, `counts:256:1024`).
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub model: String,
    pub method: SearchMethod,
    pub dataflow: DataflowChoice,
    pub scenario: Deployment,
    pub objective: Objective,
    pub constraint: String,
    /// Search budget: training epochs for the policy searcher, genome
    /// evaluations for the baselines.
    pub epochs: u64,
    pub seed: u64,
    pub grid_stride: usize,
    pub policy: PolicyVariant,
    pub hidden: usize,
    /// Fine-tuning generations for `twostage`.
    pub tune_generations: u64,
}

impl RunManifest {
    pub fn new(model: &str, method: SearchMethod) -> RunManifest {
        RunManifest {
            model: model.to_string(),
            method,
            dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
            scenario: Deployment::LayerPipelined,
            objective: Objective::LATENCY_SUM,
            constraint: "none".to_string(),
            epochs: 5000,
            seed: 0,
            grid_stride: 1,
            policy: PolicyVariant::Rnn,
            hidden: 128,
            tune_generations: 2000,
        }
    }
}

/// Manifest resolved against a config: owned values the search context
/// borrows from.
struct Resolved {
    model: ModelDesc,
    levels: ActionLevels,
    hw: HwConstants,
    dataflow: DataflowChoice,
    constraint: ConstraintSpec,
    objective: Objective,
}

impl Resolved {
    fn context(&self) -> SearchContext<'_> {
        SearchContext {
            model: &self.model,
            levels: &self.levels,
            dataflow: self.dataflow,
            constraint: self.constraint,
            objective: self.objective,
            hw: &self.hw,
        }
    }
}

fn resolve(manifest: &RunManifest, cfg: &ToolConfig) -> Result<Resolved> {
    let model = resolve_model(&manifest.model)?;
    model.validate()?;
    let levels = cfg.levels()?;
    let constraint = ConstraintSpec::parse(&manifest.constraint, manifest.scenario)?;
    Ok(Resolved {
        model,
        levels,
        hw: cfg.hw.clone(),
        dataflow: manifest.dataflow,
        constraint,
        objective: manifest.objective,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// One archived run: the manifest facts needed to interpret the result,
/// plus the result itself. This is what `search` writes and `report`
/// reads back.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub model: String,
    pub dataflow: String,
    pub scenario: String,
    pub objective: String,
    pub constraint: String,
    pub seed: u64,
    pub result: SearchResult,
}

/// Runs one search and writes `result.json`, `trace.csv`, and (when a
/// feasible design was found) `genome.json` under `out_dir`. In the
/// shared-engine scenario the chosen triple is additionally written as
/// `shared_triple.json` for direct consumption.
pub fn cmd_search(manifest: &RunManifest, cfg: &ToolConfig, out_dir: &Path) -> Result<RunRecord> {
    let resolved = resolve(manifest, cfg)?;
    let ctx = resolved.context();
    let result = match manifest.method {
        SearchMethod::Oracle => exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD)?,
        SearchMethod::Reinforce => train(
            &ctx,
            &TrainCfg {
                epochs: manifest.epochs,
                hidden: manifest.hidden,
                variant: manifest.policy,
                seed: manifest.seed,
                ..TrainCfg::default()
            },
        )?,
        SearchMethod::Baseline(method) => {
            let mut bcfg = BaselineCfg::new(method, manifest.epochs, manifest.seed);
            bcfg.grid_stride = manifest.grid_stride;
            run_baseline(&ctx, &bcfg)?
        }
    };

    let record = RunRecord {
        method: manifest.method.name().to_string(),
        model: manifest.model.clone(),
        dataflow: manifest.dataflow.name(),
        scenario: manifest.scenario.name().to_string(),
        objective: manifest.objective.text(),
        constraint: resolved.constraint.text(),
        seed: manifest.seed,
        result,
    };

    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_text(&out_dir.join("result.json"), &json_line(&record))?;
    write_text(
        &out_dir.join("trace.csv"),
        &trace_to_csv(&record.result.trace),
    )?;
    if let Some(best) = &record.result.best_genome {
        write_text(&out_dir.join("genome.json"), &json_line(best))?;
        if manifest.scenario == Deployment::LayerSequential {
            let (df, pe, k) = decode_assignments(&ctx, best)?[0];
            let triple = FineGene { pe, k, df };
            write_text(&out_dir.join("shared_triple.json"), &json_line(&triple))?;
        }
    }
    Ok(record)
}

/// Per-layer breakdown of one design point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub layer: usize,
    pub dataflow: String,
    pub pe: u64,
    pub buf: u64,
    pub latency: u64,
    pub energy: f64,
    pub area: f64,
    pub power: f64,
}

/// Full scoring of one genome file against a manifest's model, objective,
/// and constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub scenario: String,
    pub objective: String,
    pub constraint: String,
    pub value: f64,
    pub feasible: bool,
    pub consumption: Consumption,
    pub per_layer: Vec<LayerReport>,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        json_line(self)
    }
}

/// Scores a genome file (either representation) and reports per-layer
/// metrics plus the budget verdict. Writes nothing.
pub fn cmd_evaluate(
    manifest: &RunManifest,
    cfg: &ToolConfig,
    genome_path: &Path,
) -> Result<EvalReport> {
    let resolved = resolve(manifest, cfg)?;
    let ctx = resolved.context();
    let text = read_text(genome_path)?;
    let repr: GenomeRepr = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let assignments = decode_assignments(&ctx, &repr)?;
    let cost = crate::search_space::assignment_cost(&ctx, &assignments);

    let per_layer = resolved
        .model
        .layers
        .iter()
        .zip(&assignments)
        .enumerate()
        .map(|(i, (layer, &(df, p, k)))| {
            let m = cost_model::evaluate(df, p, k, layer, &resolved.hw)
                .expect("decoded assignments are valid");
            LayerReport {
                layer: i,
                dataflow: df.name().to_string(),
                pe: p,
                buf: k,
                latency: m.latency,
                energy: m.energy,
                area: m.area,
                power: m.power,
            }
        })
        .collect();

    Ok(EvalReport {
        model: manifest.model.clone(),
        scenario: manifest.scenario.name().to_string(),
        objective: manifest.objective.text(),
        constraint: resolved.constraint.text(),
        value: cost.value,
        feasible: cost.feasible,
        consumption: cost.consumption,
        per_layer,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub pe: u64,
    pub buf: u64,
    pub latency: u64,
    pub energy: f64,
    pub area: f64,
}

/// Cost surface of one layer across the full level grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pe_level,buf_level,latency,energy,area\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.pe, r.buf, r.latency, r.energy, r.area
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<SweepTable> {
        let mut lines = text.lines();
        match lines.next() {
            Some("pe_level,buf_level,latency,energy,area") => {}
            other => {
                return Err(Error::Parse(format!(
                    "sweep CSV header mismatch, got {:?}",
                    other
                )))
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "sweep line {}: expected 5 fields, got {}",
                    i + 2,
                    fields.len()
                )));
            }
            let parse_err =
                |field: &str| Error::Parse(format!("sweep line {}: bad number '{}'", i + 2, field));
            rows.push(SweepRow {
                pe: fields[0].parse().map_err(|_| parse_err(fields[0]))?,
                buf: fields[1].parse().map_err(|_| parse_err(fields[1]))?,
                latency: fields[2].parse().map_err(|_| parse_err(fields[2]))?,
                energy: fields[3].parse().map_err(|_| parse_err(fields[3]))?,
                area: fields[4].parse().map_err(|_| parse_err(fields[4]))?,
            });
        }
        Ok(SweepTable { rows })
    }
}

/// Evaluates one layer at every `(pe, buf)` level pair under the
/// manifest's (fixed) dataflow and writes `sweep.csv` to `out_dir`. Rows
/// iterate PE levels in the outer loop.
pub fn cmd_sweep(
    manifest: &RunManifest,
    cfg: &ToolConfig,
    layer_index: usize,
    out_dir: &Path,
) -> Result<SweepTable> {
    let resolved = resolve(manifest, cfg)?;
    let df = match manifest.dataflow {
        DataflowChoice::Fixed(df) => df,
        DataflowChoice::Mix => {
            return Err(Error::InvalidConfig(
                "sweep needs a fixed dataflow style, not mix".to_string(),
            ))
        }
    };
    let layer = resolved.model.layers.get(layer_index).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "layer index {} out of range for model with {} layers",
            layer_index,
            resolved.model.len()
        ))
    })?;

    let mut rows = Vec::with_capacity(resolved.levels.pe_count() * resolved.levels.buf_count());
    for &pe in &resolved.levels.pe_values {
        for &k in &resolved.levels.buf_values {
            let m = cost_model::evaluate(df, pe, k, layer, &resolved.hw)?;
            rows.push(SweepRow {
                pe,
                buf: k,
                latency: m.latency,
                energy: m.energy,
                area: m.area,
            });
        }
    }
    let table = SweepTable { rows };
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_text(&out_dir.join("sweep.csv"), &table.to_csv())?;
    Ok(table)
}

/// Outcome of a global-search + fine-tuning pipeline. Values are `None`
/// when the corresponding stage produced nothing (no feasible design).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoStageReport {
    /// Stage 1 found no feasible design, so there was nothing to tune.
    pub fine_tuning_skipped: bool,
    /// First feasible value stage 1 stumbled on, before any optimization
    /// paid off.
    pub initial_value: Option<f64>,
    pub stage1_value: Option<f64>,
    pub stage2_value: Option<f64>,
    /// Fractional improvement of stage 1 over its own first feasible hit.
    pub stage1_improvement: Option<f64>,
    /// Fractional improvement of fine-tuning over stage 1.
    pub stage2_improvement: Option<f64>,
    pub total_improvement: Option<f64>,
    /// Fine-tuned winner re-scored against the budget from scratch.
    pub stage2_feasible: Option<bool>,
}

fn first_finite(trace: &[TracePoint]) -> Option<f64> {
    trace.iter().find(|p| p.value.is_finite()).map(|p| p.value)
}

/// Runs the two-stage pipeline: policy-gradient global search, then local
/// fine-tuning seeded with the winner. Writes both stages' artifacts and
/// `twostage.json` under `out_dir`.
pub fn cmd_twostage(
    manifest: &RunManifest,
    cfg: &ToolConfig,
    out_dir: &Path,
) -> Result<TwoStageReport> {
    let resolved = resolve(manifest, cfg)?;
    let ctx = resolved.context();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let stage1 = train(
        &ctx,
        &TrainCfg {
            epochs: manifest.epochs,
            hidden: manifest.hidden,
            variant: manifest.policy,
            seed: manifest.seed,
            ..TrainCfg::default()
        },
    )?;
    let stage1_record = RunRecord {
        method: "rl".to_string(),
        model: manifest.model.clone(),
        dataflow: manifest.dataflow.name(),
        scenario: manifest.scenario.name().to_string(),
        objective: manifest.objective.text(),
        constraint: resolved.constraint.text(),
        seed: manifest.seed,
        result: stage1.clone(),
    };
    write_text(&out_dir.join("stage1_result.json"), &json_line(&stage1_record))?;
    write_text(&out_dir.join("stage1_trace.csv"), &trace_to_csv(&stage1.trace))?;

    let report = if !stage1.feasible {
        TwoStageReport {
            fine_tuning_skipped: true,
            initial_value: None,
            stage1_value: None,
            stage2_value: None,
            stage1_improvement: None,
            stage2_improvement: None,
            total_improvement: None,
            stage2_feasible: None,
        }
    } else {
        let initial = first_finite(&stage1.trace).expect("feasible result has a finite trace entry");
        let best = stage1.result_genome();
        let seed_fine = match best {
            GenomeRepr::Coarse(genome) => FineGenome::from_coarse(genome, &resolved.levels)?,
            GenomeRepr::Fine(f) => f.clone(),
        };
        let stage2 = evolve(
            &ctx,
            &seed_fine,
            &TunerCfg {
                generations: manifest.tune_generations,
                seed: manifest.seed,
                ..TunerCfg::default()
            },
        )?;
        let stage2_record = RunRecord {
            method: "tune".to_string(),
            model: manifest.model.clone(),
            dataflow: manifest.dataflow.name(),
            scenario: manifest.scenario.name().to_string(),
            objective: manifest.objective.text(),
            constraint: resolved.constraint.text(),
            seed: manifest.seed,
            result: stage2.clone(),
        };
        write_text(&out_dir.join("stage2_result.json"), &json_line(&stage2_record))?;
        write_text(&out_dir.join("stage2_trace.csv"), &trace_to_csv(&stage2.trace))?;

        // Never trust the tuner's own bookkeeping for the final verdict.
        let revalidated = stage2
            .best_genome
            .as_ref()
            .map(|g| repr_cost(&ctx, g).map(|c| c.feasible))
            .transpose()?;
        TwoStageReport {
            fine_tuning_skipped: false,
            initial_value: Some(initial),
            stage1_value: Some(stage1.best_value),
            stage2_value: Some(stage2.best_value),
            stage1_improvement: Some((initial - stage1.best_value) / initial),
            stage2_improvement: Some((stage1.best_value - stage2.best_value) / stage1.best_value),
            total_improvement: Some((initial - stage2.best_value) / initial),
            stage2_feasible: revalidated,
        }
    };
    write_text(&out_dir.join("twostage.json"), &json_line(&report))?;
    Ok(report)
}

impl SearchResult {
    fn result_genome(&self) -> &GenomeRepr {
        self.best_genome
            .as_ref()
            .expect("feasible result carries a genome")
    }
}

/// Merges `result.json` files into one comparison CSV. Unreadable inputs
/// become warnings, not failures, so one corrupt run does not sink the
/// whole report.
pub fn cmd_report(inputs: &[std::path::PathBuf]) -> Result<(String, Vec<String>)> {
    let mut csv = String::from(
        "method,model,dataflow,scenario,objective,constraint,seed,best_value,feasible,evaluations\n",
    );
    let mut warnings = Vec::new();
    for path in inputs {
        let record: RunRecord = match read_text(path)
            .and_then(|t| serde_json::from_str(&t).map_err(|e| Error::Parse(e.to_string())))
        {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("skipping {}: {}", path.display(), e));
                continue;
            }
        };
        let value = if record.result.best_value.is_finite() {
            format!("{}", record.result.best_value)
        } else {
            "inf".to_string()
        };
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            record.method,
            record.model,
            record.dataflow,
            record.scenario,
            record.objective,
            record.constraint,
            record.seed,
            value,
            record.result.feasible,
            record.result.evaluations,
        ));
    }
    Ok((csv, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ToolConfig {
        let levels = ActionLevels::truncated(4).unwrap();
        ToolConfig {
            pe_values: levels.pe_values,
            buf_values: levels.buf_values,
            ..ToolConfig::default()
        }
    }

    #[test]
    fn search_artifacts_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        let record = cmd_search(&manifest, &small_config(), dir.path()).unwrap();
        assert_eq!(record.result.best_value, 360.0);

        let text = std::fs::read_to_string(dir.path().join("result.json")).unwrap();
        let parsed: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, record);

        let trace_text = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
        let trace = crate::search_space::trace_from_csv(&trace_text).unwrap();
        assert_eq!(trace, record.result.trace);

        // the emitted genome re-evaluates to the recorded value
        let report = cmd_evaluate(
            &manifest,
            &small_config(),
            &dir.path().join("genome.json"),
        )
        .unwrap();
        assert_eq!(report.value, record.result.best_value);
        assert!(report.feasible);
        assert_eq!(report.per_layer.len(), 2);
        assert_eq!(report.per_layer[0].pe, 8);
    }

    #[test]
    fn sequential_runs_emit_the_shared_triple() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        manifest.scenario = Deployment::LayerSequential;
        cmd_search(&manifest, &small_config(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("shared_triple.json")).unwrap();
        let triple: FineGene = serde_json::from_str(&text).unwrap();
        assert!(triple.pe >= 1 && triple.k >= 1);
    }

    #[test]
    fn search_is_byte_deterministic() {
        let cfg = small_config();
        let mut manifest = RunManifest::new("toy2", SearchMethod::Reinforce);
        manifest.epochs = 60;
        manifest.hidden = 8;
        manifest.seed = 5;
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        cmd_search(&manifest, &cfg, d1.path()).unwrap();
        cmd_search(&manifest, &cfg, d2.path()).unwrap();
        for file in ["result.json", "trace.csv"] {
            let a = std::fs::read(d1.path().join(file)).unwrap();
            let b = std::fs::read(d2.path().join(file)).unwrap();
            assert_eq!(a, b, "{} differs between identical runs", file);
        }
    }

    #[test]
    fn evaluate_rejects_scenario_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let genome = dir.path().join("genome.json");
        std::fs::write(
            &genome,
            r#"{"genes": [{"pe_idx": 0, "buf_idx": 0, "df_idx": 0}]}"#,
        )
        .unwrap();
        // one gene against a two-layer pipelined run
        let manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        assert!(matches!(
            cmd_evaluate(&manifest, &small_config(), &genome),
            Err(Error::GenomeLength { .. })
        ));
    }

    #[test]
    fn evaluate_accepts_fine_genomes() {
        let dir = tempfile::tempdir().unwrap();
        let genome = dir.path().join("fine.json");
        std::fs::write(
            &genome,
            r#"{"genes": [{"pe": 10, "k": 3, "df": "dla"}, {"pe": 7, "k": 2, "df": "eye"}]}"#,
        )
        .unwrap();
        let manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        let report = cmd_evaluate(&manifest, &small_config(), &genome).unwrap();
        assert_eq!(report.per_layer[0].pe, 10);
        assert_eq!(report.per_layer[1].dataflow, "eye");
    }

    #[test]
    fn sweep_covers_the_level_grid() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        let table = cmd_sweep(&manifest, &ToolConfig::default(), 0, dir.path()).unwrap();
        assert_eq!(table.rows.len(), 144);
        let text = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
        let back = SweepTable::from_csv(&text).unwrap();
        assert_eq!(back, table);
        // pe iterates in the outer loop
        assert_eq!(table.rows[0].pe, 1);
        assert_eq!(table.rows[11].pe, 1);
        assert_eq!(table.rows[12].pe, 2);

        let mut mix = manifest;
        mix.dataflow = DataflowChoice::Mix;
        assert!(cmd_sweep(&mix, &ToolConfig::default(), 0, dir.path()).is_err());
        let manifest = RunManifest::new("toy2", SearchMethod::Oracle);
        assert!(cmd_sweep(&manifest, &ToolConfig::default(), 9, dir.path()).is_err());
    }

    #[test]
    fn twostage_chains_monotonically() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = RunManifest::new("toy2", SearchMethod::Reinforce);
        manifest.epochs = 150;
        manifest.hidden = 8;
        manifest.tune_generations = 80;
        manifest.seed = 3;
        manifest.constraint = "area:8000".to_string();
        let report = cmd_twostage(&manifest, &small_config(), dir.path()).unwrap();
        assert!(!report.fine_tuning_skipped);
        let initial = report.initial_value.unwrap();
        let s1 = report.stage1_value.unwrap();
        let s2 = report.stage2_value.unwrap();
        assert!(s1 <= initial);
        assert!(s2 <= s1);
        assert_eq!(report.stage2_feasible, Some(true));
        assert!(report.total_improvement.unwrap() >= 0.0);
        for file in [
            "stage1_result.json",
            "stage1_trace.csv",
            "stage2_result.json",
            "stage2_trace.csv",
            "twostage.json",
        ] {
            assert!(dir.path().join(file).exists(), "{} missing", file);
        }
    }

    #[test]
    fn twostage_skips_tuning_when_nothing_is_feasible() {
        let dir = tempfile::tempdir().unwrap();
        let mut manifest = RunManifest::new("toy2", SearchMethod::Reinforce);
        manifest.epochs = 30;
        manifest.hidden = 8;
        manifest.constraint = "counts:1:1".to_string(); // impossible
        let report = cmd_twostage(&manifest, &small_config(), dir.path()).unwrap();
        assert!(report.fine_tuning_skipped);
        assert_eq!(report.stage2_value, None);
        assert!(dir.path().join("twostage.json").exists());
        assert!(!dir.path().join("stage2_result.json").exists());
    }

    #[test]
    fn report_merges_and_warns() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config();
        let m1 = RunManifest::new("toy2", SearchMethod::Oracle);
        let mut m2 = RunManifest::new("toy2", SearchMethod::Baseline(BaselineMethod::Random));
        m2.epochs = 40;
        cmd_search(&m1, &cfg, &dir.path().join("a")).unwrap();
        cmd_search(&m2, &cfg, &dir.path().join("b")).unwrap();
        let inputs = vec![
            dir.path().join("a/result.json"),
            dir.path().join("missing/result.json"),
            dir.path().join("b/result.json"),
        ];
        let (csv, warnings) = cmd_report(&inputs).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3); // header + 2 rows
        assert!(lines[1].starts_with("oracle,toy2,dla,lp,latency:sum,none,0,360,true,"));
        assert!(lines[2].starts_with("random,toy2,"));
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn method_names_parse_both_ways() {
        for name in ["rl", "oracle", "grid", "random", "sa", "ga"] {
            assert_eq!(SearchMethod::parse(name).unwrap().name(), name);
        }
        assert!(SearchMethod::parse("simplex").is_none());
    }
}

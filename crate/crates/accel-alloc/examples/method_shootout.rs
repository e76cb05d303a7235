//! Runs every search method on the same problem with a matched budget
//! and prints a comparison table. The oracle row is the exact optimum;
//! everything else is judged by how close it lands.
//!
//!     cargo run --example method_shootout

use accel_alloc::baselines::{run_baseline, BaselineCfg, BaselineMethod};
use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::rl::{train, TrainCfg};
use accel_alloc::search_space::{
    exhaustive_oracle, ActionLevels, ConstraintSpec, DataflowChoice, Deployment, Objective,
    SearchContext, SearchResult, EXHAUSTIVE_GUARD,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy3")?;
    let levels = ActionLevels::truncated(5)?;
    let hw = HwConstants::default();
    let ctx = SearchContext {
        model: &model,
        levels: &levels,
        dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
        constraint: ConstraintSpec::parse("area:9000", Deployment::LayerPipelined)?,
        objective: Objective::parse("latency:sum")?,
        hw: &hw,
    };
    let budget = 2000; // evaluations for baselines, episodes for the policy
    let seed = 11;

    let mut rows: Vec<(&str, SearchResult)> = Vec::new();
    rows.push(("oracle", exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD)?));
    for method in [
        BaselineMethod::Grid,
        BaselineMethod::Random,
        BaselineMethod::Annealing,
        BaselineMethod::Genetic,
    ] {
        let result = run_baseline(&ctx, &BaselineCfg::new(method, budget, seed))?;
        rows.push((method.name(), result));
    }
    let rl = train(
        &ctx,
        &TrainCfg {
            epochs: budget,
            hidden: 16,
            seed,
            ..TrainCfg::default()
        },
    )?;
    rows.push(("rl", rl));

    let optimum = rows[0].1.best_value;
    println!("{:<8} {:>12} {:>9} {:>13}", "method", "best_value", "gap", "evaluations");
    for (name, r) in &rows {
        let gap = if r.best_value.is_finite() {
            format!("{:+.1}%", 100.0 * (r.best_value - optimum) / optimum)
        } else {
            "-".to_string()
        };
        println!("{:<8} {:>12} {:>9} {:>13}", name, r.best_value, gap, r.evaluations);
    }
    Ok(())
}

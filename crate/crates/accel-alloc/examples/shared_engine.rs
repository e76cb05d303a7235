//! The shared-engine scenario: one (pe, depth, style) triple serves every
//! layer in sequence, so the genome is a single gene and the area bill is
//! the engine itself, not a sum over layers. Under a tight budget that's
//! an advantage — one well-sized engine beats several starved ones — and
//! with room to spare the two scenarios converge.
//!
//!     cargo run --example shared_engine

use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::search_space::{
    decode_assignments, exhaustive_oracle, ActionLevels, ConstraintSpec, DataflowChoice,
    Deployment, Objective, SearchContext, EXHAUSTIVE_GUARD,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy3")?;
    let levels = ActionLevels::truncated(6)?;
    let hw = HwConstants::default();
    let objective = Objective::parse("latency:sum")?;

    for budget in ["area:1500", "area:6000"] {
        println!("budget {}:", budget);
        for deployment in [Deployment::LayerSequential, Deployment::LayerPipelined] {
            let ctx = SearchContext {
                model: &model,
                levels: &levels,
                dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
                constraint: ConstraintSpec::parse(budget, deployment)?,
                objective,
                hw: &hw,
            };
            let r = exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD)?;
            match deployment {
                Deployment::LayerSequential => {
                    let genome = r.best_genome.clone().unwrap();
                    let (df, pe, k) = decode_assignments(&ctx, &genome)?[0];
                    println!(
                        "  one shared engine   ({:>5} points): latency {} with {} pe={} k={}",
                        r.evaluations,
                        r.best_value,
                        df.name(),
                        pe,
                        k
                    );
                }
                Deployment::LayerPipelined => {
                    println!(
                        "  per-layer engines   ({:>5} points): latency {}",
                        r.evaluations, r.best_value
                    );
                }
            }
        }
        println!();
    }
    println!("per-layer engines pay area for every stage, so a tight budget");
    println!("starves them; the shared engine spends the whole budget once.");
    Ok(())
}

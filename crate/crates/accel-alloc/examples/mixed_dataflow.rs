//! Lets the search pick a dataflow style per layer and shows why that
//! can only help: the mixed space contains every fixed-style space, so
//! its exact optimum is at least as good as the best single style.
//!
//!     cargo run --example mixed_dataflow

use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::search_space::{
    decode_assignments, exhaustive_oracle, ActionLevels, ConstraintSpec, DataflowChoice,
    Deployment, Objective, SearchContext, EXHAUSTIVE_GUARD,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy2")?;
    let levels = ActionLevels::truncated(4)?;
    let hw = HwConstants::default();
    let base = SearchContext {
        model: &model,
        levels: &levels,
        dataflow: DataflowChoice::Mix,
        constraint: ConstraintSpec::unconstrained(Deployment::LayerPipelined),
        objective: Objective::parse("energy:sum")?,
        hw: &hw,
    };

    let mut best_fixed = f64::INFINITY;
    for df in DataflowStyle::ALL {
        let mut ctx = base;
        ctx.dataflow = DataflowChoice::Fixed(df);
        let r = exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD)?;
        println!("fixed {}: optimum {} over {} points", df.name(), r.best_value, r.evaluations);
        best_fixed = best_fixed.min(r.best_value);
    }

    let mixed = exhaustive_oracle(&base, EXHAUSTIVE_GUARD)?;
    println!("\nper-layer styles: optimum {} over {} points", mixed.best_value, mixed.evaluations);
    assert!(mixed.best_value <= best_fixed);

    let genome = mixed.best_genome.unwrap();
    println!("chosen assignment:");
    for (i, (df, pe, k)) in decode_assignments(&base, &genome)?.into_iter().enumerate() {
        println!("  layer {}: {} with pe={} k={}", i, df.name(), pe, k);
    }
    Ok(())
}

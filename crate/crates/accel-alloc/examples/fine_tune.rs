//! Fine-tunes a mediocre design in raw value space. The local tuner
//! perturbs PE counts and tile depths by at most +/-4 around a seed and
//! swaps assignments between layers, while dataflow styles stay frozen —
//! small steps, never worse than the seed.
//!
//!     cargo run --example fine_tune

use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::ga::{evolve, TunerCfg};
use accel_alloc::search_space::{
    fine_cost, ActionLevels, ConstraintSpec, DataflowChoice, Deployment, FineGene, FineGenome,
    Objective, SearchContext,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy3")?;
    let levels = ActionLevels::default_levels();
    let hw = HwConstants::default();
    let ctx = SearchContext {
        model: &model,
        levels: &levels,
        dataflow: DataflowChoice::Mix,
        constraint: ConstraintSpec::parse("area:20000", Deployment::LayerPipelined)?,
        objective: Objective::parse("latency:sum")?,
        hw: &hw,
    };

    // a deliberately lopsided starting point
    let seed = FineGenome {
        genes: vec![
            FineGene { pe: 2, k: 6, df: DataflowStyle::Dla },
            FineGene { pe: 3, k: 6, df: DataflowStyle::Eye },
            FineGene { pe: 2, k: 6, df: DataflowStyle::Dla },
        ],
    };
    let before = fine_cost(&ctx, &seed)?;
    println!("seed value: {} (feasible: {})", before.value, before.feasible);

    let result = evolve(
        &ctx,
        &seed,
        &TunerCfg {
            generations: 300,
            seed: 7,
            ..TunerCfg::default()
        },
    )?;

    println!("tuned value: {} after {} evaluations", result.best_value, result.evaluations);
    println!(
        "improvement: {:.1}%",
        100.0 * (before.value - result.best_value) / before.value
    );
    println!("tuned genome: {:?}", result.best_genome.unwrap());
    println!("(dataflow styles are identical to the seed's: the tuner never touches them)");
    Ok(())
}

//! Trains the policy-gradient searcher on a toy model and checks it
//! against the exact optimum. The policy assigns resources layer by
//! layer; each epoch is one episode, and the best design ever sampled is
//! tracked.
//!
//!     cargo run --example policy_search

use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::rl::{train, PolicyVariant, TrainCfg};
use accel_alloc::search_space::{
    exhaustive_oracle, ActionLevels, ConstraintSpec, DataflowChoice, Deployment, Objective,
    SearchContext, EXHAUSTIVE_GUARD,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy2")?;
    let levels = ActionLevels::truncated(4)?;
    let hw = HwConstants::default();
    let ctx = SearchContext {
        model: &model,
        levels: &levels,
        dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
        constraint: ConstraintSpec::unconstrained(Deployment::LayerPipelined),
        objective: Objective::parse("latency:sum")?,
        hw: &hw,
    };

    let oracle = exhaustive_oracle(&ctx, EXHAUSTIVE_GUARD)?;
    println!("exact optimum: {}", oracle.best_value);

    let cfg = TrainCfg {
        epochs: 400,
        hidden: 12,
        variant: PolicyVariant::Rnn,
        seed: 1,
        ..TrainCfg::default()
    };
    let result = train(&ctx, &cfg)?;

    println!("policy search after {} episodes: {}", result.evaluations, result.best_value);
    println!("best genome: {:?}", result.best_genome.unwrap());
    println!("\nbest-so-far milestones:");
    for p in &result.trace {
        println!("  episode {:>4}: {}", p.tick, p.value);
    }
    println!(
        "\ngap to optimum: {:.1}%",
        100.0 * (result.best_value - oracle.best_value) / oracle.best_value
    );
    Ok(())
}

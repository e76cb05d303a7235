//! Enumerates a small design space exactly: the true optimum, the number
//! of points, and how the feasible fraction collapses as the area budget
//! tightens. Exact enumeration is the ground truth the searchers are
//! judged against.
//!
//!     cargo run --example enumerate_exact

use accel_alloc::cost_model::{DataflowStyle, HwConstants};
use accel_alloc::search_space::{
    exhaustive_oracle, feasibility_census, ActionLevels, ConstraintSpec, DataflowChoice,
    Deployment, Objective, SearchContext, EXHAUSTIVE_GUARD,
};
use accel_alloc::workloads::builtin;

fn main() -> accel_alloc::Result<()> {
    let model = builtin("toy2")?;
    let levels = ActionLevels::truncated(4)?; // 4 PE levels x 4 depths per layer
    let hw = HwConstants::default();
    let base = SearchContext {
        model: &model,
        levels: &levels,
        dataflow: DataflowChoice::Fixed(DataflowStyle::Dla),
        constraint: ConstraintSpec::unconstrained(Deployment::LayerPipelined),
        objective: Objective::parse("latency:sum")?,
        hw: &hw,
    };

    let result = exhaustive_oracle(&base, EXHAUSTIVE_GUARD)?;
    println!(
        "exact optimum over {} points: {} = {}",
        result.evaluations,
        base.objective.text(),
        result.best_value
    );
    println!("winning genome: {:?}\n", result.best_genome.unwrap());

    println!("feasible fraction as the area budget tightens:");
    for budget in [2000.0, 1000.0, 500.0, 250.0, 120.0] {
        let mut ctx = base;
        let text = format!("area:{}", budget);
        ctx.constraint = ConstraintSpec::parse(&text, Deployment::LayerPipelined)?;
        let census = feasibility_census(&ctx, EXHAUSTIVE_GUARD)?;
        println!(
            "  area <= {:>6}: {:>3} of {} points ({:.1}%)",
            budget,
            census.feasible,
            census.total,
            100.0 * census.feasible_fraction()
        );
    }
    Ok(())
}

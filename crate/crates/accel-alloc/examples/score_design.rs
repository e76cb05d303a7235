//! Scores a hand-written per-layer design against a model and an area
//! budget: per-layer metrics, the aggregate objective, and the budget
//! verdict.
//!
//!     cargo run --example score_design

use accel_alloc::cost_model::{evaluate, HwConstants};
use accel_alloc::search_space::{
    decode_assignments, repr_cost, ActionLevels, ConstraintSpec, DataflowChoice, Deployment,
    DesignGenome, Gene, GenomeRepr, Objective, SearchContext,
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
        constraint: ConstraintSpec::parse("area:12000", Deployment::LayerPipelined)?,
        objective: Objective::parse("latency:sum")?,
        hw: &hw,
    };

    // one gene per layer: indices into the level tables plus a style pick
    let genome = GenomeRepr::Coarse(DesignGenome {
        genes: vec![
            Gene { pe_idx: 5, buf_idx: 2, df_idx: 0 }, // 16 PEs, depth 3, dla
            Gene { pe_idx: 3, buf_idx: 1, df_idx: 1 }, // 8 PEs, depth 2, eye
            Gene { pe_idx: 4, buf_idx: 0, df_idx: 0 }, // 12 PEs, depth 1, dla
        ],
    });

    println!("per-layer metrics:");
    for (i, (df, pe, k)) in decode_assignments(&ctx, &genome)?.into_iter().enumerate() {
        let m = evaluate(df, pe, k, &model.layers[i], &hw)?;
        println!(
            "  layer {}: {} pe={:>2} k={}  latency={:>7} energy={:>10.0} area={:>7.0} power={:.3}",
            i, df.name(), pe, k, m.latency, m.energy, m.area, m.power
        );
    }

    let cost = repr_cost(&ctx, &genome)?;
    println!("\nobjective {} = {}", ctx.objective.text(), cost.value);
    println!("budget {}: consumption {:?}", ctx.constraint.text(), cost.consumption);
    println!("feasible: {}", cost.feasible);
    Ok(())
}

//! Walks one convolution layer across the PE and buffer level tables and
//! prints its latency surface per dataflow style, plus the point where
//! extra parallelism stops helping (the memory roof).
//!
//!     cargo run --example cost_surface

use accel_alloc::cost_model::{evaluate, macs, DataflowStyle, HwConstants, LayerShape};
use accel_alloc::search_space::ActionLevels;

fn main() -> accel_alloc::Result<()> {
    let layer = LayerShape::conv(64, 32, 56, 56, 3, 3, 1);
    let hw = HwConstants::default();
    let levels = ActionLevels::default_levels();

    println!(
        "layer: CONV K=64 C=32 Y=X=56 R=S=3, {} MACs\n",
        macs(&layer)
    );

    for df in DataflowStyle::ALL {
        println!("dataflow {}: latency by PE count (tile depth fixed at 4)", df.name());
        let mut prev = u64::MAX;
        for &pe in &levels.pe_values {
            let m = evaluate(df, pe, 4, &layer, &hw)?;
            let note = if m.latency == prev { "  <- roof: no faster than the previous level" } else { "" };
            println!("  pe={:>2}  latency={:>8}  energy={:>12.0}  area={:>8.0}{}", pe, m.latency, m.energy, m.area, note);
            prev = m.latency;
        }
        println!();
    }

    println!("tile depth trades area for DRAM refetch (dla, pe=16):");
    for &k in &levels.buf_values {
        let m = evaluate(DataflowStyle::Dla, 16, k, &layer, &hw)?;
        println!("  k={:>2}  energy={:>12.0}  area={:>8.0}", k, m.energy, m.area);
    }
    Ok(())
}

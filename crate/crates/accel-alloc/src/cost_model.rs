//! Analytical cost model for a spatial DNN accelerator.
//!
//! A layer runs on an engine described by three knobs: a dataflow style,
//! a processing-element count `p`, and a buffer tile depth `k`. The model
//! turns `(style, p, k, layer)` into latency, energy, area and average
//! power without simulating anything: compute time is a roofline over MAC
//! throughput and DRAM bandwidth, and memory traffic follows from how
//! often the non-stationary operand has to be refetched when the tile
//! depth `k` cannot hold the whole temporal dimension at once.
//!
//! All cost functions here are pure and total over valid inputs, which is
//! what makes exhaustive enumeration and gradient-free search over the
//! design space cheap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the engine maps loop dimensions onto its PE array.
///
/// Each style parallelizes a different pair of loops spatially and keeps a
/// different operand stationary, so the same `(p, k)` point can have very
/// different traffic depending on the style:
///
/// * `Dla` parallelizes output channels x input channels and keeps weights
///   resident; inputs are the refetched operand.
/// * `Eye` parallelizes output rows x filter rows and keeps row activations
///   resident; weights are refetched.
/// * `Shi` parallelizes the output plane and keeps outputs resident;
///   weights are refetched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DataflowStyle {
    #[serde(rename = "dla")]
    Dla,
    #[serde(rename = "eye")]
    Eye,
    #[serde(rename = "shi")]
    Shi,
}

impl DataflowStyle {
    pub const ALL: [DataflowStyle; 3] = [DataflowStyle::Dla, DataflowStyle::Eye, DataflowStyle::Shi];

    pub fn index(self) -> usize {
        match self {
            DataflowStyle::Dla => 0,
            DataflowStyle::Eye => 1,
            DataflowStyle::Shi => 2,
        }
    }

    pub fn from_index(idx: usize) -> Option<DataflowStyle> {
        Self::ALL.get(idx).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            DataflowStyle::Dla => "dla",
            DataflowStyle::Eye => "eye",
            DataflowStyle::Shi => "shi",
        }
    }

    pub fn parse(s: &str) -> Option<DataflowStyle> {
        match s {
            "dla" => Some(DataflowStyle::Dla),
            "eye" => Some(DataflowStyle::Eye),
            "shi" => Some(DataflowStyle::Shi),
            _ => None,
        }
    }
}

impl std::fmt::Display for DataflowStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Operator class of a layer. GEMMs are stored in convolution form
/// (see [`crate::workloads::gemm_to_layer`]) so the cost functions only
/// ever see one shape vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LayerKind {
    Conv,
    DwConv,
    Gemm,
}

/// Shape of one layer in convolution coordinates.
///
/// `k` and `c` are output/input channels, `y`/`x` the input feature map,
/// `r`/`s` the filter. Depthwise layers carry `k == c` by construction.
/// Output dims follow the unpadded sliding-window rule, see [`output_dims`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerShape {
    pub kind: LayerKind,
    pub k: u64,
    pub c: u64,
    pub y: u64,
    pub x: u64,
    pub r: u64,
    pub s: u64,
    pub stride: u64,
}

impl LayerShape {
    pub fn conv(k: u64, c: u64, y: u64, x: u64, r: u64, s: u64, stride: u64) -> LayerShape {
        LayerShape {
            kind: LayerKind::Conv,
            k,
            c,
            y,
            x,
            r,
            s,
            stride,
        }
    }

    pub fn dwconv(c: u64, y: u64, x: u64, r: u64, s: u64, stride: u64) -> LayerShape {
        LayerShape {
            kind: LayerKind::DwConv,
            k: c,
            c,
            y,
            x,
            r,
            s,
            stride,
        }
    }

    /// Checks that every dimension is usable. `index` is only used to build
    /// the error message and should be the layer's position in its model.
    pub fn validate(&self, index: usize) -> Result<()> {
        let positive: [(&'static str, u64); 7] = [
            ("K", self.k),
            ("C", self.c),
            ("Y", self.y),
            ("X", self.x),
            ("R", self.r),
            ("S", self.s),
            ("stride", self.stride),
        ];
        for (field, value) in positive {
            if value == 0 {
                return Err(Error::InvalidLayer {
                    index,
                    field,
                    message: format!("must be >= 1, got {}", value),
                });
            }
        }
        if self.r > self.y {
            return Err(Error::InvalidLayer {
                index,
                field: "R",
                message: format!("filter height {} exceeds input height {}", self.r, self.y),
            });
        }
        if self.s > self.x {
            return Err(Error::InvalidLayer {
                index,
                field: "S",
                message: format!("filter width {} exceeds input width {}", self.s, self.x),
            });
        }
        if self.kind == LayerKind::DwConv && self.k != self.c {
            return Err(Error::InvalidLayer {
                index,
                field: "K",
                message: format!(
                    "depthwise layer must have K == C, got K={} C={}",
                    self.k, self.c
                ),
            });
        }
        Ok(())
    }
}

/// Technology constants: energy per access level, per-unit areas, and the
/// DRAM link width. Values are unitless but mutually consistent (energy in
/// pJ-like units, area in um^2-like units, bandwidth in elements/cycle).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HwConstants {
    /// DRAM elements transferred per cycle.
    pub bandwidth: f64,
    /// Energy per MAC operation.
    pub e_mac: f64,
    /// Energy per L1 (PE-local buffer) access.
    pub e_l1: f64,
    /// Energy per shared L2 access.
    pub e_l2: f64,
    /// Energy per DRAM element transferred.
    pub e_dram: f64,
    /// Static leakage energy per PE per cycle.
    pub e_leak: f64,
    /// Area of one PE datapath.
    pub a_pe: f64,
    /// Area per L1 buffer element.
    pub a_buf: f64,
    /// Area per L2 buffer element.
    pub a_l2: f64,
}

impl Default for HwConstants {
    fn default() -> HwConstants {
        HwConstants {
            bandwidth: 16.0,
            e_mac: 1.0,
            e_l1: 1.0,
            e_l2: 6.0,
            e_dram: 200.0,
            e_leak: 0.01,
            a_pe: 100.0,
            a_buf: 1.0,
            a_l2: 0.5,
        }
    }
}

/// Evaluated costs of running one layer on one engine configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HwMetrics {
    /// Cycles to finish the layer.
    pub latency: u64,
    /// Total energy for the layer.
    pub energy: f64,
    /// Silicon area of the engine sized for this configuration.
    pub area: f64,
    /// Average power, `energy / latency`.
    pub power: f64,
}

/// Output feature-map dims `(Y', X')` for a layer: the number of valid
/// filter positions at the given stride, with no padding.
pub fn output_dims(layer: &LayerShape) -> (u64, u64) {
    let yp = (layer.y - layer.r) / layer.stride + 1;
    let xp = (layer.x - layer.s) / layer.stride + 1;
    (yp, xp)
}

/// Multiply-accumulate count. Depthwise layers apply one filter per channel,
/// so the output-channel loop collapses.
pub fn macs(layer: &LayerShape) -> u64 {
    let (yp, xp) = output_dims(layer);
    match layer.kind {
        LayerKind::Conv | LayerKind::Gemm => layer.k * layer.c * yp * xp * layer.r * layer.s,
        LayerKind::DwConv => layer.c * yp * xp * layer.r * layer.s,
    }
}

/// L1 buffer elements each PE needs at tile depth `k`: a `R*S` weight slice
/// per tile row, one `R*S` input window, and `k` output registers.
///
/// The footprint is identical across dataflow styles; only *what* occupies
/// each slot differs.
pub fn buffer_elements(_df: DataflowStyle, k: u64, layer: &LayerShape) -> u64 {
    layer.r * layer.s * k + layer.r * layer.s + k
}

/// The two loop dimensions a style spreads across the PE array. Their
/// product bounds useful parallelism.
fn spatial_dims(df: DataflowStyle, layer: &LayerShape) -> (u64, u64) {
    let (yp, xp) = output_dims(layer);
    match df {
        DataflowStyle::Dla => {
            if layer.kind == LayerKind::DwConv {
                // No cross-channel reuse to parallelize; only the channel
                // loop itself is spatial.
                (layer.c, 1)
            } else {
                (layer.k, layer.c)
            }
        }
        DataflowStyle::Eye => (yp, layer.r),
        DataflowStyle::Shi => (yp, xp),
    }
}

/// PEs that can do useful work: allocating more than the spatially mapped
/// loops can occupy leaves the excess idle.
pub fn spatial_lanes(df: DataflowStyle, p: u64, layer: &LayerShape) -> u64 {
    let (d1, d2) = spatial_dims(df, layer);
    p.min(d1 * d2)
}

/// The temporal dimension a style must stream through its tile slots.
fn temporal_dim(df: DataflowStyle, layer: &LayerShape) -> u64 {
    let (yp, xp) = output_dims(layer);
    match df {
        DataflowStyle::Dla => {
            if layer.kind == LayerKind::DwConv {
                // Each channel's single filter fits; nothing to iterate.
                1
            } else {
                layer.k
            }
        }
        DataflowStyle::Eye => yp,
        DataflowStyle::Shi => yp * xp,
    }
}

/// How many passes over the streamed operand the tiling forces. One pass
/// covers `k * min(p, Dt)` slots of the temporal dimension `Dt`; every
/// additional pass refetches the pass-invariant operand from DRAM.
pub fn refetch_factor(df: DataflowStyle, p: u64, k: u64, layer: &LayerShape) -> u64 {
    let dt = temporal_dim(df, layer);
    dt.div_ceil(k * p.min(dt))
}

/// Base operand footprints in elements: (weights, inputs, outputs).
fn operand_sizes(layer: &LayerShape) -> (u64, u64, u64) {
    let (yp, xp) = output_dims(layer);
    match layer.kind {
        LayerKind::Conv | LayerKind::Gemm => (
            layer.k * layer.c * layer.r * layer.s,
            layer.c * layer.y * layer.x,
            layer.k * yp * xp,
        ),
        LayerKind::DwConv => (
            layer.c * layer.r * layer.s,
            layer.c * layer.y * layer.x,
            layer.c * yp * xp,
        ),
    }
}

/// Total DRAM elements moved for the layer: each operand once, plus
/// `T - 1` extra passes over the operand the style does not keep resident
/// (inputs for `Dla`, weights for `Eye`/`Shi`).
pub fn dram_traffic(df: DataflowStyle, p: u64, k: u64, layer: &LayerShape) -> u64 {
    let (weights, inputs, outputs) = operand_sizes(layer);
    let t = refetch_factor(df, p, k, layer);
    let refetched = match df {
        DataflowStyle::Dla => inputs,
        DataflowStyle::Eye | DataflowStyle::Shi => weights,
    };
    weights + inputs + outputs + (t - 1) * refetched
}

/// Roofline latency in cycles: the layer is either compute-bound
/// (`macs / lanes`) or bandwidth-bound (`traffic / bandwidth`), whichever
/// is slower.
pub fn latency(df: DataflowStyle, p: u64, k: u64, layer: &LayerShape, hw: &HwConstants) -> u64 {
    let compute = macs(layer).div_ceil(spatial_lanes(df, p, layer));
    let mem = (dram_traffic(df, p, k, layer) as f64 / hw.bandwidth).ceil() as u64;
    compute.max(mem)
}

/// Energy: MACs, L1 reads (three operands per MAC), L2 transit (in and out
/// of the shared buffer per DRAM element), DRAM transfer, plus leakage of
/// all provisioned PEs over the layer's runtime.
pub fn energy(df: DataflowStyle, p: u64, k: u64, layer: &LayerShape, hw: &HwConstants) -> f64 {
    let m = macs(layer) as f64;
    let traffic = dram_traffic(df, p, k, layer) as f64;
    let cycles = latency(df, p, k, layer, hw) as f64;
    hw.e_mac * m
        + hw.e_l1 * 3.0 * m
        + hw.e_l2 * 2.0 * traffic
        + hw.e_dram * traffic
        + hw.e_leak * p as f64 * cycles
}

/// Engine area: PE datapaths, their L1 buffers, and a shared L2 sized at
/// twice the aggregate L1 capacity.
pub fn area(df: DataflowStyle, p: u64, k: u64, layer: &LayerShape, hw: &HwConstants) -> f64 {
    let be = buffer_elements(df, k, layer) as f64;
    let pf = p as f64;
    pf * hw.a_pe + pf * be * hw.a_buf + 2.0 * pf * be * hw.a_l2
}

/// Validated entry point: checks the layer and knobs, then evaluates all
/// four metrics at once.
pub fn evaluate(
    df: DataflowStyle,
    p: u64,
    k: u64,
    layer: &LayerShape,
    hw: &HwConstants,
) -> Result<HwMetrics> {
    layer.validate(0)?;
    if p == 0 {
        return Err(Error::InvalidConfig("PE count must be >= 1".to_string()));
    }
    if k == 0 {
        return Err(Error::InvalidConfig(
            "buffer tile depth must be >= 1".to_string(),
        ));
    }
    let latency = latency(df, p, k, layer, hw);
    let energy = energy(df, p, k, layer, hw);
    let area = area(df, p, k, layer, hw);
    Ok(HwMetrics {
        latency,
        energy,
        area,
        power: energy / latency as f64,
    })
}

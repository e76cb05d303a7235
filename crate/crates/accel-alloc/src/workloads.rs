//! Workload descriptions: models as ordered lists of layers.
//!
//! Models arrive either as JSON files or as named built-ins. The JSON
//! schema tags each layer with its operator kind; GEMM entries are given
//! in matrix terms (`M x K` times `K x N`) and are normalized into
//! convolution coordinates at parse time so the rest of the crate deals
//! with a single shape vocabulary.

use serde::{Deserialize, Serialize};

use crate::cost_model::{LayerKind, LayerShape};
use crate::error::{Error, Result};

/// A named sequence of layers. Layer order matters: search methods assign
/// resources layer by layer in this order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDesc {
    pub name: String,
    pub layers: Vec<LayerShape>,
}

impl ModelDesc {
    /// Validates every layer, reporting the first failure with its index.
    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidModel("model has no layers".to_string()));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            layer.validate(i)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.layers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }
}

fn default_stride() -> u64 {
    1
}

/// On-disk layer representation. Field names mirror the usual loop-nest
/// naming (K output channels, C input channels, YxX input map, RxS filter).
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
enum RawLayer {
    #[serde(rename = "CONV")]
    Conv {
        #[serde(rename = "K")]
        k: u64,
        #[serde(rename = "C")]
        c: u64,
        #[serde(rename = "Y")]
        y: u64,
        #[serde(rename = "X")]
        x: u64,
        #[serde(rename = "R")]
        r: u64,
        #[serde(rename = "S")]
        s: u64,
        #[serde(default = "default_stride")]
        stride: u64,
    },
    #[serde(rename = "DWCONV")]
    DwConv {
        #[serde(rename = "C")]
        c: u64,
        #[serde(rename = "Y")]
        y: u64,
        #[serde(rename = "X")]
        x: u64,
        #[serde(rename = "R")]
        r: u64,
        #[serde(rename = "S")]
        s: u64,
        #[serde(default = "default_stride")]
        stride: u64,
    },
    #[serde(rename = "GEMM")]
    Gemm {
        #[serde(rename = "M")]
        m: u64,
        #[serde(rename = "N")]
        n: u64,
        #[serde(rename = "K")]
        k: u64,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct RawModel {
    #[serde(default)]
    name: String,
    layers: Vec<RawLayer>,
}

/// Maps an `M x K @ K x N` matrix product onto convolution coordinates:
/// N output channels, K input channels, an `M x 1` map, and a unit filter.
/// The MAC count is preserved exactly (`M * N * K`).
pub fn gemm_to_layer(m: u64, n: u64, k: u64) -> LayerShape {
    LayerShape {
        kind: LayerKind::Gemm,
        k: n,
        c: k,
        y: m,
        x: 1,
        r: 1,
        s: 1,
        stride: 1,
    }
}

fn convert_layer(index: usize, raw: &RawLayer) -> Result<LayerShape> {
    let shape = match *raw {
        RawLayer::Conv {
            k,
            c,
            y,
            x,
            r,
            s,
            stride,
        } => LayerShape {
            kind: LayerKind::Conv,
            k,
            c,
            y,
            x,
            r,
            s,
            stride,
        },
        RawLayer::DwConv {
            c,
            y,
            x,
            r,
            s,
            stride,
        } => LayerShape {
            kind: LayerKind::DwConv,
            k: c,
            c,
            y,
            x,
            r,
            s,
            stride,
        },
        RawLayer::Gemm { m, n, k } => {
            // Validate in matrix terms so the error names the field the
            // user actually wrote.
            for (field, value) in [("M", m), ("N", n), ("K", k)] {
                if value == 0 {
                    return Err(Error::InvalidLayer {
                        index,
                        field,
                        message: format!("must be >= 1, got {}", value),
                    });
                }
            }
            gemm_to_layer(m, n, k)
        }
    };
    shape.validate(index)?;
    Ok(shape)
}

/// Parses a model from JSON text. Syntax errors carry serde's line/column
/// message; shape errors name the offending layer index and field.
pub fn parse_model(text: &str) -> Result<ModelDesc> {
    let raw: RawModel = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if raw.layers.is_empty() {
        return Err(Error::InvalidModel("model has no layers".to_string()));
    }
    let mut layers = Vec::with_capacity(raw.layers.len());
    for (i, r) in raw.layers.iter().enumerate() {
        layers.push(convert_layer(i, r)?);
    }
    Ok(ModelDesc {
        name: raw.name,
        layers,
    })
}

/// Serializes a model back to the JSON schema accepted by [`parse_model`].
/// GEMM layers are emitted in their original matrix terms, so a
/// parse/serialize round trip is lossless.
pub fn serialize_model(model: &ModelDesc) -> String {
    let layers = model
        .layers
        .iter()
        .map(|l| match l.kind {
            LayerKind::Conv => RawLayer::Conv {
                k: l.k,
                c: l.c,
                y: l.y,
                x: l.x,
                r: l.r,
                s: l.s,
                stride: l.stride,
            },
            LayerKind::DwConv => RawLayer::DwConv {
                c: l.c,
                y: l.y,
                x: l.x,
                r: l.r,
                s: l.s,
                stride: l.stride,
            },
            LayerKind::Gemm => RawLayer::Gemm {
                m: l.y,
                n: l.k,
                k: l.c,
            },
        })
        .collect();
    let raw = RawModel {
        name: model.name.clone(),
        layers,
    };
    serde_json::to_string_pretty(&raw).expect("model serialization cannot fail")
}

/// Reads and parses a model file.
pub fn load_model(path: &std::path::Path) -> Result<ModelDesc> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text)
}

pub const BUILTIN_NAMES: [&str; 3] = ["toy2", "toy3", "mobilenet_v2_like"];

const MOBILENET_V2_LIKE: &str = include_str!("../data/mobilenet_v2_like.json");

/// Returns one of the built-in models:
///
/// * `toy2` - two small layers (conv + depthwise); its design space is tiny
///   enough to enumerate exhaustively, which makes it the reference
///   workload for optimality checks.
/// * `toy3` - three layers covering all operator kinds.
/// * `mobilenet_v2_like` - a 52-layer network with the channel/resolution
///   progression of a mobile inverted-bottleneck classifier.
pub fn builtin(name: &str) -> Result<ModelDesc> {
    match name {
        "toy2" => Ok(ModelDesc {
            name: "toy2".to_string(),
            layers: vec![
                LayerShape::conv(4, 3, 6, 6, 3, 3, 1),
                LayerShape::dwconv(8, 6, 6, 3, 3, 1),
            ],
        }),
        "toy3" => Ok(ModelDesc {
            name: "toy3".to_string(),
            layers: vec![
                LayerShape::conv(4, 3, 8, 8, 3, 3, 1),
                LayerShape::dwconv(6, 6, 6, 3, 3, 1),
                gemm_to_layer(8, 4, 16),
            ],
        }),
        "mobilenet_v2_like" => parse_model(MOBILENET_V2_LIKE),
        other => Err(Error::UnknownBuiltin(other.to_string())),
    }
}

/// Resolves a model argument: a built-in name first, then a file path.
pub fn resolve_model(spec: &str) -> Result<ModelDesc> {
    if BUILTIN_NAMES.contains(&spec) {
        builtin(spec)
    } else {
        load_model(std::path::Path::new(spec))
    }
}

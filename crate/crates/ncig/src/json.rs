//! JSON schemas for the domain types.
//!
//! Matrices are row-major lists of `[re, im]` pairs. The schemas:
//!
//! ```text
//! algebra    {"blocks": [n_1, …]}
//! functional {"algebra": …, "blocks": [matrix, …]}
//! lp_vector  {"algebra": …, "p": real, "blocks": [matrix, …]}
//! set        {"variant": "cone",   "generators": [lp_vector, …]}
//!            {"variant": "affine", "base": lp_vector, "directions": […]}
//!            {"variant": "ball",   "center": lp_vector, "radius": real}
//! channel    {"in": algebra, "out": algebra, "kraus": [matrix, …]}
//! config     {"seed", "dims", "alphas", "sample_counts", "tolerances",
//!             "output": {"path", "format"}}
//! ```
//!
//! Every parse failure is reported as [`Error::Parse`]; emitted floats
//! carry 17 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Deserialize;

use crate::algebra::{AlgebraShape, NormalFunctional};
use crate::channels::KrausChannel;
use crate::linalg::CMat;
use crate::lp::LpVector;
use crate::projection::ConvexSetSpec;
use crate::report::{fmt_float, ReportFormat};
use crate::verify::SuiteConfig;
use crate::{Error, Result};

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

#[derive(Deserialize)]
struct ShapeJson {
    blocks: Vec<usize>,
}

type MatrixJson = Vec<[f64; 2]>;

#[derive(Deserialize)]
struct FunctionalJson {
    algebra: ShapeJson,
    blocks: Vec<MatrixJson>,
}

#[derive(Deserialize)]
struct LpVectorJson {
    algebra: ShapeJson,
    p: f64,
    blocks: Vec<MatrixJson>,
}

#[derive(Deserialize)]
#[serde(tag = "variant")]
enum SetJson {
    #[serde(rename = "cone")]
    Cone { generators: Vec<LpVectorJson> },
    #[serde(rename = "affine")]
    Affine { base: LpVectorJson, directions: Vec<LpVectorJson> },
    #[serde(rename = "ball")]
    Ball { center: LpVectorJson, radius: f64 },
}

#[derive(Deserialize)]
struct ChannelJson {
    #[serde(rename = "in")]
    in_shape: ShapeJson,
    #[serde(rename = "out")]
    out_shape: ShapeJson,
    kraus: Vec<MatrixJson>,
}

#[derive(Deserialize, Default)]
struct ConfigJson {
    seed: Option<u64>,
    dims: Option<Vec<Vec<usize>>>,
    alphas: Option<Vec<f64>>,
    sample_counts: Option<BTreeMap<String, usize>>,
    tolerances: Option<BTreeMap<String, f64>>,
    output: Option<OutputJson>,
}

#[derive(Deserialize)]
struct OutputJson {
    path: Option<String>,
    format: Option<String>,
}

/// Where a parsed config wants its report to go.
#[derive(Debug, Clone, Default)]
pub struct OutputSpec {
    pub path: Option<String>,
    pub format: Option<ReportFormat>,
}

fn matrix_from_json(m: &MatrixJson, rows: usize, cols: usize) -> Result<CMat> {
    if m.len() != rows * cols {
        return Err(Error::Parse(format!(
            "matrix has {} entries, expected {rows}x{cols} = {}",
            m.len(),
            rows * cols
        )));
    }
    Ok(CMat::from_fn(rows, cols, |r, c| {
        let [re, im] = m[r * cols + c];
        Complex64::new(re, im)
    }))
}

fn shape_from_json(s: &ShapeJson) -> Result<AlgebraShape> {
    AlgebraShape::new(s.blocks.clone()).map_err(parse_err)
}

fn blocks_from_json(shape: &AlgebraShape, blocks: &[MatrixJson]) -> Result<Vec<CMat>> {
    if blocks.len() != shape.num_blocks() {
        return Err(Error::Parse(format!(
            "{} matrix blocks for a {}-block algebra",
            blocks.len(),
            shape.num_blocks()
        )));
    }
    shape
        .block_dims()
        .iter()
        .zip(blocks)
        .map(|(&n, m)| matrix_from_json(m, n, n))
        .collect()
}

pub fn parse_shape(text: &str) -> Result<AlgebraShape> {
    let s: ShapeJson = serde_json::from_str(text).map_err(parse_err)?;
    shape_from_json(&s)
}

pub fn parse_functional(text: &str) -> Result<NormalFunctional> {
    let f: FunctionalJson = serde_json::from_str(text).map_err(parse_err)?;
    let shape = shape_from_json(&f.algebra)?;
    let blocks = blocks_from_json(&shape, &f.blocks)?;
    NormalFunctional::new(shape, blocks).map_err(parse_err)
}

fn lp_vector_from_json(v: &LpVectorJson) -> Result<LpVector> {
    let shape = shape_from_json(&v.algebra)?;
    let blocks = blocks_from_json(&shape, &v.blocks)?;
    LpVector::new(shape, v.p, blocks).map_err(parse_err)
}

pub fn parse_lp_vector(text: &str) -> Result<LpVector> {
    let v: LpVectorJson = serde_json::from_str(text).map_err(parse_err)?;
    lp_vector_from_json(&v)
}

pub fn parse_set(text: &str) -> Result<ConvexSetSpec> {
    let s: SetJson = serde_json::from_str(text).map_err(parse_err)?;
    match s {
        SetJson::Cone { generators } => {
            let gens = generators
                .iter()
                .map(lp_vector_from_json)
                .collect::<Result<Vec<_>>>()?;
            ConvexSetSpec::cone(gens).map_err(parse_err)
        }
        SetJson::Affine { base, directions } => {
            let b = lp_vector_from_json(&base)?;
            let dirs = directions
                .iter()
                .map(lp_vector_from_json)
                .collect::<Result<Vec<_>>>()?;
            ConvexSetSpec::affine(b, dirs).map_err(parse_err)
        }
        SetJson::Ball { center, radius } => {
            let c = lp_vector_from_json(&center)?;
            ConvexSetSpec::ball(c, radius).map_err(parse_err)
        }
    }
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    let c: ChannelJson = serde_json::from_str(text).map_err(parse_err)?;
    let in_shape = shape_from_json(&c.in_shape)?;
    let out_shape = shape_from_json(&c.out_shape)?;
    let rows = out_shape.total_dim();
    let cols = in_shape.total_dim();
    let kraus = c
        .kraus
        .iter()
        .map(|m| matrix_from_json(m, rows, cols))
        .collect::<Result<Vec<_>>>()?;
    KrausChannel::new(in_shape, out_shape, kraus).map_err(parse_err)
}

/// Parses a suite config, filling unspecified fields from the defaults.
pub fn parse_config(text: &str) -> Result<(SuiteConfig, OutputSpec)> {
    let c: ConfigJson = serde_json::from_str(text).map_err(parse_err)?;
    let mut cfg = SuiteConfig::default();
    if let Some(seed) = c.seed {
        cfg.seed = seed;
    }
    if let Some(dims) = c.dims {
        cfg.dims = dims
            .into_iter()
            .map(|d| AlgebraShape::new(d).map_err(parse_err))
            .collect::<Result<Vec<_>>>()?;
    }
    if let Some(alphas) = c.alphas {
        cfg.alphas = alphas;
    }
    if let Some(sc) = c.sample_counts {
        cfg.sample_counts = sc;
    }
    if let Some(tols) = c.tolerances {
        cfg.tolerances = tols;
    }
    let output = match c.output {
        Some(o) => OutputSpec {
            path: o.path,
            format: match o.format {
                Some(f) => Some(f.parse()?),
                None => None,
            },
        },
        None => OutputSpec::default(),
    };
    Ok((cfg, output))
}

fn write_matrix(out: &mut String, m: &CMat) {
    out.push('[');
    let rows = m.nrows();
    let cols = m.ncols();
    for r in 0..rows {
        for c in 0..cols {
            if r + c > 0 {
                out.push(',');
            }
            let z = m[(r, c)];
            let _ = write!(out, "[{},{}]", fmt_float(z.re), fmt_float(z.im));
        }
    }
    out.push(']');
}

fn write_shape(out: &mut String, shape: &AlgebraShape) {
    out.push_str("{\"blocks\":[");
    for (i, n) in shape.block_dims().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{n}");
    }
    out.push_str("]}");
}

fn write_blocks(out: &mut String, blocks: &[CMat]) {
    out.push('[');
    for (i, b) in blocks.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_matrix(out, b);
    }
    out.push(']');
}

pub fn functional_to_json(w: &NormalFunctional) -> String {
    let mut out = String::from("{\"algebra\":");
    write_shape(&mut out, w.shape());
    out.push_str(",\"blocks\":");
    write_blocks(&mut out, w.blocks());
    out.push('}');
    out
}

pub fn lp_vector_to_json(v: &LpVector) -> String {
    let mut out = String::from("{\"algebra\":");
    write_shape(&mut out, v.shape());
    let _ = write!(out, ",\"p\":{},\"blocks\":", fmt_float(v.order()));
    write_blocks(&mut out, v.blocks());
    out.push('}');
    out
}

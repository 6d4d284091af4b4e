//! Model persistence.
//!
//! Models are stored as JSON with an explicit format version. Floats are
//! written in shortest-round-trip form, so a load returns bit-identical
//! weights. Loading validates every array shape against the architecture
//! implied by `k` and the hidden depth, and rejects non-finite values, so a
//! corrupted or hand-edited file fails loudly instead of mispredicting.

use crate::error::{Error, Result};
use crate::learn::net::{ScalingPredictor, HIDDEN_WIDTH, INPUT_DIM};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: ScalingPredictor,
}

pub fn save_model(model: &ScalingPredictor, path: &Path) -> Result<()> {
    validate(model)?;
    let file = ModelFile { format_version: MODEL_FORMAT_VERSION, model: model.clone() };
    let json =
        serde_json::to_string_pretty(&file).map_err(|e| Error::ModelFile(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ScalingPredictor> {
    let text = std::fs::read_to_string(path)?;
    let file: ModelFile =
        serde_json::from_str(&text).map_err(|e| Error::ModelFile(e.to_string()))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelFile(format!(
            "unsupported format version {} (expected {MODEL_FORMAT_VERSION})",
            file.format_version
        )));
    }
    validate(&file.model)?;
    Ok(file.model)
}

fn validate(m: &ScalingPredictor) -> Result<()> {
    let fail = |msg: String| Err(Error::ModelFile(msg));
    if m.k < 1 {
        return fail("softmax width must be at least 1".into());
    }
    if m.hidden.is_empty() {
        return fail("model has no hidden blocks".into());
    }
    if m.feat_mean.len() != INPUT_DIM || m.feat_std.len() != INPUT_DIM {
        return fail(format!(
            "standardisation vectors must have length {INPUT_DIM}, got {} and {}",
            m.feat_mean.len(),
            m.feat_std.len()
        ));
    }
    if m.feat_std.iter().any(|&s| !(s > 0.0)) {
        return fail("feature standard deviations must be positive".into());
    }
    let mut input = INPUT_DIM;
    for (i, blk) in m.hidden.iter().enumerate() {
        if blk.dense.w.shape() != [input, HIDDEN_WIDTH] {
            return fail(format!(
                "hidden block {i}: dense weights are {:?}, expected [{input}, {HIDDEN_WIDTH}]",
                blk.dense.w.shape()
            ));
        }
        for (name, len) in [
            ("bias", blk.dense.b.len()),
            ("gamma", blk.bn.gamma.len()),
            ("beta", blk.bn.beta.len()),
            ("running_mean", blk.bn.running_mean.len()),
            ("running_var", blk.bn.running_var.len()),
        ] {
            if len != HIDDEN_WIDTH {
                return fail(format!(
                    "hidden block {i}: {name} has length {len}, expected {HIDDEN_WIDTH}"
                ));
            }
        }
        input = HIDDEN_WIDTH;
    }
    if m.softmax_head.w.shape() != [HIDDEN_WIDTH, m.k] || m.softmax_head.b.len() != m.k {
        return fail(format!(
            "softmax head shapes {:?}/{} do not match k = {}",
            m.softmax_head.w.shape(),
            m.softmax_head.b.len(),
            m.k
        ));
    }
    if m.output.w.shape() != [m.k, 1] || m.output.b.len() != 1 {
        return fail(format!(
            "readout shapes {:?}/{} do not match k = {}",
            m.output.w.shape(),
            m.output.b.len(),
            m.k
        ));
    }

    let finite = m
        .hidden
        .iter()
        .all(|blk| {
            blk.dense.w.iter().all(|v| v.is_finite())
                && blk.dense.b.iter().all(|v| v.is_finite())
                && blk.bn.gamma.iter().all(|v| v.is_finite())
                && blk.bn.beta.iter().all(|v| v.is_finite())
                && blk.bn.running_mean.iter().all(|v| v.is_finite())
                && blk.bn.running_var.iter().all(|v| v.is_finite())
        })
        && m.softmax_head.w.iter().all(|v| v.is_finite())
        && m.softmax_head.b.iter().all(|v| v.is_finite())
        && m.output.w.iter().all(|v| v.is_finite())
        && m.output.b.iter().all(|v| v.is_finite())
        && m.feat_mean.iter().all(|v| v.is_finite());
    if !finite {
        return fail("model contains non-finite values".into());
    }
    Ok(())
}

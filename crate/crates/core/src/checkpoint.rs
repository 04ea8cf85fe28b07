//! Checkpoints: a JSON metadata file plus a raw parameter file.
//!
//! The parameter file holds every array of [`ParamArrays`] concatenated in
//! its fixed order (see there), each value an IEEE-754 binary64 in
//! little-endian byte order, with no header. It sits next to the metadata
//! file, named by `params_file`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AblationConfig, ModelParams, Norm, ParamArrays};

pub const MODEL_NAME: &str = "SectorE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointMeta {
    pub model: String,
    pub dim: usize,
    pub n_entities: usize,
    pub n_relations: usize,
    pub beta: f64,
    pub norm: Norm,
    pub ablation: AblationConfig,
    pub step: u64,
    pub params_file: String,
}

impl CheckpointMeta {
    pub fn describe(params: &ModelParams, norm: Norm, ablation: AblationConfig, step: u64) -> Self {
        CheckpointMeta {
            model: MODEL_NAME.to_owned(),
            dim: params.dim(),
            n_entities: params.n_entities(),
            n_relations: params.n_relations(),
            beta: params.beta,
            norm,
            ablation,
            step,
            params_file: String::new(),
        }
    }
}

pub fn encode_params(arrays: &ParamArrays) -> Vec<u8> {
    let mut out = Vec::with_capacity(arrays.len() * 8);
    for slice in arrays.slices() {
        for x in slice {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

pub fn decode_params(bytes: &[u8], n_entities: usize, n_relations: usize, dim: usize) -> Result<ParamArrays> {
    let mut arrays = ParamArrays::zeros(n_entities, n_relations, dim);
    let expected = arrays.len() * 8;
    if bytes.len() != expected {
        return Err(Error::Checkpoint(format!(
            "parameter file has {} bytes, expected {expected} for {n_entities} entities, {n_relations} relations, d={dim}",
            bytes.len()
        )));
    }
    let mut chunks = bytes.chunks_exact(8);
    for slice in arrays.slices_mut() {
        for (x, chunk) in slice.iter_mut().zip(&mut chunks) {
            *x = f64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
        }
    }
    Ok(arrays)
}

/// Write `path` (metadata) and its sibling `.bin` parameter file.
pub fn save_checkpoint(path: &Path, params: &ModelParams, meta: &CheckpointMeta) -> Result<()> {
    let bin = path.with_extension("bin");
    let mut meta = meta.clone();
    meta.params_file = bin
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&bin, encode_params(&params.arrays)).map_err(|e| Error::io(&bin, e))?;
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Json {
        path: path.to_owned(),
        source: e,
    })?;
    fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<(ModelParams, CheckpointMeta)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let meta: CheckpointMeta = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: path.to_owned(),
        source: e,
    })?;
    if meta.model != MODEL_NAME {
        return Err(Error::Checkpoint(format!(
            "{} holds model `{}`, expected `{MODEL_NAME}`",
            path.display(),
            meta.model
        )));
    }
    let bin = path
        .parent()
        .map(|dir| dir.join(&meta.params_file))
        .unwrap_or_else(|| meta.params_file.clone().into());
    let bytes = fs::read(&bin).map_err(|e| Error::io(&bin, e))?;
    let arrays = decode_params(&bytes, meta.n_entities, meta.n_relations, meta.dim)?;
    Ok((
        ModelParams {
            arrays,
            beta: meta.beta,
        },
        meta,
    ))
}

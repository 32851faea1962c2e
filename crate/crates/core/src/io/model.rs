//! Versioned binary model files: 4-byte magic, 1 version byte, bincode payload.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::learner::Model;

pub const MODEL_MAGIC: [u8; 4] = *b"GSTM";
pub const MODEL_VERSION: u8 = 1;

const HEADER_LEN: usize = MODEL_MAGIC.len() + 1;

/// Frames any serializable state (models, checkpoints) in the file format.
pub fn encode<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = Vec::with_capacity(HEADER_LEN);
    bytes.extend_from_slice(&MODEL_MAGIC);
    bytes.push(MODEL_VERSION);
    bincode::serialize_into(&mut bytes, value).map_err(|e| Error::Corrupt(e.to_string()))?;
    Ok(bytes)
}

pub fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    if bytes.len() < HEADER_LEN || bytes[..MODEL_MAGIC.len()] != MODEL_MAGIC {
        return Err(Error::Corrupt("missing model file header".into()));
    }
    let found = bytes[MODEL_MAGIC.len()];
    if found != MODEL_VERSION {
        return Err(Error::VersionMismatch {
            expected: MODEL_VERSION,
            found,
        });
    }
    bincode::deserialize(&bytes[HEADER_LEN..]).map_err(|e| Error::Corrupt(e.to_string()))
}

pub fn encode_model(model: &Model) -> Result<Vec<u8>> {
    encode(model)
}

pub fn decode_model(bytes: &[u8]) -> Result<Model> {
    decode(bytes)
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    std::fs::write(path, encode_model(model)?)?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<Model> {
    decode_model(&std::fs::read(path)?)
}

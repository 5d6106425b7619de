//! Binary checkpoint format, little-endian throughout:
//!
//! ```text
//! magic "LTLGCKPT" | version u32 | kind u32 | index encoding u32 | tensor count u32
//! (rows u32, cols u32) × count
//! row-major f64 blocks, one per tensor
//! ```

use thiserror::Error;

use ltlgnn_core::encoding::IndexEncoding;

use crate::model::{build_model, GraphClassifier, ModelKind};
use crate::tensor::Tensor;

const MAGIC: &[u8; 8] = b"LTLGCKPT";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckpointError {
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error("unknown model kind code {0}")]
    UnknownKind(u32),
    #[error("unknown index encoding code {0}")]
    UnknownIndices(u32),
    #[error("checkpoint holds a {found} model, expected {expected}")]
    KindMismatch { expected: ModelKind, found: ModelKind },
    #[error("tensor shapes do not match a {0} model")]
    ShapeMismatch(ModelKind),
    #[error("checkpoint truncated")]
    Truncated,
    #[error("{0} trailing bytes after checkpoint")]
    Trailing(usize),
}

pub fn save_checkpoint(model: &dyn GraphClassifier) -> Vec<u8> {
    let state = model.state();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    for word in [VERSION, model.kind().code(), model.indices().code(), state.len() as u32] {
        out.extend_from_slice(&word.to_le_bytes());
    }
    for t in &state {
        out.extend_from_slice(&(t.nrows() as u32).to_le_bytes());
        out.extend_from_slice(&(t.ncols() as u32).to_le_bytes());
    }
    for t in &state {
        for x in t.iter() {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CheckpointError> {
        if self.bytes.len() < n {
            return Err(CheckpointError::Truncated);
        }
        let (head, rest) = self.bytes.split_at(n);
        self.bytes = rest;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CheckpointError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, CheckpointError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Rebuilds the model recorded in `bytes`. Nothing is returned unless the
/// whole checkpoint parses.
pub fn load_checkpoint(bytes: &[u8]) -> Result<Box<dyn GraphClassifier>, CheckpointError> {
    let mut r = Reader { bytes };
    if r.take(MAGIC.len())? != MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CheckpointError::Version(version));
    }
    let code = r.u32()?;
    let kind = ModelKind::from_code(code).ok_or(CheckpointError::UnknownKind(code))?;
    let code = r.u32()?;
    let indices = IndexEncoding::from_code(code).ok_or(CheckpointError::UnknownIndices(code))?;
    let count = r.u32()? as usize;
    let mut model = build_model(kind, 0);
    model.set_indices(indices);
    let expected: Vec<(usize, usize)> = model.state().iter().map(|t| (t.nrows(), t.ncols())).collect();
    if count != expected.len() {
        return Err(CheckpointError::ShapeMismatch(kind));
    }
    for &shape in &expected {
        if (r.u32()? as usize, r.u32()? as usize) != shape {
            return Err(CheckpointError::ShapeMismatch(kind));
        }
    }
    let mut tensors = Vec::with_capacity(count);
    for &(rows, cols) in &expected {
        let data = (0..rows * cols).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
        tensors.push(Tensor::from_shape_vec((rows, cols), data).unwrap());
    }
    if !r.bytes.is_empty() {
        return Err(CheckpointError::Trailing(r.bytes.len()));
    }
    for (slot, t) in model.state_mut().into_iter().zip(tensors) {
        *slot = t;
    }
    Ok(model)
}

/// [`load_checkpoint`], additionally requiring a given model kind.
pub fn load_checkpoint_as(bytes: &[u8], expected: ModelKind) -> Result<Box<dyn GraphClassifier>, CheckpointError> {
    let model = load_checkpoint(bytes)?;
    if model.kind() != expected {
        return Err(CheckpointError::KindMismatch { expected, found: model.kind() });
    }
    Ok(model)
}

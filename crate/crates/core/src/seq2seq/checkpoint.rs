//! Binary model checkpoints.
//!
//! Layout, all integers `u32` little-endian:
//! `b"S2S1"`, word count, then each word as (byte length, UTF-8 bytes);
//! tensor count, then each tensor as (name length, name, number of dims,
//! dims, `f64` little-endian values). Embeddings are stored as the tensor
//! `embeddings`.

use std::fs;
use std::path::Path;

use super::model::{Seq2SeqParams, Weights};
use super::tensor::Matrix;
use super::ModelError;
use crate::text::{EmbeddingTable, Vocabulary};

pub const MAGIC: &[u8; 4] = b"S2S1";

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

fn put_tensor(out: &mut Vec<u8>, name: &str, dims: &[usize], values: impl Iterator<Item = f64>) {
    put_u32(out, name.len());
    out.extend_from_slice(name.as_bytes());
    put_u32(out, dims.len());
    for &d in dims {
        put_u32(out, d);
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode_checkpoint(params: &Seq2SeqParams) -> Vec<u8> {
    let mut out = MAGIC.to_vec();
    let words = params.vocab().words();
    put_u32(&mut out, words.len());
    for w in words {
        put_u32(&mut out, w.len());
        out.extend_from_slice(w.as_bytes());
    }
    let tensors = params.weights().tensors();
    put_u32(&mut out, tensors.len() + 1);
    for (name, m) in &tensors {
        put_tensor(&mut out, name, &[m.rows(), m.cols()], m.data().iter().copied());
    }
    let emb = params.embeddings();
    put_tensor(
        &mut out,
        "embeddings",
        &[emb.len(), emb.dim()],
        emb.vectors().iter().flatten().copied(),
    );
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8], ModelError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| ModelError::MalformedCheckpoint("truncated file".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize, ModelError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn string(&mut self) -> Result<String, ModelError> {
        let n = self.u32()?;
        String::from_utf8(self.take(n)?.to_vec())
            .map_err(|_| ModelError::MalformedCheckpoint("string is not UTF-8".into()))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Seq2SeqParams, ModelError> {
    let bad = |m: &str| ModelError::MalformedCheckpoint(m.to_string());
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(bad("missing S2S1 magic"));
    }
    let n_words = r.u32()?;
    let words = (0..n_words).map(|_| r.string()).collect::<Result<Vec<_>, _>>()?;
    let vocab = Vocabulary::from_words(words).ok_or_else(|| bad("invalid vocabulary"))?;

    let n_tensors = r.u32()?;
    let mut tensors = Vec::with_capacity(n_tensors);
    for _ in 0..n_tensors {
        let name = r.string()?;
        let ndims = r.u32()?;
        if ndims != 2 {
            return Err(bad(&format!("tensor {name} has {ndims} dims, expected 2")));
        }
        let (rows, cols) = (r.u32()?, r.u32()?);
        let len = rows.checked_mul(cols).ok_or_else(|| bad("tensor too large"))?;
        let raw = r.take(len.checked_mul(8).ok_or_else(|| bad("tensor too large"))?)?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        tensors.push((name, Matrix::from_vec(rows, cols, data).unwrap()));
    }
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    let mut find = |name: &str| -> Result<Matrix, ModelError> {
        let i = tensors
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| bad(&format!("missing tensor {name}")))?;
        Ok(tensors.swap_remove(i).1)
    };

    let emb = find("embeddings")?;
    let vectors = (0..emb.rows()).map(|i| emb.row(i).to_vec()).collect();
    let embeddings = EmbeddingTable::from_vectors(vectors, 0).ok_or_else(|| bad("empty embeddings"))?;
    let enc_in = find("encoder.forget.input")?;
    let dec_in = find("decoder.reset.input")?;
    let mut weights = Weights::zeros(enc_in.cols(), dec_in.cols(), enc_in.rows(), vocab.len());
    for (name, slot) in weights.tensors_mut() {
        let m = match name.as_str() {
            "encoder.forget.input" => enc_in.clone(),
            "decoder.reset.input" => dec_in.clone(),
            other => find(other)?,
        };
        if m.shape() != slot.shape() {
            return Err(bad(&format!(
                "tensor {name} has shape {:?}, expected {:?}",
                m.shape(),
                slot.shape()
            )));
        }
        *slot = m;
    }
    if !weights.is_finite() {
        return Err(bad("non-finite weights"));
    }
    Seq2SeqParams::new(weights, embeddings, vocab)
}

pub fn save_checkpoint(path: &Path, params: &Seq2SeqParams) -> Result<(), ModelError> {
    fs::write(path, encode_checkpoint(params))?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Seq2SeqParams, ModelError> {
    decode_checkpoint(&fs::read(path)?)
}

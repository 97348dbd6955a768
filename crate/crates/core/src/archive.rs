//! `GTA1` tensor archive.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! b"GTA1"  u32 count
//! repeat count times:
//!     u32 name_len  name (UTF-8)  u8 dtype  u8 ndim  ndim × u64 dims  payload
//! ```
//!
//! dtype codes: 0 = f32, 1 = f64, 2 = i64. Payloads are row-major.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"GTA1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum DType {
    F32 = 0,
    F64 = 1,
    I64 = 2,
}

impl DType {
    pub fn from_code(code: u8) -> Result<Self> {
        match code {
            0 => Ok(DType::F32),
            1 => Ok(DType::F64),
            2 => Ok(DType::I64),
            other => Err(Error::Archive(format!("unknown dtype code {other}"))),
        }
    }

    pub fn width(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 | DType::I64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
    I64(Vec<i64>),
}

impl TensorData {
    pub fn dtype(&self) -> DType {
        match self {
            TensorData::F32(_) => DType::F32,
            TensorData::F64(_) => DType::F64,
            TensorData::I64(_) => DType::I64,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
            TensorData::I64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Converts real data to f32. Integer tensors are rejected.
    pub fn to_f32(&self) -> Result<Vec<f32>> {
        match self {
            TensorData::F32(v) => Ok(v.clone()),
            TensorData::F64(v) => Ok(v.iter().map(|&x| x as f32).collect()),
            TensorData::I64(_) => Err(Error::Archive("expected a real tensor, found i64".into())),
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            TensorData::F32(v) => v.iter().all(|x| x.is_finite()),
            TensorData::F64(v) => v.iter().all(|x| x.is_finite()),
            TensorData::I64(_) => true,
        }
    }

    fn write_le(&self, out: &mut Vec<u8>) {
        match self {
            TensorData::F32(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::F64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::I64(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }

    fn read_le(dtype: DType, bytes: &[u8]) -> Self {
        match dtype {
            DType::F32 => TensorData::F32(
                bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
            DType::F64 => TensorData::F64(
                bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
            DType::I64 => TensorData::I64(
                bytes
                    .chunks_exact(8)
                    .map(|c| i64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub name: String,
    pub shape: Vec<u64>,
    pub data: TensorData,
}

impl Tensor {
    pub fn new(name: impl Into<String>, shape: Vec<u64>, data: TensorData) -> Self {
        Tensor {
            name: name.into(),
            shape,
            data,
        }
    }

    pub fn numel(&self) -> u64 {
        self.shape.iter().product()
    }

    fn validate(&self) -> Result<()> {
        if self.numel() != self.data.len() as u64 {
            return Err(Error::Archive(format!(
                "tensor {:?}: shape {:?} holds {} values but data has {}",
                self.name,
                self.shape,
                self.numel(),
                self.data.len()
            )));
        }
        if self.shape.len() > u8::MAX as usize {
            return Err(Error::Archive(format!("tensor {:?} has too many dims", self.name)));
        }
        if !self.data.is_finite() {
            return Err(Error::NonFinite(format!("tensor {:?}", self.name)));
        }
        Ok(())
    }
}

/// Ordered collection of uniquely named tensors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorArchive {
    tensors: Vec<Tensor>,
}

impl TensorArchive {
    pub fn new(tensors: Vec<Tensor>) -> Result<Self> {
        let mut archive = TensorArchive::default();
        for t in tensors {
            archive.push(t)?;
        }
        Ok(archive)
    }

    pub fn push(&mut self, tensor: Tensor) -> Result<()> {
        if self.get(&tensor.name).is_some() {
            return Err(Error::Archive(format!("duplicate tensor name {:?}", tensor.name)));
        }
        tensor.validate()?;
        self.tensors.push(tensor);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for t in &self.tensors {
            out.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
            out.extend_from_slice(t.name.as_bytes());
            out.push(t.data.dtype() as u8);
            out.push(t.shape.len() as u8);
            for &d in &t.shape {
                out.extend_from_slice(&d.to_le_bytes());
            }
            t.data.write_le(&mut out);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cur = Cursor { bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(Error::Archive("bad magic bytes".into()));
        }
        let count = cur.u32()?;
        let mut archive = TensorArchive::default();
        for _ in 0..count {
            let name_len = cur.u32()? as usize;
            let name = std::str::from_utf8(cur.take(name_len)?)
                .map_err(|_| Error::Archive("tensor name is not UTF-8".into()))?
                .to_string();
            let dtype = DType::from_code(cur.u8()?)?;
            let ndim = cur.u8()? as usize;
            let shape = (0..ndim).map(|_| cur.u64()).collect::<Result<Vec<_>>>()?;
            let numel = shape
                .iter()
                .try_fold(1u64, |acc, &d| acc.checked_mul(d))
                .ok_or_else(|| Error::Archive(format!("tensor {name:?}: shape overflows")))?;
            let nbytes = numel
                .checked_mul(dtype.width() as u64)
                .filter(|&b| b <= (cur.remaining() as u64))
                .ok_or_else(|| Error::Archive(format!("truncated payload for tensor {name:?}")))?;
            let data = TensorData::read_le(dtype, cur.take(nbytes as usize)?);
            archive.push(Tensor { name, shape, data })?;
        }
        if cur.remaining() != 0 {
            return Err(Error::Archive(format!("{} trailing bytes after last tensor", cur.remaining())));
        }
        Ok(archive)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.remaining() {
            return Err(Error::Archive("truncated file".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn identity() -> TensorArchive {
        TensorArchive::new(vec![Tensor::new(
            "layer0.weight",
            vec![2, 2],
            TensorData::F32(vec![1.0, 0.0, 0.0, 1.0]),
        )])
        .unwrap()
    }

    #[test]
    fn identity_round_trip() {
        let a = identity();
        let bytes = a.to_bytes();
        assert_eq!(&bytes[..4], b"GTA1");
        let b = TensorArchive::from_bytes(&bytes).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_bytes(), bytes);
    }

    #[test]
    fn empty_archive() {
        let bytes = TensorArchive::default().to_bytes();
        assert_eq!(bytes, vec![0x47, 0x54, 0x41, 0x31, 0, 0, 0, 0]);
        assert!(TensorArchive::from_bytes(&bytes).unwrap().is_empty());
    }

    #[test]
    fn errors() {
        let bytes = identity().to_bytes();
        for cut in [3, 6, 10, bytes.len() - 1] {
            assert!(
                matches!(TensorArchive::from_bytes(&bytes[..cut]), Err(Error::Archive(_))),
                "cut at {cut}"
            );
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(TensorArchive::from_bytes(&bad).unwrap_err().to_string().contains("magic"));

        // dtype byte sits after magic, count, name_len and the 13-byte name.
        let mut bad = bytes.clone();
        bad[4 + 4 + 4 + 13] = 9;
        assert!(TensorArchive::from_bytes(&bad).unwrap_err().to_string().contains("dtype"));

        let t = Tensor::new("a", vec![1], TensorData::F64(vec![1.0]));
        assert!(TensorArchive::new(vec![t.clone(), t]).is_err());

        let nan = Tensor::new("n", vec![1], TensorData::F32(vec![f32::NAN]));
        let mut raw = TensorArchive::default().to_bytes();
        raw[4] = 1;
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.push(b'n');
        raw.push(0);
        raw.push(1);
        raw.extend_from_slice(&1u64.to_le_bytes());
        raw.extend_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(TensorArchive::from_bytes(&raw), Err(Error::NonFinite(_))));
        assert!(TensorArchive::new(vec![nan]).is_err());
    }

    fn arb_tensor() -> impl Strategy<Value = Tensor> {
        let shape = proptest::collection::vec(0u64..4, 0..3);
        (shape, 0u8..3).prop_flat_map(|(shape, code)| {
            let n = shape.iter().product::<u64>() as usize;
            let data = match code {
                0 => proptest::collection::vec(-1e6f32..1e6, n).prop_map(TensorData::F32).boxed(),
                1 => proptest::collection::vec(-1e12f64..1e12, n).prop_map(TensorData::F64).boxed(),
                _ => proptest::collection::vec(any::<i64>(), n).prop_map(TensorData::I64).boxed(),
            };
            (Just(shape), data)
        })
        .prop_map(|(shape, data)| Tensor::new("t", shape, data))
    }

    proptest! {
        #[test]
        fn save_load_save_is_byte_identical(tensors in proptest::collection::vec(arb_tensor(), 0..5)) {
            let tensors: Vec<Tensor> = tensors
                .into_iter()
                .enumerate()
                .map(|(i, mut t)| { t.name = format!("t{i}"); t })
                .collect();
            let a = TensorArchive::new(tensors).unwrap();
            let bytes = a.to_bytes();
            let b = TensorArchive::from_bytes(&bytes).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(b.to_bytes(), bytes);
        }
    }
}

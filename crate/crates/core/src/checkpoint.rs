//! Versioned binary checkpoints.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! b"DVLNETCK" | u32 version | u64 meta length | meta (JSON)
//! u32 tensor count | per tensor: u32 name length, name, u32 rank, u64 dims.., f64 values..
//! 32-byte SHA-256 of everything before it
//! ```
//!
//! Values are stored as `f64`, which holds every `f32` exactly, so a save/load
//! cycle reproduces the model bit for bit in either precision.

use std::io::{Cursor, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beamsnet::{BeamsNetTrainConfig, BeamsNetTrainer, BeamsNetVariant};
use crate::error::{Error, Result};
use crate::nn::{PowerIteration, Tensor};
use crate::scalar::Real;
use crate::snmnn::{SnmnnTrainConfig, SnmnnTrainer, SnmnnVariant};

pub const MAGIC: &[u8; 8] = b"DVLNETCK";
pub const VERSION: u32 = 1;

/// Model family and variant, named as on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BeamsnetV1,
    BeamsnetV2,
    SnmnnV1,
    SnmnnV2,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [Self::BeamsnetV1, Self::BeamsnetV2, Self::SnmnnV1, Self::SnmnnV2];

    pub fn name(self) -> &'static str {
        match self {
            Self::BeamsnetV1 => "beamsnet-v1",
            Self::BeamsnetV2 => "beamsnet-v2",
            Self::SnmnnV1 => "snmnn-v1",
            Self::SnmnnV2 => "snmnn-v2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`; expected one of beamsnet-v1, beamsnet-v2, snmnn-v1, snmnn-v2")))
    }

    pub fn beamsnet(self) -> Option<BeamsNetVariant> {
        match self {
            Self::BeamsnetV1 => Some(BeamsNetVariant::V1),
            Self::BeamsnetV2 => Some(BeamsNetVariant::V2),
            _ => None,
        }
    }

    pub fn snmnn(self) -> Option<SnmnnVariant> {
        match self {
            Self::SnmnnV1 => Some(SnmnnVariant::V1),
            Self::SnmnnV2 => Some(SnmnnVariant::V2),
            _ => None,
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamScalars {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub t: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TrainingState {
    Beamsnet { config: BeamsNetTrainConfig, adam: AdamScalars },
    Snmnn { config: SnmnnTrainConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub model: ModelKind,
    /// Beam pitch of the data the model was trained on.
    pub pitch_deg: f64,
    /// Completed epochs.
    pub epoch: usize,
    /// `"f32"` or `"f64"`.
    pub scalar: String,
    /// Hash of the run configuration that produced the checkpoint.
    pub config_hash: String,
    pub training: TrainingState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub tensors: Vec<(String, Vec<usize>, Vec<f64>)>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let meta = serde_json::to_vec(&self.meta).map_err(|e| bad(e.to_string()))?;
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(meta.len() as u64).to_le_bytes());
        out.extend_from_slice(&meta);
        out.extend_from_slice(&(self.tensors.len() as u32).to_le_bytes());
        for (name, shape, values) in &self.tensors {
            out.extend_from_slice(&(name.len() as u32).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
            for &d in shape {
                out.extend_from_slice(&(d as u64).to_le_bytes());
            }
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let digest = Sha256::digest(&out);
        out.extend_from_slice(&digest);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 32 || &bytes[..MAGIC.len()] != MAGIC {
            return Err(bad("not a checkpoint file"));
        }
        let (body, digest) = bytes.split_at(bytes.len() - 32);
        if Sha256::digest(body).as_slice() != digest {
            return Err(bad("checksum mismatch"));
        }
        let mut r = Cursor::new(&body[MAGIC.len()..]);
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(bad(format!("unsupported checkpoint version {version}")));
        }
        let meta_len = read_u64(&mut r)? as usize;
        let meta: CheckpointMeta =
            serde_json::from_slice(&take(&mut r, meta_len)?).map_err(|e| bad(format!("metadata: {e}")))?;
        let count = read_u32(&mut r)?;
        let mut tensors = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let name_len = read_u32(&mut r)? as usize;
            let name = String::from_utf8(take(&mut r, name_len)?).map_err(|_| bad("tensor name not UTF-8"))?;
            let rank = read_u32(&mut r)?;
            let shape = (0..rank).map(|_| read_u64(&mut r).map(|d| d as usize)).collect::<Result<Vec<_>>>()?;
            let n: usize = shape.iter().product();
            let values = (0..n).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
            tensors.push((name, shape, values));
        }
        if (r.position() as usize) != r.get_ref().len() {
            return Err(bad("trailing bytes"));
        }
        Ok(Self { meta, tensors })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    fn push<T: Real>(&mut self, name: String, shape: &[usize], values: &[T]) {
        self.tensors.push((name, shape.to_vec(), values.iter().map(|v| v.as_f64()).collect()));
    }

    fn get(&self, name: &str) -> Result<(&[usize], &[f64])> {
        self.tensors
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, s, v)| (s.as_slice(), v.as_slice()))
            .ok_or_else(|| bad(format!("missing tensor `{name}`")))
    }

    fn restore<T: Real>(&self, name: &str, into: &mut Tensor<T>) -> Result<()> {
        let (shape, values) = self.get(name)?;
        if shape != into.shape() {
            return Err(bad(format!("tensor `{name}` has shape {shape:?}, model expects {:?}", into.shape())));
        }
        for (d, s) in into.data_mut().iter_mut().zip(values) {
            *d = T::lit(*s);
        }
        Ok(())
    }

    fn vector<T: Real>(&self, name: &str) -> Result<Vec<T>> {
        Ok(self.get(name)?.1.iter().map(|v| T::lit(*v)).collect())
    }
}

fn take(r: &mut Cursor<&[u8]>, n: usize) -> Result<Vec<u8>> {
    let remaining = r.get_ref().len() - r.position() as usize;
    if n > remaining {
        return Err(bad("truncated checkpoint"));
    }
    let mut buf = vec![0; n];
    r.read_exact(&mut buf).map_err(|_| bad("truncated checkpoint"))?;
    Ok(buf)
}

fn read_u32(r: &mut Cursor<&[u8]>) -> Result<u32> {
    Ok(u32::from_le_bytes(take(r, 4)?.try_into().expect("4 bytes")))
}

fn read_u64(r: &mut Cursor<&[u8]>) -> Result<u64> {
    Ok(u64::from_le_bytes(take(r, 8)?.try_into().expect("8 bytes")))
}

fn read_f64(r: &mut Cursor<&[u8]>) -> Result<f64> {
    Ok(f64::from_le_bytes(take(r, 8)?.try_into().expect("8 bytes")))
}

fn scalar_name<T: Real>() -> String {
    std::any::type_name::<T>().to_string()
}

/// A trained or partially trained model with its optimizer state.
#[derive(Debug, Clone)]
pub enum TrainedModel<T> {
    Beamsnet(BeamsNetTrainer<T>),
    Snmnn(SnmnnTrainer<T>),
}

impl<T: Real> TrainedModel<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Beamsnet(t) => match t.net.variant() {
                BeamsNetVariant::V1 => ModelKind::BeamsnetV1,
                BeamsNetVariant::V2 => ModelKind::BeamsnetV2,
            },
            Self::Snmnn(t) => match t.net.variant() {
                SnmnnVariant::V1 => ModelKind::SnmnnV1,
                SnmnnVariant::V2 => ModelKind::SnmnnV2,
            },
        }
    }

    pub fn epoch(&self) -> usize {
        match self {
            Self::Beamsnet(t) => t.epoch,
            Self::Snmnn(t) => t.epoch,
        }
    }

    pub fn to_checkpoint(&self, pitch_deg: f64, config_hash: &str) -> Checkpoint {
        let training = match self {
            Self::Beamsnet(t) => TrainingState::Beamsnet {
                config: t.config.clone(),
                adam: AdamScalars {
                    lr: t.adam.lr.as_f64(),
                    beta1: t.adam.beta1.as_f64(),
                    beta2: t.adam.beta2.as_f64(),
                    epsilon: t.adam.epsilon.as_f64(),
                    t: t.adam.t,
                },
            },
            Self::Snmnn(t) => TrainingState::Snmnn { config: t.config.clone() },
        };
        let mut ck = Checkpoint {
            meta: CheckpointMeta {
                model: self.kind(),
                pitch_deg,
                epoch: self.epoch(),
                scalar: scalar_name::<T>(),
                config_hash: config_hash.to_string(),
                training,
            },
            tensors: Vec::new(),
        };
        match self {
            Self::Beamsnet(t) => {
                for (i, p) in t.net.params().iter().enumerate() {
                    ck.push(format!("param.{i}"), p.value.shape(), p.value.data());
                }
                for (i, (m, v)) in t.adam.m.iter().zip(&t.adam.v).enumerate() {
                    ck.push(format!("adam.m.{i}"), &[m.len()], m);
                    ck.push(format!("adam.v.{i}"), &[v.len()], v);
                }
            }
            Self::Snmnn(t) => {
                for (i, p) in t.net.params().iter().enumerate() {
                    ck.push(format!("param.{i}"), p.value.shape(), p.value.data());
                }
                for (i, p) in t.net.power_state().iter().enumerate() {
                    ck.push(format!("power.{i}"), &[p.vector().len()], p.vector());
                }
            }
        }
        ck
    }

    pub fn from_checkpoint(ck: &Checkpoint) -> Result<Self> {
        if ck.meta.scalar != scalar_name::<T>() {
            return Err(bad(format!("checkpoint holds {} weights, loader expects {}", ck.meta.scalar, scalar_name::<T>())));
        }
        match (&ck.meta.training, ck.meta.model.beamsnet(), ck.meta.model.snmnn()) {
            (TrainingState::Beamsnet { config, adam }, Some(variant), _) => {
                let mut t = BeamsNetTrainer::<T>::new(variant, config.clone())?;
                for (i, p) in t.net.params_mut().into_iter().enumerate() {
                    ck.restore(&format!("param.{i}"), &mut p.value)?;
                }
                t.adam.lr = T::lit(adam.lr);
                t.adam.beta1 = T::lit(adam.beta1);
                t.adam.beta2 = T::lit(adam.beta2);
                t.adam.epsilon = T::lit(adam.epsilon);
                t.adam.t = adam.t;
                let n = ck.tensors.iter().filter(|(n, _, _)| n.starts_with("adam.m.")).count();
                t.adam.m = (0..n).map(|i| ck.vector(&format!("adam.m.{i}"))).collect::<Result<_>>()?;
                t.adam.v = (0..n).map(|i| ck.vector(&format!("adam.v.{i}"))).collect::<Result<_>>()?;
                t.epoch = ck.meta.epoch;
                Ok(Self::Beamsnet(t))
            }
            (TrainingState::Snmnn { config }, _, Some(variant)) => {
                let mut t = SnmnnTrainer::<T>::new(variant, config.clone())?;
                for (i, p) in t.net.params_mut().into_iter().enumerate() {
                    ck.restore(&format!("param.{i}"), &mut p.value)?;
                }
                let power = [0, 1, 2, 3].map(|i| ck.vector(&format!("power.{i}")).map(PowerIteration::from_vector));
                let [a, b, c, d] = power;
                t.net.set_power_state([a?, b?, c?, d?]);
                t.epoch = ck.meta.epoch;
                Ok(Self::Snmnn(t))
            }
            _ => Err(bad(format!("training state does not match model {}", ck.meta.model))),
        }
    }
}

use std::io::{Read, Write};
use std::path::Path;

use crate::dataset::Task;
use crate::error::{Error, Result};
use crate::nn::{Arch, Model};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"PTRN";
pub const VERSION: u32 = 1;

const META_ARCH: &str = "meta.arch";
const META_FIXED_N: &str = "meta.fixed_n";
const META_STEP: &str = "meta.step";
const META_SEED: &str = "meta.seed";

/// A model plus the training position it was saved at.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    /// Completed training steps.
    pub step: usize,
    /// Seed of the batch schedule.
    pub seed: u64,
}

fn put_u32(out: &mut Vec<u8>, v: usize, what: &str) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Checkpoint(format!("{what} {v} does not fit in u32")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_entry(out: &mut Vec<u8>, name: &str, t: &Tensor) -> Result<()> {
    put_u32(out, name.len(), "name length")?;
    out.extend_from_slice(name.as_bytes());
    put_u32(out, t.rank(), "rank")?;
    for &d in t.shape() {
        put_u32(out, d, "dimension")?;
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(())
}

/// Serializes a checkpoint. Metadata rides along as `meta.*` scalar entries
/// after the parameters.
pub fn encode(ck: &Checkpoint) -> Result<Vec<u8>> {
    let m = &ck.model;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(m.task().tag());
    put_u32(&mut out, m.hidden(), "hidden size")?;
    for p in m.params().iter() {
        put_entry(&mut out, &p.name, &p.tensor)?;
    }
    put_entry(&mut out, META_ARCH, &Tensor::scalar(m.arch().tag() as f64))?;
    put_entry(&mut out, META_FIXED_N, &Tensor::scalar(m.fixed_n().unwrap_or(0) as f64))?;
    put_entry(&mut out, META_STEP, &Tensor::scalar(ck.step as f64))?;
    // 2⁶⁴ seeds are not all representable as f64, so split into halves
    let seed = Tensor::new(vec![2], vec![(ck.seed >> 32) as f64, (ck.seed & 0xffff_ffff) as f64])?;
    put_entry(&mut out, META_SEED, &seed)?;
    Ok(out)
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < k {
            return Err(Error::Checkpoint(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }

    fn u32(&mut self) -> Result<usize> {
        let b = self.take(4)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")) as usize)
    }

    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

fn meta_int(entries: &[(String, Tensor)], name: &str) -> Result<Option<u64>> {
    let Some((_, t)) = entries.iter().find(|(n, _)| n == name) else {
        return Ok(None);
    };
    let mut acc = 0u64;
    for &v in t.data() {
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 && t.len() > 1 {
            return Err(Error::Checkpoint(format!("bad value {v} in `{name}`")));
        }
        acc = if t.len() > 1 { (acc << 32) | v as u64 } else { v as u64 };
    }
    Ok(Some(acc))
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    if c.take(4)? != MAGIC.as_slice() {
        return Err(Error::Checkpoint("not a checkpoint file (bad magic)".into()));
    }
    let version = c.u32()?;
    if version != VERSION as usize {
        return Err(Error::Checkpoint(format!("unsupported format version {version}")));
    }
    let task = Task::from_tag(c.take(1)?[0]).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let hidden = c.u32()?;
    let mut entries = Vec::new();
    while !c.done() {
        let len = c.u32()?;
        let name = std::str::from_utf8(c.take(len)?)
            .map_err(|_| Error::Checkpoint("parameter name is not UTF-8".into()))?
            .to_string();
        let rank = c.u32()?;
        let shape = (0..rank).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
        let count = shape
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .ok_or_else(|| Error::Checkpoint(format!("shape {shape:?} overflows")))?;
        let raw = c.take(count.checked_mul(8).ok_or_else(|| Error::Checkpoint("size overflow".into()))?)?;
        let data = raw.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
        let t = Tensor::new(shape, data).map_err(|e| Error::Checkpoint(format!("`{name}`: {e}")))?;
        entries.push((name, t));
    }
    let arch = match meta_int(&entries, META_ARCH)? {
        Some(tag) => Arch::from_tag(tag as u8)?,
        None => Arch::PtrNet,
    };
    let fixed_n = meta_int(&entries, META_FIXED_N)?.filter(|&n| n > 0).map(|n| n as usize);
    let step = meta_int(&entries, META_STEP)?.unwrap_or(0) as usize;
    let seed = meta_int(&entries, META_SEED)?.unwrap_or(0);
    let mut model = Model::new(arch, task, hidden, fixed_n, 0.08, 0)?;
    let mut seen = vec![false; model.params().len()];
    for (name, t) in entries {
        if name.starts_with("meta.") {
            continue;
        }
        let i = model
            .params()
            .position(&name)
            .ok_or_else(|| Error::Checkpoint(format!("unexpected parameter `{name}`")))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::Checkpoint(format!("parameter `{name}` appears twice")));
        }
        model.params_mut().assign(&name, t)?;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Checkpoint(format!("missing parameter `{}`", model.params().get(i).name)));
    }
    Ok(Checkpoint { model, step, seed })
}

pub fn save(path: &Path, ck: &Checkpoint) -> Result<()> {
    let bytes = encode(ck)?;
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        for arch in Arch::ALL {
            let model = Model::new(arch, Task::Tsp, 5, Some(6), 0.08, 11).unwrap();
            let ck = Checkpoint { model, step: 37, seed: u64::MAX - 5 };
            let bytes = encode(&ck).unwrap();
            let back = decode(&bytes).unwrap();
            assert_eq!(back, ck);
            assert_eq!(encode(&back).unwrap(), bytes);
        }
    }

    #[test]
    fn header_layout() {
        let model = Model::new(Arch::PtrNet, Task::Delaunay, 3, None, 0.08, 0).unwrap();
        let bytes = encode(&Checkpoint { model, step: 0, seed: 0 }).unwrap();
        assert_eq!(&bytes[..4], b"PTRN");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(bytes[8], Task::Delaunay.tag());
        assert_eq!(&bytes[9..13], &3u32.to_le_bytes());
    }

    #[test]
    fn rejects_corruption() {
        let model = Model::new(Arch::PtrNet, Task::Hull, 3, None, 0.08, 0).unwrap();
        let bytes = encode(&Checkpoint { model, step: 0, seed: 0 }).unwrap();
        assert!(decode(&bytes[..bytes.len() - 3]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        assert!(decode(&bytes[..13]).is_err());
    }
}

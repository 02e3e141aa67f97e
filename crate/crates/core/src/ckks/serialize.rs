//! Binary encoding of keys, plaintexts and ciphertexts.
//!
//! Every object starts with the magic `CDHE`, a little-endian `u16` format
//! version and a one-byte kind tag. All lengths are written explicitly so a
//! reader never needs the parameters to parse a blob. Round trips are
//! bit-exact.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::keys::{GaloisKeys, KeySwitchDigit, KeySwitchKey, PublicKey, RelinKey, SecretKey};
use super::types::{Ciphertext, Plaintext};
use crate::error::{Error, Result};
use crate::ring::{Domain, RnsPoly};

pub const MAGIC: &[u8; 4] = b"CDHE";
pub const FORMAT_VERSION: u16 = 1;

/// Largest length accepted for any single vector, to reject garbage early.
const MAX_LEN: u32 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    SecretKey = 1,
    PublicKey = 2,
    RelinKey = 3,
    GaloisKeys = 4,
    Plaintext = 5,
    Ciphertext = 6,
}

impl Kind {
    fn from_u8(v: u8) -> Result<Self> {
        Ok(match v {
            1 => Kind::SecretKey,
            2 => Kind::PublicKey,
            3 => Kind::RelinKey,
            4 => Kind::GaloisKeys,
            5 => Kind::Plaintext,
            6 => Kind::Ciphertext,
            _ => return Err(Error::Format(format!("unknown object kind {v}"))),
        })
    }
}

/// Objects that can be written to and read from the binary format.
pub trait Serializable: Sized {
    const KIND: Kind;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()>;
    fn read_body<R: Read>(r: &mut R) -> Result<Self>;

    fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_u16::<LittleEndian>(FORMAT_VERSION)?;
        w.write_u8(Self::KIND as u8)?;
        self.write_body(w)
    }

    fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.read_u16::<LittleEndian>()?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let kind = Kind::from_u8(r.read_u8()?)?;
        if kind != Self::KIND {
            return Err(Error::Format(format!("expected {:?}, found {kind:?}", Self::KIND)));
        }
        Self::read_body(r)
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let v = Self::read_from(&mut cursor)?;
        if !cursor.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", cursor.len())));
        }
        Ok(v)
    }

    fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_from(&mut r)
    }
}

fn read_len<R: Read>(r: &mut R) -> Result<usize> {
    let len = r.read_u32::<LittleEndian>()?;
    if len > MAX_LEN {
        return Err(Error::Format(format!("length {len} too large")));
    }
    Ok(len as usize)
}

fn write_u64s<W: Write>(w: &mut W, v: &[u64]) -> Result<()> {
    w.write_u32::<LittleEndian>(v.len() as u32)?;
    for &x in v {
        w.write_u64::<LittleEndian>(x)?;
    }
    Ok(())
}

fn read_u64s<R: Read>(r: &mut R) -> Result<Vec<u64>> {
    let len = read_len(r)?;
    let mut v = vec![0u64; len];
    r.read_u64_into::<LittleEndian>(&mut v)?;
    Ok(v)
}

fn write_poly<W: Write>(w: &mut W, p: &RnsPoly) -> Result<()> {
    w.write_u8(match p.domain() {
        Domain::Coefficient => 0,
        Domain::Evaluation => 1,
    })?;
    w.write_u32::<LittleEndian>(p.residues.len() as u32)?;
    for res in &p.residues {
        write_u64s(w, res)?;
    }
    Ok(())
}

fn read_poly<R: Read>(r: &mut R) -> Result<RnsPoly> {
    let domain = match r.read_u8()? {
        0 => Domain::Coefficient,
        1 => Domain::Evaluation,
        d => return Err(Error::Format(format!("unknown domain tag {d}"))),
    };
    let count = read_len(r)?;
    let residues = (0..count).map(|_| read_u64s(r)).collect::<Result<Vec<_>>>()?;
    RnsPoly::from_residues(residues, domain).map_err(|e| Error::Format(e.to_string()))
}

fn write_switch_key<W: Write>(w: &mut W, k: &KeySwitchKey) -> Result<()> {
    w.write_u32::<LittleEndian>(k.digits.len() as u32)?;
    for d in &k.digits {
        write_poly(w, &d.b)?;
        write_poly(w, &d.a)?;
        write_u64s(w, &d.b_special)?;
        write_u64s(w, &d.a_special)?;
    }
    Ok(())
}

fn read_switch_key<R: Read>(r: &mut R) -> Result<KeySwitchKey> {
    let count = read_len(r)?;
    let mut digits = Vec::with_capacity(count);
    for _ in 0..count {
        digits.push(KeySwitchDigit {
            b: read_poly(r)?,
            a: read_poly(r)?,
            b_special: read_u64s(r)?,
            a_special: read_u64s(r)?,
        });
    }
    Ok(KeySwitchKey { digits })
}

impl Serializable for SecretKey {
    const KIND: Kind = Kind::SecretKey;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_u32::<LittleEndian>(self.coeffs.len() as u32)?;
        for &c in &self.coeffs {
            w.write_i8(c as i8)?;
        }
        Ok(())
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        let len = read_len(r)?;
        let mut raw = vec![0i8; len];
        r.read_i8_into(&mut raw)?;
        if raw.iter().any(|c| c.abs() > 1) {
            return Err(Error::Format("secret key is not ternary".into()));
        }
        Ok(SecretKey { coeffs: raw.into_iter().map(i64::from).collect() })
    }
}

impl Serializable for PublicKey {
    const KIND: Kind = Kind::PublicKey;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        write_poly(w, &self.b)?;
        write_poly(w, &self.a)
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        Ok(PublicKey { b: read_poly(r)?, a: read_poly(r)? })
    }
}

impl Serializable for RelinKey {
    const KIND: Kind = Kind::RelinKey;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        write_switch_key(w, &self.0)
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        Ok(RelinKey(read_switch_key(r)?))
    }
}

impl Serializable for GaloisKeys {
    const KIND: Kind = Kind::GaloisKeys;

    /// Keys shared between steps (same Galois element) are written once and
    /// referenced by index.
    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut unique: Vec<&Arc<KeySwitchKey>> = Vec::new();
        let mut refs = Vec::with_capacity(self.keys.len());
        for (&step, key) in &self.keys {
            let idx = match unique.iter().position(|k| Arc::ptr_eq(k, key)) {
                Some(i) => i,
                None => {
                    unique.push(key);
                    unique.len() - 1
                }
            };
            refs.push((step, idx as u32));
        }
        w.write_u32::<LittleEndian>(unique.len() as u32)?;
        for key in &unique {
            write_switch_key(w, key)?;
        }
        w.write_u32::<LittleEndian>(refs.len() as u32)?;
        for (step, idx) in refs {
            w.write_i64::<LittleEndian>(step)?;
            w.write_u32::<LittleEndian>(idx)?;
        }
        Ok(())
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        let count = read_len(r)?;
        let unique = (0..count).map(|_| read_switch_key(r).map(Arc::new)).collect::<Result<Vec<_>>>()?;
        let nrefs = read_len(r)?;
        let mut keys = BTreeMap::new();
        for _ in 0..nrefs {
            let step = r.read_i64::<LittleEndian>()?;
            let idx = r.read_u32::<LittleEndian>()? as usize;
            let key = unique.get(idx).ok_or_else(|| Error::Format(format!("key index {idx} out of range")))?;
            keys.insert(step, Arc::clone(key));
        }
        Ok(GaloisKeys { keys })
    }
}

impl Serializable for Plaintext {
    const KIND: Kind = Kind::Plaintext;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_f64::<LittleEndian>(self.scale)?;
        write_poly(w, &self.poly)
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        let scale = r.read_f64::<LittleEndian>()?;
        Ok(Plaintext { scale, poly: read_poly(r)? })
    }
}

impl Serializable for Ciphertext {
    const KIND: Kind = Kind::Ciphertext;

    fn write_body<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_f64::<LittleEndian>(self.scale)?;
        w.write_u32::<LittleEndian>(self.parts.len() as u32)?;
        for p in &self.parts {
            write_poly(w, p)?;
        }
        Ok(())
    }

    fn read_body<R: Read>(r: &mut R) -> Result<Self> {
        let scale = r.read_f64::<LittleEndian>()?;
        let count = read_len(r)?;
        if !(2..=3).contains(&count) {
            return Err(Error::Format(format!("ciphertext with {count} parts")));
        }
        let parts = (0..count).map(|_| read_poly(r)).collect::<Result<Vec<_>>>()?;
        Ok(Ciphertext { parts, scale })
    }
}

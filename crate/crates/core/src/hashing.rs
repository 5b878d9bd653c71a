//! Bit strings and the Toeplitz universal₂ hash family over GF(2).
//!
//! ```
//! use e91_squash::hashing::{BitString, ToeplitzHash};
//!
//! let h = ToeplitzHash::from_seed(16, 4, 7).unwrap();
//! let zero = BitString::zeros(16);
//! assert_eq!(h.hash(&zero).unwrap(), BitString::zeros(4));
//! ```

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Packed bit string; bit `i` lives in word `i / 64` at position `i % 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::zeros(0);
        for b in bits {
            s.push(b);
        }
        s
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut s = Self::zeros(len);
        for w in &mut s.words {
            *w = rng.next_u64();
        }
        s.mask_tail();
        s
    }

    fn mask_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString> {
        self.check_len(other)?;
        Ok(BitString {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    pub fn hamming(&self, other: &BitString) -> Result<usize> {
        self.check_len(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check_len(&self, other: &BitString) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Bytes with bit `i` at position `i % 8` of byte `i / 8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.len.div_ceil(8));
        for w in &self.words {
            out.extend_from_slice(&w.to_le_bytes());
        }
        out.truncate(self.len.div_ceil(8));
        out
    }

    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::LengthMismatch {
                expected: len.div_ceil(8) * 8,
                found: bytes.len() * 8,
            });
        }
        let mut s = Self::zeros(len);
        for (k, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            s.words[k] = u64::from_le_bytes(buf);
        }
        s.mask_tail();
        Ok(s)
    }

    /// `len` bits starting at bit `start`, packed from bit 0.
    fn window(&self, start: usize, len: usize) -> Vec<u64> {
        let n_words = len.div_ceil(64);
        let (shift, base) = (start % 64, start / 64);
        let mut out = Vec::with_capacity(n_words);
        for k in 0..n_words {
            let lo = self.words.get(base + k).copied().unwrap_or(0);
            let w = if shift == 0 {
                lo
            } else {
                let hi = self.words.get(base + k + 1).copied().unwrap_or(0);
                (lo >> shift) | (hi << (64 - shift))
            };
            out.push(w);
        }
        let r = len % 64;
        if r != 0 {
            if let Some(last) = out.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
        out
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}; ", self.len)?;
        for b in self.iter().take(64) {
            f.write_str(if b { "1" } else { "0" })?;
        }
        if self.len > 64 {
            f.write_str("…")?;
        }
        f.write_str(")")
    }
}

#[derive(Serialize, Deserialize)]
struct BitStringRepr {
    len: usize,
    hex: String,
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitStringRepr {
            len: self.len,
            hex: hex::encode(self.to_bytes()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitStringRepr::deserialize(d)?;
        let bytes = hex::decode(&r.hex).map_err(D::Error::custom)?;
        BitString::from_bytes(&bytes, r.len).map_err(D::Error::custom)
    }
}

/// Member of the Toeplitz family: `T[i][j] = d[j − i + out_len − 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToeplitzHash {
    seed: u64,
    in_len: usize,
    out_len: usize,
    diagonals: BitString,
}

impl ToeplitzHash {
    /// Deterministic member: the diagonals are drawn from ChaCha8 seeded
    /// with `seed`.
    pub fn from_seed(in_len: usize, out_len: usize, seed: u64) -> Result<Self> {
        if out_len == 0 || out_len > in_len {
            return Err(Error::InvalidHashLengths { in_len, out_len });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diagonals = BitString::random(in_len + out_len - 1, &mut rng);
        Ok(Self {
            seed,
            in_len,
            out_len,
            diagonals,
        })
    }

    /// Uniformly random member; the seed itself is drawn from `rng`.
    pub fn sample<R: Rng + ?Sized>(in_len: usize, out_len: usize, rng: &mut R) -> Result<Self> {
        Self::from_seed(in_len, out_len, rng.next_u64())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn in_len(&self) -> usize {
        self.in_len
    }

    pub fn out_len(&self) -> usize {
        self.out_len
    }

    pub fn diagonals(&self) -> &BitString {
        &self.diagonals
    }

    pub fn hash(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.in_len {
            return Err(Error::LengthMismatch {
                expected: self.in_len,
                found: x.len(),
            });
        }
        let mut y = BitString::zeros(self.out_len);
        for i in 0..self.out_len {
            // row i reads d[out−1−i ..], one bit per input position
            let row = self.diagonals.window(self.out_len - 1 - i, self.in_len);
            let parity = row
                .iter()
                .zip(&x.words)
                .fold(0u32, |acc, (r, w)| acc ^ (r & w).count_ones())
                & 1;
            y.set(i, parity == 1);
        }
        Ok(y)
    }
}

#[derive(Serialize, Deserialize)]
struct HashRepr {
    seed: u64,
    in_len: usize,
    out_len: usize,
}

impl Serialize for ToeplitzHash {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HashRepr {
            seed: self.seed,
            in_len: self.in_len,
            out_len: self.out_len,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ToeplitzHash {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = HashRepr::deserialize(d)?;
        ToeplitzHash::from_seed(r.in_len, r.out_len, r.seed).map_err(D::Error::custom)
    }
}

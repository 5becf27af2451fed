//! Bit streams and orbit-parity coding.
//!
//! A word `w` codes a stream `z` with parameter `m` under `s` when the orbit
//! `m, w[s](m), w[s]^2(m), ...` has parities `z(0), z(1), z(2), ...`. The
//! coding is exact of length `l` when the `l`-th iterate is the first one that
//! is undefined. Because `w[s]^0` is the identity, the parameter itself carries
//! `z(0)` and exact lengths start at 1.

use std::collections::HashSet;
use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::BaseGroup;
use crate::partial::{apply_word, Injection};
use crate::words::ReducedWord;

/// Length of the prefix examined by [`BitStream::check_non_periodic`].
pub const PERIODICITY_PREFIX: usize = 4096;
pub const MAX_CHECKED_PERIOD: usize = 64;
pub const MAX_CHECKED_OFFSET: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    ThueMorse,
    Champernowne,
    Bits(Vec<u8>),
}

/// The real `z` being coded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitStream {
    name: String,
    source: Source,
}

impl BitStream {
    pub fn thue_morse() -> Self {
        Self {
            name: "thue-morse".into(),
            source: Source::ThueMorse,
        }
    }

    /// Binary Champernowne word: `1 10 11 100 101 ...` concatenated.
    pub fn champernowne() -> Self {
        Self {
            name: "champernowne".into(),
            source: Source::Champernowne,
        }
    }

    /// A finite stream; bits past the end are an error.
    pub fn from_bits(name: &str, bits: Vec<u8>) -> Self {
        Self {
            name: name.to_string(),
            source: Source::Bits(bits),
        }
    }

    /// `thue-morse`, `champernowne` or `file:<path>`.
    pub fn resolve(spec: &str) -> Result<Self> {
        match spec {
            "thue-morse" => Ok(Self::thue_morse()),
            "champernowne" => Ok(Self::champernowne()),
            _ => match spec.strip_prefix("file:") {
                Some(path) => {
                    let text = std::fs::read_to_string(FsPath::new(path))?;
                    Ok(Self::from_bits(spec, parse_bits(&text)?))
                }
                None => Err(Error::UnknownStream(spec.to_string())),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of available bits, `None` when unbounded.
    pub fn bit_count(&self) -> Option<usize> {
        match &self.source {
            Source::Bits(bits) => Some(bits.len()),
            _ => None,
        }
    }

    pub fn bit(&self, k: usize) -> Result<u8> {
        match &self.source {
            Source::ThueMorse => Ok((k.count_ones() % 2) as u8),
            Source::Champernowne => Ok(champernowne_bit(k)),
            Source::Bits(bits) => bits.get(k).copied().ok_or_else(|| Error::StreamExhausted {
                name: self.name.clone(),
                index: k,
                len: bits.len(),
            }),
        }
    }

    pub fn prefix(&self, len: usize) -> Result<Vec<u8>> {
        (0..len).map(|k| self.bit(k)).collect()
    }

    /// Heuristic stand-in for non-periodicity: no period `p <= 64` may hold
    /// from any offset `<= 256` across the first 4096 bits. Shorter finite
    /// streams are checked on what they have, so very short ones fail.
    pub fn check_non_periodic(&self) -> Result<()> {
        let len = self
            .bit_count()
            .map_or(PERIODICITY_PREFIX, |l| l.min(PERIODICITY_PREFIX));
        let bits = self.prefix(len)?;
        for period in 1..=MAX_CHECKED_PERIOD {
            for offset in 0..=MAX_CHECKED_OFFSET {
                let holds = (offset..len.saturating_sub(period)).all(|k| bits[k] == bits[k + period]);
                if holds {
                    return Err(Error::Periodic {
                        name: self.name.clone(),
                        period,
                        offset,
                    });
                }
            }
        }
        Ok(())
    }
}

fn champernowne_bit(mut k: usize) -> u8 {
    let mut width = 1u32;
    loop {
        let count = 1usize << (width - 1);
        let block = count * width as usize;
        if k < block {
            let number = count + k / width as usize;
            let shift = width as usize - 1 - k % width as usize;
            return ((number >> shift) & 1) as u8;
        }
        k -= block;
        width += 1;
    }
}

/// ASCII `0`/`1`; whitespace is ignored.
pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Malformed(format!(
                "unexpected character `{other}` in bit file"
            ))),
        })
        .collect()
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|b| if *b == 0 { '0' } else { '1' }).collect()
}

/// The least `d` with `w[s]^d(m)` undefined, provided every earlier iterate
/// has the parity of the matching bit of `z`; `None` otherwise (including
/// when the orbit is periodic).
pub fn exact_code_length<S: Injection + ?Sized>(
    group: &BaseGroup,
    w: &ReducedWord,
    s: &S,
    m: u64,
    z: &BitStream,
) -> Result<Option<usize>> {
    if w.is_group_word() {
        return Err(Error::GroupWord(w.to_text(group)));
    }
    let mut seen = HashSet::new();
    let mut current = m;
    let mut k = 0;
    loop {
        if current % 2 != u64::from(z.bit(k)?) || !seen.insert(current) {
            return Ok(None);
        }
        match apply_word(group, w, s, current) {
            None => return Ok(Some(k + 1)),
            Some(next) => {
                current = next;
                k += 1;
            }
        }
    }
}

/// Reads `count` bits as the parities of `w[s]^k(m)`, `k < count`.
pub fn decode<S: Injection + ?Sized>(
    group: &BaseGroup,
    w: &ReducedWord,
    s: &S,
    m: u64,
    count: usize,
) -> Result<Vec<u8>> {
    let mut bits = Vec::with_capacity(count);
    let mut current = m;
    for step in 0..count {
        if step > 0 {
            current = apply_word(group, w, s, current).ok_or(Error::UndefinedIterate { step })?;
        }
        bits.push((current % 2) as u8);
    }
    Ok(bits)
}

/// Claim that `word` exactly codes the first `length` bits with `parameter`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingCertificate {
    pub word: String,
    pub parameter: u64,
    pub length: usize,
    pub exact: bool,
}

impl CodingCertificate {
    /// Re-checks the claim against `s` and the stream.
    pub fn check<S: Injection + ?Sized>(&self, group: &BaseGroup, s: &S, z: &BitStream) -> Result<bool> {
        let word = ReducedWord::parse_exact(group, &self.word)?;
        let exact = exact_code_length(group, &word, s, self.parameter, z)?;
        if self.exact && exact != Some(self.length) {
            return Ok(false);
        }
        let decoded = match decode(group, &word, s, self.parameter, self.length) {
            Ok(bits) => bits,
            Err(Error::UndefinedIterate { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(decoded == z.prefix(self.length)?)
    }
}

//! The compact invariant representation Hu.
//!
//! Every occupied level gets a pseudo-ternary digit string of common length
//! T. Digit `j` records what happened to the level's cluster at iteration
//! `j` of the top-down construction: `0` for the lower-mean child, `2` for
//! the higher-mean child, `1` once the cluster is uniform. The numeric value
//! is `Σ digit_j · 2^(T-1-j)`, which is what repeated doubling-plus-digit
//! produces.
//!
//! The digit string is canonical: numeric values drop leading zeros, so
//! [`replay`] needs the depth to recover the digits.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::clustering::{Hierarchy, Splitter};
use crate::error::Error;
use crate::image::{Image, Level};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DigitString(Vec<u8>);

impl DigitString {
    /// Validates digits in `{0,1,2}` and that nothing but `1` follows a `1`.
    pub fn new(digits: Vec<u8>) -> Result<Self, Error> {
        let mut uniform = false;
        for (position, &digit) in digits.iter().enumerate() {
            if digit > 2 {
                return Err(Error::InvalidDigit { position, digit });
            }
            if uniform && digit != 1 {
                return Err(Error::DigitAfterUniform { position });
            }
            uniform |= digit == 1;
        }
        Ok(DigitString(digits))
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> BigUint {
        let mut v = BigUint::zero();
        for &d in &self.0 {
            v = (v << 1u32) + BigUint::from(d);
        }
        v
    }

    /// Integer information: the number of `0`/`2` digits.
    pub fn bits(&self) -> usize {
        self.0.iter().filter(|&&d| d != 1).count()
    }

    pub fn negated(&self) -> DigitString {
        DigitString(self.0.iter().map(|&d| 2 - d).collect())
    }
}

impl fmt::Display for DigitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &d in &self.0 {
            f.write_str(match d {
                0 => "0",
                1 => "1",
                _ => "2",
            })?;
        }
        Ok(())
    }
}

/// Number of even values met while replaying a code; the count of non-uniform
/// clusters holding the pixel.
pub fn pixel_bits(d: &DigitString) -> usize {
    d.bits()
}

/// Digit complement `d -> 2 - d`.
pub fn negate_digits(d: &DigitString) -> DigitString {
    d.negated()
}

/// Recovers the length-`depth` digit string of `value`.
///
/// Odd values emit `1` and continue with `(v - 1) / 2`; even values emit
/// `v mod 4` and continue with `2 * (v / 4)`. The `v mod 4` step relies on the
/// prefix before the first `1` being all even digits, which keeps every
/// intermediate value even until a `1` is reached.
pub fn replay(value: &BigUint, depth: usize) -> Result<DigitString, Error> {
    let four = BigUint::from(4u32);
    let mut v = value.clone();
    let mut digits = Vec::with_capacity(depth);
    for _ in 0..depth {
        if v.is_odd() {
            digits.push(1);
            v >>= 1u32;
        } else {
            let (q, r) = v.div_rem(&four);
            digits.push(r.to_u8().unwrap_or(0));
            v = q << 1u32;
        }
    }
    if !v.is_zero() {
        return Err(Error::ReplayResidue);
    }
    digits.reverse();
    DigitString::new(digits).map_err(|_| Error::ReplayResidue)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuTable {
    depth: usize,
    splitter: Option<Splitter>,
    codes: BTreeMap<Level, DigitString>,
}

impl HuTable {
    /// Codes for every leaf level of `hier`.
    ///
    /// Iteration `j` doubles every value and adds the level's digit; a level
    /// whose cluster is already uniform keeps adding `1`.
    pub fn encode(hier: &Hierarchy) -> HuTable {
        let depth = hier.depth();
        let mut codes = BTreeMap::new();
        for &leaf in hier.leaves() {
            let mut path = vec![1u8; depth];
            let mut child = leaf;
            for parent in hier.ancestors(leaf) {
                let split = hier.node(parent).split.expect("ancestors are split");
                let (low, high) = (&hier.node(split.low).stats, &hier.node(split.high).stats);
                let in_higher = if low.mean() < high.mean() { child == split.high } else { child == split.low };
                path[hier.node(parent).depth] = if in_higher { 2 } else { 0 };
                child = parent;
            }
            codes.insert(hier.node(leaf).stats.lo, DigitString(path));
        }
        HuTable { depth, splitter: Some(hier.splitter()), codes }
    }

    /// Table from explicit codes; all codes must have length `depth`.
    pub fn from_codes(
        depth: usize,
        splitter: Option<Splitter>,
        codes: BTreeMap<Level, DigitString>,
    ) -> Result<HuTable, Error> {
        for (&level, code) in &codes {
            if code.len() != depth {
                return Err(Error::LengthMismatch { level, expected: depth, actual: code.len() });
            }
        }
        Ok(HuTable { depth, splitter, codes })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn splitter(&self) -> Option<Splitter> {
        self.splitter
    }

    pub fn codes(&self) -> &BTreeMap<Level, DigitString> {
        &self.codes
    }

    pub fn code(&self, level: Level) -> Option<&DigitString> {
        self.codes.get(&level)
    }

    pub fn value(&self, level: Level) -> Option<BigUint> {
        self.codes.get(&level).map(DigitString::value)
    }

    /// Whether code values strictly increase with level.
    pub fn is_isotone(&self) -> bool {
        let values: Vec<BigUint> = self.codes.values().map(DigitString::value).collect();
        values.windows(2).all(|w| w[0] < w[1])
    }

    /// Dump lines `level<TAB>digits<TAB>value<TAB>bits`.
    pub fn dump(&self) -> String {
        use fmt::Write;
        let mut out = String::new();
        for (level, code) in &self.codes {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", level, code, code.value(), code.bits());
        }
        out
    }
}

/// Hu rendered as an 8-bit image: code values mapped linearly onto `0..=255`
/// (half-up rounding) over the value range present in `img`.
pub fn hu_image(img: &Image, table: &HuTable) -> Result<Image, Error> {
    let hist = img.histogram();
    let mut values: BTreeMap<Level, BigUint> = BTreeMap::new();
    for (level, _) in hist.occupied() {
        values.insert(level, table.value(level).ok_or(Error::MissingLevel(level))?);
    }
    let lo = values.values().min().cloned().unwrap_or_default();
    let hi = values.values().max().cloned().unwrap_or_default();
    let range = &hi - &lo;
    let out_max = BigUint::from(255u32);
    let mut lut = vec![0 as Level; img.maxval() as usize + 1];
    for (&level, v) in &values {
        lut[level as usize] = if range.is_zero() {
            0
        } else {
            let scaled = ((v - &lo) * &out_max * 2u32 + &range) / (&range * 2u32);
            scaled.to_u16().unwrap_or(255)
        };
    }
    let pixels = img.pixels().iter().map(|&p| lut[p as usize]).collect();
    Image::new(img.width(), img.height(), 255, pixels)
}

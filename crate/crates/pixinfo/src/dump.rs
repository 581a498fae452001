//! Tab-separated HuTable dump: `level<TAB>digits<TAB>value<TAB>bits`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use pixinfo_core::{DigitString, HuTable, Level};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DumpError {
    #[error("line {line}: expected 4 tab-separated fields")]
    Fields { line: usize },
    #[error("line {line}: bad {field}")]
    Field { line: usize, field: &'static str },
    #[error("line {line}: {source}")]
    Code { line: usize, source: pixinfo_core::Error },
    #[error("line {line}: value {stated} does not match digits (value {actual})")]
    Value { line: usize, stated: String, actual: String },
    #[error("line {line}: bits {stated} does not match digits ({actual})")]
    Bits { line: usize, stated: usize, actual: usize },
    #[error("line {line}: level {level} repeated")]
    Duplicate { line: usize, level: Level },
    #[error("line {line}: values are not increasing with level")]
    NotIsotone { line: usize },
    #[error("{0}")]
    Table(pixinfo_core::Error),
}

pub fn write_dump(table: &HuTable) -> String {
    table.dump()
}

/// Parses and validates a dump: digit alphabet, absorbing `1`s, common length,
/// and agreement of the value and bits columns with the digits.
pub fn parse_dump(text: &str) -> Result<HuTable, DumpError> {
    let mut codes = BTreeMap::new();
    let mut depth = None;
    let mut prev: Option<BigUint> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let [level, digits, value, bits] = fields.as_slice() else {
            return Err(DumpError::Fields { line });
        };
        let level: Level = level.trim().parse().map_err(|_| DumpError::Field { line, field: "level" })?;
        let digits: Vec<u8> = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(DumpError::Field { line, field: "digits" }))
            .collect::<Result<_, _>>()?;
        let code = DigitString::new(digits).map_err(|source| DumpError::Code { line, source })?;
        let stated: BigUint = value.trim().parse().map_err(|_| DumpError::Field { line, field: "value" })?;
        if stated != code.value() {
            return Err(DumpError::Value { line, stated: stated.to_string(), actual: code.value().to_string() });
        }
        let bits: usize = bits.trim().parse().map_err(|_| DumpError::Field { line, field: "bits" })?;
        if bits != code.bits() {
            return Err(DumpError::Bits { line, stated: bits, actual: code.bits() });
        }
        if prev.as_ref().is_some_and(|p| *p >= stated) {
            return Err(DumpError::NotIsotone { line });
        }
        prev = Some(stated);
        let d = *depth.get_or_insert(code.len());
        if code.len() != d {
            return Err(DumpError::Code {
                line,
                source: pixinfo_core::Error::LengthMismatch { level, expected: d, actual: code.len() },
            });
        }
        if codes.insert(level, code).is_some() {
            return Err(DumpError::Duplicate { line, level });
        }
    }
    HuTable::from_codes(depth.unwrap_or(0), None, codes).map_err(DumpError::Table)
}

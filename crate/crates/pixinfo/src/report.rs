//! CSV rendering for the `info` and `curves` commands.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use pixinfo_core::{CurveRow, InfoReport, Splitter};

pub const CURVE_HEADER: &str = "k,E_opt,sigma_opt,E_otsu,sigma_otsu,E_merge,sigma_merge,E_balanced,sigma_balanced";
pub const INFO_HEADER: &str = "k,Q_hartley,Q_shannon,Q_integer,pct_hartley,pct_shannon,pct_integer";

/// Shortest decimal representation of `x` rounded to 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

pub fn exact9(e: &BigRational) -> String {
    sig9(e.to_f64().unwrap_or(f64::NAN))
}

/// Curve rows; methods not present in a row leave their two cells empty.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::new();
    out.push_str(CURVE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{},{}", row.k, exact9(&row.optimal.0), sig9(row.optimal.1));
        for s in [Splitter::Otsu, Splitter::Merge, Splitter::Balanced] {
            match row.methods.iter().find(|m| m.0 == s) {
                Some((_, e, sigma)) => {
                    let _ = write!(out, ",{},{}", exact9(e), sig9(*sigma));
                }
                None => out.push_str(",,"),
            }
        }
        out.push('\n');
    }
    out
}

/// One `info` row per k; `recomputed` appends a `Q_integer_recomputed` column.
pub fn info_csv(rows: &[(usize, InfoReport, Option<u64>)], recompute: bool) -> String {
    let mut out = String::new();
    out.push_str(INFO_HEADER);
    if recompute {
        out.push_str(",Q_integer_recomputed");
    }
    out.push('\n');
    for (k, r, re) in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{}",
            k,
            sig9(r.q_hartley),
            sig9(r.q_shannon),
            r.q_integer,
            sig9(r.pct_hartley),
            sig9(r.pct_shannon),
            sig9(r.pct_integer)
        );
        if recompute {
            let _ = write!(out, ",{}", re.map(|v| v.to_string()).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

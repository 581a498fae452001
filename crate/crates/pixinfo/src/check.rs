//! Invariant suite behind `pixinfo check`.
//!
//! Hard checks (any failure makes the report fail):
//! replay round trip, bits versus non-uniform ancestors, absorbing `1`s,
//! isotone values, the Q0 + ΣQi = Q decomposition at every expansion cut,
//! strictly decreasing telescoping errors, and optimal dominance.
//! Convexity violations are listed but never fail the report.

use num_rational::BigRational;
use num_traits::Zero;
use pixinfo_core::{
    build_hierarchy, convexity_report, decompose_at_cut, expand, replay, Hierarchy, Histogram, HuTable, Level,
    OptimalQuantizer, Splitter,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dump::parse_dump;
use crate::synth::{synthesize, Generator};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub instance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitter: Option<&'static str>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Occupied `(level, count)` pairs, present on failure for reproduction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Vec<(Level, u64)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvexityEntry {
    pub instance: String,
    pub method: String,
    pub length: usize,
    pub violations: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckReport {
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    pub convexity: Vec<ConvexityEntry>,
}

impl CheckReport {
    pub fn new() -> Self {
        CheckReport { passed: true, ..Default::default() }
    }

    fn record(&mut self, mut outcome: CheckOutcome, h: Option<&Histogram>) {
        if !outcome.passed {
            self.passed = false;
            outcome.histogram = h.map(|h| h.occupied().collect());
        }
        self.checks.push(outcome);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn outcome(check: &'static str, instance: &str, splitter: Option<Splitter>, result: Result<(), String>) -> CheckOutcome {
    CheckOutcome {
        check,
        instance: instance.to_string(),
        splitter: splitter.map(|s| s.name()),
        passed: result.is_ok(),
        detail: result.err(),
        histogram: None,
    }
}

/// Non-uniform clusters holding `level`, by descent from the root.
fn ancestors_by_descent(hier: &Hierarchy, level: Level) -> usize {
    let mut id = hier.root();
    let mut count = 0;
    while let Some(split) = hier.node(id).split {
        count += 1;
        id = if level <= split.threshold { split.low } else { split.high };
    }
    count
}

fn check_codes(hier: &Hierarchy, table: &HuTable) -> [(&'static str, Result<(), String>); 4] {
    let mut round_trip = Ok(());
    let mut definition = Ok(());
    let mut absorbing = Ok(());
    for (&level, code) in table.codes() {
        if round_trip.is_ok() && replay(&code.value(), table.depth()).as_ref() != Ok(code) {
            round_trip = Err(format!("level {level}: code {code} does not replay"));
        }
        let expected = ancestors_by_descent(hier, level);
        if definition.is_ok() && code.bits() != expected {
            definition = Err(format!("level {level}: {} bits, {expected} non-uniform ancestors", code.bits()));
        }
        let first_one = code.digits().iter().position(|&d| d == 1).unwrap_or(code.len());
        if absorbing.is_ok() && code.digits()[first_one..].iter().any(|&d| d != 1) {
            absorbing = Err(format!("level {level}: code {code} leaves the uniform state"));
        }
    }
    let isotone = if table.is_isotone() { Ok(()) } else { Err("values not increasing with level".into()) };
    [("round_trip", round_trip), ("definition", definition), ("absorbing", absorbing), ("isotone", isotone)]
}

/// Runs every hard check on one histogram and records convexity.
pub fn check_histogram(report: &mut CheckReport, name: &str, h: &Histogram) {
    let g = h.occupied_count();
    let optimal = OptimalQuantizer::new(h, g).expect("k_max = g is valid");
    let opt = optimal.errors();
    report.convexity.push(ConvexityEntry {
        instance: name.to_string(),
        method: "optimal".into(),
        length: opt.len(),
        violations: convexity_report(&opt),
    });

    for s in Splitter::ALL {
        let hier = build_hierarchy(h, s);
        let table = HuTable::encode(&hier);
        for (check, result) in check_codes(&hier, &table) {
            report.record(outcome(check, name, Some(s), result), Some(h));
        }

        let ex = expand(&hier, g).expect("k_max = g is valid");
        let q = hier.integer_total();
        let mut additivity = Ok(());
        for step in ex.steps(&hier) {
            match decompose_at_cut(&hier, &step.cut) {
                Ok(d) if d.total() == q => {}
                Ok(d) => {
                    additivity = Err(format!("k={}: Q0 + sum Qi = {} but Q = {q}", step.k, d.total()));
                    break;
                }
                Err(e) => {
                    additivity = Err(format!("k={}: {e}", step.k));
                    break;
                }
            }
        }
        report.record(outcome("additivity", name, Some(s), additivity), Some(h));

        let errors = ex.errors();
        let decreasing = errors.windows(2).all(|w| w[1] < w[0]) && errors.last().is_some_and(Zero::is_zero);
        let telescoping = if decreasing { Ok(()) } else { Err("errors do not strictly decrease to 0".into()) };
        report.record(outcome("telescoping", name, Some(s), telescoping), Some(h));

        let dominance = match (0..g).find(|&i| opt[i] > errors[i]) {
            None if opt[0] == errors[0] => Ok(()),
            None => Err("k=1 errors differ".into()),
            Some(i) => Err(format!("k={}: optimal {} above expansion {}", i + 1, opt[i], errors[i])),
        };
        report.record(outcome("dominance", name, Some(s), dominance), Some(h));

        report.convexity.push(ConvexityEntry {
            instance: name.to_string(),
            method: s.name().into(),
            length: errors.len(),
            violations: convexity_report(errors),
        });
    }
}

/// Validates an externally supplied HuTable dump.
pub fn check_dump(report: &mut CheckReport, name: &str, text: &str) {
    let result = parse_dump(text).map(|_| ()).map_err(|e| e.to_string());
    report.record(outcome("hu_table", name, None, result), None);
}

/// Records the convexity of a user-supplied error sequence.
pub fn check_sequence(report: &mut CheckReport, name: &str, errors: &[BigRational]) {
    report.convexity.push(ConvexityEntry {
        instance: name.to_string(),
        method: "sequence".into(),
        length: errors.len(),
        violations: convexity_report(errors),
    });
}

/// Built-in instances: hand-checked micro examples, synthetic images and
/// seeded random histograms.
pub fn battery(seed: u64) -> Vec<(String, Histogram)> {
    let mut out = vec![
        ("worked".to_string(), Histogram::from_pairs(3, &[(0, 2), (1, 1), (3, 1)]).unwrap()),
        ("four_levels".to_string(), Histogram::from_counts(3, vec![1, 1, 1, 1]).unwrap()),
        ("constant".to_string(), Histogram::from_pairs(255, &[(7, 10)]).unwrap()),
    ];
    for descriptor in ["ramp:16", "two_gaussians:80,170,20,0.4", "two_gaussians:60,120,30,0.7"] {
        let gen: Generator = descriptor.parse().expect("built-in descriptor");
        let img = synthesize(&gen, Some((64, 64)), seed).expect("built-in image");
        out.push((descriptor.to_string(), img.histogram()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..8 {
        let g = rng.random_range(2..=40);
        let mut counts = vec![0u64; 256];
        for _ in 0..g {
            counts[rng.random_range(0..256)] = rng.random_range(1..=1000);
        }
        out.push((format!("random_{i}"), Histogram::from_counts(255, counts).unwrap()));
    }
    out
}

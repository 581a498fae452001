//! Deterministic synthetic test images.
//!
//! Descriptor syntax (also accepted by `--synth`):
//!
//! * `constant:V`
//! * `ramp:LEVELS`: LEVELS equally spaced 8-bit values in equal bands
//! * `two_gaussians:MU1,MU2,SIGMA,MIX`: mixture with weight MIX on MU1
//! * `histogram_exact:L=C,L=C,...`: a shuffled image with exactly this histogram

use std::fmt;
use std::str::FromStr;

use pixinfo_core::{Image, Level};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

pub const DEFAULT_SIZE: (usize, usize) = (64, 64);

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("unknown generator `{0}`")]
    Unknown(String),
    #[error("bad parameters for {generator}: {reason}")]
    Parameters { generator: &'static str, reason: String },
    #[error(transparent)]
    Image(#[from] pixinfo_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Constant(Level),
    Ramp(usize),
    TwoGaussians { mu1: f64, mu2: f64, sigma: f64, mix: f64 },
    HistogramExact(Vec<(Level, u64)>),
}

fn bad(generator: &'static str, reason: impl Into<String>) -> SynthError {
    SynthError::Parameters { generator, reason: reason.into() }
}

impl FromStr for Generator {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let floats = |generator: &'static str| -> Result<Vec<f64>, SynthError> {
            args.split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad(generator, format!("`{a}` is not a number"))))
                .collect()
        };
        let gen = match name {
            "constant" => Generator::Constant(args.trim().parse().map_err(|_| bad("constant", "expected a level"))?),
            "ramp" => Generator::Ramp(args.trim().parse().map_err(|_| bad("ramp", "expected a level count"))?),
            "two_gaussians" => match floats("two_gaussians")?.as_slice() {
                &[mu1, mu2, sigma, mix] => Generator::TwoGaussians { mu1, mu2, sigma, mix },
                _ => return Err(bad("two_gaussians", "expected MU1,MU2,SIGMA,MIX")),
            },
            "histogram_exact" => {
                let pairs = args
                    .split(',')
                    .map(|p| {
                        let (l, c) = p.split_once('=').ok_or_else(|| bad("histogram_exact", "expected LEVEL=COUNT"))?;
                        let l = l.trim().parse().map_err(|_| bad("histogram_exact", format!("bad level `{l}`")))?;
                        let c = c.trim().parse().map_err(|_| bad("histogram_exact", format!("bad count `{c}`")))?;
                        Ok((l, c))
                    })
                    .collect::<Result<Vec<_>, SynthError>>()?;
                Generator::HistogramExact(pairs)
            }
            other => return Err(SynthError::Unknown(other.to_string())),
        };
        gen.validate()?;
        Ok(gen)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Constant(v) => write!(f, "constant:{v}"),
            Generator::Ramp(n) => write!(f, "ramp:{n}"),
            Generator::TwoGaussians { mu1, mu2, sigma, mix } => write!(f, "two_gaussians:{mu1},{mu2},{sigma},{mix}"),
            Generator::HistogramExact(pairs) => {
                let parts: Vec<String> = pairs.iter().map(|(l, c)| format!("{l}={c}")).collect();
                write!(f, "histogram_exact:{}", parts.join(","))
            }
        }
    }
}

impl Generator {
    fn validate(&self) -> Result<(), SynthError> {
        match self {
            Generator::Constant(_) => Ok(()),
            Generator::Ramp(n) if (1..=256).contains(n) => Ok(()),
            Generator::Ramp(_) => Err(bad("ramp", "level count must be in 1..=256")),
            Generator::TwoGaussians { mu1, mu2, sigma, mix } => {
                let in_range = |m: f64| (0.0..=255.0).contains(&m);
                if !in_range(*mu1) || !in_range(*mu2) {
                    Err(bad("two_gaussians", "means must lie in [0, 255]"))
                } else if !(*sigma >= 0.0 && sigma.is_finite()) {
                    Err(bad("two_gaussians", "sigma must be finite and non-negative"))
                } else if !(0.0..=1.0).contains(mix) {
                    Err(bad("two_gaussians", "mix must lie in [0, 1]"))
                } else {
                    Ok(())
                }
            }
            Generator::HistogramExact(pairs) => {
                if pairs.iter().all(|&(_, c)| c == 0) {
                    Err(bad("histogram_exact", "at least one pixel is required"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Largest `h <= sqrt(n)` dividing `n`, giving an `n/h × h` image.
fn near_square(n: usize) -> (usize, usize) {
    let mut h = (n as f64).sqrt() as usize;
    while h > 1 && n % h != 0 {
        h -= 1;
    }
    let h = h.max(1);
    (n / h, h)
}

/// Renders `gen` at `size` (default 64×64; `histogram_exact` defaults to a
/// near-square shape holding exactly its pixel count).
pub fn synthesize(gen: &Generator, size: Option<(usize, usize)>, seed: u64) -> Result<Image, SynthError> {
    gen.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match gen {
        Generator::HistogramExact(pairs) => {
            let n: u64 = pairs.iter().map(|&(_, c)| c).sum();
            let (w, h) = match size {
                Some((w, h)) if (w * h) as u64 == n => (w, h),
                Some(_) => return Err(bad("histogram_exact", format!("size must hold exactly {n} pixels"))),
                None => near_square(n as usize),
            };
            let top = pairs.iter().map(|&(l, _)| l).max().unwrap_or(0);
            let maxval = if top <= 255 { 255 } else { 65535 };
            let mut pixels: Vec<Level> = pairs
                .iter()
                .flat_map(|&(l, c)| std::iter::repeat_n(l, c as usize))
                .collect();
            pixels.shuffle(&mut rng);
            Ok(Image::new(w, h, maxval, pixels)?)
        }
        _ => {
            let (w, h) = size.unwrap_or(DEFAULT_SIZE);
            let n = w * h;
            let pixels: Vec<Level> = match gen {
                Generator::Constant(v) => vec![*v; n],
                Generator::Ramp(levels) => {
                    let levels = *levels;
                    (0..n)
                        .map(|i| {
                            let band = i * levels / n;
                            if levels == 1 { 0 } else { ((band * 255 * 2 + levels - 1) / (2 * (levels - 1))) as Level }
                        })
                        .collect()
                }
                Generator::TwoGaussians { mu1, mu2, sigma, mix } => {
                    let a = Normal::new(*mu1, *sigma).map_err(|e| bad("two_gaussians", e.to_string()))?;
                    let b = Normal::new(*mu2, *sigma).map_err(|e| bad("two_gaussians", e.to_string()))?;
                    (0..n)
                        .map(|_| {
                            let x = if rng.random::<f64>() < *mix { a.sample(&mut rng) } else { b.sample(&mut rng) };
                            x.round().clamp(0.0, 255.0) as Level
                        })
                        .collect()
                }
                Generator::HistogramExact(_) => unreachable!(),
            };
            let maxval = match gen {
                Generator::Constant(v) if *v > 255 => 65535,
                _ => 255,
            };
            Ok(Image::new(w, h, maxval, pixels)?)
        }
    }
}

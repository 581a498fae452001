//! Command-line surface: `info`, `curves`, `hu` and `check`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use pixinfo_core::{
    curve, decompose_at_cut, expand, hu_image, render, Hierarchy, HuTable, Image, InfoReport, Splitter,
    VolumeBits,
};
use thiserror::Error;

use crate::check::{battery, check_dump, check_histogram, check_sequence, CheckReport};
use crate::pgm::{read_pgm, write_pgm, PgmMode};
use crate::report::{curve_csv, info_csv};
use crate::synth::{synthesize, Generator};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("invariant breach: {0}")]
    Breach(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Breach(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "pixinfo", version, about = "Integer information quantity of grayscale images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hartley, Shannon and integer totals per k-cluster approximation (CSV).
    Info(InfoArgs),
    /// E and sigma per k for the optimal partitions and each splitter (CSV).
    Curves(CurvesArgs),
    /// HuTable dump and normalized Hu image.
    Hu(HuArgs),
    /// Run the invariant suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// PGM file (P2 or P5).
    #[arg(long, conflicts_with = "synth")]
    pub input: Option<PathBuf>,
    /// Generator descriptor, e.g. `two_gaussians:80,170,20,0.4`.
    #[arg(long)]
    pub synth: Option<String>,
    /// Synthetic image size WxH.
    #[arg(long, value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitterChoice {
    Otsu,
    Balanced,
    Merge,
    All,
}

impl SplitterChoice {
    pub fn splitters(self) -> Vec<Splitter> {
        match self {
            SplitterChoice::Otsu => vec![Splitter::Otsu],
            SplitterChoice::Balanced => vec![Splitter::Balanced],
            SplitterChoice::Merge => vec![Splitter::Merge],
            SplitterChoice::All => Splitter::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InfoArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SplitterChoice::Otsu)]
    pub splitter: SplitterChoice,
    /// Largest cluster count (clamped to the number of occupied levels).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Storage depth for percentages: 8, 16 or auto.
    #[arg(long, value_parser = parse_volume_bits, default_value = "auto")]
    pub volume_bits: VolumeBits,
    /// Write `info_<splitter>.csv` here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also report the integer total of a hierarchy rebuilt on the clusters.
    #[arg(long)]
    pub recompute: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SplitterChoice::All)]
    pub splitter: SplitterChoice,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Write `curves.csv` here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct HuArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = SplitterChoice::Otsu)]
    pub splitter: SplitterChoice,
    /// Print the table dump to stdout (always done when --out is absent).
    #[arg(long)]
    pub dump: bool,
    /// Directory for `hu_<splitter>.pgm`, `hu_<splitter>.tsv` and approximations.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cluster counts to render as approximations, e.g. `--k 2,3,4`.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// HuTable dump to validate.
    #[arg(long)]
    pub hu_table: Option<PathBuf>,
    /// Error sequence for a convexity report, e.g. `6,2/3,0`.
    #[arg(long)]
    pub sequence: Option<String>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w: usize = w.parse().map_err(|_| "bad width")?;
    let h: usize = h.parse().map_err(|_| "bad height")?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((w, h))
}

fn parse_volume_bits(s: &str) -> Result<VolumeBits, String> {
    match s {
        "auto" => Ok(VolumeBits::Auto),
        "8" => Ok(VolumeBits::Fixed(8)),
        "16" => Ok(VolumeBits::Fixed(16)),
        _ => Err("expected 8, 16 or auto".into()),
    }
}

/// Where the image comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Synthetic { generator: Generator, size: Option<(usize, usize)> },
}

/// Resolved options shared by the commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub splitters: Vec<Splitter>,
    pub k_max: Option<usize>,
    pub out: Option<PathBuf>,
    pub volume_bits: VolumeBits,
    pub seed: u64,
}

impl RunConfig {
    fn new(input: &InputArgs, splitter: SplitterChoice, k_max: Option<usize>, out: Option<PathBuf>) -> Result<Self, CliError> {
        let source = source_of(input)?.ok_or_else(|| CliError::Usage("one of --input or --synth is required".into()))?;
        if k_max == Some(0) {
            return Err(CliError::Usage("--kmax must be positive".into()));
        }
        Ok(RunConfig {
            source,
            splitters: splitter.splitters(),
            k_max,
            out,
            volume_bits: VolumeBits::Auto,
            seed: input.seed,
        })
    }

    pub fn load(&self) -> Result<Image, CliError> {
        match &self.source {
            Source::File(path) => {
                let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                read_pgm(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
            }
            Source::Synthetic { generator, size } => {
                synthesize(generator, *size, self.seed).map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

fn source_of(input: &InputArgs) -> Result<Option<Source>, CliError> {
    match (&input.input, &input.synth) {
        (Some(path), None) => Ok(Some(Source::File(path.clone()))),
        (None, Some(descriptor)) => {
            let generator = descriptor.parse::<Generator>().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Some(Source::Synthetic { generator, size: input.size }))
        }
        (None, None) => Ok(None),
        (Some(_), Some(_)) => Err(CliError::Usage("--input and --synth are exclusive".into())),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| io_err(&path, e))
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(format!("stdout: {e}")))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Info(args) => cmd_info(&args, stdout),
        Command::Curves(args) => cmd_curves(&args, stdout),
        Command::Hu(args) => cmd_hu(&args, stdout),
        Command::Check(args) => cmd_check(&args, stdout),
    }
}

/// Rows `(k, report, recomputed Q)` for the expansion of one splitter.
pub fn info_rows(
    img: &Image,
    splitter: Splitter,
    k_max: Option<usize>,
    volume: VolumeBits,
    recompute: bool,
) -> Result<Vec<(usize, InfoReport, Option<u64>)>, CliError> {
    let hist = img.histogram();
    let hier = Hierarchy::build(&hist, splitter);
    let g = hier.leaf_count();
    let k_max = k_max.unwrap_or(g).min(g);
    let internal = |e: pixinfo_core::Error| CliError::Breach(e.to_string());
    let ex = expand(&hier, k_max).map_err(internal)?;
    let q = hier.integer_total();
    let mut rows = Vec::with_capacity(k_max);
    for step in ex.steps(&hier) {
        let d = decompose_at_cut(&hier, &step.cut).map_err(internal)?;
        if d.total() != q {
            return Err(CliError::Breach(format!("{splitter} k={}: Q0 + sum Qi = {} != Q = {q}", step.k, d.total())));
        }
        let report = InfoReport::for_cut(&hier, &step.cut, img.maxval(), volume).map_err(internal)?;
        let recomputed = if recompute {
            let atoms = step.cut.iter().map(|&id| hier.node(id).stats).collect();
            Some(Hierarchy::from_atoms(atoms, splitter).map_err(internal)?.integer_total())
        } else {
            None
        };
        rows.push((step.k, report, recomputed));
    }
    Ok(rows)
}

pub fn cmd_info(args: &InfoArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = RunConfig::new(&args.input, args.splitter, args.kmax, args.out.clone())?;
    cfg.volume_bits = args.volume_bits;
    let img = cfg.load()?;
    let several = cfg.splitters.len() > 1;
    for &s in &cfg.splitters {
        let rows = info_rows(&img, s, cfg.k_max, cfg.volume_bits, args.recompute)?;
        let csv = info_csv(&rows, args.recompute);
        match &cfg.out {
            Some(dir) => write_file(dir, &format!("info_{s}.csv"), csv.as_bytes())?,
            None => {
                if several {
                    emit(stdout, &format!("# splitter={s}\n"))?;
                }
                emit(stdout, &csv)?;
            }
        }
    }
    Ok(())
}

pub fn cmd_curves(args: &CurvesArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::new(&args.input, args.splitter, args.kmax, args.out.clone())?;
    let img = cfg.load()?;
    let hist = img.histogram();
    let k_max = cfg.k_max.map(|k| k.min(hist.occupied_count()));
    let rows = curve(&hist, &cfg.splitters, k_max).map_err(|e| CliError::Breach(e.to_string()))?;
    let csv = curve_csv(&rows);
    match &cfg.out {
        Some(dir) => write_file(dir, "curves.csv", csv.as_bytes()),
        None => emit(stdout, &csv),
    }
}

pub fn cmd_hu(args: &HuArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = RunConfig::new(&args.input, args.splitter, None, args.out.clone())?;
    let img = cfg.load()?;
    let hist = img.histogram();
    let g = hist.occupied_count();
    if let Some(&k) = args.k.iter().find(|&&k| k == 0 || k > g) {
        return Err(CliError::Usage(format!("--k {k} outside 1..={g}")));
    }
    let several = cfg.splitters.len() > 1;
    let internal = |e: pixinfo_core::Error| CliError::Breach(e.to_string());
    for &s in &cfg.splitters {
        let hier = Hierarchy::build(&hist, s);
        let table = HuTable::encode(&hier);
        let dump = table.dump();
        if args.dump || cfg.out.is_none() {
            if several {
                emit(stdout, &format!("# splitter={s}\n"))?;
            }
            emit(stdout, &dump)?;
        }
        if let Some(dir) = &cfg.out {
            write_file(dir, &format!("hu_{s}.tsv"), dump.as_bytes())?;
            let hu = hu_image(&img, &table).map_err(internal)?;
            write_file(dir, &format!("hu_{s}.pgm"), &write_pgm(&hu, PgmMode::Binary))?;
            if let Some(&k_max) = args.k.iter().max() {
                let ex = expand(&hier, k_max).map_err(internal)?;
                for &k in &args.k {
                    let step = ex.step(&hier, k).map_err(internal)?;
                    let approx = render(&img, &hier, &step).map_err(internal)?;
                    write_file(dir, &format!("approx_{s}_k{k}.pgm"), &write_pgm(&approx, PgmMode::Binary))?;
                }
            }
        }
    }
    Ok(())
}

pub fn cmd_check(args: &CheckArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut report = CheckReport::new();
    let explicit = source_of(&args.input)?;
    match &explicit {
        Some(source) => {
            let cfg = RunConfig {
                source: source.clone(),
                splitters: Splitter::ALL.to_vec(),
                k_max: None,
                out: None,
                volume_bits: VolumeBits::Auto,
                seed: args.input.seed,
            };
            let img = cfg.load()?;
            check_histogram(&mut report, "input", &img.histogram());
        }
        None if args.hu_table.is_none() && args.sequence.is_none() => {
            for (name, h) in battery(args.input.seed) {
                check_histogram(&mut report, &name, &h);
            }
        }
        None => {}
    }
    if let Some(path) = &args.hu_table {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        check_dump(&mut report, &path.display().to_string(), &text);
    }
    if let Some(seq) = &args.sequence {
        let errors = seq
            .split(',')
            .map(|v| v.trim().parse::<BigRational>().map_err(|_| CliError::Usage(format!("bad sequence value `{v}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        check_sequence(&mut report, "sequence", &errors);
    }
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    emit(stdout, &json)?;
    emit(stdout, "\n")?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<String> = report.failures().map(|f| format!("{}:{}", f.instance, f.check)).collect();
        Err(CliError::Breach(names.join(", ")))
    }
}

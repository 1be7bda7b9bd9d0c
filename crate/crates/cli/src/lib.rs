//! Command-line front end: code and detector-model export, one-off
//! decoding, and seeded Monte Carlo runs.

pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use serde::Serialize;

use qldpc_dc::bp::{BpConfig, BpVariant, DEFAULT_MIN_SUM_SCALE};
use qldpc_dc::codes::{build_rotated_surface, CssCode};
use qldpc_dc::detmodel::{self, DetectorModel};
use qldpc_dc::gf2::{io as triplet, BitVec, SparseBinMatrix};
use qldpc_dc::noise::RNG_LABEL;
use qldpc_dc::postproc::{DcConfig, DecodeStatus, DecoderKind, Pipeline};
use qldpc_dc::sim::{self, NoiseModel, PointRecord};

use config::{MaskingArg, OutputFormat, RunManifest, SecondPriorsArg, SimArgs, VariantArg};

#[derive(Parser, Debug)]
#[command(name = "qldpc-dc", version, about = "BP decoding with degeneracy cutting for quantum LDPC codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Export the check and logical matrices of a code.
    #[command(subcommand)]
    Code(CodeCmd),
    /// Export a detector error model.
    #[command(subcommand)]
    Dem(DemCmd),
    /// Decode syndromes read from a file.
    Decode(DecodeArgs),
    /// Estimate failure rates at one physical error rate.
    Simulate(SimArgs),
    /// Estimate failure rates over a list of physical error rates.
    Sweep(SimArgs),
}

#[derive(Subcommand, Debug)]
pub enum CodeCmd {
    Surface {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Bb {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
pub enum DemCmd {
    /// Data errors only: DCM = H_Z, DDM = H_X.
    CodeCapacity {
        #[arg(long)]
        code: String,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Pheno {
        #[arg(long)]
        code: String,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    CircuitBb {
        #[arg(long)]
        l: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    CircuitSurface {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List low-weight errors that flip no detector and no observable.
    CheckTrivial {
        #[arg(long)]
        dcm: PathBuf,
        #[arg(long)]
        obs: PathBuf,
        /// Report trivial errors that are not rows of this matrix.
        #[arg(long)]
        ddm: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        wmax: usize,
        /// Write the trivial errors found, one per row, as a triplet matrix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Check matrix (triplet format).
    #[arg(long)]
    pub h: PathBuf,
    /// One syndrome per line as 0/1 digits, optionally space separated.
    #[arg(long)]
    pub syndrome: PathBuf,
    /// One prior per line.
    #[arg(long, conflicts_with = "p")]
    pub priors: Option<PathBuf>,
    /// Uniform prior instead of a priors file.
    #[arg(long)]
    pub p: Option<f64>,
    /// Degeneracy matrix, required by DC decoders.
    #[arg(long)]
    pub ddm: Option<PathBuf>,
    #[arg(long, default_value = "bp-dc-osd")]
    pub decoder: DecoderKind,
    #[arg(long, value_enum)]
    pub dc_second_priors: Option<SecondPriorsArg>,
    #[arg(long, value_enum, default_value = "zero-priors")]
    pub masking: MaskingArg,
    #[arg(long, value_enum, default_value = "product-sum")]
    pub bp_variant: VariantArg,
    #[arg(long)]
    pub min_sum_scale: Option<f64>,
    /// Defaults to the number of columns of H.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for DC tie-breaking.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Estimates, one per line; a manifest with per-syndrome status goes
    /// next to it.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    execute(Cli::try_parse_from(args)?)
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Code(c) => cmd_code(c),
        Command::Dem(c) => cmd_dem(c),
        Command::Decode(a) => cmd_decode(&a),
        Command::Simulate(a) => cmd_sim(&a, "simulate"),
        Command::Sweep(a) => cmd_sim(&a, "sweep"),
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn write_matrix(dir: &Path, name: &str, m: &SparseBinMatrix) -> Result<()> {
    let path = dir.join(name);
    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = io::BufWriter::new(f);
    triplet::write_triplets(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<SparseBinMatrix> {
    let f = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    triplet::read_triplets(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[derive(Serialize)]
struct CodeMeta<'a> {
    label: &'a str,
    n: usize,
    k: usize,
    mx: usize,
    mz: usize,
    distance: Option<usize>,
    version: &'a str,
}

fn cmd_code(cmd: CodeCmd) -> Result<()> {
    let (code, out): (CssCode, PathBuf) = match cmd {
        CodeCmd::Surface { d, out } => (build_rotated_surface(d)?, out),
        CodeCmd::Bb { l, m, a, b, out } => {
            let p = config::bb_params(l, m, a.as_deref(), b.as_deref())?;
            (qldpc_dc::codes::build_bb(&p)?, out)
        }
    };
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    for (name, m) in [("hx.txt", &code.hx), ("hz.txt", &code.hz), ("ox.txt", &code.ox), ("oz.txt", &code.oz)] {
        write_matrix(&out, name, m)?;
    }
    write_json(
        &out.join("meta.json"),
        &CodeMeta {
            label: &code.label,
            n: code.n,
            k: code.k,
            mx: code.mx(),
            mz: code.mz(),
            distance: code.distance,
            version: env!("CARGO_PKG_VERSION"),
        },
    )?;
    println!("{}: n = {}, k = {} -> {}", code.label, code.n, code.k, out.display());
    Ok(())
}

#[derive(Serialize)]
struct DemMeta<'a> {
    #[serde(flatten)]
    meta: &'a detmodel::ModelMeta,
    detectors: usize,
    mechanisms: usize,
    observables: usize,
    ddm_rows: Option<usize>,
    version: &'a str,
}

fn write_model(model: &DetectorModel, out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    write_matrix(out, "dcm.txt", &model.dcm)?;
    write_matrix(out, "obs.txt", &model.observables)?;
    if let Some(ddm) = &model.ddm {
        write_matrix(out, "ddm.txt", ddm)?;
    }
    let mut priors = String::with_capacity(model.priors.len() * 24);
    for p in &model.priors {
        priors.push_str(&format!("{p:e}\n"));
    }
    fs::write(out.join("priors.txt"), priors)?;
    write_json(
        &out.join("meta.json"),
        &DemMeta {
            meta: &model.meta,
            detectors: model.num_detectors(),
            mechanisms: model.num_mechanisms(),
            observables: model.num_observables(),
            ddm_rows: model.ddm.as_ref().map(|d| d.rows()),
            version: env!("CARGO_PKG_VERSION"),
        },
    )?;
    println!(
        "{} {}: {} detectors x {} mechanisms -> {}",
        model.meta.noise,
        model.meta.code,
        model.num_detectors(),
        model.num_mechanisms(),
        out.display()
    );
    Ok(())
}

fn cmd_dem(cmd: DemCmd) -> Result<()> {
    match cmd {
        DemCmd::CodeCapacity { code, a, b, p, out } => {
            let code = config::parse_code(&code, a.as_deref(), b.as_deref())?.build()?;
            write_model(&detmodel::code_capacity_model(&code, p)?, &out)
        }
        DemCmd::Pheno {
            code,
            a,
            b,
            rounds,
            p,
            out,
        } => {
            let code = config::parse_code(&code, a.as_deref(), b.as_deref())?.build()?;
            write_model(&detmodel::pheno_model(&code, rounds, p)?, &out)
        }
        DemCmd::CircuitBb {
            l,
            m,
            a,
            b,
            rounds,
            p,
            out,
        } => {
            let params = config::bb_params(l, m, a.as_deref(), b.as_deref())?;
            write_model(&detmodel::bb_circuit_model(&params, rounds, p)?, &out)
        }
        DemCmd::CircuitSurface { d, rounds, p, out } => {
            write_model(&detmodel::surface_circuit_model(d, rounds, p)?, &out)
        }
        DemCmd::CheckTrivial {
            dcm,
            obs,
            ddm,
            wmax,
            out,
        } => {
            let (dcm, obs) = (read_matrix(&dcm)?, read_matrix(&obs)?);
            let found = detmodel::find_low_weight_trivial(&dcm, &obs, wmax)?;
            let mut by_weight = vec![0usize; wmax + 1];
            for v in &found {
                by_weight[v.weight()] += 1;
            }
            for (w, c) in by_weight.iter().enumerate().skip(1) {
                println!("weight {w}: {c}");
            }
            if let Some(path) = ddm {
                let ddm = read_matrix(&path)?;
                if ddm.cols() != dcm.cols() {
                    bail!("DDM has {} columns but the DCM has {}", ddm.cols(), dcm.cols());
                }
                let rows: std::collections::HashSet<&[usize]> = ddm.row_supports().iter().map(Vec::as_slice).collect();
                let missing = found.iter().filter(|v| !rows.contains(v.support())).count();
                println!("not rows of the DDM: {missing}");
            }
            if let Some(path) = out {
                let m = SparseBinMatrix::from_rows(dcm.cols(), &found)?;
                let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                triplet::write_triplets(&m, io::BufWriter::new(f))?;
            }
            Ok(())
        }
    }
}

/// Reads one value per non-empty line, ignoring `#` comments.
fn read_lines<T>(path: &Path, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match parse(line) {
            Some(v) => out.push(v),
            None => bail!("{}: line {}: invalid {what} {line:?}", path.display(), i + 1),
        }
    }
    Ok(out)
}

fn parse_bits(line: &str) -> Option<BitVec> {
    let bits: Option<Vec<bool>> = line
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect();
    bits.map(|b| BitVec::from_bools(&b))
}

fn format_bits(v: &BitVec) -> String {
    v.to_bools().iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Serialize)]
struct DecodeManifest<'a> {
    tool: &'a str,
    version: &'a str,
    decoder: &'a str,
    bp: BpConfig,
    dc: Option<DcConfig>,
    seed: u64,
    statuses: Vec<DecodeStatus>,
    started_at: String,
    finished_at: String,
}

fn cmd_decode(a: &DecodeArgs) -> Result<()> {
    let started_at = now();
    let h = read_matrix(&a.h)?;
    let syndromes = read_lines(&a.syndrome, parse_bits, "syndrome")?;
    let priors = match (&a.priors, a.p) {
        (Some(path), _) => read_lines(path, |s| s.parse::<f64>().ok(), "prior")?,
        (None, Some(p)) => vec![p; h.cols()],
        (None, None) => bail!("one of --priors or --p is required"),
    };
    if priors.len() != h.cols() {
        bail!("{} priors given but H has {} columns", priors.len(), h.cols());
    }
    for (i, s) in syndromes.iter().enumerate() {
        if s.len() != h.rows() {
            bail!("syndrome {} has length {} but H has {} rows", i + 1, s.len(), h.rows());
        }
    }
    let ddm = a.ddm.as_deref().map(read_matrix).transpose()?;
    if a.decoder.uses_dc() && ddm.is_none() {
        bail!("{} needs --ddm", a.decoder);
    }
    if let Some(d) = &ddm {
        if d.cols() != h.cols() {
            bail!("DDM has {} columns but H has {}", d.cols(), h.cols());
        }
    }
    let second = match (a.dc_second_priors, a.decoder.uses_dc()) {
        (Some(s), _) => s.into(),
        (None, true) => bail!("DC decoders need an explicit --dc-second-priors {{posterior,reset}}"),
        (None, false) => qldpc_dc::postproc::SecondRunPriors::Posterior,
    };
    let variant = match (a.bp_variant, a.min_sum_scale) {
        (VariantArg::ProductSum, Some(_)) => bail!("--min-sum-scale requires --bp-variant min-sum"),
        (VariantArg::ProductSum, None) => BpVariant::ProductSum,
        (VariantArg::MinSum, s) => BpVariant::MinSum {
            scale: s.unwrap_or(DEFAULT_MIN_SUM_SCALE),
        },
    };
    let bp = BpConfig {
        max_iter: a.max_iter.unwrap_or(h.cols()),
        variant,
    };
    let dc = DcConfig {
        second_run_priors: second,
        masking_mode: a.masking.into(),
    };
    let mut pipe = Pipeline::new(a.decoder, Arc::new(h), ddm.map(Arc::new), bp, dc)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
    let mut body = String::new();
    let mut statuses = Vec::with_capacity(syndromes.len());
    for s in &syndromes {
        let r = pipe.decode(s, &priors, &mut rng)?;
        body.push_str(&format_bits(&r.estimate));
        body.push('\n');
        statuses.push(r.status);
    }
    fs::write(&a.out, body).with_context(|| format!("writing {}", a.out.display()))?;
    let solved = statuses.iter().filter(|s| **s != DecodeStatus::Failed).count();
    write_json(
        &config::manifest_path(&a.out),
        &DecodeManifest {
            tool: "qldpc-dc",
            version: env!("CARGO_PKG_VERSION"),
            decoder: a.decoder.as_str(),
            bp,
            dc: a.decoder.uses_dc().then_some(dc),
            seed: a.seed,
            statuses,
            started_at,
            finished_at: now(),
        },
    )?;
    println!("decoded {} syndromes, {solved} with a syndrome-consistent estimate", syndromes.len());
    Ok(())
}

fn render(records: &[PointRecord], format: OutputFormat) -> Result<String> {
    Ok(match format {
        OutputFormat::Csv => sim::to_csv(records),
        OutputFormat::Jsonl => {
            let mut s = String::new();
            for r in records {
                s.push_str(&serde_json::to_string(r)?);
                s.push('\n');
            }
            s
        }
    })
}

fn cmd_sim(args: &SimArgs, command: &str) -> Result<()> {
    let started_at = now();
    let env_seed = std::env::var(config::SEED_ENV).ok();
    let resolved = config::resolve(args, env_seed.as_deref())?;
    let cfg = &resolved.config;
    if command == "simulate" && cfg.rates.len() != 1 {
        bail!("simulate takes a single --p; use sweep for a list of rates");
    }
    if cfg.noise == NoiseModel::CodeCapacity && cfg.rounds.is_some() {
        bail!("--rounds does not apply to code-capacity noise");
    }
    let records = sim::run_experiment(cfg, resolved.threads)?;
    let text = render(&records, resolved.format)?;
    match &args.out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let manifest = RunManifest {
                tool: "qldpc-dc".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: command.into(),
                config: cfg.clone(),
                format: resolved.format,
                threads: resolved.threads,
                rng: RNG_LABEL.into(),
                min_sum_scale: match cfg.bp_variant {
                    BpVariant::MinSum { scale } => Some(scale),
                    BpVariant::ProductSum => None,
                },
                started_at,
                finished_at: now(),
            };
            write_json(&config::manifest_path(path), &manifest)?;
        }
        None => io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(dir) = &args.emit_plot_data {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, body) in sim::plot_data(&records) {
            fs::write(dir.join(&name), body).with_context(|| format!("writing {name}"))?;
        }
    }
    Ok(())
}

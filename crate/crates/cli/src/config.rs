//! Simulation settings: flags, an optional TOML file, and the manifest that
//! records what was actually run.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qldpc_dc::bp::{BpVariant, DEFAULT_MIN_SUM_SCALE};
use qldpc_dc::codes::BbParams;
use qldpc_dc::postproc::{DecoderKind, MaskingMode, SecondRunPriors};
use qldpc_dc::sim::{CodeSpec, ExperimentConfig, NoiseModel};

pub const SEED_ENV: &str = "QLDPC_DC_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    ProductSum,
    MinSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SecondPriorsArg {
    Posterior,
    Reset,
}

impl From<SecondPriorsArg> for SecondRunPriors {
    fn from(a: SecondPriorsArg) -> Self {
        match a {
            SecondPriorsArg::Posterior => SecondRunPriors::Posterior,
            SecondPriorsArg::Reset => SecondRunPriors::ResetToPrior,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaskingArg {
    ZeroPriors,
    DeleteColumns,
}

impl From<MaskingArg> for MaskingMode {
    fn from(a: MaskingArg) -> Self {
        match a {
            MaskingArg::ZeroPriors => MaskingMode::ZeroPriors,
            MaskingArg::DeleteColumns => MaskingMode::DeleteColumns,
        }
    }
}

/// `surface:D` or `bb:L,M`, with BB monomials from `--a`/`--b`.
pub fn parse_code(spec: &str, a: Option<&str>, b: Option<&str>) -> Result<CodeSpec> {
    let (family, rest) = spec
        .split_once(':')
        .with_context(|| format!("code {spec:?} should look like surface:D or bb:L,M"))?;
    match family {
        "surface" => {
            if a.is_some() || b.is_some() {
                bail!("--a/--b only apply to bb codes");
            }
            let d = rest.trim().parse().with_context(|| format!("bad surface distance in {spec:?}"))?;
            Ok(CodeSpec::Surface { d })
        }
        "bb" => {
            let (l, m) = rest.split_once(',').with_context(|| format!("bb code {spec:?} needs L,M"))?;
            let l: usize = l.trim().parse().with_context(|| format!("bad l in {spec:?}"))?;
            let m: usize = m.trim().parse().with_context(|| format!("bad m in {spec:?}"))?;
            Ok(CodeSpec::Bb(bb_params(l, m, a, b)?))
        }
        other => bail!("unknown code family {other:?}; expected surface or bb"),
    }
}

pub fn bb_params(l: usize, m: usize, a: Option<&str>, b: Option<&str>) -> Result<BbParams> {
    let std = BbParams::standard(l, m)?;
    let a = a.map(BbParams::parse_monomials).transpose()?.unwrap_or(std.a);
    let b = b.map(BbParams::parse_monomials).transpose()?.unwrap_or(std.b);
    Ok(BbParams::new(l, m, a, b)?)
}

pub fn parse_rates(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad rate {x:?}")))
        .collect()
}

pub fn parse_decoders(s: &str) -> Result<Vec<DecoderKind>> {
    s.split(',')
        .map(|x| x.trim().parse::<DecoderKind>().map_err(anyhow::Error::from))
        .collect()
}

/// Flags shared by `simulate` and `sweep`. Every field is optional here so
/// that a config file can supply it; flags win over the file.
#[derive(Args, Debug, Clone, Default)]
pub struct SimArgs {
    /// TOML file with any of the settings below (kebab-case keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Re-run the configuration recorded in a run manifest.
    #[arg(long, conflicts_with = "config")]
    pub replay: Option<PathBuf>,
    /// surface:D or bb:L,M
    #[arg(long)]
    pub code: Option<String>,
    /// BB monomials for A, e.g. x3,y1,y2
    #[arg(long)]
    pub a: Option<String>,
    /// BB monomials for B, e.g. y3,x1,x2
    #[arg(long)]
    pub b: Option<String>,
    /// code-capacity, phenomenological or circuit-level
    #[arg(long)]
    pub noise: Option<String>,
    /// Physical error rate(s), comma separated.
    #[arg(long)]
    pub p: Option<String>,
    /// Syndrome rounds (defaults to the code distance).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Decoder(s), comma separated: bp, bp-dc, bp-osd, bp-dc-osd.
    #[arg(long)]
    pub decoder: Option<String>,
    /// Priors for the second BP run of DC.
    #[arg(long, value_enum)]
    pub dc_second_priors: Option<SecondPriorsArg>,
    #[arg(long, value_enum)]
    pub masking: Option<MaskingArg>,
    #[arg(long, value_enum)]
    pub bp_variant: Option<VariantArg>,
    #[arg(long)]
    pub min_sum_scale: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed; falls back to the config file, then $QLDPC_DC_SEED.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Output file; stdout when absent. The manifest goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-curve `p rate ci_low ci_high` files.
    #[arg(long)]
    pub emit_plot_data: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    #[default]
    None,
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Option<Vec<T>> {
        match self {
            OneOrMany::None => None,
            OneOrMany::One(x) => Some(vec![x]),
            OneOrMany::Many(v) => Some(v),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FileConfig {
    code: Option<String>,
    a: Option<String>,
    b: Option<String>,
    noise: Option<String>,
    #[serde(default)]
    p: OneOrMany<f64>,
    rounds: Option<usize>,
    #[serde(default)]
    decoder: OneOrMany<String>,
    dc_second_priors: Option<SecondPriorsArg>,
    masking: Option<MaskingArg>,
    bp_variant: Option<VariantArg>,
    min_sum_scale: Option<f64>,
    max_iter: Option<usize>,
    trials: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
    format: Option<OutputFormat>,
}

/// Everything needed to reproduce a run, written next to its output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ExperimentConfig,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub rng: String,
    pub min_sum_scale: Option<f64>,
    pub started_at: String,
    pub finished_at: String,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub struct Resolved {
    pub config: ExperimentConfig,
    pub format: OutputFormat,
    pub threads: Option<usize>,
}

/// Merges flags over the config file (or replayed manifest) and checks the
/// result. `seed_env` is the value of `$QLDPC_DC_SEED`, if set.
pub fn resolve(args: &SimArgs, seed_env: Option<&str>) -> Result<Resolved> {
    if let Some(path) = &args.replay {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: RunManifest =
            serde_json::from_str(&text).with_context(|| format!("{} is not a run manifest", path.display()))?;
        let has_overrides = args.code.is_some()
            || args.noise.is_some()
            || args.p.is_some()
            || args.decoder.is_some()
            || args.trials.is_some()
            || args.seed.is_some();
        if has_overrides {
            bail!("--replay cannot be combined with experiment flags");
        }
        m.config.validate()?;
        return Ok(Resolved {
            config: m.config,
            format: args.format.unwrap_or(m.format),
            threads: args.threads.or(m.threads),
        });
    }

    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let code_str = args.code.clone().or(file.code).context("missing --code")?;
    let a = args.a.clone().or(file.a);
    let b = args.b.clone().or(file.b);
    let code = parse_code(&code_str, a.as_deref(), b.as_deref())?;
    let noise: NoiseModel = args.noise.clone().or(file.noise).context("missing --noise")?.parse()?;
    let rates = match &args.p {
        Some(s) => parse_rates(s)?,
        None => file.p.into_vec().context("missing --p")?,
    };
    let decoders = match &args.decoder {
        Some(s) => parse_decoders(s)?,
        None => file
            .decoder
            .into_vec()
            .context("missing --decoder")?
            .iter()
            .map(|d| d.parse::<DecoderKind>())
            .collect::<std::result::Result<_, _>>()?,
    };
    let second = args.dc_second_priors.or(file.dc_second_priors);
    let second_run_priors = match (second, decoders.iter().any(|d| d.uses_dc())) {
        (Some(s), _) => s.into(),
        (None, true) => bail!("DC decoders need an explicit --dc-second-priors {{posterior,reset}}"),
        (None, false) => SecondRunPriors::Posterior,
    };
    let variant = args.bp_variant.or(file.bp_variant).unwrap_or(VariantArg::ProductSum);
    let scale = args.min_sum_scale.or(file.min_sum_scale);
    let bp_variant = match (variant, scale) {
        (VariantArg::ProductSum, Some(_)) => bail!("--min-sum-scale requires --bp-variant min-sum"),
        (VariantArg::ProductSum, None) => BpVariant::ProductSum,
        (VariantArg::MinSum, s) => BpVariant::MinSum {
            scale: s.unwrap_or(DEFAULT_MIN_SUM_SCALE),
        },
    };
    let seed = match args.seed.or(file.seed) {
        Some(s) => s,
        None => match seed_env {
            Some(v) => v
                .trim()
                .parse()
                .with_context(|| format!("${SEED_ENV} = {v:?} is not an unsigned integer"))?,
            None => bail!("missing --seed (or ${SEED_ENV})"),
        },
    };
    let rounds = args.rounds.or(file.rounds);
    if rounds.is_some() && !noise.has_rounds() {
        bail!("--rounds does not apply to code-capacity noise");
    }
    let config = ExperimentConfig {
        code,
        noise,
        rates,
        rounds,
        decoders,
        bp_variant,
        max_iter: args.max_iter.or(file.max_iter),
        second_run_priors,
        masking_mode: args.masking.or(file.masking).unwrap_or(MaskingArg::ZeroPriors).into(),
        trials: args.trials.or(file.trials).context("missing --trials")?,
        seed,
    };
    config.validate()?;
    Ok(Resolved {
        config,
        format: args.format.or(file.format).unwrap_or(OutputFormat::Csv),
        threads: args.threads.or(file.threads),
    })
}

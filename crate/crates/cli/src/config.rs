//! Experiment configuration: TOML in, validated SI quantities out.
//!
//! Every dimensioned key carries a unit suffix, and each quantity accepts
//! exactly one spelling per file, so a config cannot silently mix scales.
//! [`echo_toml`] writes the normalized SI form back out; feeding the echo
//! back in reproduces the run that produced it.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use noma_mec::{LambdaPolicy, NetworkConfig, SchemeKind, SchemeSpec};
use serde::Deserialize;
use toml::{Table, Value};

pub const SCHEMA_VERSION: i64 = 1;

/// A parsed and validated experiment, all quantities in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub base: NetworkConfig,
    pub sweep: Sweep,
    pub schemes: Vec<SchemeEntry>,
    pub mc: Option<McSettings>,
    pub pin: Option<PinT1>,
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

/// Which scenario parameter the sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    TaskBits,
    PTotal,
    FUser,
    RatioN,
    /// Input SNR p_total / sigma2; applied by scaling p_total.
    Rho,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::TaskBits => "task_bits",
            SweepVariable::PTotal => "p_total",
            SweepVariable::FUser => "f_user",
            SweepVariable::RatioN => "ratio_n",
            SweepVariable::Rho => "rho",
        }
    }

    pub fn apply(self, cfg: &mut NetworkConfig, value: f64) {
        match self {
            SweepVariable::TaskBits => cfg.task_bits = value,
            SweepVariable::PTotal => cfg.p_total = value,
            SweepVariable::FUser => cfg.f_user = value,
            SweepVariable::RatioN => cfg.ratio_n = value,
            SweepVariable::Rho => cfg.p_total = value * cfg.sigma2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeEntry {
    pub spec: SchemeSpec,
}

impl SchemeEntry {
    pub fn label(&self) -> &'static str {
        self.spec.kind.label()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n: u64,
    pub seed: u64,
}

/// Uplink-window pin for frequency sweeps: hold t1 at an explicit duration
/// or at the base config's optimized window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinT1 {
    BaseTheorem1,
    Seconds(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema_version: i64,
    base: RawBase,
    sweep: RawSweep,
    #[serde(default)]
    schemes: Vec<RawScheme>,
    mc: Option<RawMc>,
    pin: Option<RawPin>,
    output: RawOutput,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    d_a_m: Option<f64>,
    d_b_m: Option<f64>,
    alpha: Option<f64>,
    p_total_w: Option<f64>,
    sigma2_w: Option<f64>,
    bandwidth_hz: Option<f64>,
    bandwidth_khz: Option<f64>,
    bandwidth_mhz: Option<f64>,
    f_user_hz: Option<f64>,
    f_user_ghz: Option<f64>,
    ratio_n: Option<f64>,
    cycles_per_bit: Option<f64>,
    task_bits: Option<f64>,
    task_kbits: Option<f64>,
    deadline_s: Option<f64>,
    deadline_ms: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScheme {
    kind: String,
    beta: Option<f64>,
    lambda: Option<RawLambda>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawLambda {
    Split(f64),
    Word(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMc {
    n: u64,
    seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPin {
    t1: Option<String>,
    t1_s: Option<f64>,
    t1_ms: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: String,
    svg: Option<String>,
}

pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in config {}", path.display()))
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text)?;
    if raw.schema_version != SCHEMA_VERSION {
        bail!(
            "schema_version: this tool reads version {SCHEMA_VERSION}, found {}",
            raw.schema_version
        );
    }
    let base = build_base(&raw.base)?;
    let sweep = build_sweep(&raw.sweep, &base)?;
    if raw.schemes.is_empty() {
        bail!("schemes: at least one [[schemes]] entry is required");
    }
    let schemes = raw
        .schemes
        .iter()
        .enumerate()
        .map(|(i, s)| build_scheme(i, s))
        .collect::<Result<Vec<_>>>()?;
    let mc = raw.mc.as_ref().map(build_mc).transpose()?;
    let pin = raw.pin.as_ref().map(build_pin).transpose()?;
    if pin.is_some()
        && !schemes
            .iter()
            .all(|s| matches!(s.spec.kind, SchemeKind::Proposed))
    {
        bail!("pin: a pinned uplink window only applies to the proposed scheme");
    }
    let output = build_output(&raw.output)?;
    Ok(ExperimentConfig {
        base,
        sweep,
        schemes,
        mc,
        pin,
        output,
    })
}

/// Resolves a group of alternative unit spellings to one SI value.
fn pick_unit(quantity: &str, options: &[(&str, Option<f64>, f64)]) -> Result<f64> {
    let set: Vec<_> = options.iter().filter(|(_, v, _)| v.is_some()).collect();
    match set.len() {
        1 => Ok(set[0].1.unwrap() * set[0].2),
        0 => {
            let names: Vec<_> = options.iter().map(|(n, _, _)| *n).collect();
            bail!(
                "base: {quantity} is missing; set exactly one of {}",
                names.join(", ")
            )
        }
        _ => {
            let names: Vec<_> = set.iter().map(|(n, _, _)| *n).collect();
            bail!(
                "base: {} are alternative spellings of {quantity}; set exactly one",
                names.join(" and ")
            )
        }
    }
}

fn build_base(raw: &RawBase) -> Result<NetworkConfig> {
    let req = |name: &str, v: Option<f64>| -> Result<f64> {
        v.with_context(|| format!("base.{name}: missing"))
    };
    let cfg = NetworkConfig {
        d_a: req("d_a_m", raw.d_a_m)?,
        d_b: req("d_b_m", raw.d_b_m)?,
        alpha: req("alpha", raw.alpha)?,
        p_total: req("p_total_w", raw.p_total_w)?,
        sigma2: req("sigma2_w", raw.sigma2_w)?,
        bandwidth: pick_unit(
            "the bandwidth",
            &[
                ("bandwidth_hz", raw.bandwidth_hz, 1.0),
                ("bandwidth_khz", raw.bandwidth_khz, 1e3),
                ("bandwidth_mhz", raw.bandwidth_mhz, 1e6),
            ],
        )?,
        f_user: pick_unit(
            "the user CPU frequency",
            &[
                ("f_user_hz", raw.f_user_hz, 1.0),
                ("f_user_ghz", raw.f_user_ghz, 1e9),
            ],
        )?,
        ratio_n: req("ratio_n", raw.ratio_n)?,
        cycles_per_bit: req("cycles_per_bit", raw.cycles_per_bit)?,
        task_bits: pick_unit(
            "the task size",
            &[
                ("task_bits", raw.task_bits, 1.0),
                ("task_kbits", raw.task_kbits, 1e3),
            ],
        )?,
        deadline: pick_unit(
            "the deadline",
            &[
                ("deadline_s", raw.deadline_s, 1.0),
                ("deadline_ms", raw.deadline_ms, 1e-3),
            ],
        )?,
    };
    cfg.validate().map_err(|e| anyhow::anyhow!("base: {e}"))?;
    Ok(cfg)
}

fn build_sweep(raw: &RawSweep, base: &NetworkConfig) -> Result<Sweep> {
    let variable = match raw.variable.as_str() {
        "task_bits" => SweepVariable::TaskBits,
        "p_total" => SweepVariable::PTotal,
        "f_user" => SweepVariable::FUser,
        "ratio_n" => SweepVariable::RatioN,
        "rho" => SweepVariable::Rho,
        other => bail!(
            "sweep.variable: unknown variable {other:?} (expected task_bits, p_total, f_user, ratio_n, or rho)"
        ),
    };
    if raw.values.is_empty() {
        bail!("sweep.values: at least one value is required");
    }
    for (i, &v) in raw.values.iter().enumerate() {
        if !v.is_finite() || v <= 0.0 {
            bail!("sweep.values[{i}]: must be a positive finite number");
        }
        if i > 0 && v <= raw.values[i - 1] {
            bail!(
                "sweep.values[{i}]: values must be strictly increasing ({v} does not exceed {})",
                raw.values[i - 1]
            );
        }
        let mut probe = *base;
        variable.apply(&mut probe, v);
        probe.validate().map_err(|e| {
            anyhow::anyhow!("sweep.values[{i}]: resulting scenario is invalid: {e}")
        })?;
    }
    Ok(Sweep {
        variable,
        values: raw.values.clone(),
    })
}

fn build_scheme(i: usize, raw: &RawScheme) -> Result<SchemeEntry> {
    let kind = match raw.kind.as_str() {
        "proposed" => SchemeKind::Proposed,
        "full-local" => SchemeKind::FullLocal,
        "complete-offload-noma" => SchemeKind::CompleteOffloadNoma,
        "complete-offload-oma" => SchemeKind::CompleteOffloadOma,
        "fixed-offload-noma" => {
            let beta = raw
                .beta
                .with_context(|| format!("schemes[{i}].beta: required for fixed-offload-noma"))?;
            if !(beta > 0.0 && beta <= 1.0) {
                bail!("schemes[{i}].beta: must lie in (0, 1]");
            }
            SchemeKind::FixedOffloadNoma(beta)
        }
        other => bail!(
            "schemes[{i}].kind: unknown scheme {other:?} (expected proposed, full-local, \
             complete-offload-noma, fixed-offload-noma, or complete-offload-oma)"
        ),
    };
    if raw.beta.is_some() && !matches!(kind, SchemeKind::FixedOffloadNoma(_)) {
        bail!("schemes[{i}].beta: only fixed-offload-noma takes an offloading share");
    }
    let lambda_policy = match &raw.lambda {
        None => LambdaPolicy::Optimal,
        Some(RawLambda::Word(w)) if w == "optimal" => LambdaPolicy::Optimal,
        Some(RawLambda::Word(w)) => bail!(
            "schemes[{i}].lambda: unknown policy {w:?} (expected \"optimal\" or a number in (0, 1))"
        ),
        Some(RawLambda::Split(x)) => {
            if !(*x > 0.0 && *x < 1.0) {
                bail!("schemes[{i}].lambda: must lie strictly inside (0, 1)");
            }
            LambdaPolicy::Fixed(*x)
        }
    };
    Ok(SchemeEntry {
        spec: SchemeSpec {
            kind,
            lambda_policy,
        },
    })
}

fn build_mc(raw: &RawMc) -> Result<McSettings> {
    if raw.n < 1_000 {
        bail!("mc.n: at least 1000 samples are required, got {}", raw.n);
    }
    Ok(McSettings {
        n: raw.n,
        seed: raw.seed,
    })
}

fn build_pin(raw: &RawPin) -> Result<PinT1> {
    let n_set =
        raw.t1.is_some() as usize + raw.t1_s.is_some() as usize + raw.t1_ms.is_some() as usize;
    if n_set != 1 {
        bail!("pin: set exactly one of t1 = \"base-theorem1\", t1_s, or t1_ms");
    }
    if let Some(word) = &raw.t1 {
        if word != "base-theorem1" {
            bail!("pin.t1: unknown policy {word:?} (expected \"base-theorem1\")");
        }
        return Ok(PinT1::BaseTheorem1);
    }
    let (key, secs) = match (raw.t1_s, raw.t1_ms) {
        (Some(v), None) => ("t1_s", v),
        (None, Some(v)) => ("t1_ms", v * 1e-3),
        _ => unreachable!("exactly one key is set"),
    };
    if secs <= 0.0 || !secs.is_finite() {
        bail!("pin.{key}: must be a positive duration");
    }
    Ok(PinT1::Seconds(secs))
}

fn build_output(raw: &RawOutput) -> Result<OutputSpec> {
    if !raw.csv.ends_with(".csv") {
        bail!("output.csv: path must end in .csv, got {:?}", raw.csv);
    }
    if let Some(svg) = &raw.svg {
        if !svg.ends_with(".svg") {
            bail!("output.svg: path must end in .svg, got {svg:?}");
        }
    }
    Ok(OutputSpec {
        csv: PathBuf::from(&raw.csv),
        svg: raw.svg.as_ref().map(PathBuf::from),
    })
}

/// Serializes the validated experiment back to TOML with every quantity in
/// its SI spelling. The echo parses to the same experiment, so a run can be
/// reproduced from its own output directory.
pub fn echo_toml(exp: &ExperimentConfig) -> String {
    let mut root = Table::new();
    root.insert("schema_version".into(), Value::Integer(SCHEMA_VERSION));

    let b = &exp.base;
    let mut base = Table::new();
    for (key, value) in [
        ("d_a_m", b.d_a),
        ("d_b_m", b.d_b),
        ("alpha", b.alpha),
        ("p_total_w", b.p_total),
        ("sigma2_w", b.sigma2),
        ("bandwidth_hz", b.bandwidth),
        ("f_user_hz", b.f_user),
        ("ratio_n", b.ratio_n),
        ("cycles_per_bit", b.cycles_per_bit),
        ("task_bits", b.task_bits),
        ("deadline_s", b.deadline),
    ] {
        base.insert(key.into(), Value::Float(value));
    }
    root.insert("base".into(), Value::Table(base));

    let mut sweep = Table::new();
    sweep.insert(
        "variable".into(),
        Value::String(exp.sweep.variable.name().into()),
    );
    sweep.insert(
        "values".into(),
        Value::Array(exp.sweep.values.iter().map(|&v| Value::Float(v)).collect()),
    );
    root.insert("sweep".into(), Value::Table(sweep));

    let schemes: Vec<Value> = exp
        .schemes
        .iter()
        .map(|s| {
            let mut t = Table::new();
            t.insert("kind".into(), Value::String(s.label().into()));
            if let SchemeKind::FixedOffloadNoma(beta) = s.spec.kind {
                t.insert("beta".into(), Value::Float(beta));
            }
            let lambda = match s.spec.lambda_policy {
                LambdaPolicy::Optimal => Value::String("optimal".into()),
                LambdaPolicy::Fixed(l) => Value::Float(l),
            };
            t.insert("lambda".into(), lambda);
            Value::Table(t)
        })
        .collect();
    root.insert("schemes".into(), Value::Array(schemes));

    if let Some(mc) = exp.mc {
        let mut t = Table::new();
        t.insert("n".into(), Value::Integer(mc.n as i64));
        t.insert(
            "seed".into(),
            Value::Integer(i64::try_from(mc.seed).expect("seed fits a TOML integer")),
        );
        root.insert("mc".into(), Value::Table(t));
    }

    if let Some(pin) = &exp.pin {
        let mut t = Table::new();
        match pin {
            PinT1::BaseTheorem1 => t.insert("t1".into(), Value::String("base-theorem1".into())),
            PinT1::Seconds(s) => t.insert("t1_s".into(), Value::Float(*s)),
        };
        root.insert("pin".into(), Value::Table(t));
    }

    let mut out = Table::new();
    out.insert(
        "csv".into(),
        Value::String(exp.output.csv.to_string_lossy().into_owned()),
    );
    if let Some(svg) = &exp.output.svg {
        out.insert(
            "svg".into(),
            Value::String(svg.to_string_lossy().into_owned()),
        );
    }
    root.insert("output".into(), Value::Table(out));

    toml::to_string_pretty(&root).expect("tables of primitives serialize")
}

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dirac_core::catalog::derive_transform;
use dirac_core::fixtures::{self, Fixture};
use dirac_core::spectra::n_max;
use dirac_core::{AngularChannel, Branch, PotentialKind, PotentialSpec, RelativisticContext, Sign};

use crate::error::CliError;
use crate::output::Format;

const EXIT_CODES: &str = "\
Exit codes:
  0  success (all checks passed)
  1  verification failure
  2  usage error (bad flags, unknown potential or fixture)
  3  domain error (no such level, unsupported construction, invalid parameters)

Potential parameters follow the catalog: coulomb --Z; oscillator --omega;
morse, rosen_morse_i, eckart, rosen_morse_ii, scarf, poschl_teller
--A --B --lambda (morse also --tau --T --omega); woods_saxon --B --R --lambda.
A JSON config file (--config) may supply any flag by its long name.";

#[derive(Debug, Parser)]
#[command(name = "dirac", version, about = "Exactly solvable radial Dirac problems", after_help = EXIT_CODES)]
pub struct Cli {
    /// Output format (default depends on the command).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output to PATH instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// JSON object of flag values, used for flags absent from the command line.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form energies: n, branch, sign, ε and (ε²−1)/2λ̄².
    Spectrum(SpectrumArgs),
    /// Sampled spinor as CSV (r, φ⁺, φ⁻); with --out a JSON sidecar is written next to it.
    Wavefunction(WavefunctionArgs),
    /// Closed forms against the shooting oracle and the residual checks.
    Verify(VerifyArgs),
    /// Parameter maps from the nonrelativistic problems.
    Maps(MapsArgs),
    /// Point canonical transformation from a reference to a target potential.
    Xpct(XpctArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct PotentialArgs {
    #[arg(long = "Z", allow_hyphen_values = true)]
    pub z: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<f64>,
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Woods-Saxon radius.
    #[arg(long = "R", allow_hyphen_values = true)]
    pub r0: Option<f64>,
    /// Morse range in the oscillator-image form (with --T and --omega).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// Morse `T = λ̄B/A` in the oscillator-image form.
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Parameters as JSON, e.g. '{"A":4,"B":2,"lambda":1}'.
    #[arg(long, value_name = "JSON", conflicts_with_all = ["z", "omega", "a", "b", "lambda", "r0", "tau", "t"])]
    pub params: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub kappa: i32,
    #[arg(long = "lambda-bar", default_value_t = 0.1)]
    pub lambda_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Regular,
    Irregular,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Regular => Branch::Regular,
            BranchArg::Irregular => Branch::Irregular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    Plus,
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Plus => Sign::Plus,
            SignArg::Minus => Sign::Minus,
        }
    }
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Catalog potential (coulomb, oscillator, morse, ...).
    pub potential: Option<String>,
    /// Take potential, λ̄ and κ from a shipped fixture.
    #[arg(long)]
    pub fixture: Option<String>,
    #[command(flatten)]
    pub pot: PotentialArgs,
    /// Levels: `3`, `0..3` (inclusive) or `0,2,5`. Default: admitted levels among 0..2.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, value_enum, default_value = "regular")]
    pub branch: BranchArg,
    #[arg(long = "energy-sign", value_enum, default_value = "plus")]
    pub energy_sign: SignArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComponentArg {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ViaArg {
    Closed,
    Balance,
}

#[derive(Debug, Args)]
pub struct WavefunctionArgs {
    pub potential: Option<String>,
    #[arg(long)]
    pub fixture: Option<String>,
    #[command(flatten)]
    pub pot: PotentialArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    #[arg(long, value_enum, default_value = "regular")]
    pub branch: BranchArg,
    #[arg(long, value_enum, default_value = "both")]
    pub component: ComponentArg,
    /// Lower component from the closed form or by kinetic balance.
    #[arg(long, value_enum, default_value = "closed")]
    pub via: ViaArg,
    /// Frame of the written components.
    #[arg(long, value_enum, default_value = "plus")]
    pub frame: SignArg,
    #[arg(long, default_value_t = dirac_core::wavefunctions::DEFAULT_POINTS)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Fixture name (e.g. coulomb-a) or potential name (all its fixtures, or
    /// one custom point when parameters are given).
    pub target: Option<String>,
    /// Run the whole fixture suite.
    #[arg(long, conflicts_with = "target")]
    pub all: bool,
    /// Nonrelativistic-limit scan over λ̄ ∈ {0.04, 0.02, 0.01}.
    #[arg(long = "limit-scan")]
    pub limit_scan: bool,
    /// Report which Morse energy form the oracle supports.
    #[arg(long = "morse-adjudication", conflicts_with_all = ["limit_scan", "all"])]
    pub morse_adjudication: bool,
    /// Relative shift applied to the closed-form energies (forces a failure).
    #[arg(long = "perturb-epsilon", allow_hyphen_values = true)]
    pub perturb_epsilon: Option<f64>,
    /// Skip spinor checks.
    #[arg(long = "energies-only")]
    pub energies_only: bool,
    #[command(flatten)]
    pub pot: PotentialArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapComponent {
    Upper,
    Lower,
}

#[derive(Debug, Args)]
pub struct MapsArgs {
    /// Catalog potential; all potentials when omitted.
    pub potential: Option<String>,
    #[arg(long, value_enum)]
    pub component: Option<MapComponent>,
    #[arg(long, value_enum)]
    pub branch: Option<BranchArg>,
}

#[derive(Debug, Args)]
pub struct XpctArgs {
    /// Reference potential.
    pub source: String,
    /// Target potential.
    pub target: String,
    #[arg(long)]
    pub fixture: Option<String>,
    #[command(flatten)]
    pub pot: PotentialArgs,
    #[arg(long)]
    pub n: Option<String>,
    /// Largest accepted deviation (default 1e-6, 1e-12 for identity maps).
    #[arg(long)]
    pub tolerance: Option<f64>,
}

/// Potential, context and channel of one run.
#[derive(Debug, Clone)]
pub struct Problem {
    pub label: String,
    pub spec: PotentialSpec,
    pub ctx: RelativisticContext,
    pub chan: AngularChannel,
}

pub fn parse_kind(name: &str) -> Result<PotentialKind, CliError> {
    PotentialKind::parse(name).ok_or_else(|| CliError::Usage(format!("unknown potential `{name}`")))
}

pub fn fixture(name: &str) -> Result<Fixture, CliError> {
    fixtures::by_name(name).ok_or_else(|| CliError::Usage(format!("unknown fixture `{name}`")))
}

impl PotentialArgs {
    pub fn any_param(&self) -> bool {
        [self.z, self.omega, self.a, self.b, self.lambda, self.r0, self.tau, self.t].iter().any(Option::is_some)
            || self.params.is_some()
    }

    pub fn spec(&self, kind: PotentialKind, ctx: &RelativisticContext) -> Result<PotentialSpec, CliError> {
        if let Some(p) = &self.params {
            let params: serde_json::Value =
                serde_json::from_str(p).map_err(|e| CliError::Usage(format!("--params is not JSON: {e}")))?;
            let doc = serde_json::json!({ "potential": kind.name(), "params": params });
            return serde_json::from_value(doc).map_err(|e| CliError::Usage(format!("--params for {kind}: {e}")));
        }
        let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| CliError::Usage(format!("{kind} needs --{flag}")));
        let abl = || -> Result<(f64, f64, f64), CliError> { Ok((need(self.a, "A")?, need(self.b, "B")?, need(self.lambda, "lambda")?)) };
        Ok(match kind {
            PotentialKind::Coulomb => PotentialSpec::Coulomb { z: need(self.z, "Z")? },
            PotentialKind::Oscillator => PotentialSpec::Oscillator { omega: need(self.omega, "omega")? },
            PotentialKind::Morse if self.tau.is_some() || self.t.is_some() => PotentialSpec::morse_from_oscillator(
                need(self.tau, "tau")?,
                need(self.t, "T")?,
                need(self.omega, "omega")?,
                ctx,
            ),
            PotentialKind::Morse => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::Morse { a, b, lambda }
            }
            PotentialKind::RosenMorseI => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::RosenMorseI { a, b, lambda }
            }
            PotentialKind::Eckart => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::Eckart { a, b, lambda }
            }
            PotentialKind::RosenMorseII => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::RosenMorseII { a, b, lambda }
            }
            PotentialKind::Scarf => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::Scarf { a, b, lambda }
            }
            PotentialKind::PoschlTeller => {
                let (a, b, lambda) = abl()?;
                PotentialSpec::PoschlTeller { a, b, lambda }
            }
            PotentialKind::WoodsSaxon => PotentialSpec::WoodsSaxon {
                b: need(self.b, "B")?,
                r0: need(self.r0, "R")?,
                lambda: need(self.lambda, "lambda")?,
            },
        })
    }

    /// Problem from a fixture name, or from a potential name and the flags.
    pub fn problem(&self, potential: Option<&str>, fixture_name: Option<&str>) -> Result<Problem, CliError> {
        if let Some(name) = fixture_name {
            let fx = fixture(name)?;
            if let Some(p) = potential {
                if parse_kind(p)? != fx.spec.kind() {
                    return Err(CliError::Usage(format!("fixture {name} is not a {p} fixture")));
                }
            }
            return Ok(Problem { label: fx.name.to_string(), spec: fx.spec, ctx: fx.ctx(), chan: fx.chan() });
        }
        let name = potential.ok_or_else(|| CliError::Usage("give a potential name or --fixture".into()))?;
        let kind = parse_kind(name)?;
        let ctx = RelativisticContext::new(self.lambda_bar)?;
        let chan = AngularChannel::new(self.kappa)?;
        let spec = self.spec(kind, &ctx)?;
        spec.validate()?;
        Ok(Problem { label: kind.name().to_string(), spec, ctx, chan })
    }
}

impl Problem {
    /// Levels 0..=2 admitted by the potential.
    pub fn default_levels(&self) -> Result<Vec<u32>, CliError> {
        let tp = derive_transform(&self.spec, &self.ctx, &self.chan, Sign::Plus)?;
        let nm = n_max(&self.spec, &self.ctx, &self.chan, &tp);
        Ok((0..3).filter(|&n| nm.admits(n)).collect())
    }

    pub fn levels(&self, n: Option<&str>) -> Result<Vec<u32>, CliError> {
        match n {
            Some(s) => parse_levels(s),
            None => self.default_levels(),
        }
    }
}

/// `3`, `0..3` (inclusive), `0..=3` or `0,2,5`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("bad level list `{s}`"));
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| bad());
    if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(num).collect()
}

/// Appends `--key=value` for every config entry whose flag is absent from `argv`.
pub fn merge_config(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let strs: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        a.strip_prefix("--config=").map(str::to_string).or_else(|| (a == "--config").then(|| strs.get(i + 1).cloned()).flatten())
    });
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let cfg: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
    let mut out = argv;
    for (key, value) in cfg {
        let flag = format!("--{key}");
        if strs.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}="))) {
            continue;
        }
        match value {
            serde_json::Value::Bool(true) => out.push(flag.into()),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => out.push(format!("{flag}={s}").into()),
            serde_json::Value::Number(n) => out.push(format!("{flag}={n}").into()),
            serde_json::Value::Object(_) if key == "params" => out.push(format!("{flag}={value}").into()),
            _ => return Err(CliError::Usage(format!("config key `{key}` must be a string, number or boolean"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("0..3").unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(parse_levels("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_levels("0,2,5").unwrap(), vec![0, 2, 5]);
        assert_eq!(parse_levels("4").unwrap(), vec![4]);
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn json_params_match_flags() {
        let ctx = RelativisticContext::new(0.1).unwrap();
        let flags = PotentialArgs { a: Some(4.0), b: Some(2.0), lambda: Some(1.0), ..Default::default() };
        let json = PotentialArgs { params: Some(r#"{"A":4,"B":2,"lambda":1}"#.into()), ..Default::default() };
        assert_eq!(flags.spec(PotentialKind::RosenMorseI, &ctx).unwrap(), json.spec(PotentialKind::RosenMorseI, &ctx).unwrap());
    }

    #[test]
    fn missing_parameter_is_usage() {
        let ctx = RelativisticContext::new(0.1).unwrap();
        let e = PotentialArgs::default().spec(PotentialKind::Coulomb, &ctx).unwrap_err();
        assert!(matches!(e, CliError::Usage(m) if m.contains("--Z")));
    }

    #[test]
    fn config_fills_absent_flags() {
        let dir = std::env::temp_dir().join(format!("dirac-cli-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.json");
        std::fs::write(&path, r#"{"Z": -0.5, "kappa": 2, "all": true, "energies-only": false}"#).unwrap();
        let argv: Vec<OsString> = ["dirac", "spectrum", "coulomb", "--kappa=1", "--config", path.to_str().unwrap()]
            .iter()
            .map(OsString::from)
            .collect();
        let out: Vec<String> = merge_config(argv).unwrap().iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert!(out.contains(&"--Z=-0.5".to_string()));
        assert!(out.contains(&"--all".to_string()));
        assert!(!out.iter().any(|a| a == "--kappa=2"));
        assert!(!out.iter().any(|a| a.starts_with("--energies-only")));
    }
}

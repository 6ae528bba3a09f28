use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use curvecensus::gf::{prime_power, prime_powers_up_to, MAX_FIELD_SIZE};
use curvecensus::{Family, Guards};

#[derive(Debug, Parser)]
#[command(name = "curvecensus", version, about = "Enumerate elliptic curve families over finite fields and check class-count formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run censuses and compare them with every predicted count.
    Verify(VerifyArgs),
    /// Print the class partition of each (family, q).
    Census(SweepArgs),
    /// List isomorphism classes with their member parameters.
    Classes(SweepArgs),
    /// List the fields that a q selection visits.
    Fields(FieldArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySel {
    All,
    One(Family),
}

fn parse_family(s: &str) -> Result<FamilySel, String> {
    if s == "all" {
        Ok(FamilySel::All)
    } else {
        s.parse().map(FamilySel::One)
    }
}

#[derive(Debug, Clone, Args)]
pub struct QSelection {
    /// Field orders to visit (comma separated prime powers).
    #[arg(long, value_delimiter = ',', conflicts_with = "q_max", required_unless_present = "q_max")]
    pub q: Vec<u64>,
    /// Visit every prime power up to this bound.
    #[arg(long)]
    pub q_max: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Omit timings so output is byte-stable.
    #[arg(long)]
    pub stable: bool,
    /// Write the report here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Family name or `all` (comma separated).
    #[arg(long, value_delimiter = ',', value_parser = parse_family, default_value = "all")]
    pub family: Vec<FamilySel>,
    #[command(flatten)]
    pub q: QSelection,
    #[command(flatten)]
    pub out: OutputArgs,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Lift the per-family field-size ceilings.
    #[arg(long)]
    pub unsafe_no_guard: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
    /// Stop at the first (family, q) with a failing check.
    #[arg(long)]
    pub fail_fast: bool,
    /// Perturb every predicted J by one (harness self-test).
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub q: QSelection,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A usage or configuration problem (exit status 2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Validated selection of (family, q) jobs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub families: Vec<Family>,
    pub jobs: Vec<(Family, u64)>,
    pub format: Format,
    pub stable: bool,
    pub fail_fast: bool,
    pub inject_fault: bool,
    pub guards: Guards,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    /// Human-readable remarks about filtered selections, for stderr.
    pub notices: Vec<String>,
}

pub fn resolve_qs(sel: &QSelection) -> Result<(Vec<u64>, bool), ConfigError> {
    if let Some(max) = sel.q_max {
        if max < 2 {
            return Err(ConfigError(format!("--q-max {max} admits no field")));
        }
        if max > MAX_FIELD_SIZE {
            return Err(ConfigError(format!("--q-max {max} exceeds the supported field size {MAX_FIELD_SIZE}")));
        }
        return Ok((prime_powers_up_to(max), false));
    }
    let mut qs = sel.q.clone();
    for &q in &qs {
        if prime_power(q).is_none() {
            return Err(ConfigError(format!("q = {q} is not a prime power")));
        }
        if q > MAX_FIELD_SIZE {
            return Err(ConfigError(format!("q = {q} exceeds the supported field size {MAX_FIELD_SIZE}")));
        }
    }
    qs.sort_unstable();
    qs.dedup();
    Ok((qs, true))
}

fn families(sel: &[FamilySel]) -> Vec<Family> {
    if sel.contains(&FamilySel::All) {
        return Family::ALL.to_vec();
    }
    let mut out: Vec<Family> = sel
        .iter()
        .filter_map(|s| match s {
            FamilySel::One(f) => Some(*f),
            FamilySel::All => None,
        })
        .collect();
    out.sort_by_key(|f| Family::ALL.iter().position(|g| g == f));
    out.dedup();
    out
}

impl RunConfig {
    pub fn from_sweep(args: &SweepArgs) -> Result<Self, ConfigError> {
        let (qs, explicit) = resolve_qs(&args.q)?;
        let guards = if args.unsafe_no_guard { Guards::unlimited() } else { Guards::default() };
        let families = families(&args.family);
        if args.jobs == Some(0) {
            return Err(ConfigError("--jobs must be at least 1".into()));
        }
        let mut jobs = Vec::new();
        let mut notices = Vec::new();
        for &fam in &families {
            let limit = guards.j_limit(fam) as u64;
            let mut beyond = Vec::new();
            for &q in &qs {
                if q > limit {
                    beyond.push(q);
                } else {
                    jobs.push((fam, q));
                }
            }
            if !beyond.is_empty() {
                if explicit {
                    return Err(ConfigError(format!(
                        "{fam}: q = {} exceeds the guard {limit} (use --unsafe-no-guard to lift it)",
                        beyond[0]
                    )));
                }
                notices.push(format!("{fam}: visiting q <= {limit} only ({} fields beyond the guard)", beyond.len()));
            }
            let even = jobs.iter().filter(|&&(f, q)| f == fam && q % 2 == 0).count();
            if !fam.supports_characteristic(2) && even > 0 {
                notices.push(format!("{fam}: {even} fields of characteristic 2 reported as skipped"));
            }
        }
        Ok(RunConfig {
            families,
            jobs,
            format: args.out.format,
            stable: args.out.stable,
            fail_fast: false,
            inject_fault: false,
            guards,
            threads: args.jobs,
            output: args.out.output.clone(),
            notices,
        })
    }

    pub fn from_verify(args: &VerifyArgs) -> Result<Self, ConfigError> {
        let mut cfg = Self::from_sweep(&args.sweep)?;
        cfg.fail_fast = args.fail_fast;
        cfg.inject_fault = args.inject_fault;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut full = vec!["curvecensus", "census"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).expect("parses");
        match cli.command {
            Command::Census(a) => RunConfig::from_sweep(&a),
            _ => unreachable!(),
        }
    }

    #[test]
    fn jobs_are_ordered_by_family_then_q() {
        let cfg = sweep(&["--family", "hessian,legendre", "--q", "7,5"]).unwrap();
        assert_eq!(
            cfg.jobs,
            vec![(Family::Legendre, 5), (Family::Legendre, 7), (Family::Hessian, 5), (Family::Hessian, 7)]
        );
    }

    #[test]
    fn sweeps_are_truncated_at_guards_with_a_notice() {
        let cfg = sweep(&["--family", "generalized-hessian", "--q-max", "300"]).unwrap();
        assert!(cfg.jobs.iter().all(|&(_, q)| q <= 256));
        assert!(cfg.notices.iter().any(|n| n.contains("guard")));
        let lifted = sweep(&["--family", "generalized-hessian", "--q-max", "300", "--unsafe-no-guard"]).unwrap();
        assert_eq!(lifted.jobs.last(), Some(&(Family::GeneralizedHessian, 293)));
    }

    #[test]
    fn explicit_q_beyond_guard_is_an_error() {
        assert!(sweep(&["--family", "legendre", "--q", "1013"]).is_err());
        assert!(sweep(&["--q", "12"]).is_err());
    }

    #[test]
    fn family_all_expands() {
        let cfg = sweep(&["--q", "3"]).unwrap();
        assert_eq!(cfg.families, Family::ALL.to_vec());
    }
}

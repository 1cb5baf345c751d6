use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{error::ErrorKind, Parser};
use soliton_entropy::report::{
    self, expected_rows, run_rows, sample_profile, sweep_m, OutputFormat, RowSpec, RunStatus, Tolerances,
};
use soliton_entropy::{BundleData, CatalogName, EpsilonChoice, Error, Family, NumericsConfig};

/// Solve for Einstein, Kähler-Ricci soliton and quasi-Einstein metrics on
/// CP^1-bundles and report their entropy.
///
/// With no arguments, every catalog row is recomputed and checked against
/// the reference tables.
#[derive(Debug, Parser)]
#[command(name = "soliton-entropy", version)]
struct Cli {
    /// Catalog bundle name, or `all`.
    #[arg(long, conflicts_with = "config")]
    manifold: Option<String>,

    /// JSON bundle file: {"factors":[{"n":1,"p":2,"q":-1,"vol":"2pi"}]}.
    #[arg(long)]
    config: Option<PathBuf>,

    /// einstein_z2, einstein_ww, krs or qe. Without it, all reference rows
    /// of the bundle are computed.
    #[arg(long)]
    family: Option<Family>,

    /// Fibre dimension for quasi-Einstein metrics.
    #[arg(long)]
    m: Option<f64>,

    /// Signs ε_i, comma separated (e.g. `1,-1`). Defaults to all -1.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<EpsilonChoice>,

    /// Simpson 3/8 steps; must be a multiple of 3.
    #[arg(long, env = "ENTROPY_STEPS", default_value_t = 1500)]
    steps: usize,

    /// Relative tolerance on significands when comparing.
    #[arg(long, default_value_t = 5e-6)]
    rtol: f64,

    /// Absolute tolerance on the defining constant. Defaults to two units of
    /// the last printed decimal of each reference value.
    #[arg(long)]
    atol: Option<f64>,

    #[arg(long, default_value = "table")]
    format: OutputFormat,

    /// Skip the comparison with reference values.
    #[arg(long)]
    no_compare: bool,

    /// Print the profile at N uniformly spaced points instead of a summary.
    #[arg(long, value_name = "N")]
    sample: Option<usize>,

    /// Quasi-Einstein sweep over integer m in A..=B, plus the soliton.
    #[arg(long, value_name = "A:B")]
    sweep_m: Option<String>,

    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Target {
    Catalog(Vec<CatalogName>),
    Custom(String, BundleData),
}

impl Target {
    fn single(&self) -> anyhow::Result<(String, BundleData, Option<CatalogName>)> {
        match self {
            Target::Catalog(names) if names.len() == 1 => Ok((names[0].to_string(), names[0].bundle(), Some(names[0]))),
            Target::Catalog(_) => bail!(Error::Config("this mode needs a single bundle; pass --manifold".into())),
            Target::Custom(name, b) => Ok((name.clone(), b.clone(), None)),
        }
    }
}

fn target(cli: &Cli) -> anyhow::Result<Target> {
    if let Some(path) = &cli.config {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let bundle = BundleData::from_json_str(&text)?;
        let report = bundle.validate();
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
        bundle.ensure_valid()?;
        let name = path.file_stem().map_or("custom".into(), |s| s.to_string_lossy().into_owned());
        return Ok(Target::Custom(name, bundle));
    }
    match cli.manifold.as_deref() {
        None | Some("all") => Ok(Target::Catalog(CatalogName::ALL.to_vec())),
        Some(name) => Ok(Target::Catalog(vec![name.parse()?])),
    }
}

fn parse_m_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || Error::Config(format!("--sweep-m expects A:B with integers 2 <= A <= B, got '{text}'"));
    let (a, b) = text.split_once(':').ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().parse().map_err(|_| bad())?;
    if a < 2 || a > b {
        bail!(bad());
    }
    Ok((a..=b).map(f64::from).collect())
}

fn spec_from_flags(cli: &Cli, family: Family) -> RowSpec {
    RowSpec { family, m: cli.m, eps: cli.eps.clone() }
}

fn matches_spec(row: &report::ExpectedRow, spec: &RowSpec, bundle: &BundleData) -> bool {
    let eps = spec.eps.clone().unwrap_or_else(|| EpsilonChoice::all_negative(bundle.rank()));
    let eps_ok = match spec.family {
        Family::QuasiEinstein | Family::EinsteinWw => row.epsilon().as_ref() == Some(&eps),
        _ => true,
    };
    row.family == spec.family && row.m.map(f64::from) == spec.m && eps_ok
}

fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<RunStatus> {
    let cfg = NumericsConfig::default().with_steps(cli.steps);
    cfg.validate()?;
    if !(cli.rtol > 0.0 && cli.rtol.is_finite()) {
        bail!(Error::Config(format!("--rtol must be positive, got {}", cli.rtol)));
    }
    let tol = Tolerances { rtol_significand: cli.rtol, atol_constant: cli.atol };
    let target = target(cli)?;

    if let Some(range) = &cli.sweep_m {
        let m_list = parse_m_range(range)?;
        let (name, bundle, _) = target.single()?;
        let eps = cli.eps.clone().unwrap_or_else(|| EpsilonChoice::all_negative(bundle.rank()));
        let sweep = sweep_m(&name, &bundle, &eps, &m_list, &cfg);
        report::write_sweep(&sweep, cli.format, out)?;
        return Ok(sweep.status());
    }

    if let Some(n) = cli.sample {
        let Some(family) = cli.family else {
            bail!(Error::Config("--sample needs --family".into()));
        };
        let (_, bundle, _) = target.single()?;
        let solved = report::compute_row(&bundle, &spec_from_flags(cli, family), &cfg)?;
        let points = sample_profile(&solved.profile, n)?;
        report::write_samples(&points, cli.format, out)?;
        return Ok(RunStatus::Pass);
    }

    let jobs = match (&target, cli.family) {
        (Target::Catalog(names), None) => names
            .iter()
            .flat_map(|&n| expected_rows(n))
            .map(|row| {
                let expected = (!cli.no_compare).then_some(*row);
                (row.bundle.to_string(), row.bundle.bundle(), RowSpec::from_expected(row), expected)
            })
            .collect(),
        (Target::Custom(..), None) => {
            bail!(Error::Config("custom bundles need --family".into()))
        }
        (_, Some(family)) => {
            let (name, bundle, catalog) = target.single()?;
            let spec = spec_from_flags(cli, family);
            let expected = catalog
                .filter(|_| !cli.no_compare)
                .and_then(|c| expected_rows(c).find(|r| matches_spec(r, &spec, &bundle)).copied());
            vec![(name, bundle, spec, expected)]
        }
    };
    let report = run_rows(jobs, &cfg, &tol);
    report::write_report(&report, cli.format, out)?;
    for row in &report.rows {
        if let Err(e) = &row.solved {
            eprintln!("{} {}: {e}", row.bundle, row.spec.family);
        }
    }
    Ok(report.status())
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) => RunStatus::of_error(e).exit_code() as u8,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let result = (|| -> anyhow::Result<RunStatus> {
        match &cli.out {
            Some(path) => {
                let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
                let mut w = BufWriter::new(file);
                let status = run(&cli, &mut w)?;
                w.flush()?;
                Ok(status)
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                run(&cli, &mut w)
            }
        }
    })();

    match result {
        Ok(status) => ExitCode::from(status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

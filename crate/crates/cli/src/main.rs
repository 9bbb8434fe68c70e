use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use finfree::experiments::{
    self, to_table, ConjectureSource, ExperimentConfig, SeedSpec, Table, Tolerances,
};
use finfree::io::polynomial_json;
use finfree::{
    additive_convolve, lln_limit_polynomial, multiplicative_convolve, Error, MeasureSpec,
    PolynomialFile, SolverConfig,
};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "finfree",
    version,
    about = "Finite free convolutions and their limit roots"
)]
struct Cli {
    /// Bisection budget per root, in bits.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Mult,
    Add,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SourceKind {
    Laguerre,
    TwoRoot,
    Measure,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convolve two polynomial files of equal degree.
    Convolve {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Mult)]
        mode: Mode,
    },
    /// Limit roots R_i of the multiplicative powers of a polynomial.
    Lln {
        input: PathBuf,
        /// Also write the limit polynomial as JSON to this file.
        #[arg(long)]
        poly_out: Option<PathBuf>,
    },
    /// Roots of p^{⊠n} against their limits over an n-schedule.
    Converge {
        /// Experiment config (JSON); flags override its fields
        #[arg(long)]
        config: Option<PathBuf>,
        /// `laguerre:D`, `two-root:D`, `constant:C:D`, `roots:a,b,..` or `e-tilde:1,a,..`.
        #[arg(long, conflicts_with = "input")]
        seed: Option<String>,
        /// Seed polynomial file.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Comma-separated powers.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<u32>>,
        /// Relative root tolerance [default: 1e-30]
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// KS distance of the limit-root law to Φ(μ) over a degree schedule.
    Conjecture {
        /// Experiment config (JSON); flags override its fields
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        source: Option<SourceKind>,
        /// Measure for `--source measure`: `mp`, `bernoulli-half`, `uniform`,
        /// `point:C`, inline JSON, or a JSON file.
        #[arg(long)]
        measure: Option<String>,
        /// Comma-separated degrees.
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<usize>>,
    },
    /// Degree-2 closed form x² - 2x + 2^-n against the generic solver.
    RateD2 {
        #[arg(long, default_value_t = 64)]
        n_max: u32,
        /// Relative root tolerance [default: 1e-30]
        #[arg(long)]
        rel_tol: Option<f64>,
    },
    /// Quantile table of Φ(μ).
    Phi {
        #[arg(long)]
        measure: String,
        #[arg(long, default_value_t = 99)]
        points: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(String),
    /// Output was written but some rows hit the precision budget.
    PartialPrecision(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}

fn parse_seed(s: &str) -> Outcome<SeedSpec> {
    let bad = || Error::Config(format!("unrecognized seed `{s}`"));
    let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
    let degree = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    Ok(match kind {
        "laguerre" => SeedSpec::Laguerre {
            degree: degree(rest)?,
        },
        "two-root" => SeedSpec::TwoRoot {
            degree: degree(rest)?,
        },
        "constant" => {
            let (value, d) = rest.split_once(':').ok_or_else(bad)?;
            SeedSpec::Constant {
                value: value.to_string(),
                degree: degree(d)?,
            }
        }
        "roots" => SeedSpec::Roots {
            roots: parse_list(rest),
        },
        "e-tilde" => SeedSpec::ETilde {
            e_tilde: parse_list(rest),
        },
        _ => return Err(bad().into()),
    })
}

fn parse_measure(s: &str) -> Outcome<MeasureSpec> {
    let t = s.trim();
    Ok(match t {
        "mp" => MeasureSpec::MarchenkoPastur,
        "bernoulli-half" | "bernoulli_half" => MeasureSpec::BernoulliHalf,
        "uniform" => MeasureSpec::Uniform,
        _ if t.starts_with("point:") => {
            MeasureSpec::point_mass(finfree::precise::parse_rational(&t["point:".len()..])?)?
        }
        _ if t.starts_with('{') => MeasureSpec::from_json(t)?,
        _ => {
            let text = std::fs::read_to_string(t)
                .map_err(|e| Error::Parse(format!("measure `{t}`: {e}")))?;
            MeasureSpec::from_json(&text)?
        }
    })
}

fn load_config(path: Option<&Path>, name: &str) -> Outcome<ExperimentConfig> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            Ok(ExperimentConfig::from_json(&text)?)
        }
        None => Ok(ExperimentConfig::new(name)),
    }
}

fn solver_config(tol: &Tolerances, bits: Option<u32>) -> Outcome<SolverConfig> {
    let cfg = tol.solver_config()?;
    Ok(match bits {
        Some(0) => return Err(Error::Config("precision bits must be positive".into()).into()),
        Some(b) => cfg.with_precision_bits(b),
        None => cfg,
    })
}

struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    fn writer(&self) -> Outcome<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn table(&self, table: &Table) -> Outcome<()> {
        let mut w = self.writer()?;
        match self.format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(&mut w);
                csv.write_record(&table.columns)?;
                for row in table.rendered_rows() {
                    csv.write_record(&row)?;
                }
                csv.flush()?;
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut w, &table.to_json()).map_err(io::Error::from)?;
                writeln!(w)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    fn text(&self, text: &str) -> Outcome<()> {
        let mut w = self.writer()?;
        writeln!(w, "{text}")?;
        w.flush()?;
        Ok(())
    }
}

fn run(cli: Cli) -> Outcome<()> {
    let mut sink = Sink {
        out: cli.out.clone(),
        format: cli.format,
    };
    match cli.command {
        Command::Convolve { left, right, mode } => {
            let (a, b) = (PolynomialFile::read(&left)?, PolynomialFile::read(&right)?);
            let text = match mode {
                Mode::Mult => {
                    let p = multiplicative_convolve(&a.to_profile()?, &b.to_profile()?)?;
                    polynomial_json(&p.to_coefficients()?, Some(&p), None)
                }
                Mode::Add => polynomial_json(
                    &additive_convolve(&a.to_poly()?, &b.to_poly()?)?,
                    None,
                    None,
                ),
            };
            sink.text(&text)
        }
        Command::Lln { input, poly_out } => {
            let p = PolynomialFile::read(&input)?.to_profile()?;
            let rows = experiments::lln_rows(&p)?;
            let limit = lln_limit_polynomial(&p);
            let limits: Vec<_> = rows.iter().map(|r| r.limit.clone()).collect();
            let limit_json = polynomial_json(&limit, None, Some(&limits));
            if let Some(path) = poly_out {
                std::fs::write(path, format!("{limit_json}\n"))?;
            }
            match sink.format {
                Format::Csv => sink.table(&to_table(&rows)),
                Format::Json => {
                    let limit: serde_json::Value =
                        serde_json::from_str(&limit_json).expect("valid JSON");
                    let doc = json!({"rows": to_table(&rows).to_json(), "limit_polynomial": limit});
                    sink.text(&serde_json::to_string_pretty(&doc).expect("serializable"))
                }
            }
        }
        Command::Converge {
            config,
            seed,
            input,
            n,
            rel_tol,
        } => {
            let mut cfg = load_config(config.as_deref(), "converge")?;
            if let Some(s) = seed {
                cfg.seed = Some(parse_seed(&s)?);
            }
            if let Some(path) = input {
                cfg.seed = Some(SeedSpec::File { path });
            }
            if let Some(n) = n {
                cfg.n_schedule = n;
            }
            if let Some(t) = rel_tol {
                cfg.tolerances.rel_tol = t;
            }
            cfg.validate()?;
            let seed = cfg.seed.as_ref().ok_or_else(|| {
                Error::Config("converge needs --seed, --input or a config seed".into())
            })?;
            let solver = solver_config(&cfg.tolerances, cli.precision_bits)?;
            let rows = experiments::converge(&seed.profile()?, &cfg.n_schedule, &solver)?;
            if sink.out.is_none() {
                sink.out = cfg.output.clone();
            }
            sink.table(&to_table(&rows))?;
            match rows.iter().filter(|r| r.error.is_some()).count() {
                0 => Ok(()),
                k => Err(Failure::PartialPrecision(k)),
            }
        }
        Command::Conjecture {
            config,
            source,
            measure,
            d,
        } => {
            let mut cfg = load_config(config.as_deref(), "conjecture")?;
            match source {
                Some(SourceKind::Laguerre) => cfg.source = Some(ConjectureSource::Laguerre),
                Some(SourceKind::TwoRoot) => cfg.source = Some(ConjectureSource::TwoRoot),
                Some(SourceKind::Measure) | None => {
                    if let Some(m) = &measure {
                        cfg.source = Some(ConjectureSource::Measure {
                            measure: parse_measure(m)?,
                        });
                    } else if source.is_some() {
                        return Err(Error::Config("--source measure needs --measure".into()).into());
                    }
                }
            }
            if let Some(d) = d {
                cfg.d_schedule = d;
            }
            cfg.validate()?;
            let src = cfg.source.as_ref().ok_or_else(|| {
                Error::Config("conjecture needs --source or a config source".into())
            })?;
            if cfg.d_schedule.is_empty() {
                return Err(
                    Error::Config("conjecture needs a degree schedule (--d)".into()).into(),
                );
            }
            let rows = experiments::conjecture(src, &cfg.d_schedule)?;
            if sink.out.is_none() {
                sink.out = cfg.output.clone();
            }
            sink.table(&to_table(&rows))
        }
        Command::RateD2 { n_max, rel_tol } => {
            let mut tol = Tolerances::default();
            if let Some(t) = rel_tol {
                tol.rel_tol = t;
            }
            let solver = solver_config(&tol, cli.precision_bits)?;
            sink.table(&to_table(&experiments::rate_d2(n_max, &solver)?))
        }
        Command::Phi { measure, points } => {
            let mu = parse_measure(&measure)?;
            sink.table(&to_table(&experiments::phi_table(&mu, points)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precision() { 3 } else { 2 })
        }
        Err(Failure::PartialPrecision(k)) => {
            eprintln!("error: {k} rows exceeded the precision budget");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

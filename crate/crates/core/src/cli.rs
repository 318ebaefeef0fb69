//! Batch command-line front end.
//!
//! Exit codes: 0 on success, 2 for argument errors, 1 for runtime errors.
//! Every randomized subcommand takes an explicit `--seed`.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::closedform::{expected_difference_closed, p_theta, upper_bound};
use crate::discrepancy::{
    expected_difference_mc, expected_difference_quadrature, expected_l2_squared_mc,
    expected_l2_squared_quadrature, l2_squared_exact, ExpectationResult, Method, QuadratureSpec,
};
use crate::error::{Error, Result};
use crate::geometry::{build_partition, PartitionSpec, Theta};
use crate::io::{fmt_f64, point_set_header, read_point_blocks, to_json_string, write_points};
use crate::sampling::{sample_partition, SeedSpec};

#[derive(Debug, Parser)]
#[command(
    name = "convex-strata",
    version,
    about = "Convex equivolume partitions, stratified sampling and expected L2-discrepancy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit the partition as JSON.
    Partition {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit stratified point sets as CSV, one block per replicate.
    Sample {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        replicates: u64,
        /// Omit the `# spec ...` provenance line before each block.
        #[arg(long)]
        no_header: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact L2² of each block of a point-set CSV file.
    L2 {
        input: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Expected L2² by quadrature or Monte Carlo.
    Expected {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Quad)]
        method: MethodArg,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value_t = 100_000)]
        replicates: u64,
        /// Required with `--method mc`.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// E L2²(theta) − E L2²(theta2) by coupled Monte Carlo, quadrature and closed form.
    Compare {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_parser = parse_theta)]
        theta2: Theta,
        #[arg(long, default_value_t = 100_000)]
        replicates: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate P(theta) and the closed-form difference on a theta grid over [0, pi/2].
    Sweep {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        /// Number of theta values, endpoints included.
        #[arg(long, default_value_t = 91)]
        k: usize,
        /// Also evaluate the quadrature difference for every row.
        #[arg(long)]
        quadrature: bool,
        #[command(flatten)]
        quad: QuadArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Upper bound on E L2².
    Bound {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct SpecArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    d: usize,
    /// Radians, or one of: zero, critical (arctan 1/2), quarter-pi, half-pi.
    #[arg(long, value_parser = parse_theta)]
    theta: Theta,
}

impl SpecArgs {
    fn spec(&self) -> Result<PartitionSpec> {
        PartitionSpec::new(self.m, self.d, self.theta)
    }
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Nodes per axis (power of two). Defaults to 1024 for d = 2, 256 for d = 3, 64 for d = 4.
    #[arg(long)]
    grid: Option<usize>,
    /// Report the plain midpoint value instead of the Richardson value.
    #[arg(long)]
    no_refine: bool,
}

impl QuadArgs {
    fn spec(&self, d: usize) -> Result<QuadratureSpec> {
        let n = self.grid.unwrap_or(match d {
            0..=2 => 1024,
            3 => 256,
            _ => 64,
        });
        Ok(QuadratureSpec::new(n)?.with_refine(!self.no_refine))
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Quad,
    Mc,
}

fn parse_theta(s: &str) -> std::result::Result<Theta, String> {
    Theta::parse(s).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Documents go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_argument_error() {
                2
            } else {
                1
            }
        }
    }
}

fn emit(out: &mut dyn Write, args: &OutputArgs, text: &str) -> Result<()> {
    match &args.output {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_line<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(to_json_string(value)? + "\n")
}

fn only_json(args: &OutputArgs, what: &str) -> Result<()> {
    if args.format == Some(Format::Csv) {
        return Err(Error::argument(format!("{what} output is JSON only")));
    }
    Ok(())
}

fn results_csv(rows: &[(&str, &ExpectationResult)]) -> String {
    let mut s = String::from("label,method,value,error\n");
    for (label, r) in rows {
        let method = serde_json::to_value(r.method).expect("enum serializes");
        s += &format!(
            "{label},{},{},{}\n",
            method.as_str().unwrap_or_default(),
            fmt_f64(r.value),
            fmt_f64(r.error)
        );
    }
    s
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Partition { spec, out: o } => {
            only_json(&o, "partition")?;
            let partition = build_partition(&spec.spec()?);
            emit(out, &o, &json_line(&partition)?)
        }
        Command::Sample {
            spec,
            seed,
            replicates,
            no_header,
            out: o,
        } => {
            if o.format == Some(Format::Json) {
                return Err(Error::argument("sample output is CSV only"));
            }
            let spec = spec.spec()?;
            let partition = build_partition(&spec);
            let mut buf = Vec::new();
            for r in 0..replicates {
                let s = SeedSpec::new(seed, r);
                if !no_header {
                    writeln!(buf, "{}", point_set_header(&spec, &s))?;
                }
                write_points(&mut buf, &sample_partition(&partition, s).points)?;
            }
            emit(out, &o, &String::from_utf8(buf).expect("ASCII"))
        }
        Command::L2 { input, out: o } => {
            let blocks = read_point_blocks(BufReader::new(File::open(&input)?))?;
            if blocks.is_empty() {
                return Err(Error::argument(format!(
                    "{} holds no points",
                    input.display()
                )));
            }
            let mut text = String::new();
            if o.format == Some(Format::Csv) {
                text += "block,n,d,value\n";
            }
            for (i, block) in blocks.iter().enumerate() {
                let value = l2_squared_exact(&block.points)?;
                if o.format == Some(Format::Csv) {
                    text += &format!(
                        "{i},{},{},{}\n",
                        block.points.len(),
                        block.points.dim(),
                        fmt_f64(value)
                    );
                } else {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        method: &'static str,
                        value: f64,
                        n: usize,
                        d: usize,
                        #[serde(skip_serializing_if = "Option::is_none")]
                        header: Option<&'a str>,
                    }
                    text += &json_line(&Row {
                        method: "exact",
                        value,
                        n: block.points.len(),
                        d: block.points.dim(),
                        header: block.header.as_deref(),
                    })?;
                }
            }
            emit(out, &o, &text)
        }
        Command::Expected {
            spec,
            method,
            quad,
            replicates,
            seed,
            out: o,
        } => {
            let spec = spec.spec()?;
            let partition = build_partition(&spec);
            let result = match method {
                MethodArg::Quad => {
                    expected_l2_squared_quadrature(&partition, &quad.spec(spec.d())?)?
                }
                MethodArg::Mc => {
                    let seed = seed.ok_or_else(|| {
                        Error::argument("--method mc requires an explicit --seed")
                    })?;
                    expected_l2_squared_mc(&partition, replicates, seed)?
                }
            };
            let text = match o.format {
                Some(Format::Csv) => results_csv(&[("expected", &result)]),
                _ => json_line(&result)?,
            };
            emit(out, &o, &text)
        }
        Command::Compare {
            spec,
            theta2,
            replicates,
            seed,
            quad,
            out: o,
        } => {
            let spec_a = spec.spec()?;
            let spec_b = spec_a.with_theta(theta2);
            let (a, b) = (build_partition(&spec_a), build_partition(&spec_b));
            let closed = ExpectationResult {
                value: expected_difference_closed(&spec_a) - expected_difference_closed(&spec_b),
                error: 0.0,
                method: Method::ClosedForm,
                spec: Some(spec_a),
                spec2: Some(spec_b),
                replicates: None,
                grid: None,
            };
            let quadrature = expected_difference_quadrature(&a, &b, &quad.spec(spec_a.d())?)?;
            let monte_carlo = expected_difference_mc(&a, &b, replicates, seed)?;
            let text = match o.format {
                Some(Format::Csv) => results_csv(&[
                    ("monte_carlo", &monte_carlo),
                    ("quadrature", &quadrature),
                    ("closed_form", &closed),
                ]),
                _ => {
                    #[derive(Serialize)]
                    struct Comparison<'a> {
                        monte_carlo: &'a ExpectationResult,
                        quadrature: &'a ExpectationResult,
                        closed_form: &'a ExpectationResult,
                    }
                    json_line(&Comparison {
                        monte_carlo: &monte_carlo,
                        quadrature: &quadrature,
                        closed_form: &closed,
                    })?
                }
            };
            emit(out, &o, &text)
        }
        Command::Sweep {
            m,
            d,
            k,
            quadrature,
            quad,
            out: o,
        } => {
            let rows = sweep(m, d, k, quadrature.then(|| quad.spec(d)).transpose()?)?;
            let text = match o.format {
                Some(Format::Json) => json_line(&rows)?,
                _ => {
                    let mut s = String::from("theta,p_theta,closed_form_target,value,error\n");
                    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
                    for r in &rows {
                        s += &format!(
                            "{},{},{},{},{}\n",
                            fmt_f64(r.theta),
                            fmt_f64(r.p_theta),
                            fmt_f64(r.closed_form_target),
                            opt(r.value),
                            opt(r.error)
                        );
                    }
                    s
                }
            };
            emit(out, &o, &text)
        }
        Command::Bound { spec, out: o } => {
            let report = upper_bound(&spec.spec()?)?;
            let text = match o.format {
                Some(Format::Csv) => format!(
                    "m,d,theta,base_term,correction,total,cn_bound\n{},{},{},{},{},{},{}\n",
                    report.m,
                    report.d,
                    report.theta,
                    fmt_f64(report.base_term),
                    fmt_f64(report.correction),
                    fmt_f64(report.total),
                    fmt_f64(report.cn_bound)
                ),
                _ => json_line(&report)?,
            };
            emit(out, &o, &text)
        }
    }
}

/// One row of a θ sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub p_theta: f64,
    /// `P(θ) / (N³ · 3^{d−2})`.
    pub closed_form_target: f64,
    /// Quadrature difference against `θ = π/2`, when requested.
    pub value: Option<f64>,
    pub error: Option<f64>,
}

/// `k` equally spaced angles on `[0, π/2]`, endpoints exact.
pub fn sweep(m: usize, d: usize, k: usize, quad: Option<QuadratureSpec>) -> Result<Vec<SweepRow>> {
    if k < 2 {
        return Err(Error::argument("sweep needs at least 2 angles"));
    }
    let jittered = build_partition(&PartitionSpec::new(m, d, Theta::HALF_PI)?);
    (0..k)
        .map(|i| {
            let theta = match i {
                0 => Theta::ZERO,
                _ if i == k - 1 => Theta::HALF_PI,
                _ => Theta::new(std::f64::consts::FRAC_PI_2 * i as f64 / (k - 1) as f64)?,
            };
            let spec = PartitionSpec::new(m, d, theta)?;
            let (value, error) = match &quad {
                Some(q) => {
                    let r = expected_difference_quadrature(&build_partition(&spec), &jittered, q)?;
                    (Some(r.value), Some(r.error))
                }
                None => (None, None),
            };
            Ok(SweepRow {
                theta: theta.radians(),
                p_theta: p_theta(theta),
                closed_form_target: expected_difference_closed(&spec),
                value,
                error,
            })
        })
        .collect()
}

//! Argument parsing and subcommand dispatch.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dyncap_core::cqstate::{entropic_triple, CqEnsemble, EnsembleEntropies};
use dyncap_core::dcap::{
    additivity_gap, dcap_closed_form_erasure, dcap_optimize, OptimizerBudget, TradeoffWeights, DEFAULT_SEED,
};
use dyncap_core::entropy::{coherent_information, mutual_information, vn_entropy};
use dyncap_core::oracle::{
    oracle_additivity, oracle_dcap, oracle_dephasing_diagonal_sufficiency, oracle_holevo_erasure, BlochGrid,
    EnsembleGrid, HolevoGrid, OracleReport, TwoCopyGrid,
};
use dyncap_core::qmat::set_max_dim;
use dyncap_core::region::{
    in_region, sample_boundary, supporting_hyperplane, weighted_bound_max, Hyperplane, RateTriple, WeightVector,
    DEFAULT_GRID,
};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::formats::{read_ensemble, read_state, write_boundary_csv, EnsembleFile};
use crate::spec::ChannelSpec;

/// Environment variable overriding the matrix dimension cap.
pub const MAX_DIM_ENV: &str = "DYNCAP_MAX_DIM";

#[derive(Debug, Parser)]
#[command(name = "dyncap", version, about = "Dynamic capacity regions of quantum channels")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies of a state, optionally after a channel.
    Entropy {
        /// JSON file `{"rho": [[[re,im],..],..], "dims": [..]}`.
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        channel: Option<ChannelSpec>,
    },
    /// Entropic triple and CEF point of an ensemble.
    Triple {
        #[arg(long)]
        channel: ChannelSpec,
        /// JSON file `{"entries": [{"p": .., "rho": ..}, ..]}`.
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Optimize the weighted objective over ensembles.
    Dcap {
        #[arg(long)]
        channel: ChannelSpec,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Sample the closed-form region boundary.
    Region {
        #[arg(long)]
        channel: ChannelSpec,
        #[arg(long, default_value_t = 101)]
        samples: usize,
    },
    /// Maximize a linear functional over the region.
    Hyperplane {
        #[arg(long)]
        channel: ChannelSpec,
        /// Weights `c,q,e`.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        weights: [f64; 3],
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Test whether a rate triple lies in the region.
    Member {
        #[arg(long)]
        channel: ChannelSpec,
        /// Rates `c,q,e`.
        #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
        point: [f64; 3],
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Brute-force grid checks.
    Oracle {
        #[arg(long)]
        channel: ChannelSpec,
        #[arg(long, value_enum, default_value_t = OracleMode::Dcap)]
        mode: OracleMode,
        #[command(flatten)]
        weights: WeightArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Compare two-copy and doubled single-copy optima.
    Additivity {
        #[arg(long)]
        channel: ChannelSpec,
        #[command(flatten)]
        weights: WeightArgs,
        /// Use the brute-force oracle instead of the optimizer.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    /// Grid maximum of the weighted objective.
    Dcap,
    /// Full grid against the bit-flip pair family (dephasing only).
    Sufficiency,
    /// Single- and two-copy Holevo information (erasure only).
    Holevo,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
}

impl WeightArgs {
    fn weights(&self) -> Result<TradeoffWeights, CliError> {
        Ok(TradeoffWeights::new(self.lambda, self.mu)?)
    }
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Cap on the ensemble size `|X|`.
    #[arg(long)]
    pub max_states: Option<usize>,
    /// Objective evaluation budget.
    #[arg(long)]
    pub evaluations: Option<usize>,
}

impl SearchArgs {
    fn budget(&self) -> OptimizerBudget {
        let mut b = OptimizerBudget {
            seed: self.seed,
            max_states: self.max_states,
            ..OptimizerBudget::default()
        };
        if let Some(n) = self.evaluations {
            b.max_evaluations = n;
        }
        b
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Polar divisions of `[0, pi]`.
    #[arg(long, default_value_t = 12)]
    pub polar: usize,
    /// Azimuthal divisions of `[0, 2pi)`.
    #[arg(long, default_value_t = 24)]
    pub azimuth: usize,
    /// Bloch radii, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    pub radii: Vec<f64>,
    /// Probability step is `1/simplex`.
    #[arg(long, default_value_t = 8)]
    pub simplex: usize,
    /// Cap on the ensemble size `|X|`.
    #[arg(long, default_value_t = 2)]
    pub max_states: usize,
}

impl GridArgs {
    fn ensemble_grid(&self) -> EnsembleGrid {
        EnsembleGrid {
            states: BlochGrid {
                polar_divisions: self.polar,
                azimuth_divisions: self.azimuth,
                radii: self.radii.clone(),
            },
            simplex_denominator: self.simplex,
            max_states: self.max_states,
        }
    }
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let vals: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("'{v}' is not a number")))
        .collect::<Result<_, _>>()?;
    let arr: [f64; 3] = vals
        .try_into()
        .map_err(|v: Vec<f64>| format!("expected three comma-separated values, got {}", v.len()))?;
    if arr.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(arr)
}

/// Result of a subcommand before formatting.
pub enum Output {
    Json(Value),
    Boundary(Vec<dyncap_core::region::BoundarySample>, String),
}

fn ensemble_json(ens: &CqEnsemble) -> Value {
    serde_json::to_value(EnsembleFile::from_ensemble(ens)).expect("ensemble serializes")
}

fn report_json(r: &OracleReport) -> Value {
    json!({
        "best_value": r.best_value,
        "target": r.comparison_target,
        "gap": r.gap,
        "grid": r.grid_spec,
        "evaluations": r.evaluations,
        "ensemble": ensemble_json(&r.best_ensemble),
    })
}

/// Closed-form value of the weighted objective where one is known.
fn closed_form_target(spec: &ChannelSpec, w: &TradeoffWeights) -> Result<Option<f64>, CliError> {
    Ok(match spec {
        ChannelSpec::Erasure { eps } => Some(dcap_closed_form_erasure(*eps, w)?),
        ChannelSpec::Dephasing { .. } => Some(weighted_bound_max(&spec.surface()?, w.lambda, w.mu, DEFAULT_GRID)?.0),
        _ => None,
    })
}

pub fn execute(command: &Command) -> Result<Output, CliError> {
    match command {
        Command::Entropy { state, channel } => {
            let rho = read_state(state)?;
            let mut out = Map::new();
            out.insert("dims".into(), json!(rho.dims()));
            out.insert("entropy".into(), json!(vn_entropy(&rho)?));
            if rho.dims().len() == 2 {
                out.insert("mutual_information".into(), json!(mutual_information(&rho)?));
                out.insert("coherent_information".into(), json!(coherent_information(&rho)?));
            }
            if let Some(spec) = channel {
                let ch = spec.build()?;
                let flat = rho.clone().with_dims(vec![rho.dim()])?;
                out.insert("channel".into(), json!(spec.to_string()));
                out.insert("output_entropy".into(), json!(vn_entropy(&ch.apply(&flat)?)?));
                out.insert(
                    "environment_entropy".into(),
                    json!(vn_entropy(&ch.apply_complementary(&flat)?)?),
                );
            }
            Ok(Output::Json(Value::Object(out)))
        }
        Command::Triple { channel, ensemble } => {
            let ch = channel.build()?;
            let ens = read_ensemble(ensemble)?;
            let t = entropic_triple(&ens, &ch)?;
            let h = EnsembleEntropies::of(&ens, &ch)?;
            let cef = h.cef();
            Ok(Output::Json(json!({
                "channel": channel.to_string(),
                "cq_bound": t.cq_bound,
                "qe_bound": t.qe_bound,
                "cqe_bound": t.cqe_bound,
                "holevo": h.holevo(),
                "cef_c": cef.c,
                "cef_q": cef.q,
                "cef_e": cef.e,
            })))
        }
        Command::Dcap {
            channel,
            weights,
            search,
        } => {
            let ch = channel.build()?;
            let w = weights.weights()?;
            let budget = search.budget();
            let r = dcap_optimize(&ch, &w, &budget)?;
            let closed = closed_form_target(channel, &w)?;
            Ok(Output::Json(json!({
                "channel": channel.to_string(),
                "lambda": w.lambda,
                "mu": w.mu,
                "seed": budget.seed,
                "value": r.value,
                "closed_form": closed,
                "evaluations": r.evaluations,
                "converged": r.converged,
                "state_cap": r.state_cap,
                "ensemble": ensemble_json(&r.argmax_ensemble),
            })))
        }
        Command::Region { channel, samples } => {
            let surface = channel.surface()?;
            Ok(Output::Boundary(
                sample_boundary(&surface, *samples)?,
                surface.param_name().to_string(),
            ))
        }
        Command::Hyperplane { channel, weights, grid } => {
            let surface = channel.surface()?;
            let w = WeightVector::new(weights[0], weights[1], weights[2]);
            let mut out = json!({
                "channel": channel.to_string(),
                "weights": weights,
                "param": surface.param_name(),
            });
            match supporting_hyperplane(&w, &surface, *grid)? {
                Hyperplane::Bounded { value, argmax } => {
                    out["bounded"] = json!(true);
                    out["value"] = json!(value);
                    out["argmax"] = json!(argmax);
                }
                Hyperplane::Unbounded => {
                    out["bounded"] = json!(false);
                    out["value"] = Value::Null;
                    out["argmax"] = Value::Null;
                }
            }
            Ok(Output::Json(out))
        }
        Command::Member { channel, point, grid } => {
            let surface = channel.surface()?;
            let m = in_region(&RateTriple::new(point[0], point[1], point[2]), &surface, *grid)?;
            Ok(Output::Json(json!({
                "channel": channel.to_string(),
                "point": point,
                "inside": m.inside,
                "param": surface.param_name(),
                "witness": m.witness,
                "slack": m.slack,
            })))
        }
        Command::Oracle {
            channel,
            mode,
            weights,
            grid,
        } => {
            let w = weights.weights()?;
            match mode {
                OracleMode::Dcap => {
                    let ch = channel.build()?;
                    let mut r = oracle_dcap(&ch, &w, &grid.ensemble_grid())?;
                    if let Some(t) = closed_form_target(channel, &w)? {
                        r = r.with_target(t);
                    }
                    Ok(Output::Json(report_json(&r)))
                }
                OracleMode::Sufficiency => {
                    let ChannelSpec::Dephasing { p } = channel else {
                        return Err(CliError::usage("sufficiency mode needs a dephasing channel"));
                    };
                    let s = oracle_dephasing_diagonal_sufficiency(*p, &w, &grid.ensemble_grid())?;
                    let mut out = report_json(&s.report);
                    out["restricted_nu"] = json!(s.restricted_nu);
                    Ok(Output::Json(out))
                }
                OracleMode::Holevo => {
                    let ChannelSpec::Erasure { eps } = channel else {
                        return Err(CliError::usage("holevo mode needs an erasure channel"));
                    };
                    let hg = HolevoGrid {
                        single: EnsembleGrid {
                            states: BlochGrid {
                                radii: vec![1.0],
                                ..grid.ensemble_grid().states
                            },
                            ..grid.ensemble_grid()
                        },
                        ..HolevoGrid::default()
                    };
                    let r = oracle_holevo_erasure(*eps, &hg)?;
                    Ok(Output::Json(json!({
                        "single": report_json(&r.single),
                        "two_copy": report_json(&r.two_copy),
                    })))
                }
            }
        }
        Command::Additivity {
            channel,
            weights,
            oracle,
            search,
        } => {
            let ch = channel.build()?;
            let w = weights.weights()?;
            if *oracle {
                let r = oracle_additivity(&ch, &w, &EnsembleGrid::default(), &TwoCopyGrid::default())?;
                Ok(Output::Json(json!({
                    "channel": channel.to_string(),
                    "lambda": w.lambda,
                    "mu": w.mu,
                    "two_copy": report_json(&r.two_copy),
                    "single": report_json(&r.single),
                    "product_value": r.product_value,
                    "excess": r.excess(),
                })))
            } else {
                let budget = search.budget();
                let g = additivity_gap(&ch, &w, &budget)?;
                Ok(Output::Json(json!({
                    "channel": channel.to_string(),
                    "lambda": w.lambda,
                    "mu": w.mu,
                    "seed": budget.seed,
                    "single": g.single.value,
                    "single_doubled": g.single_doubled,
                    "two_copy_value": g.two_copy_value,
                    "gap": g.gap(),
                })))
            }
        }
    }
}

/// Top-level scalar fields as a two-line CSV.
fn write_flat_csv(out: &mut dyn Write, v: &Value) -> io::Result<()> {
    let Value::Object(map) = v else {
        return writeln!(out, "{v}");
    };
    let mut keys = Vec::new();
    let mut vals = Vec::new();
    for (k, x) in map {
        let cell = match x {
            Value::Number(n) => match n.as_f64() {
                Some(f) if n.is_f64() => crate::formats::sig9(f),
                _ => n.to_string(),
            },
            Value::Bool(b) => b.to_string(),
            Value::String(s) => s.clone(),
            Value::Null => String::new(),
            _ => continue,
        };
        keys.push(k.clone());
        vals.push(cell);
    }
    writeln!(out, "{}", keys.join(","))?;
    writeln!(out, "{}", vals.join(","))
}

fn emit(output: &Output, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match (output, format) {
        (Output::Boundary(samples, _), Format::Csv) => write_boundary_csv(out, samples),
        (Output::Boundary(samples, param), Format::Json) => {
            let rows: Vec<Value> = samples
                .iter()
                .map(|s| {
                    json!({
                        param.as_str(): s.param,
                        "cq_bound": s.bounds.cq_bound,
                        "qe_bound": s.bounds.qe_bound,
                        "cqe_bound": s.bounds.cqe_bound,
                        "cef": {"c": s.cef.c, "q": s.cef.q, "e": s.cef.e},
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)
        }
        (Output::Json(v), Format::Json) => {
            serde_json::to_writer_pretty(&mut *out, v)?;
            writeln!(out)
        }
        (Output::Json(v), Format::Csv) => write_flat_csv(out, v),
    }
}

fn apply_env_cap() -> Result<(), CliError> {
    if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
        let cap: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|&c| c >= 1)
            .ok_or_else(|| CliError::usage(format!("{MAX_DIM_ENV} must be a positive integer, got '{raw}'")))?;
        set_max_dim(cap);
    }
    Ok(())
}

fn write_to(path: Option<&Path>, output: &Output, format: Format, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io_err = |p: &Path| {
        let p = p.to_path_buf();
        move |source| CliError::Io { path: p, source }
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(io_err(p))?;
            let mut w = BufWriter::new(file);
            emit(output, format, &mut w).map_err(io_err(p))?;
            w.flush().map_err(io_err(p))
        }
        None => emit(output, format, stdout).map_err(io_err(Path::new("<stdout>"))),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let rendered = e.render().to_string();
            let _ = if informational {
                write!(stdout, "{rendered}")
            } else {
                write!(stderr, "{rendered}")
            };
            return if informational { 0 } else { 1 };
        }
    };
    let result = apply_env_cap()
        .and_then(|()| execute(&cli.command))
        .and_then(|o| write_to(cli.output.as_deref(), &o, cli.format, stdout));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("dyncap").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn triple_parser() {
        assert_eq!(parse_triple("1,-2,0.5").unwrap(), [1.0, -2.0, 0.5]);
        assert!(parse_triple("1,2").is_err());
        assert!(parse_triple("1,x,2").is_err());
        assert!(parse_triple("1,inf,2").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["region", "--channel", "amplitude:g=0.1"]).0, 1);
        assert_eq!(run_args(&["region", "--channel", "identity:d=2"]).0, 1);
        assert_eq!(
            run_args(&["member", "--channel", "erasure:eps=0.25", "--point", "1,2"]).0,
            1
        );
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("region"));
    }

    #[test]
    fn negative_point_components_parse() {
        let (code, out, _) = run_args(&["member", "--channel", "dephasing:p=0.2", "--point", "-1,0.5,-0.2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["inside"], json!(true));
    }

    #[test]
    fn hyperplane_reports_unbounded() {
        let (code, out, _) = run_args(&["hyperplane", "--channel", "erasure:eps=0.25", "--weights", "0,0,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["bounded"], json!(false));
    }

    #[test]
    fn flat_csv_for_scalar_commands() {
        let (code, out, _) = run_args(&[
            "--format",
            "csv",
            "member",
            "--channel",
            "erasure:eps=0.25",
            "--point",
            "0,0,0",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].split(',').any(|k| k == "witness"));
    }
}

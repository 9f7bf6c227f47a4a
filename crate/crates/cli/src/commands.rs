//! Subcommand registry. Each command declares its own arguments and produces an
//! [`Output`] holding both renderings.

use std::fmt::Write as _;

use clap::{Arg, ArgAction, ArgMatches};
use cuspforge::input::{InputError, ManifoldInput};
use cuspforge::linalg::{Matrix, RankPolicy};
use cuspforge::pairing::PairingError;
use cuspforge::report::{self, Options, Stage};
use cuspforge::slice::{cusp_model, cusp_models, CuspParams, SliceError};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Math(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        match e {
            InputError::Rep(_) | InputError::Invalid(_) => CliError::Math(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<PairingError> for CliError {
    fn from(e: PairingError) -> Self {
        CliError::Math(e.to_string())
    }
}

/// What a command printed, in both formats; `ok = false` maps to exit code 1.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub ok: bool,
}

impl Output {
    fn of<T: Serialize + std::fmt::Display>(v: &T, ok: bool) -> Result<Self, CliError> {
        let json = serde_json::to_value(v).map_err(|e| CliError::Math(e.to_string()))?;
        Ok(Output { text: v.to_string(), json, ok })
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Global {
    pub json: bool,
    pub float: bool,
    pub rank_tol: Option<f64>,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn args(&self, cmd: clap::Command) -> clap::Command {
        cmd.arg(Arg::new("input").required(true).help("manifold JSON file, or bundled:4_1 / bundled:5_2 / bundled:6_3"))
    }
    fn run(&self, global: Global, m: &ArgMatches) -> Result<Output, CliError>;
}

pub fn registry() -> Vec<Box<dyn Command>> {
    vec![
        Box::new(Pipeline { name: "check", about: "parse and validate the input", stage: Stage::Check }),
        Box::new(Pipeline { name: "rigidity", about: "infinitesimal rigidity rel. boundary", stage: Stage::Rigidity }),
        Box::new(Pipeline {
            name: "slice-coords",
            about: "cusp shapes and slice coordinates",
            stage: Stage::SliceCoords,
        }),
        Box::new(Pipeline {
            name: "classify",
            about: "per-cusp type verdicts and the symmetry criterion",
            stage: Stage::Classify,
        }),
        Box::new(Lift),
        Box::new(CuspGen),
        Box::new(Pipeline {
            name: "report",
            about: "full pipeline including the boundary decomposition",
            stage: Stage::Full,
        }),
    ]
}

fn input_path(m: &ArgMatches) -> &str {
    m.get_one::<String>("input").expect("required by clap")
}

struct Pipeline {
    name: &'static str,
    about: &'static str,
    stage: Stage,
}

impl Command for Pipeline {
    fn name(&self) -> &'static str {
        self.name
    }

    fn about(&self) -> &'static str {
        self.about
    }

    fn run(&self, global: Global, m: &ArgMatches) -> Result<Output, CliError> {
        let input = ManifoldInput::read(input_path(m))?;
        let (manifold, validation) = input.assemble()?;
        if self.stage != Stage::Check && !validation.passed() {
            let failed: Vec<_> = validation.failures().map(|c| c.name.clone()).collect();
            return Err(CliError::Math(format!("representation fails validation: {}", failed.join(", "))));
        }
        let opts = &manifold.options;
        let rank_tol = global.rank_tol.or(opts.rank_tol).unwrap_or(RankPolicy::default().rel_tol);
        if !(rank_tol > 0.0 && rank_tol < 1.0) {
            return Err(CliError::Usage(format!("rank tolerance {rank_tol} must lie in (0, 1)")));
        }
        let options = Options {
            policy: RankPolicy { rel_tol: rank_tol },
            float: global.float || opts.float.unwrap_or(false),
            stage: self.stage,
        };
        let r = report::run(&manifold, options)?;
        if let Some(d) = &r.mode_agreement {
            if !d.passed() {
                let out = Output::of(&r, false)?;
                log::error!("float mode disagrees with exact mode");
                return Ok(out);
            }
        }
        let ok = r.ok();
        Output::of(&r, ok)
    }
}

struct Lift;

impl Command for Lift {
    fn name(&self) -> &'static str {
        "lift"
    }

    fn about(&self) -> &'static str {
        "rewrite an SL2C holonomy file with SO31 matrices"
    }

    fn run(&self, _: Global, m: &ArgMatches) -> Result<Output, CliError> {
        let manifold = ManifoldInput::read(input_path(m))?.load()?;
        let out = manifold.to_so31_input();
        let json = serde_json::to_value(&out).map_err(|e| CliError::Math(e.to_string()))?;
        let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Math(e.to_string()))?;
        // The lifted file is JSON in both modes.
        Ok(Output { text: text + "\n", json, ok: true })
    }
}

struct CuspGen;

fn fmt_matrix(out: &mut String, label: &str, m: &Matrix<f64>) {
    let _ = writeln!(out, "{label}");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{:>14.8}", x + 0.0)).collect();
        let _ = writeln!(out, "  [{}]", row.join(" "));
    }
}

fn slice_usage(e: SliceError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Deterministic sample points: leaves s ∈ {−1, 0, 1} in turn, (t₁, t₂) on a
/// golden-ratio Weyl sequence in [−1, 1]².
fn sample_coords(i: usize) -> (f64, f64, f64) {
    const G1: f64 = 0.618_033_988_749_894_8;
    const G2: f64 = 0.754_877_666_246_692_7;
    let s = (i % 3) as f64 - 1.0;
    let k = (i + 1) as f64;
    ((s), 2.0 * (k * G1).fract() - 1.0, 2.0 * (k * G2).fract() - 1.0)
}

impl Command for CuspGen {
    fn name(&self) -> &'static str {
        "cusp-gen"
    }

    fn about(&self) -> &'static str {
        "generalized cusp group generators and foliation samples"
    }

    fn args(&self, cmd: clap::Command) -> clap::Command {
        let names: Vec<&'static str> = cusp_models().iter().map(|m| m.name()).collect();
        cmd.arg(Arg::new("type").required(true).value_parser(names).help("cusp model"))
            .arg(Arg::new("lambda1").long("lambda1").value_parser(clap::value_parser!(f64)).default_value("1"))
            .arg(Arg::new("lambda2").long("lambda2").value_parser(clap::value_parser!(f64)).default_value("1"))
            .arg(
                Arg::new("samples")
                    .long("samples")
                    .value_parser(clap::value_parser!(usize))
                    .default_value("0")
                    .help("number of foliation sample points to emit as CSV"),
            )
            .arg(Arg::new("csv-only").long("csv-only").action(ArgAction::SetTrue).help("print only the CSV"))
    }

    fn run(&self, _: Global, m: &ArgMatches) -> Result<Output, CliError> {
        let model = cusp_model(m.get_one::<String>("type").expect("required")).map_err(slice_usage)?;
        let p = CuspParams {
            lambda1: *m.get_one::<f64>("lambda1").expect("default"),
            lambda2: *m.get_one::<f64>("lambda2").expect("default"),
        };
        let samples = *m.get_one::<usize>("samples").expect("default");

        let basis = [("M(1,0,0)", [1.0, 0.0, 0.0]), ("M(0,1,0)", [0.0, 1.0, 0.0]), ("M(0,0,1)", [0.0, 0.0, 1.0])];
        let lattice = [("lattice (1,0)", 1.0, 0.0), ("lattice (0,1)", 0.0, 1.0)];
        let mut text = String::new();
        let mut gens = Vec::new();
        let _ = writeln!(text, "model {} (lambda1 = {}, lambda2 = {})", model.name(), p.lambda1, p.lambda2);
        for (label, [x, y, z]) in basis {
            let g = model.group_element(x, y, z);
            fmt_matrix(&mut text, label, &g);
            gens.push(json!({ "label": label, "matrix": report::float_rows(&g) }));
        }
        for (label, x, y) in lattice {
            let g = model.lattice_element(p, x, y).map_err(slice_usage)?;
            fmt_matrix(&mut text, label, &g);
            gens.push(json!({ "label": label, "matrix": report::float_rows(&g) }));
        }

        let mut csv = String::from("a,b,c,s\n");
        let mut points = Vec::new();
        for i in 0..samples {
            let (s, t1, t2) = sample_coords(i);
            let [a, b, c] = model.leaf_point(p, s, t1, t2).map_err(slice_usage)?;
            let _ = writeln!(csv, "{a:.12},{b:.12},{c:.12},{s}");
            points.push([a, b, c, s]);
        }
        if samples > 0 {
            if m.get_flag("csv-only") {
                text = csv;
            } else {
                text.push_str(&csv);
            }
        }
        let json = json!({ "model": model.name(), "params": p, "generators": gens, "samples": points });
        Ok(Output { text, json, ok: true })
    }
}

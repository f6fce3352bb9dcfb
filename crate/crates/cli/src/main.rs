//! `nlkg`: command-line front end.
//!
//! Every subcommand reads a flat set of keys. Each key can be given as a
//! `--key value` flag or as a `key = value` line of the file named by
//! `--config`; flags win and unknown keys are rejected. Exit codes: 0 on
//! success, 1 when a check fails (or a computation breaks down), 2 on
//! usage errors.

mod commands;

use std::process::ExitCode;

use clap::{Arg, ArgAction, Command};
use nlkg_core::io::Params;
use nlkg_core::NlkgError;

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

/// A usage error raised by the front end itself.
#[derive(Debug)]
pub struct Usage(pub String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Keys accepted by every subcommand.
const COMMON: &[(&str, &str)] = &[
    ("seed", "seed of every randomised sample"),
    ("out-dir", "directory for relative output paths (default: $NLKG_OUT_DIR, else .)"),
    ("exec", "parallel | sequential"),
];

/// Keys that may be given as bare flags.
const SWITCHES: &[&str] = &["fourth-order"];

struct Sub {
    name: &'static str,
    about: &'static str,
    keys: &'static [(&'static str, &'static str)],
}

const SUBCOMMANDS: &[Sub] = &[
    Sub {
        name: "groundstate",
        about: "Compute the ground state Q and the level m",
        keys: &[
            ("model", "power:q | powersum:q1,l1;q2,l2 | critical | exp:p,k0,g"),
            ("dim", "space dimension"),
            ("mass", "mass coefficient c of -ΔQ + cQ = f'(Q) (default: the level's own)"),
            ("rmax", "radius of the radial grid"),
            ("n", "nodes of the radial grid"),
            ("out", "snapshot file for Q"),
            ("report", "CSV of K at Q over the sampled pairs"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "evolve",
        about: "Evolve initial data and run the blow-up and dispersal detectors",
        keys: &[
            ("init", "scaled-groundstate:c | gaussian:a,w[,b] | snapshot file"),
            ("model", "nonlinearity"),
            ("dim", "space dimension (default 1)"),
            ("geometry", "box | radial (default: radial for dim 3, else box)"),
            ("T", "final time (default 10)"),
            ("dt", "fixed time step (default: adaptive)"),
            ("L", "box side or ball radius"),
            ("n", "nodes per axis"),
            ("checkpoints", "dispersal checkpoints (default 10)"),
            ("fourth-order", "use the fourth-order composition"),
            ("radius", "cutoff radius of the box diagnostics (default L/8)"),
            ("out-record", "CSV time series"),
            ("out-final", "snapshot of the final state"),
            ("out-diagnostics", "CSV of box diagnostics at the first and last time"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "classify",
        about: "Classify initial data under many scaling pairs",
        keys: &[
            ("model", "nonlinearity"),
            ("dim", "space dimension"),
            ("init", "scaled-groundstate:c | gaussian:a,w[,b] | snapshot file"),
            ("pairs", "number of pairs across the admissible cone (default 24)"),
            ("out", "CSV of verdicts (default: standard output)"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "sweep",
        about: "Run the sign-dichotomy harness",
        keys: &[
            ("suite", "1d (f = |u|^8) | 3d (f = |u|^4/4), default 1d"),
            ("scaled", "comma-separated multiples of Q (default 0.5,0.8,0.95,1.05,1.2,2)"),
            ("bumps", "number of random bumps below m (default 0)"),
            ("T", "final time of each run (default: suite preset)"),
            ("pairs", "number of pairs (default 24)"),
            ("out", "CSV of rows"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "audit",
        about: "Audit the K-gap bound, the free-energy equivalence and small data",
        keys: &[
            ("model", "nonlinearity"),
            ("dim", "space dimension"),
            ("kind", "kgap | equivalence | smalldata | all (default all)"),
            ("fields", "number of sampled fields (default 500)"),
            ("pairs", "number of pairs (default 10)"),
            ("out", "CSV of the K-gap rows"),
            ("out-equivalence", "CSV of the equivalence rows"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "appendix-a",
        about: "Tabulate J on {K = 0} along a family for a pair outside the cone",
        keys: &[
            ("dim", "space dimension"),
            ("alpha", "scaling exponent α"),
            ("beta", "scaling exponent β"),
            ("q", "power of f = |u|^q"),
            ("out", "CSV of the family"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "exponents",
        about: "Check the exponent catalog exactly",
        keys: &[
            ("dim", "space dimension"),
            ("p1", "small-amplitude power, e.g. 3/2"),
            ("p2", "large-amplitude power, e.g. 4"),
            ("report", "JSON file with every relation"),
            ("format", "table | json on standard output (default table)"),
        ],
    },
    Sub {
        name: "tm-ratio",
        about: "Estimate the Trudinger-Moser ratio of exp:p,k0,g",
        keys: &[
            ("p", "power p (default 5)"),
            ("kappa0", "κ₀ (default 1)"),
            ("gamma", "γ (default 0)"),
            ("A", "gradient bound (default √(4π/κ₀))"),
            ("family", "family size (default 48)"),
            ("summary", "JSON summary file"),
        ],
    },
    Sub {
        name: "landscape",
        about: "Tabulate J, K, F along a scaling ray",
        keys: &[
            ("model", "nonlinearity"),
            ("dim", "space dimension"),
            ("init", "field (default scaled-groundstate:1)"),
            ("alpha", "α (default 1)"),
            ("beta", "β (default 0)"),
            ("lambda-min", "first λ (default -2)"),
            ("lambda-max", "last λ (default 2)"),
            ("count", "number of λ values (default 41)"),
            ("out", "CSV (default: standard output)"),
            ("summary", "JSON summary file"),
        ],
    },
];

fn command() -> Command {
    let mut cmd = Command::new("nlkg")
        .about("Ground states, dichotomy experiments and exponent checks for the focusing nonlinear Klein-Gordon equation")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in SUBCOMMANDS {
        let mut c = Command::new(sub.name).about(sub.about).arg(
            Arg::new("config").long("config").value_name("FILE").help("key = value file; flags take precedence"),
        );
        for (key, help) in sub.keys.iter().chain(COMMON) {
            let mut arg = Arg::new(*key).long(*key).help(*help).action(ArgAction::Set);
            arg = if SWITCHES.contains(key) {
                arg.num_args(0..=1).default_missing_value("true").value_name("BOOL")
            } else {
                arg.value_name("VALUE").allow_negative_numbers(true)
            };
            c = c.arg(arg);
        }
        cmd = cmd.subcommand(c);
    }
    cmd
}

/// Errors caused by the inputs rather than by the computation.
fn is_usage(e: &anyhow::Error) -> bool {
    if e.downcast_ref::<Usage>().is_some() {
        return true;
    }
    matches!(
        e.downcast_ref::<NlkgError>(),
        Some(
            NlkgError::Parse(_)
                | NlkgError::ParamOutOfRange(_)
                | NlkgError::InvalidModel(_)
                | NlkgError::InadmissiblePair { .. }
                | NlkgError::InvalidGrid(_)
                | NlkgError::NonPowerOfTwo(_)
        )
    )
}

fn run(argv: Vec<String>) -> u8 {
    let matches = match command().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let spec = SUBCOMMANDS.iter().find(|s| s.name == name).expect("registered subcommand");
    let schema: Vec<&str> = spec.keys.iter().chain(COMMON).map(|(k, _)| *k).collect();
    let flags: Vec<(String, String)> = schema
        .iter()
        .filter_map(|k| sub.get_one::<String>(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    let config = sub.get_one::<String>("config").map(std::path::PathBuf::from);
    let result = Params::resolve(&schema, &flags, config.as_deref())
        .map_err(anyhow::Error::from)
        .and_then(|params| commands::dispatch(name, &params));
    match result {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_usage(&e) {
                eprintln!("run `nlkg {name} --help` for the accepted keys");
                2
            } else {
                1
            }
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}

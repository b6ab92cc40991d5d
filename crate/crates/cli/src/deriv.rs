use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use semilab::derivations::{
    build_noninner_case_i, build_noninner_case_ii, classify, derivation_norm_profile, derivation_space,
    inner_dimension, lambda_derivative, noninner_exists, ClassificationReport, DerivationAtRep, DerivationReport,
    NoninnerCase, NoninnerCertificate, NormOracle, ProfilePoint,
};
use semilab::linalg::{c, CMat};
use semilab::par::Strategy;

use crate::parse::{read, usize_list};
use crate::render::Report;
use crate::rep::{build, Built};
use crate::{CliError, CliResult, OracleArg, RepArgs, RunConfig};

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sample {
    /// `a ↦ π(a)X − Xπ(a)` for a seeded random `X`.
    Inner,
    /// The derivative of `π_{w,λ,μ}` in `λ`.
    Lambda,
}

#[derive(Args, Debug)]
pub struct Target {
    #[command(flatten)]
    rep: RepArgs,
    /// Derivation JSON file; its representation replaces the one built from the flags.
    #[arg(long)]
    derivation: Option<PathBuf>,
    /// Built-in derivation used when no file is given.
    #[arg(long, value_enum, default_value_t = Sample::Inner)]
    sample: Sample,
}

#[derive(Subcommand, Debug)]
pub enum DerivCmd {
    /// Dimensions and a basis of the derivation space.
    Space(RepArgs),
    /// Inner/outer, factor-through test and optional profile for one derivation.
    Classify {
        #[command(flatten)]
        target: Target,
        /// Longest word in the kernel searches.
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Truncations for a norm profile, comma separated (none by default).
        #[arg(long)]
        profile: Option<String>,
        #[arg(long, value_enum, default_value_t = OracleArg::Circle)]
        oracle: OracleArg,
    },
    /// Non-factoring derivation from an edge off the cycle.
    ConstructI {
        #[command(flatten)]
        rep: RepArgs,
        /// The off-cycle edge; defaults to the first one certified.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Non-factoring derivation from a loop on the cycle.
    ConstructIi {
        #[command(flatten)]
        rep: RepArgs,
        /// The loop; defaults to the first one certified.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Lower estimates of sup ‖D(a)‖ over ‖a‖ ≤ 1, deg a ≤ N.
    Profile {
        #[command(flatten)]
        target: Target,
        /// Truncations, comma separated (default: powers of two up to --truncation).
        #[arg(long)]
        ns: Option<String>,
        #[arg(long, value_enum, default_value_t = OracleArg::Circle)]
        oracle: OracleArg,
    },
}

#[derive(Serialize)]
struct SpaceReport {
    cycle: Vec<String>,
    dimension: usize,
    inner_dimension: usize,
    outer_dimension: usize,
    basis: Vec<Value>,
}

#[derive(Serialize)]
struct ClassifyOutput {
    validation: DerivationReport,
    classification: ClassificationReport,
}

#[derive(Serialize)]
struct ConstructOutput {
    certificate: NoninnerCertificate,
    edge: String,
    derivation: Value,
    validation: DerivationReport,
    classification: ClassificationReport,
}

#[derive(Serialize)]
struct ProfileOutput {
    oracle: NormOracle,
    profile: Vec<ProfilePoint>,
}

/// Derivation values only; the representation is implied by the command.
fn values_only(d: &DerivationAtRep) -> Value {
    let mut v = serde_json::to_value(d.to_wire()).expect("derivation serializes");
    if let Value::Object(m) = &mut v {
        m.remove("rep");
    }
    v
}

fn oracle(arg: OracleArg, cfg: &RunConfig) -> NormOracle {
    match arg {
        OracleArg::Circle => NormOracle::Circle { grid: cfg.grid as usize },
        OracleArg::Fock => NormOracle::Fock,
    }
}

fn target(t: &Target, cfg: &RunConfig) -> Result<(Built, DerivationAtRep), CliError> {
    let b = build(&t.rep)?;
    let d = match (&t.derivation, t.sample) {
        (Some(file), _) => {
            let d = DerivationAtRep::from_json(&read(file)?)?;
            if **d.rep().graph() != *b.graph {
                return Err(CliError::input("the derivation lives on a different graph"));
            }
            d
        }
        (None, Sample::Inner) => {
            let n = b.word.len();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let x = CMat::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            DerivationAtRep::inner_from(&b.rep, &x)
        }
        (None, Sample::Lambda) => lambda_derivative(&b.graph, &b.word, b.lambda, b.mu)?,
    };
    Ok((b, d))
}

fn default_ns(max: usize) -> Vec<usize> {
    let mut ns: Vec<usize> = std::iter::successors(Some(1usize), |n| Some(n * 2)).take_while(|&n| n <= max).collect();
    if ns.last() != Some(&max) {
        ns.push(max);
    }
    ns
}

fn construct(rep: &RepArgs, edge: Option<&str>, case_ii: bool, max_len: usize, cfg: &RunConfig) -> CliResult {
    let b = build(rep)?;
    let cert = noninner_exists(&b.graph, &b.word)?;
    let chosen = cert.cases.iter().find_map(|case| match (case, case_ii) {
        (NoninnerCase::OffCycleEdge { edge: e, .. }, false) | (NoninnerCase::LoopOnCycle { edge: e, .. }, true)
            if edge.is_none_or(|x| x == e) =>
        {
            Some(e.clone())
        }
        _ => None,
    });
    let Some(name) = chosen else {
        let which = if case_ii { "(ii)" } else { "(i)" };
        let what = edge.map(|e| format!(" for edge `{e}`")).unwrap_or_default();
        return Err(CliError::Input(
            format!("condition {which} does not hold{what}; see the certificate"),
            Some(Report::new("certificate", &cert, false)),
        ));
    };
    let e = b.graph.edge(&name)?;
    let d = if case_ii {
        build_noninner_case_ii(&b.graph, &b.word, b.lambda, b.mu, e)?
    } else {
        build_noninner_case_i(&b.graph, &b.word, b.lambda, b.mu, e)?
    };
    let validation = d.validate(cfg.tol);
    let classification = classify(&d, &b.word, max_len, cfg.tol, &[], NormOracle::Fock, Strategy::default())?;
    let ok = validation.passed && !classification.inner && !classification.factors;
    let title = if case_ii { "deriv construct-ii" } else { "deriv construct-i" };
    let out = ConstructOutput {
        certificate: cert,
        edge: name,
        derivation: values_only(&d),
        validation,
        classification,
    };
    Ok(Report::new(title, out, ok))
}

pub fn run(cmd: DerivCmd, cfg: &RunConfig) -> CliResult {
    match cmd {
        DerivCmd::Space(args) => {
            let b = build(&args)?;
            let space = derivation_space(&b.rep);
            let inner = inner_dimension(&b.rep);
            let r = SpaceReport {
                cycle: b.graph.word_names(&b.word),
                dimension: space.dimension,
                inner_dimension: inner,
                outer_dimension: space.dimension - inner,
                basis: space.basis.iter().map(values_only).collect(),
            };
            Ok(Report::new("deriv space", r, true))
        }
        DerivCmd::Classify {
            target: t,
            max_len,
            profile,
            oracle: o,
        } => {
            let (b, d) = target(&t, cfg)?;
            let ns = profile.as_deref().map(usize_list).transpose()?.unwrap_or_default();
            let validation = d.validate(cfg.tol);
            let classification = classify(&d, &b.word, max_len, cfg.tol, &ns, oracle(o, cfg), Strategy::default())?;
            let ok = validation.passed;
            Ok(Report::new(
                "deriv classify",
                ClassifyOutput {
                    validation,
                    classification,
                },
                ok,
            ))
        }
        DerivCmd::ConstructI { rep, edge, max_len } => construct(&rep, edge.as_deref(), false, max_len, cfg),
        DerivCmd::ConstructIi { rep, edge, max_len } => construct(&rep, edge.as_deref(), true, max_len, cfg),
        DerivCmd::Profile { target: t, ns, oracle: o } => {
            let (b, d) = target(&t, cfg)?;
            let ns = match ns {
                Some(s) => usize_list(&s)?,
                None => default_ns(cfg.truncation as usize),
            };
            let oracle = oracle(o, cfg);
            let profile = derivation_norm_profile(&d, &b.word, &ns, oracle, Strategy::default())?;
            let mut csv = String::from("n,value,at_n,witness\n");
            for p in &profile {
                let _ = writeln!(csv, "{},{},{},\"{}\"", p.n, p.value, p.at_n, p.witness.replace('"', "\"\""));
            }
            Ok(Report::new("deriv profile", ProfileOutput { oracle, profile }, true).with_csv(csv))
        }
    }
}

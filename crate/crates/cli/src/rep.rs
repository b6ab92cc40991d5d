use std::sync::Arc;

use clap::Subcommand;
use num_complex::Complex64;
use serde::Serialize;
use semilab::graph::{DirectedGraph, PathWord};
use semilab::par::Strategy;
use semilab::repn::{image_dimension, pi_w_lambda_mu, CcReport, FactorizationCheck, FactorizationReport, MatrixRep};

use crate::parse::{complex, load_graph, path, turns};
use crate::render::Report;
use crate::{CliError, CliResult, RepArgs, RunConfig};

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Emit the representation as JSON.
    Build(RepArgs),
    /// Check contractivity, ontoness and the factorization through the cycle model.
    Verify {
        #[command(flatten)]
        rep: RepArgs,
        /// Longest word compared in the factorization check.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

/// Everything needed to talk about `π_{w,λ,μ}`.
pub struct Built {
    pub graph: Arc<DirectedGraph>,
    pub word: PathWord,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub rep: MatrixRep,
}

pub fn build(args: &RepArgs) -> Result<Built, CliError> {
    let graph = load_graph(&args.graph)?;
    let word = path(&graph, &args.cycle)?;
    let lambda = complex(&args.lambda)?;
    if lambda.norm() > 1.0 + 1e-12 {
        return Err(CliError::input(format!("|λ| = {} exceeds 1", lambda.norm())));
    }
    let mu = turns(args.mu)?;
    let rep = pi_w_lambda_mu(&graph, &word, lambda, mu)?;
    Ok(Built {
        graph,
        word,
        lambda,
        mu,
        rep,
    })
}

#[derive(Serialize)]
struct VerifyReport {
    cycle: Vec<String>,
    dimension: usize,
    cc: CcReport,
    image_dimension: usize,
    onto: bool,
    factorization: FactorizationReport,
}

pub fn run(cmd: RepCmd, cfg: &RunConfig) -> CliResult {
    match cmd {
        RepCmd::Build(args) => {
            let b = build(&args)?;
            Ok(Report::new("rep build", b.rep.to_wire(), true))
        }
        RepCmd::Verify { rep, max_len } => {
            let b = build(&rep)?;
            let n = b.word.len();
            let cc = b.rep.validate_cc(cfg.tol);
            let dim = image_dimension(&b.rep, 2 * n);
            let factorization = FactorizationCheck::new(&b.graph, &b.word, max_len)?.run(
                b.lambda,
                b.mu,
                cfg.tol,
                Strategy::default(),
            )?;
            let ok = cc.passed && factorization.passed;
            let r = VerifyReport {
                cycle: b.graph.word_names(&b.word),
                dimension: n,
                cc,
                image_dimension: dim,
                onto: dim == n * n,
                factorization,
            };
            Ok(Report::new("rep verify", r, ok))
        }
    }
}

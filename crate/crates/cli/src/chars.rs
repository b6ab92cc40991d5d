use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use semilab::characters::{
    boundary_peaking_witness, boundary_profile, cauchy_bound_check, char_derivation, decompose,
    derivative_formula_check, enumerate_character_structures, parametrization_rank, CauchyReport, Character,
    CharacterJson, FormulaReport, ParametrizationReport, PeakingReport,
};
use semilab::derivations::ProfilePoint;
use semilab::graph::{single_vertex_graph, DirectedGraph};
use semilab::linalg::ComplexJson;
use semilab::poly::{random_poly, NcPoly};

use crate::parse::{complex_list, load_graph};
use crate::render::Report;
use crate::{CliError, CliResult, RunConfig};

const SAMPLES: usize = 100;
const SAMPLE_DEGREE: usize = 5;

#[derive(Args, Debug)]
pub struct Point {
    /// Coordinates of λ, comma separated `a+bi` values.
    #[arg(long)]
    lambda: String,
    /// Graph JSON file (default: one vertex with a loop per coordinate).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Vertex of the character.
    #[arg(long, default_value = "v0")]
    vertex: String,
}

#[derive(Subcommand, Debug)]
pub enum CharCmd {
    /// Character families of a graph, one per vertex.
    List { file: PathBuf },
    /// Decompose a point derivation and check it against the gradient formula.
    Deriv {
        #[command(flatten)]
        point: Point,
        /// Values on the loops, comma separated.
        #[arg(long)]
        d: String,
    },
    /// Peaking function at a boundary point, plus a profile when --d is given.
    Boundary {
        #[command(flatten)]
        point: Point,
        #[arg(long)]
        d: Option<String>,
        /// Grid points within this distance of λ_1 are excluded from the gap.
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
    },
}

fn character(p: &Point) -> Result<Character, CliError> {
    let lambda = complex_list(&p.lambda)?;
    let g: Arc<DirectedGraph> = match &p.graph {
        Some(file) => load_graph(file)?,
        None => Arc::new(single_vertex_graph(lambda.len())?),
    };
    Ok(Character::at_vertex(&g, &p.vertex, lambda)?)
}

#[derive(Serialize)]
struct Omega {
    index: usize,
    value: ComplexJson,
}

#[derive(Serialize)]
struct Decomp {
    d1: Vec<ComplexJson>,
    d2: Vec<ComplexJson>,
    omega: Vec<Omega>,
}

#[derive(Serialize)]
struct DerivReport {
    character: CharacterJson,
    d: Vec<ComplexJson>,
    decomposition: Decomp,
    formula: FormulaReport,
    cauchy: Option<CauchyReport>,
    parametrization: ParametrizationReport,
}

#[derive(Serialize)]
struct BoundaryReport {
    character: CharacterJson,
    peaking: PeakingReport,
    profile: Option<Vec<ProfilePoint>>,
}

fn samples(chi: &Character, cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Vec<NcPoly> {
    let deg = SAMPLE_DEGREE.min(cfg.degree_cap as usize);
    (0..SAMPLES)
        .map(|_| random_poly(chi.graph(), deg, 6, false, rng).with_degree_cap(cfg.degree_cap as usize))
        .collect()
}

pub fn run(cmd: CharCmd, cfg: &RunConfig) -> CliResult {
    match cmd {
        CharCmd::List { file } => {
            let g = load_graph(&file)?;
            Ok(Report::new("char list", enumerate_character_structures(&g), true))
        }
        CharCmd::Deriv { point, d } => {
            let chi = character(&point)?;
            let d = char_derivation(&chi, complex_list(&d)?)?;
            let parts = decompose(&d);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let polys = samples(&chi, cfg, &mut rng);
            let formula = derivative_formula_check(&d, &polys, cfg.tol)?;
            let cauchy = if chi.is_boundary() {
                None
            } else {
                Some(cauchy_bound_check(&d, &polys, cfg.grid as usize, &mut rng)?)
            };
            let parametrization = parametrization_rank(&chi, &polys)?;
            let ok = formula.passed && cauchy.as_ref().is_none_or(|c| c.passed) && parametrization.injective;
            let r = DerivReport {
                character: chi.to_wire(),
                d: d.d_wire(),
                decomposition: Decomp {
                    d1: parts.d1.d_wire(),
                    d2: parts.d2.d_wire(),
                    omega: parts
                        .omega
                        .iter()
                        .map(|&(index, value)| Omega {
                            index,
                            value: value.into(),
                        })
                        .collect(),
                },
                formula,
                cauchy,
                parametrization,
            };
            Ok(Report::new("char deriv", r, ok))
        }
        CharCmd::Boundary { point, d, margin } => {
            let chi = character(&point)?;
            if !chi.is_boundary() {
                return Err(CliError::input(format!("‖λ‖ = {} is not 1", chi.norm())));
            }
            let peaking = boundary_peaking_witness(chi.lambda(), cfg.grid as usize, margin)?;
            let profile = match d {
                Some(d) => {
                    let d = char_derivation(&chi, complex_list(&d)?)?;
                    let ns: Vec<usize> = std::iter::successors(Some(1usize), |n| Some(n * 2))
                        .take_while(|&n| n <= cfg.truncation as usize)
                        .collect();
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    Some(boundary_profile(&d, &ns, cfg.grid as usize, &mut rng))
                }
                None => None,
            };
            let ok = peaking.passed;
            let r = BoundaryReport {
                character: chi.to_wire(),
                peaking,
                profile,
            };
            Ok(Report::new("char boundary", r, ok))
        }
    }
}

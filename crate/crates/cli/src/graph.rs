use std::path::PathBuf;

use clap::{Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use semilab::graph::{cycle_graph, enumerate_primitive_cycles, gilfeather_graph, single_vertex_graph};

use crate::parse::load_graph;
use crate::render::Report;
use crate::{CliResult, RunConfig};

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    /// C_n: n vertices on a directed cycle.
    Cycle,
    /// B_n: one vertex with n loops.
    Single,
    Gilfeather,
}

#[derive(Subcommand, Debug)]
pub enum GraphCmd {
    /// Print a fixture graph as JSON.
    New { family: Family, n: usize },
    /// Load a graph file and summarize it.
    Check { file: PathBuf },
    /// Primitive cycles up to a length; rotations are listed separately.
    Cycles {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

#[derive(Serialize)]
struct CheckReport {
    vertices: usize,
    edges: usize,
    loops: usize,
    transitive: bool,
}

#[derive(Serialize)]
struct CyclesReport {
    max_len: usize,
    count: usize,
    cycles: Vec<Vec<String>>,
}

pub fn run(cmd: GraphCmd, _cfg: &RunConfig) -> CliResult {
    match cmd {
        GraphCmd::New { family, n } => {
            let g = match family {
                Family::Cycle => cycle_graph(n),
                Family::Single => single_vertex_graph(n),
                Family::Gilfeather => gilfeather_graph(n),
            }?;
            let value: Value = serde_json::to_value(g.to_wire()).expect("graph serializes");
            Ok(Report::new(format!("graph {family:?} {n}").to_lowercase(), value, true))
        }
        GraphCmd::Check { file } => {
            let g = load_graph(&file)?;
            let loops = (0..g.edge_count()).filter(|&e| g.is_loop(e)).count();
            let r = CheckReport {
                vertices: g.vertex_count(),
                edges: g.edge_count(),
                loops,
                transitive: g.is_transitive(),
            };
            Ok(Report::new("graph check", r, true))
        }
        GraphCmd::Cycles { file, max_len } => {
            let g = load_graph(&file)?;
            let cycles: Vec<Vec<String>> = enumerate_primitive_cycles(&g, max_len)?
                .iter()
                .map(|w| g.word_names(w))
                .collect();
            let r = CyclesReport {
                max_len,
                count: cycles.len(),
                cycles,
            };
            Ok(Report::new("graph cycles", r, true))
        }
    }
}

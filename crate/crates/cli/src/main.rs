//! `dsrg`: build, verify and tabulate directed strongly regular graphs.
//!
//! Exit status is 0 when every check passes, 1 when a construction or file
//! fails verification (a witness is printed), and 2 on usage errors or
//! malformed input.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dsrg_core::cyclotomy::{cyclotomic_numbers_bruteforce, setup, table_e4, table_e6};
use dsrg_core::digraph::{difference_digraph, verify_dsrg_with, Report, DEFAULT_VERTEX_CAP};
use dsrg_core::psf::{build_psf, build_psf_forced, build_uniform_psf, verify_psf_with};
use dsrg_core::semidirect::{
    enumerate_e4, enumerate_e6, quartic_construct, sextic_construct, SemidirectOptions,
    DEFAULT_ADJACENCY_CAP,
};
use dsrg_core::sweep::parameter_table;
use dsrg_core::{ChainRing, Digraph, DsrgParams, Error, Execution, PsfConfig, PsfFamily};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "dsrg",
    version,
    about = "Construct and verify directed strongly regular graphs"
)]
struct Cli {
    /// Run every check on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a digraph and verify it.
    #[command(subcommand)]
    Construct(Construct),
    /// Verify an edge list.
    Verify { path: PathBuf },
    /// Print the table of cyclotomic numbers of order e over F_q.
    Cyclotomy {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        e: u64,
        /// Use the closed forms (e = 4 or 6) instead of counting.
        #[arg(long)]
        formula: bool,
    },
    /// List the field orders admitted by a semidirect construction.
    Enumerate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        bound: u64,
    },
    /// Parameter tuples of spread families with v <= bound.
    Table {
        #[arg(long)]
        bound: u64,
        /// One JSON object per row.
        #[arg(long)]
        jsonl: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    E4,
    E6,
}

#[derive(Subcommand)]
enum Construct {
    /// Difference digraph of a spread family over GR(p^s, d).
    Psf {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        z1: u64,
        #[arg(long)]
        z2: u64,
        /// Window starts k_0 < ... < k_z1.
        #[arg(long, value_delimiter = ',')]
        blocks: Option<Vec<u64>>,
        /// Pick the coset representatives at random from this seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Build even when z2 is not admissible.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Family whose diagonal sets tile the nonzero elements of GF(p^d)².
    Uniform {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        d: u32,
        #[arg(long)]
        w: u64,
        #[arg(long)]
        z2: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Cayley digraph of F_q ⋊ K with e = 4 or 6.
    Semidirect {
        #[arg(long)]
        q: u64,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["4", "6"]))]
        e: String,
        /// Write the edge list here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Largest vertex count for which the adjacency matrix is built.
        #[arg(long, default_value_t = DEFAULT_ADJACENCY_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct Output {
    /// Write the edge list here.
    #[arg(long)]
    emit: Option<PathBuf>,
    /// Write the family as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Largest vertex count for which the digraph is built.
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    cap: usize,
}

/// What a failed command reports.
enum Failure {
    Usage(String),
    Violation(serde_json::Value, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification(msg) => Failure::Violation(json!({ "violation": msg }), msg),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(witness, msg)) => {
            println!("{witness}");
            eprintln!("not a DSRG: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, exec: Execution) -> Outcome {
    match command {
        Command::Construct(c) => construct(c, exec),
        Command::Verify { path } => verify(&path, exec),
        Command::Cyclotomy { q, e, formula } => cyclotomy(q, e, formula),
        Command::Enumerate { family, bound } => {
            let values = match family {
                Family::E4 => enumerate_e4(bound),
                Family::E6 => enumerate_e6(bound),
            };
            let mut out = io::stdout().lock();
            for q in &values {
                writeln!(out, "{q}")?;
            }
            writeln!(out, "count {}", values.len())?;
            Ok(())
        }
        Command::Table { bound, jsonl } => table(bound, jsonl),
    }
}

fn construct(c: Construct, exec: Execution) -> Outcome {
    match c {
        Construct::Psf {
            p,
            s,
            d,
            w,
            z1,
            z2,
            blocks,
            seed,
            force,
            out,
        } => {
            let ring = Arc::new(ChainRing::new(p, s, d)?);
            let mut cfg = PsfConfig::new(ring, w, z1, z2)?;
            if let Some(starts) = blocks {
                cfg = cfg.with_starts(starts)?;
            }
            if let Some(seed) = seed {
                cfg = cfg.with_seed(seed);
            }
            let fam = if force {
                build_psf_forced(&cfg)?
            } else {
                build_psf(&cfg)?
            };
            finish_family(&fam, &out, exec)
        }
        Construct::Uniform { p, d, w, z2, out } => {
            let fam = build_uniform_psf(p, d, w, z2)?;
            finish_family(&fam, &out, exec)
        }
        Construct::Semidirect { q, e, emit, cap } => {
            let opts = SemidirectOptions {
                adjacency_cap: cap,
                exec,
                ..SemidirectOptions::default()
            };
            let built = if e == "4" {
                quartic_construct(q, opts)?
            } else {
                sextic_construct(q, opts)?
            };
            if let Some(path) = emit {
                let g = built.digraph.as_ref().ok_or_else(|| {
                    Failure::Usage(format!(
                        "v = {} exceeds --cap {cap}; the edge list was not built",
                        built.params.v
                    ))
                })?;
                write_edges(g, &path)?;
            }
            print_report(built.params);
            Ok(())
        }
    }
}

/// Writes the requested files, then checks the family by convolution and,
/// when the digraph was built, by squaring its adjacency matrix.
fn finish_family(fam: &PsfFamily, out: &Output, exec: Execution) -> Outcome {
    if let Some(path) = &out.json {
        std::fs::write(path, fam.to_json() + "\n")?;
    }
    let digraph = match &out.emit {
        Some(path) => {
            let g = difference_digraph(fam, out.cap)?;
            write_edges(&g, path)?;
            Some(g)
        }
        None => None,
    };
    let params = verify_psf_with(fam, exec).map_err(|v| {
        let msg = v.to_string();
        Failure::Violation(json!({ "violation": v }), msg)
    })?;
    if let Some(declared) = fam.declared() {
        if declared != params {
            return Err(mismatch("declared", declared, params));
        }
    }
    if let Some(g) = digraph {
        let adj = verify_dsrg_with(&g, exec).map_err(|v| {
            let msg = v.to_string();
            Failure::Violation(json!({ "violation": v }), msg)
        })?;
        if adj != params {
            return Err(mismatch("adjacency", adj, params));
        }
    }
    print_report(params);
    Ok(())
}

fn mismatch(what: &str, other: DsrgParams, found: DsrgParams) -> Failure {
    let msg = format!("{what} parameters {other} differ from convolution parameters {found}");
    Failure::Violation(json!({ "violation": msg }), msg)
}

fn write_edges(g: &Digraph, path: &Path) -> io::Result<()> {
    g.write_edge_list(BufWriter::new(File::create(path)?))
}

fn print_report(params: DsrgParams) {
    let report = Report::from(params);
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
}

fn verify(path: &Path, exec: Execution) -> Outcome {
    let file = File::open(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let g = Digraph::read_edge_list(BufReader::new(file))?;
    let params = verify_dsrg_with(&g, exec).map_err(|v| {
        let msg = v.to_string();
        Failure::Violation(json!({ "violation": v }), msg)
    })?;
    print_report(params);
    Ok(())
}

fn cyclotomy(q: u64, e: u64, formula: bool) -> Outcome {
    let s = setup(q, e)?;
    let (decomposition, table) = if !formula {
        (None, cyclotomic_numbers_bruteforce(&s))
    } else if e == 4 {
        let (dec, t) = table_e4(&s)?;
        (Some(json!({ "s": dec.s, "t": dec.t })), t)
    } else if e == 6 {
        let (dec, t) = table_e6(&s)?;
        (Some(json!({ "a": dec.a, "b": dec.b })), t)
    } else {
        return Err(Failure::Usage(format!(
            "--formula needs e = 4 or 6, got e = {e}"
        )));
    };
    let mut out = io::stdout().lock();
    write!(out, "{table}")?;
    let mut value = serde_json::to_value(&table).expect("table serializes");
    if let Some(dec) = decomposition {
        value["decomposition"] = dec;
    }
    writeln!(out, "{value}")?;
    Ok(())
}

fn table(bound: u64, jsonl: bool) -> Outcome {
    let rows = parameter_table(bound);
    let mut out = io::stdout().lock();
    if jsonl {
        for row in &rows {
            writeln!(
                out,
                "{}",
                serde_json::to_string(row).expect("row serializes")
            )?;
        }
        return Ok(());
    }
    writeln!(
        out,
        "{:<26} {:<26} {:<8} realization",
        "parameters", "complement", "genuine"
    )?;
    for row in &rows {
        let complement = row
            .complement
            .map_or_else(|| "-".to_string(), |c| c.to_string());
        let r = &row.realization;
        writeln!(
            out,
            "{:<26} {:<26} {:<8} p={} s={} d={} w={} z1={} z2={}",
            row.params.to_string(),
            complement,
            if row.genuine { "yes" } else { "no" },
            r.p,
            r.s,
            r.d,
            r.w,
            r.z1,
            r.z2
        )?;
    }
    Ok(())
}

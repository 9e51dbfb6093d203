//! The `mgs` command line.
//!
//! Exit codes: 0 ok, 1 I/O or parse failure, 2 domain error or bad usage,
//! 3 unknown or timeout, 4 UNSAT as an answer, 5 search exhausted.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde_json::json;

use crate::approx::{approx_synthesize, write_ledger, write_ledger_file, SearchConfig};
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::exact::{gate_count_bounds, synthesize, t_depth_lower_bound};
use crate::io::{circuit_to_string, matrix_to_string, parse_circuit, parse_matrix};
use crate::satenc::cnf::{parse_dimacs, parse_wcnf};
use crate::satenc::search::{search_depth, SearchOptions};
use crate::satenc::{
    self, decode, decode_stateprep, emit_dimacs, emit_wcnf, encode, encode_maxsat, encode_stateprep, solve, solve_maxsat,
    MaxSatOutcome, Outcome, SolveOptions, SolverChoice, MAXSAT_SOLVER_ENV, SAT_SOLVER_ENV,
};
use crate::somat::{eval_product, TransferMatrix};
use crate::spinrep::{apply_to_zero, operator_entanglement, stabilizer_entropy, DenseUnitary, DEFAULT_QUBIT_CAP};
use crate::targets::{random_haar_so, random_ring_target, xx_target};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_UNSAT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "mgs", version, about = "Matchgate circuit synthesis over the Clifford+T matchgate gate set")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact synthesis of an in-ring SO(2n) matrix.
    Exact {
        matrix: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fixed-depth or depth-optimal synthesis via SAT / MAX-SAT.
    Sat(SatArgs),
    /// Approximate synthesis of an SO(2n) matrix.
    Approx(ApproxArgs),
    /// Check that a circuit implements a matrix exactly.
    Verify { circuit: PathBuf, matrix: PathBuf },
    /// Print metrics of a circuit or matrix file.
    Analyze { input: PathBuf },
    /// Write a benchmark target matrix.
    Target {
        #[command(subcommand)]
        which: TargetKind,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// Solve a DIMACS CNF or WCNF file with the builtin solver.
    #[command(hide = true)]
    DimacsSolve { file: PathBuf },
}

#[derive(Args, Debug)]
pub struct SatArgs {
    pub matrix: PathBuf,
    /// Solve at exactly this depth.
    #[arg(long, conflicts_with = "search", required_unless_present = "search")]
    pub depth: Option<usize>,
    /// Search for the minimal depth up to this bound.
    #[arg(long)]
    pub search: Option<usize>,
    /// Minimize the T-count at the chosen depth.
    #[arg(long)]
    pub maxsat: bool,
    /// Treat the input as a covariance matrix to prepare from the vacuum.
    #[arg(long, conflicts_with_all = ["maxsat", "search"])]
    pub stateprep: bool,
    /// External solver command (the instance path is appended); MGS_SAT_SOLVER
    /// or MGS_MAXSAT_SOLVER takes precedence when set.
    #[arg(long)]
    pub solver: Option<String>,
    /// Per-solve time limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// One gate per layer instead of parallel layers.
    #[arg(long)]
    pub sequential: bool,
    /// Concurrent depth probes during --search.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write the DIMACS / WCNF instance here instead of solving.
    #[arg(long, requires = "depth")]
    pub emit: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    /// Matrix JSON; omit with --random.
    #[arg(required_unless_present = "random")]
    pub matrix: Option<PathBuf>,
    /// Haar-random target on this many qubits.
    #[arg(long, conflicts_with = "matrix")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Total error budget (sum over rotations).
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Append the error-ledger row to this CSV file.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum TargetKind {
    /// Diagonalizer of the XX ring (n = 4 or 8).
    Xx { n: usize },
    /// Product of a random word with a given T budget.
    Random {
        n: usize,
        #[arg(long, default_value_t = 4)]
        t_budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_text(p: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(p)?)
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn report(v: serde_json::Value) {
    eprintln!("{}", serde_json::to_string_pretty(&v).expect("report serializes"));
}

fn cmd_exact(matrix: &Path, output: Option<&Path>) -> Result<i32> {
    let q = parse_matrix(&read_text(matrix)?)?;
    let r = synthesize(&q)?;
    if !r.circuit.implements(&q)? {
        return Err(Error::Verification("synthesized circuit does not match the target".into()));
    }
    emit(output, &circuit_to_string(&r.circuit))?;
    report(json!({
        "n": q.n(),
        "k_max": r.k_max_in,
        "depth": r.circuit.depth(),
        "t_count": r.circuit.t_count(),
        "t_depth": r.circuit.t_depth(),
        "clifford_count": r.circuit.clifford_count(),
        "t_count_bound": r.nt_bound.to_string(),
        "clifford_count_bound": r.nc_bound.to_string(),
        "verified": true,
    }));
    Ok(EXIT_OK)
}

fn sat_options(args: &SatArgs, env: &str) -> SolveOptions {
    SolveOptions {
        solver: SolverChoice::from_config(args.solver.as_deref(), env),
        timeout: args.timeout.map(Duration::from_secs_f64),
    }
}

fn finish_circuit(c: &Circuit, output: Option<&Path>) -> Result<()> {
    emit(output, &circuit_to_string(c))
}

fn cmd_sat(args: &SatArgs) -> Result<i32> {
    let q = parse_matrix(&read_text(&args.matrix)?)?;
    let parallel = !args.sequential;
    if let Some(path) = &args.emit {
        let d = args.depth.expect("clap requires --depth with --emit");
        let text = if args.maxsat {
            emit_wcnf(&encode_maxsat(&q, d, parallel)?)
        } else if args.stateprep {
            emit_dimacs(&encode_stateprep(&q, d, parallel)?)
        } else {
            emit_dimacs(&encode(&q, d, parallel)?)
        };
        std::fs::write(path, text)?;
        return Ok(EXIT_OK);
    }
    if let Some(d_max) = args.search {
        let opts = SearchOptions { solve: sat_options(args, SAT_SOLVER_ENV), parallel_layers: parallel, jobs: args.jobs };
        let rec = search_depth(&q, d_max, &opts)?;
        for (d, st) in &rec.probes {
            eprintln!("depth {d}: {}", st.name());
        }
        let Some((d, mut c)) = rec.best.clone() else {
            let unknown = rec.probes.values().any(|s| *s == satenc::search::ProbeStatus::Unknown);
            eprintln!("no circuit up to depth {d_max}");
            return Ok(if unknown { EXIT_UNKNOWN } else { EXIT_UNSAT });
        };
        let mut t_opt = None;
        if args.maxsat {
            let (mc, cost) = maxsat_at(&q, d, parallel, args)?;
            if let Some(mc) = mc {
                c = mc;
                t_opt = cost;
            }
        }
        finish_circuit(&c, args.output.as_deref())?;
        report(json!({
            "depth": d,
            "optimal": rec.optimal == Some(d),
            "lower_bound": rec.lower_bound(),
            "t_count": c.t_count(),
            "t_count_optimal": t_opt,
        }));
        return Ok(EXIT_OK);
    }
    let d = args.depth.expect("clap requires --depth or --search");
    if args.maxsat {
        let (c, cost) = maxsat_at(&q, d, parallel, args)?;
        return match c {
            Some(c) => {
                finish_circuit(&c, args.output.as_deref())?;
                report(json!({"depth": d, "t_count": c.t_count(), "t_count_optimal": cost}));
                Ok(if cost.is_some() { EXIT_OK } else { EXIT_UNKNOWN })
            }
            None if cost == Some(u64::MAX) => {
                eprintln!("depth {d}: UNSAT");
                Ok(EXIT_UNSAT)
            }
            None => {
                eprintln!("depth {d}: UNKNOWN");
                Ok(EXIT_UNKNOWN)
            }
        };
    }
    let inst = if args.stateprep { encode_stateprep(&q, d, parallel)? } else { encode(&q, d, parallel)? };
    match solve(&inst, &sat_options(args, SAT_SOLVER_ENV), None)? {
        Outcome::Sat(m) => {
            let c = if args.stateprep { decode_stateprep(&m, &inst.varmap, &q)? } else { decode(&m, &inst.varmap, &q)? };
            eprintln!("depth {d}: SAT");
            finish_circuit(&c, args.output.as_deref())?;
            report(json!({"depth": d, "t_count": c.t_count(), "vars": inst.num_vars, "clauses": inst.clauses.len()}));
            Ok(EXIT_OK)
        }
        Outcome::Unsat => {
            eprintln!("depth {d}: UNSAT");
            Ok(EXIT_UNSAT)
        }
        Outcome::Unknown => {
            eprintln!("depth {d}: UNKNOWN");
            Ok(EXIT_UNKNOWN)
        }
    }
}

/// MAX-SAT at depth `d`. Returns the best verified circuit and the proven
/// optimum (`Some(u64::MAX)` with no circuit marks UNSAT).
fn maxsat_at(q: &TransferMatrix, d: usize, parallel: bool, args: &SatArgs) -> Result<(Option<Circuit>, Option<u64>)> {
    let inst = encode_maxsat(q, d, parallel)?;
    Ok(match solve_maxsat(&inst, &sat_options(args, MAXSAT_SOLVER_ENV), None)? {
        MaxSatOutcome::Optimum { cost, model } => (Some(decode(&model, &inst.hard.varmap, q)?), Some(cost)),
        MaxSatOutcome::Unsat => (None, Some(u64::MAX)),
        MaxSatOutcome::Unknown { best } => match best {
            Some((_, model)) => (Some(decode(&model, &inst.hard.varmap, q)?), None),
            None => (None, None),
        },
    })
}

fn cmd_approx(args: &ApproxArgs) -> Result<i32> {
    let qf: DMatrix<f64> = match (&args.matrix, args.random) {
        (Some(p), _) => parse_matrix(&read_text(p)?)?.verify()?.to_float()?,
        (None, Some(n)) => random_haar_so(n, args.seed),
        (None, None) => return Err(Error::Domain("give a matrix file or --random".into())),
    };
    if !(args.eps > 0.0) {
        return Err(Error::Domain(format!("eps must be positive, got {}", args.eps)));
    }
    let res = approx_synthesize(&qf, args.eps, &SearchConfig::default())?;
    res.circuit.validate()?;
    let l = res.ledger;
    if l.eps_loc > args.eps + 1e-12 || l.eps_glob > l.eps_loc + 1e-9 {
        return Err(Error::Verification(format!("error ledger out of budget: {l:?}")));
    }
    emit(args.output.as_deref(), &circuit_to_string(&res.circuit))?;
    if let Some(p) = &args.ledger {
        let fresh = !p.exists();
        if fresh {
            write_ledger_file(p, &[l])?;
        } else {
            let mut buf = Vec::new();
            write_ledger(&mut buf, &[l])?;
            let body: String = String::from_utf8_lossy(&buf).lines().skip(1).map(|s| format!("{s}\n")).collect();
            std::fs::OpenOptions::new().append(true).open(p)?.write_all(body.as_bytes())?;
        }
    }
    report(json!({
        "n": l.n,
        "rotations": l.m,
        "eps_budget": l.eps_budget,
        "eps_loc": l.eps_loc,
        "eps_glob": l.eps_glob,
        "rel_gap": l.rel_gap,
        "depth": res.circuit.depth(),
        "t_count": res.circuit.t_count(),
    }));
    Ok(EXIT_OK)
}

fn cmd_verify(circuit: &Path, matrix: &Path) -> Result<i32> {
    let c = parse_circuit(&read_text(circuit)?)?;
    let q = parse_matrix(&read_text(matrix)?)?;
    if c.n != q.n() {
        return Err(Error::Dimension(format!("circuit has {} qubits, matrix {}", c.n, q.n())));
    }
    if !c.implements(&q)? {
        return Err(Error::Verification("circuit product differs from the matrix".into()));
    }
    println!("OK");
    Ok(EXIT_OK)
}

fn cmd_analyze(input: &Path) -> Result<i32> {
    let text = read_text(input)?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let out = if v.get("layers").is_some() {
        let c = parse_circuit(&text)?;
        let q = eval_product(c.n, &c.gates())?;
        let mut m = json!({
            "kind": "circuit",
            "n": c.n,
            "depth": c.depth(),
            "gate_count": c.gate_count(),
            "t_count": c.t_count(),
            "t_depth": c.t_depth(),
            "k_max": q.k_max(),
        });
        if c.n <= DEFAULT_QUBIT_CAP {
            let u = DenseUnitary::from_circuit(&c)?;
            m["stabilizer_entropy"] = json!(stabilizer_entropy(&apply_to_zero(&u))?);
            if c.n == 2 {
                m["operator_entanglement"] = json!(operator_entanglement(&u)?);
            }
        }
        m
    } else {
        let q = parse_matrix(&text)?;
        let so = q.is_special_orthogonal();
        let b = gate_count_bounds(q.n(), q.k_max());
        json!({
            "kind": "matrix",
            "n": q.n(),
            "k_max": q.k_max(),
            "special_orthogonal": so,
            "t_depth_lower_bound": t_depth_lower_bound(&q),
            "t_count_bound": b.nt_bound.to_string(),
            "clifford_count_bound": b.nc_bound.to_string(),
        })
    };
    println!("{}", serde_json::to_string_pretty(&out).expect("metrics serialize"));
    Ok(EXIT_OK)
}

fn cmd_target(which: &TargetKind, output: Option<&Path>) -> Result<i32> {
    let q = match *which {
        TargetKind::Xx { n } => xx_target(n)?.q_dis,
        TargetKind::Random { n, t_budget, seed } => {
            if n == 0 {
                return Err(Error::Domain("n must be positive".into()));
            }
            random_ring_target(n, t_budget, seed)
        }
    };
    emit(output, &matrix_to_string(&q))?;
    Ok(EXIT_OK)
}

/// Builtin solver behind the external-solver protocol. Exit codes follow
/// the SAT competition convention (10 SAT, 20 UNSAT, 30 optimum).
fn cmd_dimacs_solve(file: &Path) -> Result<i32> {
    let text = read_text(file)?;
    let is_wcnf = text.lines().any(|l| l.trim_start().starts_with("p wcnf"));
    let mut out = String::new();
    let code = if is_wcnf {
        let inst = parse_wcnf(&text)?;
        match satenc::maxsat::solve(&inst, None, None) {
            MaxSatOutcome::Optimum { cost, model } => {
                out += &format!("o {cost}\ns OPTIMUM FOUND\nv ");
                out.extend(model.iter().map(|&b| if b { '1' } else { '0' }));
                out.push('\n');
                30
            }
            MaxSatOutcome::Unsat => {
                out += "s UNSATISFIABLE\n";
                20
            }
            MaxSatOutcome::Unknown { .. } => {
                out += "s UNKNOWN\n";
                0
            }
        }
    } else {
        let inst = parse_dimacs(&text)?;
        match solve(&inst, &SolveOptions::default(), None)? {
            Outcome::Sat(m) => {
                out += "s SATISFIABLE\nv";
                for (i, b) in m.iter().enumerate() {
                    let v = i as i64 + 1;
                    out += &format!(" {}", if *b { v } else { -v });
                }
                out += " 0\n";
                10
            }
            Outcome::Unsat => {
                out += "s UNSATISFIABLE\n";
                20
            }
            Outcome::Unknown => {
                out += "s UNKNOWN\n";
                0
            }
        }
    };
    print!("{out}");
    Ok(code)
}

pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Exact { matrix, output } => cmd_exact(matrix, output.as_deref()),
        Command::Sat(a) => cmd_sat(a),
        Command::Approx(a) => cmd_approx(a),
        Command::Verify { circuit, matrix } => cmd_verify(circuit, matrix),
        Command::Analyze { input } => cmd_analyze(input),
        Command::Target { which, output } => cmd_target(which, output.as_deref()),
        Command::DimacsSolve { file } => cmd_dimacs_solve(file),
    }
}

/// Parse arguments, run, and map errors onto exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! Adapter for external SAT / MAX-SAT executables.
//!
//! The instance is written to a temporary file whose path is appended to the
//! configured command line. The solver's stdout is parsed for `s`, `v` and
//! `o` lines; exit codes are ignored whenever an `s` line was printed.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use super::cnf::{emit_dimacs, emit_wcnf, CnfInstance, WcnfInstance};
use super::maxsat::{self, MaxSatOutcome};
use super::solver::Outcome;
use crate::error::{Error, Result};

/// Parsed solver output.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolverOutput {
    pub status: Option<String>,
    /// Literal assignments from `v` lines, indexed from variable 1.
    pub model: Vec<bool>,
    pub cost: Option<u64>,
}

/// Parse the line-oriented `s` / `v` / `o` protocol.
pub fn parse_output(text: &str, num_vars: usize) -> Result<SolverOutput> {
    let mut out = SolverOutput { model: vec![false; num_vars], ..SolverOutput::default() };
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            out.status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("o ") {
            let c = rest.trim().parse().map_err(|_| Error::Parse(format!("bad cost line '{line}'")))?;
            out.cost = Some(c);
        } else if let Some(rest) = line.strip_prefix("v ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let binary = toks.len() == 1 && toks[0].len() > 1 && toks[0].bytes().all(|c| c == b'0' || c == b'1');
            if binary {
                for (i, c) in toks[0].bytes().enumerate() {
                    if i >= out.model.len() {
                        out.model.push(false);
                    }
                    out.model[i] = c == b'1';
                }
                continue;
            }
            for t in toks {
                let l: i64 = t.parse().map_err(|_| Error::Parse(format!("bad literal '{t}'")))?;
                if l == 0 {
                    continue;
                }
                let v = l.unsigned_abs() as usize;
                if v > out.model.len() {
                    out.model.resize(v, false);
                }
                out.model[v - 1] = l > 0;
            }
        }
    }
    Ok(out)
}

enum RunResult {
    Finished { stdout: String, code: Option<i32> },
    Stopped,
}

fn run(cmd: &str, body: &str, suffix: &str, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> Result<RunResult> {
    let mut parts = cmd.split_whitespace();
    let prog = parts.next().ok_or_else(|| Error::SolverProcess("empty solver command".into()))?;
    let mut file = tempfile::Builder::new().suffix(suffix).tempfile()?;
    file.write_all(body.as_bytes())?;
    file.flush()?;
    let mut child = Command::new(prog)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::SolverProcess(format!("cannot launch '{prog}': {e}")))?;
    let mut pipe = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = pipe.read_to_string(&mut s);
        s
    });
    let status = loop {
        if let Some(st) = child.try_wait()? {
            break Some(st);
        }
        if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) || deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    // a killed solver may leave grandchildren holding the pipe; don't wait for them
    Ok(match status {
        Some(st) => RunResult::Finished { stdout: reader.join().unwrap_or_default(), code: st.code() },
        None => RunResult::Stopped,
    })
}

fn no_verdict(code: Option<i32>) -> Error {
    Error::SolverProcess(format!("solver exited with {code:?} and no 's' line"))
}

pub fn run_sat(cmd: &str, inst: &CnfInstance, deadline: Option<Instant>, cancel: Option<&AtomicBool>) -> Result<Outcome> {
    let RunResult::Finished { stdout, code } = run(cmd, &emit_dimacs(inst), ".cnf", deadline, cancel)? else {
        return Ok(Outcome::Unknown);
    };
    let out = parse_output(&stdout, inst.num_vars)?;
    match out.status.as_deref() {
        Some("SATISFIABLE") => Ok(Outcome::Sat(out.model)),
        Some("UNSATISFIABLE") => Ok(Outcome::Unsat),
        Some("UNKNOWN") => Ok(Outcome::Unknown),
        Some(other) => Err(Error::Parse(format!("unexpected status '{other}'"))),
        None => Err(no_verdict(code)),
    }
}

pub fn run_maxsat(
    cmd: &str,
    inst: &WcnfInstance,
    deadline: Option<Instant>,
    cancel: Option<&AtomicBool>,
) -> Result<MaxSatOutcome> {
    let RunResult::Finished { stdout, code } = run(cmd, &emit_wcnf(inst), ".wcnf", deadline, cancel)? else {
        return Ok(MaxSatOutcome::Unknown { best: None });
    };
    let out = parse_output(&stdout, inst.hard.num_vars)?;
    let mut model = out.model;
    model.truncate(inst.hard.num_vars);
    let cost = maxsat::cost(inst, &model);
    if let Some(reported) = out.cost.filter(|_| out.status.as_deref() == Some("OPTIMUM FOUND")) {
        if reported != cost {
            return Err(Error::Parse(format!("solver reported cost {reported} but the model costs {cost}")));
        }
    }
    match out.status.as_deref() {
        Some("OPTIMUM FOUND") => Ok(MaxSatOutcome::Optimum { cost, model }),
        Some("UNSATISFIABLE") => Ok(MaxSatOutcome::Unsat),
        Some("SATISFIABLE") | Some("UNKNOWN") => {
            let best = out.cost.map(|_| (cost, model));
            Ok(MaxSatOutcome::Unknown { best })
        }
        Some(other) => Err(Error::Parse(format!("unexpected status '{other}'"))),
        None => Err(no_verdict(code)),
    }
}

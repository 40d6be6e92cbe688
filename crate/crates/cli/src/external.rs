//! Handoff to an external DIMACS solver, used to cross-check the
//! embedded engine.

use std::io::Write;
use std::process::Command;

use mxsym_core::SolverStatus;

/// Run `cmd` (split on whitespace) with a temporary CNF file appended
/// as the last argument and read the `s SATISFIABLE` or
/// `s UNSATISFIABLE` line from its standard output. Exit codes are
/// deliberately ignored: DIMACS solvers signal status through them
/// (10/20) in ways that would otherwise look like failures.
pub fn solve(cmd: &str, dimacs: &str) -> Result<SolverStatus, String> {
    let mut parts = cmd.split_whitespace();
    let program = parts.next().ok_or("empty external solver command")?;
    let mut file = tempfile::Builder::new()
        .prefix("mxsym")
        .suffix(".cnf")
        .tempfile()
        .map_err(|e| format!("cannot create temp file: {e}"))?;
    file.write_all(dimacs.as_bytes()).map_err(|e| format!("cannot write temp file: {e}"))?;
    file.flush().map_err(|e| format!("cannot flush temp file: {e}"))?;
    let output = Command::new(program)
        .args(parts)
        .arg(file.path())
        .output()
        .map_err(|e| format!("cannot run `{program}`: {e}"))?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    for line in stdout.lines() {
        if line.starts_with("s SATISFIABLE") {
            return Ok(SolverStatus::Sat);
        }
        if line.starts_with("s UNSATISFIABLE") {
            return Ok(SolverStatus::Unsat);
        }
    }
    Err(format!("`{cmd}` printed no status line"))
}

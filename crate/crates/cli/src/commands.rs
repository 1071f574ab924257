use std::f64::consts::PI;
use std::fmt::Display;
use std::io::Write;
use std::path::Path;

use qwalk::linalg::{max_abs, CKet};
use qwalk::povm::decompose_rank1;
use qwalk::sic::{paper_schedule, sic_povm, sic_states, ALPHA_PRIMES};
use qwalk::walk::{induced_povm, run, sample};
use qwalk::{synthesize as synthesize_main, synthesize_alt, Error, Povm, WalkProgram};

use crate::files::{self, number, PovmFile, ScheduleFile, StateFile};
use crate::{Algo, CliError, SicAction};

fn line(out: &mut dyn Write, key: &str, value: impl Display) -> Result<(), CliError> {
    writeln!(out, "{key}={value}").map_err(|e| CliError::Failed(format!("writing output: {e}")))
}

fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn library_error(e: Error) -> CliError {
    match e {
        Error::Infeasible(msg) => CliError::Infeasible(msg),
        other => CliError::Failed(other.to_string()),
    }
}

fn malformed(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::Malformed { path: path.display().to_string(), msg: msg.into() }
}

fn read_povm(path: &Path) -> Result<Povm, CliError> {
    let f: PovmFile = files::read(path)?;
    f.to_povm().map_err(|m| malformed(path, m))
}

fn read_schedule(path: &Path) -> Result<WalkProgram, CliError> {
    let f: ScheduleFile = files::read(path)?;
    f.to_program().map_err(|m| malformed(path, m))
}

fn read_state(path: &Path) -> Result<CKet, CliError> {
    let f: StateFile = files::read(path)?;
    f.to_ket().map_err(|m| malformed(path, m))
}

/// Prints the validation residuals; `false` if the POVM fails validation.
fn report_validation(p: &Povm, tol: f64, out: &mut dyn Write) -> Result<bool, CliError> {
    let r = p.validate(tol);
    if !r.pass {
        line(out, "hermiticity_residual", number(r.hermiticity_residual))?;
        line(out, "psd_violation", number(r.psd_violation))?;
        line(out, "completeness_residual", number(r.completeness_residual))?;
        line(out, "result", "invalid_povm")?;
    }
    Ok(r.pass)
}

pub fn synthesize(povm: &Path, algo: Algo, dest: &Path, tol: f64, out: &mut dyn Write) -> Result<u8, CliError> {
    let p = read_povm(povm)?;
    if !report_validation(&p, tol, out)? {
        return Ok(1);
    }
    let r = decompose_rank1(&p, tol).map_err(library_error)?;
    let mut prog = match algo {
        Algo::Main => synthesize_main(&r, tol).map(|(prog, _)| prog),
        Algo::Alt => synthesize_alt(&r, tol).map(|(prog, _)| prog),
    }
    .map_err(library_error)?;
    prog.relabel_outcomes(r.outcome_map()).map_err(library_error)?;
    files::write(dest, &ScheduleFile::from_program(&prog))?;
    line(out, "dim", p.dim())?;
    line(out, "steps", prog.layer_count())?;
    line(out, "rank1_items", r.len())?;
    line(out, "outcome_map", join(r.outcome_map()))?;
    line(
        out,
        "outcome_positions",
        join(prog.outcome_positions().iter().map(|(x, l)| format!("{x}:{l}"))),
    )?;
    Ok(0)
}

/// Largest entrywise deviation between the grouped induced POVM and `p`,
/// including weight at positions that carry no label.
fn deviation(p: &Povm, prog: &WalkProgram) -> Result<f64, CliError> {
    let omega = induced_povm(prog).map_err(library_error)?;
    let g = omega.group(prog.outcome_positions(), p.len());
    let worst = g
        .elements
        .iter()
        .zip(p.elements())
        .map(|(a, b)| max_abs(&(a - b)))
        .fold(g.stray, f64::max);
    Ok(worst)
}

pub fn verify(povm: &Path, schedule: &Path, tol: f64, out: &mut dyn Write) -> Result<u8, CliError> {
    let p = read_povm(povm)?;
    let prog = read_schedule(schedule)?;
    if !report_validation(&p, crate::DEFAULT_VALIDATION_TOL, out)? {
        return Ok(1);
    }
    if p.dim() != prog.dim() {
        line(out, "povm_dim", p.dim())?;
        line(out, "schedule_dim", prog.dim())?;
        line(out, "result", "dimension_mismatch")?;
        return Ok(1);
    }
    let dev = deviation(&p, &prog)?;
    let pass = dev <= tol;
    line(out, "max_deviation", number(dev))?;
    line(out, "tol", number(tol))?;
    line(out, "result", if pass { "pass" } else { "fail" })?;
    Ok(if pass { 0 } else { 1 })
}

pub fn simulate(schedule: &Path, state: &Path, shots: u64, seed: u64, out: &mut dyn Write) -> Result<u8, CliError> {
    let prog = read_schedule(schedule)?;
    let phi = read_state(state)?;
    if phi.len() != prog.dim() {
        return Err(malformed(state, format!("state has dim {}, schedule has {}", phi.len(), prog.dim())));
    }
    let (_, dist) = run(&prog, &phi).map_err(|e| malformed(state, e.to_string()))?;
    for (x, p) in &dist {
        line(out, &format!("p[{x}]"), number(*p))?;
    }
    if shots > 0 {
        let hist = sample(&prog, &phi, shots, seed).map_err(library_error)?;
        line(out, "shots", shots)?;
        line(out, "seed", seed)?;
        for (x, n) in &hist {
            line(out, &format!("count[{x}]"), n)?;
        }
    }
    Ok(0)
}

fn emit(text: String, dest: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match dest {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Failed(format!("{}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failed(format!("writing output: {e}"))),
    }
}

pub fn sic(action: SicAction, t: Option<f64>, dest: Option<&Path>, tol: f64, out: &mut dyn Write) -> Result<u8, CliError> {
    if let Some(t) = t {
        if !t.is_finite() {
            return Err(CliError::Failed(format!("t must be finite, got {t}")));
        }
    }
    match action {
        SicAction::EmitPovm => {
            emit(files::to_json(&PovmFile::from_povm(&sic_povm(t.unwrap_or(0.0)))), dest, out)?;
            Ok(0)
        }
        SicAction::EmitSchedule => {
            let prog = paper_schedule(t.unwrap_or(0.0));
            emit(files::to_json(&ScheduleFile::from_program(&prog)), dest, out)?;
            if dest.is_some() {
                line(out, "steps", prog.layer_count())?;
            }
            Ok(0)
        }
        SicAction::Verify => {
            let grid: Vec<f64> = match t {
                Some(t) => vec![t],
                None => (0..12).map(|k| k as f64 * PI / 6.0).collect(),
            };
            let (mut dev, mut fid, mut alpha, mut layers_ok) = (0.0f64, 0.0f64, 0.0f64, true);
            for &t in &grid {
                let p = sic_povm(t);
                let prog = paper_schedule(t);
                layers_ok &= prog.layer_count() == 16;
                dev = dev.max(deviation(&p, &prog)?);
                let s = sic_states(t);
                for i in 0..s.len() {
                    for j in 0..s.len() {
                        let want = if i == j { 1.0 } else { 0.25 };
                        fid = fid.max((s[i].dotc(&s[j]).norm_sqr() - want).abs());
                    }
                }
                let r = decompose_rank1(&p, crate::DEFAULT_VALIDATION_TOL).map_err(library_error)?;
                let (_, trace) = synthesize_main(&r, crate::DEFAULT_VALIDATION_TOL).map_err(library_error)?;
                for (a, b) in trace.alpha_primes().iter().zip(ALPHA_PRIMES) {
                    alpha = alpha.max((a - b).abs());
                }
            }
            let pass = layers_ok && dev <= tol && fid <= tol && alpha <= tol;
            line(out, "checked", grid.len())?;
            line(out, "max_deviation", number(dev))?;
            line(out, "max_fidelity_error", number(fid))?;
            line(out, "max_alpha_error", number(alpha))?;
            line(out, "result", if pass { "pass" } else { "fail" })?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context};
use evdd::eqcheck::{check_alternating, check_pauli, Algorithm, PauliOptions, Verdict};
use evdd::sim::{sample, simulate, SimResult};
use evdd::{Config, DdError, Manager};
use evdd_qasm::{parse, Circuit};

use crate::args::{Output, RunArgs};
use crate::report::{render, EqReport, Factor, SimReport, TimeoutReport};
use crate::watchdog::Watchdog;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_NOT_EQUIVALENT: i32 = 3;

pub fn load(path: &Path) -> anyhow::Result<Circuit> {
    let src = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let c = parse(&src).with_context(|| path.display().to_string())?;
    if c.num_qubits == 0 {
        bail!("{}: circuit declares no qubits", path.display());
    }
    Ok(c)
}

pub fn circuit_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Result of one guarded run.
pub enum Outcome<T> {
    Done(T),
    Timeout,
    Failed(anyhow::Error),
}

/// Run `work` under a deadline. With `hard` set, a run that ignores the
/// cancellation flag for too long ends the process through `on_hard`.
pub fn guarded<T>(
    mgr: &mut Manager,
    timeout: Option<Duration>,
    on_hard: Option<Box<dyn FnOnce() + Send>>,
    work: impl FnOnce(&mut Manager) -> evdd::Result<T>,
) -> Outcome<T> {
    let flag = mgr.cancel_flag();
    let dog = Watchdog::start(flag.clone(), timeout, move || {
        if let Some(f) = on_hard {
            f()
        }
    });
    let r = work(mgr);
    dog.stop(&flag);
    match r {
        Ok(v) => Outcome::Done(v),
        Err(DdError::Cancelled) => Outcome::Timeout,
        Err(e) => Outcome::Failed(e.into()),
    }
}

pub fn simulate_circuit(c: &Circuit, cfg: Config, timeout: Option<Duration>, on_hard: Option<Box<dyn FnOnce() + Send>>) -> Outcome<(SimResult, Manager)> {
    let mut mgr = Manager::new(c.num_qubits, cfg);
    match guarded(&mut mgr, timeout, on_hard, |m| simulate(m, c)) {
        Outcome::Done(r) => Outcome::Done((r, mgr)),
        Outcome::Timeout => Outcome::Timeout,
        Outcome::Failed(e) => Outcome::Failed(e),
    }
}

pub fn check_circuits(
    u: &Circuit,
    v: &Circuit,
    algorithm: Algorithm,
    cfg: Config,
    timeout: Option<Duration>,
    on_hard: Option<Box<dyn FnOnce() + Send>>,
) -> Outcome<Verdict> {
    if u.num_qubits != v.num_qubits {
        return Outcome::Failed(DdError::QubitCountMismatch(u.num_qubits, v.num_qubits).into());
    }
    let parallel = cfg.workers > 1;
    let mut mgr = Manager::new(u.num_qubits, cfg);
    guarded(&mut mgr, timeout, on_hard, |m| match algorithm {
        Algorithm::Alternating => check_alternating(m, u, v),
        Algorithm::Pauli => check_pauli(m, u, v, &PauliOptions { parallel, interleave: false }),
    })
}

fn timeout_report(name: String, run: &RunArgs) -> TimeoutReport {
    TimeoutReport {
        circuit: name,
        status: "timeout",
        timeout_s: run.timeout.map_or(0.0, |t| t.as_secs_f64()),
    }
}

/// Prints the timeout report and exits; used when cancellation is not
/// honoured in time.
fn hard_exit(report: TimeoutReport, format: Output) -> Box<dyn FnOnce() + Send> {
    Box::new(move || {
        let _ = render(&report, format, &mut std::io::stdout().lock());
        eprintln!("error: instance did not stop after the timeout, exiting");
        std::process::exit(EXIT_TIMEOUT);
    })
}

fn fail(e: anyhow::Error) -> i32 {
    eprintln!("error: {e:#}");
    EXIT_ERROR
}

fn emit<R: serde::Serialize + crate::report::Fields>(r: &R, format: Output) -> i32 {
    let mut out = std::io::stdout().lock();
    match render(r, format, &mut out).and_then(|_| out.flush()) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e.into()),
    }
}

pub fn cmd_sim(file: &Path, run: &RunArgs) -> i32 {
    let c = match load(file) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let name = circuit_name(file);
    let cfg = run.config();
    let workers = cfg.workers;
    let strategy = cfg.norm_strategy;
    let hard = hard_exit(timeout_report(name.clone(), run), run.output);
    let (res, mgr) = match simulate_circuit(&c, cfg, run.timeout, Some(hard)) {
        Outcome::Done(v) => v,
        Outcome::Timeout => {
            emit(&timeout_report(name, run), run.output);
            return EXIT_TIMEOUT;
        }
        Outcome::Failed(e) => return fail(e.context(file.display().to_string())),
    };
    let histogram = if run.shots > 0 {
        match sample(&mgr, res.state, run.shots, run.seed) {
            Ok(h) => Some(h),
            Err(e) => return fail(e.into()),
        }
    } else {
        None
    };
    let report = SimReport {
        circuit: name,
        status: "ok",
        num_qubits: c.num_qubits,
        gates: res.gates,
        wall_time_s: res.wall_time.as_secs_f64(),
        final_nodes: res.final_nodes,
        peak_nodes: res.peak_nodes,
        sharing_class: res.sharing_class.to_string(),
        l2_norm: res.l2_norm,
        norm_strategy: strategy.to_string(),
        workers,
        shots: run.shots,
        seed: run.seed,
        histogram,
    };
    emit(&report, run.output)
}

pub fn cmd_eqcheck(u_path: &Path, v_path: &Path, algorithm: Algorithm, run: &RunArgs) -> i32 {
    let (u, v) = match (load(u_path), load(v_path)) {
        (Ok(u), Ok(v)) => (u, v),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let names = (circuit_name(u_path), circuit_name(v_path));
    let pair = format!("{} {}", names.0, names.1);
    let cfg = run.config();
    let workers = cfg.workers;
    let hard = hard_exit(timeout_report(pair.clone(), run), run.output);
    let verdict = match check_circuits(&u, &v, algorithm, cfg, run.timeout, Some(hard)) {
        Outcome::Done(v) => v,
        Outcome::Timeout => {
            emit(&timeout_report(pair, run), run.output);
            return EXIT_TIMEOUT;
        }
        Outcome::Failed(e) => return fail(e),
    };
    let report = EqReport {
        u: names.0,
        v: names.1,
        status: "ok",
        num_qubits: u.num_qubits,
        algorithm: algorithm.to_string(),
        equivalent: verdict.equivalent,
        factor: verdict.factor.map(|c| Factor { re: c.re, im: c.im }),
        witness: verdict.witness,
        wall_time_s: verdict.stats.wall_time.as_secs_f64(),
        peak_nodes: verdict.stats.peak_nodes,
        steps: verdict.stats.steps,
        workers,
    };
    match emit(&report, run.output) {
        EXIT_OK if !report.equivalent => EXIT_NOT_EQUIVALENT,
        code => code,
    }
}

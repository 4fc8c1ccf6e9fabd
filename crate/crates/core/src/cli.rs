//! Command-line front end: scenario in, CSV files out.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::dynamics::{evolve, max_abs, steady_state, DensityMatrix, Liouvillian, PumpConfig, EG};
use crate::entanglement::{concurrence_general, peak_concurrence, transient_concurrence};
use crate::greens::{GreenProvider, Site};
use crate::io::{apply_overrides, write_results, ProviderKind, RunMode, RunOutput, Scenario, Table};
use crate::rates::{convert, RateMatrix, Unit};
use crate::{Error, Result};

/// Largest allowed gap between the analytic and integrated transient concurrence.
pub const TRANSIENT_CONSISTENCY: f64 = 1e-6;
/// Largest allowed gap between the end of a pumped run and the steady-state solve.
pub const PLATEAU_CONSISTENCY: f64 = 1e-6;

const STATE_HEADER: [&str; 6] = ["t_gamma_aa", "C", "rho_ee", "rho_eg", "rho_ge", "rho_gg"];

#[derive(Debug, Parser)]
#[command(name = "plasmon-qed", version, about = "Reservoir-mediated entanglement of two emitters")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coupling rates against qubit separation.
    Rates(RunArgs),
    /// Unpumped decay from one excited emitter.
    Transient(RunArgs),
    /// Pumped evolution and its steady state.
    Steady(RunArgs),
    /// Steady-state concurrence against separation or pump strength.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Override a scenario key, e.g. `--set qubits.dipole_debye=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Worker threads for independent points.
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub parallel: usize,
    /// Also write `plot.py` next to the CSV files.
    #[arg(long)]
    pub plot_script: bool,
}

impl Command {
    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Rates(a) | Command::Transient(a) | Command::Steady(a) | Command::Sweep(a) => a,
        }
    }
}

/// Reads the scenario file and applies overrides.
pub fn load_scenario(args: &RunArgs) -> Result<(Scenario, PathBuf)> {
    let text = std::fs::read_to_string(&args.scenario).map_err(|source| Error::Io {
        path: args.scenario.display().to_string(),
        source,
    })?;
    let scenario = apply_overrides(&text, &args.overrides)?;
    let base = args
        .scenario
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((scenario, base))
}

/// Runs a command end to end and writes its files.
pub fn execute(command: &Command) -> Result<RunOutput> {
    let args = command.args();
    let (scenario, base) = load_scenario(args)?;
    let output = run(command, &scenario, &base, args.parallel)?;
    write_results(&output, &args.out, args.plot_script)?;
    match &output.consistency_failure {
        Some(why) => Err(Error::Consistency(why.clone())),
        None => Ok(output),
    }
}

/// Dispatches on the subcommand without touching the file system for output.
pub fn run(command: &Command, scenario: &Scenario, base: &Path, parallel: usize) -> Result<RunOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallel.max(1))
        .build()
        .map_err(|e| Error::Configuration(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match command {
        Command::Rates(_) => run_rates(scenario, base),
        Command::Transient(_) => run_transient(scenario, base),
        Command::Steady(_) => run_steady(scenario, base),
        Command::Sweep(_) => run_sweep(scenario, base),
    })
}

fn wrong_mode(expected: &str, s: &Scenario) -> Error {
    Error::Validation(format!(
        "`run.mode` is `{}`; this subcommand needs {expected}",
        serde_plain_mode(s.run.mode)
    ))
}

fn serde_plain_mode(mode: RunMode) -> &'static str {
    match mode {
        RunMode::RatesSweep => "rates_sweep",
        RunMode::Transient => "transient",
        RunMode::Steady => "steady",
        RunMode::SeparationSweep => "separation_sweep",
        RunMode::PumpSweep => "pump_sweep",
    }
}

fn uev(rad_s: f64) -> f64 {
    convert(rad_s, Unit::RadPerSecond, Unit::MicroElectronVolt).expect("rad/s to ueV")
}

fn linspace(end: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| end * i as f64 / (n - 1) as f64).collect()
}

fn note_rates(out: &mut RunOutput, rates: &RateMatrix) {
    out.value("gamma_aa_uev", uev(rates.gamma_aa));
    out.value("gamma_bb_uev", uev(rates.gamma_bb));
    out.value("gamma_ab_uev", uev(rates.gamma_ab));
    out.value("g_ab_uev", uev(rates.g_ab));
}

/// Rates in units of `Γ_aa` plus dephasing in the same units.
struct Normalized {
    rates: RateMatrix,
    dephasing: [f64; 2],
    physical: RateMatrix,
}

fn normalized(scenario: &Scenario, provider: Option<&dyn GreenProvider>) -> Result<Normalized> {
    let physical = scenario.rates(provider)?;
    if !(physical.gamma_aa > 0.0) {
        return Err(Error::Validation("Gamma_aa must be positive to set the time unit".into()));
    }
    let unit = physical.gamma_aa;
    let [ga, gb] = scenario.dephasing()?;
    Ok(Normalized {
        rates: physical.scaled(1.0 / unit)?,
        dephasing: [ga / unit, gb / unit],
        physical,
    })
}

fn state_row(t: f64, c: f64, rho: &DensityMatrix) -> Vec<f64> {
    let p = rho.populations();
    vec![t, c, p[0], p[1], p[2], p[3]]
}

/// Cross coupling against separation, normalized by `Γ₀`.
pub fn run_rates(scenario: &Scenario, base: &Path) -> Result<RunOutput> {
    if scenario.run.mode != RunMode::RatesSweep {
        return Err(wrong_mode("`rates_sweep`", scenario));
    }
    let provider = scenario.green_provider(base)?;
    let pair = scenario.qubit_pair()?;
    let gamma0 = pair.vacuum_rate();
    let lambda = scenario.sweep_wavelength()?;
    let xs = scenario.sweep_points();
    let rows: Vec<Result<Vec<f64>>> = xs
        .par_iter()
        .map(|&x| {
            let a = &pair.site_a;
            let b = Site::new(pair.site_b.label.clone(), a.position + nalgebra::Vector3::z() * (x * lambda));
            let j = match &provider {
                Some(p) => p.projected(a, &b, pair.omega_a, &pair.dipole)?,
                None => crate::greens::FreeSpace.projected(a, &b, pair.omega_a, &pair.dipole)?,
            };
            let g = j
                .coherent_coupling()
                .ok_or_else(|| Error::Numerical("cross term has no finite real part".into()))?;
            Ok(vec![x, j.decay_rate() / gamma0, g / gamma0])
        })
        .collect();
    let mut table = Table::new("rates", &["dz_over_lambda_spp", "gamma_ab_over_gamma0", "g_ab_over_gamma0"]);
    for row in rows {
        table.push(row?);
    }
    let mut out = RunOutput::default();
    out.value("gamma0_uev", uev(gamma0));
    out.value("lambda_nm", lambda / crate::constants::NANOMETER);
    out.note(
        "contribution",
        if provider.is_some() { "scattered" } else { "free_space" },
    );
    out.tables.push(table);
    Ok(out)
}

/// Unpumped decay, integrated and compared with the closed form.
pub fn run_transient(scenario: &Scenario, base: &Path) -> Result<RunOutput> {
    if scenario.run.mode != RunMode::Transient {
        return Err(wrong_mode("`transient`", scenario));
    }
    if scenario.pump.is_some() {
        return Err(Error::Validation(
            "a transient scenario with a `pump` section runs under `steady`".into(),
        ));
    }
    let provider = scenario.green_provider(base)?;
    let n = normalized(scenario, provider.as_deref())?;
    let times = linspace(scenario.horizon(), scenario.samples());
    let l = Liouvillian::build(&n.rates, n.dephasing, None)?;
    let start = scenario.initial_state();
    let traj = evolve(&l, &DensityMatrix::basis_state(start), &times)?;
    let c = traj.concurrence()?;

    let mut out = RunOutput::default();
    note_rates(&mut out, &n.physical);
    if scenario.provider.kind != ProviderKind::Direct {
        out.value("gamma0_uev", uev(scenario.qubit_pair()?.vacuum_rate()));
    }
    let mut table = Table::new("transient", &STATE_HEADER);
    for ((t, ci), rho) in times.iter().zip(&c).zip(&traj.states) {
        table.push(state_row(*t, *ci, rho));
    }
    out.tables.push(table);

    let analytic_ok = start == EG
        && n.rates.is_symmetric(1e-9)
        && (n.dephasing[0] - n.dephasing[1]).abs() <= 1e-12 * n.dephasing[0].max(1.0);
    if analytic_ok {
        let gamma = n.dephasing[0];
        let mut check = Table::new("transient_check", &["t_gamma_aa", "C_analytic", "C_numeric", "deviation"]);
        let mut worst = 0.0_f64;
        for (t, cn) in times.iter().zip(&c) {
            let ca = transient_concurrence(&n.rates, gamma, *t)?;
            worst = worst.max((ca - cn).abs());
            check.push(vec![*t, ca, *cn, (ca - cn).abs()]);
        }
        out.tables.push(check);
        let peak = peak_concurrence(&n.rates, gamma, scenario.horizon())?;
        out.value("peak_C", peak.c_peak);
        out.value("t_peak_gamma_aa", peak.t_peak);
        out.value("max_deviation", worst);
        if worst > TRANSIENT_CONSISTENCY {
            out.consistency_failure = Some(format!(
                "analytic and integrated concurrence differ by {worst:e} (limit {TRANSIENT_CONSISTENCY:e})"
            ));
        }
    } else {
        let (k, peak) = c
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (k, v)| if *v > acc.1 { (k, *v) } else { acc });
        out.value("peak_C", peak);
        out.value("t_peak_gamma_aa", times[k]);
        out.note("analytic_check", "skipped (asymmetric rates, unequal dephasing or initial state other than eg)");
    }
    Ok(out)
}

struct PumpedRun {
    trajectory_table: Table,
    row: Vec<f64>,
    deviation: f64,
}

fn pumped_run(
    n: &Normalized,
    pump: &PumpConfig,
    rabi: f64,
    times: &[f64],
    start: usize,
    name: String,
) -> Result<PumpedRun> {
    let l = Liouvillian::build(&n.rates, n.dephasing, Some(pump))?;
    let traj = evolve(&l, &DensityMatrix::basis_state(start), times)?;
    let c = traj.concurrence()?;
    let ss = steady_state(&l)?;
    let end = traj.last().expect("nonempty time grid");
    let deviation = max_abs(&(end.elements() - ss.elements()));
    let mut table = Table::new(name, &STATE_HEADER);
    for ((t, ci), rho) in times.iter().zip(&c).zip(&traj.states) {
        table.push(state_row(*t, *ci, rho));
    }
    let c_inf = concurrence_general(&ss)?.value;
    let c_peak = c.iter().copied().fold(0.0, f64::max);
    let p = ss.populations();
    let coherence = ss.get(EG, crate::dynamics::GE);
    Ok(PumpedRun {
        trajectory_table: table,
        row: vec![rabi, c_inf, c_peak, p[0], p[1], p[2], p[3], coherence.re, coherence.im, deviation],
        deviation,
    })
}

/// Pumped evolution for every regime and Rabi frequency, plus steady states.
pub fn run_steady(scenario: &Scenario, base: &Path) -> Result<RunOutput> {
    let pumped_transient = scenario.run.mode == RunMode::Transient && scenario.pump.is_some();
    if scenario.run.mode != RunMode::Steady && !pumped_transient {
        return Err(wrong_mode("`steady` or a pumped `transient`", scenario));
    }
    let pump = scenario.pump.as_ref().ok_or_else(|| Error::Validation("`pump` is required".into()))?;
    let provider = scenario.green_provider(base)?;
    let n = normalized(scenario, provider.as_deref())?;
    let times = linspace(scenario.horizon(), scenario.samples());
    let start = scenario.initial_state();

    let jobs: Vec<(usize, usize, f64, PumpConfig)> = pump
        .rabi_over_gamma_aa
        .iter()
        .enumerate()
        .flat_map(|(k, &rabi)| {
            scenario
                .pump_configs(rabi)
                .into_iter()
                .enumerate()
                .map(move |(r, cfg)| (r, k, rabi, cfg))
        })
        .collect();
    let results: Vec<Result<PumpedRun>> = jobs
        .par_iter()
        .map(|(_, k, rabi, cfg)| {
            pumped_run(&n, cfg, *rabi, &times, start, format!("pumped_{}_{k}", cfg.regime.name()))
        })
        .collect();

    let mut out = RunOutput::default();
    note_rates(&mut out, &n.physical);
    let mut steady_tables: Vec<Table> = pump
        .regimes
        .iter()
        .map(|r| {
            Table::new(
                format!("steady_{}", r.name()),
                &[
                    "rabi_over_gamma_aa",
                    "C_inf",
                    "C_peak",
                    "rho_ee",
                    "rho_eg",
                    "rho_ge",
                    "rho_gg",
                    "re_rho_eg_ge",
                    "im_rho_eg_ge",
                    "plateau_deviation",
                ],
            )
        })
        .collect();
    let mut worst = 0.0_f64;
    let mut trajectories = Vec::new();
    for ((r, _, _, _), res) in jobs.iter().zip(results) {
        let run = res?;
        worst = worst.max(run.deviation);
        steady_tables[*r].push(run.row);
        trajectories.push(run.trajectory_table);
    }
    trajectories.sort_by(|a, b| a.name.cmp(&b.name));
    out.tables.extend(trajectories);
    out.tables.extend(steady_tables);
    out.value("max_plateau_deviation", worst);
    if worst > PLATEAU_CONSISTENCY {
        out.consistency_failure = Some(format!(
            "end of the pumped run differs from the steady state by {worst:e} (limit {PLATEAU_CONSISTENCY:e}); lengthen run.horizon_over_gamma_aa"
        ));
    }
    Ok(out)
}

fn steady_concurrence(n: &Normalized, pump: &PumpConfig) -> Result<f64> {
    let l = Liouvillian::build(&n.rates, n.dephasing, Some(pump))?;
    Ok(concurrence_general(&steady_state(&l)?)?.value)
}

/// `C_∞` against separation or pump strength, one table per regime. Failed
/// points are written as NaN and listed in the summary.
pub fn run_sweep(scenario: &Scenario, base: &Path) -> Result<RunOutput> {
    let xs = scenario.sweep_points();
    let regimes = scenario.pump.as_ref().map(|p| p.regimes.clone()).unwrap_or_default();
    let points: Vec<Vec<std::result::Result<f64, String>>> = match scenario.run.mode {
        RunMode::SeparationSweep => {
            let rabi = scenario.pump.as_ref().map_or(0.0, |p| p.rabi_over_gamma_aa[0]);
            let lambda_nm = scenario.sweep_wavelength()? / crate::constants::NANOMETER;
            xs.par_iter()
                .map(|&x| {
                    let at = scenario.with_separation(x * lambda_nm).and_then(|s| {
                        let provider = s.green_provider(base)?;
                        normalized(&s, provider.as_deref()).map(|n| (s, n))
                    });
                    match at {
                        Ok((s, n)) => s
                            .pump_configs(rabi)
                            .iter()
                            .map(|cfg| steady_concurrence(&n, cfg).map_err(|e| e.to_string()))
                            .collect(),
                        Err(e) => regimes.iter().map(|_| Err(e.to_string())).collect(),
                    }
                })
                .collect()
        }
        RunMode::PumpSweep => {
            let provider = scenario.green_provider(base)?;
            let n = normalized(scenario, provider.as_deref())?;
            xs.par_iter()
                .map(|&x| {
                    scenario
                        .pump_configs(x)
                        .iter()
                        .map(|cfg| steady_concurrence(&n, cfg).map_err(|e| e.to_string()))
                        .collect()
                })
                .collect()
        }
        _ => return Err(wrong_mode("`separation_sweep` or `pump_sweep`", scenario)),
    };

    let mut out = RunOutput::default();
    out.note(
        "x",
        if scenario.run.mode == RunMode::PumpSweep { "rabi_over_gamma_aa" } else { "separation_over_lambda" },
    );
    let mut failures = 0;
    for (r, regime) in regimes.iter().enumerate() {
        let mut table = Table::new(format!("sweep_{}", regime.name()), &["x", "C_inf"]);
        for (x, row) in xs.iter().zip(&points) {
            match &row[r] {
                Ok(c) => table.push(vec![*x, *c]),
                Err(e) => {
                    failures += 1;
                    out.note(format!("failed.{}.x={}", regime.name(), crate::io::format_number(*x)), e);
                    table.push(vec![*x, f64::NAN]);
                }
            }
        }
        out.tables.push(table);
    }
    out.note("failed_points", failures);
    Ok(out)
}

/// Parses arguments, runs, and maps the outcome to a process exit code.
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
    match execute(&cli.command) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

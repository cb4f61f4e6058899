#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use airwrite::demo::serve;
use airwrite::experiment::{compare_media, paper_probes, run_experiment, simulate, ExperimentConfig, CONFIG_KEYS, PRESETS};
use airwrite::imaging::{reconstruct, IndicatorParams, Method, ReconResult, DEFAULT_EXCLUSION_RADIUS};
use airwrite::io::{
    coeffs_to_json, read_record, read_recon, read_trajectory, recon_to_csv, schedule_to_csv, smooth_to_csv, write_record, COEFFS_JSON, RECON_CSV,
    SCHEDULE_CSV, SMOOTH_CSV,
};
use airwrite::model::{ScenarioId, SamplingMesh, TimeGrid, Trajectory};
use airwrite::postprocess::{fill_skipped, smooth, trajectory_error, DEFAULT_ORDER};
use anyhow::{anyhow, Context};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};

/// Simulate a moving point emitter and reconstruct its trajectory.
#[derive(Parser)]
#[command(name = "airwrite", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a receiver record (record.csv, record.json, truth.csv).
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "record")]
        out: PathBuf,
    },
    /// Reconstruct the emitter path from a record directory.
    #[command(allow_negative_numbers = true)]
    Reconstruct {
        #[arg(long)]
        record: PathBuf,
        #[arg(long, default_value = "global")]
        method: Method,
        /// Lattice points per axis.
        #[arg(long, alias = "mesh", default_value_t = 50)]
        grid: usize,
        #[arg(long, default_value_t = 8.0)]
        domain: f64,
        /// Speed bound in m/s; defaults to the built-in scenario's bound.
        #[arg(long)]
        vmax: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_EXCLUSION_RADIUS)]
        exclusion: f64,
        #[arg(long, default_value = "recon")]
        out: PathBuf,
    },
    /// Fourier smoothing of a recon.csv (smooth.csv, coeffs.json).
    Postprocess {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
        /// Split at gaps and smooth each segment separately.
        #[arg(long)]
        segmented: bool,
        #[arg(long, default_value = "smooth")]
        out: PathBuf,
    },
    /// Error metrics of a recon.csv against a `t,x1,x2,x3` path or a scenario name.
    Evaluate {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long)]
        truth: String,
        /// Cell size in m; defaults to the 50-point mesh on [-8, 8].
        #[arg(long)]
        cell: Option<f64>,
    },
    /// Full pipeline into <out>/<config hash>/.
    #[command(allow_negative_numbers = true)]
    Run {
        /// Config file of `key = value` lines, or a preset name.
        #[arg(long)]
        config: Option<String>,
        #[command(flatten)]
        overrides: ConfigArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Side-by-side homogeneous, case-ii and case-iii media (JSON on stdout).
    #[command(allow_negative_numbers = true)]
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Live air-writing service, line-delimited JSON over TCP.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

/// One flag per config key.
#[derive(Args, Default)]
struct ConfigArgs {
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    medium: Option<String>,
    #[arg(long)]
    inclusion_speed: Option<String>,
    #[arg(long)]
    omega0: Option<String>,
    #[arg(long)]
    c0: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    #[arg(long)]
    polar_min: Option<String>,
    #[arg(long)]
    polar_max: Option<String>,
    #[arg(long)]
    azimuth_min: Option<String>,
    #[arg(long)]
    azimuth_max: Option<String>,
    #[arg(long)]
    receivers: Option<String>,
    #[arg(long)]
    terminal: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long, alias = "grid")]
    mesh: Option<String>,
    #[arg(long)]
    domain: Option<String>,
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    #[arg(long)]
    order: Option<String>,
    #[arg(long)]
    segmented: Option<String>,
    #[arg(long)]
    forward: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    voxels: Option<String>,
    #[arg(long)]
    exclusion: Option<String>,
}

impl ConfigArgs {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        let values = [
            &self.scenario,
            &self.medium,
            &self.inclusion_speed,
            &self.omega0,
            &self.c0,
            &self.radius,
            &self.polar_min,
            &self.polar_max,
            &self.azimuth_min,
            &self.azimuth_max,
            &self.receivers,
            &self.terminal,
            &self.steps,
            &self.mesh,
            &self.domain,
            &self.noise,
            &self.seed,
            &self.method,
            &self.vmax,
            &self.order,
            &self.segmented,
            &self.forward,
            &self.mode,
            &self.voxels,
            &self.exclusion,
        ];
        std::iter::once(("preset", &self.preset)).chain(CONFIG_KEYS.into_iter().zip(values)).collect()
    }

    /// Applies the flags on top of `base`: preset, then scenario, then the rest.
    fn apply(&self, mut config: ExperimentConfig) -> anyhow::Result<ExperimentConfig> {
        for (key, value) in self.pairs() {
            if let Some(v) = value {
                config.set(key, v).with_context(|| format!("--{}", key.replace('_', "-")))?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

fn usage<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn runtime<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Runtime(e.into()))
}

fn help_footer() -> String {
    let scenarios: Vec<&str> = ScenarioId::ALL.iter().map(|s| s.as_str()).collect();
    let presets: Vec<&str> = PRESETS.iter().map(|(name, _)| *name).collect();
    format!(
        "Scenarios: {}\nPresets: {}\nConfig keys (one flag each): {}",
        scenarios.join(", "),
        presets.join(", "),
        CONFIG_KEYS.join(", ")
    )
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    runtime(fs::write(path, text).with_context(|| format!("writing {}", path.display())))
}

fn cmd_simulate(config: &ConfigArgs, out: &Path) -> Result<(), Failure> {
    let config = usage(config.apply(ExperimentConfig::paper_default()))?;
    let (truth, record, forward) = runtime(simulate(&config))?;
    runtime(fs::create_dir_all(out))?;
    runtime(write_record(&record, out))?;
    write(&out.join("truth.csv"), &truth.to_csv(&record.grid.times()))?;
    println!(
        "{}: {} receivers x {} steps ({:?}, noise {}) -> {}",
        truth.id(),
        record.n_receivers(),
        record.n_steps(),
        forward,
        config.noise,
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(record: &Path, method: Method, grid: usize, domain: f64, vmax: Option<f64>, exclusion: f64, out: &Path) -> Result<(), Failure> {
    let mesh = usage(SamplingMesh::cube(domain, grid).map_err(Into::into))?;
    if !(exclusion >= 0.0) {
        return Err(Failure::Usage(anyhow!("--exclusion must be non-negative")));
    }
    let record = runtime(read_record(record).with_context(|| format!("reading record from {}", record.display())))?;
    let v_max = match (vmax, method) {
        (Some(v), _) => v,
        (None, Method::Global) => 0.0,
        (None, _) => {
            let traj = Trajectory::builtin_named(&record.meta.trajectory_id).map_err(|_| {
                Failure::Usage(anyhow!("record of `{}` has no known speed bound; pass --vmax", record.meta.trajectory_id))
            })?;
            traj.v_max()
        }
    };
    let params = IndicatorParams {
        omega0: record.meta.omega0,
        exclusion_radius: exclusion,
    };
    let recon = runtime(reconstruct(&record, &mesh, method, v_max, &params))?;
    runtime(fs::create_dir_all(out))?;
    write(&out.join(RECON_CSV), &recon_to_csv(&recon.points))?;
    if let Some(schedule) = &recon.schedule {
        write(&out.join(SCHEDULE_CSV), &schedule_to_csv(schedule))?;
        println!("schedule: {} levels", schedule.levels());
    }
    println!(
        "{method}: {} points, {} skipped, {} filled -> {}",
        recon.len(),
        recon.skipped.len(),
        recon.filled.len(),
        out.display()
    );
    Ok(())
}

/// Time grid implied by a recon file: step `t_j / j`, ending at the last point.
fn recon_grid(recon: &ReconResult) -> anyhow::Result<TimeGrid> {
    let last = recon.points.last().ok_or_else(|| anyhow!("recon file has no points"))?;
    Ok(TimeGrid::new(last.t, last.j)?)
}

fn load_recon(path: &Path) -> Result<ReconResult, Failure> {
    let points = runtime(read_recon(path).with_context(|| format!("reading {}", path.display())))?;
    Ok(ReconResult {
        method: Method::Global,
        points,
        skipped: Vec::new(),
        filled: Vec::new(),
        schedule: None,
        v_max: None,
    })
}

fn cmd_postprocess(recon: &Path, order: usize, segmented: bool, out: &Path) -> Result<(), Failure> {
    let recon = load_recon(recon)?;
    let grid = runtime(recon_grid(&recon))?;
    let indexed: Vec<_> = recon.points.iter().map(|p| (p.j, p.z)).collect();
    let points = runtime(fill_skipped(&indexed, grid))?;
    let segments = runtime(smooth(&points, grid.terminal(), order, segmented))?;
    runtime(fs::create_dir_all(out))?;
    write(&out.join(SMOOTH_CSV), &smooth_to_csv(&segments, &points))?;
    write(&out.join(COEFFS_JSON), &runtime(coeffs_to_json(&segments))?)?;
    println!(
        "{} segment(s), order {order}, residual {:.6e} -> {}",
        segments.len(),
        segments.residual(&points),
        out.display()
    );
    Ok(())
}

fn cmd_evaluate(recon: &Path, truth: &str, cell: Option<f64>) -> Result<(), Failure> {
    let recon = load_recon(recon)?;
    let truth = if Path::new(truth).exists() {
        runtime(read_trajectory(Path::new(truth)))?
    } else {
        usage(Trajectory::builtin_named(truth).map_err(|_| anyhow!("--truth `{truth}` is neither a file nor a scenario")))?
    };
    let cell = cell.unwrap_or(16.0 / 49.0);
    if !(cell > 0.0) {
        return Err(Failure::Usage(anyhow!("--cell must be positive")));
    }
    let metrics = runtime(trajectory_error(&recon, &truth, cell, None))?;
    println!("{}", runtime(serde_json::to_string_pretty(&metrics))?);
    Ok(())
}

fn cmd_run(config: Option<&str>, overrides: &ConfigArgs, out: &Path) -> Result<(), Failure> {
    let base = match config {
        None => ExperimentConfig::paper_default(),
        Some(c) if Path::new(c).is_file() => {
            let text = runtime(fs::read_to_string(c).with_context(|| format!("reading {c}")))?;
            usage(ExperimentConfig::from_kv(&text).map_err(Into::into))?
        }
        Some(c) => usage(ExperimentConfig::preset(c).map_err(|_| anyhow!("--config `{c}` is neither a file nor a preset")))?,
    };
    let config = usage(overrides.apply(base))?;
    let report = runtime(run_experiment(&config, out))?;
    println!("{}", runtime(serde_json::to_string_pretty(&report))?);
    Ok(())
}

fn cmd_compare(config: &ConfigArgs) -> Result<(), Failure> {
    let config = usage(config.apply(ExperimentConfig::paper_default()))?;
    let cmp = runtime(compare_media(&config, &paper_probes()))?;
    println!("{}", runtime(serde_json::to_string_pretty(&cmp))?);
    Ok(())
}

fn cmd_serve(host: &str, port: u16) -> Result<(), Failure> {
    let listener = runtime(TcpListener::bind((host, port)).with_context(|| format!("binding {host}:{port}")))?;
    eprintln!("listening on {}", runtime(listener.local_addr())?);
    runtime(serve(listener))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::Reconstruct {
            record,
            method,
            grid,
            domain,
            vmax,
            exclusion,
            out,
        } => cmd_reconstruct(&record, method, grid, domain, vmax, exclusion, &out),
        Command::Postprocess { recon, order, segmented, out } => cmd_postprocess(&recon, order, segmented, &out),
        Command::Evaluate { recon, truth, cell } => cmd_evaluate(&recon, &truth, cell),
        Command::Run { config, overrides, out } => cmd_run(config.as_deref(), &overrides, &out),
        Command::Compare { config } => cmd_compare(&config),
        Command::Serve { port, host } => cmd_serve(&host, port),
    }
}

fn main() -> ExitCode {
    let command = Cli::command().after_help(help_footer());
    let cli = match command.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

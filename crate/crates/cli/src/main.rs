use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use mrc_cli::config::{ExperimentConfig, Settings, Solver};
use mrc_cli::presets::{find, presets};
use mrc_cli::run::{run, threads_from_env, Outcome};

#[derive(Parser)]
#[command(name = "mrc", version, about = "Modified Rayleigh Conjecture scattering solvers and SIM global minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run any solver from flags, a config file or a preset.
    Solve(Flags),
    /// Global minimization of a builtin test function with SIM.
    Minimize(Flags),
    /// Scattering by a periodic grating profile.
    Periodic(Flags),
    /// Exterior Dirichlet problem for the Laplace equation.
    Static(Flags),
    /// Far-field fit with a mislocated multipole centre.
    IllposedDemo(Flags),
    /// List the built-in presets.
    Presets {
        #[arg(long)]
        table: Option<u32>,
    },
    /// Run every preset of one table, one CSV row per case.
    Reproduce {
        #[arg(long)]
        table: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Only run presets whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
    },
}

#[derive(Args, Default)]
struct Flags {
    /// Named preset used as the base layer.
    #[arg(long)]
    preset: Option<String>,
    /// INI config file layered over the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` overrides.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    shape: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Incident angle in degrees (2D, periodic grating).
    #[arg(long = "alpha-deg", allow_hyphen_values = true)]
    alpha_deg: Option<String>,
    /// Incident direction as `azimuth,polar` in degrees (3D).
    #[arg(long = "alpha-polar", allow_hyphen_values = true)]
    alpha_polar: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long = "J")]
    j: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    wmin: Option<String>,
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    repeat: Option<String>,
    #[arg(long)]
    margin: Option<String>,
    #[arg(long)]
    sampling: Option<String>,
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    warm: Option<String>,
    #[arg(long)]
    poles: Option<String>,
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    jmax: Option<String>,
    #[arg(long)]
    retry: Option<String>,
    #[arg(long)]
    data: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x1: Option<String>,
    #[arg(long)]
    dirs: Option<String>,
    #[arg(long = "fn")]
    func: Option<String>,
    #[arg(long)]
    dim: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Flags {
    fn settings(&self, default_solver: Option<Solver>) -> Result<(Option<String>, Settings)> {
        let mut s = Settings::default();
        let mut name = None;
        if let Some(p) = &self.preset {
            let preset = find(p)?;
            s.merge(&preset.settings);
            name = Some(preset.name);
        }
        if let Some(path) = &self.config {
            s.merge(&Settings::from_ini_file(path)?);
        }
        for pair in &self.set {
            s.merge(&Settings::parse_pairs(pair)?);
        }
        let flags = [
            ("solver", &self.solver),
            ("shape", &self.shape),
            ("k", &self.k),
            ("alpha-deg", &self.alpha_deg),
            ("alpha-polar", &self.alpha_polar),
            ("L", &self.l),
            ("J", &self.j),
            ("eps", &self.eps),
            ("wmin", &self.wmin),
            ("nodes", &self.nodes),
            ("nmax", &self.nmax),
            ("seed", &self.seed),
            ("repeat", &self.repeat),
            ("margin", &self.margin),
            ("sampling", &self.sampling),
            ("scale", &self.scale),
            ("warm", &self.warm),
            ("poles", &self.poles),
            ("b", &self.b),
            ("jmax", &self.jmax),
            ("retry", &self.retry),
            ("data", &self.data),
            ("x1", &self.x1),
            ("dirs", &self.dirs),
            ("fn", &self.func),
            ("dim", &self.dim),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                s.set(key, v.as_str())?;
            }
        }
        if let Some(p) = &self.out {
            s.set("out", p.display().to_string())?;
        }
        if let Some(solver) = default_solver {
            match s.get("solver") {
                None => s.set("solver", solver.name())?,
                Some(v) if v != solver.name() => bail!("this subcommand runs the {solver} solver, not '{v}'"),
                _ => {}
            }
        }
        Ok((name, s))
    }
}

fn emit(outcomes: &[Outcome], out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            let mut w = BufWriter::new(file);
            for (i, o) in outcomes.iter().enumerate() {
                o.write_csv(&mut w, i == 0)?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            for (i, o) in outcomes.iter().enumerate() {
                o.write_csv(&mut w, i == 0)?;
            }
        }
    }
    Ok(())
}

enum Failure {
    Config(anyhow::Error),
    NotConverged,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Config(e)
    }
}

fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let outcome = run(cfg)?;
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(outcome)
}

fn main_inner(cli: Cli) -> std::result::Result<(), Failure> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let (flags, solver) = match cli.command {
        Command::Solve(f) => (f, None),
        Command::Minimize(f) => (f, Some(Solver::Minimize)),
        Command::Periodic(f) => (f, Some(Solver::Periodic)),
        Command::Static(f) => (f, Some(Solver::Static)),
        Command::IllposedDemo(f) => (f, Some(Solver::IllposedDemo)),
        Command::Presets { table } => {
            for p in presets().iter().filter(|p| table.is_none_or(|t| p.table == t)) {
                println!("{}\t{}", p.name, p.settings.to_ini().lines().skip(1).collect::<Vec<_>>().join(" "));
            }
            return Ok(());
        }
        Command::Reproduce { table, out, filter } => {
            let chosen: Vec<_> = presets()
                .into_iter()
                .filter(|p| p.table == table && filter.as_deref().is_none_or(|f| p.name.contains(f)))
                .collect();
            if chosen.is_empty() {
                return Err(anyhow::anyhow!("no presets for table {table}").into());
            }
            let mut outcomes = Vec::new();
            for p in &chosen {
                outcomes.push(execute(&p.config()?)?);
            }
            emit(&outcomes, out.as_ref())?;
            return if outcomes.iter().all(|o| o.converged) { Ok(()) } else { Err(Failure::NotConverged) };
        }
    };
    let (name, settings) = flags.settings(solver)?;
    let cfg = ExperimentConfig::from_settings(name, &settings)?;
    let outcome = execute(&cfg)?;
    emit(std::slice::from_ref(&outcome), cfg.out.as_ref())?;
    if outcome.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::NotConverged) => ExitCode::from(2),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

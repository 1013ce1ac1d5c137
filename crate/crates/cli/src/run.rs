//! Executes an [`ExperimentConfig`] and collects CSV rows and a summary.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use mrc::geometry::{
    direction_2d, direction_3d, sample_interior, Boundary2D, Boundary3D, Obstacle, PeriodicProfile, Point, Shape,
    SourceSampling, DEFAULT_MARGIN,
};
use mrc::laplace::{static_mrc, StaticData, StaticProblem};
use mrc::oracle::{illposedness_demo, CircleScatterer};
use mrc::periodic::{periodic_mrc, PeriodicMrcParams, QpGreensFunction, QpParams};
use mrc::scattering::{
    multipoint_mrc, optimal_mrc, random_mrc_from, MrcParams, ScatteringProblem, SolveReport, WaveBasis,
};
use mrc::sim::{sim_minimize, BoxDomain, SimParams, TestFunction};
use mrc::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ExperimentConfig, Solver};

/// Tabular result of one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub summary: Vec<String>,
    pub converged: bool,
}

impl Outcome {
    fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new(), summary: Vec::new(), converged: true }
    }

    pub fn write_csv<W: Write>(&self, w: W, with_header: bool) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if with_header {
            out.write_record(&self.header)?;
        }
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.solver {
        Solver::Multipoint | Solver::Random | Solver::Optimal => match cfg.shape {
            Some(Shape::Planar(b)) => {
                let deg = cfg.alpha_deg.unwrap_or(0.0);
                scattering(cfg, b, direction_2d(deg.to_radians()), format!("{deg}"), 720)
            }
            Some(Shape::Solid(b)) => {
                let [az, pol] = cfg.alpha_polar.unwrap_or([0.0, 90.0]);
                let nodes = if matches!(b, Boundary3D::Cube { .. }) { 1350 } else { 450 };
                scattering(cfg, b, direction_3d(az.to_radians(), pol.to_radians()), format!("{az};{pol}"), nodes)
            }
            _ => bail!("solver {} needs a bounded obstacle", cfg.solver),
        },
        Solver::Periodic => periodic(cfg),
        Solver::Static => laplace(cfg),
        Solver::Minimize => minimize(cfg),
        Solver::IllposedDemo => illposed(cfg),
    }
}

fn fmt_e(v: f64) -> String {
    format!("{v:.6e}")
}

fn mrc_params(cfg: &ExperimentConfig, dim: usize) -> MrcParams {
    let base = match cfg.solver {
        Solver::Optimal => MrcParams::optimal_default(),
        _ => MrcParams::random_default(),
    };
    let (l_default, j_default) = if dim == 3 && cfg.solver == Solver::Random { (0, 80) } else { (base.l_max, base.j) };
    MrcParams {
        l_max: cfg.l.unwrap_or(l_default),
        eps: cfg.eps.unwrap_or(base.eps),
        n_max: cfg.n_max.unwrap_or(base.n_max),
        w_min: cfg.w_min.unwrap_or(base.w_min),
        j: cfg.j.unwrap_or(j_default),
        margin: cfg.margin.unwrap_or(DEFAULT_MARGIN),
        sampling: cfg.sampling.unwrap_or(SourceSampling::Uniform),
    }
}

/// Fixed multipoint sources: on the scaled boundary in 2D, seeded interior draws in 3D.
trait FixedSources: Obstacle {
    fn fixed_sources(&self, j: usize, scale: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Self::Point>>;
}

impl FixedSources for Boundary2D {
    fn fixed_sources(&self, j: usize, scale: f64, _rng: &mut ChaCha8Rng) -> Result<Vec<[f64; 2]>> {
        Ok(self.scaled_boundary_sources(j, scale)?)
    }
}

impl FixedSources for Boundary3D {
    fn fixed_sources(&self, j: usize, scale: f64, rng: &mut ChaCha8Rng) -> Result<Vec<[f64; 3]>> {
        Ok(sample_interior(self, j, 1.0 - scale, rng)?)
    }
}

fn scattering<B>(cfg: &ExperimentConfig, b: B, alpha: B::Point, alpha_label: String, default_nodes: usize) -> Result<Outcome>
where
    B: FixedSources + Clone + std::fmt::Display,
    B::Point: WaveBasis,
{
    let k = cfg.k.unwrap_or(1.0);
    let params = mrc_params(cfg, B::Point::DIM);
    let nodes = cfg.nodes.unwrap_or(default_nodes);
    let problem = ScatteringProblem::new(b.clone(), k, alpha, nodes)?;
    let scale = cfg.scale.unwrap_or(0.9);
    let mut out = Outcome::new(&[
        "name", "solver", "shape", "k", "alpha", "L", "J", "seed", "iterations", "sources", "r_min", "converged", "seconds",
    ]);
    let mut conv_count = 0;
    for rep in 0..cfg.repeat {
        let seed = cfg.seed + rep as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = Instant::now();
        let (report, j): (SolveReport<B::Point>, usize) = match cfg.solver {
            Solver::Multipoint => {
                let j = cfg.j.unwrap_or(16);
                let sources = b.fixed_sources(j, scale, &mut rng)?;
                (multipoint_mrc(&problem, &sources, params.l_max, params.w_min, params.eps)?, j)
            }
            Solver::Random => {
                let first = if cfg.warm > 0 { b.fixed_sources(cfg.warm, scale, &mut rng)? } else { Vec::new() };
                (random_mrc_from(&problem, &params, &first, &mut rng)?, params.j)
            }
            Solver::Optimal => (optimal_mrc(&problem, &params, &mut rng)?, 1),
            _ => unreachable!("non-scattering solver"),
        };
        let secs = start.elapsed().as_secs_f64();
        out.converged &= report.converged;
        conv_count += report.converged as usize;
        out.rows.push(vec![
            cfg.label(),
            cfg.solver.to_string(),
            b.to_string(),
            k.to_string(),
            alpha_label.clone(),
            params.l_max.to_string(),
            j.to_string(),
            seed.to_string(),
            report.iterations.to_string(),
            report.expansion.sources.len().to_string(),
            fmt_e(report.r_min),
            report.converged.to_string(),
            format!("{secs:.3}"),
        ]);
        out.summary.push(format!(
            "{} seed {seed}: r_min = {:.3e} after {} iteration(s), {} ({secs:.2} s)",
            cfg.label(),
            report.r_min,
            report.iterations,
            if report.converged { "converged" } else { "not converged" }
        ));
    }
    if cfg.repeat > 1 {
        out.summary.push(format!("{}: {conv_count}/{} runs converged", cfg.label(), cfg.repeat));
    }
    Ok(out)
}

fn periodic(cfg: &ExperimentConfig) -> Result<Outcome> {
    let profile = match cfg.shape {
        Some(Shape::Profile(p)) => p,
        None => PeriodicProfile::I,
        Some(s) => bail!("the periodic solver needs a profile, got {s}"),
    };
    let deg = cfg.alpha_deg.unwrap_or(45.0);
    let params = QpParams::new(cfg.k.unwrap_or(1.0), deg.to_radians(), PI)?;
    let defaults = PeriodicMrcParams::default();
    let opts = PeriodicMrcParams {
        n_nodes: cfg.nodes.unwrap_or(defaults.n_nodes),
        m_poles: cfg.poles.unwrap_or(defaults.m_poles),
        w_min: cfg.w_min.unwrap_or(defaults.w_min),
        eps: cfg.eps.unwrap_or(defaults.eps),
        b: cfg.b.unwrap_or(QpGreensFunction::DEFAULT_B),
        j_max: cfg.j_max.unwrap_or(QpGreensFunction::DEFAULT_J_MAX),
        retry: cfg.retry,
    };
    let start = Instant::now();
    let r = periodic_mrc(profile, &params, &opts)?;
    let secs = start.elapsed().as_secs_f64();
    let mut out = Outcome::new(&["name", "profile", "theta", "k", "N", "M", "r_min", "converged", "seconds"]);
    out.converged = r.converged;
    out.rows.push(vec![
        cfg.label(),
        profile.to_string(),
        format!("{:.6}", params.theta),
        params.k.to_string(),
        r.n_nodes.to_string(),
        r.m_poles.to_string(),
        fmt_e(r.r_min),
        r.converged.to_string(),
        format!("{secs:.3}"),
    ]);
    out.summary.push(format!(
        "{}: profile {profile}, theta = {deg} deg, r_min = {:.6} with N = {}, M = {} ({secs:.2} s)",
        cfg.label(),
        r.r_min,
        r.n_nodes,
        r.m_poles
    ));
    Ok(out)
}

fn laplace(cfg: &ExperimentConfig) -> Result<Outcome> {
    let Some(Shape::Solid(b)) = cfg.shape else { bail!("the static solver needs a 3D shape") };
    let data = cfg.data.clone().unwrap_or(StaticData::Constant(Complex::new(1.0, 0.0)));
    let problem = StaticProblem::new(b, data.clone())?.with_l_start(cfg.l.unwrap_or(2));
    let nodes = cfg.nodes.unwrap_or(if matches!(b, Boundary3D::Cube { .. }) { 1350 } else { 800 });
    let start = Instant::now();
    let r = static_mrc(&problem, nodes, cfg.w_min.unwrap_or(1e-12), cfg.eps.unwrap_or(1e-6))?;
    let secs = start.elapsed().as_secs_f64();
    let mut out = Outcome::new(&["name", "shape", "data", "L", "r_min", "c00_re", "c00_im", "converged", "seconds"]);
    out.converged = r.converged;
    let c00 = r.coeff(0, 0)?;
    out.rows.push(vec![
        cfg.label(),
        b.to_string(),
        data.to_string(),
        r.l_max.to_string(),
        fmt_e(r.r_min),
        c00.re.to_string(),
        c00.im.to_string(),
        r.converged.to_string(),
        format!("{secs:.3}"),
    ]);
    out.summary.push(format!(
        "{}: {b} with {data}: r_min = {:.3e} at L = {} ({secs:.2} s)",
        cfg.label(),
        r.r_min,
        r.l_max
    ));
    Ok(out)
}

/// Absolute error within which a SIM run counts as having found the known minimum.
pub fn success_tolerance(f: TestFunction) -> f64 {
    match f {
        TestFunction::Shubert => 1e-3,
        TestFunction::Trefethen => 1e-4,
        TestFunction::Levy => 1e-6,
    }
}

fn minimize(cfg: &ExperimentConfig) -> Result<Outcome> {
    let f = TestFunction::from_id(cfg.func.unwrap_or(1))?;
    let dim = cfg.dim.unwrap_or(match f {
        TestFunction::Levy => 5,
        _ => 2,
    });
    if f != TestFunction::Levy && dim != 2 {
        bail!("test function {} is two-dimensional", f.id());
    }
    let domain = BoxDomain::new(dim, f.m_half())?;
    let params = SimParams::default();
    let objective = |x: &[f64]| f.eval_unchecked(x);
    let mut out = Outcome::new(&[
        "name", "fn", "dim", "seed", "found", "known", "abs_error", "success", "location", "stable", "stability_index",
        "rounds", "evaluations", "seconds",
    ]);
    let (mut hits, mut evals, mut time) = (0usize, 0u64, 0.0);
    for rep in 0..cfg.repeat {
        let seed = cfg.seed + rep as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let start = Instant::now();
        let r = sim_minimize(&objective, &domain, &params, &mut rng)?;
        let secs = start.elapsed().as_secs_f64();
        let err = (r.f_p - f.known_minimum()).abs();
        let success = err <= success_tolerance(f);
        hits += success as usize;
        evals += r.evaluations;
        time += secs;
        out.converged &= r.stable;
        out.rows.push(vec![
            cfg.label(),
            f.id().to_string(),
            dim.to_string(),
            seed.to_string(),
            format!("{:.10}", r.f_p),
            f.known_minimum().to_string(),
            fmt_e(err),
            success.to_string(),
            r.x_p.iter().map(|v| format!("{v:.8}")).collect::<Vec<_>>().join(";"),
            r.stable.to_string(),
            fmt_e(r.stability_index),
            r.rounds.to_string(),
            r.evaluations.to_string(),
            format!("{secs:.3}"),
        ]);
    }
    let n = cfg.repeat as f64;
    out.summary.push(format!(
        "{}: test function {} in dimension {dim}: success rate {:.0}% ({hits}/{}), {:.0} evaluations and {:.2} s per run",
        cfg.label(),
        f.id(),
        100.0 * hits as f64 / n,
        cfg.repeat,
        evals as f64 / n,
        time / n
    ));
    Ok(out)
}

fn illposed(cfg: &ExperimentConfig) -> Result<Outcome> {
    let a = match cfg.shape {
        None => 1.0,
        Some(Shape::Planar(Boundary2D::Circle { a })) => a,
        Some(s) => bail!("the ill-posedness demo needs a circle, got {s}"),
    };
    let c = CircleScatterer::new(a, cfg.k.unwrap_or(1.0), cfg.alpha_deg.unwrap_or(0.0).to_radians())?;
    let x1 = cfg.x1.unwrap_or([0.8, 0.0]);
    let rep = illposedness_demo(&c, &x1, cfg.l.unwrap_or(5), cfg.dirs.unwrap_or(120), cfg.w_min.unwrap_or(1e-12))?;
    let eps = cfg.eps.unwrap_or(5e-4);
    let mut out = Outcome::new(&["name", "angle", "re_vc", "im_vc", "re_v", "im_v"]);
    out.converged = rep.r_min_far <= eps;
    for row in &rep.near_table {
        out.rows.push(vec![
            cfg.label(),
            format!("{:.5}", row.angle),
            format!("{:.5}", row.fitted.re),
            format!("{:.5}", row.fitted.im),
            format!("{:.5}", row.exact.re),
            format!("{:.5}", row.exact.im),
        ]);
    }
    out.summary.push(format!(
        "{}: far-field residual {:.8}, largest near-field gap on the boundary {:.1}",
        cfg.label(),
        rep.r_min_far,
        rep.sup_gap()
    ));
    if !out.converged {
        out.summary.push(format!("far-field residual exceeds eps = {eps}"));
    }
    Ok(out)
}

/// Worker-count cap from `MRC_THREADS`.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var("MRC_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| anyhow!("MRC_THREADS must be a positive integer, got '{v}'"))?;
            if n == 0 {
                bail!("MRC_THREADS must be a positive integer, got 0");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

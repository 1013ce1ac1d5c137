//! Scattering by periodic gratings with a quasiperiodic half-space Green's function.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{config, domain, MrcError, Result};
use crate::geometry::{PeriodicProfile, Point2};
use crate::lsq::{normalized_norm, solve_cutoff, DesignMatrix};

const WOOD_GUARD: f64 = 1e-10;

/// Wave number, incidence angle and period of a grating problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpParams {
    pub k: f64,
    /// Incidence angle; the incident direction is `(cos theta, -sin theta)`.
    pub theta: f64,
    pub period: f64,
    /// Quasiperiodicity factor `exp(i k L cos theta)`.
    pub nu: Complex64,
}

impl QpParams {
    pub fn new(k: f64, theta: f64, period: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return config(format!("wave number must be positive, got {k}"));
        }
        if !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-15) {
            return config(format!("incidence angle must lie in (0, pi/2], got {theta}"));
        }
        if !(period > 0.0 && period.is_finite()) {
            return config(format!("period must be positive, got {period}"));
        }
        let nu = Complex64::cis(k * period * theta.cos());
        Ok(Self { k, theta, period, nu })
    }

    pub fn alpha(&self) -> Point2 {
        [self.theta.cos(), -self.theta.sin()]
    }

    pub fn incident(&self, x: &Point2) -> Complex64 {
        let a = self.alpha();
        Complex64::cis(self.k * (a[0] * x[0] + a[1] * x[1]))
    }

    pub fn ell_plus(&self, j: i64) -> f64 {
        self.k * self.theta.cos() + 2.0 * PI * j as f64 / self.period
    }

    /// Vertical wave number of order `j`: positive real when propagating,
    /// positive imaginary when evanescent.
    pub fn mu(&self, j: i64) -> Result<Complex64> {
        let l = self.ell_plus(j);
        let d = self.k * self.k - l * l;
        if d.abs() < WOOD_GUARD {
            return Err(MrcError::WoodAnomaly { order: j });
        }
        Ok(if d > 0.0 {
            Complex64::new(d.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-d).sqrt())
        })
    }

    /// Orders with `|l_j| < k`.
    pub fn propagating_orders(&self) -> Vec<i64> {
        let step = 2.0 * PI / self.period;
        let reach = (self.k / step).ceil() as i64 + 1;
        (-reach..=reach).filter(|&j| self.ell_plus(j).abs() < self.k).collect()
    }
}

pub fn ell_plus(j: i64, params: &QpParams) -> f64 {
    params.ell_plus(j)
}

pub fn mu(j: i64, params: &QpParams) -> Result<Complex64> {
    params.mu(j)
}

/// Truncated quasiperiodic Green's function vanishing on the floor `y = -b`.
#[derive(Debug, Clone)]
pub struct QpGreensFunction {
    params: QpParams,
    b: f64,
    j_max: usize,
    ell: Vec<f64>,
    mu: Vec<Complex64>,
}

impl QpGreensFunction {
    pub const DEFAULT_B: f64 = 1.2;
    pub const DEFAULT_J_MAX: usize = 120;

    pub fn new(params: QpParams, b: f64, j_max: usize) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return config(format!("floor depth b must be positive, got {b}"));
        }
        if j_max < 20 {
            return config(format!("series truncation j_max must be at least 20, got {j_max}"));
        }
        let jm = j_max as i64;
        let ell = (-jm..=jm).map(|j| params.ell_plus(j)).collect();
        let mu = (-jm..=jm).map(|j| params.mu(j)).collect::<Result<Vec<_>>>()?;
        Ok(Self { params, b, j_max, ell, mu })
    }

    pub fn params(&self) -> &QpParams {
        &self.params
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn eval(&self, x: &Point2, xi: &Point2) -> Result<Complex64> {
        if x == xi {
            return Err(MrcError::Singularity(format!("field point coincides with pole {xi:?}")));
        }
        if x[1] < -self.b || xi[1] < -self.b {
            return domain(format!("points must lie above the floor y = {}", -self.b));
        }
        Ok(self.eval_unchecked(x, xi))
    }

    pub(crate) fn eval_unchecked(&self, x: &Point2, xi: &Point2) -> Complex64 {
        let dx = x[0] - xi[0];
        let (hi, lo) = if x[1] >= xi[1] { (x[1], xi[1]) } else { (xi[1], x[1]) };
        let far = hi + lo + 2.0 * self.b;
        let near = hi - lo;
        let i = Complex64::i();
        let mut sum = Complex64::new(0.0, 0.0);
        for (&l, &m) in self.ell.iter().zip(&self.mu) {
            let gj = ((i * m * far).exp() - (i * m * near).exp()) / (2.0 * i * m);
            sum += Complex64::cis(l * dx) * gj;
        }
        sum / self.params.period
    }
}

pub fn qp_green(x: &Point2, xi: &Point2, g: &QpGreensFunction) -> Result<Complex64> {
    g.eval(x, xi)
}

/// Discretization and stopping parameters for the grating solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicMrcParams {
    pub n_nodes: usize,
    pub m_poles: usize,
    pub w_min: f64,
    pub eps: f64,
    pub b: f64,
    pub j_max: usize,
    /// Double `N` and `M` once when the first solve misses `eps`.
    pub retry: bool,
}

impl Default for PeriodicMrcParams {
    fn default() -> Self {
        Self {
            n_nodes: 256,
            m_poles: 64,
            w_min: 1e-8,
            eps: 0.05,
            b: QpGreensFunction::DEFAULT_B,
            j_max: QpGreensFunction::DEFAULT_J_MAX,
            retry: true,
        }
    }
}

impl PeriodicMrcParams {
    pub fn validate(&self) -> Result<()> {
        if self.m_poles == 0 || self.n_nodes <= self.m_poles {
            return config(format!(
                "need more nodes than poles, got N = {}, M = {}",
                self.n_nodes, self.m_poles
            ));
        }
        if !(self.w_min > 0.0) {
            return config(format!("w_min must be positive, got {}", self.w_min));
        }
        if !(self.eps > 0.0) {
            return config(format!("eps must be positive, got {}", self.eps));
        }
        Ok(())
    }
}

/// Pole expansion of the scattered field above a grating.
#[derive(Debug, Clone)]
pub struct PeriodicReport {
    pub profile: PeriodicProfile,
    pub green: QpGreensFunction,
    pub poles: Vec<Point2>,
    pub coeffs: Vec<Complex64>,
    pub r_min: f64,
    pub converged: bool,
    pub n_nodes: usize,
    pub m_poles: usize,
    /// Residual of each attempt.
    pub history: Vec<f64>,
}

impl PeriodicReport {
    pub fn scattered(&self, x: &Point2) -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        for (p, c) in self.poles.iter().zip(&self.coeffs) {
            s += c * self.green.eval(x, p)?;
        }
        Ok(s)
    }

    pub fn total(&self, x: &Point2) -> Result<Complex64> {
        Ok(self.green.params().incident(x) + self.scattered(x)?)
    }
}

fn green_matrix(g: &QpGreensFunction, nodes: &[Point2], poles: &[Point2]) -> Result<DesignMatrix> {
    for p in poles {
        if nodes.contains(p) {
            return config(format!("pole {p:?} sits on a node"));
        }
        if p[1] <= -g.b() {
            return config(format!("pole {p:?} lies below the floor y = {}", -g.b()));
        }
    }
    let columns: Vec<Vec<Complex64>> = poles
        .par_iter()
        .map(|p| nodes.iter().map(|x| g.eval_unchecked(x, p)).collect())
        .collect();
    DesignMatrix::from_columns(nodes.len(), columns)
}

/// Solve the grating problem by least squares over pole Green's functions.
pub fn periodic_mrc(profile: PeriodicProfile, params: &QpParams, opts: &PeriodicMrcParams) -> Result<PeriodicReport> {
    opts.validate()?;
    let green = QpGreensFunction::new(*params, opts.b, opts.j_max).map_err(|e| match e {
        MrcError::WoodAnomaly { .. } => MrcError::Configuration(e.to_string()),
        other => other,
    })?;
    let attempts = if opts.retry { 2 } else { 1 };
    let (mut n, mut m) = (opts.n_nodes, opts.m_poles);
    let mut history = Vec::new();
    let mut last = None;
    for _ in 0..attempts {
        let (nodes, poles) = profile.nodes_and_poles(n, m)?;
        let rhs: Vec<Complex64> = nodes.iter().map(|x| params.incident(x)).collect();
        let (coeffs, r_min) = if opts.eps >= normalized_norm(&rhs)? {
            (vec![Complex64::new(0.0, 0.0); poles.len()], normalized_norm(&rhs)?)
        } else {
            let a = green_matrix(&green, &nodes, &poles)?;
            let sol = solve_cutoff(&a, &rhs, opts.w_min)?;
            (sol.coeffs, sol.r_min)
        };
        history.push(r_min);
        let converged = r_min <= opts.eps;
        last = Some(PeriodicReport {
            profile,
            green: green.clone(),
            poles,
            coeffs,
            r_min,
            converged,
            n_nodes: n,
            m_poles: m,
            history: history.clone(),
        });
        if converged {
            break;
        }
        n *= 2;
        m *= 2;
    }
    Ok(last.expect("at least one attempt"))
}

//! Stability Index Method (SIM) for global minimization over a cube
//! `[-M, M]^N`, with the Stable Minimizing Set (SMS) inner loop and a
//! modified Powell local search.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{config, domain, Result};

const GOLDEN: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;
const BRENT_ITERS: usize = 100;
const NORMAL_RETRIES: usize = 100;

/// Axis-aligned bounds for the local search.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(&hi).any(|(a, b)| !(a <= b)) {
            return domain("bounds must satisfy lo <= hi componentwise");
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (v, (l, h)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*l, *h);
        }
    }

    /// Interval of `t` keeping `x + t d` inside the bounds.
    fn feasible(&self, x: &[f64], d: &[f64]) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in 0..x.len() {
            if d[i] > 0.0 {
                lo = lo.max((self.lo[i] - x[i]) / d[i]);
                hi = hi.min((self.hi[i] - x[i]) / d[i]);
            } else if d[i] < 0.0 {
                lo = lo.max((self.hi[i] - x[i]) / d[i]);
                hi = hi.min((self.lo[i] - x[i]) / d[i]);
            }
        }
        (lo.min(0.0), hi.max(0.0))
    }
}

/// The admissible cube `[-M, M]^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain {
    pub dim: usize,
    pub m_half: f64,
}

impl BoxDomain {
    pub fn new(dim: usize, m_half: f64) -> Result<Self> {
        if dim == 0 || dim > 64 {
            return config(format!("box dimension must lie in 1..=64, got {dim}"));
        }
        if !(m_half > 0.0 && m_half.is_finite()) {
            return config(format!("box half-side must be positive, got {m_half}"));
        }
        Ok(Self { dim, m_half })
    }

    pub fn bounds(&self) -> Bounds {
        Bounds {
            lo: vec![-self.m_half; self.dim],
            hi: vec![self.m_half; self.dim],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowellOptions {
    /// Stop when a full cycle decreases `f` by less than this relative amount.
    pub tol: f64,
    pub max_cycles: usize,
    /// First trial step of each line bracket, in the units of `x`.
    pub step: f64,
}

impl PowellOptions {
    /// Defaults for a box of half-side `m_half`.
    pub fn for_scale(m_half: f64) -> Self {
        Self {
            tol: 1e-8,
            max_cycles: 50,
            step: 0.1 * m_half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowellResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub cycles: usize,
    pub evaluations: u64,
}

/// Modified Powell search: line minimizations along each coordinate, then
/// along the aggregate displacement of the cycle, repeated until the cycle
/// decrease drops below `tol`. Iterates never leave `bounds`, and the
/// returned value never exceeds `f(x0)`.
pub fn powell_minimize<F>(f: F, x0: &[f64], bounds: &Bounds, opts: &PowellOptions) -> PowellResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(n, bounds.dim(), "start point and bounds differ in dimension");
    let mut evals = 0u64;
    let mut eval = |x: &[f64]| {
        evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut p0 = x0.to_vec();
    bounds.clamp(&mut p0);
    let mut f0 = eval(&p0);
    let mut cycles = 0;
    let mut dir = vec![0.0; n];
    while cycles < opts.max_cycles {
        cycles += 1;
        let f_start = f0;
        let mut p = p0.clone();
        let mut fp = f0;
        for i in 0..n {
            dir.iter_mut().for_each(|d| *d = 0.0);
            dir[i] = 1.0;
            fp = line_minimize(&mut eval, &mut p, fp, &dir, bounds, opts.step);
        }
        let v: Vec<f64> = p.iter().zip(&p0).map(|(a, b)| a - b).collect();
        let vlen = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vlen > 0.0 {
            let unit: Vec<f64> = v.iter().map(|x| x / vlen).collect();
            let mut q = p0.clone();
            let fq = line_minimize(&mut eval, &mut q, f0, &unit, bounds, opts.step.min(vlen).max(1e-3 * opts.step));
            if fq <= fp {
                p0 = q;
                f0 = fq;
            } else {
                p0 = p;
                f0 = fp;
            }
        } else {
            f0 = fp;
        }
        if 2.0 * (f_start - f0).abs() <= opts.tol * (f_start.abs() + f0.abs()) + 1e-300 {
            break;
        }
    }
    PowellResult {
        x: p0,
        f: f0,
        cycles,
        evaluations: evals,
    }
}

/// Minimizes `t -> f(x + t d)` over the feasible segment and moves `x` to the
/// best point found; returns its value (never above `fx`).
fn line_minimize<E>(eval: &mut E, x: &mut [f64], fx: f64, d: &[f64], bounds: &Bounds, step: f64) -> f64
where
    E: FnMut(&[f64]) -> f64,
{
    let (tlo, thi) = bounds.feasible(x, d);
    if thi - tlo <= 0.0 {
        return fx;
    }
    let mut trial = x.to_vec();
    let mut phi = |t: f64| {
        for ((y, xi), di) in trial.iter_mut().zip(x.iter()).zip(d) {
            *y = xi + t * di;
        }
        bounds.clamp(&mut trial);
        eval(&trial)
    };
    let (t, ft) = bracket_and_brent(&mut phi, fx, tlo, thi, step);
    if ft < fx {
        for (xi, di) in x.iter_mut().zip(d) {
            *xi += t * di;
        }
        bounds.clamp(x);
        ft
    } else {
        fx
    }
}

/// Downhill bracketing from `t = 0` inside `[tlo, thi]`, then Brent's
/// parabolic/golden-section search on the bracket.
fn bracket_and_brent<P>(phi: &mut P, f0: f64, tlo: f64, thi: f64, step: f64) -> (f64, f64)
where
    P: FnMut(f64) -> f64,
{
    let step = step.max(1e-12).min(thi - tlo);
    let mut a = 0.0;
    let mut b = if thi > 0.0 { step.min(thi) } else { (-step).max(tlo) };
    let mut fb = phi(b);
    if fb > f0 {
        std::mem::swap(&mut a, &mut b);
        fb = f0;
    }
    let toward = if b > a { thi } else { tlo };
    loop {
        let c = clamp_between(b + GOLDEN * (b - a), b, toward);
        if c == b {
            return brent(phi, a, c, (b, fb));
        }
        let fc = phi(c);
        if fc >= fb {
            return brent(phi, a, c, (b, fb));
        }
        if c == toward {
            return (c, fc);
        }
        a = b;
        b = c;
        fb = fc;
    }
}

/// `t` clamped to the segment between `from` and `limit`.
fn clamp_between(t: f64, from: f64, limit: f64) -> f64 {
    if from <= limit {
        t.clamp(from, limit)
    } else {
        t.clamp(limit, from)
    }
}

/// Brent's method on the bracket spanned by `a`, `c` with interior best `best`.
fn brent<P>(phi: &mut P, a: f64, c: f64, best: (f64, f64)) -> (f64, f64)
where
    P: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let (mut x, mut fx) = best;
    let (mut w, mut fw) = (x, fx);
    let (mut v, mut fv) = (x, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..BRENT_ITERS {
        let xm = 0.5 * (lo + hi);
        let tol1 = 1.5e-8 * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() >= (0.5 * q * etemp).abs() || p <= q * (lo - x) || p >= q * (hi - x) {
                e = if x >= xm { lo - x } else { hi - x };
                d = CGOLD * e;
            } else {
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
            }
        } else {
            e = if x >= xm { lo - x } else { hi - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = phi(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx)
}

/// Tunables of the SIM/SMS pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    /// Decay of the normal-distribution width, `mu_n = alpha^n`.
    pub alpha: f64,
    /// Half-side of the stability cube as a fraction of `M`.
    pub delta: f64,
    /// Radius-stabilization tolerance as a fraction of `M`.
    pub gamma: f64,
    /// Size of each minimizing set.
    pub k: usize,
    /// Trial points per SMS batch.
    pub l_batch: usize,
    /// Averaging window for the radius test.
    pub p: usize,
    /// SMS iteration cap.
    pub n_max: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            alpha: 0.8,
            delta: 0.001,
            gamma: 0.001,
            k: 30,
            l_batch: 5000,
            p: 6,
            n_max: 30,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| v > 0.0 && v < 1.0;
        if !unit(self.alpha) || !unit(self.delta) || !unit(self.gamma) {
            return config("alpha, delta and gamma must lie in (0, 1)");
        }
        if self.k == 0 || self.l_batch <= self.k || self.p == 0 || self.n_max == 0 {
            return config("need K >= 1, L > K, P >= 1 and N_max >= 1");
        }
        Ok(())
    }
}

/// Trial distribution of one SMS call.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    Uniform,
    /// Isotropic normal with per-coordinate standard deviation `sigma`,
    /// centred on the carried set's minimizer (then on each `q^j`).
    Normal { sigma: f64 },
}

/// `K` points with their values; `q` indexes the minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizingSet {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub q: usize,
    pub radius: f64,
}

impl MinimizingSet {
    fn from_candidates(c: &[Candidate]) -> Self {
        let q = 0;
        let radius = c.iter().map(|p| euclid(&p.x, &c[q].x)).fold(0.0, f64::max);
        Self {
            points: c.iter().map(|p| p.x.clone()).collect(),
            values: c.iter().map(|p| p.f).collect(),
            q,
            radius,
        }
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.points[self.q]
    }

    pub fn min_value(&self) -> f64 {
        self.values[self.q]
    }

    /// Largest pairwise Euclidean distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                d = d.max(euclid(a, b));
            }
        }
        d
    }

    /// Whether every point lies in the cube of half-side `half` about the minimizer.
    pub fn within_cube(&self, half: f64) -> bool {
        let q = self.minimizer();
        self.points
            .iter()
            .all(|p| p.iter().zip(q).all(|(a, b)| (a - b).abs() <= half))
    }
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(Debug, Clone)]
struct Candidate {
    x: Vec<f64>,
    f: f64,
    id: u64,
    flagged: bool,
}

fn by_value(a: &Candidate, b: &Candidate) -> Ordering {
    a.f.total_cmp(&b.f).then(a.id.cmp(&b.id))
}

/// Objective wrapper counting evaluations across threads.
struct Counted<'a, F> {
    f: &'a F,
    count: AtomicU64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> Counted<'_, F> {
    fn call(&self, x: &[f64]) -> f64 {
        self.count.fetch_add(1, AtomicOrdering::Relaxed);
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn draw<R: Rng + ?Sized>(
    rng: &mut R,
    sampling: &Sampling,
    mean: &[f64],
    bounds: &Bounds,
) -> Result<Vec<f64>> {
    match sampling {
        Sampling::Uniform => Ok(bounds
            .lo
            .iter()
            .zip(&bounds.hi)
            .map(|(l, h)| rng.random_range(*l..=*h))
            .collect()),
        Sampling::Normal { sigma } => {
            let normal = Normal::new(0.0, *sigma)
                .map_err(|e| crate::MrcError::Configuration(format!("normal sampling: {e}")))?;
            let mut x = vec![0.0; mean.len()];
            for _ in 0..=NORMAL_RETRIES {
                for (xi, m) in x.iter_mut().zip(mean) {
                    *xi = m + normal.sample(rng);
                }
                if bounds.contains(&x) {
                    return Ok(x);
                }
            }
            bounds.clamp(&mut x);
            Ok(x)
        }
    }
}

struct SmsState<'a, F> {
    f: Counted<'a, F>,
    bounds: Bounds,
    powell: PowellOptions,
    next_id: u64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> SmsState<'_, F> {
    fn fresh(&mut self, x: Vec<f64>, f: f64, flagged: bool) -> Candidate {
        let id = self.next_id;
        self.next_id += 1;
        Candidate { x, f, id, flagged }
    }

    fn batch<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        sampling: &Sampling,
        mean: &[f64],
        l: usize,
    ) -> Result<Vec<Candidate>> {
        let pts = (0..l)
            .map(|_| draw(rng, sampling, mean, &self.bounds))
            .collect::<Result<Vec<_>>>()?;
        let f = &self.f;
        let vals: Vec<f64> = pts.par_iter().map(|x| f.call(x)).collect();
        Ok(pts
            .into_iter()
            .zip(vals)
            .map(|(x, v)| self.fresh(x, v, false))
            .collect())
    }

    /// Runs the local search from each unflagged point; flags everything.
    fn polish(&mut self, qu: &mut [Candidate]) -> Vec<Candidate> {
        let f = &self.f;
        let (bounds, opts) = (&self.bounds, &self.powell);
        let starts: Vec<usize> = (0..qu.len()).filter(|&i| !qu[i].flagged).collect();
        let results: Vec<PowellResult> = starts
            .par_iter()
            .map(|&i| powell_minimize(|x| f.call(x), &qu[i].x, bounds, opts))
            .collect();
        for c in qu.iter_mut() {
            c.flagged = true;
        }
        results
            .into_iter()
            .map(|r| self.fresh(r.x, r.f, true))
            .collect()
    }
}

fn keep_best(mut c: Vec<Candidate>, k: usize) -> Vec<Candidate> {
    c.sort_by(by_value);
    c.truncate(k);
    c
}

/// One SMS call. `carry` is the previous minimizing set (required for normal
/// sampling, where it also supplies the first mean).
pub fn sms<F, R>(
    f: &F,
    domain_box: &BoxDomain,
    sampling: &Sampling,
    params: &SimParams,
    carry: Option<&MinimizingSet>,
    rng: &mut R,
) -> Result<MinimizingSet>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    Ok(sms_counted(f, domain_box, sampling, params, carry, rng)?.0)
}

fn sms_counted<F, R>(
    f: &F,
    domain_box: &BoxDomain,
    sampling: &Sampling,
    params: &SimParams,
    carry: Option<&MinimizingSet>,
    rng: &mut R,
) -> Result<(MinimizingSet, u64, usize)>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    params.validate()?;
    if matches!(sampling, Sampling::Normal { .. }) && carry.is_none() {
        return config("normal SMS sampling needs a carried minimizing set");
    }
    let m = domain_box.m_half;
    let mut st = SmsState {
        f: Counted {
            f,
            count: AtomicU64::new(0),
        },
        bounds: domain_box.bounds(),
        powell: PowellOptions::for_scale(m),
        next_id: 0,
    };
    let mut previous: Vec<Candidate> = Vec::new();
    if let Some(s) = carry {
        for (x, v) in s.points.iter().zip(&s.values) {
            let c = st.fresh(x.clone(), *v, false);
            previous.push(c);
        }
        previous.sort_by(by_value);
    }
    let mut mean: Vec<f64> = carry.map_or_else(|| vec![0.0; domain_box.dim], |s| s.minimizer().to_vec());
    let mut radii: Vec<f64> = Vec::new();
    let mut j = 0;
    loop {
        j += 1;
        let mut pool = std::mem::take(&mut previous);
        pool.extend(st.batch(rng, sampling, &mean, params.l_batch)?);
        let mut qu = keep_best(pool, params.k);
        let qv = st.polish(&mut qu);
        qu.extend(qv);
        let q = keep_best(qu, params.k);
        let set = MinimizingSet::from_candidates(&q);
        radii.push(set.radius);
        mean = set.minimizer().to_vec();
        previous = q;
        let stop = if j >= params.p {
            let ra = radii[j - params.p..].iter().sum::<f64>() / params.p as f64;
            (set.radius - ra).abs() <= 2.0 * params.gamma * m
        } else {
            false
        };
        if stop || j >= params.n_max {
            let evals = st.f.count.load(AtomicOrdering::Relaxed);
            return Ok((set, evals, j));
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub x_p: Vec<f64>,
    pub f_p: f64,
    pub stable: bool,
    /// Diameter of the final minimizing set.
    pub stability_index: f64,
    /// Number of SMS calls after the initial uniform one.
    pub rounds: usize,
    pub evaluations: u64,
    pub final_set: MinimizingSet,
}

/// Global minimization of `f` over `domain_box`.
pub fn sim_minimize<F, R>(f: &F, domain_box: &BoxDomain, params: &SimParams, rng: &mut R) -> Result<SimResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
    R: Rng + ?Sized,
{
    params.validate()?;
    let half = params.delta * domain_box.m_half;
    let (mut set, mut evals, _) = sms_counted(f, domain_box, &Sampling::Uniform, params, None, rng)?;
    let mut n = 0usize;
    let stable = loop {
        if set.within_cube(half) {
            break true;
        }
        n += 1;
        let mu = params.alpha.powi(n as i32);
        let (next, e, _) = sms_counted(f, domain_box, &Sampling::Normal { sigma: mu }, params, Some(&set), rng)?;
        set = next;
        evals += e;
        if !set.within_cube(half) && 3.0 * mu < 2.0 * half {
            break false;
        }
    };
    Ok(SimResult {
        x_p: set.minimizer().to_vec(),
        f_p: set.min_value(),
        stable,
        stability_index: set.diameter(),
        rounds: n,
        evaluations: evals,
        final_set: set,
    })
}

/// Benchmark objectives from the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFunction {
    /// Penalized two-dimensional Shubert product on `[-5, 5]^2`.
    Shubert,
    /// Oscillatory two-dimensional function on `[-1, 1]^2`.
    Trefethen,
    /// Levy-type function on `[-10, 10]^N`, minimum 0 at `(1, ..., 1)`.
    Levy,
}

impl TestFunction {
    pub fn from_id(id: u32) -> Result<Self> {
        match id {
            1 => Ok(Self::Shubert),
            2 => Ok(Self::Trefethen),
            3 => Ok(Self::Levy),
            _ => domain(format!("unknown test function {id}")),
        }
    }

    pub fn id(&self) -> u32 {
        match self {
            Self::Shubert => 1,
            Self::Trefethen => 2,
            Self::Levy => 3,
        }
    }

    /// Half-side of the search cube.
    pub fn m_half(&self) -> f64 {
        match self {
            Self::Shubert => 5.0,
            Self::Trefethen => 1.0,
            Self::Levy => 10.0,
        }
    }

    /// Reference minimum value.
    pub fn known_minimum(&self) -> f64 {
        match self {
            Self::Shubert => -186.73091,
            Self::Trefethen => -3.30686865,
            Self::Levy => 0.0,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            Self::Shubert | Self::Trefethen if x.len() != 2 => {
                domain(format!("test function {} is two-dimensional, got {}", self.id(), x.len()))
            }
            Self::Levy if x.is_empty() => domain("test function 3 needs at least one coordinate"),
            _ => Ok(self.eval_unchecked(x)),
        }
    }

    /// Evaluates without the dimension check.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Self::Shubert => {
                let s = |t: f64| (1..=5).map(|i| i as f64 * ((i as f64 + 1.0) * t + i as f64).cos()).sum::<f64>();
                s(x[0]) * s(x[1]) + 0.5 * ((x[0] + 1.4213).powi(2) + (x[1] + 0.80032).powi(2))
            }
            Self::Trefethen => {
                let (a, b) = (x[0], x[1]);
                (50.0 * a).sin().exp() + (60.0 * b.exp()).sin() + (70.0 * a.sin()).sin()
                    + (80.0 * b).sin().sin()
                    - (10.0 * (a + b)).sin()
                    + (a * a + b * b) / 4.0
            }
            Self::Levy => {
                let n = x.len();
                let y = |i: usize| 1.0 + 0.25 * (x[i] - 1.0);
                let mut s = 10.0 * (PI * y(0)).sin().powi(2);
                for i in 0..n - 1 {
                    s += (y(i) - 1.0).powi(2) * (1.0 + 10.0 * (PI * y(i + 1)).sin().powi(2));
                }
                s += (y(n - 1) - 1.0).powi(2);
                PI / n as f64 * s
            }
        }
    }
}

/// Evaluates test function `id` (1, 2 or 3) at `x`.
pub fn test_function(id: u32, x: &[f64]) -> Result<f64> {
    TestFunction::from_id(id)?.eval(x)
}

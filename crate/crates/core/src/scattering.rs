//! Obstacle scattering by outgoing multipole sources placed inside the
//! obstacle: one-shot multi-point fits, random multi-point iteration and
//! optimal source placement.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{config, domain, MrcError, Result};
use crate::geometry::{sample_interior, sample_sources, Obstacle, Point, SourceSampling, DEFAULT_MARGIN};
use crate::lsq::{normalized_norm, solve_equilibrated, ColumnLabel, DesignMatrix, LsqSolution};
use crate::sim::{powell_minimize, Bounds, PowellOptions};
use crate::specfun::{bessel_jy_into, sph_count, sph_hankel_out_into, sph_harmonics_into, BesselWork};

const FORMAT_HEADER: &str = "# mrc-expansion v1";
const UNIT_TOL: f64 = 1e-12;
const PAR_MIN_ROWS: usize = 64;

/// Scratch buffers for basis evaluation.
#[derive(Debug, Default, Clone)]
pub struct BasisWork {
    bessel: BesselWork,
    j: Vec<f64>,
    y: Vec<f64>,
    h: Vec<Complex64>,
    ylm: Vec<Complex64>,
}

/// Points that carry an outgoing-wave multipole basis.
///
/// In the plane the modes are `H_l(k|x-z|) e^{il theta}` for `-L <= l <= L`,
/// stored at index `l + L`. In space they are `Y_lm h_l(k|x-z|)` in packed
/// `l^2 + l + m` order.
pub trait WaveBasis: Point {
    /// Basis functions per source for maximal order `l_max`.
    fn modes(l_max: usize) -> usize;

    /// `(l, m)` of mode index `mode`; `m = 0` in the plane.
    fn mode_label(l_max: usize, mode: usize) -> (i32, i32);

    fn mode_index(l_max: usize, l: i32, m: i32) -> Option<usize>;

    /// Writes all mode values at `x` for a source at `z` into `out`.
    fn fill_basis(x: &Self, z: &Self, k: f64, l_max: usize, ws: &mut BasisWork, out: &mut [Complex64]) -> Result<()>;

    /// Writes each mode's far-field pattern in direction `alpha`.
    fn fill_far(alpha: &Self, z: &Self, k: f64, l_max: usize, ws: &mut BasisWork, out: &mut [Complex64]);
}

impl WaveBasis for [f64; 2] {
    fn modes(l_max: usize) -> usize {
        2 * l_max + 1
    }

    fn mode_label(l_max: usize, mode: usize) -> (i32, i32) {
        (mode as i32 - l_max as i32, 0)
    }

    fn mode_index(l_max: usize, l: i32, m: i32) -> Option<usize> {
        (m == 0 && l.unsigned_abs() as usize <= l_max).then(|| (l + l_max as i32) as usize)
    }

    fn fill_basis(x: &Self, z: &Self, k: f64, l_max: usize, ws: &mut BasisWork, out: &mut [Complex64]) -> Result<()> {
        let (dx, dy) = (x[0] - z[0], x[1] - z[1]);
        let r = dx.hypot(dy);
        if r == 0.0 {
            return Err(MrcError::Singularity("basis evaluated at its source".into()));
        }
        ws.j.resize(l_max + 1, 0.0);
        ws.y.resize(l_max + 1, 0.0);
        bessel_jy_into(k * r, &mut ws.j, &mut ws.y, &mut ws.bessel)?;
        let e = Complex64::new(dx / r, dy / r);
        let mut pw = Complex64::new(1.0, 0.0);
        for l in 0..=l_max {
            let h = Complex64::new(ws.j[l], ws.y[l]);
            let v = h * pw;
            out[l_max + l] = v;
            if l > 0 {
                let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
                out[l_max - l] = h * pw.conj() * sign;
            }
            pw *= e;
        }
        Ok(())
    }

    fn fill_far(alpha: &Self, z: &Self, k: f64, l_max: usize, _ws: &mut BasisWork, out: &mut [Complex64]) {
        let pref = Complex64::from_polar((2.0 / (PI * k)).sqrt(), -FRAC_PI_4 - k * alpha.dot(z));
        let w = Complex64::new(alpha[1], -alpha[0]);
        let mut pw = Complex64::new(1.0, 0.0);
        for l in 0..=l_max {
            out[l_max + l] = pref * pw;
            out[l_max - l] = pref * pw.conj();
            pw *= w;
        }
    }
}

impl WaveBasis for [f64; 3] {
    fn modes(l_max: usize) -> usize {
        sph_count(l_max)
    }

    fn mode_label(_l_max: usize, mode: usize) -> (i32, i32) {
        let l = (mode as f64).sqrt() as i32;
        let l = if ((l + 1) * (l + 1)) as usize <= mode { l + 1 } else { l };
        (l, mode as i32 - l * l - l)
    }

    fn mode_index(l_max: usize, l: i32, m: i32) -> Option<usize> {
        (l >= 0 && l as usize <= l_max && m.abs() <= l).then(|| (l * l + l + m) as usize)
    }

    fn fill_basis(x: &Self, z: &Self, k: f64, l_max: usize, ws: &mut BasisWork, out: &mut [Complex64]) -> Result<()> {
        let d = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if r == 0.0 {
            return Err(MrcError::Singularity("basis evaluated at its source".into()));
        }
        ws.h.resize(l_max + 1, Complex64::default());
        sph_hankel_out_into(k * r, &mut ws.h)?;
        let dir = [d[0] / r, d[1] / r, d[2] / r];
        sph_harmonics_into(l_max, &dir, out);
        for l in 0..=l_max {
            for v in &mut out[l * l..(l + 1) * (l + 1)] {
                *v *= ws.h[l];
            }
        }
        Ok(())
    }

    fn fill_far(alpha: &Self, z: &Self, k: f64, l_max: usize, ws: &mut BasisWork, out: &mut [Complex64]) {
        let pref = Complex64::from_polar(1.0 / k, -k * alpha.dot(z));
        ws.ylm.resize(sph_count(l_max), Complex64::default());
        sph_harmonics_into(l_max, alpha, &mut ws.ylm);
        for (o, y) in out.iter_mut().zip(&ws.ylm) {
            *o = pref * y;
        }
    }
}

fn check_unit<P: Point>(alpha: &P) -> Result<()> {
    let n = alpha.dot(alpha).sqrt();
    if (n - 1.0).abs() > UNIT_TOL {
        return domain(format!("direction {alpha:?} is not a unit vector"));
    }
    Ok(())
}

/// The plane wave `e^{ik alpha.x}`.
pub fn incident_field<P: Point>(k: f64, alpha: &P, x: &P) -> Complex64 {
    Complex64::from_polar(1.0, k * alpha.dot(x))
}

/// A sound-soft obstacle hit by a plane wave, with its collocation nodes.
#[derive(Debug, Clone)]
pub struct ScatteringProblem<B: Obstacle> {
    k: f64,
    alpha: B::Point,
    boundary: B,
    nodes: Vec<B::Point>,
}

impl<B> ScatteringProblem<B>
where
    B: Obstacle,
    B::Point: WaveBasis,
{
    pub fn new(boundary: B, k: f64, alpha: B::Point, m_nodes: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("wavenumber must be positive, got {k}"));
        }
        check_unit(&alpha)?;
        let nodes = boundary.nodes(m_nodes)?;
        Ok(Self {
            k,
            alpha,
            boundary,
            nodes,
        })
    }

    /// Same as [`ScatteringProblem::new`] with explicit collocation nodes.
    pub fn with_nodes(boundary: B, k: f64, alpha: B::Point, nodes: Vec<B::Point>) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return domain(format!("wavenumber must be positive, got {k}"));
        }
        check_unit(&alpha)?;
        if nodes.is_empty() {
            return config("at least one collocation node is required");
        }
        Ok(Self {
            k,
            alpha,
            boundary,
            nodes,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> &B::Point {
        &self.alpha
    }

    pub fn boundary(&self) -> &B {
        &self.boundary
    }

    pub fn nodes(&self) -> &[B::Point] {
        &self.nodes
    }

    /// `u_0` sampled at the nodes.
    pub fn incident_at_nodes(&self) -> Vec<Complex64> {
        self.nodes.iter().map(|x| incident_field(self.k, &self.alpha, x)).collect()
    }

    /// Columns `psi_mode(t_m, z_j)` for every source and mode; labels count
    /// sources from `first_source`.
    pub fn design_matrix(&self, sources: &[B::Point], l_max: usize, first_source: usize) -> Result<DesignMatrix> {
        let nm = <B::Point as WaveBasis>::modes(l_max);
        let cols = nm * sources.len();
        let rows = self.nodes.len();
        let k = self.k;
        let row_block = |ws: &mut BasisWork, x: &B::Point| -> Result<Vec<Complex64>> {
            let mut row = vec![Complex64::default(); cols];
            for (s, z) in sources.iter().enumerate() {
                B::Point::fill_basis(x, z, k, l_max, ws, &mut row[s * nm..(s + 1) * nm])?;
            }
            Ok(row)
        };
        let row_data: Vec<Vec<Complex64>> = if rows * cols >= PAR_MIN_ROWS * 16 {
            self.nodes
                .par_iter()
                .map_init(BasisWork::default, |ws, x| row_block(ws, x))
                .collect::<Result<_>>()?
        } else {
            let mut ws = BasisWork::default();
            self.nodes.iter().map(|x| row_block(&mut ws, x)).collect::<Result<_>>()?
        };
        let mut a = DesignMatrix::zeros(rows, cols);
        for (i, row) in row_data.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, *v);
            }
        }
        let labels = (0..cols)
            .map(|c| ColumnLabel {
                source: first_source + c / nm.max(1),
                mode: c % nm.max(1),
            })
            .collect();
        a.with_labels(labels)
    }
}

/// Coefficients of one source.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceTerm<P> {
    pub z: P,
    pub coeffs: Vec<Complex64>,
}

/// Approximate scattered field `sum_j sum_l c_{l,j} psi_l(x, z_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion<P> {
    pub k: f64,
    pub l_max: usize,
    pub sources: Vec<SourceTerm<P>>,
}

impl<P: WaveBasis> Expansion<P> {
    pub fn new(k: f64, l_max: usize) -> Self {
        Self {
            k,
            l_max,
            sources: Vec::new(),
        }
    }

    pub fn push(&mut self, z: P, coeffs: Vec<Complex64>) -> Result<()> {
        let nm = P::modes(self.l_max);
        if coeffs.len() != nm {
            return domain(format!("source needs {nm} coefficients, got {}", coeffs.len()));
        }
        self.sources.push(SourceTerm { z, coeffs });
        Ok(())
    }

    /// Adds the sources of one solve round, splitting the stacked coefficients.
    fn push_round(&mut self, zs: &[P], coeffs: &[Complex64]) {
        let nm = P::modes(self.l_max);
        for (z, c) in zs.iter().zip(coeffs.chunks(nm)) {
            self.sources.push(SourceTerm { z: *z, coeffs: c.to_vec() });
        }
    }

    pub fn coefficient_count(&self) -> usize {
        self.sources.len() * P::modes(self.l_max)
    }

    /// Field value at `x`; only coincidence with a source is rejected.
    pub fn eval(&self, x: &P) -> Result<Complex64> {
        let mut ws = BasisWork::default();
        self.eval_with(x, &mut ws)
    }

    fn eval_with(&self, x: &P, ws: &mut BasisWork) -> Result<Complex64> {
        let mut buf = vec![Complex64::default(); P::modes(self.l_max)];
        let mut sum = Complex64::default();
        for s in &self.sources {
            P::fill_basis(x, &s.z, self.k, self.l_max, ws, &mut buf)?;
            sum += buf.iter().zip(&s.coeffs).map(|(b, c)| b * c).sum::<Complex64>();
        }
        Ok(sum)
    }

    /// Values at many points.
    pub fn eval_many(&self, xs: &[P]) -> Result<Vec<Complex64>> {
        let mut ws = BasisWork::default();
        xs.iter().map(|x| self.eval_with(x, &mut ws)).collect()
    }

    /// Far-field pattern in direction `alpha_prime`.
    pub fn far_field(&self, alpha_prime: &P) -> Result<Complex64> {
        check_unit(alpha_prime)?;
        let mut ws = BasisWork::default();
        let mut buf = vec![Complex64::default(); P::modes(self.l_max)];
        let mut sum = Complex64::default();
        for s in &self.sources {
            P::fill_far(alpha_prime, &s.z, self.k, self.l_max, &mut ws, &mut buf);
            sum += buf.iter().zip(&s.coeffs).map(|(b, c)| b * c).sum::<Complex64>();
        }
        Ok(sum)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "dim {}", P::DIM);
        let _ = writeln!(s, "k {}", self.k);
        let _ = writeln!(s, "L {}", self.l_max);
        for (j, src) in self.sources.iter().enumerate() {
            let _ = write!(s, "src {j}");
            for c in src.z.coords() {
                let _ = write!(s, " {c}");
            }
            s.push('\n');
            for (mode, c) in src.coeffs.iter().enumerate() {
                let (l, m) = P::mode_label(self.l_max, mode);
                let _ = writeln!(s, "c {j} {l} {m} {} {}", c.re, c.im);
            }
        }
        w.write_all(s.as_bytes())
            .map_err(|e| MrcError::Parse(format!("writing expansion: {e}")))
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, msg: &str| MrcError::Parse(format!("expansion line {line}: {msg}"));
        let num = |line: usize, t: Option<&str>| -> Result<f64> {
            t.and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(line, "expected a finite number"))
        };
        let int = |line: usize, t: Option<&str>| -> Result<i64> {
            t.and_then(|v| v.parse::<i64>().ok()).ok_or_else(|| bad(line, "expected an integer"))
        };
        let mut k = None;
        let mut l_max = None;
        let mut out: Option<Self> = None;
        let mut saw_header = false;
        for (i, line) in r.lines().enumerate() {
            let n = i + 1;
            let line = line.map_err(|e| MrcError::Parse(format!("reading expansion: {e}")))?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if line == FORMAT_HEADER {
                    saw_header = true;
                } else if !saw_header {
                    return Err(bad(n, "unsupported format header"));
                }
                continue;
            }
            let mut t = line.split_whitespace();
            match t.next() {
                Some("dim") => {
                    if int(n, t.next())? != P::DIM as i64 {
                        return Err(bad(n, "dimension mismatch"));
                    }
                }
                Some("k") => k = Some(num(n, t.next())?),
                Some("L") => l_max = Some(int(n, t.next())?.max(0) as usize),
                Some("src") => {
                    let e = match (&mut out, k, l_max) {
                        (Some(e), _, _) => e,
                        (None, Some(k), Some(l)) => out.insert(Self::new(k, l)),
                        _ => return Err(bad(n, "source before k and L")),
                    };
                    if int(n, t.next())? != e.sources.len() as i64 {
                        return Err(bad(n, "sources must be numbered consecutively"));
                    }
                    let mut c = Vec::with_capacity(P::DIM);
                    for _ in 0..P::DIM {
                        c.push(num(n, t.next())?);
                    }
                    let z = P::from_fn(|d| c[d]);
                    e.sources.push(SourceTerm {
                        z,
                        coeffs: vec![Complex64::default(); P::modes(e.l_max)],
                    });
                }
                Some("c") => {
                    let e = out.as_mut().ok_or_else(|| bad(n, "coefficient before any source"))?;
                    let j = int(n, t.next())?;
                    let (l, m) = (int(n, t.next())?, int(n, t.next())?);
                    let (re, im) = (num(n, t.next())?, num(n, t.next())?);
                    let mode = P::mode_index(e.l_max, l as i32, m as i32).ok_or_else(|| bad(n, "mode out of range"))?;
                    let src = usize::try_from(j)
                        .ok()
                        .and_then(|j| e.sources.get_mut(j))
                        .ok_or_else(|| bad(n, "unknown source"))?;
                    src.coeffs[mode] = Complex64::new(re, im);
                }
                Some(other) => return Err(bad(n, &format!("unknown record '{other}'"))),
                None => {}
            }
        }
        if !saw_header {
            return Err(MrcError::Parse("missing expansion header".into()));
        }
        match (out, k, l_max) {
            (Some(e), _, _) => Ok(e),
            (None, Some(k), Some(l)) => Ok(Self::new(k, l)),
            _ => Err(MrcError::Parse("expansion lacks k or L".into())),
        }
    }
}

/// Scattered field at a point outside the obstacle.
pub fn eval_scattered<B>(boundary: &B, e: &Expansion<B::Point>, x: &B::Point) -> Result<Complex64>
where
    B: Obstacle,
    B::Point: WaveBasis,
{
    if boundary.contains(x) {
        return domain(format!("{x:?} lies inside the obstacle"));
    }
    e.eval(x)
}

/// Far-field pattern of the expansion.
pub fn far_field<P: WaveBasis>(e: &Expansion<P>, alpha_prime: &P) -> Result<Complex64> {
    e.far_field(alpha_prime)
}

/// Outcome of an MRC solve.
#[derive(Debug, Clone)]
pub struct SolveReport<P> {
    pub expansion: Expansion<P>,
    pub r_min: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Boundary residual after each round.
    pub history: Vec<f64>,
}

/// Solver settings shared by the three MRC variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrcParams {
    pub l_max: usize,
    pub eps: f64,
    pub n_max: usize,
    pub w_min: f64,
    /// Sources per random round.
    pub j: usize,
    /// Interior sampling margin.
    pub margin: f64,
    pub sampling: SourceSampling,
}

impl MrcParams {
    pub fn random_default() -> Self {
        Self {
            l_max: 5,
            eps: 1e-4,
            n_max: 6000,
            w_min: 1e-12,
            j: 1,
            margin: DEFAULT_MARGIN,
            sampling: SourceSampling::Uniform,
        }
    }

    pub fn optimal_default() -> Self {
        Self {
            eps: 0.002,
            n_max: 100,
            ..Self::random_default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return config(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.w_min > 0.0) {
            return config(format!("w_min must be positive, got {}", self.w_min));
        }
        if self.n_max == 0 || self.j == 0 {
            return config("N_max and J must be at least 1");
        }
        if !(0.0..1.0).contains(&self.margin) {
            return config(format!("margin must lie in [0, 1), got {}", self.margin));
        }
        Ok(())
    }
}

/// One-shot fit with the given interior sources.
pub fn multipoint_mrc<B>(
    p: &ScatteringProblem<B>,
    sources: &[B::Point],
    l_max: usize,
    w_min: f64,
    eps: f64,
) -> Result<SolveReport<B::Point>>
where
    B: Obstacle,
    B::Point: WaveBasis,
{
    if let Some(z) = sources.iter().find(|z| !p.boundary.contains(z)) {
        return domain(format!("source {z:?} is not inside the obstacle"));
    }
    let cols = <B::Point as WaveBasis>::modes(l_max) * sources.len();
    if cols > p.nodes.len() {
        return config(format!("{cols} basis functions exceed {} nodes", p.nodes.len()));
    }
    let b = p.incident_at_nodes();
    let a = p.design_matrix(sources, l_max, 0)?;
    let sol = solve_equilibrated(&a, &b, w_min)?;
    let mut expansion = Expansion::new(p.k, l_max);
    expansion.push_round(sources, &sol.coeffs);
    Ok(SolveReport {
        expansion,
        r_min: sol.r_min,
        iterations: 1,
        converged: sol.r_min <= eps,
        history: vec![sol.r_min],
    })
}

/// Boundary data `g` and the growing expansion of an iterative solve.
struct Accumulator<P> {
    g: Vec<Complex64>,
    expansion: Expansion<P>,
    history: Vec<f64>,
}

impl<P: WaveBasis> Accumulator<P> {
    fn absorb(&mut self, a: &DesignMatrix, zs: &[P], sol: &LsqSolution) {
        let ac = a.mul_vec(&sol.coeffs);
        for (g, v) in self.g.iter_mut().zip(ac) {
            *g += v;
        }
        self.expansion.push_round(zs, &sol.coeffs);
        self.history.push(sol.r_min);
    }

    fn report(self, r_min: f64, eps: f64) -> SolveReport<P> {
        SolveReport {
            iterations: self.history.len(),
            converged: r_min <= eps,
            expansion: self.expansion,
            r_min,
            history: self.history,
        }
    }
}

/// Random multi-point iteration: each round fits the current boundary
/// residual with `J` fresh random interior sources.
pub fn random_mrc<B, R>(p: &ScatteringProblem<B>, params: &MrcParams, rng: &mut R) -> Result<SolveReport<B::Point>>
where
    B: Obstacle,
    B::Point: WaveBasis,
    R: Rng + ?Sized,
{
    random_mrc_from(p, params, &[], rng)
}

/// As [`random_mrc`], but the first round uses the given sources (a
/// multi-point fit) instead of a random batch.
pub fn random_mrc_from<B, R>(
    p: &ScatteringProblem<B>,
    params: &MrcParams,
    first: &[B::Point],
    rng: &mut R,
) -> Result<SolveReport<B::Point>>
where
    B: Obstacle,
    B::Point: WaveBasis,
    R: Rng + ?Sized,
{
    params.validate()?;
    if let Some(z) = first.iter().find(|z| !p.boundary.contains(z)) {
        return domain(format!("source {z:?} is not inside the obstacle"));
    }
    let mut acc = Accumulator {
        g: p.incident_at_nodes(),
        expansion: Expansion::new(p.k, params.l_max),
        history: Vec::new(),
    };
    let mut r_min = normalized_norm(&acc.g)?;
    for n in 0..params.n_max {
        let zs = if n == 0 && !first.is_empty() {
            first.to_vec()
        } else {
            sample_sources(&p.boundary, params.j, params.margin, params.sampling, rng)?
        };
        let start = acc.expansion.sources.len();
        let a = p.design_matrix(&zs, params.l_max, start)?;
        let sol = solve_equilibrated(&a, &acc.g, params.w_min)?;
        r_min = sol.r_min;
        acc.absorb(&a, &zs, &sol);
        if r_min <= params.eps {
            break;
        }
    }
    Ok(acc.report(r_min, params.eps))
}

/// Number of random interior starts for each source-location search.
pub const OPTIMAL_SEEDS: usize = 8;
const SEARCH_MARGIN: f64 = 0.01;

/// Optimal-source iteration: each round places one source where the
/// least-squares residual of the current boundary data is smallest.
pub fn optimal_mrc<B, R>(p: &ScatteringProblem<B>, params: &MrcParams, rng: &mut R) -> Result<SolveReport<B::Point>>
where
    B: Obstacle,
    B::Point: WaveBasis,
    R: Rng + ?Sized,
{
    params.validate()?;
    let mut acc = Accumulator {
        g: p.incident_at_nodes(),
        expansion: Expansion::new(p.k, params.l_max),
        history: Vec::new(),
    };
    let (lo, hi) = p.boundary.bounding_box();
    let bounds = Bounds::new(lo.coords().to_vec(), hi.coords().to_vec())?;
    let extent = lo
        .coords()
        .iter()
        .zip(hi.coords())
        .map(|(a, b)| b - a)
        .fold(0.0, f64::max);
    let opts = PowellOptions {
        tol: 1e-6,
        max_cycles: 20,
        step: 0.05 * extent,
    };
    let mut r_min = normalized_norm(&acc.g)?;
    for _ in 0..params.n_max {
        let penalty = 10.0 * (1.0 + r_min);
        let g = &acc.g;
        let objective = |c: &[f64]| -> f64 {
            let z = B::Point::from_fn(|d| c[d]);
            if !p.boundary.contains_with_margin(&z, SEARCH_MARGIN) {
                return penalty;
            }
            p.design_matrix(std::slice::from_ref(&z), params.l_max, 0)
                .and_then(|a| solve_equilibrated(&a, g, params.w_min))
                .map_or(penalty, |s| s.r_min)
        };
        let seeds = sample_interior(&p.boundary, OPTIMAL_SEEDS, params.margin, rng)?;
        let start = seeds
            .iter()
            .map(|z| (objective(z.coords()), z))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, z)| *z)
            .expect("at least one seed");
        let best = powell_minimize(objective, start.coords(), &bounds, &opts);
        let z = B::Point::from_fn(|d| best.x[d]);
        let first = acc.expansion.sources.len();
        let a = p.design_matrix(std::slice::from_ref(&z), params.l_max, first)?;
        let sol = solve_equilibrated(&a, &acc.g, params.w_min)?;
        r_min = sol.r_min;
        acc.absorb(&a, &[z], &sol);
        if r_min <= params.eps {
            break;
        }
    }
    Ok(acc.report(r_min, params.eps))
}

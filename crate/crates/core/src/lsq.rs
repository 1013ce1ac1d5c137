//! Complex least squares with a hard singular-value cutoff.
//!
//! The SVD is computed by a Householder QR of the design matrix followed by
//! one-sided (Hestenes) Jacobi on the triangular factor. Only the `N x N`
//! factor is rotated, so the cost per sweep does not grow with the row count.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, MrcError, Result};

const JACOBI_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 80;
/// Column count above which the QR trailing update is split across threads.
const PAR_MIN_WORK: usize = 1 << 16;

/// Identifies the basis function behind a design-matrix column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColumnLabel {
    pub source: usize,
    pub mode: usize,
}

/// Dense column-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
    labels: Vec<ColumnLabel>,
}

impl DesignMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
            labels: (0..cols).map(|mode| ColumnLabel { source: 0, mode }).collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m.data[j * rows + i] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from equal-length columns.
    pub fn from_columns(rows: usize, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let cols = columns.len();
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            if c.len() != rows {
                return domain(format!("column of length {} in a {rows}-row matrix", c.len()));
            }
            data.extend(c);
        }
        Ok(Self {
            rows,
            cols,
            data,
            labels: (0..cols).map(|mode| ColumnLabel { source: 0, mode }).collect(),
        })
    }

    pub fn with_labels(mut self, labels: Vec<ColumnLabel>) -> Result<Self> {
        if labels.len() != self.cols {
            return domain(format!("{} labels for {} columns", labels.len(), self.cols));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn labels(&self) -> &[ColumnLabel] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.rows + i] = v;
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Column-major storage, one column per `rows`-long chunk.
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// `A c`.
    pub fn mul_vec(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (j, cj) in c.iter().enumerate() {
            if *cj == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.col(j)) {
                *o += a * cj;
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `<u, v> = sum conj(u_i) v_i`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `sqrt((1/M) sum |v_m|^2)`.
pub fn normalized_norm(v: &[Complex64]) -> Result<f64> {
    if v.is_empty() {
        return domain("normalized norm of an empty vector");
    }
    Ok((v.iter().map(|z| z.norm_sqr()).sum::<f64>() / v.len() as f64).sqrt())
}

/// Thin SVD `A = U diag(w) V^H`, singular values nonincreasing.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `M x r` with orthonormal columns, `r = min(M, N)`.
    pub u: DesignMatrix,
    pub w: Vec<f64>,
    /// `N x r` with orthonormal columns.
    pub v: DesignMatrix,
}

impl Svd {
    pub fn compute(a: &DesignMatrix) -> Result<Svd> {
        let f = Factorization::new(a)?;
        let r = f.w.len();
        let mut u = DesignMatrix::zeros(a.rows, r);
        for n in 0..r {
            let col = u.col_mut(n);
            col[..f.inner_rows].copy_from_slice(f.ur.col(n));
            f.apply_q(col);
        }
        Ok(Svd { u, w: f.w, v: f.v })
    }
}

/// Householder reflector `I - tau v v^H` acting on rows `k..`.
#[derive(Debug, Clone)]
struct Reflector {
    k: usize,
    v: Vec<Complex64>,
    tau: f64,
}

impl Reflector {
    fn apply(&self, x: &mut [Complex64]) {
        if self.tau == 0.0 {
            return;
        }
        let tail = &mut x[self.k..];
        let s = inner(&self.v, tail) * self.tau;
        for (t, v) in tail.iter_mut().zip(&self.v) {
            *t -= v * s;
        }
    }
}

/// QR-preconditioned SVD; `U = Q [ur; 0]` is kept implicit.
struct Factorization {
    reflectors: Vec<Reflector>,
    inner_rows: usize,
    ur: DesignMatrix,
    w: Vec<f64>,
    v: DesignMatrix,
}

impl Factorization {
    fn new(a: &DesignMatrix) -> Result<Self> {
        if a.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(MrcError::Numerical("non-finite entry in design matrix".into()));
        }
        let (m, n) = (a.rows, a.cols);
        let (reflectors, work) = if m > n {
            let (refl, r) = householder_qr(a);
            (refl, r)
        } else {
            (Vec::new(), a.clone())
        };
        let inner_rows = work.rows;
        let (ur, w, v) = jacobi_svd(work)?;
        Ok(Self {
            reflectors,
            inner_rows,
            ur,
            w,
            v,
        })
    }

    fn apply_q(&self, x: &mut [Complex64]) {
        for r in self.reflectors.iter().rev() {
            r.apply(x);
        }
    }

    fn apply_qh(&self, x: &mut [Complex64]) {
        for r in &self.reflectors {
            r.apply(x);
        }
    }
}

/// Returns the reflectors and the `N x N` upper-triangular factor.
fn householder_qr(a: &DesignMatrix) -> (Vec<Reflector>, DesignMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut work = a.data.clone();
    let mut reflectors = Vec::with_capacity(n);
    for k in 0..n {
        let (head, rest) = work.split_at_mut((k + 1) * m);
        let x = &mut head[k * m + k..(k + 1) * m];
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            reflectors.push(Reflector {
                k,
                v: vec![Complex64::new(0.0, 0.0); m - k],
                tau: 0.0,
            });
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let alpha = -phase * xnorm;
        let mut v: Vec<Complex64> = x.to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let refl = Reflector {
            k,
            v,
            tau: 2.0 / vnorm2,
        };
        x[0] = alpha;
        for z in x[1..].iter_mut() {
            *z = Complex64::new(0.0, 0.0);
        }
        let update = |col: &mut [Complex64]| refl.apply(col);
        if (m - k) * (n - k) >= PAR_MIN_WORK {
            rest.par_chunks_mut(m).for_each(update);
        } else {
            rest.chunks_mut(m).for_each(update);
        }
        reflectors.push(refl);
    }
    let r = DesignMatrix::from_fn(n, n, |i, j| if i <= j { work[j * m + i] } else { Complex64::new(0.0, 0.0) });
    (reflectors, r)
}

/// One-sided Jacobi on `g` (`p x n`): returns `(U, w, V)` with `g = U diag(w) V^H`,
/// `U` of size `p x min(p, n)`.
fn jacobi_svd(mut g: DesignMatrix) -> Result<(DesignMatrix, Vec<f64>, DesignMatrix)> {
    let (p, n) = (g.rows, g.cols);
    let mut v = DesignMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut norms: Vec<f64> = (0..n).map(|j| g.col(j).iter().map(|z| z.norm_sqr()).sum()).collect();
    let tiny = (f64::EPSILON * norms.iter().sum::<f64>().sqrt()).powi(2);
    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = g.col(j).iter().map(|z| z.norm_sqr()).sum();
        }
        for i in 0..n - 1 {
            for j in i + 1..n {
                let (a, b) = (norms[i], norms[j]);
                if a <= tiny || b <= tiny {
                    continue;
                }
                let gamma = inner(g.col(i), g.col(j));
                let gabs = gamma.norm();
                if gabs <= JACOBI_TOL * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / gabs;
                let zeta = (b - a) / (2.0 * gabs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut g, i, j, c, s, phase);
                rotate(&mut v, i, j, c, s, phase);
                norms[i] = (a - t * gabs).max(0.0);
                norms[j] = b + t * gabs;
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(MrcError::Numerical(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }
    for (j, nj) in norms.iter_mut().enumerate() {
        *nj = g.col(j).iter().map(|z| z.norm_sqr()).sum();
    }
    let mut order: Vec<usize> = (0..n).collect();
    let w_all: Vec<f64> = norms.iter().map(|x| x.sqrt()).collect();
    order.sort_by(|&x, &y| w_all[y].total_cmp(&w_all[x]).then(x.cmp(&y)));
    let r = p.min(n);
    let mut u = DesignMatrix::zeros(p, r);
    let mut vs = DesignMatrix::zeros(n, r);
    let mut w = Vec::with_capacity(r);
    for (slot, &src) in order.iter().take(r).enumerate() {
        let wn = w_all[src];
        w.push(wn);
        vs.col_mut(slot).copy_from_slice(v.col(src));
        if wn > 0.0 {
            for (o, z) in u.col_mut(slot).iter_mut().zip(g.col(src)) {
                *o = z / wn;
            }
        }
    }
    Ok((u, w, vs))
}

/// Columns `(x, y) <- (c x - s e^{-i phi} y, s x + c e^{-i phi} y)`, `phase = e^{i phi}`.
fn rotate(m: &mut DesignMatrix, i: usize, j: usize, c: f64, s: f64, phase: Complex64) {
    let rows = m.rows;
    let (lo, hi) = m.data.split_at_mut(j * rows);
    let x = &mut lo[i * rows..(i + 1) * rows];
    let y = &mut hi[..rows];
    let ph = phase.conj();
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let yb = *b * ph;
        let xa = *a;
        *a = xa * c - yb * s;
        *b = xa * s + yb * c;
    }
}

/// Result of [`solve_cutoff`].
#[derive(Debug, Clone)]
pub struct LsqSolution {
    pub coeffs: Vec<Complex64>,
    /// `normalized_norm(b + A coeffs)`.
    pub r_min: f64,
    pub kept_rank: usize,
    pub singular_values: Vec<f64>,
}

/// Minimizes `||b + A c||` over the span of right singular vectors with
/// `w_n >= w_min`.
pub fn solve_cutoff(a: &DesignMatrix, b: &[Complex64], w_min: f64) -> Result<LsqSolution> {
    if b.len() != a.rows {
        return domain(format!("rhs has length {}, matrix has {} rows", b.len(), a.rows));
    }
    if !(w_min > 0.0) {
        return domain(format!("cutoff must be positive, got {w_min}"));
    }
    let r0 = normalized_norm(b)?;
    if a.cols == 0 {
        return Ok(LsqSolution {
            coeffs: Vec::new(),
            r_min: r0,
            kept_rank: 0,
            singular_values: Vec::new(),
        });
    }
    let f = Factorization::new(a)?;
    let mut qb = b.to_vec();
    f.apply_qh(&mut qb);
    let qb = &qb[..f.inner_rows];
    let mut coeffs = vec![Complex64::new(0.0, 0.0); a.cols];
    let mut kept = 0;
    for (n, &wn) in f.w.iter().enumerate() {
        if wn < w_min {
            continue;
        }
        kept += 1;
        let s = -inner(f.ur.col(n), qb) / wn;
        for (c, vn) in coeffs.iter_mut().zip(f.v.col(n)) {
            *c += vn * s;
        }
    }
    let r_min = if kept == 0 {
        r0
    } else {
        let mut res = a.mul_vec(&coeffs);
        for (r, bi) in res.iter_mut().zip(b) {
            *r += bi;
        }
        normalized_norm(&res)?
    };
    Ok(LsqSolution {
        coeffs,
        r_min,
        kept_rank: kept,
        singular_values: f.w,
    })
}

/// [`solve_cutoff`] after scaling every column to unit normalized norm;
/// coefficients are returned in the original scaling.
pub fn solve_equilibrated(a: &DesignMatrix, b: &[Complex64], w_min: f64) -> Result<LsqSolution> {
    let mut scaled = a.clone();
    let rows = a.rows() as f64;
    let mut scales = Vec::with_capacity(a.cols());
    for j in 0..a.cols() {
        let n = (a.col(j).iter().map(|v| v.norm_sqr()).sum::<f64>() / rows).sqrt();
        let s = if n > 0.0 && n.is_finite() { 1.0 / n } else { 1.0 };
        for v in scaled.col_mut(j) {
            *v *= s;
        }
        scales.push(s);
    }
    let mut sol = solve_cutoff(&scaled, b, w_min)?;
    for (c, s) in sol.coeffs.iter_mut().zip(&scales) {
        *c *= s;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DesignMatrix {
        DesignMatrix::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        (0..n).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    }

    fn reconstruction_error(a: &DesignMatrix, s: &Svd) -> f64 {
        let mut err = 0.0;
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let mut z = c(0.0, 0.0);
                for n in 0..s.w.len() {
                    z += s.u.get(i, n) * s.w[n] * s.v.get(j, n).conj();
                }
                err += (z - a.get(i, j)).norm_sqr();
            }
        }
        err.sqrt() / a.frobenius()
    }

    #[test]
    fn normalized_norm_examples() {
        assert_eq!(normalized_norm(&[c(1.0, 0.0); 4]).unwrap(), 1.0);
        assert_eq!(normalized_norm(&[c(0.0, 0.0); 3]).unwrap(), 0.0);
        assert!(normalized_norm(&[]).is_err());
        let u0: Vec<Complex64> = (0..50).map(|i| Complex64::from_polar(1.0, i as f64 * 0.37)).collect();
        assert!((normalized_norm(&u0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn svd_reconstructs_and_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (m, n) in [(40, 10), (10, 10), (7, 12), (120, 35), (1, 1), (5, 1)] {
            let a = random_matrix(m, n, &mut rng);
            let s = Svd::compute(&a).unwrap();
            assert!(reconstruction_error(&a, &s) < 1e-13, "{m}x{n}");
            assert!(s.w.windows(2).all(|p| p[0] >= p[1]));
            for p in 0..s.w.len() {
                for q in 0..s.w.len() {
                    let want = if p == q { 1.0 } else { 0.0 };
                    assert!((inner(s.u.col(p), s.u.col(q)) - want).norm() < 1e-10, "{m}x{n} u {p} {q} {}", inner(s.u.col(p), s.u.col(q)));
                    assert!((inner(s.v.col(p), s.v.col(q)) - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn svd_matches_known_spectrum() {
        // diag(3, 2, 1) embedded with a unitary phase pattern.
        let a = DesignMatrix::from_fn(4, 3, |i, j| {
            if i == j {
                Complex64::from_polar([3.0, 2.0, 1.0][i], 0.3 * i as f64)
            } else {
                c(0.0, 0.0)
            }
        });
        let s = Svd::compute(&a).unwrap();
        for (w, want) in s.w.iter().zip([3.0, 2.0, 1.0]) {
            assert!((w - want).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_single_column() {
        let b = vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.3, -0.7)];
        let a = DesignMatrix::from_columns(3, vec![b.iter().map(|z| -z).collect()]).unwrap();
        let sol = solve_cutoff(&a, &b, 1e-14).unwrap();
        assert!((sol.coeffs[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!(sol.r_min < 1e-15);
        assert_eq!(sol.kept_rank, 1);
    }

    #[test]
    fn duplicate_columns_drop_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base = random_matrix(30, 4, &mut rng);
        let b = random_vec(30, &mut rng);
        let mut cols: Vec<Vec<Complex64>> = (0..4).map(|j| base.col(j).to_vec()).collect();
        cols.push(base.col(2).to_vec());
        let dup = DesignMatrix::from_columns(30, cols).unwrap();
        let s1 = solve_cutoff(&base, &b, 1e-10).unwrap();
        let s2 = solve_cutoff(&dup, &b, 1e-10).unwrap();
        assert_eq!(s1.kept_rank, 4);
        assert_eq!(s2.kept_rank, 4);
        assert!((s1.r_min - s2.r_min).abs() < 1e-12);
        assert!(s2.singular_values[4] < 1e-12);
    }

    #[test]
    fn recovers_forward_generated_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(40, 10, &mut rng);
        let truth = random_vec(10, &mut rng);
        let b: Vec<Complex64> = a.mul_vec(&truth).iter().map(|z| -z).collect();
        let sol = solve_cutoff(&a, &b, 1e-12).unwrap();
        for (x, y) in sol.coeffs.iter().zip(&truth) {
            assert!((x - y).norm() < 1e-8);
        }
        assert!(sol.r_min <= 1e-10);
    }

    #[test]
    fn residual_formula_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(25, 6, &mut rng);
        let b = random_vec(25, &mut rng);
        let sol = solve_cutoff(&a, &b, 1e-12).unwrap();
        let s = Svd::compute(&a).unwrap();
        let bb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        let proj: f64 = (0..6).map(|n| inner(s.u.col(n), &b).norm_sqr()).sum();
        let formula = ((bb - proj) / 25.0).sqrt();
        assert!((formula - sol.r_min).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        let b = vec![c(1.0, 0.0); 4];
        let empty = DesignMatrix::zeros(4, 0);
        let sol = solve_cutoff(&empty, &b, 1e-12).unwrap();
        assert_eq!(sol.r_min, 1.0);
        let zero = DesignMatrix::zeros(4, 2);
        let sol = solve_cutoff(&zero, &b, 1e-12).unwrap();
        assert_eq!(sol.kept_rank, 0);
        assert_eq!(sol.r_min, 1.0);
        assert!(sol.coeffs.iter().all(|z| z.norm() == 0.0));
        assert!(solve_cutoff(&zero, &b, 0.0).is_err());
        assert!(solve_cutoff(&zero, &b[..3], 1e-3).is_err());
        let mut bad = DesignMatrix::zeros(2, 1);
        bad.set(0, 0, c(f64::NAN, 0.0));
        assert!(matches!(solve_cutoff(&bad, &b[..2], 1e-3), Err(MrcError::Numerical(_))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn residual_is_optimal(seed in any::<u64>(), m in 6usize..40, n in 1usize..6, scale in 1e-6..1e-2f64) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_matrix(m, n, &mut rng);
                let b = random_vec(m, &mut rng);
                let sol = solve_cutoff(&a, &b, 1e-12).unwrap();
                let direct = {
                    let mut r = a.mul_vec(&sol.coeffs);
                    for (x, y) in r.iter_mut().zip(&b) { *x += y; }
                    normalized_norm(&r).unwrap()
                };
                prop_assert!((direct - sol.r_min).abs() < 1e-10);
                let delta = random_vec(n, &mut rng);
                let perturbed: Vec<Complex64> = sol.coeffs.iter().zip(&delta).map(|(c, d)| c + d * scale).collect();
                let mut r = a.mul_vec(&perturbed);
                for (x, y) in r.iter_mut().zip(&b) { *x += y; }
                prop_assert!(normalized_norm(&r).unwrap() >= sol.r_min - 1e-12);
            }

            #[test]
            fn cutoff_is_monotone(seed in any::<u64>(), m in 8usize..30, n in 2usize..8) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                // Graded columns so cutoffs bite at different ranks.
                let a = DesignMatrix::from_fn(m, n, |_, j| {
                    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 10f64.powi(-(j as i32))
                });
                let b = random_vec(m, &mut rng);
                let mut last = f64::INFINITY;
                for w_min in [1e1, 1e0, 1e-1, 1e-2, 1e-3, 1e-5, 1e-8, 1e-12] {
                    let r = solve_cutoff(&a, &b, w_min).unwrap().r_min;
                    prop_assert!(r <= last + 1e-12);
                    last = r;
                }
            }
        }
    }
}

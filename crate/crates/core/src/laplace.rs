//! Exterior Dirichlet problem for the Laplace equation in 3D.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{config, MrcError, Result};
use crate::geometry::{Boundary3D, Obstacle, Point3};
use crate::lsq::{solve_equilibrated, DesignMatrix};
use crate::specfun::{sph_count, sph_harmonics_into, MultiIndex3D};

/// Largest degree tried by [`static_mrc`].
pub const STATIC_L_MAX: usize = 20;

/// Dirichlet data on the obstacle surface.
#[derive(Debug, Clone, PartialEq)]
pub enum StaticData {
    /// Trace of the exterior harmonic `H_lm`.
    Harmonic(MultiIndex3D),
    /// Trace of `1 / |x - q|` for an interior charge `q`.
    PointCharge(Point3),
    Constant(Complex64),
}

impl StaticData {
    pub fn eval(&self, x: &Point3) -> Result<Complex64> {
        match self {
            StaticData::Harmonic(idx) => crate::specfun::harmonic_exterior(*idx, x),
            StaticData::PointCharge(q) => {
                let r = crate::geometry::dist(x, q);
                if r == 0.0 {
                    return Err(MrcError::Singularity("point charge evaluated at its location".into()));
                }
                Ok(Complex64::new(1.0 / r, 0.0))
            }
            StaticData::Constant(c) => Ok(*c),
        }
    }
}

impl fmt::Display for StaticData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StaticData::Harmonic(idx) => write!(f, "spherical-harmonic:{},{}", idx.ell, idx.m),
            StaticData::PointCharge(q) => write!(f, "point-charge:{},{},{}", q[0], q[1], q[2]),
            StaticData::Constant(c) if c.im == 0.0 && c.re == 1.0 => f.write_str("constant"),
            StaticData::Constant(c) => write!(f, "constant:{}", c.re),
        }
    }
}

impl FromStr for StaticData {
    type Err = MrcError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| MrcError::Parse(format!("bad number '{t}' in '{s}'"))))
                .collect()
        };
        match kind {
            "spherical-harmonic" | "harmonic" => {
                let v = nums()?;
                if v.len() != 2 || v[0] < 0.0 || v[0].fract() != 0.0 || v[1].fract() != 0.0 {
                    return Err(MrcError::Parse(format!("expected spherical-harmonic:l,m, got '{s}'")));
                }
                Ok(StaticData::Harmonic(MultiIndex3D::new(v[0] as u32, v[1] as i32)?))
            }
            "point-charge" => {
                let v = nums()?;
                if v.len() != 3 {
                    return Err(MrcError::Parse(format!("expected point-charge:x,y,z, got '{s}'")));
                }
                Ok(StaticData::PointCharge([v[0], v[1], v[2]]))
            }
            "constant" if args.is_empty() => Ok(StaticData::Constant(Complex64::new(1.0, 0.0))),
            "constant" => {
                let v = nums()?;
                if v.len() != 1 {
                    return Err(MrcError::Parse(format!("expected constant:value, got '{s}'")));
                }
                Ok(StaticData::Constant(Complex64::new(v[0], 0.0)))
            }
            _ => Err(MrcError::Parse(format!("unknown boundary data '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaticProblem {
    pub boundary: Boundary3D,
    pub data: StaticData,
    /// Starting degree of the escalation.
    pub l_start: usize,
}

impl StaticProblem {
    pub fn new(boundary: Boundary3D, data: StaticData) -> Result<Self> {
        if !boundary.contains(&[0.0; 3]) {
            return config(format!("the origin must lie inside {boundary}"));
        }
        if let StaticData::PointCharge(q) = &data {
            if !boundary.contains(q) {
                return config(format!("point charge {q:?} must lie inside {boundary}"));
            }
        }
        Ok(Self { boundary, data, l_start: 2 })
    }

    pub fn with_l_start(mut self, l: usize) -> Self {
        self.l_start = l;
        self
    }
}

/// Harmonic expansion `sum c_lm H_lm` of the exterior potential.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticReport {
    pub boundary: Boundary3D,
    pub l_max: usize,
    /// Packed `(l, m)` coefficients.
    pub coeffs: Vec<Complex64>,
    pub r_min: f64,
    pub converged: bool,
    /// Residual at each degree tried, starting from `l_start`.
    pub history: Vec<f64>,
}

impl StaticReport {
    pub fn coeff(&self, ell: u32, m: i32) -> Result<Complex64> {
        let idx = MultiIndex3D::new(ell, m)?;
        Ok(self.coeffs.get(idx.packed()).copied().unwrap_or_default())
    }

    /// Potential at an exterior point.
    pub fn eval(&self, x: &Point3) -> Result<Complex64> {
        if self.boundary.contains(x) {
            return Err(MrcError::Domain(format!("{x:?} lies inside {}", self.boundary)));
        }
        eval_potential(&self.coeffs, x)
    }
}

fn harmonics_row(l_max: usize, x: &Point3, out: &mut [Complex64]) {
    let r = crate::geometry::norm(x);
    let dir = [x[0] / r, x[1] / r, x[2] / r];
    sph_harmonics_into(l_max, &dir, out);
    let mut scale = 1.0 / r;
    for ell in 0..=l_max {
        for v in &mut out[ell * ell..(ell + 1) * (ell + 1)] {
            *v *= scale;
        }
        scale /= r;
    }
}

/// `sum c_lm H_lm(x)` for packed coefficients.
pub fn eval_potential(coeffs: &[Complex64], x: &Point3) -> Result<Complex64> {
    if coeffs.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let l = (coeffs.len() as f64).sqrt().round() as usize;
    if l * l != coeffs.len() {
        return config(format!("{} coefficients do not fill whole degrees", coeffs.len()));
    }
    if x.iter().all(|v| *v == 0.0) {
        return Err(MrcError::Singularity("exterior harmonic at the origin".into()));
    }
    let mut row = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    harmonics_row(l - 1, x, &mut row);
    Ok(row.iter().zip(coeffs).map(|(a, c)| a * c).sum())
}

/// Fit the data with exterior harmonics, raising the degree from
/// `l_start` until the residual drops below `eps` or [`STATIC_L_MAX`].
pub fn static_mrc(p: &StaticProblem, m_nodes: usize, w_min: f64, eps: f64) -> Result<StaticReport> {
    if sph_count(p.l_start) > m_nodes {
        return config(format!("degree {} needs more than {m_nodes} nodes", p.l_start));
    }
    if !(eps > 0.0) {
        return config(format!("eps must be positive, got {eps}"));
    }
    let nodes = p.boundary.nodes(m_nodes)?;
    let target: Vec<Complex64> = nodes.iter().map(|x| p.data.eval(x).map(|v| -v)).collect::<Result<_>>()?;
    let l_top = STATIC_L_MAX.max(p.l_start);
    let mut full = DesignMatrix::zeros(nodes.len(), sph_count(l_top));
    let mut row = vec![Complex64::new(0.0, 0.0); sph_count(l_top)];
    for (i, x) in nodes.iter().enumerate() {
        harmonics_row(l_top, x, &mut row);
        for (j, v) in row.iter().enumerate() {
            full.set(i, j, *v);
        }
    }
    let mut history = Vec::new();
    let mut best = None;
    for l in p.l_start..=l_top {
        let cols = sph_count(l);
        if cols > m_nodes {
            break;
        }
        let a = DesignMatrix::from_columns(nodes.len(), (0..cols).map(|j| full.col(j).to_vec()).collect())?;
        let sol = solve_equilibrated(&a, &target, w_min)?;
        history.push(sol.r_min);
        let done = sol.r_min <= eps;
        best = Some((l, sol));
        if done {
            break;
        }
    }
    let (l_max, sol) = best.expect("at least one degree fits");
    Ok(StaticReport {
        boundary: p.boundary,
        l_max,
        converged: sol.r_min <= eps,
        r_min: sol.r_min,
        coeffs: sol.coeffs,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn data_parsing_roundtrip() {
        for s in ["spherical-harmonic:3,-2", "point-charge:0.5,0,0", "constant", "constant:2"] {
            let d: StaticData = s.parse().unwrap();
            assert_eq!(d.to_string().parse::<StaticData>().unwrap(), d);
        }
        assert!("spherical-harmonic:1,2".parse::<StaticData>().is_err());
        assert!("point-charge:1,2".parse::<StaticData>().is_err());
        assert!("dipole".parse::<StaticData>().is_err());
    }

    #[test]
    fn potential_basics() {
        let x = [1.0, 2.0, -0.5];
        assert_eq!(eval_potential(&[], &x).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(eval_potential(&vec![Complex64::new(0.0, 0.0); 9], &x).unwrap().norm(), 0.0);
        let mono = [Complex64::new((4.0 * PI).sqrt(), 0.0)];
        let r = crate::geometry::norm(&x);
        assert!((eval_potential(&mono, &x).unwrap().re - 1.0 / r).abs() < 1e-15);
        assert!(matches!(eval_potential(&mono, &[0.0; 3]), Err(MrcError::Singularity(_))));
        assert!(eval_potential(&[Complex64::new(1.0, 0.0); 3], &x).is_err());
    }

    #[test]
    fn harmonic_row_matches_pointwise() {
        let x = [0.3, -1.1, 0.8];
        let mut row = vec![Complex64::new(0.0, 0.0); sph_count(6)];
        harmonics_row(6, &x, &mut row);
        for (j, v) in row.iter().enumerate() {
            let h = crate::specfun::harmonic_exterior(MultiIndex3D::from_packed(j), &x).unwrap();
            assert!((h - v).norm() < 1e-14);
        }
    }

    #[test]
    fn single_harmonic_recovered() {
        let idx = MultiIndex3D::new(1, 0).unwrap();
        let p = StaticProblem::new(Boundary3D::Sphere { a: 2.0 }, StaticData::Harmonic(idx)).unwrap().with_l_start(1);
        let r = static_mrc(&p, 800, 1e-12, 1e-10).unwrap();
        assert!(r.converged && r.r_min <= 1e-10);
        assert_eq!(r.l_max, 1);
        for (j, c) in r.coeffs.iter().enumerate() {
            let want = if j == idx.packed() { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-8, "{j}: {c}");
        }
    }

    #[test]
    fn combination_recovered_exactly() {
        let terms = [((0, 0), 0.5), ((2, -1), -1.5), ((3, 3), 2.0)];
        let coeffs = {
            let mut c = vec![Complex64::new(0.0, 0.0); sph_count(3)];
            for ((l, m), v) in terms {
                c[MultiIndex3D::new(l, m).unwrap().packed()] = Complex64::new(v, 0.3 * v);
            }
            c
        };
        let b = Boundary3D::Ellipsoid { a: 1.5, b: 1.0, c: 0.8 };
        let nodes = b.nodes(800).unwrap();
        let m = DesignMatrix::from_fn(nodes.len(), sph_count(3), |i, j| {
            crate::specfun::harmonic_exterior(MultiIndex3D::from_packed(j), &nodes[i]).unwrap()
        });
        let target: Vec<Complex64> = m.mul_vec(&coeffs).iter().map(|v| -v).collect();
        let sol = solve_equilibrated(&m, &target, 1e-12).unwrap();
        assert!(sol.r_min <= 1e-10);
        for (a, b) in sol.coeffs.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn capacity_potential_of_sphere() {
        let p = StaticProblem::new(Boundary3D::Sphere { a: 1.0 }, StaticData::Constant(Complex64::new(1.0, 0.0))).unwrap();
        let r = static_mrc(&p, 800, 1e-12, 1e-10).unwrap();
        assert!(r.converged);
        assert!((r.coeff(0, 0).unwrap() - (4.0 * PI).sqrt()).norm() < 1e-10);
        let x = [3.0, -2.0, 1.0];
        assert!((r.eval(&x).unwrap().re - 1.0 / crate::geometry::norm(&x)).abs() < 1e-10);
        assert!(r.eval(&[0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn point_charge_in_ellipsoid() {
        let q = [0.5, 0.0, 0.0];
        let b = Boundary3D::Ellipsoid { a: 4.0, b: 1.0, c: 1.0 };
        let p = StaticProblem::new(b, StaticData::PointCharge(q)).unwrap();
        let r = static_mrc(&p, 1800, 1e-12, 1e-4).unwrap();
        assert!(r.converged && r.l_max <= STATIC_L_MAX, "{:?}", r.history);
        for x in [[8.0, 0.0, 0.0], [0.0, 8.0, 0.0], [1.0, 1.0, 1.0]] {
            let x = {
                let n = crate::geometry::norm(&x);
                [8.0 * x[0] / n, 8.0 * x[1] / n, 8.0 * x[2] / n]
            };
            let exact = 1.0 / crate::geometry::dist(&x, &q);
            assert!((r.eval(&x).unwrap().re - exact).abs() <= 1e-3 * exact, "{x:?}");
        }
    }

    #[test]
    fn decays_like_inverse_distance() {
        let p = StaticProblem::new(Boundary3D::Cube { h: 1.0 }, StaticData::Constant(Complex64::new(1.0, 0.0))).unwrap();
        let r = static_mrc(&p, 6 * 100, 1e-12, 1e-3).unwrap();
        let radius = 3f64.sqrt();
        let c = (2.0 * radius) * r.eval(&[2.0 * radius, 0.0, 0.0]).unwrap().norm();
        for s in [2.0, 3.0, 5.0, 10.0, 50.0] {
            for dir in [[1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [0.577, -0.577, 0.577]] {
                let x = dir.map(|v| v * s * radius);
                assert!(r.eval(&x).unwrap().norm() <= 1.5 * c / crate::geometry::norm(&x));
            }
        }
    }

    #[test]
    fn exterior_error_bounded_by_boundary_misfit() {
        let q = [0.2, -0.1, 0.3];
        let b = Boundary3D::Sphere { a: 1.0 };
        let p = StaticProblem::new(b, StaticData::PointCharge(q)).unwrap();
        let r = static_mrc(&p, 800, 1e-12, 1e-6).unwrap();
        assert!(r.converged);
        let misfit = b
            .nodes(800)
            .unwrap()
            .iter()
            .map(|x| (eval_potential(&r.coeffs, x).unwrap().re - 1.0 / crate::geometry::dist(x, &q)).abs())
            .fold(0.0f64, f64::max);
        let test = Boundary3D::Sphere { a: 2.0 }.nodes(800).unwrap();
        let far = test
            .iter()
            .map(|x| (r.eval(x).unwrap().re - 1.0 / crate::geometry::dist(x, &q)).abs())
            .fold(0.0f64, f64::max);
        assert!(far <= misfit + 1e-12, "{far} vs {misfit}");
    }

    #[test]
    fn problem_validation() {
        let one = StaticData::Constant(Complex64::new(1.0, 0.0));
        assert!(StaticProblem::new(Boundary3D::Sphere { a: 1.0 }, StaticData::PointCharge([2.0, 0.0, 0.0])).is_err());
        let p = StaticProblem::new(Boundary3D::Sphere { a: 1.0 }, one).unwrap().with_l_start(10);
        assert!(static_mrc(&p, 50, 1e-12, 1e-6).is_err());
        assert!(static_mrc(&p.clone().with_l_start(2), 200, 1e-12, 0.0).is_err());
    }
}

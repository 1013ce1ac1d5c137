//! Closed-form scattering by a sound-soft disc and the far-field ill-posedness demo.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;

use crate::error::{config, domain, Result};
use crate::geometry::Point2;
use crate::lsq::{solve_cutoff, DesignMatrix};
use crate::specfun::{bessel_jy, psi_2d};

const SERIES_TOL: f64 = 1e-12;

/// Plane wave `exp(ik x.alpha)`, `alpha = (cos beta, sin beta)`, hitting the disc `|x| <= a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleScatterer {
    pub a: f64,
    pub k: f64,
    pub beta: f64,
}

impl CircleScatterer {
    pub fn new(a: f64, k: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return config(format!("radius must be positive, got {a}"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return config(format!("wave number must be positive, got {k}"));
        }
        if !beta.is_finite() {
            return config("incident angle must be finite");
        }
        Ok(Self { a, k, beta })
    }

    pub fn alpha(&self) -> Point2 {
        [self.beta.cos(), self.beta.sin()]
    }

    /// `J_l(ka) / H_l(ka)` for `l = 0..=l_max`; the ratio is even in `l`.
    pub fn coefficients(&self, l_max: usize) -> Vec<Complex64> {
        let (j, y) = bessel_jy(l_max, self.k * self.a).expect("ka is positive");
        j.iter().zip(&y).map(|(&j, &y)| Complex64::new(j, 0.0) / Complex64::new(j, y)).collect()
    }

    /// Smallest order whose far-field coefficient drops below `1e-12`.
    pub fn far_order(&self) -> usize {
        let mut l = 8usize.max((2.0 * self.k * self.a) as usize);
        loop {
            let c = self.coefficients(l);
            if let Some(p) = c.iter().position(|v| v.norm() < SERIES_TOL) {
                return p;
            }
            l *= 2;
        }
    }

    /// Smallest order with `|J_l(ka)| < 1e-12`, enough for the field on and outside the disc.
    pub fn near_order(&self) -> usize {
        let mut l = 8usize.max((2.0 * self.k * self.a) as usize);
        loop {
            let (j, _) = bessel_jy(l, self.k * self.a).expect("ka is positive");
            if let Some(p) = j.iter().position(|v| v.abs() < SERIES_TOL) {
                return p;
            }
            l *= 2;
        }
    }
}

fn far_prefactor(k: f64) -> Complex64 {
    (2.0 / (PI * k)).sqrt() * Complex64::cis(-FRAC_PI_4)
}

/// Scattering amplitude in direction `(cos theta, sin theta)`.
pub fn circle_far_field(c: &CircleScatterer, theta: f64) -> Complex64 {
    let n = c.near_order().max(c.far_order());
    let coef = c.coefficients(n);
    let phi = theta - c.beta;
    let mut s = coef[0];
    for (l, a) in coef.iter().enumerate().skip(1) {
        s += a * (2.0 * (l as f64 * phi).cos());
    }
    -far_prefactor(c.k) * s
}

/// Scattered field at `|x| >= a`, truncated at `l_max` (adaptive when `None`).
pub fn circle_scattered_field(c: &CircleScatterer, x: &Point2, l_max: Option<usize>) -> Result<Complex64> {
    let r = x[0].hypot(x[1]);
    if r < c.a * (1.0 - 1e-12) {
        return domain(format!("{x:?} lies inside the disc of radius {}", c.a));
    }
    let n = l_max.unwrap_or_else(|| c.near_order());
    let coef = c.coefficients(n);
    let (j, y) = bessel_jy(n, c.k * r)?;
    let phi = x[1].atan2(x[0]) - c.beta;
    let mut s = Complex64::new(0.0, 0.0);
    let mut i_pow = Complex64::new(1.0, 0.0);
    for l in 0..=n {
        let h = Complex64::new(j[l], y[l]);
        let term = coef[l] * h * i_pow;
        // i^l H_l e^{il phi} + i^{-l} H_{-l} e^{-il phi} = 2 i^l H_l cos(l phi)
        s += if l == 0 { term } else { term * (2.0 * (l as f64 * phi).cos()) };
        i_pow *= Complex64::i();
    }
    Ok(-s)
}

/// Boundary values of the fitted and exact scattered fields at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearRow {
    pub angle: f64,
    pub fitted: Complex64,
    pub exact: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IllposednessReport {
    /// Far-field misfit, normalized so the constant function has norm one.
    pub r_min_far: f64,
    pub coeffs: Vec<Complex64>,
    pub near_table: Vec<NearRow>,
}

impl IllposednessReport {
    /// Largest `|v_c - v|` over the table.
    pub fn sup_gap(&self) -> f64 {
        self.near_table.iter().map(|r| (r.fitted - r.exact).norm()).fold(0.0, f64::max)
    }
}

pub const NEAR_TABLE_ROWS: usize = 20;

/// Fit the exact far field with multipoles of order `<= l` centred at `x1`
/// and compare the resulting near field with the exact one on the boundary.
pub fn illposedness_demo(c: &CircleScatterer, x1: &Point2, l: usize, m_dirs: usize, w_min: f64) -> Result<IllposednessReport> {
    if x1[0].hypot(x1[1]) >= c.a {
        return domain(format!("expansion centre {x1:?} must lie inside the disc"));
    }
    let cols = 2 * l + 1;
    if m_dirs < cols {
        return config(format!("{m_dirs} directions cannot determine {cols} coefficients"));
    }
    let pre = far_prefactor(c.k);
    let thetas: Vec<f64> = (0..m_dirs).map(|i| TAU * i as f64 / m_dirs as f64).collect();
    let a = DesignMatrix::from_fn(m_dirs, cols, |i, j| {
        let order = j as i32 - l as i32;
        let t = thetas[i];
        let shift = Complex64::cis(-c.k * (t.cos() * x1[0] + t.sin() * x1[1]));
        pre * shift * Complex64::new(0.0, -1.0).powi(order) * Complex64::cis(order as f64 * t)
    });
    let target: Vec<Complex64> = thetas.iter().map(|&t| -circle_far_field(c, t)).collect();
    let sol = solve_cutoff(&a, &target, w_min)?;
    let near_table = (0..NEAR_TABLE_ROWS)
        .map(|i| {
            let angle = TAU * i as f64 / NEAR_TABLE_ROWS as f64;
            let x = [c.a * angle.cos(), c.a * angle.sin()];
            let mut fitted = Complex64::new(0.0, 0.0);
            for (j, cj) in sol.coeffs.iter().enumerate() {
                fitted += cj * psi_2d(j as i32 - l as i32, &x, x1, c.k)?;
            }
            Ok(NearRow { angle, fitted, exact: circle_scattered_field(c, &x, None)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IllposednessReport { r_min_far: sol.r_min, coeffs: sol.coeffs, near_table })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(k: f64) -> CircleScatterer {
        CircleScatterer::new(1.0, k, 0.0).unwrap()
    }

    #[test]
    fn validation() {
        assert!(CircleScatterer::new(0.0, 1.0, 0.0).is_err());
        assert!(CircleScatterer::new(1.0, -1.0, 0.0).is_err());
        assert!(circle_scattered_field(&unit(1.0), &[0.5, 0.0], None).is_err());
        assert!(illposedness_demo(&unit(1.0), &[1.5, 0.0], 5, 120, 1e-12).is_err());
        assert!(illposedness_demo(&unit(1.0), &[0.5, 0.0], 5, 10, 1e-12).is_err());
    }

    #[test]
    fn far_series_order_for_unit_disc() {
        let c = unit(1.0);
        assert!(c.far_order() <= 12);
        assert!(c.coefficients(12)[12].norm() < 1e-12);
    }

    #[test]
    fn far_field_depends_on_relative_angle() {
        let a = CircleScatterer::new(1.0, 2.0, 0.3).unwrap();
        let b = CircleScatterer::new(1.0, 2.0, 1.4).unwrap();
        for t in [0.0, 0.7, 2.9, 5.0] {
            let d = circle_far_field(&a, t) - circle_far_field(&b, t + 1.1);
            assert!(d.norm() < 1e-13);
        }
    }

    #[test]
    fn optical_theorem() {
        for k in [0.5, 1.0, 5.0] {
            let c = unit(k);
            let m = 512;
            let total: f64 = (0..m).map(|i| circle_far_field(&c, TAU * i as f64 / m as f64).norm_sqr()).sum::<f64>()
                * TAU
                / m as f64;
            let forward = circle_far_field(&c, c.beta);
            let extinction = -(8.0 * PI / k).sqrt() * (Complex64::cis(FRAC_PI_4) * forward).re;
            assert!((total - extinction).abs() < 1e-8 * total, "k = {k}: {total} vs {extinction}");
        }
    }

    #[test]
    fn dirichlet_condition_on_boundary() {
        for k in [0.5, 1.0, 5.0, 10.0] {
            let c = CircleScatterer::new(1.0, k, 0.4).unwrap();
            for i in 0..36 {
                let t = TAU * i as f64 / 36.0;
                let x = [t.cos(), t.sin()];
                let v = circle_scattered_field(&c, &x, None).unwrap();
                let u0 = Complex64::cis(k * (x[0] * c.alpha()[0] + x[1] * c.alpha()[1]));
                assert!((v + u0).norm() < 1e-10, "k = {k}, t = {t}");
            }
        }
    }

    #[test]
    fn boundary_values_at_table_angles() {
        let c = unit(1.0);
        let v = circle_scattered_field(&c, &[1.0, 0.0], None).unwrap();
        assert!((v.re + 0.54030).abs() < 5e-6 && (v.im + 0.84147).abs() < 5e-6);
        let v = circle_scattered_field(&c, &[0.0, 1.0], None).unwrap();
        assert!((v.re + 1.0).abs() < 5e-6 && v.im.abs() < 5e-6);
    }

    #[test]
    fn far_field_is_limit_of_near_field() {
        for k in [1.0, 3.0] {
            let c = CircleScatterer::new(1.0, k, 0.2).unwrap();
            let r = 1e4;
            for t in [0.0f64, 1.0, 3.5] {
                let x = [r * t.cos(), r * t.sin()];
                let n = c.far_order() + 5;
                let near = circle_scattered_field(&c, &x, Some(n)).unwrap() * r.sqrt() * Complex64::cis(-k * r);
                let far = circle_far_field(&c, t);
                assert!((near - far).norm() < 1e-3 * far.norm(), "k = {k}, t = {t}");
            }
        }
    }

    #[test]
    fn mislocated_fit_matches_far_field_only() {
        let rep = illposedness_demo(&unit(1.0), &[0.8, 0.0], 5, 120, 1e-12).unwrap();
        assert!(rep.r_min_far <= 5e-4, "{}", rep.r_min_far);
        assert!(rep.sup_gap() > 100.0, "{}", rep.sup_gap());
        let row0 = rep.near_table[0];
        assert!((row0.exact - Complex64::new(-1.0f64.cos(), -1.0f64.sin())).norm() < 1e-8);
    }

    #[test]
    fn centred_fit_reproduces_near_field() {
        let rep = illposedness_demo(&unit(1.0), &[0.0, 0.0], 9, 120, 1e-14).unwrap();
        assert!(rep.sup_gap() < 1e-8, "{}", rep.sup_gap());
    }

    #[test]
    fn near_gap_shrinks_as_centre_approaches_origin() {
        let gaps: Vec<f64> = [0.4, 0.1, 0.01]
            .iter()
            .map(|&s| illposedness_demo(&unit(1.0), &[s, 0.0], 9, 120, 1e-14).unwrap().sup_gap())
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
    }
}

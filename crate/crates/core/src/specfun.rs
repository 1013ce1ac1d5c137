//! Special functions used by the scattering bases.
//!
//! Cylindrical Bessel functions of integer order are evaluated with Miller's
//! downward recurrence for `J` (normalised by `J0 + 2 sum J_2k = 1`) and the
//! Neumann series for `Y0`/`Y1` built from the same `J` sequence; higher `Y`
//! orders follow from upward recurrence, which is stable for `Y`.
//!
//! The outgoing spherical Hankel function uses the normalisation
//! `h_l(x) = i^(l+1) h_l^(1)(x)`, so that `h_l(x) ~ e^{ix}/x` for every `l`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{domain, MrcError, Result};

/// Largest cylindrical order accepted by [`cyl_bessel`].
pub const MAX_CYL_ORDER: u32 = 200;
/// Largest spherical degree accepted by the spherical functions.
pub const MAX_SPH_ORDER: u32 = 100;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J,
    Y,
    H1,
}

/// Degree/order pair of a spherical harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex3D {
    pub ell: u32,
    pub m: i32,
}

impl MultiIndex3D {
    pub fn new(ell: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return domain(format!("|m| = {} exceeds degree {ell}", m.abs()));
        }
        if ell > MAX_SPH_ORDER {
            return Err(MrcError::UnsupportedOrder {
                order: ell as i64,
                limit: MAX_SPH_ORDER as i64,
            });
        }
        Ok(Self { ell, m })
    }

    /// Position in the packed `(l, m)` ordering `l^2 + l + m`.
    pub fn packed(&self) -> usize {
        ((self.ell * self.ell + self.ell) as i64 + self.m as i64) as usize
    }

    pub fn from_packed(idx: usize) -> Self {
        let ell = (idx as f64).sqrt().floor() as u32;
        let m = idx as i64 - (ell * ell + ell) as i64;
        Self { ell, m: m as i32 }
    }
}

/// Number of packed spherical-harmonic indices with degree `<= l_max`.
pub fn sph_count(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

/// Rough `-log10 |J_n(x)|` envelope, valid for `n` above the turning point.
fn envj(n: f64, x: f64) -> f64 {
    0.5 * (TAU * n).log10() - n * (1.36 * x / n).log10()
}

/// Starting order for Miller's recurrence that resolves `J_0..=J_n_max`
/// at argument `x` to full double precision.
fn miller_start(n_max: usize, x: f64) -> usize {
    let base = (n_max as f64).max(x).max(1.0);
    let target = envj(base.max(x + 1.0), x).max(0.0) + 18.0;
    let mut m = base.ceil() as usize + 2;
    while envj(m as f64, x) < target {
        m += 1;
    }
    m + 4 + (m % 2)
}

/// Reusable scratch space for the Bessel sequence routines.
#[derive(Debug, Default, Clone)]
pub struct BesselWork {
    tail: Vec<f64>,
}

/// Fills `j[0..=n]` and `y[0..=n]` with `J_k(x)` and `Y_k(x)`, `n = j.len() - 1`.
pub fn bessel_jy_into(x: f64, j: &mut [f64], y: &mut [f64], work: &mut BesselWork) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("Bessel argument must be positive and finite, got {x}"));
    }
    let n_max = j.len().saturating_sub(1);
    debug_assert_eq!(j.len(), y.len());
    let m = miller_start(n_max, x);
    let f = &mut work.tail;
    f.clear();
    f.resize(m + 2, 0.0);
    f[m] = 1e-30;
    for k in (1..=m).rev() {
        let next = (2.0 * k as f64 / x) * f[k] - f[k + 1];
        f[k - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in f[k - 1..].iter_mut() {
                *v /= RESCALE_ABOVE;
            }
        }
    }
    let mut norm = f[0];
    let mut k = 2;
    while k <= m {
        norm += 2.0 * f[k];
        k += 2;
    }
    for v in f.iter_mut() {
        *v /= norm;
    }

    // Neumann series for Y0 and Y1 in terms of the normalised J sequence.
    let log_term = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut sign = -1.0;
    let mut kk = 1usize;
    while 2 * kk < m {
        let kf = kk as f64;
        s0 += sign * f[2 * kk] / kf;
        s1 += sign * (2.0 * kf + 1.0) / (kf * (kf + 1.0)) * f[2 * kk + 1];
        sign = -sign;
        kk += 1;
    }
    let y0 = 2.0 / PI * (log_term * f[0] - 2.0 * s0);
    let y1 = 2.0 / PI * (log_term * f[1] - f[0] / x - f[1] - s1);

    j.copy_from_slice(&f[..=n_max]);
    y[0] = y0;
    if n_max >= 1 {
        y[1] = y1;
    }
    for n in 1..n_max {
        y[n + 1] = (2.0 * n as f64 / x) * y[n] - y[n - 1];
    }
    Ok(())
}

/// `J_0..=J_n_max` and `Y_0..=Y_n_max` at `x > 0`.
pub fn bessel_jy(n_max: usize, x: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut j = vec![0.0; n_max + 1];
    let mut y = vec![0.0; n_max + 1];
    bessel_jy_into(x, &mut j, &mut y, &mut BesselWork::default())?;
    Ok((j, y))
}

fn check_order(order: i64, limit: u32) -> Result<()> {
    if order.unsigned_abs() > limit as u64 {
        return Err(MrcError::UnsupportedOrder {
            order,
            limit: limit as i64,
        });
    }
    Ok(())
}

/// Cylindrical Bessel `J`, `Y` or Hankel `H^(1) = J + iY` of integer order.
pub fn cyl_bessel(kind: BesselKind, order: i32, x: f64) -> Result<Complex64> {
    check_order(order as i64, MAX_CYL_ORDER)?;
    let n = order.unsigned_abs() as usize;
    let (j, y) = bessel_jy(n, x)?;
    let reflect = if order < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let (jn, yn) = (reflect * j[n], reflect * y[n]);
    let value = match kind {
        BesselKind::J => Complex64::new(jn, 0.0),
        BesselKind::Y => Complex64::new(yn, 0.0),
        BesselKind::H1 => Complex64::new(jn, yn),
    };
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(MrcError::UnsupportedOrder {
            order: order as i64,
            limit: n as i64 - 1,
        });
    }
    Ok(value)
}

/// Outgoing spherical Hankel functions `h_0..=h_l_max` in the `e^{ix}/x` normalisation.
pub fn sph_hankel_out_into(x: f64, out: &mut [Complex64]) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("spherical Hankel argument must be positive, got {x}"));
    }
    if out.is_empty() {
        return Ok(());
    }
    let e = Complex64::from_polar(1.0 / x, x);
    out[0] = e;
    if out.len() > 1 {
        out[1] = e * Complex64::new(1.0, 1.0 / x);
    }
    let i = Complex64::i();
    for l in 1..out.len() - 1 {
        out[l + 1] = i * ((2 * l + 1) as f64 / x) * out[l] + out[l - 1];
    }
    Ok(())
}

/// Outgoing spherical Hankel function, `i^(l+1) h_l^(1)(x)`.
pub fn sph_hankel_out(ell: u32, x: f64) -> Result<Complex64> {
    check_order(ell as i64, MAX_SPH_ORDER)?;
    let mut buf = vec![Complex64::new(0.0, 0.0); ell as usize + 1];
    sph_hankel_out_into(x, &mut buf)?;
    Ok(buf[ell as usize])
}

fn check_unit(dir: &[f64; 3]) -> Result<()> {
    let n2 = dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2];
    if (n2.sqrt() - 1.0).abs() > 1e-12 {
        return domain(format!("direction {dir:?} is not a unit vector"));
    }
    Ok(())
}

/// All orthonormal spherical harmonics `Y_lm(dir)` with `l <= l_max`, in packed order.
///
/// `dir` is assumed to be of unit length; the Condon-Shortley phase is included.
pub fn sph_harmonics_into(l_max: usize, dir: &[f64; 3], out: &mut [Complex64]) {
    debug_assert_eq!(out.len(), sph_count(l_max));
    let [x, y, z] = *dir;
    let rho = (x * x + y * y).sqrt();
    let (cos_t, sin_t) = (z.clamp(-1.0, 1.0), rho);
    let phase = if rho > 0.0 {
        Complex64::new(x / rho, y / rho)
    } else {
        Complex64::new(1.0, 0.0)
    };

    // Normalised associated Legendre functions, one order m at a time.
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    let mut e_im = Complex64::new(1.0, 0.0);
    for m in 0..=l_max {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * sin_t;
            e_im *= phase;
        }
        let cs = if m % 2 == 1 { -1.0 } else { 1.0 };
        let mut store = |l: usize, p: f64| {
            let ylm = e_im * (cs * p);
            let base = l * l + l;
            out[base + m] = ylm;
            if m > 0 {
                out[base - m] = ylm.conj() * cs;
            }
        };
        store(m, pmm);
        if m == l_max {
            break;
        }
        let mut p_prev = pmm;
        let mut p_cur = ((2 * m + 3) as f64).sqrt() * cos_t * pmm;
        store(m + 1, p_cur);
        for l in m + 2..=l_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let p_next = a * (cos_t * p_cur - b * p_prev);
            store(l, p_next);
            p_prev = p_cur;
            p_cur = p_next;
        }
    }
}

/// Orthonormal complex spherical harmonic `Y_lm(dir)`.
pub fn sph_harmonic(idx: MultiIndex3D, dir: &[f64; 3]) -> Result<Complex64> {
    check_unit(dir)?;
    let l = idx.ell as usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); sph_count(l)];
    sph_harmonics_into(l, dir, &mut buf);
    Ok(buf[idx.packed()])
}

fn diff3(x: &[f64; 3], z: &[f64; 3]) -> ([f64; 3], f64) {
    let d = [x[0] - z[0], x[1] - z[1], x[2] - z[2]];
    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    (d, r)
}

/// Outgoing 3D wave `Y_lm((x-z)/|x-z|) h_l(k|x-z|)` centred at `z`.
pub fn psi_3d(idx: MultiIndex3D, x: &[f64; 3], z: &[f64; 3], k: f64) -> Result<Complex64> {
    let (d, r) = diff3(x, z);
    if r == 0.0 {
        return Err(MrcError::Singularity("psi_3d evaluated at its centre".into()));
    }
    let dir = [d[0] / r, d[1] / r, d[2] / r];
    let l = idx.ell as usize;
    let mut ylm = vec![Complex64::new(0.0, 0.0); sph_count(l)];
    sph_harmonics_into(l, &dir, &mut ylm);
    Ok(ylm[idx.packed()] * sph_hankel_out(idx.ell, k * r)?)
}

/// Outgoing 2D wave `H_l^(1)(k|x-xj|) e^{i l theta}` centred at `xj`.
pub fn psi_2d(l: i32, x: &[f64; 2], xj: &[f64; 2], k: f64) -> Result<Complex64> {
    let (dx, dy) = (x[0] - xj[0], x[1] - xj[1]);
    let r = dx.hypot(dy);
    if r == 0.0 {
        return Err(MrcError::Singularity("psi_2d evaluated at its centre".into()));
    }
    let h = cyl_bessel(BesselKind::H1, l, k * r)?;
    Ok(h * Complex64::new(dx / r, dy / r).powi(l))
}

/// Decaying exterior harmonic `Y_lm(x/|x|) / |x|^(l+1)`.
pub fn harmonic_exterior(idx: MultiIndex3D, x: &[f64; 3]) -> Result<Complex64> {
    let (d, r) = diff3(x, &[0.0; 3]);
    if r == 0.0 {
        return Err(MrcError::Singularity("exterior harmonic at the origin".into()));
    }
    let dir = [d[0] / r, d[1] / r, d[2] / r];
    let l = idx.ell as usize;
    let mut ylm = vec![Complex64::new(0.0, 0.0); sph_count(l)];
    sph_harmonics_into(l, &dir, &mut ylm);
    Ok(ylm[idx.packed()] / r.powi(idx.ell as i32 + 1))
}

//! Obstacle boundaries, node sets, and interior sampling.
//!
//! Planar curves are parametrized over `t in [0, 2pi)`; boundary nodes are
//! uniform in `t`. Surfaces use an equal-angle grid (sphere, ellipsoid) or a
//! cell-centre grid on each face (cube).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{config, domain, MrcError, Result};

pub type Point2 = [f64; 2];
pub type Point3 = [f64; 3];

/// Default interior-sampling margin, as a fraction of the shape's extent.
pub const DEFAULT_MARGIN: f64 = 0.05;

const MAX_REJECTIONS: usize = 1_000_000;

pub fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm<const N: usize>(a: &[f64; N]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub<const N: usize>(a: &[f64; N], b: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| a[i] - b[i])
}

pub fn dist<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    norm(&sub(a, b))
}

/// `c + s (p - c)`.
pub fn scale_about<const N: usize>(p: &[f64; N], c: &[f64; N], s: f64) -> [f64; N] {
    std::array::from_fn(|i| c[i] + s * (p[i] - c[i]))
}

/// A point of `R^N`.
pub trait Point: Copy + fmt::Debug + PartialEq + Send + Sync + 'static {
    const DIM: usize;

    fn coords(&self) -> &[f64];

    fn from_fn(f: impl FnMut(usize) -> f64) -> Self;

    fn dot(&self, other: &Self) -> f64 {
        self.coords().iter().zip(other.coords()).map(|(a, b)| a * b).sum()
    }

    fn dist(&self, other: &Self) -> f64 {
        let (a, b) = (self.coords(), other.coords());
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// `c + s (self - c)`.
    fn scale_about(&self, c: &Self, s: f64) -> Self {
        let (p, c) = (self.coords(), c.coords());
        Self::from_fn(|i| c[i] + s * (p[i] - c[i]))
    }
}

impl<const N: usize> Point for [f64; N] {
    const DIM: usize = N;

    fn coords(&self) -> &[f64] {
        self
    }

    fn from_fn(f: impl FnMut(usize) -> f64) -> Self {
        std::array::from_fn(f)
    }
}

/// A bounded obstacle with a Dirichlet boundary.
pub trait Obstacle: fmt::Debug + Send + Sync {
    type Point: Point;

    /// Strict interior test.
    fn contains(&self, p: &Self::Point) -> bool;

    /// Axis-aligned box `(lo, hi)` enclosing the obstacle.
    fn bounding_box(&self) -> (Self::Point, Self::Point);

    /// Reference point for margin shrinking.
    fn center(&self) -> Self::Point;

    fn nodes(&self, m: usize) -> Result<Vec<Self::Point>>;

    /// Whether `p` lies inside the copy of the obstacle shrunk about
    /// [`Obstacle::center`] by the factor `1 - margin`.
    fn contains_with_margin(&self, p: &Self::Point, margin: f64) -> bool {
        if !self.contains(p) {
            return false;
        }
        if margin <= 0.0 {
            return true;
        }
        self.contains(&p.scale_about(&self.center(), 1.0 / (1.0 - margin)))
    }

    /// Bounding-box estimate of the largest distance from the centre to the boundary.
    fn circumradius(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        let c = self.center();
        let (lo, hi, c) = (lo.coords(), hi.coords(), c.coords());
        (0..c.len())
            .map(|i| {
                let d = (hi[i] - c[i]).abs().max((c[i] - lo[i]).abs());
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Closed planar curves of the experiment catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary2D {
    /// `r(t) = (a cos t, b sin t)`.
    Ellipse { a: f64, b: f64 },
    /// `r(t) = (-0.65 + cos t + 0.65 cos 2t, 1.5 sin t)`.
    Kite,
    /// Counter-clockwise vertices around the origin; `r(t)` is the boundary
    /// point in the polar direction `t`.
    Triangle { v: [Point2; 3] },
    Circle { a: f64 },
}

impl Boundary2D {
    /// The catalog triangle with vertices `(-1, 0)` and `(1, +-1)`.
    pub fn unit_triangle() -> Self {
        Boundary2D::Triangle {
            v: [[-1.0, 0.0], [1.0, -1.0], [1.0, 1.0]],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Boundary2D::Ellipse { a, b } => a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite(),
            Boundary2D::Circle { a } => a > 0.0 && a.is_finite(),
            Boundary2D::Kite => true,
            Boundary2D::Triangle { v } => {
                orient(&v[0], &v[1], &v[2]) > 0.0 && (0..3).all(|i| orient(&v[i], &v[(i + 1) % 3], &[0.0, 0.0]) > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            config(format!("degenerate boundary {self}"))
        }
    }

    /// Boundary point at parameter `t` (taken modulo `2pi`).
    pub fn point(&self, t: f64) -> Point2 {
        match *self {
            Boundary2D::Ellipse { a, b } => [a * t.cos(), b * t.sin()],
            Boundary2D::Circle { a } => [a * t.cos(), a * t.sin()],
            Boundary2D::Kite => [
                -0.65 + t.cos() + 0.65 * (2.0 * t).cos(),
                1.5 * t.sin(),
            ],
            Boundary2D::Triangle { v } => {
                let d = [t.cos(), t.sin()];
                let mut reach = f64::INFINITY;
                for i in 0..3 {
                    let (a, b) = (v[i], v[(i + 1) % 3]);
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let den = e[0] * d[1] - e[1] * d[0];
                    if den.abs() < 1e-300 {
                        continue;
                    }
                    let s = (e[0] * a[1] - e[1] * a[0]) / den;
                    let u = (d[0] * a[1] - d[1] * a[0]) / den;
                    if s > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&u) {
                        reach = reach.min(s);
                    }
                }
                [reach * d[0], reach * d[1]]
            }
        }
    }

    /// Implicit-equation residual: zero exactly on the boundary.
    pub fn level(&self, p: &Point2) -> f64 {
        match *self {
            Boundary2D::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) - 1.0,
            Boundary2D::Circle { a } => norm(p) / a - 1.0,
            Boundary2D::Kite => {
                let Some((lo, hi)) = kite_chord(p[1]) else {
                    return p[1].abs() / 1.5 - 1.0;
                };
                -(p[0] - lo).min(hi - p[0])
            }
            Boundary2D::Triangle { v } => {
                let s = (0..3)
                    .map(|i| orient(&v[i], &v[(i + 1) % 3], p) / dist(&v[i], &v[(i + 1) % 3]))
                    .fold(f64::INFINITY, f64::min);
                -s
            }
        }
    }

    /// Sources `scale r(2pi(j-1)/J)` for `j = 1..=J`.
    pub fn scaled_boundary_sources(&self, j: usize, scale: f64) -> Result<Vec<Point2>> {
        self.validate()?;
        if !(scale > 0.0 && scale < 1.0) {
            return config(format!("source scale must lie in (0, 1), got {scale}"));
        }
        let c = self.center();
        let pts: Vec<Point2> = (0..j)
            .map(|i| scale_about(&self.point(TAU * i as f64 / j as f64), &c, scale))
            .collect();
        if let Some(p) = pts.iter().find(|p| !self.contains(p)) {
            return config(format!("scaled source {p:?} is not interior to {self}"));
        }
        Ok(pts)
    }
}

fn orient(a: &Point2, b: &Point2, p: &Point2) -> f64 {
    (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
}

/// Horizontal extent of the kite at height `y`, if the line meets it.
fn kite_chord(y: f64) -> Option<(f64, f64)> {
    let s = y / 1.5;
    if s.abs() >= 1.0 {
        return None;
    }
    let t1 = s.asin();
    let x = |t: f64| -0.65 + t.cos() + 0.65 * (2.0 * t).cos();
    let (a, b) = (x(t1), x(PI - t1));
    Some((a.min(b), a.max(b)))
}

impl Obstacle for Boundary2D {
    type Point = Point2;

    fn contains(&self, p: &Point2) -> bool {
        match *self {
            Boundary2D::Ellipse { a, b } => (p[0] / a).powi(2) + (p[1] / b).powi(2) < 1.0,
            Boundary2D::Circle { a } => dot(p, p) < a * a,
            Boundary2D::Kite => kite_chord(p[1]).is_some_and(|(lo, hi)| p[0] > lo && p[0] < hi),
            Boundary2D::Triangle { v } => (0..3).all(|i| orient(&v[i], &v[(i + 1) % 3], p) > 0.0),
        }
    }

    fn bounding_box(&self) -> (Point2, Point2) {
        match *self {
            Boundary2D::Ellipse { a, b } => ([-a, -b], [a, b]),
            Boundary2D::Circle { a } => ([-a, -a], [a, a]),
            // min x is at cos t = -1/2.6
            Boundary2D::Kite => ([-1.4924, -1.5], [1.0, 1.5]),
            Boundary2D::Triangle { v } => {
                let lo = [0, 1].map(|k| v.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min));
                let hi = [0, 1].map(|k| v.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max));
                (lo, hi)
            }
        }
    }

    fn center(&self) -> Point2 {
        [0.0, 0.0]
    }

    /// `r(t_m)`, `t_m = 2 pi m / M`.
    fn nodes(&self, m: usize) -> Result<Vec<Point2>> {
        self.validate()?;
        if m < 4 {
            return config(format!("a planar boundary needs at least 4 nodes, got {m}"));
        }
        Ok((0..m).map(|i| self.point(TAU * i as f64 / m as f64)).collect())
    }
}

impl fmt::Display for Boundary2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary2D::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            Boundary2D::Circle { a } => write!(f, "circle:{a}"),
            Boundary2D::Kite => write!(f, "kite"),
            Boundary2D::Triangle { v } if *self == Boundary2D::unit_triangle() => {
                let _ = v;
                write!(f, "triangle")
            }
            Boundary2D::Triangle { v } => write!(
                f,
                "triangle:{},{},{},{},{},{}",
                v[0][0], v[0][1], v[1][0], v[1][1], v[2][0], v[2][1]
            ),
        }
    }
}

/// Closed surfaces of the experiment catalog; all contain the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary3D {
    Sphere { a: f64 },
    /// The cube `[-h, h]^3`.
    Cube { h: f64 },
    /// `(x/a)^2 + (y/b)^2 + (z/c)^2 = 1`.
    Ellipsoid { a: f64, b: f64, c: f64 },
}

impl Boundary3D {
    fn semi_axes(&self) -> [f64; 3] {
        match *self {
            Boundary3D::Sphere { a } => [a; 3],
            Boundary3D::Cube { h } => [h; 3],
            Boundary3D::Ellipsoid { a, b, c } => [a, b, c],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.semi_axes().iter().all(|s| *s > 0.0 && s.is_finite()) {
            Ok(())
        } else {
            config(format!("degenerate boundary {self}"))
        }
    }

    /// Implicit-equation residual: zero exactly on the surface.
    pub fn level(&self, p: &Point3) -> f64 {
        let s = self.semi_axes();
        match self {
            Boundary3D::Cube { h } => p.iter().fold(0.0f64, |m, x| m.max(x.abs())) / h - 1.0,
            _ => (0..3).map(|i| (p[i] / s[i]).powi(2)).sum::<f64>() - 1.0,
        }
    }
}

/// Splits `m` into `n_theta x n_phi` with `n_phi` as close to `2 n_theta` as possible.
fn angular_grid(m: usize) -> Option<(usize, usize)> {
    (2..=m / 2)
        .filter(|nt| m.is_multiple_of(*nt) && m / nt >= 3)
        .min_by(|&p, &q| {
            let e = |nt: usize| ((m / nt) as f64 - 2.0 * nt as f64).abs();
            e(p).total_cmp(&e(q))
        })
        .map(|nt| (nt, m / nt))
}

impl Obstacle for Boundary3D {
    type Point = Point3;

    fn contains(&self, p: &Point3) -> bool {
        self.level(p) < 0.0
    }

    fn bounding_box(&self) -> (Point3, Point3) {
        let s = self.semi_axes();
        (s.map(|v| -v), s)
    }

    fn center(&self) -> Point3 {
        [0.0; 3]
    }

    fn nodes(&self, m: usize) -> Result<Vec<Point3>> {
        self.validate()?;
        match *self {
            Boundary3D::Cube { h } => {
                let per_face = m / 6;
                let n = (per_face as f64).sqrt().round() as usize;
                if !m.is_multiple_of(6) || n * n != per_face || n == 0 {
                    return config(format!(
                        "cube nodes must be 6 n^2, got {m}"
                    ));
                }
                let mut out = Vec::with_capacity(m);
                let cell = |i: usize| h * (-1.0 + (2.0 * i as f64 + 1.0) / n as f64);
                for axis in 0..3 {
                    for side in [-h, h] {
                        for i in 0..n {
                            for j in 0..n {
                                let mut p = [0.0; 3];
                                p[axis] = side;
                                p[(axis + 1) % 3] = cell(i);
                                p[(axis + 2) % 3] = cell(j);
                                out.push(p);
                            }
                        }
                    }
                }
                Ok(out)
            }
            _ => {
                let Some((nt, np)) = angular_grid(m) else {
                    return config(format!("cannot split {m} nodes into an angular grid"));
                };
                let s = self.semi_axes();
                let mut out = Vec::with_capacity(m);
                for i in 0..nt {
                    let theta = PI * (i as f64 + 0.5) / nt as f64;
                    let (st, ct) = theta.sin_cos();
                    for j in 0..np {
                        let (sp, cp) = (TAU * j as f64 / np as f64).sin_cos();
                        out.push([s[0] * st * cp, s[1] * st * sp, s[2] * ct]);
                    }
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for Boundary3D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary3D::Sphere { a } => write!(f, "sphere:{a}"),
            Boundary3D::Cube { h } => write!(f, "cube:{h}"),
            Boundary3D::Ellipsoid { a, b, c } => write!(f, "ellipsoid:{a},{b},{c}"),
        }
    }
}

/// Unit direction from spherical angles: `theta` azimuthal, `phi` polar.
pub fn direction_3d(theta: f64, phi: f64) -> Point3 {
    [phi.sin() * theta.cos(), phi.sin() * theta.sin(), phi.cos()]
}

pub fn direction_2d(angle: f64) -> Point2 {
    [angle.cos(), angle.sin()]
}

/// Draws `j` points uniformly from the interior of `b` shrunk by `margin`,
/// by rejection from the bounding box.
pub fn sample_interior<B, R>(b: &B, j: usize, margin: f64, rng: &mut R) -> Result<Vec<B::Point>>
where
    B: Obstacle + ?Sized,
    R: Rng + ?Sized,
{
    if !(0.0..1.0).contains(&margin) {
        return domain(format!("margin must lie in [0, 1), got {margin}"));
    }
    let (lo, hi) = b.bounding_box();
    let mut out = Vec::with_capacity(j);
    let mut misses = 0usize;
    while out.len() < j {
        let p = B::Point::from_fn(|i| rng.random_range(lo.coords()[i]..hi.coords()[i]));
        if b.contains_with_margin(&p, margin) {
            out.push(p);
            misses = 0;
        } else {
            misses += 1;
            if misses >= MAX_REJECTIONS {
                return Err(MrcError::Sampling(format!(
                    "{MAX_REJECTIONS} consecutive rejections sampling {b:?}"
                )));
            }
        }
    }
    Ok(out)
}

/// How random interior sources are distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SourceSampling {
    /// Uniform in the margin-shrunk interior.
    #[default]
    Uniform,
    /// A uniform interior point pulled toward the centre by a uniform random
    /// factor, so every depth is equally likely.
    Radial,
}

impl fmt::Display for SourceSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceSampling::Uniform => "uniform",
            SourceSampling::Radial => "radial",
        })
    }
}

impl FromStr for SourceSampling {
    type Err = MrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(SourceSampling::Uniform),
            "radial" => Ok(SourceSampling::Radial),
            _ => Err(MrcError::Parse(format!("unknown source sampling '{s}'"))),
        }
    }
}

/// Draws `j` interior source points with the given distribution.
pub fn sample_sources<B, R>(
    b: &B,
    j: usize,
    margin: f64,
    sampling: SourceSampling,
    rng: &mut R,
) -> Result<Vec<B::Point>>
where
    B: Obstacle + ?Sized,
    R: Rng + ?Sized,
{
    let mut pts = sample_interior(b, j, margin, rng)?;
    if sampling == SourceSampling::Radial {
        let c = b.center();
        for p in pts.iter_mut() {
            let s: f64 = rng.random_range(0.0..1.0);
            *p = p.scale_about(&c, s);
        }
    }
    Ok(pts)
}

/// Grating profiles over one period `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PeriodicProfile {
    /// `f(x) = sin 2x`.
    I,
    /// `f(x) = sin 0.2x`.
    II,
    /// Tent: `f(x) = x` up to `L/2`, then `L - x`.
    III,
    /// Sawtooth `f(x) = x` with a vertical wall at `x = L`.
    IV,
}

impl PeriodicProfile {
    pub const ALL: [PeriodicProfile; 4] = [Self::I, Self::II, Self::III, Self::IV];
    pub const PERIOD: f64 = PI;

    pub fn height(&self, x: f64) -> f64 {
        let l = Self::PERIOD;
        match self {
            Self::I => (2.0 * x).sin(),
            Self::II => (0.2 * x).sin(),
            Self::III => {
                if x <= l / 2.0 {
                    x
                } else {
                    l - x
                }
            }
            Self::IV => x,
        }
    }

    /// Boundary nodes and the poles placed below them.
    ///
    /// Profiles I-III put node `i` at `(iL/N, f(iL/N))`; profile IV puts half
    /// the nodes on the slant and half on the wall `x = L`. Pole `m` is node
    /// `4m` shifted by `(0, -0.1)` (I-III) or `(-0.03, -0.05)` (IV).
    pub fn nodes_and_poles(&self, n: usize, m: usize) -> Result<(Vec<Point2>, Vec<Point2>)> {
        if m == 0 || n != 4 * m {
            return config(format!("profile nodes must be 4 x poles, got N = {n}, M = {m}"));
        }
        let l = Self::PERIOD;
        let nodes: Vec<Point2> = match self {
            Self::IV => (1..=n)
                .map(|i| {
                    if i <= n / 2 {
                        let t = 2.0 * i as f64 * l / n as f64;
                        [t, self.height(t)]
                    } else {
                        [l, self.height(2.0 * (i - n / 2) as f64 * l / n as f64)]
                    }
                })
                .collect(),
            _ => (1..=n)
                .map(|i| {
                    let t = i as f64 * l / n as f64;
                    [t, self.height(t)]
                })
                .collect(),
        };
        let shift = match self {
            Self::IV => [-0.03, -0.05],
            _ => [0.0, -0.1],
        };
        let poles: Vec<Point2> = (1..=m)
            .map(|k| {
                let p = nodes[4 * k - 1];
                [p[0] + shift[0], p[1] + shift[1]]
            })
            .collect();
        for p in &poles {
            if !(p[1] < self.height(p[0].clamp(0.0, l))) {
                return config(format!("pole {p:?} is not below profile {self}"));
            }
        }
        Ok((nodes, poles))
    }
}

impl fmt::Display for PeriodicProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::I => "I",
            Self::II => "II",
            Self::III => "III",
            Self::IV => "IV",
        };
        f.write_str(s)
    }
}

impl FromStr for PeriodicProfile {
    type Err = MrcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Self::I),
            "II" | "2" => Ok(Self::II),
            "III" | "3" => Ok(Self::III),
            "IV" | "4" => Ok(Self::IV),
            _ => Err(MrcError::Parse(format!("unknown profile '{s}'"))),
        }
    }
}

/// Any catalog geometry, addressable by string id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Planar(Boundary2D),
    Solid(Boundary3D),
    Profile(PeriodicProfile),
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Planar(b) => b.fmt(f),
            Shape::Solid(b) => b.fmt(f),
            Shape::Profile(p) => write!(f, "profile:{p}"),
        }
    }
}

fn parse_params(id: &str, args: Option<&str>, count: usize) -> Result<Vec<f64>> {
    let Some(args) = args else {
        return Err(MrcError::Parse(format!("shape '{id}' needs {count} parameter(s)")));
    };
    let vals = args
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| MrcError::Parse(format!("bad number '{v}' in shape '{id}'")))
        })
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() != count {
        return Err(MrcError::Parse(format!(
            "shape '{id}' takes {count} parameter(s), got {}",
            vals.len()
        )));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(MrcError::Parse(format!("non-finite parameter in shape '{id}'")));
    }
    Ok(vals)
}

impl FromStr for Shape {
    type Err = MrcError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (id, args) = match s.split_once(':') {
            Some((id, args)) => (id, Some(args)),
            None => (s, None),
        };
        let shape = match id.to_ascii_lowercase().as_str() {
            "ellipse" => {
                let v = parse_params(id, args, 2)?;
                Shape::Planar(Boundary2D::Ellipse { a: v[0], b: v[1] })
            }
            "circle" => {
                let a = args.map_or(Ok(vec![1.0]), |_| parse_params(id, args, 1))?[0];
                Shape::Planar(Boundary2D::Circle { a })
            }
            "kite" => Shape::Planar(Boundary2D::Kite),
            "triangle" => match args {
                None => Shape::Planar(Boundary2D::unit_triangle()),
                Some(_) => {
                    let v = parse_params(id, args, 6)?;
                    Shape::Planar(Boundary2D::Triangle {
                        v: [[v[0], v[1]], [v[2], v[3]], [v[4], v[5]]],
                    })
                }
            },
            "sphere" => {
                let a = args.map_or(Ok(vec![1.0]), |_| parse_params(id, args, 1))?[0];
                Shape::Solid(Boundary3D::Sphere { a })
            }
            "cube" => {
                let h = args.map_or(Ok(vec![1.0]), |_| parse_params(id, args, 1))?[0];
                Shape::Solid(Boundary3D::Cube { h })
            }
            "ellipsoid" => {
                let v = parse_params(id, args, 3)?;
                Shape::Solid(Boundary3D::Ellipsoid { a: v[0], b: v[1], c: v[2] })
            }
            "profile" => {
                let p = args.ok_or_else(|| MrcError::Parse("profile needs an id I..IV".into()))?;
                Shape::Profile(p.parse()?)
            }
            _ => return Err(MrcError::Parse(format!("unknown shape '{s}'"))),
        };
        let valid = match shape {
            Shape::Planar(b) => b.validate(),
            Shape::Solid(b) => b.validate(),
            Shape::Profile(_) => Ok(()),
        };
        valid.map_err(|e| MrcError::Parse(e.to_string()))?;
        Ok(shape)
    }
}

/// Azimuthal angle of a planar vector in `(-pi, pi]`.
pub fn polar_angle(p: &Point2) -> f64 {
    p[1].atan2(p[0])
}

//! One named configuration per experiment of the reproduced tables.

use anyhow::{anyhow, Result};

use crate::config::{ExperimentConfig, Settings};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub table: u32,
    pub settings: Settings,
}

impl Preset {
    pub fn config(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_settings(Some(self.name.clone()), &self.settings)
    }
}

struct Obstacle2D {
    tag: &'static str,
    shape: &'static str,
    sources: usize,
    scale: f64,
}

const PLANAR: [Obstacle2D; 4] = [
    Obstacle2D { tag: "ellipse", shape: "ellipse:2,1", sources: 4, scale: 0.7 },
    Obstacle2D { tag: "kite", shape: "kite", sources: 16, scale: 0.9 },
    Obstacle2D { tag: "triangle", shape: "triangle", sources: 16, scale: 0.9 },
    Obstacle2D { tag: "thin-ellipse", shape: "ellipse:0.1,1", sources: 32, scale: 0.95 },
];

const PLANAR_CASES: [(u32, &str, u32); 4] = [(1, "a10", 0), (1, "a01", 90), (5, "a10", 0), (5, "a01", 90)];

/// `(shape tag, shape, nodes, random sampling)` for the 3D obstacles.
const SOLID: [(&str, &str, usize, &str); 3] = [
    ("sphere", "sphere:1", 450, "sampling=radial margin=0.05"),
    ("cube", "cube:1", 1350, "sampling=uniform margin=0"),
    ("ellipsoid", "ellipsoid:4,1,1", 450, "sampling=uniform margin=0.05"),
];

/// `(k, direction)` per 3D row; the sphere rows carry no direction.
const SOLID_CASES: [(u32, u32); 4] = [(1, 1), (1, 2), (5, 1), (5, 2)];

fn polar(dir: u32) -> &'static str {
    if dir == 1 {
        "0,90"
    } else {
        "90,45"
    }
}

/// Residual targets and iteration counts of the random 3D runs, in table order.
const TABLE2: [(f64, usize); 10] = [
    (0.0002, 1),
    (0.001, 700),
    (0.001, 800),
    (0.001, 200),
    (0.0035, 2000),
    (0.002, 2000),
    (0.001, 3600),
    (0.001, 3000),
    (0.0026, 5000),
    (0.001, 5000),
];

const TABLE5: [(&str, [f64; 3]); 4] = [
    ("I", [0.000424, 0.000407, 0.000371]),
    ("II", [0.001491, 0.001815, 0.002089]),
    ("III", [0.009623, 0.011903, 0.013828]),
    ("IV", [0.014398, 0.017648, 0.020451]),
];

const TABLE7: [(u32, usize); 5] = [(1, 2), (2, 2), (3, 5), (3, 10), (3, 20)];

fn push(out: &mut Vec<Preset>, table: u32, name: String, pairs: &str) {
    let settings = Settings::parse_pairs(pairs).expect("preset settings are well-formed");
    out.push(Preset { name, table, settings });
}

fn solid_rows() -> Vec<(String, String)> {
    let mut rows = Vec::new();
    for (tag, shape, nodes, sampling) in SOLID {
        for (k, dir) in SOLID_CASES {
            if tag == "sphere" {
                if dir == 2 {
                    continue;
                }
                rows.push((format!("{tag}-k{k}"), format!("shape={shape} k={k} nodes={nodes} {sampling}")));
            } else {
                rows.push((
                    format!("{tag}-k{k}-dir{dir}"),
                    format!("shape={shape} k={k} alpha-polar={} nodes={nodes} {sampling}", polar(dir)),
                ));
            }
        }
    }
    rows
}

/// Every preset, grouped by table.
pub fn presets() -> Vec<Preset> {
    let mut out = Vec::new();
    for o in &PLANAR {
        for (k, a, deg) in PLANAR_CASES {
            push(
                &mut out,
                1,
                format!("table1-{}-k{k}-{a}", o.tag),
                &format!(
                    "solver=random shape={} k={k} alpha-deg={deg} L=5 J=1 nodes=720 eps=1e-4 nmax=6000 wmin=1e-12 warm={} scale={}",
                    o.shape, o.sources, o.scale
                ),
            );
        }
    }
    for o in &PLANAR {
        for (k, a, deg) in PLANAR_CASES {
            push(
                &mut out,
                1,
                format!("table1-old-{}-k{k}-{a}", o.tag),
                &format!(
                    "solver=multipoint shape={} k={k} alpha-deg={deg} L=5 J={} scale={} nodes=720 eps=1e-4 wmin=1e-12",
                    o.shape, o.sources, o.scale
                ),
            );
        }
    }
    for ((name, row), (eps, iters)) in solid_rows().into_iter().zip(TABLE2) {
        push(
            &mut out,
            2,
            format!("table2-{name}"),
            &format!("solver=random {row} L=0 J=80 wmin=1e-12 eps={eps} nmax={}", (2 * iters).max(5)),
        );
    }
    for o in &PLANAR {
        for (k, a, deg) in PLANAR_CASES {
            push(
                &mut out,
                3,
                format!("table3-{}-k{k}-{a}", o.tag),
                &format!("solver=optimal shape={} k={k} alpha-deg={deg} L=5 nodes=720 eps=0.002 nmax=100 wmin=1e-12", o.shape),
            );
        }
    }
    for k in [1, 5] {
        push(
            &mut out,
            3,
            format!("table3-circle-k{k}-a10"),
            &format!("solver=optimal shape=circle:1 k={k} alpha-deg=0 L=5 nodes=720 eps=0.002 nmax=100 wmin=1e-12"),
        );
    }
    for (name, row) in solid_rows() {
        push(
            &mut out,
            4,
            format!("table4-{name}"),
            &format!(
                "solver=optimal {row} L={} eps=0.002 nmax=100 wmin=1e-12 margin=0.05 sampling=uniform",
                if name.starts_with("cube") { 6 } else { 5 }
            ),
        );
    }
    for (profile, printed) in TABLE5 {
        for (deg, r) in [45, 60, 90].into_iter().zip(printed) {
            push(
                &mut out,
                5,
                format!("table5-profile{profile}-theta{deg}"),
                &format!(
                    "solver=periodic shape=profile:{profile} k=1 alpha-deg={deg} nodes=256 poles=64 wmin=1e-8 b=1.2 jmax=120 eps={}",
                    2.0 * r
                ),
            );
        }
    }
    push(
        &mut out,
        6,
        "table6-illposed".into(),
        "solver=illposed-demo shape=circle:1 k=1 alpha-deg=0 L=5 x1=0.8,0 dirs=120 wmin=1e-12 eps=5e-4",
    );
    for (f, n) in TABLE7 {
        push(
            &mut out,
            7,
            format!("table7-fn{f}-n{n}"),
            &format!("solver=minimize fn={f} dim={n} repeat=20 seed=1"),
        );
    }
    out
}

pub fn find(name: &str) -> Result<Preset> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| anyhow!("unknown preset '{name}' (see `mrc presets`)"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalog() {
        let all = presets();
        assert!(all.len() >= 40);
        let names: HashSet<_> = all.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names.len(), all.len());
        for n in ["table5-profileI-theta45", "table2-cube-k5-dir1", "table1-ellipse-k1-a10", "table6-illposed"] {
            assert!(names.contains(n), "{n}");
        }
        for t in 1..=7 {
            assert!(all.iter().any(|p| p.table == t), "table {t}");
        }
    }

    #[test]
    fn every_preset_is_valid() {
        for p in presets() {
            p.config().unwrap_or_else(|e| panic!("{}: {e}", p.name));
        }
    }
}

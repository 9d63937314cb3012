//! Independent reference computations used by the integration and acceptance tests.
//!
//! Everything here works on matrices of size at most 2 with closed-form
//! eigenvalues, and on explicit grids, so it shares no numerics with the library.

#![allow(dead_code)]

use blockent::linalg::{c64, CMat};
use blockent::spec_file::{ConditionalSpec, ConstraintSpecFile, MarginalSpec};
use blockent::BlockState;

pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

pub fn fixture_path(name: &str) -> String {
    format!("{FIXTURE_DIR}/{name}.json")
}

pub fn raw_fixture(name: &str) -> ConstraintSpecFile {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Eigenvalues of a Hermitian matrix of size 1 or 2.
pub fn small_eigenvalues(m: &CMat) -> Vec<f64> {
    match m.nrows() {
        1 => vec![m[(0, 0)].re],
        2 => {
            let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            let mean = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            vec![mean + rad, mean - rad]
        }
        n => panic!("oracle only handles dimension ≤ 2, got {n}"),
    }
}

pub fn small_trace_norm(m: &CMat) -> f64 {
    small_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

pub fn small_entropy(m: &CMat) -> f64 {
    shannon(&small_eigenvalues(m).iter().map(|&x| x.max(0.0)).collect::<Vec<_>>())
}

/// Pure qubit states on a Bloch-sphere grid with the given angular step in degrees.
pub fn bloch_grid(step_deg: f64) -> Vec<CMat> {
    let n_theta = (180.0 / step_deg).round() as usize;
    let n_phi = (360.0 / step_deg).round() as usize;
    let mut out = Vec::new();
    for i in 0..=n_theta {
        let theta = (i as f64 * step_deg).to_radians();
        let phis = if i == 0 || i == n_theta { 1 } else { n_phi };
        for j in 0..phis {
            let phi = (j as f64 * step_deg).to_radians();
            let (x, y, z) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
            out.push(CMat::from_row_slice(
                2,
                2,
                &[c64(0.5 * (1.0 + z), 0.0), c64(0.5 * x, -0.5 * y), c64(0.5 * x, 0.5 * y), c64(0.5 * (1.0 - z), 0.0)],
            ));
        }
    }
    out
}

/// All barycentric weight vectors over `k` points with step `1/n`.
pub fn barycentric_grid(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(k: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(k - 1, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, n, &mut Vec::new(), &mut out);
    out
}

fn spec_matrix(m: &[Vec<[f64; 2]>]) -> CMat {
    let n = m.len();
    CMat::from_fn(n, n, |i, j| c64(m[i][j][0], m[i][j][1]))
}

/// Marginal vertices exactly as written in the file, redundant ones included.
pub fn raw_vertices(spec: &ConstraintSpecFile) -> Vec<Vec<f64>> {
    let r = spec.blocks.len();
    match &spec.marginal {
        MarginalSpec::Simplex => (0..r).map(|k| (0..r).map(|i| if i == k { 1.0 } else { 0.0 }).collect()).collect(),
        MarginalSpec::Singleton { q } => vec![q.clone()],
        MarginalSpec::Vertices { vertices } => vertices.clone(),
    }
}

/// Minimum-entropy elements of one conditional set, found by grid search.
pub struct OracleBlock {
    pub min_entropy: f64,
    pub minimizers: Vec<CMat>,
}

pub fn oracle_block(c: &ConditionalSpec, dim: usize, bloch_step_deg: f64) -> OracleBlock {
    match c {
        ConditionalSpec::Full if dim == 1 => OracleBlock {
            min_entropy: 0.0,
            minimizers: vec![CMat::from_element(1, 1, c64(1.0, 0.0))],
        },
        ConditionalSpec::Full => {
            assert_eq!(dim, 2, "oracle only handles dimension ≤ 2");
            OracleBlock {
                min_entropy: 0.0,
                minimizers: bloch_grid(bloch_step_deg),
            }
        }
        ConditionalSpec::Fixed { matrix } => {
            let m = spec_matrix(matrix);
            OracleBlock {
                min_entropy: small_entropy(&m),
                minimizers: vec![m],
            }
        }
        ConditionalSpec::Hull { matrices } => {
            let gens: Vec<CMat> = matrices.iter().map(|m| spec_matrix(m)).collect();
            let n = 20;
            let points: Vec<(f64, CMat)> = barycentric_grid(gens.len(), n)
                .into_iter()
                .map(|w| {
                    let m = gens
                        .iter()
                        .zip(&w)
                        .fold(CMat::zeros(dim, dim), |acc, (g, &k)| acc + g * c64(k as f64 / n as f64, 0.0));
                    (small_entropy(&m), m)
                })
                .collect();
            let min_entropy = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
            OracleBlock {
                min_entropy,
                minimizers: points.into_iter().filter(|p| p.0 <= min_entropy + 1e-9).map(|p| p.1).collect(),
            }
        }
    }
}

pub struct OracleMinimizers {
    pub s_min: f64,
    pub marginals: Vec<Vec<f64>>,
    pub blocks: Vec<OracleBlock>,
}

/// Brute-force minimizer set: a barycentric grid over the raw marginal vertices
/// with step `marginal_step`, and grid-searched block minimizers.
pub fn oracle_minimizers(spec: &ConstraintSpecFile, marginal_step: f64, bloch_step_deg: f64) -> OracleMinimizers {
    let blocks: Vec<OracleBlock> = spec
        .conditionals
        .iter()
        .zip(&spec.blocks)
        .map(|(c, &d)| oracle_block(c, d, bloch_step_deg))
        .collect();
    let verts = raw_vertices(spec);
    let r = spec.blocks.len();
    let n = (1.0 / marginal_step).round() as usize;
    let grid = if verts.len() == 1 { vec![vec![n]] } else { barycentric_grid(verts.len(), n) };
    let scored: Vec<(f64, Vec<f64>)> = grid
        .into_iter()
        .map(|w| {
            let p: Vec<f64> = (0..r)
                .map(|i| verts.iter().zip(&w).map(|(v, &k)| v[i] * k as f64 / n as f64).sum())
                .collect();
            let f = shannon(&p) + p.iter().zip(&blocks).map(|(pi, b)| pi * b.min_entropy).sum::<f64>();
            (f, p)
        })
        .collect();
    let s_min = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let marginals = scored.into_iter().filter(|s| s.0 <= s_min + 1e-9).map(|s| s.1).collect();
    OracleMinimizers { s_min, marginals, blocks }
}

/// `‖a − t·s‖₁` for matrices of size ≤ 2, without allocating.
pub fn trace_norm_of_difference(a: &CMat, s: &CMat, t: f64) -> f64 {
    if a.nrows() == 1 {
        return (a[(0, 0)].re - t * s[(0, 0)].re).abs();
    }
    let x = a[(0, 0)].re - t * s[(0, 0)].re;
    let y = a[(1, 1)].re - t * s[(1, 1)].re;
    let b = a[(0, 1)] - s[(0, 1)] * t;
    let mean = 0.5 * (x + y);
    let rad = (0.25 * (x - y) * (x - y) + b.norm_sqr()).sqrt();
    (mean + rad).abs() + (mean - rad).abs()
}

/// `min over the oracle minimizer set of Σᵢ ‖pᵢρᵢ − qᵢσᵢ‖₁`.
pub fn oracle_distance(om: &OracleMinimizers, bs: &BlockState) -> f64 {
    om.marginals
        .iter()
        .map(|q| {
            om.blocks
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let dim = b.minimizers[0].nrows();
                    let weighted = bs.weighted_block(i);
                    assert_eq!(weighted.nrows(), dim);
                    b.minimizers
                        .iter()
                        .map(|s| trace_norm_of_difference(&weighted, s, q[i]))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

#![allow(dead_code)]

use subeq::solver::{Grid, NodeKind};

/// Lower convex hull of the points (xs[i], ys[i]), xs increasing, evaluated
/// back at every xs[i] (monotone chain).
pub fn lower_hull(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut h: Vec<usize> = Vec::new();
    for i in 0..xs.len() {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (xs[b] - xs[a]) * (ys[i] - ys[a]) - (ys[b] - ys[a]) * (xs[i] - xs[a]);
            if cross <= 0.0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(i);
    }
    let mut out = vec![0.0; xs.len()];
    for w in h.windows(2) {
        for i in w[0]..=w[1] {
            let t = (xs[i] - xs[w[0]]) / (xs[w[1]] - xs[w[0]]);
            out[i] = ys[w[0]] + t * (ys[w[1]] - ys[w[0]]);
        }
    }
    if h.len() == 1 {
        out[h[0]] = ys[h[0]];
    }
    out
}

/// Non-outside nodes of a 1D grid, sorted by coordinate.
pub fn line_nodes(grid: &Grid) -> Vec<(usize, f64)> {
    let mut v: Vec<(usize, f64)> = (0..grid.len())
        .filter(|&i| grid.kind(i) != NodeKind::Outside)
        .map(|i| (i, grid.coords(i)[0]))
        .collect();
    v.sort_by(|a, b| a.1.total_cmp(&b.1));
    v
}

/// sup |u − conv g| over the grid line.
pub fn envelope_error(grid: &Grid, u: &[f64], g: &dyn Fn(f64) -> f64) -> f64 {
    let nodes = line_nodes(grid);
    let xs: Vec<f64> = nodes.iter().map(|n| n.1).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let hull = lower_hull(&xs, &ys);
    nodes
        .iter()
        .zip(&hull)
        .map(|(n, v)| (u[n.0] - v).abs())
        .fold(0.0, f64::max)
}

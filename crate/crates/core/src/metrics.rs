//! Layout quality metrics: crossing count, angular resolution, crossing
//! resolution, and the Procrustes statistic between two layouts.

use nalgebra::Matrix2;
use thiserror::Error;

use crate::graph::Graph;

pub type Coords = [f64; 2];

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("exactly collinear overlapping segments between edges {0:?} and {1:?}")]
    DegenerateGeometry((usize, usize), (usize, usize)),
    #[error("no vertex has two incident edges")]
    NoIncidentPairs,
    #[error("degenerate layout: all points coincident")]
    DegenerateLayout,
}

/// Metric values for one (graph, layout) pair. `cros_res` is `None`
/// exactly when the drawing has no crossings; `ps` is `None` when no
/// reference layout applies.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub nc: usize,
    pub ang_res: Option<f64>,
    pub cros_res: Option<f64>,
    pub ps: Option<f64>,
}

const COLLINEAR_EPS: f64 = 1e-12;

fn orient(a: Coords, b: Coords, c: Coords) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Proper crossing test for open segments. Shared endpoints are the
/// caller's concern; collinear overlap is an error.
fn segments_cross(p1: Coords, p2: Coords, p3: Coords, p4: Coords) -> Result<bool, ()> {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    // scale-aware collinearity threshold
    let scale = (p2[0] - p1[0]).abs()
        + (p2[1] - p1[1]).abs()
        + (p4[0] - p3[0]).abs()
        + (p4[1] - p3[1]).abs();
    let eps = COLLINEAR_EPS * scale.max(1.0);
    if d1.abs() < eps && d2.abs() < eps && d3.abs() < eps && d4.abs() < eps {
        // all four points collinear: error only on positive-length overlap
        let axis = if (p2[0] - p1[0]).abs() > (p2[1] - p1[1]).abs() { 0 } else { 1 };
        let (a1, a2) = (p1[axis].min(p2[axis]), p1[axis].max(p2[axis]));
        let (b1, b2) = (p3[axis].min(p4[axis]), p3[axis].max(p4[axis]));
        if a2.min(b2) - a1.max(b1) > eps {
            return Err(());
        }
        return Ok(false);
    }
    Ok(d1 * d2 < 0.0 && d3 * d4 < 0.0)
}

/// Edge pairs (by edge index) that properly cross in the drawing.
pub fn crossing_pairs(g: &Graph, coords: &[Coords]) -> Result<Vec<(usize, usize)>, MetricError> {
    let edges = g.edges();
    let mut pairs = Vec::new();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (a, b) = (edges[i].u, edges[i].v);
            let (c, d) = (edges[j].u, edges[j].v);
            if a == c || a == d || b == c || b == d {
                continue;
            }
            match segments_cross(coords[a], coords[b], coords[c], coords[d]) {
                Ok(true) => pairs.push((i, j)),
                Ok(false) => {}
                Err(()) => {
                    return Err(MetricError::DegenerateGeometry((a, b), (c, d)));
                }
            }
        }
    }
    Ok(pairs)
}

/// Number of properly crossing edge pairs.
pub fn count_crossings(g: &Graph, coords: &[Coords]) -> Result<usize, MetricError> {
    Ok(crossing_pairs(g, coords)?.len())
}

fn angle_between(u: [f64; 2], v: [f64; 2]) -> f64 {
    let dot = u[0] * v[0] + u[1] * v[1];
    let nu = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let nv = (v[0] * v[0] + v[1] * v[1]).sqrt();
    (dot / (nu * nv)).clamp(-1.0, 1.0).acos()
}

/// Minimum angle between incident edges, normalized by `2π / max degree`.
pub fn angular_resolution(g: &Graph, coords: &[Coords]) -> Result<f64, MetricError> {
    let max_deg = (0..g.n()).map(|v| g.degree(v)).max().unwrap_or(0);
    if max_deg < 2 {
        return Err(MetricError::NoIncidentPairs);
    }
    let mut min_angle = f64::INFINITY;
    for v in 0..g.n() {
        let nbrs = g.neighbors(v);
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                let du = [
                    coords[nbrs[i]][0] - coords[v][0],
                    coords[nbrs[i]][1] - coords[v][1],
                ];
                let dw = [
                    coords[nbrs[j]][0] - coords[v][0],
                    coords[nbrs[j]][1] - coords[v][1],
                ];
                min_angle = min_angle.min(angle_between(du, dw));
            }
        }
    }
    let normalizer = 2.0 * std::f64::consts::PI / max_deg as f64;
    Ok(min_angle / normalizer)
}

/// Minimum acute crossing angle normalized by `π / 2`; `None` for
/// crossing-free drawings.
pub fn crossing_resolution(g: &Graph, coords: &[Coords]) -> Result<Option<f64>, MetricError> {
    let pairs = crossing_pairs(g, coords)?;
    if pairs.is_empty() {
        return Ok(None);
    }
    let edges = g.edges();
    let mut min_angle = f64::INFINITY;
    for (i, j) in pairs {
        let d1 = [
            coords[edges[i].v][0] - coords[edges[i].u][0],
            coords[edges[i].v][1] - coords[edges[i].u][1],
        ];
        let d2 = [
            coords[edges[j].v][0] - coords[edges[j].u][0],
            coords[edges[j].v][1] - coords[edges[j].u][1],
        ];
        let a = angle_between(d1, d2);
        let acute = a.min(std::f64::consts::PI - a);
        min_angle = min_angle.min(acute);
    }
    Ok(Some(min_angle / (std::f64::consts::PI / 2.0)))
}

/// Procrustes statistic: normalized residual after the best similarity
/// transform (rotation, uniform scale, translation, reflection allowed)
/// of `y` onto `x`. 0 means similarity-equivalent, 1 means unrelated.
pub fn procrustes_statistic(x: &[Coords], y: &[Coords]) -> Result<f64, MetricError> {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let cx = [
        x.iter().map(|p| p[0]).sum::<f64>() / n,
        x.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let cy = [
        y.iter().map(|p| p[0]).sum::<f64>() / n,
        y.iter().map(|p| p[1]).sum::<f64>() / n,
    ];
    let mut ssx = 0.0;
    let mut ssy = 0.0;
    let mut a: Matrix2<f64> = Matrix2::zeros();
    for (px, py) in x.iter().zip(y) {
        let dx = [px[0] - cx[0], px[1] - cx[1]];
        let dy = [py[0] - cy[0], py[1] - cy[1]];
        ssx += dx[0] * dx[0] + dx[1] * dx[1];
        ssy += dy[0] * dy[0] + dy[1] * dy[1];
        a[(0, 0)] += dx[0] * dy[0];
        a[(0, 1)] += dx[0] * dy[1];
        a[(1, 0)] += dx[1] * dy[0];
        a[(1, 1)] += dx[1] * dy[1];
    }
    if ssx <= 0.0 || ssy <= 0.0 {
        return Err(MetricError::DegenerateLayout);
    }
    let svd = a.svd(false, false);
    let sigma_sum: f64 = svd.singular_values.iter().sum();
    Ok((1.0 - sigma_sum * sigma_sum / (ssx * ssy)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::gen_grid;
    use crate::graph::Graph;

    fn two_edges() -> Graph {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, 1.0, false).unwrap();
        g.add_edge(2, 3, 1.0, false).unwrap();
        g
    }

    #[test]
    fn x_crossing_counts_once() {
        let g = two_edges();
        let coords = [[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]];
        assert_eq!(count_crossings(&g, &coords).unwrap(), 1);
        assert_eq!(crossing_resolution(&g, &coords).unwrap(), Some(1.0));
    }

    #[test]
    fn lattice_drawing_is_planar() {
        let g = gen_grid(3, 3).unwrap();
        let coords: Vec<Coords> = (0..9).map(|i| [(i % 3) as f64, (i / 3) as f64]).collect();
        assert_eq!(count_crossings(&g, &coords).unwrap(), 0);
        assert_eq!(crossing_resolution(&g, &coords).unwrap(), None);
    }

    #[test]
    fn k4_configurations() {
        let mut g = Graph::new(4);
        for u in 0..4 {
            for v in (u + 1)..4 {
                g.add_edge(u, v, 1.0, false).unwrap();
            }
        }
        // node 3 inside the triangle 0-1-2
        let nested = [[0.0, 0.0], [4.0, 0.0], [2.0, 3.0], [2.0, 1.0]];
        assert_eq!(count_crossings(&g, &nested).unwrap(), 0);
        // convex position: the two diagonals cross
        let convex = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_eq!(count_crossings(&g, &convex).unwrap(), 1);
    }

    #[test]
    fn shared_endpoints_never_cross() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 1.0, false).unwrap();
        g.add_edge(1, 2, 1.0, false).unwrap();
        let coords = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.5]];
        assert_eq!(count_crossings(&g, &coords).unwrap(), 0);
    }

    #[test]
    fn collinear_overlap_is_degenerate() {
        let g = two_edges();
        let coords = [[0.0, 0.0], [2.0, 0.0], [1.0, 0.0], [3.0, 0.0]];
        assert!(matches!(
            count_crossings(&g, &coords),
            Err(MetricError::DegenerateGeometry(..))
        ));
        // collinear but disjoint: fine
        let coords = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert_eq!(count_crossings(&g, &coords).unwrap(), 0);
    }

    #[test]
    fn angular_resolution_cases() {
        // star with edges at right angles
        let mut star = Graph::new(5);
        for l in 1..5 {
            star.add_edge(0, l, 1.0, false).unwrap();
        }
        let coords = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        assert!((angular_resolution(&star, &coords).unwrap() - 1.0).abs() < 1e-12);

        // collinear path: angle pi at the middle node, max degree 2
        let mut path = Graph::new(3);
        path.add_edge(0, 1, 1.0, false).unwrap();
        path.add_edge(1, 2, 1.0, false).unwrap();
        let coords = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]];
        assert!((angular_resolution(&path, &coords).unwrap() - 1.0).abs() < 1e-12);

        // pi/6 between two of four star edges
        let mut star4 = Graph::new(5);
        for l in 1..5 {
            star4.add_edge(0, l, 1.0, false).unwrap();
        }
        let th = std::f64::consts::PI / 6.0;
        let coords = [
            [0.0, 0.0],
            [1.0, 0.0],
            [th.cos(), th.sin()],
            [-1.0, 0.0],
            [0.0, -1.0],
        ];
        assert!((angular_resolution(&star4, &coords).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let mut single = Graph::new(2);
        single.add_edge(0, 1, 1.0, false).unwrap();
        assert_eq!(
            angular_resolution(&single, &[[0.0, 0.0], [1.0, 0.0]]),
            Err(MetricError::NoIncidentPairs)
        );
    }

    #[test]
    fn crossing_angle_pi_over_six() {
        let g = two_edges();
        let th = std::f64::consts::PI / 6.0;
        let coords = [
            [-1.0, 0.0],
            [1.0, 0.0],
            [-th.cos(), -th.sin()],
            [th.cos(), th.sin()],
        ];
        let r = crossing_resolution(&g, &coords).unwrap().unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-12);
    }

    fn random_coords(n: usize, seed: u64) -> Vec<Coords> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [rng.gen(), rng.gen()]).collect()
    }

    fn transform(coords: &[Coords], angle: f64, scale: f64, t: [f64; 2], reflect: bool) -> Vec<Coords> {
        coords
            .iter()
            .map(|p| {
                let x = if reflect { -p[0] } else { p[0] };
                [
                    scale * (x * angle.cos() - p[1] * angle.sin()) + t[0],
                    scale * (x * angle.sin() + p[1] * angle.cos()) + t[1],
                ]
            })
            .collect()
    }

    #[test]
    fn procrustes_similarity_invariance() {
        let x = random_coords(30, 3);
        assert_eq!(procrustes_statistic(&x, &x).unwrap(), 0.0);
        let y = transform(&x, 37f64.to_radians(), 3.0, [5.0, -2.0], false);
        assert!(procrustes_statistic(&x, &y).unwrap() < 1e-9);
        let y = transform(&x, 123f64.to_radians(), 0.2, [-1.0, 4.0], true);
        assert!(procrustes_statistic(&x, &y).unwrap() < 1e-9);
    }

    #[test]
    fn procrustes_symmetric_and_degenerate() {
        let x = random_coords(25, 1);
        let y = random_coords(25, 2);
        let a = procrustes_statistic(&x, &y).unwrap();
        let b = procrustes_statistic(&y, &x).unwrap();
        assert!((a - b).abs() < 1e-9);
        assert!(a > 0.0 && a <= 1.0);

        let flat = vec![[1.0, 1.0]; 5];
        assert_eq!(
            procrustes_statistic(&flat, &x[..5]),
            Err(MetricError::DegenerateLayout)
        );
    }

    /// Brute-force oracle: scan rotation angles (with reflection), use
    /// the closed-form optimal scale per angle, and take the best.
    fn procrustes_grid_oracle(x: &[Coords], y: &[Coords]) -> f64 {
        let n = x.len() as f64;
        let cx = [
            x.iter().map(|p| p[0]).sum::<f64>() / n,
            x.iter().map(|p| p[1]).sum::<f64>() / n,
        ];
        let cy = [
            y.iter().map(|p| p[0]).sum::<f64>() / n,
            y.iter().map(|p| p[1]).sum::<f64>() / n,
        ];
        let xc: Vec<Coords> = x.iter().map(|p| [p[0] - cx[0], p[1] - cx[1]]).collect();
        let yc: Vec<Coords> = y.iter().map(|p| [p[0] - cy[0], p[1] - cy[1]]).collect();
        let ssx: f64 = xc.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum();
        let ssy: f64 = yc.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum();

        let steps = 400_000;
        let mut best = f64::INFINITY;
        for reflect in [false, true] {
            for s in 0..steps {
                let th = 2.0 * std::f64::consts::PI * s as f64 / steps as f64;
                let (sin, cos) = th.sin_cos();
                let mut dot = 0.0;
                for (px, py) in xc.iter().zip(&yc) {
                    let yx = if reflect { -py[0] } else { py[0] };
                    let ry = [yx * cos - py[1] * sin, yx * sin + py[1] * cos];
                    dot += px[0] * ry[0] + px[1] * ry[1];
                }
                // optimal scale for this rotation: dot / ssy
                let resid = ssx - dot.max(0.0) * dot.max(0.0) / ssy;
                best = best.min(resid);
            }
        }
        (best / ssx).clamp(0.0, 1.0)
    }

    #[test]
    fn procrustes_matches_grid_search_oracle() {
        let x = random_coords(50, 8);
        let y = random_coords(50, 9);
        let got = procrustes_statistic(&x, &y).unwrap();
        let expect = procrustes_grid_oracle(&x, &y);
        assert!((got - expect).abs() < 1e-6, "got {got}, oracle {expect}");
    }

    /// Independent crossing predicate: solve for intersection parameters.
    fn crossings_param_oracle(g: &Graph, coords: &[Coords]) -> usize {
        let edges = g.edges();
        let mut count = 0;
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a, b) = (edges[i].u, edges[i].v);
                let (c, d) = (edges[j].u, edges[j].v);
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                let (p, r) = (coords[a], [coords[b][0] - coords[a][0], coords[b][1] - coords[a][1]]);
                let (q, s) = (coords[c], [coords[d][0] - coords[c][0], coords[d][1] - coords[c][1]]);
                let denom = r[0] * s[1] - r[1] * s[0];
                if denom.abs() < 1e-15 {
                    continue;
                }
                let qp = [q[0] - p[0], q[1] - p[1]];
                let t = (qp[0] * s[1] - qp[1] * s[0]) / denom;
                let u = (qp[0] * r[1] - qp[1] * r[0]) / denom;
                if t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0 {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn crossings_match_parametric_oracle() {
        let g = gen_grid(4, 5).unwrap();
        for seed in 0..100 {
            let coords = random_coords(g.n(), seed);
            assert_eq!(
                count_crossings(&g, &coords).unwrap(),
                crossings_param_oracle(&g, &coords),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn metrics_invariant_under_similarity() {
        let g = gen_grid(4, 4).unwrap();
        let coords = random_coords(g.n(), 17);
        let moved = transform(&coords, 0.7, 2.5, [3.0, -1.0], false);
        assert_eq!(
            count_crossings(&g, &coords).unwrap(),
            count_crossings(&g, &moved).unwrap()
        );
        let a1 = angular_resolution(&g, &coords).unwrap();
        let a2 = angular_resolution(&g, &moved).unwrap();
        assert!((a1 - a2).abs() < 1e-9);
        let c1 = crossing_resolution(&g, &coords).unwrap();
        let c2 = crossing_resolution(&g, &moved).unwrap();
        match (c1, c2) {
            (Some(c1), Some(c2)) => assert!((c1 - c2).abs() < 1e-9),
            (None, None) => {}
            _ => panic!("crossing presence changed under similarity"),
        }
    }
}

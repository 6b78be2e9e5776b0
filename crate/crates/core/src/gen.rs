//! Dataset generators: lattice grids, Delaunay triangulations of random
//! point sets, recursively deepened triangulations, and augmentation
//! with random planarity-destroying edges. All generators are pure
//! functions of their parameters and a seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("not enough non-adjacent pairs: need {need}, have {have}")]
    NotEnoughPairs { need: usize, have: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Jitter magnitude applied to random coordinates to dodge co-circular
/// and collinear configurations.
const JITTER: f64 = 1e-9;

/// `rows x cols` lattice with 4-neighborhood edges; node id = r*cols + c.
pub fn gen_grid(rows: usize, cols: usize) -> Result<Graph, GenError> {
    if rows < 2 || cols < 2 {
        return Err(GenError::InvalidSize(format!("grid {rows}x{cols}")));
    }
    let mut g = Graph::new(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let id = r * cols + c;
            if c + 1 < cols {
                g.add_edge(id, id + 1, 1.0, false)?;
            }
            if r + 1 < rows {
                g.add_edge(id, id + cols, 1.0, false)?;
            }
        }
    }
    Ok(g)
}

/// Add `floor(fraction * n)` edges between random non-adjacent node
/// pairs, flagged as augmenting.
pub fn augment(g: &Graph, fraction: f64, seed: u64) -> Result<Graph, GenError> {
    let count = (fraction * g.n() as f64).floor() as usize;
    let mut candidates: Vec<(NodeId, NodeId)> = Vec::new();
    for u in 0..g.n() {
        for v in (u + 1)..g.n() {
            if !g.has_edge(u, v) {
                candidates.push((u, v));
            }
        }
    }
    if candidates.len() < count {
        return Err(GenError::NotEnoughPairs {
            need: count,
            have: candidates.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chosen: Vec<(NodeId, NodeId)> =
        candidates.choose_multiple(&mut rng, count).copied().collect();
    let mut out = g.clone();
    for (u, v) in chosen {
        out.add_edge(u, v, 1.0, true)?;
    }
    Ok(out)
}

/// `count` points uniform in the unit square, with jitter.
pub fn random_points(count: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Point {
            x: rng.gen::<f64>() + rng.gen_range(-JITTER..JITTER),
            y: rng.gen::<f64>() + rng.gen_range(-JITTER..JITTER),
        })
        .collect()
}

// ---------------------------------------------------------------------
// Bowyer-Watson incremental Delaunay triangulation
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Tri(usize, usize, usize);

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// True if `p` lies strictly inside the circumcircle of `abc`.
fn in_circumcircle(a: Point, b: Point, c: Point, p: Point) -> bool {
    // determinant test, normalized so abc is counter-clockwise
    let (b, c) = if orient(a, b, c) > 0.0 { (b, c) } else { (c, b) };
    let ax = a.x - p.x;
    let ay = a.y - p.y;
    let bx = b.x - p.x;
    let by = b.y - p.y;
    let cx = c.x - p.x;
    let cy = c.y - p.y;
    let det = (ax * ax + ay * ay) * (bx * cy - by * cx)
        - (bx * bx + by * by) * (ax * cy - ay * cx)
        + (cx * cx + cy * cy) * (ax * by - ay * bx);
    det > 0.0
}

/// Delaunay triangulation of `points`, returned as triangles of point
/// indices. Incremental Bowyer-Watson with a super-triangle.
pub fn delaunay_triangles(points: &[Point]) -> Result<Vec<[usize; 3]>, GenError> {
    let n = points.len();
    if n < 3 {
        return Err(GenError::DegenerateInput(format!("{n} points")));
    }
    if !points
        .iter()
        .any(|&p| orient(points[0], points[1], p).abs() > 1e-12)
    {
        return Err(GenError::DegenerateInput("all points collinear".into()));
    }

    let min_x = points.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let max_x = points.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let min_y = points.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let span = (max_x - min_x).max(max_y - min_y).max(1.0);
    let cx = (min_x + max_x) / 2.0;
    let cy = (min_y + max_y) / 2.0;
    let big = 64.0 * span;
    let supers = [
        Point { x: cx - big, y: cy - big },
        Point { x: cx + big, y: cy - big },
        Point { x: cx, y: cy + big },
    ];

    let coord = |i: usize| -> Point {
        if i < n {
            points[i]
        } else {
            supers[i - n]
        }
    };

    let mut tris = vec![Tri(n, n + 1, n + 2)];
    for p in 0..n {
        let pt = points[p];
        let (bad, good): (Vec<Tri>, Vec<Tri>) = tris
            .into_iter()
            .partition(|t| in_circumcircle(coord(t.0), coord(t.1), coord(t.2), pt));

        // boundary of the bad region: edges used by exactly one bad triangle
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for t in &bad {
            for (a, b) in [(t.0, t.1), (t.1, t.2), (t.2, t.0)] {
                let key = (a.min(b), a.max(b));
                if let Some(pos) = boundary.iter().position(|&e| e == key) {
                    boundary.swap_remove(pos);
                } else {
                    boundary.push(key);
                }
            }
        }

        tris = good;
        for (a, b) in boundary {
            tris.push(Tri(a, b, p));
        }
    }

    let result: Vec<[usize; 3]> = tris
        .into_iter()
        .filter(|t| t.0 < n && t.1 < n && t.2 < n)
        .map(|t| {
            let mut v = [t.0, t.1, t.2];
            v.sort_unstable();
            v
        })
        .collect();
    Ok(result)
}

fn edges_of(tris: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = tris
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Graph of the Delaunay triangulation of `points`.
pub fn delaunay(points: &[Point]) -> Result<Graph, GenError> {
    let tris = delaunay_triangles(points)?;
    let mut g = Graph::new(points.len());
    for (u, v) in edges_of(&tris) {
        g.add_edge(u, v, 1.0, false)?;
    }
    Ok(g)
}

/// Triangulation of `n` random points; also returns the points so
/// callers can verify planarity of the straight-line embedding.
pub fn gen_triangulation(n: usize, seed: u64) -> Result<(Graph, Vec<Point>), GenError> {
    if n < 3 {
        return Err(GenError::InvalidSize(format!("triangulation n={n}")));
    }
    let points = random_points(n, seed);
    Ok((delaunay(&points)?, points))
}

/// Deep triangulation: Delaunay over 0.7n random points, then repeatedly
/// drop a random batch of points into a random triangle and triangulate
/// the batch together with the triangle's corners, until n nodes exist.
pub fn gen_deep_triangulation(n: usize, seed: u64) -> Result<(Graph, Vec<Point>), GenError> {
    if n < 10 {
        return Err(GenError::InvalidSize(format!("deep triangulation n={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = (0.7 * n as f64).floor() as usize;
    let mut points = random_points(base, seed.wrapping_add(0x9e3779b97f4a7c15));
    let mut faces = delaunay_triangles(&points)?;
    let mut edges = edges_of(&faces);

    let mut remaining = n - base;
    while remaining > 0 {
        let r = if remaining <= 3 {
            remaining
        } else {
            rng.gen_range(3..=remaining)
        };
        let face_idx = rng.gen_range(0..faces.len());
        let [a, b, c] = faces[face_idx];
        let (pa, pb, pc) = (points[a], points[b], points[c]);

        // r points strictly inside the face, pulled toward the centroid
        // so they stay clear of its edges
        let mut cluster: Vec<usize> = vec![a, b, c];
        for _ in 0..r {
            let mut u: f64 = rng.gen();
            let mut v: f64 = rng.gen();
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            let (l1, l2) = (0.85 * u + 0.05, 0.85 * v + 0.05);
            let l0 = 1.0 - l1 - l2;
            let jx = rng.gen_range(-JITTER..JITTER);
            let jy = rng.gen_range(-JITTER..JITTER);
            cluster.push(points.len());
            points.push(Point {
                x: l0 * pa.x + l1 * pb.x + l2 * pc.x + jx,
                y: l0 * pa.y + l1 * pb.y + l2 * pc.y + jy,
            });
        }

        let local: Vec<Point> = cluster.iter().map(|&i| points[i]).collect();
        let sub = delaunay_triangles(&local)?;
        faces.swap_remove(face_idx);
        for t in sub {
            let mut f = [cluster[t[0]], cluster[t[1]], cluster[t[2]]];
            f.sort_unstable();
            faces.push(f);
        }
        remaining -= r;
    }

    edges.extend(edges_of(&faces));
    edges.sort_unstable();
    edges.dedup();

    let mut g = Graph::new(points.len());
    for (u, v) in edges {
        g.add_edge(u, v, 1.0, false)?;
    }
    Ok((g, points))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_sizes() {
        let g = gen_grid(2, 2).unwrap();
        assert_eq!((g.n(), g.m()), (4, 4));
        let g = gen_grid(6, 8).unwrap();
        assert_eq!((g.n(), g.m()), (48, 82));
        for u in 0..g.n() {
            assert!((2..=4).contains(&g.degree(u)));
        }
        assert!(gen_grid(1, 5).is_err());
    }

    #[test]
    fn augment_counts_and_determinism() {
        let g = gen_grid(10, 10).unwrap();
        let a = augment(&g, 0.1, 3).unwrap();
        assert_eq!(a.m(), 190);
        assert_eq!(a.edges().iter().filter(|e| e.aug).count(), 10);
        for e in a.edges().iter().filter(|e| e.aug) {
            assert!(!g.has_edge(e.u, e.v));
        }
        let b = augment(&g, 0.1, 3).unwrap();
        assert_eq!(a, b);
        let c = augment(&g, 0.1, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn augment_complete_graph_fails() {
        let mut k4 = Graph::new(4);
        for u in 0..4 {
            for v in (u + 1)..4 {
                k4.add_edge(u, v, 1.0, false).unwrap();
            }
        }
        assert!(matches!(
            augment(&k4, 0.5, 0),
            Err(GenError::NotEnoughPairs { .. })
        ));
    }

    #[test]
    fn delaunay_small_cases() {
        let tri = [
            Point { x: 0.0, y: 0.0 },
            Point { x: 1.0, y: 0.0 },
            Point { x: 0.5, y: 1.0 },
        ];
        let g = delaunay(&tri).unwrap();
        assert_eq!(g.m(), 3);

        let quad = [
            Point { x: 0.0, y: 0.0 },
            Point { x: 1.0, y: 0.1 },
            Point { x: 1.1, y: 1.0 },
            Point { x: 0.1, y: 0.9 },
        ];
        let g = delaunay(&quad).unwrap();
        assert_eq!(g.m(), 5);

        let line = [
            Point { x: 0.0, y: 0.0 },
            Point { x: 1.0, y: 0.0 },
            Point { x: 2.0, y: 0.0 },
        ];
        assert!(matches!(delaunay(&line), Err(GenError::DegenerateInput(_))));
    }

    #[test]
    fn delaunay_empty_circumcircle_property() {
        let points = random_points(20, 11);
        let tris = delaunay_triangles(&points).unwrap();
        for t in &tris {
            for (i, &p) in points.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                assert!(
                    !in_circumcircle(points[t[0]], points[t[1]], points[t[2]], p),
                    "point {i} inside circumcircle of {t:?}"
                );
            }
        }
    }

    #[test]
    fn delaunay_edge_count_formula() {
        // m = 3n - 3 - h with h hull points
        let points = random_points(30, 5);
        let g = delaunay(&points).unwrap();
        let h = convex_hull_size(&points);
        assert_eq!(g.m(), 3 * points.len() - 3 - h);
    }

    fn convex_hull_size(points: &[Point]) -> usize {
        // independent gift-wrapping hull
        let start = (0..points.len())
            .min_by(|&a, &b| points[a].x.partial_cmp(&points[b].x).unwrap())
            .unwrap();
        let mut hull = vec![start];
        loop {
            let cur = *hull.last().unwrap();
            let mut next = (cur + 1) % points.len();
            for cand in 0..points.len() {
                if cand == cur {
                    continue;
                }
                if orient(points[cur], points[next], points[cand]) < 0.0 {
                    next = cand;
                }
            }
            if next == start {
                break;
            }
            hull.push(next);
        }
        hull.len()
    }

    #[test]
    fn deep_triangulation_shape() {
        let (g, points) = gen_deep_triangulation(25, 9).unwrap();
        assert_eq!(g.n(), 25);
        assert_eq!(points.len(), 25);
        assert!(g.is_connected());
        // planar straight-line graph respects the planar edge bound
        assert!(g.m() <= 3 * g.n() - 6, "m = {}", g.m());
        assert!(g.m() >= 2 * g.n() - 3, "m = {}", g.m());

        let (h, _) = gen_deep_triangulation(25, 9).unwrap();
        assert_eq!(g, h);
    }

    #[test]
    fn deep_triangulation_embedding_is_planar() {
        let (g, points) = gen_deep_triangulation(40, 2).unwrap();
        // no two edges properly cross at the generation coordinates
        let coords: Vec<(f64, f64)> = points.iter().map(|p| (p.x, p.y)).collect();
        let edges = g.edges();
        for i in 0..edges.len() {
            for j in (i + 1)..edges.len() {
                let (a, b) = (edges[i].u, edges[i].v);
                let (c, d) = (edges[j].u, edges[j].v);
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                assert!(
                    !segments_properly_cross(coords[a], coords[b], coords[c], coords[d]),
                    "edges {:?} and {:?} cross",
                    (a, b),
                    (c, d)
                );
            }
        }
    }

    fn segments_properly_cross(
        p1: (f64, f64),
        p2: (f64, f64),
        p3: (f64, f64),
        p4: (f64, f64),
    ) -> bool {
        let o = |a: (f64, f64), b: (f64, f64), c: (f64, f64)| {
            (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
        };
        let d1 = o(p3, p4, p1);
        let d2 = o(p3, p4, p2);
        let d3 = o(p1, p2, p3);
        let d4 = o(p1, p2, p4);
        d1 * d2 < 0.0 && d3 * d4 < 0.0
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let (a, _) = gen_triangulation(30, 123).unwrap();
        let (b, _) = gen_triangulation(30, 123).unwrap();
        assert_eq!(a, b);
        assert!(a.is_connected());
    }
}

//! Independent hyperbolic tiling oracle: vertices grown on the hyperboloid
//! with Lorentz matrices instead of disk Möbius maps.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

/// Vertices of a hyperbolic `{p,q}` tiling on the hyperboloid
/// `x₀² − x₁² − x₂² = 1`, grown breadth-first by half-turns about edge
/// midpoints. Returns `(position, graph distance from the origin)`.
pub struct HyperboloidTiling {
    pub nodes: Vec<(Vector3<f64>, usize)>,
}

fn boost(angle: f64, t: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    let rot = |s: f64, c: f64| Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c);
    let bx = Matrix3::new(t.cosh(), t.sinh(), 0.0, t.sinh(), t.cosh(), 0.0, 0.0, 0.0, 1.0);
    rot(s, c) * bx * rot(-s, c)
}

impl HyperboloidTiling {
    pub fn grow(p: u32, q: u32, max_depth: usize) -> Self {
        let (pf, qf) = (p as f64, q as f64);
        let edge = 2.0 * ((PI / pf).cos() / (PI / qf).sin()).acosh();
        let half_turn = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        let gens: Vec<Matrix3<f64>> = (0..q)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / qf;
                boost(a, 0.5 * edge) * half_turn * boost(a, -0.5 * edge)
            })
            .collect();
        let origin = Vector3::new(1.0, 0.0, 0.0);
        let mut elems = vec![Matrix3::identity()];
        let mut nodes = vec![(origin, 0)];
        let mut frontier = vec![0usize];
        for depth in 1..=max_depth {
            let mut next = Vec::new();
            for &k in &frontier {
                for g in &gens {
                    let m = elems[k] * g;
                    let x = m * origin;
                    // Hyperbolic distance via the Minkowski product; duplicates coincide.
                    let dup = nodes.iter().any(|(y, _)| lorentz_dist(&x, y) < 0.25 * edge);
                    if !dup {
                        elems.push(m);
                        nodes.push((x, depth));
                        next.push(nodes.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        Self { nodes }
    }

    pub fn count_within(&self, r: f64) -> usize {
        let origin = Vector3::new(1.0, 0.0, 0.0);
        self.nodes.iter().filter(|(x, _)| lorentz_dist(x, &origin) <= r * (1.0 + 1e-9)).count()
    }

    pub fn count_to_depth(&self, depth: usize) -> usize {
        self.nodes.iter().filter(|(_, d)| *d <= depth).count()
    }
}

fn lorentz_dist(x: &Vector3<f64>, y: &Vector3<f64>) -> f64 {
    (x[0] * y[0] - x[1] * y[1] - x[2] * y[2]).max(1.0).acosh()
}

//! Exhaustive travelling-salesman oracle and tour helpers.

use grisom::tsp::{TspProblem, TspSolution};
use grisom::Model;

/// Haversine central angle between `(lat, lon)` pairs in radians.
pub fn haversine(a: &[f64], b: &[f64]) -> f64 {
    let hav = |x: f64| (0.5 * x).sin().powi(2);
    let h = hav(b[0] - a[0]) + a[0].cos() * b[0].cos() * hav(b[1] - a[1]);
    2.0 * h.sqrt().min(1.0).asin()
}

/// City-to-city distance matrix (scaled). Spherical problems use the
/// haversine formula instead of the library metric.
pub fn distance_matrix(problem: &TspProblem) -> Vec<Vec<f64>> {
    let n = problem.cities.len();
    let pos = |i: usize| problem.cities[i].position.coords();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = match problem.feature_space.model() {
                        Model::Geographic => haversine(pos(i), pos(j)),
                        _ => problem.feature_space.dist(pos(i), pos(j)),
                    };
                    d * problem.length_scale
                })
                .collect()
        })
        .collect()
}

/// Length of the closed tour `order`.
pub fn tour_length(dist: &[Vec<f64>], order: &[usize]) -> f64 {
    (0..order.len()).map(|k| dist[order[k]][order[(k + 1) % order.len()]]).sum()
}

/// Shortest closed tour by enumerating all permutations with city 0 fixed.
pub fn optimal_tour_length(dist: &[Vec<f64>]) -> f64 {
    fn rec(dist: &[Vec<f64>], path: &mut Vec<usize>, used: &mut [bool], acc: f64, best: &mut f64) {
        let n = dist.len();
        if path.len() == n {
            *best = best.min(acc + dist[*path.last().unwrap()][path[0]]);
            return;
        }
        for c in 1..n {
            if !used[c] {
                let add = dist[*path.last().unwrap()][c];
                used[c] = true;
                path.push(c);
                rec(dist, path, used, acc + add, best);
                path.pop();
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    let mut used = vec![false; dist.len()];
    used[0] = true;
    rec(dist, &mut vec![0], &mut used, 0.0, &mut best);
    best
}

/// Whether `solution` visits the cities in the cyclic order `expected`
/// (either direction).
pub fn is_cyclic_order(solution: &TspSolution, expected: &[usize]) -> bool {
    let n = expected.len();
    let o = &solution.order;
    if o.len() != n {
        return false;
    }
    let start = match o.iter().position(|&c| c == expected[0]) {
        Some(s) => s,
        None => return false,
    };
    let forward = (0..n).all(|k| o[(start + k) % n] == expected[k]);
    let backward = (0..n).all(|k| o[(start + n - k) % n] == expected[k]);
    forward || backward
}

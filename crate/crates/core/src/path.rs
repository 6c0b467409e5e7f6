//! Shortest open polygonal path through a finite point set.

use crate::poly::Complex;

/// Largest point count solved exactly.
pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLength {
    pub length: f64,
    /// `false` when the length came from the nearest-neighbour + 2-opt heuristic.
    pub exact: bool,
}

/// Length of the shortest open path visiting every point once.
///
/// Exact (Held–Karp dynamic programming over subsets) up to [`EXACT_LIMIT`] points,
/// heuristic above that.
pub fn shortest_path_length(points: &[Complex]) -> PathLength {
    let n = points.len();
    if n <= 1 {
        return PathLength { length: 0.0, exact: true };
    }
    if n <= EXACT_LIMIT {
        PathLength {
            length: held_karp(points),
            exact: true,
        }
    } else {
        PathLength {
            length: two_opt(points),
            exact: false,
        }
    }
}

fn held_karp(points: &[Complex]) -> f64 {
    let n = points.len();
    let dist = |a: usize, b: usize| (points[a] - points[b]).norm();
    let full = 1usize << n;
    // best[mask][last]: shortest path covering `mask` and ending at `last`.
    let mut best = vec![f64::INFINITY; full * n];
    for i in 0..n {
        best[(1 << i) * n + i] = 0.0;
    }
    for mask in 1..full {
        for last in 0..n {
            let here = best[mask * n + last];
            if !here.is_finite() {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let slot = &mut best[(mask | (1 << next)) * n + next];
                let candidate = here + dist(last, next);
                if candidate < *slot {
                    *slot = candidate;
                }
            }
        }
    }
    (0..n)
        .map(|last| best[(full - 1) * n + last])
        .fold(f64::INFINITY, f64::min)
}

fn two_opt(points: &[Complex]) -> f64 {
    let n = points.len();
    let dist = |a: Complex, b: Complex| (a - b).norm();
    let length = |order: &[usize]| -> f64 {
        order.windows(2).map(|w| dist(points[w[0]], points[w[1]])).fold(0.0, |a, b| a + b)
    };
    let mut best_order: Vec<usize> = Vec::new();
    let mut best_len = f64::INFINITY;
    for start in 0..n {
        let mut order = vec![start];
        let mut used = vec![false; n];
        used[start] = true;
        while order.len() < n {
            let last = points[*order.last().unwrap()];
            let next = (0..n)
                .filter(|&j| !used[j])
                .min_by(|&a, &b| dist(last, points[a]).total_cmp(&dist(last, points[b])))
                .unwrap();
            used[next] = true;
            order.push(next);
        }
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..n - 1 {
                for j in i + 1..n {
                    let mut candidate = order.clone();
                    candidate[i..=j].reverse();
                    if length(&candidate) + 1e-12 < length(&order) {
                        order = candidate;
                        improved = true;
                    }
                }
            }
        }
        let len = length(&order);
        if len < best_len {
            best_len = len;
            best_order = order;
        }
    }
    debug_assert_eq!(best_order.len(), n);
    best_len
}

//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code path it is used to check.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Nonincreasing degree sequences of length `n` without zero entries that are
/// realisable as simple graphs (Erdős–Gallai).
pub fn graphical_sequences(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            if erdos_gallai(prefix) {
                out.push(prefix.clone());
            }
            return;
        }
        for d in (1..=max).rev() {
            prefix.push(d);
            rec(n, d, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n - 1, &mut Vec::new(), &mut out);
    out
}

pub fn erdos_gallai(d: &[usize]) -> bool {
    let total: usize = d.iter().sum();
    if total % 2 != 0 {
        return false;
    }
    let n = d.len();
    for k in 1..=n {
        let lhs: usize = d[..k].iter().sum();
        let rhs = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// Every integer vector `lower ≤ v ≤ upper` summing to `total`.
pub fn bounded_compositions(lower: &[usize], upper: &[usize], total: usize) -> Vec<Vec<usize>> {
    fn rec(lower: &[usize], upper: &[usize], left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let r = cur.len();
        if r == lower.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let room: usize = upper[r + 1..].iter().sum();
        for v in lower[r]..=upper[r].min(left) {
            if left - v > room {
                continue;
            }
            cur.push(v);
            rec(lower, upper, left - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(lower, upper, total, &mut Vec::new(), &mut out);
    out
}

/// Probability matrix written straight from the closed form, with its own
/// weight recursion. Returns `None` when a denominator is not positive.
pub fn dense_probabilities(k: &[usize], kp: &[usize]) -> Option<Vec<Vec<f64>>> {
    let n = k.len();
    let l: usize = kp.iter().sum();
    let active = k.iter().filter(|&&d| d > 0).count();
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    for m in 1..active.saturating_sub(1) {
        let g: f64 = (0..m).map(|i| w[i] * (k[i] - kp[i]) as f64).sum();
        let denom = g - kp[m] as f64 * w[m - 1];
        if denom <= 0.0 {
            return None;
        }
        w[m] = w[m - 1] * g / denom;
    }
    let mut p = vec![vec![0.0; n]; n];
    for j in 1..active {
        let g: f64 = (0..j).map(|i| w[i] * (k[i] - kp[i]) as f64).sum();
        for i in 0..j {
            let v = w[i] * (k[i] - kp[i]) as f64 / g * kp[j] as f64 / l as f64;
            p[i][j] = v;
            p[j][i] = v;
        }
    }
    Some(p)
}

pub fn dense_entropy(p: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i][j] > 0.0 {
                s -= 2.0 * p[i][j] * p[i][j].ln();
            }
        }
    }
    s
}

/// Random feasible `(k, k⁺)` pair read off a random simple graph whose
/// lowest-ranked node keeps all its links upward.
pub fn random_instance(seed: u64, max_n: usize) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(3..=max_n);
        let density = rng.gen_range(0.02..0.6);
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(density) {
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        let deg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&x| x).count()).collect();
        if deg.iter().all(|&d| d == 0) {
            continue;
        }
        let mut order: Vec<usize> = (0..n).collect();
        let tie: Vec<u32> = (0..n).map(|_| rng.gen()).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), tie[v]));
        let mut rank = vec![0; n];
        for (r, &v) in order.iter().enumerate() {
            rank[v] = r;
        }
        let k: Vec<usize> = order.iter().map(|&v| deg[v]).collect();
        let kp: Vec<usize> = order
            .iter()
            .enumerate()
            .map(|(r, &v)| (0..n).filter(|&u| adj[v][u] && rank[u] < r).count())
            .collect();
        if k.iter().filter(|&&d| d > 0).count() >= 2 {
            return (k, kp);
        }
    }
}

//! Gauss-Legendre rules and composite helpers.

use std::sync::OnceLock;

/// Nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

const CACHED: usize = 64;

/// Gauss-Legendre rule with `n` points; rules up to 64 points are cached.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    static CACHE: OnceLock<Vec<Rule>> = OnceLock::new();
    assert!((1..=CACHED).contains(&n), "rule size {n} out of range");
    &CACHE.get_or_init(|| (1..=CACHED).map(compute_rule).collect())[n - 1]
}

/// Nodes and weights mapped to [a, b].
pub fn mapped(n: usize, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> {
    let r = gauss_legendre(n);
    let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
    r.nodes.iter().zip(&r.weights).map(move |(x, w)| (m + h * x, h * w))
}

/// Panels on [a, b] refined geometrically toward `a`: [a, a+L 2^-levels], ..., [a+L/2, b].
pub fn graded_toward_start(a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let len = b - a;
    let mut out = Vec::with_capacity(levels + 1);
    let mut lo = a;
    for k in (0..=levels).rev() {
        let hi = if k == 0 { b } else { a + len * 0.5f64.powi(k as i32) };
        out.push((lo, hi));
        lo = hi;
    }
    out
}

/// Panels on [a, b] refined geometrically toward both ends.
pub fn graded_both(a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let m = 0.5 * (a + b);
    let mut out = graded_toward_start(a, m, levels);
    let mut right: Vec<(f64, f64)> = graded_toward_start(0.0, b - m, levels)
        .into_iter()
        .map(|(lo, hi)| (b - hi, b - lo))
        .collect();
    right.reverse();
    out.extend(right);
    out
}

/// Integrate `f` over composite panels with an `n`-point rule per panel.
pub fn integrate_panels<F: FnMut(f64) -> f64>(panels: &[(f64, f64)], n: usize, mut f: F) -> f64 {
    let mut s = 0.0;
    for &(a, b) in panels {
        for (x, w) in mapped(n, a, b) {
            s += w * f(x);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..=20 {
            let r = gauss_legendre(n);
            for p in 0..(2 * n) {
                let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} p={p} s={s}");
            }
        }
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = graded_both(1.0, 3.0, 5);
        assert_eq!(p.first().unwrap().0, 1.0);
        assert_eq!(p.last().unwrap().1, 3.0);
        for w in p.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-15);
        }
        let v = integrate_panels(&graded_toward_start(0.0, 1.0, 20), 8, |s| s * s.ln());
        assert!((v + 0.25).abs() < 1e-13);
    }
}

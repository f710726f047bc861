//! Small numeric helpers shared across modules.

/// `n` equally spaced points covering `[a, b]` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (b - a) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    v[n - 1] = b;
    v
}

/// `n` log-spaced points covering `[a, b]`, both positive.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a && n >= 2);
    let (la, lb) = (a.ln(), b.ln());
    let step = (lb - la) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| (la + step * i as f64).exp()).collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

/// Merge sorted grids, dropping near-duplicates (relative gap below `eps`).
pub fn merge_grids(grids: &[&[f64]], eps: f64) -> Vec<f64> {
    let mut all: Vec<f64> = grids.iter().flat_map(|g| g.iter().copied()).collect();
    all.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for x in all {
        match out.last() {
            Some(&last) if (x - last).abs() <= eps * (1.0 + x.abs().max(last.abs())) => {}
            _ => out.push(x),
        }
    }
    out
}

/// Finite-difference weights for the `m`-th derivative at `x0` on arbitrary
/// nodes (Fornberg's recursion). Returns one weight per node.
pub fn fd_weights(nodes: &[f64], x0: f64, m: usize) -> Vec<f64> {
    let n = nodes.len();
    assert!(n > m, "need more nodes than the derivative order");
    // c[j][k]: weight of node j for the k-th derivative.
    let mut c = vec![vec![0.0; m + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[m]).collect()
}

/// Cubic Hermite evaluation on `[x0, x1]` from endpoint values and derivatives.
pub fn hermite(x: f64, x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    f0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + f1 * (-2.0 * t3 + 3.0 * t2)
        + h * d0 * (t3 - 2.0 * t2 + t)
        + h * d1 * (t3 - t2)
}

/// Derivative of the cubic Hermite interpolant at `x`.
pub fn hermite_deriv(x: f64, x0: f64, x1: f64, f0: f64, f1: f64, d0: f64, d1: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    (f0 * (6.0 * t2 - 6.0 * t) + f1 * (-6.0 * t2 + 6.0 * t)) / h
        + d0 * (3.0 * t2 - 4.0 * t + 1.0)
        + d1 * (3.0 * t2 - 2.0 * t)
}

/// Piecewise-cubic Hermite interpolant over a sorted node set.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    pub xs: Vec<f64>,
    pub fs: Vec<f64>,
    pub ds: Vec<f64>,
}

impl HermiteTable {
    pub fn new(xs: Vec<f64>, fs: Vec<f64>, ds: Vec<f64>) -> Self {
        assert!(xs.len() == fs.len() && xs.len() == ds.len() && xs.len() >= 2);
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        HermiteTable { xs, fs, ds }
    }

    /// Index of the interval containing `x` (clamped to the span).
    pub fn segment(&self, x: f64) -> usize {
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(self.xs.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.xs.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite(
            x,
            self.xs[i],
            self.xs[i + 1],
            self.fs[i],
            self.fs[i + 1],
            self.ds[i],
            self.ds[i + 1],
        )
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = self.segment(x);
        hermite_deriv(
            x,
            self.xs[i],
            self.xs[i + 1],
            self.fs[i],
            self.fs[i + 1],
            self.ds[i],
            self.ds[i + 1],
        )
    }

    pub fn span(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_weights_reproduce_derivatives_of_cubic() {
        let nodes = [-1.3, -0.4, 0.2, 0.9, 1.7];
        let f = |x: f64| 2.0 + 3.0 * x - x * x + 0.5 * x * x * x;
        let fp = |x: f64| 3.0 - 2.0 * x + 1.5 * x * x;
        for &x0 in &[-0.4, 0.2, 0.0, 1.7] {
            let w = fd_weights(&nodes, x0, 1);
            let got: f64 = nodes.iter().zip(&w).map(|(&x, &wi)| wi * f(x)).sum();
            assert!((got - fp(x0)).abs() < 1e-10, "x0={x0}: {got} vs {}", fp(x0));
        }
    }

    #[test]
    fn hermite_matches_cubic_exactly() {
        let f = |x: f64| 1.0 - x + 2.0 * x * x + 0.25 * x * x * x;
        let fp = |x: f64| -1.0 + 4.0 * x + 0.75 * x * x;
        let (a, b) = (0.3, 1.1);
        for k in 0..=10 {
            let x = a + (b - a) * k as f64 / 10.0;
            let got = hermite(x, a, b, f(a), f(b), fp(a), fp(b));
            assert!((got - f(x)).abs() < 1e-12);
            let gotd = hermite_deriv(x, a, b, f(a), f(b), fp(a), fp(b));
            assert!((gotd - fp(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn merge_grids_dedups() {
        let a = [0.0, 1.0, 2.0];
        let b = [1.0 + 1e-15, 1.5];
        let m = merge_grids(&[&a, &b], 1e-12);
        assert_eq!(m.len(), 4);
    }
}

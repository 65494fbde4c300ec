//! Small quadrature kit shared by the geometry, grid and potential code.

/// Gauss–Legendre nodes and weights on [-1, 1] for 4 points.
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Four-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss4<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL4_NODES
        .iter()
        .zip(GL4_WEIGHTS.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Nodes of the four-point rule mapped to `[a, b]`, paired with their weights.
pub fn gauss4_points(a: f64, b: f64) -> [(f64, f64); 4] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); 4];
    for (k, (x, w)) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()).enumerate() {
        out[k] = (mid + half * x, w * half);
    }
    out
}

/// Composite Simpson rule with `n` intervals (rounded up to even).
pub fn simpson<F: FnMut(f64) -> f64>(a: f64, b: f64, n: usize, mut f: F) -> f64 {
    let n = (n.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Trapezoid rule for a 2π-periodic integrand on `n` equispaced nodes.
pub fn periodic_trapezoid<F: FnMut(f64) -> f64>(n: usize, mut f: F) -> f64 {
    let dt = std::f64::consts::TAU / n as f64;
    (0..n).map(|j| f(j as f64 * dt)).sum::<f64>() * dt
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss4_is_exact_for_degree_seven() {
        let v = gauss4(0.0, 2.0, |x| x.powi(7));
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn simpson_rounds_odd_counts_up() {
        let v = simpson(0.0, 1.0, 3, |x| x * x * x);
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn periodic_trapezoid_integrates_trig_exactly() {
        let v = periodic_trapezoid(16, |t| 1.0 + t.cos().powi(2));
        assert!((v - 3.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn slope_of_line() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [2.0, 4.0, 6.0];
        assert_eq!(fit_slope(&xs, &ys), Some(2.0));
        assert_eq!(fit_slope(&[1.0], &[1.0]), None);
    }
}

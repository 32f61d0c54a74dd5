//! Gauss–Legendre quadrature.
//!
//! Nodes and weights are computed on demand by Newton iteration on the
//! Legendre polynomial (evaluated by the three-term recurrence), seeded
//! with the Chebyshev approximation of the roots; this is accurate to
//! machine precision for the orders used here (≤ a few hundred).

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev seed for the i-th positive-side root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: evaluates P_n(x) and P_n'(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// ∫_a^b f(x) dx by the `n`-point Gauss–Legendre rule.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes.iter().zip(&weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_interval_measure() {
        for n in [1, 2, 5, 16, 63, 128] {
            let (_, w) = gauss_legendre(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n = {n}: weight sum {sum}");
        }
    }

    #[test]
    fn nodes_are_sorted_and_symmetric() {
        let (x, _) = gauss_legendre(64);
        for pair in x.windows(2) {
            assert!(pair[0] < pair[1]);
        }
        for i in 0..32 {
            assert!((x[i] + x[63 - i]).abs() < 1e-15);
        }
    }

    #[test]
    fn polynomials_integrate_exactly() {
        // The n-point rule is exact through degree 2n-1; x^10 needs n = 6.
        let got = integrate(|x| x.powi(10), -1.0, 1.0, 6);
        assert!((got - 2.0 / 11.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn smooth_integrand_converges_to_machine_precision() {
        let got = integrate(f64::exp, 0.0, 1.0, 32);
        let exact = std::f64::consts::E - 1.0;
        assert!((got - exact).abs() < 1e-14);
    }

    #[test]
    fn scaled_interval() {
        let got = integrate(f64::sin, 0.0, std::f64::consts::PI, 48);
        assert!((got - 2.0).abs() < 1e-13);
    }
}

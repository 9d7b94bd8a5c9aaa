//! Quadrature rules: symmetric triangle rules (Dunavant) and Gauss–Legendre
//! line rules.

/// Triangle rule as barycentric points (λ1, λ2) with weights summing to 1;
/// the third coordinate is 1 − λ1 − λ2. Weights multiply the triangle area.
pub struct TriRule {
    pub points: &'static [(f64, f64)],
    pub weights: &'static [f64],
}

/// Degree-2 rule (3 points): exact for quadratics.
pub const TRI_DEG2: TriRule = TriRule {
    points: &[(1.0 / 6.0, 1.0 / 6.0), (2.0 / 3.0, 1.0 / 6.0), (1.0 / 6.0, 2.0 / 3.0)],
    weights: &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
};

/// Degree-4 rule (6 points): exact for quartics, positive weights.
pub const TRI_DEG4: TriRule = TriRule {
    points: &[
        (0.445948490915965, 0.445948490915965),
        (0.445948490915965, 0.108103018168070),
        (0.108103018168070, 0.445948490915965),
        (0.091576213509771, 0.091576213509771),
        (0.091576213509771, 0.816847572980459),
        (0.816847572980459, 0.091576213509771),
    ],
    weights: &[
        0.223381589678011,
        0.223381589678011,
        0.223381589678011,
        0.109951743655322,
        0.109951743655322,
        0.109951743655322,
    ],
};

/// Degree-5 rule (7 points): used for error integrals and source terms.
pub const TRI_DEG5: TriRule = TriRule {
    points: &[
        (1.0 / 3.0, 1.0 / 3.0),
        (0.470142064105115, 0.470142064105115),
        (0.470142064105115, 0.059715871789770),
        (0.059715871789770, 0.470142064105115),
        (0.101286507323456, 0.101286507323456),
        (0.101286507323456, 0.797426985353087),
        (0.797426985353087, 0.101286507323456),
    ],
    weights: &[
        0.225,
        0.132394152788506,
        0.132394152788506,
        0.132394152788506,
        0.125939180544827,
        0.125939180544827,
        0.125939180544827,
    ],
};

/// Gauss–Legendre nodes and weights on [0, 1], computed by Newton iteration
/// on the Legendre polynomial. Deterministic; accurate to machine precision.
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // initial guess (Chebyshev-like) on [-1, 1]
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map from [-1, 1] to [0, 1]
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tri_rules_integrate_monomials() {
        // ∫∫_T λ1^a λ2^b over the reference triangle = a! b! / (a+b+2)!
        let exact = |a: u32, b: u32| {
            let fact = |k: u32| (1..=k).map(|v| v as f64).product::<f64>().max(1.0);
            fact(a) * fact(b) / fact(a + b + 2)
        };
        for (rule, deg) in [(&TRI_DEG2, 2u32), (&TRI_DEG4, 4), (&TRI_DEG5, 5)] {
            for a in 0..=deg {
                for b in 0..=(deg - a) {
                    let num: f64 = rule
                        .points
                        .iter()
                        .zip(rule.weights)
                        .map(|(&(x, y), &w)| w * x.powi(a as i32) * y.powi(b as i32))
                        .sum::<f64>()
                        * 0.5; // reference triangle area
                    assert!(
                        (num - exact(a, b)).abs() < 1e-14,
                        "rule deg {deg} fails on λ1^{a} λ2^{b}: {num} vs {}",
                        exact(a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=16 {
            let rule = gauss_legendre_unit(n);
            for deg in 0..(2 * n) {
                let num: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
                let exact = 1.0 / (deg as f64 + 1.0);
                assert!((num - exact).abs() < 1e-13, "n={n} deg={deg}: {num} vs {exact}");
            }
        }
    }
}

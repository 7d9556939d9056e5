//! Scalar kernels shared by the spectral closed forms: divided differences
//! of `log x` and of `x log x`, with series fallbacks near coincident nodes.

/// Relative gap below which [`log_slope`] switches to its series.
pub const LOG_SLOPE_SERIES_GAP: f64 = 1e-6;
/// Relative gap below which [`q43_bracket`] switches to its series.
const Q43_SERIES_GAP: f64 = 1e-2;

/// First divided difference of the logarithm, (log a − log b)/(a − b).
/// Equals 1/a when a = b.
pub fn log_slope(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    let x = (hi - lo) / lo;
    if x < LOG_SLOPE_SERIES_GAP {
        // log(1+x)/x = 1 − x/2 + x²/3 − x³/4 + …
        let series = 1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0;
        series / lo
    } else {
        x.ln_1p() / (hi - lo)
    }
}

/// The pair integral ∫₀^∞ t·[1/((a+t)³(b+t)²) + 1/((b+t)³(a+t)²)] dt, in the
/// form 1/(2Δ²)(1/a + 1/b) − log(a/b)/Δ³ with Δ = a − b.
pub fn q43_bracket(a: f64, b: f64) -> f64 {
    let d = a - b;
    let x = d / b;
    if x.abs() < Q43_SERIES_GAP {
        // b³·bracket = Σ (−1)^k (k+1)/(2(k+3)) x^k
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..14 {
            let coef = (k as f64 + 1.0) / (2.0 * (k as f64 + 3.0));
            sum += if k % 2 == 0 { coef * pow } else { -coef * pow };
            pow *= x;
        }
        sum / (b * b * b)
    } else {
        (1.0 / a + 1.0 / b) / (2.0 * d * d) - x.ln_1p() / (d * d * d)
    }
}

/// log[c, c, p, q]: the divided difference of log with the node `c` doubled,
/// written as the three-index bracket
/// 1/(c(c−p)(c−q)) + log(p/c)/((p−c)²(p−q)) + log(q/c)/((q−c)²(q−p)).
pub fn log_dd_double(c: f64, p: f64, q: f64) -> f64 {
    1.0 / (c * (c - p) * (c - q))
        + (p / c).ln() / ((p - c) * (p - c) * (p - q))
        + (q / c).ln() / ((q - c) * (q - c) * (q - p))
}

/// ∫₀^∞ t dt / ((a+t)²(b+t)(c+t)(d+t)) for distinct a, b, c, d, by partial
/// fractions. This is the confluent divided difference of x log x on the
/// nodes {a, a, b, c, d}.
pub fn quartic_double_node_integral(a: f64, others: [f64; 3]) -> f64 {
    let phi = |x: f64| x * x.ln();
    let dphi = |x: f64| x.ln() + 1.0;
    let p: f64 = others.iter().map(|x| a - x).product();
    let inv_sum: f64 = others.iter().map(|x| 1.0 / (a - x)).sum();
    let mut total = dphi(a) / p - phi(a) / p * inv_sum;
    for (i, &xi) in others.iter().enumerate() {
        let mut q = (xi - a) * (xi - a);
        for (j, &xj) in others.iter().enumerate() {
            if j != i {
                q *= xi - xj;
            }
        }
        total += phi(xi) / q;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson on t = s/(1-s); reference only.
    fn integrate(f: impl Fn(f64) -> f64) -> f64 {
        let n = 400_000;
        let h = 1.0 / n as f64;
        let g = |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let t = s / (1.0 - s);
            f(t) / ((1.0 - s) * (1.0 - s))
        };
        let mut sum = g(0.0) + g(1.0 - 1e-12);
        for i in 1..n {
            let s = i as f64 * h;
            sum += if i % 2 == 1 { 4.0 * g(s) } else { 2.0 * g(s) };
        }
        sum * h / 3.0
    }

    #[test]
    fn log_slope_limits_and_symmetry() {
        assert_eq!(log_slope(0.5, 0.5), 2.0);
        let exact = (0.75f64.ln() - 0.25f64.ln()) / 0.5;
        assert!((log_slope(0.75, 0.25) - exact).abs() < 1e-15);
        assert_eq!(log_slope(0.25, 0.75), log_slope(0.75, 0.25));
        // both sides of the series switch stay at full precision
        let b = 0.3;
        for x in [0.999e-6, 1.001e-6] {
            let a = b * (1.0 + x);
            let x = (a - b) / b;
            let reference = (1.0 - x / 2.0 + x * x / 3.0 - x * x * x / 4.0) / b;
            assert!((log_slope(a, b) - reference).abs() < 1e-15 * reference);
        }
    }

    #[test]
    fn log_slope_matches_integral() {
        // ∫ 1/((a+t)(b+t)) dt = log_slope(a, b)
        let (a, b) = (0.6, 0.15);
        let r = integrate(|t| 1.0 / ((a + t) * (b + t)));
        assert!((r - log_slope(a, b)).abs() < 1e-9);
    }

    #[test]
    fn q43_bracket_matches_integral_and_series() {
        let (a, b) = (0.5, 0.2);
        let r = integrate(|t| t / ((a + t).powi(3) * (b + t).powi(2)) + t / ((b + t).powi(3) * (a + t).powi(2)));
        assert!((r - q43_bracket(a, b)).abs() < 1e-8, "{r} vs {}", q43_bracket(a, b));
        // limit a → b is 1/(6 b³)
        assert!((q43_bracket(0.3, 0.3) - 1.0 / (6.0 * 0.027)).abs() < 1e-12);
        let near = q43_bracket(0.3 * (1.0 + 0.0099), 0.3);
        let far = q43_bracket(0.3 * (1.0 + 0.0101), 0.3);
        assert!((near - far).abs() / far < 1e-3);
        assert_eq!(q43_bracket(0.2, 0.5), q43_bracket(0.5, 0.2));
    }

    #[test]
    fn log_dd_double_matches_integral() {
        // ∫ t/((c+t)³(p+t)(q+t)) + cyclic rotations of the walk c→p→c→q
        // reduce to log[c,c,p,q]; check the bracket via −d/dc log[c,p,q].
        let (c, p, q) = (0.4, 0.25, 0.1);
        let dd3 = |c: f64| c.ln() / ((c - p) * (c - q)) + p.ln() / ((p - c) * (p - q)) + q.ln() / ((q - c) * (q - p));
        let h = 1e-5;
        let deriv = (dd3(c + h) - dd3(c - h)) / (2.0 * h);
        assert!((deriv - log_dd_double(c, p, q)).abs() < 1e-7);
    }

    #[test]
    fn quartic_double_node_integral_matches_quadrature() {
        let (a, o) = (0.35, [0.3, 0.2, 0.15]);
        let r = integrate(|t| t / ((a + t).powi(2) * (o[0] + t) * (o[1] + t) * (o[2] + t)));
        let closed = quartic_double_node_integral(a, o);
        assert!((r - closed).abs() < 1e-8 * closed.abs().max(1.0), "{r} vs {closed}");
    }
}

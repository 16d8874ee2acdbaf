//! Digamma function for positive real arguments.

/// Shift threshold for the asymptotic expansion; at `x >= 10` the truncated
/// series below is accurate to a few ulps.
const ASYMPTOTIC_FROM: f64 = 10.0;

/// `ψ(x) = d/dx ln Γ(x)` for `x > 0`; NaN otherwise.
///
/// Small arguments are shifted up with `ψ(x) = ψ(x + 1) - 1/x`, then the
/// Bernoulli asymptotic series is summed through the `z^-14` term.
pub fn digamma(x: f64) -> f64 {
    if !x.is_finite() || x <= 0.0 {
        return f64::NAN;
    }
    let mut shift = 0.0;
    let mut z = x;
    while z < ASYMPTOTIC_FROM {
        shift -= 1.0 / z;
        z += 1.0;
    }
    let r = 1.0 / z;
    let r2 = r * r;
    let tail = r2
        * (1.0 / 12.0
            - r2 * (1.0 / 120.0
                - r2 * (1.0 / 252.0
                    - r2 * (1.0 / 240.0 - r2 * (1.0 / 132.0 - r2 * (691.0 / 32760.0 - r2 / 12.0))))));
    shift + z.ln() - 0.5 * r - tail
}

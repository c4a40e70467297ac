//! Integer-order gamma helpers.

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

pub fn factorial(n: u32) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient as a float.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `e^(-z) * sum_{k<j} z^k / k!`, the regularized upper incomplete gamma
/// `Gamma(j, z) / (j-1)!` for integer `j >= 1`.
pub fn regularized_upper_gamma_int(j: u32, z: f64) -> f64 {
    assert!(j >= 1, "order must be positive");
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..j {
        term *= z / k as f64;
        sum += term;
    }
    (-z).exp() * sum
}

/// Upper incomplete gamma `Gamma(j, z)` for integer order `j >= 1` and `z >= 0`.
pub fn upper_incomplete_gamma_int(j: u32, z: f64) -> f64 {
    // factorial in log space so large orders do not overflow before the
    // exponential factor is applied
    let reg = regularized_upper_gamma_int(j, z);
    if reg == 0.0 {
        return 0.0;
    }
    (ln_factorial(j - 1) + reg.ln()).exp()
}

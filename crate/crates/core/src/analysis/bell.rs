//! Complete Bell polynomials, used to differentiate `exp(g(s))`:
//! `dⁿ/dsⁿ e^{g} = e^{g} · Bₙ(g′, g″, …, g⁽ⁿ⁾)`.

/// Returns `[B₀, B₁, …, Bₙ]` evaluated at `x = [x₁, …, xₙ]`, via
/// `B_{k+1} = Σ_{j=0}^{k} C(k, j) B_{k−j} x_{j+1}`.
pub fn complete_bell(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut b = Vec::with_capacity(n + 1);
    b.push(1.0);
    for k in 0..n {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            acc += binom * b[k - j] * x[j];
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        b.push(acc);
    }
    b
}

/// Rising factorial `(m)ₙ = m (m+1) ⋯ (m+n−1)`.
pub fn rising_factorial(m: u32, n: u32) -> f64 {
    (0..n).map(|k| (m + k) as f64).product()
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

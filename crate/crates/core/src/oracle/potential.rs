use crate::error::{Error, Result};

/// Concave potential applied to the number of jobs on the fuller machine:
///
/// ```text
/// g(x) = x (ln sqrt(n) + 2 - ln x)   for x <= sqrt(n)
/// g(x) = 3 sqrt(n) - n / x           otherwise
/// ```
///
/// with `g(0) = 0`. Increasing and continuous on `[0, n]`, bounded by `3 sqrt(n)`.
pub fn potential_g(x: f64, n: u64) -> Result<f64> {
    let nf = n as f64;
    if n == 0 || !(0.0..=nf).contains(&x) {
        return Err(Error::OutOfRange { value: x, lo: 0.0, hi: nf });
    }
    let root = nf.sqrt();
    Ok(if x == 0.0 {
        0.0
    } else if x <= root {
        x * (root.ln() + 2.0 - x.ln())
    } else {
        3.0 * root - nf / x
    })
}

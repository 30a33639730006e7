//! Exact binomial coefficients on `u128`; overflow is reported, never wrapped.

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1); divide out the gcd first to delay overflow
        let num = n - i;
        let den = i + 1;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let num = num / d;
        acc = a.checked_mul(num)?;
    }
    Some(acc)
}

/// Generalised binomial `x (x-1) ... (x-k+1) / k!` for real `x`.
pub fn binomial_real(x: f64, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (x - i as f64) / (i + 1) as f64;
    }
    acc
}

/// Small-argument binomial for indexing; panics on overflow.
pub(crate) fn small(n: usize, k: usize) -> usize {
    binomial(n as u128, k as u128)
        .and_then(|v| usize::try_from(v).ok())
        .expect("binomial overflow")
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

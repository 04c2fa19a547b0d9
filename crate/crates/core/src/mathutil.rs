//! Small numeric helpers shared across modules.

#[cfg_attr(test, allow(unused_imports))] // std shadows these methods in tests
use num_traits::Float;

/// Degree-domain sine with exact values at quadrant angles.
///
/// `theta` in degrees. Exactness at 0/90/180/270 matters: it keeps axis
/// aligned kernels confined to a single row or column and puts transfer
/// function zeros exactly on their lines.
pub fn sin_deg(theta: f64) -> f64 {
    let mut t = theta % 360.0;
    if t < 0.0 {
        t += 360.0;
    }
    if t == 0.0 || t == 180.0 {
        0.0
    } else if t == 90.0 {
        1.0
    } else if t == 270.0 {
        -1.0
    } else {
        (t * core::f64::consts::PI / 180.0).sin()
    }
}

/// Degree-domain cosine with exact values at quadrant angles.
pub fn cos_deg(theta: f64) -> f64 {
    sin_deg(theta + 90.0)
}

/// Compensated (Neumaier) summation.
///
/// Keeps the kernel-normalization and moment sums accurate to ~1 ulp even
/// for tens of thousands of terms, which the 1e-12 kernel-sum invariant
/// needs.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Signed centered alias of DFT bin `k` for transform size `n`.
///
/// Maps `0..n` onto `[-n/2, n/2)`: bins up to `(n-1)/2` keep their index,
/// the rest wrap negative.
pub fn centered_bin(k: usize, n: usize) -> i64 {
    let k = k as i64;
    let n = n as i64;
    if k <= (n - 1) / 2 {
        k
    } else {
        k - n
    }
}

/// Inverse of [`centered_bin`]: raw storage index of a centered bin.
///
/// `c` must lie in `[-n/2, n/2)`.
pub fn raw_bin(c: i64, n: usize) -> usize {
    let n = n as i64;
    debug_assert!(c >= -(n / 2) && c < n - n / 2 + if n % 2 == 0 { 0 } else { 1 });
    ((c + n) % n) as usize
}

/// Binomial coefficient for the small orders used by moment algebra.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

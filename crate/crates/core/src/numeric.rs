//! Small numeric helpers shared across modules.

/// Absolute tolerance for comparisons of sums of probabilities.
pub const PROB_TOL: f64 = 1e-12;

/// Maps a finite `f64` to a `u64` whose unsigned order matches the float order.
#[inline]
fn order_key(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

#[inline]
fn from_order_key(key: u64) -> f64 {
    if key >> 63 == 1 {
        f64::from_bits(key & !(1 << 63))
    } else {
        f64::from_bits(!key)
    }
}

/// Smallest float `x` in `(lo, hi]` with `pred(x)`, for a predicate that is
/// monotone (false then true) on the interval.
///
/// `pred(lo)` is taken to be false and `pred(hi)` true; neither endpoint is
/// evaluated. The search halves the interval in the ordered bit
/// representation, so it terminates after at most 64 evaluations and the
/// result is exact to one ulp: the float just below the result fails `pred`.
pub fn float_threshold(lo: f64, hi: f64, mut pred: impl FnMut(f64) -> bool) -> f64 {
    debug_assert!(lo.is_finite() && hi.is_finite() && lo < hi);
    let mut l = order_key(lo);
    let mut h = order_key(hi);
    while h - l > 1 {
        let mid = l + (h - l) / 2;
        if pred(from_order_key(mid)) {
            h = mid;
        } else {
            l = mid;
        }
    }
    from_order_key(h)
}

/// Evenly spaced points `k / resolution` for `k = 0..=resolution`.
pub fn unit_grid(resolution: usize) -> Vec<f64> {
    (0..=resolution)
        .map(|k| k as f64 / resolution as f64)
        .collect()
}

/// Formats a float with nine significant digits, the CSV convention.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.8e}", x);
    // Re-parse so that plain decimals print without exponent where short.
    let v: f64 = s.parse().unwrap_or(x);
    let plain = format!("{}", v);
    if plain.len() <= 16 {
        plain
    } else {
        s
    }
}

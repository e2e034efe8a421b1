use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::specfun::log_gamma;

const MAX_TERMS: usize = 100_000;

/// Gauss hypergeometric series `2F1(a, b; c; z)` for real `z` in `[0, 1)`.
///
/// Summed term by term until two consecutive terms fall below machine
/// precision relative to the partial sum; the remaining tail is then
/// estimated from the last term ratio as a geometric series. Accuracy is
/// around 1e-13 for `z <= 0.9` and degrades as `z -> 1`, where the series
/// needs O(1/(1-z)) terms.
pub fn gauss_2f1<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>, z: T) -> Result<Complex<T>> {
    if c.im == T::zero() && c.re <= T::zero() && c.re == c.re.round() {
        return Err(Error::Domain(format!("2F1: c = {} is a non-positive integer", c.re)));
    }
    if !(z >= T::zero() && z < T::one()) {
        return Err(Error::Domain(format!("2F1: z = {z} outside [0, 1)")));
    }
    let one = Complex::new(T::one(), T::zero());
    let mut term = one;
    let mut sum = one;
    if z == T::zero() {
        return Ok(sum);
    }
    let eps = T::epsilon();
    let mut small_run = 0;
    for k in 0..MAX_TERMS {
        let kk = T::lit(k as f64);
        let ratio = (a + kk) * (b + kk) / ((c + kk) * (kk + T::one())) * z;
        let next = term * ratio;
        if next == Complex::new(T::zero(), T::zero()) {
            return Ok(sum);
        }
        sum = sum + next;
        term = next;
        if term.norm() <= eps * sum.norm() && ratio.norm() < T::one() {
            small_run += 1;
            if small_run >= 2 {
                let tail = term * ratio / (one - ratio);
                return Ok(sum + tail);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence(format!(
        "2F1 series exceeded {MAX_TERMS} terms at z = {z}"
    )))
}

/// `2F1(a, b; c; z)` on all of `[0, 1)`, with `w = 1 − z` supplied by the
/// caller so that points close to `z = 1` keep their relative accuracy.
///
/// For `z > 1/2` the value is assembled from the two series in `w`
/// (the `z → 1 − z` connection formula), which needs `c − a − b` to be
/// non-integer.
pub fn gauss_2f1_reflected<T: Scalar>(a: Complex<T>, b: Complex<T>, c: Complex<T>, z: T, w: T) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    if z <= half {
        return gauss_2f1(a, b, c, z);
    }
    if !(w > T::zero() && w < T::one()) {
        return Err(Error::Domain(format!("2F1: 1 - z = {w} outside (0, 1)")));
    }
    let s = c - a - b;
    let tiny = T::lit(1e-12);
    if s.im.abs() < tiny && (s.re - s.re.round()).abs() < tiny {
        return Err(Error::Domain(format!("2F1: c - a - b = {} is an integer", s.re)));
    }
    let one = Complex::new(T::one(), T::zero());
    let lg = log_gamma::<T>;
    let first = (lg(c)? + lg(s)? - lg(c - a)? - lg(c - b)?).exp() * gauss_2f1(a, b, one - s, w)?;
    let second = (lg(c)? + lg(-s)? - lg(a)? - lg(b)? + s * w.ln()).exp() * gauss_2f1(c - a, c - b, one + s, w)?;
    Ok(first + second)
}

use num_complex::Complex;

use crate::scalar::Scalar;

/// Generalized Laguerre polynomial `L_n^alpha(x)` by forward recurrence.
///
/// Any real `alpha` is accepted; the irregular branches need negative ones.
pub fn laguerre<T: Scalar>(n: u32, alpha: T, x: T) -> T {
    let one = T::one();
    let mut prev = one;
    if n == 0 {
        return prev;
    }
    let mut cur = one + alpha - x;
    for k in 1..n {
        let k = T::of_u32(k);
        let next = ((k + k + one + alpha - x) * cur - (k + alpha) * prev) / (k + one);
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial `P_n^(a,b)(z)` for complex parameters and argument.
///
/// Uses the three-term recurrence; when one of its denominators vanishes
/// (possible for negative `a + b`) it falls back to the finite binomial sum.
pub fn jacobi<T: Scalar>(n: u32, a: Complex<T>, b: Complex<T>, z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let two = one + one;
    if n == 0 {
        return one;
    }
    let ab = a + b;
    let tiny = T::lit(1e-10);
    let degenerate = (2..=n).any(|k| {
        let k = Complex::new(T::of_u32(k), T::zero());
        (k + ab).norm() < tiny || (k + k + ab - two).norm() < tiny
    });
    if degenerate {
        return jacobi_binomial_sum(n, a, b, z);
    }

    let mut prev = one;
    let mut cur = (a + one) + (ab + two) * (z - one) / two;
    for k in 2..=n {
        let k = Complex::new(T::of_u32(k), T::zero());
        let s = k + k + ab;
        let denom = two * k * (k + ab) * (s - two);
        let c1 = (s - one) * (s * (s - two) * z + a * a - b * b);
        let c2 = two * (k + a - one) * (k + b - one) * s;
        let next = (c1 * cur - c2 * prev) / denom;
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_s C(n+a, n-s) C(n+b, s) ((z-1)/2)^s ((z+1)/2)^(n-s)`.
fn jacobi_binomial_sum<T: Scalar>(n: u32, a: Complex<T>, b: Complex<T>, z: Complex<T>) -> Complex<T> {
    let one = Complex::new(T::one(), T::zero());
    let two = one + one;
    let nn = Complex::new(T::of_u32(n), T::zero());
    let zm = (z - one) / two;
    let zp = (z + one) / two;
    let mut total = Complex::new(T::zero(), T::zero());
    for s in 0..=n {
        let c_a = binomial(nn + a, n - s);
        let c_b = binomial(nn + b, s);
        total = total + c_a * c_b * zm.powu(s) * zp.powu(n - s);
    }
    total
}

fn binomial<T: Scalar>(x: Complex<T>, k: u32) -> Complex<T> {
    let mut out = Complex::new(T::one(), T::zero());
    for j in 0..k {
        let j = T::of_u32(j);
        out = out * (x - j) / (j + T::one());
    }
    out
}

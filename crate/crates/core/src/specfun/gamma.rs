use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal-branch `ln Γ(z)`, continuous off the negative real axis.
///
/// Lanczos (g = 7, 9 terms) for `Re z >= 1/2`. Left of that line the value
/// is carried back by the upward recurrence `ln Γ(z) = ln Γ(z+m) - Σ ln(z+k)`,
/// which keeps the imaginary part on the continuous branch that `arg Γ`
/// phase sums rely on.
pub fn log_gamma<T: Scalar>(z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        return Err(Error::Pole(z.re.as_f64()));
    }
    let half = T::lit(0.5);
    if z.re >= half {
        return Ok(lanczos(z));
    }
    let steps = (half - z.re).ceil().to_u64().unwrap_or(0);
    let mut shifted = z;
    let mut logs = Complex::new(T::zero(), T::zero());
    for _ in 0..steps {
        logs = logs + shifted.ln();
        shifted = shifted + T::one();
    }
    Ok(lanczos(shifted) - logs)
}

/// `arg Γ(z)` on the continuous branch (imaginary part of [`log_gamma`]).
pub fn arg_gamma<T: Scalar>(z: Complex<T>) -> Result<T> {
    log_gamma(z).map(|v| v.im)
}

fn lanczos<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let x = z - T::one();
    let mut acc = Complex::new(T::lit(LANCZOS_COEF[0]), T::zero());
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + Complex::new(T::lit(c), T::zero()) / (x + T::lit(i as f64));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    let half_ln_two_pi = T::lit(0.918_938_533_204_672_8);
    let mut out = (x + half) * t.ln() - t + acc.ln() + half_ln_two_pi;

    // acc.ln() is only defined mod 2πi; pin the branch with Stirling's leading terms
    let stirling = (z - half) * z.ln() - z + half_ln_two_pi + (z * T::lit(12.0)).inv();
    let two_pi = T::PI() + T::PI();
    let k = ((stirling.im - out.im) / two_pi).round();
    out.im = out.im + k * two_pi;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// `arg Γ(1+iy) = ∫_0^∞ [y e^{-t} - e^{-t} sin(yt)/(1-e^{-t})] dt/t`,
    /// integrated with composite Simpson on a substituted variable.
    fn arg_gamma_one_plus_iy(y: f64) -> f64 {
        let f = |t: f64| {
            if t < 1e-8 {
                // limit of the integrand at t = 0
                return -y / 2.0;
            }
            let e = (-t).exp();
            (y * e - e * (y * t).sin() / (1.0 - e)) / t
        };
        // t = s/(1-s) maps [0,1) onto [0,inf)
        let n = 200_000;
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
    fn known_values() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-15);
        let half = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((half.re - 0.572_364_942_924_700_1).abs() < 1e-14);
        assert_eq!(half.im, 0.0);
        // ln Γ(10) = ln 362880
        let ten = log_gamma(c(10.0, 0.0)).unwrap();
        assert!((ten.re - 362_880f64.ln()).abs() < 1e-12 * 362_880f64.ln());
    }

    #[test]
    fn poles_rejected() {
        for k in 0..4 {
            assert!(matches!(log_gamma(c(-(k as f64), 0.0)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn arg_gamma_two_i_against_integral() {
        // arg Γ(2i) = arg Γ(1+2i) - arg(2i)
        let want = arg_gamma_one_plus_iy(2.0) - std::f64::consts::FRAC_PI_2;
        let got = arg_gamma(c(0.0, 2.0)).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn arg_gamma_along_imaginary_line_against_integral() {
        for &y in &[0.3, 1.0, 3.5, 7.0] {
            let want = arg_gamma_one_plus_iy(y);
            let got = arg_gamma(c(1.0, y)).unwrap();
            assert!((got - want).abs() < 1e-9, "y={y}: {got} vs {want}");
        }
    }

    #[test]
    fn continuous_branch_for_large_imaginary_part() {
        // Stirling: arg Γ(1/2 + iy) ≈ y ln y - y for large y, far beyond π
        let y = 40.0;
        let got = arg_gamma(c(0.5, y)).unwrap();
        let approx = y * y.ln() - y + 1.0 / (24.0 * y);
        assert!((got - approx).abs() < 1e-6, "{got} vs {approx}");
    }

    #[test]
    fn recurrence_identity() {
        for &z in &[c(0.3, 0.7), c(-2.4, 1.1), c(4.2, -3.0), c(-0.5, 0.0)] {
            let lhs = log_gamma(z + 1.0).unwrap();
            let rhs = log_gamma(z).unwrap() + z.ln();
            assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0), "{z}");
        }
    }

    #[test]
    fn reflection_lattice() {
        let pi = std::f64::consts::PI;
        for i in -6..=6 {
            for j in -4..=4 {
                let z = c(i as f64 * 0.37 + 0.13, j as f64 * 0.45);
                let lg = log_gamma(z).unwrap() + log_gamma(c(1.0, 0.0) - z).unwrap();
                let prod = lg.exp();
                let want = c(pi, 0.0) / (z * pi).sin();
                assert!((prod - want).norm() <= 1e-10 * want.norm(), "{z}: {prod} vs {want}");
            }
        }
    }

    #[test]
    fn f32_instantiation() {
        let v = log_gamma(Complex::new(0.5f32, 0.0)).unwrap();
        assert!((v.re - 0.572_364_9).abs() < 1e-5);
    }
}

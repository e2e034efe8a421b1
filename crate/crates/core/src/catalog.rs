//! The nine catalog potentials, their parameters and the rotation bookkeeping.
//!
//! Each potential is given by an even component `V(r)` and an odd component
//! `W(r)` tied together by `V = ξ (W + κ/r)`, so everything downstream works
//! with the single function `U(r) = W(r) + κ/r`. For the seven S-wave-type
//! rows `W` contains `-κ/r` and `U` is evaluated directly without it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Compton scale `λ̄ = 1/c` in atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativisticContext<T> {
    pub lambda_bar: T,
}

impl<T: Scalar> RelativisticContext<T> {
    pub fn new(lambda_bar: T) -> Result<Self> {
        if !(lambda_bar > T::zero()) || !lambda_bar.is_finite() {
            return Err(Error::Domain(format!("lambda_bar must be positive, got {lambda_bar}")));
        }
        Ok(Self { lambda_bar })
    }
}

/// Spin-orbit channel `κ = ±(j + 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularChannel {
    pub kappa: i32,
}

impl AngularChannel {
    pub fn new(kappa: i32) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::Domain("kappa must be nonzero".into()));
        }
        Ok(Self { kappa })
    }

    /// Orbital quantum number: `κ = ℓ` for `κ > 0`, `κ = -ℓ-1` for `κ < 0`.
    pub fn ell(&self) -> u32 {
        if self.kappa > 0 {
            self.kappa as u32
        } else {
            (-self.kappa - 1) as u32
        }
    }

    /// Twice the total angular momentum.
    pub fn two_j(&self) -> u32 {
        2 * self.kappa.unsigned_abs() - 1
    }

    pub fn kappa_as<T: Scalar>(&self) -> T {
        T::lit(self.kappa as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Scalar>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Regular,
    Irregular,
}

/// Global rotation by `λ̄η` with `sin(λ̄η) = sign·λ̄ξ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParameters<T> {
    pub eta: T,
    pub s: T,
    pub c: T,
    pub t: T,
    pub xi: T,
    pub sign: Sign,
}

impl<T: Scalar> TransformParameters<T> {
    /// Rotation angle `θ = λ̄η` (principal arcsine branch, so `C > 0`).
    pub fn theta(&self) -> T {
        self.s.asin()
    }
}

/// Identifies a catalog row without its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Coulomb,
    Oscillator,
    Morse,
    RosenMorseI,
    Eckart,
    #[serde(rename = "rosen_morse_ii")]
    RosenMorseII,
    Scarf,
    PoschlTeller,
    WoodsSaxon,
}

impl PotentialKind {
    pub const ALL: [PotentialKind; 9] = [
        PotentialKind::Coulomb,
        PotentialKind::Oscillator,
        PotentialKind::Morse,
        PotentialKind::RosenMorseI,
        PotentialKind::Eckart,
        PotentialKind::RosenMorseII,
        PotentialKind::Scarf,
        PotentialKind::PoschlTeller,
        PotentialKind::WoodsSaxon,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::Coulomb => "coulomb",
            PotentialKind::Oscillator => "oscillator",
            PotentialKind::Morse => "morse",
            PotentialKind::RosenMorseI => "rosen_morse_i",
            PotentialKind::Eckart => "eckart",
            PotentialKind::RosenMorseII => "rosen_morse_ii",
            PotentialKind::Scarf => "scarf",
            PotentialKind::PoschlTeller => "poschl_teller",
            PotentialKind::WoodsSaxon => "woods_saxon",
        }
    }

    /// Accepts the snake_case names plus a few common spellings.
    pub fn parse(name: &str) -> Option<Self> {
        let key: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Some(match key.as_str() {
            "coulomb" => PotentialKind::Coulomb,
            "oscillator" | "diracoscillator" => PotentialKind::Oscillator,
            "morse" => PotentialKind::Morse,
            "rosenmorsei" | "rosenmorse1" | "rm1" | "rmi" => PotentialKind::RosenMorseI,
            "eckart" => PotentialKind::Eckart,
            "rosenmorseii" | "rosenmorse2" | "rm2" | "rmii" => PotentialKind::RosenMorseII,
            "scarf" => PotentialKind::Scarf,
            "poschlteller" | "pt" => PotentialKind::PoschlTeller,
            "woodssaxon" | "ws" => PotentialKind::WoodsSaxon,
            _ => return None,
        })
    }

    /// Whether `U` depends on κ (only the two rows without `-κ/r` in `W`).
    pub fn kappa_dependent(self) -> bool {
        matches!(self, PotentialKind::Coulomb | PotentialKind::Oscillator)
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Boundary structure of the radial problem for a catalog row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `r ∈ (0, ∞)` with `U ~ u/r`, `V ~ v/r` at the origin.
    HalfLineSingular,
    /// `r ∈ [0, ∞)` with `U` regular and `φ⁺(0) = 0`.
    HalfLineDirichlet,
    /// `r ∈ (-∞, ∞)`: the closed forms are exact only on the whole line.
    FullLine,
}

/// One of the nine catalog potentials with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "potential", content = "params", rename_all = "snake_case")]
pub enum PotentialSpec<T> {
    Coulomb {
        #[serde(rename = "Z")]
        z: T,
    },
    Oscillator {
        omega: T,
    },
    Morse {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    #[serde(rename = "rosen_morse_i")]
    RosenMorseI {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    Eckart {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    #[serde(rename = "rosen_morse_ii")]
    RosenMorseII {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    Scarf {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    PoschlTeller {
        #[serde(rename = "A")]
        a: T,
        #[serde(rename = "B")]
        b: T,
        lambda: T,
    },
    WoodsSaxon {
        #[serde(rename = "B")]
        b: T,
        #[serde(rename = "R")]
        r0: T,
        lambda: T,
    },
}

impl<T: Scalar> PotentialSpec<T> {
    /// Morse in the oscillator-image parameterization: range `τ`, `T = λ̄B/A`
    /// and oscillator frequency `ω`, so that `C·U = -(τω²/2) e^{-τr}`.
    pub fn morse_from_oscillator(tau: T, t: T, omega: T, ctx: &RelativisticContext<T>) -> Self {
        let a = tau * omega * omega / T::lit(2.0);
        PotentialSpec::Morse { a, b: t * a / ctx.lambda_bar, lambda: tau }
    }

    pub fn kind(&self) -> PotentialKind {
        match self {
            PotentialSpec::Coulomb { .. } => PotentialKind::Coulomb,
            PotentialSpec::Oscillator { .. } => PotentialKind::Oscillator,
            PotentialSpec::Morse { .. } => PotentialKind::Morse,
            PotentialSpec::RosenMorseI { .. } => PotentialKind::RosenMorseI,
            PotentialSpec::Eckart { .. } => PotentialKind::Eckart,
            PotentialSpec::RosenMorseII { .. } => PotentialKind::RosenMorseII,
            PotentialSpec::Scarf { .. } => PotentialKind::Scarf,
            PotentialSpec::PoschlTeller { .. } => PotentialKind::PoschlTeller,
            PotentialSpec::WoodsSaxon { .. } => PotentialKind::WoodsSaxon,
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            PotentialSpec::Morse { .. } | PotentialSpec::RosenMorseI { .. } | PotentialSpec::Scarf { .. } => {
                Domain::FullLine
            }
            PotentialSpec::WoodsSaxon { .. } => Domain::HalfLineDirichlet,
            _ => Domain::HalfLineSingular,
        }
    }

    /// Range parameter `λ`, if the row has one.
    pub fn range(&self) -> Option<T> {
        match *self {
            PotentialSpec::Coulomb { .. } | PotentialSpec::Oscillator { .. } => None,
            PotentialSpec::Morse { lambda, .. }
            | PotentialSpec::RosenMorseI { lambda, .. }
            | PotentialSpec::Eckart { lambda, .. }
            | PotentialSpec::RosenMorseII { lambda, .. }
            | PotentialSpec::Scarf { lambda, .. }
            | PotentialSpec::PoschlTeller { lambda, .. }
            | PotentialSpec::WoodsSaxon { lambda, .. } => Some(lambda),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: T, name: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::Domain(format!("{name} must be finite")))
            }
        };
        if let Some(l) = self.range() {
            if !(l > T::zero()) || !l.is_finite() {
                return Err(Error::Domain(format!("range lambda must be positive, got {l}")));
            }
        }
        match *self {
            PotentialSpec::Coulomb { z } => finite(z, "Z"),
            PotentialSpec::Oscillator { omega } => {
                if omega < T::zero() || !omega.is_finite() {
                    Err(Error::Domain(format!("omega must be non-negative, got {omega}")))
                } else {
                    Ok(())
                }
            }
            PotentialSpec::Morse { a, b, .. }
            | PotentialSpec::RosenMorseI { a, b, .. }
            | PotentialSpec::Eckart { a, b, .. } => {
                finite(a, "A")?;
                finite(b, "B")?;
                if a == T::zero() {
                    Err(Error::Domain("A must be nonzero".into()))
                } else {
                    Ok(())
                }
            }
            PotentialSpec::RosenMorseII { a, b, .. }
            | PotentialSpec::Scarf { a, b, .. }
            | PotentialSpec::PoschlTeller { a, b, .. } => {
                finite(a, "A")?;
                finite(b, "B")
            }
            PotentialSpec::WoodsSaxon { b, r0, .. } => {
                finite(b, "B")?;
                if !(r0 > T::zero()) || !r0.is_finite() {
                    Err(Error::Domain(format!("R must be positive, got {r0}")))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// `τ`: `sgn(A)·√(A² + λ̄²B²)` for Morse/RM-I/Eckart, `√(λ² + λ̄²B²)` for
    /// Woods-Saxon. The sign convention keeps `C = A/τ` positive.
    pub fn tau(&self, ctx: &RelativisticContext<T>) -> Option<T> {
        let lb = ctx.lambda_bar;
        match *self {
            PotentialSpec::Morse { a, b, .. }
            | PotentialSpec::RosenMorseI { a, b, .. }
            | PotentialSpec::Eckart { a, b, .. } => Some((a * a + lb * lb * b * b).sqrt() * a.signum()),
            PotentialSpec::WoodsSaxon { b, lambda, .. } => Some((lambda * lambda + lb * lb * b * b).sqrt()),
            _ => None,
        }
    }

    /// Constraint coefficient `ξ` in `V = ξ U`.
    pub fn xi(&self, ctx: &RelativisticContext<T>, chan: &AngularChannel) -> T {
        match *self {
            PotentialSpec::Coulomb { z } => z / chan.kappa_as::<T>(),
            PotentialSpec::Morse { b, .. } | PotentialSpec::RosenMorseI { b, .. } | PotentialSpec::Eckart { b, .. } => {
                b / self.tau(ctx).unwrap_or_else(T::one)
            }
            PotentialSpec::WoodsSaxon { b, .. } => -b / self.tau(ctx).unwrap_or_else(T::one),
            _ => T::zero(),
        }
    }

    /// Even component `V(r)`.
    pub fn v(&self, ctx: &RelativisticContext<T>, r: T) -> T {
        let _ = ctx;
        match *self {
            PotentialSpec::Coulomb { z } => z / r,
            PotentialSpec::Morse { b, lambda, .. } => -b * (-lambda * r).exp(),
            PotentialSpec::RosenMorseI { b, lambda, .. } => b * (lambda * r).tanh(),
            PotentialSpec::Eckart { b, lambda, .. } => b / (lambda * r).tanh(),
            PotentialSpec::WoodsSaxon { b, r0, lambda } => -b * logistic(lambda * (r - r0)),
            _ => T::zero(),
        }
    }

    /// Odd component `W(r)` as listed in the catalog (including `-κ/r`).
    pub fn w(&self, ctx: &RelativisticContext<T>, chan: &AngularChannel, r: T) -> T {
        self.u(ctx, chan, r) - chan.kappa_as::<T>() / r
    }

    /// `U(r) = W(r) + κ/r`, evaluated without forming `W`.
    pub fn u(&self, ctx: &RelativisticContext<T>, chan: &AngularChannel, r: T) -> T {
        let kappa = chan.kappa_as::<T>();
        match *self {
            PotentialSpec::Coulomb { .. } => kappa / r,
            PotentialSpec::Oscillator { omega } => omega * omega * r + kappa / r,
            PotentialSpec::Morse { lambda, .. } => -self.tau(ctx).unwrap_or_else(T::zero) * (-lambda * r).exp(),
            PotentialSpec::RosenMorseI { lambda, .. } => self.tau(ctx).unwrap_or_else(T::zero) * (lambda * r).tanh(),
            PotentialSpec::Eckart { lambda, .. } => self.tau(ctx).unwrap_or_else(T::zero) / (lambda * r).tanh(),
            PotentialSpec::RosenMorseII { a, b, lambda } => {
                let x = lambda * r;
                (a * x.cosh() - b) / x.sinh()
            }
            PotentialSpec::Scarf { a, b, lambda } => {
                let x = lambda * r;
                (a * x.sinh() + b) / x.cosh()
            }
            PotentialSpec::PoschlTeller { a, b, lambda } => {
                let x = lambda * r;
                -a * x.tanh() - b / x.tanh()
            }
            PotentialSpec::WoodsSaxon { r0, lambda, .. } => {
                self.tau(ctx).unwrap_or_else(T::zero) * logistic(lambda * (r - r0))
            }
        }
    }

    /// `dU/dr`, analytic.
    pub fn u_prime(&self, ctx: &RelativisticContext<T>, chan: &AngularChannel, r: T) -> T {
        let kappa = chan.kappa_as::<T>();
        match *self {
            PotentialSpec::Coulomb { .. } => -kappa / (r * r),
            PotentialSpec::Oscillator { omega } => omega * omega - kappa / (r * r),
            PotentialSpec::Morse { lambda, .. } => {
                lambda * self.tau(ctx).unwrap_or_else(T::zero) * (-lambda * r).exp()
            }
            PotentialSpec::RosenMorseI { lambda, .. } => {
                let s = (lambda * r).cosh();
                lambda * self.tau(ctx).unwrap_or_else(T::zero) / (s * s)
            }
            PotentialSpec::Eckart { lambda, .. } => {
                let s = (lambda * r).sinh();
                -lambda * self.tau(ctx).unwrap_or_else(T::zero) / (s * s)
            }
            PotentialSpec::RosenMorseII { a, b, lambda } => {
                let x = lambda * r;
                let s = x.sinh();
                lambda * (b * x.cosh() - a) / (s * s)
            }
            PotentialSpec::Scarf { a, b, lambda } => {
                let x = lambda * r;
                let c = x.cosh();
                lambda * (a - b * x.sinh()) / (c * c)
            }
            PotentialSpec::PoschlTeller { a, b, lambda } => {
                let x = lambda * r;
                let (c, s) = (x.cosh(), x.sinh());
                lambda * (-a / (c * c) + b / (s * s))
            }
            PotentialSpec::WoodsSaxon { r0, lambda, .. } => {
                let p = logistic(lambda * (r - r0));
                -lambda * self.tau(ctx).unwrap_or_else(T::zero) * p * (T::one() - p)
            }
        }
    }

    /// Residues `(u, v)` of `U ~ u/r` and `V ~ v/r` at the origin, for
    /// [`Domain::HalfLineSingular`] rows.
    pub fn origin_residues(&self, ctx: &RelativisticContext<T>, chan: &AngularChannel) -> Option<(T, T)> {
        let kappa = chan.kappa_as::<T>();
        match *self {
            PotentialSpec::Coulomb { z } => Some((kappa, z)),
            PotentialSpec::Oscillator { .. } => Some((kappa, T::zero())),
            PotentialSpec::Eckart { b, lambda, .. } => Some((self.tau(ctx)? / lambda, b / lambda)),
            PotentialSpec::RosenMorseII { a, b, lambda } => Some(((a - b) / lambda, T::zero())),
            PotentialSpec::PoschlTeller { b, lambda, .. } => Some((-b / lambda, T::zero())),
            _ => None,
        }
    }

    /// Limits of `(U, V)` as `r → +∞`; `None` for the confining oscillator.
    pub fn asymptote_right(&self, ctx: &RelativisticContext<T>) -> Option<(T, T)> {
        let zero = T::zero();
        match *self {
            PotentialSpec::Coulomb { .. } | PotentialSpec::Morse { .. } | PotentialSpec::WoodsSaxon { .. } => {
                Some((zero, zero))
            }
            PotentialSpec::Oscillator { .. } => None,
            PotentialSpec::RosenMorseI { b, .. } | PotentialSpec::Eckart { b, .. } => Some((self.tau(ctx)?, b)),
            PotentialSpec::RosenMorseII { a, .. } | PotentialSpec::Scarf { a, .. } => Some((a, zero)),
            PotentialSpec::PoschlTeller { a, b, .. } => Some((-(a + b), zero)),
        }
    }

    /// Limits of `(U, V)` as `r → -∞` for full-line rows. Morse is confining
    /// there (`U → -∞`) and returns `None`.
    pub fn asymptote_left(&self, ctx: &RelativisticContext<T>) -> Option<(T, T)> {
        match *self {
            PotentialSpec::RosenMorseI { b, .. } => Some((-self.tau(ctx)?, -b)),
            PotentialSpec::Scarf { a, .. } => Some((-a, T::zero())),
            _ => None,
        }
    }

    /// Short human-readable parameter list.
    pub fn describe(&self) -> String {
        match *self {
            PotentialSpec::Coulomb { z } => format!("Z={z}"),
            PotentialSpec::Oscillator { omega } => format!("omega={omega}"),
            PotentialSpec::Morse { a, b, lambda }
            | PotentialSpec::RosenMorseI { a, b, lambda }
            | PotentialSpec::Eckart { a, b, lambda }
            | PotentialSpec::RosenMorseII { a, b, lambda }
            | PotentialSpec::Scarf { a, b, lambda }
            | PotentialSpec::PoschlTeller { a, b, lambda } => format!("A={a} B={b} lambda={lambda}"),
            PotentialSpec::WoodsSaxon { b, r0, lambda } => format!("B={b} R={r0} lambda={lambda}"),
        }
    }
}

fn logistic<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        let e = (-x).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + x.exp())
    }
}

/// Rotation parameters for `spec` with the requested sign of `sin(λ̄η) = ±λ̄ξ`.
pub fn derive_transform<T: Scalar>(
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    chan: &AngularChannel,
    sign: Sign,
) -> Result<TransformParameters<T>> {
    spec.validate()?;
    let xi = spec.xi(ctx, chan);
    let s = sign.value::<T>() * ctx.lambda_bar * xi;
    if !(s.abs() < T::one()) {
        return Err(Error::Domain(format!(
            "|sin(lambda_bar*eta)| = |{s}| >= 1 for {} ({})",
            spec.kind(),
            spec.describe()
        )));
    }
    let c = (T::one() - s * s).sqrt();
    Ok(TransformParameters {
        eta: s.asin() / ctx.lambda_bar,
        s,
        c,
        t: s / c,
        xi,
        sign,
    })
}

/// `max_r |V(r) - ξ U(r)|`.
pub fn potential_constraint_check<T: Scalar>(
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    tp: &TransformParameters<T>,
    chan: &AngularChannel,
    r_grid: &[T],
) -> T {
    r_grid
        .iter()
        .map(|&r| (spec.v(ctx, r) - tp.xi * spec.u(ctx, chan, r)).abs())
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(lb: f64) -> RelativisticContext<f64> {
        RelativisticContext::new(lb).unwrap()
    }

    #[test]
    fn kind_serializes_as_its_name() {
        for k in PotentialKind::ALL {
            assert_eq!(serde_json::to_value(k).unwrap(), k.name());
            assert_eq!(serde_json::from_value::<PotentialKind>(k.name().into()).unwrap(), k);
        }
    }

    fn samples() -> Vec<PotentialSpec<f64>> {
        vec![
            PotentialSpec::Coulomb { z: -0.5 },
            PotentialSpec::Oscillator { omega: 1.2 },
            PotentialSpec::Morse { a: 2.0, b: 12.0, lambda: 1.0 },
            PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 },
            PotentialSpec::Eckart { a: -4.0, b: -30.0, lambda: 1.0 },
            PotentialSpec::RosenMorseII { a: 3.0, b: 4.0, lambda: 1.0 },
            PotentialSpec::Scarf { a: 3.0, b: 0.5, lambda: 1.0 },
            PotentialSpec::PoschlTeller { a: -8.0, b: 2.0, lambda: 1.0 },
            PotentialSpec::WoodsSaxon { b: 5.0, r0: 4.0, lambda: 2.0 },
        ]
    }

    #[test]
    fn free_coulomb_transform() {
        let tp = derive_transform(&PotentialSpec::Coulomb { z: 0.0 }, &ctx(0.1), &AngularChannel::new(2).unwrap(), Sign::Plus)
            .unwrap();
        assert_eq!((tp.eta, tp.c, tp.s), (0.0, 1.0, 0.0));
    }

    #[test]
    fn oscillator_has_no_rotation() {
        let tp = derive_transform(&PotentialSpec::Oscillator { omega: 1.0 }, &ctx(0.1), &AngularChannel::new(1).unwrap(), Sign::Plus)
            .unwrap();
        assert_eq!(tp.eta, 0.0);
        assert_eq!(tp.c, 1.0);
    }

    #[test]
    fn coulomb_arcsine_identity() {
        // λ̄Z/κ = 0.6
        let spec = PotentialSpec::Coulomb { z: 6.0 };
        let chan = AngularChannel::new(1).unwrap();
        for (sign, s) in [(Sign::Plus, 0.6), (Sign::Minus, -0.6)] {
            let tp = derive_transform(&spec, &ctx(0.1), &chan, sign).unwrap();
            assert!((tp.s - s).abs() < 1e-15);
            assert!((tp.c - 0.8).abs() < 1e-15);
            assert!((tp.s * tp.s + tp.c * tp.c - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn supercritical_coulomb_is_domain_error() {
        let r = derive_transform(&PotentialSpec::Coulomb { z: -12.0 }, &ctx(0.1), &AngularChannel::new(1).unwrap(), Sign::Plus);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn table_eta_values() {
        let c = ctx(0.05);
        let chan = AngularChannel::new(-1).unwrap();
        for spec in samples() {
            let tp = derive_transform(&spec, &c, &chan, Sign::Plus).unwrap();
            let want = match spec {
                PotentialSpec::Coulomb { z } => (0.05 * z / -1.0f64).asin(),
                PotentialSpec::Morse { b, .. } | PotentialSpec::RosenMorseI { b, .. } | PotentialSpec::Eckart { b, .. } => {
                    (0.05 * b / spec.tau(&c).unwrap()).asin()
                }
                PotentialSpec::WoodsSaxon { b, .. } => -(0.05 * b / spec.tau(&c).unwrap()).asin(),
                _ => 0.0,
            };
            assert!((tp.eta * 0.05 - want).abs() < 1e-15, "{}", spec.kind());
            assert!(tp.c > 0.0);
        }
    }

    #[test]
    fn constraint_holds_for_all_rows() {
        let c = ctx(0.05);
        let grid: Vec<f64> = (1..200).map(|i| i as f64 * 0.05).collect();
        for kappa in [-2, -1, 1, 3] {
            let chan = AngularChannel::new(kappa).unwrap();
            for spec in samples() {
                let tp = derive_transform(&spec, &c, &chan, Sign::Plus).unwrap();
                for &r in &grid {
                    let res = (spec.v(&c, r) - tp.xi * spec.u(&c, &chan, r)).abs();
                    assert!(res <= 1e-12 * (1.0 + spec.v(&c, r).abs()), "{} r={r}", spec.kind());
                }
            }
        }
    }

    #[test]
    fn rosen_morse_constraint_at_sample_points() {
        let c = ctx(0.1);
        let chan = AngularChannel::new(1).unwrap();
        let spec = PotentialSpec::RosenMorseI { a: 0.4, b: 2.0, lambda: 1.0 };
        let tp = derive_transform(&spec, &c, &chan, Sign::Plus).unwrap();
        assert!(potential_constraint_check(&spec, &c, &tp, &chan, &[0.5, 1.0, 2.0]) < 1e-12);
    }

    #[test]
    fn w_reproduces_table_column() {
        let c = ctx(0.1);
        let chan = AngularChannel::new(2).unwrap();
        let k = 2.0;
        let r = 0.83;
        for spec in samples() {
            let w = spec.w(&c, &chan, r);
            let want = match spec {
                PotentialSpec::Coulomb { .. } => 0.0,
                PotentialSpec::Oscillator { omega } => omega * omega * r,
                PotentialSpec::Morse { lambda, .. } => -spec.tau(&c).unwrap() * (-lambda * r).exp() - k / r,
                PotentialSpec::RosenMorseI { lambda, .. } => spec.tau(&c).unwrap() * (lambda * r).tanh() - k / r,
                PotentialSpec::Eckart { lambda, .. } => spec.tau(&c).unwrap() / (lambda * r).tanh() - k / r,
                PotentialSpec::RosenMorseII { a, b, lambda } => {
                    a / (lambda * r).tanh() - b / (lambda * r).sinh() - k / r
                }
                PotentialSpec::Scarf { a, b, lambda } => a * (lambda * r).tanh() + b / (lambda * r).cosh() - k / r,
                PotentialSpec::PoschlTeller { a, b, lambda } => {
                    -a * (lambda * r).tanh() - b / (lambda * r).tanh() - k / r
                }
                PotentialSpec::WoodsSaxon { r0, lambda, .. } => {
                    spec.tau(&c).unwrap() / (1.0 + (lambda * (r - r0)).exp()) - k / r
                }
            };
            assert!((w - want).abs() < 1e-13 * (1.0 + want.abs()), "{}", spec.kind());
        }
    }

    #[test]
    fn s_wave_rows_are_kappa_independent() {
        let c = ctx(0.1);
        for spec in samples() {
            if spec.kind().kappa_dependent() {
                continue;
            }
            let (c1, c2) = (AngularChannel::new(1).unwrap(), AngularChannel::new(-3).unwrap());
            for &r in &[0.3, 1.0, 2.5] {
                assert_eq!(spec.u(&c, &c1, r), spec.u(&c, &c2, r));
            }
        }
    }

    #[test]
    fn u_prime_matches_differences() {
        let c = ctx(0.1);
        let chan = AngularChannel::new(1).unwrap();
        for spec in samples() {
            for &r in &[0.4, 1.3, 3.0] {
                let h = 1e-5;
                let fd = (spec.u(&c, &chan, r + h) - spec.u(&c, &chan, r - h)) / (2.0 * h);
                let an = spec.u_prime(&c, &chan, r);
                assert!((fd - an).abs() < 1e-7 * (1.0 + an.abs()), "{} r={r}: {fd} {an}", spec.kind());
            }
        }
    }

    #[test]
    fn tau_relations() {
        let c = ctx(0.1);
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let tau = spec.tau(&c).unwrap();
        assert!((tau * tau - (16.0 + 0.01 * 4.0)).abs() < 1e-14);
        let ws = PotentialSpec::WoodsSaxon { b: 5.0, r0: 4.0, lambda: 2.0 };
        let tau = ws.tau(&c).unwrap();
        assert!((tau * tau - (4.0 + 0.01 * 25.0)).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let spec = PotentialSpec::WoodsSaxon { b: 5.0, r0: 4.0, lambda: 2.0 };
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(s, r#"{"potential":"woods_saxon","params":{"B":5.0,"R":4.0,"lambda":2.0}}"#);
        let back: PotentialSpec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let c: PotentialSpec<f64> = serde_json::from_str(r#"{"potential":"coulomb","params":{"Z":-0.5}}"#).unwrap();
        assert_eq!(c, PotentialSpec::Coulomb { z: -0.5 });
    }

    #[test]
    fn channel_quantum_numbers() {
        assert_eq!(AngularChannel::new(1).unwrap().ell(), 1);
        assert_eq!(AngularChannel::new(-1).unwrap().ell(), 0);
        assert_eq!(AngularChannel::new(-3).unwrap().two_j(), 5);
        assert!(AngularChannel::new(0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let c = RelativisticContext::new(0.1f32).unwrap();
        let chan = AngularChannel::new(1).unwrap();
        let tp = derive_transform(&PotentialSpec::Coulomb { z: 6.0f32 }, &c, &chan, Sign::Plus).unwrap();
        assert!((tp.c - 0.8).abs() < 1e-6);
    }
}

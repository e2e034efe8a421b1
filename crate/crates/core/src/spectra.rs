//! Closed-form bound-state energies.
//!
//! Energies are total energies in units of the rest mass (`ε = 1` at
//! threshold for potentials vanishing at infinity). `Sign::Minus` negates
//! the positive-sign value. Irregular branches exist only for Coulomb,
//! Oscillator and Morse.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::catalog::{AngularChannel, Branch, PotentialKind, PotentialSpec, RelativisticContext, Sign, TransformParameters};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::specfun::arg_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState<T> {
    pub n: u32,
    pub branch: Branch,
    pub energy_sign: Sign,
    pub epsilon: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRequest<T> {
    pub spec: PotentialSpec<T>,
    pub ctx: RelativisticContext<T>,
    pub chan: AngularChannel,
    pub branch: Branch,
    pub energy_sign: Sign,
    pub n_list: Vec<u32>,
}

impl<T: Scalar> SpectrumRequest<T> {
    pub fn regular(spec: PotentialSpec<T>, ctx: RelativisticContext<T>, chan: AngularChannel, n_list: Vec<u32>) -> Self {
        Self { spec, ctx, chan, branch: Branch::Regular, energy_sign: Sign::Plus, n_list }
    }
}

/// Largest bound-state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NMax {
    Unbounded,
    Max(u32),
    /// No normalizable level at all.
    Empty,
}

impl NMax {
    pub fn admits(self, n: u32) -> bool {
        match self {
            NMax::Unbounded => true,
            NMax::Max(m) => n <= m,
            NMax::Empty => false,
        }
    }

    pub fn count(self) -> Option<u32> {
        match self {
            NMax::Unbounded => None,
            NMax::Max(m) => Some(m + 1),
            NMax::Empty => Some(0),
        }
    }
}

/// Dispatches on the potential kind.
pub fn energies<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    match req.spec.kind() {
        PotentialKind::Coulomb => coulomb_energy(req),
        PotentialKind::Oscillator => oscillator_energy(req),
        PotentialKind::Morse => morse_energy(req),
        PotentialKind::RosenMorseI => rosen_morse1_energy(req),
        PotentialKind::Eckart => eckart_energy(req),
        PotentialKind::RosenMorseII => rosen_morse2_energy(req),
        PotentialKind::Scarf => scarf_energy(req),
        PotentialKind::PoschlTeller => poschl_teller_energy(req),
        PotentialKind::WoodsSaxon => woods_saxon_energy(req),
    }
}

/// Positive-sign energy of a single level.
pub fn level<T: Scalar>(
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    chan: &AngularChannel,
    branch: Branch,
    n: u32,
) -> Result<T> {
    let req = SpectrumRequest { spec: *spec, ctx: *ctx, chan: *chan, branch, energy_sign: Sign::Plus, n_list: vec![n] };
    Ok(energies(&req)?[0].epsilon)
}

fn assemble<T: Scalar>(req: &SpectrumRequest<T>, mut f: impl FnMut(u32) -> Result<T>) -> Result<Vec<BoundState<T>>> {
    if req.n_list.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Domain("n_list must be sorted ascending".into()));
    }
    req.spec.validate()?;
    req.n_list
        .iter()
        .map(|&n| {
            let e = f(n)?;
            Ok(BoundState { n, branch: req.branch, energy_sign: req.energy_sign, epsilon: req.energy_sign.value::<T>() * e })
        })
        .collect()
}

fn regular_only<T: Scalar>(req: &SpectrumRequest<T>) -> Result<()> {
    if req.branch == Branch::Irregular {
        return Err(Error::Branch(format!("irregular branch unsupported for {}", req.spec.kind())));
    }
    Ok(())
}

fn sqrt_checked<T: Scalar>(x: T, what: &str, n: u32) -> Result<T> {
    if x < T::zero() {
        Err(Error::Domain(format!("{what}: negative radicand {x} at n = {n}")))
    } else {
        Ok(x.sqrt())
    }
}

/// Signed `γ = Cκ = sgn(κ)·√(κ² − λ̄²Z²)`.
pub fn coulomb_gamma<T: Scalar>(z: T, ctx: &RelativisticContext<T>, chan: &AngularChannel) -> Result<T> {
    let k = chan.kappa_as::<T>();
    let lz = ctx.lambda_bar * z;
    let g2 = k * k - lz * lz;
    if !(g2 > T::zero()) {
        return Err(Error::Domain(format!("gamma imaginary: |lambda_bar Z| = {} >= |kappa|", lz.abs())));
    }
    Ok(g2.sqrt() * k.signum())
}

/// `ε_n = [1 + (λ̄Z/(n+γ+1))²]^{-1/2}` (regular, κ > 0) and
/// `ε̄_n = [1 + (λ̄Z/(n−γ))²]^{-1/2}` (irregular, κ < 0, γ < 0).
pub fn coulomb_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    let PotentialSpec::Coulomb { z } = req.spec else {
        return Err(Error::Domain("coulomb_energy needs a Coulomb spec".into()));
    };
    let gamma = coulomb_gamma(z, &req.ctx, &req.chan)?;
    match (req.branch, req.chan.kappa > 0) {
        (Branch::Regular, false) => return Err(Error::Branch("regular Coulomb branch needs kappa > 0".into())),
        (Branch::Irregular, true) => return Err(Error::Branch("irregular Coulomb branch needs kappa < 0".into())),
        _ => {}
    }
    let lz = req.ctx.lambda_bar * z;
    assemble(req, |n| {
        let nn = T::of_u32(n);
        let denom = match req.branch {
            Branch::Regular => nn + gamma + T::one(),
            Branch::Irregular => nn - gamma,
        };
        let q = lz / denom;
        Ok((T::one() + q * q).sqrt().recip())
    })
}

/// Coulomb lowest-state energy `γ/κ` (the irregular `ε̄_0`; its negative is
/// the regular `ε_{-1}`).
pub fn coulomb_lowest<T: Scalar>(z: T, ctx: &RelativisticContext<T>, chan: &AngularChannel) -> Result<T> {
    Ok(coulomb_gamma(z, ctx, chan)? / chan.kappa_as::<T>())
}

/// `ε_n² = 1 + 4λ̄²ω²(n + κ + 1/2)` (regular), `ε̄_n² = 1 + 4λ̄²ω² n` (irregular).
pub fn oscillator_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    let PotentialSpec::Oscillator { omega } = req.spec else {
        return Err(Error::Domain("oscillator_energy needs an Oscillator spec".into()));
    };
    let lw = req.ctx.lambda_bar * omega;
    let four = T::lit(4.0);
    let kappa = req.chan.kappa_as::<T>();
    assemble(req, |n| {
        let nn = T::of_u32(n);
        let x = match req.branch {
            Branch::Regular => nn + kappa + T::lit(0.5),
            Branch::Irregular => nn,
        };
        sqrt_checked(T::one() + four * lw * lw * x, "oscillator", n)
    })
}

/// Morse parameters in the rotation language: `(T, C, range λ)`.
fn morse_parts<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>) -> Result<(T, T, T)> {
    let PotentialSpec::Morse { a, b, lambda } = *spec else {
        return Err(Error::Domain("needs a Morse spec".into()));
    };
    let tau = spec.tau(ctx).unwrap_or_else(T::one);
    let t = ctx.lambda_bar * b / a;
    Ok((t, a / tau, lambda))
}

/// `ν_n = Tε_n/(λ̄λ) − n`; the level is normalizable iff `ν_n > 0`.
pub fn morse_nu<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, n: u32, epsilon: T) -> Result<T> {
    let (t, _, lambda) = morse_parts(spec, ctx)?;
    Ok(t * epsilon / (ctx.lambda_bar * lambda) - T::of_u32(n))
}

fn morse_value<T: Scalar>(t: T, lb: T, lambda: T, n: u32) -> Result<T> {
    let one_t2 = T::one() + t * t;
    let x = lb * lambda * T::of_u32(n);
    let root = sqrt_checked(one_t2 - x * x, "morse", n)?;
    Ok((x * t + root) / one_t2)
}

/// `ε_n = [λ̄λTn + √(1 + T² − (λ̄λn)²)]/(1 + T²)` with `T = λ̄B/A`; identical
/// to `Aτ⁻²[λ̄²λBn + √(τ² − (λ̄λAn)²)]`. The same tower serves the irregular
/// branch, whose lowest level is `ε̄_0 = C`.
pub fn morse_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    let (t, _, lambda) = morse_parts(&req.spec, &req.ctx)?;
    let lb = req.ctx.lambda_bar;
    assemble(req, |n| {
        let e = morse_value(t, lb, lambda, n)?;
        let nu = t * e / (lb * lambda) - T::of_u32(n);
        if !(nu > T::zero()) {
            return Err(Error::Domain(format!("morse level n = {n} not bound (nu = {nu})")));
        }
        Ok(e)
    })
}

/// Alternative closed forms that disagree with the shooting oracle. They are
/// kept so the verification report can show the disagreement.
pub mod alternatives {
    use super::*;

    /// Morse with a half-integer shift:
    /// `{−λ̄λT(n+1/2) + √(1 + T² − [λ̄λT(n+1/2)]²)}/(1 + T²)`.
    pub fn morse_half_shift<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, n: u32) -> Result<T> {
        let (t, _, lambda) = morse_parts(spec, ctx)?;
        let x = ctx.lambda_bar * lambda * t * (T::of_u32(n) + T::lit(0.5));
        let one_t2 = T::one() + t * t;
        Ok((-x + sqrt_checked(one_t2 - x * x, "morse half shift", n)?) / one_t2)
    }

    /// Irregular Morse with `T` inside the radical:
    /// `[λ̄λTn + √(1 + T² − (λ̄λTn)²)]/(1 + T²)`. Agrees with the oracle only at `n = 0`.
    pub fn morse_irregular_t_in_radical<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, n: u32) -> Result<T> {
        let (t, _, lambda) = morse_parts(spec, ctx)?;
        let x = ctx.lambda_bar * lambda * t * T::of_u32(n);
        let one_t2 = T::one() + t * t;
        Ok((x + sqrt_checked(one_t2 - x * x, "morse irregular", n)?) / one_t2)
    }

    /// Morse row read literally: `Aτ⁻²[λ̄²λBn + √(τ² − (λ̄λAn)²)]`.
    pub fn morse_table_row<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, n: u32) -> Result<T> {
        let PotentialSpec::Morse { a, b, lambda } = *spec else {
            return Err(Error::Domain("needs a Morse spec".into()));
        };
        let lb = ctx.lambda_bar;
        let tau2 = a * a + lb * lb * b * b;
        let nn = T::of_u32(n);
        let x = lb * lambda * a * nn;
        Ok(a / tau2 * (lb * lb * lambda * b * nn + sqrt_checked(tau2 - x * x, "morse row", n)?))
    }

    /// Rosen-Morse I with `(A/λ − n)^{+2}` in the denominator.
    pub fn rosen_morse_i_squared_denominator<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, n: u32) -> Result<T> {
        let PotentialSpec::RosenMorseI { a, b, lambda } = *spec else {
            return Err(Error::Domain("needs a Rosen-Morse I spec".into()));
        };
        let lb = ctx.lambda_bar;
        let mu = a / lambda - T::of_u32(n);
        let num = T::one() + lb * lb * a * a - lb * lb * lambda * lambda * mu * mu;
        let q = lb * b / lambda;
        sqrt_checked(num / (T::one() + q * q * mu * mu), "rosen-morse I", n)
    }
}

/// `(μ_n, ν_n)` for Rosen-Morse I and Eckart: `μ = A/λ − n`, `ν = εB/(λ²μ)`.
pub fn hyperbolic_mu_nu<T: Scalar>(spec: &PotentialSpec<T>, n: u32, epsilon: T) -> Result<(T, T)> {
    match *spec {
        PotentialSpec::RosenMorseI { a, b, lambda } | PotentialSpec::Eckart { a, b, lambda } => {
            let mu = a / lambda - T::of_u32(n);
            Ok((mu, epsilon * b / (lambda * lambda * mu)))
        }
        _ => Err(Error::Domain("needs a Rosen-Morse I or Eckart spec".into())),
    }
}

fn hyperbolic_value<T: Scalar>(a: T, b: T, lambda: T, lb: T, n: u32) -> Result<T> {
    let mu = a / lambda - T::of_u32(n);
    if mu == T::zero() {
        return Err(Error::Domain(format!("mu_n = 0 at n = {n}")));
    }
    let num = T::one() + lb * lb * a * a - lb * lb * lambda * lambda * mu * mu;
    let q = lb * b / lambda;
    sqrt_checked(num / (T::one() + q * q / (mu * mu)), "hyperbolic", n)
}

/// `ε_n² = [1 + λ̄²A² − λ̄²λ²μ_n²]/[1 + (λ̄B/λ)²μ_n⁻²]`, bound while `μ_n > |ν_n|`.
pub fn rosen_morse1_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    let PotentialSpec::RosenMorseI { a, b, lambda } = req.spec else {
        return Err(Error::Domain("rosen_morse1_energy needs a Rosen-Morse I spec".into()));
    };
    let lb = req.ctx.lambda_bar;
    assemble(req, |n| {
        let e = hyperbolic_value(a, b, lambda, lb, n)?;
        let (mu, nu) = hyperbolic_mu_nu(&req.spec, n, e)?;
        if !(mu > nu.abs()) {
            return Err(Error::Domain(format!("rosen-morse I level n = {n} not bound (mu = {mu}, nu = {nu})")));
        }
        Ok(e)
    })
}

/// Same closed form as Rosen-Morse I; bound while `A < 0` and `ν_n > |μ_n|`.
pub fn eckart_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    let PotentialSpec::Eckart { a, b, lambda } = req.spec else {
        return Err(Error::Domain("eckart_energy needs an Eckart spec".into()));
    };
    let lb = req.ctx.lambda_bar;
    assemble(req, |n| {
        let e = hyperbolic_value(a, b, lambda, lb, n)?;
        let (mu, nu) = hyperbolic_mu_nu(&req.spec, n, e)?;
        if !(mu < T::zero() && nu > -mu) {
            return Err(Error::Domain(format!("eckart level n = {n} not bound (mu = {mu}, nu = {nu})")));
        }
        Ok(e)
    })
}

fn shifted_root<T: Scalar>(lb: T, a: T, lambda: T, shift: T, n: u32) -> Result<T> {
    let radicand = T::one() + lb * lb * a * a - lb * lb * lambda * lambda * shift * shift;
    sqrt_checked(radicand, "spectrum", n)
}

/// `√(1 + λ̄²A² − λ̄²λ²(A/λ − n)²)`.
pub fn rosen_morse2_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    let PotentialSpec::RosenMorseII { a, b, lambda } = req.spec else {
        return Err(Error::Domain("rosen_morse2_energy needs a Rosen-Morse II spec".into()));
    };
    // upper components behave as r^{(B-A)/λ} at the origin
    if !(b > a) {
        return Err(Error::Domain("Rosen-Morse II tower needs B > A for a regular origin".into()));
    }
    let lb = req.ctx.lambda_bar;
    assemble(req, |n| shifted_root(lb, a, lambda, a / lambda - T::of_u32(n), n))
}

/// Same closed form as Rosen-Morse II.
pub fn scarf_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    let PotentialSpec::Scarf { a, lambda, .. } = req.spec else {
        return Err(Error::Domain("scarf_energy needs a Scarf spec".into()));
    };
    let lb = req.ctx.lambda_bar;
    assemble(req, |n| shifted_root(lb, a, lambda, a / lambda - T::of_u32(n), n))
}

/// `√(1 + λ̄²(A+B)² − λ̄²λ²[(A+B)/λ + 2n]²)`.
pub fn poschl_teller_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    let PotentialSpec::PoschlTeller { a, b, lambda } = req.spec else {
        return Err(Error::Domain("poschl_teller_energy needs a Poschl-Teller spec".into()));
    };
    // upper components behave as r^{B/λ} at the origin
    if !(b > T::zero()) {
        return Err(Error::Domain("Poschl-Teller tower needs B > 0 for a regular origin".into()));
    }
    let lb = req.ctx.lambda_bar;
    let s = a + b;
    assemble(req, |n| shifted_root(lb, s, lambda, s / lambda + T::lit(2.0) * T::of_u32(n), n))
}

/// Woods-Saxon variables `(μ, ν)` at energy ε; `None` outside `ν² > 0, μ² > 0`.
pub fn woods_saxon_mu_nu<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, epsilon: T) -> Option<(T, T)> {
    let PotentialSpec::WoodsSaxon { b, lambda, .. } = *spec else {
        return None;
    };
    let mu2 = (T::one() - epsilon * epsilon) / (ctx.lambda_bar * ctx.lambda_bar * lambda * lambda);
    let nu2 = T::lit(2.0) * epsilon * b / (lambda * lambda) - T::one() - mu2;
    if mu2 > T::zero() && nu2 > T::zero() {
        Some((mu2.sqrt(), nu2.sqrt()))
    } else {
        None
    }
}

/// Nonrelativistic Woods-Saxon phase
/// `f = νR/a − atan(ν/μ) + arg Γ(2iν) − 2 arg Γ(μ + iν)` with
/// `μ² = −2a²E`, `ν² = 2a²V₀ − μ²`, on the continuous branch of `arg Γ`.
pub fn woods_saxon_phase_nonrel<T: Scalar>(e: T, a: T, r0: T, v0: T) -> Option<T> {
    let two = T::lit(2.0);
    let mu2 = -two * a * a * e;
    let nu2 = two * a * a * v0 - mu2;
    if !(mu2 > T::zero() && nu2 > T::zero()) {
        return None;
    }
    let (mu, nu) = (mu2.sqrt(), nu2.sqrt());
    let g1 = arg_gamma(Complex::new(T::zero(), two * nu)).ok()?;
    let g2 = arg_gamma(Complex::new(mu, nu)).ok()?;
    Some(nu * r0 / a - (nu / mu).atan() + g1 - two * g2)
}

/// Relativistic Woods-Saxon phase: the nonrelativistic one with
/// `E → (ε²−1)/2λ̄²`, `a → 1/λ`, `V₀ → εB − λ²/2`.
pub fn woods_saxon_phase<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, epsilon: T) -> Option<T> {
    let PotentialSpec::WoodsSaxon { b, r0, lambda } = *spec else {
        return None;
    };
    let two = T::lit(2.0);
    let lb = ctx.lambda_bar;
    let e = (epsilon * epsilon - T::one()) / (two * lb * lb);
    let v0 = epsilon * b - lambda * lambda / two;
    woods_saxon_phase_nonrel(e, lambda.recip(), r0, v0)
}

const WS_PANELS: usize = 2_000;
const WS_DELTA: f64 = 1e-6;

/// All roots of `f(ε) = (n + 1/2)π` in `(−1 + δ, 1 − δ)`, ordered by `n`.
pub fn woods_saxon_levels<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>) -> Result<Vec<T>> {
    let lo = -T::one() + T::lit(WS_DELTA);
    let hi = T::one() - T::lit(WS_DELTA);
    let step = (hi - lo) / T::lit(WS_PANELS as f64);
    let pi = T::PI();
    let half = T::lit(0.5);
    let index = |f: T| (f / pi - half).floor();

    let mut levels: Vec<T> = Vec::new();
    let mut prev: Option<(T, T)> = None;
    let mut last_rejected: Option<T> = None;
    let mut any_admissible = false;
    for i in 0..=WS_PANELS {
        let e = lo + step * T::lit(i as f64);
        let Some(f) = woods_saxon_phase(spec, ctx, e) else {
            prev = None;
            last_rejected = Some(e);
            continue;
        };
        any_admissible = true;
        if prev.is_none() {
            // the phase starts at −π/2 on the ν² = 0 threshold and can pass
            // several targets inside the first admissible panel
            if let Some(bad) = last_rejected {
                prev = woods_saxon_threshold(spec, ctx, bad, e);
            }
        }
        if let Some((e0, f0)) = prev {
            let (k0, k1) = (index(f0), index(f));
            let mut k = k0 + T::one();
            while k <= k1 {
                if k >= T::zero() {
                    let target = (k + half) * pi;
                    levels.push(bisect_phase(spec, ctx, e0, e, target)?);
                }
                k = k + T::one();
            }
        }
        prev = Some((e, f));
    }
    if !any_admissible {
        return Err(Error::Domain("woods-saxon: nu^2 <= 0 throughout the energy window".into()));
    }
    Ok(levels)
}

/// First admissible energy above the `ν² = 0` threshold in `(bad, good]`.
fn woods_saxon_threshold<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, mut bad: T, mut good: T) -> Option<(T, T)> {
    for _ in 0..200 {
        let mid = (bad + good) / T::lit(2.0);
        if mid <= bad || mid >= good {
            break;
        }
        if woods_saxon_phase(spec, ctx, mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    woods_saxon_phase(spec, ctx, good).map(|f| (good, f))
}

fn bisect_phase<T: Scalar>(spec: &PotentialSpec<T>, ctx: &RelativisticContext<T>, mut lo: T, mut hi: T, target: T) -> Result<T> {
    let g = |e: T| woods_saxon_phase(spec, ctx, e).map(|f| f - target);
    let glo = g(lo).ok_or_else(|| Error::Numerical("woods-saxon phase undefined at bracket".into()))?;
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid).ok_or_else(|| Error::Numerical("woods-saxon phase undefined in bracket".into()))?;
        if (gm < T::zero()) == (glo < T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Roots of the Woods-Saxon quantization condition for the requested `n`.
pub fn woods_saxon_energy<T: Scalar>(req: &SpectrumRequest<T>) -> Result<Vec<BoundState<T>>> {
    regular_only(req)?;
    if req.spec.kind() != PotentialKind::WoodsSaxon {
        return Err(Error::Domain("woods_saxon_energy needs a Woods-Saxon spec".into()));
    }
    let levels = woods_saxon_levels(&req.spec, &req.ctx)?;
    assemble(req, |n| {
        levels
            .get(n as usize)
            .copied()
            .ok_or_else(|| Error::NoRoot(format!("woods-saxon: no level n = {n} ({} found)", levels.len())))
    })
}

/// Largest bound index on the regular branch.
///
/// The finite towers use the normalizability of the closed-form upper
/// component (e.g. `μ_n > |ν_n|` for Rosen-Morse I, `n < A/λ` for
/// Rosen-Morse II and Scarf); Woods-Saxon counts roots.
pub fn n_max<T: Scalar>(
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    chan: &AngularChannel,
    tp: &TransformParameters<T>,
) -> NMax {
    let _ = tp;
    let last = |ok: &dyn Fn(u32) -> bool| -> NMax {
        let mut n = 0u32;
        while n < 100_000 && ok(n) {
            n += 1;
        }
        if n == 0 {
            NMax::Empty
        } else {
            NMax::Max(n - 1)
        }
    };
    let regular = |n: u32| level(spec, ctx, chan, Branch::Regular, n).is_ok();
    match *spec {
        PotentialSpec::Coulomb { .. } | PotentialSpec::Oscillator { .. } => NMax::Unbounded,
        PotentialSpec::Morse { .. } | PotentialSpec::RosenMorseI { .. } | PotentialSpec::Eckart { .. } => last(&regular),
        PotentialSpec::RosenMorseII { a, b, lambda } => last(&|n| b > a && T::of_u32(n) < a / lambda),
        PotentialSpec::Scarf { a, lambda, .. } => last(&|n| T::of_u32(n) < a / lambda),
        PotentialSpec::PoschlTeller { a, b, lambda } => {
            last(&|n| b > T::zero() && T::of_u32(n) < -(a + b) / (T::lit(2.0) * lambda))
        }
        PotentialSpec::WoodsSaxon { .. } => match woods_saxon_levels(spec, ctx) {
            Ok(v) if !v.is_empty() => NMax::Max(v.len() as u32 - 1),
            _ => NMax::Empty,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::derive_transform;

    fn ctx(lb: f64) -> RelativisticContext<f64> {
        RelativisticContext::new(lb).unwrap()
    }

    fn ch(k: i32) -> AngularChannel {
        AngularChannel::new(k).unwrap()
    }

    fn req(spec: PotentialSpec<f64>, lb: f64, kappa: i32, branch: Branch, sign: Sign, n: Vec<u32>) -> SpectrumRequest<f64> {
        SpectrumRequest { spec, ctx: ctx(lb), chan: ch(kappa), branch, energy_sign: sign, n_list: n }
    }

    #[test]
    fn free_coulomb() {
        let r = req(PotentialSpec::Coulomb { z: 0.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![0, 1, 5]);
        for s in coulomb_energy(&r).unwrap() {
            assert_eq!(s.epsilon, 1.0);
        }
        let r = SpectrumRequest { energy_sign: Sign::Minus, ..r };
        for s in coulomb_energy(&r).unwrap() {
            assert_eq!(s.epsilon, -1.0);
        }
    }

    #[test]
    fn coulomb_rearranged_relation() {
        let (lb, z) = (0.1, -0.5);
        let r = req(PotentialSpec::Coulomb { z }, lb, 1, Branch::Regular, Sign::Plus, vec![0, 1, 2, 7]);
        let g = coulomb_gamma(z, &ctx(lb), &ch(1)).unwrap();
        for s in coulomb_energy(&r).unwrap() {
            let lhs = (1.0 / (s.epsilon * s.epsilon) - 1.0) * (s.n as f64 + g + 1.0).powi(2);
            assert!((lhs - lb * lb * z * z).abs() < 1e-10 * lb * lb * z * z);
        }
        assert!((1.0 - g * g - lb * lb * z * z).abs() < 1e-15);
    }

    #[test]
    fn coulomb_branch_rules() {
        let r = req(PotentialSpec::Coulomb { z: -0.5 }, 0.1, -1, Branch::Regular, Sign::Plus, vec![0]);
        assert!(matches!(coulomb_energy(&r), Err(Error::Branch(_))));
        let r = req(PotentialSpec::Coulomb { z: -0.5 }, 0.1, 1, Branch::Irregular, Sign::Plus, vec![0]);
        assert!(matches!(coulomb_energy(&r), Err(Error::Branch(_))));
        let r = req(PotentialSpec::Coulomb { z: -20.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![0]);
        assert!(matches!(coulomb_energy(&r), Err(Error::Domain(_))));
    }

    #[test]
    fn coulomb_lowest_pair() {
        let (z, lb) = (-1.3, 0.1);
        let chan = ch(-2);
        let bar0 = level(&PotentialSpec::Coulomb { z }, &ctx(lb), &chan, Branch::Irregular, 0).unwrap();
        let g = coulomb_gamma(z, &ctx(lb), &chan).unwrap();
        assert!((bar0 - g / -2.0).abs() < 1e-15);
        let tp = derive_transform(&PotentialSpec::Coulomb { z }, &ctx(lb), &chan, Sign::Plus).unwrap();
        assert!((bar0 - tp.c).abs() < 1e-15);
    }

    #[test]
    fn oscillator_values() {
        let r = req(PotentialSpec::Oscillator { omega: 1.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![0]);
        assert!((oscillator_energy(&r).unwrap()[0].epsilon - 1.06f64.sqrt()).abs() < 1e-15);
        let r = req(PotentialSpec::Oscillator { omega: 0.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![0, 3]);
        assert!(oscillator_energy(&r).unwrap().iter().all(|s| s.epsilon == 1.0));
        let r = req(PotentialSpec::Oscillator { omega: 2.0 }, 0.1, -1, Branch::Irregular, Sign::Plus, vec![0]);
        assert_eq!(oscillator_energy(&r).unwrap()[0].epsilon, 1.0);
        let r = req(PotentialSpec::Oscillator { omega: 2.0 }, 0.3, -4, Branch::Regular, Sign::Plus, vec![0]);
        assert!(matches!(oscillator_energy(&r), Err(Error::Domain(_))));
    }

    #[test]
    fn oscillator_linearity() {
        let (lb, w) = (0.07, 1.3);
        for (branch, kappa) in [(Branch::Regular, 2), (Branch::Irregular, -2)] {
            let r = req(PotentialSpec::Oscillator { omega: w }, lb, kappa, branch, Sign::Plus, (0..6).collect());
            let e = oscillator_energy(&r).unwrap();
            for w2 in e.windows(2) {
                let d = (w2[1].epsilon.powi(2) - 1.0) - (w2[0].epsilon.powi(2) - 1.0);
                assert!((d - 4.0 * lb * lb * w * w).abs() < 1e-14);
            }
        }
    }

    fn morse_fixture() -> (PotentialSpec<f64>, RelativisticContext<f64>) {
        let c = ctx(0.05);
        (PotentialSpec::morse_from_oscillator(1.0, 0.3, 2.0, &c), c)
    }

    #[test]
    fn morse_ground_state_is_c() {
        let (spec, c) = morse_fixture();
        let tp = derive_transform(&spec, &c, &ch(-1), Sign::Plus).unwrap();
        let e0 = level(&spec, &c, &ch(-1), Branch::Irregular, 0).unwrap();
        assert!((e0 - tp.c).abs() < 1e-15);
        assert!((e0 - 1.0 / (1.0f64 + 0.09).sqrt()).abs() < 1e-15);
        assert!((tp.t - 0.3).abs() < 1e-15);
    }

    #[test]
    fn morse_row_identity() {
        let (spec, c) = morse_fixture();
        for n in 0..5 {
            let e = level(&spec, &c, &ch(-1), Branch::Regular, n).unwrap();
            let row = alternatives::morse_table_row(&spec, &c, n).unwrap();
            assert!((e - row).abs() < 1e-14);
        }
    }

    #[test]
    fn morse_alternatives_differ_beyond_ground_state() {
        let (spec, c) = morse_fixture();
        let e0 = level(&spec, &c, &ch(-1), Branch::Regular, 0).unwrap();
        assert!((alternatives::morse_irregular_t_in_radical(&spec, &c, 0).unwrap() - e0).abs() < 1e-15);
        let e1 = level(&spec, &c, &ch(-1), Branch::Regular, 1).unwrap();
        assert!((alternatives::morse_irregular_t_in_radical(&spec, &c, 1).unwrap() - e1).abs() > 1e-4);
        assert!((alternatives::morse_half_shift(&spec, &c, 0).unwrap() - e0).abs() > 1e-3);
    }

    #[test]
    fn morse_n_max_from_normalizability() {
        let (spec, c) = morse_fixture();
        let tp = derive_transform(&spec, &c, &ch(-1), Sign::Plus).unwrap();
        let nm = n_max(&spec, &c, &ch(-1), &tp);
        let NMax::Max(m) = nm else { panic!("{nm:?}") };
        let e = level(&spec, &c, &ch(-1), Branch::Regular, m).unwrap();
        assert!(morse_nu(&spec, &c, m, e).unwrap() > 0.0);
        assert!(level(&spec, &c, &ch(-1), Branch::Regular, m + 1).is_err());
        // T/(λ̄λ) = 6 bounds the tower
        assert!(m < 6);
    }

    #[test]
    fn rosen_morse_vanishing_b() {
        let r = req(PotentialSpec::RosenMorseI { a: 1e-9, b: 1e-12, lambda: 1.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![]);
        assert!(rosen_morse1_energy(&r).unwrap().is_empty());
        // small coupling: ground state close to 1
        let r = req(PotentialSpec::RosenMorseI { a: 0.05, b: 1e-4, lambda: 1.0 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![0]);
        assert!((rosen_morse1_energy(&r).unwrap()[0].epsilon - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rosen_morse_ground_state_is_c() {
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let c = ctx(0.1);
        let tp = derive_transform(&spec, &c, &ch(1), Sign::Plus).unwrap();
        assert!((level(&spec, &c, &ch(1), Branch::Regular, 0).unwrap() - tp.c).abs() < 1e-15);
    }

    #[test]
    fn rosen_morse_bound_condition() {
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let c = ctx(0.1);
        let tp = derive_transform(&spec, &c, &ch(1), Sign::Plus).unwrap();
        assert_eq!(n_max(&spec, &c, &ch(1), &tp), NMax::Max(2));
        let r = req(spec, 0.1, 1, Branch::Regular, Sign::Plus, vec![3]);
        assert!(matches!(rosen_morse1_energy(&r), Err(Error::Domain(_))));
        let r = req(spec, 0.1, 1, Branch::Irregular, Sign::Plus, vec![0]);
        assert!(matches!(rosen_morse1_energy(&r), Err(Error::Branch(_))));
    }

    #[test]
    fn rm2_scarf_pt_edge_values() {
        let (a, lambda, lb) = (3.0, 1.0, 0.1);
        let r = req(PotentialSpec::RosenMorseII { a, b: 4.0, lambda }, lb, 1, Branch::Regular, Sign::Plus, vec![3]);
        assert!((rosen_morse2_energy(&r).unwrap()[0].epsilon - (1.0 + lb * lb * a * a).sqrt()).abs() < 1e-15);
        let r = req(PotentialSpec::Scarf { a, b: 0.5, lambda }, lb, 1, Branch::Regular, Sign::Plus, vec![0]);
        assert_eq!(scarf_energy(&r).unwrap()[0].epsilon, 1.0);
        let r = req(PotentialSpec::PoschlTeller { a: 1.0, b: 1.0, lambda: 1.0 }, lb, 1, Branch::Regular, Sign::Minus, vec![0]);
        assert!((poschl_teller_energy(&r).unwrap()[0].epsilon + 1.0).abs() < 1e-15);
    }

    #[test]
    fn woods_saxon_levels_satisfy_condition() {
        let spec = PotentialSpec::WoodsSaxon { b: 5.0, r0: 4.0, lambda: 2.0 };
        let c = ctx(0.05);
        let levels = woods_saxon_levels(&spec, &c).unwrap();
        assert!(!levels.is_empty());
        for (n, &e) in levels.iter().enumerate() {
            let f = woods_saxon_phase(&spec, &c, e).unwrap();
            assert!((f - (n as f64 + 0.5) * std::f64::consts::PI).abs() < 1e-10);
        }
        assert!(levels.windows(2).all(|w| w[0] < w[1]));
        let r = req(spec, 0.05, -1, Branch::Regular, Sign::Plus, vec![levels.len() as u32]);
        assert!(matches!(woods_saxon_energy(&r), Err(Error::NoRoot(_))));
    }

    #[test]
    fn woods_saxon_phase_threshold() {
        // f -> -π/2 as ν -> 0+
        let f = woods_saxon_phase_nonrel(-0.5, 1.0, 3.0, 0.5 + 1e-10).unwrap();
        assert!((f + std::f64::consts::FRAC_PI_2).abs() < 1e-4);
    }

    #[test]
    fn sign_symmetry() {
        let specs: Vec<(PotentialSpec<f64>, i32, Branch)> = vec![
            (PotentialSpec::Coulomb { z: -0.5 }, 1, Branch::Regular),
            (PotentialSpec::Coulomb { z: -0.5 }, -1, Branch::Irregular),
            (PotentialSpec::Oscillator { omega: 1.0 }, 1, Branch::Regular),
            (PotentialSpec::Oscillator { omega: 1.0 }, -2, Branch::Irregular),
            (PotentialSpec::RosenMorseII { a: 3.0, b: 4.0, lambda: 1.0 }, 1, Branch::Regular),
            (PotentialSpec::PoschlTeller { a: -8.0, b: 2.0, lambda: 1.0 }, 1, Branch::Regular),
        ];
        for (spec, k, br) in specs {
            let plus = energies(&req(spec, 0.1, k, br, Sign::Plus, vec![0, 1, 2])).unwrap();
            let minus = energies(&req(spec, 0.1, k, br, Sign::Minus, vec![0, 1, 2])).unwrap();
            for (p, m) in plus.iter().zip(&minus) {
                assert_eq!(p.epsilon, -m.epsilon);
            }
        }
    }

    #[test]
    fn unsorted_request_rejected() {
        let r = req(PotentialSpec::Coulomb { z: -0.5 }, 0.1, 1, Branch::Regular, Sign::Plus, vec![2, 1]);
        assert!(coulomb_energy(&r).is_err());
    }

    #[test]
    fn f32_spectra() {
        let c = RelativisticContext::new(0.1f32).unwrap();
        let e = level(&PotentialSpec::Oscillator { omega: 1.0f32 }, &c, &ch(1), Branch::Regular, 0).unwrap();
        assert!((e - 1.06f32.sqrt()).abs() < 1e-6);
        let ws = woods_saxon_levels(&PotentialSpec::WoodsSaxon { b: 5.0f32, r0: 4.0, lambda: 2.0 }, &c).unwrap();
        assert!(!ws.is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn coulomb_monotone(z in -3.0f64..-0.1, lb in 0.01f64..0.3, kappa in 1i32..4) {
                let r = req(PotentialSpec::Coulomb { z }, lb, kappa, Branch::Regular, Sign::Plus, (0..8).collect());
                if let Ok(e) = coulomb_energy(&r) {
                    prop_assert!(e.windows(2).all(|w| w[0].epsilon < w[1].epsilon));
                    prop_assert!(e.iter().all(|s| s.epsilon < 1.0 && s.epsilon > 0.0));
                }
            }

            #[test]
            fn morse_monotone_and_bound(t in 0.05f64..1.0, tau in 0.3f64..2.0, lb in 0.01f64..0.2) {
                let c = ctx(lb);
                let spec = PotentialSpec::morse_from_oscillator(tau, t, 1.5, &c);
                let tp = derive_transform(&spec, &c, &ch(-1), Sign::Plus).unwrap();
                if let NMax::Max(m) = n_max(&spec, &c, &ch(-1), &tp) {
                    let e: Vec<f64> = (0..=m).map(|n| level(&spec, &c, &ch(-1), Branch::Regular, n).unwrap()).collect();
                    prop_assert!(e.windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(e.iter().all(|&x| x.abs() < 1.0 + 1e-12));
                }
            }

            #[test]
            fn rosen_morse_ground_state_c(a in 0.5f64..6.0, b in -3.0f64..3.0, lb in 0.01f64..0.2) {
                let spec = PotentialSpec::RosenMorseI { a, b, lambda: 1.0 };
                let c = ctx(lb);
                let tp = derive_transform(&spec, &c, &ch(1), Sign::Plus).unwrap();
                let e0 = hyperbolic_value(a, b, 1.0, lb, 0).unwrap();
                prop_assert!((e0 - tp.c).abs() < 1e-12);
            }
        }
    }
}

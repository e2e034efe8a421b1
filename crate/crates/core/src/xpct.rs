//! Extended point canonical transformation.
//!
//! A map `r = q(ρ)` with `φ±(r) = g±(ρ)·φ̂±(ρ)`, `g± = √|q′(Ĉ ± ε̂)/(C ± ε)|`,
//! carries the canonical second-order equations of a reference problem
//! (Dirac oscillator or Rosen-Morse II, both with `ξ̂ = 0`, `Ĉ = 1`) into
//! those of a target problem. The upper sign acts on the plus-frame upper
//! equation and the lower sign on the minus-frame lower equation; each
//! component has its own reference parameters (`κ̂`, level).
//!
//! Every row is evaluated along a section `ρ(r)` of the complex `ρ` plane on
//! which `q` is real: the positive axis for the algebraic and logarithmic
//! rows, the imaginary axis for `tanh⁻¹[cosh λρ]` and the line
//! `Im ρ = π/2λ` for the Scarf row. All sections have closed-form inverses.

use num_complex::Complex64;
use serde::Serialize;

use crate::catalog::{derive_transform, AngularChannel, Branch, PotentialKind, PotentialSpec, RelativisticContext, Sign};
use crate::error::{Error, Result};
use crate::parameter_maps::Component;
use crate::specfun::laguerre;
use crate::spectra::{coulomb_gamma, level, BoundState};
use crate::wavefunctions::{default_grid, normalize, spinor_from_frames, RadialSpinor, DEFAULT_POINTS};

const REALITY_BOUND: f64 = 1e-10;
const PREFACTOR_FLOOR: f64 = 1e-14;
/// `|q′|` below this counts as a vanishing derivative.
const SINGULAR_Q1: f64 = 1e-12;
/// Tolerance on the agreement of the upper- and lower-sign energies.
const RELATION_AGREEMENT: f64 = 1e-10;

/// Rows of the map table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Row {
    /// `ρ²`, Oscillator → Coulomb.
    Coulomb,
    /// `ρ`, Oscillator → Oscillator.
    OscillatorIdentity,
    /// `−(2/λ) ln ρ`, Oscillator → Morse.
    Morse,
    /// `λ⁻¹ tanh⁻¹[cosh λρ]`, Rosen-Morse II → Rosen-Morse I.
    RosenMorseI,
    /// `λ⁻¹ coth⁻¹[cosh λρ]`, Rosen-Morse II → Eckart.
    Eckart,
    /// `ρ`, Rosen-Morse II → Rosen-Morse II.
    RosenMorseIIIdentity,
    /// `λ⁻¹ sinh⁻¹[−i cosh λρ]`, Rosen-Morse II → Scarf.
    Scarf,
    /// `ρ/2`, Rosen-Morse II → Pöschl-Teller.
    PoschlTeller,
    /// `ρ^{ν+1}`, Oscillator → power law (no closed target in the catalog).
    PowerLaw,
}

impl Row {
    pub const ALL: [Row; 9] = [
        Row::Coulomb,
        Row::OscillatorIdentity,
        Row::Morse,
        Row::RosenMorseI,
        Row::Eckart,
        Row::RosenMorseIIIdentity,
        Row::Scarf,
        Row::PoschlTeller,
        Row::PowerLaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Row::Coulomb => "coulomb",
            Row::OscillatorIdentity => "oscillator",
            Row::Morse => "morse",
            Row::RosenMorseI => "rosen_morse_i",
            Row::Eckart => "eckart",
            Row::RosenMorseIIIdentity => "rosen_morse_ii",
            Row::Scarf => "scarf",
            Row::PoschlTeller => "poschl_teller",
            Row::PowerLaw => "power_law",
        }
    }

    /// Row for a catalog target.
    pub fn for_target(kind: PotentialKind) -> Option<Row> {
        Some(match kind {
            PotentialKind::Coulomb => Row::Coulomb,
            PotentialKind::Oscillator => Row::OscillatorIdentity,
            PotentialKind::Morse => Row::Morse,
            PotentialKind::RosenMorseI => Row::RosenMorseI,
            PotentialKind::Eckart => Row::Eckart,
            PotentialKind::RosenMorseII => Row::RosenMorseIIIdentity,
            PotentialKind::Scarf => Row::Scarf,
            PotentialKind::PoschlTeller => Row::PoschlTeller,
            PotentialKind::WoodsSaxon => return None,
        })
    }

    pub fn formula(self) -> &'static str {
        match self {
            Row::Coulomb => "rho^2",
            Row::OscillatorIdentity | Row::RosenMorseIIIdentity => "rho",
            Row::Morse => "-(2/lambda) ln(rho)",
            Row::RosenMorseI => "atanh(cosh(lambda rho))/lambda",
            Row::Eckart => "acoth(cosh(lambda rho))/lambda",
            Row::Scarf => "asinh(-i cosh(lambda rho))/lambda",
            Row::PoschlTeller => "rho/2",
            Row::PowerLaw => "rho^(nu+1)",
        }
    }

    pub fn reference(self) -> PotentialKind {
        match self {
            Row::Coulomb | Row::OscillatorIdentity | Row::Morse | Row::PowerLaw => PotentialKind::Oscillator,
            _ => PotentialKind::RosenMorseII,
        }
    }

    pub fn target(self) -> Option<PotentialKind> {
        Some(match self {
            Row::Coulomb => PotentialKind::Coulomb,
            Row::OscillatorIdentity => PotentialKind::Oscillator,
            Row::Morse => PotentialKind::Morse,
            Row::RosenMorseI => PotentialKind::RosenMorseI,
            Row::Eckart => PotentialKind::Eckart,
            Row::RosenMorseIIIdentity => PotentialKind::RosenMorseII,
            Row::Scarf => PotentialKind::Scarf,
            Row::PoschlTeller => PotentialKind::PoschlTeller,
            Row::PowerLaw => return None,
        })
    }
}

/// Where the real section of a row lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Section {
    /// `ρ > 0`.
    PositiveAxis,
    /// `ρ = is`, `0 < s < π/λ`.
    ImaginaryAxis,
    /// `ρ = t + iπ/2λ`.
    ShiftedLine,
}

/// One row of the map table with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XpctMap {
    pub row: Row,
    /// Range `λ` for the logarithmic and inverse-hyperbolic rows.
    pub lambda: f64,
    /// Exponent for the power-law row.
    pub nu: f64,
}

impl XpctMap {
    pub fn new(row: Row, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("map range must be positive, got {lambda}")));
        }
        Ok(Self { row, lambda, nu: 0.0 })
    }

    pub fn power_law(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= -1.0 || nu == 0.0 {
            return Err(Error::Domain(format!("power-law exponent needs nu > -1, nu != 0, got {nu}")));
        }
        Ok(Self { row: Row::PowerLaw, lambda: 1.0, nu })
    }

    /// Map carrying the reference class onto `spec`, with the range taken
    /// from the target.
    pub fn for_target(spec: &PotentialSpec<f64>) -> Result<Self> {
        let row = Row::for_target(spec.kind())
            .ok_or_else(|| Error::Unsupported(format!("no map row targets {}", spec.kind())))?;
        Self::new(row, spec.range().unwrap_or(1.0))
    }

    pub fn section(&self) -> Section {
        match self.row {
            Row::RosenMorseI => Section::ImaginaryAxis,
            Row::Scarf => Section::ShiftedLine,
            _ => Section::PositiveAxis,
        }
    }

    /// Admissible target interval `(r_lo, r_hi)`.
    pub fn r_interval(&self) -> (f64, f64) {
        match self.row {
            Row::Morse | Row::RosenMorseI | Row::Scarf => (f64::NEG_INFINITY, f64::INFINITY),
            _ => (0.0, f64::INFINITY),
        }
    }

    /// `+1` if `r` grows with `ρ` along the section, `−1` otherwise.
    pub fn orientation(&self) -> f64 {
        match self.row {
            Row::Morse | Row::Eckart | Row::RosenMorseI => -1.0,
            _ => 1.0,
        }
    }

    pub fn q(&self, rho: Complex64) -> Complex64 {
        let l = self.lambda;
        let one = Complex64::new(1.0, 0.0);
        match self.row {
            Row::Coulomb => rho * rho,
            Row::OscillatorIdentity | Row::RosenMorseIIIdentity => rho,
            Row::Morse => -rho.ln() * (2.0 / l),
            Row::RosenMorseI => (rho * l).cosh().atanh() / l,
            Row::Eckart => (one / (rho * l).cosh()).atanh() / l,
            Row::Scarf => ((rho * l).cosh() * Complex64::new(0.0, -1.0)).asinh() / l,
            Row::PoschlTeller => rho * 0.5,
            Row::PowerLaw => rho.powf(self.nu + 1.0),
        }
    }

    /// `q′(ρ)`.
    pub fn q1(&self, rho: Complex64) -> Complex64 {
        let l = self.lambda;
        let one = Complex64::new(1.0, 0.0);
        match self.row {
            Row::Coulomb => rho * 2.0,
            Row::OscillatorIdentity | Row::RosenMorseIIIdentity => one,
            Row::Morse => -one / rho * (2.0 / l),
            Row::RosenMorseI | Row::Eckart => -one / (rho * l).sinh(),
            // (q′)² = 1 identically; the branch is +1 on the section
            Row::Scarf => one,
            Row::PoschlTeller => one * 0.5,
            Row::PowerLaw => rho.powf(self.nu) * (self.nu + 1.0),
        }
    }

    /// `q″(ρ)`.
    pub fn q2(&self, rho: Complex64) -> Complex64 {
        let l = self.lambda;
        let zero = Complex64::new(0.0, 0.0);
        match self.row {
            Row::Coulomb => Complex64::new(2.0, 0.0),
            Row::OscillatorIdentity | Row::RosenMorseIIIdentity | Row::Scarf | Row::PoschlTeller => zero,
            Row::Morse => (rho * rho).inv() * (2.0 / l),
            Row::RosenMorseI | Row::Eckart => {
                let w = rho * l;
                w.cosh() / (w.sinh() * w.sinh()) * l
            }
            Row::PowerLaw => rho.powf(self.nu - 1.0) * ((self.nu + 1.0) * self.nu),
        }
    }

    /// Point `ρ(r)` of the real section.
    pub fn rho_of_r(&self, r: f64) -> Result<Complex64> {
        let (lo, hi) = self.r_interval();
        if !(r > lo && r < hi) {
            return Err(Error::Domain(format!("r = {r} outside the {} map interval", self.row.name())));
        }
        let l = self.lambda;
        Ok(match self.row {
            Row::Coulomb => Complex64::new(r.sqrt(), 0.0),
            Row::OscillatorIdentity | Row::RosenMorseIIIdentity => Complex64::new(r, 0.0),
            Row::Morse => Complex64::new((-l * r / 2.0).exp(), 0.0),
            Row::RosenMorseI => Complex64::new(0.0, (l * r).tanh().acos() / l),
            Row::Eckart => Complex64::new((1.0 / (l * r).tanh()).acosh() / l, 0.0),
            Row::Scarf => Complex64::new(r, std::f64::consts::FRAC_PI_2 / l),
            Row::PoschlTeller => Complex64::new(2.0 * r, 0.0),
            Row::PowerLaw => Complex64::new(r.powf(1.0 / (self.nu + 1.0)), 0.0),
        })
    }

    /// `(ρ, q′, q″)` at `r`, with `SingularMap` where `q′` vanishes or blows up.
    fn local(&self, r: f64) -> Result<(Complex64, Complex64, Complex64)> {
        let rho = self.rho_of_r(r)?;
        let (d1, d2) = (self.q1(rho), self.q2(rho));
        let m = d1.norm();
        if !(m > SINGULAR_Q1) || !m.is_finite() || !d2.norm().is_finite() {
            return Err(Error::SingularMap(format!("q' = {d1} at r = {r} ({})", self.row.name())));
        }
        Ok((rho, d1, d2))
    }
}

/// Reference potential `Û(ρ)`; both reference rows have `ξ̂ = 0`, `Ĉ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "reference", rename_all = "snake_case")]
pub enum Reference {
    /// `Û = ω²ρ + κ̂/ρ` with a real, not necessarily integer, `κ̂`.
    Oscillator { omega: f64, kappa_hat: f64 },
    /// `Û = (A cosh λρ − B)/sinh λρ`. Complex `B` is allowed for the Scarf
    /// row, whose section turns `B` into `iB`.
    RosenMorseII { a: Complex64, b: Complex64, lambda: f64 },
}

impl Reference {
    pub fn kind(&self) -> PotentialKind {
        match self {
            Reference::Oscillator { .. } => PotentialKind::Oscillator,
            Reference::RosenMorseII { .. } => PotentialKind::RosenMorseII,
        }
    }

    pub fn u(&self, rho: Complex64) -> Complex64 {
        match *self {
            Reference::Oscillator { omega, kappa_hat } => rho * (omega * omega) + rho.inv() * kappa_hat,
            Reference::RosenMorseII { a, b, lambda } => {
                let w = rho * lambda;
                (a * w.cosh() - b) / w.sinh()
            }
        }
    }
}

/// `∓1` for the upper/lower sign of the covariance relations.
fn upper_sign(component: Component) -> f64 {
    match component {
        Component::Upper => -1.0,
        Component::Lower => 1.0,
    }
}

fn check_pairing(map: &XpctMap, reference: &Reference) -> Result<()> {
    if map.row.reference() != reference.kind() {
        return Err(Error::Domain(format!(
            "map {} expects a {} reference, got {}",
            map.row.name(),
            map.row.reference(),
            reference.kind()
        )));
    }
    Ok(())
}

fn real_checked(values: &[Complex64], what: &str) -> Result<Vec<f64>> {
    let scale = values.iter().map(|v| v.re.abs()).fold(1.0, f64::max);
    if let Some(v) = values.iter().find(|v| !(v.im.abs() <= REALITY_BOUND * scale)) {
        return Err(Error::Numerical(format!("{what} is not real on the section: {v}")));
    }
    Ok(values.iter().map(|v| v.re).collect())
}

/// Target samples produced by [`induced_potential`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedPotential {
    pub component: Component,
    pub r: Vec<f64>,
    /// Right-hand side `(1/q′)[∓ξ̂ + ĈÛ ∓ ½q″/q′]`, i.e. `∓ξ + C·U(r)` up to a constant.
    pub cu: Vec<f64>,
    /// `lim r·cu(r)` estimated at the smallest `|r|`; equals `Cκ` for an
    /// origin-singular target.
    pub origin_residue: f64,
    pub comparison: Option<TargetComparison>,
}

/// Fit of the induced samples against a catalog target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetComparison {
    /// Least-squares additive constant: `cu ≈ ∓ξ + C·U + constant`.
    pub constant: f64,
    /// Largest `|cu − (∓ξ + CU) − constant|`, relative to `max(1, max|CU|)`.
    pub residual: f64,
    /// Target `U(r)` recovered from `cu` and the fitted constant.
    pub u: Vec<f64>,
    /// Target `W(r) = U(r) − κ/r`.
    pub w: Vec<f64>,
    /// `origin_residue / C`; the `κ` carried by the induced `U`.
    pub kappa: f64,
}

/// Evaluates the covariance relation on `r`, optionally fitting it against a
/// catalog target.
pub fn induced_potential(
    map: &XpctMap,
    reference: &Reference,
    component: Component,
    target: Option<(&PotentialSpec<f64>, &RelativisticContext<f64>, &AngularChannel)>,
    r: &[f64],
) -> Result<InducedPotential> {
    check_pairing(map, reference)?;
    if r.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    let s = upper_sign(component);
    let raw = r
        .iter()
        .map(|&x| {
            let (rho, d1, d2) = map.local(x)?;
            Ok((reference.u(rho) + d2 / d1 * (0.5 * s)) / d1)
        })
        .collect::<Result<Vec<_>>>()?;
    let cu = real_checked(&raw, "induced potential")?;
    let i0 = (0..r.len()).min_by(|&i, &j| r[i].abs().total_cmp(&r[j].abs())).unwrap_or(0);
    let mut out = InducedPotential { component, r: r.to_vec(), cu, origin_residue: 0.0, comparison: None };
    out.origin_residue = r[i0] * out.cu[i0];
    if let Some((spec, ctx, chan)) = target {
        let tp = derive_transform(spec, ctx, chan, Sign::Plus)?;
        let g: Vec<f64> = r.iter().map(|&x| s * tp.xi + tp.c * spec.u(ctx, chan, x)).collect();
        let constant = out.cu.iter().zip(&g).map(|(a, b)| a - b).sum::<f64>() / r.len() as f64;
        let scale = g.iter().map(|v| (v - s * tp.xi).abs()).fold(1.0, f64::max);
        let residual = out.cu.iter().zip(&g).map(|(a, b)| (a - b - constant).abs()).fold(0.0, f64::max) / scale;
        let kappa_t = chan.kappa_as::<f64>();
        let u: Vec<f64> = out.cu.iter().map(|v| (v - constant - s * tp.xi) / tp.c).collect();
        let w = u.iter().zip(r).map(|(v, &x)| v - kappa_t / x).collect();
        out.origin_residue = r[i0] * (out.cu[i0] - constant - s * tp.xi);
        let kappa = out.origin_residue / tp.c;
        out.comparison = Some(TargetComparison { constant, residual, u, w, kappa });
    }
    Ok(out)
}

/// Largest mismatch of the determinant relation
/// `C²U² + 2ξεU − (ε²−1)/λ̄² = (1/q′²)[Û² − (ε̂²−1)/λ̄² + ¼(q″/q′)² ∓ (q″/q′)Û]`
/// over `r`, relative to the largest left-hand side.
#[allow(clippy::too_many_arguments)]
pub fn determinant_mismatch(
    map: &XpctMap,
    reference: &Reference,
    eps_hat: f64,
    component: Component,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    epsilon: f64,
    r: &[f64],
) -> Result<f64> {
    check_pairing(map, reference)?;
    let tp = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let lb2 = ctx.lambda_bar * ctx.lambda_bar;
    let s = upper_sign(component);
    let mut lhs = Vec::with_capacity(r.len());
    let mut rhs = Vec::with_capacity(r.len());
    for &x in r {
        let (rho, d1, d2) = map.local(x)?;
        let u_hat = reference.u(rho);
        let k = d2 / d1;
        rhs.push((u_hat * u_hat - (eps_hat * eps_hat - 1.0) / lb2 + k * k * 0.25 + k * u_hat * s) / (d1 * d1));
        let u = spec.u(ctx, chan, x);
        lhs.push(tp.c * tp.c * u * u + 2.0 * tp.xi * epsilon * u - (epsilon * epsilon - 1.0) / lb2);
    }
    let rhs = real_checked(&rhs, "determinant relation")?;
    let scale = lhs.iter().map(|v: &f64| v.abs()).fold(1.0, f64::max);
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale)
}

/// One solution of the determinant-matching relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyRelation {
    pub component: Component,
    pub epsilon: f64,
    /// Reference frequency tied to the target parameters (and, for Coulomb, to `ε`).
    pub omega: f64,
    pub kappa_hat: f64,
    pub reference_branch: Branch,
    pub reference_level: u32,
    /// Reference `μ̂ = (ε̂²−1)/4λ̄²ω²`.
    pub mu_hat: f64,
    /// Positive reference energy; `None` if `μ̂` makes it imaginary.
    pub eps_hat: Option<f64>,
    /// Whether the mapped component decays at both ends of the target interval.
    pub normalizable: bool,
}

impl EnergyRelation {
    pub fn reference(&self) -> Reference {
        Reference::Oscillator { omega: self.omega, kappa_hat: self.kappa_hat }
    }
}

/// Solves the determinant-matching relation for the target level `n`.
///
/// Identity rows return the target's own level. The Morse row returns both
/// roots of the quadratic in `ε`; the Coulomb row returns `±ε`. For the
/// lower sign the reference level is `n − 1` (Morse) or `n + 1` (Coulomb),
/// matching the lower-component pairing of the direct construction.
pub fn energy_relation(
    map: &XpctMap,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    branch: Branch,
    n: u32,
    component: Component,
) -> Result<Vec<EnergyRelation>> {
    if map.row.target() != Some(spec.kind()) {
        return Err(Error::Domain(format!("map {} does not target {}", map.row.name(), spec.kind())));
    }
    let lb = ctx.lambda_bar;
    let osc_eps_hat = |omega: f64, mu: f64| {
        let x = 1.0 + 4.0 * lb * lb * omega * omega * mu;
        (x >= 0.0).then(|| x.sqrt())
    };
    match map.row {
        Row::OscillatorIdentity | Row::RosenMorseIIIdentity => {
            let eps = level(spec, ctx, chan, branch, n)?;
            let (omega, kappa_hat, mu_hat) = match *spec {
                PotentialSpec::Oscillator { omega } => {
                    let k = chan.kappa_as::<f64>();
                    let mu = if branch == Branch::Regular { n as f64 + k + 0.5 } else { n as f64 };
                    (omega, k, mu)
                }
                _ => (f64::NAN, f64::NAN, f64::NAN),
            };
            Ok(vec![EnergyRelation {
                component,
                epsilon: eps,
                omega,
                kappa_hat,
                reference_branch: branch,
                reference_level: n,
                mu_hat,
                eps_hat: Some(eps),
                normalizable: true,
            }])
        }
        Row::Morse => morse_relation(spec, ctx, chan, branch, n, component, osc_eps_hat),
        Row::Coulomb => coulomb_relation(spec, ctx, chan, branch, n, component, osc_eps_hat),
        _ => Err(Error::Unsupported(format!("energy relation for the {} row", map.row.name()))),
    }
}

fn morse_relation(
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    branch: Branch,
    n: u32,
    component: Component,
    eps_hat: impl Fn(f64, f64) -> Option<f64>,
) -> Result<Vec<EnergyRelation>> {
    let PotentialSpec::Morse { a, lambda: tau, .. } = *spec else { unreachable!() };
    let tp = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let (t, lb) = (tp.t, ctx.lambda_bar);
    let omega = (2.0 * a / tau).sqrt();
    let reference_level = match (component, branch) {
        (Component::Upper, _) => n,
        (Component::Lower, Branch::Regular) => n
            .checked_sub(1)
            .ok_or_else(|| Error::NoSolution("the lower component vanishes at n = 0".into()))?,
        (Component::Lower, Branch::Irregular) => {
            return Err(Error::Unsupported("lower-sign relation on the irregular Morse branch".into()))
        }
    };
    // (ε²−1)/λ̄² = −(Tε/λ̄ − τn)²
    let p = lb * tau * n as f64;
    let disc = 1.0 + t * t - p * p;
    if disc < 0.0 {
        return Err(Error::NoSolution(format!("Morse quadratic has no real root at n = {n} (discriminant {disc})")));
    }
    let roots = [(t * p + disc.sqrt()) / (1.0 + t * t), (t * p - disc.sqrt()) / (1.0 + t * t)];
    Ok(roots
        .iter()
        .map(|&eps| {
            let two_nu = 2.0 * (t * eps / (lb * tau) - n as f64);
            let (kappa_hat, mu_hat) = match (component, branch) {
                (Component::Upper, Branch::Regular) => (two_nu - 0.5, n as f64 + two_nu),
                (Component::Upper, Branch::Irregular) => (-two_nu - 0.5, n as f64),
                _ => (two_nu + 0.5, reference_level as f64 + two_nu + 1.0),
            };
            EnergyRelation {
                component,
                epsilon: eps,
                omega,
                kappa_hat,
                reference_branch: branch,
                reference_level,
                mu_hat,
                eps_hat: eps_hat(omega, mu_hat),
                normalizable: two_nu > 0.0,
            }
        })
        .collect())
}

fn coulomb_relation(
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    branch: Branch,
    n: u32,
    component: Component,
    eps_hat: impl Fn(f64, f64) -> Option<f64>,
) -> Result<Vec<EnergyRelation>> {
    let PotentialSpec::Coulomb { z } = *spec else { unreachable!() };
    if branch == Branch::Irregular || chan.kappa < 0 {
        return Err(Error::Unsupported("the Coulomb row covers the regular branch with kappa > 0".into()));
    }
    let gamma = coulomb_gamma(z, ctx, chan)?;
    let shell = n as f64 + gamma + 1.0;
    let q = ctx.lambda_bar * z / shell;
    let eps0 = (1.0 + q * q).sqrt().recip();
    let (kappa_hat, reference_level) = match component {
        Component::Upper => (2.0 * gamma + 0.5, n),
        Component::Lower => (2.0 * gamma - 0.5, n + 1),
    };
    Ok([eps0, -eps0]
        .iter()
        .map(|&eps| {
            // ω² = −2Zε/(n+γ+1), ω⁴/4 = (1−ε²)/λ̄²
            let omega2 = -2.0 * z * eps / shell;
            let omega = omega2.abs().sqrt();
            let mu_hat = reference_level as f64 + kappa_hat + 0.5;
            EnergyRelation {
                component,
                epsilon: eps,
                omega,
                kappa_hat,
                reference_branch: Branch::Regular,
                reference_level,
                mu_hat,
                eps_hat: eps_hat(omega, mu_hat),
                normalizable: omega2 > 0.0,
            }
        })
        .collect())
}

fn physical(relations: Vec<EnergyRelation>) -> Result<EnergyRelation> {
    relations
        .into_iter()
        .filter(|r| r.normalizable && r.epsilon > 0.0 && r.eps_hat.is_some())
        .max_by(|a, b| a.epsilon.total_cmp(&b.epsilon))
        .ok_or_else(|| Error::NoSolution("no normalizable positive-energy solution".into()))
}

/// Unnormalized component of the Dirac oscillator at a real `κ̂`:
/// upper `(ωρ)^{κ̂+1} e^{−ω²ρ²/2} L_n^{κ̂+½}(ω²ρ²)`, lower
/// `(ωρ)^{κ̂} e^{−ω²ρ²/2} L_n^{κ̂−½}(ω²ρ²)`; the irregular upper uses `−κ̂`
/// in place of `κ̂ + 1` and `−κ̂ − ½` as the Laguerre order.
pub fn oscillator_reference(
    omega: f64,
    kappa_hat: f64,
    branch: Branch,
    n: u32,
    component: Component,
    rho: f64,
) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("oscillator reference needs rho > 0, got {rho}")));
    }
    let (power, order) = match (branch, component) {
        (Branch::Regular, Component::Upper) => (kappa_hat + 1.0, kappa_hat + 0.5),
        (Branch::Regular, Component::Lower) => (kappa_hat, kappa_hat - 0.5),
        (Branch::Irregular, Component::Upper) => (-kappa_hat, -kappa_hat - 0.5),
        (Branch::Irregular, Component::Lower) => {
            return Err(Error::Unsupported("irregular lower oscillator reference".into()))
        }
    };
    let y = omega * rho;
    let lg = power * y.ln() - y * y / 2.0;
    let p = laguerre(n, order, y * y);
    Ok(if lg < -745.0 { 0.0 } else { p * lg.exp() })
}

/// Energies entering `g±`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XpctEnergies {
    pub eps_hat: f64,
    pub c_hat: f64,
    pub epsilon: f64,
    pub c: f64,
}

fn prefactor(d1: f64, num: f64, den: f64, what: &str) -> Result<f64> {
    if den.abs() < PREFACTOR_FLOOR {
        return Err(Error::SingularPrefactor(format!("{what} = {den:e}")));
    }
    Ok((d1 * num / den).abs().sqrt())
}

/// Maps a reference spinor sampled on a positive `ρ` grid (`r_grid` holds
/// `ρ`) to the target, `φ±(r) = g±(ρ)·φ̂±(ρ)`, and normalizes it.
///
/// The output is sampled on the image `q(ρ_i)` sorted ascending, or
/// resampled onto `target_grid` by cubic interpolation. A component that is
/// identically zero is passed through without its prefactor, so `C − ε = 0`
/// only raises `SingularPrefactor` when the lower reference is nonzero. The
/// lower component is the image under the lower-sign relation (minus frame).
pub fn transform_spinor(
    map: &XpctMap,
    reference: &RadialSpinor,
    energies: XpctEnergies,
    state: BoundState<f64>,
    target_grid: Option<&[f64]>,
) -> Result<RadialSpinor> {
    if map.section() != Section::PositiveAxis {
        return Err(Error::Unsupported(format!(
            "the {} row needs a reference evaluated off the real axis",
            map.row.name()
        )));
    }
    let XpctEnergies { eps_hat, c_hat, epsilon, c } = energies;
    let any = |v: &[f64]| v.iter().any(|&x| x != 0.0);
    let (has_up, has_low) = (any(&reference.phi_plus), any(&reference.phi_minus));
    if has_up && (c + epsilon).abs() < PREFACTOR_FLOOR {
        return Err(Error::SingularPrefactor(format!("C + eps = {:e}", c + epsilon)));
    }
    if has_low && (c - epsilon).abs() < PREFACTOR_FLOOR {
        return Err(Error::SingularPrefactor(format!("C - eps = {:e}", c - epsilon)));
    }
    let mut rows = Vec::with_capacity(reference.r_grid.len());
    for (i, &rho) in reference.r_grid.iter().enumerate() {
        if !(rho > 0.0) {
            return Err(Error::Domain(format!("reference grid needs rho > 0, got {rho}")));
        }
        let z = Complex64::new(rho, 0.0);
        let d1 = map.q1(z).re;
        if !(d1.abs() > f64::MIN_POSITIVE) || !d1.is_finite() {
            return Err(Error::SingularMap(format!("q' = {d1} at rho = {rho}")));
        }
        let up = if has_up { prefactor(d1, c_hat + eps_hat, c + epsilon, "C + eps")? * reference.phi_plus[i] } else { 0.0 };
        let low =
            if has_low { prefactor(d1, c_hat - eps_hat, c - epsilon, "C - eps")? * reference.phi_minus[i] } else { 0.0 };
        rows.push((map.q(z).re, up, low));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let r: Vec<f64> = rows.iter().map(|t| t.0).collect();
    let up: Vec<f64> = rows.iter().map(|t| t.1).collect();
    let low: Vec<f64> = rows.iter().map(|t| t.2).collect();
    let spinor = RadialSpinor::new(r, up, low, state, Sign::Plus)?;
    let spinor = match target_grid {
        Some(g) => resample(&spinor, g)?,
        None => spinor,
    };
    normalize(spinor)
}

/// Four-point Lagrange interpolation of both components onto `grid`.
pub fn resample(spinor: &RadialSpinor, grid: &[f64]) -> Result<RadialSpinor> {
    let x = &spinor.r_grid;
    if x.len() < 4 {
        return Err(Error::Domain("resampling needs at least 4 samples".into()));
    }
    let (lo, hi) = (x[0], x[x.len() - 1]);
    let mut up = Vec::with_capacity(grid.len());
    let mut low = Vec::with_capacity(grid.len());
    for &g in grid {
        if g < lo || g > hi {
            return Err(Error::Domain(format!("r = {g} outside the sampled range [{lo}, {hi}]")));
        }
        let k = x.partition_point(|&v| v < g).clamp(2, x.len() - 2) - 2;
        let idx = [k, k + 1, k + 2, k + 3];
        let w: Vec<f64> = idx
            .iter()
            .map(|&i| idx.iter().filter(|&&j| j != i).map(|&j| (g - x[j]) / (x[i] - x[j])).product())
            .collect();
        up.push(idx.iter().zip(&w).map(|(&i, wi)| wi * spinor.phi_plus[i]).sum());
        low.push(idx.iter().zip(&w).map(|(&i, wi)| wi * spinor.phi_minus[i]).sum());
    }
    RadialSpinor::new(grid.to_vec(), up, low, spinor.bound_state, spinor.frame)
}

/// Target state and spinor rebuilt from the oscillator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regenerated {
    pub upper: EnergyRelation,
    pub lower: Option<EnergyRelation>,
    pub state: BoundState<f64>,
    #[serde(skip)]
    pub spinor: RadialSpinor,
}

fn mapped_component(
    map: &XpctMap,
    rel: &EnergyRelation,
    c: f64,
    r: &[f64],
) -> Result<Vec<f64>> {
    let eps_hat = rel.eps_hat.ok_or_else(|| Error::NoSolution("imaginary reference energy".into()))?;
    let (num, den, what) = match rel.component {
        Component::Upper => (1.0 + eps_hat, c + rel.epsilon, "C + eps"),
        Component::Lower => (1.0 - eps_hat, c - rel.epsilon, "C - eps"),
    };
    r.iter()
        .map(|&x| {
            let (rho, d1, _) = map.local(x)?;
            let g = prefactor(d1.re, num, den, what)?;
            Ok(g * oscillator_reference(rel.omega, rel.kappa_hat, rel.reference_branch, rel.reference_level, rel.component, rho.re)?)
        })
        .collect()
}

/// Regular level `n` of a Coulomb or Morse target built from the Dirac
/// oscillator: energy from the upper-sign relation, upper component mapped
/// from the oscillator upper component, lower component mapped from the
/// oscillator lower component of the lower-sign relation. The result is a
/// normalized plus-frame spinor.
pub fn regenerate(
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    n: u32,
    grid: Option<&[f64]>,
) -> Result<Regenerated> {
    let map = XpctMap::for_target(spec)?;
    if !matches!(map.row, Row::Morse | Row::Coulomb) {
        return Err(Error::Unsupported(format!("regeneration of {} from the oscillator", spec.kind())));
    }
    let upper = physical(energy_relation(&map, spec, ctx, chan, Branch::Regular, n, Component::Upper)?)?;
    let lower = match energy_relation(&map, spec, ctx, chan, Branch::Regular, n, Component::Lower) {
        Ok(rels) => Some(physical(rels)?),
        Err(Error::NoSolution(_)) if map.row == Row::Morse && n == 0 => None,
        Err(e) => return Err(e),
    };
    if let Some(l) = &lower {
        if (l.epsilon - upper.epsilon).abs() > RELATION_AGREEMENT {
            return Err(Error::InconsistentMap(format!(
                "upper-sign eps = {} but lower-sign eps = {}",
                upper.epsilon, l.epsilon
            )));
        }
    }
    let state = BoundState { n, branch: Branch::Regular, energy_sign: Sign::Plus, epsilon: upper.epsilon };
    let r = match grid {
        Some(g) => g.to_vec(),
        None => default_grid(std::slice::from_ref(&state), spec, ctx, chan, DEFAULT_POINTS)?,
    };
    let c = derive_transform(spec, ctx, chan, Sign::Plus)?.c;
    let up = mapped_component(&map, &upper, c, &r)?;
    let low = match &lower {
        Some(l) => mapped_component(&map, l, c, &r)?,
        None => vec![0.0; r.len()],
    };
    let spinor = spinor_from_frames(up, &low, &state, spec, ctx, chan, r)?;
    Ok(Regenerated { upper, lower, state, spinor })
}

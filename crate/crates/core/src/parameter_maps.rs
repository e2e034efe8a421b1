//! Relativistic ↔ nonrelativistic parameter substitutions.
//!
//! Each Schrödinger-like equation for a spinor component has the shape of a
//! nonrelativistic equation `[-d² + U_eff(r) − 2E]ψ = 0` once a handful of
//! parameters are replaced. [`ParameterMap`] records those replacements as
//! data; [`apply_map`] turns a map plus the nonrelativistic spectrum back into
//! a relativistic energy by solving for `ε`.

use std::fmt;

use serde::Serialize;

use crate::catalog::{AngularChannel, Branch, PotentialKind, PotentialSpec, RelativisticContext};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectra::{coulomb_gamma, woods_saxon_phase_nonrel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Upper,
    Lower,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::Upper => "upper",
            Component::Lower => "lower",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Substitution {
    pub symbol: &'static str,
    pub target: &'static str,
}

/// Which solution of the `ℓ(ℓ+1)`-type quadratic (or its analogue) a map picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParameterMap {
    pub potential: PotentialKind,
    pub component: Component,
    pub branch: Branch,
    pub choice: Choice,
    pub substitutions: Vec<Substitution>,
    /// Relativistic level reached from nonrelativistic level `n` is
    /// `n + energy_offset` on the same branch.
    pub energy_offset: i32,
}

const fn sub(symbol: &'static str, target: &'static str) -> Substitution {
    Substitution { symbol, target }
}

fn record(
    potential: PotentialKind,
    component: Component,
    branch: Branch,
    choice: Choice,
    energy_offset: i32,
    subs: &[Substitution],
) -> ParameterMap {
    ParameterMap { potential, component, branch, choice, substitutions: subs.to_vec(), energy_offset }
}

const E_MAP: Substitution = sub("E", "(ε²−1)/2λ̄²");

/// Every map the library knows, upper maps first.
pub fn all_maps() -> Vec<ParameterMap> {
    PotentialKind::ALL.iter().flat_map(|&k| maps_for(k)).collect()
}

pub fn maps_for(kind: PotentialKind) -> Vec<ParameterMap> {
    use Branch::*;
    use Choice::*;
    use Component::*;
    use PotentialKind as K;
    match kind {
        K::Coulomb => vec![
            record(kind, Upper, Regular, First, 0, &[sub("ℓ", "γ"), sub("Z", "Zε"), E_MAP]),
            record(kind, Upper, Irregular, Second, 0, &[sub("ℓ", "−γ−1"), sub("Z", "Zε"), E_MAP]),
            record(kind, Lower, Regular, First, -1, &[sub("ℓ", "γ−1"), sub("Z", "Zε"), E_MAP]),
            record(kind, Lower, Irregular, Second, 1, &[sub("ℓ", "−γ"), sub("Z", "Zε"), E_MAP]),
        ],
        K::Oscillator => vec![
            record(kind, Upper, Regular, First, 0, &[sub("ℓ", "κ"), sub("ω", "ω"), sub("E", "(ε²−1)/2λ̄² + ω²(1/2−κ)")]),
            record(kind, Upper, Irregular, Second, 0, &[sub("ℓ", "−κ−1"), sub("ω", "ω"), sub("E", "(ε²−1)/2λ̄² + ω²(1/2−κ)")]),
            record(kind, Lower, Regular, First, 0, &[sub("ℓ", "κ−1"), sub("ω", "ω"), sub("E", "(ε²−1)/2λ̄² − ω²(κ+1/2)")]),
            record(kind, Lower, Irregular, Second, 1, &[sub("ℓ", "−κ"), sub("ω", "ω"), sub("E", "(ε²−1)/2λ̄² − ω²(κ+1/2)")]),
        ],
        K::Morse => vec![
            record(kind, Upper, Regular, First, 0, &[sub("A", "A"), sub("B", "εB/A"), E_MAP]),
            record(kind, Lower, Regular, First, 1, &[sub("A", "A"), sub("B", "εB/A − λ"), E_MAP]),
        ],
        K::RosenMorseI | K::Eckart => vec![
            record(kind, Upper, Regular, First, 0, &[sub("A", "A"), sub("B", "εB"), E_MAP]),
            record(kind, Upper, Regular, Second, 0, &[sub("A", "−A−λ"), sub("B", "εB"), sub("E", "(ε²−1)/2λ̄² + λ(A+λ/2)")]),
            record(kind, Lower, Regular, First, 1, &[sub("A", "A−λ"), sub("B", "εB"), sub("E", "(ε²−1)/2λ̄² − λ(A−λ/2)")]),
            record(kind, Lower, Regular, Second, 1, &[sub("A", "−A"), sub("B", "εB"), E_MAP]),
        ],
        K::RosenMorseII | K::Scarf | K::PoschlTeller => {
            vec![record(kind, Upper, Regular, First, 0, &[sub("A", "A"), sub("B", "B"), E_MAP])]
        }
        K::WoodsSaxon => vec![record(
            kind,
            Upper,
            Regular,
            First,
            0,
            &[sub("R", "R"), sub("a", "1/λ"), sub("V₀", "εB − λ²/2"), E_MAP],
        )],
    }
}

pub fn find_map(kind: PotentialKind, component: Component, branch: Branch, choice: Choice) -> Option<ParameterMap> {
    maps_for(kind).into_iter().find(|m| m.component == component && m.branch == branch && m.choice == choice)
}

/// Parameters of a nonrelativistic reference problem, written in the
/// `[-d² + U_eff − 2E]ψ = 0` convention.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum NonrelParams<T> {
    /// `ℓ(ℓ+1)/r² + 2Z/r`
    Coulomb { ell: T, z: T },
    /// `ℓ(ℓ+1)/r² + ω⁴r²`
    Oscillator { ell: T, omega: T },
    /// `A²e^{-2λr} − A(2B + λ)e^{-λr}`
    Morse { a: T, b: T, lambda: T },
    /// `−A(A+λ)sech² + 2B tanh + A²`
    RosenMorseI { a: T, b: T, lambda: T },
    /// `A(A+λ)csch² + 2B coth + A²`
    Eckart { a: T, b: T, lambda: T },
    /// `(A²+B²+λA)csch² − B(2A+λ)coth·csch + A²`
    RosenMorseII { a: T, b: T, lambda: T },
    /// `−(A²−B²+λA)sech² + B(2A+λ)tanh·sech + A²`
    Scarf { a: T, b: T, lambda: T },
    /// `B(B−λ)csch² − A(A−λ)sech² + (A+B)²`
    PoschlTeller { a: T, b: T, lambda: T },
    /// `−2V₀/(1 + e^{(r−R)/a})`
    WoodsSaxon { v0: T, a: T, r0: T },
}

/// `E = (ε² − 1)/2λ̄²`.
pub fn nonrel_limit_energy<T: Scalar>(epsilon: T, ctx: &RelativisticContext<T>) -> T {
    (epsilon * epsilon - T::one()) / (T::lit(2.0) * ctx.lambda_bar * ctx.lambda_bar)
}

/// Effective potential `U_eff(r)` of the reference equation.
pub fn schrodinger_reference<T: Scalar>(p: &NonrelParams<T>, r: T) -> T {
    let two = T::lit(2.0);
    match *p {
        NonrelParams::Coulomb { ell, z } => ell * (ell + T::one()) / (r * r) + two * z / r,
        NonrelParams::Oscillator { ell, omega } => {
            let w2 = omega * omega;
            ell * (ell + T::one()) / (r * r) + w2 * w2 * r * r
        }
        NonrelParams::Morse { a, b, lambda } => {
            let e = (-lambda * r).exp();
            a * a * e * e - a * (two * b + lambda) * e
        }
        NonrelParams::RosenMorseI { a, b, lambda } => {
            let x = lambda * r;
            let c = x.cosh();
            -a * (a + lambda) / (c * c) + two * b * x.tanh() + a * a
        }
        NonrelParams::Eckart { a, b, lambda } => {
            let x = lambda * r;
            let s = x.sinh();
            a * (a + lambda) / (s * s) + two * b / x.tanh() + a * a
        }
        NonrelParams::RosenMorseII { a, b, lambda } => {
            let x = lambda * r;
            let s = x.sinh();
            (a * a + b * b + lambda * a) / (s * s) - b * (two * a + lambda) * x.cosh() / (s * s) + a * a
        }
        NonrelParams::Scarf { a, b, lambda } => {
            let x = lambda * r;
            let c = x.cosh();
            -(a * a - b * b + lambda * a) / (c * c) + b * (two * a + lambda) * x.sinh() / (c * c) + a * a
        }
        NonrelParams::PoschlTeller { a, b, lambda } => {
            let x = lambda * r;
            let (c, s) = (x.cosh(), x.sinh());
            b * (b - lambda) / (s * s) - a * (a - lambda) / (c * c) + (a + b) * (a + b)
        }
        NonrelParams::WoodsSaxon { v0, a, r0 } => {
            let x = (r - r0) / a;
            let p = if x > T::zero() {
                let e = (-x).exp();
                e / (T::one() + e)
            } else {
                T::one() / (T::one() + x.exp())
            };
            -two * v0 * p
        }
    }
}

/// Nonrelativistic level `E_n`; `Domain` when level `n` is not bound.
pub fn nonrel_energy<T: Scalar>(p: &NonrelParams<T>, n: u32) -> Result<T> {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let nn = T::of_u32(n);
    let unbound = |why: String| Err(Error::Domain(format!("nonrelativistic level n = {n} unbound: {why}")));
    match *p {
        NonrelParams::Coulomb { ell, z } => {
            let d = ell + nn + T::one();
            if !(z < T::zero()) || !(d > T::zero()) {
                return unbound(format!("Z = {z}, l + n + 1 = {d}"));
            }
            Ok(-z * z / (two * d * d))
        }
        NonrelParams::Oscillator { ell, omega } => {
            if !(ell > -T::lit(1.5)) {
                return unbound(format!("l = {ell}"));
            }
            Ok(omega * omega * (two * nn + ell + T::lit(1.5)))
        }
        NonrelParams::Morse { a, b, lambda } => {
            let k = b - nn * lambda;
            if !(k > T::zero()) || !(a > T::zero()) {
                return unbound(format!("B − nλ = {k}"));
            }
            Ok(-k * k / two)
        }
        NonrelParams::RosenMorseI { a, b, lambda } => {
            let m = a - nn * lambda;
            if !(m > T::zero()) || !(m * m > b.abs()) {
                return unbound(format!("A − nλ = {m}, B = {b}"));
            }
            Ok(half * (a * a - m * m - b * b / (m * m)))
        }
        NonrelParams::Eckart { a, b, lambda } => {
            let m = a - nn * lambda;
            if !(m < T::zero()) || !(-b > m * m) {
                return unbound(format!("A − nλ = {m}, B = {b}"));
            }
            Ok(half * (a * a - m * m - b * b / (m * m)))
        }
        NonrelParams::RosenMorseII { a, lambda, .. } | NonrelParams::Scarf { a, lambda, .. } => {
            let m = a - nn * lambda;
            if !(m > T::zero()) {
                return unbound(format!("A − nλ = {m}"));
            }
            Ok(half * (a * a - m * m))
        }
        NonrelParams::PoschlTeller { a, b, lambda } => {
            let s = a + b;
            let m = s + two * nn * lambda;
            if !(m < T::zero()) {
                return unbound(format!("A + B + 2nλ = {m}"));
            }
            Ok(half * (s * s - m * m))
        }
        NonrelParams::WoodsSaxon { v0, a, r0 } => woods_saxon_nonrel_level(v0, a, r0, n),
    }
}

/// Root of `f(E) = (n + 1/2)π` in `(−V₀, 0)`.
fn woods_saxon_nonrel_level<T: Scalar>(v0: T, a: T, r0: T, n: u32) -> Result<T> {
    if !(v0 > T::zero()) {
        return Err(Error::Domain(format!("woods-saxon depth V0 = {v0} not attractive")));
    }
    let target = (T::of_u32(n) + T::lit(0.5)) * T::PI();
    let tiny = T::lit(1e-12) * v0;
    let g = |e: T| woods_saxon_phase_nonrel(e, a, r0, v0).map(|f| f - target);
    let (mut lo, mut hi) = (-v0 + tiny, -tiny);
    let (glo, ghi) = match (g(lo), g(hi)) {
        (Some(l), Some(h)) => (l, h),
        _ => return Err(Error::Numerical("woods-saxon phase undefined at window edge".into())),
    };
    if glo > T::zero() || ghi < T::zero() {
        return Err(Error::Domain(format!("woods-saxon level n = {n} unbound")));
    }
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        match g(mid) {
            Some(v) if v < T::zero() => lo = mid,
            Some(_) => hi = mid,
            None => return Err(Error::Numerical("woods-saxon phase undefined".into())),
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// The nonrelativistic parameters and energy offset a map assigns at trial
/// energy `ε`: the relativistic condition is `E_map(ε) = E_n(params(ε))`.
pub fn substitute<T: Scalar>(
    map: &ParameterMap,
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    chan: &AngularChannel,
    epsilon: T,
) -> Result<(NonrelParams<T>, T)> {
    if map.potential != spec.kind() {
        return Err(Error::InconsistentMap(format!("map for {} applied to {}", map.potential, spec.kind())));
    }
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let e_map = nonrel_limit_energy(epsilon, ctx);
    let kappa = chan.kappa_as::<T>();
    let (upper, first) = (map.component == Component::Upper, map.choice == Choice::First);
    Ok(match *spec {
        PotentialSpec::Coulomb { z } => {
            let g = coulomb_gamma(z, ctx, chan)?;
            let ell = match (upper, first) {
                (true, true) => g,
                (true, false) => -g - one,
                (false, true) => g - one,
                (false, false) => -g,
            };
            (NonrelParams::Coulomb { ell, z: z * epsilon }, e_map)
        }
        PotentialSpec::Oscillator { omega } => {
            let w2 = omega * omega;
            let (ell, shift) = match (upper, first) {
                (true, true) => (kappa, w2 * (half - kappa)),
                (true, false) => (-kappa - one, w2 * (half - kappa)),
                (false, true) => (kappa - one, -w2 * (kappa + half)),
                (false, false) => (-kappa, -w2 * (kappa + half)),
            };
            (NonrelParams::Oscillator { ell, omega }, e_map + shift)
        }
        PotentialSpec::Morse { a, b, lambda } => {
            let b_eff = if upper { epsilon * b / a } else { epsilon * b / a - lambda };
            (NonrelParams::Morse { a, b: b_eff, lambda }, e_map)
        }
        PotentialSpec::RosenMorseI { a, b, lambda } | PotentialSpec::Eckart { a, b, lambda } => {
            let (a_eff, shift) = match (upper, first) {
                (true, true) => (a, T::zero()),
                (true, false) => (-a - lambda, lambda * (a + lambda / two)),
                (false, true) => (a - lambda, -lambda * (a - lambda / two)),
                (false, false) => (-a, T::zero()),
            };
            let b_eff = epsilon * b;
            let p = if spec.kind() == PotentialKind::RosenMorseI {
                NonrelParams::RosenMorseI { a: a_eff, b: b_eff, lambda }
            } else {
                NonrelParams::Eckart { a: a_eff, b: b_eff, lambda }
            };
            (p, e_map + shift)
        }
        PotentialSpec::RosenMorseII { a, b, lambda } => (NonrelParams::RosenMorseII { a, b, lambda }, e_map),
        PotentialSpec::Scarf { a, b, lambda } => (NonrelParams::Scarf { a, b, lambda }, e_map),
        PotentialSpec::PoschlTeller { a, b, lambda } => (NonrelParams::PoschlTeller { a, b, lambda }, e_map),
        PotentialSpec::WoodsSaxon { b, r0, lambda } => (
            NonrelParams::WoodsSaxon { v0: epsilon * b - lambda * lambda / two, a: lambda.recip(), r0 },
            e_map,
        ),
    })
}

/// Whether the substituted nonrelativistic parameters depend on `ε`.
pub fn is_implicit(map: &ParameterMap) -> bool {
    map.substitutions.iter().filter(|s| s.symbol != "E").any(|s| s.target.contains('ε'))
}

const SCAN_PANELS: usize = 400;

/// Relativistic energy implied by `map` and nonrelativistic level `n`
/// (positive-energy solution).
///
/// Maps whose parameters do not involve `ε` are inverted in closed form;
/// the others are solved by scanning `ε ∈ (0, ε_cap)` for a sign change of
/// `E_map(ε) − E_n(params(ε))` and bisecting.
pub fn apply_map<T: Scalar>(
    map: &ParameterMap,
    spec: &PotentialSpec<T>,
    ctx: &RelativisticContext<T>,
    chan: &AngularChannel,
    n: u32,
) -> Result<T> {
    spec.validate()?;
    let lb2 = ctx.lambda_bar * ctx.lambda_bar;
    let two = T::lit(2.0);
    if !is_implicit(map) {
        // E_map(ε) = (ε²−1)/2λ̄² + shift, with shift independent of ε
        let (p, e0) = substitute(map, spec, ctx, chan, T::one())?;
        let en = nonrel_energy(&p, n)?;
        let eps2 = T::one() + two * lb2 * (en - e0);
        if eps2 < T::zero() {
            return Err(Error::InconsistentMap(format!("ε² = {eps2} < 0 at n = {n}")));
        }
        return Ok(eps2.sqrt());
    }

    let residual = |eps: T| -> Option<T> {
        let (p, e) = substitute(map, spec, ctx, chan, eps).ok()?;
        let en = nonrel_energy(&p, n).ok()?;
        Some(e - en)
    };
    let cap = T::lit(4.0);
    let lo0 = T::lit(1e-9);
    let step = (cap - lo0) / T::lit(SCAN_PANELS as f64);
    let mut prev: Option<(T, T)> = None;
    for i in 0..=SCAN_PANELS {
        let e = lo0 + step * T::lit(i as f64);
        let Some(r) = residual(e) else {
            prev = None;
            continue;
        };
        if r == T::zero() {
            return Ok(e);
        }
        if let Some((e0, r0)) = prev {
            if (r0 < T::zero()) != (r < T::zero()) {
                return bisect(&residual, e0, e, r0);
            }
        }
        prev = Some((e, r));
    }
    Err(Error::InconsistentMap(format!(
        "{} {} map: no real ε for n = {n}",
        map.potential, map.component
    )))
}

fn bisect<T: Scalar>(g: &impl Fn(T) -> Option<T>, mut lo: T, mut hi: T, glo: T) -> Result<T> {
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid).ok_or_else(|| Error::Numerical("map residual undefined inside bracket".into()))?;
        if (gm < T::zero()) == (glo < T::zero()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / T::lit(2.0))
}

/// Relativistic level index reached from nonrelativistic level `n`, or
/// `None` when it would be negative.
pub fn relativistic_index(map: &ParameterMap, n: u32) -> Option<u32> {
    u32::try_from(n as i64 + map.energy_offset as i64).ok()
}

/// Nonrelativistic limit of a catalog spectrum at `λ̄ → 0`, with the
/// catalog's own parameters read as nonrelativistic ones.
pub fn nonrel_reference<T: Scalar>(spec: &PotentialSpec<T>, chan: &AngularChannel) -> NonrelParams<T> {
    let ell = T::of_u32(chan.ell());
    let two = T::lit(2.0);
    match *spec {
        PotentialSpec::Coulomb { z } => NonrelParams::Coulomb { ell, z },
        PotentialSpec::Oscillator { omega } => NonrelParams::Oscillator { ell, omega },
        PotentialSpec::Morse { a, b, lambda } => NonrelParams::Morse { a, b: b / a, lambda },
        PotentialSpec::RosenMorseI { a, b, lambda } => NonrelParams::RosenMorseI { a, b, lambda },
        PotentialSpec::Eckart { a, b, lambda } => NonrelParams::Eckart { a, b, lambda },
        PotentialSpec::RosenMorseII { a, b, lambda } => NonrelParams::RosenMorseII { a, b, lambda },
        PotentialSpec::Scarf { a, b, lambda } => NonrelParams::Scarf { a, b, lambda },
        PotentialSpec::PoschlTeller { a, b, lambda } => NonrelParams::PoschlTeller { a, b, lambda },
        PotentialSpec::WoodsSaxon { b, r0, lambda } => {
            NonrelParams::WoodsSaxon { v0: b - lambda * lambda / two, a: lambda.recip(), r0 }
        }
    }
}

/// Plain-text table of maps, one row per substitution.
pub fn format_table(maps: &[ParameterMap]) -> String {
    let mut rows = vec![["potential".to_string(), "component".into(), "branch".into(), "choice".into(), "offset".into(), "substitution".into()]];
    for m in maps {
        for s in &m.substitutions {
            rows.push([
                m.potential.name().to_string(),
                m.component.to_string(),
                format!("{:?}", m.branch).to_lowercase(),
                format!("{:?}", m.choice).to_lowercase(),
                format!("{:+}", m.energy_offset),
                format!("{} → {}", s.symbol, s.target),
            ]);
        }
    }
    let mut widths = [0usize; 6];
    for r in &rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::level;

    fn ctx(lb: f64) -> RelativisticContext<f64> {
        RelativisticContext::new(lb).unwrap()
    }

    fn ch(k: i32) -> AngularChannel {
        AngularChannel::new(k).unwrap()
    }

    fn upper(kind: PotentialKind, branch: Branch, choice: Choice) -> ParameterMap {
        find_map(kind, Component::Upper, branch, choice).unwrap()
    }

    #[test]
    fn catalog_of_maps() {
        assert_eq!(maps_for(PotentialKind::Coulomb).len(), 4);
        assert_eq!(maps_for(PotentialKind::RosenMorseI).len(), 4);
        assert!(all_maps().iter().all(|m| !m.substitutions.is_empty()));
        assert!(is_implicit(&upper(PotentialKind::Coulomb, Branch::Regular, Choice::First)));
        assert!(!is_implicit(&upper(PotentialKind::Oscillator, Branch::Regular, Choice::First)));
        let table = format_table(&maps_for(PotentialKind::Coulomb));
        assert!(table.contains("ℓ → γ−1"));
    }

    #[test]
    fn reference_values() {
        assert_eq!(schrodinger_reference(&NonrelParams::Coulomb { ell: 0.0, z: -1.0 }, 1.0), -2.0);
        let rm = NonrelParams::RosenMorseI { a: 2.0f64, b: 0.7, lambda: 1.0 };
        assert!((schrodinger_reference(&rm, 40.0) - (4.0 + 1.4)).abs() < 1e-12);
        let ws = NonrelParams::WoodsSaxon { v0: 3.0, a: 0.5, r0: 4.0 };
        assert_eq!(schrodinger_reference(&ws, 4.0), -3.0);
    }

    #[test]
    fn limit_energy() {
        let c = ctx(0.1);
        assert_eq!(nonrel_limit_energy(1.0, &c), 0.0);
        let e = -0.3;
        let eps = 1.0 + 0.01 * e;
        assert!((nonrel_limit_energy(eps, &c) - (e + 0.01 * e * e / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn coulomb_maps_reproduce_spectrum() {
        let (spec, c) = (PotentialSpec::Coulomb { z: -0.5 }, ctx(0.1));
        for n in 0..5 {
            let direct = level(&spec, &c, &ch(1), Branch::Regular, n).unwrap();
            let m = upper(PotentialKind::Coulomb, Branch::Regular, Choice::First);
            assert!((apply_map(&m, &spec, &c, &ch(1), n).unwrap() - direct).abs() < 1e-12 * direct);
            let low = find_map(PotentialKind::Coulomb, Component::Lower, Branch::Regular, Choice::First).unwrap();
            assert!((apply_map(&low, &spec, &c, &ch(1), n + 1).unwrap() - direct).abs() < 1e-12 * direct);
        }
        for n in 0..5 {
            let direct = level(&spec, &c, &ch(-2), Branch::Irregular, n).unwrap();
            let m = upper(PotentialKind::Coulomb, Branch::Irregular, Choice::Second);
            assert!((apply_map(&m, &spec, &c, &ch(-2), n).unwrap() - direct).abs() < 1e-12 * direct);
            let low = find_map(PotentialKind::Coulomb, Component::Lower, Branch::Irregular, Choice::Second).unwrap();
            let implied = apply_map(&low, &spec, &c, &ch(-2), n).unwrap();
            let bar = level(&spec, &c, &ch(-2), Branch::Irregular, n + 1).unwrap();
            assert!((implied - bar).abs() < 1e-12 * bar);
        }
    }

    #[test]
    fn lambda_to_zero_recovers_hydrogen() {
        let (spec, chan) = (PotentialSpec::Coulomb { z: -1.0 }, ch(1));
        let c = ctx(1e-4);
        let e = nonrel_limit_energy(level(&spec, &c, &chan, Branch::Regular, 0).unwrap(), &c);
        let reference = nonrel_energy(&nonrel_reference(&spec, &chan), 0).unwrap();
        assert!((e - reference).abs() < 1e-6);
    }

    #[test]
    fn oscillator_maps() {
        let (spec, c) = (PotentialSpec::Oscillator { omega: 1.5 }, ctx(0.05));
        for n in 0..4 {
            let reg = level(&spec, &c, &ch(2), Branch::Regular, n).unwrap();
            for comp in [Component::Upper, Component::Lower] {
                let m = find_map(PotentialKind::Oscillator, comp, Branch::Regular, Choice::First).unwrap();
                assert!((apply_map(&m, &spec, &c, &ch(2), n).unwrap() - reg).abs() < 1e-13);
            }
            let irr = level(&spec, &c, &ch(-2), Branch::Irregular, n).unwrap();
            let m = upper(PotentialKind::Oscillator, Branch::Irregular, Choice::Second);
            assert!((apply_map(&m, &spec, &c, &ch(-2), n).unwrap() - irr).abs() < 1e-13);
            let low = find_map(PotentialKind::Oscillator, Component::Lower, Branch::Irregular, Choice::Second).unwrap();
            let next = level(&spec, &c, &ch(-2), Branch::Irregular, n + 1).unwrap();
            assert!((apply_map(&low, &spec, &c, &ch(-2), n).unwrap() - next).abs() < 1e-13);
        }
    }

    #[test]
    fn hyperbolic_and_morse_maps() {
        let cases: Vec<(PotentialSpec<f64>, f64, i32, Vec<u32>)> = vec![
            (PotentialSpec::morse_from_oscillator(1.0, 0.3, 2.0, &ctx(0.05)), 0.05, -1, vec![0, 1, 2]),
            (PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 }, 0.1, 1, vec![0, 1, 2]),
            (PotentialSpec::Eckart { a: -4.0, b: -30.0, lambda: 1.0 }, 0.05, 1, vec![0, 1]),
            (PotentialSpec::RosenMorseII { a: 3.0, b: 4.0, lambda: 1.0 }, 0.1, 1, vec![0, 1, 2]),
            (PotentialSpec::Scarf { a: 3.0, b: 0.5, lambda: 1.0 }, 0.1, 1, vec![0, 1, 2]),
            (PotentialSpec::PoschlTeller { a: -8.0, b: 2.0, lambda: 1.0 }, 0.1, 1, vec![0, 1, 2]),
            (PotentialSpec::WoodsSaxon { b: 5.0, r0: 10.0, lambda: 2.0 }, 0.05, -1, vec![0, 1]),
        ];
        for (spec, lb, k, ns) in cases {
            let c = ctx(lb);
            let m = upper(spec.kind(), Branch::Regular, Choice::First);
            for n in ns {
                let direct = level(&spec, &c, &ch(k), Branch::Regular, n).unwrap();
                let mapped = apply_map(&m, &spec, &c, &ch(k), n).unwrap();
                let tol = if spec.kind() == PotentialKind::WoodsSaxon { 1e-10 } else { 1e-12 };
                assert!((mapped - direct).abs() < tol * direct.abs(), "{} n={n}: {mapped} vs {direct}", spec.kind());
            }
        }
    }

    #[test]
    fn lower_maps_shift_index() {
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let c = ctx(0.1);
        let low = find_map(PotentialKind::RosenMorseI, Component::Lower, Branch::Regular, Choice::First).unwrap();
        for n in 0..2 {
            let up = level(&spec, &c, &ch(1), Branch::Regular, n + 1).unwrap();
            assert!((apply_map(&low, &spec, &c, &ch(1), n).unwrap() - up).abs() < 1e-12);
            assert_eq!(relativistic_index(&low, n), Some(n + 1));
        }
        let morse = PotentialSpec::morse_from_oscillator(1.0, 0.3, 2.0, &c);
        let low = find_map(PotentialKind::Morse, Component::Lower, Branch::Regular, Choice::First).unwrap();
        let up = level(&morse, &c, &ch(-1), Branch::Regular, 1).unwrap();
        assert!((apply_map(&low, &morse, &c, &ch(-1), 0).unwrap() - up).abs() < 1e-12);
    }

    #[test]
    fn wrong_potential_rejected() {
        let m = upper(PotentialKind::Coulomb, Branch::Regular, Choice::First);
        let r = apply_map(&m, &PotentialSpec::Oscillator { omega: 1.0 }, &ctx(0.1), &ch(1), 0);
        assert!(matches!(r, Err(Error::InconsistentMap(_))));
    }

    #[test]
    fn f32_map() {
        let c = RelativisticContext::new(0.1f32).unwrap();
        let spec = PotentialSpec::Coulomb { z: -0.5f32 };
        let m = upper(PotentialKind::Coulomb, Branch::Regular, Choice::First);
        let e = apply_map(&m, &spec, &c, &ch(1), 0).unwrap();
        let d = level(&spec, &c, &ch(1), Branch::Regular, 0).unwrap();
        assert!((e - d).abs() < 1e-6);
    }
}

//! Two-component radial spinors.
//!
//! Spinors live in a rotated frame labelled by the sign of `sin θ = ±λ̄ξ`.
//! Closed upper components are evaluated in the `Sign::Plus` frame, where
//! `φ⁺` obeys `[−d² + C²U² − CU' + 2ξεU − (ε²−1)/λ̄²]φ⁺ = 0`. The closed lower
//! components live in the `Sign::Minus` frame, where `φ⁻` obeys the same
//! equation with `+CU'`. [`rotate`] moves sampled components between frames.
//!
//! Half-line grids are geometric and start at a small positive `r`; the
//! full-line rows (Morse, Rosen-Morse I, Scarf) use uniform grids that extend
//! to negative `r`.

use num_complex::Complex;
use serde::Serialize;

use crate::catalog::{derive_transform, AngularChannel, Branch, Domain, PotentialSpec, RelativisticContext, Sign, TransformParameters};
use crate::error::{Error, Result};
use crate::oracle::derivative;
use crate::specfun::{gauss_2f1_reflected, jacobi, laguerre, log_gamma};
use crate::spectra::{coulomb_gamma, hyperbolic_mu_nu, level, morse_nu, woods_saxon_mu_nu, BoundState};

pub const DEFAULT_POINTS: usize = 4000;
/// Grids end where the upper-component envelope drops below this fraction of its peak.
pub const DECAY_TOLERANCE: f64 = 1e-12;
const STENCIL: usize = 5;
const SCARF_IMAG_BOUND: f64 = 1e-10;
const LN_UNDERFLOW: f64 = -745.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSpinor {
    pub r_grid: Vec<f64>,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    pub bound_state: BoundState<f64>,
    /// Trapezoidal quadrature of `φ⁺² + φ⁻²`.
    pub norm: f64,
    /// Factor applied by the last [`normalize`]; 1 if never normalized.
    pub scale: f64,
    pub frame: Sign,
}

impl RadialSpinor {
    pub fn new(r_grid: Vec<f64>, phi_plus: Vec<f64>, phi_minus: Vec<f64>, bound_state: BoundState<f64>, frame: Sign) -> Result<Self> {
        if r_grid.len() != phi_plus.len() || r_grid.len() != phi_minus.len() {
            return Err(Error::Domain("grid and components differ in length".into()));
        }
        check_grid(&r_grid)?;
        let norm = composite_norm(&r_grid, &phi_plus, &phi_minus);
        Ok(Self { r_grid, phi_plus, phi_minus, bound_state, norm, scale: 1.0, frame })
    }

    /// `r,phi_plus,phi_minus` rows with 15 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,phi_plus,phi_minus\n");
        for i in 0..self.r_grid.len() {
            out.push_str(&format!("{:.14e},{:.14e},{:.14e}\n", self.r_grid[i], self.phi_plus[i], self.phi_minus[i]));
        }
        out
    }

    /// Metadata written next to the CSV.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "bound_state": self.bound_state,
            "norm": self.norm,
            "scale": self.scale,
            "frame": self.frame,
            "points": self.r_grid.len(),
            "r_min": self.r_grid.first(),
            "r_max": self.r_grid.last(),
        })
    }

    /// Same spinor expressed in the frame of `to`.
    pub fn rotated(&self, from: &TransformParameters<f64>, to: &TransformParameters<f64>) -> Result<Self> {
        if from.sign != self.frame {
            return Err(Error::Domain("rotation source frame does not match the spinor".into()));
        }
        let (p, m) = rotate(&self.phi_plus, &self.phi_minus, from, to);
        Ok(Self { phi_plus: p, phi_minus: m, frame: to.sign, ..self.clone() })
    }
}

/// Derived symbols of the closed upper component of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "potential", rename_all = "snake_case")]
pub enum WavefunctionParams {
    /// Argument `λ_n r`; `ell` is `γ` (regular) or `−γ−1` (irregular).
    Coulomb { gamma: f64, ell: f64, lambda_n: f64 },
    /// Argument `ω²r²`; `ell` is `κ` or `−κ−1`.
    Oscillator { omega: f64, ell: f64 },
    /// `z = μ e^{−λr}`, `μ = 2A/λ`.
    Morse { mu: f64, lambda: f64, nu_n: f64 },
    /// `z = tanh λr`.
    RosenMorseI { lambda: f64, mu_n: f64, nu_n: f64 },
    /// `z = coth λr`.
    Eckart { lambda: f64, mu_n: f64, nu_n: f64 },
    /// `z = cosh λr`, `μ = (B−A)/λ`, `ν = −(B+A)/λ`.
    RosenMorseII { lambda: f64, mu: f64, nu: f64 },
    /// `z = sinh λr`, `μ = A/λ`, `ν = B/λ`.
    Scarf { lambda: f64, mu: f64, nu: f64 },
    /// `z = cosh 2λr`, `μ = B/λ`, `ν = A/λ`.
    PoschlTeller { lambda: f64, mu: f64, nu: f64 },
    /// `z = 1/(1 + e^{λ(r−R)})`.
    WoodsSaxon { lambda: f64, r0: f64, mu_n: f64, nu_n: f64 },
}

impl WavefunctionParams {
    pub fn new(state: &BoundState<f64>, spec: &PotentialSpec<f64>, ctx: &RelativisticContext<f64>, chan: &AngularChannel) -> Result<Self> {
        let (n, eps) = (state.n, state.epsilon);
        let nn = n as f64;
        check_branch(state, spec, chan)?;
        Ok(match *spec {
            PotentialSpec::Coulomb { z } => {
                let gamma = coulomb_gamma(z, ctx, chan)?;
                let ell = match state.branch {
                    Branch::Regular => gamma,
                    Branch::Irregular => -gamma - 1.0,
                };
                WavefunctionParams::Coulomb { gamma, ell, lambda_n: -2.0 * z * eps.abs() / (ell + nn + 1.0) }
            }
            PotentialSpec::Oscillator { omega } => {
                let k = chan.kappa as f64;
                let ell = match state.branch {
                    Branch::Regular => k,
                    Branch::Irregular => -k - 1.0,
                };
                WavefunctionParams::Oscillator { omega, ell }
            }
            PotentialSpec::Morse { a, lambda, .. } => {
                if a <= 0.0 {
                    return Err(Error::Domain("Morse wavefunction needs A > 0".into()));
                }
                WavefunctionParams::Morse { mu: 2.0 * a / lambda, lambda, nu_n: morse_nu(spec, ctx, n, eps)? }
            }
            PotentialSpec::RosenMorseI { lambda, .. } => {
                let (mu_n, nu_n) = hyperbolic_mu_nu(spec, n, eps)?;
                WavefunctionParams::RosenMorseI { lambda, mu_n, nu_n }
            }
            PotentialSpec::Eckart { lambda, .. } => {
                let (mu_n, nu_n) = hyperbolic_mu_nu(spec, n, eps)?;
                WavefunctionParams::Eckart { lambda, mu_n, nu_n }
            }
            PotentialSpec::RosenMorseII { a, b, lambda } => {
                WavefunctionParams::RosenMorseII { lambda, mu: (b - a) / lambda, nu: -(b + a) / lambda }
            }
            PotentialSpec::Scarf { a, b, lambda } => WavefunctionParams::Scarf { lambda, mu: a / lambda, nu: b / lambda },
            PotentialSpec::PoschlTeller { a, b, lambda } => {
                WavefunctionParams::PoschlTeller { lambda, mu: b / lambda, nu: a / lambda }
            }
            PotentialSpec::WoodsSaxon { r0, lambda, .. } => {
                let (mu_n, nu_n) = woods_saxon_mu_nu(spec, ctx, eps)
                    .ok_or_else(|| Error::Domain(format!("woods-saxon: eps = {eps} outside the bound window")))?;
                WavefunctionParams::WoodsSaxon { lambda, r0, mu_n, nu_n }
            }
        })
    }

    /// Argument of the polynomial (or hypergeometric) factor at `r`.
    pub fn z(&self, r: f64) -> f64 {
        match *self {
            WavefunctionParams::Coulomb { lambda_n, .. } => lambda_n * r,
            WavefunctionParams::Oscillator { omega, .. } => omega * omega * r * r,
            WavefunctionParams::Morse { mu, lambda, .. } => mu * (-lambda * r).exp(),
            WavefunctionParams::RosenMorseI { lambda, .. } => (lambda * r).tanh(),
            WavefunctionParams::Eckart { lambda, .. } => 1.0 / (lambda * r).tanh(),
            WavefunctionParams::RosenMorseII { lambda, .. } => (lambda * r).cosh(),
            WavefunctionParams::Scarf { lambda, .. } => (lambda * r).sinh(),
            WavefunctionParams::PoschlTeller { lambda, .. } => (2.0 * lambda * r).cosh(),
            WavefunctionParams::WoodsSaxon { lambda, r0, .. } => 1.0 / (1.0 + (lambda * (r - r0)).exp()),
        }
    }
}

fn check_branch(state: &BoundState<f64>, spec: &PotentialSpec<f64>, chan: &AngularChannel) -> Result<()> {
    match (spec, state.branch) {
        (PotentialSpec::Coulomb { .. } | PotentialSpec::Oscillator { .. }, Branch::Regular) if chan.kappa < 0 => {
            Err(Error::Branch("regular branch needs kappa > 0".into()))
        }
        (PotentialSpec::Coulomb { .. } | PotentialSpec::Oscillator { .. }, Branch::Irregular) if chan.kappa > 0 => {
            Err(Error::Branch("irregular branch needs kappa < 0".into()))
        }
        (PotentialSpec::Coulomb { .. } | PotentialSpec::Oscillator { .. } | PotentialSpec::Morse { .. }, _) => Ok(()),
        (_, Branch::Irregular) => Err(Error::Branch(format!("irregular branch unsupported for {}", spec.kind()))),
        _ => Ok(()),
    }
}

fn check_state(state: &BoundState<f64>, spec: &PotentialSpec<f64>, ctx: &RelativisticContext<f64>, chan: &AngularChannel) -> Result<()> {
    if state.energy_sign != Sign::Plus {
        return Err(Error::Unsupported("closed spinors are built for positive-energy states".into()));
    }
    let want = level(spec, ctx, chan, state.branch, state.n)?;
    if (want - state.epsilon).abs() > 1e-9 * want.abs().max(1.0) {
        return Err(Error::Domain(format!(
            "state eps = {} does not match level n = {} of {} (eps = {want})",
            state.epsilon,
            state.n,
            spec.kind()
        )));
    }
    Ok(())
}

fn check_grid(r: &[f64]) -> Result<()> {
    if r.len() < STENCIL {
        return Err(Error::Domain(format!("grid needs at least {STENCIL} points")));
    }
    if r.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be strictly increasing".into()));
    }
    Ok(())
}

fn check_domain(spec: &PotentialSpec<f64>, r: &[f64]) -> Result<()> {
    if spec.domain() != Domain::FullLine && r.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain(format!("{} needs r > 0", spec.kind())));
    }
    Ok(())
}

fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn ln_gamma(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex::new(x, 0.0))?.re)
}

fn cx(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

fn real_jacobi(n: u32, a: f64, b: f64, z: f64) -> f64 {
    jacobi(n, cx(a), cx(b), cx(z)).re
}

/// `exp(ln_env)·poly`, exactly zero once the envelope underflows.
fn assemble(ln_env: f64, poly: f64) -> f64 {
    if ln_env < LN_UNDERFLOW {
        0.0
    } else {
        ln_env.exp() * poly
    }
}

/// `ln sinh y` and `ln cosh y` for `y > 0`.
fn ln_sinh(y: f64) -> f64 {
    y - std::f64::consts::LN_2 + (-(-2.0 * y).exp_m1()).ln()
}

fn ln_cosh(y: f64) -> f64 {
    let y = y.abs();
    y - std::f64::consts::LN_2 + (-2.0 * y).exp().ln_1p()
}

/// Printed normalization constant `a_n` where the closed form comes with one.
pub fn normalization_constant(params: &WavefunctionParams, n: u32) -> Result<Option<f64>> {
    let nn = n as f64;
    Ok(match *params {
        WavefunctionParams::Coulomb { ell, lambda_n, .. } => {
            Some((0.5 * (lambda_n.ln() + ln_gamma(nn + 1.0)? - ln_gamma(nn + 2.0 * ell + 2.0)? - std::f64::consts::LN_2)).exp())
        }
        WavefunctionParams::Oscillator { omega, ell } => Some(oscillator_constant(omega, ell, n)?),
        WavefunctionParams::RosenMorseI { lambda, mu_n, nu_n } => Some(rosen_morse_constant(lambda, mu_n, nu_n, n)?),
        _ => None,
    })
}

/// `a_n = √(ωΓ(n+1)/Γ(n+ℓ+3/2))`.
fn oscillator_constant(omega: f64, ell: f64, n: u32) -> Result<f64> {
    let nn = n as f64;
    Ok((0.5 * (omega.ln() + ln_gamma(nn + 1.0)? - ln_gamma(nn + ell + 1.5)?)).exp())
}

fn rosen_morse_constant(lambda: f64, mu: f64, nu: f64, n: u32) -> Result<f64> {
    let nn = n as f64;
    let ln = (lambda / 2.0).ln() + (nn + mu + 0.5).ln() - 2.0 * mu * std::f64::consts::LN_2 + ln_gamma(nn + 1.0)?
        + ln_gamma(nn + 2.0 * mu + 1.0)?
        - ln_gamma(nn + mu + nu + 1.0)?
        - ln_gamma(nn + mu - nu + 1.0)?;
    Ok((0.5 * ln).exp())
}

fn frame_params(spec: &PotentialSpec<f64>, ctx: &RelativisticContext<f64>, chan: &AngularChannel, tp: &TransformParameters<f64>, want: Sign) -> Result<()> {
    if tp.sign != want {
        return Err(Error::Domain(format!("expected the {:?} frame, got {:?}", want, tp.sign)));
    }
    let own = derive_transform(spec, ctx, chan, want)?;
    if (own.s - tp.s).abs() > 1e-12 || (own.c - tp.c).abs() > 1e-12 {
        return Err(Error::Domain("transform parameters do not belong to this potential".into()));
    }
    Ok(())
}

/// Closed upper component `φ⁺` of a positive-energy state, `Sign::Plus` frame.
pub fn upper_component(
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp: &TransformParameters<f64>,
    r: &[f64],
) -> Result<Vec<f64>> {
    frame_params(spec, ctx, chan, tp, Sign::Plus)?;
    check_state(state, spec, ctx, chan)?;
    check_domain(spec, r)?;
    let params = WavefunctionParams::new(state, spec, ctx, chan)?;
    upper_values(&params, state, tp, r)
}

fn upper_values(params: &WavefunctionParams, state: &BoundState<f64>, tp: &TransformParameters<f64>, r: &[f64]) -> Result<Vec<f64>> {
    let (n, eps) = (state.n, state.epsilon);
    let c = tp.c;
    let ln2 = std::f64::consts::LN_2;
    let balance = ((c + eps) / c).sqrt();
    let pref = balance * normalization_constant(params, n)?.unwrap_or(1.0);
    let values: Vec<f64> = match *params {
        WavefunctionParams::Coulomb { ell, lambda_n, .. } => r
            .iter()
            .map(|&x| {
                let y = lambda_n * x;
                assemble((ell + 1.0) * y.ln() - y / 2.0, laguerre(n, 2.0 * ell + 1.0, y))
            })
            .collect(),
        WavefunctionParams::Oscillator { omega, ell } => r
            .iter()
            .map(|&x| {
                let y = omega * x;
                assemble((ell + 1.0) * y.ln() - y * y / 2.0, laguerre(n, ell + 0.5, y * y))
            })
            .collect(),
        WavefunctionParams::Morse { mu, lambda, nu_n } => r
            .iter()
            .map(|&x| {
                let lz = mu.ln() - lambda * x;
                let z = lz.exp();
                let ln_env = nu_n * lz - z / 2.0;
                if ln_env < LN_UNDERFLOW {
                    0.0
                } else {
                    assemble(ln_env, laguerre(n, 2.0 * nu_n, z))
                }
            })
            .collect(),
        WavefunctionParams::RosenMorseI { lambda, mu_n, nu_n } => r
            .iter()
            .map(|&x| {
                let t = 2.0 * lambda * x;
                let l1m = ln2 - softplus(t);
                let l1p = ln2 - softplus(-t);
                let ln_env = 0.5 * (mu_n + nu_n) * l1m + 0.5 * (mu_n - nu_n) * l1p;
                assemble(ln_env, real_jacobi(n, mu_n + nu_n, mu_n - nu_n, (lambda * x).tanh()))
            })
            .collect(),
        WavefunctionParams::Eckart { lambda, mu_n, nu_n } => r
            .iter()
            .map(|&x| {
                let y = lambda * x;
                // coth y - 1 = 2/(e^{2y} - 1), coth y + 1 = 2/(1 - e^{-2y})
                let lzm = ln2 - 2.0 * y - (-(-2.0 * y).exp_m1()).ln();
                let lzp = ln2 - (-(-2.0 * y).exp_m1()).ln();
                let ln_env = 0.5 * (mu_n + nu_n) * lzm + 0.5 * (mu_n - nu_n) * lzp;
                assemble(ln_env, real_jacobi(n, mu_n + nu_n, mu_n - nu_n, 1.0 / y.tanh()))
            })
            .collect(),
        WavefunctionParams::RosenMorseII { lambda, mu, nu } => r
            .iter()
            .map(|&x| {
                let y = lambda * x;
                let lzm = ln2 + 2.0 * ln_sinh(y / 2.0);
                let lzp = ln2 + 2.0 * ln_cosh(y / 2.0);
                assemble(0.5 * mu * lzm + 0.5 * nu * lzp, real_jacobi(n, mu - 0.5, nu - 0.5, y.cosh()))
            })
            .collect(),
        WavefunctionParams::PoschlTeller { lambda, mu, nu } => r
            .iter()
            .map(|&x| {
                let y = lambda * x;
                let lzm = ln2 + 2.0 * ln_sinh(y);
                let lzp = ln2 + 2.0 * ln_cosh(y);
                assemble(0.5 * mu * lzm + 0.5 * nu * lzp, real_jacobi(n, mu - 0.5, nu - 0.5, (2.0 * y).cosh()))
            })
            .collect(),
        WavefunctionParams::Scarf { lambda, mu, nu } => scarf_values(lambda, mu, nu, n, r)?,
        WavefunctionParams::WoodsSaxon { lambda, r0, mu_n, nu_n } => woods_saxon_values(lambda, r0, mu_n, nu_n, r)?,
    };
    Ok(values.into_iter().map(|v| pref * v).collect())
}

/// `(1+z²)^{−μ/2} e^{−ν atan z} i^{−n} P_n^{(−μ−iν−½, −μ+iν−½)}(iz)`, `z = sinh λr`.
fn scarf_values(lambda: f64, mu: f64, nu: f64, n: u32, r: &[f64]) -> Result<Vec<f64>> {
    let a = Complex::new(-mu - 0.5, -nu);
    let b = Complex::new(-mu - 0.5, nu);
    let phase = Complex::new(0.0, -1.0).powu(n);
    let raw: Vec<Complex<f64>> = r
        .iter()
        .map(|&x| {
            let y = lambda * x;
            let z = y.sinh();
            let ln_env = -mu * ln_cosh(y) - nu * z.atan();
            if ln_env < LN_UNDERFLOW {
                return Complex::new(0.0, 0.0);
            }
            phase * jacobi(n, a, b, Complex::new(0.0, z)) * ln_env.exp()
        })
        .collect();
    real_part_checked(raw, "scarf")
}

/// `z^μ (1−z)^{iν} ₂F₁(μ+iν, μ+1+iν; 2μ+1; z)`, `z = 1/(1+e^{λ(r−R)})`.
fn woods_saxon_values(lambda: f64, r0: f64, mu: f64, nu: f64, r: &[f64]) -> Result<Vec<f64>> {
    let a = Complex::new(mu, nu);
    let b = Complex::new(mu + 1.0, nu);
    let c = cx(2.0 * mu + 1.0);
    let raw = r
        .iter()
        .map(|&x| {
            let t = lambda * (x - r0);
            let lz = -softplus(t);
            let lw = t - softplus(t);
            if mu * lz < LN_UNDERFLOW {
                return Ok(Complex::new(0.0, 0.0));
            }
            let f = gauss_2f1_reflected(a, b, c, lz.exp(), lw.exp())?;
            Ok(Complex::new(mu * lz, nu * lw).exp() * f)
        })
        .collect::<Result<Vec<_>>>()?;
    real_part_checked(raw, "woods-saxon")
}

fn real_part_checked(raw: Vec<Complex<f64>>, what: &str) -> Result<Vec<f64>> {
    let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.re.abs()));
    let worst = raw.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if peak > 0.0 && worst > SCARF_IMAG_BOUND * peak {
        return Err(Error::Numerical(format!("{what}: imaginary residue {:e} of peak", worst / peak)));
    }
    Ok(raw.into_iter().map(|v| v.re).collect())
}

/// Largest imaginary part of the assembled Scarf upper component relative
/// to its peak real part.
pub fn scarf_imaginary_residue(state: &BoundState<f64>, spec: &PotentialSpec<f64>, r: &[f64]) -> Result<f64> {
    let PotentialSpec::Scarf { a, b, lambda } = *spec else {
        return Err(Error::Domain("needs a Scarf spec".into()));
    };
    let (mu, nu) = (a / lambda, b / lambda);
    let ca = Complex::new(-mu - 0.5, -nu);
    let cb = Complex::new(-mu - 0.5, nu);
    let phase = Complex::new(0.0, -1.0).powu(state.n);
    let (mut peak, mut worst) = (0.0f64, 0.0f64);
    for &x in r {
        let y = lambda * x;
        let v = phase * jacobi(state.n, ca, cb, Complex::new(0.0, y.sinh())) * (-mu * ln_cosh(y) - nu * y.sinh().atan()).exp();
        peak = peak.max(v.re.abs());
        worst = worst.max(v.im.abs());
    }
    Ok(if peak > 0.0 { worst / peak } else { 0.0 })
}

/// Closed lower component, `Sign::Minus` frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LowerComponent {
    pub values: Vec<f64>,
    pub frame: Sign,
    /// Index `n` of the state whose energy `ε_n` the component belongs to.
    pub energy_index: u32,
    /// Subscript the source formula attaches to this component (`φ⁻_{n+1}`
    /// for Coulomb, `φ⁻_{n−1}` for Morse and Rosen-Morse I). `None` when the
    /// component vanishes identically.
    pub source_index: Option<i64>,
}

/// Closed lower component of a state.
///
/// Coulomb, Oscillator and Rosen-Morse I carry absolute prefactors (with
/// `|C − ε|` under the root) that agree with the first-order system, see
/// [`closed_lower_scale`]; Morse is defined up to a constant. [`build_spinor`]
/// fixes any remaining constant against the first-order system.
pub fn lower_component_closed(
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp: &TransformParameters<f64>,
    r: &[f64],
) -> Result<LowerComponent> {
    frame_params(spec, ctx, chan, tp, Sign::Minus)?;
    check_state(state, spec, ctx, chan)?;
    check_domain(spec, r)?;
    let (m, eps) = (state.n, state.epsilon);
    let mm = m as f64;
    let c = tp.c;
    let gap = ((c - eps).abs() / c).sqrt();
    let zero = |r: &[f64]| LowerComponent { values: vec![0.0; r.len()], frame: Sign::Minus, energy_index: m, source_index: None };
    let done = |values: Vec<f64>, idx: i64| LowerComponent { values, frame: Sign::Minus, energy_index: m, source_index: Some(idx) };
    let params = WavefunctionParams::new(state, spec, ctx, chan)?;
    match (params, state.branch) {
        (WavefunctionParams::Coulomb { gamma, lambda_n, .. }, Branch::Regular) => {
            let a = normalization_constant(&params, m)?.unwrap_or(1.0);
            let pref = a * ((mm + 1.0) * (mm + 1.0 + 2.0 * gamma)).sqrt() * gap;
            let v = r
                .iter()
                .map(|&x| {
                    let y = lambda_n * x;
                    pref * assemble(gamma * y.ln() - y / 2.0, laguerre(m + 1, 2.0 * gamma - 1.0, y))
                })
                .collect();
            Ok(done(v, m as i64 + 1))
        }
        (WavefunctionParams::Coulomb { gamma, lambda_n, .. }, Branch::Irregular) => {
            if m == 0 {
                return Ok(zero(r));
            }
            let a = normalization_constant(&params, m)?.unwrap_or(1.0);
            let pref = -a / (mm * (mm - 2.0 * gamma)).sqrt() * gap;
            let v = r
                .iter()
                .map(|&x| {
                    let y = lambda_n * x;
                    pref * assemble((1.0 - gamma) * y.ln() - y / 2.0, laguerre(m - 1, 1.0 - 2.0 * gamma, y))
                })
                .collect();
            Ok(done(v, m as i64 - 1))
        }
        (WavefunctionParams::Oscillator { omega, .. }, Branch::Regular) => {
            let k = chan.kappa as f64;
            let pref = oscillator_constant(omega, k - 1.0, m)? * (1.0 - eps).abs().sqrt();
            let v = r
                .iter()
                .map(|&x| {
                    let y = omega * x;
                    pref * assemble(k * y.ln() - y * y / 2.0, laguerre(m, k - 0.5, y * y))
                })
                .collect();
            Ok(done(v, m as i64))
        }
        (WavefunctionParams::Oscillator { omega, .. }, Branch::Irregular) => {
            if m == 0 {
                return Ok(zero(r));
            }
            let k = chan.kappa as f64;
            let pref = -oscillator_constant(omega, -k, m - 1)? * (1.0 - eps).abs().sqrt();
            let v = r
                .iter()
                .map(|&x| {
                    let y = omega * x;
                    pref * assemble((1.0 - k) * y.ln() - y * y / 2.0, laguerre(m - 1, -k + 0.5, y * y))
                })
                .collect();
            Ok(done(v, m as i64 - 1))
        }
        (WavefunctionParams::Morse { mu, lambda, nu_n }, _) => {
            if m == 0 {
                return Ok(zero(r));
            }
            let v = r
                .iter()
                .map(|&x| {
                    let lz = mu.ln() - lambda * x;
                    let z = lz.exp();
                    let ln_env = nu_n * lz - z / 2.0;
                    if ln_env < LN_UNDERFLOW {
                        0.0
                    } else {
                        -gap * assemble(ln_env, laguerre(m - 1, 2.0 * nu_n, z))
                    }
                })
                .collect();
            Ok(done(v, m as i64 - 1))
        }
        (WavefunctionParams::RosenMorseI { lambda, mu_n, nu_n }, _) => {
            if m == 0 {
                return Ok(zero(r));
            }
            let k = mm - 1.0;
            // a further factor (k+μ+1/2)/(k+μ+3/2) here would leave the component off by √((2A/λ+1)/(2A/λ−1))
            let ratio = (k + mu_n - nu_n + 1.0) * (k + mu_n + nu_n + 1.0)
                / ((k + 1.0) * (k + 2.0 * mu_n + 1.0));
            let pref = rosen_morse_constant(lambda, mu_n, nu_n, m)? * ratio.abs().sqrt() * gap;
            let ln2 = std::f64::consts::LN_2;
            let v = r
                .iter()
                .map(|&x| {
                    let t = 2.0 * lambda * x;
                    let l1m = ln2 - softplus(t);
                    let l1p = ln2 - softplus(-t);
                    let ln_env = 0.5 * (mu_n + nu_n) * l1m + 0.5 * (mu_n - nu_n) * l1p;
                    pref * assemble(ln_env, real_jacobi(m - 1, mu_n + nu_n, mu_n - nu_n, (lambda * x).tanh()))
                })
                .collect();
            Ok(done(v, m as i64 - 1))
        }
        _ => Err(Error::Unsupported(format!("no closed lower component for {}", spec.kind()))),
    }
}

/// Direction of the kinetic-balance relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    /// `φ⁻ = λ̄/(C+ε)·(d/dr − ξ + CU)φ⁺`, in the `Sign::Plus` frame.
    FromPlus,
    /// `φ⁺ = λ̄/(C−ε)·(d/dr − ξ − CU)φ⁻`, in the `Sign::Minus` frame.
    FromMinus,
}

/// Applies the first-order kinetic-balance relation with 5-point differencing
/// (fourth order on uniform grids; centered in the interior, one-sided at
/// the two edge points on each side).
#[allow(clippy::too_many_arguments)]
pub fn kinetic_balance(
    phi_known: &[f64],
    which: Balance,
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp: &TransformParameters<f64>,
    r: &[f64],
) -> Result<Vec<f64>> {
    if phi_known.len() != r.len() {
        return Err(Error::Domain("component and grid differ in length".into()));
    }
    check_grid(r)?;
    check_domain(spec, r)?;
    let d = derivative(r, phi_known, 1, STENCIL);
    balance_with_derivative(phi_known, &d, which, state, spec, ctx, chan, tp, r)
}

#[allow(clippy::too_many_arguments)]
fn balance_with_derivative(
    phi_known: &[f64],
    d: &[f64],
    which: Balance,
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp: &TransformParameters<f64>,
    r: &[f64],
) -> Result<Vec<f64>> {
    let eps = state.epsilon;
    let (frame, sign, den) = match which {
        Balance::FromPlus => (Sign::Plus, '+', tp.c + eps),
        Balance::FromMinus => (Sign::Minus, '-', tp.c - eps),
    };
    frame_params(spec, ctx, chan, tp, frame)?;
    if den.abs() < 1e-12 {
        return Err(Error::SingularBalance { sign, value: den.abs() });
    }
    let cu_sign = match which {
        Balance::FromPlus => 1.0,
        Balance::FromMinus => -1.0,
    };
    let k = ctx.lambda_bar / den;
    Ok(r.iter()
        .zip(phi_known)
        .zip(d)
        .map(|((&x, &p), &dp)| k * (dp - tp.xi * p + cu_sign * tp.c * spec.u(ctx, chan, x) * p))
        .collect())
}

/// Re-expresses sampled components given in the frame of `from` in the
/// frame of `to` (a rotation by half the difference of the frame angles).
pub fn rotate(phi_plus: &[f64], phi_minus: &[f64], from: &TransformParameters<f64>, to: &TransformParameters<f64>) -> (Vec<f64>, Vec<f64>) {
    let h = 0.5 * (to.theta() - from.theta());
    let (s, c) = h.sin_cos();
    phi_plus
        .iter()
        .zip(phi_minus)
        .map(|(&p, &m)| (c * p + s * m, -s * p + c * m))
        .unzip()
}

/// Trapezoidal rule on a nonuniform grid.
pub fn trapezoid(r: &[f64], f: &[f64]) -> f64 {
    r.windows(2).zip(f.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
}

fn composite_norm(r: &[f64], p: &[f64], m: &[f64]) -> f64 {
    let dens: Vec<f64> = p.iter().zip(m).map(|(a, b)| a * a + b * b).collect();
    trapezoid(r, &dens)
}

/// Quadrature inner product `∫(φ⁺ψ⁺ + φ⁻ψ⁻)` of two spinors on one grid.
pub fn inner_product(a: &RadialSpinor, b: &RadialSpinor) -> Result<f64> {
    if a.r_grid != b.r_grid || a.frame != b.frame {
        return Err(Error::Domain("inner product needs a shared grid and frame".into()));
    }
    let f: Vec<f64> = (0..a.r_grid.len()).map(|i| a.phi_plus[i] * b.phi_plus[i] + a.phi_minus[i] * b.phi_minus[i]).collect();
    Ok(trapezoid(&a.r_grid, &f))
}

/// Rescales to unit composite norm; `scale` records the applied factor.
pub fn normalize(spinor: RadialSpinor) -> Result<RadialSpinor> {
    let norm = composite_norm(&spinor.r_grid, &spinor.phi_plus, &spinor.phi_minus);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let k = norm.sqrt().recip();
    let phi_plus: Vec<f64> = spinor.phi_plus.iter().map(|v| v * k).collect();
    let phi_minus: Vec<f64> = spinor.phi_minus.iter().map(|v| v * k).collect();
    let norm = composite_norm(&spinor.r_grid, &phi_plus, &phi_minus);
    Ok(RadialSpinor { phi_plus, phi_minus, norm, scale: k, ..spinor })
}

/// Sign changes of `values`, ignoring samples below `1e-10` of the peak.
pub fn count_nodes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &v in values {
        if v.abs() <= 1e-10 * peak {
            continue;
        }
        if last != 0.0 && v.signum() != last.signum() {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

/// Grid covering the support of every listed state's upper component.
///
/// Rows singular at the origin get a geometric grid from `1e−6` times the
/// position of the outermost peak; full-line rows and Woods-Saxon (regular
/// at the origin) get uniform grids. Both end where
/// the envelope has fallen below [`DECAY_TOLERANCE`] of its peak.
pub fn default_grid(
    states: &[BoundState<f64>],
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    points: usize,
) -> Result<Vec<f64>> {
    if states.is_empty() || points < STENCIL {
        return Err(Error::Domain("default_grid needs states and at least 5 points".into()));
    }
    let tp = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let probe_n = 20_000;
    let probe: Vec<f64> = match spec.domain() {
        Domain::FullLine => {
            let half = 200.0 / spec.range().unwrap_or(1.0);
            (0..probe_n).map(|i| -half + 2.0 * half * i as f64 / (probe_n - 1) as f64).collect()
        }
        _ => geometric(1e-8, 1e5, probe_n),
    };
    let (mut lo, mut hi, mut peak_at) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for st in states {
        let params = WavefunctionParams::new(st, spec, ctx, chan)?;
        let phi = upper_values(&params, st, &tp, &probe)?;
        let (imax, peak) = phi.iter().enumerate().fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(Error::Numerical(format!("upper component of n = {} has no finite peak", st.n)));
        }
        let keep = |v: &f64| v.abs() >= 0.1 * DECAY_TOLERANCE * peak;
        let first = phi.iter().position(keep).unwrap_or(0);
        let last = phi.iter().rposition(keep).unwrap_or(probe.len() - 1);
        lo = lo.min(probe[first]);
        hi = hi.max(probe[(last + 1).min(probe.len() - 1)]);
        peak_at = peak_at.max(probe[imax]);
    }
    Ok(match spec.domain() {
        Domain::FullLine => {
            let pad = 0.05 * (hi - lo);
            let (a, b) = (lo - pad, hi + pad);
            (0..points).map(|i| a + (b - a) * i as f64 / (points - 1) as f64).collect()
        }
        Domain::HalfLineDirichlet => {
            let b = hi * 1.05;
            (1..=points).map(|i| b * i as f64 / points as f64).collect()
        }
        Domain::HalfLineSingular => geometric(1e-6 * peak_at, hi * 1.05, points),
    })
}

fn geometric(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// How [`build_spinor`] obtains the lower component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Via {
    Closed,
    Balance,
}

/// Constant `α` that makes `α·φ⁻_closed` (minus frame) consistent with the
/// closed upper component through the first-order system, by least squares.
pub fn closed_lower_scale(
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    r: &[f64],
) -> Result<f64> {
    let tp_plus = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let tp_minus = derive_transform(spec, ctx, chan, Sign::Minus)?;
    let upper = upper_component(state, spec, ctx, chan, &tp_plus, r)?;
    let lower = lower_component_closed(state, spec, ctx, chan, &tp_minus, r)?;
    fit_scale(&upper, &lower.values, state, spec, ctx, chan, &tp_plus, &tp_minus, r)
}

#[allow(clippy::too_many_arguments)]
fn fit_scale(
    upper: &[f64],
    shape: &[f64],
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp_plus: &TransformParameters<f64>,
    tp_minus: &TransformParameters<f64>,
    r: &[f64],
) -> Result<f64> {
    if shape.iter().all(|&v| v == 0.0) {
        return Ok(1.0);
    }
    // upper partner of the shape in the minus frame, then back to the plus frame
    let partner = kinetic_balance(shape, Balance::FromMinus, state, spec, ctx, chan, tp_minus, r)?;
    let (pred, _) = rotate(&partner, shape, tp_minus, tp_plus);
    let num: Vec<f64> = upper.iter().zip(&pred).map(|(a, b)| a * b).collect();
    let den: Vec<f64> = pred.iter().map(|b| b * b).collect();
    let d = trapezoid(r, &den);
    if !(d > 0.0) {
        return Err(Error::Numerical("closed lower component has no upper partner".into()));
    }
    Ok(trapezoid(r, &num) / d)
}

/// Normalized spinor of a positive-energy state in the `Sign::Plus` frame.
///
/// With `Via::Closed` the lower component is the closed minus-frame form
/// passed through [`spinor_from_frames`]; with `Via::Balance` it is
/// [`kinetic_balance`] applied to the closed upper component.
pub fn build_spinor(
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    via: Via,
    grid: Option<&[f64]>,
) -> Result<RadialSpinor> {
    let r = match grid {
        Some(g) => g.to_vec(),
        None => default_grid(std::slice::from_ref(state), spec, ctx, chan, DEFAULT_POINTS)?,
    };
    let tp_plus = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let upper = upper_component(state, spec, ctx, chan, &tp_plus, &r)?;
    match via {
        Via::Balance => {
            let d = upper_derivative(state, spec, ctx, chan, &tp_plus, &r)?;
            let lower = balance_with_derivative(&upper, &d, Balance::FromPlus, state, spec, ctx, chan, &tp_plus, &r)?;
            normalize(RadialSpinor::new(r, upper, lower, *state, Sign::Plus)?)
        }
        Via::Closed => {
            let tp_minus = derive_transform(spec, ctx, chan, Sign::Minus)?;
            let shape = lower_component_closed(state, spec, ctx, chan, &tp_minus, &r)?.values;
            spinor_from_frames(upper, &shape, state, spec, ctx, chan, r)
        }
    }
}

/// Derivative of the closed upper component by a sixth-order central
/// difference with half the local grid spacing as step (at most `r/4` on
/// half-line rows).
fn upper_derivative(
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    tp: &TransformParameters<f64>,
    r: &[f64],
) -> Result<Vec<f64>> {
    let n = r.len();
    let half_line = spec.domain() != Domain::FullLine;
    let h: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { r[i] - r[i - 1] } else { f64::INFINITY };
            let right = if i + 1 < n { r[i + 1] - r[i] } else { f64::INFINITY };
            let h = 0.5 * left.min(right);
            if half_line { h.min(0.25 * r[i]) } else { h }
        })
        .collect();
    let at = |m: f64| -> Result<Vec<f64>> {
        let x: Vec<f64> = r.iter().zip(&h).map(|(&x, &h)| x + m * h).collect();
        upper_component(state, spec, ctx, chan, tp, &x)
    };
    let d1: Vec<f64> = at(1.0)?.iter().zip(at(-1.0)?).map(|(a, b)| a - b).collect();
    let d2: Vec<f64> = at(2.0)?.iter().zip(at(-2.0)?).map(|(a, b)| a - b).collect();
    let d3: Vec<f64> = at(3.0)?.iter().zip(at(-3.0)?).map(|(a, b)| a - b).collect();
    Ok((0..n).map(|i| (45.0 * d1[i] - 9.0 * d2[i] + d3[i]) / (60.0 * h[i])).collect())
}

/// Normalized plus-frame spinor from a plus-frame upper component and a
/// minus-frame lower component known up to a constant; the constant is
/// fitted as in [`closed_lower_scale`].
pub fn spinor_from_frames(
    upper_plus: Vec<f64>,
    lower_minus: &[f64],
    state: &BoundState<f64>,
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    r: Vec<f64>,
) -> Result<RadialSpinor> {
    let tp_plus = derive_transform(spec, ctx, chan, Sign::Plus)?;
    let tp_minus = derive_transform(spec, ctx, chan, Sign::Minus)?;
    let alpha = fit_scale(&upper_plus, lower_minus, state, spec, ctx, chan, &tp_plus, &tp_minus, &r)?;
    // φ⁻ (minus frame) = S·φ⁺ + C·φ⁻ (plus frame)
    let lower: Vec<f64> =
        upper_plus.iter().zip(lower_minus).map(|(&p, &q)| (alpha * q - tp_plus.s * p) / tp_plus.c).collect();
    normalize(RadialSpinor::new(r, upper_plus, lower, *state, Sign::Plus)?)
}

/// Coulomb lowest states outside the closed towers.
///
/// For `κ > 0` this is the negative-energy state at `ε = −γ/κ` with
/// vanishing upper component, `φ⁻ ∝ r^γ e^{−Zr/κ}` in the plus frame; it is
/// normalizable only for `Z > 0`. For `κ < 0` it is the state at
/// `ε = γ/κ` with vanishing lower component, `φ⁺ ∝ r^{−γ} e^{−Zr/κ}` in the
/// minus frame (the irregular `n = 0` level).
pub fn coulomb_lowest_spinor(
    spec: &PotentialSpec<f64>,
    ctx: &RelativisticContext<f64>,
    chan: &AngularChannel,
    r: &[f64],
) -> Result<RadialSpinor> {
    let PotentialSpec::Coulomb { z } = *spec else {
        return Err(Error::Domain("needs a Coulomb spec".into()));
    };
    check_domain(spec, r)?;
    let gamma = coulomb_gamma(z, ctx, chan)?;
    let k = chan.kappa as f64;
    let decay = -z / k;
    if !(decay < 0.0) {
        return Err(Error::Domain(format!("lowest state is not normalizable for Z = {z}, kappa = {}", chan.kappa)));
    }
    let c = gamma / k;
    let (power, frame, state) = if chan.kappa > 0 {
        (gamma, Sign::Plus, BoundState { n: 0, branch: Branch::Regular, energy_sign: Sign::Minus, epsilon: -c })
    } else {
        (-gamma, Sign::Minus, BoundState { n: 0, branch: Branch::Irregular, energy_sign: Sign::Plus, epsilon: c })
    };
    let shape: Vec<f64> = r.iter().map(|&x| assemble(power * x.ln() + decay * x, 1.0)).collect();
    let zeros = vec![0.0; r.len()];
    let (p, m) = if chan.kappa > 0 { (zeros, shape) } else { (shape, zeros) };
    normalize(RadialSpinor::new(r.to_vec(), p, m, state, frame)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::oracle::{effective_coefficient, residual_second_order};
    use crate::parameter_maps::Component;
    use crate::spectra::energies;

    fn ctx(lb: f64) -> RelativisticContext<f64> {
        RelativisticContext::new(lb).unwrap()
    }

    fn ch(k: i32) -> AngularChannel {
        AngularChannel::new(k).unwrap()
    }

    fn state(spec: &PotentialSpec<f64>, c: &RelativisticContext<f64>, a: &AngularChannel, branch: Branch, n: u32) -> BoundState<f64> {
        BoundState { n, branch, energy_sign: Sign::Plus, epsilon: level(spec, c, a, branch, n).unwrap() }
    }

    fn peak(v: &[f64]) -> f64 {
        v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    #[test]
    fn params_reproduce_arguments() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let st = state(&spec, &c, &a, Branch::Regular, 1);
        let p = WavefunctionParams::new(&st, &spec, &c, &a).unwrap();
        let WavefunctionParams::RosenMorseI { mu_n, nu_n, .. } = p else { panic!() };
        assert!((mu_n - 3.0).abs() < 1e-14);
        assert!((nu_n - st.epsilon * 2.0 / 3.0).abs() < 1e-14);
        for &r in &[-2.0, 0.3, 1.7] {
            assert!((p.z(r) - (r as f64).tanh()).abs() < 1e-14);
        }
        let spec = PotentialSpec::Morse { a: 2.0, b: 15.0, lambda: 0.5 };
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let p = WavefunctionParams::new(&st, &spec, &c, &a).unwrap();
        assert!((p.z(1.0) - 8.0 * (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn coulomb_ground_state_shape() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::Coulomb { z: -0.5 };
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let tp = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
        let g = coulomb_gamma(-0.5, &c, &a).unwrap();
        let lam = st.epsilon / (g + 1.0);
        let r = [0.5, 1.0, 2.0, 4.0];
        let v = upper_component(&st, &spec, &c, &a, &tp, &r).unwrap();
        for i in 1..r.len() {
            let want = (r[i] / r[0]).powf(g + 1.0) * (-lam * (r[i] - r[0]) / 2.0).exp();
            assert!((v[i] / v[0] - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn upper_components_solve_their_equation() {
        for fx in fixtures::all() {
            let (c, a) = (fx.ctx(), fx.chan());
            let tp = derive_transform(&fx.spec, &c, &a, Sign::Plus).unwrap();
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                let phi = upper_component(&st, &fx.spec, &c, &a, &tp, &r).unwrap();
                let q = effective_coefficient(&fx.spec, &c, &a, &tp, st.epsilon, Component::Upper);
                let res = residual_second_order(&phi, &r, q, 5);
                assert!(res < 1e-6, "{} n = {}: residual {res:e}", fx.name, st.n);
            }
        }
    }

    #[test]
    fn closed_lowers_solve_their_equation() {
        for fx in fixtures::all() {
            let (c, a) = (fx.ctx(), fx.chan());
            let tp = derive_transform(&fx.spec, &c, &a, Sign::Minus).unwrap();
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                let low = match lower_component_closed(&st, &fx.spec, &c, &a, &tp, &r) {
                    Ok(l) => l,
                    Err(Error::Unsupported(_)) => continue,
                    Err(e) => panic!("{}: {e}", fx.name),
                };
                let q = effective_coefficient(&fx.spec, &c, &a, &tp, st.epsilon, Component::Lower);
                let res = residual_second_order(&low.values, &r, q, 5);
                assert!(res < 1e-6, "{} n = {}: residual {res:e}", fx.name, st.n);
            }
        }
    }

    #[test]
    fn node_rule() {
        for name in ["coulomb-a", "oscillator-a", "morse-b", "rosen-morse-i-b"] {
            let fx = fixtures::by_name(name).unwrap();
            let (c, a) = (fx.ctx(), fx.chan());
            let tp = derive_transform(&fx.spec, &c, &a, Sign::Plus).unwrap();
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                let phi = upper_component(&st, &fx.spec, &c, &a, &tp, &r).unwrap();
                assert_eq!(count_nodes(&phi), st.n as usize, "{name}");
            }
        }
    }

    #[test]
    fn balance_matches_closed_lower() {
        for name in ["coulomb-a", "coulomb-b", "oscillator-a", "oscillator-b", "morse-a", "morse-b", "rosen-morse-i-a", "rosen-morse-i-b"] {
            let fx = fixtures::by_name(name).unwrap();
            let (c, a) = (fx.ctx(), fx.chan());
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                let closed = build_spinor(&st, &fx.spec, &c, &a, Via::Closed, Some(&r)).unwrap();
                let bal = build_spinor(&st, &fx.spec, &c, &a, Via::Balance, Some(&r)).unwrap();
                let p = peak(&bal.phi_minus);
                let gap = closed.phi_minus.iter().zip(&bal.phi_minus).skip(2).take(r.len() - 4).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                assert!(gap < 1e-6 * p, "{name} n = {}: {:e}", st.n, gap / p);
            }
        }
    }

    #[test]
    fn closed_prefactors_are_consistent() {
        for name in ["coulomb-a", "coulomb-b", "oscillator-a", "oscillator-b", "rosen-morse-i-a", "rosen-morse-i-b"] {
            let fx = fixtures::by_name(name).unwrap();
            let (c, a) = (fx.ctx(), fx.chan());
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                let alpha = closed_lower_scale(&st, &fx.spec, &c, &a, &r).unwrap();
                assert!((alpha - 1.0).abs() < 1e-6, "{name} n = {}: {alpha}", st.n);
            }
        }
    }

    #[test]
    fn rosen_morse_ground_state_lower_vanishes_in_minus_frame() {
        let fx = fixtures::by_name("rosen-morse-i-a").unwrap();
        let (c, a) = (fx.ctx(), fx.chan());
        let st = state(&fx.spec, &c, &a, Branch::Regular, 0);
        let sp = build_spinor(&st, &fx.spec, &c, &a, Via::Balance, None).unwrap();
        let tp_p = derive_transform(&fx.spec, &c, &a, Sign::Plus).unwrap();
        let tp_m = derive_transform(&fx.spec, &c, &a, Sign::Minus).unwrap();
        let rot = sp.rotated(&tp_p, &tp_m).unwrap();
        assert!(peak(&rot.phi_minus[2..rot.phi_minus.len() - 2]) < 1e-8 * peak(&rot.phi_plus));
    }

    #[test]
    fn lower_is_order_lambda_bar_in_the_limit() {
        let (c, a) = (ctx(1e-3), ch(1));
        let spec = PotentialSpec::Coulomb { z: -0.5 };
        let st = state(&spec, &c, &a, Branch::Regular, 1);
        let sp = build_spinor(&st, &spec, &c, &a, Via::Balance, None).unwrap();
        let ratio = peak(&sp.phi_minus) / peak(&sp.phi_plus);
        assert!(ratio < 10.0 * 1e-3 && ratio > 1e-5, "ratio {ratio}");
    }

    #[test]
    fn balance_is_linear() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::Oscillator { omega: 1.0 };
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let tp = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
        let r = geometric(1e-3, 8.0, 200);
        let out = kinetic_balance(&vec![0.0; r.len()], Balance::FromPlus, &st, &spec, &c, &a, &tp, &r).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn singular_balance_at_c_equal_eps() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 };
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let tp = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
        let r: Vec<f64> = (0..50).map(|i| -5.0 + 0.2 * i as f64).collect();
        let phi = vec![1.0; r.len()];
        assert!(matches!(
            kinetic_balance(&phi, Balance::FromMinus, &st, &spec, &c, &a, &tp, &r),
            Err(Error::SingularBalance { sign: '-', .. })
        ));
    }

    #[test]
    fn normalize_scale_is_homogeneous() {
        let fx = fixtures::by_name("oscillator-a").unwrap();
        let (c, a) = (fx.ctx(), fx.chan());
        let st = state(&fx.spec, &c, &a, Branch::Regular, 1);
        let sp = build_spinor(&st, &fx.spec, &c, &a, Via::Balance, None).unwrap();
        assert!((sp.norm - 1.0).abs() < 1e-12);
        let doubled = RadialSpinor::new(
            sp.r_grid.clone(),
            sp.phi_plus.iter().map(|v| 2.0 * v).collect(),
            sp.phi_minus.iter().map(|v| 2.0 * v).collect(),
            st,
            Sign::Plus,
        )
        .unwrap();
        let n = normalize(doubled).unwrap();
        assert!((n.scale - 0.5).abs() < 1e-12);
        let zero = RadialSpinor::new(sp.r_grid.clone(), vec![0.0; sp.r_grid.len()], vec![0.0; sp.r_grid.len()], st, Sign::Plus).unwrap();
        assert_eq!(normalize(zero), Err(Error::ZeroNorm));
    }

    #[test]
    fn oscillator_upper_norm_matches_gaussian_moment() {
        // ∫ (a√(1+ε))² (ωr)^{2ℓ+2} e^{−ω²r²} L² dr = (1+ε)/2
        for (k, n) in [(1, 0), (1, 2), (2, 1)] {
            let (c, a) = (ctx(0.1), ch(k));
            let spec = PotentialSpec::Oscillator { omega: 0.8 };
            let st = state(&spec, &c, &a, Branch::Regular, n);
            let tp = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
            let r = default_grid(&[st], &spec, &c, &a, 16_000).unwrap();
            let phi = upper_component(&st, &spec, &c, &a, &tp, &r).unwrap();
            let sq: Vec<f64> = phi.iter().map(|v| v * v).collect();
            let want = (1.0 + st.epsilon) / 2.0;
            assert!((trapezoid(&r, &sq) - want).abs() < 1e-6 * want);
        }
    }

    #[test]
    fn coulomb_normalization_constant_against_laguerre_moment() {
        // ∫x^{α+1}e^{−x}(L_n^α)² dx = (2n+α+1)Γ(n+α+1)/n! puts ∫φ⁺² at (C+ε)/C·(n+γ+1)
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::Coulomb { z: -0.5 };
        let tp = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
        let g = coulomb_gamma(-0.5, &c, &a).unwrap();
        for n in 0..3 {
            let st = state(&spec, &c, &a, Branch::Regular, n);
            let r = default_grid(&[st], &spec, &c, &a, 16_000).unwrap();
            let phi = upper_component(&st, &spec, &c, &a, &tp, &r).unwrap();
            let sq: Vec<f64> = phi.iter().map(|v| v * v).collect();
            let want = (tp.c + st.epsilon) / tp.c * (n as f64 + g + 1.0);
            assert!((trapezoid(&r, &sq) - want).abs() < 1e-6 * want, "n = {n}");
        }
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let sp = build_spinor(&st, &spec, &c, &a, Via::Balance, None).unwrap();
        assert!((sp.scale - 0.5).abs() < 1e-3, "scale {}", sp.scale);
    }

    #[test]
    fn orthogonality_on_fixtures() {
        for fx in fixtures::all() {
            let (c, a) = (fx.ctx(), fx.chan());
            let states = energies(&fx.request().unwrap()).unwrap();
            if states.len() < 2 {
                continue;
            }
            let r = default_grid(&states, &fx.spec, &c, &a, 8000).unwrap();
            let sp: Vec<RadialSpinor> = states.iter().map(|s| build_spinor(s, &fx.spec, &c, &a, Via::Balance, Some(&r)).unwrap()).collect();
            for i in 0..sp.len() {
                for j in 0..i {
                    let ip = inner_product(&sp[i], &sp[j]).unwrap();
                    assert!(ip.abs() < 1e-5, "{} <{}|{}> = {ip:e}", fx.name, i, j);
                }
            }
        }
    }

    #[test]
    fn scarf_is_real() {
        for name in ["scarf-a", "scarf-b"] {
            let fx = fixtures::by_name(name).unwrap();
            let (c, a) = (fx.ctx(), fx.chan());
            for st in energies(&fx.request().unwrap()).unwrap() {
                let r = default_grid(&[st], &fx.spec, &c, &a, DEFAULT_POINTS).unwrap();
                assert!(scarf_imaginary_residue(&st, &fx.spec, &r).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn oscillator_irregular_lowest_has_no_lower() {
        let (c, a) = (ctx(0.1), ch(-1));
        let spec = PotentialSpec::Oscillator { omega: 1.0 };
        let st = state(&spec, &c, &a, Branch::Irregular, 0);
        assert_eq!(st.epsilon, 1.0);
        let tp = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
        let r = geometric(1e-4, 8.0, 100);
        let low = lower_component_closed(&st, &spec, &c, &a, &tp, &r).unwrap();
        assert!(low.values.iter().all(|&v| v == 0.0));
        assert_eq!(low.source_index, None);
        let sp = build_spinor(&st, &spec, &c, &a, Via::Closed, None).unwrap();
        assert!(sp.phi_minus.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn irregular_branches_solve_their_equations() {
        let cases = [
            (PotentialSpec::Coulomb { z: -0.5 }, -1),
            (PotentialSpec::Coulomb { z: -1.0 }, -2),
            (PotentialSpec::Oscillator { omega: 1.0 }, -1),
            (PotentialSpec::Oscillator { omega: 0.7 }, -2),
        ];
        for (spec, k) in cases {
            let (c, a) = (ctx(0.1), ch(k));
            let tp_p = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
            let tp_m = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
            for n in 0..3 {
                let st = state(&spec, &c, &a, Branch::Irregular, n);
                let r = default_grid(&[st], &spec, &c, &a, DEFAULT_POINTS).unwrap();
                let up = upper_component(&st, &spec, &c, &a, &tp_p, &r).unwrap();
                let q = effective_coefficient(&spec, &c, &a, &tp_p, st.epsilon, Component::Upper);
                assert!(residual_second_order(&up, &r, q, 5) < 1e-6, "{spec:?} n = {n}");
                let low = lower_component_closed(&st, &spec, &c, &a, &tp_m, &r).unwrap();
                let q = effective_coefficient(&spec, &c, &a, &tp_m, st.epsilon, Component::Lower);
                assert!(residual_second_order(&low.values, &r, q, 5) < 1e-6, "{spec:?} n = {n} lower");
                let closed = build_spinor(&st, &spec, &c, &a, Via::Closed, Some(&r)).unwrap();
                let bal = build_spinor(&st, &spec, &c, &a, Via::Balance, Some(&r)).unwrap();
                let gap = closed.phi_minus.iter().zip(&bal.phi_minus).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                let scale = peak(&bal.phi_minus).max(peak(&bal.phi_plus) * 1e-3);
                assert!(gap < 1e-6 * scale, "{spec:?} n = {n}: {gap:e}");
            }
        }
    }

    #[test]
    fn coulomb_lowest_states() {
        let (c, a) = (ctx(0.1), ch(-1));
        let spec = PotentialSpec::Coulomb { z: -0.5 };
        let r = geometric(1e-4, 60.0, 2000);
        let sp = coulomb_lowest_spinor(&spec, &c, &a, &r).unwrap();
        assert!(sp.phi_minus.iter().all(|&v| v == 0.0));
        let irregular0 = state(&spec, &c, &a, Branch::Irregular, 0);
        assert!((sp.bound_state.epsilon - irregular0.epsilon).abs() < 1e-14);
        // the upper partner of a vanishing lower component is consistent with the minus-frame system
        let tp = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
        let d = derivative(&r, &sp.phi_plus, 1, 5);
        let worst = r
            .iter()
            .enumerate()
            .skip(2)
            .take(r.len() - 4)
            .map(|(i, &x)| (d[i] - (tp.s / c.lambda_bar - tp.c * spec.u(&c, &a, x)) * sp.phi_plus[i]).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-6 * peak(&d));

        let (c, a) = (ctx(0.1), ch(1));
        let repulsive = PotentialSpec::Coulomb { z: 0.5 };
        let sp = coulomb_lowest_spinor(&repulsive, &c, &a, &r).unwrap();
        assert!(sp.phi_plus.iter().all(|&v| v == 0.0));
        assert!(sp.bound_state.epsilon < 0.0);
        assert!(matches!(coulomb_lowest_spinor(&spec, &c, &a, &r), Err(Error::Domain(_))));
    }

    #[test]
    fn export_formats() {
        let fx = fixtures::by_name("coulomb-a").unwrap();
        let (c, a) = (fx.ctx(), fx.chan());
        let st = state(&fx.spec, &c, &a, Branch::Regular, 0);
        let r = geometric(1e-3, 80.0, 50);
        let sp = build_spinor(&st, &fx.spec, &c, &a, Via::Closed, Some(&r)).unwrap();
        let csv = sp.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r,phi_plus,phi_minus"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
        assert!((first[0] - r[0]).abs() < 1e-15 * r[0]);
        assert_eq!(csv.lines().count(), 51);
        let meta = sp.sidecar();
        assert_eq!(meta["bound_state"]["n"], 0);
        assert_eq!(meta["points"], 50);
    }

    #[test]
    fn rotation_round_trip() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::Coulomb { z: -3.0 };
        let p = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
        let m = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
        let (x, y) = rotate(&[0.3], &[-0.7], &p, &m);
        assert!((y[0] - (p.s * 0.3 + p.c * -0.7)).abs() < 1e-15);
        let (u, v) = rotate(&x, &y, &m, &p);
        assert!((u[0] - 0.3).abs() < 1e-15 && (v[0] + 0.7).abs() < 1e-15);
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let (c, a) = (ctx(0.1), ch(1));
        let spec = PotentialSpec::Coulomb { z: -0.5 };
        let mut st = state(&spec, &c, &a, Branch::Regular, 0);
        st.epsilon -= 1e-3;
        let tp = derive_transform(&spec, &c, &a, Sign::Plus).unwrap();
        assert!(matches!(upper_component(&st, &spec, &c, &a, &tp, &[1.0, 2.0]), Err(Error::Domain(_))));
        let st = state(&spec, &c, &a, Branch::Regular, 0);
        let tm = derive_transform(&spec, &c, &a, Sign::Minus).unwrap();
        assert!(matches!(upper_component(&st, &spec, &c, &a, &tm, &[1.0, 2.0]), Err(Error::Domain(_))));
        let ws = fixtures::by_name("woods-saxon-a").unwrap();
        let st = state(&ws.spec, &ws.ctx(), &ws.chan(), Branch::Regular, 0);
        let tm = derive_transform(&ws.spec, &ws.ctx(), &ws.chan(), Sign::Minus).unwrap();
        assert!(matches!(
            lower_component_closed(&st, &ws.spec, &ws.ctx(), &ws.chan(), &tm, &[1.0, 2.0]),
            Err(Error::Unsupported(_))
        ));
    }
}

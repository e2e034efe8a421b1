use std::path::Path;

use dirac_core::catalog::derive_transform;
use dirac_core::fixtures::{self, Fixture};
use dirac_core::parameter_maps::{all_maps, format_table, maps_for, nonrel_limit_energy, Component, ParameterMap};
use dirac_core::spectra::energies;
use dirac_core::verify::{
    limit_scan, limit_scan_kind, morse_adjudication, verify_fixtures, xpct_compare, xpct_identity, LimitScan, RunReport,
    VerifyOptions,
};
use dirac_core::wavefunctions::{build_spinor, default_grid, RadialSpinor, Via};
use dirac_core::xpct::Row;
use dirac_core::{Branch, Error, PotentialKind, Sign, SpectrumRequest};
use serde::Serialize;

use crate::args::{fixture, parse_kind, ComponentArg, MapComponent, MapsArgs, SpectrumArgs, VerifyArgs, ViaArg, WavefunctionArgs, XpctArgs};
use crate::error::CliError;
use crate::output::{self, csv, human, machine, table, text, Format, Rendered};

/// A rendered result and the exit code it implies.
pub struct Outcome {
    pub rendered: Rendered,
    pub code: i32,
}

fn ok(rendered: Rendered) -> Outcome {
    Outcome { rendered, code: 0 }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Regular => "regular",
        Branch::Irregular => "irregular",
    }
}

fn sign_name(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "plus",
        Sign::Minus => "minus",
    }
}

fn pass_word(p: bool) -> String {
    if p { "PASS" } else { "FAIL" }.to_string()
}

fn opt(x: Option<f64>, f: fn(f64) -> String) -> String {
    x.map(f).unwrap_or_default()
}

#[derive(Serialize)]
struct Level {
    n: u32,
    branch: Branch,
    energy_sign: Sign,
    epsilon: f64,
    /// `(ε² − 1)/2λ̄²`.
    e_nr: f64,
}

#[derive(Serialize)]
struct SpectrumData<'a> {
    label: &'a str,
    potential: dirac_core::PotentialSpec,
    lambda_bar: f64,
    kappa: i32,
    levels: Vec<Level>,
}

pub fn spectrum(a: &SpectrumArgs, fmt: Format, command: &str) -> Result<Outcome, CliError> {
    let p = a.pot.problem(a.potential.as_deref(), a.fixture.as_deref())?;
    let req = SpectrumRequest {
        spec: p.spec,
        ctx: p.ctx,
        chan: p.chan,
        branch: a.branch.into(),
        energy_sign: a.energy_sign.into(),
        n_list: p.levels(a.n.as_deref())?,
    };
    let levels: Vec<Level> = energies(&req)?
        .into_iter()
        .map(|s| Level { n: s.n, branch: s.branch, energy_sign: s.energy_sign, epsilon: s.epsilon, e_nr: nonrel_limit_energy(s.epsilon, &p.ctx) })
        .collect();
    let header = ["n", "branch", "sign", "epsilon", "e_nr"];
    let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        levels
            .iter()
            .map(|l| vec![l.n.to_string(), branch_name(l.branch).into(), sign_name(l.energy_sign).into(), f(l.epsilon), f(l.e_nr)])
            .collect()
    };
    Ok(ok(match fmt {
        Format::Csv => text(csv(&header, &rows(machine))),
        Format::Table => text(format!("# {} ({}), lambda_bar = {}, kappa = {}\n{}", p.label, p.spec.describe(), human(p.ctx.lambda_bar), p.chan.kappa, table(&header, &rows(human)))),
        Format::Json => output::json(
            "spectrum",
            command,
            SpectrumData { label: &p.label, potential: p.spec, lambda_bar: p.ctx.lambda_bar, kappa: p.chan.kappa, levels },
        ),
    }))
}

/// Largest gap of the two lower components relative to the balance peak,
/// two edge points excluded (one-sided stencils there).
fn lower_gap(a: &RadialSpinor, b: &RadialSpinor) -> f64 {
    let p = b.phi_minus.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let n = a.phi_minus.len();
    let gap = a.phi_minus[2..n - 2].iter().zip(&b.phi_minus[2..n - 2]).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if p > 0.0 {
        gap / p
    } else {
        gap
    }
}

pub fn wavefunction(a: &WavefunctionArgs, fmt: Format, command: &str, out: Option<&Path>) -> Result<Outcome, CliError> {
    let p = a.pot.problem(a.potential.as_deref(), a.fixture.as_deref())?;
    let req = SpectrumRequest { spec: p.spec, ctx: p.ctx, chan: p.chan, branch: a.branch.into(), energy_sign: Sign::Plus, n_list: vec![a.n] };
    let st = energies(&req)?[0];
    let grid = default_grid(&[st], &p.spec, &p.ctx, &p.chan, a.points)?;
    let (via, other) = match a.via {
        ViaArg::Closed => (Via::Closed, Via::Balance),
        ViaArg::Balance => (Via::Balance, Via::Closed),
    };
    let sp = build_spinor(&st, &p.spec, &p.ctx, &p.chan, via, Some(&grid))?;
    let gap = build_spinor(&st, &p.spec, &p.ctx, &p.chan, other, Some(&grid)).ok().map(|o| match via {
        Via::Closed => lower_gap(&sp, &o),
        Via::Balance => lower_gap(&o, &sp),
    });
    let sp = match a.frame {
        crate::args::SignArg::Plus => sp,
        crate::args::SignArg::Minus => {
            let tp_plus = derive_transform(&p.spec, &p.ctx, &p.chan, Sign::Plus)?;
            let tp_minus = derive_transform(&p.spec, &p.ctx, &p.chan, Sign::Minus)?;
            sp.rotated(&tp_plus, &tp_minus)?
        }
    };
    let mut sidecar = sp.sidecar();
    sidecar["label"] = p.label.clone().into();
    sidecar["potential"] = serde_json::to_value(p.spec).unwrap_or_default();
    sidecar["lambda_bar"] = p.ctx.lambda_bar.into();
    sidecar["kappa"] = p.chan.kappa.into();
    sidecar["via"] = format!("{via:?}").to_lowercase().into();
    sidecar["closed_balance_gap"] = gap.into();
    output::round_json(&mut sidecar);

    let (plus, minus) = match a.component {
        ComponentArg::Plus => (true, false),
        ComponentArg::Minus => (false, true),
        ComponentArg::Both => (true, true),
    };
    let mut header = vec!["r"];
    if plus {
        header.push("phi_plus");
    }
    if minus {
        header.push("phi_minus");
    }
    let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        (0..sp.r_grid.len())
            .map(|i| {
                let mut row = vec![f(sp.r_grid[i])];
                if plus {
                    row.push(f(sp.phi_plus[i]));
                }
                if minus {
                    row.push(f(sp.phi_minus[i]));
                }
                row
            })
            .collect()
    };
    if let Some(path) = out {
        let side = path.with_extension("json");
        if side != path {
            let mut body = serde_json::to_string_pretty(&sidecar).unwrap_or_default();
            body.push('\n');
            std::fs::write(&side, body).map_err(|e| CliError::Io { path: side.display().to_string(), source: e })?;
        }
    }
    Ok(ok(match fmt {
        Format::Csv => text(csv(&header, &rows(machine))),
        Format::Table => {
            let gap = gap.map(|g| format!(", closed/balance gap {}", human(g))).unwrap_or_default();
            text(format!("# {} n = {} epsilon = {}{gap}\n{}", p.label, st.n, human(st.epsilon), table(&header, &rows(human))))
        }
        Format::Json => {
            let mut data = sidecar;
            data["r"] = serde_json::to_value(&sp.r_grid).unwrap_or_default();
            if plus {
                data["phi_plus"] = serde_json::to_value(&sp.phi_plus).unwrap_or_default();
            }
            if minus {
                data["phi_minus"] = serde_json::to_value(&sp.phi_minus).unwrap_or_default();
            }
            output::json("wavefunction", command, data)
        }
    }))
}

fn render_run(report: &RunReport, fmt: Format) -> Rendered {
    let header = ["fixture", "item", "value", "reference", "tolerance", "result"];
    let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for fx in &report.fixtures {
            for s in &fx.states {
                rows.push(vec![
                    fx.fixture.clone(),
                    format!("n={} energy", s.n),
                    f(s.closed),
                    opt(s.oracle, f),
                    f(s.tolerance),
                    pass_word(s.pass),
                ]);
            }
            for c in &fx.checks {
                rows.push(vec![fx.fixture.clone(), c.name.clone(), f(c.value), String::new(), f(c.tolerance), pass_word(c.pass)]);
            }
        }
        rows
    };
    match fmt {
        Format::Json => output::json("verify", &report.command, report),
        Format::Csv => text(csv(&header, &rows(machine))),
        Format::Table => text(format!("{}overall {}\n", table(&header, &rows(human)), pass_word(report.pass))),
    }
}

fn render_limit(scans: &[LimitScan], command: &str, fmt: Format) -> Rendered {
    let header = ["fixture", "n", "lambda_bar", "epsilon", "e_rel", "e_nr", "error", "ratio"];
    let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        let mut rows = Vec::new();
        for s in scans {
            for (i, r) in s.rows.iter().enumerate() {
                let ratio = if i > 0 { s.ratios.get(i - 1).copied() } else { None };
                rows.push(vec![
                    s.fixture.clone(),
                    s.n.to_string(),
                    f(r.lambda_bar),
                    f(r.epsilon),
                    f(r.e_rel),
                    f(r.e_nr),
                    f(r.error),
                    opt(ratio, f),
                ]);
            }
        }
        rows
    };
    match fmt {
        Format::Json => output::json("limit_scan", command, scans),
        Format::Csv => text(csv(&header, &rows(machine))),
        Format::Table => {
            let (lo, hi) = dirac_core::verify::LIMIT_RATIO_BAND;
            let pass = scans.iter().all(|s| s.pass);
            text(format!("{}ratios in [{lo}, {hi}]: {}\n", table(&header, &rows(human)), pass_word(pass)))
        }
    }
}

fn custom_fixture(a: &VerifyArgs, kind_name: &str) -> Result<Fixture, CliError> {
    let p = a.pot.problem(Some(kind_name), None)?;
    // fixture names are static; one leaked label per process is fine
    let name: &'static str = Box::leak(format!("{}-custom", p.spec.kind().name()).into_boxed_str());
    Ok(Fixture { name, spec: p.spec, lambda_bar: p.ctx.lambda_bar, kappa: p.chan.kappa })
}

pub fn verify(a: &VerifyArgs, fmt: Format, command: &str) -> Result<Outcome, CliError> {
    if a.morse_adjudication {
        let adj = morse_adjudication(1e-6)?;
        let rendered = match fmt {
            Format::Json => output::json("morse_adjudication", command, &adj),
            _ => {
                let header = ["fixture", "n", "oracle", "implemented", "xpct", "printed_half_shift", "table_row", "dev_implemented", "dev_half_shift", "dev_table_row"];
                let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
                    adj.rows
                        .iter()
                        .map(|r| {
                            vec![
                                r.fixture.clone(),
                                r.n.to_string(),
                                f(r.oracle),
                                f(r.implemented),
                                f(r.xpct),
                                opt(r.printed_half_shift, f),
                                opt(r.table_row, f),
                                f(r.dev_implemented),
                                opt(r.dev_printed_half_shift, f),
                                opt(r.dev_table_row, f),
                            ]
                        })
                        .collect()
                };
                if fmt == Format::Csv {
                    text(csv(&header, &rows(machine)))
                } else {
                    text(format!(
                        "{}tolerance {}: implemented {}, catalog row {}, printed half-shift {}\n",
                        table(&header, &rows(human)),
                        human(adj.tolerance),
                        match_word(adj.implemented_matches),
                        match_word(adj.table_row_matches),
                        match_word(adj.printed_half_shift_matches),
                    ))
                }
            }
        };
        return Ok(ok(rendered));
    }
    if a.limit_scan {
        let scans = match a.target.as_deref() {
            None => {
                let mut v = limit_scan_kind(PotentialKind::Coulomb)?;
                v.extend(limit_scan_kind(PotentialKind::RosenMorseI)?);
                v
            }
            Some(t) if fixtures::by_name(t).is_some() => {
                let fx = fixture(t)?;
                let mut v = Vec::new();
                for n in fx.states()? {
                    match limit_scan(&fx, n) {
                        Ok(s) => v.push(s),
                        Err(Error::Domain(_)) => break,
                        Err(e) => return Err(e.into()),
                    }
                }
                v
            }
            Some(t) => limit_scan_kind(parse_kind(t)?)?,
        };
        let pass = !scans.is_empty() && scans.iter().all(|s| s.pass);
        return Ok(Outcome { rendered: render_limit(&scans, command, fmt), code: if pass { 0 } else { 1 } });
    }
    let list = if a.all {
        fixtures::all()
    } else {
        let t = a.target.as_deref().ok_or_else(|| CliError::Usage("give a fixture or potential name, or --all".into()))?;
        if let Some(fx) = fixtures::by_name(t) {
            vec![fx]
        } else if a.pot.any_param() {
            vec![custom_fixture(a, t)?]
        } else {
            let v = fixtures::for_potential(parse_kind(t)?);
            if v.is_empty() {
                return Err(CliError::Usage(format!("no fixtures for {t}")));
            }
            v
        }
    };
    let opts = VerifyOptions { perturb_epsilon: a.perturb_epsilon, energies_only: a.energies_only, ..VerifyOptions::default() };
    let report = verify_fixtures(command, &list, &opts)?;
    Ok(Outcome { rendered: render_run(&report, fmt), code: if report.pass { 0 } else { 1 } })
}

fn match_word(b: bool) -> &'static str {
    if b {
        "matches"
    } else {
        "does not match"
    }
}

pub fn maps(a: &MapsArgs, fmt: Format, command: &str) -> Result<Outcome, CliError> {
    let list = match a.potential.as_deref() {
        Some(p) => maps_for(parse_kind(p)?),
        None => all_maps(),
    };
    let list: Vec<ParameterMap> = list
        .into_iter()
        .filter(|m| {
            a.component.is_none_or(|c| {
                m.component
                    == match c {
                        MapComponent::Upper => Component::Upper,
                        MapComponent::Lower => Component::Lower,
                    }
            })
        })
        .filter(|m| a.branch.is_none_or(|b| m.branch == Branch::from(b)))
        .collect();
    Ok(ok(match fmt {
        Format::Table => text(format_table(&list)),
        Format::Json => output::json("maps", command, &list),
        Format::Csv => {
            let rows: Vec<Vec<String>> = list
                .iter()
                .flat_map(|m| {
                    m.substitutions.iter().map(move |s| {
                        vec![
                            m.potential.name().to_string(),
                            m.component.to_string(),
                            branch_name(m.branch).into(),
                            format!("{:?}", m.choice).to_lowercase(),
                            m.energy_offset.to_string(),
                            s.symbol.to_string(),
                            s.target.to_string(),
                        ]
                    })
                })
                .collect();
            text(csv(&["potential", "component", "branch", "choice", "energy_offset", "symbol", "target"], &rows))
        }
    }))
}

#[derive(Serialize)]
struct XpctRow {
    n: u32,
    epsilon_direct: f64,
    epsilon_xpct: f64,
    energy_dev: f64,
    /// Upper-component deviation (induced-potential residual for identity rows).
    upper_dev: f64,
    lower_dev: f64,
}

#[derive(Serialize)]
struct XpctData<'a> {
    row: &'a str,
    formula: &'a str,
    reference: PotentialKind,
    label: &'a str,
    target: dirac_core::PotentialSpec,
    lambda_bar: f64,
    kappa: i32,
    comparisons: Vec<XpctRow>,
    max_deviation: f64,
    tolerance: f64,
    pass: bool,
}

pub fn xpct(a: &XpctArgs, fmt: Format, command: &str) -> Result<Outcome, CliError> {
    let source = parse_kind(&a.source)?;
    let target = parse_kind(&a.target)?;
    let row = Row::for_target(target).ok_or_else(|| Error::Unsupported(format!("no map row targets {target}")))?;
    if row.reference() != source {
        return Err(Error::Unsupported(format!("the {} row maps from {}, not {source}", row.name(), row.reference())).into());
    }
    let p = a.pot.problem(Some(&a.target), a.fixture.as_deref())?;
    let levels = p.levels(a.n.as_deref())?;
    let (comparisons, default_tol) = match target {
        PotentialKind::Morse | PotentialKind::Coulomb => {
            let req = SpectrumRequest::regular(p.spec, p.ctx, p.chan, levels);
            let rows = energies(&req)?
                .iter()
                .map(|st| {
                    xpct_compare(&p.spec, &p.ctx, &p.chan, st, &p.label).map(|c| XpctRow {
                        n: c.n,
                        epsilon_direct: c.epsilon_direct,
                        epsilon_xpct: c.epsilon_xpct,
                        energy_dev: c.energy_dev,
                        upper_dev: c.upper_dev,
                        lower_dev: c.lower_dev,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (rows, 1e-6)
        }
        PotentialKind::Oscillator => {
            let closed = energies(&SpectrumRequest::regular(p.spec, p.ctx, p.chan, levels.clone()))?;
            let rows = xpct_identity(&p.spec, &p.ctx, &p.chan, &levels)?
                .into_iter()
                .zip(&closed)
                .map(|(c, st)| XpctRow {
                    n: c.n,
                    epsilon_direct: st.epsilon,
                    epsilon_xpct: st.epsilon + c.energy_dev,
                    energy_dev: c.energy_dev,
                    upper_dev: c.potential_residual.max(c.spinor_dev),
                    lower_dev: c.spinor_dev,
                })
                .collect();
            (rows, 1e-12)
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "comparisons run for the oscillator, morse and coulomb targets; the {} row has no direct regeneration",
                row.name()
            ))
            .into())
        }
    };
    let tolerance = a.tolerance.unwrap_or(default_tol);
    let max_deviation = comparisons.iter().map(|c| c.energy_dev.max(c.upper_dev).max(c.lower_dev)).fold(0.0, f64::max);
    let pass = !comparisons.is_empty() && max_deviation <= tolerance;
    let data = XpctData {
        row: row.name(),
        formula: row.formula(),
        reference: source,
        label: &p.label,
        target: p.spec,
        lambda_bar: p.ctx.lambda_bar,
        kappa: p.chan.kappa,
        comparisons,
        max_deviation,
        tolerance,
        pass,
    };
    let header = ["n", "epsilon_direct", "epsilon_xpct", "energy_dev", "upper_dev", "lower_dev"];
    let rows = |f: fn(f64) -> String| -> Vec<Vec<String>> {
        data.comparisons
            .iter()
            .map(|c| vec![c.n.to_string(), f(c.epsilon_direct), f(c.epsilon_xpct), f(c.energy_dev), f(c.upper_dev), f(c.lower_dev)])
            .collect()
    };
    let rendered = match fmt {
        Format::Csv => text(csv(&header, &rows(machine))),
        Format::Table => text(format!(
            "# {} -> {} via r = {}\n{}max deviation {} (tolerance {}): {}\n",
            source,
            p.label,
            data.formula,
            table(&header, &rows(human)),
            human(max_deviation),
            human(tolerance),
            pass_word(pass)
        )),
        Format::Json => output::json("xpct", command, &data),
    };
    Ok(Outcome { rendered, code: if pass { 0 } else { 1 } })
}

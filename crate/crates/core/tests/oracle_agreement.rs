use dirac_core::fixtures;
use dirac_core::oracle::{oracle_levels, ShootingConfig};
use dirac_core::spectra::energies;

#[test]
fn closed_forms_match_shooting_on_fixtures() {
    let cfg = ShootingConfig::default();
    let mut failures = Vec::new();
    for f in fixtures::all() {
        let (ctx, chan) = (f.ctx(), f.chan());
        let closed = energies(&f.request().unwrap()).unwrap();
        let oracle = oracle_levels(&f.spec, &ctx, &chan, 2, 2.0, &cfg).unwrap();
        for st in closed {
            let Some(lv) = oracle.iter().find(|l| l.nodes == st.n as usize) else {
                failures.push(format!("{} n={}: no oracle level", f.name, st.n));
                continue;
            };
            let rel = (st.epsilon - lv.epsilon).abs() / lv.epsilon.abs();
            // the Woods-Saxon phase condition drops terms of order e^{-λR}
            let tol = if f.name.starts_with("woods") { 1e-6 } else { 1e-9 };
            if rel > tol {
                failures.push(format!("{} n={}: closed {} oracle {} rel {rel:e}", f.name, st.n, st.epsilon, lv.epsilon));
            }
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

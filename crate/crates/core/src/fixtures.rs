//! Shipped parameter points: two per catalog potential, regular branch.

use serde::Serialize;

use crate::catalog::{AngularChannel, Branch, PotentialSpec, RelativisticContext, Sign};
use crate::error::Result;
use crate::spectra::{n_max, SpectrumRequest};

#[derive(Debug, Clone, Serialize)]
pub struct Fixture {
    pub name: &'static str,
    pub spec: PotentialSpec<f64>,
    pub lambda_bar: f64,
    pub kappa: i32,
}

impl Fixture {
    pub fn ctx(&self) -> RelativisticContext<f64> {
        RelativisticContext::new(self.lambda_bar).expect("fixture lambda_bar")
    }

    pub fn chan(&self) -> AngularChannel {
        AngularChannel::new(self.kappa).expect("fixture kappa")
    }

    /// `n ∈ {0, 1, 2}` restricted to the admitted levels.
    pub fn states(&self) -> Result<Vec<u32>> {
        let (ctx, chan) = (self.ctx(), self.chan());
        let tp = crate::catalog::derive_transform(&self.spec, &ctx, &chan, Sign::Plus)?;
        let nm = n_max(&self.spec, &ctx, &chan, &tp);
        Ok((0..3).filter(|&n| nm.admits(n)).collect())
    }

    pub fn request(&self) -> Result<SpectrumRequest<f64>> {
        Ok(SpectrumRequest {
            spec: self.spec,
            ctx: self.ctx(),
            chan: self.chan(),
            branch: Branch::Regular,
            energy_sign: Sign::Plus,
            n_list: self.states()?,
        })
    }
}

pub fn all() -> Vec<Fixture> {
    let morse_osc = RelativisticContext::new(0.1).expect("lambda_bar");
    vec![
        Fixture { name: "coulomb-a", spec: PotentialSpec::Coulomb { z: -0.5 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "coulomb-b", spec: PotentialSpec::Coulomb { z: -1.0 }, lambda_bar: 0.1, kappa: 2 },
        Fixture { name: "oscillator-a", spec: PotentialSpec::Oscillator { omega: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "oscillator-b", spec: PotentialSpec::Oscillator { omega: 0.5 }, lambda_bar: 0.2, kappa: 2 },
        Fixture {
            name: "morse-a",
            spec: PotentialSpec::morse_from_oscillator(1.0, 0.3, 2.0, &morse_osc),
            lambda_bar: 0.1,
            kappa: 1,
        },
        Fixture { name: "morse-b", spec: PotentialSpec::Morse { a: 2.0, b: 15.0, lambda: 0.5 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "rosen-morse-i-a", spec: PotentialSpec::RosenMorseI { a: 4.0, b: 2.0, lambda: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "rosen-morse-i-b", spec: PotentialSpec::RosenMorseI { a: 6.0, b: 3.0, lambda: 1.0 }, lambda_bar: 0.05, kappa: 1 },
        Fixture { name: "eckart-a", spec: PotentialSpec::Eckart { a: -4.0, b: -60.0, lambda: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "eckart-b", spec: PotentialSpec::Eckart { a: -3.0, b: -40.0, lambda: 0.5 }, lambda_bar: 0.05, kappa: 1 },
        Fixture { name: "rosen-morse-ii-a", spec: PotentialSpec::RosenMorseII { a: 3.0, b: 4.0, lambda: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "rosen-morse-ii-b", spec: PotentialSpec::RosenMorseII { a: 2.0, b: 5.0, lambda: 0.5 }, lambda_bar: 0.05, kappa: 1 },
        Fixture { name: "scarf-a", spec: PotentialSpec::Scarf { a: 4.0, b: 0.5, lambda: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "scarf-b", spec: PotentialSpec::Scarf { a: 3.5, b: 1.5, lambda: 0.8 }, lambda_bar: 0.05, kappa: 1 },
        Fixture { name: "poschl-teller-a", spec: PotentialSpec::PoschlTeller { a: -8.0, b: 2.0, lambda: 1.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "poschl-teller-b", spec: PotentialSpec::PoschlTeller { a: -12.0, b: 3.0, lambda: 1.0 }, lambda_bar: 0.05, kappa: 1 },
        Fixture { name: "woods-saxon-a", spec: PotentialSpec::WoodsSaxon { b: 5.0, r0: 6.0, lambda: 2.0 }, lambda_bar: 0.1, kappa: 1 },
        Fixture { name: "woods-saxon-b", spec: PotentialSpec::WoodsSaxon { b: 8.0, r0: 4.0, lambda: 3.0 }, lambda_bar: 0.05, kappa: 1 },
    ]
}

pub fn by_name(name: &str) -> Option<Fixture> {
    all().into_iter().find(|f| f.name == name)
}

/// Fixtures whose potential matches a catalog name such as `coulomb`.
pub fn for_potential(kind: crate::catalog::PotentialKind) -> Vec<Fixture> {
    all().into_iter().filter(|f| f.spec.kind() == kind).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::PotentialKind;
    use crate::spectra::energies;

    #[test]
    fn two_points_per_potential_with_levels() {
        for kind in PotentialKind::ALL {
            let fx = for_potential(kind);
            assert!(fx.len() >= 2, "{kind:?}");
            for f in fx {
                let states = f.states().unwrap();
                assert!(!states.is_empty(), "{}", f.name);
                let levels = energies(&f.request().unwrap()).unwrap();
                assert_eq!(levels.len(), states.len(), "{}", f.name);
            }
        }
    }
}

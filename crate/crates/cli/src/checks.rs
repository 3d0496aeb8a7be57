//! Catalogue of named checks and the equation each one verifies.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Check {
    Compatibility,
    TorsionFree,
    RhoAntisymmetry,
    RhoOrthogonality,
    RhoPairAntisymmetry,
    RiemannExtraction,
    RiemannContraction,
    RicciDuality,
    ScalarDuality,
    RicciScalar,
    CommutatorCurvature,
    Tensoriality,
    Cyclic,
    Bianchi,
    PairSymmetry,
    RiemannCyclic,
    RiemannSymmetry,
    RicciSymmetry,
    OmegaReconstruction,
    GaugeRiemann,
    RiemannTransfer,
    RhoTransfer,
    GaugeRicciContraction,
    GaugeScalar,
    FlatnessTransfer,
    DeformedTorsion,
    TorsionWitness,
    DiffeoCommutator,
    DiffeoFlatness,
    CommutatorDefect,
}

/// What a scenario provides, deciding which checks apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Capabilities {
    pub levi_civita: bool,
    pub gauge: bool,
    pub flat_source: bool,
    pub diffeomorphism: bool,
    pub expected_scalar: bool,
}

impl Check {
    pub const ALL: [Check; 30] = [
        Check::Compatibility,
        Check::TorsionFree,
        Check::RhoAntisymmetry,
        Check::RhoOrthogonality,
        Check::RhoPairAntisymmetry,
        Check::RiemannExtraction,
        Check::RiemannContraction,
        Check::RicciDuality,
        Check::ScalarDuality,
        Check::RicciScalar,
        Check::CommutatorCurvature,
        Check::Tensoriality,
        Check::Cyclic,
        Check::Bianchi,
        Check::PairSymmetry,
        Check::RiemannCyclic,
        Check::RiemannSymmetry,
        Check::RicciSymmetry,
        Check::OmegaReconstruction,
        Check::GaugeRiemann,
        Check::RiemannTransfer,
        Check::RhoTransfer,
        Check::GaugeRicciContraction,
        Check::GaugeScalar,
        Check::FlatnessTransfer,
        Check::DeformedTorsion,
        Check::TorsionWitness,
        Check::DiffeoCommutator,
        Check::DiffeoFlatness,
        Check::CommutatorDefect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Compatibility => "compatibility",
            Check::TorsionFree => "torsion_free",
            Check::RhoAntisymmetry => "rho_antisymmetry",
            Check::RhoOrthogonality => "rho_orthogonality",
            Check::RhoPairAntisymmetry => "rho_pair_antisymmetry",
            Check::RiemannExtraction => "riemann_extraction",
            Check::RiemannContraction => "riemann_contraction",
            Check::RicciDuality => "ricci_duality",
            Check::ScalarDuality => "scalar_duality",
            Check::RicciScalar => "ricci_scalar",
            Check::CommutatorCurvature => "commutator_curvature",
            Check::Tensoriality => "tensoriality",
            Check::Cyclic => "cyclic",
            Check::Bianchi => "bianchi",
            Check::PairSymmetry => "pair_symmetry",
            Check::RiemannCyclic => "riemann_cyclic",
            Check::RiemannSymmetry => "riemann_symmetry",
            Check::RicciSymmetry => "ricci_symmetry",
            Check::OmegaReconstruction => "omega_reconstruction",
            Check::GaugeRiemann => "gauge_riemann",
            Check::RiemannTransfer => "riemann_transfer",
            Check::RhoTransfer => "rho_transfer",
            Check::GaugeRicciContraction => "gauge_ricci_contraction",
            Check::GaugeScalar => "gauge_scalar",
            Check::FlatnessTransfer => "flatness_transfer",
            Check::DeformedTorsion => "deformed_torsion",
            Check::TorsionWitness => "torsion_witness",
            Check::DiffeoCommutator => "diffeo_commutator",
            Check::DiffeoFlatness => "diffeo_flatness",
            Check::CommutatorDefect => "commutator_defect",
        }
    }

    /// Equation tag the check verifies.
    pub fn equation(self) -> &'static str {
        match self {
            Check::Compatibility => "GS.2",
            Check::TorsionFree => "GEF14",
            Check::RhoAntisymmetry => "RRF.2",
            Check::RhoOrthogonality => "RRF.2a",
            Check::RhoPairAntisymmetry => "RRF.2b",
            Check::RiemannExtraction => "RRF.3",
            Check::RiemannContraction => "RRF.6a",
            Check::RicciDuality => "RRF.6b",
            Check::ScalarDuality => "RRF.6c",
            Check::RicciScalar => "RRF.5",
            Check::CommutatorCurvature => "RRF.7",
            Check::Tensoriality => "RRF.1",
            Check::Cyclic => "LGS.1a",
            Check::Bianchi => "LGS.1aa",
            Check::PairSymmetry => "LGS.1b",
            Check::RiemannCyclic => "LGS.1c",
            Check::RiemannSymmetry => "LGS.2",
            Check::RicciSymmetry => "LGS.3",
            Check::OmegaReconstruction => "GEF.2a",
            Check::GaugeRiemann => "GEF.6",
            Check::RiemannTransfer => "GEF.8",
            Check::RhoTransfer => "GEF.7",
            Check::GaugeRicciContraction => "GEF.12",
            Check::GaugeScalar => "GEF.13a",
            Check::FlatnessTransfer => "GEF.8",
            Check::DeformedTorsion => "GEF15",
            Check::TorsionWitness => "GEF15",
            Check::DiffeoCommutator => "diff7",
            Check::DiffeoFlatness => "diff6",
            Check::CommutatorDefect => "diff7",
        }
    }

    /// Lower bound on the witnessed quantity for checks that assert a
    /// nonzero value.
    pub fn witness_threshold(self) -> Option<f64> {
        match self {
            Check::TorsionWitness => Some(0.5),
            Check::CommutatorDefect => Some(0.9),
            _ => None,
        }
    }

    /// Whether the check concerns a gauge deformation or a diffeomorphism.
    pub fn is_deformation(self) -> bool {
        matches!(
            self,
            Check::OmegaReconstruction
                | Check::GaugeRiemann
                | Check::RiemannTransfer
                | Check::RhoTransfer
                | Check::GaugeRicciContraction
                | Check::GaugeScalar
                | Check::FlatnessTransfer
                | Check::DeformedTorsion
                | Check::TorsionWitness
                | Check::DiffeoCommutator
                | Check::DiffeoFlatness
                | Check::CommutatorDefect
        )
    }

    pub fn applies(self, caps: &Capabilities) -> bool {
        match self {
            Check::TorsionFree
            | Check::Cyclic
            | Check::Bianchi
            | Check::PairSymmetry
            | Check::RiemannCyclic
            | Check::RiemannSymmetry
            | Check::RicciSymmetry => caps.levi_civita,
            Check::RicciScalar => caps.expected_scalar,
            Check::OmegaReconstruction
            | Check::GaugeRiemann
            | Check::RiemannTransfer
            | Check::RhoTransfer
            | Check::GaugeRicciContraction
            | Check::GaugeScalar => caps.gauge,
            Check::FlatnessTransfer
            | Check::DeformedTorsion
            | Check::TorsionWitness
            | Check::CommutatorDefect => caps.flat_source,
            Check::DiffeoCommutator | Check::DiffeoFlatness => caps.diffeomorphism,
            _ => true,
        }
    }

    /// Checks run when a scenario lists none. Witness checks only run on
    /// request, since they assert a scenario-specific nonzero value.
    pub fn defaults(caps: &Capabilities) -> Vec<Check> {
        Self::ALL
            .into_iter()
            .filter(|c| c.applies(caps) && c.witness_threshold().is_none())
            .collect()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::Invalid(format!("unknown check {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_round_trip() {
        let mut names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), Check::ALL.len());
        for c in Check::ALL {
            assert_eq!(c.name().parse::<Check>().unwrap(), c);
        }
        assert!("nope".parse::<Check>().is_err());
    }
}

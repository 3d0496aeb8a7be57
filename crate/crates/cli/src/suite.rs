//! Evaluates a scenario's checks at its sample points and assembles the
//! report.

use std::cell::OnceCell;

use excalc_core::deformation::{
    commutator_preservation, deform_dcdo, deformed_torsion, extract_omega,
    omega_reconstruction_residual_at, pullback_metric, undeform_dcdo, Diffeomorphism,
    GaugeCurvatureAt, GaugeDeformation,
};
use excalc_core::fields::{
    lift_point, DerivativeConfig, DerivativeMode, Extensor12Field, Field, MvField, ScalarField,
    VectorField,
};
use excalc_core::geometry::{
    commutator_check_at, identities, BianchiData, CurvatureAt, DcdoPair, GeometricStructure,
    SignPattern,
};
use excalc_core::{Jet, Multivector, Scalar};
use rayon::prelude::*;

use crate::checks::Check;
use crate::report::{CheckRecord, CurvatureRecord, Environment, PointError, Report};
use crate::scenario::{mode_name, Scenario};

/// Sign pattern used for the Bianchi check.
pub const BIANCHI_PATTERN: SignPattern = SignPattern::PLUS;

pub const WEDGE_PAIR_CONVENTION: &str =
    "sum over i<j of (e_i^e_j)(G(e_i,e_j) - G(e_j,e_i)); Riemann uses scale -1/2";

/// Command-line overrides of scenario settings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tolerance: Option<f64>,
    pub dd_mode: Option<DerivativeMode>,
    pub fd_step: Option<f64>,
    pub samples: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, s: &Scenario) -> Scenario {
        let mut s = s.clone();
        if let Some(t) = self.tolerance {
            s.tolerance = t;
            s.tolerances.clear();
        }
        if let Some(m) = self.dd_mode {
            s.dd_mode = m;
        }
        if let Some(h) = self.fd_step {
            s.fd_step = h;
        }
        s
    }
}

/// Smooth test fields used by the checks that need vector or multivector
/// field arguments.
struct TestFields {
    a: VectorField,
    b: VectorField,
    c: VectorField,
    f: ScalarField,
    x: MvField,
}

impl TestFields {
    fn new(n: usize) -> Self {
        let k = move |i: usize, s: usize| (i + s) % n;
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        TestFields {
            a: Field::new(n, move |x: &[Jet]| {
                Ok((0..n)
                    .map(|i| Jet::constant(delta(i, 0)) + x[k(i, 1)].scale(0.2))
                    .collect())
            }),
            b: Field::new(n, move |x: &[Jet]| {
                Ok((0..n)
                    .map(|i| Jet::constant(delta(i, 1)) + (x[i] * x[k(i, 1)]).scale(0.1))
                    .collect())
            }),
            c: Field::new(n, move |x: &[Jet]| {
                Ok((0..n)
                    .map(|i| Jet::constant(0.5) + x[k(i, 2)].sin().scale(0.1))
                    .collect())
            }),
            f: Field::new(n, |x: &[Jet]| Ok(Jet::one() + (x[0] * x[0]).scale(0.1))),
            x: Field::new(n, move |x: &[Jet]| {
                let mut m = Multivector::vector(x);
                m.set(0, Jet::constant(0.5) + x[0].scale(0.1));
                m.set(0b11, x[1].cos());
                m.set((1 << n) - 1, x[0] * x[n - 1]);
                Ok(m)
            }),
        }
    }
}

/// Everything built once per run.
struct Setup {
    scenario: Scenario,
    cfg: DerivativeConfig,
    structure: GeometricStructure,
    gauge: Option<GaugeDeformation>,
    eta: Option<(GeometricStructure, Extensor12Field)>,
    diffeo: Option<Diffeomorphism>,
    fields: TestFields,
}

impl Setup {
    fn new(scenario: Scenario) -> Self {
        let cfg = scenario.derivative_config();
        let structure = scenario.structure(cfg);
        let gauge = scenario.gauge(cfg);
        let eta = gauge.as_ref().map(|g| {
            let pair = deform_dcdo(g, structure.pair());
            let omega = extract_omega(&pair, scenario.signature);
            (
                GeometricStructure::from_pair(g.orthogonal_metric(), pair),
                omega,
            )
        });
        Setup {
            cfg,
            gauge,
            eta,
            diffeo: scenario.diffeo(),
            fields: TestFields::new(scenario.dim),
            structure,
            scenario,
        }
    }

    fn frame_field(&self, i: usize) -> VectorField {
        VectorField::basis(self.scenario.dim, i)
    }
}

type Outcome = excalc_core::Result<(f64, Option<f64>)>;

/// Lazily computed curvature data at one sample.
struct PointCtx<'a> {
    setup: &'a Setup,
    x: &'a [f64],
    curv: OnceCell<excalc_core::Result<CurvatureAt>>,
    eta_curv: OnceCell<excalc_core::Result<CurvatureAt>>,
    gauge_curv: OnceCell<excalc_core::Result<GaugeCurvatureAt>>,
}

fn cloned<T: Clone>(r: &excalc_core::Result<T>) -> excalc_core::Result<T> {
    r.clone()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, c| m.max(c.abs()))
}

impl<'a> PointCtx<'a> {
    fn new(setup: &'a Setup, x: &'a [f64]) -> Self {
        PointCtx {
            setup,
            x,
            curv: OnceCell::new(),
            eta_curv: OnceCell::new(),
            gauge_curv: OnceCell::new(),
        }
    }

    fn curv(&self) -> excalc_core::Result<CurvatureAt> {
        cloned(
            self.curv
                .get_or_init(|| CurvatureAt::compute(&self.setup.structure, self.x)),
        )
    }

    fn eta_parts(&self) -> (&GeometricStructure, &Extensor12Field, &GaugeDeformation) {
        let (s, w) = self.setup.eta.as_ref().expect("gauge checks need a gauge");
        (
            s,
            w,
            self.setup
                .gauge
                .as_ref()
                .expect("gauge checks need a gauge"),
        )
    }

    fn eta_curv(&self) -> excalc_core::Result<CurvatureAt> {
        cloned(
            self.eta_curv
                .get_or_init(|| CurvatureAt::compute(self.eta_parts().0, self.x)),
        )
    }

    fn gauge_curv(&self) -> excalc_core::Result<GaugeCurvatureAt> {
        cloned(self.gauge_curv.get_or_init(|| {
            let (_, w, g) = self.eta_parts();
            GaugeCurvatureAt::compute(w, g, &self.setup.cfg, self.x)
        }))
    }

    fn frame_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.setup.scenario.dim;
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect()
    }

    fn plain(r: excalc_core::Result<f64>) -> Outcome {
        r.map(|v| (v, None))
    }

    fn witness(value: f64, threshold: f64) -> Outcome {
        Ok(((threshold - value).max(0.0), Some(value)))
    }

    fn evaluate(&self, check: Check) -> Outcome {
        let s = self.setup;
        let p = lift_point(self.x);
        let n = s.scenario.dim;
        let id = |f: fn(&CurvatureAt) -> f64| Self::plain(self.curv().map(|c| f(&c)));
        match check {
            Check::Compatibility => {
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let mut a = vec![0.0; n];
                        let mut v = vec![0.0; n];
                        a[i] = 1.0;
                        v[j] = 1.0;
                        worst = worst.max(s.structure.compatibility_residual_at(&p, &a, &v)?);
                    }
                }
                Ok((worst, None))
            }
            Check::TorsionFree => {
                let t = s.structure.torsion_at(&p, &s.fields.a, &s.fields.b)?;
                Ok((t.iter().fold(0.0, |m, v| m.max(v.value().abs())), None))
            }
            Check::RhoAntisymmetry => id(identities::antisymmetry),
            Check::RhoOrthogonality => id(identities::orthogonality),
            Check::RhoPairAntisymmetry => id(identities::pair_antisymmetry),
            Check::RiemannExtraction => id(identities::riemann_extraction),
            Check::RiemannContraction => id(identities::riemann_contraction),
            Check::RicciDuality => id(identities::ricci_duality),
            Check::ScalarDuality => id(identities::scalar_duality),
            Check::RicciScalar => {
                let expected = s
                    .scenario
                    .expected_ricci_scalar
                    .as_ref()
                    .expect("validated")
                    .eval(self.x);
                Self::plain(self.curv().map(|c| (c.scalar() - expected).abs()))
            }
            Check::CommutatorCurvature => Self::plain(commutator_check_at(
                &s.structure,
                self.x,
                &s.fields.a,
                &s.fields.b,
                &s.fields.x,
            )),
            Check::Tensoriality => Self::plain(identities::tensoriality_at(
                &s.structure,
                self.x,
                &s.fields.f,
                &s.fields.a,
                &s.fields.b,
                &s.fields.c,
            )),
            Check::Cyclic => id(identities::cyclic),
            Check::Bianchi => Self::plain(
                BianchiData::compute(s.structure.pair(), self.x)
                    .map(|d| d.residual(BIANCHI_PATTERN)),
            ),
            Check::PairSymmetry => id(identities::pair_symmetry),
            Check::RiemannCyclic => id(identities::riemann_cyclic),
            Check::RiemannSymmetry => id(identities::riemann_symmetry),
            Check::RicciSymmetry => id(identities::ricci_symmetry),
            Check::OmegaReconstruction => {
                let (eta, _, g) = self.eta_parts();
                Self::plain(omega_reconstruction_residual_at(
                    eta.pair(),
                    g.signature(),
                    &p,
                ))
            }
            Check::GaugeRiemann => {
                let (ec, gc) = (self.eta_curv()?, self.gauge_curv()?);
                let eta = s.scenario.signature.eta::<f64>();
                let mut worst: f64 = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let d = ec.riemann_frame(a, b) - &eta.outermorphism(gc.riemann_frame(a, b));
                        worst = worst.max(d.max_abs());
                    }
                }
                Ok((worst, None))
            }
            Check::RiemannTransfer => {
                let (gc, ec) = (self.curv()?, self.eta_curv()?);
                let h = self.eta_parts().2.h_at(&p)?.values();
                let ha = h.adjoint();
                let mut worst: f64 = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        let d = gc.riemann_frame(a, b) - &ha.outermorphism(ec.riemann_frame(a, b));
                        worst = worst.max(d.max_abs());
                    }
                }
                Ok((worst, None))
            }
            Check::RhoTransfer => {
                let (gc, ec) = (self.curv()?, self.eta_curv()?);
                let hi = self.eta_parts().2.h_at(&p)?.values().inverse()?;
                let e = |k: usize| {
                    let mut v = vec![0.0; n];
                    v[k] = 1.0;
                    v
                };
                let mut worst: f64 = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let lhs = gc.rho(&e(a), &e(b), &hi.apply_vec(&e(c)));
                            let rhs = hi.apply_vec(&ec.rho(&e(a), &e(b), &e(c)));
                            let d: Vec<f64> = lhs.iter().zip(&rhs).map(|(u, v)| u - v).collect();
                            worst = worst.max(max_abs(&d));
                        }
                    }
                }
                Ok((worst, None))
            }
            Check::GaugeRicciContraction => {
                let gc = self.gauge_curv()?;
                Ok(((gc.scalar_from_ricci() - gc.scalar()).abs(), None))
            }
            Check::GaugeScalar => {
                let (gc, c) = (self.gauge_curv()?, self.curv()?);
                Ok(((gc.scalar() - c.scalar_dual()).abs(), None))
            }
            Check::FlatnessTransfer => {
                let c = self.curv()?;
                Ok((
                    c.rho_tensor().iter().fold(0.0, |m, r| m.max(r.max_abs())),
                    None,
                ))
            }
            Check::DeformedTorsion => {
                let g = s.gauge.as_ref().expect("flat source has a gauge");
                let flat = DcdoPair::flat(n, s.cfg);
                let mut worst: f64 = 0.0;
                for (i, j) in self.frame_pairs() {
                    let t =
                        deformed_torsion(g, &flat, &s.frame_field(i), &s.frame_field(j), self.x)?;
                    worst = worst.max(t.residual());
                }
                Ok((worst, None))
            }
            Check::TorsionWitness => {
                let g = s.gauge.as_ref().expect("flat source has a gauge");
                let flat = DcdoPair::flat(n, s.cfg);
                let mut value: f64 = 0.0;
                for (i, j) in self.frame_pairs() {
                    let t =
                        deformed_torsion(g, &flat, &s.frame_field(i), &s.frame_field(j), self.x)?;
                    value = value.max(norm(&t.lhs));
                }
                Self::witness(value, check.witness_threshold().unwrap_or(0.0))
            }
            Check::CommutatorDefect => {
                let g = s.gauge.as_ref().expect("flat source has a gauge");
                let mut value: f64 = 0.0;
                for (i, j) in self.frame_pairs() {
                    let d = g.commutator_defect_at(
                        &s.cfg,
                        self.x,
                        &s.frame_field(i),
                        &s.frame_field(j),
                    )?;
                    value = value.max(norm(&d));
                }
                Self::witness(value, check.witness_threshold().unwrap_or(0.0))
            }
            Check::DiffeoCommutator => {
                let d = s.diffeo.as_ref().expect("validated");
                Self::plain(commutator_preservation(
                    d,
                    &s.cfg,
                    &s.fields.a,
                    &s.fields.b,
                    self.x,
                ))
            }
            Check::DiffeoFlatness => {
                let d = s.diffeo.as_ref().expect("validated");
                let sig = s.scenario.signature;
                let def = d.gauge(sig, s.cfg);
                let deformed = GeometricStructure::from_pair(
                    def.metric(),
                    undeform_dcdo(&def, &DcdoPair::flat(n, s.cfg)),
                );
                let rho = CurvatureAt::compute(&deformed, self.x)?;
                let t = deformed.torsion_at(&p, &s.fields.a, &s.fields.b)?;
                let lc = GeometricStructure::levi_civita(pullback_metric(d, sig, s.cfg), s.cfg);
                let scalar = CurvatureAt::compute(&lc, self.x)?.scalar();
                let worst = rho
                    .rho_tensor()
                    .iter()
                    .fold(scalar.abs(), |m, r| m.max(r.max_abs()))
                    .max(t.iter().fold(0.0, |m, v| m.max(v.value().abs())));
                Ok((worst, None))
            }
        }
    }

    fn curvature_record(&self) -> excalc_core::Result<CurvatureRecord> {
        let c = self.curv()?;
        let gauge_ricci_scalar = match self.setup.eta {
            Some(_) => Some(self.gauge_curv()?.scalar()),
            None => None,
        };
        Ok(CurvatureRecord {
            point: self.x.to_vec(),
            ricci_scalar: c.scalar(),
            riemann: c.riemann_components(),
            gauge_ricci_scalar,
        })
    }
}

struct PointResult {
    outcomes: Vec<Outcome>,
    curvature: Option<excalc_core::Result<CurvatureRecord>>,
}

/// What to evaluate in a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub checks: Vec<Check>,
    pub curvature: bool,
}

impl Plan {
    pub fn full(s: &Scenario) -> Self {
        Plan {
            checks: s.selected_checks(),
            curvature: true,
        }
    }

    pub fn curvature_only() -> Self {
        Plan {
            checks: Vec::new(),
            curvature: true,
        }
    }

    /// The selected checks concerning gauges and diffeomorphisms.
    pub fn deformation(s: &Scenario) -> Self {
        let caps = s.capabilities();
        let mut checks: Vec<Check> = s
            .selected_checks()
            .into_iter()
            .filter(|c| c.is_deformation())
            .collect();
        if checks.is_empty() {
            checks = Check::defaults(&caps)
                .into_iter()
                .filter(|c| c.is_deformation())
                .collect();
        }
        Plan {
            checks,
            curvature: true,
        }
    }
}

/// Run `plan` on the scenario with overrides applied.
pub fn run_suite(scenario: &Scenario, overrides: &Overrides, plan: &Plan) -> Report {
    let scenario = overrides.apply(scenario);
    let seed = overrides.seed.unwrap_or_else(|| scenario.seed());
    let points = scenario.sample_points(seed, overrides.samples);
    let setup = Setup::new(scenario);
    let designated = setup.scenario.designated_sample.clone();

    let (sampled, witnessed): (Vec<Check>, Vec<Check>) = plan
        .checks
        .iter()
        .partition(|c| c.witness_threshold().is_none() || designated.is_none());

    let run_point = |x: &Vec<f64>, checks: &[Check], curvature: bool| {
        let ctx = PointCtx::new(&setup, x);
        PointResult {
            outcomes: checks.iter().map(|c| ctx.evaluate(*c)).collect(),
            curvature: curvature.then(|| ctx.curvature_record()),
        }
    };
    let results: Vec<PointResult> = points
        .par_iter()
        .map(|x| run_point(x, &sampled, plan.curvature))
        .collect();
    let witness_results: Vec<(Vec<f64>, PointResult)> = designated
        .iter()
        .map(|x| (x.clone(), run_point(x, &witnessed, false)))
        .collect();

    let mut point_errors = Vec::new();
    let mut records = Vec::new();
    let mut record =
        |check: Check, evaluated: Vec<(&Vec<f64>, &Outcome)>, errors: &mut Vec<PointError>| {
            let mut samples = 0;
            let mut worst: f64 = 0.0;
            let mut witness: Option<f64> = None;
            for (x, o) in evaluated {
                match o {
                    Ok((r, w)) => {
                        samples += 1;
                        worst = if r.is_nan() { f64::NAN } else { worst.max(*r) };
                        if let Some(w) = w {
                            witness = Some(witness.map_or(*w, |m: f64| m.max(*w)));
                        }
                    }
                    Err(e) => errors.push(PointError {
                        point: x.clone(),
                        check: check.name().to_string(),
                        error: e.to_string(),
                    }),
                }
            }
            let tolerance = setup.scenario.tolerance_for(check);
            records.push(CheckRecord {
                name: check.name().to_string(),
                equation: check.equation().to_string(),
                samples,
                max_residual: worst,
                tolerance,
                pass: samples > 0 && worst < tolerance,
                witness,
            });
        };
    for check in &plan.checks {
        let evaluated: Vec<(&Vec<f64>, &Outcome)> =
            if let Some(k) = witnessed.iter().position(|c| c == check) {
                witness_results
                    .iter()
                    .map(|(x, r)| (x, &r.outcomes[k]))
                    .collect()
            } else {
                let k = sampled
                    .iter()
                    .position(|c| c == check)
                    .expect("partitioned");
                points
                    .iter()
                    .zip(&results)
                    .map(|(x, r)| (x, &r.outcomes[k]))
                    .collect()
            };
        record(*check, evaluated, &mut point_errors);
    }
    let mut curvature = Vec::new();
    for (x, r) in points.iter().zip(&results) {
        match &r.curvature {
            Some(Ok(c)) => curvature.push(c.clone()),
            Some(Err(e)) => point_errors.push(PointError {
                point: x.clone(),
                check: "curvature".into(),
                error: e.to_string(),
            }),
            None => {}
        }
    }
    let pass = records.iter().all(|r| r.pass);
    Report {
        scenario: setup.scenario.name.clone(),
        pass,
        checks: records,
        curvature,
        environment: Environment {
            seed,
            dd_mode: mode_name(setup.scenario.dd_mode).to_string(),
            fd_step: setup.scenario.fd_step,
            samples: points.len(),
            bianchi_pattern: BIANCHI_PATTERN.to_string(),
            wedge_pair_convention: WEDGE_PAIR_CONVENTION.to_string(),
        },
        point_errors,
    }
}

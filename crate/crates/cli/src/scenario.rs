//! Scenario files: JSON documents whose geometric data are expression
//! strings over the coordinates.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use excalc_core::deformation::{Diffeomorphism, GaugeDeformation};
use excalc_core::extensor::{Extensor11, Extensor12};
use excalc_core::fields::{
    DerivativeConfig, DerivativeMode, Extensor11Field, Extensor12Field, Field, MetricField,
};
use excalc_core::geometry::{DcdoPair, GeometricStructure};
use excalc_core::{Jet, Multivector, Scalar, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::checks::{Capabilities, Check};
use crate::error::{ConfigError, Result};
use crate::expr::{parse_with_constants, Constants, Expr};

pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MARGIN: f64 = 0.05;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
const SYMMETRY_PROBES: usize = 10;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    dim: usize,
    signature: Option<(usize, usize)>,
    #[serde(default)]
    constants: BTreeMap<String, f64>,
    metric: Option<Vec<Vec<String>>>,
    gauge_h: Option<Vec<Vec<String>>>,
    #[serde(default)]
    connection: RawConnection,
    diffeomorphism: Option<RawDiffeomorphism>,
    samples: Option<RawSamples>,
    designated_sample: Option<Vec<f64>>,
    #[serde(default)]
    checks: Vec<String>,
    tolerance: Option<f64>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
    dd_mode: Option<String>,
    fd_step: Option<f64>,
    expected_ricci_scalar: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawConnection {
    Named(String),
    Omega { omega: Vec<Vec<String>> },
}

impl Default for RawConnection {
    fn default() -> Self {
        RawConnection::Named("levi-civita".into())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiffeomorphism {
    forward: Vec<String>,
    inverse: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawSamples {
    Points {
        points: Vec<Vec<f64>>,
    },
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
        count: Option<usize>,
        seed: Option<u64>,
        margin: Option<f64>,
    },
}

type Matrix = Vec<Vec<Arc<Expr>>>;

/// Where the metric comes from.
#[derive(Clone, Debug)]
pub enum MetricSpec {
    Gram(Matrix),
    Gauge(Matrix),
    /// Pullback along the scenario's diffeomorphism, with gauge `h = J`.
    Pullback,
}

#[derive(Clone, Debug)]
pub enum ConnectionSpec {
    LeviCivita,
    /// The `g`-pair deformed from the flat `η`-pair by the gauge field.
    FlatSource,
    /// Bivector components of `ω(eₖ)` per direction, in blade order.
    Omega(Vec<Vec<Arc<Expr>>>),
}

#[derive(Clone, Debug)]
pub struct DiffeoSpec {
    pub forward: Vec<Arc<Expr>>,
    pub inverse: Vec<Arc<Expr>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SampleSpec {
    Points(Vec<Vec<f64>>),
    Box {
        min: Vec<f64>,
        max: Vec<f64>,
        count: usize,
        seed: u64,
        margin: f64,
    },
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub dim: usize,
    pub signature: Signature,
    pub constants: Constants,
    pub metric: MetricSpec,
    pub connection: ConnectionSpec,
    pub diffeomorphism: Option<DiffeoSpec>,
    pub samples: SampleSpec,
    pub designated_sample: Option<Vec<f64>>,
    /// Explicitly requested checks; empty means the default suite.
    pub checks: Vec<Check>,
    pub tolerance: f64,
    pub tolerances: BTreeMap<Check, f64>,
    pub dd_mode: DerivativeMode,
    pub fd_step: f64,
    pub expected_ricci_scalar: Option<Arc<Expr>>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn parse_mode(s: &str) -> Result<DerivativeMode> {
    match s {
        "ad" => Ok(DerivativeMode::Ad),
        "fd" => Ok(DerivativeMode::Fd),
        _ => Err(invalid(format!(
            "dd_mode must be \"ad\" or \"fd\", got {s:?}"
        ))),
    }
}

pub fn mode_name(m: DerivativeMode) -> &'static str {
    match m {
        DerivativeMode::Ad => "ad",
        DerivativeMode::Fd => "fd",
    }
}

struct Ctx<'a> {
    dim: usize,
    constants: &'a Constants,
}

impl Ctx<'_> {
    fn expr(&self, src: &str, location: impl FnOnce() -> String) -> Result<Arc<Expr>> {
        parse_with_constants(src, self.dim, self.constants)
            .map(Arc::new)
            .map_err(|source| ConfigError::Expression {
                location: location(),
                source,
            })
    }

    fn matrix(&self, m: &[Vec<String>], field: &str) -> Result<Matrix> {
        if m.len() != self.dim || m.iter().any(|r| r.len() != self.dim) {
            return Err(invalid(format!(
                "{field} must be a {0}×{0} matrix",
                self.dim
            )));
        }
        m.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, s)| self.expr(s, || format!("{field}[{i}][{j}]")))
                    .collect()
            })
            .collect()
    }

    fn vector(&self, v: &[String], field: &str) -> Result<Vec<Arc<Expr>>> {
        if v.len() != self.dim {
            return Err(invalid(format!("{field} must have {} entries", self.dim)));
        }
        v.iter()
            .enumerate()
            .map(|(i, s)| self.expr(s, || format!("{field}[{i}]")))
            .collect()
    }
}

pub fn eval_matrix<S: Scalar>(m: &Matrix, x: &[S]) -> Vec<Vec<S>> {
    m.iter()
        .map(|r| r.iter().map(|e| e.eval(x)).collect())
        .collect()
}

fn matrix_field(m: &Matrix) -> Extensor11Field {
    let m = m.clone();
    let n = m.len();
    Field::new(n, move |x: &[Jet]| {
        Extensor11::from_rows(eval_matrix(&m, x))
    })
}

fn vector_field(v: &[Arc<Expr>]) -> excalc_core::fields::VectorField {
    let v = v.to_vec();
    Field::new(v.len(), move |x: &[Jet]| {
        Ok(v.iter().map(|e| e.eval(x)).collect())
    })
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario = serde_json::from_str(text)?;
        Self::validate(raw)
    }

    fn validate(raw: RawScenario) -> Result<Self> {
        let dim = raw.dim;
        if !(2..=4).contains(&dim) {
            return Err(invalid(format!("dim must be 2, 3 or 4, got {dim}")));
        }
        let signature = match raw.signature {
            Some((p, q)) if p + q == dim => Signature::new(p, q),
            Some((p, q)) => {
                return Err(invalid(format!(
                    "signature ({p},{q}) does not match dim {dim}"
                )))
            }
            None => Signature::euclidean(dim),
        };
        for name in raw.constants.keys() {
            let coord = name
                .strip_prefix('x')
                .is_some_and(|d| d.parse::<usize>().is_ok());
            if coord || name == "pi" || name == "e" {
                return Err(invalid(format!("constant name {name:?} is reserved")));
            }
        }
        let ctx = Ctx {
            dim,
            constants: &raw.constants,
        };
        let diffeomorphism = raw
            .diffeomorphism
            .as_ref()
            .map(|d| {
                Ok::<_, ConfigError>(DiffeoSpec {
                    forward: ctx.vector(&d.forward, "diffeomorphism.forward")?,
                    inverse: ctx.vector(&d.inverse, "diffeomorphism.inverse")?,
                })
            })
            .transpose()?;
        let metric = match (&raw.metric, &raw.gauge_h) {
            (Some(_), Some(_)) => return Err(invalid("metric and gauge_h are mutually exclusive")),
            (Some(m), None) => MetricSpec::Gram(ctx.matrix(m, "metric")?),
            (None, Some(h)) => MetricSpec::Gauge(ctx.matrix(h, "gauge_h")?),
            (None, None) if diffeomorphism.is_some() => MetricSpec::Pullback,
            (None, None) => return Err(invalid("one of metric or gauge_h is required")),
        };
        let connection = match &raw.connection {
            RawConnection::Named(s) if s == "levi-civita" => ConnectionSpec::LeviCivita,
            RawConnection::Named(s) if s == "flat-source" => {
                if matches!(metric, MetricSpec::Gram(_)) {
                    return Err(invalid(
                        "connection \"flat-source\" needs gauge_h or a diffeomorphism",
                    ));
                }
                ConnectionSpec::FlatSource
            }
            RawConnection::Named(s) => return Err(invalid(format!("unknown connection {s:?}"))),
            RawConnection::Omega { omega } => {
                let blades = dim * (dim - 1) / 2;
                if omega.len() != dim || omega.iter().any(|r| r.len() != blades) {
                    return Err(invalid(format!(
                        "connection.omega needs {dim} rows of {blades} bivector components"
                    )));
                }
                let rows = omega
                    .iter()
                    .enumerate()
                    .map(|(k, row)| {
                        row.iter()
                            .enumerate()
                            .map(|(j, s)| ctx.expr(s, || format!("connection.omega[{k}][{j}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                ConnectionSpec::Omega(rows)
            }
        };
        let samples = match raw.samples {
            None => SampleSpec::Box {
                min: vec![-1.0; dim],
                max: vec![1.0; dim],
                count: DEFAULT_SAMPLES,
                seed: DEFAULT_SEED,
                margin: DEFAULT_MARGIN,
            },
            Some(RawSamples::Points { points }) => {
                if points.is_empty() || points.iter().any(|p| p.len() != dim) {
                    return Err(invalid(format!(
                        "samples.points must be a non-empty list of {dim}-vectors"
                    )));
                }
                SampleSpec::Points(points)
            }
            Some(RawSamples::Box {
                min,
                max,
                count,
                seed,
                margin,
            }) => {
                if min.len() != dim
                    || max.len() != dim
                    || min
                        .iter()
                        .zip(&max)
                        .any(|(a, b)| a.partial_cmp(b) != Some(std::cmp::Ordering::Less))
                {
                    return Err(invalid("sample box must have min < max on every axis"));
                }
                let margin = margin.unwrap_or(DEFAULT_MARGIN);
                if !(0.0..0.5).contains(&margin) {
                    return Err(invalid("sample margin must lie in [0, 0.5)"));
                }
                SampleSpec::Box {
                    min,
                    max,
                    count: count.unwrap_or(DEFAULT_SAMPLES),
                    seed: seed.unwrap_or(DEFAULT_SEED),
                    margin,
                }
            }
        };
        if let Some(p) = &raw.designated_sample {
            if p.len() != dim {
                return Err(invalid(format!(
                    "designated_sample must have {dim} coordinates"
                )));
            }
        }
        let checks = raw
            .checks
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Check>>>()?;
        let tolerances = raw
            .tolerances
            .iter()
            .map(|(k, v)| Ok((k.parse::<Check>()?, *v)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let expected_ricci_scalar = raw
            .expected_ricci_scalar
            .as_deref()
            .map(|s| ctx.expr(s, || "expected_ricci_scalar".into()))
            .transpose()?;
        let scenario = Scenario {
            name: raw.name,
            dim,
            signature,
            constants: raw.constants.clone(),
            metric,
            connection,
            diffeomorphism,
            samples,
            designated_sample: raw.designated_sample,
            checks,
            tolerance: raw.tolerance.unwrap_or(DEFAULT_TOLERANCE),
            tolerances,
            dd_mode: raw
                .dd_mode
                .as_deref()
                .map(parse_mode)
                .transpose()?
                .unwrap_or(DerivativeMode::Ad),
            fd_step: raw.fd_step.unwrap_or(DEFAULT_FD_STEP),
            expected_ricci_scalar,
        };
        let caps = scenario.capabilities();
        for c in &scenario.checks {
            if !c.applies(&caps) {
                return Err(invalid(format!(
                    "check {c} does not apply to this scenario"
                )));
            }
        }
        scenario.check_symmetry()?;
        Ok(scenario)
    }

    /// Symmetry of the metric matrix at probe points drawn from the sample
    /// region.
    fn check_symmetry(&self) -> Result<()> {
        let MetricSpec::Gram(m) = &self.metric else {
            return Ok(());
        };
        let (lo, hi) = self.sample_bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..SYMMETRY_PROBES {
            let x: Vec<f64> = lo
                .iter()
                .zip(&hi)
                .map(|(a, b)| rng.gen_range(*a..=*b))
                .collect();
            let g = eval_matrix(m, &x);
            for i in 0..self.dim {
                for j in 0..i {
                    let d = (g[i][j] - g[j][i]).abs();
                    if d > 1e-12 * (1.0 + g[i][j].abs().max(g[j][i].abs())) {
                        return Err(invalid(format!(
                            "asymmetric metric: entries [{i}][{j}] and [{j}][{i}] differ at {x:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn sample_bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.samples {
            SampleSpec::Box { min, max, .. } => (min.clone(), max.clone()),
            SampleSpec::Points(ps) => {
                let lo = (0..self.dim)
                    .map(|k| ps.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min))
                    .collect();
                let hi = (0..self.dim)
                    .map(|k| ps.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max))
                    .collect();
                (lo, hi)
            }
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        Capabilities {
            levi_civita: matches!(self.connection, ConnectionSpec::LeviCivita),
            gauge: !matches!(self.metric, MetricSpec::Gram(_)),
            flat_source: matches!(self.connection, ConnectionSpec::FlatSource),
            diffeomorphism: self.diffeomorphism.is_some(),
            expected_scalar: self.expected_ricci_scalar.is_some(),
        }
    }

    /// Checks to run: the explicit list, or every applicable default.
    pub fn selected_checks(&self) -> Vec<Check> {
        if self.checks.is_empty() {
            Check::defaults(&self.capabilities())
        } else {
            self.checks.clone()
        }
    }

    pub fn tolerance_for(&self, c: Check) -> f64 {
        self.tolerances.get(&c).copied().unwrap_or(self.tolerance)
    }

    /// Sample points, with `count` overriding the box count.
    pub fn sample_points(&self, seed: u64, count: Option<usize>) -> Vec<Vec<f64>> {
        match &self.samples {
            SampleSpec::Points(ps) => ps.clone(),
            SampleSpec::Box {
                min,
                max,
                count: c,
                margin,
                ..
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count.unwrap_or(*c))
                    .map(|_| {
                        min.iter()
                            .zip(max)
                            .map(|(a, b)| {
                                let pad = (b - a) * margin;
                                rng.gen_range(a + pad..=b - pad)
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }

    pub fn seed(&self) -> u64 {
        match &self.samples {
            SampleSpec::Box { seed, .. } => *seed,
            SampleSpec::Points(_) => DEFAULT_SEED,
        }
    }

    pub fn derivative_config(&self) -> DerivativeConfig {
        match self.dd_mode {
            DerivativeMode::Ad => DerivativeConfig::ad(),
            DerivativeMode::Fd => DerivativeConfig::fd(self.fd_step),
        }
    }

    pub fn diffeo(&self) -> Option<Diffeomorphism> {
        self.diffeomorphism
            .as_ref()
            .map(|d| Diffeomorphism::new(vector_field(&d.forward), vector_field(&d.inverse)))
    }

    pub fn gauge(&self, cfg: DerivativeConfig) -> Option<GaugeDeformation> {
        match &self.metric {
            MetricSpec::Gram(_) => None,
            MetricSpec::Gauge(h) => Some(GaugeDeformation::new(matrix_field(h), self.signature)),
            MetricSpec::Pullback => self.diffeo().map(|d| d.gauge(self.signature, cfg)),
        }
    }

    pub fn metric_field(&self, cfg: DerivativeConfig) -> MetricField {
        match &self.metric {
            MetricSpec::Gram(m) => MetricField::from_gram(matrix_field(m), self.signature),
            _ => self.gauge(cfg).expect("gauge scenario").metric(),
        }
    }

    pub fn structure(&self, cfg: DerivativeConfig) -> GeometricStructure {
        let metric = self.metric_field(cfg);
        match &self.connection {
            ConnectionSpec::LeviCivita => GeometricStructure::levi_civita(metric, cfg),
            ConnectionSpec::FlatSource => {
                let def = self.gauge(cfg).expect("flat source requires a gauge");
                let pair =
                    excalc_core::deformation::undeform_dcdo(&def, &DcdoPair::flat(self.dim, cfg));
                GeometricStructure::from_pair(metric, pair)
            }
            ConnectionSpec::Omega(rows) => {
                let rows = rows.clone();
                let n = self.dim;
                let blades: Vec<usize> = (0..1usize << n).filter(|m| m.count_ones() == 2).collect();
                let omega: Extensor12Field = Field::new(n, move |x: &[Jet]| {
                    let images = rows
                        .iter()
                        .map(|row| {
                            let mut b = Multivector::zero(n);
                            for (mask, e) in blades.iter().zip(row) {
                                b.set(*mask, e.eval(x));
                            }
                            b
                        })
                        .collect();
                    Ok(Extensor12::from_images(images))
                });
                GeometricStructure::with_omega(metric, omega, cfg)
            }
        }
    }

    /// Canonical printed form of every expression, keyed by location.
    pub fn expressions(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        let mut put_matrix = |name: &str, m: &Matrix| {
            for (i, r) in m.iter().enumerate() {
                for (j, e) in r.iter().enumerate() {
                    out.insert(format!("{name}[{i}][{j}]"), e.to_string());
                }
            }
        };
        match &self.metric {
            MetricSpec::Gram(m) => put_matrix("metric", m),
            MetricSpec::Gauge(h) => put_matrix("gauge_h", h),
            MetricSpec::Pullback => {}
        }
        if let ConnectionSpec::Omega(rows) = &self.connection {
            put_matrix("connection.omega", rows);
        }
        if let Some(d) = &self.diffeomorphism {
            for (i, e) in d.forward.iter().enumerate() {
                out.insert(format!("diffeomorphism.forward[{i}]"), e.to_string());
            }
            for (i, e) in d.inverse.iter().enumerate() {
                out.insert(format!("diffeomorphism.inverse[{i}]"), e.to_string());
            }
        }
        if let Some(e) = &self.expected_ricci_scalar {
            out.insert("expected_ricci_scalar".into(), e.to_string());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SPHERE: &str = r#"{
        "name": "sphere", "dim": 2,
        "metric": [["1", "0"], ["0", "sin(x1)^2"]],
        "samples": {"min": [0.3, -1.0], "max": [2.8, 1.0]}
    }"#;

    #[test]
    fn loads_sphere_with_defaults() {
        let s = Scenario::from_json(SPHERE).unwrap();
        assert_eq!(s.dim, 2);
        assert!(matches!(s.connection, ConnectionSpec::LeviCivita));
        assert_eq!(s.sample_points(42, None).len(), DEFAULT_SAMPLES);
        assert!(s.selected_checks().contains(&Check::Bianchi));
        assert!(!s.selected_checks().contains(&Check::GaugeScalar));
        for p in s.sample_points(42, None) {
            assert!(p[0] >= 0.3 + 0.125 - 1e-12 && p[0] <= 2.8 - 0.125 + 1e-12);
        }
        assert_eq!(s.sample_points(42, None), s.sample_points(42, None));
        assert_ne!(s.sample_points(42, None), s.sample_points(7, None));
    }

    #[test]
    fn rejects_asymmetric_metric() {
        let err =
            Scenario::from_json(r#"{"name": "a", "dim": 2, "metric": [["1", "x1"], ["0", "1"]]}"#)
                .unwrap_err();
        assert!(err.to_string().contains("asymmetric"), "{err}");
    }

    #[test]
    fn rejects_conflicting_or_unknown_fields() {
        let both = r#"{"name": "a", "dim": 2, "metric": [["1","0"],["0","1"]], "gauge_h": [["1","0"],["0","1"]]}"#;
        assert!(Scenario::from_json(both)
            .unwrap_err()
            .to_string()
            .contains("mutually exclusive"));
        let check =
            r#"{"name": "a", "dim": 2, "metric": [["1","0"],["0","1"]], "checks": ["bogus"]}"#;
        assert!(Scenario::from_json(check)
            .unwrap_err()
            .to_string()
            .contains("unknown check"));
        let coord = r#"{"name": "a", "dim": 2, "metric": [["1","0"],["0","x3"]]}"#;
        let err = Scenario::from_json(coord).unwrap_err();
        assert!(matches!(err, ConfigError::Expression { .. }), "{err}");
        assert!(err.to_string().contains("metric[1][1]"));
    }

    #[test]
    fn empty_checks_run_default_suite() {
        let s = Scenario::from_json(
            r#"{"name": "f", "dim": 2, "metric": [["1","0"],["0","1"]], "checks": []}"#,
        )
        .unwrap();
        assert_eq!(s.selected_checks(), Check::defaults(&s.capabilities()));
    }
}

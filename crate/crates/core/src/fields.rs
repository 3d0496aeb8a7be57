//! Fields on the canonical space and the directional-derivative engine.
//!
//! Every field evaluates on points whose coordinates are [`Jet`]s. In AD mode
//! a directional derivative perturbs the point along a fresh jet channel and
//! reads that channel back out; nesting derivatives opens further channels.
//! In FD mode points stay real and derivatives are central differences.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{Multivector, Signature};
use crate::error::{Error, Result};
use crate::extensor::{Extensor11, Extensor12};
use crate::jet::{Jet, MAX_CHANNELS};
use crate::scalar::Scalar;

pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Values a field can take: containers of jets that support channel
/// extraction and the linear combinations finite differences need.
pub trait FieldValue: Clone + Send + Sync + 'static {
    /// The same container over plain reals.
    type Real: Clone + Send + Sync + 'static;

    fn lift(real: &Self::Real) -> Self;
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self;
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self;
}

impl FieldValue for Jet {
    type Real = f64;
    fn lift(real: &f64) -> Self {
        Jet::constant(*real)
    }
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self {
        f(*self)
    }
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self {
        f(*self, *other)
    }
}

impl<T: FieldValue> FieldValue for Vec<T> {
    type Real = Vec<T::Real>;
    fn lift(real: &Vec<T::Real>) -> Self {
        real.iter().map(T::lift).collect()
    }
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self {
        self.iter().map(|v| v.map_jets(f)).collect()
    }
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self {
        self.iter()
            .zip(other)
            .map(|(a, b)| a.zip_jets(b, f))
            .collect()
    }
}

impl FieldValue for Multivector<Jet> {
    type Real = Multivector<f64>;
    fn lift(real: &Multivector<f64>) -> Self {
        real.lift()
    }
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self {
        self.map(f)
    }
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self {
        self.zip_with(other, f)
    }
}

impl FieldValue for Extensor11<Jet> {
    type Real = Extensor11<f64>;
    fn lift(real: &Extensor11<f64>) -> Self {
        real.lift()
    }
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self {
        self.map(|&v| f(v))
    }
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self {
        Extensor11::from_fn(self.dim(), |i, j| f(self.get(i, j), other.get(i, j)))
    }
}

impl FieldValue for Extensor12<Jet> {
    type Real = Extensor12<f64>;
    fn lift(real: &Extensor12<f64>) -> Self {
        Extensor12::from_images(real.images().iter().map(|m| m.lift()).collect())
    }
    fn map_jets(&self, f: &dyn Fn(Jet) -> Jet) -> Self {
        Extensor12::from_images(self.images().iter().map(|m| m.map(f)).collect())
    }
    fn zip_jets(&self, other: &Self, f: &dyn Fn(Jet, Jet) -> Jet) -> Self {
        Extensor12::from_images(
            self.images()
                .iter()
                .zip(other.images())
                .map(|(a, b)| a.zip_with(b, f))
                .collect(),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differentiability {
    Ad,
    FdOnly,
}

type EvalFn<T> = dyn Fn(&[Jet]) -> Result<T> + Send + Sync;

/// A pure map from points of `ℝⁿ` to values of type `T`.
pub struct Field<T> {
    dim: usize,
    eval: Arc<EvalFn<T>>,
    differentiability: Differentiability,
}

impl<T> Clone for Field<T> {
    fn clone(&self) -> Self {
        Field {
            dim: self.dim,
            eval: Arc::clone(&self.eval),
            differentiability: self.differentiability,
        }
    }
}

impl<T> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("dim", &self.dim)
            .field("differentiability", &self.differentiability)
            .finish_non_exhaustive()
    }
}

pub type ScalarField = Field<Jet>;
pub type VectorField = Field<Vec<Jet>>;
pub type MvField = Field<Multivector<Jet>>;
pub type Extensor11Field = Field<Extensor11<Jet>>;
pub type Extensor12Field = Field<Extensor12<Jet>>;

impl<T: FieldValue> Field<T> {
    /// AD-capable field. `f` must be built from [`Scalar`] operations only.
    pub fn new(dim: usize, f: impl Fn(&[Jet]) -> Result<T> + Send + Sync + 'static) -> Self {
        Field {
            dim,
            eval: Arc::new(f),
            differentiability: Differentiability::Ad,
        }
    }

    /// Field that can only be evaluated at real points.
    pub fn fd_only(
        dim: usize,
        f: impl Fn(&[f64]) -> Result<T::Real> + Send + Sync + 'static,
    ) -> Self {
        Field {
            dim,
            eval: Arc::new(move |x: &[Jet]| {
                if x.iter().any(|c| c.depth() > 0) {
                    return Err(Error::AdOnFdOnlyField);
                }
                let real: Vec<f64> = x.iter().map(|c| c.value()).collect();
                Ok(T::lift(&f(&real)?))
            }),
            differentiability: Differentiability::FdOnly,
        }
    }

    pub fn constant(dim: usize, v: T) -> Self {
        Self::new(dim, move |_| Ok(v.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn differentiability(&self) -> Differentiability {
        self.differentiability
    }

    pub fn eval(&self, x: &[Jet]) -> Result<T> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        (self.eval)(x)
    }

    pub fn eval_real(&self, x: &[f64]) -> Result<T> {
        self.eval(&lift_point(x))
    }

    /// Pointwise transform of the field's values.
    pub fn map<U: FieldValue>(
        &self,
        f: impl Fn(T) -> Result<U> + Send + Sync + 'static,
    ) -> Field<U> {
        let this = self.clone();
        Field {
            dim: self.dim,
            eval: Arc::new(move |x: &[Jet]| f(this.eval(x)?)),
            differentiability: self.differentiability,
        }
    }
}

impl Field<Vec<Jet>> {
    pub fn constant_vector(v: &[f64]) -> Self {
        Self::constant(v.len(), lift_point(v))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Self::constant_vector(&v)
    }
}

pub fn lift_point(x: &[f64]) -> Vec<Jet> {
    x.iter().map(|&v| Jet::constant(v)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    Ad,
    Fd,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivativeConfig {
    pub mode: DerivativeMode,
    pub fd_step: f64,
    pub tolerance: f64,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        DerivativeConfig {
            mode: DerivativeMode::Ad,
            fd_step: DEFAULT_FD_STEP,
            tolerance: 1e-8,
        }
    }
}

impl DerivativeConfig {
    pub fn ad() -> Self {
        Self::default()
    }

    pub fn fd(step: f64) -> Self {
        DerivativeConfig {
            mode: DerivativeMode::Fd,
            fd_step: step,
            ..Self::default()
        }
    }
}

fn point_depth(x: &[Jet]) -> usize {
    x.iter().map(|c| c.depth()).max().unwrap_or(0)
}

/// `(a·∂F)(x)` for a vector value `a` at `x`, with `F` given pointwise.
pub fn derivative_at<T: FieldValue>(
    cfg: &DerivativeConfig,
    x: &[Jet],
    a: &[Jet],
    f: impl Fn(&[Jet]) -> Result<T>,
) -> Result<T> {
    if a.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: a.len(),
        });
    }
    match cfg.mode {
        DerivativeMode::Ad => {
            let ch = point_depth(x).max(point_depth(a));
            if ch >= MAX_CHANNELS {
                return Err(Error::NestingTooDeep);
            }
            let eps = Jet::epsilon(ch);
            let shifted: Vec<Jet> = x.iter().zip(a).map(|(&xi, &ai)| xi + ai * eps).collect();
            Ok(f(&shifted)?.map_jets(&|j| j.derivative(ch)))
        }
        DerivativeMode::Fd => {
            let h = cfg.fd_step;
            if h.is_nan() || h <= 0.0 {
                return Err(Error::FdStepUnderflow {
                    step: h,
                    coord: 0.0,
                });
            }
            let step = Jet::constant(h);
            let mut plus = Vec::with_capacity(x.len());
            let mut minus = Vec::with_capacity(x.len());
            for (&xi, &ai) in x.iter().zip(a) {
                let p = xi + ai * step;
                let m = xi - ai * step;
                if ai.value() != 0.0 && (p.value() == xi.value() || m.value() == xi.value()) {
                    return Err(Error::FdStepUnderflow {
                        step: h,
                        coord: xi.value(),
                    });
                }
                plus.push(p);
                minus.push(m);
            }
            let fp = f(&plus)?;
            let fm = f(&minus)?;
            let inv = 0.5 / h;
            Ok(fp.zip_jets(&fm, &|p, m| (p - m).scale(inv)))
        }
    }
}

/// `a·∂F` as a field.
pub fn directional_derivative<T: FieldValue>(
    a: &VectorField,
    f: &Field<T>,
    cfg: &DerivativeConfig,
) -> Field<T> {
    let a = a.clone();
    let inner = f.clone();
    let cfg = *cfg;
    let differentiability = match (a.differentiability, f.differentiability, cfg.mode) {
        (Differentiability::Ad, Differentiability::Ad, DerivativeMode::Ad) => Differentiability::Ad,
        _ => Differentiability::FdOnly,
    };
    Field {
        dim: f.dim,
        eval: Arc::new(move |x: &[Jet]| {
            let av = a.eval(x)?;
            derivative_at(&cfg, x, &av, |y| inner.eval(y))
        }),
        differentiability,
    }
}

/// `[a,b] = a·∂b − b·∂a`
pub fn field_commutator(a: &VectorField, b: &VectorField, cfg: &DerivativeConfig) -> VectorField {
    let ab = directional_derivative(a, b, cfg);
    let ba = directional_derivative(b, a, cfg);
    let differentiability = ab.differentiability;
    Field {
        dim: a.dim,
        eval: Arc::new(move |x: &[Jet]| {
            let p = ab.eval(x)?;
            let q = ba.eval(x)?;
            Ok(p.iter().zip(&q).map(|(&u, &v)| u - v).collect())
        }),
        differentiability,
    }
}

/// `[a,b](x)` pointwise, without building intermediate fields.
pub fn commutator_at(
    cfg: &DerivativeConfig,
    x: &[Jet],
    a: &VectorField,
    b: &VectorField,
) -> Result<Vec<Jet>> {
    let av = a.eval(x)?;
    let bv = b.eval(x)?;
    let ab = derivative_at(cfg, x, &av, |y| b.eval(y))?;
    let ba = derivative_at(cfg, x, &bv, |y| a.eval(y))?;
    Ok(ab.iter().zip(&ba).map(|(&u, &v)| u - v).collect())
}

/// The pointwise metric, given either as a Gram matrix field or through a
/// gauge factor `h` with `g = h†∘η∘h`.
#[derive(Clone, Debug)]
pub enum MetricSource {
    Gram(Extensor11Field),
    Gauge(Extensor11Field),
}

#[derive(Clone, Debug)]
pub struct MetricField {
    pub source: MetricSource,
    pub signature: Signature,
}

impl MetricField {
    pub fn from_gram(gram: Extensor11Field, signature: Signature) -> Self {
        MetricField {
            source: MetricSource::Gram(gram),
            signature,
        }
    }

    pub fn from_gauge(gauge: Extensor11Field, signature: Signature) -> Self {
        MetricField {
            source: MetricSource::Gauge(gauge),
            signature,
        }
    }

    pub fn constant(gram: &Extensor11<f64>, signature: Signature) -> Self {
        Self::from_gram(Field::constant(gram.dim(), gram.lift()), signature)
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::constant(&Extensor11::identity(dim), Signature::euclidean(dim))
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    pub fn differentiability(&self) -> Differentiability {
        match &self.source {
            MetricSource::Gram(f) | MetricSource::Gauge(f) => f.differentiability(),
        }
    }

    pub fn gram_at(&self, x: &[Jet]) -> Result<Extensor11<Jet>> {
        match &self.source {
            MetricSource::Gram(g) => g.eval(x),
            MetricSource::Gauge(h) => {
                let h = h.eval(x)?;
                let eta = self.signature.eta::<Jet>();
                Ok(h.adjoint().compose(&eta).compose(&h))
            }
        }
    }

    /// The gauge factor: explicit when given, otherwise by spectral
    /// decomposition of the Gram matrix.
    pub fn gauge_at(&self, x: &[Jet]) -> Result<Extensor11<Jet>> {
        match &self.source {
            MetricSource::Gauge(h) => h.eval(x),
            MetricSource::Gram(g) => crate::extensor::gauge_decompose(&g.eval(x)?, self.signature),
        }
    }

    pub fn gram_field(&self) -> Extensor11Field {
        let this = self.clone();
        Field {
            dim: self.dim(),
            eval: Arc::new(move |x: &[Jet]| this.gram_at(x)),
            differentiability: self.differentiability(),
        }
    }
}

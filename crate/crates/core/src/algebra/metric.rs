use super::{Multivector, Signature};
use crate::error::{Error, Result};
use crate::extensor::{Extensor11, MetricExtensor, Outermorphism};
use crate::scalar::Scalar;

/// Which grade-lowering pairing to take in the metric `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pairing {
    /// `X·_g Y = g̲(X)·Y`, returned as a scalar multivector.
    Scalar,
    /// `X⌟_g Y = g̲(X)⌟Y`
    Left,
    /// `X⌞_g Y = X⌞g̲(Y)`
    Right,
}

/// Pointwise Gram matrix with cached outermorphisms of `g` and `g⁻¹`.
/// Everything here depends on `g` alone, never on a gauge factor, so it
/// stays smooth where eigenvectors of `g` are not.
#[derive(Clone, Debug)]
pub struct GramContext<S: Scalar = f64> {
    gram: Extensor11<S>,
    gram_inv: Extensor11<S>,
    g: Outermorphism<S>,
    g_inv: Outermorphism<S>,
}

impl<S: Scalar> GramContext<S> {
    pub fn new(gram: Extensor11<S>) -> Result<Self> {
        let asym = gram.max_asymmetry();
        if asym > 1e-12 * gram.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let gram_inv = gram.inverse()?;
        Ok(GramContext {
            g: Outermorphism::new(&gram),
            g_inv: Outermorphism::new(&gram_inv),
            gram,
            gram_inv,
        })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Extensor11::identity(dim)).expect("identity is invertible")
    }

    /// Context for `g⁻¹`.
    pub fn inverse(&self) -> Self {
        GramContext {
            gram: self.gram_inv.clone(),
            gram_inv: self.gram.clone(),
            g: self.g_inv.clone(),
            g_inv: self.g.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gram.dim()
    }

    pub fn gram(&self) -> &Extensor11<S> {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Extensor11<S> {
        &self.gram_inv
    }

    pub(crate) fn check(&self, x: &Multivector<S>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `g̲(X)`
    pub fn lower(&self, x: &Multivector<S>) -> Multivector<S> {
        self.g.apply(x)
    }

    /// `g̲⁻¹(X)`
    pub fn raise(&self, x: &Multivector<S>) -> Multivector<S> {
        self.g_inv.apply(x)
    }

    pub fn pairing(&self, kind: Pairing, x: &Multivector<S>, y: &Multivector<S>) -> Multivector<S> {
        match kind {
            Pairing::Scalar => Multivector::scalar(x.dim(), self.g.apply(x).scalar_product(y)),
            Pairing::Left => self.g.apply(x).left_contract(y),
            Pairing::Right => x.right_contract(&self.g.apply(y)),
        }
    }

    /// `X·_g Y` as a scalar.
    pub fn dot(&self, x: &Multivector<S>, y: &Multivector<S>) -> S {
        self.g.apply(x).scalar_product(y)
    }

    /// `B ×_g X` for a bivector `B`: the derivation extension of
    /// `v ↦ B⌞g(v)`.
    pub fn bivector_commutator(&self, b: &Multivector<S>, x: &Multivector<S>) -> Multivector<S> {
        self.bivector_action(b).derivation(x)
    }

    /// Matrix of `v ↦ B ×_g v = B⌞g(v)`.
    pub fn bivector_action(&self, b: &Multivector<S>) -> Extensor11<S> {
        let n = self.dim();
        let b = b.grade(2);
        let cols: Vec<Vec<S>> = (0..n)
            .map(|j| {
                b.right_contract(&Multivector::vector(&self.gram.image(j)))
                    .vector_part()
            })
            .collect();
        Extensor11::from_images(&cols)
    }
}

/// Pointwise metric with its gauge factor; products go through the
/// deformation `X ∘_g Y = h̲⁻¹(h̲(X) ∘_η h̲(Y))`.
#[derive(Clone, Debug)]
pub struct MetricContext<S: Scalar = f64> {
    metric: MetricExtensor<S>,
    gram: GramContext<S>,
    squares: Vec<f64>,
    h: Outermorphism<S>,
    h_inv: Outermorphism<S>,
}

impl<S: Scalar> MetricContext<S> {
    pub fn new(metric: MetricExtensor<S>) -> Result<Self> {
        let residual = metric.reconstruction_residual();
        let tolerance = 1e-10 * metric.gram().max_abs().max(1.0);
        if residual > tolerance {
            return Err(Error::CheckFailed {
                what: "gauge reconstruction h†ηh = g",
                residual,
                tolerance,
            });
        }
        let h_inv = metric.gauge().inverse()?;
        Ok(MetricContext {
            gram: GramContext::new(metric.gram().clone())?,
            squares: metric.signature().squares(),
            h: Outermorphism::new(metric.gauge()),
            h_inv: Outermorphism::new(&h_inv),
            metric,
        })
    }

    pub fn from_gram(gram: Extensor11<S>, signature: Signature) -> Result<Self> {
        Self::new(MetricExtensor::from_gram(gram, signature)?)
    }

    pub fn from_gauge(gauge: Extensor11<S>, signature: Signature) -> Result<Self> {
        Self::new(MetricExtensor::from_gauge(gauge, signature)?)
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::orthogonal(Signature::euclidean(dim))
    }

    /// The orthogonal metric `η` itself, with gauge `h = 1`.
    pub fn orthogonal(signature: Signature) -> Self {
        Self::from_gauge(Extensor11::identity(signature.dim()), signature)
            .expect("orthogonal metric is valid")
    }

    /// Context for `g⁻¹`, whose gauge factor is `h* = (h†)⁻¹`.
    pub fn inverse_metric(&self) -> Result<Self> {
        Self::from_gauge(self.metric.gauge().star()?, self.metric.signature())
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricExtensor<S> {
        &self.metric
    }

    pub fn gram_context(&self) -> &GramContext<S> {
        &self.gram
    }

    pub fn gram(&self) -> &Extensor11<S> {
        self.metric.gram()
    }

    pub fn gram_inverse(&self) -> &Extensor11<S> {
        self.gram.gram_inverse()
    }

    pub fn gauge(&self) -> &Extensor11<S> {
        self.metric.gauge()
    }

    pub fn signature(&self) -> Signature {
        self.metric.signature()
    }

    pub(crate) fn check(&self, x: &Multivector<S>) -> Result<()> {
        self.gram.check(x)
    }

    pub fn lower(&self, x: &Multivector<S>) -> Multivector<S> {
        self.gram.lower(x)
    }

    pub fn raise(&self, x: &Multivector<S>) -> Multivector<S> {
        self.gram.raise(x)
    }

    /// `h̲(X)`
    pub fn to_orthogonal(&self, x: &Multivector<S>) -> Multivector<S> {
        self.h.apply(x)
    }

    /// `h̲⁻¹(X)`
    pub fn from_orthogonal(&self, x: &Multivector<S>) -> Multivector<S> {
        self.h_inv.apply(x)
    }

    /// `X ∘_g Y = h̲⁻¹(h̲(X) ∘_η h̲(Y))`
    pub fn product(&self, x: &Multivector<S>, y: &Multivector<S>) -> Multivector<S> {
        let hx = self.h.apply(x);
        let hy = self.h.apply(y);
        self.h_inv.apply(&hx.diagonal_product(&hy, &self.squares))
    }

    pub fn pairing(&self, kind: Pairing, x: &Multivector<S>, y: &Multivector<S>) -> Multivector<S> {
        self.gram.pairing(kind, x, y)
    }

    pub fn dot(&self, x: &Multivector<S>, y: &Multivector<S>) -> S {
        self.gram.dot(x, y)
    }

    /// `A ×_g X = ½(A∘_g X − X∘_g A)`
    pub fn commutator(&self, a: &Multivector<S>, x: &Multivector<S>) -> Multivector<S> {
        let ha = self.h.apply(a);
        let hx = self.h.apply(x);
        let c = ha.diagonal_product(&hx, &self.squares) - hx.diagonal_product(&ha, &self.squares);
        self.h_inv.apply(&c.scaled(S::from_f64(0.5)))
    }
}

/// Geometric product for an arbitrary symmetric Gram matrix, built
/// directly from `a∘X = g(a)⌟X + a∧X` and extended to blades recursively.
/// Independent of any gauge factor.
pub fn gram_product<S: Scalar>(
    gram: &Extensor11<S>,
    x: &Multivector<S>,
    y: &Multivector<S>,
) -> Multivector<S> {
    let mut out = Multivector::zero(x.dim());
    for (mask, c) in x.terms() {
        out += &blade_times(gram, mask, y).scaled(c);
    }
    out
}

fn vector_times<S: Scalar>(gram: &Extensor11<S>, i: usize, y: &Multivector<S>) -> Multivector<S> {
    let n = y.dim();
    let e = Multivector::basis(n, i);
    let ge = Multivector::vector(&gram.image(i));
    ge.left_contract(y) + e.wedge(y)
}

// e_I = eᵢ∘e_{I'} − g(eᵢ)⌟e_{I'} with i the lowest index of I.
fn blade_times<S: Scalar>(gram: &Extensor11<S>, mask: usize, y: &Multivector<S>) -> Multivector<S> {
    if mask == 0 {
        return y.clone();
    }
    let n = y.dim();
    let i = mask.trailing_zeros() as usize;
    let rest = mask & (mask - 1);
    let mut out = vector_times(gram, i, &blade_times(gram, rest, y));
    let ge = Multivector::vector(&gram.image(i));
    let lower = ge.left_contract(&Multivector::blade(n, rest, S::one()));
    for (m, c) in lower.terms() {
        out -= &blade_times(gram, m, y).scaled(c);
    }
    out
}

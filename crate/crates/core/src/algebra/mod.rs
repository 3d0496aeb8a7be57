//! Multivector arithmetic, signature and general-metric Clifford products,
//! and algebraic frame sums.

mod frame;
mod metric;
mod multivector;

pub use frame::{frame_derivative, frame_wedge_pair, FrameMode};
pub use metric::{gram_product, GramContext, MetricContext, Pairing};
pub use multivector::{blade_name, grade_of, reorder_sign, reverse_sign, Multivector, MAX_DIM};

use crate::error::{Error, Result};
use crate::extensor::Extensor11;
use crate::scalar::Scalar;

/// Orthogonal metric `η = diag(+1×p, −1×q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Self {
        Signature { p, q }
    }

    pub fn euclidean(n: usize) -> Self {
        Signature { p: n, q: 0 }
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }

    /// `ηᵢᵢ` for each frame vector.
    pub fn squares(&self) -> Vec<f64> {
        let mut s = vec![1.0; self.p];
        s.resize(self.dim(), -1.0);
        s
    }

    pub fn eta<S: Scalar>(&self) -> Extensor11<S> {
        Extensor11::diagonal(
            &self
                .squares()
                .into_iter()
                .map(S::from_f64)
                .collect::<Vec<_>>(),
        )
    }

    fn check(&self, x: &Multivector<impl Scalar>) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.dim(),
            });
        }
        Ok(())
    }
}

pub fn try_add<S: Scalar>(x: &Multivector<S>, y: &Multivector<S>) -> Result<Multivector<S>> {
    x.check_same_dim(y)?;
    Ok(x + y)
}

pub fn try_sub<S: Scalar>(x: &Multivector<S>, y: &Multivector<S>) -> Result<Multivector<S>> {
    x.check_same_dim(y)?;
    Ok(x - y)
}

pub fn wedge<S: Scalar>(x: &Multivector<S>, y: &Multivector<S>) -> Result<Multivector<S>> {
    x.check_same_dim(y)?;
    Ok(x.wedge(y))
}

/// Geometric product in the diagonal metric `η` of `sig`.
pub fn signature_product<S: Scalar>(
    sig: Signature,
    x: &Multivector<S>,
    y: &Multivector<S>,
) -> Result<Multivector<S>> {
    sig.check(x)?;
    sig.check(y)?;
    Ok(x.diagonal_product(y, &sig.squares()))
}

pub fn metric_product<S: Scalar>(
    ctx: &MetricContext<S>,
    x: &Multivector<S>,
    y: &Multivector<S>,
) -> Result<Multivector<S>> {
    ctx.check(x)?;
    ctx.check(y)?;
    Ok(ctx.product(x, y))
}

pub fn metric_pairing<S: Scalar>(
    ctx: &MetricContext<S>,
    kind: Pairing,
    x: &Multivector<S>,
    y: &Multivector<S>,
) -> Result<Multivector<S>> {
    ctx.check(x)?;
    ctx.check(y)?;
    Ok(ctx.pairing(kind, x, y))
}

pub fn commutator<S: Scalar>(
    ctx: &MetricContext<S>,
    a: &Multivector<S>,
    x: &Multivector<S>,
) -> Result<Multivector<S>> {
    ctx.check(a)?;
    ctx.check(x)?;
    Ok(ctx.commutator(a, x))
}

//! Geometric structures `(U, γ, g)`: metric-compatible covariant derivative
//! pairs, the Levi-Civita construction, torsion and curvature.
//!
//! A connection is carried pointwise by its matrices `Γₖ`, one per frame
//! direction, with `Γ_a = Σ aₖ Γₖ`. On vectors `D⁺_a v = a·∂v + Γ_a(v)` and
//! on multivectors `D⁺_a` acts as the derivation extension of `Γ_a`.

mod bianchi;
mod curvature;
pub mod identities;

pub use bianchi::{
    bianchi_pattern_search, extensor_cov_derivative, select_bianchi_pattern, BianchiData, Branch,
    SignPattern,
};
pub use curvature::{commutator_check_at, curvature_rho_fields, rho_tensor_at, CurvatureAt};

use crate::algebra::{GramContext, Multivector};
use crate::error::Result;
use crate::extensor::{Extensor11, Extensor12};
use crate::fields::{
    commutator_at, derivative_at, DerivativeConfig, Extensor12Field, Field, MetricField,
    VectorField,
};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Field of connection matrices `[Γ₁, …, Γₙ]`.
pub type GammaField = Field<Vec<Extensor11<Jet>>>;

/// `Σₖ aₖ Γₖ`
pub fn contract_gammas(gammas: &[Extensor11<Jet>], a: &[Jet]) -> Extensor11<Jet> {
    let n = gammas.len();
    let mut out = Extensor11::zero(n);
    for (g, &ak) in gammas.iter().zip(a) {
        if ak.magnitude() != 0.0 {
            out = out.add(&g.scaled(ak));
        }
    }
    out
}

/// Pair of directional covariant derivative operators `(D⁺, D⁻)`.
#[derive(Clone, Debug)]
pub struct DcdoPair {
    dim: usize,
    plus: GammaField,
    minus: GammaField,
    cfg: DerivativeConfig,
}

impl DcdoPair {
    pub fn new(plus: GammaField, minus: GammaField, cfg: DerivativeConfig) -> Self {
        DcdoPair {
            dim: plus.dim(),
            plus,
            minus,
            cfg,
        }
    }

    /// Pair whose `D⁻` acts on vectors by `−Γ_a†`, the operator dual to
    /// `D⁺` under the Euclidean pairing.
    pub fn from_plus(plus: GammaField, cfg: DerivativeConfig) -> Self {
        let p = plus.clone();
        let minus = Field::new(plus.dim(), move |x: &[Jet]| {
            Ok(p.eval(x)?
                .iter()
                .map(|g| g.adjoint().scaled(-Jet::one()))
                .collect())
        });
        Self::new(plus, minus, cfg)
    }

    /// `D^± = a·∂`
    pub fn flat(dim: usize, cfg: DerivativeConfig) -> Self {
        let zero = Field::constant(dim, vec![Extensor11::zero(dim); dim]);
        Self::new(zero.clone(), zero, cfg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cfg(&self) -> &DerivativeConfig {
        &self.cfg
    }

    pub fn plus_field(&self) -> &GammaField {
        &self.plus
    }

    pub fn minus_field(&self) -> &GammaField {
        &self.minus
    }

    pub fn plus_gammas(&self, x: &[Jet]) -> Result<Vec<Extensor11<Jet>>> {
        self.plus.eval(x)
    }

    pub fn minus_gammas(&self, x: &[Jet]) -> Result<Vec<Extensor11<Jet>>> {
        self.minus.eval(x)
    }

    fn apply_at(
        &self,
        gammas: &GammaField,
        x: &[Jet],
        a: &[Jet],
        field: &dyn Fn(&[Jet]) -> Result<Multivector<Jet>>,
    ) -> Result<Multivector<Jet>> {
        let d = derivative_at(&self.cfg, x, a, field)?;
        let gamma = contract_gammas(&gammas.eval(x)?, a);
        Ok(d + gamma.derivation(&field(x)?))
    }

    /// `(D⁺_a X)(x)` for the vector value `a` at `x` and `X` given pointwise.
    pub fn plus_at(
        &self,
        x: &[Jet],
        a: &[Jet],
        field: &dyn Fn(&[Jet]) -> Result<Multivector<Jet>>,
    ) -> Result<Multivector<Jet>> {
        self.apply_at(&self.plus, x, a, field)
    }

    pub fn minus_at(
        &self,
        x: &[Jet],
        a: &[Jet],
        field: &dyn Fn(&[Jet]) -> Result<Multivector<Jet>>,
    ) -> Result<Multivector<Jet>> {
        self.apply_at(&self.minus, x, a, field)
    }

    /// `(D⁺_a v)(x)` for a vector field given pointwise.
    pub fn plus_vector_at(
        &self,
        x: &[Jet],
        a: &[Jet],
        v: &dyn Fn(&[Jet]) -> Result<Vec<Jet>>,
    ) -> Result<Vec<Jet>> {
        let d = derivative_at(&self.cfg, x, a, v)?;
        let gamma = contract_gammas(&self.plus.eval(x)?, a);
        let gv = gamma.apply_vec(&v(x)?);
        Ok(d.iter().zip(&gv).map(|(&p, &q)| p + q).collect())
    }

    /// `D⁺_a X` as a field.
    pub fn plus(&self, a: &VectorField, x: &Field<Multivector<Jet>>) -> Field<Multivector<Jet>> {
        let (this, a, f) = (self.clone(), a.clone(), x.clone());
        Field::new(self.dim, move |p: &[Jet]| {
            this.plus_at(p, &a.eval(p)?, &|y| f.eval(y))
        })
    }

    /// `D⁻_a X` as a field.
    pub fn minus(&self, a: &VectorField, x: &Field<Multivector<Jet>>) -> Field<Multivector<Jet>> {
        let (this, a, f) = (self.clone(), a.clone(), x.clone());
        Field::new(self.dim, move |p: &[Jet]| {
            this.minus_at(p, &a.eval(p)?, &|y| f.eval(y))
        })
    }

    /// `D⁺_a v` for vector fields.
    pub fn plus_vector(&self, a: &VectorField, v: &VectorField) -> VectorField {
        let (this, a, v) = (self.clone(), a.clone(), v.clone());
        Field::new(self.dim, move |p: &[Jet]| {
            this.plus_vector_at(p, &a.eval(p)?, &|y| v.eval(y))
        })
    }

    /// Torsion `T(a,b) = D⁺_a b − D⁺_b a − [a,b]` at `x`.
    pub fn torsion_at(&self, x: &[Jet], a: &VectorField, b: &VectorField) -> Result<Vec<Jet>> {
        let dab = self.plus_vector_at(x, &a.eval(x)?, &|y| b.eval(y))?;
        let dba = self.plus_vector_at(x, &b.eval(x)?, &|y| a.eval(y))?;
        let c = commutator_at(&self.cfg, x, a, b)?;
        Ok((0..self.dim).map(|i| dab[i] - dba[i] - c[i]).collect())
    }
}

/// Gram matrix and its directional derivatives `∂ₖg` at `x`.
pub fn gram_and_derivatives(
    metric: &MetricField,
    cfg: &DerivativeConfig,
    x: &[Jet],
) -> Result<(Extensor11<Jet>, Vec<Extensor11<Jet>>)> {
    let n = metric.dim();
    let gram = metric.gram_at(x)?;
    let dg = (0..n)
        .map(|k| {
            let mut e = vec![Jet::zero(); n];
            e[k] = Jet::one();
            derivative_at(cfg, x, &e, |y| metric.gram_at(y))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((gram, dg))
}

/// `ω₀(a) = −¼ g̲⁻¹(∂_b∧∂_c) a·((b·∂g)(c) − (c·∂g)(b))` on each frame vector.
pub fn levi_civita_omega(ctx: &GramContext<Jet>, dg: &[Extensor11<Jet>]) -> Extensor12<Jet> {
    let n = ctx.dim();
    let quarter = Jet::constant(-0.25);
    let images = (0..n)
        .map(|k| {
            let pair =
                crate::algebra::frame_wedge_pair(n, |i, j| dg[i].get(k, j) - dg[j].get(k, i));
            ctx.raise(&pair.scaled(quarter))
        })
        .collect();
    Extensor12::from_images(images)
}

/// `Γₖ = ½g⁻¹∘(∂ₖg) + ω(eₖ)×_g`
pub fn metric_gammas(
    ctx: &GramContext<Jet>,
    dg: &[Extensor11<Jet>],
    omega: &Extensor12<Jet>,
) -> Vec<Extensor11<Jet>> {
    let half = Jet::constant(0.5);
    dg.iter()
        .zip(omega.images())
        .map(|(d, w)| {
            ctx.gram_inverse()
                .compose(d)
                .scaled(half)
                .add(&ctx.bivector_action(w))
        })
        .collect()
}

/// The rotation-gauge part `ω` of a metric structure.
#[derive(Clone, Debug)]
pub enum Rotation {
    LeviCivita,
    Omega(Extensor12Field),
}

/// `(U, γ, g)`: a metric field and a covariant derivative pair.
#[derive(Clone, Debug)]
pub struct GeometricStructure {
    metric: MetricField,
    rotation: Option<Rotation>,
    pair: DcdoPair,
}

impl GeometricStructure {
    fn from_rotation(metric: MetricField, rotation: Rotation, cfg: DerivativeConfig) -> Self {
        let (m, r) = (metric.clone(), rotation.clone());
        let plus = Field::new(metric.dim(), move |x: &[Jet]| {
            let (gram, dg) = gram_and_derivatives(&m, &cfg, x)?;
            let ctx = GramContext::new(gram)?;
            let omega = match &r {
                Rotation::LeviCivita => levi_civita_omega(&ctx, &dg),
                Rotation::Omega(w) => w.eval(x)?,
            };
            Ok(metric_gammas(&ctx, &dg, &omega))
        });
        GeometricStructure {
            metric,
            rotation: Some(rotation),
            pair: DcdoPair::from_plus(plus, cfg),
        }
    }

    pub fn levi_civita(metric: MetricField, cfg: DerivativeConfig) -> Self {
        Self::from_rotation(metric, Rotation::LeviCivita, cfg)
    }

    pub fn with_omega(metric: MetricField, omega: Extensor12Field, cfg: DerivativeConfig) -> Self {
        Self::from_rotation(metric, Rotation::Omega(omega), cfg)
    }

    /// Structure with an explicitly supplied pair, e.g. a deformation image.
    pub fn from_pair(metric: MetricField, pair: DcdoPair) -> Self {
        GeometricStructure {
            metric,
            rotation: None,
            pair,
        }
    }

    /// Adds `Pₖ` to every `Γₖ` of `D⁺`, rebuilding `D⁻` from the result.
    /// Used to inject faults the compatibility check must catch.
    pub fn perturbed(self, perturbation: GammaField) -> Self {
        let base = self.pair.plus.clone();
        let plus = Field::new(self.dim(), move |x: &[Jet]| {
            let g = base.eval(x)?;
            let p = perturbation.eval(x)?;
            Ok(g.iter().zip(&p).map(|(a, b)| a.add(b)).collect())
        });
        GeometricStructure {
            pair: DcdoPair::from_plus(plus, self.pair.cfg),
            ..self
        }
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn rotation(&self) -> Option<&Rotation> {
        self.rotation.as_ref()
    }

    pub fn pair(&self) -> &DcdoPair {
        &self.pair
    }

    pub fn cfg(&self) -> &DerivativeConfig {
        &self.pair.cfg
    }

    pub fn gram_context_at(&self, x: &[Jet]) -> Result<GramContext<Jet>> {
        GramContext::new(self.metric.gram_at(x)?)
    }

    /// `ω` at `x`; `None` for structures built from a bare pair.
    pub fn omega_at(&self, x: &[Jet]) -> Result<Option<Extensor12<Jet>>> {
        match &self.rotation {
            None => Ok(None),
            Some(Rotation::Omega(w)) => Ok(Some(w.eval(x)?)),
            Some(Rotation::LeviCivita) => {
                let (gram, dg) = gram_and_derivatives(&self.metric, self.cfg(), x)?;
                Ok(Some(levi_civita_omega(&GramContext::new(gram)?, &dg)))
            }
        }
    }

    /// `‖D⁻_a(g(v)) − g(D⁺_a v)‖∞` at `x` for constant `a`, `v`.
    pub fn compatibility_residual_at(&self, x: &[Jet], a: &[f64], v: &[f64]) -> Result<f64> {
        let a: Vec<Jet> = a.iter().map(|&c| Jet::constant(c)).collect();
        let v = Multivector::vector(&v.iter().map(|&c| Jet::constant(c)).collect::<Vec<_>>());
        let lowered =
            |y: &[Jet]| -> Result<Multivector<Jet>> { Ok(self.metric.gram_at(y)?.apply(&v)) };
        let lhs = self.pair.minus_at(x, &a, &lowered)?;
        let dv = self.pair.plus_at(x, &a, &|_| Ok(v.clone()))?;
        let rhs = self.metric.gram_at(x)?.apply(&dv);
        Ok((lhs - rhs).max_abs())
    }

    pub fn torsion_at(&self, x: &[Jet], a: &VectorField, b: &VectorField) -> Result<Vec<Jet>> {
        self.pair.torsion_at(x, a, b)
    }

    /// Connection vector `λ(a,b) = D⁺_a b` for constant `a`, `b`.
    pub fn connection_at(&self, x: &[Jet], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
        let a: Vec<Jet> = a.iter().map(|&c| Jet::constant(c)).collect();
        let b: Vec<Jet> = b.iter().map(|&c| Jet::constant(c)).collect();
        let gamma = contract_gammas(&self.pair.plus_gammas(x)?, &a);
        Ok(gamma.apply_vec(&b).iter().map(|j| j.value()).collect())
    }
}

pub fn build_dcdo(structure: &GeometricStructure) -> DcdoPair {
    structure.pair.clone()
}

pub fn levi_civita(metric: MetricField, cfg: DerivativeConfig) -> GeometricStructure {
    GeometricStructure::levi_civita(metric, cfg)
}

//! Gauge deformations between an `η`-structure and a `g`-structure with
//! `g = h†∘η∘h`, the `Ω` connection biform and gauge curvature, deformed
//! torsion, and deformations induced by diffeomorphisms.

use crate::algebra::{MetricContext, Multivector, Signature};
use crate::error::{Error, Result};
use crate::extensor::{Extensor11, Extensor12};
use crate::fields::{
    commutator_at, derivative_at, lift_point, DerivativeConfig, Extensor11Field, Extensor12Field,
    Field, MetricField, VectorField,
};
use crate::geometry::{contract_gammas, DcdoPair, GammaField};
use crate::jet::Jet;
use crate::scalar::Scalar;

/// Tolerance of the `Ω(a) ×_η v = L_a(v)` reconstruction check.
pub const OMEGA_CHECK_TOLERANCE: f64 = 1e-9;

fn frame(n: usize, k: usize) -> Vec<Jet> {
    let mut e = vec![Jet::zero(); n];
    e[k] = Jet::one();
    e
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.value()).collect()
}

/// Gauge field `h` relating `η` to `g = h†∘η∘h`.
#[derive(Clone, Debug)]
pub struct GaugeDeformation {
    h: Extensor11Field,
    signature: Signature,
}

impl GaugeDeformation {
    pub fn new(h: Extensor11Field, signature: Signature) -> Self {
        GaugeDeformation { h, signature }
    }

    pub fn identity(dim: usize, signature: Signature) -> Self {
        Self::new(Field::constant(dim, Extensor11::identity(dim)), signature)
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn h(&self) -> &Extensor11Field {
        &self.h
    }

    pub fn h_at(&self, x: &[Jet]) -> Result<Extensor11<Jet>> {
        self.h.eval(x)
    }

    /// `g = h†∘η∘h`
    pub fn metric(&self) -> MetricField {
        MetricField::from_gauge(self.h.clone(), self.signature)
    }

    pub fn orthogonal_metric(&self) -> MetricField {
        MetricField::constant(&self.signature.eta(), self.signature)
    }

    /// Deformation by `h⁻¹`.
    pub fn inverse(&self) -> GaugeDeformation {
        let h = self.h.clone();
        GaugeDeformation {
            h: Field::new(self.dim(), move |x: &[Jet]| h.eval(x)?.inverse()),
            signature: self.signature,
        }
    }

    /// `‖h(x)[a,b](x) − [h a, h b](x)‖∞`: zero when `h` is a Jacobian up
    /// to the base point shift, nonzero for a non-integrable gauge field.
    pub fn commutator_defect_at(
        &self,
        cfg: &DerivativeConfig,
        x: &[f64],
        a: &VectorField,
        b: &VectorField,
    ) -> Result<Vec<f64>> {
        let p = lift_point(x);
        let hab = self.h_at(&p)?.apply_vec(&commutator_at(cfg, &p, a, b)?);
        let ha = transported(&self.h, a);
        let hb = transported(&self.h, b);
        let c = commutator_at(cfg, &p, &ha, &hb)?;
        Ok(hab.iter().zip(&c).map(|(u, v)| (*u - *v).value()).collect())
    }
}

fn transported(h: &Extensor11Field, a: &VectorField) -> VectorField {
    let (h, a) = (h.clone(), a.clone());
    Field::new(a.dim(), move |y: &[Jet]| {
        Ok(h.eval(y)?.apply_vec(&a.eval(y)?))
    })
}

/// `Γ'ₖ = A Γₖ A⁻¹ + A ∂ₖ(A⁻¹)`: the connection of `X ↦ A̲(D_a A̲⁻¹(X))`.
fn conjugate(
    gammas: &GammaField,
    a: Extensor11Field,
    a_inv: Extensor11Field,
    cfg: DerivativeConfig,
) -> GammaField {
    let gammas = gammas.clone();
    Field::new(gammas.dim(), move |x: &[Jet]| {
        let n = x.len();
        let m = a.eval(x)?;
        let mi = a_inv.eval(x)?;
        let gs = gammas.eval(x)?;
        (0..n)
            .map(|k| {
                let d = derivative_at(&cfg, x, &frame(n, k), |y| a_inv.eval(y))?;
                Ok(m.compose(&gs[k]).compose(&mi).add(&m.compose(&d)))
            })
            .collect()
    })
}

fn map_field(
    f: &Extensor11Field,
    op: fn(&Extensor11<Jet>) -> Result<Extensor11<Jet>>,
) -> Extensor11Field {
    let f = f.clone();
    Field::new(f.dim(), move |x: &[Jet]| op(&f.eval(x)?))
}

/// `ηD⁺_a X = h̲(gD⁺_a h̲⁻¹(X))` and `ηD⁻_a X = h̲*(gD⁻_a h̲†(X))`.
pub fn deform_dcdo(def: &GaugeDeformation, pair: &DcdoPair) -> DcdoPair {
    let cfg = *pair.cfg();
    let h = def.h.clone();
    let h_inv = map_field(&h, |m| m.inverse());
    let h_star = map_field(&h, |m| m.star());
    let h_adj = map_field(&h, |m| Ok(m.adjoint()));
    let plus = conjugate(pair.plus_field(), h, h_inv, cfg);
    let minus = conjugate(pair.minus_field(), h_star, h_adj, cfg);
    DcdoPair::new(plus, minus, cfg)
}

/// The `g`-pair whose `h`-deformation is the given `η`-pair:
/// `gD⁺_a X = h̲⁻¹(ηD⁺_a h̲(X))`, `gD⁻_a X = h̲†(ηD⁻_a h̲*(X))`.
pub fn undeform_dcdo(def: &GaugeDeformation, eta_pair: &DcdoPair) -> DcdoPair {
    deform_dcdo(&def.inverse(), eta_pair)
}

fn omega_candidate(
    pair: &DcdoPair,
    sig: Signature,
    x: &[Jet],
) -> Result<(Vec<Multivector<Jet>>, f64, f64)> {
    let n = pair.dim();
    let gammas = pair.plus_gammas(x)?;
    let squares = sig.squares();
    let half = Jet::constant(-0.5);
    let images: Vec<Multivector<Jet>> = gammas
        .iter()
        .map(|g| {
            let mut acc = Multivector::zero(n);
            for (i, sq) in squares.iter().enumerate() {
                let ei = Multivector::blade(n, 1 << i, Jet::constant(*sq));
                acc += &ei.wedge(&Multivector::vector(&g.image(i)));
            }
            acc.scaled(half)
        })
        .collect();
    let eta = MetricContext::<f64>::orthogonal(sig);
    let mut worst: f64 = 0.0;
    for (g, w) in gammas.iter().zip(&images) {
        let action = eta.gram_context().bivector_action(&w.values());
        worst = worst.max(action.max_abs_diff(&g.values()));
    }
    let scale = gammas.iter().fold(1.0f64, |m, g| m.max(g.max_abs()));
    Ok((images, worst, scale))
}

/// `max ‖Ω(a) ×_η v − Lₐ(v)‖` over frame vectors, for the candidate `Ω`.
pub fn omega_reconstruction_residual_at(pair: &DcdoPair, sig: Signature, x: &[Jet]) -> Result<f64> {
    Ok(omega_candidate(pair, sig, x)?.1)
}

/// `Ω(a) = −½ Σᵢ η(eᵢ) ∧ Lₐ(eᵢ)` with `Lₐ(v) = ηD⁺_a v − a·∂v`, followed by
/// the check `Ω(a) ×_η v = Lₐ(v)` on every frame pair.
pub fn extract_omega_at(pair: &DcdoPair, sig: Signature, x: &[Jet]) -> Result<Extensor12<Jet>> {
    let (images, worst, scale) = omega_candidate(pair, sig, x)?;
    if worst > OMEGA_CHECK_TOLERANCE * scale {
        return Err(Error::CheckFailed {
            what: "Ω(a) ×_η v = L_a(v) (input pair is not η-compatible)",
            residual: worst,
            tolerance: OMEGA_CHECK_TOLERANCE * scale,
        });
    }
    Ok(Extensor12::from_images(images))
}

pub fn extract_omega(pair: &DcdoPair, sig: Signature) -> Extensor12Field {
    let pair = pair.clone();
    Field::new(pair.dim(), move |x: &[Jet]| extract_omega_at(&pair, sig, x))
}

/// The pair `ηD⁺_a X = a·∂X + Ω(a) ×_η X` of a given `Ω`, with
/// `ηD⁻ = η̲ ηD⁺ η̲`.
pub fn omega_pair(omega: &Extensor12Field, sig: Signature, cfg: DerivativeConfig) -> DcdoPair {
    let eta = MetricContext::<Jet>::orthogonal(sig);
    let w = omega.clone();
    let plus = Field::new(omega.dim(), move |x: &[Jet]| {
        Ok(w.eval(x)?
            .images()
            .iter()
            .map(|b| eta.gram_context().bivector_action(b))
            .collect::<Vec<_>>())
    });
    let p = plus.clone();
    let e = sig.eta::<Jet>();
    let minus = Field::new(omega.dim(), move |x: &[Jet]| {
        Ok(p.eval(x)?
            .iter()
            .map(|g| e.compose(g).compose(&e))
            .collect::<Vec<_>>())
    });
    DcdoPair::new(plus, minus, cfg)
}

/// Gauge Riemann field `ℛ` and its contractions at one point.
#[derive(Clone, Debug)]
pub struct GaugeCurvatureAt {
    n: usize,
    frame: Vec<Multivector>,
    h_star: Extensor11,
}

impl GaugeCurvatureAt {
    /// `ℛ(a∧b) = (a·∂Ω)(b) − (b·∂Ω)(a) + Ω(a) ×_η Ω(b)` on frame pairs.
    pub fn compute(
        omega: &Extensor12Field,
        def: &GaugeDeformation,
        cfg: &DerivativeConfig,
        x: &[f64],
    ) -> Result<Self> {
        let n = def.dim();
        let p = lift_point(x);
        let w = omega.eval(&p)?.values();
        let dw = (0..n)
            .map(|k| Ok(derivative_at(cfg, &p, &frame(n, k), |y| omega.eval(y))?.values()))
            .collect::<Result<Vec<Extensor12>>>()?;
        let eta = MetricContext::<f64>::orthogonal(def.signature());
        let mut out = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let r = &dw[a].images()[b] - &dw[b].images()[a];
                out.push(r + eta.commutator(&w.images()[a], &w.images()[b]).grade(2));
            }
        }
        Ok(GaugeCurvatureAt {
            n,
            frame: out,
            h_star: def.h_at(&p)?.values().star()?,
        })
    }

    pub fn riemann_frame(&self, a: usize, b: usize) -> &Multivector {
        &self.frame[a * self.n + b]
    }

    pub fn riemann(&self, bv: &Multivector) -> Multivector {
        let n = self.n;
        let mut out = Multivector::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let c = bv.get((1 << i) | (1 << j));
                if c != 0.0 {
                    out += &self.riemann_frame(i, j).scaled(c);
                }
            }
        }
        out
    }

    /// `ℛ(b) = h*(∂ₐ)⌟ℛ(a∧b)`
    pub fn ricci(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bv = Multivector::vector(b);
        let mut out = Multivector::zero(n);
        for a in 0..n {
            let r = self.riemann(&Multivector::basis(n, a).wedge(&bv));
            out += &Multivector::vector(&self.h_star.image(a)).left_contract(&r);
        }
        out.vector_part()
    }

    /// `h*(∂_b)·ℛ(b)`
    pub fn scalar_from_ricci(&self) -> f64 {
        (0..self.n)
            .map(|b| {
                let mut e = vec![0.0; self.n];
                e[b] = 1.0;
                let r = self.ricci(&e);
                self.h_star
                    .image(b)
                    .iter()
                    .zip(&r)
                    .map(|(u, v)| u * v)
                    .sum::<f64>()
            })
            .sum()
    }

    /// `h̲*(∂ₐ∧∂_b)·ℛ(a∧b)`
    pub fn scalar(&self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    let blade = Multivector::vector(&self.h_star.image(a))
                        .wedge(&Multivector::vector(&self.h_star.image(b)));
                    acc += blade.scalar_product(self.riemann_frame(a, b));
                }
            }
        }
        acc
    }
}

/// Gauge Ricci map and curvature scalar at `x`.
pub fn gauge_ricci_scalar(
    omega: &Extensor12Field,
    def: &GaugeDeformation,
    cfg: &DerivativeConfig,
    x: &[f64],
) -> Result<(Extensor11, f64)> {
    let c = GaugeCurvatureAt::compute(omega, def, cfg, x)?;
    let n = def.dim();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|b| {
            let mut e = vec![0.0; n];
            e[b] = 1.0;
            c.ricci(&e)
        })
        .collect();
    Ok((Extensor11::from_images(&cols), c.scalar()))
}

/// Both sides of `T′(h⁻¹a, h⁻¹b) = h⁻¹(T(a,b)) + h⁻¹([a,b]) − [h⁻¹a, h⁻¹b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionComparison {
    /// Torsion of the deformed pair, evaluated directly.
    pub lhs: Vec<f64>,
    /// The formula's right-hand side.
    pub rhs: Vec<f64>,
}

impl TorsionComparison {
    pub fn residual(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Torsion of the `g`-pair deformed from an `η`-source pair, compared with
/// the closed formula in terms of the source torsion.
pub fn deformed_torsion(
    def: &GaugeDeformation,
    source: &DcdoPair,
    a: &VectorField,
    b: &VectorField,
    x: &[f64],
) -> Result<TorsionComparison> {
    let cfg = *source.cfg();
    let deformed = undeform_dcdo(def, source);
    let p = lift_point(x);
    let h_inv = def.inverse();
    let ia = transported(h_inv.h(), a);
    let ib = transported(h_inv.h(), b);
    let lhs = deformed.torsion_at(&p, &ia, &ib)?;
    let t = source.torsion_at(&p, a, b)?;
    let ab = commutator_at(&cfg, &p, a, b)?;
    let iab = commutator_at(&cfg, &p, &ia, &ib)?;
    let hi = h_inv.h_at(&p)?;
    let z: Vec<Jet> = t.iter().zip(&ab).map(|(&u, &v)| u + v).collect();
    let rhs: Vec<Jet> = hi
        .apply_vec(&z)
        .iter()
        .zip(&iab)
        .map(|(&u, &v)| u - v)
        .collect();
    Ok(TorsionComparison {
        lhs: values(&lhs),
        rhs: values(&rhs),
    })
}

/// A diffeomorphism representative `x ↦ 𝔥(x)` with its explicit inverse.
#[derive(Clone, Debug)]
pub struct Diffeomorphism {
    forward: VectorField,
    inverse: VectorField,
}

impl Diffeomorphism {
    pub fn new(forward: VectorField, inverse: VectorField) -> Self {
        Diffeomorphism { forward, inverse }
    }

    pub fn dim(&self) -> usize {
        self.forward.dim()
    }

    pub fn forward(&self) -> &VectorField {
        &self.forward
    }

    pub fn inverse(&self) -> &VectorField {
        &self.inverse
    }

    /// `‖𝔥(𝔥⁻¹(x)) − x‖∞` and `‖𝔥⁻¹(𝔥(x)) − x‖∞`, the larger.
    pub fn round_trip_residual(&self, x: &[f64]) -> Result<f64> {
        let p = lift_point(x);
        let a = self.forward.eval(&self.inverse.eval(&p)?)?;
        let b = self.inverse.eval(&self.forward.eval(&p)?)?;
        Ok(a.iter()
            .chain(&b)
            .zip(x.iter().chain(x))
            .fold(0.0, |m, (u, v)| m.max((u.value() - v).abs())))
    }

    /// `J(v) = v·∂𝔥` at `x`.
    pub fn jacobian_at(&self, cfg: &DerivativeConfig, x: &[Jet]) -> Result<Extensor11<Jet>> {
        let n = self.dim();
        let cols = (0..n)
            .map(|k| derivative_at(cfg, x, &frame(n, k), |y| self.forward.eval(y)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Extensor11::from_images(&cols))
    }

    pub fn jacobian_field(&self, cfg: DerivativeConfig) -> Extensor11Field {
        let this = self.clone();
        Field::new(self.dim(), move |x: &[Jet]| this.jacobian_at(&cfg, x))
    }

    /// Deformation with `h = J`.
    pub fn gauge(&self, sig: Signature, cfg: DerivativeConfig) -> GaugeDeformation {
        GaugeDeformation::new(self.jacobian_field(cfg), sig)
    }
}

pub fn jacobian_extensor(
    d: &Diffeomorphism,
    cfg: &DerivativeConfig,
    x: &[f64],
) -> Result<Extensor11> {
    Ok(d.jacobian_at(cfg, &lift_point(x))?.values())
}

/// `g = J†∘η∘J`, the pullback of `η` along `𝔥`.
pub fn pullback_metric(d: &Diffeomorphism, sig: Signature, cfg: DerivativeConfig) -> MetricField {
    MetricField::from_gauge(d.jacobian_field(cfg), sig)
}

/// `‖J(x)[a,b](x) − [A,B](𝔥(x))‖∞` where `A(y) = J(𝔥⁻¹y) a(𝔥⁻¹y)` is the
/// pushforward of `a`.
pub fn commutator_preservation(
    d: &Diffeomorphism,
    cfg: &DerivativeConfig,
    a: &VectorField,
    b: &VectorField,
    x: &[f64],
) -> Result<f64> {
    let p = lift_point(x);
    let lhs = d
        .jacobian_at(cfg, &p)?
        .apply_vec(&commutator_at(cfg, &p, a, b)?);
    let push = |v: &VectorField| -> VectorField {
        let (d, v, cfg) = (d.clone(), v.clone(), *cfg);
        Field::new(d.dim(), move |y: &[Jet]| {
            let back = d.inverse.eval(y)?;
            Ok(d.jacobian_at(&cfg, &back)?.apply_vec(&v.eval(&back)?))
        })
    };
    let image = d.forward.eval(&p)?;
    let rhs = commutator_at(cfg, &image, &push(a), &push(b))?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .fold(0.0, |m, (u, v)| m.max((u.value() - v.value()).abs())))
}

/// Connection vector `Γ_a(b)` of a pair at `x` for constant `a`, `b`.
pub fn connection_value(pair: &DcdoPair, x: &[f64], a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let p = lift_point(x);
    let g = contract_gammas(&pair.plus_gammas(&p)?, &lift_point(a));
    Ok(values(&g.apply_vec(&lift_point(b))))
}

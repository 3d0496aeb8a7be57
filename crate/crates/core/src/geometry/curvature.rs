use super::{DcdoPair, GeometricStructure};
use crate::algebra::{frame_wedge_pair, GramContext, Multivector};
use crate::error::Result;
use crate::extensor::Extensor11;
use crate::fields::{commutator_at, derivative_at, lift_point, MvField, VectorField};
use crate::jet::Jet;
use crate::scalar::Scalar;

fn frame(n: usize, k: usize) -> Vec<Jet> {
    let mut e = vec![Jet::zero(); n];
    e[k] = Jet::one();
    e
}

/// Curvature tensor at `x`: entry `a·n + b` is the matrix of
/// `c ↦ ρ(eₐ, e_b, c) = (∂ₐΓ_b − ∂_bΓₐ + [Γₐ, Γ_b])(c)`.
pub fn rho_tensor_at(pair: &DcdoPair, x: &[Jet]) -> Result<Vec<Extensor11<Jet>>> {
    let n = pair.dim();
    let gam = pair.plus_gammas(x)?;
    let dgam = (0..n)
        .map(|k| derivative_at(pair.cfg(), x, &frame(n, k), |y| pair.plus_gammas(y)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let m = dgam[a][b]
                .sub(&dgam[b][a])
                .add(&gam[a].compose(&gam[b]))
                .sub(&gam[b].compose(&gam[a]));
            out.push(m);
        }
    }
    Ok(out)
}

/// `ρ(a,b,c) = [D⁺ₐ, D⁺_b]c − D⁺_{[a,b]}c` for arbitrary vector fields,
/// evaluated from the definition.
pub fn curvature_rho_fields(
    pair: &DcdoPair,
    x: &[Jet],
    a: &VectorField,
    b: &VectorField,
    c: &VectorField,
) -> Result<Vec<Jet>> {
    let second = |u: &VectorField, v: &VectorField| -> Result<Vec<Jet>> {
        let inner = |y: &[Jet]| pair.plus_vector_at(y, &v.eval(y)?, &|z| c.eval(z));
        pair.plus_vector_at(x, &u.eval(x)?, &inner)
    };
    let ab = second(a, b)?;
    let ba = second(b, a)?;
    let bracket = commutator_at(pair.cfg(), x, a, b)?;
    let last = pair.plus_vector_at(x, &bracket, &|z| c.eval(z))?;
    Ok((0..pair.dim()).map(|i| ab[i] - ba[i] - last[i]).collect())
}

/// Curvature quantities at one point, from the curvature tensor and `g`.
#[derive(Clone, Debug)]
pub struct CurvatureAt {
    n: usize,
    gram: Extensor11,
    gram_inv: Extensor11,
    rho: Vec<Extensor11>,
    riemann_frame: Vec<Multivector>,
}

impl CurvatureAt {
    pub fn compute(structure: &GeometricStructure, x: &[f64]) -> Result<Self> {
        let p = lift_point(x);
        let rho = rho_tensor_at(structure.pair(), &p)?;
        let gram = structure.metric().gram_at(&p)?.values();
        Self::from_parts(gram, rho.iter().map(|m| m.values()).collect())
    }

    pub fn from_parts(gram: Extensor11, rho: Vec<Extensor11>) -> Result<Self> {
        let n = gram.dim();
        let gram_inv = gram.inverse()?;
        let mut riemann_frame = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let lowered = gram.compose(&rho[a * n + b]);
                // R(eₐ∧e_b) = −½ ∂_c∧∂_d ρ(eₐ,e_b,c)·_g d
                let pair = frame_wedge_pair(n, |i, j| lowered.get(j, i));
                riemann_frame.push(pair.scaled(-0.5));
            }
        }
        Ok(CurvatureAt {
            n,
            gram,
            gram_inv,
            rho,
            riemann_frame,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn gram(&self) -> &Extensor11 {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &Extensor11 {
        &self.gram_inv
    }

    /// Matrix of `c ↦ ρ(eₐ, e_b, c)`.
    pub fn rho_frame(&self, a: usize, b: usize) -> &Extensor11 {
        &self.rho[a * self.n + b]
    }

    pub fn rho_tensor(&self) -> &[Extensor11] {
        &self.rho
    }

    /// `ρ(a,b,c)` for constant vectors.
    pub fn rho(&self, a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let w = a[i] * b[j];
                if w == 0.0 {
                    continue;
                }
                for (o, v) in out.iter_mut().zip(self.rho_frame(i, j).apply_vec(c)) {
                    *o += w * v;
                }
            }
        }
        out
    }

    /// `u·_g v`
    pub fn g_dot(&self, u: &[f64], v: &[f64]) -> f64 {
        self.gram
            .apply_vec(u)
            .iter()
            .zip(v)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `R(eₐ∧e_b)`, for any ordered pair of frame indices.
    pub fn riemann_frame(&self, a: usize, b: usize) -> &Multivector {
        &self.riemann_frame[a * self.n + b]
    }

    /// `R(B)` on the grade-2 part of `B`.
    pub fn riemann(&self, b: &Multivector) -> Multivector {
        let n = self.n;
        let mut out = Multivector::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                let c = b.get((1 << i) | (1 << j));
                if c != 0.0 {
                    out += &self.riemann_frame(i, j).scaled(c);
                }
            }
        }
        out
    }

    /// `R(b) = ∂_c ∂ₐ·ρ(a,b,c)`
    pub fn ricci(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|c| {
                let mut ec = vec![0.0; n];
                ec[c] = 1.0;
                (0..n)
                    .map(|a| {
                        let mut ea = vec![0.0; n];
                        ea[a] = 1.0;
                        self.rho(&ea, b, &ec)[a]
                    })
                    .sum()
            })
            .collect()
    }

    /// `R(b) = g⁻¹(∂ₐ)⌟R(a∧b)`
    pub fn ricci_dual(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let bv = Multivector::vector(b);
        let mut out = Multivector::zero(n);
        for a in 0..n {
            let ea = Multivector::basis(n, a);
            let r = self.riemann(&ea.wedge(&bv));
            out += &Multivector::vector(&self.gram_inv.image(a)).left_contract(&r);
        }
        out.vector_part()
    }

    /// Matrix whose column `j` is `R(eⱼ)`.
    pub fn ricci_matrix(&self) -> Extensor11 {
        let n = self.n;
        let cols: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                self.ricci(&e)
            })
            .collect();
        Extensor11::from_images(&cols)
    }

    /// `R = g⁻¹(∂_b)·R(b)`
    pub fn scalar(&self) -> f64 {
        let ric = self.ricci_matrix();
        (0..self.n)
            .map(|j| {
                let gi = self.gram_inv.image(j);
                gi.iter().zip(ric.image(j)).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum()
    }

    /// `R = g̲⁻¹(∂ₐ∧∂_b)·R(a∧b)`
    pub fn scalar_dual(&self) -> f64 {
        let n = self.n;
        let ginv = GramContext::new(self.gram_inv.clone()).expect("inverse of a valid metric");
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                let blade = Multivector::basis(n, a).wedge(&Multivector::basis(n, b));
                acc += ginv.lower(&blade).scalar_product(self.riemann_frame(a, b));
            }
        }
        acc
    }

    /// Bivector components of `R(eᵢ∧eⱼ)` for `i < j`, row-major over the
    /// blade pairs.
    pub fn riemann_components(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let blades: Vec<usize> = (0..1usize << n).filter(|m| m.count_ones() == 2).collect();
        blades
            .iter()
            .map(|&row| {
                let i = row.trailing_zeros() as usize;
                let j = (row & (row - 1)).trailing_zeros() as usize;
                let r = self.riemann_frame(i, j);
                blades.iter().map(|&col| r.get(col)).collect()
            })
            .collect()
    }
}

/// `‖[D⁺ₐ,D⁺_b]X − D⁺_{[a,b]}X − g̲⁻¹(R(a∧b) ×_{g⁻¹} g̲(X))‖∞` at `x`.
pub fn commutator_check_at(
    structure: &GeometricStructure,
    x: &[f64],
    a: &VectorField,
    b: &VectorField,
    field: &MvField,
) -> Result<f64> {
    let pair = structure.pair();
    let p = lift_point(x);
    let second = |u: &VectorField, v: &VectorField| -> Result<Multivector<Jet>> {
        let inner = |y: &[Jet]| pair.plus_at(y, &v.eval(y)?, &|z| field.eval(z));
        pair.plus_at(&p, &u.eval(&p)?, &inner)
    };
    let lhs = second(a, b)? - second(b, a)?;
    let bracket = commutator_at(pair.cfg(), &p, a, b)?;
    let first = pair.plus_at(&p, &bracket, &|z| field.eval(z))?;

    let curv = CurvatureAt::compute(structure, x)?;
    let av: Vec<f64> = a.eval(&p)?.iter().map(|j| j.value()).collect();
    let bv: Vec<f64> = b.eval(&p)?.iter().map(|j| j.value()).collect();
    let r = curv.riemann(&Multivector::vector(&av).wedge(&Multivector::vector(&bv)));
    let ctx = GramContext::new(curv.gram.clone())?;
    let xv = field.eval(&p)?.values();
    let turned = ctx.inverse().bivector_commutator(&r, &ctx.lower(&xv));
    let rhs = first.values() + ctx.raise(&turned);
    Ok((lhs.values() - rhs).max_abs())
}

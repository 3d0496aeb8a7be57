//! Pointwise residuals of the algebraic curvature identities, evaluated on
//! frame vectors. Each returns a max-abs residual.

use super::{curvature_rho_fields, CurvatureAt, GeometricStructure};
use crate::algebra::Multivector;
use crate::error::Result;
use crate::fields::{lift_point, Field, ScalarField, VectorField};
use crate::jet::Jet;
use crate::scalar::Scalar;

fn e(n: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = 1.0;
    v
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn add3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| x + y + z)
        .collect()
}

fn for_triples(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max(f(a, b, c));
            }
        }
    }
    worst
}

fn for_quads(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> f64 {
    for_triples(n, |a, b, c| (0..n).fold(0.0, |m, d| m.max(f(a, b, c, d))))
}

/// `ρ(a,b,c) + ρ(b,a,c)`
pub fn antisymmetry(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_triples(n, |a, b, k| {
        let r = c.rho_frame(a, b).image(k);
        let s = c.rho_frame(b, a).image(k);
        max_abs(&r.iter().zip(&s).map(|(x, y)| x + y).collect::<Vec<_>>())
    })
}

/// `ρ(a,b,c)·_g c`
pub fn orthogonality(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_triples(n, |a, b, k| {
        c.g_dot(&c.rho_frame(a, b).image(k), &e(n, k)).abs()
    })
}

/// `ρ(a,b,c)·_g d + ρ(a,b,d)·_g c`
pub fn pair_antisymmetry(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_quads(n, |a, b, k, d| {
        (c.g_dot(&c.rho_frame(a, b).image(k), &e(n, d))
            + c.g_dot(&c.rho_frame(a, b).image(d), &e(n, k)))
        .abs()
    })
}

/// `−ρ(a,b,c)·_g d − R(a∧b)·(c∧d)`
pub fn riemann_extraction(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_quads(n, |a, b, k, d| {
        let cd = Multivector::basis(n, k).wedge(&Multivector::basis(n, d));
        (-c.g_dot(&c.rho_frame(a, b).image(k), &e(n, d))
            - c.riemann_frame(a, b).scalar_product(&cd))
        .abs()
    })
}

/// `g(ρ(a,b,c)) − R(a∧b)⌞c`, together with the commutator reading
/// `R(a∧b) × c`.
pub fn riemann_contraction(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_triples(n, |a, b, k| {
        let lhs = c.gram().apply_vec(&c.rho_frame(a, b).image(k));
        let r = c.riemann_frame(a, b);
        let ek = Multivector::basis(n, k);
        let contracted = r.right_contract(&ek).vector_part();
        let comm = (r.geometric(&ek) - ek.geometric(r))
            .scaled(0.5)
            .vector_part();
        let d1 = lhs
            .iter()
            .zip(&contracted)
            .map(|(x, y)| x - y)
            .collect::<Vec<_>>();
        let d2 = lhs
            .iter()
            .zip(&comm)
            .map(|(x, y)| x - y)
            .collect::<Vec<_>>();
        max_abs(&d1).max(max_abs(&d2))
    })
}

/// Ricci by the trace of `ρ` against Ricci by contraction of `R`.
pub fn ricci_duality(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    (0..n).fold(0.0, |m, b| {
        let d: Vec<f64> = c
            .ricci(&e(n, b))
            .iter()
            .zip(c.ricci_dual(&e(n, b)))
            .map(|(x, y)| x - y)
            .collect();
        m.max(max_abs(&d))
    })
}

/// Scalar by contracting Ricci against scalar by contracting `R`.
pub fn scalar_duality(c: &CurvatureAt) -> f64 {
    (c.scalar() - c.scalar_dual()).abs()
}

/// `ρ(a,b,c) + ρ(b,c,a) + ρ(c,a,b)`
pub fn cyclic(c: &CurvatureAt) -> f64 {
    for_triples(c.dim(), |a, b, k| {
        let s = add3(
            &c.rho_frame(a, b).image(k),
            &c.rho_frame(b, k).image(a),
            &c.rho_frame(k, a).image(b),
        );
        max_abs(&s)
    })
}

/// `ρ(a,b,c)·_g d − ρ(c,d,a)·_g b`
pub fn pair_symmetry(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    for_quads(n, |a, b, k, d| {
        (c.g_dot(&c.rho_frame(a, b).image(k), &e(n, d))
            - c.g_dot(&c.rho_frame(k, d).image(a), &e(n, b)))
        .abs()
    })
}

/// `R(a∧b)⌞c + R(b∧c)⌞a + R(c∧a)⌞b`, grade-1 part.
pub fn riemann_cyclic(c: &CurvatureAt) -> f64 {
    let n = c.dim();
    let b = |k: usize| Multivector::basis(n, k);
    for_triples(n, |i, j, k| {
        let s = c.riemann_frame(i, j).right_contract(&b(k))
            + c.riemann_frame(j, k).right_contract(&b(i))
            + c.riemann_frame(k, i).right_contract(&b(j));
        max_abs(&s.vector_part())
    })
}

/// `R(B)·C − B·R(C)` over frame bivectors.
pub fn riemann_symmetry(c: &CurvatureAt) -> f64 {
    let comps = c.riemann_components();
    let m = comps.len();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((comps[i][j] - comps[j][i]).abs());
        }
    }
    worst
}

/// `R(b)·c − b·R(c)`
pub fn ricci_symmetry(c: &CurvatureAt) -> f64 {
    let r = c.ricci_matrix();
    r.max_asymmetry()
}

/// `‖ρ(f a, b, c) − f ρ(a,b,c)‖∞` for a scalar field `f` and vector fields,
/// each side computed from the commutator definition.
pub fn tensoriality_at(
    structure: &GeometricStructure,
    x: &[f64],
    f: &ScalarField,
    a: &VectorField,
    b: &VectorField,
    c: &VectorField,
) -> Result<f64> {
    let (f2, a2) = (f.clone(), a.clone());
    let fa: VectorField = Field::new(a.dim(), move |y: &[Jet]| {
        let s = f2.eval(y)?;
        Ok(a2.eval(y)?.into_iter().map(|v| v * s).collect())
    });
    let p = lift_point(x);
    let lhs = curvature_rho_fields(structure.pair(), &p, &fa, b, c)?;
    let rhs = curvature_rho_fields(structure.pair(), &p, a, b, c)?;
    let s = f.eval(&p)?;
    Ok(lhs
        .iter()
        .zip(&rhs)
        .fold(0.0, |m, (u, v)| m.max((*u - *v * s).value().abs())))
}

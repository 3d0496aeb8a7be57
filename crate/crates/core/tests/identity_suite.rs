use excalc_core::extensor::{Extensor11, Extensor12};
use excalc_core::fields::{
    lift_point, DerivativeConfig, Extensor12Field, Field, MetricField, MvField, VectorField,
};
use excalc_core::geometry::identities::*;
use excalc_core::geometry::{
    commutator_check_at, BianchiData, CurvatureAt, GeometricStructure, SignPattern,
};
use excalc_core::{Jet, Multivector, Scalar, Signature};

fn sphere() -> MetricField {
    MetricField::from_gram(
        Field::new(2, |x: &[Jet]| {
            let s = x[0].sin();
            Ok(Extensor11::diagonal(&[Jet::constant(1.0), s * s]))
        }),
        Signature::euclidean(2),
    )
}

fn conformal() -> MetricField {
    MetricField::from_gram(
        Field::new(2, |x: &[Jet]| {
            let f = (x[0] * x[0] + x[1] * x[1]).scale(2.0).exp();
            Ok(Extensor11::diagonal(&[f, f]))
        }),
        Signature::euclidean(2),
    )
}

fn poly() -> MetricField {
    MetricField::from_gram(
        Field::new(3, |x: &[Jet]| {
            let c = Jet::constant;
            let g12 = c(0.3) * x[1] * x[2];
            let g13 = c(0.1) * x[0];
            let g23 = c(0.2) * x[0] * x[1];
            Extensor11::from_rows(vec![
                vec![c(2.0) + x[0] * x[0], g12, g13],
                vec![g12, c(1.5) + x[2] * x[2] + c(0.2) * x[0], g23],
                vec![g13, g23, c(1.0) + c(0.5) * x[1] * x[1] - c(0.1) * x[2]],
            ])
        }),
        Signature::euclidean(3),
    )
}

fn lorentz() -> MetricField {
    MetricField::from_gram(
        Field::new(2, |x: &[Jet]| {
            let c = Jet::constant;
            Ok(Extensor11::diagonal(&[
                c(1.0) + x[1] * x[1].scale(0.2),
                c(-1.0) - x[0].sin().scale(0.3),
            ]))
        }),
        Signature::new(1, 1),
    )
}

// A metric-compatible structure with torsion: Levi-Civita plus a varying ω.
fn twisted() -> GeometricStructure {
    let omega: Extensor12Field = Field::new(3, |x: &[Jet]| {
        let c = Jet::constant;
        let bv = |a: Jet, b: Jet, d: Jet| {
            let mut m = Multivector::zero(3);
            m.set(0b011, a);
            m.set(0b101, b);
            m.set(0b110, d);
            m
        };
        Ok(Extensor12::from_images(vec![
            bv(x[1].scale(0.3), c(0.1), x[2] * x[0]),
            bv(c(0.2), x[0].sin(), c(0.0)),
            bv(x[2], c(-0.1), x[1] * x[1].scale(0.5)),
        ]))
    });
    GeometricStructure::with_omega(poly(), omega, DerivativeConfig::ad())
}

fn samples2() -> Vec<Vec<f64>> {
    vec![vec![0.7, 0.1], vec![1.2, -0.5], vec![2.0, 0.9]]
}

fn samples3() -> Vec<Vec<f64>> {
    vec![
        vec![0.1, -0.3, 0.25],
        vec![0.4, 0.2, -0.1],
        vec![-0.2, 0.35, 0.1],
    ]
}

fn cases() -> Vec<(&'static str, GeometricStructure, Vec<Vec<f64>>, bool)> {
    let ad = DerivativeConfig::ad();
    vec![
        (
            "sphere",
            GeometricStructure::levi_civita(sphere(), ad),
            samples2(),
            true,
        ),
        (
            "conformal",
            GeometricStructure::levi_civita(conformal(), ad),
            samples2(),
            true,
        ),
        (
            "poly",
            GeometricStructure::levi_civita(poly(), ad),
            samples3(),
            true,
        ),
        (
            "lorentz",
            GeometricStructure::levi_civita(lorentz(), ad),
            samples2(),
            true,
        ),
        ("twisted", twisted(), samples3(), false),
    ]
}

type Identity = fn(&CurvatureAt) -> f64;

#[test]
fn general_identities_hold_for_every_compatible_structure() {
    let general: [(&str, Identity); 7] = [
        ("antisymmetry", antisymmetry),
        ("orthogonality", orthogonality),
        ("pair_antisymmetry", pair_antisymmetry),
        ("riemann_extraction", riemann_extraction),
        ("riemann_contraction", riemann_contraction),
        ("ricci_duality", ricci_duality),
        ("scalar_duality", scalar_duality),
    ];
    for (name, s, points, _) in cases() {
        for x in &points {
            let c = CurvatureAt::compute(&s, x).unwrap();
            for (id, f) in &general {
                let r = f(&c);
                assert!(r < 1e-9, "{name} {id} at {x:?}: {r:e}");
            }
            let v = [0.3, -1.0, 0.5];
            let comp = s
                .compatibility_residual_at(&lift_point(x), &v[..x.len()], &v[..x.len()])
                .unwrap();
            assert!(comp < 1e-9, "{name} compatibility {comp:e}");
        }
    }
}

#[test]
fn levi_civita_identities_hold_and_fail_with_torsion() {
    let lc: [(&str, Identity); 5] = [
        ("cyclic", cyclic),
        ("pair_symmetry", pair_symmetry),
        ("riemann_cyclic", riemann_cyclic),
        ("riemann_symmetry", riemann_symmetry),
        ("ricci_symmetry", ricci_symmetry),
    ];
    for (name, s, points, is_lc) in cases() {
        let mut worst: f64 = 0.0;
        for x in &points {
            let c = CurvatureAt::compute(&s, x).unwrap();
            for (id, f) in &lc {
                let r = f(&c);
                if is_lc {
                    assert!(r < 1e-9, "{name} {id} at {x:?}: {r:e}");
                }
                worst = worst.max(r);
            }
        }
        if !is_lc {
            assert!(worst > 1e-3, "{name} should break symmetric identities");
        }
    }
}

#[test]
fn commutator_curvature_for_every_grade() {
    let a: VectorField = Field::new(2, |x: &[Jet]| Ok(vec![x[1], Jet::one() + x[0] * x[0]]));
    let b: VectorField = Field::new(2, |x: &[Jet]| Ok(vec![x[0].cos(), Jet::constant(0.4)]));
    let fields2: Vec<MvField> = vec![
        Field::new(2, |x: &[Jet]| Ok(Multivector::scalar(2, x[0] * x[1]))),
        Field::new(2, |x: &[Jet]| Ok(Multivector::vector(&[x[1].sin(), x[0]]))),
        Field::new(2, |_: &[Jet]| Ok(Multivector::blade(2, 0b11, Jet::one()))),
        Field::new(2, |x: &[Jet]| {
            let mut m = Multivector::vector(&[x[0], Jet::constant(2.0)]);
            m.set(0, x[1].exp());
            m.set(0b11, x[0] * x[1]);
            Ok(m)
        }),
    ];
    for (name, s, points, _) in cases().into_iter().filter(|c| c.2[0].len() == 2) {
        for x in &points {
            for f in &fields2 {
                let r = commutator_check_at(&s, x, &a, &b, f).unwrap();
                assert!(r < 1e-9, "{name} at {x:?}: {r:e}");
            }
        }
    }
    let s = twisted();
    let a3: VectorField = Field::new(3, |x: &[Jet]| Ok(vec![x[1], Jet::one(), x[2] * x[0]]));
    let b3: VectorField = Field::new(3, |x: &[Jet]| {
        Ok(vec![x[2].sin(), x[0], Jet::constant(0.5)])
    });
    let mixed: MvField = Field::new(3, |x: &[Jet]| {
        let mut m = Multivector::vector(&[x[0], x[1] * x[2], Jet::one()]);
        m.set(0b011, x[2]);
        m.set(0b111, x[0].sin());
        Ok(m)
    });
    let r = commutator_check_at(&s, &[0.2, -0.1, 0.3], &a3, &b3, &mixed).unwrap();
    assert!(r < 1e-9, "twisted mixed grade: {r:e}");
}

#[test]
fn curvature_is_tensorial_in_its_slots() {
    let s = GeometricStructure::levi_civita(poly(), DerivativeConfig::ad());
    let f = Field::new(3, |x: &[Jet]| Ok((x[0] * x[1]).exp() + x[2]));
    let a: VectorField = Field::new(3, |x: &[Jet]| Ok(vec![x[1], Jet::one(), x[2] * x[0]]));
    let b: VectorField = Field::new(3, |x: &[Jet]| {
        Ok(vec![x[2].sin(), x[0], Jet::constant(0.5)])
    });
    let c: VectorField = Field::new(3, |x: &[Jet]| Ok(vec![Jet::one(), x[1] * x[2], x[0]]));
    for x in samples3() {
        let r = tensoriality_at(&s, &x, &f, &a, &b, &c).unwrap();
        assert!(r < 1e-10, "{r:e}");
    }
    let r = tensoriality_at(&twisted(), &[0.1, 0.2, 0.3], &f, &a, &b, &c).unwrap();
    assert!(r < 1e-10, "{r:e}");
}

#[test]
fn bianchi_holds_on_sphere_and_conformal() {
    for m in [sphere(), conformal()] {
        let s = GeometricStructure::levi_civita(m, DerivativeConfig::ad());
        for x in samples2() {
            let r = BianchiData::compute(s.pair(), &x)
                .unwrap()
                .residual(SignPattern::PLUS);
            assert!(r < 1e-8, "{r:e}");
        }
    }
}

#[test]
fn automatic_and_finite_difference_derivatives_agree() {
    let step = 1e-5;
    for (name, metric, points) in [
        ("poly", poly(), samples3()),
        ("sphere", sphere(), samples2()),
    ] {
        let ad = GeometricStructure::levi_civita(metric.clone(), DerivativeConfig::ad());
        let fd = GeometricStructure::levi_civita(metric, DerivativeConfig::fd(step));
        let n = points[0].len();
        for x in &points {
            let p = lift_point(x);
            let (ga, gf) = (
                ad.pair().plus_gammas(&p).unwrap(),
                fd.pair().plus_gammas(&p).unwrap(),
            );
            for k in 0..n {
                let d = ga[k].values().max_abs_diff(&gf[k].values());
                assert!(d < 1e-4, "{name} Γ_{k}: {d:e}");
            }
            let (ca, cf) = (
                CurvatureAt::compute(&ad, x).unwrap(),
                CurvatureAt::compute(&fd, x).unwrap(),
            );
            assert!((ca.scalar() - cf.scalar()).abs() < 1e-2, "{name} scalar");
            for (ra, rf) in ca.rho_tensor().iter().zip(cf.rho_tensor()) {
                assert!(ra.max_abs_diff(rf) < 1e-2, "{name} ρ");
            }
        }
    }
}

use approx::assert_abs_diff_eq;
use excalc_core::deformation::{
    commutator_preservation, connection_value, deform_dcdo, extract_omega, undeform_dcdo,
    Diffeomorphism, GaugeCurvatureAt, GaugeDeformation,
};
use excalc_core::extensor::Extensor11;
use excalc_core::fields::{lift_point, DerivativeConfig, Field, MetricField, VectorField};
use excalc_core::geometry::{CurvatureAt, DcdoPair, GeometricStructure};
use excalc_core::{Jet, Multivector, Scalar, Signature};

fn sphere_gauge(r: f64) -> GaugeDeformation {
    GaugeDeformation::new(
        Field::new(2, move |x: &[Jet]| {
            Ok(Extensor11::diagonal(&[
                Jet::constant(r),
                x[0].sin().scale(r),
            ]))
        }),
        Signature::euclidean(2),
    )
}

fn wavy_gauge() -> GaugeDeformation {
    GaugeDeformation::new(
        Field::new(3, |x: &[Jet]| {
            let c = Jet::constant;
            Extensor11::from_rows(vec![
                vec![c(1.2) + x[1].sin().scale(0.2), c(0.1) * x[2], c(0.05)],
                vec![
                    c(0.3) * x[0],
                    c(1.0) + x[2] * x[2].scale(0.1),
                    x[0].cos().scale(0.1),
                ],
                vec![
                    c(0.0),
                    c(0.2) * x[1] * x[0],
                    c(0.9) + x[0].exp().scale(0.05),
                ],
            ])
        }),
        Signature::euclidean(3),
    )
}

fn minkowski_gauge() -> GaugeDeformation {
    GaugeDeformation::new(
        Field::new(2, |x: &[Jet]| {
            let c = Jet::constant;
            Extensor11::from_rows(vec![
                vec![c(1.0) + x[1] * x[1].scale(0.1), c(0.2) * x[0]],
                vec![c(0.1), c(1.0) + x[0].sin().scale(0.3)],
            ])
        }),
        Signature::new(1, 1),
    )
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (u, v)| m.max((u - v).abs()))
}

#[test]
fn gauge_scalar_agrees_with_intrinsic_scalar() {
    let cfg = DerivativeConfig::ad();
    let cases: Vec<(GaugeDeformation, Vec<Vec<f64>>)> = vec![
        (sphere_gauge(1.5), vec![vec![0.9, 0.3], vec![2.0, -1.0]]),
        (
            wavy_gauge(),
            vec![vec![0.1, 0.2, -0.3], vec![-0.4, 0.5, 0.2]],
        ),
        (minkowski_gauge(), vec![vec![0.2, 0.4], vec![-0.3, 0.1]]),
    ];
    for (def, points) in cases {
        let s = GeometricStructure::levi_civita(def.metric(), cfg);
        let eta_pair = deform_dcdo(&def, s.pair());
        let omega = extract_omega(&eta_pair, def.signature());
        for x in points {
            let intrinsic = CurvatureAt::compute(&s, &x).unwrap();
            let gauge = GaugeCurvatureAt::compute(&omega, &def, &cfg, &x).unwrap();
            assert_abs_diff_eq!(gauge.scalar(), intrinsic.scalar_dual(), epsilon = 1e-9);
            assert_abs_diff_eq!(
                gauge.scalar_from_ricci(),
                intrinsic.scalar(),
                epsilon = 1e-9
            );
        }
    }
}

#[test]
fn sphere_gauge_scalar_is_two_over_r_squared() {
    let def = sphere_gauge(2.0);
    let cfg = DerivativeConfig::ad();
    let s = GeometricStructure::levi_civita(def.metric(), cfg);
    let omega = extract_omega(&deform_dcdo(&def, s.pair()), def.signature());
    let g = GaugeCurvatureAt::compute(&omega, &def, &cfg, &[1.2, 0.0]).unwrap();
    assert_abs_diff_eq!(g.scalar(), 0.5, epsilon = 1e-12);
}

#[test]
fn riemann_transfers_between_gauge_and_metric_pictures() {
    let def = wavy_gauge();
    let cfg = DerivativeConfig::ad();
    let s = GeometricStructure::levi_civita(def.metric(), cfg);
    let eta_pair = deform_dcdo(&def, s.pair());
    let eta = GeometricStructure::from_pair(def.orthogonal_metric(), eta_pair.clone());
    let omega = extract_omega(&eta_pair, def.signature());
    let x = [0.3, -0.1, 0.2];
    let p = lift_point(&x);
    let h = def.h_at(&p).unwrap().values();
    let h_inv = h.inverse().unwrap();
    let g_curv = CurvatureAt::compute(&s, &x).unwrap();
    let eta_curv = CurvatureAt::compute(&eta, &x).unwrap();
    let gauge = GaugeCurvatureAt::compute(&omega, &def, &cfg, &x).unwrap();
    let eta_m = def.signature().eta::<f64>();
    for a in 0..3 {
        for b in 0..3 {
            // ηR = η̲(ℛ)
            let r1 = eta_curv.riemann_frame(a, b);
            let r2 = eta_m.outermorphism(gauge.riemann_frame(a, b));
            assert!((r1 - &r2).max_abs() < 1e-10);
            // gR = h̲†(ηR)
            let r3 = h.adjoint().outermorphism(r1);
            assert!((g_curv.riemann_frame(a, b) - &r3).max_abs() < 1e-10);
            for c in 0..3 {
                let mut ec = vec![0.0; 3];
                ec[c] = 1.0;
                let mut ea = vec![0.0; 3];
                ea[a] = 1.0;
                let mut eb = vec![0.0; 3];
                eb[b] = 1.0;
                // gρ(a,b,h⁻¹c) = h⁻¹(ηρ(a,b,c))
                let lhs = g_curv.rho(&ea, &eb, &h_inv.apply_vec(&ec));
                let rhs = h_inv.apply_vec(&eta_curv.rho(&ea, &eb, &ec));
                assert!(max_diff(&lhs, &rhs) < 1e-10);
            }
        }
    }
}

#[test]
fn flat_source_stays_flat_under_any_gauge() {
    let cfg = DerivativeConfig::ad();
    for def in [wavy_gauge()] {
        let flat = DcdoPair::flat(3, cfg);
        let g_pair = undeform_dcdo(&def, &flat);
        let s = GeometricStructure::from_pair(def.metric(), g_pair);
        for x in [[0.1, 0.2, 0.3], [-0.5, 0.4, 0.0]] {
            let c = CurvatureAt::compute(&s, &x).unwrap();
            for m in c.rho_tensor() {
                assert!(m.max_abs() < 1e-12);
            }
            let v = [1.0, 0.5, -2.0];
            let comp = s
                .compatibility_residual_at(&lift_point(&x), &v, &v)
                .unwrap();
            assert!(comp < 1e-12);
        }
    }
}

#[test]
fn deformation_round_trip_recovers_pair() {
    let cfg = DerivativeConfig::ad();
    let base = GeometricStructure::levi_civita(
        MetricField::from_gram(
            Field::new(3, |x: &[Jet]| {
                let c = Jet::constant;
                Ok(Extensor11::diagonal(&[
                    c(1.0) + x[0] * x[0],
                    c(2.0) + x[1].sin(),
                    c(1.0) + x[2] * x[0].scale(0.1),
                ]))
            }),
            Signature::euclidean(3),
        ),
        cfg,
    );
    let def = wavy_gauge();
    let back = deform_dcdo(&def.inverse(), &deform_dcdo(&def, base.pair()));
    let x = [0.2, -0.3, 0.4];
    let p = lift_point(&x);
    let (a, b) = (
        base.pair().plus_gammas(&p).unwrap(),
        back.plus_gammas(&p).unwrap(),
    );
    let (am, bm) = (
        base.pair().minus_gammas(&p).unwrap(),
        back.minus_gammas(&p).unwrap(),
    );
    for k in 0..3 {
        assert!(a[k].values().max_abs_diff(&b[k].values()) < 1e-12);
        assert!(am[k].values().max_abs_diff(&bm[k].values()) < 1e-12);
    }
}

fn quadratic_shear() -> Diffeomorphism {
    Diffeomorphism::new(
        Field::new(2, |x: &[Jet]| {
            Ok(vec![x[0] + (x[1] * x[1]).scale(0.5), x[1]])
        }),
        Field::new(2, |x: &[Jet]| {
            Ok(vec![x[0] - (x[1] * x[1]).scale(0.5), x[1]])
        }),
    )
}

#[test]
fn diffeomorphism_gauge_is_flat_and_torsion_free() {
    let cfg = DerivativeConfig::ad();
    let d = quadratic_shear();
    let def = d.gauge(Signature::euclidean(2), cfg);
    let g_pair = undeform_dcdo(&def, &DcdoPair::flat(2, cfg));
    let s = GeometricStructure::from_pair(def.metric(), g_pair.clone());
    let lc = GeometricStructure::levi_civita(def.metric(), cfg);
    let a: VectorField = Field::new(2, |x: &[Jet]| Ok(vec![x[1], Jet::one()]));
    let b: VectorField = Field::new(2, |x: &[Jet]| Ok(vec![x[0].cos(), x[0] * x[1]]));
    for x in [[0.3, 0.7], [-1.0, 0.2]] {
        let p = lift_point(&x);
        let t = s.torsion_at(&p, &a, &b).unwrap();
        assert!(t.iter().all(|v| v.value().abs() < 1e-12));
        let c = CurvatureAt::compute(&lc, &x).unwrap();
        assert_abs_diff_eq!(c.scalar(), 0.0, epsilon = 1e-12);
        for (u, v) in [([1.0, 0.0], [0.0, 1.0]), ([0.5, -1.0], [2.0, 0.3])] {
            let p1 = connection_value(&g_pair, &x, &u, &v).unwrap();
            let p2 = connection_value(lc.pair(), &x, &u, &v).unwrap();
            assert!(max_diff(&p1, &p2) < 1e-12);
        }
        assert!(commutator_preservation(&d, &cfg, &a, &b, &x).unwrap() < 1e-12);
        assert!(d.round_trip_residual(&x).unwrap() < 1e-14);
    }
}

#[test]
fn constant_omega_gauge_riemann_is_the_commutator() {
    // With Ω constant the derivative terms drop out.
    let sig = Signature::euclidean(3);
    let w = |i: usize| {
        let mut m = Multivector::zero(3);
        m.set([0b011, 0b101, 0b110][i], [0.3, -0.7, 1.1][i]);
        m.set([0b110, 0b011, 0b101][i], 0.2);
        m
    };
    let omega: excalc_core::fields::Extensor12Field = Field::constant(
        3,
        excalc_core::extensor::Extensor12::from_images((0..3).map(|i| w(i).lift()).collect()),
    );
    let def = GaugeDeformation::identity(3, sig);
    let g =
        GaugeCurvatureAt::compute(&omega, &def, &DerivativeConfig::ad(), &[0.0, 0.0, 0.0]).unwrap();
    for a in 0..3 {
        for b in 0..3 {
            // Euclidean: X ×_η Y = ½(XY − YX)
            let want = (w(a).geometric(&w(b)) - w(b).geometric(&w(a))).scaled(0.5);
            assert!((g.riemann_frame(a, b) - &want).max_abs() < 1e-14);
        }
    }
}

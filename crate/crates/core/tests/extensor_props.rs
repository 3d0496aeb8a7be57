use excalc_core::extensor::{gauge_decompose, Extensor11, MetricExtensor};
use excalc_core::{Jet, Multivector, Scalar, Signature};
use proptest::prelude::*;

fn mat(n: usize) -> impl Strategy<Value = Extensor11> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        Extensor11::from_fn(n, |i, j| v[i * n + j] + if i == j { 2.0 } else { 0.0 })
    })
}

fn mv(n: usize) -> impl Strategy<Value = Multivector> {
    prop::collection::vec(-2.0f64..2.0, 1 << n)
        .prop_map(move |c| Multivector::from_coeffs(n, c).unwrap())
}

fn small(a: f64, scale: f64) -> bool {
    a.abs() < 1e-10 * (1.0 + scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn outermorphism_preserves_wedge((t, x, y) in (mat(3), mv(3), mv(3))) {
        let l = t.outermorphism(&x.wedge(&y));
        let r = t.outermorphism(&x).wedge(&t.outermorphism(&y));
        prop_assert!(small((&l - &r).max_abs(), l.max_abs()));
        prop_assert!(small(t.outermorphism(&Multivector::scalar(3, 1.0)).scalar_part() - 1.0, 0.0));
    }

    #[test]
    fn outermorphism_of_pseudoscalar_is_determinant(t in mat(4)) {
        let i = Multivector::blade(4, 0b1111, 1.0);
        let d = t.outermorphism(&i).get(0b1111);
        prop_assert!(small(d - t.determinant(), d.abs()));
    }

    #[test]
    fn adjoint_extends_to_multivectors((t, x, y) in (mat(3), mv(3), mv(3))) {
        let l = t.adjoint().outermorphism(&x).scalar_product(&y);
        let r = x.scalar_product(&t.outermorphism(&y));
        prop_assert!(small(l - r, l.abs()));
    }

    #[test]
    fn star_inverts_adjoint(t in mat(3)) {
        let s = t.star().unwrap();
        prop_assert!(s.compose(&t.adjoint()).max_abs_diff(&Extensor11::identity(3)) < 1e-12);
        prop_assert!(t.inverse().unwrap().compose(&t).max_abs_diff(&Extensor11::identity(3)) < 1e-12);
    }

    #[test]
    fn derivation_obeys_leibniz((t, x, y) in (mat(3), mv(3), mv(3))) {
        let l = t.derivation(&x.wedge(&y));
        let r = t.derivation(&x).wedge(&y) + x.wedge(&t.derivation(&y));
        prop_assert!(small((&l - &r).max_abs(), l.max_abs()));
    }

    #[test]
    fn gauge_reconstructs_gram(t in mat(3), flip in 0usize..3) {
        // Indefinite targets: g = tᵀ diag(±1) t.
        let sig = Signature::new(3 - flip, flip);
        let g = t.adjoint().compose(&sig.eta()).compose(&t);
        let h = gauge_decompose(&g, sig).unwrap();
        let back = h.adjoint().compose(&sig.eta()).compose(&h);
        prop_assert!(back.max_abs_diff(&g) < 1e-9 * (1.0 + g.max_abs()));
        let m = MetricExtensor::from_gram(g, sig).unwrap();
        prop_assert!(m.reconstruction_residual() < 1e-9);
    }

    #[test]
    fn jet_derivatives_match_central_differences(x in 0.2f64..1.5) {
        let f = |j: Jet| (j.sin() * j.exp() + j.ln() * j.cosh()) / (j.sqrt() + j.tan().powi(2));
        let fr = |v: f64| (v.sin() * v.exp() + v.ln() * v.cosh()) / (v.sqrt() + v.tan().powi(2));
        let d = f(Jet::seeded(x, 0)).derivative(0).value();
        let h = 1e-5;
        let fd = (fr(x + h) - fr(x - h)) / (2.0 * h);
        prop_assert!((d - fd).abs() < 1e-4 * (1.0 + d.abs()));
    }
}

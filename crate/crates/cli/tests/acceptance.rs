//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the console.

use std::path::PathBuf;
use std::process::{Command, ExitCode};

use excalc::{run_suite, Check, Overrides, Plan, Report, Scenario};
use excalc_core::algebra::{
    metric_pairing, metric_product, signature_product, MetricContext, Pairing,
};
use excalc_core::deformation::deformed_torsion;
use excalc_core::extensor::Extensor11;
use excalc_core::fields::{DerivativeConfig, DerivativeMode, Field, VectorField};
use excalc_core::geometry::{
    bianchi_pattern_search, select_bianchi_pattern, CurvatureAt, DcdoPair,
};
use excalc_core::{Jet, Multivector, Scalar, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> Scenario {
    Scenario::load(&root().join("scenarios").join(format!("{name}.json"))).expect("fixture loads")
}

const GOOD: [&str; 7] = [
    "flat",
    "sphere",
    "conformal",
    "polynomial",
    "lorentz",
    "shear",
    "diffeo",
];

/// A 3D gauge with no symmetry, paired with a flat source.
const WAVY_FLAT_SOURCE: &str = r#"{
    "name": "wavy-flat-source", "dim": 3,
    "gauge_h": [
        ["1.2 + 0.2 * sin(x2)", "0.1 * x3", "0.05"],
        ["0.3 * x1", "1 + 0.1 * x3^2", "0.1 * cos(x1)"],
        ["0", "0.2 * x1 * x2", "0.9 + 0.05 * exp(x1)"]
    ],
    "connection": "flat-source",
    "samples": {"min": [-0.5, -0.5, -0.5], "max": [0.5, 0.5, 0.5]}
}"#;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

/// Worst residual of `checks` over a run at `tol`, and the failing names.
fn worst(s: &Scenario, checks: &[Check], tol: f64) -> (f64, Vec<String>, Report) {
    let plan = Plan {
        checks: checks.to_vec(),
        curvature: false,
    };
    let r = run_suite(
        s,
        &Overrides {
            tolerance: Some(tol),
            ..Overrides::default()
        },
        &plan,
    );
    let mut bad: Vec<String> = r
        .failed_checks()
        .map(|c| format!("{}:{}", s.name, c.name))
        .collect();
    bad.extend(
        r.point_errors
            .iter()
            .map(|e| format!("{}:{} error {}", s.name, e.check, e.error)),
    );
    let w = r.checks.iter().fold(0.0f64, |m, c| m.max(c.max_residual));
    (w, bad, r)
}

fn summarize(w: f64, bad: Vec<String>) -> Outcome {
    if bad.is_empty() {
        Outcome::new(true, format!("max residual {w:.2e}"))
    } else {
        Outcome::new(
            false,
            format!("max residual {w:.2e}; failing {}", bad.join(", ")),
        )
    }
}

fn random_mv(rng: &mut ChaCha8Rng, n: usize) -> Multivector {
    let c: Vec<f64> = (0..1 << n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    Multivector::from_coeffs(n, c).unwrap()
}

fn random_gauge(rng: &mut ChaCha8Rng, n: usize) -> Extensor11 {
    Extensor11::from_fn(n, |i, j| {
        rng.gen_range(-0.4..0.4) + if i == j { 1.5 } else { 0.0 }
    })
}

fn algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sigs = [
        Signature::euclidean(2),
        Signature::new(1, 1),
        Signature::euclidean(3),
        Signature::new(2, 1),
        Signature::euclidean(4),
        Signature::new(1, 3),
    ];
    let (mut products, mut derivation, mut duality) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..100 {
        let s = sigs[k % sigs.len()];
        let n = s.dim();
        let (x, y, z) = (
            random_mv(&mut rng, n),
            random_mv(&mut rng, n),
            random_mv(&mut rng, n),
        );
        let b = random_mv(&mut rng, n).grade(2);

        let id = MetricContext::orthogonal(s);
        let p = metric_product(&id, &x, &y).unwrap() - signature_product(s, &x, &y).unwrap();
        products = products.max(p.max_abs());

        let ctx = MetricContext::from_gauge(random_gauge(&mut rng, n), s).unwrap();
        let lhs = ctx.commutator(&b, &ctx.product(&x, &y));
        let rhs =
            ctx.product(&ctx.commutator(&b, &x), &y) + ctx.product(&x, &ctx.commutator(&b, &y));
        derivation = derivation.max((lhs - rhs).max_abs());

        let dot = |a: &Multivector, c: &Multivector| {
            metric_pairing(&ctx, Pairing::Scalar, a, c)
                .unwrap()
                .scalar_part()
        };
        let right =
            |a: &Multivector, c: &Multivector| metric_pairing(&ctx, Pairing::Right, a, c).unwrap();
        let left =
            |a: &Multivector, c: &Multivector| metric_pairing(&ctx, Pairing::Left, a, c).unwrap();
        let d1 = dot(&x, &y.wedge(&z)) - dot(&right(&x, &z.reverse()), &y);
        let d2 = dot(&x, &right(&y, &z)) - dot(&x.wedge(&z.reverse()), &y);
        let d3 = dot(&left(&x, &y), &z) - dot(&y, &x.reverse().wedge(&z));
        duality = duality.max(d1.abs()).max(d2.abs()).max(d3.abs());
    }
    let w = products.max(derivation).max(duality);
    Outcome::new(
        w < 1e-10,
        format!("100 cases each; products {products:.1e}, derivation {derivation:.1e}, dualities {duality:.1e}"),
    )
}

fn compatibility() -> Outcome {
    let mut all = 0.0f64;
    let mut bad = Vec::new();
    for name in GOOD {
        let (w, b, r) = worst(&fixture(name), &[Check::Compatibility], 1e-9);
        if r.checks[0].samples != 20 {
            bad.push(format!("{name}: {} samples", r.checks[0].samples));
        }
        all = all.max(w);
        bad.extend(b);
    }
    let (w, b, _) = worst(
        &Scenario::from_json(WAVY_FLAT_SOURCE).unwrap(),
        &[Check::Compatibility],
        1e-9,
    );
    bad.extend(b);
    summarize(all.max(w), bad)
}

fn curvature_suite() -> Outcome {
    let checks = [
        Check::RhoAntisymmetry,
        Check::RhoOrthogonality,
        Check::RhoPairAntisymmetry,
        Check::RiemannExtraction,
        Check::RiemannContraction,
        Check::RicciDuality,
        Check::ScalarDuality,
        Check::CommutatorCurvature,
    ];
    let mut all = 0.0f64;
    let mut bad = Vec::new();
    for name in ["sphere", "conformal", "polynomial"] {
        let (w, b, _) = worst(&fixture(name), &checks, 1e-8);
        all = all.max(w);
        bad.extend(b);
    }
    summarize(all, bad)
}

fn levi_civita() -> Outcome {
    let checks = [
        Check::TorsionFree,
        Check::Cyclic,
        Check::Bianchi,
        Check::PairSymmetry,
        Check::RiemannCyclic,
        Check::RiemannSymmetry,
        Check::RicciSymmetry,
    ];
    let mut all = 0.0f64;
    let mut bad = Vec::new();
    let mut recorded = String::new();
    for name in ["sphere", "conformal", "polynomial"] {
        let (w, b, r) = worst(&fixture(name), &checks, 1e-7);
        all = all.max(w);
        bad.extend(b);
        recorded = r.environment.bianchi_pattern;
    }
    let s = fixture("polynomial");
    let points = s.sample_points(s.seed(), None);
    let search =
        bianchi_pattern_search(s.structure(s.derivative_config()).pair(), &points).unwrap();
    let qualifying = search.iter().filter(|(_, r)| *r < 1e-7).count();
    match select_bianchi_pattern(&search, 1e-7) {
        Ok(p) if p.to_string() == recorded => {}
        Ok(p) => bad.push(format!("selected {p} but report records {recorded}")),
        Err(e) => bad.push(e.to_string()),
    }
    let o = summarize(all, bad);
    Outcome::new(
        o.pass,
        format!(
            "{}; {qualifying} of 16 Bianchi patterns qualify, recorded {recorded}",
            o.detail
        ),
    )
}

fn scalar_at(s: &Scenario, x: &[f64]) -> f64 {
    CurvatureAt::compute(&s.structure(s.derivative_config()), x)
        .unwrap()
        .scalar()
}

fn anchors() -> Outcome {
    let sphere = fixture("sphere");
    let r = sphere.constants["r"];
    let sphere_err = sphere.sample_points(42, None).iter().fold(0.0f64, |m, x| {
        m.max((scalar_at(&sphere, x) - 2.0 / (r * r)).abs())
    });
    let conformal = (scalar_at(&fixture("conformal"), &[0.0, 0.0]) + 8.0).abs();
    let flat = fixture("flat");
    let flat_err = flat
        .sample_points(42, None)
        .iter()
        .fold(0.0f64, |m, x| m.max(scalar_at(&flat, x).abs()));
    Outcome::new(
        sphere_err < 1e-7 && conformal < 1e-6 && flat_err < 1e-10,
        format!("sphere |R - 2/r^2| {sphere_err:.1e}, conformal |R + 8| {conformal:.1e}, flat |R| {flat_err:.1e}"),
    )
}

fn deformation() -> Outcome {
    let mut bad = Vec::new();
    let mut flat_worst = 0.0f64;
    let wavy = Scenario::from_json(WAVY_FLAT_SOURCE).unwrap();
    for s in [fixture("shear"), wavy] {
        let (w, b, _) = worst(&s, &[Check::FlatnessTransfer, Check::RiemannTransfer], 1e-8);
        let cfg = s.derivative_config();
        let structure = s.structure(cfg);
        let riemann = s.sample_points(s.seed(), None).iter().fold(0.0f64, |m, x| {
            let c = CurvatureAt::compute(&structure, x).unwrap();
            c.riemann_components()
                .iter()
                .flatten()
                .fold(m, |m, v| m.max(v.abs()))
        });
        if riemann >= 1e-8 {
            bad.push(format!("{}: Riemann {riemann:.1e}", s.name));
        }
        flat_worst = flat_worst.max(w).max(riemann);
        bad.extend(b);
    }

    let shear = fixture("shear");
    let cfg = DerivativeConfig::ad();
    let gauge = shear.gauge(cfg).unwrap();
    let flat = DcdoPair::flat(2, cfg);
    let mut witness_err = 0.0f64;
    for x in shear.sample_points(42, None) {
        let t = deformed_torsion(
            &gauge,
            &flat,
            &VectorField::basis(2, 0),
            &VectorField::basis(2, 1),
            &x,
        )
        .unwrap();
        let norm = t.lhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        witness_err = witness_err.max((norm - 1.0).abs());
        // the direct reading T'(e1, -x1 e1 + e2) on the deformed pair
        let pair = excalc_core::deformation::undeform_dcdo(&gauge, &flat);
        let b: VectorField = Field::new(2, |y: &[Jet]| Ok(vec![-y[0], Jet::constant(1.0)]));
        let direct = pair
            .torsion_at(
                &excalc_core::fields::lift_point(&x),
                &VectorField::basis(2, 0),
                &b,
            )
            .unwrap();
        let direct = direct.iter().map(|v| v.value().powi(2)).sum::<f64>().sqrt();
        witness_err = witness_err.max((direct - 1.0).abs());
    }
    if witness_err >= 1e-8 {
        bad.push(format!("shear witness off by {witness_err:.1e}"));
    }

    let mut scalar_worst = 0.0f64;
    for name in ["lorentz", "shear", "diffeo"] {
        let (w, b, _) = worst(&fixture(name), &[Check::GaugeScalar], 1e-8);
        scalar_worst = scalar_worst.max(w);
        bad.extend(b);
    }
    let (w, b, _) = worst(
        &Scenario::from_json(WAVY_FLAT_SOURCE).unwrap(),
        &[Check::GaugeScalar],
        1e-8,
    );
    scalar_worst = scalar_worst.max(w);
    bad.extend(b);
    let detail = format!(
        "flat-source Riemann {flat_worst:.1e}, |witness - 1| {witness_err:.1e}, gauge vs intrinsic scalar {scalar_worst:.1e}"
    );
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            detail
        } else {
            format!("{detail}; {}", bad.join(", "))
        },
    )
}

fn diffeomorphism() -> Outcome {
    let mut bad = Vec::new();
    let (w, b, _) = worst(
        &fixture("diffeo"),
        &[
            Check::DiffeoCommutator,
            Check::DiffeoFlatness,
            Check::TorsionFree,
        ],
        1e-8,
    );
    bad.extend(b);
    let (_, _, r) = worst(&fixture("shear"), &[Check::CommutatorDefect], 1e-8);
    let defect = r.checks[0].witness.unwrap_or(0.0);
    if defect < 0.9 {
        bad.push(format!("shear commutator defect {defect}"));
    }
    let detail = format!("diffeo residual {w:.1e}, shear commutator defect {defect:.3}");
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            detail
        } else {
            format!("{detail}; {}", bad.join(", "))
        },
    )
}

fn differentiation() -> Outcome {
    let mut first = 0.0f64;
    let mut second = 0.0f64;
    for name in GOOD {
        let s = fixture(name);
        let n = s.dim;
        let ad = s.structure(DerivativeConfig::ad());
        let fd = s.structure(DerivativeConfig::fd(1e-5));
        assert_eq!(fd.cfg().mode, DerivativeMode::Fd);
        for x in s.sample_points(42, Some(5)) {
            let p = excalc_core::fields::lift_point(&x);
            for i in 0..n {
                for j in 0..n {
                    let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
                    a[i] = 1.0;
                    b[j] = 1.0;
                    let u = ad.connection_at(&p, &a, &b).unwrap();
                    let v = fd.connection_at(&p, &a, &b).unwrap();
                    first = u
                        .iter()
                        .zip(&v)
                        .fold(first, |m, (u, v)| m.max((u - v).abs()));
                }
            }
            let (ca, cf) = (
                CurvatureAt::compute(&ad, &x).unwrap(),
                CurvatureAt::compute(&fd, &x).unwrap(),
            );
            second = second.max((ca.scalar() - cf.scalar()).abs());
            for (ra, rf) in ca.riemann_components().iter().zip(&cf.riemann_components()) {
                second = ra
                    .iter()
                    .zip(rf)
                    .fold(second, |m, (u, v)| m.max((u - v).abs()));
            }
        }
    }
    Outcome::new(
        first < 1e-4 && second < 1e-2,
        format!("connection {first:.1e} (< 1e-4), curvature {second:.1e} (< 1e-2)"),
    )
}

fn cli() -> Outcome {
    let dir = std::env::temp_dir().join(format!("excalc-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |args: &[&str], out: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_excalc"));
        cmd.args(args).current_dir(root());
        let path = out.map(|o| dir.join(o));
        if let Some(p) = &path {
            cmd.arg("--output").arg(p);
        }
        let code = cmd.output().unwrap().status.code();
        (code, path.and_then(|p| std::fs::read(p).ok()))
    };
    let mut bad = Vec::new();
    let args = [
        "check",
        "--scenario",
        "scenarios/sphere.json",
        "--samples",
        "4",
    ];
    let (c1, a) = run(&args, Some("a.json"));
    let (c2, b) = run(&args, Some("b.json"));
    let golden = std::fs::read(root().join("tests/golden/sphere_check.json")).ok();
    if a.is_none() || a != b || a != golden {
        bad.push("golden report mismatch");
    }
    if c1 != Some(0) || c2 != Some(0) {
        bad.push("pass fixture exit code");
    }
    if run(
        &["check", "--scenario", "scenarios/failing.json"],
        Some("f.json"),
    )
    .0 != Some(1)
    {
        bad.push("fail fixture exit code");
    }
    if run(&["check", "--scenario", "scenarios/parse_error.json"], None).0 != Some(2) {
        bad.push("parse-error fixture exit code");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Outcome::new(
        bad.is_empty(),
        if bad.is_empty() {
            "golden bytes equal across runs; exit codes 0/1/2".to_string()
        } else {
            bad.join(", ")
        },
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("algebra soundness", algebra),
        ("compatibility", compatibility),
        ("curvature identity suite", curvature_suite),
        ("Levi-Civita theorems", levi_civita),
        ("quantitative anchors", anchors),
        ("deformation theorems", deformation),
        ("diffeomorphism theorems", diffeomorphism),
        ("differentiation engine", differentiation),
        ("CLI determinism", cli),
    ];
    let mut failures = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        failures += usize::from(!o.pass);
        println!(
            "criterion {} {name}: {} ({})",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

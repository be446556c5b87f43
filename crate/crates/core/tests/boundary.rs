use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use subeq::boundary::*;
use subeq::catalog::{self, BranchKind, GrassmannSet, KExponent};
use subeq::sampling;
use subeq::Subequation;

fn klap(k: KExponent) -> Subequation {
    catalog::k_laplacian(k, 2).unwrap()
}

fn convex(n: usize) -> Subequation {
    catalog::make_branch(BranchKind::Real, 1, n).unwrap()
}

fn circle_points(r: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let th = 2.0 * PI * i as f64 / count as f64 + 0.1;
            vec![r * th.cos(), r * th.sin()]
        })
        .collect()
}

fn passes(f: &Subequation, d: &DomainSpec, x: &[f64]) -> bool {
    strict_convexity_test(f, d, x, &default_lambda_grid(1.0), DEFAULT_T_MAX)
        .unwrap()
        .overall
}

#[test]
fn spheres_have_curvature_one_over_r() {
    for n in 2..=4 {
        for r in [0.5, 1.0, 3.0] {
            let analytic = DomainSpec::ball(n, r);
            let r2 = r * r;
            let numeric = DomainSpec::new(
                n,
                "fd-ball",
                Arc::new(move |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>() - r2),
            );
            let mut x = vec![0.0; n];
            x[n - 1] = r;
            for d in [analytic, numeric] {
                let geo = second_fundamental_form(&d, &x).unwrap();
                assert_eq!(geo.frame.len(), n - 1);
                for k in geo.principal_curvatures() {
                    assert!((k - 1.0 / r).abs() <= 1e-6, "n={n} r={r} k={k}");
                }
            }
        }
    }
}

#[test]
fn ellipse_tip_curvature() {
    // x²/a² + y²/b² = 1 has curvature a/b² at (a, 0) and b/a² at (0, b)
    let (a, b) = (2.0, 0.5);
    let d = DomainSpec::from_expr("x^2/4 + y^2/0.25 - 1", 2).unwrap();
    let tip = second_fundamental_form(&d, &[a, 0.0]).unwrap();
    assert!((tip.ii.get(0, 0) - a / (b * b)).abs() <= 1e-5);
    let side = second_fundamental_form(&d, &[0.0, b]).unwrap();
    assert!((side.ii.get(0, 0) - b / (a * a)).abs() <= 1e-5);
}

#[test]
fn hyperplane_and_annulus() {
    let plane = DomainSpec::from_expr("x3", 3).unwrap();
    let geo = second_fundamental_form(&plane, &[0.4, -1.0, 0.0]).unwrap();
    assert!(geo.ii.frobenius() <= 1e-8);
    assert!((geo.nu[2] - 1.0).abs() <= 1e-12);

    let ann = DomainSpec::annulus(2, 1.0, 2.0);
    for x in circle_points(1.0, 5) {
        let g = second_fundamental_form(&ann, &x).unwrap();
        assert!((g.ii.get(0, 0) + 1.0).abs() <= 1e-6);
    }
    for x in circle_points(2.0, 5) {
        let g = second_fundamental_form(&ann, &x).unwrap();
        assert!((g.ii.get(0, 0) - 0.5).abs() <= 1e-6);
    }
}

#[test]
fn jet_has_normal_and_curvature() {
    let geo = second_fundamental_form(&DomainSpec::ball(2, 1.0), &[0.0, 1.0]).unwrap();
    let j = geo.jet(0.5, 8.0);
    assert_eq!(j.r, 0.5);
    assert!((j.a.get(1, 1) - 8.0).abs() <= 1e-9);
    assert!((j.a.get(0, 0) - 1.0).abs() <= 1e-9);
}

#[test]
fn laplacian_convexity_examples() {
    let disk = DomainSpec::ball(2, 1.0);
    let ann = DomainSpec::annulus(2, 1.0, 2.0);
    let star = DomainSpec::random_star(17);
    let one = klap(KExponent::Finite(1.0));
    let inf = klap(KExponent::Infinity);
    for x in circle_points(1.0, 20) {
        assert!(passes(&one, &disk, &x));
        assert!(passes(&inf, &disk, &x));
        assert!(!passes(&one, &ann, &x));
        assert!(passes(&inf, &ann, &x));
    }
    for x in circle_points(2.0, 20) {
        assert!(passes(&one, &ann, &x));
    }
    let pts = star.star_boundary_points(&[0.0, 0.0], 20).unwrap();
    let verdicts =
        scan_boundary(&inf, &star, &pts, &default_lambda_grid(1.0), DEFAULT_T_MAX).unwrap();
    assert!(verdicts.iter().all(|v| v.overall));
}

#[test]
fn k_one_follows_mean_curvature() {
    // for k = 1 the test jet gives |ν|²(t + tr II) − t = tr II
    let one = klap(KExponent::Finite(1.0));
    for seed in 0..4 {
        let star = DomainSpec::random_star(seed);
        for x in star.star_boundary_points(&[0.0, 0.0], 12).unwrap() {
            let tr = second_fundamental_form(&star, &x).unwrap().ii.trace();
            if tr.abs() > 1e-3 {
                assert_eq!(passes(&one, &star, &x), tr > 0.0);
            }
        }
    }
}

#[test]
fn convex_cone_agrees_with_positive_second_form() {
    let p = convex(2);
    for seed in 0..6 {
        let star = DomainSpec::random_star(seed);
        for x in star.star_boundary_points(&[0.0, 0.0], 12).unwrap() {
            let k = second_fundamental_form(&star, &x)
                .unwrap()
                .principal_curvatures()[0];
            if k.abs() > 1e-3 {
                assert_eq!(passes(&p, &star, &x), k > 0.0);
            }
        }
    }
    let peanut = DomainSpec::from_expr("x^2/4 + y^2 - 1 + 0.6*exp(-4*x^2)", 2).unwrap();
    let waist = [0.0, (0.4f64).sqrt()];
    assert!(
        second_fundamental_form(&peanut, &waist)
            .unwrap()
            .ii
            .get(0, 0)
            < 0.0
    );
    assert!(!passes(&p, &peanut, &waist));
}

#[test]
fn dual_of_convex_accepts_every_boundary() {
    // the normal direction carries eigenvalue ≈ t
    let pd = convex(2).dual();
    let ann = DomainSpec::annulus(2, 1.0, 2.0);
    for x in circle_points(1.0, 10)
        .into_iter()
        .chain(circle_points(2.0, 10))
    {
        assert!(passes(&pd, &ann, &x));
    }
}

#[test]
fn geometric_criterion_uses_tangent_planes() {
    // ∂Ω = {z = −(a x² − b y²)/2} at 0: ν = e₃, II = diag(a, −b)
    let frames = |extra: usize| {
        let mut f = vec![
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]],
            vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        ];
        f.extend(sampling::grassmann_frames(3, 2, extra));
        GrassmannSet::new(f).unwrap()
    };
    let g2 = catalog::geometric(frames(64));
    let p = convex(3);
    for (a, b, trace_positive) in [(2.0, 1.0, true), (1.0, 2.0, false)] {
        let d = DomainSpec::from_expr(&format!("z + ({a}*x^2 - {b}*y^2)/2"), 3).unwrap();
        let x = [0.0, 0.0, 0.0];
        let geo = second_fundamental_form(&d, &x).unwrap();
        assert!((geo.ii.trace() - (a - b)).abs() <= 1e-6);
        assert_eq!(passes(&g2, &d, &x), trace_positive);
        // one negative principal curvature rules out ordinary convexity
        assert!(!passes(&p, &d, &x));
    }
}

#[test]
fn errors() {
    let disk = DomainSpec::ball(2, 1.0);
    assert!(strict_convexity_test(&convex(3), &disk, &[1.0, 0.0], &[0.0], 16.0).is_err());
    assert!(strict_convexity_test(&convex(2), &disk, &[0.5, 0.0], &[0.0], 16.0).is_err());
    assert!(strict_convexity_test(&convex(2), &disk, &[1.0, 0.0], &[0.0], 0.5).is_err());
    let cy = catalog::calabi_yau(2);
    assert!(strict_convexity_test(&cy, &disk, &[1.0, 0.0], &[], 16.0).is_err());
    let cone = DomainSpec::from_expr("x^2 + y^2", 2).unwrap();
    assert!(second_fundamental_form(&cone, &[0.0, 0.0]).is_err());
}

#[test]
fn stable_from_is_reported() {
    // tr II = 1, so k = 2 (the Laplacian) passes from t = 1
    let lap = klap(KExponent::Finite(2.0));
    let v =
        strict_convexity_test(&lap, &DomainSpec::ball(2, 1.0), &[1.0, 0.0], &[0.0], 64.0).unwrap();
    assert!(v.overall);
    assert_eq!(v.per_lambda.len(), 1);
    assert_eq!(v.per_lambda[0].stable_from, Some(1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_points_have_radial_normal(th in 0.0f64..(2.0 * PI), phi in 0.1f64..3.0, r in 0.2f64..5.0) {
        let x = vec![r * phi.sin() * th.cos(), r * phi.sin() * th.sin(), r * phi.cos()];
        let geo = second_fundamental_form(&DomainSpec::ball(3, r), &x).unwrap();
        for (a, b) in geo.nu.iter().zip(&x) {
            prop_assert!((a - b / r).abs() <= 1e-12);
        }
        for t in &geo.frame {
            let dot: f64 = t.iter().zip(&geo.nu).map(|(a, b)| a * b).sum();
            prop_assert!(dot.abs() <= 1e-12);
        }
        prop_assert!(geo.ii.sub(&subeq::SymMatrix::scalar(2, 1.0 / r)).frobenius() <= 1e-10);
    }
}

use proptest::prelude::*;
use subeq::catalog::{self, BranchKind};
use subeq::checks::{convexity_check, monotonicity_check};
use subeq::garding::*;
use subeq::linalg::{sigma_k, Jet, SymMatrix};
use subeq::sampling::{self, SampleBox};
use subeq::subequation::EPS_B;
use subeq::{Class, Error};

/// Real roots of c₀ + c₁t + c₂t², ascending, by the textbook formula.
fn quadratic_roots(c: [f64; 3]) -> (f64, f64) {
    let disc = c[1] * c[1] - 4.0 * c[2] * c[0];
    assert!(disc >= 0.0);
    let s = disc.sqrt();
    let (a, b) = ((-c[1] - s) / (2.0 * c[2]), (-c[1] + s) / (2.0 * c[2]));
    (a.min(b), a.max(b))
}

/// Coefficients of the quadratic through (t, q(t)) at t = −1, 0, 1.
fn interpolate(q: impl Fn(f64) -> f64) -> [f64; 3] {
    let (m, z, p) = (q(-1.0), q(0.0), q(1.0));
    [z, 0.5 * (p - m), 0.5 * (p + m) - z]
}

#[test]
fn sigma2_example_against_oracle() {
    let q = HyperbolicPolynomial::sigma(2, 3).unwrap();
    let a = SymMatrix::from_diag(&[1.0, 1.0, -1.0]);
    let ev = garding_eigenvalues(&q, &a).unwrap();
    // q_A(t) = σ₂(tI + A)/3 = (3t² + 2t − 1)/3
    let c = interpolate(|t| sigma_k(&a.add_scalar(t), 2).unwrap() / 3.0);
    assert!((c[0] + 1.0 / 3.0).abs() < 1e-12);
    assert!((c[1] - 2.0 / 3.0).abs() < 1e-12);
    assert!((c[2] - 1.0).abs() < 1e-12);
    let (t1, t2) = quadratic_roots(c);
    let oracle = [-t2, -t1];
    assert!((ev[0] - oracle[0]).abs() <= 1e-9 && (ev[1] - oracle[1]).abs() <= 1e-9);
    assert!((ev[0] + 1.0 / 3.0).abs() <= 1e-9 && (ev[1] - 1.0).abs() <= 1e-9);

    assert!(branch_subequation(&q, 2)
        .unwrap()
        .member(None, &Jet::hessian(a.clone()))
        .is_member());
    assert_eq!(
        garding_cone(&q).member(None, &Jet::hessian(a)).class,
        Class::Outside
    );
}

#[test]
fn det_and_trace_examples() {
    let mut rng = sampling::rng(1);
    let det = HyperbolicPolynomial::det(2);
    let tr = HyperbolicPolynomial::sigma(1, 3).unwrap();
    for _ in 0..100 {
        let a = sampling::random_sym(2, (-4.0, 4.0), &mut rng);
        let g = garding_eigenvalues(&det, &a).unwrap();
        for (x, y) in g.iter().zip(a.eigenvalues()) {
            assert!((x - y).abs() < 1e-9);
        }
        let b = sampling::random_sym(3, (-4.0, 4.0), &mut rng);
        let g = garding_eigenvalues(&tr, &b).unwrap();
        assert_eq!(g.len(), 1);
        assert!((g[0] - b.trace() / 3.0).abs() < 1e-9);
    }
}

#[test]
fn normalization_and_homogeneity() {
    let q = HyperbolicPolynomial::new(2, 2, "2det", |a| 2.0 * a.to_dense().determinant()).unwrap();
    assert!((q.eval(&SymMatrix::identity(2)) - 1.0).abs() < 1e-12);
    let bad = HyperbolicPolynomial::new(2, 2, "tr", |a| a.trace());
    assert!(matches!(bad, Err(Error::NotHomogeneous { .. })));
    assert!(HyperbolicPolynomial::new(2, 2, "zero", |_| 0.0).is_err());
}

#[test]
fn hyperbolicity_examples() {
    for k in 1..=4 {
        let q = HyperbolicPolynomial::sigma(k, 4).unwrap();
        assert!(hyperbolicity_check(&q, 1000, 2).unwrap().passed(), "k={k}");
    }
    assert!(hyperbolicity_check(&HyperbolicPolynomial::det(3), 1000, 2)
        .unwrap()
        .passed());

    let q = HyperbolicPolynomial::new(2, 2, "a11a22+a12^2", |a| {
        a.get(0, 0) * a.get(1, 1) + a.get(0, 1) * a.get(0, 1)
    })
    .unwrap();
    let rep = hyperbolicity_check(&q, 1000, 3).unwrap();
    assert!(rep.failures > 0);
    assert!(rep.witness.is_some());
    // q(t) = t² + 1 at the swap matrix
    let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    match garding_eigenvalues(&q, &swap) {
        Err(Error::ComplexRoot { re, im }) => {
            assert!(re.abs() < 1e-9);
            assert!((im.abs() - 1.0).abs() < 1e-9);
        }
        other => panic!("expected a complex root, got {other:?}"),
    }
}

#[test]
fn sigma2_cone_matches_inequalities() {
    let q = HyperbolicPolynomial::sigma(2, 3).unwrap();
    let m = garding_cone(&q);
    let mut rng = sampling::rng(4);
    let b = SampleBox::default();
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let a = sampling::random_jet(3, &b, &mut rng).a;
        let s1 = sigma_k(&a, 1).unwrap();
        let s2 = sigma_k(&a, 2).unwrap();
        let rho = m.rho(None, &Jet::hessian(a));
        if rho.abs() < 1e-6 || s1.abs() < 1e-6 || s2.abs() < 1e-6 {
            continue;
        }
        if (rho > 0.0) != (s1 > 0.0 && s2 > 0.0) {
            mismatches += 1;
        }
    }
    assert_eq!(mismatches, 0);
}

#[test]
fn branches_monotone_under_garding_cone() {
    let b = SampleBox::default();
    let q = HyperbolicPolynomial::sigma(2, 3).unwrap();
    let m = garding_cone(&q);
    for k in 1..=2 {
        let f = branch_subequation(&q, k).unwrap();
        let rep = monotonicity_check(&f, &m, 10_000, k as u64, &b).unwrap();
        assert!(rep.passed() && rep.agree, "k={k}");
    }
    assert!(branch_subequation(&q, 3).is_err());
}

#[test]
fn garding_cone_convex_with_identity_inside() {
    for q in [
        HyperbolicPolynomial::sigma(2, 3).unwrap(),
        HyperbolicPolynomial::det(3),
    ] {
        let m = garding_cone(&q);
        assert!(convexity_check(&m, 10_000, 5, &SampleBox::default())
            .unwrap()
            .passed());
        assert_eq!(
            m.member(None, &Jet::hessian(SymMatrix::identity(3))).class,
            Class::Inside
        );
    }
}

#[test]
fn det_branches_are_ordinary_branches() {
    let q = HyperbolicPolynomial::det(3);
    let mut rng = sampling::rng(6);
    let b = SampleBox::default();
    for k in 1..=3 {
        let g = branch_subequation(&q, k).unwrap();
        let f = catalog::make_branch(BranchKind::Real, k, 3).unwrap();
        for _ in 0..10_000 {
            let j = sampling::random_jet(3, &b, &mut rng);
            let (x, y) = (g.rho(None, &j), f.rho(None, &j));
            if y.abs() > 1e-6 {
                assert_eq!(x > EPS_B, y > 0.0, "k={k}");
            }
        }
    }
}

#[test]
fn repeated_roots_resolve() {
    for n in 2..=5 {
        let q = HyperbolicPolynomial::det(n);
        let r = garding_roots(&q, &SymMatrix::scalar(n, 0.7)).unwrap();
        assert!(r.eigenvalues.iter().all(|v| (v - 0.7).abs() < 1e-6));
    }
}

fn sym3() -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-3.0f64..3.0, 6).prop_map(|v| {
        SymMatrix::from_rows(&[
            vec![v[0], v[1], v[2]],
            vec![v[1], v[3], v[4]],
            vec![v[2], v[4], v[5]],
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eigenvalues_shift_with_identity(a in sym3(), s in -4.0f64..4.0, k in 1usize..=3) {
        let q = HyperbolicPolynomial::sigma(k, 3).unwrap();
        let base = garding_eigenvalues(&q, &a);
        let moved = garding_eigenvalues(&q, &a.add_scalar(s));
        if let (Ok(base), Ok(moved)) = (base, moved) {
            for (x, y) in base.iter().zip(&moved) {
                prop_assert!((y - x - s).abs() <= 1e-8 * (1.0 + x.abs() + s.abs()));
            }
        }
    }

    #[test]
    fn roots_reconstruct_polynomial(a in sym3(), t in -2.0f64..2.0) {
        let q = HyperbolicPolynomial::sigma(2, 3).unwrap();
        let ev = garding_eigenvalues(&q, &a).unwrap();
        let direct = q.eval(&a.add_scalar(t));
        let product: f64 = ev.iter().map(|l| t + l).product();
        prop_assert!((direct - product).abs() <= 1e-8 * (1.0 + direct.abs()));
    }
}

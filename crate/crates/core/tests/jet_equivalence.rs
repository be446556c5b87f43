use std::sync::Arc;

use nalgebra::DMatrix;
use proptest::prelude::*;
use subeq::catalog::{self, BranchKind};
use subeq::checks::{axiom_check, Axiom};
use subeq::jet_equiv::*;
use subeq::linalg::{ComplexStructure, Jet, SymMatrix};
use subeq::sampling::{self, SampleBox};
use subeq::subequation::{ScalarField, EPS_B};
use subeq::{Class, Error};

fn dist(a: &Jet, b: &Jet) -> f64 {
    let d = a.sub(b);
    let mut m = d.r.abs();
    for v in d.p.iter().chain(d.a.upper()) {
        m = m.max(v.abs());
    }
    m
}

fn random_parts(n: usize, seed: u64) -> JetMapParts {
    let mut r = sampling::rng(seed);
    let g = sampling::random_orthogonal(n, &mut r) * 1.3 + DMatrix::identity(n, n) * 0.2;
    let h = sampling::random_orthogonal(n, &mut r) + DMatrix::identity(n, n) * 0.4;
    let l = (0..n)
        .map(|_| sampling::random_sym(n, (-1.0, 1.0), &mut r))
        .collect();
    let s = sampling::random_jet(n, &SampleBox::default(), &mut r);
    JetMapParts { g, h, l, s }
}

fn field(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> ScalarField {
    Arc::new(f)
}

#[test]
fn inhomogeneous_branch_examples() {
    let g = inhomogeneous_branch(1, 2, field(|x| x[0])).unwrap();
    let j = Jet::hessian(SymMatrix::from_diag(&[1.0, 2.0]));
    assert_eq!(g.member(Some(&[0.5, 0.0]), &j).class, Class::Inside);
    assert_eq!(g.member(Some(&[1.0, 0.0]), &j).class, Class::Boundary);
    assert_eq!(g.member(Some(&[1.5, 0.0]), &j).class, Class::Outside);
    assert!(g.flags().x_dependent);
}

#[test]
fn monge_ampere_matches_determinant() {
    let f = field(|x| 1.0 + x[0] * x[0]);
    let g = monge_ampere(3, f.clone()).unwrap();
    let mut rng = sampling::rng(7);
    let b = SampleBox::default();
    for _ in 0..10_000 {
        let j = sampling::random_jet(3, &b, &mut rng);
        let x = sampling::random_point(&[-1.0; 3], &[1.0; 3], &mut rng);
        let det = j.a.to_dense().determinant();
        let psd = j.a.min_eigenvalue() >= 0.0;
        let rho = g.rho(Some(&x), &j);
        let margin = (det - f(&x)).abs().min(j.a.min_eigenvalue().abs());
        if margin > 1e-6 && rho.abs() > EPS_B {
            assert_eq!(rho > 0.0, psd && det >= f(&x));
        }
    }
    // det scales as η^{2n}, so 2I meets det ≥ 8 exactly
    let eight = monge_ampere(3, field(|_| 8.0)).unwrap();
    let j = Jet::hessian(SymMatrix::scalar(3, 2.0));
    assert_eq!(eight.member(Some(&[0.0; 3]), &j).class, Class::Boundary);
}

#[test]
fn calabi_yau_det_against_dense_oracle() {
    let m = 2;
    let c = ComplexStructure::complex(m).unwrap();
    let f = field(|x| 0.5 + x[0] * x[0] + x[1].abs());
    let g = calabi_yau_det(m, f.clone()).unwrap();
    let mut rng = sampling::rng(9);
    let b = SampleBox::default();
    let mut checked = 0;
    for _ in 0..10_000 {
        let j = sampling::random_jet(4, &b, &mut rng);
        let x = sampling::random_point(&[-1.0; 4], &[1.0; 4], &mut rng);
        let a = j.a.to_dense();
        let jm = &c.matrices()[0];
        // ½(A − JAJ) + I commutes with J; its real determinant is |det_ℂ|²
        let herm = (&a - jm * &a * jm) * 0.5 + DMatrix::identity(4, 4);
        let min_ev = herm.clone().symmetric_eigenvalues().min();
        let det_c = herm.determinant().max(0.0).sqrt();
        let rho = g.rho(Some(&x), &j);
        if min_ev.abs() > 1e-6 && (det_c - f(&x)).abs() > 1e-6 && rho.abs() > EPS_B {
            assert_eq!(rho > 0.0, min_ev > 0.0 && det_c >= f(&x));
            checked += 1;
        }
    }
    assert!(checked > 9_000);
}

#[test]
fn calabi_yau_det_rejects_nonpositive_f() {
    let g = calabi_yau_det(1, field(|x| x[0])).unwrap();
    let j = Jet::hessian(SymMatrix::identity(2));
    assert!(g.rho(Some(&[-1.0, 0.0]), &j).is_nan());
    assert_eq!(g.member(Some(&[-1.0, 0.0]), &j).class, Class::Outside);
}

#[test]
fn round_trip_constant_maps() {
    let mut rng = sampling::rng(1);
    for (n, seed) in [(1, 1), (2, 2), (3, 3), (4, 4)] {
        let psi = AffineJetMap::constant(random_parts(n, seed), "psi").unwrap();
        let inv = invert(&psi).unwrap();
        let both = compose(&inv, &psi).unwrap();
        for _ in 0..500 {
            let j = sampling::random_jet(n, &SampleBox::default(), &mut rng);
            let back = inv.apply(None, &psi.apply(None, &j).unwrap()).unwrap();
            assert!(dist(&back, &j) <= 1e-10);
            assert!(dist(&both.apply(None, &j).unwrap(), &j) <= 1e-10);
        }
    }
}

#[test]
fn round_trip_variable_maps() {
    let psi = compose(
        &AffineJetMap::hessian_scaling(2, field(|x| 1.0 + x[1] * x[1])),
        &AffineJetMap::hessian_shift(2, field(|x| x[0].sin())),
    )
    .unwrap();
    let inv = invert(&psi).unwrap();
    let mut rng = sampling::rng(2);
    for _ in 0..500 {
        let x = sampling::random_point(&[-2.0; 2], &[2.0; 2], &mut rng);
        let j = sampling::random_jet(2, &SampleBox::default(), &mut rng);
        let back = inv
            .apply(Some(&x), &psi.apply(Some(&x), &j).unwrap())
            .unwrap();
        assert!(dist(&back, &j) <= 1e-10);
    }
}

#[test]
fn transform_then_pullback_restores_f() {
    let f = catalog::make_branch(BranchKind::Real, 2, 3).unwrap();
    let psi = AffineJetMap::constant(random_parts(3, 5), "psi").unwrap();
    let g = pullback_subequation(&transform_subequation(&f, &psi).unwrap(), &psi).unwrap();
    let mut rng = sampling::rng(3);
    for _ in 0..2_000 {
        let j = sampling::random_jet(3, &SampleBox::default(), &mut rng);
        let (a, b) = (f.rho(None, &j), g.rho(None, &j));
        assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }
}

#[test]
fn dual_of_image_is_image_of_dual_with_negated_translation() {
    let f = catalog::make_branch(BranchKind::Real, 1, 3).unwrap();
    let parts = random_parts(3, 6);
    let psi = AffineJetMap::constant(parts.clone(), "psi").unwrap();
    let flipped = AffineJetMap::constant(
        JetMapParts {
            s: parts.s.neg(),
            ..parts
        },
        "psi~",
    )
    .unwrap();
    let lhs = transform_subequation(&f, &psi).unwrap().dual();
    let rhs = transform_subequation(&f.dual(), &flipped).unwrap();
    let mut rng = sampling::rng(4);
    for _ in 0..10_000 {
        let j = sampling::random_jet(3, &SampleBox::default(), &mut rng);
        let (a, b) = (lhs.rho(None, &j), rhs.rho(None, &j));
        if a.abs() > 1e-8 && b.abs() > 1e-8 {
            assert_eq!(a > 0.0, b > 0.0);
        }
    }
}

#[test]
fn positivity_survives_transforms() {
    let b = SampleBox::default();
    for seed in 1..=4 {
        // a far translation only slows the rejection sampler down
        let parts = JetMapParts {
            s: Jet::zero(3),
            ..random_parts(3, seed)
        };
        let psi = AffineJetMap::constant(parts, "psi").unwrap();
        for k in 1..=3 {
            let f = catalog::make_branch(BranchKind::Real, k, 3).unwrap();
            let g = transform_subequation(&f, &psi).unwrap();
            assert!(axiom_check(&g, Axiom::P, 2_000, seed, &b).unwrap().passed());
        }
    }
}

#[test]
fn transform_flags() {
    let f = catalog::make_branch(BranchKind::Real, 1, 2).unwrap();
    let mut parts = JetMapParts::identity(2);
    parts.h = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
    let linear = AffineJetMap::constant(parts.clone(), "lin").unwrap();
    let g = transform_subequation(&f, &linear).unwrap();
    assert!(g.flags().cone && g.flags().pure_second_order);
    parts.s = Jet::new(1.0, vec![0.0, 0.0], SymMatrix::zeros(2));
    let affine = AffineJetMap::constant(parts, "aff").unwrap();
    let g = transform_subequation(&f, &affine).unwrap();
    assert!(!g.flags().cone && !g.flags().reduced);
}

#[test]
fn bad_maps_rejected() {
    let mut p = JetMapParts::identity(2);
    p.h = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    assert_eq!(
        AffineJetMap::constant(p, "flat").unwrap_err(),
        Error::Singular
    );
    let f = catalog::laplace(3);
    assert!(transform_subequation(&f, &AffineJetMap::identity(2)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn composition_is_associative(s1 in 0u64..1000, s2 in 0u64..1000, s3 in 0u64..1000, sj in 0u64..1000) {
        let a = AffineJetMap::constant(random_parts(3, s1), "a").unwrap();
        let b = AffineJetMap::constant(random_parts(3, s2), "b").unwrap();
        let c = AffineJetMap::constant(random_parts(3, s3), "c").unwrap();
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let j = sampling::random_jet(3, &SampleBox::default(), &mut sampling::rng(sj));
        let (x, y) = (left.apply(None, &j).unwrap(), right.apply(None, &j).unwrap());
        prop_assert!(dist(&x, &y) <= 1e-9 * (1.0 + dist(&x, &Jet::zero(3))));
    }
}

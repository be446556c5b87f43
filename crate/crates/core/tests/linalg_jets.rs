use nalgebra::DMatrix;
use proptest::prelude::*;
use subeq::linalg::*;
use subeq::sampling;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn eigenvalue_examples() {
    assert_eq!(
        SymMatrix::from_diag(&[3.0, 1.0, 2.0]).eigenvalues(),
        vec![1.0, 2.0, 3.0]
    );
    assert_eq!(SymMatrix::identity(3).eigenvalues(), vec![1.0, 1.0, 1.0]);
    let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let ev = ordered_eigenvalues(&swap).unwrap();
    // roots of t² − 1
    assert!(close(ev[0], -1.0, 1e-14) && close(ev[1], 1.0, 1e-14));
}

#[test]
fn two_by_two_closed_form() {
    let mut rng = sampling::rng(11);
    for _ in 0..200 {
        let a = sampling::random_sym(2, (-4.0, 4.0), &mut rng);
        let (p, q, s) = (a.get(0, 0), a.get(0, 1), a.get(1, 1));
        let disc = ((p - s) * (p - s) + 4.0 * q * q).sqrt();
        let ev = a.eigenvalues();
        assert!(close(ev[0], 0.5 * (p + s - disc), 1e-12));
        assert!(close(ev[1], 0.5 * (p + s + disc), 1e-12));
    }
}

#[test]
fn eigendecomposition_reconstructs() {
    let mut rng = sampling::rng(5);
    for n in 1..=8 {
        for _ in 0..20 {
            let a = sampling::random_sym(n, (-3.0, 3.0), &mut rng);
            let e = eigh(&a).unwrap();
            assert!(e.reconstruct().sub(&a).frobenius() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}

#[test]
fn three_by_three_against_nalgebra() {
    let mut rng = sampling::rng(8);
    for _ in 0..100 {
        let a = sampling::random_sym(3, (-2.0, 2.0), &mut rng);
        let mut oracle: Vec<f64> = a
            .to_dense()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        oracle.sort_by(f64::total_cmp);
        for (x, y) in a.eigenvalues().iter().zip(&oracle) {
            assert!(close(*x, *y, 1e-10));
        }
    }
}

#[test]
fn hermitian_part_examples() {
    let c = ComplexStructure::complex(1).unwrap();
    let h = hermitian_part(&SymMatrix::from_diag(&[2.0, 0.0]), &c).unwrap();
    assert!(h.sub(&SymMatrix::identity(2)).frobenius() < 1e-14);

    let h = hermitian_part(
        &SymMatrix::scalar(4, 1.5),
        &ComplexStructure::complex(2).unwrap(),
    )
    .unwrap();
    assert!(h.sub(&SymMatrix::scalar(4, 1.5)).frobenius() < 1e-14);

    let q = ComplexStructure::quaternionic(1).unwrap();
    let d = [1.0, -2.0, 4.0, 0.5];
    let h = hermitian_part(&SymMatrix::from_diag(&d), &q).unwrap();
    // brute force: ¼(A − IAI − JAJ − KAK) with explicit dense products
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
    let mut acc = a.clone();
    for m in q.matrices() {
        acc -= m * &a * m;
    }
    acc /= 4.0;
    let mean = d.iter().sum::<f64>() / 4.0;
    for i in 0..4 {
        for j in 0..4 {
            assert!(close(h.get(i, j), acc[(i, j)], 1e-14));
            assert!(close(h.get(i, j), if i == j { mean } else { 0.0 }, 1e-14));
        }
    }
}

#[test]
fn hermitian_part_commutes() {
    let mut rng = sampling::rng(3);
    for c in [
        ComplexStructure::complex(2).unwrap(),
        ComplexStructure::quaternionic(1).unwrap(),
    ] {
        let n = c.ambient_dim();
        let a = sampling::random_sym(n, (-3.0, 3.0), &mut rng);
        let h = hermitian_part(&a, &c).unwrap().to_dense();
        for m in c.matrices() {
            assert!((m * &h - &h * m).amax() < 1e-12);
        }
    }
    let bad = hermitian_part(
        &SymMatrix::identity(3),
        &ComplexStructure::complex(1).unwrap(),
    );
    assert!(bad.is_err());
}

#[test]
fn sigma_examples() {
    let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
    assert!(close(sigma_k(&a, 1).unwrap(), a.trace(), 1e-12));
    assert!(close(
        sigma_k(&SymMatrix::from_diag(&[2.0, 3.0, 4.0]), 3).unwrap(),
        24.0,
        1e-12
    ));
    assert!(close(
        sigma_k(&SymMatrix::from_diag(&[1.0, 1.0, -1.0]), 2).unwrap(),
        -1.0,
        1e-12
    ));
    assert!(sigma_k(&a, 3).is_err());
    assert!(sigma_k(&a, 0).is_err());
}

#[test]
fn pucci_examples() {
    let mut rng = sampling::rng(4);
    let b = sampling::random_psd(3, 2.0, &mut rng);
    assert!(close(pucci_minus(&b, 1.0, 2.0).unwrap(), b.trace(), 1e-12));
    assert!(close(
        pucci_minus(&SymMatrix::from_diag(&[2.0, -1.0]), 1.0, 2.0).unwrap(),
        0.0,
        1e-14
    ));
    let e = [0.6, 0.0, 0.8];
    let b = SymMatrix::identity(3).sub(&SymMatrix::line_projection(&e).scale(2.0));
    assert!(close(pucci_minus(&b, 1.0, 2.0).unwrap(), 0.0, 1e-12));
    assert!(pucci_minus(&b, 2.0, 1.0).is_err());
    assert!(pucci_minus(&b, 0.0, 1.0).is_err());
}

#[test]
fn trace_on_plane_examples() {
    let a = SymMatrix::from_diag(&[1.0, 2.0, 3.0]);
    let e1 = vec![1.0, 0.0, 0.0];
    let e2 = vec![0.0, 1.0, 0.0];
    let e3 = vec![0.0, 0.0, 1.0];
    assert!(close(
        trace_on_plane(&a, &[e1.clone(), e2.clone()]).unwrap(),
        3.0,
        1e-14
    ));
    assert!(close(
        trace_on_plane(&a, &[e1, e2, e3]).unwrap(),
        a.trace(),
        1e-14
    ));
    let swap = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    assert!(close(
        trace_on_plane(&swap, &[vec![s, s]]).unwrap(),
        1.0,
        1e-14
    ));
    assert!(matches!(
        trace_on_plane(&swap, &[vec![1.0, 0.0], vec![1.0, 0.0]]),
        Err(subeq::Error::NotOrthonormal(_))
    ));
}

#[test]
fn jet_arithmetic() {
    let j = Jet::new(1.0, vec![1.0, -2.0], SymMatrix::from_diag(&[1.0, 2.0]));
    let z = j.add(&j.neg());
    assert_eq!(z, Jet::zero(2));
    assert_eq!(j.scale(2.0).sub(&j), j);
    assert!(close(j.p_norm(), 5f64.sqrt(), 1e-15));
}

fn sym_strategy(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-5.0f64..5.0, n * (n + 1) / 2).prop_map(move |v| {
        let mut a = SymMatrix::zeros(n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                a.set(i, j, v[k]);
                k += 1;
            }
        }
        a
    })
}

fn psd_strategy(n: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| {
        let b = DMatrix::from_row_slice(n, n, &v);
        SymMatrix::from_dense(&(&b * b.transpose()))
    })
}

fn sized_pair() -> impl Strategy<Value = (SymMatrix, SymMatrix)> {
    (1usize..=6).prop_flat_map(|n| (sym_strategy(n), psd_strategy(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eigenvalues_monotone_under_psd((a, p) in sized_pair()) {
        let lo = a.eigenvalues();
        let hi = a.add(&p).eigenvalues();
        for (x, y) in lo.iter().zip(&hi) {
            prop_assert!(*x <= *y + 1e-10);
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace(a in (1usize..=6).prop_flat_map(sym_strategy)) {
        let s: f64 = a.eigenvalues().iter().sum();
        prop_assert!((s - a.trace()).abs() <= 1e-10 * (1.0 + a.frobenius()));
    }

    #[test]
    fn pucci_brackets_trace(b in (1usize..=5).prop_flat_map(sym_strategy), lam in 0.1f64..1.0, gap in 0.01f64..3.0) {
        let big = lam + gap;
        let b = if b.trace() < 0.0 { b.scale(-1.0) } else { b };
        let lo = pucci_minus(&b, lam, big).unwrap();
        let hi = pucci_plus(&b, lam, big).unwrap();
        prop_assert!(lo <= lam * b.trace() + 1e-10);
        prop_assert!(lam * b.trace() <= hi + 1e-10);
    }

    #[test]
    fn pucci_plus_is_negated_minus(b in (1usize..=4).prop_flat_map(sym_strategy)) {
        let plus = pucci_plus(&b, 0.5, 2.0).unwrap();
        let minus = pucci_minus(&b.scale(-1.0), 0.5, 2.0).unwrap();
        prop_assert_eq!(plus, -minus);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hermitian_part_is_linear_projection(a in sym_strategy(4), b in sym_strategy(4)) {
        for c in [ComplexStructure::complex(2).unwrap(), ComplexStructure::quaternionic(1).unwrap()] {
            let ha = hermitian_part(&a, &c).unwrap();
            let hha = hermitian_part(&ha, &c).unwrap();
            prop_assert!(hha.sub(&ha).frobenius() <= 1e-10);
            let hsum = hermitian_part(&a.add(&b), &c).unwrap();
            let sumh = ha.add(&hermitian_part(&b, &c).unwrap());
            prop_assert!(hsum.sub(&sumh).frobenius() <= 1e-10);
        }
    }

    #[test]
    fn sigma_of_identity_is_binomial(n in 1usize..=8, k in 1usize..=8) {
        prop_assume!(k <= n);
        let s = sigma_k(&SymMatrix::identity(n), k).unwrap();
        prop_assert!((s - binomial(n, k)).abs() <= 1e-9 * binomial(n, k));
    }
}

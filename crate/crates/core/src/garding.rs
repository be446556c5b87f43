//! Gårding hyperbolic polynomials and their eigenvalues.
//!
//! For Q hyperbolic in the direction I with Q(I) = 1, the Gårding
//! eigenvalues of A are the negated roots of q_A(t) = Q(tI + A). The
//! polynomial q_A is recovered from m + 1 Chebyshev samples and its roots
//! are the eigenvalues of the companion matrix.
//!
//! A k-fold real root comes back from the companion matrix as a small
//! cluster of size about ε^{1/k}. Non-real roots lying within 1e-3 (relative)
//! of other roots are averaged into one cluster and re-centred by Newton's
//! method on q^{(k−1)}; real roots closer than 1e-6 are treated the same
//! way. A true complex pair that close to the real axis
//! cannot be told apart from a perturbed multiple root at double precision,
//! so each merge is counted in the returned diagnostics.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::catalog::combinations;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::sampling;
use crate::subequation::Subequation;

pub type PolyEval = Arc<dyn Fn(&SymMatrix) -> f64 + Send + Sync>;

/// Imaginary parts up to this fraction of (1 + |root|) count as real.
pub const REAL_TOL: f64 = 1e-6;
const CLUSTER_RADIUS: f64 = 1e-3;
const REAL_CLUSTER_RADIUS: f64 = 1e-6;
const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Clone)]
pub struct HyperbolicPolynomial {
    n: usize,
    m: usize,
    eval: PolyEval,
    label: String,
}

impl std::fmt::Debug for HyperbolicPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HyperbolicPolynomial")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("label", &self.label)
            .finish()
    }
}

const HOMOGENEITY_SEED: u64 = 0x686f6d6f;

impl HyperbolicPolynomial {
    /// Wraps a black-box evaluator of degree `m` on n×n matrices, rescaling
    /// so that Q(I) = 1 and checking Q(tA) = t^m Q(A) at t ∈ {2, 1/3}.
    pub fn new(
        n: usize,
        m: usize,
        label: impl Into<String>,
        f: impl Fn(&SymMatrix) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(
                "degree and dimension must be ≥ 1".into(),
            ));
        }
        let qi = f(&SymMatrix::identity(n));
        if !(qi.is_finite() && qi != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Q(I) = {qi} cannot be normalized"
            )));
        }
        let eval: PolyEval = Arc::new(move |a| f(a) / qi);
        let mut rng = sampling::rng(HOMOGENEITY_SEED);
        for _ in 0..4 {
            let a = sampling::random_sym(n, (-2.0, 2.0), &mut rng);
            let qa = eval(&a);
            for t in [2.0f64, 1.0 / 3.0] {
                let want = t.powi(m as i32) * qa;
                let defect = (eval(&a.scale(t)) - want).abs();
                if defect > 1e-9 * (1.0 + want.abs()) {
                    return Err(Error::NotHomogeneous { degree: m, defect });
                }
            }
        }
        Ok(HyperbolicPolynomial {
            n,
            m,
            eval,
            label: label.into(),
        })
    }

    /// det(A).
    pub fn det(n: usize) -> Self {
        Self::new(n, n, "det", |a| a.to_dense().determinant()).expect("det is homogeneous")
    }

    /// σ_k(A)/C(n, k), evaluated as a sum of principal k×k minors.
    pub fn sigma(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "sigma:k needs 1 ≤ k ≤ n, got k={k}, n={n}"
            )));
        }
        let subsets = combinations(n, k);
        Self::new(n, k, format!("sigma:{k}"), move |a| {
            subsets
                .iter()
                .map(|idx| DMatrix::from_fn(k, k, |i, j| a.get(idx[i], idx[j])).determinant())
                .sum::<f64>()
        })
    }

    /// "det" or "sigma:k".
    pub fn named(name: &str, n: usize) -> Result<Self> {
        if name == "det" {
            return Ok(Self::det(n));
        }
        if let Some(k) = name.strip_prefix("sigma:") {
            let k: usize = k
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad sigma degree in {name}")))?;
            return Self::sigma(k, n);
        }
        Err(Error::UnknownName(name.to_string()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, a: &SymMatrix) -> f64 {
        (self.eval)(a)
    }
}

/// Roots of q_A with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GardingRoots {
    /// Gårding eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Largest |Im t| / (1 + |t|) among roots kept as simple.
    pub max_imag_ratio: f64,
    /// Number of companion eigenvalues merged into multiple-root clusters.
    pub clustered: usize,
}

fn poly_eval(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * s + ci)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &ci)| i as f64 * ci)
        .collect()
}

/// Monic coefficients (ascending powers) of s ↦ q_A(R s) / R^m.
fn scaled_coefficients(q: &HyperbolicPolynomial, a: &SymMatrix, scale: f64) -> Vec<f64> {
    let m = q.m;
    let nodes: Vec<f64> = (0..=m)
        .map(|j| ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * (m + 1)) as f64).cos())
        .collect();
    let values = DVector::from_iterator(
        m + 1,
        nodes.iter().map(|&s| q.eval(&a.add_scalar(scale * s))),
    );
    let vander = DMatrix::from_fn(m + 1, m + 1, |i, j| nodes[i].powi(j as i32));
    let c = vander
        .lu()
        .solve(&values)
        .expect("Chebyshev Vandermonde is invertible");
    let lead = c[m];
    c.iter().map(|x| x / lead).collect()
}

/// Negated roots of t ↦ Q(tI + A), with cluster diagnostics.
pub fn garding_roots(q: &HyperbolicPolynomial, a: &SymMatrix) -> Result<GardingRoots> {
    if a.n() != q.n {
        return Err(Error::Dimension {
            expected: q.n,
            got: a.n(),
        });
    }
    let m = q.m;
    let scale = 1.0 + a.frobenius();
    let c = scaled_coefficients(q, a, scale);
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Reconstruction(f64::INFINITY));
    }

    let roots: Vec<(f64, f64)> = if m == 1 {
        vec![(-c[0], 0.0)]
    } else {
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..m {
            comp[(i, m - 1)] = -c[i];
        }
        comp.complex_eigenvalues()
            .iter()
            .map(|z| (z.re, z.im))
            .collect()
    };

    let non_real = |(re, im): (f64, f64)| im.abs() > REAL_TOL * (1.0 + (re * re + im * im).sqrt());
    // union-find over companion eigenvalues that are close enough to be one
    // perturbed multiple root
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (roots[i], roots[j]);
            let size = 1.0
                + (a.0 * a.0 + a.1 * a.1)
                    .sqrt()
                    .max((b.0 * b.0 + b.1 * b.1).sqrt());
            let radius = if non_real(a) || non_real(b) {
                CLUSTER_RADIUS
            } else {
                REAL_CLUSTER_RADIUS
            } * size;
            if ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..m {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut cluster_of = vec![usize::MAX; m];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for members in groups.into_values() {
        if members.len() > 1 || non_real(roots[members[0]]) {
            for &i in &members {
                cluster_of[i] = clusters.len();
            }
            clusters.push(members);
        }
    }

    let mut out = Vec::with_capacity(m);
    let mut max_imag_ratio: f64 = 0.0;
    let mut clustered = 0;
    for (i, &(re, im)) in roots.iter().enumerate() {
        if cluster_of[i] == usize::MAX {
            max_imag_ratio = max_imag_ratio.max(im.abs() / (1.0 + (re * re + im * im).sqrt()));
            out.push(re);
        }
    }
    for members in &clusters {
        let k = members.len();
        let re = members.iter().map(|&i| roots[i].0).sum::<f64>() / k as f64;
        let im = members.iter().map(|&i| roots[i].1).sum::<f64>() / k as f64;
        if k == 1 || im.abs() > REAL_TOL * (1.0 + re.abs()) {
            let (r0, i0) = roots[members[0]];
            return Err(Error::ComplexRoot {
                re: -r0 * scale,
                im: i0 * scale,
            });
        }
        let mut d = c.clone();
        for _ in 0..k - 1 {
            d = poly_derivative(&d);
        }
        let dd = poly_derivative(&d);
        let mut s = re;
        for _ in 0..8 {
            let slope = poly_eval(&dd, s);
            if slope == 0.0 {
                break;
            }
            let step = poly_eval(&d, s) / slope;
            if !step.is_finite() || step.abs() > CLUSTER_RADIUS * (1.0 + re.abs()) {
                break;
            }
            s -= step;
        }
        clustered += k;
        out.extend(std::iter::repeat_n(s, k));
    }

    let mut eigenvalues: Vec<f64> = out.iter().map(|s| -s * scale).collect();
    eigenvalues.sort_by(f64::total_cmp);

    for frac in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        let t = frac * scale;
        let direct = q.eval(&a.add_scalar(t));
        let prod: f64 = eigenvalues.iter().map(|l| t + l).product();
        let size: f64 = eigenvalues.iter().map(|l| t.abs() + l.abs()).product();
        let defect = (direct - prod).abs();
        if defect > RECONSTRUCTION_TOL * (1.0 + size) {
            return Err(Error::Reconstruction(defect));
        }
    }
    Ok(GardingRoots {
        eigenvalues,
        max_imag_ratio,
        clustered,
    })
}

/// Ascending Gårding eigenvalues λ₁^Q(A) ≤ … ≤ λ_m^Q(A).
pub fn garding_eigenvalues(q: &HyperbolicPolynomial, a: &SymMatrix) -> Result<Vec<f64>> {
    garding_roots(q, a).map(|r| r.eigenvalues)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub label: String,
    pub trials: usize,
    pub failures: usize,
    pub clustered: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SymMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_root: Option<(f64, f64)>,
}

impl HyperbolicityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Samples random symmetric A (eigenvalues in [−5, 5]) and flags those for
/// which q_A has a non-real root.
pub fn hyperbolicity_check(
    q: &HyperbolicPolynomial,
    trials: usize,
    seed: u64,
) -> Result<HyperbolicityReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report = HyperbolicityReport {
        label: q.label.clone(),
        trials,
        failures: 0,
        clustered: 0,
        witness: None,
        witness_root: None,
    };
    for _ in 0..trials {
        let a = sampling::random_sym(q.n, (-5.0, 5.0), &mut rng);
        match garding_roots(q, &a) {
            Ok(r) => report.clustered += r.clustered,
            Err(e) => {
                report.failures += 1;
                if report.witness.is_none() {
                    report.witness = Some(a);
                    if let Error::ComplexRoot { re, im } = e {
                        report.witness_root = Some((re, im));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Λ_{Q,k} = {λ_k^Q(A) ≥ 0}. Inputs where q_A is not real-rooted get
/// rho = NaN and classify as outside.
pub fn branch_subequation(q: &HyperbolicPolynomial, k: usize) -> Result<Subequation> {
    if k == 0 || k > q.m {
        return Err(Error::InvalidParameter(format!(
            "Gårding branch needs 1 ≤ k ≤ {}, got {k}",
            q.m
        )));
    }
    let qq = q.clone();
    Ok(Subequation::pure(
        q.n,
        format!("garding:{}:k={k}:n={}", q.label, q.n),
        true,
        move |a| match garding_eigenvalues(&qq, a) {
            Ok(v) => v[k - 1],
            Err(_) => f64::NAN,
        },
    ))
}

/// The Gårding cone 𝐌_Q = Λ_{Q,1}.
pub fn garding_cone(q: &HyperbolicPolynomial) -> Subequation {
    branch_subequation(q, 1).expect("k = 1 is always valid")
}

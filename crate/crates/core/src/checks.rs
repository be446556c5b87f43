//! Sampled verification of the positivity and negativity axioms and of
//! monotonicity F + M ⊂ F, including the dual form F + F̃ ⊂ M̃, and of
//! midpoint convexity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Jet, SymMatrix};
use crate::sampling::{self, SampleBox, SeededRng};
use crate::subequation::{sample_x, Subequation, EPS_B};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    P,
    N,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Option<Vec<f64>>,
    pub jet: Jet,
    pub added: Jet,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub label: String,
    pub axiom: String,
    pub trials: usize,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ViolationReport {
    fn new(label: &str, axiom: &str, trials: usize) -> Self {
        ViolationReport {
            label: label.to_string(),
            axiom: axiom.to_string(),
            trials,
            violations: 0,
            witness: None,
        }
    }

    fn record(&mut self, w: Witness) {
        self.violations += 1;
        if self.witness.is_none() {
            self.witness = Some(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Draws (x, J) with `accept(rho(x, J))`, giving up after
/// [`sampling::MAX_DRAWS`] candidates.
pub fn sample_where(
    f: &Subequation,
    b: &SampleBox,
    rng: &mut SeededRng,
    accept: impl Fn(f64) -> bool,
) -> Result<(Option<Vec<f64>>, Jet)> {
    for _ in 0..sampling::MAX_DRAWS {
        let x = sample_x(f, b, rng);
        let j = sampling::random_jet(f.n(), b, rng);
        if accept(f.rho(x.as_deref(), &j)) {
            return Ok((x, j));
        }
    }
    Err(Error::SamplerExhausted {
        label: f.label().to_string(),
        draws: sampling::MAX_DRAWS,
    })
}

/// Jet sampled from `f` at a given point (for x-dependent pairs).
fn sample_at(
    f: &Subequation,
    x: Option<&[f64]>,
    b: &SampleBox,
    rng: &mut SeededRng,
) -> Result<Jet> {
    for _ in 0..sampling::MAX_DRAWS {
        let j = sampling::random_jet(f.n(), b, rng);
        if f.rho(x, &j) >= 0.0 {
            return Ok(j);
        }
    }
    Err(Error::SamplerExhausted {
        label: f.label().to_string(),
        draws: sampling::MAX_DRAWS,
    })
}

/// Samples members J of F and checks J + (0, 0, P) (axiom P, P ⪰ 0 random)
/// or J + (−s, 0, 0) (axiom N, s ∈ [0, 5]) stays in F.
pub fn axiom_check(
    f: &Subequation,
    axiom: Axiom,
    trials: usize,
    seed: u64,
    b: &SampleBox,
) -> Result<ViolationReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let n = f.n();
    let mut rng = sampling::rng(seed);
    let name = match axiom {
        Axiom::P => "P",
        Axiom::N => "N",
    };
    let mut report = ViolationReport::new(f.label(), name, trials);
    for _ in 0..trials {
        let (x, j) = sample_where(f, b, &mut rng, |v| v >= 0.0)?;
        let added = match axiom {
            Axiom::P => Jet::hessian(sampling::random_psd(n, 5.0, &mut rng)),
            Axiom::N => Jet::new(
                -rng.random_range(0.0..5.0),
                vec![0.0; n],
                SymMatrix::zeros(n),
            ),
        };
        let v = f.rho(x.as_deref(), &j.add(&added));
        if v.is_nan() || v < -EPS_B {
            report.record(Witness {
                x,
                jet: j,
                added,
                rho: v,
            });
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// F + M ⊂ F.
    pub primal: ViolationReport,
    /// F + F̃ ⊂ M̃.
    pub dual_form: ViolationReport,
    /// Both forms reach the same verdict.
    pub agree: bool,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.primal.passed() && self.dual_form.passed()
    }
}

fn inclusion_check(
    g: &Subequation,
    m: &Subequation,
    target: &Subequation,
    tag: &str,
    trials: usize,
    rng: &mut SeededRng,
    b: &SampleBox,
) -> Result<ViolationReport> {
    let mut report = ViolationReport::new(target.label(), tag, trials);
    for _ in 0..trials {
        let (x, j) = sample_where(g, b, rng, |v| v > EPS_B)?;
        let jm = sample_at(m, x.as_deref(), b, rng)?;
        let v = target.rho(x.as_deref(), &j.add(&jm));
        if v.is_nan() || v < -EPS_B {
            report.record(Witness {
                x,
                jet: j,
                added: jm,
                rho: v,
            });
        }
    }
    Ok(report)
}

/// Sampled test of F + M ⊂ F together with the equivalent dual form
/// F + F̃ ⊂ M̃.
pub fn monotonicity_check(
    f: &Subequation,
    m: &Subequation,
    trials: usize,
    seed: u64,
    b: &SampleBox,
) -> Result<MonotonicityReport> {
    if f.n() != m.n() {
        return Err(Error::Dimension {
            expected: f.n(),
            got: m.n(),
        });
    }
    if !m.flags().cone {
        return Err(Error::InvalidParameter(format!(
            "{} is not a cone",
            m.label()
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let primal = inclusion_check(
        f,
        m,
        f,
        &format!("F+M, M={}", m.label()),
        trials,
        &mut rng,
        b,
    )?;
    let m_dual = m.dual();
    let dual_form = inclusion_check(
        f,
        &f.dual(),
        &m_dual,
        &format!("F+dual(F) in dual(M), M={}", m.label()),
        trials,
        &mut rng,
        b,
    )?;
    let agree = primal.passed() == dual_form.passed();
    Ok(MonotonicityReport {
        primal,
        dual_form,
        agree,
    })
}

/// Midpoint convexity on sampled member pairs: for J₁, J₂ ∈ F at a common x,
/// (J₁ + J₂)/2 ∈ F.
pub fn convexity_check(
    f: &Subequation,
    trials: usize,
    seed: u64,
    b: &SampleBox,
) -> Result<ViolationReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
    }
    let mut rng = sampling::rng(seed);
    let mut report = ViolationReport::new(f.label(), "convex", trials);
    for _ in 0..trials {
        let (x, j1) = sample_where(f, b, &mut rng, |v| v >= 0.0)?;
        let j2 = sample_at(f, x.as_deref(), b, &mut rng)?;
        let mid = j1.add(&j2).scale(0.5);
        let v = f.rho(x.as_deref(), &mid);
        if v.is_nan() || v < -EPS_B {
            report.record(Witness {
                x,
                jet: j1,
                added: j2,
                rho: v,
            });
        }
    }
    Ok(report)
}

//! Names for catalog objects, as used on the command line.
//!
//! A name is a family followed by `:`-separated fields, either bare words or
//! `key=value` pairs, e.g. `branch:real:k=1:n=3` or `pucci:lam=1:Lam=2:n=3`.
//! A field `f=<expr>` takes the rest of the name, so expressions may contain
//! colons. Two prefixes wrap another name: `dual:<name>` and
//! `reg:d=<δ>:<name>`. When `n` is omitted the caller's default applies.
//!
//! | family | fields |
//! |---|---|
//! | `laplace` | `n` |
//! | `branch` | `real`/`complex`/`quaternionic`, `k`, `n` (over ℂ or ℍ) |
//! | `pbranch` | `p`, `k`, `n` |
//! | `pcone` | `p`, `n` |
//! | `pucci` | `lam`, `Lam`, `n` |
//! | `delta` | `d`, `n` |
//! | `sigma` | `k`, `n` |
//! | `slag` | `c` (default 0), `n` |
//! | `calabi_yau` | `n` |
//! | `klap` | `k` (a number or `inf`), `n` |
//! | `geometric` | `p`, `n` |
//! | `mcone` | `case` (1 to 6), `gamma`, `lambda`, `R`, `n` |
//! | `garding` | `det`, `sigma:<m>` or `sigma=<m>`, optional `k`, `n` |
//! | `inhom:branch` | `k`, `n`, `f` |
//! | `ma1`, `ma` | `n`, and `f` for `ma` |
//! | `cdet1`, `calabi-yau` | `m`, and `f` for `calabi-yau` |
//!
//! Cases (3) and (4) of `mcone` use the positive orthant as the cone of
//! gradient directions.

use std::collections::BTreeMap;

use crate::catalog::{
    self, BranchKind, DirectionalCone, Elliptic, GrassmannSet, KExponent, MonotonicityCase,
};
use crate::error::{Error, Result};
use crate::expr;
use crate::garding::{self, HyperbolicPolynomial};
use crate::jet_equiv;
use crate::subequation::Subequation;

struct Fields {
    name: String,
    words: Vec<String>,
    kv: BTreeMap<String, String>,
}

impl Fields {
    fn parse(name: &str, tokens: &[&str]) -> Result<Self> {
        let mut words = Vec::new();
        let mut kv = BTreeMap::new();
        let mut i = 0;
        while i < tokens.len() {
            let t = tokens[i];
            if let Some(rest) = t.strip_prefix("f=") {
                let mut e = rest.to_string();
                for more in &tokens[i + 1..] {
                    e.push(':');
                    e.push_str(more);
                }
                kv.insert("f".to_string(), e);
                break;
            }
            match t.split_once('=') {
                Some((k, v)) => {
                    if kv.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(bad(name, &format!("field {k} given twice")));
                    }
                }
                None if !t.is_empty() => words.push(t.to_string()),
                None => return Err(bad(name, "empty field")),
            }
            i += 1;
        }
        Ok(Fields {
            name: name.to_string(),
            words,
            kv,
        })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.kv.remove(key)
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.take(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| bad(&self.name, &format!("{key}={v} is not a valid number"))),
        }
    }

    fn req<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        self.num(key)?
            .ok_or_else(|| bad(&self.name, &format!("missing field {key}")))
    }

    fn dim(&mut self, default_n: Option<usize>) -> Result<usize> {
        match self.num("n")? {
            Some(n) => Ok(n),
            None => default_n.ok_or_else(|| bad(&self.name, "missing field n")),
        }
    }

    fn word(&mut self) -> Option<String> {
        if self.words.is_empty() {
            None
        } else {
            Some(self.words.remove(0))
        }
    }

    fn field(&mut self, n: usize) -> Result<crate::ScalarField> {
        let src = self
            .take("f")
            .ok_or_else(|| bad(&self.name, "missing field f"))?;
        expr::parse_field(&src, n)
    }

    fn finish(self) -> Result<()> {
        if let Some(w) = self.words.first() {
            return Err(bad(&self.name, &format!("unexpected field {w}")));
        }
        if let Some(k) = self.kv.keys().next() {
            return Err(bad(&self.name, &format!("unexpected field {k}")));
        }
        Ok(())
    }
}

fn bad(name: &str, msg: &str) -> Error {
    Error::InvalidParameter(format!("{name}: {msg}"))
}

/// Resolves a subequation name. `default_n` fills in a missing `n`.
pub fn subequation(name: &str, default_n: Option<usize>) -> Result<Subequation> {
    let name = name.trim();
    if let Some(rest) = name.strip_prefix("dual:") {
        return Ok(subequation(rest, default_n)?.dual());
    }
    if let Some(rest) = name.strip_prefix("reg:") {
        let (d, inner) = rest
            .split_once(':')
            .ok_or_else(|| bad(name, "expected reg:d=<δ>:<name>"))?;
        let d: f64 = d
            .strip_prefix("d=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(name, "expected reg:d=<δ>:<name>"))?;
        return catalog::regularize(&subequation(inner, default_n)?, d);
    }
    let tokens: Vec<&str> = name.split(':').collect();
    let family = tokens[0];
    if family == "inhom" {
        if tokens.get(1) != Some(&"branch") {
            return Err(bad(name, "expected inhom:branch:k=..:n=..:f=.."));
        }
        let mut fl = Fields::parse(name, &tokens[2..])?;
        let k = fl.req("k")?;
        let n = fl.dim(default_n)?;
        let f = fl.field(n)?;
        fl.finish()?;
        return jet_equiv::inhomogeneous_branch(k, n, f);
    }
    let mut fl = Fields::parse(name, &tokens[1..])?;
    let out = match family {
        "laplace" => catalog::laplace(fl.dim(default_n)?),
        "branch" => {
            let kind = match fl.word().as_deref() {
                Some("real") | None => BranchKind::Real,
                Some("complex") => BranchKind::Complex,
                Some("quaternionic") => BranchKind::Quaternionic,
                Some(w) => return Err(bad(name, &format!("unknown branch kind {w}"))),
            };
            let k = fl.req("k")?;
            let n = fl.dim(default_n)?;
            catalog::make_branch(kind, k, n)?
        }
        "pbranch" => {
            let p = fl.req("p")?;
            let k = fl.req("k")?;
            let n = fl.dim(default_n)?;
            catalog::make_p_branch(p, k, n)?
        }
        "pcone" => {
            let p = fl.req("p")?;
            catalog::make_pcone(p, fl.dim(default_n)?)?
        }
        "pucci" => {
            let lam = fl.req("lam")?;
            let big_lam = fl.req("Lam")?;
            catalog::make_uniformly_elliptic(Elliptic::Pucci { lam, big_lam }, fl.dim(default_n)?)?
        }
        "delta" => {
            let d = fl.req("d")?;
            catalog::make_uniformly_elliptic(Elliptic::Delta(d), fl.dim(default_n)?)?
        }
        "sigma" => {
            let k = fl.req("k")?;
            catalog::sigma_cone(k, fl.dim(default_n)?)?
        }
        "slag" => {
            let c = fl.num("c")?.unwrap_or(0.0);
            catalog::special_lagrangian(c, fl.dim(default_n)?)?
        }
        "calabi_yau" => catalog::calabi_yau(fl.dim(default_n)?),
        "klap" => {
            let k = match fl.take("k").as_deref() {
                Some("inf") => KExponent::Infinity,
                Some(v) => KExponent::Finite(
                    v.parse()
                        .map_err(|_| bad(name, &format!("k={v} is not a number")))?,
                ),
                None => return Err(bad(name, "missing field k")),
            };
            catalog::k_laplacian(k, fl.dim(default_n)?)?
        }
        "geometric" => {
            let p = fl.req("p")?;
            catalog::geometric(GrassmannSet::full(p, fl.dim(default_n)?)?)
        }
        "mcone" => {
            let case: u8 = fl.req("case")?;
            let n = fl.dim(default_n)?;
            let orthant = |gamma: f64| {
                let gens = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                DirectionalCone::new(gens, gamma)
            };
            let case = match case {
                1 => MonotonicityCase::Case1,
                2 => MonotonicityCase::Case2,
                3 => MonotonicityCase::Case3(orthant(0.0)?),
                4 => MonotonicityCase::Case4(orthant(fl.req("gamma")?)?),
                5 => MonotonicityCase::Case5 {
                    lambda: fl.req("lambda")?,
                },
                6 => MonotonicityCase::Case6 {
                    radius: fl.req("R")?,
                },
                c => return Err(bad(name, &format!("case must be 1 to 6, got {c}"))),
            };
            catalog::make_monotonicity_cone(case, n)?
        }
        "garding" => {
            let n = fl.dim(default_n)?;
            let q = poly_from(&mut fl, n)?;
            match fl.num::<usize>("k")? {
                Some(k) => garding::branch_subequation(&q, k)?,
                None => garding::garding_cone(&q),
            }
        }
        "ma1" => jet_equiv::monge_ampere_unit(fl.dim(default_n)?),
        "ma" => {
            let n = fl.dim(default_n)?;
            let f = fl.field(n)?;
            jet_equiv::monge_ampere(n, f)?
        }
        "cdet1" => jet_equiv::complex_det_unit(fl.req("m")?)?,
        "calabi-yau" => {
            let m: usize = fl.req("m")?;
            let f = fl.field(2 * m)?;
            jet_equiv::calabi_yau_det(m, f)?
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    fl.finish()?;
    Ok(out)
}

fn poly_from(fl: &mut Fields, n: usize) -> Result<HyperbolicPolynomial> {
    if let Some(m) = fl.num::<usize>("sigma")? {
        return HyperbolicPolynomial::sigma(m, n);
    }
    match fl.word().as_deref() {
        Some("det") => Ok(HyperbolicPolynomial::det(n)),
        Some("sigma") => {
            let m = fl
                .word()
                .and_then(|w| w.parse().ok())
                .ok_or_else(|| bad(&fl.name, "expected sigma:<m>"))?;
            HyperbolicPolynomial::sigma(m, n)
        }
        Some(w) => Err(bad(&fl.name, &format!("unknown polynomial {w}"))),
        None => Err(bad(&fl.name, "expected det, sigma:<m> or sigma=<m>")),
    }
}

/// Resolves `det:n=3`, `sigma:2:n=3` or `sigma=2:n=3` (an optional
/// `garding:` prefix is accepted).
pub fn polynomial(name: &str, default_n: Option<usize>) -> Result<HyperbolicPolynomial> {
    let name = name.trim();
    let body = name.strip_prefix("garding:").unwrap_or(name);
    let tokens: Vec<&str> = body.split(':').collect();
    let mut fl = Fields::parse(name, &tokens)?;
    let n = fl.dim(default_n)?;
    let q = poly_from(&mut fl, n)?;
    fl.finish()?;
    Ok(q)
}

//! Monomial realization: Laurent monomials in X_{s,i} with Kashiwara operators,
//! generation of the crystals M_{s,k}, and tropicalization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{AdaptedSeq, DoubleIndex};
use crate::error::{Error, Result};
use crate::linform::LinForm;

/// Π X_{s,i}^{ζ_{s,i}}, keyed by (s, i).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentMonomial {
    zeta: BTreeMap<(i64, usize), i64>,
}

impl LaurentMonomial {
    pub fn one() -> Self {
        LaurentMonomial::default()
    }

    pub fn var(s: i64, i: usize) -> Self {
        LaurentMonomial::from_factors([(s, i, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (i64, usize, i64)>) -> Self {
        let mut m = LaurentMonomial::one();
        for (s, i, e) in factors {
            m.mul_factor(s, i, e);
        }
        m
    }

    fn mul_factor(&mut self, s: i64, i: usize, e: i64) {
        if e == 0 {
            return;
        }
        let entry = self.zeta.entry((s, i)).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.zeta.remove(&(s, i));
        }
    }

    /// self · other^e
    pub fn mul_pow(&self, other: &LaurentMonomial, e: i64) -> LaurentMonomial {
        let mut out = self.clone();
        for (&(s, i), &z) in &other.zeta {
            out.mul_factor(s, i, z * e);
        }
        out
    }

    pub fn exponent(&self, s: i64, i: usize) -> i64 {
        self.zeta.get(&(s, i)).copied().unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (i64, usize, i64)> + '_ {
        self.zeta.iter().map(|(&(s, i), &e)| (s, i, e))
    }

    pub fn is_one(&self) -> bool {
        self.zeta.is_empty()
    }

    /// (s, ζ_{s,i}) for color i, increasing in s.
    fn column(&self, i: usize) -> Vec<(i64, i64)> {
        self.zeta.iter().filter(|((_, c), _)| *c == i).map(|(&(s, _), &e)| (s, e)).collect()
    }
}

impl fmt::Display for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |positive: bool| -> Vec<String> {
            self.factors()
                .filter(|&(_, _, e)| (e > 0) == positive)
                .map(|(s, i, e)| match e.abs() {
                    1 => format!("X[{s},{i}]"),
                    a => format!("X[{s},{i}]^{a}"),
                })
                .collect()
        };
        let (num, den) = (part(true), part(false));
        let num = if num.is_empty() { "1".to_string() } else { num.join(" ") };
        match den.len() {
            0 => f.write_str(&num),
            1 => write!(f, "{num}/{}", den[0]),
            _ => write!(f, "{num}/({})", den.join(" ")),
        }
    }
}

impl fmt::Debug for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FactorRepr {
    s: i64,
    i: usize,
    e: i64,
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    factors: Vec<FactorRepr>,
}

impl Serialize for LaurentMonomial {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let factors = self.factors().map(|(s, i, e)| FactorRepr { s, i, e }).collect();
        MonomialRepr { factors }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LaurentMonomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = MonomialRepr::deserialize(de)?;
        Ok(LaurentMonomial::from_factors(repr.factors.into_iter().map(|f| (f.s, f.i, f.e))))
    }
}

/// A_{s,k} = X_{s,k} X_{s+1,k} Π_{a_{j,k}<0} X_{s+p_{j,k},j}^{a_{j,k}}.
pub fn a_monomial(seq: &AdaptedSeq, s: i64, k: usize) -> LaurentMonomial {
    let c = seq.cartan();
    let mut m = LaurentMonomial::from_factors([(s, k, 1), (s + 1, k, 1)]);
    for j in c.neighbors(k) {
        let p = seq.p(j, k).expect("edge bit") as i64;
        m.mul_factor(s + p, j, c.a(j, k));
    }
    m
}

/// max over r of Σ_{t ≤ r} ζ_{t,i}, the empty sum included.
pub fn phi(x: &LaurentMonomial, i: usize) -> i64 {
    let mut acc = 0;
    let mut best = 0;
    for (_, e) in x.column(i) {
        acc += e;
        best = best.max(acc);
    }
    best
}

pub fn eps(x: &LaurentMonomial, i: usize) -> i64 {
    phi(x, i) - wt_at(x, i)
}

fn wt_at(x: &LaurentMonomial, i: usize) -> i64 {
    x.column(i).iter().map(|&(_, e)| e).sum()
}

/// Coefficients of wt(X) = Σ ζ_{s,i} Λ_i, indexed 0..n for colors 1..=n.
pub fn wt(x: &LaurentMonomial, n: usize) -> Vec<i64> {
    (1..=n).map(|i| wt_at(x, i)).collect()
}

/// The level s with f̃_i X = A_{s,i}^{-1} X, when f̃_i X ≠ 0.
pub fn n_f(x: &LaurentMonomial, i: usize) -> Option<i64> {
    let target = phi(x, i);
    if target == 0 {
        return None;
    }
    let mut acc = 0;
    x.column(i)
        .into_iter()
        .find(|&(_, e)| {
            acc += e;
            acc == target
        })
        .map(|(s, _)| s)
}

/// The level s with ẽ_i X = A_{s,i} X, when ẽ_i X ≠ 0.
pub fn n_e(x: &LaurentMonomial, i: usize) -> Option<i64> {
    if eps(x, i) == 0 {
        return None;
    }
    let target = phi(x, i);
    let col = x.column(i);
    // Prefix sums are constant between support points, so the largest r attaining
    // the maximum sits just below the support point after the last attaining one.
    let mut acc = 0;
    let mut last_hit: Option<usize> = (target == 0).then_some(0);
    for (idx, &(_, e)) in col.iter().enumerate() {
        acc += e;
        if acc == target {
            last_hit = Some(idx + 1);
        }
    }
    Some(col[last_hit?].0 - 1)
}

pub fn f_tilde(seq: &AdaptedSeq, x: &LaurentMonomial, i: usize) -> Option<LaurentMonomial> {
    n_f(x, i).map(|s| x.mul_pow(&a_monomial(seq, s, i), -1))
}

pub fn e_tilde(seq: &AdaptedSeq, x: &LaurentMonomial, i: usize) -> Option<LaurentMonomial> {
    n_e(x, i).map(|s| x.mul_pow(&a_monomial(seq, s, i), 1))
}

/// Crystal axioms and the three exponent facts about f̃/ẽ, checked at X for every color.
pub fn axiom_violations(seq: &AdaptedSeq, x: &LaurentMonomial) -> Vec<String> {
    let n = seq.rank();
    let c = seq.cartan();
    let mut bad = Vec::new();
    let w = wt(x, n);
    for i in 1..=n {
        let alpha: Vec<i64> = (1..=n).map(|j| c.a(j, i)).collect();
        let (ph, ep) = (phi(x, i), eps(x, i));
        if ph < 0 || ep < 0 || ph - ep != w[i - 1] {
            bad.push(format!("{x}: phi/eps/wt mismatch at {i}"));
        }
        if let Some(y) = f_tilde(seq, x, i) {
            let wy = wt(&y, n);
            if (0..n).any(|j| wy[j] != w[j] - alpha[j]) || eps(&y, i) != ep + 1 || phi(&y, i) != ph - 1 {
                bad.push(format!("{x}: f~_{i} breaks wt/eps/phi"));
            }
            if e_tilde(seq, &y, i).as_ref() != Some(x) {
                bad.push(format!("{x}: e~_{i} f~_{i} X != X"));
            }
            let s = n_f(x, i).expect("f~ defined");
            if x.exponent(s, i) <= 0 {
                bad.push(format!("{x}: f~_{i} acts at level {s} with nonpositive exponent"));
            }
        }
        if let Some(y) = e_tilde(seq, x, i) {
            let wy = wt(&y, n);
            if (0..n).any(|j| wy[j] != w[j] + alpha[j]) || eps(&y, i) != ep - 1 || phi(&y, i) != ph + 1 {
                bad.push(format!("{x}: e~_{i} breaks wt/eps/phi"));
            }
            if f_tilde(seq, &y, i).as_ref() != Some(x) {
                bad.push(format!("{x}: f~_{i} e~_{i} X != X"));
            }
            let s = n_e(x, i).expect("e~ defined");
            if x.exponent(s + 1, i) >= 0 {
                bad.push(format!("{x}: e~_{i} acts at level {s} without a negative exponent above"));
            }
        }
        if x.column(i).last().is_some_and(|&(_, e)| e < 0) && ep <= 0 {
            bad.push(format!("{x}: top exponent of color {i} negative but eps = 0"));
        }
    }
    bad
}

/// Breadth-first part of M_{s,k} reachable from X_{s,k} in at most `depth` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialCrystal {
    pub seed: LaurentMonomial,
    /// Nodes in discovery order; node 0 is the seed.
    pub nodes: Vec<LaurentMonomial>,
    pub depth_of: Vec<usize>,
    /// (source, color, target) as node indices.
    pub edges: Vec<(usize, usize, usize)>,
    pub depth: usize,
    pub complete: bool,
}

impl MonomialCrystal {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, m: &LaurentMonomial) -> Option<usize> {
        self.nodes.iter().position(|x| x == m)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph crystal {\n");
        for (idx, m) in self.nodes.iter().enumerate() {
            out.push_str(&format!("  n{idx} [label=\"{m}\"];\n"));
        }
        for &(a, i, b) in &self.edges {
            out.push_str(&format!("  n{a} -> n{b} [label=\"{i}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(idx, m)| {
                serde_json::json!({
                    "id": idx,
                    "depth": self.depth_of[idx],
                    "text": m.to_string(),
                    "monomial": m,
                })
            })
            .collect();
        let edges: Vec<serde_json::Value> =
            self.edges.iter().map(|&(a, i, b)| serde_json::json!({"from": a, "color": i, "to": b})).collect();
        serde_json::json!({
            "seed": self.seed,
            "depth": self.depth,
            "complete": self.complete,
            "nodes": nodes,
            "edges": edges,
        })
    }
}

pub fn gen_crystal(seq: &AdaptedSeq, s: i64, k: usize, depth: usize) -> MonomialCrystal {
    let n = seq.rank();
    let seed = LaurentMonomial::var(s, k);
    let mut nodes = vec![seed.clone()];
    let mut depth_of = vec![0];
    let mut index: HashMap<LaurentMonomial, usize> = HashMap::from([(seed.clone(), 0)]);
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut level = 0;
    while !frontier.is_empty() && level < depth {
        level += 1;
        let mut next = Vec::new();
        for &src in &frontier {
            for i in 1..=n {
                let Some(y) = f_tilde(seq, &nodes[src], i) else { continue };
                let dst = match index.get(&y) {
                    Some(&d) => d,
                    None => {
                        nodes.push(y.clone());
                        depth_of.push(level);
                        index.insert(y, nodes.len() - 1);
                        next.push(nodes.len() - 1);
                        nodes.len() - 1
                    }
                };
                edges.push((src, i, dst));
            }
        }
        frontier = next;
    }
    let complete = frontier.iter().all(|&v| (1..=n).all(|i| phi(&nodes[v], i) == 0));
    MonomialCrystal { seed, nodes, depth_of, edges, depth, complete }
}

pub fn trop(x: &LaurentMonomial) -> Result<LinForm> {
    let mut terms = Vec::new();
    for (s, i, e) in x.factors() {
        let s = s
            .to_usize()
            .filter(|&s| s >= 1)
            .ok_or_else(|| Error::Domain(format!("Trop needs indices s >= 1, got X[{s},{i}]")))?;
        terms.push((DoubleIndex::new(s, i), e));
    }
    Ok(LinForm::from_terms(terms))
}

pub fn detrop(f: &LinForm) -> Result<LaurentMonomial> {
    let mut factors = Vec::new();
    for (d, c) in f.terms() {
        let e = c.to_i64().ok_or_else(|| Error::Overflow(format!("exponent {c}")))?;
        factors.push((d.s as i64, d.k, e));
    }
    Ok(LaurentMonomial::from_factors(factors))
}

//! Integer linear forms on Q^∞, the β functionals and the piecewise-linear actions S, S′.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{AdaptedSeq, DoubleIndex};
use crate::error::{Error, Result};

/// Σ c_{s,k} x_{s,k} with finitely many nonzero integer coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinForm {
    terms: BTreeMap<DoubleIndex, BigInt>,
}

impl LinForm {
    pub fn zero() -> Self {
        LinForm::default()
    }

    /// The coordinate form x_{s,k}; `s` must be at least 1.
    pub fn x(s: usize, k: usize) -> Self {
        assert!(s >= 1, "x_{{s,k}} needs s >= 1");
        LinForm::var(DoubleIndex::new(s, k))
    }

    pub fn var(d: DoubleIndex) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(d, BigInt::one());
        LinForm { terms }
    }

    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (DoubleIndex, C)>,
        C: Into<BigInt>,
    {
        let mut f = LinForm::zero();
        for (d, c) in terms {
            f.add_term(d, &c.into());
        }
        f
    }

    /// Sum of c·x_{t,j}, where terms with t < 1 or j outside 1..=n count as zero.
    pub fn from_raw(n: usize, terms: impl IntoIterator<Item = (i64, i64, i64)>) -> Self {
        let mut f = LinForm::zero();
        for (t, j, c) in terms {
            if t >= 1 && j >= 1 && (j as usize) <= n {
                f.add_term(DoubleIndex::new(t as usize, j as usize), &BigInt::from(c));
            }
        }
        f
    }

    pub fn add_term(&mut self, d: DoubleIndex, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(d).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&d);
        }
    }

    /// self += c·other
    pub fn add_scaled(&mut self, other: &LinForm, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for (d, v) in &other.terms {
            self.add_term(*d, &(v * c));
        }
    }

    pub fn scaled(&self, c: &BigInt) -> LinForm {
        let mut out = LinForm::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn coeff(&self, d: DoubleIndex) -> BigInt {
        self.terms.get(&d).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, d: DoubleIndex) -> Option<&BigInt> {
        self.terms.get(&d)
    }

    pub fn terms(&self) -> impl Iterator<Item = (DoubleIndex, &BigInt)> + '_ {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn support(&self) -> impl Iterator<Item = DoubleIndex> + '_ {
        self.terms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_level(&self) -> usize {
        self.terms.keys().map(|d| d.s).max().unwrap_or(0)
    }

    /// Order-minimal support element under ι.
    pub fn leading(&self, seq: &AdaptedSeq) -> Option<DoubleIndex> {
        self.support().min_by(|x, y| seq.cmp_double(*x, *y))
    }

    /// Value at the point whose (t, j) coordinate is `coord(t, j)`.
    pub fn eval_with(&self, mut coord: impl FnMut(DoubleIndex) -> i64) -> BigInt {
        let mut acc = BigInt::zero();
        for (d, c) in &self.terms {
            let v = coord(*d);
            if v != 0 {
                acc += c * v;
            }
        }
        acc
    }

    /// Coefficients as machine integers, failing if one does not fit.
    pub fn to_i64_terms(&self) -> Result<Vec<(DoubleIndex, i64)>> {
        self.terms
            .iter()
            .map(|(d, c)| c.to_i64().map(|v| (*d, v)).ok_or_else(|| Error::Overflow(format!("{c}"))))
            .collect()
    }

    /// Drops every term at a level above `level`.
    pub fn truncated(&self, level: usize) -> LinForm {
        LinForm { terms: self.terms.iter().filter(|(d, _)| d.s <= level).map(|(d, c)| (*d, c.clone())).collect() }
    }
}

impl Add for &LinForm {
    type Output = LinForm;
    fn add(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &BigInt::one());
        out
    }
}

impl Sub for &LinForm {
    type Output = LinForm;
    fn sub(self, rhs: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigInt::one());
        out
    }
}

impl Neg for &LinForm {
    type Output = LinForm;
    fn neg(self) -> LinForm {
        self.scaled(&-BigInt::one())
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (d, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else { "+" };
            match (idx, c.is_negative()) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                _ => write!(f, " {sign} ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "x[{},{}]", d.s, d.k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    s: usize,
    k: usize,
    c: IntRepr,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Small(i64),
    Big(String),
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    terms: Vec<TermRepr>,
}

impl Serialize for LinForm {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = self
            .terms
            .iter()
            .map(|(d, c)| TermRepr {
                s: d.s,
                k: d.k,
                c: c.to_i64().map(IntRepr::Small).unwrap_or_else(|| IntRepr::Big(c.to_string())),
            })
            .collect();
        FormRepr { terms }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LinForm {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = FormRepr::deserialize(de)?;
        let mut f = LinForm::zero();
        for t in repr.terms {
            if t.s == 0 {
                return Err(serde::de::Error::custom("s must be >= 1"));
            }
            let c = match t.c {
                IntRepr::Small(v) => BigInt::from(v),
                IntRepr::Big(s) => s.parse().map_err(serde::de::Error::custom)?,
            };
            f.add_term(DoubleIndex::new(t.s, t.k), &c);
        }
        Ok(f)
    }
}

/// β_{s,k} = x_{s,k} + x_{s+1,k} + Σ_{a_{k,j}<0} a_{k,j} x_{s+p_{j,k},j}; β at s = 0 is zero.
pub fn beta(seq: &AdaptedSeq, s: usize, k: usize) -> LinForm {
    if s == 0 {
        return LinForm::zero();
    }
    let c = seq.cartan();
    let mut f = LinForm::x(s, k);
    f.add_term(DoubleIndex::new(s + 1, k), &BigInt::one());
    for j in c.neighbors(k) {
        let p = seq.p(j, k).expect("edge bit") as usize;
        f.add_term(DoubleIndex::new(s + p, j), &BigInt::from(c.a(k, j)));
    }
    f
}

/// Which branch of S′ fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ActionKind {
    Positive,
    Negative,
    Identity,
}

/// S_r φ = φ − φ_r β_r if φ_r > 0, else φ − φ_r β_{r^-}.
pub fn apply_s(seq: &AdaptedSeq, r: DoubleIndex, phi: &LinForm) -> LinForm {
    let c = phi.coeff(r);
    let mut out = phi.clone();
    if c.is_positive() {
        out.add_scaled(&beta(seq, r.s, r.k), &-c);
    } else if c.is_negative() && r.s > 1 {
        out.add_scaled(&beta(seq, r.s - 1, r.k), &-c);
    }
    out
}

/// S′_r φ = φ − β_r if c_r > 0, φ + β_{r^-} if c_r < 0, φ otherwise.
pub fn apply_s_prime(seq: &AdaptedSeq, r: DoubleIndex, phi: &LinForm) -> (LinForm, ActionKind) {
    let c = phi.coeff(r);
    let mut out = phi.clone();
    if c.is_positive() {
        out.add_scaled(&beta(seq, r.s, r.k), &-BigInt::one());
        (out, ActionKind::Positive)
    } else if c.is_negative() {
        if r.s > 1 {
            out.add_scaled(&beta(seq, r.s - 1, r.k), &BigInt::one());
        }
        (out, ActionKind::Negative)
    } else {
        (out, ActionKind::Identity)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum XiVariant {
    S,
    Sprime,
    SprimePositiveOnly,
}

/// A bounded closure of x_{s,k} under one family of actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XiSet {
    pub base: DoubleIndex,
    pub variant: XiVariant,
    /// Each form with the BFS depth at which it was first reached.
    pub forms: BTreeMap<LinForm, usize>,
    pub depth: usize,
    pub closed: bool,
}

impl XiSet {
    pub fn contains(&self, f: &LinForm) -> bool {
        self.forms.contains_key(f)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinForm> {
        self.forms.keys()
    }
}

fn successors(seq: &AdaptedSeq, phi: &LinForm, variant: XiVariant) -> Vec<LinForm> {
    let mut out = Vec::new();
    for (r, c) in phi.terms() {
        let next = match variant {
            XiVariant::S => {
                if c.is_negative() && r.s == 1 {
                    continue;
                }
                apply_s(seq, r, phi)
            }
            XiVariant::Sprime => {
                if c.is_negative() && r.s == 1 {
                    continue;
                }
                apply_s_prime(seq, r, phi).0
            }
            XiVariant::SprimePositiveOnly => {
                if !c.is_positive() {
                    continue;
                }
                apply_s_prime(seq, r, phi).0
            }
        };
        out.push(next);
    }
    out
}

/// Breadth-first closure of {x_{s,k}} under the chosen actions, up to `depth` steps.
pub fn gen_xi(seq: &AdaptedSeq, s: usize, k: usize, depth: usize, variant: XiVariant) -> XiSet {
    let base = DoubleIndex::new(s, k);
    let seed = LinForm::var(base);
    let mut forms = BTreeMap::from([(seed.clone(), 0usize)]);
    let mut frontier = vec![seed];
    let mut level = 0;
    while !frontier.is_empty() && level < depth {
        level += 1;
        let mut next = Vec::new();
        for phi in &frontier {
            for psi in successors(seq, phi, variant) {
                if !forms.contains_key(&psi) {
                    forms.insert(psi.clone(), level);
                    next.push(psi);
                }
            }
        }
        frontier = next;
    }
    let closed = frontier.iter().all(|phi| successors(seq, phi, variant).iter().all(|psi| forms.contains_key(psi)));
    XiSet { base, variant, forms, depth, closed }
}

/// Result of a positivity scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Positivity {
    Pass,
    Violation { form: LinForm, index: DoubleIndex },
}

/// Checks that no form has a negative coefficient at a first occurrence (s = 1).
pub fn check_positivity(xi: &XiSet) -> Positivity {
    for phi in xi.iter() {
        for (d, c) in phi.terms() {
            if d.s == 1 && c.is_negative() {
                return Positivity::Violation { form: phi.clone(), index: d };
            }
        }
    }
    Positivity::Pass
}

impl Positivity {
    pub fn is_pass(&self) -> bool {
        matches!(self, Positivity::Pass)
    }
}

/// φ = x_base − Σ c_{t,i} β_{t,i}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub coeffs: BTreeMap<DoubleIndex, BigInt>,
    /// Σ c_{t,i}, present when every coefficient is nonnegative.
    pub norm: Option<BigInt>,
}

pub fn decompose_in_beta(seq: &AdaptedSeq, phi: &LinForm, base: DoubleIndex) -> Result<Decomposition> {
    let n = seq.rank();
    let mut residual = &LinForm::var(base) - phi;
    let bound = residual.support().map(|d| seq.index_of(d)).max().unwrap_or(0);
    let mut coeffs = BTreeMap::new();
    while let Some(lead) = residual.leading(seq) {
        if seq.index_of(lead) + n > bound {
            return Err(Error::NotInSpan(format!("{phi} relative to x{base}")));
        }
        let c = residual.coeff(lead);
        residual.add_scaled(&beta(seq, lead.s, lead.k), &-&c);
        coeffs.insert(lead, c);
    }
    let norm =
        coeffs.values().all(|c| !c.is_negative()).then(|| coeffs.values().fold(BigInt::zero(), |acc, c| acc + c));
    Ok(Decomposition { coeffs, norm })
}

//! Boxes and column tableaux for types A–D: an independent closed description of Ξ′.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cartan::{AdaptedSeq, DoubleIndex, LieType};
use crate::error::{Error, Result};
use crate::linform::{apply_s_prime, beta, LinForm};
use crate::rational::{self, Q};

/// Superscript X of the boxes; for g of type X the relevant boxes are X^L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoxType {
    A,
    B,
    C,
    D,
}

impl BoxType {
    /// The box family X^L used for g.
    pub fn for_type(ty: LieType) -> Option<BoxType> {
        match ty {
            LieType::A(_) => Some(BoxType::A),
            LieType::B(_) => Some(BoxType::C),
            LieType::C(_) => Some(BoxType::B),
            LieType::D(_) => Some(BoxType::D),
            _ => None,
        }
    }
}

impl fmt::Display for BoxType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Num(usize),
    Zero,
    /// j̄; `Bar(n + 1)` is the head letter of the B and D spin-like columns.
    Bar(usize),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Num(j) => write!(f, "{j}"),
            Letter::Zero => f.write_str("0"),
            Letter::Bar(j) => write!(f, "{j}~"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("bad letter {s:?}"));
        if let Some(body) = s.strip_suffix('~') {
            let j: usize = body.parse().map_err(|_| bad())?;
            return if j == 0 { Err(bad()) } else { Ok(Letter::Bar(j)) };
        }
        match s.parse::<usize>().map_err(|_| bad())? {
            0 => Ok(Letter::Zero),
            j => Ok(Letter::Num(j)),
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(de)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Position in 1 < … < n < 0 < n̄ < … < 1̄ (0 only for B).
fn rank(n: usize, l: Letter) -> usize {
    match l {
        Letter::Num(j) => 2 * j,
        Letter::Zero => 2 * n + 1,
        Letter::Bar(j) => 4 * n + 2 - 2 * j,
    }
}

/// x ≥ y in J_X; for D the letters n and n̄ are incomparable.
fn geq(bt: BoxType, n: usize, x: Letter, y: Letter) -> bool {
    if bt == BoxType::D
        && matches!((x, y), (Letter::Num(a), Letter::Bar(b)) | (Letter::Bar(b), Letter::Num(a)) if a == n && b == n)
    {
        return false;
    }
    rank(n, x) >= rank(n, y)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tableau {
    pub boxtype: BoxType,
    pub k: usize,
    pub s: i64,
    /// Top to bottom.
    pub col: Vec<Letter>,
}

impl fmt::Display for Tableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.col.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]^{}_{}", body.join(","), self.boxtype, self.s)
    }
}

/// x_{t,j} coefficients before restriction to t ≥ 1.
type Raw = BTreeMap<(i64, usize), i64>;

fn raw_add(raw: &mut Raw, t: i64, j: usize, c: i64) {
    let e = raw.entry((t, j)).or_insert(0);
    *e += c;
    if *e == 0 {
        raw.remove(&(t, j));
    }
}

fn raw_sum(a: &Raw, b: &Raw, sign: i64) -> Raw {
    let mut out = a.clone();
    for (&(t, j), &c) in b {
        raw_add(&mut out, t, j, sign * c);
    }
    out
}

fn raw_to_form(raw: &Raw) -> Result<LinForm> {
    if let Some(&(t, j)) = raw.keys().find(|(t, _)| *t < 1) {
        return Err(Error::Domain(format!("term x[{t},{j}] below level 1")));
    }
    Ok(LinForm::from_terms(raw.iter().map(|(&(t, j), &c)| (DoubleIndex::new(t as usize, j), c))))
}

fn form_to_raw(f: &LinForm) -> Raw {
    let mut raw = Raw::new();
    for (d, c) in f.terms() {
        let c: i64 = c.try_into().expect("small coefficient");
        raw_add(&mut raw, d.s as i64, d.k, c);
    }
    raw
}

fn check_pairing(seq: &AdaptedSeq, bt: BoxType) -> Result<()> {
    if BoxType::for_type(seq.lie_type()) == Some(bt) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{bt} boxes do not belong to type {}", seq.lie_type())))
    }
}

/// P^X(k) for 0 ≤ k ≤ n + 1.
pub fn p_shift(seq: &AdaptedSeq, bt: BoxType, k: usize) -> i64 {
    let n = seq.rank();
    assert!(k <= n + 1, "P(k) needs k <= n + 1");
    if k <= 1 || k == n + 1 {
        return 0;
    }
    let p = |i: usize, j: usize| seq.p(i, j).expect("adjacent colors") as i64;
    if bt == BoxType::D && k == n {
        (2..=n - 2).map(|j| p(j, j - 1)).sum::<i64>() + p(n, n - 2)
    } else {
        (2..=k).map(|j| p(j, j - 1)).sum()
    }
}

fn box_raw(seq: &AdaptedSeq, bt: BoxType, letter: Letter, s: i64) -> Result<Raw> {
    let n = seq.rank();
    let pp = |k: usize| p_shift(seq, bt, k);
    let bad = || Error::Domain(format!("letter {letter} is not a {bt} box for rank {n}"));
    let mut raw = Raw::new();
    let mut term = |t: i64, j: usize, c: i64| {
        if (1..=n).contains(&j) {
            raw_add(&mut raw, t, j, c);
        }
    };
    let nn = n as i64;
    match (bt, letter) {
        (BoxType::A, Letter::Num(j)) if (1..=n + 1).contains(&j) => {
            term(s + pp(j), j, 1);
            term(s + pp(j - 1) + 1, j - 1, -1);
        }
        (BoxType::C, Letter::Num(j)) | (BoxType::B, Letter::Num(j)) if (1..n).contains(&j) => {
            term(s + pp(j), j, 1);
            term(s + pp(j - 1) + 1, j - 1, -1);
        }
        (BoxType::C, Letter::Num(j)) if j == n => {
            term(s + pp(n), n, 1);
            term(s + pp(n - 1) + 1, n - 1, -1);
        }
        (BoxType::C, Letter::Bar(j)) | (BoxType::B, Letter::Bar(j))
            if (1..n).contains(&j) || (bt == BoxType::C && j == n) =>
        {
            let j64 = j as i64;
            term(s + pp(j - 1) + nn - j64 + 1, j - 1, 1);
            term(s + pp(j) + nn - j64 + 1, j, -1);
        }
        (BoxType::B, Letter::Num(j)) if j == n => {
            term(s + pp(n), n, 2);
            term(s + pp(n - 1) + 1, n - 1, -1);
        }
        (BoxType::B, Letter::Zero) => {
            term(s + pp(n), n, 1);
            term(s + pp(n) + 1, n, -1);
        }
        (BoxType::B, Letter::Bar(j)) if j == n => {
            term(s + pp(n - 1) + 1, n - 1, 1);
            term(s + pp(n) + 1, n, -2);
        }
        (BoxType::B, Letter::Bar(j)) | (BoxType::D, Letter::Bar(j)) if j == n + 1 => {
            term(s + pp(n), n, 1);
        }
        (BoxType::D, Letter::Num(j)) if (1..=n - 2).contains(&j) || j == n => {
            term(s + pp(j), j, 1);
            term(s + pp(j - 1) + 1, j - 1, -1);
        }
        (BoxType::D, Letter::Num(j)) if j == n - 1 => {
            term(s + pp(n - 1), n - 1, 1);
            term(s + pp(n), n, 1);
            term(s + pp(n - 2) + 1, n - 2, -1);
        }
        (BoxType::D, Letter::Bar(j)) if j == n => {
            term(s + pp(n - 1), n - 1, 1);
            term(s + pp(n) + 1, n, -1);
        }
        (BoxType::D, Letter::Bar(j)) if j == n - 1 => {
            term(s + pp(n - 2) + 1, n - 2, 1);
            term(s + pp(n - 1) + 1, n - 1, -1);
            term(s + pp(n) + 1, n, -1);
        }
        (BoxType::D, Letter::Bar(j)) if (1..=n - 2).contains(&j) => {
            let j64 = j as i64;
            term(s + pp(j - 1) + nn - j64, j - 1, 1);
            term(s + pp(j) + nn - j64, j, -1);
        }
        _ => return Err(bad()),
    }
    Ok(raw)
}

/// The box homomorphism; fails if a term falls below level 1.
pub fn box_form(seq: &AdaptedSeq, bt: BoxType, letter: Letter, s: i64) -> Result<LinForm> {
    check_pairing(seq, bt)?;
    raw_to_form(&box_raw(seq, bt, letter, s)?)
}

fn tableau_raw(seq: &AdaptedSeq, t: &Tableau) -> Result<Raw> {
    let len = t.col.len() as i64;
    let mut raw = Raw::new();
    for (idx, &l) in t.col.iter().enumerate() {
        raw = raw_sum(&raw, &box_raw(seq, t.boxtype, l, t.s + len - 1 - idx as i64)?, 1);
    }
    Ok(raw)
}

/// Σ_i box(j_i)_{s+len−i}, summed before restricting to level ≥ 1.
pub fn tableau_form(seq: &AdaptedSeq, t: &Tableau) -> Result<LinForm> {
    check_pairing(seq, t.boxtype)?;
    raw_to_form(&tableau_raw(seq, t)?)
}

fn letters(bt: BoxType, n: usize) -> Vec<Letter> {
    let mut out: Vec<Letter> = match bt {
        BoxType::A => (1..=n + 1).map(Letter::Num).collect(),
        _ => (1..=n).map(Letter::Num).chain((1..=n).rev().map(Letter::Bar)).collect(),
    };
    if bt == BoxType::B {
        out.push(Letter::Zero);
    }
    out.sort_by_key(|&l| rank(n, l));
    out
}

fn columns(len: usize, pool: &[Letter], ok: &dyn Fn(Letter, Letter) -> bool) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(
        len: usize,
        pool: &[Letter],
        ok: &dyn Fn(Letter, Letter) -> bool,
        cur: &mut Vec<Letter>,
        out: &mut Vec<Vec<Letter>>,
    ) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for &l in pool {
            if cur.last().is_none_or(|&p| ok(p, l)) {
                cur.push(l);
                go(len, pool, ok, cur, out);
                cur.pop();
            }
        }
    }
    go(len, pool, ok, &mut cur, &mut out);
    out
}

/// Whether `k` uses the (n+1)̄-headed columns.
fn headed(bt: BoxType, n: usize, k: usize) -> bool {
    match bt {
        BoxType::B => k == n,
        BoxType::D => k + 1 >= n,
        _ => false,
    }
}

/// All tableaux of Tab^X_{k} with shift `s`; their forms lie in Ξ′_{s+P(k),k}.
pub fn enumerate_tab(seq: &AdaptedSeq, bt: BoxType, k: usize, s: i64) -> Result<Vec<Tableau>> {
    check_pairing(seq, bt)?;
    let n = seq.rank();
    if !(1..=n).contains(&k) {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    if s < 1 - p_shift(seq, bt, k) {
        return Err(Error::Domain(format!("shift {s} below 1 - P({k})")));
    }
    let pool = letters(bt, n);
    let strict = |a: Letter, b: Letter| rank(n, a) < rank(n, b);
    let cols: Vec<Vec<Letter>> = if headed(bt, n, k) {
        let bars: Vec<Letter> = pool.iter().copied().filter(|l| matches!(l, Letter::Bar(_))).collect();
        (0..=n)
            .filter(|&r| match (bt, k == n) {
                (BoxType::D, true) => r % 2 == 0,
                (BoxType::D, false) => r % 2 == 1,
                _ => true,
            })
            .flat_map(|r| columns(r, &bars, &strict))
            .map(|c| std::iter::once(Letter::Bar(n + 1)).chain(c).collect())
            .collect()
    } else {
        match bt {
            BoxType::A | BoxType::C => columns(k, &pool, &strict),
            BoxType::B => columns(k, &pool, &|a, b| strict(a, b) || (a == b && a == Letter::Zero)),
            BoxType::D => columns(k, &pool, &|a, b| !geq(bt, n, a, b)),
        }
    };
    Ok(cols.into_iter().map(|col| Tableau { boxtype: bt, k, s, col }).collect())
}

/// The distinct forms of Tab^X_{s,k}, i.e. tableaux at shift s − P(k).
pub fn tab_forms(seq: &AdaptedSeq, bt: BoxType, k: usize, s: usize) -> Result<BTreeSet<LinForm>> {
    let shift = s as i64 - p_shift(seq, bt, k);
    enumerate_tab(seq, bt, k, shift)?.iter().map(|t| tableau_form(seq, t)).collect()
}

/// Identity checks over a window; `checked` counts verified instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub checked: usize,
    pub failure: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Every rewriting identity of the box family matching `seq`'s type, for s up to `s_max`.
pub fn check_box_identities(seq: &AdaptedSeq, bt: BoxType, s_max: i64) -> Result<Report> {
    check_pairing(seq, bt)?;
    let n = seq.rank();
    let nn = n as i64;
    let pp = |k: usize| p_shift(seq, bt, k);
    let bx = |l: Letter, s: i64| box_raw(seq, bt, l, s);
    let b = |t: i64, j: usize| form_to_raw(&beta(seq, t as usize, j));
    let mut report = Report { checked: 0, failure: None };
    // (name, lhs boxes as (letter, shift), rhs box, β index)
    let mut check = |name: &str, lhs: &[(Letter, i64)], rhs: (Letter, i64), bt_idx: (i64, usize)| -> Result<()> {
        if report.failure.is_some() {
            return Ok(());
        }
        let mut left = Raw::new();
        for &(l, s) in lhs {
            left = raw_sum(&left, &bx(l, s)?, 1);
        }
        let right = raw_sum(&bx(rhs.0, rhs.1)?, &b(bt_idx.0, bt_idx.1), -1);
        report.checked += 1;
        if left != right {
            report.failure = Some(format!("{name} fails at {lhs:?} vs {rhs:?}, beta index {bt_idx:?}"));
        }
        Ok(())
    };
    use Letter::{Bar, Num, Zero};
    let range = |lo: i64| lo..=s_max;
    match bt {
        BoxType::A => {
            for j in 1..=n {
                for s in range(1 - pp(j)) {
                    check("A-box", &[(Num(j + 1), s)], (Num(j), s), (s + pp(j), j))?;
                }
            }
        }
        BoxType::C | BoxType::B => {
            let tag = if bt == BoxType::C { "B-box" } else { "C-box" };
            for j in 1..n {
                for s in range(1 - pp(j)) {
                    check(&format!("{tag}1"), &[(Num(j + 1), s)], (Num(j), s), (s + pp(j), j))?;
                }
            }
            for s in range(1 - pp(n)) {
                if bt == BoxType::C {
                    check("B-box2", &[(Bar(n), s)], (Num(n), s), (s + pp(n), n))?;
                } else {
                    check("C-box2", &[(Zero, s)], (Num(n), s), (s + pp(n), n))?;
                    check("C-box22", &[(Bar(n), s)], (Zero, s), (s + pp(n), n))?;
                    check("BC-pr3", &[(Bar(n + 1), s + 1), (Bar(n), s)], (Bar(n + 1), s), (s + pp(n), n))?;
                }
            }
            for j in 2..=n {
                let jj = j as i64;
                for s in range(jj - pp(j - 1) - nn) {
                    let t = s + pp(j - 1) + nn - jj + 1;
                    check(&format!("{tag}3"), &[(Bar(j - 1), s)], (Bar(j), s), (t, j - 1))?;
                }
            }
        }
        BoxType::D => {
            for j in 1..n {
                for s in range(1 - pp(j)) {
                    check("D-box1", &[(Num(j + 1), s)], (Num(j), s), (s + pp(j), j))?;
                }
            }
            for s in range(1 - pp(n)) {
                check("D-box2", &[(Bar(n), s)], (Num(n - 1), s), (s + pp(n), n))?;
                check("D-box3", &[(Bar(n - 1), s)], (Num(n), s), (s + pp(n), n))?;
                check(
                    "D-box5",
                    &[(Bar(n + 1), s + 2), (Bar(n), s + 1), (Bar(n - 1), s)],
                    (Bar(n + 1), s),
                    (s + pp(n), n),
                )?;
            }
            for j in 2..=n {
                let jj = j as i64;
                for s in range(1 + jj - pp(j - 1) - nn) {
                    check("D-box4", &[(Bar(j - 1), s)], (Bar(j), s), (s + pp(j - 1) + nn - jj, j - 1))?;
                }
            }
        }
    }
    Ok(report)
}

/// Closure of Tab^X_{s,k} under S′_{m,j} for m ≤ m_max and all j.
pub fn check_sprime_closure(seq: &AdaptedSeq, bt: BoxType, k: usize, s: usize, m_max: usize) -> Result<Report> {
    let forms = tab_forms(seq, bt, k, s)?;
    let mut report = Report { checked: 0, failure: None };
    for f in &forms {
        for m in 1..=m_max {
            for j in 1..=seq.rank() {
                let (g, _) = apply_s_prime(seq, DoubleIndex::new(m, j), f);
                report.checked += 1;
                if !forms.contains(&g) {
                    report.failure = Some(format!("S'({m},{j}) maps {f} to {g}, outside the tableau forms"));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}

/// Positive-coefficient variables sit at level ≥ 1 and negative ones at level ≥ 2.
pub fn check_step1(seq: &AdaptedSeq, t: &Tableau) -> Result<bool> {
    let raw = tableau_raw(seq, t)?;
    Ok(raw.iter().all(|(&(lvl, _), &c)| if c > 0 { lvl >= 1 } else { lvl >= 2 }))
}

/// Coefficients c with Λ_k − wt(φ) = Σ c_i α^L_i, where wt(x_{r,j}) = Λ_j.
pub fn weight_gap(seq: &AdaptedSeq, k: usize, form: &LinForm) -> Option<Vec<Q>> {
    let n = seq.rank();
    let c = seq.cartan();
    let mut v = vec![Q::zero(); n];
    v[k - 1] += rational::q(1);
    for (d, coef) in form.terms() {
        v[d.k - 1] -= Q::from_integer(coef.clone());
    }
    // α^L_i = Σ_j a_{i,j} Λ_j
    let m: Vec<Vec<Q>> = (1..=n).map(|j| (1..=n).map(|i| rational::q(c.a(i, j))).collect()).collect();
    rational::solve(&m, &v)
}

/// wt(φ) ≤ Λ_k in dominance order for the dual root lattice.
pub fn weight_dominated(seq: &AdaptedSeq, k: usize, form: &LinForm) -> bool {
    weight_gap(seq, k, form).is_some_and(|c| c.iter().all(|x| !x.is_negative() && x.is_integer()))
}

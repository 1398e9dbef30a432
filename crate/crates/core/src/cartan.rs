//! Cartan data, Langlands duality and adapted sequences.
//!
//! Node numbering follows the Dynkin diagrams used throughout the crate; a double
//! arrow `x => y` (pointing at the short root `y`) is encoded as `a[y][x] = -2`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Supported Kac–Moody types. Affine variants carry the rank `n`
/// (so `AffA(n)` is A^(1)_{n-1}, `TwA2Even(n)` is A^(2)_{2n-2}, `TwA2Odd(n)` is A^(2)_{2n-3}).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    Rank2 { a: u32, b: u32 },
    A11,
    AffA(usize),
    AffB(usize),
    AffC(usize),
    AffD(usize),
    TwA2Even(usize),
    TwA2EvenDagger(usize),
    TwA2Odd(usize),
    TwD(usize),
}

pub const SUPPORTED_TAGS: &str =
    "An, Bn, Cn, Dn, rank2:a,b, A1^1, A^1:n, B^1:n, C^1:n, D^1:n, A^2:m (m=2n-2 or 2n-3), A^2d:m, D^2:n";

impl LieType {
    pub fn rank(&self) -> usize {
        match *self {
            LieType::A(n)
            | LieType::B(n)
            | LieType::C(n)
            | LieType::D(n)
            | LieType::AffA(n)
            | LieType::AffB(n)
            | LieType::AffC(n)
            | LieType::AffD(n)
            | LieType::TwA2Even(n)
            | LieType::TwA2EvenDagger(n)
            | LieType::TwA2Odd(n)
            | LieType::TwD(n) => n,
            LieType::Rank2 { .. } | LieType::A11 => 2,
        }
    }

    /// True when the Weyl group is finite.
    pub fn is_finite(&self) -> bool {
        match *self {
            LieType::A(_) | LieType::B(_) | LieType::C(_) | LieType::D(_) => true,
            LieType::Rank2 { a, b } => (a as u64) * (b as u64) <= 3,
            _ => false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidType(format!("{}: {}", self.tag(), what)));
        match *self {
            LieType::A(n) if n < 1 => bad("need n >= 1"),
            LieType::B(n) | LieType::C(n) if n < 2 => bad("need n >= 2"),
            LieType::D(n) if n < 4 => bad("need n >= 4"),
            LieType::Rank2 { a, b } if (a == 0) != (b == 0) => bad("a = 0 and b = 0 must hold together"),
            LieType::AffA(n) | LieType::AffC(n) | LieType::TwD(n) if n < 3 => bad("need n >= 3"),
            LieType::TwA2Even(n) | LieType::TwA2EvenDagger(n) if n < 3 => bad("need n >= 3"),
            LieType::AffB(n) | LieType::TwA2Odd(n) if n < 4 => bad("need n >= 4"),
            LieType::AffD(n) if n < 5 => bad("need n >= 5"),
            _ => Ok(()),
        }
    }

    pub fn langlands_dual(&self) -> LieType {
        match *self {
            LieType::B(n) => LieType::C(n),
            LieType::C(n) => LieType::B(n),
            LieType::Rank2 { a, b } => LieType::Rank2 { a: b, b: a },
            LieType::AffC(n) => LieType::TwD(n),
            LieType::TwD(n) => LieType::AffC(n),
            LieType::TwA2Odd(n) => LieType::AffB(n),
            LieType::AffB(n) => LieType::TwA2Odd(n),
            LieType::TwA2Even(n) => LieType::TwA2EvenDagger(n),
            LieType::TwA2EvenDagger(n) => LieType::TwA2Even(n),
            other => other,
        }
    }

    pub fn tag(&self) -> String {
        match *self {
            LieType::A(n) => format!("A{n}"),
            LieType::B(n) => format!("B{n}"),
            LieType::C(n) => format!("C{n}"),
            LieType::D(n) => format!("D{n}"),
            LieType::Rank2 { a, b } => format!("rank2:{a},{b}"),
            LieType::A11 => "A1^1".to_string(),
            LieType::AffA(n) => format!("A^1:{n}"),
            LieType::AffB(n) => format!("B^1:{n}"),
            LieType::AffC(n) => format!("C^1:{n}"),
            LieType::AffD(n) => format!("D^1:{n}"),
            LieType::TwA2Even(n) => format!("A^2:{}", 2 * n - 2),
            LieType::TwA2EvenDagger(n) => format!("A^2d:{}", 2 * n - 2),
            LieType::TwA2Odd(n) => format!("A^2:{}", 2 * n - 3),
            LieType::TwD(n) => format!("D^2:{n}"),
        }
    }

    /// Letter of the finite classical family, if any.
    pub fn classical_family(&self) -> Option<char> {
        match self {
            LieType::A(_) => Some('A'),
            LieType::B(_) => Some('B'),
            LieType::C(_) => Some('C'),
            LieType::D(_) => Some('D'),
            _ => None,
        }
    }
}

impl fmt::Display for LieType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl FromStr for LieType {
    type Err = Error;

    fn from_str(s: &str) -> Result<LieType> {
        let s = s.trim();
        let invalid = || Error::InvalidType(format!("unknown tag {s:?}; supported: {SUPPORTED_TAGS}"));
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| invalid());
        let ty = if s == "A1^1" {
            LieType::A11
        } else if let Some(rest) = s.strip_prefix("rank2:") {
            let (a, b) = rest.split_once(',').ok_or_else(invalid)?;
            LieType::Rank2 { a: a.trim().parse().map_err(|_| invalid())?, b: b.trim().parse().map_err(|_| invalid())? }
        } else if let Some(rest) = s.strip_prefix("A^2d:") {
            let m = num(rest)?;
            if m % 2 != 0 {
                return Err(Error::InvalidType(format!("{s}: A^2d needs an even subscript 2n-2")));
            }
            LieType::TwA2EvenDagger((m + 2) / 2)
        } else if let Some(rest) = s.strip_prefix("A^2:") {
            let m = num(rest)?;
            if m % 2 == 0 {
                LieType::TwA2Even((m + 2) / 2)
            } else {
                LieType::TwA2Odd((m + 3) / 2)
            }
        } else if let Some(rest) = s.strip_prefix("A^1:") {
            LieType::AffA(num(rest)?)
        } else if let Some(rest) = s.strip_prefix("B^1:") {
            LieType::AffB(num(rest)?)
        } else if let Some(rest) = s.strip_prefix("C^1:") {
            LieType::AffC(num(rest)?)
        } else if let Some(rest) = s.strip_prefix("D^1:") {
            LieType::AffD(num(rest)?)
        } else if let Some(rest) = s.strip_prefix("D^2:") {
            LieType::TwD(num(rest)?)
        } else {
            let mut chars = s.chars();
            let head = chars.next().ok_or_else(invalid)?;
            let n = num(chars.as_str())?;
            match head {
                'A' => LieType::A(n),
                'B' => LieType::B(n),
                'C' => LieType::C(n),
                'D' => LieType::D(n),
                _ => return Err(invalid()),
            }
        };
        ty.validate()?;
        Ok(ty)
    }
}

impl Serialize for LieType {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for LieType {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A generalized Cartan matrix with its type tag. Entries are read with 1-based `a(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CartanData {
    ty: LieType,
    n: usize,
    a: Vec<i64>,
}

impl CartanData {
    pub fn lie_type(&self) -> LieType {
        self.ty
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// ⟨h_i, α_j⟩, 1-based.
    pub fn a(&self, i: usize, j: usize) -> i64 {
        assert!((1..=self.n).contains(&i) && (1..=self.n).contains(&j), "color out of range");
        self.a[(i - 1) * self.n + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (1..=self.n).map(|i| (1..=self.n).map(|j| self.a(i, j)).collect()).collect()
    }

    pub fn transpose(&self) -> Vec<Vec<i64>> {
        (1..=self.n).map(|i| (1..=self.n).map(|j| self.a(j, i)).collect()).collect()
    }

    pub fn colors(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Colors `j != i` joined to `i` in the Dynkin diagram.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.colors().filter(move |&j| j != i && self.a(i, j) < 0)
    }

    pub fn dual(&self) -> CartanData {
        build_cartan(self.ty.langlands_dual()).expect("dual of a valid type is valid")
    }

    /// Positive integers d_i with d_i a_{i,j} = d_j a_{j,i}, or `None`.
    pub fn symmetrizer(&self) -> Option<Vec<u64>> {
        let n = self.n;
        let mut d: Vec<Option<Ratio<i64>>> = vec![None; n + 1];
        for root in 1..=n {
            if d[root].is_some() {
                continue;
            }
            d[root] = Some(Ratio::from_integer(1));
            let mut queue = VecDeque::from([root]);
            while let Some(i) = queue.pop_front() {
                let di = d[i].unwrap();
                for j in self.neighbors(i).collect::<Vec<_>>() {
                    let want = di * Ratio::new(self.a(i, j), self.a(j, i));
                    match d[j] {
                        None => {
                            d[j] = Some(want);
                            queue.push_back(j);
                        }
                        Some(dj) if dj != want => return None,
                        _ => {}
                    }
                }
            }
        }
        let lcm = d[1..].iter().fold(1i64, |acc, r| acc.lcm(r.unwrap().denom()));
        let out: Vec<u64> = d[1..].iter().map(|r| (r.unwrap() * lcm).to_integer() as u64).collect();
        (out.iter().all(|&x| x > 0)).then_some(out)
    }
}

/// Cartan matrix of a supported type, with the diagram's node numbering.
pub fn build_cartan(ty: LieType) -> Result<CartanData> {
    ty.validate()?;
    let n = ty.rank();
    let mut m = Builder { n, a: vec![0i64; n * n] };
    for i in 1..=n {
        m.set(i, i, 2);
    }
    match ty {
        LieType::A(n) => m.chain(1, n),
        LieType::B(n) => {
            m.chain(1, n - 1);
            m.arrow(n - 1, n);
        }
        LieType::C(n) => {
            m.chain(1, n - 1);
            m.arrow(n, n - 1);
        }
        LieType::D(n) => {
            m.chain(1, n - 1);
            m.simple(n - 2, n);
        }
        LieType::Rank2 { a, b } => {
            m.set(1, 2, -(a as i64));
            m.set(2, 1, -(b as i64));
        }
        LieType::A11 => {
            m.set(1, 2, -2);
            m.set(2, 1, -2);
        }
        LieType::AffA(n) => {
            m.chain(1, n);
            m.simple(1, n);
        }
        LieType::AffB(n) => {
            m.simple(1, 3);
            m.simple(2, 3);
            m.chain(3, n - 1);
            m.arrow(n - 1, n);
        }
        LieType::AffC(n) => {
            m.arrow(1, 2);
            m.chain(2, n - 1);
            m.arrow(n, n - 1);
        }
        LieType::AffD(n) => {
            m.simple(1, 3);
            m.simple(2, 3);
            m.chain(3, n - 1);
            m.simple(n - 2, n);
        }
        LieType::TwA2Even(n) => {
            m.arrow(1, 2);
            m.chain(2, n - 1);
            m.arrow(n - 1, n);
        }
        LieType::TwA2EvenDagger(n) => {
            m.arrow(2, 1);
            m.chain(2, n - 1);
            m.arrow(n, n - 1);
        }
        LieType::TwA2Odd(n) => {
            m.simple(1, 3);
            m.simple(2, 3);
            m.chain(3, n - 1);
            m.arrow(n, n - 1);
        }
        LieType::TwD(n) => {
            m.arrow(2, 1);
            m.chain(2, n - 1);
            m.arrow(n - 1, n);
        }
    }
    let a = m.a;
    Ok(CartanData { ty, n, a })
}

struct Builder {
    n: usize,
    a: Vec<i64>,
}

impl Builder {
    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[(i - 1) * self.n + (j - 1)] = v;
    }

    fn simple(&mut self, i: usize, j: usize) {
        self.set(i, j, -1);
        self.set(j, i, -1);
    }

    /// `x => y`: y is the short end, a_{y,x} = -2.
    fn arrow(&mut self, x: usize, y: usize) {
        self.set(y, x, -2);
        self.set(x, y, -1);
    }

    fn chain(&mut self, lo: usize, hi: usize) {
        for j in lo..hi {
            self.simple(j, j + 1);
        }
    }
}

pub fn langlands_dual(ty: LieType) -> LieType {
    ty.langlands_dual()
}

/// Position (s, k) in ι: the s-th occurrence of color k. Ordered lexicographically for
/// storage; the ι order is [`AdaptedSeq::cmp_double`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DoubleIndex {
    pub s: usize,
    pub k: usize,
}

impl DoubleIndex {
    pub fn new(s: usize, k: usize) -> Self {
        DoubleIndex { s, k }
    }
}

impl fmt::Display for DoubleIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.k)
    }
}

/// A periodic adapted sequence ι = (…, i_3, i_2, i_1), stored through its p bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdaptedSeq {
    cartan: CartanData,
    p: BTreeMap<(usize, usize), u8>,
    /// `period[r-1] = i_r` for 1 <= r <= n.
    period: Vec<usize>,
    /// `pos[k]` is the 1-based position of color k in the period.
    pos: Vec<usize>,
}

impl AdaptedSeq {
    /// Builds ι from bits `(i, j, p_{i,j})`. Every diagram edge must be determined by
    /// at least one of its two bits; conflicting or cyclic assignments are rejected.
    pub fn new(cartan: CartanData, bits: impl IntoIterator<Item = (usize, usize, u8)>) -> Result<Self> {
        let n = cartan.rank();
        let mut p = BTreeMap::new();
        for (i, j, b) in bits {
            if !(1..=n).contains(&i) || !(1..=n).contains(&j) || i == j {
                return Err(Error::InvalidSequence(format!("bad pair ({i},{j})")));
            }
            if cartan.a(i, j) >= 0 {
                return Err(Error::InvalidSequence(format!("({i},{j}) is not a diagram edge")));
            }
            if b > 1 {
                return Err(Error::InvalidSequence(format!("p_{{{i},{j}}} must be 0 or 1")));
            }
            for (key, val) in [((i, j), b), ((j, i), 1 - b)] {
                if let Some(old) = p.insert(key, val) {
                    if old != val {
                        return Err(Error::InvalidSequence(format!("conflicting bits for edge ({i},{j})")));
                    }
                }
            }
        }
        for i in 1..=n {
            for j in cartan.neighbors(i) {
                if !p.contains_key(&(i, j)) {
                    return Err(Error::InvalidSequence(format!("edge ({i},{j}) has no bit")));
                }
            }
        }
        let period = topological_period(n, &p)?;
        let mut pos = vec![0; n + 1];
        for (idx, &k) in period.iter().enumerate() {
            pos[k] = idx + 1;
        }
        Ok(AdaptedSeq { cartan, p, period, pos })
    }

    /// ι = (…, n, …, 2, 1, n, …, 2, 1): p_{i,j} = 1 iff i < j.
    pub fn default_for(cartan: CartanData) -> Self {
        let bits = default_bits(&cartan);
        AdaptedSeq::new(cartan, bits).expect("default orientation is acyclic")
    }

    /// Default bits, with the given ones overriding.
    pub fn with_overrides(cartan: CartanData, bits: impl IntoIterator<Item = (usize, usize, u8)>) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), u8> = BTreeMap::new();
        for (i, j, b) in default_bits(&cartan) {
            merged.insert((i.min(j), i.max(j)), if i < j { b } else { 1 - b });
        }
        for (i, j, b) in bits {
            if b > 1 {
                return Err(Error::InvalidSequence(format!("p_{{{i},{j}}} must be 0 or 1")));
            }
            merged.insert((i.min(j), i.max(j)), if i < j { b } else { 1 - b });
        }
        AdaptedSeq::new(cartan, merged.into_iter().map(|((i, j), b)| (i, j, b)))
    }

    /// The sequence whose period reads `period[0] = i_1, period[1] = i_2, …`.
    pub fn from_period(cartan: CartanData, period: &[usize]) -> Result<Self> {
        let n = cartan.rank();
        let mut sorted = period.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidSequence("period must be a permutation of I".into()));
        }
        let mut pos = vec![0; n + 1];
        for (idx, &k) in period.iter().enumerate() {
            pos[k] = idx;
        }
        let mut bits = Vec::new();
        for i in 1..=n {
            for j in cartan.neighbors(i).collect::<Vec<_>>() {
                bits.push((i, j, u8::from(pos[i] < pos[j])));
            }
        }
        AdaptedSeq::new(cartan, bits)
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn lie_type(&self) -> LieType {
        self.cartan.lie_type()
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    /// p_{i,j}, defined on diagram edges only.
    pub fn p(&self, i: usize, j: usize) -> Option<u8> {
        self.p.get(&(i, j)).copied()
    }

    pub fn bits(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.p.iter().map(|(&(i, j), &b)| (i, j, b))
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// Same bits over the Langlands dual Cartan matrix.
    pub fn dual(&self) -> AdaptedSeq {
        AdaptedSeq::new(self.cartan.dual(), self.bits()).expect("dual shares the diagram edges")
    }

    pub fn color(&self, r: usize) -> usize {
        assert!(r >= 1, "single indices start at 1");
        self.period[(r - 1) % self.rank()]
    }

    pub fn index_to_double(&self, r: usize) -> Result<DoubleIndex> {
        if r == 0 {
            return Err(Error::Domain("single index 0".into()));
        }
        let n = self.rank();
        Ok(DoubleIndex { s: (r - 1) / n + 1, k: self.period[(r - 1) % n] })
    }

    pub fn double_to_index(&self, d: DoubleIndex) -> Result<usize> {
        if d.s == 0 || !(1..=self.rank()).contains(&d.k) {
            return Err(Error::Domain(format!("double index {d}")));
        }
        Ok(self.index_of(d))
    }

    /// Unchecked variant of [`double_to_index`](Self::double_to_index).
    pub fn index_of(&self, d: DoubleIndex) -> usize {
        (d.s - 1) * self.rank() + self.pos[d.k]
    }

    pub fn cmp_double(&self, x: DoubleIndex, y: DoubleIndex) -> Ordering {
        (x.s, self.pos[x.k]).cmp(&(y.s, self.pos[y.k]))
    }

    pub fn r_plus(&self, r: usize) -> usize {
        r + self.rank()
    }

    /// Previous occurrence of the color of r, or 0.
    pub fn r_minus(&self, r: usize) -> usize {
        r.saturating_sub(self.rank())
    }
}

fn default_bits(cartan: &CartanData) -> Vec<(usize, usize, u8)> {
    let mut bits = Vec::new();
    for i in cartan.colors() {
        for j in cartan.neighbors(i) {
            bits.push((i, j, u8::from(i < j)));
        }
    }
    bits
}

/// Smallest-first topological order of "i before j" (p_{i,j} = 1).
fn topological_period(n: usize, p: &BTreeMap<(usize, usize), u8>) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; n + 1];
    for (&(_, j), &b) in p {
        if b == 1 {
            indeg[j] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (1..=n).filter(|&k| indeg[k] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for (&(x, j), &b) in p.range((i, 0)..=(i, usize::MAX)) {
            debug_assert_eq!(x, i);
            if b == 1 {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
    }
    if order.len() != n {
        return Err(Error::InvalidSequence("p bits contain a cycle; no periodic ι realizes them".into()));
    }
    Ok(order)
}

#[derive(Serialize, Deserialize)]
struct SeqRepr {
    #[serde(rename = "type")]
    ty: LieType,
    p: Vec<(usize, usize, u8)>,
}

impl Serialize for AdaptedSeq {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeqRepr { ty: self.lie_type(), p: self.bits().collect() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AdaptedSeq {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = SeqRepr::deserialize(de)?;
        let cartan = build_cartan(repr.ty).map_err(serde::de::Error::custom)?;
        AdaptedSeq::new(cartan, repr.p).map_err(serde::de::Error::custom)
    }
}

/// A representative list of every supported family at small rank.
pub fn sample_types() -> Vec<LieType> {
    let mut v = Vec::new();
    for n in 1..=4 {
        v.push(LieType::A(n));
    }
    for n in 2..=4 {
        v.push(LieType::B(n));
        v.push(LieType::C(n));
    }
    v.extend([LieType::D(4), LieType::D(5), LieType::A11]);
    for (a, b) in [(0, 0), (1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 2), (1, 4), (4, 1), (2, 3)] {
        v.push(LieType::Rank2 { a, b });
    }
    for n in 3..=5 {
        v.push(LieType::AffA(n));
        v.push(LieType::AffC(n));
        v.push(LieType::TwD(n));
        v.push(LieType::TwA2Even(n));
        v.push(LieType::TwA2EvenDagger(n));
    }
    for n in 4..=5 {
        v.push(LieType::AffB(n));
        v.push(LieType::TwA2Odd(n));
    }
    v.extend([LieType::AffD(5), LieType::AffD(6)]);
    v
}

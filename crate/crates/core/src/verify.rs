//! Tropicalized inequality systems, their comparison with the image of B(∞) in Z^∞,
//! simplification, and the Ξ′⁺ = Ξ′ condition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cartan::{AdaptedSeq, DoubleIndex};
use crate::error::{Error, Result};
use crate::linform::{gen_xi, LinForm, XiVariant};
use crate::moncrys::{gen_crystal, trop, LaurentMonomial};
use crate::rank2::cone_member;
use crate::zcrystal::{enumerate_image, ZSeq};

/// Where a form first appeared: Trop of `monomial` in M_{s,k} for g^L.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub s: usize,
    pub k: usize,
    pub monomial: LaurentMonomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IneqSystem {
    pub type_tag: String,
    pub forms: BTreeMap<LinForm, Provenance>,
    pub s_max: usize,
    pub depth: Option<usize>,
    pub window: usize,
    /// Forms with a variable above the window.
    pub escaping: BTreeSet<LinForm>,
    /// (s, k, complete) per generated crystal.
    pub crystals: Vec<(usize, usize, bool)>,
}

impl IneqSystem {
    pub fn complete(&self) -> bool {
        self.crystals.iter().all(|c| c.2)
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn contains(&self, f: &LinForm) -> bool {
        self.forms.contains_key(f)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let forms: Vec<serde_json::Value> = self
            .forms
            .iter()
            .map(|(f, p)| {
                serde_json::json!({
                    "form": f,
                    "text": f.to_string(),
                    "s": p.s,
                    "k": p.k,
                    "monomial": p.monomial.to_string(),
                    "escaping": self.escaping.contains(f),
                })
            })
            .collect();
        serde_json::json!({
            "type": self.type_tag,
            "s_max": self.s_max,
            "depth": self.depth,
            "window": self.window,
            "complete": self.complete(),
            "forms": forms,
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let depth = self.depth.map_or("full".to_string(), |d| d.to_string());
        let _ = writeln!(
            out,
            "# type {}, s <= {}, depth {depth}, window {} levels, complete {}",
            self.type_tag,
            self.s_max,
            self.window,
            self.complete()
        );
        for (f, p) in &self.forms {
            let esc = if self.escaping.contains(f) { " [beyond window]" } else { "" };
            let _ = writeln!(out, "{f} >= 0    # Trop({}) in M[{},{}]{esc}", p.monomial, p.s, p.k);
        }
        out
    }
}

/// ∪_{s ≤ s_max, k} Trop(M_{s,k}) for g^L. `depth = None` runs each crystal to
/// completion (finite types only); `window = None` takes the largest level seen.
pub fn build_ineq_system(
    seq: &AdaptedSeq,
    s_max: usize,
    depth: Option<usize>,
    window: Option<usize>,
) -> Result<IneqSystem> {
    if depth.is_none() && !seq.lie_type().is_finite() {
        return Err(Error::Range(format!("type {} needs a depth bound", seq.lie_type())));
    }
    if s_max == 0 {
        return Err(Error::Range("s_max must be >= 1".into()));
    }
    let dual = seq.dual();
    let mut forms = BTreeMap::new();
    let mut crystals = Vec::new();
    for s in 1..=s_max {
        for k in 1..=seq.rank() {
            let m = gen_crystal(&dual, s as i64, k, depth.unwrap_or(usize::MAX));
            crystals.push((s, k, m.complete));
            for x in &m.nodes {
                forms.entry(trop(x)?).or_insert_with(|| Provenance { s, k, monomial: x.clone() });
            }
        }
    }
    let top = forms.keys().map(LinForm::max_level).max().unwrap_or(0);
    let window = window.unwrap_or(top);
    let escaping = forms.keys().filter(|f| f.max_level() > window).cloned().collect();
    Ok(IneqSystem { type_tag: seq.lie_type().tag(), forms, s_max, depth, window, escaping, crystals })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplified {
    pub forms: BTreeSet<LinForm>,
    pub forced_zero: BTreeSet<DoubleIndex>,
    pub window: usize,
}

impl Simplified {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# reduced within {} levels", self.window);
        for f in &self.forms {
            let _ = writeln!(out, "{f} >= 0");
        }
        if !self.forced_zero.is_empty() {
            let zs: Vec<String> = self.forced_zero.iter().map(|d| format!("x[{},{}]", d.s, d.k)).collect();
            let _ = writeln!(out, "forced zero: {}", zs.join(", "));
        }
        out
    }
}

/// Truncate to the window and substitute forced zeros until nothing changes.
pub fn eliminate_forced_zeros<'a>(forms: impl IntoIterator<Item = &'a LinForm>, window: usize) -> Simplified {
    let mut cur: BTreeSet<LinForm> = forms.into_iter().map(|f| f.truncated(window)).filter(|f| !f.is_zero()).collect();
    let mut forced = BTreeSet::new();
    loop {
        let mut pos = BTreeSet::new();
        let mut neg = BTreeSet::new();
        for f in &cur {
            if f.len() == 1 {
                let (d, c) = f.terms().next().unwrap();
                if c.sign() == num_bigint::Sign::Plus {
                    pos.insert(d);
                } else {
                    neg.insert(d);
                }
            }
        }
        let new: BTreeSet<DoubleIndex> = pos.intersection(&neg).copied().collect();
        if new.is_empty() {
            break;
        }
        cur = cur
            .iter()
            .map(|f| LinForm::from_terms(f.terms().filter(|(d, _)| !new.contains(d)).map(|(d, c)| (d, c.clone()))))
            .filter(|f| !f.is_zero())
            .collect();
        forced.extend(new);
    }
    Simplified { forms: cur, forced_zero: forced, window }
}

/// Forced zeros, then removal of every form that is a nonnegative combination of the rest.
pub fn simplify_forms<'a>(forms: impl IntoIterator<Item = &'a LinForm>, window: usize) -> Simplified {
    let mut out = eliminate_forced_zeros(forms, window);
    // most complex forms first, so short ones survive as the presentation
    let mut order: Vec<LinForm> = out.forms.iter().cloned().collect();
    order.sort_by_key(|f| std::cmp::Reverse((f.len(), f.clone())));
    let mut kept: BTreeSet<LinForm> = out.forms.clone();
    for f in order {
        let others: Vec<LinForm> = kept.iter().filter(|g| **g != f).cloned().collect();
        if cone_member(&f, &others).is_some() {
            kept.remove(&f);
        }
    }
    out.forms = kept;
    out
}

pub fn simplify(system: &IneqSystem) -> Simplified {
    simplify_forms(system.forms.keys(), system.window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyResult {
    ExactMatch,
    ExactMatchAtHorizon,
    InclusionOnly,
    Mismatch,
}

impl VerifyResult {
    pub fn exit_code(&self) -> i32 {
        match self {
            VerifyResult::ExactMatch | VerifyResult::ExactMatchAtHorizon => 0,
            VerifyResult::InclusionOnly => 2,
            VerifyResult::Mismatch => 3,
        }
    }

    pub fn is_match(&self) -> bool {
        self.exit_code() == 0
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            VerifyResult::ExactMatch => "exact-match",
            VerifyResult::ExactMatchAtHorizon => "exact-match-at-horizon",
            VerifyResult::InclusionOnly => "inclusion-only",
            VerifyResult::Mismatch => "mismatch",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerComparison {
    pub d: usize,
    pub image: usize,
    pub cone: usize,
    /// In the image but violating some form.
    pub missing: Vec<ZSeq>,
    /// Satisfying every form but not in the image.
    pub extra: Vec<ZSeq>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(rename = "type")]
    pub type_tag: String,
    pub s_max: usize,
    pub depth_ineq: Option<usize>,
    pub depth_image: usize,
    pub result: VerifyResult,
    pub system_complete: bool,
    pub forms: usize,
    pub forced_zero: usize,
    pub layers: Vec<LayerComparison>,
    pub witnesses: Vec<ZSeq>,
    /// Inequality depth of the rerun after a one-sided difference, if any.
    pub reran_at: Option<usize>,
}

impl VerificationReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let depth = self.depth_ineq.map_or("full".to_string(), |d| d.to_string());
        let _ = writeln!(
            out,
            "type {}: {} (window {} levels, inequality depth {depth}, image depth {})",
            self.type_tag,
            self.result.as_str(),
            self.s_max,
            self.depth_image
        );
        if self.result == VerifyResult::ExactMatchAtHorizon {
            let _ = writeln!(out, "note: crystals truncated, equality holds within the horizon only");
        }
        let _ = writeln!(
            out,
            "forms {}, forced zeros {}, crystals complete {}",
            self.forms, self.forced_zero, self.system_complete
        );
        for l in &self.layers {
            let _ = writeln!(
                out,
                "layer {}: image {} cone {} missing {} extra {}",
                l.d,
                l.image,
                l.cone,
                l.missing.len(),
                l.extra.len()
            );
        }
        if let Some(d) = self.reran_at {
            let _ = writeln!(out, "rerun at inequality depth {d}");
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "witness {w}");
        }
        out
    }
}

/// Number of levels spanned by the image layers up to `depth`.
pub fn image_levels(seq: &AdaptedSeq, depth: usize) -> usize {
    let n = seq.rank();
    enumerate_image(seq, depth).iter().flatten().map(|a| a.max_support().div_ceil(n)).max().unwrap_or(0)
}

/// Layer-by-layer comparison of {a ≥ 0 in the window : φ(a) ≥ 0 for all φ} with the image.
fn compare(seq: &AdaptedSeq, system: &IneqSystem, layers: &[BTreeSet<ZSeq>]) -> Result<(Vec<LayerComparison>, usize)> {
    let n = seq.rank();
    let reduced = eliminate_forced_zeros(system.forms.keys(), system.window);
    let free: Vec<usize> = (1..=system.window * n)
        .filter(|&r| !reduced.forced_zero.contains(&seq.index_to_double(r).expect("r >= 1")))
        .collect();
    let pos: BTreeMap<usize, usize> = free.iter().enumerate().map(|(p, &r)| (r, p)).collect();
    let compiled: Vec<Vec<(usize, i64)>> = reduced
        .forms
        .iter()
        .map(|f| Ok(f.to_i64_terms()?.into_iter().map(|(d, c)| (pos[&seq.index_of(d)], c)).collect()))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (d, layer) in layers.iter().enumerate() {
        let mut cone = BTreeSet::new();
        let mut vals = vec![0i64; free.len()];
        compositions(&mut vals, 0, d as i64, &mut |v| {
            if compiled.iter().all(|f| f.iter().map(|&(p, c)| c * v[p]).sum::<i64>() >= 0) {
                cone.insert(ZSeq::from_pairs(free.iter().zip(v).map(|(&r, &x)| (r, x))));
            }
        });
        out.push(LayerComparison {
            d,
            image: layer.len(),
            cone: cone.len(),
            missing: layer.difference(&cone).cloned().collect(),
            extra: cone.difference(layer).cloned().collect(),
        });
    }
    Ok((out, reduced.forced_zero.len()))
}

fn compositions(vals: &mut [i64], idx: usize, left: i64, visit: &mut dyn FnMut(&[i64])) {
    if idx + 1 == vals.len() {
        vals[idx] = left;
        visit(vals);
        vals[idx] = 0;
        return;
    }
    if vals.is_empty() {
        if left == 0 {
            visit(vals);
        }
        return;
    }
    for v in 0..=left {
        vals[idx] = v;
        compositions(vals, idx + 1, left - v, visit);
    }
    vals[idx] = 0;
}

/// Compare the inequality-defined set with the image of B(∞) within `s_max` levels.
pub fn conjecture_check(
    seq: &AdaptedSeq,
    s_max: usize,
    depth_ineq: Option<usize>,
    depth_image: usize,
) -> Result<VerificationReport> {
    let layers = enumerate_image(seq, depth_image);
    let n = seq.rank();
    if let Some(a) = layers.iter().flatten().find(|a| a.max_support() > s_max * n) {
        return Err(Error::Window(format!("image element {a} leaves the window of {s_max} levels")));
    }
    let run = |depth: Option<usize>| -> Result<(IneqSystem, Vec<LayerComparison>, usize)> {
        let system = build_ineq_system(seq, s_max, depth, Some(s_max))?;
        let (cmp, forced) = compare(seq, &system, &layers)?;
        Ok((system, cmp, forced))
    };
    let (mut system, mut cmp, mut forced) = run(depth_ineq)?;
    let mut reran_at = None;
    let one_sided =
        |c: &[LayerComparison]| c.iter().all(|l| l.missing.is_empty()) && c.iter().any(|l| !l.extra.is_empty());
    if one_sided(&cmp) && !system.complete() {
        if let Some(d) = depth_ineq {
            reran_at = Some(d + 2);
            (system, cmp, forced) = run(Some(d + 2))?;
        }
    }
    let equal = cmp.iter().all(|l| l.missing.is_empty() && l.extra.is_empty());
    let result = match (equal, system.complete()) {
        (true, true) => VerifyResult::ExactMatch,
        (true, false) => VerifyResult::ExactMatchAtHorizon,
        (false, false) if one_sided(&cmp) => VerifyResult::InclusionOnly,
        _ => VerifyResult::Mismatch,
    };
    let witnesses = cmp.iter().flat_map(|l| l.missing.iter().chain(&l.extra)).take(5).cloned().collect();
    Ok(VerificationReport {
        type_tag: seq.lie_type().tag(),
        s_max,
        depth_ineq: system.depth,
        depth_image,
        result,
        system_complete: system.complete(),
        forms: system.len(),
        forced_zero: forced,
        layers: cmp,
        witnesses,
        reran_at,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MainAssumpReport {
    pub s: usize,
    pub k: usize,
    pub depth: usize,
    pub sprime: usize,
    pub positive_only: usize,
    pub closed: bool,
    pub equal: bool,
    /// In Ξ′ but not reached by positive actions within the horizon.
    pub missing: Vec<LinForm>,
}

/// Ξ′⁺_{s,k} against Ξ′_{s,k}, both truncated at `depth`.
pub fn check_mainassump(seq: &AdaptedSeq, s: usize, k: usize, depth: usize) -> MainAssumpReport {
    let full = gen_xi(seq, s, k, depth, XiVariant::Sprime);
    let pos = gen_xi(seq, s, k, depth, XiVariant::SprimePositiveOnly);
    let missing: Vec<LinForm> = full.iter().filter(|f| !pos.contains(f)).cloned().collect();
    let extra = pos.iter().any(|f| !full.contains(f));
    MainAssumpReport {
        s,
        k,
        depth,
        sprime: full.len(),
        positive_only: pos.len(),
        closed: full.closed && pos.closed,
        equal: missing.is_empty() && !extra,
        missing,
    }
}

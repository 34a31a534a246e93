//! Checks that compare Betti-side and Stanley-side invariants on concrete
//! ideals, each producing a serializable [`CheckReport`].

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::betti::{betti_poset_of, lattice_betti_elements, scarf_nodes, BettiError, HomologicalSummary};
use crate::homology::FieldSpec;
use crate::monomial::{IdealError, LcmLattice, Monomial, MonomialIdeal};
use crate::poset::{canonical_form, FiniteLattice, NodeId, PosetError};
use crate::stanley::{sdepth, SearchBudget, Side, StanleyError};

pub const REPORT_SCHEMA: u32 = 1;

pub const SURJECTION_MONOTONICITY: &str = "surjection-monotonicity";
pub const MB_CHAIN: &str = "mb-chain";
pub const ONESTEP: &str = "onestep";
pub const CONJECTURE_SCAN: &str = "conjecture-scan";
pub const STANLEY_BOUNDS: &str = "stanley-bounds";
pub const LENGTH_BOUNDS: &str = "length-bounds";
pub const REDUCTION_LEMMA: &str = "reduction-lemma";
pub const GENERIC_WEAK: &str = "generic-weak";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("ideal is not squarefree")]
    NotSquarefree,
    #[error("ideal is not generic")]
    NotGeneric,
    #[error("node {0} is not meet-irreducible")]
    NotMeetIrreducible(NodeId),
    #[error("lattice is not atomistic")]
    NotAtomistic,
    #[error("{0} atoms exceed the limit of 64")]
    TooManyAtoms(usize),
    #[error("budget exhausted: {0}")]
    BudgetExceeded(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("malformed report: {0}")]
    MalformedReport(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Stanley(StanleyError),
}

impl From<StanleyError> for LabError {
    fn from(e: StanleyError) -> Self {
        match e {
            StanleyError::BudgetExceeded(state) => LabError::BudgetExceeded(state.to_string()),
            other => LabError::Stanley(other),
        }
    }
}

impl From<BettiError> for LabError {
    fn from(e: BettiError) -> Self {
        match e {
            BettiError::Ideal(i) => LabError::Ideal(i),
            other => LabError::MalformedReport(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Violated,
    Unknown,
    NotApplicable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::Unknown => "unknown",
            Verdict::NotApplicable => "not-applicable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportInput {
    pub fingerprint: String,
    pub ideal: String,
}

impl ReportInput {
    pub fn of(ideal: &MonomialIdeal) -> Self {
        Self { fingerprint: ideal.fingerprint(), ideal: ideal.to_text() }
    }
}

/// Outcome of one check. A violated report always carries a witness, and
/// every witness lists the ideals needed to rerun the check under
/// `"ideals"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: u32,
    pub check: String,
    pub inputs: Vec<ReportInput>,
    pub field: FieldSpec,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub quantities: BTreeMap<String, i64>,
    pub verdict: Verdict,
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl CheckReport {
    fn new(check: &str, inputs: &[&MonomialIdeal], field: FieldSpec) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            check: check.to_string(),
            inputs: inputs.iter().map(|i| ReportInput::of(i)).collect(),
            field,
            params: BTreeMap::new(),
            quantities: BTreeMap::new(),
            verdict: Verdict::Unknown,
            reason: String::new(),
            witness: None,
            details: None,
        }
    }

    fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    fn q(&mut self, key: &str, value: impl TryInto<i64>) {
        let v = value.try_into().unwrap_or(i64::MAX);
        self.quantities.insert(key.to_string(), v);
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.q(key, value as i64);
    }

    fn conclude(mut self, verdict: Verdict, reason: impl Into<String>) -> Self {
        self.verdict = verdict;
        self.reason = reason.into();
        if verdict == Verdict::Violated && self.witness.is_none() {
            let ideals: Vec<&str> = self.inputs.iter().map(|i| i.ideal.as_str()).collect();
            self.witness = Some(json!({ "ideals": ideals, "quantities": self.quantities }));
        }
        self
    }

    /// Key used to order reports: the first input fingerprint, then the
    /// check name.
    pub fn sort_key(&self) -> (String, String) {
        (self.inputs.first().map(|i| i.fingerprint.clone()).unwrap_or_default(), self.check.clone())
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(line)
    }
}

/// JSON lines, one report per line, ordered by [`CheckReport::sort_key`].
pub fn reports_to_json_lines(reports: &[CheckReport]) -> String {
    let mut sorted: Vec<&CheckReport> = reports.iter().collect();
    sorted.sort_by_key(|r| r.sort_key());
    sorted.iter().map(|r| r.to_json_line() + "\n").collect()
}

fn sdepth_value(ideal: &MonomialIdeal, side: Side, budget: &SearchBudget) -> Result<usize, LabError> {
    Ok(sdepth(ideal, side, budget)?.value)
}

fn summary(lcm: &LcmLattice, nvars: usize, field: FieldSpec) -> HomologicalSummary {
    HomologicalSummary::from_table(&crate::betti::betti_table_of(lcm, nvars, field))
}

fn atom_masks(l: &FiniteLattice) -> Result<Vec<u64>, LabError> {
    let atoms = l.atoms();
    if atoms.len() > 64 {
        return Err(LabError::TooManyAtoms(atoms.len()));
    }
    Ok((0..l.len())
        .map(|x| {
            atoms
                .iter()
                .enumerate()
                .filter(|&(_, &a)| l.leq(a, x))
                .fold(0u64, |m, (k, _)| m | (1 << k))
        })
        .collect())
}

/// A join-preserving surjection between atomistic lattices, given by the
/// images of the atoms and extended by joins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinSurjection {
    pub atom_images: Vec<NodeId>,
    /// Image of every node of the source lattice.
    pub images: Vec<NodeId>,
}

/// Extends atom images to all of `l` by `f(x) = join of f(a), a <= x`.
pub fn extend_by_joins(l: &FiniteLattice, l2: &FiniteLattice, atom_images: &[NodeId]) -> Vec<NodeId> {
    (0..l.len())
        .map(|x| {
            l.atoms()
                .iter()
                .zip(atom_images)
                .filter(|&(&a, _)| l.leq(a, x))
                .fold(l2.bottom(), |acc, (_, &img)| l2.join(acc, img))
        })
        .collect()
}

/// Checks a full image table against the join tables of both lattices.
pub fn is_join_surjection(l: &FiniteLattice, l2: &FiniteLattice, images: &[NodeId]) -> bool {
    if images.len() != l.len() || images.iter().any(|&y| y >= l2.len()) {
        return false;
    }
    if images[l.bottom()] != l2.bottom() {
        return false;
    }
    let mut hit = vec![false; l2.len()];
    for &y in images {
        hit[y] = true;
    }
    if !hit.iter().all(|&h| h) {
        return false;
    }
    (0..l.len()).all(|x| (0..l.len()).all(|y| images[l.join(x, y)] == l2.join(images[x], images[y])))
}

struct SurjectionSearch<'a> {
    l: &'a FiniteLattice,
    l2: &'a FiniteLattice,
    masks: Vec<u64>,
    images: Vec<NodeId>,
    nodes: u64,
    limit: u64,
}

impl SurjectionSearch<'_> {
    /// Atom `t` of the target first, then the other atoms, then everything
    /// else with the bottom last.
    fn candidates(&self, t: usize) -> Vec<NodeId> {
        let atoms = self.l2.atoms();
        let mut c: Vec<NodeId> = atoms.get(t).copied().into_iter().collect();
        c.extend(atoms.iter().copied().filter(|y| Some(y) != atoms.get(t)));
        c.extend((0..self.l2.len()).filter(|&y| y != self.l2.bottom() && !atoms.contains(&y)));
        c.push(self.l2.bottom());
        c
    }

    fn partial(&self, x: NodeId, assigned: u64) -> NodeId {
        let m = self.masks[x] & assigned;
        (0..self.images.len())
            .filter(|&k| m >> k & 1 == 1)
            .fold(self.l2.bottom(), |acc, k| self.l2.join(acc, self.images[k]))
    }

    /// Pairs whose atoms are all assigned must already satisfy
    /// `f(x v y) <= f(x) v f(y)`; the left side only grows later.
    fn consistent(&self, assigned: u64) -> bool {
        let done: Vec<NodeId> = (0..self.l.len()).filter(|&x| self.masks[x] & !assigned == 0).collect();
        let part: HashMap<NodeId, NodeId> = done.iter().map(|&x| (x, self.partial(x, assigned))).collect();
        done.iter().all(|&x| {
            done.iter().all(|&y| {
                let z = self.l.join(x, y);
                let fz = part.get(&z).copied().unwrap_or_else(|| self.partial(z, assigned));
                self.l2.leq(fz, self.l2.join(part[&x], part[&y]))
            })
        })
    }

    fn run(&mut self, t: usize) -> Result<bool, LabError> {
        let k = self.l.atoms().len();
        if t == k {
            let full = extend_by_joins(self.l, self.l2, &self.images);
            return Ok(is_join_surjection(self.l, self.l2, &full));
        }
        let assigned = if t + 1 == 64 { u64::MAX } else { (1u64 << (t + 1)) - 1 };
        for y in self.candidates(t) {
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(LabError::BudgetExceeded(format!(
                    "join-surjection search stopped after {} nodes at atom {}",
                    self.limit, t
                )));
            }
            self.images.push(y);
            if self.consistent(assigned) && self.run(t + 1)? {
                return Ok(true);
            }
            self.images.pop();
        }
        Ok(false)
    }
}

/// Complete backtracking search for a join-preserving surjection `l -> l2`
/// sending the bottom to the bottom. `None` means no such map exists.
pub fn find_join_surjection(
    l: &FiniteLattice,
    l2: &FiniteLattice,
    node_limit: u64,
) -> Result<Option<JoinSurjection>, LabError> {
    if !l.is_atomistic() || !l2.is_atomistic() {
        return Err(LabError::NotAtomistic);
    }
    if l2.len() > l.len() {
        return Ok(None);
    }
    let masks = atom_masks(l)?;
    let mut search = SurjectionSearch { l, l2, masks, images: Vec::new(), nodes: 0, limit: node_limit };
    if !search.run(0)? {
        return Ok(None);
    }
    let atom_images = search.images;
    let images = extend_by_joins(l, l2, &atom_images);
    assert!(is_join_surjection(l, l2, &images), "search returned an invalid map");
    Ok(Some(JoinSurjection { atom_images, images }))
}

/// Monotonicity of projective dimensions along a join-preserving surjection
/// `L_I -> L_I2`, on both the quotient and the ideal side.
pub fn surjection_monotonicity_check(
    ideal: &MonomialIdeal,
    ideal2: &MonomialIdeal,
    field: FieldSpec,
    budget: &SearchBudget,
) -> Result<CheckReport, LabError> {
    let mut r = CheckReport::new(SURJECTION_MONOTONICITY, &[ideal, ideal2], field);
    let l1 = LcmLattice::new(ideal)?;
    let l2 = LcmLattice::new(ideal2)?;
    let Some(map) = find_join_surjection(l1.lattice(), l2.lattice(), budget.nodes)? else {
        return Ok(r.conclude(Verdict::Unknown, "no join-preserving surjection between the lcm-lattices"));
    };
    let atoms: Vec<String> = map.atom_images.iter().map(|&y| ideal2.format_monomial(l2.degree(y))).collect();
    let s1 = summary(&l1, ideal.nvars(), field);
    let s2 = summary(&l2, ideal2.nvars(), field);
    let sq1 = ideal.nvars() - sdepth_value(ideal, Side::Quotient, budget)?;
    let sq2 = ideal2.nvars() - sdepth_value(ideal2, Side::Quotient, budget)?;
    let si1 = ideal.nvars() - sdepth_value(ideal, Side::Ideal, budget)?;
    let si2 = ideal2.nvars() - sdepth_value(ideal2, Side::Ideal, budget)?;
    r.q("pdim_quotient", s1.pdim_quotient);
    r.q("pdim_quotient_2", s2.pdim_quotient);
    r.q("pdim_ideal", s1.pdim_ideal);
    r.q("pdim_ideal_2", s2.pdim_ideal);
    r.q("spdim_quotient", sq1);
    r.q("spdim_quotient_2", sq2);
    r.q("spdim_ideal", si1);
    r.q("spdim_ideal_2", si2);
    r.details = Some(json!({ "atom_images": atoms }));
    let ok = s2.pdim_quotient <= s1.pdim_quotient && s2.pdim_ideal <= s1.pdim_ideal && sq2 <= sq1 && si2 <= si1;
    Ok(if ok {
        r.conclude(Verdict::Holds, "pdim and spdim do not increase along the surjection")
    } else {
        r.conclude(Verdict::Violated, "a dimension increases along the surjection")
    })
}

/// Removes `L \ M(B)` from the lcm-lattice by decreasing rank and checks that
/// the Betti poset stays the same at every step.
pub fn mb_chain_check(ideal: &MonomialIdeal, field: FieldSpec) -> Result<CheckReport, LabError> {
    let mut r = CheckReport::new(MB_CHAIN, &[ideal], field);
    let lcm = LcmLattice::new(ideal)?;
    let l = lcm.lattice();
    let bp = betti_poset_of(&lcm, field);
    let masks = atom_masks(l)?;
    let by_mask: HashMap<u64, NodeId> = masks.iter().enumerate().map(|(x, &m)| (m, x)).collect();
    let family: Vec<u64> = bp.nodes.iter().map(|&b| masks[b]).collect();
    let closure = crate::poset::meet_closure(l.atoms().len(), &family);
    let mut keep: Vec<NodeId> = (0..closure.len())
        .map(|s| {
            let label = closure.label(s).expect("meet closure is labelled");
            let mask = label.iter().enumerate().fold(0u64, |m, (k, &bit)| m | ((bit as u64) << k));
            by_mask[&mask]
        })
        .collect();
    if !keep.contains(&l.bottom()) {
        keep.push(l.bottom());
    }
    keep.sort_unstable();
    let chain = l.decreasing_rank_chain(&keep)?;
    let reference = bp.canonical_form();
    let mut betti_sorted = bp.nodes.clone();
    betti_sorted.sort_unstable();

    let mut problems = Vec::new();
    for (i, (li, nodes)) in chain.lattices.iter().zip(&chain.nodes).enumerate() {
        let local = lattice_betti_elements(li, field);
        let mut global: Vec<NodeId> = local.iter().map(|&x| nodes[x]).collect();
        global.sort_unstable();
        if global != betti_sorted {
            problems.push(json!({ "step": i, "problem": "betti elements changed" }));
        } else if canonical_form(&li.poset().induced(&local)) != reference {
            problems.push(json!({ "step": i, "problem": "betti poset not isomorphic" }));
        }
    }
    for &a in &chain.removed {
        if bp.nodes.contains(&a) {
            problems.push(json!({ "removed": ideal.format_monomial(lcm.degree(a)), "problem": "removed a Betti element" }));
        }
    }
    if chain.removed.len() != l.len() - keep.len() {
        problems.push(json!({ "problem": "chain length differs from |L| - |M(B)|" }));
    }

    r.q("lattice_size", l.len());
    r.q("betti_size", bp.len());
    r.q("mb_size", keep.len());
    r.q("chain_length", chain.removed.len());
    let removed: Vec<String> = chain.removed.iter().map(|&a| ideal.format_monomial(lcm.degree(a))).collect();
    r.details = Some(json!({ "removed": removed }));
    Ok(if problems.is_empty() {
        r.conclude(Verdict::Holds, "Betti poset constant along the chain")
    } else {
        let ideals = vec![ideal.to_text()];
        r.witness = Some(json!({ "ideals": ideals, "problems": problems }));
        r.conclude(Verdict::Violated, "Betti poset changed along the chain")
    })
}

/// Compares `I` with `(I : v)` for a squarefree `I`.
pub fn check_onestep(
    ideal: &MonomialIdeal,
    var: usize,
    field: FieldSpec,
    budget: &SearchBudget,
) -> Result<CheckReport, LabError> {
    if !ideal.is_squarefree() {
        return Err(LabError::NotSquarefree);
    }
    let name = ideal
        .variables()
        .get(var)
        .cloned()
        .ok_or_else(|| IdealError::UnknownVariable(format!("#{var}")))?;
    let mut r = CheckReport::new(ONESTEP, &[ideal], field).param("var", &name);
    let colon = match ideal.colon_by_variable(var) {
        Ok(c) => c,
        Err(IdealError::UnitIdeal) => {
            return Ok(r.conclude(Verdict::NotApplicable, format!("{name} is a generator, the colon is the unit ideal")))
        }
        Err(e) => return Err(e.into()),
    };
    let b1 = betti_poset_of(&LcmLattice::new(ideal)?, field);
    let b2 = betti_poset_of(&LcmLattice::new(&colon)?, field);
    let iso = b1.canonical_form() == b2.canonical_form();
    let sq = sdepth_value(ideal, Side::Quotient, budget)?;
    let sq2 = sdepth_value(&colon, Side::Quotient, budget)?;
    let si = sdepth_value(ideal, Side::Ideal, budget)?;
    let si2 = sdepth_value(&colon, Side::Ideal, budget)?;
    r.flag("betti_isomorphic", iso);
    r.q("sdepth_quotient", sq);
    r.q("sdepth_quotient_colon", sq2);
    r.q("sdepth_ideal", si);
    r.q("sdepth_ideal_colon", si2);
    r.details = Some(json!({ "colon": colon.to_text() }));

    if sq > sq2 || si > si2 {
        return Ok(r.conclude(Verdict::Violated, "sdepth decreased under the colon"));
    }
    Ok(if !iso {
        r.conclude(Verdict::NotApplicable, "Betti posets differ; restriction inequalities hold")
    } else if sq == sq2 && si == si2 {
        r.conclude(Verdict::Holds, "isomorphic Betti posets and equal sdepths")
    } else {
        r.conclude(Verdict::Violated, "isomorphic Betti posets but different sdepths")
    })
}

#[derive(Debug, Clone)]
struct ScanMember {
    fingerprint: String,
    text: String,
    class: String,
    field_sensitive: bool,
    spdim_quotient: usize,
    spdim_ideal: usize,
}

fn other_field(field: FieldSpec) -> FieldSpec {
    if field.characteristic() == 2 {
        FieldSpec::RATIONALS
    } else {
        FieldSpec::prime(2).expect("2 is prime")
    }
}

fn scan_member(ideal: &MonomialIdeal, field: FieldSpec, budget: &SearchBudget) -> Result<ScanMember, LabError> {
    let lcm = LcmLattice::new(ideal)?;
    let class = betti_poset_of(&lcm, field).canonical_form();
    let alt = betti_poset_of(&lcm, other_field(field)).canonical_form();
    let n = ideal.nvars();
    Ok(ScanMember {
        fingerprint: ideal.fingerprint(),
        text: ideal.to_text(),
        field_sensitive: class != alt,
        class: hex::encode(class),
        spdim_quotient: n - sdepth_value(ideal, Side::Quotient, budget)?,
        spdim_ideal: n - sdepth_value(ideal, Side::Ideal, budget)?,
    })
}

/// Groups a corpus by Betti poset (over `field`) and checks that spdim of
/// `S/I` and of `I` is constant on each class. Members over budget are
/// skipped and listed.
pub fn conjecture_scan(corpus: &[MonomialIdeal], field: FieldSpec, budget: &SearchBudget) -> CheckReport {
    let mut sorted: Vec<&MonomialIdeal> = corpus.iter().collect();
    sorted.sort_by_cached_key(|i| (i.fingerprint(), i.to_text()));
    let mut r = CheckReport::new(CONJECTURE_SCAN, &sorted, field);

    let results: Vec<Result<ScanMember, (String, String)>> = sorted
        .par_iter()
        .map(|i| scan_member(i, field, budget).map_err(|e| (i.fingerprint(), e.to_string())))
        .collect();
    let mut classes: BTreeMap<String, Vec<ScanMember>> = BTreeMap::new();
    let mut skipped = Vec::new();
    let mut sensitive = Vec::new();
    for res in results {
        match res {
            Ok(m) => {
                if m.field_sensitive {
                    sensitive.push(m.fingerprint.clone());
                }
                classes.entry(m.class.clone()).or_default().push(m);
            }
            Err((fp, why)) => skipped.push(json!({ "fingerprint": fp, "reason": why })),
        }
    }

    let mut violations = Vec::new();
    let mut listing = Vec::new();
    for (class, members) in &classes {
        let first = &members[0];
        for m in &members[1..] {
            if m.spdim_quotient != first.spdim_quotient || m.spdim_ideal != first.spdim_ideal {
                violations.push(json!({
                    "class": class,
                    "ideals": [first.text, m.text],
                    "spdim_quotient": [first.spdim_quotient, m.spdim_quotient],
                    "spdim_ideal": [first.spdim_ideal, m.spdim_ideal],
                }));
            }
        }
        let fps: Vec<&str> = members.iter().map(|m| m.fingerprint.as_str()).collect();
        let sq: Vec<usize> = members.iter().map(|m| m.spdim_quotient).collect();
        let si: Vec<usize> = members.iter().map(|m| m.spdim_ideal).collect();
        listing.push(json!({ "class": class, "members": fps, "spdim_quotient": sq, "spdim_ideal": si }));
    }

    r.q("members", sorted.len());
    r.q("classes", classes.len());
    r.q("nontrivial_classes", classes.values().filter(|m| m.len() >= 2).count());
    r.q("skipped", skipped.len());
    r.q("field_sensitive", sensitive.len());
    r.q("violations", violations.len());
    r.details = Some(json!({ "classes": listing, "skipped": skipped, "field_sensitive": sensitive }));
    if let Some(first) = violations.first() {
        let mut w = first.clone();
        w["all"] = Value::Array(violations.clone());
        r.witness = Some(w);
        r.conclude(Verdict::Violated, "spdim differs inside a Betti class")
    } else if !skipped.is_empty() {
        r.conclude(Verdict::Unknown, "no violation among the members within budget")
    } else {
        r.conclude(Verdict::Holds, "spdim constant on every Betti class")
    }
}

/// `sdepth S/I >= depth S/I - 1` and `sdepth I >= depth I`.
pub fn stanley_bounds_check(
    ideal: &MonomialIdeal,
    field: FieldSpec,
    budget: &SearchBudget,
) -> Result<CheckReport, LabError> {
    let mut r = CheckReport::new(STANLEY_BOUNDS, &[ideal], field);
    let lcm = LcmLattice::new(ideal)?;
    let s = summary(&lcm, ideal.nvars(), field);
    let sq = sdepth_value(ideal, Side::Quotient, budget)?;
    let si = sdepth_value(ideal, Side::Ideal, budget)?;
    r.q("sdepth_quotient", sq);
    r.q("depth_quotient", s.depth_quotient);
    r.q("sdepth_ideal", si);
    r.q("depth_ideal", s.depth_ideal);
    Ok(if sq + 1 >= s.depth_quotient && si >= s.depth_ideal {
        r.conclude(Verdict::Holds, "both depth bounds hold")
    } else {
        r.conclude(Verdict::Violated, "sdepth below the depth bound")
    })
}

/// `spdim S/I <= l(L_I)` and `spdim I <= l(L_I) - 1`.
pub fn length_bounds_check(ideal: &MonomialIdeal, budget: &SearchBudget) -> Result<CheckReport, LabError> {
    let mut r = CheckReport::new(LENGTH_BOUNDS, &[ideal], FieldSpec::RATIONALS);
    let lcm = LcmLattice::new(ideal)?;
    let len = lcm.lattice().length();
    let n = ideal.nvars();
    let sq = n - sdepth_value(ideal, Side::Quotient, budget)?;
    let si = n - sdepth_value(ideal, Side::Ideal, budget)?;
    r.q("lattice_length", len);
    r.q("spdim_quotient", sq);
    r.q("spdim_ideal", si);
    Ok(if sq <= len && si < len {
        r.conclude(Verdict::Holds, "spdim bounded by the lattice length")
    } else {
        r.conclude(Verdict::Violated, "spdim exceeds the lattice length bound")
    })
}

/// Squarefree ideal whose lcm-lattice is isomorphic to `l`: one variable per
/// meet-irreducible other than the top, and for each atom `a` the product of
/// the variables `x_m` with `a` not below `m`.
pub fn realize_lattice(l: &FiniteLattice) -> Result<MonomialIdeal, LabError> {
    if !l.is_atomistic() || l.atoms().is_empty() {
        return Err(LabError::NotAtomistic);
    }
    let irreducibles: Vec<NodeId> = l.meet_irreducibles().into_iter().filter(|&m| m != l.top()).collect();
    let gens: Vec<Monomial> = l
        .atoms()
        .iter()
        .map(|&a| Monomial(irreducibles.iter().map(|&m| u32::from(!l.leq(a, m))).collect()))
        .collect();
    Ok(MonomialIdeal::with_default_names(gens)?)
}

/// Compares `spdim I` for the lattice and for the lattice with the
/// meet-irreducible `a` removed, when `rk a < 2p`.
pub fn reduction_lemma_check(
    ideal: &MonomialIdeal,
    a: NodeId,
    p: Option<usize>,
    field: FieldSpec,
    budget: &SearchBudget,
) -> Result<CheckReport, LabError> {
    let lcm = LcmLattice::new(ideal)?;
    let l = lcm.lattice();
    let rank = l.rank(a)?;
    if !l.is_meet_irreducible(a) {
        return Err(LabError::NotMeetIrreducible(a));
    }
    let p = match p {
        Some(p) => p,
        None => summary(&lcm, ideal.nvars(), field).pdim_quotient,
    };
    let mut r = CheckReport::new(REDUCTION_LEMMA, &[ideal], field).param("element", a).param("p", p);
    r.q("rank", rank);
    r.q("p", p);
    if rank >= 2 * p {
        return Ok(r.conclude(Verdict::NotApplicable, "rank too large: rk a >= 2p"));
    }
    if a == l.top() || a == l.bottom() {
        return Ok(r.conclude(Verdict::NotApplicable, "removing the top or bottom does not leave a lattice"));
    }
    let smaller = l.remove_element(a)?;
    if smaller.len() < 2 || !smaller.is_atomistic() {
        return Ok(r.conclude(Verdict::NotApplicable, "the smaller lattice is degenerate or not atomistic"));
    }
    let whole = realize_lattice(l)?;
    let part = realize_lattice(&smaller)?;
    let s = whole.nvars() - sdepth_value(&whole, Side::Ideal, budget)?;
    let s2 = part.nvars() - sdepth_value(&part, Side::Ideal, budget)?;
    r.q("spdim_ideal", s);
    r.q("spdim_ideal_removed", s2);
    r.details = Some(json!({
        "element": ideal.format_monomial(lcm.degree(a)),
        "realization": whole.to_text(),
        "realization_removed": part.to_text(),
    }));
    Ok(if s <= p.max(s2) {
        r.conclude(Verdict::Holds, "spdim I <= max(p, spdim of the smaller lattice)")
    } else {
        r.conclude(Verdict::Violated, "spdim I exceeds max(p, spdim of the smaller lattice)")
    })
}

/// Boolean map `b -> atoms below (b meet a)` from a lattice to the subsets
/// of the atoms below `a`: (join preserving, surjective).
fn boolean_map_properties(l: &FiniteLattice, a: NodeId, masks: &[u64]) -> (bool, bool) {
    let f = |b: NodeId| masks[l.meet(b, a)];
    let target = masks[a];
    let mut hit = std::collections::BTreeSet::new();
    for b in 0..l.len() {
        hit.insert(f(b));
    }
    let mut subsets = 0usize;
    let mut s = target;
    loop {
        subsets += hit.contains(&s) as usize;
        if s == 0 {
            break;
        }
        s = (s - 1) & target;
    }
    let surjective = subsets == 1usize << target.count_ones();
    let join_preserving = (0..l.len()).all(|b| (0..l.len()).all(|c| f(l.join(b, c)) == f(b) | f(c)));
    (join_preserving, surjective)
}

/// For a generic `I` and an ideal `I2` with a join-surjection
/// `L_I -> L_I2` and isomorphic Betti posets, checks `spdim S/I = spdim
/// S/I2` together with the Scarf facts behind it.
pub fn generic_weak_check(
    ideal: &MonomialIdeal,
    ideal2: &MonomialIdeal,
    field: FieldSpec,
    budget: &SearchBudget,
) -> Result<CheckReport, LabError> {
    if !ideal.is_generic() {
        return Err(LabError::NotGeneric);
    }
    let mut r = CheckReport::new(GENERIC_WEAK, &[ideal, ideal2], field);
    let l1 = LcmLattice::new(ideal)?;
    let l2 = LcmLattice::new(ideal2)?;
    if find_join_surjection(l1.lattice(), l2.lattice(), budget.nodes)?.is_none() {
        return Ok(r.conclude(Verdict::NotApplicable, "no join-preserving surjection"));
    }
    let b1 = betti_poset_of(&l1, field);
    let b2 = betti_poset_of(&l2, field);
    if b1.canonical_form() != b2.canonical_form() {
        return Ok(r.conclude(Verdict::NotApplicable, "Betti posets are not isomorphic"));
    }
    let sorted = |mut v: Vec<NodeId>| {
        v.sort_unstable();
        v
    };
    let scarf1 = sorted(scarf_nodes(l1.lattice()));
    let scarf2 = sorted(scarf_nodes(l2.lattice()));
    let eq1 = sorted(b1.nodes.clone()) == scarf1;
    let eq2 = sorted(b2.nodes.clone()) == scarf2;
    let p = summary(&l2, ideal2.nvars(), field).pdim_quotient;
    let lat2 = l2.lattice();
    let witness_element = scarf2.iter().copied().find(|&m| lat2.rank(m).ok() == Some(p));
    let sq1 = ideal.nvars() - sdepth_value(ideal, Side::Quotient, budget)?;
    let sq2 = ideal2.nvars() - sdepth_value(ideal2, Side::Quotient, budget)?;

    r.q("spdim_quotient", sq1);
    r.q("spdim_quotient_2", sq2);
    r.flag("betti_is_scarf", eq1);
    r.flag("betti_is_scarf_2", eq2);
    r.q("p", p);
    r.flag("rank_p_scarf_element", witness_element.is_some());
    if let Some(a) = witness_element {
        let (join_preserving, surjective) = boolean_map_properties(lat2, a, &atom_masks(lat2)?);
        r.flag("boolean_map_join_preserving", join_preserving);
        r.flag("boolean_map_surjective", surjective);
        r.details = Some(json!({ "element": ideal2.format_monomial(l2.degree(a)) }));
    }
    Ok(if sq1 == sq2 && eq1 && eq2 && witness_element.is_some() {
        r.conclude(Verdict::Holds, "equal spdim of the quotients")
    } else {
        r.conclude(Verdict::Violated, "conclusion or intermediate fact fails")
    })
}

fn ideals_for_rerun(report: &CheckReport) -> Result<Vec<MonomialIdeal>, LabError> {
    let from_witness = report.verdict == Verdict::Violated;
    let texts: Vec<String> = match (&report.witness, from_witness) {
        (Some(w), true) => w["ideals"]
            .as_array()
            .ok_or_else(|| LabError::MalformedReport("witness has no ideals".into()))?
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect::<Option<_>>()
            .ok_or_else(|| LabError::MalformedReport("witness ideals must be strings".into()))?,
        _ => report.inputs.iter().map(|i| i.ideal.clone()).collect(),
    };
    texts.iter().map(|t| Ok(MonomialIdeal::parse(t)?)).collect()
}

fn need(ideals: &[MonomialIdeal], k: usize) -> Result<&MonomialIdeal, LabError> {
    ideals.get(k).ok_or_else(|| LabError::MalformedReport(format!("expected at least {} ideals", k + 1)))
}

fn param<T: std::str::FromStr>(report: &CheckReport, key: &str) -> Result<T, LabError> {
    report
        .params
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| LabError::MalformedReport(format!("missing parameter `{key}`")))
}

/// Runs the check named in `report` again, on the witness ideals for a
/// violated report and on the inputs otherwise.
pub fn rerun(report: &CheckReport, budget: &SearchBudget) -> Result<CheckReport, LabError> {
    let ideals = ideals_for_rerun(report)?;
    let field = report.field;
    match report.check.as_str() {
        SURJECTION_MONOTONICITY => surjection_monotonicity_check(need(&ideals, 0)?, need(&ideals, 1)?, field, budget),
        MB_CHAIN => mb_chain_check(need(&ideals, 0)?, field),
        ONESTEP => {
            let i = need(&ideals, 0)?;
            let var: String = param(report, "var")?;
            check_onestep(i, i.variable_index(&var)?, field, budget)
        }
        CONJECTURE_SCAN => Ok(conjecture_scan(&ideals, field, budget)),
        STANLEY_BOUNDS => stanley_bounds_check(need(&ideals, 0)?, field, budget),
        LENGTH_BOUNDS => length_bounds_check(need(&ideals, 0)?, budget),
        REDUCTION_LEMMA => {
            reduction_lemma_check(need(&ideals, 0)?, param(report, "element")?, Some(param(report, "p")?), field, budget)
        }
        GENERIC_WEAK => generic_weak_check(need(&ideals, 0)?, need(&ideals, 1)?, field, budget),
        other => Err(LabError::UnknownCheck(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poset::boolean_algebra;

    fn ideal(text: &str) -> MonomialIdeal {
        MonomialIdeal::parse(text).unwrap()
    }

    fn triangle() -> MonomialIdeal {
        ideal("vars x y z\ngen x*y\ngen y*z\ngen z*x")
    }

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn surjection_identity_and_collapse() {
        let l = LcmLattice::new(&triangle()).unwrap();
        let same = find_join_surjection(l.lattice(), l.lattice(), 10_000).unwrap().unwrap();
        assert_eq!(same.atom_images, l.lattice().atoms().to_vec());

        let two = boolean_algebra(1);
        let collapse = find_join_surjection(l.lattice(), &two, 10_000).unwrap().unwrap();
        assert!(collapse.atom_images.iter().all(|&y| y == two.atoms()[0]));
    }

    #[test]
    fn triangle_onto_boolean_square() {
        let l = LcmLattice::new(&triangle()).unwrap();
        let b2 = boolean_algebra(2);
        let map = find_join_surjection(l.lattice(), &b2, 10_000).unwrap().unwrap();
        assert!(is_join_surjection(l.lattice(), &b2, &map.images));
        // nothing larger than the source can be hit
        assert_eq!(find_join_surjection(&b2, l.lattice(), 10_000).unwrap(), None);
    }

    #[test]
    fn monotonicity_examples() {
        let t = triangle();
        let same = surjection_monotonicity_check(&t, &t, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(same.verdict, Verdict::Holds);
        assert_eq!(same.quantities["spdim_quotient"], same.quantities["spdim_quotient_2"]);

        let colon = t.colon_by_variable(2).unwrap();
        let r = surjection_monotonicity_check(&t, &colon, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn mb_chain_examples() {
        let r = mb_chain_check(&triangle(), FieldSpec::RATIONALS).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.quantities["chain_length"], 0);

        let g = ideal("vars x y\ngen x^2\ngen x*y\ngen y^2");
        let r = mb_chain_check(&g, FieldSpec::RATIONALS).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.quantities["mb_size"] + r.quantities["chain_length"], r.quantities["lattice_size"]);

        let mut positive = 0;
        for seed in 0..40 {
            let params = crate::monomial::RandomIdealParams { n_vars: 4, n_gens: 4, max_exp: 2, squarefree: false };
            let i = MonomialIdeal::random(&params, seed).unwrap();
            let r = mb_chain_check(&i, FieldSpec::RATIONALS).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{}", i.to_text());
            positive += (r.quantities["chain_length"] > 0) as usize;
        }
        assert!(positive > 0);
    }

    #[test]
    fn onestep_examples() {
        let x = ideal("vars x y\ngen x");
        let r = check_onestep(&x, 1, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        let r = check_onestep(&triangle(), 2, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);
        assert!(r.quantities["sdepth_quotient"] <= r.quantities["sdepth_quotient_colon"]);

        let r = check_onestep(&x, 0, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);

        let sq = ideal("vars x\ngen x^2");
        assert_eq!(check_onestep(&sq, 0, FieldSpec::RATIONALS, &budget()), Err(LabError::NotSquarefree));
    }

    #[test]
    fn scan_relabelled_class() {
        let a = triangle();
        let b = ideal("vars a b c\ngen a*b\ngen b*c\ngen c*a");
        let r = conjecture_scan(&[a.clone(), b.clone()], FieldSpec::RATIONALS, &budget());
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.quantities["classes"], 1);
        let swapped = conjecture_scan(&[b, a], FieldSpec::RATIONALS, &budget());
        assert_eq!(r, swapped);

        let one = conjecture_scan(&[ideal("vars x\ngen x"), ideal("vars y\ngen y^2")], FieldSpec::RATIONALS, &budget());
        assert_eq!(one.quantities["classes"], 1);
        assert_eq!(one.verdict, Verdict::Holds);
    }

    #[test]
    fn bounds_examples() {
        let xyz = ideal("vars x y z\ngen x\ngen y\ngen z");
        let r = stanley_bounds_check(&xyz, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.quantities["sdepth_quotient"], 0);
        assert_eq!(r.quantities["sdepth_ideal"], 2);
        assert_eq!(r.quantities["depth_ideal"], 1);

        let r = length_bounds_check(&triangle(), &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!((r.quantities["lattice_length"], r.quantities["spdim_quotient"], r.quantities["spdim_ideal"]), (2, 2, 1));

        let r = length_bounds_check(&xyz, &budget()).unwrap();
        assert_eq!((r.quantities["lattice_length"], r.quantities["spdim_quotient"], r.quantities["spdim_ideal"]), (3, 3, 1));
    }

    #[test]
    fn realization_recovers_lattice() {
        for i in [triangle(), ideal("vars x y\ngen x^2\ngen x*y\ngen y^2"), ideal("vars x y z\ngen x\ngen y\ngen z")] {
            let l = LcmLattice::new(&i).unwrap();
            let j = realize_lattice(l.lattice()).unwrap();
            let lj = LcmLattice::new(&j).unwrap();
            assert!(crate::poset::is_isomorphic(l.lattice().poset(), lj.lattice().poset()));
        }
    }

    #[test]
    fn reduction_examples() {
        let xyz = ideal("vars x y z\ngen x\ngen y\ngen z");
        let l = LcmLattice::new(&xyz).unwrap();
        let coatom = l.node_of(&Monomial(vec![1, 1, 0])).unwrap();
        let r = reduction_lemma_check(&xyz, coatom, None, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);

        let b2 = ideal("vars x y\ngen x\ngen y");
        let l = LcmLattice::new(&b2).unwrap();
        let r = reduction_lemma_check(&b2, l.lattice().top(), None, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);

        let single = ideal("vars x\ngen x");
        let l = LcmLattice::new(&single).unwrap();
        let atom = l.lattice().atoms()[0];
        let r = reduction_lemma_check(&single, atom, None, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::NotApplicable);

        let t = triangle();
        let l = LcmLattice::new(&t).unwrap();
        assert!(matches!(
            reduction_lemma_check(&t, l.lattice().bottom(), None, FieldSpec::RATIONALS, &budget()),
            Err(LabError::NotMeetIrreducible(_))
        ));
    }

    #[test]
    fn generic_examples() {
        let g = ideal("vars x y\ngen x^2\ngen x*y\ngen y^2");
        let r = generic_weak_check(&g, &g, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.quantities["p"], 2);
        assert_eq!(r.quantities["rank_p_scarf_element"], 1);

        let h = ideal("vars a b\ngen a^2\ngen a*b\ngen b^2");
        assert_eq!(generic_weak_check(&g, &h, FieldSpec::RATIONALS, &budget()).unwrap().verdict, Verdict::Holds);

        assert_eq!(generic_weak_check(&triangle(), &triangle(), FieldSpec::RATIONALS, &budget()), Err(LabError::NotGeneric));
    }

    #[test]
    fn reports_round_trip_and_rerun() {
        let r = stanley_bounds_check(&triangle(), FieldSpec::RATIONALS, &budget()).unwrap();
        let line = r.to_json_line();
        let back = CheckReport::from_json_line(&line).unwrap();
        assert_eq!(back, r);
        assert_eq!(rerun(&back, &budget()).unwrap(), r);

        let r = check_onestep(&triangle(), 2, FieldSpec::RATIONALS, &budget()).unwrap();
        assert_eq!(rerun(&r, &budget()).unwrap(), r);
    }

    #[test]
    fn violated_reports_carry_witness() {
        let r = CheckReport::new(LENGTH_BOUNDS, &[&triangle()], FieldSpec::RATIONALS).conclude(Verdict::Violated, "test");
        assert!(r.witness.as_ref().unwrap()["ideals"].is_array());
    }
}

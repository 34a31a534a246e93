//! Stanley depth of `S/I` and `I` through interval partitions of the
//! characteristic poset.
//!
//! For a cap `g` (at least the lcm of the generators) the characteristic
//! poset is the set of exponent vectors `a <= g` with `x^a` outside `I`
//! (quotient side) or inside `I` (ideal side). An interval `[a, b]` of it
//! yields Stanley spaces over `Z_b = { x_j : b_j = g_j }`, and the Stanley
//! depth is the best achievable `min rho(b) = min |Z_b|` over partitions.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::monomial::{Monomial, MonomialIdeal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StanleyError {
    #[error("cap extension is below the lcm exponent in coordinate {0}")]
    CapTooSmall(usize),
    #[error("cap has length {found}, expected {expected}")]
    CapLength { expected: usize, found: usize },
    #[error("characteristic poset would have {0} grid points (budget {1})")]
    TooLarge(u128, u128),
    #[error("search budget exhausted: {0}")]
    BudgetExceeded(SearchState),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// Partial search state reported when the budget runs out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchState {
    /// The `k` whose feasibility was being decided.
    pub k: usize,
    pub nodes: u64,
    /// Largest number of points covered at once.
    pub deepest_cover: usize,
    pub points: usize,
    /// Largest `k` known to be feasible so far, if any.
    pub known_feasible: Option<usize>,
}

impl fmt::Display for SearchState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k = {} after {} nodes (best cover {}/{} points)",
            self.k, self.nodes, self.deepest_cover, self.points
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Quotient,
    Ideal,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Quotient => "quotient",
            Side::Ideal => "ideal",
        })
    }
}

impl FromStr for Side {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quotient" => Ok(Side::Quotient),
            "ideal" => Ok(Side::Ideal),
            other => Err(format!("unknown side `{other}` (expected quotient or ideal)")),
        }
    }
}

/// Search limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum number of interval placements per sdepth computation.
    pub nodes: u64,
    /// Maximum number of grid points below the cap.
    pub points: u128,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { nodes: 100_000_000, points: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacteristicPoset {
    pub g: Vec<u32>,
    pub side: Side,
    /// Points sorted by (total degree, lexicographic).
    pub points: Vec<Vec<u32>>,
}

impl CharacteristicPoset {
    pub fn new(
        ideal: &MonomialIdeal,
        side: Side,
        cap: Option<&[u32]>,
        budget: &SearchBudget,
    ) -> Result<Self, StanleyError> {
        let default = ideal.lcm_exponents().0;
        let g = match cap {
            None => default,
            Some(cap) => {
                if cap.len() != default.len() {
                    return Err(StanleyError::CapLength { expected: default.len(), found: cap.len() });
                }
                if let Some(j) = (0..cap.len()).find(|&j| cap[j] < default[j]) {
                    return Err(StanleyError::CapTooSmall(j));
                }
                cap.to_vec()
            }
        };
        let grid: u128 = g.iter().map(|&e| e as u128 + 1).product();
        if grid > budget.points {
            return Err(StanleyError::TooLarge(grid, budget.points));
        }
        let mut points = Vec::new();
        let mut cur = vec![0u32; g.len()];
        loop {
            let inside = ideal.contains(&Monomial(cur.clone()));
            if inside == (side == Side::Ideal) {
                points.push(cur.clone());
            }
            // odometer
            let mut j = 0;
            while j < g.len() && cur[j] == g[j] {
                cur[j] = 0;
                j += 1;
            }
            if j == g.len() {
                break;
            }
            cur[j] += 1;
        }
        points.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| a.cmp(b))
        });
        Ok(Self { g, side, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn nvars(&self) -> usize {
        self.g.len()
    }

    /// Number of coordinates where `b` reaches the cap.
    pub fn rho(&self, b: &[u32]) -> usize {
        b.iter().zip(&self.g).filter(|(x, y)| x == y).count()
    }

    pub fn index_of(&self, p: &[u32]) -> Option<usize> {
        self.points
            .binary_search_by(|q| {
                let dq: u32 = q.iter().sum();
                let dp: u32 = p.iter().sum();
                dq.cmp(&dp).then_with(|| q.as_slice().cmp(p))
            })
            .ok()
    }

    /// Whether `x^p` lies on this poset's side of the ideal.
    fn on_side(&self, ideal_contains: bool) -> bool {
        ideal_contains == (self.side == Side::Ideal)
    }
}

fn leq(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// A set of intervals `[a, b]` of a characteristic poset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalPartition {
    pub intervals: Vec<(Vec<u32>, Vec<u32>)>,
    /// Minimum of `rho(b)` over the intervals.
    pub value: usize,
}

#[derive(Serialize, Deserialize)]
struct IntervalJson {
    a: Vec<u32>,
    b: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    g: Vec<u32>,
    side: Side,
    intervals: Vec<IntervalJson>,
    value: usize,
}

/// Certificate JSON for a partition of `poset`.
pub fn certificate_json(poset: &CharacteristicPoset, part: &IntervalPartition) -> String {
    serde_json::to_string(&certificate_value(poset, part)).expect("certificates serialize")
}

pub fn certificate_value(poset: &CharacteristicPoset, part: &IntervalPartition) -> serde_json::Value {
    serde_json::to_value(CertificateJson {
        g: poset.g.clone(),
        side: poset.side,
        intervals: part
            .intervals
            .iter()
            .map(|(a, b)| IntervalJson { a: a.clone(), b: b.clone() })
            .collect(),
        value: part.value,
    })
    .expect("certificates serialize")
}

/// Parses a certificate back into `(g, side, partition)`.
pub fn parse_certificate(text: &str) -> Result<(Vec<u32>, Side, IntervalPartition), serde_json::Error> {
    let c: CertificateJson = serde_json::from_str(text)?;
    Ok((
        c.g,
        c.side,
        IntervalPartition {
            intervals: c.intervals.into_iter().map(|i| (i.a, i.b)).collect(),
            value: c.value,
        },
    ))
}

/// Stanley space `m * K[Z]` with `Z` given by variable indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StanleySpace {
    pub generator: Monomial,
    pub variables: Vec<usize>,
}

impl StanleySpace {
    pub fn contains(&self, d: &[u32]) -> bool {
        self.generator
            .0
            .iter()
            .zip(d)
            .enumerate()
            .all(|(j, (&c, &x))| c == x || (c < x && self.variables.contains(&j)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StanleyDecomposition {
    pub spaces: Vec<StanleySpace>,
}

impl StanleyDecomposition {
    /// Minimum size of a variable set (the depth of the decomposition).
    pub fn depth(&self) -> usize {
        self.spaces.iter().map(|s| s.variables.len()).min().unwrap_or(0)
    }

    /// Every exponent vector `d <= g` lies in exactly one space when it is
    /// on the module's side and in none otherwise. Returns the first
    /// offending vector.
    pub fn check_counts(&self, ideal: &MonomialIdeal, poset: &CharacteristicPoset) -> Result<(), Vec<u32>> {
        let g = &poset.g;
        let mut cur = vec![0u32; g.len()];
        loop {
            let expected = usize::from(poset.on_side(ideal.contains(&Monomial(cur.clone()))));
            let found = self.spaces.iter().filter(|s| s.contains(&cur)).count();
            if found != expected {
                return Err(cur);
            }
            let mut j = 0;
            while j < g.len() && cur[j] == g[j] {
                cur[j] = 0;
                j += 1;
            }
            if j == g.len() {
                return Ok(());
            }
            cur[j] += 1;
        }
    }
}

/// Stanley decomposition induced by a partition: the interval `[a, b]`
/// contributes `x^c K[Z_b]` for every `c` in it with `c_j = a_j` on `Z_b`.
/// When the cap is squarefree this is the single space `x^a K[Z_b]`.
pub fn partition_to_stanley_decomposition(
    poset: &CharacteristicPoset,
    part: &IntervalPartition,
) -> Result<StanleyDecomposition, StanleyError> {
    let mut spaces = Vec::new();
    for (a, b) in &part.intervals {
        if a.len() != poset.nvars() || b.len() != poset.nvars() || !leq(a, b) || !leq(b, &poset.g) {
            return Err(StanleyError::InvalidPartition(format!("malformed interval [{a:?}, {b:?}]")));
        }
        let z: Vec<usize> = (0..b.len()).filter(|&j| b[j] == poset.g[j]).collect();
        // free coordinates range over [a_j, b_j] outside Z_b
        let mut c = a.clone();
        loop {
            spaces.push(StanleySpace { generator: Monomial(c.clone()), variables: z.clone() });
            let mut j = 0;
            while j < c.len() && (z.contains(&j) || c[j] == b[j]) {
                c[j] = a[j];
                j += 1;
            }
            if j == c.len() {
                break;
            }
            c[j] += 1;
        }
    }
    Ok(StanleyDecomposition { spaces })
}

/// Diagnostics of [`verify_partition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionCheck {
    pub valid: bool,
    pub value: Option<usize>,
    pub problems: Vec<String>,
}

/// Checks well-formedness, disjointness and coverage of a partition and the
/// counting invariant of the induced Stanley decomposition.
pub fn verify_partition(
    ideal: &MonomialIdeal,
    poset: &CharacteristicPoset,
    part: &IntervalPartition,
) -> PartitionCheck {
    let mut problems = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; poset.len()];
    for (i, (a, b)) in part.intervals.iter().enumerate() {
        if a.len() != poset.nvars() || b.len() != poset.nvars() || !leq(a, b) {
            problems.push(format!("interval {i} [{a:?}, {b:?}] is malformed"));
            continue;
        }
        if poset.index_of(a).is_none() || poset.index_of(b).is_none() {
            problems.push(format!("interval {i} [{a:?}, {b:?}] leaves the poset"));
            continue;
        }
        for (p, point) in poset.points.iter().enumerate() {
            if leq(a, point) && leq(point, b) {
                if let Some(j) = owner[p] {
                    problems.push(format!("point {point:?} lies in intervals {j} and {i}"));
                } else {
                    owner[p] = Some(i);
                }
            }
        }
        // every lattice point between a and b must belong to the poset
        let mut c = a.clone();
        'walk: loop {
            if poset.index_of(&c).is_none() {
                problems.push(format!("interval {i} contains {c:?} outside the poset"));
                break;
            }
            let mut j = 0;
            while j < c.len() && c[j] == b[j] {
                c[j] = a[j];
                j += 1;
            }
            if j == c.len() {
                break 'walk;
            }
            c[j] += 1;
        }
    }
    if let Some(p) = owner.iter().position(Option::is_none) {
        problems.push(format!("point {:?} is not covered", poset.points[p]));
    }
    let value = part.intervals.iter().map(|(_, b)| poset.rho(b)).min();
    if problems.is_empty() {
        match partition_to_stanley_decomposition(poset, part) {
            Ok(dec) => {
                if let Err(d) = dec.check_counts(ideal, poset) {
                    problems.push(format!("Stanley decomposition miscounts multidegree {d:?}"));
                }
            }
            Err(e) => problems.push(e.to_string()),
        }
        if value != Some(part.value) && !part.intervals.is_empty() {
            problems.push(format!("reported value {} differs from min rho {:?}", part.value, value));
        }
    }
    PartitionCheck { valid: problems.is_empty(), value, problems }
}

type Bits = Vec<u64>;

struct PartitionSearch<'a> {
    poset: &'a CharacteristicPoset,
    // admissible intervals starting at each point: (top index, interval mask)
    tops: Vec<Vec<(usize, Bits)>>,
    covered: Bits,
    chosen: Vec<(usize, usize)>,
    failed: HashSet<Bits>,
    nodes: u64,
    node_budget: u64,
    deepest: usize,
    covered_count: usize,
}

const MEMO_CAP: usize = 1 << 22;

impl<'a> PartitionSearch<'a> {
    fn new(poset: &'a CharacteristicPoset, k: usize, nodes_used: u64, node_budget: u64) -> Self {
        let n = poset.len();
        let words = n.div_ceil(64);
        let rho: Vec<usize> = poset.points.iter().map(|b| poset.rho(b)).collect();
        let mut tops = vec![Vec::new(); n];
        for (p, a) in poset.points.iter().enumerate() {
            for (q, b) in poset.points.iter().enumerate().skip(p) {
                if rho[q] < k || !leq(a, b) {
                    continue;
                }
                let mut mask = vec![0u64; words];
                for (c, point) in poset.points.iter().enumerate().take(q + 1).skip(p) {
                    if leq(a, point) && leq(point, b) {
                        mask[c / 64] |= 1 << (c % 64);
                    }
                }
                tops[p].push((q, mask));
            }
            // large intervals first
            tops[p].sort_by_key(|(q, mask)| {
                (std::cmp::Reverse(mask.iter().map(|w| w.count_ones()).sum::<u32>()), *q)
            });
        }
        Self {
            poset,
            tops,
            covered: vec![0; words],
            chosen: Vec::new(),
            failed: HashSet::new(),
            nodes: nodes_used,
            node_budget,
            deepest: 0,
            covered_count: 0,
        }
    }

    fn is_covered(&self, p: usize) -> bool {
        self.covered[p / 64] >> (p % 64) & 1 == 1
    }

    fn free(&self, mask: &Bits) -> bool {
        mask.iter().zip(&self.covered).all(|(m, c)| m & c == 0)
    }

    /// Every uncovered point still has a free admissible interval upward.
    fn viable(&self) -> bool {
        (0..self.poset.len())
            .filter(|&p| !self.is_covered(p))
            .all(|p| self.tops[p].iter().any(|(_, mask)| self.free(mask)))
    }

    fn run(&mut self, cursor: usize) -> Result<bool, u64> {
        let n = self.poset.len();
        let mut c = cursor;
        while c < n && self.is_covered(c) {
            c += 1;
        }
        if c == n {
            return Ok(true);
        }
        if self.failed.contains(&self.covered) {
            return Ok(false);
        }
        for t in 0..self.tops[c].len() {
            if !self.free(&self.tops[c][t].1) {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.node_budget {
                return Err(self.nodes);
            }
            let (top, size) = {
                let (q, mask) = &self.tops[c][t];
                for (w, m) in self.covered.iter_mut().zip(mask) {
                    *w |= m;
                }
                (*q, mask.iter().map(|w| w.count_ones() as usize).sum::<usize>())
            };
            self.covered_count += size;
            self.deepest = self.deepest.max(self.covered_count);
            self.chosen.push((c, top));
            if self.viable() && self.run(c + 1)? {
                return Ok(true);
            }
            self.chosen.pop();
            self.covered_count -= size;
            let mask = &self.tops[c][t].1;
            for (w, m) in self.covered.iter_mut().zip(mask) {
                *w &= !m;
            }
        }
        if self.failed.len() < MEMO_CAP {
            self.failed.insert(self.covered.clone());
        }
        Ok(false)
    }
}

/// Decides whether the poset has an interval partition whose tops all have
/// `rho >= k`. The search is complete: `Ok(None)` is a proof of absence.
pub fn exists_partition_with_min_rho(
    poset: &CharacteristicPoset,
    k: usize,
    budget: &SearchBudget,
) -> Result<Option<IntervalPartition>, StanleyError> {
    let mut used = 0;
    find_partition(poset, k, budget.nodes, &mut used, None)
}

fn find_partition(
    poset: &CharacteristicPoset,
    k: usize,
    node_budget: u64,
    used: &mut u64,
    known_feasible: Option<usize>,
) -> Result<Option<IntervalPartition>, StanleyError> {
    if k == 0 {
        let intervals = poset.points.iter().map(|p| (p.clone(), p.clone())).collect::<Vec<_>>();
        let value = intervals.iter().map(|(_, b)| poset.rho(b)).min().unwrap_or(0);
        return Ok(Some(IntervalPartition { intervals, value }));
    }
    if poset.is_empty() {
        return Ok(Some(IntervalPartition { intervals: Vec::new(), value: poset.nvars() }));
    }
    let mut search = PartitionSearch::new(poset, k, *used, node_budget);
    if !search.viable() {
        return Ok(None);
    }
    let outcome = search.run(0);
    *used = search.nodes;
    match outcome {
        Ok(true) => {
            let mut intervals: Vec<(Vec<u32>, Vec<u32>)> = search
                .chosen
                .iter()
                .map(|&(a, b)| (poset.points[a].clone(), poset.points[b].clone()))
                .collect();
            intervals.sort();
            let value = intervals.iter().map(|(_, b)| poset.rho(b)).min().unwrap_or(k);
            Ok(Some(IntervalPartition { intervals, value }))
        }
        Ok(false) => Ok(None),
        Err(nodes) => Err(StanleyError::BudgetExceeded(SearchState {
            k,
            nodes,
            deepest_cover: search.deepest,
            points: poset.len(),
            known_feasible,
        })),
    }
}

/// Stanley depth with its certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdepthResult {
    pub value: usize,
    pub poset: CharacteristicPoset,
    pub certificate: IntervalPartition,
    pub nodes: u64,
}

impl SdepthResult {
    pub fn spdim(&self) -> usize {
        self.poset.nvars() - self.value
    }

    pub fn certificate_json(&self) -> String {
        certificate_json(&self.poset, &self.certificate)
    }
}

/// `sdepth S/I` (quotient side) or `sdepth I` (ideal side), searching `k`
/// downward from the number of variables.
pub fn sdepth(ideal: &MonomialIdeal, side: Side, budget: &SearchBudget) -> Result<SdepthResult, StanleyError> {
    sdepth_with_cap(ideal, side, None, budget)
}

pub fn sdepth_with_cap(
    ideal: &MonomialIdeal,
    side: Side,
    cap: Option<&[u32]>,
    budget: &SearchBudget,
) -> Result<SdepthResult, StanleyError> {
    let poset = CharacteristicPoset::new(ideal, side, cap, budget)?;
    let n = poset.nvars();
    // no interval top can beat the best rho in the poset
    let upper = poset.points.iter().map(|b| poset.rho(b)).max().unwrap_or(n);
    let mut used = 0;
    for k in (0..=upper).rev() {
        if let Some(part) = find_partition(&poset, k, budget.nodes, &mut used, None)? {
            return Ok(SdepthResult { value: k, certificate: part, poset, nodes: used });
        }
    }
    unreachable!("k = 0 always admits the singleton partition")
}

/// `n - sdepth`.
pub fn spdim(ideal: &MonomialIdeal, side: Side, budget: &SearchBudget) -> Result<usize, StanleyError> {
    Ok(sdepth(ideal, side, budget)?.spdim())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(text: &str) -> MonomialIdeal {
        MonomialIdeal::parse(text).unwrap()
    }

    fn triangle() -> MonomialIdeal {
        ideal("vars x y z\ngen x*y\ngen y*z\ngen z*x")
    }

    #[test]
    fn characteristic_posets() {
        let b = SearchBudget::default();
        let q = CharacteristicPoset::new(&triangle(), Side::Quotient, None, &b).unwrap();
        assert_eq!(q.points, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let i = CharacteristicPoset::new(&triangle(), Side::Ideal, None, &b).unwrap();
        assert_eq!(i.points, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0], vec![1, 1, 1]]);
        let x = ideal("vars x\ngen x");
        assert_eq!(CharacteristicPoset::new(&x, Side::Ideal, None, &b).unwrap().points, vec![vec![1]]);
        assert_eq!(
            CharacteristicPoset::new(&triangle(), Side::Ideal, Some(&[1, 0, 1]), &b).unwrap_err(),
            StanleyError::CapTooSmall(1)
        );
        let tiny = SearchBudget { nodes: 10, points: 4 };
        assert!(matches!(
            CharacteristicPoset::new(&triangle(), Side::Ideal, None, &tiny),
            Err(StanleyError::TooLarge(8, 4))
        ));
    }

    #[test]
    fn partition_existence() {
        let b = SearchBudget::default();
        let q = CharacteristicPoset::new(&triangle(), Side::Quotient, None, &b).unwrap();
        let one = exists_partition_with_min_rho(&q, 1, &b).unwrap().unwrap();
        assert_eq!(one.intervals.len(), 3);
        assert!(verify_partition(&triangle(), &q, &one).valid);
        assert_eq!(exists_partition_with_min_rho(&q, 2, &b).unwrap(), None);
        let zero = exists_partition_with_min_rho(&q, 0, &b).unwrap().unwrap();
        assert_eq!(zero.intervals.len(), q.len());
    }

    #[test]
    fn micro_sdepths() {
        let b = SearchBudget::default();
        assert_eq!(sdepth(&triangle(), Side::Quotient, &b).unwrap().value, 1);
        assert_eq!(sdepth(&triangle(), Side::Ideal, &b).unwrap().value, 2);
        let max = ideal("vars x y z\ngen x\ngen y\ngen z");
        let r = sdepth(&max, Side::Ideal, &b).unwrap();
        assert_eq!(r.value, 2);
        let dec = partition_to_stanley_decomposition(&r.poset, &r.certificate).unwrap();
        assert_eq!(dec.spaces.len(), 4);
        assert!(dec.check_counts(&max, &r.poset).is_ok());
        let x = ideal("vars x\ngen x");
        assert_eq!(sdepth(&x, Side::Quotient, &b).unwrap().value, 0);
        assert_eq!(spdim(&x, Side::Quotient, &b).unwrap(), 1);
    }

    #[test]
    fn decomposition_rule() {
        let b = SearchBudget::default();
        let p = CharacteristicPoset::new(&triangle(), Side::Quotient, None, &b).unwrap();
        let single = IntervalPartition { intervals: vec![(vec![0, 0, 0], vec![0, 0, 0])], value: 0 };
        let dec = partition_to_stanley_decomposition(&p, &single).unwrap();
        assert_eq!(dec.spaces, vec![StanleySpace { generator: Monomial(vec![0, 0, 0]), variables: vec![] }]);
        let one = IntervalPartition { intervals: vec![(vec![1, 0, 0], vec![1, 1, 0])], value: 2 };
        let dec = partition_to_stanley_decomposition(&p, &one).unwrap();
        assert_eq!(dec.spaces, vec![StanleySpace { generator: Monomial(vec![1, 0, 0]), variables: vec![0, 1] }]);
        // non-squarefree cap: [1, 2] under g = 3 has two free positions
        let x3 = ideal("vars x\ngen x^3");
        let p3 = CharacteristicPoset::new(&x3, Side::Quotient, None, &b).unwrap();
        let part = IntervalPartition { intervals: vec![(vec![0], vec![2])], value: 0 };
        let dec = partition_to_stanley_decomposition(&p3, &part).unwrap();
        assert_eq!(dec.spaces.len(), 3);
        assert!(dec.check_counts(&x3, &p3).is_ok());
    }

    #[test]
    fn verify_detects_problems() {
        let b = SearchBudget::default();
        let tri = triangle();
        let p = CharacteristicPoset::new(&tri, Side::Quotient, None, &b).unwrap();
        let overlap = IntervalPartition {
            intervals: vec![
                (vec![0, 0, 0], vec![1, 0, 0]),
                (vec![1, 0, 0], vec![1, 0, 0]),
                (vec![0, 1, 0], vec![0, 1, 0]),
                (vec![0, 0, 1], vec![0, 0, 1]),
            ],
            value: 1,
        };
        let check = verify_partition(&tri, &p, &overlap);
        assert!(!check.valid);
        assert!(check.problems[0].contains("[1, 0, 0]"));
        let gap = IntervalPartition { intervals: vec![(vec![0, 0, 0], vec![1, 0, 0])], value: 1 };
        let check = verify_partition(&tri, &p, &gap);
        assert!(!check.valid);
        assert!(check.problems.iter().any(|s| s.contains("not covered")));
    }

    #[test]
    fn certificate_round_trip() {
        let r = sdepth(&triangle(), Side::Ideal, &SearchBudget::default()).unwrap();
        let text = r.certificate_json();
        let (g, side, part) = parse_certificate(&text).unwrap();
        assert_eq!((g, side, part), (r.poset.g.clone(), Side::Ideal, r.certificate.clone()));
    }

    #[test]
    fn budget_is_reported() {
        let tiny = SearchBudget { nodes: 1, points: 1_000_000 };
        let q = CharacteristicPoset::new(&triangle(), Side::Quotient, None, &tiny).unwrap();
        match exists_partition_with_min_rho(&q, 1, &tiny) {
            Err(StanleyError::BudgetExceeded(state)) => {
                assert_eq!(state.k, 1);
                assert_eq!(state.points, 4);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }
}

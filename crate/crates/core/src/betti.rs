//! Multigraded Betti numbers, Betti posets and related invariants.
//!
//! `betti_table` reads the Betti numbers off the reduced homology of open
//! lower intervals of the lcm-lattice. `taylor_betti_oracle` computes the
//! same numbers strand by strand from the Taylor complex with its own dense
//! linear algebra and shares no code with the lattice route.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{reduced_homology_ranks, FieldSpec};
use crate::monomial::{IdealError, LcmLattice, Monomial, MonomialIdeal};
use crate::poset::{canonical_form, FiniteLattice, FinitePoset, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BettiError {
    #[error("{0} generators exceed the Taylor complex limit of {1}")]
    TooManyGenerators(usize, usize),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

/// Nonzero multigraded Betti numbers `beta_{i,m}(S/I)` for `i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    pub entries: BTreeMap<(usize, Monomial), u64>,
    pub nvars: usize,
    pub field: FieldSpec,
}

#[derive(Serialize, Deserialize)]
struct BettiEntryJson {
    i: usize,
    deg: Vec<u32>,
    beta: u64,
}

#[derive(Serialize, Deserialize)]
struct BettiTableJson {
    field: FieldSpec,
    entries: Vec<BettiEntryJson>,
}

impl BettiTable {
    fn empty(nvars: usize, field: FieldSpec) -> Self {
        Self { entries: BTreeMap::new(), nvars, field }
    }

    pub fn get(&self, i: usize, m: &Monomial) -> u64 {
        self.entries.get(&(i, m.clone())).copied().unwrap_or(0)
    }

    /// Largest homological degree with a nonzero entry (0 if none).
    pub fn max_degree(&self) -> usize {
        self.entries.keys().map(|(i, _)| *i).max().unwrap_or(0)
    }

    /// Total Betti number in homological degree `i`.
    pub fn total(&self, i: usize) -> u64 {
        self.entries.iter().filter(|((j, _), _)| *j == i).map(|(_, &b)| b).sum()
    }

    /// Multidegrees carrying some nonzero entry.
    pub fn support(&self) -> Vec<Monomial> {
        let mut degs: Vec<Monomial> = self.entries.keys().map(|(_, m)| m.clone()).collect();
        degs.sort();
        degs.dedup();
        degs
    }

    /// `sum_i (-1)^i beta_{i,m}` at a multidegree (without the `beta_0`
    /// term at the unit monomial).
    pub fn alternating_sum(&self, m: &Monomial) -> i64 {
        self.entries
            .iter()
            .filter(|((_, d), _)| d == m)
            .map(|((i, _), &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    pub fn to_json(&self) -> String {
        let json = BettiTableJson {
            field: self.field,
            entries: self
                .entries
                .iter()
                .map(|((i, m), &beta)| BettiEntryJson { i: *i, deg: m.0.clone(), beta })
                .collect(),
        };
        serde_json::to_string(&json).expect("betti tables serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let json: BettiTableJson = serde_json::from_str(text)?;
        let nvars = json.entries.first().map_or(0, |e| e.deg.len());
        Ok(Self {
            entries: json
                .entries
                .into_iter()
                .map(|e| ((e.i, Monomial(e.deg)), e.beta))
                .collect(),
            nvars,
            field: json.field,
        })
    }
}

/// Nodes `m != bottom` of a lattice whose open lower interval has
/// nonvanishing reduced homology, together with those homology ranks
/// (indexed by homological degree `i = d + 2`).
pub fn lattice_betti_numbers(lattice: &FiniteLattice, field: FieldSpec) -> Vec<(NodeId, BTreeMap<usize, u64>)> {
    (0..lattice.len())
        .into_par_iter()
        .filter(|&m| m != lattice.bottom())
        .filter_map(|m| {
            let complex = lattice.open_lower_complex(m).expect("m is not the bottom");
            let ranks: BTreeMap<usize, u64> = reduced_homology_ranks(&complex, field)
                .into_iter()
                .filter(|&(_, h)| h > 0)
                .map(|(d, h)| ((d + 2) as usize, h as u64))
                .collect();
            (!ranks.is_empty()).then_some((m, ranks))
        })
        .collect()
}

/// Nodes of the Betti poset of a lattice, ascending.
pub fn lattice_betti_elements(lattice: &FiniteLattice, field: FieldSpec) -> Vec<NodeId> {
    lattice_betti_numbers(lattice, field).into_iter().map(|(m, _)| m).collect()
}

pub fn betti_table(ideal: &MonomialIdeal, field: FieldSpec) -> Result<BettiTable, BettiError> {
    let lcm = LcmLattice::new(ideal)?;
    Ok(betti_table_of(&lcm, ideal.nvars(), field))
}

pub fn betti_table_of(lcm: &LcmLattice, nvars: usize, field: FieldSpec) -> BettiTable {
    let mut table = BettiTable::empty(nvars, field);
    for (m, ranks) in lattice_betti_numbers(lcm.lattice(), field) {
        for (i, b) in ranks {
            table.entries.insert((i, lcm.degree(m).clone()), b);
        }
    }
    table
}

/// Generator-count limit of the Taylor oracle.
pub const TAYLOR_LIMIT: usize = 20;

/// Betti numbers from the multigraded strands of the Taylor complex
/// tensored with the residue field: in strand `m` the basis is the set of
/// generator subsets with lcm exactly `m`, and the differential keeps only
/// the faces that do not lower the lcm.
pub fn taylor_betti_oracle(ideal: &MonomialIdeal, field: FieldSpec) -> Result<BettiTable, BettiError> {
    let gens = ideal.generators();
    let k = gens.len();
    if k > TAYLOR_LIMIT {
        return Err(BettiError::TooManyGenerators(k, TAYLOR_LIMIT));
    }
    let n = ideal.nvars();
    let mut lcms = vec![Monomial::one(n); 1 << k];
    let mut strands: BTreeMap<Monomial, Vec<u32>> = BTreeMap::new();
    for mask in 1u32..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        lcms[mask as usize] = lcms[(mask & (mask - 1)) as usize].lcm(&gens[low]);
        strands.entry(lcms[mask as usize].clone()).or_default().push(mask);
    }
    let mut table = BettiTable::empty(n, field);
    for (m, cells) in strands {
        // cells grouped by size; the differential maps size s to size s - 1
        let mut by_size: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for &c in &cells {
            by_size.entry(c.count_ones() as usize).or_default().push(c);
        }
        let rank_of = |s: usize| -> usize {
            let (Some(src), Some(dst)) = (by_size.get(&s), by_size.get(&(s - 1))) else {
                return 0;
            };
            let row: BTreeMap<u32, usize> = dst.iter().enumerate().map(|(i, &c)| (c, i)).collect();
            let mut matrix = vec![vec![0i64; src.len()]; dst.len()];
            for (j, &c) in src.iter().enumerate() {
                for (pos, bit) in (0..k).filter(|b| c >> b & 1 == 1).enumerate() {
                    let face = c & !(1 << bit);
                    if let Some(&r) = row.get(&face) {
                        matrix[r][j] = if pos % 2 == 0 { 1 } else { -1 };
                    }
                }
            }
            dense_rank(matrix, field)
        };
        for (&s, cells_s) in &by_size {
            let dim = cells_s.len() - rank_of(s) - if s >= 1 { rank_of(s + 1) } else { 0 };
            if dim > 0 {
                table.entries.insert((s, m.clone()), dim as u64);
            }
        }
    }
    Ok(table)
}

fn dense_rank(matrix: Vec<Vec<i64>>, field: FieldSpec) -> usize {
    match field.characteristic() {
        0 => {
            let mut a: Vec<Vec<BigRational>> = matrix
                .into_iter()
                .map(|row| row.into_iter().map(|v| BigRational::from_integer(v.into())).collect())
                .collect();
            gauss_rank(&mut a, |x| x.is_zero(), |x| BigRational::one() / x, |a, b| a * b, |a, b| a - b)
        }
        p => {
            let p = p as i64;
            let mut a: Vec<Vec<i64>> = matrix
                .into_iter()
                .map(|row| row.into_iter().map(|v| v.rem_euclid(p)).collect())
                .collect();
            let inv = move |x: &i64| {
                let (mut base, mut e, mut acc) = (*x as i128, p as i128 - 2, 1i128);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc * base % p as i128;
                    }
                    base = base * base % p as i128;
                    e >>= 1;
                }
                acc as i64
            };
            gauss_rank(
                &mut a,
                |x| *x == 0,
                inv,
                move |a, b| ((*a as i128 * *b as i128) % p as i128) as i64,
                move |a, b| (a - b).rem_euclid(p),
            )
        }
    }
}

fn gauss_rank<T: Clone>(
    a: &mut [Vec<T>],
    is_zero: impl Fn(&T) -> bool,
    inv: impl Fn(&T) -> T,
    mul: impl Fn(&T, &T) -> T,
    sub: impl Fn(&T, &T) -> T,
) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !is_zero(&a[r][c])) else {
            continue;
        };
        a.swap(rank, p);
        let pivot_inv = inv(&a[rank][c]);
        for r in (rank + 1)..rows {
            if is_zero(&a[r][c]) {
                continue;
            }
            let factor = mul(&a[r][c], &pivot_inv);
            let (upper, lower) = a.split_at_mut(r);
            for (x, y) in lower[0][c..].iter_mut().zip(&upper[rank][c..]) {
                let delta = mul(&factor, y);
                *x = sub(x, &delta);
            }
        }
        rank += 1;
    }
    rank
}

/// Betti poset: the induced subposet of the lcm-lattice on the Betti
/// multidegrees. The bottom is never included.
#[derive(Debug, Clone)]
pub struct BettiPoset {
    pub poset: FinitePoset,
    /// Lcm-lattice node of each Betti poset element.
    pub nodes: Vec<NodeId>,
    pub field: FieldSpec,
}

impl BettiPoset {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn degrees(&self) -> Vec<Monomial> {
        self.poset
            .labels()
            .map(|l| l.iter().cloned().map(Monomial).collect())
            .unwrap_or_default()
    }

    pub fn canonical_form(&self) -> Vec<u8> {
        canonical_form(&self.poset)
    }

    pub fn length(&self) -> usize {
        self.poset.length().unwrap_or(0)
    }
}

pub fn betti_poset(ideal: &MonomialIdeal, field: FieldSpec) -> Result<BettiPoset, BettiError> {
    let lcm = LcmLattice::new(ideal)?;
    Ok(betti_poset_of(&lcm, field))
}

pub fn betti_poset_of(lcm: &LcmLattice, field: FieldSpec) -> BettiPoset {
    let nodes = lattice_betti_elements(lcm.lattice(), field);
    BettiPoset { poset: lcm.lattice().poset().induced(&nodes), nodes, field }
}

/// Homological invariants derived from the Betti table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologicalSummary {
    pub pdim_quotient: usize,
    pub pdim_ideal: usize,
    pub depth_quotient: usize,
    pub depth_ideal: usize,
}

impl HomologicalSummary {
    pub fn from_table(table: &BettiTable) -> Self {
        let pdim_quotient = table.max_degree();
        Self {
            pdim_quotient,
            pdim_ideal: pdim_quotient.saturating_sub(1),
            depth_quotient: table.nvars - pdim_quotient,
            depth_ideal: table.nvars - pdim_quotient + 1,
        }
    }
}

pub fn homological_summary(ideal: &MonomialIdeal, field: FieldSpec) -> Result<HomologicalSummary, BettiError> {
    Ok(HomologicalSummary::from_table(&betti_table(ideal, field)?))
}

/// Scarf elements: nodes whose atom set is the only atom subset joining to
/// them. Equivalently no atom below `m` is redundant in the join.
pub fn scarf_nodes(lattice: &FiniteLattice) -> Vec<NodeId> {
    (0..lattice.len())
        .filter(|&m| m != lattice.bottom())
        .filter(|&m| {
            let below = lattice.atoms_below(m);
            below.iter().all(|&skip| {
                let rest = below
                    .iter()
                    .filter(|&&a| a != skip)
                    .fold(lattice.bottom(), |acc, &a| lattice.join(acc, a));
                rest != m
            })
        })
        .collect()
}

/// Scarf complex as a labelled subposet of the lcm-lattice.
pub fn scarf_complex(ideal: &MonomialIdeal) -> Result<BettiPoset, BettiError> {
    let lcm = LcmLattice::new(ideal)?;
    let nodes = scarf_nodes(lcm.lattice());
    Ok(BettiPoset {
        poset: lcm.lattice().poset().induced(&nodes),
        nodes,
        field: FieldSpec::RATIONALS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumeratorSource {
    Betti,
    Taylor,
}

/// Numerator of the multigraded Hilbert series of `S/I` over
/// `prod (1 - t_j)`, as a map from exponent vector to coefficient.
pub fn hilbert_numerator(
    ideal: &MonomialIdeal,
    source: NumeratorSource,
    field: FieldSpec,
) -> Result<BTreeMap<Monomial, i64>, BettiError> {
    let n = ideal.nvars();
    let mut poly: BTreeMap<Monomial, i64> = BTreeMap::new();
    match source {
        NumeratorSource::Betti => {
            poly.insert(Monomial::one(n), 1);
            let table = betti_table(ideal, field)?;
            for m in table.support() {
                *poly.entry(m.clone()).or_default() += table.alternating_sum(&m);
            }
        }
        NumeratorSource::Taylor => {
            let gens = ideal.generators();
            if gens.len() > TAYLOR_LIMIT {
                return Err(BettiError::TooManyGenerators(gens.len(), TAYLOR_LIMIT));
            }
            let mut lcms = vec![Monomial::one(n); 1 << gens.len()];
            *poly.entry(Monomial::one(n)).or_default() += 1;
            for mask in 1usize..(1 << gens.len()) {
                let low = mask.trailing_zeros() as usize;
                lcms[mask] = lcms[mask & (mask - 1)].lcm(&gens[low]);
                let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                *poly.entry(lcms[mask].clone()).or_default() += sign;
            }
        }
    }
    poly.retain(|_, c| *c != 0);
    Ok(poly)
}

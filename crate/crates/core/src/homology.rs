//! Reduced simplicial homology over the rationals or a prime field.
//!
//! Ranks are computed exactly by sparse column reduction. Over the
//! rationals columns are kept integral and divided by their content after
//! every elimination step; if an entry would overflow `i128` the reduction
//! is repeated with arbitrary precision integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::SimplicialComplexData;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse field `{0}` (expected `q` or `fp:<prime>`)")]
    BadSyntax(String),
}

/// Coefficient field: the rationals (characteristic 0) or `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        if is_prime(p) {
            Ok(Self { characteristic: p })
        } else {
            Err(FieldError::NotPrime(p))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        Self::RATIONALS
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "q"),
            p => write!(f, "fp:{p}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "q" | "Q" => Ok(Self::RATIONALS),
            _ => {
                let p = s
                    .strip_prefix("fp:")
                    .and_then(|p| p.parse::<u64>().ok())
                    .ok_or_else(|| FieldError::BadSyntax(s.to_string()))?;
                Self::prime(p)
            }
        }
    }
}

impl From<FieldSpec> for String {
    fn from(f: FieldSpec) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = FieldError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Sparse integer column: sorted `(row, value)` pairs with nonzero values.
pub type SparseColumn = Vec<(usize, i64)>;

/// Augmented chain complex of a simplicial complex. Degree `d` (from -1)
/// lives at index `d + 1`.
#[derive(Debug, Clone)]
pub struct ChainComplexData {
    /// Face counts per degree, starting at degree -1.
    pub dimensions: Vec<usize>,
    /// `boundaries[k]` is the map from degree `k` faces to degree `k - 1`
    /// faces (so `boundaries[0]` is empty), stored by columns.
    pub boundaries: Vec<Vec<SparseColumn>>,
}

impl ChainComplexData {
    /// Degree-`d` boundary, `d >= 0`.
    pub fn boundary(&self, d: usize) -> &[SparseColumn] {
        &self.boundaries[d + 1]
    }

    /// Checks that consecutive boundary maps compose to zero.
    pub fn is_complex(&self) -> bool {
        (1..self.boundaries.len()).all(|k| {
            if k + 1 >= self.boundaries.len() {
                return true;
            }
            let lower = &self.boundaries[k];
            self.boundaries[k + 1].iter().all(|col| {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for &(r, v) in col {
                    for &(r2, v2) in &lower[r] {
                        *acc.entry(r2).or_default() += v * v2;
                    }
                }
                acc.values().all(|&x| x == 0)
            })
        })
    }
}

/// Boundary matrices of the augmented complex; the empty face spans degree
/// -1 and the sign of removing the `i`-th vertex of a face is `(-1)^i`.
pub fn boundary_matrices(complex: &SimplicialComplexData) -> ChainComplexData {
    let top = (complex.dimension() + 1) as usize;
    let mut by_degree: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); top + 1];
    for f in &complex.faces {
        by_degree[f.len()].push(f);
    }
    let index: Vec<HashMap<&Vec<usize>, usize>> = by_degree
        .iter()
        .map(|faces| faces.iter().enumerate().map(|(i, &f)| (f, i)).collect())
        .collect();
    let dimensions = by_degree.iter().map(Vec::len).collect();
    let mut boundaries = vec![Vec::new()];
    for k in 1..=top {
        let cols = by_degree[k]
            .iter()
            .map(|face| {
                let mut col: SparseColumn = (0..face.len())
                    .map(|skip| {
                        let mut sub = (*face).clone();
                        sub.remove(skip);
                        let sign = if skip % 2 == 0 { 1 } else { -1 };
                        (index[k - 1][&sub], sign)
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        boundaries.push(cols);
    }
    let data = ChainComplexData { dimensions, boundaries };
    debug_assert!(data.is_complex());
    data
}

/// Rank of a sparse integer matrix (given by columns) over `field`.
pub fn rank(columns: &[SparseColumn], field: FieldSpec) -> usize {
    match field.characteristic {
        0 => rank_rational(columns),
        p => rank_mod_p(columns, p),
    }
}

fn rank_mod_p(columns: &[SparseColumn], p: u64) -> usize {
    let p = p as i128;
    let norm = |v: i128| v.rem_euclid(p);
    let inv = |a: i128| {
        // Fermat
        let (mut base, mut exp, mut acc) = (a, p - 2, 1i128);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            exp >>= 1;
        }
        acc
    };
    let mut pivots: HashMap<usize, Vec<(usize, i128)>> = HashMap::new();
    for col in columns {
        let mut cur: BTreeMap<usize, i128> = col
            .iter()
            .map(|&(r, v)| (r, norm(v as i128)))
            .filter(|&(_, v)| v != 0)
            .collect();
        while let Some((&low, &lv)) = cur.iter().next_back() {
            match pivots.get(&low) {
                Some(pcol) => {
                    // pivot columns are normalised to 1 at their low row
                    for &(r, pv) in pcol {
                        let e = cur.entry(r).or_insert(0);
                        *e = norm(*e - lv * pv);
                        if *e == 0 {
                            cur.remove(&r);
                        }
                    }
                }
                None => {
                    let scale = inv(lv);
                    let normalised = cur.iter().map(|(&r, &v)| (r, v * scale % p)).collect();
                    pivots.insert(low, normalised);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn rank_rational(columns: &[SparseColumn]) -> usize {
    rank_rational_i128(columns).unwrap_or_else(|| rank_rational_big(columns))
}

/// `None` on overflow.
fn rank_rational_i128(columns: &[SparseColumn]) -> Option<usize> {
    let mut pivots: HashMap<usize, BTreeMap<usize, i128>> = HashMap::new();
    for col in columns {
        let mut cur: BTreeMap<usize, i128> =
            col.iter().filter(|&&(_, v)| v != 0).map(|&(r, v)| (r, v as i128)).collect();
        while let Some((&low, &lv)) = cur.iter().next_back() {
            match pivots.get(&low) {
                Some(pcol) => {
                    let pv = pcol[&low];
                    let g = lv.gcd(&pv);
                    let (a, b) = (pv / g, lv / g);
                    // cur <- a * cur - b * pcol
                    let mut next = BTreeMap::new();
                    for (&r, &v) in &cur {
                        next.insert(r, v.checked_mul(a)?);
                    }
                    for (&r, &v) in pcol {
                        let e = next.entry(r).or_insert(0);
                        *e = e.checked_sub(v.checked_mul(b)?)?;
                    }
                    next.retain(|_, v| *v != 0);
                    let content = next.values().fold(0i128, |acc, v| acc.gcd(v));
                    if content > 1 {
                        for v in next.values_mut() {
                            *v /= content;
                        }
                    }
                    cur = next;
                }
                None => {
                    pivots.insert(low, cur);
                    break;
                }
            }
        }
    }
    Some(pivots.len())
}

fn rank_rational_big(columns: &[SparseColumn]) -> usize {
    let mut pivots: HashMap<usize, BTreeMap<usize, BigInt>> = HashMap::new();
    for col in columns {
        let mut cur: BTreeMap<usize, BigInt> = col
            .iter()
            .filter(|&&(_, v)| v != 0)
            .map(|&(r, v)| (r, BigInt::from(v)))
            .collect();
        while let Some((&low, lv)) = cur.iter().next_back() {
            let lv = lv.clone();
            match pivots.get(&low) {
                Some(pcol) => {
                    let pv = &pcol[&low];
                    let g = lv.gcd(pv);
                    let (a, b) = (pv / &g, &lv / &g);
                    let mut next: BTreeMap<usize, BigInt> =
                        cur.iter().map(|(&r, v)| (r, v * &a)).collect();
                    for (&r, v) in pcol {
                        let e = next.entry(r).or_insert_with(BigInt::zero);
                        *e -= v * &b;
                    }
                    next.retain(|_, v| !v.is_zero());
                    let content = next.values().fold(BigInt::zero(), |acc, v| acc.gcd(v));
                    if content.abs() > BigInt::from(1) {
                        for v in next.values_mut() {
                            *v /= &content;
                        }
                    }
                    cur = next;
                }
                None => {
                    pivots.insert(low, cur);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// Reduced Betti numbers `dim H~_d(K; field)` for `d = -1 ..= dim K`.
pub fn reduced_homology_ranks(complex: &SimplicialComplexData, field: FieldSpec) -> BTreeMap<isize, usize> {
    let chain = boundary_matrices(complex);
    let top = chain.dimensions.len();
    // ranks[k] = rank of the map out of degree k - 1
    let ranks: Vec<usize> = (0..=top)
        .map(|k| if k == 0 || k >= top { 0 } else { rank(&chain.boundaries[k], field) })
        .collect();
    (0..top)
        .map(|k| (k as isize - 1, chain.dimensions[k] - ranks[k] - ranks[k + 1]))
        .collect()
}

pub fn is_acyclic(complex: &SimplicialComplexData, field: FieldSpec) -> bool {
    reduced_homology_ranks(complex, field).values().all(|&h| h == 0)
}

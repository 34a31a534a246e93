//! Finite posets and lattices.
//!
//! Everything here is small: order relations are stored as dense bitset
//! tables and lattice operations as full `n x n` tables. Node ids are plain
//! indices into the element list.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub type NodeId = usize;

/// Multidegree label attached to a node (an exponent vector).
pub type Multidegree = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("relation closure is not antisymmetric: {0} and {1} would be equal")]
    CycleDetected(NodeId, NodeId),
    #[error("relation is not a partial order at ({0}, {1})")]
    NotAPartialOrder(NodeId, NodeId),
    #[error("relation mentions element {0} outside of 0..{1}")]
    UnknownElement(NodeId, usize),
    #[error("poset is empty")]
    EmptyPoset,
    #[error("not a lattice: {0} and {1} have no unique meet or join")]
    NotALattice(NodeId, NodeId),
    #[error("element {0} is not meet-irreducible")]
    NotMeetIrreducible(NodeId),
    #[error("the bottom element cannot be removed")]
    CannotRemoveBottom,
    #[error("the top element cannot be removed")]
    CannotRemoveTop,
    #[error("the open lower interval of the bottom element is undefined")]
    BottomExcluded,
    #[error("node set is not closed under meets or misses the bottom or top")]
    NotMeetClosed,
    #[error("step {0} of the removal chain is not a lattice")]
    StepNotLattice(usize),
    #[error("face family is not closed under taking subsets")]
    NotDownwardClosed,
}

/// A finite partial order on `0..len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    // up[i] holds every j with i <= j, down[j] every i with i <= j
    up: Vec<FixedBitSet>,
    down: Vec<FixedBitSet>,
    labels: Option<Vec<Multidegree>>,
}

impl FinitePoset {
    /// Builds the reflexive-transitive closure of `relations`, read as
    /// `a < b` generators on the elements `0..n`.
    pub fn from_relations(n: usize, relations: &[(NodeId, NodeId)]) -> Result<Self, PosetError> {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            row.insert(i);
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(PosetError::UnknownElement(a.max(b), n));
            }
            up[a].insert(b);
        }
        // Warshall on rows
        for k in 0..n {
            let row_k = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for i in 0..n {
            for j in up[i].ones() {
                if j != i && up[j].contains(i) {
                    return Err(PosetError::CycleDetected(i.min(j), i.max(j)));
                }
            }
        }
        Ok(Self::from_up_sets(up))
    }

    /// Builds a poset from a comparison predicate, checking the partial order
    /// axioms exhaustively.
    pub fn from_leq<F>(n: usize, leq: F) -> Result<Self, PosetError>
    where
        F: Fn(NodeId, NodeId) -> bool,
    {
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter_mut().enumerate() {
            for j in 0..n {
                if leq(i, j) {
                    row.insert(j);
                }
            }
        }
        for i in 0..n {
            if !up[i].contains(i) {
                return Err(PosetError::NotAPartialOrder(i, i));
            }
            for j in up[i].ones() {
                if j != i && up[j].contains(i) {
                    return Err(PosetError::NotAPartialOrder(i, j));
                }
                if !up[j].is_subset(&up[i]) {
                    return Err(PosetError::NotAPartialOrder(i, j));
                }
            }
        }
        Ok(Self::from_up_sets(up))
    }

    fn from_up_sets(up: Vec<FixedBitSet>) -> Self {
        let n = up.len();
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in up.iter().enumerate() {
            for j in row.ones() {
                down[j].insert(i);
            }
        }
        Self { up, down, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<Multidegree>) -> Self {
        assert_eq!(labels.len(), self.len(), "one label per element");
        self.labels = Some(labels);
        self
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn labels(&self) -> Option<&[Multidegree]> {
        self.labels.as_deref()
    }

    pub fn label(&self, a: NodeId) -> Option<&Multidegree> {
        self.labels.as_ref().map(|l| &l[a])
    }

    #[inline]
    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        self.up[a].contains(b)
    }

    #[inline]
    pub fn lt(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.up[a].contains(b)
    }

    pub fn up_set(&self, a: NodeId) -> &FixedBitSet {
        &self.up[a]
    }

    pub fn down_set(&self, a: NodeId) -> &FixedBitSet {
        &self.down[a]
    }

    /// Elements sorted so that `a < b` implies `a` comes first.
    pub fn linear_extension(&self) -> Vec<NodeId> {
        let mut order: Vec<NodeId> = (0..self.len()).collect();
        order.sort_by_key(|&a| (self.down[a].count_ones(..), a));
        order
    }

    /// Upper covers of `a`.
    pub fn upper_covers(&self, a: NodeId) -> Vec<NodeId> {
        self.up[a]
            .ones()
            .filter(|&b| b != a)
            .filter(|&b| !self.up[a].ones().any(|c| c != a && c != b && self.leq(c, b)))
            .collect()
    }

    /// Lower covers of `a`.
    pub fn lower_covers(&self, a: NodeId) -> Vec<NodeId> {
        self.down[a]
            .ones()
            .filter(|&b| b != a)
            .filter(|&b| !self.down[a].ones().any(|c| c != a && c != b && self.leq(b, c)))
            .collect()
    }

    /// All cover pairs `(a, b)` with `a` covered by `b`.
    pub fn cover_relation(&self) -> Vec<(NodeId, NodeId)> {
        (0..self.len())
            .flat_map(|a| self.upper_covers(a).into_iter().map(move |b| (a, b)))
            .collect()
    }

    /// Length of the longest strictly ascending chain.
    pub fn length(&self) -> Result<usize, PosetError> {
        if self.is_empty() {
            return Err(PosetError::EmptyPoset);
        }
        Ok(self.heights().into_iter().max().unwrap_or(0))
    }

    /// For each element, the length of the longest chain ending in it.
    pub fn heights(&self) -> Vec<usize> {
        let mut height = vec![0usize; self.len()];
        for b in self.linear_extension() {
            height[b] = self.down[b]
                .ones()
                .filter(|&a| a != b)
                .map(|a| height[a] + 1)
                .max()
                .unwrap_or(0);
        }
        height
    }

    pub fn minimal_elements(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&a| self.down[a].count_ones(..) == 1).collect()
    }

    pub fn maximal_elements(&self) -> Vec<NodeId> {
        (0..self.len()).filter(|&a| self.up[a].count_ones(..) == 1).collect()
    }

    /// The induced subposet on `nodes`, in the given order. Labels follow.
    pub fn induced(&self, nodes: &[NodeId]) -> FinitePoset {
        let m = nodes.len();
        let mut up = vec![FixedBitSet::with_capacity(m); m];
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate() {
                if self.leq(a, b) {
                    up[i].insert(j);
                }
            }
        }
        let mut sub = Self::from_up_sets(up);
        if let Some(labels) = &self.labels {
            sub.labels = Some(nodes.iter().map(|&a| labels[a].clone()).collect());
        }
        sub
    }
}

/// A finite lattice with precomputed meet and join tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    poset: FinitePoset,
    bottom: NodeId,
    top: NodeId,
    meet: Vec<NodeId>,
    join: Vec<NodeId>,
    atoms: Vec<NodeId>,
    atomistic: bool,
}

impl FiniteLattice {
    /// Fills the meet and join tables of `poset`, failing with a witness
    /// pair if some meet or join does not exist.
    pub fn from_poset(poset: FinitePoset) -> Result<Self, PosetError> {
        let n = poset.len();
        if n == 0 {
            return Err(PosetError::EmptyPoset);
        }
        // positions in a linear extension, so that the largest common lower
        // bound is the highest set bit and the smallest upper bound the lowest
        let order = poset.linear_extension();
        let mut pos = vec![0usize; n];
        for (p, &a) in order.iter().enumerate() {
            pos[a] = p;
        }
        let remap = |set: &FixedBitSet| {
            let mut out = FixedBitSet::with_capacity(n);
            for a in set.ones() {
                out.insert(pos[a]);
            }
            out
        };
        let down: Vec<FixedBitSet> = order.iter().map(|&a| remap(poset.down_set(a))).collect();
        let up: Vec<FixedBitSet> = order.iter().map(|&a| remap(poset.up_set(a))).collect();

        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        let mut scratch = FixedBitSet::with_capacity(n);
        for pa in 0..n {
            for pb in pa..n {
                let (a, b) = (order[pa], order[pb]);
                scratch.clone_from(&down[pa]);
                scratch.intersect_with(&down[pb]);
                let m = match scratch.maximum() {
                    Some(m) if scratch.is_subset(&down[m]) => order[m],
                    _ => return Err(PosetError::NotALattice(a.min(b), a.max(b))),
                };
                scratch.clone_from(&up[pa]);
                scratch.intersect_with(&up[pb]);
                let j = match scratch.minimum() {
                    Some(j) if scratch.is_subset(&up[j]) => order[j],
                    _ => return Err(PosetError::NotALattice(a.min(b), a.max(b))),
                };
                meet[a * n + b] = m;
                meet[b * n + a] = m;
                join[a * n + b] = j;
                join[b * n + a] = j;
            }
        }
        let bottom = order[0];
        let top = order[n - 1];
        let atoms = poset.upper_covers(bottom);
        let mut lattice = Self { poset, bottom, top, meet, join, atoms, atomistic: false };
        lattice.atomistic = (0..n).all(|a| a == bottom || lattice.join_of_atoms_below(a) == a);
        Ok(lattice)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn bottom(&self) -> NodeId {
        self.bottom
    }

    pub fn top(&self) -> NodeId {
        self.top
    }

    pub fn atoms(&self) -> &[NodeId] {
        &self.atoms
    }

    pub fn is_atomistic(&self) -> bool {
        self.atomistic
    }

    #[inline]
    pub fn leq(&self, a: NodeId, b: NodeId) -> bool {
        self.poset.leq(a, b)
    }

    #[inline]
    pub fn meet(&self, a: NodeId, b: NodeId) -> NodeId {
        self.meet[a * self.len() + b]
    }

    #[inline]
    pub fn join(&self, a: NodeId, b: NodeId) -> NodeId {
        self.join[a * self.len() + b]
    }

    pub fn label(&self, a: NodeId) -> Option<&Multidegree> {
        self.poset.label(a)
    }

    fn check_node(&self, a: NodeId) -> Result<(), PosetError> {
        if a < self.len() {
            Ok(())
        } else {
            Err(PosetError::UnknownElement(a, self.len()))
        }
    }

    /// Atoms below `a`, in atom order.
    pub fn atoms_below(&self, a: NodeId) -> Vec<NodeId> {
        self.atoms.iter().copied().filter(|&x| self.leq(x, a)).collect()
    }

    fn join_of_atoms_below(&self, a: NodeId) -> NodeId {
        self.atoms_below(a)
            .into_iter()
            .fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Number of atoms below `a`.
    pub fn rank(&self, a: NodeId) -> Result<usize, PosetError> {
        self.check_node(a)?;
        Ok(self.atoms.iter().filter(|&&x| self.leq(x, a)).count())
    }

    pub fn length(&self) -> usize {
        self.poset.length().expect("lattices are nonempty")
    }

    /// Elements that are not the meet of two elements different from
    /// themselves. The top is included.
    pub fn meet_irreducibles(&self) -> Vec<NodeId> {
        let n = self.len();
        let mut reducible = vec![false; n];
        for b in 0..n {
            for c in (b + 1)..n {
                let m = self.meet(b, c);
                if m != b && m != c {
                    reducible[m] = true;
                }
            }
        }
        (0..n).filter(|&a| !reducible[a]).collect()
    }

    pub fn is_meet_irreducible(&self, a: NodeId) -> bool {
        let n = self.len();
        !(0..n).any(|b| {
            b != a && ((b + 1)..n).any(|c| c != a && self.meet(b, c) == a)
        })
    }

    /// The induced sublattice on `nodes` (in the given order), revalidated.
    pub fn restrict(&self, nodes: &[NodeId]) -> Result<FiniteLattice, PosetError> {
        FiniteLattice::from_poset(self.poset.induced(nodes))
    }

    /// `L \ {a}` for a meet-irreducible `a` other than the bottom and top.
    /// Remaining nodes keep their relative order.
    pub fn remove_element(&self, a: NodeId) -> Result<FiniteLattice, PosetError> {
        self.check_node(a)?;
        if a == self.bottom {
            return Err(PosetError::CannotRemoveBottom);
        }
        if a == self.top {
            return Err(PosetError::CannotRemoveTop);
        }
        if !self.is_meet_irreducible(a) {
            return Err(PosetError::NotMeetIrreducible(a));
        }
        let keep: Vec<NodeId> = (0..self.len()).filter(|&x| x != a).collect();
        self.restrict(&keep)
    }

    /// Order complex of the open interval `(bottom, m)`.
    pub fn open_lower_complex(&self, m: NodeId) -> Result<SimplicialComplexData, PosetError> {
        self.check_node(m)?;
        if m == self.bottom {
            return Err(PosetError::BottomExcluded);
        }
        let vertices: Vec<NodeId> = self
            .poset
            .linear_extension()
            .into_iter()
            .filter(|&x| x != self.bottom && x != m && self.leq(x, m))
            .collect();
        Ok(SimplicialComplexData::order_complex(&self.poset, vertices))
    }

    /// Checks that `nodes` contains the bottom and top and is closed under
    /// meets.
    pub fn is_meet_closed(&self, nodes: &[NodeId]) -> bool {
        let mut member = vec![false; self.len()];
        for &a in nodes {
            if a >= self.len() {
                return false;
            }
            member[a] = true;
        }
        member[self.bottom]
            && member[self.top]
            && nodes
                .iter()
                .all(|&a| nodes.iter().all(|&b| member[self.meet(a, b)]))
    }

    /// Removes the elements outside `keep` one at a time by weakly decreasing
    /// rank (ties by ascending node id), validating every intermediate step.
    pub fn decreasing_rank_chain(&self, keep: &[NodeId]) -> Result<RankChain, PosetError> {
        if !self.is_meet_closed(keep) {
            return Err(PosetError::NotMeetClosed);
        }
        let mut kept = vec![false; self.len()];
        for &a in keep {
            kept[a] = true;
        }
        let mut removed: Vec<NodeId> = (0..self.len()).filter(|&a| !kept[a]).collect();
        let ranks: Vec<usize> = (0..self.len()).map(|a| self.rank(a).unwrap()).collect();
        removed.sort_by(|&a, &b| ranks[b].cmp(&ranks[a]).then(a.cmp(&b)));

        let mut current: Vec<NodeId> = (0..self.len()).collect();
        let mut nodes = vec![current.clone()];
        let mut lattices = vec![self.clone()];
        for (i, &a) in removed.iter().enumerate() {
            current.retain(|&x| x != a);
            let step = self.restrict(&current).map_err(|_| PosetError::StepNotLattice(i + 1))?;
            lattices.push(step);
            nodes.push(current.clone());
        }
        Ok(RankChain { removed, lattices, nodes })
    }
}

/// Output of [`FiniteLattice::decreasing_rank_chain`]. `lattices[i]` is the
/// lattice on `nodes[i]` (ids of the original lattice).
#[derive(Debug, Clone)]
pub struct RankChain {
    pub removed: Vec<NodeId>,
    pub lattices: Vec<FiniteLattice>,
    pub nodes: Vec<Vec<NodeId>>,
}

/// All intersections of subfamilies of `family`, inside the boolean algebra
/// on `atom_count` atoms. The empty subfamily contributes the full set.
///
/// Sets are bitmasks; the result is ordered by inclusion, node ids sorted by
/// (cardinality, mask), and each node is labelled by its 0/1 indicator.
pub fn meet_closure(atom_count: usize, family: &[u64]) -> FiniteLattice {
    assert!(atom_count <= 64, "at most 64 atoms");
    let full = if atom_count == 64 { u64::MAX } else { (1u64 << atom_count) - 1 };
    let mut sets = std::collections::BTreeSet::new();
    sets.insert(full);
    for &b in family {
        let b = b & full;
        let next: Vec<u64> = sets.iter().map(|&s| s & b).collect();
        sets.extend(next);
    }
    let mut sets: Vec<u64> = sets.into_iter().collect();
    sets.sort_by_key(|&s| (s.count_ones(), s));
    let poset = FinitePoset::from_leq(sets.len(), |i, j| sets[i] & !sets[j] == 0)
        .expect("inclusion is a partial order")
        .with_labels(
            sets.iter()
                .map(|&s| (0..atom_count).map(|k| ((s >> k) & 1) as u32).collect())
                .collect(),
        );
    FiniteLattice::from_poset(poset).expect("intersection-closed family with top is a lattice")
}

/// Simplicial complex on an indexed vertex set, stored as its full face list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplexData {
    /// Vertex names (node ids of whatever the complex was built from).
    pub vertices: Vec<usize>,
    /// Faces as sorted lists of vertex indices into `vertices`, sorted by
    /// (dimension, lexicographic). Always contains the empty face.
    pub faces: Vec<Vec<usize>>,
}

impl SimplicialComplexData {
    /// Validates downward closure and adds the empty face if missing.
    pub fn new(vertex_count: usize, faces: Vec<Vec<usize>>) -> Result<Self, PosetError> {
        let mut set = std::collections::BTreeSet::new();
        set.insert(Vec::new());
        for mut f in faces {
            f.sort_unstable();
            f.dedup();
            if f.iter().any(|&v| v >= vertex_count) {
                return Err(PosetError::UnknownElement(*f.last().unwrap(), vertex_count));
            }
            set.insert(f);
        }
        for f in &set {
            for skip in 0..f.len() {
                let mut g = f.clone();
                g.remove(skip);
                if !set.contains(&g) {
                    return Err(PosetError::NotDownwardClosed);
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = set.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(Self { vertices: (0..vertex_count).collect(), faces })
    }

    /// Downward closure of a list of facets.
    pub fn from_facets(vertex_count: usize, facets: &[Vec<usize>]) -> Result<Self, PosetError> {
        let mut faces = Vec::new();
        for f in facets {
            for mask in 0u64..(1 << f.len()) {
                faces.push((0..f.len()).filter(|&i| mask >> i & 1 == 1).map(|i| f[i]).collect());
            }
        }
        Self::new(vertex_count, faces)
    }

    /// The complex of all chains of the subposet on `vertices`, which must
    /// be listed in a linear extension order.
    pub fn order_complex(poset: &FinitePoset, vertices: Vec<NodeId>) -> Self {
        let k = vertices.len();
        let mut faces = vec![Vec::new()];
        let mut stack: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            for next in (last + 1)..k {
                if poset.lt(vertices[last], vertices[next]) {
                    let mut longer = chain.clone();
                    longer.push(next);
                    stack.push(longer);
                }
            }
            faces.push(chain);
        }
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Self { vertices, faces }
    }

    pub fn dimension(&self) -> isize {
        self.faces.last().map_or(-1, |f| f.len() as isize - 1)
    }

    /// Face counts by dimension, starting at dimension -1.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts = vec![0usize; (self.dimension() + 2) as usize];
        for f in &self.faces {
            counts[f.len()] += 1;
        }
        counts
    }

    /// Cone over the complex with a fresh apex vertex.
    pub fn cone(&self) -> Self {
        let apex = self.vertices.len();
        let mut faces = self.faces.clone();
        faces.extend(self.faces.iter().map(|f| {
            let mut g = f.clone();
            g.push(apex);
            g
        }));
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        let mut vertices = self.vertices.clone();
        vertices.push(usize::MAX);
        Self { vertices, faces }
    }
}

/// Version byte of the canonical poset encoding.
pub const CANONICAL_FORM_VERSION: u8 = 1;

/// Canonical byte string of the order relation of `poset`, equal for two
/// posets exactly when they are isomorphic. Labels are ignored.
///
/// Encoding (version 1): the magic `b"BPCF"`, the version byte, the element
/// count as a little-endian `u32`, then the `n x n` relation matrix
/// (`M[i][j] = 1` iff element `i <= j` in canonical order), row-major, packed
/// most-significant-bit first and zero padded to a whole byte.
pub fn canonical_form(poset: &FinitePoset) -> Vec<u8> {
    let n = poset.len();
    let mut header = b"BPCF".to_vec();
    header.push(CANONICAL_FORM_VERSION);
    header.extend_from_slice(&(n as u32).to_le_bytes());
    if n == 0 {
        return header;
    }
    let searcher = CanonSearch::new(poset);
    let colors = searcher.refine(searcher.initial_colors());
    let mut best: Option<Vec<u8>> = None;
    searcher.search(colors, &mut best);
    header.extend(best.expect("search visits at least one leaf"));
    header
}

pub fn is_isomorphic(p: &FinitePoset, q: &FinitePoset) -> bool {
    p.len() == q.len() && canonical_form(p) == canonical_form(q)
}

struct CanonSearch<'a> {
    poset: &'a FinitePoset,
    strict_up: Vec<Vec<NodeId>>,
    strict_down: Vec<Vec<NodeId>>,
}

impl<'a> CanonSearch<'a> {
    fn new(poset: &'a FinitePoset) -> Self {
        let n = poset.len();
        let strict_up = (0..n)
            .map(|a| poset.up_set(a).ones().filter(|&b| b != a).collect())
            .collect();
        let strict_down = (0..n)
            .map(|a| poset.down_set(a).ones().filter(|&b| b != a).collect())
            .collect();
        Self { poset, strict_up, strict_down }
    }

    fn initial_colors(&self) -> Vec<u64> {
        let heights = self.poset.heights();
        let keys: Vec<(usize, usize, usize, usize, usize)> = (0..self.poset.len())
            .map(|a| {
                (
                    heights[a],
                    self.strict_down[a].len(),
                    self.strict_up[a].len(),
                    self.poset.lower_covers(a).len(),
                    self.poset.upper_covers(a).len(),
                )
            })
            .collect();
        relabel(&keys)
    }

    /// Splits color classes by the color multisets of strict up- and
    /// down-sets until stable.
    fn refine(&self, mut colors: Vec<u64>) -> Vec<u64> {
        let mut classes = count_classes(&colors);
        loop {
            let keys: Vec<(u64, Vec<u64>, Vec<u64>)> = (0..colors.len())
                .map(|a| {
                    let mut up: Vec<u64> = self.strict_up[a].iter().map(|&b| colors[b]).collect();
                    let mut down: Vec<u64> =
                        self.strict_down[a].iter().map(|&b| colors[b]).collect();
                    up.sort_unstable();
                    down.sort_unstable();
                    (colors[a], up, down)
                })
                .collect();
            colors = relabel(&keys);
            let next = count_classes(&colors);
            if next == classes {
                return colors;
            }
            classes = next;
        }
    }

    fn is_twin(&self, a: NodeId, b: NodeId) -> bool {
        self.strict_up[a] == self.strict_up[b] && self.strict_down[a] == self.strict_down[b]
    }

    fn search(&self, colors: Vec<u64>, best: &mut Option<Vec<u8>>) {
        let mut by_color: BTreeMap<u64, Vec<NodeId>> = BTreeMap::new();
        for (a, &c) in colors.iter().enumerate() {
            by_color.entry(c).or_default().push(a);
        }
        let Some((&cell_color, cell)) = by_color.iter().find(|(_, members)| members.len() > 1)
        else {
            let mut order: Vec<NodeId> = (0..colors.len()).collect();
            order.sort_by_key(|&a| colors[a]);
            let cert = self.certificate(&order);
            if best.as_ref().is_none_or(|b| cert < *b) {
                *best = Some(cert);
            }
            return;
        };
        let mut tried: Vec<NodeId> = Vec::new();
        for &v in cell {
            if tried.iter().any(|&w| self.is_twin(v, w)) {
                continue;
            }
            tried.push(v);
            let individualized: Vec<u64> = colors
                .iter()
                .enumerate()
                .map(|(a, &c)| if a == v || c != cell_color { 2 * c } else { 2 * c + 1 })
                .collect();
            self.search(self.refine(individualized), best);
        }
    }

    fn certificate(&self, order: &[NodeId]) -> Vec<u8> {
        let n = order.len();
        let mut bytes = vec![0u8; (n * n).div_ceil(8)];
        for (i, &a) in order.iter().enumerate() {
            for (j, &b) in order.iter().enumerate() {
                if self.poset.leq(a, b) {
                    let bit = i * n + j;
                    bytes[bit / 8] |= 0x80 >> (bit % 8);
                }
            }
        }
        bytes
    }
}

fn relabel<K: Ord + Clone>(keys: &[K]) -> Vec<u64> {
    let mut distinct: Vec<K> = keys.to_vec();
    distinct.sort();
    distinct.dedup();
    keys.iter()
        .map(|k| distinct.binary_search(k).unwrap() as u64)
        .collect()
}

fn count_classes(colors: &[u64]) -> usize {
    let mut c = colors.to_vec();
    c.sort_unstable();
    c.dedup();
    c.len()
}

/// Boolean algebra on `k` atoms, as a meet closure of all subsets.
pub fn boolean_algebra(k: usize) -> FiniteLattice {
    let family: Vec<u64> = (0..(1u64 << k)).collect();
    meet_closure(k, &family)
}

/// Chain `0 < 1 < ... < len-1`.
pub fn chain(len: usize) -> FinitePoset {
    FinitePoset::from_leq(len, |i, j| i <= j).unwrap()
}

/// Antichain on `len` elements.
pub fn antichain(len: usize) -> FinitePoset {
    FinitePoset::from_leq(len, |i, j| i == j).unwrap()
}

//! Monomials, monomial ideals and their lcm-lattices.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::poset::{FiniteLattice, FinitePoset, NodeId, PosetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("syntax error on line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("generator on line {0} is the unit monomial")]
    UnitGenerator(usize),
    #[error("the generator list is empty")]
    EmptyAfterMinimalization,
    #[error("the colon ideal is the whole ring")]
    UnitIdeal,
    #[error("exponent vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("lcm-lattice has more than {0} elements")]
    TooLarge(usize),
    #[error("no minimal generating set found after {0} attempts")]
    RetriesExhausted(usize),
    #[error(transparent)]
    Poset(#[from] PosetError),
}

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(&a, &b)| a.max(b)).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.0.iter().all(|&e| e <= 1)
    }

    /// Support as a bitmask of variable indices.
    pub fn support(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |acc, (j, _)| acc | (1 << j))
    }
}

/// Keeps the divisibility-minimal elements of `gens` (first occurrence of
/// duplicates), preserving input order.
pub fn minimalize(gens: &[Monomial]) -> Result<Vec<Monomial>, IdealError> {
    if gens.is_empty() {
        return Err(IdealError::EmptyAfterMinimalization);
    }
    let kept = gens
        .iter()
        .enumerate()
        .filter(|&(i, m)| {
            !gens.iter().enumerate().any(|(j, other)| {
                j != i && other.divides(m) && (other != m || j < i)
            })
        })
        .map(|(_, m)| m.clone())
        .collect();
    Ok(kept)
}

/// A monomial ideal given by its minimal generators, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialIdeal {
    variables: Vec<String>,
    generators: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn new(variables: Vec<String>, gens: Vec<Monomial>) -> Result<Self, IdealError> {
        for g in &gens {
            if g.len() != variables.len() {
                return Err(IdealError::LengthMismatch { expected: variables.len(), found: g.len() });
            }
        }
        if let Some(pos) = gens.iter().position(Monomial::is_one) {
            return Err(IdealError::UnitGenerator(pos + 1));
        }
        let mut generators = minimalize(&gens)?;
        generators.sort();
        Ok(Self { variables, generators })
    }

    /// Variables named `x1..xn`.
    pub fn with_default_names(gens: Vec<Monomial>) -> Result<Self, IdealError> {
        let n = gens.first().map_or(0, Monomial::len);
        Self::new(default_names(n), gens)
    }

    pub fn from_exponents(vectors: &[&[u32]]) -> Result<Self, IdealError> {
        Self::with_default_names(vectors.iter().map(|v| Monomial(v.to_vec())).collect())
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    /// Ambient variable count.
    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.generators.iter().all(Monomial::is_squarefree)
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.generators.iter().any(|g| g.divides(m))
    }

    /// Exponent vector of the lcm of all generators.
    pub fn lcm_exponents(&self) -> Monomial {
        self.generators
            .iter()
            .fold(Monomial::one(self.nvars()), |acc, g| acc.lcm(g))
    }

    pub fn variable_index(&self, name: &str) -> Result<usize, IdealError> {
        self.variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| IdealError::UnknownVariable(name.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self, IdealError> {
        let mut variables: Option<Vec<String>> = None;
        let mut gens = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: &str| IdealError::SyntaxError { line: line_no, message: message.into() };
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            match (keyword, &variables) {
                ("vars", None) => {
                    let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                    if names.is_empty() {
                        return Err(syntax("`vars` needs at least one name"));
                    }
                    if let Some(bad) = names.iter().find(|n| !is_valid_name(n)) {
                        return Err(syntax(&format!("invalid variable name `{bad}`")));
                    }
                    for (i, n) in names.iter().enumerate() {
                        if names[..i].contains(n) {
                            return Err(syntax(&format!("variable `{n}` declared twice")));
                        }
                    }
                    variables = Some(names);
                }
                ("vars", Some(_)) => return Err(syntax("`vars` declared twice")),
                ("gen", Some(vars)) => {
                    let m = parse_monomial(rest.trim(), vars, line_no)?;
                    if m.is_one() {
                        return Err(IdealError::UnitGenerator(line_no));
                    }
                    gens.push(m);
                }
                ("gen", None) => return Err(syntax("`gen` before `vars`")),
                _ => return Err(syntax(&format!("unknown directive `{keyword}`"))),
            }
        }
        let variables = variables.ok_or(IdealError::SyntaxError {
            line: 0,
            message: "missing `vars` line".into(),
        })?;
        Self::new(variables, gens)
    }

    /// Canonical text form, parseable by [`MonomialIdeal::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("vars {}\n", self.variables.join(" "));
        for g in &self.generators {
            out.push_str("gen ");
            out.push_str(&self.format_monomial(g));
            out.push('\n');
        }
        out
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        let factors: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| {
                if e == 1 {
                    self.variables[j].clone()
                } else {
                    format!("{}^{}", self.variables[j], e)
                }
            })
            .collect();
        if factors.is_empty() {
            "1".into()
        } else {
            factors.join("*")
        }
    }

    pub fn parse_monomial(&self, text: &str) -> Result<Monomial, IdealError> {
        if text.trim() == "1" {
            return Ok(Monomial::one(self.nvars()));
        }
        parse_monomial(text.trim(), &self.variables, 0)
    }

    /// Short stable identifier: the first 16 hex digits of the SHA-256 of
    /// the canonical text.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        hex::encode(&digest[..8])
    }

    /// `(I : v)`: lowers every generator's exponent at `v` by one.
    pub fn colon_by_variable(&self, var: usize) -> Result<Self, IdealError> {
        if var >= self.nvars() {
            return Err(IdealError::UnknownVariable(format!("#{var}")));
        }
        let gens: Vec<Monomial> = self
            .generators
            .iter()
            .map(|g| {
                let mut e = g.0.clone();
                e[var] = e[var].saturating_sub(1);
                Monomial(e)
            })
            .collect();
        if gens.iter().any(Monomial::is_one) {
            return Err(IdealError::UnitIdeal);
        }
        Self::new(self.variables.clone(), gens)
    }

    /// `I + I'` in the ring on the disjoint union of both variable lists.
    /// Clashing names of the second ideal get a numeric suffix.
    pub fn disjoint_sum(&self, other: &MonomialIdeal) -> MonomialIdeal {
        let mut variables = self.variables.clone();
        for name in &other.variables {
            let mut candidate = name.clone();
            let mut suffix = 2;
            while variables.contains(&candidate) {
                candidate = format!("{name}_{suffix}");
                suffix += 1;
            }
            variables.push(candidate);
        }
        let (n1, n2) = (self.nvars(), other.nvars());
        let mut gens = Vec::with_capacity(self.generators.len() + other.generators.len());
        for g in &self.generators {
            let mut e = g.0.clone();
            e.extend(std::iter::repeat_n(0, n2));
            gens.push(Monomial(e));
        }
        for g in &other.generators {
            let mut e = vec![0; n1];
            e.extend_from_slice(&g.0);
            gens.push(Monomial(e));
        }
        MonomialIdeal::new(variables, gens).expect("sum of minimal ideals in disjoint variables is minimal")
    }

    /// Genericity: whenever two generators have the same positive exponent
    /// in some variable, a third generator strictly divides their lcm
    /// (in every variable where the lcm is positive).
    pub fn is_generic(&self) -> bool {
        let gens = &self.generators;
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                let shares = (0..self.nvars())
                    .any(|v| gens[i].0[v] > 0 && gens[i].0[v] == gens[j].0[v]);
                if !shares {
                    continue;
                }
                let l = gens[i].lcm(&gens[j]);
                let witnessed = gens.iter().enumerate().any(|(k, g)| {
                    k != i && k != j && g.0.iter().zip(&l.0).all(|(&a, &b)| if b == 0 { a == 0 } else { a < b })
                });
                if !witnessed {
                    return false;
                }
            }
        }
        true
    }

    /// Random ideal with exactly `n_gens` minimal generators, deterministic
    /// in `seed`.
    pub fn random(params: &RandomIdealParams, seed: u64) -> Result<Self, IdealError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(params, &mut rng)
    }

    pub fn random_with<R: Rng>(params: &RandomIdealParams, rng: &mut R) -> Result<Self, IdealError> {
        const RETRIES: usize = 10_000;
        let top = if params.squarefree { 1 } else { params.max_exp.max(1) };
        for _ in 0..RETRIES {
            let gens: Vec<Monomial> = (0..params.n_gens)
                .map(|_| Monomial((0..params.n_vars).map(|_| rng.gen_range(0..=top)).collect()))
                .collect();
            if gens.iter().any(Monomial::is_one) {
                continue;
            }
            let minimal = minimalize(&gens)?;
            if minimal.len() == params.n_gens {
                return Self::with_default_names(minimal);
            }
        }
        Err(IdealError::RetriesExhausted(RETRIES))
    }

    /// `count` random ideals drawn from one ChaCha stream seeded by `seed`.
    pub fn random_corpus(params: &RandomIdealParams, count: usize, seed: u64) -> Result<Vec<Self>, IdealError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| Self::random_with(params, &mut rng)).collect()
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators.iter().map(|g| self.format_monomial(g)).collect();
        write!(f, "({})", gens.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RandomIdealParams {
    pub n_vars: usize,
    pub n_gens: usize,
    pub max_exp: u32,
    pub squarefree: bool,
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_monomial(text: &str, vars: &[String], line: usize) -> Result<Monomial, IdealError> {
    let syntax = |message: String| IdealError::SyntaxError { line, message };
    if text.is_empty() {
        return Err(syntax("empty monomial".into()));
    }
    let mut exps = vec![0u32; vars.len()];
    for factor in text.split('*') {
        let factor = factor.trim();
        let (name, exp) = match factor.split_once('^') {
            Some((name, exp)) => {
                let e: u32 = exp
                    .trim()
                    .parse()
                    .map_err(|_| syntax(format!("bad exponent in `{factor}`")))?;
                if e == 0 {
                    return Err(syntax(format!("exponent must be positive in `{factor}`")));
                }
                (name.trim(), e)
            }
            None => (factor, 1),
        };
        if name == "1" && exp == 1 {
            continue;
        }
        if !is_valid_name(name) {
            return Err(syntax(format!("bad factor `{factor}`")));
        }
        let j = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| IdealError::UnknownVariable(name.to_string()))?;
        exps[j] += exp;
    }
    Ok(Monomial(exps))
}

/// Lcm-lattice of an ideal: nodes are all lcms of nonempty generator subsets
/// plus the bottom, which carries the unit monomial.
///
/// Node ids are sorted by (total degree, exponent vector), so id 0 is the
/// bottom and ids form a linear extension of divisibility. Node `i + 1` is
/// the `i`-th generator when generators share the same degree ordering; use
/// [`LcmLattice::atom_of_generator`] rather than relying on it.
#[derive(Debug, Clone)]
pub struct LcmLattice {
    lattice: FiniteLattice,
    degrees: Vec<Monomial>,
    index: HashMap<Monomial, NodeId>,
    generator_nodes: Vec<NodeId>,
}

/// Default cap on lcm-lattice size.
pub const DEFAULT_LATTICE_CAP: usize = 1 << 16;

impl LcmLattice {
    pub fn new(ideal: &MonomialIdeal) -> Result<Self, IdealError> {
        Self::with_cap(ideal, DEFAULT_LATTICE_CAP)
    }

    /// Closes the generator set under pairwise lcm by breadth-first joins
    /// with the generators.
    pub fn with_cap(ideal: &MonomialIdeal, cap: usize) -> Result<Self, IdealError> {
        let gens = ideal.generators();
        let mut seen: HashMap<Monomial, ()> = HashMap::new();
        let mut queue: VecDeque<Monomial> = VecDeque::new();
        for g in gens {
            if seen.insert(g.clone(), ()).is_none() {
                queue.push_back(g.clone());
            }
        }
        while let Some(m) = queue.pop_front() {
            for g in gens {
                let j = m.lcm(g);
                if !seen.contains_key(&j) {
                    if seen.len() + 1 >= cap {
                        return Err(IdealError::TooLarge(cap));
                    }
                    seen.insert(j.clone(), ());
                    queue.push_back(j);
                }
            }
        }
        let mut degrees: Vec<Monomial> = seen.into_keys().collect();
        degrees.push(Monomial::one(ideal.nvars()));
        degrees.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        let poset = FinitePoset::from_leq(degrees.len(), |i, j| degrees[i].divides(&degrees[j]))?
            .with_labels(degrees.iter().map(|m| m.0.clone()).collect());
        let lattice = FiniteLattice::from_poset(poset)?;
        let index: HashMap<Monomial, NodeId> =
            degrees.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let generator_nodes = gens.iter().map(|g| index[g]).collect();
        Ok(Self { lattice, degrees, index, generator_nodes })
    }

    pub fn lattice(&self) -> &FiniteLattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, node: NodeId) -> &Monomial {
        &self.degrees[node]
    }

    pub fn degrees(&self) -> &[Monomial] {
        &self.degrees
    }

    pub fn node_of(&self, m: &Monomial) -> Option<NodeId> {
        self.index.get(m).copied()
    }

    /// Node of the `i`-th (lexicographically sorted) generator.
    pub fn atom_of_generator(&self, i: usize) -> NodeId {
        self.generator_nodes[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn triangle() -> MonomialIdeal {
        MonomialIdeal::parse("vars x y z\ngen x*y\ngen y*z\ngen z*x").unwrap()
    }

    #[test]
    fn parse_basic() {
        let i = MonomialIdeal::parse("vars x y\ngen x*y").unwrap();
        assert_eq!(i.nvars(), 2);
        assert_eq!(i.generators(), &[Monomial(vec![1, 1])]);
        let i = MonomialIdeal::parse("# comment\nvars x\ngen x\ngen x^2\n").unwrap();
        assert_eq!(i.generators(), &[Monomial(vec![1])]);
        let i = MonomialIdeal::parse("vars x y\ngen x*x*y^2").unwrap();
        assert_eq!(i.generators(), &[Monomial(vec![2, 2])]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            MonomialIdeal::parse("vars x\ngen y"),
            Err(IdealError::UnknownVariable(v)) if v == "y"
        ));
        assert!(matches!(MonomialIdeal::parse("vars x\ngen 1"), Err(IdealError::UnitGenerator(2))));
        assert!(matches!(
            MonomialIdeal::parse("vars x\ngen x^"),
            Err(IdealError::SyntaxError { line: 2, .. })
        ));
        assert!(matches!(
            MonomialIdeal::parse("gen x"),
            Err(IdealError::SyntaxError { line: 1, .. })
        ));
        assert!(matches!(
            MonomialIdeal::parse("vars 2x"),
            Err(IdealError::SyntaxError { line: 1, .. })
        ));
        assert!(matches!(MonomialIdeal::parse("vars x\n"), Err(IdealError::EmptyAfterMinimalization)));
    }

    #[test]
    fn five_variable_ideal_parses() {
        let text = "vars a b c x y\ngen a^2*x^2\ngen b^2*x^2\ngen c^2*x^2\ngen a^2*b^2*c^2\ngen a*b*c*x*y";
        let i = MonomialIdeal::parse(text).unwrap();
        assert_eq!(i.generators().len(), 5);
        assert_eq!(MonomialIdeal::parse(&i.to_text()).unwrap(), i);
    }

    #[test]
    fn minimalize_examples() {
        let m = |v: &[u32]| Monomial(v.to_vec());
        assert_eq!(minimalize(&[m(&[1]), m(&[2])]).unwrap(), vec![m(&[1])]);
        let tri = vec![m(&[1, 1, 0]), m(&[0, 1, 1]), m(&[1, 0, 1])];
        assert_eq!(minimalize(&tri).unwrap(), tri);
        assert_eq!(
            minimalize(&[m(&[2, 1]), m(&[1, 2]), m(&[2, 2])]).unwrap(),
            vec![m(&[2, 1]), m(&[1, 2])]
        );
        assert_eq!(minimalize(&[]).unwrap_err(), IdealError::EmptyAfterMinimalization);
    }

    #[test]
    fn lcm_lattice_sizes() {
        let x = MonomialIdeal::from_exponents(&[&[1]]).unwrap();
        assert_eq!(LcmLattice::new(&x).unwrap().len(), 2);
        let l = LcmLattice::new(&triangle()).unwrap();
        assert_eq!(l.len(), 5);
        assert!(l.lattice().is_atomistic());
        assert_eq!(l.degree(l.lattice().top()), &Monomial(vec![1, 1, 1]));
        assert_eq!(l.degree(l.lattice().bottom()), &Monomial(vec![0, 0, 0]));
        let err = LcmLattice::with_cap(&triangle(), 4).unwrap_err();
        assert_eq!(err, IdealError::TooLarge(4));
    }

    #[test]
    fn colon_examples() {
        let tri = triangle();
        let c = tri.colon_by_variable(2).unwrap();
        assert_eq!(c.to_text(), "vars x y z\ngen y\ngen x\n");
        let x = MonomialIdeal::parse("vars x y\ngen x").unwrap();
        assert_eq!(x.colon_by_variable(1).unwrap(), x);
        let x2y = MonomialIdeal::parse("vars x y\ngen x^2*y").unwrap();
        assert_eq!(x2y.colon_by_variable(1).unwrap().generators(), &[Monomial(vec![2, 0])]);
        assert_eq!(x.colon_by_variable(0).unwrap_err(), IdealError::UnitIdeal);
        assert!(matches!(x.colon_by_variable(5), Err(IdealError::UnknownVariable(_))));
    }

    #[test]
    fn disjoint_sums() {
        let x = MonomialIdeal::parse("vars x\ngen x").unwrap();
        let y = MonomialIdeal::parse("vars y\ngen y").unwrap();
        let s = x.disjoint_sum(&y);
        assert_eq!(s.nvars(), 2);
        assert_eq!(s.generators().len(), 2);
        let xx = x.disjoint_sum(&x);
        assert_eq!(xx.variables(), &["x".to_string(), "x_2".to_string()]);
        let ab = MonomialIdeal::parse("vars a b\ngen a*b").unwrap();
        let t = triangle().disjoint_sum(&ab);
        assert_eq!((t.nvars(), t.generators().len()), (5, 4));
    }

    #[test]
    fn genericity() {
        let g = MonomialIdeal::parse("vars x y\ngen x^2\ngen x*y\ngen y^2").unwrap();
        assert!(g.is_generic());
        let ng = MonomialIdeal::parse("vars x y z\ngen x*y\ngen y*z").unwrap();
        assert!(!ng.is_generic());
        let x = MonomialIdeal::parse("vars x\ngen x").unwrap();
        assert!(x.is_generic());
    }

    #[test]
    fn random_is_seeded() {
        let p = RandomIdealParams { n_vars: 4, n_gens: 4, max_exp: 3, squarefree: true };
        let a = MonomialIdeal::random(&p, 11).unwrap();
        let b = MonomialIdeal::random(&p, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.is_squarefree());
        assert_eq!(a.generators().len(), 4);
        let p1 = RandomIdealParams { n_vars: 3, n_gens: 1, max_exp: 2, squarefree: false };
        assert_eq!(MonomialIdeal::random(&p1, 5).unwrap().generators().len(), 1);
        let impossible = RandomIdealParams { n_vars: 1, n_gens: 3, max_exp: 1, squarefree: true };
        assert!(matches!(MonomialIdeal::random(&impossible, 0), Err(IdealError::RetriesExhausted(_))));
    }
}

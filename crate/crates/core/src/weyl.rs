//! Weyl group elements, enumeration, and subgroups.
//!
//! An element carries two integer matrices: its action on simple-root
//! coordinates and its action on fundamental-weight coordinates. Equality,
//! hashing, and ordering of the group structure go through the root matrix;
//! the reduced word is the lexicographically smallest one.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::root_system::RootSystem;

/// Default cap for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

#[derive(Clone)]
pub struct WeylElement {
    rank: usize,
    root_matrix: Vec<i32>,
    weight_matrix: Vec<i32>,
    word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.root_matrix == other.root_matrix
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.root_matrix.hash(state);
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortlex on reduced words.
impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.root_matrix.cmp(&other.root_matrix))
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement({self})")
    }
}

/// Renders the reduced word as `"s1 s2 s1"`; the identity is `"e"`.
impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.word.iter().map(|i| format!("s{}", i + 1)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn identity_matrix(n: usize) -> Vec<i32> {
    let mut m = vec![0; n * n];
    for i in 0..n {
        m[i * n + i] = 1;
    }
    m
}

fn matmul(n: usize, a: &[i32], b: &[i32]) -> Vec<i32> {
    let mut out = vec![0; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

fn simple_root_matrix(rs: &RootSystem, i: usize) -> Vec<i32> {
    let n = rs.rank();
    let a = rs.cartan_matrix();
    let mut m = identity_matrix(n);
    for j in 0..n {
        m[i * n + j] -= a[i][j] as i32;
    }
    m
}

fn simple_weight_matrix(rs: &RootSystem, i: usize) -> Vec<i32> {
    let n = rs.rank();
    let a = rs.cartan_matrix();
    let mut m = identity_matrix(n);
    for k in 0..n {
        m[k * n + i] -= a[k][i] as i32;
    }
    m
}

/// Column `j` of the root matrix is `w(alpha_j)`; a column with a negative
/// entry is a negative root.
fn column_negative(n: usize, m: &[i32], j: usize) -> bool {
    (0..n).any(|i| m[i * n + j] < 0)
}

/// Lexicographically smallest reduced word of the element with root matrix `m`.
fn canonical_word(rs: &RootSystem, m: &[i32]) -> Vec<usize> {
    let n = rs.rank();
    let id = identity_matrix(n);
    let simple: Vec<Vec<i32>> = (0..n).map(|i| simple_root_matrix(rs, i)).collect();
    // any reduced word via right descents gives the inverse
    let mut cur = m.to_vec();
    let mut inv = id.clone();
    while cur != id {
        let i = (0..n).find(|&i| column_negative(n, &cur, i)).expect("non-identity element has a descent");
        cur = matmul(n, &cur, &simple[i]);
        inv = matmul(n, &inv, &simple[i]);
    }
    // greedy smallest left descent
    let mut word = Vec::new();
    while inv != id {
        let i = (0..n).find(|&i| column_negative(n, &inv, i)).unwrap();
        word.push(i);
        inv = matmul(n, &inv, &simple[i]);
    }
    word
}

impl WeylElement {
    pub fn identity(rs: &RootSystem) -> Self {
        let n = rs.rank();
        WeylElement { rank: n, root_matrix: identity_matrix(n), weight_matrix: identity_matrix(n), word: vec![] }
    }

    fn from_matrices(rs: &RootSystem, root_matrix: Vec<i32>, weight_matrix: Vec<i32>) -> Self {
        let word = canonical_word(rs, &root_matrix);
        WeylElement { rank: rs.rank(), root_matrix, weight_matrix, word }
    }

    /// Product of simple reflections along a 0-based word (not necessarily reduced).
    pub fn from_word(rs: &RootSystem, word: &[usize]) -> Result<Self> {
        let n = rs.rank();
        let mut r = identity_matrix(n);
        let mut w = identity_matrix(n);
        for &i in word {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i + 1, rank: n });
            }
            r = matmul(n, &r, &simple_root_matrix(rs, i));
            w = matmul(n, &w, &simple_weight_matrix(rs, i));
        }
        Ok(Self::from_matrices(rs, r, w))
    }

    /// Parses `"s1 s2 s1"` (or `"e"`).
    pub fn parse_word(rs: &RootSystem, s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Ok(Self::identity(rs));
        }
        let word = s
            .split_whitespace()
            .map(|tok| {
                tok.strip_prefix('s')
                    .and_then(|d| d.parse::<usize>().ok())
                    .filter(|&i| i >= 1)
                    .map(|i| i - 1)
                    .ok_or_else(|| Error::Parse(format!("bad reflection token {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_word(rs, &word)
    }

    /// Reflection in an arbitrary root (by index).
    pub fn reflection(rs: &RootSystem, k: usize) -> Self {
        let n = rs.rank();
        let a = rs.cartan_matrix();
        let b = rs.root(k);
        let c = rs.coroot(k);
        let bw = rs.root_in_weight_coords(k);
        let ca: Vec<i64> = (0..n).map(|j| (0..n).map(|i| c[i] * a[i][j]).sum()).collect();
        let mut r = identity_matrix(n);
        let mut w = identity_matrix(n);
        for i in 0..n {
            for j in 0..n {
                r[i * n + j] -= (b[i] * ca[j]) as i32;
                w[i * n + j] -= (bw[i] * c[j]) as i32;
            }
        }
        Self::from_matrices(rs, r, w)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Reduced word, 0-based simple-root indices.
    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// Row-major action on simple-root coordinates (columns are images of simple roots).
    pub fn root_matrix(&self) -> &[i32] {
        &self.root_matrix
    }

    /// Row-major action on fundamental-weight coordinates.
    pub fn weight_matrix(&self) -> &[i32] {
        &self.weight_matrix
    }

    pub fn mul(&self, rs: &RootSystem, other: &WeylElement) -> WeylElement {
        let n = self.rank;
        Self::from_matrices(
            rs,
            matmul(n, &self.root_matrix, &other.root_matrix),
            matmul(n, &self.weight_matrix, &other.weight_matrix),
        )
    }

    /// Product without recomputing a canonical word (the word is the
    /// concatenation, which may not be reduced). For inner loops only.
    fn mul_raw(&self, other: &WeylElement) -> WeylElement {
        let n = self.rank;
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        WeylElement {
            rank: n,
            root_matrix: matmul(n, &self.root_matrix, &other.root_matrix),
            weight_matrix: matmul(n, &self.weight_matrix, &other.weight_matrix),
            word,
        }
    }

    pub fn inverse(&self, rs: &RootSystem) -> WeylElement {
        let rev: Vec<usize> = self.word.iter().rev().copied().collect();
        WeylElement::from_word(rs, &rev).expect("word indices are in range")
    }

    /// Image of a root (by index) as a root index.
    pub fn act_on_root(&self, rs: &RootSystem, k: usize) -> usize {
        let img = self.apply_root_coords(rs.root(k));
        rs.index_of(&img).expect("Weyl elements permute the roots")
    }

    pub fn apply_root_coords(&self, v: &[i64]) -> Vec<i64> {
        let n = self.rank;
        (0..n)
            .map(|i| (0..n).map(|j| self.root_matrix[i * n + j] as i64 * v[j]).sum())
            .collect()
    }

    pub fn apply_weight_coords<T>(&self, v: &[T]) -> Vec<T>
    where
        T: Clone + std::iter::Sum<T> + std::ops::Mul<i64, Output = T>,
    {
        let n = self.rank;
        (0..n)
            .map(|i| (0..n).map(|j| v[j].clone() * self.weight_matrix[i * n + j] as i64).sum())
            .collect()
    }

    /// Number of positive roots sent to negative roots.
    pub fn inversion_count(&self, rs: &RootSystem) -> usize {
        (0..rs.n_positive()).filter(|&k| !rs.is_positive(self.act_on_root(rs, k))).count()
    }
}

/// The simple reflection `s_i` for a 1-based index `i`.
pub fn simple_reflection(rs: &RootSystem, i: usize) -> Result<WeylElement> {
    if i == 0 || i > rs.rank() {
        return Err(Error::IndexOutOfRange { index: i, rank: rs.rank() });
    }
    let i = i - 1;
    Ok(WeylElement {
        rank: rs.rank(),
        root_matrix: simple_root_matrix(rs, i),
        weight_matrix: simple_weight_matrix(rs, i),
        word: vec![i],
    })
}

/// True iff `w` maps every listed root (by index) to a positive root.
pub fn positivity_check(rs: &RootSystem, w: &WeylElement, roots: &[usize]) -> bool {
    roots.iter().all(|&k| w.apply_root_coords(rs.root(k)).iter().all(|&x| x >= 0))
}

/// All elements of `W`, breadth-first by length with lexicographic
/// tie-breaking, each with its lexicographically smallest reduced word.
pub fn enumerate_weyl(rs: &RootSystem, cap: u128) -> Result<Vec<WeylElement>> {
    let order = rs.weyl_order();
    if order > cap {
        return Err(Error::CapExceeded { order, cap });
    }
    let n = rs.rank();
    let gens: Vec<WeylElement> = (1..=n).map(|i| simple_reflection(rs, i).unwrap()).collect();
    let mut seen: HashSet<Vec<i32>> = HashSet::with_capacity(order as usize);
    let mut out = vec![WeylElement::identity(rs)];
    seen.insert(out[0].root_matrix.clone());
    let mut layer_start = 0;
    while layer_start < out.len() {
        let layer_end = out.len();
        for idx in layer_start..layer_end {
            for g in &gens {
                let next = out[idx].mul_raw(g);
                if seen.insert(next.root_matrix.clone()) {
                    out.push(next);
                }
            }
        }
        layer_start = layer_end;
    }
    if out.len() as u128 != order {
        return Err(Error::Internal(format!(
            "enumerated {} elements, expected {order}",
            out.len()
        )));
    }
    Ok(out)
}

/// A subgroup of `W` given by generators, with the order and (when small
/// enough to materialize) the sorted element list.
#[derive(Clone, Debug)]
pub struct WeylSubgroup {
    pub generators: Vec<WeylElement>,
    pub elements: Option<Vec<WeylElement>>,
    pub order: u128,
}

impl WeylSubgroup {
    pub fn trivial(rs: &RootSystem) -> Self {
        WeylSubgroup { generators: vec![], elements: Some(vec![WeylElement::identity(rs)]), order: 1 }
    }

    /// Materialized subgroup from a full element list (sorted shortlex).
    /// Generators are a greedy minimal-ish generating set.
    pub fn from_elements(rs: &RootSystem, mut elements: Vec<WeylElement>) -> Self {
        elements.sort();
        elements.dedup();
        let generators = greedy_generators(rs, &elements);
        let order = elements.len() as u128;
        WeylSubgroup { generators, elements: Some(elements), order }
    }

    /// Subgroup generated by `gens`, materialized by closure.
    pub fn closure(rs: &RootSystem, gens: &[WeylElement]) -> Self {
        let elements = closure_elements(rs, gens);
        let order = elements.len() as u128;
        let mut generators: Vec<WeylElement> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        generators.sort();
        generators.dedup();
        WeylSubgroup { generators, elements: Some(elements), order }
    }

    pub fn contains(&self, w: &WeylElement) -> Option<bool> {
        self.elements.as_ref().map(|els| els.binary_search(w).is_ok() || els.contains(w))
    }

    pub fn element_set(&self) -> Option<HashSet<WeylElement>> {
        self.elements.as_ref().map(|e| e.iter().cloned().collect())
    }

    /// Generator words, for serialization.
    pub fn generator_words(&self) -> Vec<String> {
        self.generators.iter().map(ToString::to_string).collect()
    }
}

/// Sorted element list of the subgroup generated by `gens`.
pub fn closure_elements(rs: &RootSystem, gens: &[WeylElement]) -> Vec<WeylElement> {
    let mut seen: HashMap<Vec<i32>, WeylElement> = HashMap::new();
    let id = WeylElement::identity(rs);
    seen.insert(id.root_matrix.clone(), id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul_raw(g);
            if !seen.contains_key(&y.root_matrix) {
                seen.insert(y.root_matrix.clone(), y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<WeylElement> = seen
        .into_values()
        .map(|w| WeylElement::from_matrices(rs, w.root_matrix, w.weight_matrix))
        .collect();
    out.sort();
    out
}

fn greedy_generators(rs: &RootSystem, elements: &[WeylElement]) -> Vec<WeylElement> {
    let mut gens: Vec<WeylElement> = Vec::new();
    let mut span: HashSet<WeylElement> = [WeylElement::identity(rs)].into_iter().collect();
    for e in elements {
        if !span.contains(e) {
            gens.push(e.clone());
            span = closure_elements(rs, &gens).into_iter().collect();
        }
        if span.len() == elements.len() {
            break;
        }
    }
    gens
}

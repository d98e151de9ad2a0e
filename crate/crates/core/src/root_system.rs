//! Reduced root systems of finite type.
//!
//! Simple roots follow Bourbaki numbering. Roots and coroots are stored as
//! integer coordinate vectors in the basis of simple roots, respectively simple
//! coroots, and the Cartan matrix is `A[i][j] = <alpha_i^vee, alpha_j>`.
//!
//! Root order is canonical: positive roots sorted by height and then by
//! descending coordinate vector (so `alpha_1, ..., alpha_r` come first),
//! followed by the negatives in the same order.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::abelian::FiniteAbelianGroup;
use crate::error::{Error, Result};
use crate::linalg::{smith_diagonal, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Series {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Series {
    pub fn letter(self) -> char {
        match self {
            Series::A => 'A',
            Series::B => 'B',
            Series::C => 'C',
            Series::D => 'D',
            Series::E => 'E',
            Series::F => 'F',
            Series::G => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Series> {
        Some(match c.to_ascii_uppercase() {
            'A' => Series::A,
            'B' => Series::B,
            'C' => Series::C,
            'D' => Series::D,
            'E' => Series::E,
            'F' => Series::F,
            'G' => Series::G,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    series: Series,
    rank: usize,
}

impl CartanType {
    pub fn new(series: Series, rank: usize) -> Result<Self> {
        let reject = |reason| Err(Error::InadmissibleType { series: series.letter(), rank, reason });
        match series {
            _ if rank == 0 => return reject("rank must be positive"),
            Series::B | Series::C if rank < 2 => return reject("B and C require rank >= 2"),
            Series::D if rank < 3 => return reject("D requires rank >= 3"),
            Series::E if !(6..=8).contains(&rank) => return reject("E requires rank 6, 7 or 8"),
            Series::F if rank != 4 => return reject("F requires rank 4"),
            Series::G if rank != 2 => return reject("G requires rank 2"),
            _ => {}
        }
        Ok(CartanType { series, rank })
    }

    pub fn series(&self) -> Series {
        self.series
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Closed-form root count.
    pub fn root_count(&self) -> usize {
        let n = self.rank;
        match self.series {
            Series::A => n * (n + 1),
            Series::B | Series::C => 2 * n * n,
            Series::D => 2 * n * (n - 1),
            Series::E => [72, 126, 240][n - 6],
            Series::F => 48,
            Series::G => 12,
        }
    }

    /// Order of the Weyl group from the product formula.
    pub fn weyl_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.series {
            Series::A => fact(n + 1),
            Series::B | Series::C => (1u128 << n) * fact(n),
            Series::D => (1u128 << (n - 1)) * fact(n),
            Series::E => [51_840, 2_903_040, 696_729_600][self.rank - 6],
            Series::F => 1152,
            Series::G => 12,
        }
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize| {
            a[i][j] = -1;
            a[j][i] = -1;
        };
        match self.series {
            Series::A | Series::B | Series::C => (0..n - 1).for_each(|i| link(i, i + 1)),
            Series::D => {
                (0..n - 2).for_each(|i| link(i, i + 1));
                link(n - 3, n - 1);
            }
            Series::E => {
                link(0, 2);
                link(1, 3);
                (2..n - 1).for_each(|i| link(i, i + 1));
            }
            Series::F => (0..3).for_each(|i| link(i, i + 1)),
            Series::G => link(0, 1),
        }
        match self.series {
            Series::B => a[n - 1][n - 2] = -2,
            Series::C => a[n - 2][n - 1] = -2,
            Series::F => a[2][1] = -2,
            Series::G => a[0][1] = -3,
            _ => {}
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.series.letter(), self.rank)
    }
}

impl FromStr for CartanType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let series = chars
            .next()
            .and_then(Series::from_letter)
            .ok_or_else(|| Error::Parse(format!("unknown Cartan type {s:?}")))?;
        let rank = chars
            .as_str()
            .parse()
            .map_err(|_| Error::Parse(format!("unknown Cartan type {s:?}")))?;
        CartanType::new(series, rank)
    }
}

/// A reduced root system, possibly reducible (a formal product of irreducible
/// components with block-diagonal Cartan matrix) or empty (rank 0).
#[derive(Clone, Debug)]
pub struct RootSystem {
    components: Vec<CartanType>,
    /// For each simple root, the index of its component.
    component_of: Vec<usize>,
    cartan: Vec<Vec<i64>>,
    roots: Vec<Vec<i64>>,
    coroots: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
    /// Squared lengths, scaled to integers within each component.
    norms: Vec<i64>,
    orbit: Vec<usize>,
    /// Per component, the index of the highest short root.
    highest_short: Vec<usize>,
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components
    }
}

impl Eq for RootSystem {}

/// Builds the irreducible root system of the given type.
pub fn build_root_system(t: CartanType) -> RootSystem {
    RootSystem::product(&[t])
}

impl RootSystem {
    /// The empty root system of rank 0 (trivial Weyl group).
    pub fn empty() -> Self {
        Self::product(&[])
    }

    pub fn product(components: &[CartanType]) -> Self {
        let rank: usize = components.iter().map(CartanType::rank).sum();
        let mut cartan = vec![vec![0i64; rank]; rank];
        let mut component_of = Vec::with_capacity(rank);
        let mut offset = 0;
        for (c, t) in components.iter().enumerate() {
            let a = t.cartan_matrix();
            for i in 0..t.rank() {
                for j in 0..t.rank() {
                    cartan[offset + i][offset + j] = a[i][j];
                }
                component_of.push(c);
            }
            offset += t.rank();
        }

        // reflection closure, carrying coroots along
        let unit = |i: usize| {
            let mut v = vec![0i64; rank];
            v[i] = 1;
            v
        };
        let mut seen: HashMap<Vec<i64>, Vec<i64>> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..rank {
            seen.insert(unit(i), unit(i));
            queue.push_back((unit(i), unit(i)));
        }
        while let Some((root, coroot)) = queue.pop_front() {
            for i in 0..rank {
                let (r, c) = reflect_pair(&cartan, i, &root, &coroot);
                if !seen.contains_key(&r) {
                    seen.insert(r.clone(), c.clone());
                    queue.push_back((r, c));
                }
            }
        }
        let mut positive: Vec<(Vec<i64>, Vec<i64>)> =
            seen.into_iter().filter(|(r, _)| r.iter().all(|&x| x >= 0)).collect();
        positive.sort_by(|(a, _), (b, _)| {
            let (ha, hb): (i64, i64) = (a.iter().sum(), b.iter().sum());
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let mut roots: Vec<Vec<i64>> = positive.iter().map(|(r, _)| r.clone()).collect();
        let mut coroots: Vec<Vec<i64>> = positive.iter().map(|(_, c)| c.clone()).collect();
        let neg = |v: &Vec<i64>| v.iter().map(|x| -x).collect::<Vec<_>>();
        roots.extend(positive.iter().map(|(r, _)| neg(r)));
        coroots.extend(positive.iter().map(|(_, c)| neg(c)));
        let index = roots.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect();

        let sym = symmetrizer(&cartan, &component_of, components.len());
        let norms: Vec<i64> = roots
            .iter()
            .map(|r| {
                let mut s = 0;
                for i in 0..rank {
                    for j in 0..rank {
                        s += r[i] * r[j] * sym[i] * cartan[i][j];
                    }
                }
                s
            })
            .collect();

        let mut rs = RootSystem {
            components: components.to_vec(),
            component_of,
            cartan,
            roots,
            coroots,
            index,
            norms,
            orbit: Vec::new(),
            highest_short: Vec::new(),
        };
        rs.orbit = rs.compute_orbits();
        rs.highest_short = (0..components.len())
            .map(|c| {
                let comp_pos: Vec<usize> =
                    (0..rs.n_positive()).filter(|&k| rs.component_of_root(k) == c).collect();
                let short = comp_pos.iter().map(|&k| rs.norms[k]).min().unwrap();
                *comp_pos
                    .iter()
                    .filter(|&&k| rs.norms[k] == short)
                    .max_by_key(|&&k| (rs.height(k), std::cmp::Reverse(k)))
                    .unwrap()
            })
            .collect();
        rs
    }

    fn compute_orbits(&self) -> Vec<usize> {
        let mut orbit = vec![usize::MAX; self.roots.len()];
        for s in 0..self.rank() {
            if orbit[s] != usize::MAX {
                continue;
            }
            let mut queue = VecDeque::from([s]);
            orbit[s] = s;
            while let Some(k) = queue.pop_front() {
                for i in 0..self.rank() {
                    let m = self.reflect_index(i, k);
                    if orbit[m] == usize::MAX {
                        orbit[m] = s;
                        queue.push_back(m);
                    }
                }
            }
        }
        orbit
    }

    pub fn components(&self) -> &[CartanType] {
        &self.components
    }

    pub fn rank(&self) -> usize {
        self.cartan.len()
    }

    pub fn is_irreducible(&self) -> bool {
        self.components.len() == 1
    }

    /// `A[i][j] = <alpha_i^vee, alpha_j>`.
    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn root(&self, k: usize) -> &[i64] {
        &self.roots[k]
    }

    /// Coroot of root `k` in simple-coroot coordinates.
    pub fn coroot(&self, k: usize) -> &[i64] {
        &self.coroots[k]
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn n_positive(&self) -> usize {
        self.roots.len() / 2
    }

    pub fn is_positive(&self, k: usize) -> bool {
        k < self.n_positive()
    }

    pub fn negative(&self, k: usize) -> usize {
        let n = self.n_positive();
        if k < n {
            k + n
        } else {
            k - n
        }
    }

    pub fn index_of(&self, coords: &[i64]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    pub fn height(&self, k: usize) -> i64 {
        self.roots[k].iter().sum()
    }

    pub fn norm(&self, k: usize) -> i64 {
        self.norms[k]
    }

    pub fn component_of_simple(&self, i: usize) -> usize {
        self.component_of[i]
    }

    pub fn component_of_root(&self, k: usize) -> usize {
        let i = self.roots[k].iter().position(|&x| x != 0).expect("zero root");
        self.component_of[i]
    }

    /// Orbit label of root `k`: the 0-based index of the first simple root
    /// in its Weyl orbit.
    pub fn orbit_of(&self, k: usize) -> usize {
        self.orbit[k]
    }

    /// Distinct orbit labels, ascending.
    pub fn orbit_labels(&self) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.rank()).map(|i| self.orbit[i]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn highest_short_root(&self, component: usize) -> usize {
        self.highest_short[component]
    }

    /// `<beta^vee, alpha>` for root indices `beta`, `alpha`.
    pub fn pairing(&self, beta: usize, alpha: usize) -> i64 {
        let c = &self.coroots[beta];
        let r = &self.roots[alpha];
        let mut s = 0;
        for i in 0..self.rank() {
            if c[i] == 0 {
                continue;
            }
            for j in 0..self.rank() {
                s += c[i] * self.cartan[i][j] * r[j];
            }
        }
        s
    }

    /// Index of `s_i(alpha_k)`.
    pub fn reflect_index(&self, i: usize, k: usize) -> usize {
        let (r, _) = reflect_pair(&self.cartan, i, &self.roots[k], &self.coroots[k]);
        self.index[&r]
    }

    /// Weyl group order (product over components).
    pub fn weyl_order(&self) -> u128 {
        self.components.iter().map(CartanType::weyl_order).product()
    }

    /// `P/Q`, the cokernel of the Cartan matrix.
    pub fn fundamental_group(&self) -> FiniteAbelianGroup {
        fundamental_group(self)
    }

    /// Coordinates (in the simple-root basis) of a root expressed in
    /// fundamental-weight coordinates: column `k` of the Cartan matrix times
    /// the root vector.
    pub fn root_in_weight_coords(&self, k: usize) -> Vec<i64> {
        let r = &self.roots[k];
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.cartan[i][j] * r[j]).sum())
            .collect()
    }

    /// Coefficients of the highest coroot of each component in simple coroots;
    /// index `i` belongs to the component of simple root `i`.
    pub fn highest_coroot_coefficients(&self) -> Vec<i64> {
        let mut out = vec![0; self.rank()];
        for c in 0..self.components.len() {
            let k = self.highest_short[c];
            for (i, &x) in self.coroots[k].iter().enumerate() {
                if self.component_of[i] == c {
                    out[i] = x;
                }
            }
        }
        out
    }

    /// Coset representatives of `P/Q` in fundamental-weight coordinates: sums
    /// of zero or one minuscule fundamental weight per component.
    pub fn fundamental_group_representatives(&self) -> Vec<Vec<i64>> {
        let m = self.highest_coroot_coefficients();
        let mut reps = vec![vec![0i64; self.rank()]];
        for c in 0..self.components.len() {
            let minuscule: Vec<usize> =
                (0..self.rank()).filter(|&i| self.component_of[i] == c && m[i] == 1).collect();
            let mut next = Vec::new();
            for base in &reps {
                next.push(base.clone());
                for &i in &minuscule {
                    let mut v = base.clone();
                    v[i] += 1;
                    next.push(v);
                }
            }
            reps = next;
        }
        reps
    }
}

pub fn fundamental_group(rs: &RootSystem) -> FiniteAbelianGroup {
    if rs.rank() == 0 {
        return FiniteAbelianGroup::trivial();
    }
    FiniteAbelianGroup::from_smith_diagonal(&smith_diagonal(rs.cartan_matrix()))
        .expect("Cartan matrices are nonsingular")
}

fn reflect_pair(a: &[Vec<i64>], i: usize, root: &[i64], coroot: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let r = a.len();
    // <alpha_i^vee, beta> and <beta^vee, alpha_i>
    let p: i64 = (0..r).map(|j| a[i][j] * root[j]).sum();
    let q: i64 = (0..r).map(|j| coroot[j] * a[j][i]).sum();
    let mut nr = root.to_vec();
    nr[i] -= p;
    let mut nc = coroot.to_vec();
    nc[i] -= q;
    (nr, nc)
}

/// Integer `d_i` proportional to `(alpha_i, alpha_i)/2` with `d_i A_ij = d_j A_ji`.
fn symmetrizer(a: &[Vec<i64>], component_of: &[usize], ncomp: usize) -> Vec<i64> {
    let r = a.len();
    let mut d: Vec<Option<Rat>> = vec![None; r];
    for c in 0..ncomp {
        let Some(start) = (0..r).find(|&i| component_of[i] == c) else { continue };
        d[start] = Some(Rat::one());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            for j in 0..r {
                if a[i][j] != 0 && i != j && d[j].is_none() {
                    let di = d[i].clone().unwrap();
                    d[j] = Some(di * Rat::new(a[i][j].into(), a[j][i].into()));
                    queue.push_back(j);
                }
            }
        }
    }
    let d: Vec<Rat> = d.into_iter().map(|x| x.unwrap_or_else(Rat::zero)).collect();
    let l = d.iter().fold(num_bigint::BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    d.iter()
        .map(|x| {
            let v = x * Rat::from_integer(l.clone());
            num_traits::ToPrimitive::to_i64(v.numer()).unwrap()
        })
        .collect()
}

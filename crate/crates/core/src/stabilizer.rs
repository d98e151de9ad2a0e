//! Stabilizers `W(chi) = { w : w x - x in X^* }` of character points.
//!
//! Two strategies: an exhaustive scan of `W` (small groups only), and the
//! alcove method, which never enumerates `W`. For the alcove method, let
//! `y` be the semisimple part of the point and `L` the semisimple part of
//! the character lattice. The stabilizer of `y` in the affine Weyl group
//! `W x| Q` is generated by the reflections in the roots `alpha` with
//! `<alpha^vee, y>` integral; `W(chi)` is its extension by the classes
//! `l in L / Q` for which `y + l` lies in the affine orbit of `y`, which is
//! decided by reducing both points to the fundamental alcove.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Signed};

use crate::character::WUCharacter;
use crate::error::{Error, Result};
use crate::linalg::{rat, Rat};
use crate::root_datum::RootDatum;
use crate::root_system::RootSystem;
use crate::weyl::{enumerate_weyl, WeylElement, WeylSubgroup};

/// Subgroups up to this order are materialized by the fast path.
pub const MATERIALIZE_CAP: u128 = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Brute,
    Alcove,
}

/// Result of the alcove method.
#[derive(Clone, Debug)]
pub struct AlcoveStabilizer {
    /// Roots (indices, both signs) with integral pairing against the point.
    pub integral_roots: Vec<usize>,
    /// Simple system of `integral_roots` (positive root indices).
    pub integral_simple: Vec<usize>,
    pub integral_order: u128,
    /// One element of `W(chi)` per attained class of `L / Q`, identity first.
    pub class_elements: Vec<WeylElement>,
    pub order: u128,
}

/// `W(chi)` as a subgroup, by the chosen strategy.
pub fn stabilizer_mod_lattice(datum: &RootDatum, chi: &WUCharacter, strategy: Strategy) -> Result<WeylSubgroup> {
    let rs = datum.root_system();
    match strategy {
        Strategy::Brute => {
            let table = BruteTable::new(datum, crate::weyl::DEFAULT_ENUMERATION_CAP)?;
            Ok(WeylSubgroup::from_elements(rs, table.stabilizer(chi)?))
        }
        Strategy::Alcove => {
            let st = alcove_stabilizer(datum, chi);
            let mut gens: Vec<WeylElement> =
                st.integral_simple.iter().map(|&k| WeylElement::reflection(rs, k)).collect();
            gens.extend(st.class_elements.iter().filter(|w| !w.is_identity()).cloned());
            if st.order <= MATERIALIZE_CAP {
                let sub = WeylSubgroup::closure(rs, &gens);
                if sub.order != st.order {
                    return Err(Error::Internal(format!(
                        "alcove stabilizer order {} but closure has {}",
                        st.order, sub.order
                    )));
                }
                Ok(sub)
            } else {
                gens.sort();
                Ok(WeylSubgroup { generators: gens, elements: None, order: st.order })
            }
        }
    }
}

pub fn alcove_stabilizer(datum: &RootDatum, chi: &WUCharacter) -> AlcoveStabilizer {
    let rs = datum.root_system();
    let y = datum.semisimple_part(chi.point());
    let integral_roots: Vec<usize> = (0..rs.num_roots())
        .filter(|&k| pair_weight(rs.coroot(k), &y).is_integer())
        .collect();
    let integral_simple = simple_system(rs, &integral_roots);
    let integral_order = reflection_subgroup_order(rs, &integral_roots);

    let (base, v1) = reduce_to_alcove(rs, &y);
    let mut class_elements = vec![WeylElement::identity(rs)];
    for l in datum.semisimple_classes().iter().skip(1) {
        let shifted: Vec<Rat> = y.iter().zip(l).map(|(a, &b)| a + rat(b)).collect();
        let (other, v2) = reduce_to_alcove(rs, &shifted);
        if other == base {
            // v2^{-1} v1 maps y into y + l modulo Q
            class_elements.push(v2.inverse(rs).mul(rs, &v1));
        }
    }
    let order = integral_order * class_elements.len() as u128;
    AlcoveStabilizer { integral_roots, integral_simple, integral_order, class_elements, order }
}

fn pair_weight(coroot: &[i64], y: &[Rat]) -> Rat {
    coroot.iter().zip(y).filter(|(c, _)| **c != 0).map(|(&c, x)| x * rat(c)).sum()
}

/// Moves `y` into the closed fundamental alcove of `W x| Q` acting on weight
/// coordinates. Returns the alcove point and the linear part of the affine
/// Weyl element used.
pub fn reduce_to_alcove(rs: &RootSystem, y: &[Rat]) -> (Vec<Rat>, WeylElement) {
    let r = rs.rank();
    let a = rs.cartan_matrix();
    let mut y = y.to_vec();
    let thetas: Vec<(usize, Vec<i64>, Vec<usize>)> = (0..rs.components().len())
        .map(|c| {
            let t = rs.highest_short_root(c);
            (t, rs.root_in_weight_coords(t), WeylElement::reflection(rs, t).word().to_vec())
        })
        .collect();
    // applied[j] is applied after applied[j-1]; the total linear part is
    // the product in reverse order
    let mut applied: Vec<usize> = Vec::new();
    loop {
        if let Some(i) = (0..r).find(|&i| y[i].is_negative()) {
            let yi = y[i].clone();
            for (k, yk) in y.iter_mut().enumerate() {
                if a[k][i] != 0 {
                    *yk -= &yi * rat(a[k][i]);
                }
            }
            applied.push(i);
            continue;
        }
        let mut moved = false;
        for (t, tw, word) in &thetas {
            let p = pair_weight(rs.coroot(*t), &y);
            if p > Rat::one() {
                let shift = p - Rat::one();
                for (yk, &c) in y.iter_mut().zip(tw) {
                    if c != 0 {
                        *yk -= &shift * rat(c);
                    }
                }
                applied.extend(word.iter().rev());
                moved = true;
                break;
            }
        }
        if !moved {
            break;
        }
    }
    applied.reverse();
    let v = WeylElement::from_word(rs, &applied).expect("indices in range");
    (y, v)
}

/// Simple system of a reflection-closed set of roots: the positive members
/// `beta` whose reflection sends no other positive member to a negative root.
pub fn simple_system(rs: &RootSystem, roots: &[usize]) -> Vec<usize> {
    let pos: Vec<usize> = roots.iter().copied().filter(|&k| rs.is_positive(k)).collect();
    let mut out: Vec<usize> = pos
        .iter()
        .copied()
        .filter(|&b| {
            pos.iter().all(|&g| {
                g == b || {
                    let c = rs.pairing(b, g);
                    let img: Vec<i64> = rs.root(g).iter().zip(rs.root(b)).map(|(x, y)| x - c * y).collect();
                    img.iter().all(|&x| x >= 0)
                }
            })
        })
        .collect();
    out.sort_unstable();
    out
}

/// Order of the subgroup generated by the reflections in a reflection-closed
/// set of roots, from the types of its irreducible components.
pub fn reflection_subgroup_order(rs: &RootSystem, roots: &[usize]) -> u128 {
    let simple = simple_system(rs, roots);
    if simple.is_empty() {
        return 1;
    }
    let members: HashSet<usize> = roots.iter().copied().collect();
    // connected components of the simple system
    let mut comp = vec![usize::MAX; simple.len()];
    let mut ncomp = 0;
    for s in 0..simple.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = ncomp;
        let mut queue = VecDeque::from([s]);
        while let Some(i) = queue.pop_front() {
            for j in 0..simple.len() {
                if comp[j] == usize::MAX && rs.pairing(simple[i], simple[j]) != 0 {
                    comp[j] = ncomp;
                    queue.push_back(j);
                }
            }
        }
        ncomp += 1;
    }
    let mut order = 1u128;
    for c in 0..ncomp {
        let gens: Vec<usize> = (0..simple.len()).filter(|&i| comp[i] == c).map(|i| simple[i]).collect();
        // roots of the component: orbit of its simple roots under its reflections
        let mut seen: HashSet<usize> = gens.iter().copied().collect();
        let mut queue: VecDeque<usize> = gens.iter().copied().collect();
        while let Some(g) = queue.pop_front() {
            for &b in &gens {
                let c = rs.pairing(b, g);
                let img: Vec<i64> = rs.root(g).iter().zip(rs.root(b)).map(|(x, y)| x - c * y).collect();
                let k = rs.index_of(&img).expect("reflection of a root is a root");
                debug_assert!(members.contains(&k));
                if seen.insert(k) {
                    queue.push_back(k);
                }
            }
        }
        let rank = gens.len();
        let npos = seen.len() / 2;
        let norms: HashSet<i64> = seen.iter().map(|&k| rs.norm(k)).collect();
        order *= irreducible_weyl_order(rank, npos, norms.len() == 1);
    }
    order
}

fn irreducible_weyl_order(rank: usize, npos: usize, simply_laced: bool) -> u128 {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    let k = rank;
    match (k, npos, simply_laced) {
        (6, 36, true) => 51_840,
        (7, 63, _) => 2_903_040,
        (8, 120, _) => 696_729_600,
        (4, 24, false) => 1_152,
        (2, 6, false) => 12,
        _ if npos == k * (k + 1) / 2 && simply_laced => fact(k + 1),
        _ if npos == k * k && !simply_laced => (1u128 << k) * fact(k),
        _ if npos == k * (k - 1) && simply_laced => (1u128 << (k - 1)) * fact(k),
        _ => panic!("unrecognized irreducible component: rank {k}, {npos} positive roots"),
    }
}

/// Precomputed integer actions of all of `W` on basis coordinates, for
/// exhaustive scans.
pub struct BruteTable {
    pub elements: Vec<WeylElement>,
    pub actions: Vec<Vec<i64>>,
    dim: usize,
}

impl BruteTable {
    pub fn new(datum: &RootDatum, cap: u128) -> Result<Self> {
        let elements = enumerate_weyl(datum.root_system(), cap)?;
        let actions = elements.iter().map(|w| datum.basis_action_from_weight_matrix(w.weight_matrix())).collect();
        Ok(BruteTable { elements, actions, dim: datum.dim() })
    }

    /// All `w` with `w x = x` modulo the character lattice, in enumeration order.
    pub fn stabilizer(&self, chi: &WUCharacter) -> Result<Vec<WeylElement>> {
        let n = self.dim;
        let (k, d) = integer_point(chi)?;
        Ok(self
            .elements
            .iter()
            .zip(&self.actions)
            .filter(|(_, m)| (0..n).all(|i| ((0..n).map(|j| m[i * n + j] * k[j]).sum::<i64>() - k[i]) % d == 0))
            .map(|(w, _)| w.clone())
            .collect())
    }
}

/// `p = k / d` with integer `k`.
pub fn integer_point(chi: &WUCharacter) -> Result<(Vec<i64>, i64)> {
    let d = crate::linalg::common_denominator(chi.point())?;
    let k = chi
        .point()
        .iter()
        .map(|x| {
            let v = x * rat(d);
            num_traits::ToPrimitive::to_i64(v.numer()).ok_or_else(|| Error::Overflow("point".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((k, d))
}

/// Cache of brute tables keyed by datum (shared across a sweep).
#[derive(Default)]
pub struct BruteCache {
    tables: HashMap<String, std::sync::Arc<BruteTable>>,
}

impl BruteCache {
    pub fn get(&mut self, datum: &RootDatum, cap: u128) -> Result<std::sync::Arc<BruteTable>> {
        let key = format!("{}|{:?}", datum.to_doc(), datum.basis());
        if let Some(t) = self.tables.get(&key) {
            return Ok(t.clone());
        }
        let t = std::sync::Arc::new(BruteTable::new(datum, cap)?);
        self.tables.insert(key, t.clone());
        Ok(t)
    }
}

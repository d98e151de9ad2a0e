//! `Delta'(chi)`, `W°(chi)` and the R-group, plus the restriction sequence.

use std::collections::{BTreeMap, HashSet};

use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::character::{restrict, Sublattice, WUCharacter};
use crate::error::{Error, Result};
use crate::linalg::{frac, rat, Rat};
use crate::root_datum::RootDatum;
use crate::root_system::{CartanType, RootSystem, Series};
use crate::stabilizer::{alcove_stabilizer, reflection_subgroup_order, simple_system, MATERIALIZE_CAP};

/// `compute_rgroup` materializes `W(chi)` and `W°` up to this order.
pub const RESULT_MATERIALIZE_CAP: u128 = 2_000;
use crate::weyl::{closure_elements, positivity_check, WeylElement, WeylSubgroup};

/// Per Weyl orbit of roots, whether `q_{alpha/2} = 1`. Orbits are keyed by
/// the 0-based index of the first simple root in the orbit; missing keys
/// default to `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QParameters {
    flags: BTreeMap<usize, bool>,
}

impl QParameters {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every orbit set to `q_half_is_one = false`.
    pub fn all_false(rs: &RootSystem) -> Self {
        QParameters { flags: rs.orbit_labels().into_iter().map(|o| (o, false)).collect() }
    }

    pub fn set(&mut self, rs: &RootSystem, orbit: usize, q_half_is_one: bool) -> Result<()> {
        if !rs.orbit_labels().contains(&orbit) {
            return Err(Error::Parse(format!(
                "simple root {} does not label a root orbit (labels: {:?})",
                orbit + 1,
                rs.orbit_labels().iter().map(|o| o + 1).collect::<Vec<_>>()
            )));
        }
        self.flags.insert(orbit, q_half_is_one);
        Ok(())
    }

    pub fn q_half_is_one(&self, rs: &RootSystem, root: usize) -> bool {
        self.flags.get(&rs.orbit_of(root)).copied().unwrap_or(true)
    }

    pub fn is_default(&self) -> bool {
        self.flags.values().all(|&b| b)
    }

    /// `{"orbits": {"1": true, "2": false}}` with 1-based simple-root labels.
    pub fn from_json(rs: &RootSystem, v: &Value) -> Result<Self> {
        let mut q = QParameters::new();
        if v.is_null() {
            return Ok(q);
        }
        let orbits = v
            .get("orbits")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("q parameters need an \"orbits\" object".into()))?;
        for (key, flag) in orbits {
            let i: usize = key
                .parse()
                .ok()
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Parse(format!("bad orbit label {key:?}")))?;
            let flag = flag.as_bool().ok_or_else(|| Error::Parse(format!("orbit {key}: expected a boolean")))?;
            q.set(rs, i - 1, flag)?;
        }
        Ok(q)
    }

    pub fn to_json(&self) -> Value {
        let orbits: serde_json::Map<String, Value> =
            self.flags.iter().map(|(&o, &b)| ((o + 1).to_string(), Value::Bool(b))).collect();
        json!({ "orbits": orbits })
    }

    /// Flags by orbit label (0-based).
    pub fn flags(&self) -> &BTreeMap<usize, bool> {
        &self.flags
    }
}

#[derive(Clone, Debug)]
pub struct RGroupResult {
    pub w_chi: WeylSubgroup,
    /// Root indices, ascending.
    pub delta_prime: Vec<usize>,
    pub w_circ: WeylSubgroup,
    pub r_group: WeylSubgroup,
    pub structure: FiniteAbelianGroup,
}

impl RGroupResult {
    pub fn to_json(&self, rs: &RootSystem) -> Value {
        let r_elements: Vec<String> = self
            .r_group
            .elements
            .as_ref()
            .map(|els| els.iter().map(ToString::to_string).collect())
            .unwrap_or_default();
        json!({
            "W_chi_order": self.w_chi.order as u64,
            "delta_prime": self.delta_prime.iter().map(|&k| rs.root(k).to_vec()).collect::<Vec<_>>(),
            "W_circ_order": self.w_circ.order as u64,
            "R_structure": self.structure.invariant_factors(),
            "commuting_algebra_dim": self.r_group.order as u64,
            "R_elements": r_elements,
        })
    }

    pub fn r_elements(&self) -> &[WeylElement] {
        self.r_group.elements.as_deref().expect("R-groups are always materialized")
    }
}

/// Is `s_alpha` in `W(chi)`? Equivalent to `<alpha^vee, x> alpha` lying in
/// the character lattice.
fn reflection_stabilizes(datum: &RootDatum, k: usize, pairing: &Rat) -> bool {
    datum.root_in_basis(k).iter().all(|&c| (pairing * rat(c)).is_integer())
}

/// `{ alpha : s_alpha in W(chi) and chi(t_alpha) = 1 }`, where the last
/// condition is `<alpha^vee, x>` integral when `q_{alpha/2} = 1` and
/// `2 <alpha^vee, x>` integral otherwise.
pub fn delta_prime(datum: &RootDatum, chi: &WUCharacter, q: &QParameters) -> Vec<usize> {
    let rs = datum.root_system();
    (0..rs.num_roots())
        .filter(|&k| {
            let t = datum.coroot_pairing(k, chi.point());
            let ok = if q.q_half_is_one(rs, k) { t.is_integer() } else { (&t * rat(2)).is_integer() };
            ok && reflection_stabilizes(datum, k, &t)
        })
        .collect()
}

/// Subgroup generated by the reflections in `dp` (a reflection-closed set).
pub fn w_circ(rs: &RootSystem, dp: &[usize]) -> WeylSubgroup {
    w_circ_capped(rs, dp, MATERIALIZE_CAP)
}

fn w_circ_capped(rs: &RootSystem, dp: &[usize], cap: u128) -> WeylSubgroup {
    let gens: Vec<WeylElement> = simple_system(rs, dp).iter().map(|&k| WeylElement::reflection(rs, k)).collect();
    let order = reflection_subgroup_order(rs, dp);
    let elements = (order <= cap).then(|| closure_elements(rs, &gens));
    WeylSubgroup { generators: gens, elements, order }
}

/// The unique element of `w W°` sending every positive root of `dp` to a
/// positive root. `dp_simple` is the simple system of `dp`.
pub fn normalize(rs: &RootSystem, w: &WeylElement, dp_simple: &[usize]) -> WeylElement {
    let mut w = w.clone();
    while let Some(&b) = dp_simple.iter().find(|&&b| !rs.is_positive(w.act_on_root(rs, b))) {
        w = w.mul(rs, &WeylElement::reflection(rs, b));
    }
    w
}

/// Structure of a finite abelian subgroup of `W` given by its elements.
pub fn abelian_structure(rs: &RootSystem, elements: &[WeylElement]) -> Result<FiniteAbelianGroup> {
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            if a.mul(rs, b) != b.mul(rs, a) {
                return Err(Error::NonAbelian(format!("{a} and {b} do not commute")));
            }
        }
    }
    let orders: Vec<u64> = elements
        .iter()
        .map(|g| {
            let mut x = g.clone();
            let mut k = 1;
            while !x.is_identity() {
                x = x.mul(rs, g);
                k += 1;
            }
            k
        })
        .collect();
    FiniteAbelianGroup::from_element_orders(&orders)
}

pub fn compute_rgroup(datum: &RootDatum, chi: &WUCharacter, q: &QParameters) -> Result<RGroupResult> {
    let rs = datum.root_system();
    let st = alcove_stabilizer(datum, chi);
    let dp = delta_prime(datum, chi, q);
    let dp_simple = simple_system(rs, &dp);
    let wc = w_circ_capped(rs, &dp, RESULT_MATERIALIZE_CAP);

    let mut r: Vec<WeylElement> = st.class_elements.iter().map(|w| normalize(rs, w, &dp_simple)).collect();
    r.sort();
    r.dedup();
    if wc.order * r.len() as u128 != st.order {
        return Err(Error::Internal(format!(
            "|W(chi)| = {} but |W°| = {} and |R| = {}",
            st.order,
            wc.order,
            r.len()
        )));
    }
    // closure: R must be a subgroup
    let rset: HashSet<&WeylElement> = r.iter().collect();
    for a in &r {
        for b in &r {
            if !rset.contains(&a.mul(rs, b)) {
                return Err(Error::Internal(format!("R not closed: {a} * {b}")));
            }
        }
    }
    let structure = abelian_structure(rs, &r)?;

    let mut gens: Vec<WeylElement> = st.integral_simple.iter().map(|&k| WeylElement::reflection(rs, k)).collect();
    gens.extend(st.class_elements.iter().filter(|w| !w.is_identity()).cloned());
    gens.sort();
    let w_chi_elements = (st.order <= RESULT_MATERIALIZE_CAP).then(|| closure_elements(rs, &gens));
    let w_chi = WeylSubgroup { generators: gens, elements: w_chi_elements, order: st.order };

    Ok(RGroupResult { w_chi, delta_prime: dp, w_circ: wc, r_group: WeylSubgroup::from_elements(rs, r), structure })
}

/// Structural checks: `|W(chi)| = |W°| |R|`, `R ∩ W° = 1`, and positivity of
/// `R` on `Delta'`. Uses materialized subgroups when available.
pub fn semidirect_checks(rs: &RootSystem, res: &RGroupResult) -> Vec<(&'static str, bool)> {
    let r = res.r_elements();
    let order_ok = res.w_chi.order == res.w_circ.order * r.len() as u128;
    let positive: Vec<usize> = res.delta_prime.iter().copied().filter(|&k| rs.is_positive(k)).collect();
    let positivity = r.iter().all(|w| positivity_check(rs, w, &positive));
    let trivial_meet = match &res.w_circ.elements {
        Some(els) => {
            let set: HashSet<&WeylElement> = els.iter().collect();
            r.iter().filter(|w| set.contains(w)).count() == 1
        }
        None => {
            let simple = simple_system(rs, &res.delta_prime);
            r.iter().filter(|w| normalize(rs, w, &simple).is_identity()).count() == 1
        }
    };
    let contained = match &res.w_chi.elements {
        Some(els) => {
            let set: HashSet<&WeylElement> = els.iter().collect();
            r.iter().all(|w| set.contains(w))
        }
        None => true,
    };
    vec![
        ("order", order_ok),
        ("trivial_intersection", trivial_meet),
        ("positivity", positivity),
        ("contained", contained),
    ]
}

/// Groups allowed as R-groups (or transfer quotients) for an irreducible type.
pub fn allowed_structures(t: CartanType) -> Vec<FiniteAbelianGroup> {
    let one = FiniteAbelianGroup::trivial();
    let c = FiniteAbelianGroup::cyclic;
    match t.series() {
        Series::A => (1..=t.rank() as u64 + 1).filter(|d| (t.rank() as u64 + 1) % d == 0).map(c).collect(),
        Series::B | Series::C => vec![one, c(2)],
        Series::D => vec![one, c(2), FiniteAbelianGroup::new(vec![2, 2]).unwrap(), c(4)],
        Series::E => match t.rank() {
            6 => vec![one, c(3)],
            7 => vec![one, c(2)],
            _ => vec![one],
        },
        Series::F | Series::G => vec![one],
    }
}

pub fn keys_check(t: CartanType, result: &RGroupResult) -> bool {
    allowed_structures(t).contains(&result.structure)
}

/// Characters of `Lambda / Lambda_flat` reached by `W(chi_flat)`.
#[derive(Clone, Debug)]
pub struct HatWGroup {
    /// Classes `eta` as basis coordinates of the character lattice, reduced mod 1.
    pub elements: Vec<Vec<Rat>>,
    /// A witness `w` in `W(chi_flat)` for each class, same order.
    pub witnesses: Vec<WeylElement>,
    /// `w -> eta_w` is a homomorphism with kernel `W(chi)`.
    pub homomorphism: bool,
    pub kernel_is_stabilizer: bool,
}

impl HatWGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn structure(&self) -> Result<FiniteAbelianGroup> {
        let orders: Vec<u64> = self
            .elements
            .iter()
            .map(|e| crate::linalg::common_denominator(e).map(|d| d as u64))
            .collect::<Result<_>>()?;
        FiniteAbelianGroup::from_element_orders(&orders)
    }
}

/// `eta_w`: class of `w x - x` in basis coordinates, reduced mod 1.
pub fn eta(datum: &RootDatum, chi: &WUCharacter, w: &WeylElement) -> Vec<Rat> {
    let y = datum.semisimple_part(chi.point());
    let m = w.weight_matrix();
    let r = y.len();
    let mut diff: Vec<Rat> = (0..r)
        .map(|i| (0..r).map(|j| &y[j] * rat(m[i * r + j] as i64)).sum::<Rat>() - &y[i])
        .collect();
    diff.resize(datum.dim(), Rat::from_integer(0.into()));
    datum.from_ambient(&diff).iter().map(frac).collect()
}

fn eta_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    a.iter().zip(b).map(|(x, y)| frac(&(x + y))).collect()
}

pub fn hat_w(datum: &RootDatum, sub: &Sublattice, chi: &WUCharacter) -> Result<HatWGroup> {
    let (flat, chi_flat) = restrict(datum, chi, sub)?;
    let rs = datum.root_system();
    let stab = crate::stabilizer::stabilizer_mod_lattice(&flat, &chi_flat, crate::stabilizer::Strategy::Alcove)?;
    let els = stab
        .elements
        .ok_or_else(|| Error::Blowup(format!("W(chi_flat) of order {} is too large", stab.order)))?;
    let etas: Vec<Vec<Rat>> = els.iter().map(|w| eta(datum, chi, w)).collect();
    let mut elements: Vec<Vec<Rat>> = Vec::new();
    let mut witnesses = Vec::new();
    for (w, e) in els.iter().zip(&etas) {
        if !elements.contains(e) {
            elements.push(e.clone());
            witnesses.push(w.clone());
        }
    }
    let index: std::collections::HashMap<&WeylElement, usize> = els.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut homomorphism = true;
    for (i, a) in els.iter().enumerate() {
        for (j, b) in els.iter().enumerate() {
            let ab = a.mul(rs, b);
            let Some(&k) = index.get(&ab) else {
                homomorphism = false;
                continue;
            };
            if etas[k] != eta_add(&etas[i], &etas[j]) {
                homomorphism = false;
            }
        }
    }
    let zero = vec![Rat::from_integer(0.into()); datum.dim()];
    let kernel: HashSet<&WeylElement> = els.iter().zip(&etas).filter(|(_, e)| **e == zero).map(|(w, _)| w).collect();
    let stab_chi = crate::stabilizer::stabilizer_mod_lattice(datum, chi, crate::stabilizer::Strategy::Alcove)?;
    let kernel_is_stabilizer = match stab_chi.elements {
        Some(s) => s.len() == kernel.len() && s.iter().all(|w| kernel.contains(w)),
        None => false,
    };
    let mut order: Vec<usize> = (0..elements.len()).collect();
    order.sort_by(|&a, &b| elements[a].cmp(&elements[b]));
    Ok(HatWGroup {
        elements: order.iter().map(|&i| elements[i].clone()).collect(),
        witnesses: order.iter().map(|&i| witnesses[i].clone()).collect(),
        homomorphism,
        kernel_is_stabilizer,
    })
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub chi: WUCharacter,
    pub chi_flat: WUCharacter,
    pub r: RGroupResult,
    pub r_flat: RGroupResult,
    pub hat_w: HatWGroup,
    pub checks: Vec<(String, bool)>,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self, rs: &RootSystem) -> Value {
        json!({
            "chi": self.chi.to_string(),
            "chi_flat": self.chi_flat.to_string(),
            "R": self.r.structure.invariant_factors(),
            "R_flat": self.r_flat.structure.invariant_factors(),
            "hat_W_order": self.hat_w.order(),
            "hat_W_witnesses": self.hat_w.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|(k, v)| json!({"check": k, "pass": v})).collect::<Vec<_>>(),
            "result": self.r.to_json(rs),
            "result_flat": self.r_flat.to_json(rs),
        })
    }
}

/// Checks `1 -> R_chi -> R_chi_flat -> hat W(chi) -> 1`.
pub fn verify_restriction_sequence(
    datum: &RootDatum,
    sub: &Sublattice,
    chi: &WUCharacter,
    q: &QParameters,
) -> Result<RestrictionReport> {
    let (flat, chi_flat) = restrict(datum, chi, sub)?;
    let r = compute_rgroup(datum, chi, q)?;
    let r_flat = compute_rgroup(&flat, &chi_flat, q)?;
    let hw = hat_w(datum, sub, chi)?;

    let same_delta = r.delta_prime == r_flat.delta_prime;
    let flat_set: HashSet<&WeylElement> = r_flat.r_elements().iter().collect();
    let inclusion = r.r_elements().iter().all(|w| flat_set.contains(w));
    let orders = r_flat.r_group.order == r.r_group.order * hw.order() as u128;
    // eta restricted to R_flat: onto hat W with kernel R
    let images: Vec<Vec<Rat>> = r_flat.r_elements().iter().map(|w| eta(datum, chi, w)).collect();
    let image_set: HashSet<&Vec<Rat>> = images.iter().collect();
    let onto = hw.elements.iter().all(|e| image_set.contains(e)) && image_set.len() == hw.order();
    let zero = vec![Rat::from_integer(0.into()); datum.dim()];
    let r_set: HashSet<&WeylElement> = r.r_elements().iter().collect();
    let kernel_ok = r_flat
        .r_elements()
        .iter()
        .zip(&images)
        .all(|(w, e)| (*e == zero) == r_set.contains(w));

    let checks = vec![
        ("delta_prime_equal".to_string(), same_delta),
        ("R_chi_in_R_flat".to_string(), inclusion),
        ("order_product".to_string(), orders),
        ("quotient_map_onto_hat_W".to_string(), onto),
        ("quotient_kernel_is_R_chi".to_string(), kernel_ok),
        ("eta_homomorphism".to_string(), hw.homomorphism && hw.kernel_is_stabilizer),
    ];
    Ok(RestrictionReport { chi: chi.clone(), chi_flat, r, r_flat, hat_w: hw, checks })
}

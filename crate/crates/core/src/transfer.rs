//! Transfer of characters from an inner form to its quasi-split form.
//!
//! A transfer datum is combinatorial: a source root datum (the relative
//! system of the inner form, possibly of rank 0 with Kottwitz torsion), a
//! target root datum, an integer map `E` on character points
//! (`p* = E p`), images of the torsion generators as rational target
//! points, a matching of source roots with target roots, and the images of
//! the source simple reflections in the target Weyl group.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::character::{make_character, orbit_representative, weyl_act, WUCharacter};
use crate::error::{Error, Result};
use crate::linalg::{fmt_rat, rat, Rat};
use crate::rgroup::{allowed_structures, compute_rgroup, normalize, QParameters, RGroupResult};
use crate::root_datum::{json_rat, RootDatum};
use crate::stabilizer::simple_system;
use crate::weyl::WeylElement;

#[derive(Clone, Debug)]
pub struct TransferDatum {
    pub name: String,
    pub source: RootDatum,
    pub target: RootDatum,
    /// `target.dim() x source.dim()`.
    pub embedding: Vec<Vec<i64>>,
    /// One target point per torsion generator of the source.
    pub torsion_images: Vec<Vec<Rat>>,
    /// `root_map[a]` is the target root matched with source root `a`.
    pub root_map: Vec<usize>,
    /// Images of the source simple reflections.
    pub weyl_map: Vec<WeylElement>,
    pub q_source: QParameters,
    pub q_target: QParameters,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TransferDoc {
    #[serde(default)]
    name: Option<String>,
    source: Value,
    target: Value,
    embedding: Vec<Vec<i64>>,
    #[serde(default)]
    root_map: Vec<[usize; 2]>,
    #[serde(default)]
    weyl_map: Option<Vec<String>>,
    #[serde(default)]
    torsion_images: Vec<Vec<Value>>,
    #[serde(default)]
    q_source: Value,
    #[serde(default)]
    q_target: Value,
}

fn datum_from_value(v: &Value) -> Result<RootDatum> {
    match v {
        Value::String(s) if s == "anisotropic" => Ok(RootDatum::anisotropic(FiniteAbelianGroup::trivial())),
        other => RootDatum::from_doc(other),
    }
}

/// Parses and validates a transfer datum document. Any failed invariant
/// rejects the whole document.
pub fn load_transfer_datum(doc: &Value) -> Result<TransferDatum> {
    let d: TransferDoc = serde_json::from_value(doc.clone())
        .map_err(|e| Error::Parse(format!("transfer datum document: {e}")))?;
    let source = datum_from_value(&d.source)?;
    let target = datum_from_value(&d.target)?;
    let (n, m) = (source.dim(), target.dim());
    if d.embedding.len() != m || d.embedding.iter().any(|row| row.len() != n) {
        return Err(Error::Transfer(format!("embedding must be a {m} x {n} integer matrix")));
    }
    let torsion_images = d
        .torsion_images
        .iter()
        .map(|row| row.iter().map(json_rat).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let rs = source.root_system();
    let rt = target.root_system();
    let weyl_map = match &d.weyl_map {
        Some(words) => {
            if words.len() != rs.rank() {
                return Err(Error::Transfer(format!("weyl_map needs {} entries", rs.rank())));
            }
            words.iter().map(|w| WeylElement::parse_word(rt, w)).collect::<Result<Vec<_>>>()?
        }
        None => {
            let mut out = Vec::new();
            for i in 0..rs.rank() {
                let t = d
                    .root_map
                    .iter()
                    .find(|p| p[0] == i)
                    .ok_or_else(|| Error::Transfer(format!("root_map misses simple root {}", i + 1)))?[1];
                if t >= rt.num_roots() {
                    return Err(Error::Transfer(format!("target root index {t} out of range")));
                }
                out.push(WeylElement::reflection(rt, t));
            }
            out
        }
    };
    let q_source = QParameters::from_json(rs, &d.q_source)?;
    let q_target = QParameters::from_json(rt, &d.q_target)?;
    let pairs: Vec<(usize, usize)> = d.root_map.iter().map(|p| (p[0], p[1])).collect();
    let root_map = extend_root_map(&source, &target, &pairs, &weyl_map)?;
    let td = TransferDatum {
        name: d.name.unwrap_or_else(|| "custom".into()),
        source,
        target,
        embedding: d.embedding,
        torsion_images,
        root_map,
        weyl_map,
        q_source,
        q_target,
    };
    validate(&td)?;
    Ok(td)
}

/// Extends the given root pairs to all source roots by equivariance.
fn extend_root_map(
    source: &RootDatum,
    target: &RootDatum,
    pairs: &[(usize, usize)],
    weyl_map: &[WeylElement],
) -> Result<Vec<usize>> {
    let rs = source.root_system();
    let rt = target.root_system();
    let mut map: Vec<Option<usize>> = vec![None; rs.num_roots()];
    let mut queue = VecDeque::new();
    for &(a, b) in pairs {
        if a >= rs.num_roots() || b >= rt.num_roots() {
            return Err(Error::Transfer(format!("root_map pair ({a}, {b}) out of range")));
        }
        if map[a].is_some_and(|x| x != b) {
            return Err(Error::Transfer(format!("source root {a} matched twice")));
        }
        map[a] = Some(b);
        queue.push_back(a);
    }
    while let Some(a) = queue.pop_front() {
        let b = map[a].unwrap();
        let mut images = vec![(rs.negative(a), rt.negative(b))];
        for (i, w) in weyl_map.iter().enumerate() {
            images.push((rs.reflect_index(i, a), w.act_on_root(rt, b)));
        }
        for (a2, b2) in images {
            match map[a2] {
                Some(x) if x != b2 => {
                    return Err(Error::Transfer(format!(
                        "root map is not Weyl-equivariant: source root {:?} would map to both {:?} and {:?}",
                        rs.root(a2),
                        rt.root(x),
                        rt.root(b2)
                    )))
                }
                Some(_) => {}
                None => {
                    map[a2] = Some(b2);
                    queue.push_back(a2);
                }
            }
        }
    }
    map.into_iter()
        .enumerate()
        .map(|(a, b)| b.ok_or_else(|| Error::Transfer(format!("source root {:?} is not matched", rs.root(a)))))
        .collect()
}

fn validate(td: &TransferDatum) -> Result<()> {
    let (n, m) = (td.source.dim(), td.target.dim());
    let rs = td.source.root_system();
    let rt = td.target.root_system();
    let e_flat: Vec<i64> = td.embedding.concat();
    // injectivity of E on the free part
    if n > 0 && crate::linalg::QMatrix::from_int_rows(&td.embedding).rank() != n {
        return Err(Error::Transfer("embedding is not injective".into()));
    }
    // coroots: <iota(alpha)^vee, E p> = <alpha^vee, p>
    for a in 0..rs.num_roots() {
        let u = td.source.coroot_functional(a);
        let ut = td.target.coroot_functional(td.root_map[a]);
        let pulled: Vec<i64> = (0..n).map(|j| (0..m).map(|i| ut[i] * e_flat[i * n + j]).sum()).collect();
        if pulled != u {
            return Err(Error::Transfer(format!(
                "coroot of {:?} is not the pullback of the coroot of its image {:?}",
                rs.root(a),
                rt.root(td.root_map[a])
            )));
        }
    }
    // q matching
    for a in 0..rs.num_roots() {
        if td.q_source.q_half_is_one(rs, a) != td.q_target.q_half_is_one(rt, td.root_map[a]) {
            return Err(Error::Transfer(format!(
                "q parameters differ on {:?} and its image {:?}",
                rs.root(a),
                rt.root(td.root_map[a])
            )));
        }
    }
    // equivariance: E K_{s_i} = K*_{phi(s_i)} E
    for (i, w) in td.weyl_map.iter().enumerate() {
        let k = td.source.simple_action(i);
        let kt = td.target.basis_action_from_weight_matrix(w.weight_matrix());
        let lhs = rect_mul(&e_flat, m, n, k, n);
        let rhs = rect_mul(&kt, m, m, &e_flat, n);
        if lhs != rhs {
            return Err(Error::Transfer(format!("embedding is not equivariant for s{}", i + 1)));
        }
        if !(w.mul(rt, w)).is_identity() {
            return Err(Error::Transfer(format!("image of s{} is not an involution", i + 1)));
        }
    }
    // torsion images
    let factors = td.source.torsion().invariant_factors();
    if td.torsion_images.len() != factors.len() {
        return Err(Error::Transfer(format!("expected {} torsion images", factors.len())));
    }
    for (u, &d) in td.torsion_images.iter().zip(factors) {
        if u.len() != m {
            return Err(Error::Transfer(format!("torsion image must have length {m}")));
        }
        if u.iter().any(|x| !(x * rat(d as i64)).is_integer()) {
            return Err(Error::Transfer(format!("torsion image {} has order not dividing {d}", fmt_vec(u))));
        }
        for w in &td.weyl_map {
            let kt = td.target.basis_action_from_weight_matrix(w.weight_matrix());
            let moved: Vec<Rat> = (0..m).map(|i| (0..m).map(|j| &u[j] * rat(kt[i * m + j])).sum::<Rat>() - &u[i]).collect();
            if moved.iter().any(|x| !x.is_integer()) {
                return Err(Error::Transfer(format!("torsion image {} is not Weyl-invariant", fmt_vec(u))));
            }
        }
    }
    Ok(())
}

fn fmt_vec(v: &[Rat]) -> String {
    format!("({})", v.iter().map(fmt_rat).collect::<Vec<_>>().join(","))
}

fn rect_mul(a: &[i64], rows: usize, inner: usize, b: &[i64], cols: usize) -> Vec<i64> {
    let mut out = vec![0; rows * cols];
    for i in 0..rows {
        for k in 0..inner {
            for j in 0..cols {
                out[i * cols + j] += a[i * inner + k] * b[k * cols + j];
            }
        }
    }
    out
}

impl TransferDatum {
    /// Image of a source Weyl element in the target Weyl group.
    pub fn map_weyl(&self, w: &WeylElement) -> WeylElement {
        let rt = self.target.root_system();
        let mut out = WeylElement::identity(rt);
        for &i in w.word() {
            out = out.mul(rt, &self.weyl_map[i]);
        }
        out
    }

    pub fn to_doc(&self) -> Value {
        let rs = self.source.root_system();
        let simple_pairs: Vec<[usize; 2]> = (0..rs.rank()).map(|i| [i, self.root_map[i]]).collect();
        let mut doc = json!({
            "name": self.name,
            "source": self.source.to_doc(),
            "target": self.target.to_doc(),
            "embedding": self.embedding,
            "root_map": simple_pairs,
            "weyl_map": self.weyl_map.iter().map(ToString::to_string).collect::<Vec<_>>(),
        });
        if !self.torsion_images.is_empty() {
            doc["torsion_images"] = json!(self
                .torsion_images
                .iter()
                .map(|u| u.iter().map(fmt_rat).collect::<Vec<_>>())
                .collect::<Vec<_>>());
        }
        if !self.q_source.flags().is_empty() {
            doc["q_source"] = self.q_source.to_json();
        }
        if !self.q_target.flags().is_empty() {
            doc["q_target"] = self.q_target.to_json();
        }
        doc
    }
}

/// `chi* = E p + sum_j a_j u_j`, canonicalized on the target.
pub fn transfer_character(td: &TransferDatum, chi: &WUCharacter) -> Result<WUCharacter> {
    let (n, m) = (td.source.dim(), td.target.dim());
    if chi.point().len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: chi.point().len() });
    }
    let mut p: Vec<Rat> =
        (0..m).map(|i| (0..n).map(|j| &chi.point()[j] * rat(td.embedding[i][j])).sum()).collect();
    for (u, &a) in td.torsion_images.iter().zip(chi.torsion_char()) {
        for (pi, ui) in p.iter_mut().zip(u) {
            *pi += ui * rat(a as i64);
        }
    }
    make_character(&td.target, &p, &[])
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub chi: WUCharacter,
    pub chi_star: WUCharacter,
    pub r: RGroupResult,
    pub r_star: RGroupResult,
    pub inclusions: Vec<(String, bool)>,
    pub quotient: Option<FiniteAbelianGroup>,
    pub table_check: bool,
}

impl TransferReport {
    pub fn passed(&self) -> bool {
        self.inclusions.iter().all(|(_, ok)| *ok) && self.table_check
    }

    pub fn to_json(&self, td: &TransferDatum) -> Value {
        json!({
            "datum": td.name,
            "chi": self.chi.to_string(),
            "chi_star": self.chi_star.to_string(),
            "R": self.r.structure.invariant_factors(),
            "R_star": self.r_star.structure.invariant_factors(),
            "inclusions": self.inclusions.iter().map(|(k, v)| json!({"check": k, "pass": v})).collect::<Vec<_>>(),
            "quotient": self.quotient.as_ref().map(|q| json!(q.invariant_factors())),
            "table_check": self.table_check,
            // the quotient is R_chi* / R_chi, the direction of the exact sequence
            "quotient_direction": "R_star/R",
        })
    }
}

/// Is `w` in `W(chi*)`?
fn stabilizes(target: &RootDatum, w: &WeylElement, chi: &WUCharacter) -> bool {
    weyl_act(target, w, chi) == *chi
}

pub fn verify_transfer_sequence(td: &TransferDatum, chi: &WUCharacter) -> Result<TransferReport> {
    let rt = td.target.root_system();
    let chi_star = transfer_character(td, chi)?;
    let r = compute_rgroup(&td.source, chi, &td.q_source)?;
    let r_star = compute_rgroup(&td.target, &chi_star, &td.q_target)?;

    let w_incl = r.w_chi.generators.iter().all(|g| stabilizes(&td.target, &td.map_weyl(g), &chi_star));
    let dp_star: HashSet<usize> = r_star.delta_prime.iter().copied().collect();
    let dp_incl = r.delta_prime.iter().all(|&a| dp_star.contains(&td.root_map[a]));
    let star_simple = simple_system(rt, &r_star.delta_prime);
    let in_circ_star =
        |w: &WeylElement| stabilizes(&td.target, w, &chi_star) && normalize(rt, w, &star_simple).is_identity();
    let circ_incl = r.w_circ.generators.iter().all(|g| in_circ_star(&td.map_weyl(g)));
    // R_chi -> W(chi*) / W°(chi*) = R_chi*
    let images: Vec<WeylElement> = r.r_elements().iter().map(|w| normalize(rt, &td.map_weyl(w), &star_simple)).collect();
    let star_set: HashSet<&WeylElement> = r_star.r_elements().iter().collect();
    let distinct: HashSet<&WeylElement> = images.iter().collect();
    let r_incl = images.iter().all(|w| star_set.contains(w)) && distinct.len() == images.len();

    let inclusions = vec![
        ("W_chi_in_W_chi_star".to_string(), w_incl),
        ("delta_prime_in_delta_prime_star".to_string(), dp_incl),
        ("W_circ_in_W_circ_star".to_string(), circ_incl),
        ("R_chi_embeds_in_R_chi_star".to_string(), r_incl),
    ];
    let quotient = if r_incl { Some(quotient_structure(rt, r_star.r_elements(), &images)?) } else { None };
    let table_check = quotient.as_ref().is_some_and(|q| quotient_table_check(rt, q));
    Ok(TransferReport { chi: chi.clone(), chi_star, r, r_star, inclusions, quotient, table_check })
}

/// `G / H` for a finite abelian group `G` of Weyl elements and a subgroup `H`.
pub fn quotient_structure(
    rs: &crate::root_system::RootSystem,
    group: &[WeylElement],
    sub: &[WeylElement],
) -> Result<FiniteAbelianGroup> {
    let h: HashSet<&WeylElement> = sub.iter().collect();
    let mut covered: HashSet<WeylElement> = HashSet::new();
    let mut orders = Vec::new();
    for g in group {
        if covered.contains(g) {
            continue;
        }
        for s in sub {
            covered.insert(g.mul(rs, s));
        }
        let mut x = g.clone();
        let mut k = 1u64;
        while !h.contains(&x) {
            x = x.mul(rs, g);
            k += 1;
        }
        orders.push(k);
    }
    FiniteAbelianGroup::from_element_orders(&orders)
}

/// Is the quotient among the groups listed for the (absolute) target type?
pub fn quotient_table_check(rt: &crate::root_system::RootSystem, quotient: &FiniteAbelianGroup) -> bool {
    match rt.components() {
        [] => quotient.is_trivial(),
        [t] => allowed_structures(*t).contains(quotient),
        _ => false,
    }
}

/// Pairs of distinct source orbit representatives whose transfers lie in
/// the same target orbit.
pub fn orbit_collisions(
    td: &TransferDatum,
    chars: &[WUCharacter],
    orbit_cap: usize,
) -> Result<Vec<(WUCharacter, WUCharacter, WUCharacter)>> {
    let mut seen: HashMap<WUCharacter, WUCharacter> = HashMap::new();
    let mut out = Vec::new();
    for chi in chars {
        let rep = orbit_representative(&td.target, &transfer_character(td, chi)?, orbit_cap)?;
        if let Some(first) = seen.get(&rep) {
            out.push((first.clone(), chi.clone(), rep));
        } else {
            seen.insert(rep, chi.clone());
        }
    }
    Ok(out)
}

pub mod catalogue {
    //! Built-in transfer data.

    use super::*;
    use crate::root_datum::{build_root_datum, LatticeSpec};
    use crate::root_system::build_root_system;
    use crate::weyl::enumerate_weyl;

    pub const IDENTITY_TYPES: &[&str] =
        &["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "G2", "F4", "E6"];

    pub fn names() -> Vec<String> {
        let mut v: Vec<String> = IDENTITY_TYPES.iter().map(|t| format!("identity-{t}")).collect();
        v.extend(
            ["sl1D-in-sl2", "gl1D-in-gl2", "gl2D-in-gl4", "gl2D3-in-gl6", "anisotropic-in-c2"].map(String::from),
        );
        v
    }

    pub fn doc(name: &str) -> Result<Value> {
        if let Some(t) = name.strip_prefix("identity-") {
            let ct: crate::root_system::CartanType = t.parse()?;
            let d = build_root_datum(build_root_system(ct), LatticeSpec::weight())?;
            let n = d.dim();
            let id: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            return Ok(json!({
                "name": name,
                "source": d.to_doc(),
                "target": d.to_doc(),
                "embedding": id,
                "root_map": (0..n).map(|i| [i, i]).collect::<Vec<_>>(),
            }));
        }
        match name {
            "sl1D-in-sl2" => Ok(json!({
                "name": name,
                "source": {"type": "anisotropic", "torsion": [2]},
                "target": {"type": "A", "rank": 1, "char_lattice": "weight"},
                "embedding": [[]],
                "torsion_images": [["1/2"]],
            })),
            "anisotropic-in-c2" => Ok(json!({
                "name": name,
                "source": {"type": "anisotropic", "torsion": [2]},
                "target": {"type": "C", "rank": 2, "char_lattice": "weight"},
                "embedding": [[], []],
                "torsion_images": [["1/2", "0"]],
            })),
            "gl1D-in-gl2" => gl_division(name, 1, 2),
            "gl2D-in-gl4" => gl_division(name, 2, 2),
            "gl2D3-in-gl6" => gl_division(name, 2, 3),
            _ => Err(Error::Parse(format!("unknown catalogue entry {name:?} (known: {})", names().join(", ")))),
        }
    }

    pub fn load(name: &str) -> Result<TransferDatum> {
        load_transfer_datum(&doc(name)?)
    }

    /// `GL_m(D)` with `D` of degree `deg` inside `GL_{m deg}`: coordinates are
    /// repeated along blocks, roots `e_i - e_j` go to differences of the first
    /// coordinates of blocks, and `s_i` goes to the swap of blocks `i, i+1`.
    fn gl_division(name: &str, m: usize, deg: usize) -> Result<Value> {
        let n = m * deg;
        let target = RootDatum::gl(n)?;
        let rt = target.root_system();
        let embedding: Vec<Vec<i64>> = (0..n).map(|i| (0..m).map(|j| i64::from(i / deg == j)).collect()).collect();
        let mut root_map = Vec::new();
        let mut weyl_map = Vec::new();
        for i in 0..m.saturating_sub(1) {
            // e_{i deg + 1} - e_{(i+1) deg + 1} in simple-root coordinates
            let coords: Vec<i64> = (0..n - 1).map(|k| i64::from(k >= i * deg && k < (i + 1) * deg)).collect();
            let t = rt.index_of(&coords).ok_or_else(|| Error::Internal("block root".into()))?;
            root_map.push([i, t]);
            let perm: Vec<usize> = (0..n)
                .map(|c| match c / deg {
                    b if b == i => c + deg,
                    b if b == i + 1 => c - deg,
                    _ => c,
                })
                .collect();
            weyl_map.push(permutation_element(&target, &perm)?.to_string());
        }
        Ok(json!({
            "name": name,
            "source": {"type": "GL", "rank": m},
            "target": {"type": "GL", "rank": n},
            "embedding": embedding,
            "root_map": root_map,
            "weyl_map": weyl_map,
        }))
    }

    /// The Weyl element of `GL_n` acting on `e_1..e_n` by `e_c -> e_{perm[c]}`.
    fn permutation_element(target: &RootDatum, perm: &[usize]) -> Result<WeylElement> {
        let n = perm.len();
        let mut want = vec![0i64; n * n];
        for (c, &p) in perm.iter().enumerate() {
            want[p * n + c] = 1;
        }
        enumerate_weyl(target.root_system(), 1_000_000)?
            .into_iter()
            .find(|w| target.basis_action_from_weight_matrix(w.weight_matrix()) == want)
            .ok_or_else(|| Error::Internal("permutation not in W".into()))
    }
}

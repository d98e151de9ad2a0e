//! Exhaustive verifiers. Everything here scans all of `W` and uses no
//! alcove geometry or subsystem classification.

use std::collections::HashSet;

use serde_json::{json, Value};

use crate::character::WUCharacter;
use crate::error::{Error, Result};
use crate::linalg::{rat, Rat};
use crate::rgroup::{abelian_structure, QParameters, RGroupResult};
use crate::root_datum::RootDatum;
use crate::stabilizer::{integer_point, BruteTable};
use crate::weyl::{closure_elements, positivity_check, WeylElement, WeylSubgroup, DEFAULT_ENUMERATION_CAP};

/// Default bound on `|W|` for oracle runs.
pub const ORACLE_CAP: u128 = 1_000_000;

#[derive(Clone, Debug)]
pub struct OracleReport {
    pub case_id: String,
    pub fast: Value,
    pub brute: Value,
    pub agree: bool,
    pub mismatches: Vec<String>,
}

impl OracleReport {
    /// One JSON line.
    pub fn to_json_line(&self) -> String {
        let v = json!({
            "case_id": self.case_id,
            "agree": self.agree,
            "mismatches": self.mismatches,
            "fast": self.fast,
            "brute": self.brute,
        });
        serde_json::to_string(&v).expect("serializable")
    }
}

pub fn brute_stabilizer(datum: &RootDatum, chi: &WUCharacter) -> Result<WeylSubgroup> {
    let table = BruteTable::new(datum, DEFAULT_ENUMERATION_CAP)?;
    Ok(WeylSubgroup::from_elements(datum.root_system(), table.stabilizer(chi)?))
}

pub fn brute_rgroup(datum: &RootDatum, chi: &WUCharacter, q: &QParameters) -> Result<RGroupResult> {
    let table = BruteTable::new(datum, ORACLE_CAP)?;
    brute_rgroup_with(&table, datum, chi, q)
}

/// `Delta'(chi)` from the reflections themselves: `alpha` qualifies when
/// `s_alpha x - x` lies in the lattice and equals `-t alpha` with `t`
/// (or `2t` when `q_{alpha/2} != 1`) integral.
fn brute_delta_prime(datum: &RootDatum, chi: &WUCharacter, q: &QParameters) -> Result<Vec<usize>> {
    let rs = datum.root_system();
    let n = datum.dim();
    let (k, d) = integer_point(chi)?;
    let mut out = Vec::new();
    for a in 0..rs.num_roots() {
        let s = WeylElement::reflection(rs, a);
        let m = datum.basis_action_from_weight_matrix(s.weight_matrix());
        let diff: Vec<i64> = (0..n).map(|i| (0..n).map(|j| m[i * n + j] * k[j]).sum::<i64>() - k[i]).collect();
        if diff.iter().any(|x| x % d != 0) {
            continue;
        }
        // the root in basis coordinates, from ambient coordinates
        let mut amb: Vec<Rat> = rs.root_in_weight_coords(a).into_iter().map(rat).collect();
        amb.resize(n, rat(0));
        let rho = datum.from_ambient(&amb);
        let j = rho.iter().position(|x| *x != rat(0)).expect("roots are nonzero");
        let t = -(rat(diff[j]) / rat(d)) / &rho[j];
        let ok = if q.q_half_is_one(rs, a) { t.is_integer() } else { (t * rat(2)).is_integer() };
        if ok {
            out.push(a);
        }
    }
    Ok(out)
}

pub fn brute_rgroup_with(
    table: &BruteTable,
    datum: &RootDatum,
    chi: &WUCharacter,
    q: &QParameters,
) -> Result<RGroupResult> {
    let rs = datum.root_system();
    let stab = table.stabilizer(chi)?;
    let dp = brute_delta_prime(datum, chi, q)?;
    let reflections: Vec<WeylElement> = dp.iter().map(|&a| WeylElement::reflection(rs, a)).collect();
    let circ = closure_elements(rs, &reflections);
    let positive: Vec<usize> = dp.iter().copied().filter(|&a| rs.is_positive(a)).collect();
    let r: Vec<WeylElement> = stab.iter().filter(|w| positivity_check(rs, w, &positive)).cloned().collect();
    let stab_set: HashSet<&WeylElement> = stab.iter().collect();
    if !circ.iter().all(|w| stab_set.contains(w)) {
        return Err(Error::Internal("W° is not contained in W(chi)".into()));
    }
    if stab.len() != circ.len() * r.len() {
        return Err(Error::Internal(format!(
            "brute force: |W(chi)| = {} but |W°| |R| = {} * {}",
            stab.len(),
            circ.len(),
            r.len()
        )));
    }
    let structure = abelian_structure(rs, &r)?;
    Ok(RGroupResult {
        w_chi: materialized(stab, Vec::new()),
        delta_prime: dp,
        w_circ: materialized(circ, reflections),
        r_group: WeylSubgroup::from_elements(rs, r),
        structure,
    })
}

fn materialized(mut elements: Vec<WeylElement>, generators: Vec<WeylElement>) -> WeylSubgroup {
    elements.sort();
    let order = elements.len() as u128;
    WeylSubgroup { generators, elements: Some(elements), order }
}

/// Differences between a fast-path and a brute-force result.
pub fn compare(fast: &RGroupResult, brute: &RGroupResult) -> Vec<String> {
    let mut out = Vec::new();
    if fast.w_chi.order != brute.w_chi.order {
        out.push(format!("|W(chi)|: {} vs {}", fast.w_chi.order, brute.w_chi.order));
    }
    if let (Some(a), Some(b)) = (&fast.w_chi.elements, &brute.w_chi.elements) {
        if a != b {
            out.push("W(chi) element sets differ".into());
        }
    }
    if fast.delta_prime != brute.delta_prime {
        out.push(format!("Delta': {:?} vs {:?}", fast.delta_prime, brute.delta_prime));
    }
    if fast.w_circ.order != brute.w_circ.order {
        out.push(format!("|W°|: {} vs {}", fast.w_circ.order, brute.w_circ.order));
    }
    if fast.r_group.elements != brute.r_group.elements {
        out.push("R element sets differ".into());
    }
    if fast.structure != brute.structure {
        out.push(format!("structure: {} vs {}", fast.structure, brute.structure));
    }
    out
}

pub fn oracle_case(
    case_id: &str,
    table: &BruteTable,
    datum: &RootDatum,
    chi: &WUCharacter,
    q: &QParameters,
) -> Result<OracleReport> {
    let rs = datum.root_system();
    let fast = crate::rgroup::compute_rgroup(datum, chi, q)?;
    let brute = brute_rgroup_with(table, datum, chi, q)?;
    let mismatches = compare(&fast, &brute);
    Ok(OracleReport {
        case_id: case_id.to_string(),
        fast: fast.to_json(rs),
        brute: brute.to_json(rs),
        agree: mismatches.is_empty(),
        mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{enumerate_characters, parse_character, DEFAULT_GRID_CAP};
    use crate::root_datum::{build_root_datum, LatticeSpec};
    use crate::root_system::build_root_system;

    fn datum(t: &str, spec: LatticeSpec) -> RootDatum {
        build_root_datum(build_root_system(t.parse().unwrap()), spec).unwrap()
    }

    #[test]
    fn small_examples() {
        let d = datum("A1", LatticeSpec::weight());
        let chi = parse_character(&d, "1/2").unwrap();
        assert_eq!(brute_stabilizer(&d, &chi).unwrap().order, 2);
        assert_eq!(brute_stabilizer(&d, &parse_character(&d, "0").unwrap()).unwrap().order, 2);
        let q = QParameters::new();
        assert!(brute_rgroup(&d, &WUCharacter::trivial(&d), &q).unwrap().structure.is_trivial());
        let a2 = datum("A2", LatticeSpec::weight());
        let r = brute_rgroup(&a2, &parse_character(&a2, "1/3,1/3").unwrap(), &q).unwrap();
        assert_eq!(r.structure.order(), 3);
    }

    #[test]
    fn d4_half_point_klein_four() {
        let d = datum("D4", LatticeSpec::weight());
        let chi = parse_character(&d, "1/2,0,1/2,1/2").unwrap();
        let q = QParameters::new();
        let brute = brute_rgroup(&d, &chi, &q).unwrap();
        assert_eq!(brute.structure.invariant_factors(), &[2, 2]);
        let fast = crate::rgroup::compute_rgroup(&d, &chi, &q).unwrap();
        assert!(compare(&fast, &brute).is_empty());
        assert_eq!(
            brute_stabilizer(&d, &chi).unwrap().element_set(),
            crate::stabilizer::stabilizer_mod_lattice(&d, &chi, crate::stabilizer::Strategy::Alcove)
                .unwrap()
                .element_set()
        );
    }

    #[test]
    fn fast_matches_brute_small_sweep() {
        for t in ["A3", "B3", "C2", "G2"] {
            for spec in [LatticeSpec::weight(), LatticeSpec::root()] {
                let d = datum(t, spec);
                let table = BruteTable::new(&d, ORACLE_CAP).unwrap();
                for q in [QParameters::new(), QParameters::all_false(d.root_system())] {
                    for chi in enumerate_characters(&d, 4, DEFAULT_GRID_CAP).unwrap() {
                        let rep = oracle_case("t", &table, &d, &chi, &q).unwrap();
                        assert!(rep.agree, "{t} {chi}: {:?}", rep.mismatches);
                    }
                }
            }
        }
    }
}

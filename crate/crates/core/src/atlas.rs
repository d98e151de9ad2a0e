//! Sweeps over orbit representatives and the rendered atlas.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::abelian::FiniteAbelianGroup;
use crate::character::{enumerate_characters, WUCharacter, DEFAULT_GRID_CAP};
use crate::error::Result;
use crate::linalg::hermite_basis;
use crate::rgroup::{compute_rgroup, keys_check, QParameters, RGroupResult};
use crate::root_datum::{build_root_datum, LatticeSpec, RootDatum};
use crate::root_system::{build_root_system, CartanType};

/// Simply connected, adjoint, and every lattice `Q + Z v` for a nonzero
/// class `v` of `P/Q` that is neither `Q` nor `P`.
pub fn lattice_choices(t: CartanType) -> Vec<(String, LatticeSpec)> {
    let rs = build_root_system(t);
    let r = rs.rank();
    let a = rs.cartan_matrix();
    let q_rows: Vec<Vec<i64>> = (0..r).map(|j| (0..r).map(|i| a[i][j]).collect()).collect();
    let mut out = vec![("sc".to_string(), LatticeSpec::weight())];
    if rs.fundamental_group().is_trivial() {
        return out;
    }
    out.push(("ad".to_string(), LatticeSpec::root()));
    let p_basis = hermite_basis(&(0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect::<Vec<_>>());
    let mut seen = BTreeSet::new();
    for v in rs.fundamental_group_representatives().into_iter().skip(1) {
        let mut gens = q_rows.clone();
        gens.push(v.clone());
        let h = hermite_basis(&gens);
        if h == p_basis || !seen.insert(h.clone()) {
            continue;
        }
        let label = format!("Q+({})", v.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
        out.push((label, LatticeSpec::intermediate(&h)));
    }
    out
}

pub fn lattice_by_label(t: CartanType, label: &str) -> Option<LatticeSpec> {
    let label = match label {
        "weight" | "P" => "sc",
        "root" | "Q" => "ad",
        other => other,
    };
    lattice_choices(t).into_iter().find(|(l, _)| l == label).map(|(_, s)| s)
}

/// All orbit representatives with exact denominator `1..=max_d`, ordered by
/// denominator and then by representative.
pub fn characters_up_to(datum: &RootDatum, max_d: u64) -> Result<Vec<WUCharacter>> {
    let mut out = Vec::new();
    for d in 1..=max_d {
        let reps = enumerate_characters(datum, d, DEFAULT_GRID_CAP)?;
        out.extend(reps.into_iter().filter(|c| c.denominator() as u64 == d));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct AtlasEntry {
    pub cartan_type: CartanType,
    pub lattice: String,
    pub q_label: String,
    pub character: WUCharacter,
    pub w_chi_order: u128,
    pub w_circ_order: u128,
    pub structure: FiniteAbelianGroup,
    pub keys_pass: bool,
}

impl AtlasEntry {
    fn from_result(t: CartanType, lattice: &str, q_label: &str, chi: WUCharacter, r: &RGroupResult) -> Self {
        AtlasEntry {
            cartan_type: t,
            lattice: lattice.to_string(),
            q_label: q_label.to_string(),
            character: chi,
            w_chi_order: r.w_chi.order,
            w_circ_order: r.w_circ.order,
            structure: r.structure.clone(),
            keys_pass: keys_check(t, r),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": self.cartan_type.to_string(),
            "lattice": self.lattice,
            "q": self.q_label,
            "character": self.character.to_string(),
            "W_chi_order": self.w_chi_order as u64,
            "W_circ_order": self.w_circ_order as u64,
            "R_structure": self.structure.invariant_factors(),
            "keys_check": self.keys_pass,
        })
    }
}

/// Computes the R-group of every orbit representative with denominator at
/// most `max_d`. Results keep the order of the representatives.
pub fn classify(
    t: CartanType,
    lattice: &str,
    spec: LatticeSpec,
    max_d: u64,
    q: &QParameters,
    q_label: &str,
) -> Result<Vec<AtlasEntry>> {
    let datum = build_root_datum(build_root_system(t), spec)?;
    let chars = characters_up_to(&datum, max_d)?;
    chars
        .into_par_iter()
        .map(|chi| {
            let r = compute_rgroup(&datum, &chi, q)?;
            Ok(AtlasEntry::from_result(t, lattice, q_label, chi, &r))
        })
        .collect()
}

/// Nontrivial structures attained, in canonical order.
pub fn attained_structures(entries: &[AtlasEntry]) -> Vec<FiniteAbelianGroup> {
    let set: BTreeSet<FiniteAbelianGroup> =
        entries.iter().filter(|e| !e.structure.is_trivial()).map(|e| e.structure.clone()).collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct AtlasSection {
    pub cartan_type: CartanType,
    pub lattice: String,
    pub q_label: String,
    pub max_denominator: u64,
    pub entries: Vec<AtlasEntry>,
}

impl AtlasSection {
    pub fn orbit_count(&self) -> usize {
        self.entries.len()
    }

    pub fn keys_failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.keys_pass).count()
    }

    /// First entry attaining each nontrivial structure.
    pub fn witnesses(&self) -> Vec<&AtlasEntry> {
        attained_structures(&self.entries)
            .into_iter()
            .filter_map(|s| self.entries.iter().find(|e| e.structure == s))
            .collect()
    }
}

/// Default denominator bound of the atlas.
pub const DEFAULT_ATLAS_MAX_DENOMINATOR: u64 = 6;

pub const ATLAS_TYPES: &[&str] =
    &["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "D5", "G2", "F4", "E6"];

/// Sections for every listed type and lattice choice, default q and (when
/// the type has several root lengths) all `q_{alpha/2} != 1`.
pub fn build_atlas(types: &[CartanType], max_d: u64, both_q: bool) -> Result<Vec<AtlasSection>> {
    let mut out = Vec::new();
    for &t in types {
        let rs = build_root_system(t);
        let mut qs = vec![("default".to_string(), QParameters::new())];
        if both_q {
            qs.push(("q_half_ne_1".to_string(), QParameters::all_false(&rs)));
        }
        for (label, spec) in lattice_choices(t) {
            for (q_label, q) in &qs {
                let entries = classify(t, &label, spec.clone(), max_d, q, q_label)?;
                out.push(AtlasSection {
                    cartan_type: t,
                    lattice: label.clone(),
                    q_label: q_label.clone(),
                    max_denominator: max_d,
                    entries,
                });
            }
        }
    }
    Ok(out)
}

pub fn render_markdown(sections: &[AtlasSection], full: bool) -> String {
    let mut s = String::new();
    writeln!(s, "# R-group atlas\n").unwrap();
    writeln!(s, "| type | lattice | q | max denominator | orbits | nontrivial structures | witnesses | keys check |").unwrap();
    writeln!(s, "|---|---|---|---|---|---|---|---|").unwrap();
    for sec in sections {
        let structures: Vec<String> = attained_structures(&sec.entries).iter().map(ToString::to_string).collect();
        let witnesses: Vec<String> = sec.witnesses().iter().map(|e| e.character.to_string()).collect();
        writeln!(
            s,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            sec.cartan_type,
            sec.lattice,
            sec.q_label,
            sec.max_denominator,
            sec.orbit_count(),
            if structures.is_empty() { "none".to_string() } else { structures.join("; ") },
            if witnesses.is_empty() { "-".to_string() } else { witnesses.join(" ") },
            if sec.keys_failures() == 0 { "pass".to_string() } else { format!("FAIL ({})", sec.keys_failures()) },
        )
        .unwrap();
    }
    if full {
        for sec in sections {
            writeln!(s, "\n## {} {} (q: {})\n", sec.cartan_type, sec.lattice, sec.q_label).unwrap();
            writeln!(s, "| character | W(chi) | W° | R | keys |").unwrap();
            writeln!(s, "|---|---|---|---|---|").unwrap();
            for e in &sec.entries {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} |",
                    e.character,
                    e.w_chi_order,
                    e.w_circ_order,
                    e.structure,
                    if e.keys_pass { "pass" } else { "FAIL" }
                )
                .unwrap();
            }
        }
    }
    s
}

pub fn render_json(sections: &[AtlasSection], full: bool) -> Value {
    Value::Array(
        sections
            .iter()
            .map(|sec| {
                let mut v = json!({
                    "type": sec.cartan_type.to_string(),
                    "lattice": sec.lattice,
                    "q": sec.q_label,
                    "max_denominator": sec.max_denominator,
                    "orbits": sec.orbit_count(),
                    "structures": attained_structures(&sec.entries)
                        .iter()
                        .map(|g| json!(g.invariant_factors()))
                        .collect::<Vec<_>>(),
                    "witnesses": sec.witnesses().iter().map(|e| e.character.to_string()).collect::<Vec<_>>(),
                    "keys_failures": sec.keys_failures(),
                });
                if full {
                    v["entries"] = Value::Array(sec.entries.iter().map(AtlasEntry::to_json).collect());
                }
                v
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> CartanType {
        s.parse().unwrap()
    }

    #[test]
    fn lattice_choice_counts() {
        assert_eq!(lattice_choices(t("G2")).len(), 1);
        assert_eq!(lattice_choices(t("A1")).len(), 2);
        // SL4 / mu_2
        assert_eq!(lattice_choices(t("A3")).len(), 3);
        // three lattices strictly between Q and P for D4
        assert_eq!(lattice_choices(t("D4")).len(), 5);
        assert_eq!(lattice_choices(t("A4")).len(), 2);
        assert!(lattice_by_label(t("A3"), "Q+(0,1,0)").is_some());
    }

    #[test]
    fn a2_classification() {
        let entries = classify(t("A2"), "sc", LatticeSpec::weight(), 6, &QParameters::new(), "default").unwrap();
        assert_eq!(attained_structures(&entries), vec![FiniteAbelianGroup::cyclic(3)]);
        let only_trivial = classify(t("B3"), "sc", LatticeSpec::weight(), 1, &QParameters::new(), "default").unwrap();
        assert_eq!(only_trivial.len(), 1);
        assert!(attained_structures(&only_trivial).is_empty());
    }

    #[test]
    fn d4_klein_four_attained() {
        let entries = classify(t("D4"), "sc", LatticeSpec::weight(), 4, &QParameters::new(), "default").unwrap();
        assert!(attained_structures(&entries).contains(&FiniteAbelianGroup::new(vec![2, 2]).unwrap()));
    }

    #[test]
    fn rendering_is_deterministic() {
        let types = [t("A1"), t("B2")];
        let a = render_markdown(&build_atlas(&types, 4, true).unwrap(), true);
        let b = render_markdown(&build_atlas(&types, 4, true).unwrap(), true);
        assert_eq!(a, b);
        assert!(a.contains("| A1 | sc | default | 4 |"));
    }
}

use rgroups_core::abelian::FiniteAbelianGroup;
use rgroups_core::atlas::{attained_structures, classify};
use rgroups_core::character::{parse_character, Sublattice};
use rgroups_core::oracle::{brute_rgroup, compare};
use rgroups_core::rgroup::{compute_rgroup, verify_restriction_sequence, QParameters};
use rgroups_core::root_datum::{build_root_datum, LatticeSpec, RootDatum};
use rgroups_core::root_system::build_root_system;
use rgroups_core::transfer::{catalogue, transfer_character, verify_transfer_sequence};

fn sc(t: &str) -> RootDatum {
    build_root_datum(build_root_system(t.parse().unwrap()), LatticeSpec::weight()).unwrap()
}

#[test]
fn sl2_half_point() {
    let d = sc("A1");
    let res = compute_rgroup(&d, &parse_character(&d, "1/2").unwrap(), &QParameters::new()).unwrap();
    assert_eq!(res.structure, FiniteAbelianGroup::cyclic(2));
    assert_eq!(res.w_chi.order, 2);
    assert_eq!(res.w_circ.order, 1);
    // PGL_2 has no such character: 1/2 on the root lattice has trivial R
    let ad = build_root_datum(build_root_system("A1".parse().unwrap()), LatticeSpec::root()).unwrap();
    let res = compute_rgroup(&ad, &parse_character(&ad, "1/2").unwrap(), &QParameters::new()).unwrap();
    assert!(res.structure.is_trivial());
}

#[test]
fn spin8_klein_four() {
    let d = sc("D4");
    let chi = parse_character(&d, "1/2,0,1/2,1/2").unwrap();
    let q = QParameters::new();
    let fast = compute_rgroup(&d, &chi, &q).unwrap();
    assert_eq!(fast.structure, FiniteAbelianGroup::new(vec![2, 2]).unwrap());
    assert!(compare(&fast, &brute_rgroup(&d, &chi, &q).unwrap()).is_empty());
}

#[test]
fn e6_order_three() {
    let entries = classify("E6".parse().unwrap(), "sc", LatticeSpec::weight(), 3, &QParameters::new(), "default").unwrap();
    assert_eq!(attained_structures(&entries), vec![FiniteAbelianGroup::cyclic(3)]);
}

#[test]
fn exceptional_trivial() {
    for t in ["G2", "F4"] {
        let entries = classify(t.parse().unwrap(), "sc", LatticeSpec::weight(), 6, &QParameters::new(), "default").unwrap();
        assert!(attained_structures(&entries).is_empty(), "{t}");
    }
}

#[test]
fn gl2_restriction_witness() {
    let gl2 = RootDatum::gl(2).unwrap();
    let chi = parse_character(&gl2, "0,1/2").unwrap();
    let rep = verify_restriction_sequence(&gl2, &Sublattice::coroot_lattice(1), &chi, &QParameters::new()).unwrap();
    assert!(rep.passed());
    assert!(rep.r.structure.is_trivial());
    assert_eq!(rep.r_flat.structure, FiniteAbelianGroup::cyclic(2));
    assert_eq!(rep.hat_w.order(), 2);
    assert_eq!(rep.hat_w.witnesses.iter().map(ToString::to_string).collect::<Vec<_>>(), ["e", "s1"]);
}

#[test]
fn division_algebra_transfers() {
    let td = catalogue::load("sl1D-in-sl2").unwrap();
    let chi = parse_character(&td.source, ";tors=1").unwrap();
    assert_eq!(transfer_character(&td, &chi).unwrap().to_string(), "(1/2)");
    let rep = verify_transfer_sequence(&td, &chi).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.quotient, Some(FiniteAbelianGroup::cyclic(2)));

    let td = catalogue::load("anisotropic-in-c2").unwrap();
    let chi = parse_character(&td.source, ";tors=1").unwrap();
    let rep = verify_transfer_sequence(&td, &chi).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.r_star.w_chi.order, 4);

    let td = catalogue::load("gl2D-in-gl4").unwrap();
    let chi = parse_character(&td.source, "0,1/2").unwrap();
    assert!(verify_transfer_sequence(&td, &chi).unwrap().passed());
}

#[test]
fn every_catalogue_entry_loads() {
    for name in catalogue::names() {
        let td = catalogue::load(&name).unwrap();
        let again = rgroups_core::transfer::load_transfer_datum(&td.to_doc()).unwrap();
        assert_eq!(again.embedding, td.embedding, "{name}");
    }
}

#[test]
fn datum_documents_round_trip() {
    for doc in [
        serde_json::json!({"type": "A", "rank": 3, "char_lattice": {"generators": [[2, -1, 0], [-1, 2, -1], [0, -1, 2], [0, 1, 0]]}}),
        serde_json::json!({"type": "GL", "rank": 3}),
        serde_json::json!({"type": "A1xB2", "char_lattice": "root", "central_free_rank": 1}),
        serde_json::json!({"type": "anisotropic", "torsion": [2, 4]}),
    ] {
        let d = RootDatum::from_doc(&doc).unwrap();
        let e = RootDatum::from_doc(&d.to_doc()).unwrap();
        assert_eq!(d.basis(), e.basis(), "{doc}");
        assert_eq!(d.to_doc(), e.to_doc());
    }
}

use proptest::prelude::*;

use rgroups_core::abelian::FiniteAbelianGroup;
use rgroups_core::character::{
    evaluate, make_character, orbit_representative, weyl_act, Sublattice, WUCharacter,
};
use rgroups_core::linalg::{ratio, QMatrix, Rat};
use rgroups_core::oracle::brute_stabilizer;
use rgroups_core::rgroup::{compute_rgroup, delta_prime, semidirect_checks, verify_restriction_sequence, QParameters};
use rgroups_core::root_datum::{build_root_datum, dual_lattice, rational_basis, LatticeSpec, RootDatum};
use rgroups_core::root_system::build_root_system;
use rgroups_core::stabilizer::{stabilizer_mod_lattice, Strategy};
use rgroups_core::weyl::WeylElement;

fn datum_for(choice: usize) -> RootDatum {
    let sys = |t: &str| build_root_system(t.parse().unwrap());
    match choice % 6 {
        0 => build_root_datum(sys("A3"), LatticeSpec::weight()).unwrap(),
        1 => build_root_datum(sys("A3"), LatticeSpec::intermediate(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, 1, 0]]))
            .unwrap(),
        2 => build_root_datum(sys("B3"), LatticeSpec::root()).unwrap(),
        3 => build_root_datum(sys("C2"), LatticeSpec::weight().with_central_rank(1)).unwrap(),
        4 => RootDatum::gl(3).unwrap(),
        _ => build_root_datum(sys("G2"), LatticeSpec::weight()).unwrap(),
    }
}

fn word(d: &RootDatum, raw: &[usize]) -> WeylElement {
    let r = d.rank();
    let w: Vec<usize> = raw.iter().map(|&i| i % r).collect();
    WeylElement::from_word(d.root_system(), &w).unwrap()
}

fn character(d: &RootDatum, den: i64, raw: &[i64]) -> WUCharacter {
    let coords: Vec<Rat> = (0..d.dim()).map(|i| ratio(raw[i % raw.len()].rem_euclid(den), den)).collect();
    make_character(d, &coords, &[]).unwrap()
}

fn mat_vec(m: &[i64], n: usize, v: &[i64]) -> Vec<i64> {
    (0..n).map(|i| (0..n).map(|j| m[i * n + j] * v[j]).sum()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_words_are_reduced_and_stable(choice in 0usize..6, raw in prop::collection::vec(0usize..8, 0..14)) {
        let d = datum_for(choice);
        let rs = d.root_system();
        let w = word(&d, &raw);
        prop_assert_eq!(w.length(), w.inversion_count(rs));
        prop_assert_eq!(&WeylElement::from_word(rs, w.word()).unwrap(), &w);
        prop_assert!(w.mul(rs, &w.inverse(rs)).is_identity());
    }

    #[test]
    fn basis_action_is_a_homomorphism(choice in 0usize..6, a in prop::collection::vec(0usize..8, 0..8),
                                      b in prop::collection::vec(0usize..8, 0..8)) {
        let d = datum_for(choice);
        let rs = d.root_system();
        let (u, v) = (word(&d, &a), word(&d, &b));
        let n = d.dim();
        let ku = d.basis_action(&u);
        let kv = d.basis_action(&v);
        let kuv = d.basis_action(&u.mul(rs, &v));
        let prod: Vec<i64> = (0..n * n).map(|ij| (0..n).map(|k| ku[ij / n * n + k] * kv[k * n + ij % n]).sum()).collect();
        prop_assert_eq!(kuv, prod);
    }

    #[test]
    fn weyl_action_on_characters(choice in 0usize..6, den in 1i64..9, raw in prop::collection::vec(0i64..40, 1..6),
                                 a in prop::collection::vec(0usize..8, 0..8), b in prop::collection::vec(0usize..8, 0..8)) {
        let d = datum_for(choice);
        let rs = d.root_system();
        let chi = character(&d, den, &raw);
        let (u, v) = (word(&d, &a), word(&d, &b));
        prop_assert_eq!(weyl_act(&d, &u, &weyl_act(&d, &v, &chi)), weyl_act(&d, &u.mul(rs, &v), &chi));
        // orbit representatives are class functions
        let rep = orbit_representative(&d, &chi, 100_000).unwrap();
        prop_assert_eq!(&orbit_representative(&d, &weyl_act(&d, &u, &chi), 100_000).unwrap(), &rep);
        prop_assert_eq!(&orbit_representative(&d, &rep, 100_000).unwrap(), &rep);
    }

    #[test]
    fn evaluation_is_additive_and_equivariant(choice in 0usize..6, den in 1i64..9, raw in prop::collection::vec(0i64..40, 1..6),
                                              l in prop::collection::vec(-5i64..6, 5), m in prop::collection::vec(-5i64..6, 5),
                                              a in prop::collection::vec(0usize..8, 0..8)) {
        let d = datum_for(choice);
        let rs = d.root_system();
        let n = d.dim();
        let chi = character(&d, den, &raw);
        let (l, m) = (&l[..n], &m[..n]);
        let sum: Vec<i64> = l.iter().zip(m).map(|(x, y)| x + y).collect();
        let lhs = evaluate(&d, &chi, &sum, &[]).unwrap();
        let rhs = evaluate(&d, &chi, l, &[]).unwrap() + evaluate(&d, &chi, m, &[]).unwrap();
        prop_assert_eq!(lhs, rgroups_core::linalg::frac(&rhs));
        // <w chi, w lambda> = <chi, lambda>, cocharacters moving by the inverse transpose
        let w = word(&d, &a);
        let kt = d.basis_action(&w.inverse(rs));
        let kt_t: Vec<i64> = (0..n * n).map(|ij| kt[(ij % n) * n + ij / n]).collect();
        let wl = mat_vec(&kt_t, n, l);
        prop_assert_eq!(evaluate(&d, &weyl_act(&d, &w, &chi), &wl, &[]).unwrap(), evaluate(&d, &chi, l, &[]).unwrap());
    }

    #[test]
    fn alcove_stabilizer_matches_exhaustive(choice in 0usize..6, den in 1i64..13, raw in prop::collection::vec(0i64..60, 1..6)) {
        let d = datum_for(choice);
        let chi = character(&d, den, &raw);
        let fast = stabilizer_mod_lattice(&d, &chi, Strategy::Alcove).unwrap();
        let brute = brute_stabilizer(&d, &chi).unwrap();
        prop_assert_eq!(fast.element_set(), brute.element_set());
        for w in fast.elements.as_ref().unwrap() {
            prop_assert_eq!(&weyl_act(&d, w, &chi), &chi);
        }
    }

    #[test]
    fn delta_prime_is_stable_and_monotone_in_q(choice in 0usize..6, den in 1i64..13, raw in prop::collection::vec(0i64..60, 1..6)) {
        let d = datum_for(choice);
        let rs = d.root_system();
        let chi = character(&d, den, &raw);
        let q = QParameters::new();
        let res = compute_rgroup(&d, &chi, &q).unwrap();
        for w in res.w_chi.elements.as_ref().unwrap() {
            for &k in &res.delta_prime {
                prop_assert!(res.delta_prime.contains(&w.act_on_root(rs, k)));
            }
        }
        let weak = delta_prime(&d, &chi, &QParameters::all_false(rs));
        prop_assert!(res.delta_prime.iter().all(|k| weak.contains(k)));
        prop_assert!(semidirect_checks(rs, &res).iter().all(|(_, ok)| *ok));
        prop_assert!(res.structure.order() as u128 * res.w_circ.order == res.w_chi.order);
    }

    #[test]
    fn restriction_sequence_on_gl(n in 2usize..5, den in 1i64..9, raw in prop::collection::vec(0i64..40, 1..5)) {
        let d = RootDatum::gl(n).unwrap();
        let chi = character(&d, den, &raw);
        let rep = verify_restriction_sequence(&d, &Sublattice::coroot_lattice(n - 1), &chi, &QParameters::new()).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.checks);
    }

    #[test]
    fn dual_lattice_is_an_involution(rows in prop::collection::vec(prop::collection::vec(-4i64..5, 3), 3..5), den in 1i64..4) {
        let gens: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| ratio(x, den)).collect()).collect();
        prop_assume!(rational_basis(&gens, 3).is_ok());
        let gram = QMatrix::from_int_rows(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        let dual = dual_lattice(&gens, &gram).unwrap();
        let back = dual_lattice(&dual, &gram).unwrap();
        prop_assert_eq!(rational_basis(&back, 3).unwrap(), rational_basis(&gens, 3).unwrap());
    }

    #[test]
    fn abelian_groups_from_element_orders(factors in prop::collection::vec(1u64..7, 0..3)) {
        let g = FiniteAbelianGroup::from_cyclic_orders(&factors);
        let orders: Vec<u64> = g
            .elements()
            .iter()
            .map(|e| {
                e.iter().zip(g.invariant_factors()).map(|(&x, &d)| d / num_integer::gcd(x, d)).fold(1, num_integer::lcm)
            })
            .collect();
        prop_assert_eq!(FiniteAbelianGroup::from_element_orders(&orders).unwrap(), g.clone());
        prop_assert_eq!(g.order(), factors.iter().product::<u64>());
    }
}

mod common;

use common::{indist_oracle, universe};
use proptest::prelude::*;
use quasiset::format::{universe_from_json, universe_to_json};
use quasiset::{ExtEq, QuasiCardinal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn indist_is_an_equivalence(u in universe(5, 4, 4)) {
        let hs: Vec<_> = u.handles().collect();
        for &a in &hs {
            prop_assert!(u.indist(a, a).unwrap());
            for &b in &hs {
                let ab = u.indist(a, b).unwrap();
                prop_assert_eq!(ab, u.indist(b, a).unwrap());
                for &c in &hs {
                    if ab && u.indist(b, c).unwrap() {
                        prop_assert!(u.indist(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn indist_matches_recursive_oracle(u in universe(5, 5, 4)) {
        for a in u.handles() {
            for b in u.handles() {
                prop_assert_eq!(u.indist(a, b).unwrap(), indist_oracle(&u, a, b), "{} {}", u.name(a), u.name(b));
            }
        }
    }

    #[test]
    fn weak_pair_is_the_class_union(u in universe(6, 3, 4)) {
        for x in u.handles() {
            for y in u.handles() {
                let ext = u.weak_pair(x, y).unwrap();
                let got: Vec<_> = ext.universe.members(ext.qset).unwrap().to_vec();
                let want: Vec<_> = u
                    .handles()
                    .filter(|&t| indist_oracle(&u, t, x) || indist_oracle(&u, t, y))
                    .collect();
                prop_assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn power_qset_has_two_to_the_qc_members(u in universe(6, 3, 6)) {
        for x in u.qset_handles().collect::<Vec<_>>() {
            let qc = u.qc(x).unwrap().value();
            let ext = u.power_qset(x, 8).unwrap();
            let p = ext.universe.members(ext.qset).unwrap();
            prop_assert_eq!(p.len() as u64, 1u64 << qc);
            for &s in p {
                for &t in ext.universe.members(s).unwrap() {
                    prop_assert!(u.is_member(t, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn sub_qsets_exist_for_every_smaller_cardinal(u in universe(6, 3, 6)) {
        for x in u.qset_handles().collect::<Vec<_>>() {
            let qc = u.qc(x).unwrap().value();
            for beta in 0..=qc {
                let ext = u.sub_qset_of_card(x, QuasiCardinal(beta)).unwrap();
                prop_assert_eq!(ext.universe.qc(ext.qset).unwrap().value(), beta);
                for &t in ext.universe.members(ext.qset).unwrap() {
                    prop_assert!(u.is_member(t, x).unwrap());
                }
            }
            prop_assert!(u.sub_qset_of_card(x, QuasiCardinal(qc + 1)).is_err());
        }
    }

    #[test]
    fn ordered_pairs_of_indistinguishables_collapse(u in universe(6, 0, 0)) {
        for x in u.atom_handles().collect::<Vec<_>>() {
            for y in u.atom_handles().collect::<Vec<_>>() {
                if !u.indist(x, y).unwrap() {
                    continue;
                }
                let xy = u.ordered_qpair(x, y).unwrap();
                let yx = xy.universe.ordered_qpair(y, x).unwrap();
                let w = &yx.universe;
                let sx = w.weak_pair(x, x).unwrap();
                let ssx = sx.universe.weak_pair(sx.qset, sx.qset).unwrap();
                let w2 = &ssx.universe;
                prop_assert_eq!(w2.ext_eq(xy.qset, yx.qset).unwrap(), ExtEq::Equal);
                prop_assert_eq!(w2.ext_eq(xy.qset, ssx.qset).unwrap(), ExtEq::Equal);
            }
        }
    }

    #[test]
    fn ext_eq_is_undefined_exactly_on_m_atoms(u in universe(5, 3, 3)) {
        for a in u.handles() {
            for b in u.handles() {
                let micro = u.entity(a).unwrap().is_micro() || u.entity(b).unwrap().is_micro();
                let r = u.ext_eq(a, b).unwrap();
                prop_assert_eq!(matches!(r, ExtEq::NotApplicable(_)), micro);
                if r == ExtEq::Equal {
                    prop_assert!(u.indist(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn quotient_classes_partition_atom_qsets(u in universe(7, 3, 6)) {
        for x in u.qset_handles().collect::<Vec<_>>() {
            let Ok(classes) = u.quotient_classes(x) else {
                prop_assert!(u.members(x).unwrap().iter().any(|&m| u.entity(m).unwrap().is_qset()));
                continue;
            };
            let total: usize = classes.iter().map(Vec::len).sum();
            prop_assert_eq!(total as u64, u.qc(x).unwrap().value());
            for (i, c) in classes.iter().enumerate() {
                prop_assert!(c.iter().all(|&t| u.indist(t, c[0]).unwrap()));
                for d in &classes[i + 1..] {
                    prop_assert!(!u.indist(c[0], d[0]).unwrap());
                }
            }
        }
    }

    #[test]
    fn card_and_qc_agree(u in universe(5, 4, 5)) {
        for x in u.qset_handles() {
            prop_assert_eq!(u.card(x).unwrap(), u.qc(x).unwrap().value());
        }
    }

    #[test]
    fn json_round_trip_keeps_structure(u in universe(5, 4, 4)) {
        let back = universe_from_json(&universe_to_json(&u)).unwrap();
        prop_assert_eq!(back.len(), u.len());
        for a in u.handles() {
            let b = back.resolve(u.name(a)).unwrap();
            prop_assert_eq!(back.entity(b).unwrap().kind(), u.entity(a).unwrap().kind());
        }
    }
}

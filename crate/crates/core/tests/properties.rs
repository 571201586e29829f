use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

mod support;

use support::{naive_covered, naive_singular};

use cubicfour::cubicdomain::{Monomial, MonomialSet, Universe};
use cubicfour::lattice::{smith_normal_form, IntMatrix};
use cubicfour::pauli::{self, parse_word, MonomialMatrix};
use cubicfour::smoothcert::{jacobian_basis, Mono, PrimeField, SparsePolynomial};

fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<Vec<i64>>)> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
        (Just(c), prop::collection::vec(prop::collection::vec(-20i64..=20, c), r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn snf_reconstructs((cols, rows) in matrix_strategy()) {
        let m = IntMatrix::from_rows(cols, &rows).unwrap();
        let snf = smith_normal_form(&m);
        prop_assert_eq!(&snf.u.mul(&m).unwrap().mul(&snf.v).unwrap(), &snf.s);
        prop_assert!(snf.s.is_diagonal());
        prop_assert!(snf.u.determinant().unwrap().abs().is_one());
        prop_assert!(snf.v.determinant().unwrap().abs().is_one());
        prop_assert_eq!(snf.v.mul(&snf.v_inv).unwrap(), IntMatrix::identity(cols));
        let d = snf.diagonal();
        for w in d.windows(2) {
            prop_assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        // |det| is the product of the diagonal for square matrices
        if rows.len() == cols {
            let prod: BigInt = d.iter().product();
            prop_assert_eq!(m.determinant().unwrap().abs(), prod);
        }
    }
}

fn sparse_mask() -> impl Strategy<Value = u64> {
    // densities from about 1/8 to 1/2 so that every outcome occurs
    (any::<u64>(), any::<u64>(), any::<u64>(), 0u8..3).prop_map(|(a, b, c, k)| {
        let m = match k {
            0 => a & b & c,
            1 => a & b,
            _ => a & (b | c),
        };
        m & Universe::cubic6().full_mask()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn singular_subset_predicates_agree(mask in sparse_mask()) {
        let u = Universe::cubic6();
        let set = u.set(mask);
        let mut pairs = Vec::new();
        let mut triples = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                prop_assert_eq!(u.pair_is_singular(mask, i, j), naive_singular(&set, &[i, j]), "pair {} {}", i, j);
                if naive_singular(&set, &[i, j]) {
                    pairs.push((i, j));
                }
                for l in j + 1..6 {
                    let naive = naive_singular(&set, &[i, j, l]);
                    prop_assert_eq!(u.triple_is_singular(mask, i, j, l), naive);
                    if naive {
                        triples.push((i, j, l));
                    }
                }
            }
        }
        prop_assert_eq!(u.singular_pairs_mask(mask), pairs.clone());
        prop_assert_eq!(u.singular_triples_mask(mask), triples.clone());
        prop_assert_eq!(
            u.is_admissible_mask(mask),
            naive_covered(&set) && pairs.is_empty() && triples.is_empty()
        );
    }
}

fn form_strategy() -> impl Strategy<Value = (u64, Vec<(usize, u64)>)> {
    (prop::sample::select(vec![5u64, 7, 11, 101]), prop::collection::vec((0usize..56, 1u64..1000), 3..12))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobian_bases_are_reduced_groebner_bases((p, terms) in form_strategy()) {
        let u = Universe::cubic6();
        let field = PrimeField::new(p).unwrap();
        let terms: Vec<(Mono, u64)> = terms
            .into_iter()
            .map(|(k, c)| (Mono::new(u.monomial(k).exponents()), c % p))
            .collect();
        let f = SparsePolynomial::from_terms(field, 6, terms);
        prop_assume!(!f.is_zero());
        let gb = jacobian_basis(&f);
        prop_assert!(gb.satisfies_buchberger_criterion());
        prop_assert!(gb.is_reduced());
        // every input generator reduces to zero
        prop_assert!(gb.normal_form(&f).is_zero());
        for g in cubicfour::smoothcert::partials(&f) {
            prop_assert!(gb.normal_form(&g).is_zero());
        }
    }
}

fn word_strategy(n: usize) -> impl Strategy<Value = String> {
    prop::collection::vec((0u64..2 * n as u64, 0u64..2 * n as u64), 1..4).prop_map(move |fs| {
        fs.iter().map(|(a, b)| format!("P{n}^{a}*W{n}^{b}")).collect::<Vec<_>>().join("*")
    })
}

fn pauli_pair(max_n: usize) -> impl Strategy<Value = (String, String)> {
    (2usize..=max_n).prop_flat_map(|n| (word_strategy(n), word_strategy(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pauli_words_commute_projectively((a, b) in pauli_pair(8)) {
        let g = parse_word(&a).unwrap();
        let h = parse_word(&b).unwrap();
        let gh = g.compose(&h).unwrap();
        let hg = h.compose(&g).unwrap();
        prop_assert!(gh.compose(&hg.inverse()).unwrap().is_scalar());
        prop_assert!(g.commutes_projectively(&h).unwrap());
    }

    #[test]
    fn monomial_action_is_a_representation((a, b) in pauli_pair(6), k in 0usize..120) {
        let g = parse_word(&a).unwrap();
        let h = parse_word(&b).unwrap();
        let n = g.size();
        let u = Universe::get(n, 3).unwrap();
        let m = u.monomial(k % u.len());
        let gh = g.compose(&h).unwrap();
        let r = g.root().lcm(&h.root()).lcm(&gh.root());
        let (m1, e1) = h.act_on_monomial(&m);
        let (m2, e2) = g.act_on_monomial(&m1);
        let (m3, e3) = gh.act_on_monomial(&m);
        prop_assert_eq!(m2, m3);
        prop_assert_eq!(m3.degree(), 3);
        let lift = |e: u64, root: u64| e * (r / root) % r;
        prop_assert_eq!((lift(e1, h.root()) + lift(e2, g.root())) % r, lift(e3, gh.root()));
    }
}

fn family_signature(gens: &[MonomialMatrix]) -> Vec<(usize, MonomialSet)> {
    let mut v: Vec<(usize, MonomialSet)> = pauli::invariant_cubics(gens)
        .unwrap()
        .iter()
        .map(|f| (f.dimension(), f.support()))
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn families_do_not_depend_on_presentation(i in 0u64..2, k in 0u64..6, l in 1u64..6, extra in 0u64..6) {
        // {P6·W6^i, W6^2} versus {P6·W6^i·(W6^2)^k, W6^2, random redundant word}
        let g1 = parse_word(&format!("P6*W6^{i}")).unwrap();
        let g2 = parse_word("W6^2").unwrap();
        let base = family_signature(&[g1.clone(), g2.clone()]);
        let h1 = g1.compose(&g2.pow(k)).unwrap();
        let h3 = g1.pow(extra).compose(&g2.pow(l)).unwrap();
        let other = family_signature(&[h1, g2.clone(), h3]);
        prop_assert_eq!(base, other);
    }
}

#[test]
fn family_members_are_eigenvectors_for_every_case() {
    for case in pauli::case_table().unwrap() {
        for fam in pauli::invariant_cubics(&case.generators).unwrap() {
            let p = pauli::split_primes(fam.root, 1)[0];
            let field = PrimeField::new(p).unwrap();
            let zeta = pauli::element_of_order(p, fam.root);
            let f = fam.member_mod_p(field, zeta, 3);
            for (g, &lam) in case.generators.iter().zip(&fam.characters) {
                let lhs = g.apply_mod_p(&f, zeta, fam.root);
                let rhs = f.scale(&field.pow(zeta, lam));
                assert_eq!(lhs, rhs, "{}", case.label);
            }
        }
    }
}

#[test]
fn monomial_roundtrip_through_text() {
    for m in Universe::cubic6().monomials() {
        let back: Monomial = m.to_string().parse().unwrap();
        assert_eq!(&back, m);
    }
}

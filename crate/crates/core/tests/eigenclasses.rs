use cubicfour::cubicdomain::{MonomialSet, Signature};
use cubicfour::diaggroup::{partition_by_signatures, symmetry_group};
use cubicfour::smoothcert::{certify_over_q, generic_member, is_smooth_mod_p, parse_polynomial, PrimeField, DEFAULT_PRIMES};

fn set(text: &str) -> MonomialSet {
    text.parse().unwrap()
}

const CUBE_CLASS: &str =
    "x0^3, x1^3, x2^3, x4^2*x0, x3^2*x2, x5^2*x1, x0*x1*x2, x0*x3*x5, x1*x3*x4, x2*x4*x5";
const OTHER_CLASS: &str =
    "x4^2*x2, x0^2*x2, x5^2*x0, x1^2*x0, x2^2*x1, x3^2*x1, x1*x4*x5, x0*x3*x4, x2*x3*x5";

#[test]
fn z6_eigenclass_of_the_cube() {
    // diag(1, ω^2, ω^-2, ω, ω^3, ω^-1), ω a primitive sixth root
    let f = Signature::from_signed(6, &[0, 2, -2, 1, 3, -1]);
    let u = set(CUBE_CLASS).universe();
    let classes = partition_by_signatures(&[f], u);
    let cube = set("x0^3").first().unwrap();
    let (_, class) = classes.iter().find(|(_, s)| s.contains(&cube)).unwrap();
    assert_eq!(class, &set(CUBE_CLASS));
    assert!(u.is_admissible_mask(class.mask()));
}

#[test]
fn z6_class_is_recovered_from_its_own_group() {
    // The Z/6 acting on the x0^2*x2 class has the cube class as another eigenspace.
    let g = symmetry_group(&set(OTHER_CLASS)).unwrap();
    assert_eq!(g.structure.invariant_factors, vec![6]);
    assert_eq!(g.closure(), set(OTHER_CLASS));
    let parts = g.eigencharacter_partition().unwrap();
    let cube = set("x0^3").first().unwrap();
    let class = parts.values().find(|s| s.contains(&cube)).unwrap();
    assert_eq!(class, &set(CUBE_CLASS));
}

#[test]
fn cube_class_has_smooth_members() {
    let s = set(CUBE_CLASS);
    let smooth = [101u64, 1009].into_iter().any(|p| {
        let field = PrimeField::new(p).unwrap();
        (0..4).any(|seed| is_smooth_mod_p(&generic_member(&s, field, seed), p).unwrap().is_certified())
    });
    assert!(smooth);
}

#[test]
fn special_coefficient_forms_are_smooth() {
    for text in [
        "x0^3+x1^3+x2^2*x3+x3^2*x0+x4^2*x1+x5^2*x3+x2*x4*x5",
        "x0^3+x1^3+x2^2*x3+x3^2*x1+x4^2*x0-x4^2*x1+x5^2*x0+x3*x4*x5",
    ] {
        let f = parse_polynomial(text, 6).unwrap();
        assert!(certify_over_q(&f, &DEFAULT_PRIMES).unwrap().is_certified(), "{text}");
    }
}

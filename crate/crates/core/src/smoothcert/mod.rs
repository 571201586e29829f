//! Smoothness certificates for projective hypersurfaces via the Jacobian
//! criterion: X = V(F) is smooth iff the ideal (F, ∂F/∂x_0, …) cuts out only
//! the origin of affine space, i.e. has affine dimension 0.
//!
//! Certification runs over prime fields. A smooth reduction mod p implies the
//! discriminant is nonzero mod p, hence nonzero over Q. Failure mod p proves
//! nothing over Q on its own; singularity is only reported when a witness
//! point lifts to an exact rational singular point.

mod groebner;
mod poly;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use groebner::{groebner, normal_form, s_polynomial, GroebnerBasis};
pub use poly::{
    is_prime, parse_polynomial, partials, symmetric_lift, Field, Mono, PrimeField, RationalField,
    SparsePolynomial, MAX_POLY_VARS,
};

use crate::cubicdomain::{Monomial, MonomialSet};

/// Default prime sequence for certification.
pub const DEFAULT_PRIMES: [u64; 5] = [5, 7, 11, 101, 1009];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertError {
    #[error("{0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("prime {0} is not allowed (2 and 3 divide derivatives of cubic terms)")]
    BadPrime(u64),
    #[error("the zero polynomial defines no hypersurface")]
    ZeroPolynomial,
    #[error("exhaustive point scan needs p <= 7, got {0}")]
    PrimeTooLarge(u64),
    #[error("no primes supplied")]
    NoPrimes,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SmoothStatus {
    CertifiedSmooth { prime: u64 },
    SingularModulo { primes: Vec<u64> },
    Inconclusive { primes: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessVerdict {
    #[serde(flatten)]
    pub status: SmoothStatus,
    /// Singular point: residues mod p from [`is_smooth_mod_p`], or an exact
    /// integer point from [`certify_over_q`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i64>>,
}

impl SmoothnessVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self.status, SmoothStatus::CertifiedSmooth { .. })
    }
}

fn check_prime(p: u64) -> Result<PrimeField, CertError> {
    if p == 2 || p == 3 {
        return Err(CertError::BadPrime(p));
    }
    PrimeField::new(p)
}

/// Gröbner basis of (F, ∂F/∂x_i).
pub fn jacobian_basis<F: Field>(f: &SparsePolynomial<F>) -> GroebnerBasis<F> {
    let mut gens = vec![f.clone()];
    gens.extend(partials(f));
    groebner(&gens)
}

/// Jacobian-criterion check of V(F) over F_p.
pub fn is_smooth_mod_p(
    f: &SparsePolynomial<PrimeField>,
    p: u64,
) -> Result<SmoothnessVerdict, CertError> {
    let field = check_prime(p)?;
    if *f.field() != field {
        return Err(CertError::NotPrime(p));
    }
    if f.is_zero() {
        return Err(CertError::ZeroPolynomial);
    }
    let dim = jacobian_basis(f).affine_dimension();
    if dim <= 0 {
        return Ok(SmoothnessVerdict {
            status: SmoothStatus::CertifiedSmooth { prime: p },
            witness: None,
        });
    }
    let witness = if p <= 7 {
        singular_points_bruteforce(f)?
            .into_iter()
            .next()
            .map(|pt| pt.into_iter().map(|x| x as i64).collect())
    } else {
        None
    };
    Ok(SmoothnessVerdict { status: SmoothStatus::SingularModulo { primes: vec![p] }, witness })
}

/// Certifies V(F) over Q using the given primes in order.
pub fn certify_over_q(
    f: &SparsePolynomial<RationalField>,
    primes: &[u64],
) -> Result<SmoothnessVerdict, CertError> {
    if primes.is_empty() {
        return Err(CertError::NoPrimes);
    }
    if f.is_zero() {
        return Err(CertError::ZeroPolynomial);
    }
    let fields = primes.iter().map(|&p| check_prime(p)).collect::<Result<Vec<_>, _>>()?;
    let mut tried = Vec::new();
    let mut witnesses = Vec::new();
    for field in fields {
        let p = field.modulus();
        let Some(fp) = f.reduce_mod(field) else { continue };
        tried.push(p);
        if fp.is_zero() {
            continue;
        }
        let v = is_smooth_mod_p(&fp, p)?;
        if v.is_certified() {
            return Ok(v);
        }
        if let Some(w) = v.witness {
            witnesses.push((p, w));
        }
    }
    let derivs = partials(f);
    for (p, w) in witnesses {
        let lifted: Vec<i64> = w.iter().map(|&x| symmetric_lift(x as u64, p)).collect();
        let pt: Vec<BigRational> =
            lifted.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let singular = std::iter::once(f).chain(derivs.iter()).all(|g| g.eval(&pt) == RationalField.zero());
        if singular {
            return Ok(SmoothnessVerdict {
                status: SmoothStatus::SingularModulo { primes: tried },
                witness: Some(lifted),
            });
        }
    }
    Ok(SmoothnessVerdict { status: SmoothStatus::Inconclusive { primes: tried }, witness: None })
}

/// Converts a monomial of the combinatorial layer to a polynomial exponent.
pub fn mono_of(m: &Monomial) -> Mono {
    Mono::new(m.exponents())
}

/// Σ a_m·m over `s` with coefficients drawn uniformly from F_p \ {0}.
pub fn generic_member(s: &MonomialSet, field: PrimeField, seed: u64) -> SparsePolynomial<PrimeField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = field.modulus();
    let terms = s.iter().map(|m| (mono_of(&m), rng.gen_range(1..p))).collect();
    SparsePolynomial::from_terms(field, s.universe().vars(), terms)
}

/// Integer form Σ c_m·m over an explicit coefficient list.
pub fn integer_form(terms: &[(Monomial, i64)]) -> SparsePolynomial<RationalField> {
    let nvars = terms.first().map_or(6, |(m, _)| m.vars());
    let t: Vec<(Mono, i64)> = terms.iter().map(|(m, c)| (mono_of(m), *c)).collect();
    SparsePolynomial::from_integer_terms(nvars, &t)
}

/// Every projective point of P^{n-1}(F_p) where F and all partials vanish,
/// normalized so that the first nonzero coordinate is 1.
pub fn singular_points_bruteforce(
    f: &SparsePolynomial<PrimeField>,
) -> Result<Vec<Vec<u64>>, CertError> {
    let p = f.field().modulus();
    if p > 7 {
        return Err(CertError::PrimeTooLarge(p));
    }
    if f.is_zero() {
        return Err(CertError::ZeroPolynomial);
    }
    let n = f.nvars();
    let mut polys = vec![f.clone()];
    polys.extend(partials(f));
    polys.retain(|g| !g.is_zero());
    let mut out = Vec::new();
    for lead in 0..n {
        let free = n - lead - 1;
        let count = p.pow(free as u32);
        let mut pt = vec![0u64; n];
        pt[lead] = 1;
        for mut k in 0..count {
            for x in pt.iter_mut().skip(lead + 1) {
                *x = k % p;
                k /= p;
            }
            if polys.iter().all(|g| g.eval(&pt) == 0) {
                out.push(pt.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> SparsePolynomial<RationalField> {
        parse_polynomial(s, 6).unwrap()
    }

    fn fp(s: &str, p: u64) -> SparsePolynomial<PrimeField> {
        q(s).reduce_mod(PrimeField::new(p).unwrap()).unwrap()
    }

    const FERMAT: &str = "x0^3+x1^3+x2^3+x3^3+x4^3+x5^3";
    const FIVE_CUBES: &str = "x0^3+x1^3+x2^3+x3^3+x4^3";

    #[test]
    fn fermat_mod_5() {
        let v = is_smooth_mod_p(&fp(FERMAT, 5), 5).unwrap();
        assert_eq!(v.status, SmoothStatus::CertifiedSmooth { prime: 5 });
        assert!(singular_points_bruteforce(&fp(FERMAT, 5)).unwrap().is_empty());
    }

    #[test]
    fn missing_variable_is_singular() {
        let f = fp(FIVE_CUBES, 5);
        let v = is_smooth_mod_p(&f, 5).unwrap();
        assert_eq!(v.status, SmoothStatus::SingularModulo { primes: vec![5] });
        assert_eq!(v.witness, Some(vec![0, 0, 0, 0, 0, 1]));
        assert_eq!(singular_points_bruteforce(&f).unwrap(), vec![vec![0, 0, 0, 0, 0, 1]]);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(is_smooth_mod_p(&fp(FERMAT, 5), 3).unwrap_err(), CertError::BadPrime(3));
        assert_eq!(is_smooth_mod_p(&fp(FERMAT, 5), 2).unwrap_err(), CertError::BadPrime(2));
        assert!(is_smooth_mod_p(&fp(FERMAT, 5), 7).is_err());
        let zero = SparsePolynomial::zero(PrimeField::new(5).unwrap(), 6);
        assert_eq!(is_smooth_mod_p(&zero, 5).unwrap_err(), CertError::ZeroPolynomial);
        assert_eq!(singular_points_bruteforce(&zero).unwrap_err(), CertError::ZeroPolynomial);
        assert!(singular_points_bruteforce(&fp(FERMAT, 11)).is_err());
        assert_eq!(certify_over_q(&q(FERMAT), &[]).unwrap_err(), CertError::NoPrimes);
    }

    #[test]
    fn over_q() {
        let v = certify_over_q(&q(FERMAT), &[5, 7]).unwrap();
        assert_eq!(v.status, SmoothStatus::CertifiedSmooth { prime: 5 });
        let v = certify_over_q(&q("x0^3"), &[5, 7]).unwrap();
        assert_eq!(v.status, SmoothStatus::SingularModulo { primes: vec![5, 7] });
        let w = v.witness.unwrap();
        assert_eq!(w[0], 0);
        // Singular mod 5 and 7 only because of bad reduction: inconclusive.
        let v = certify_over_q(&q("35*x0^3 + x1^3 + x2^3 + x3^3 + x4^3 + x5^3"), &[5, 7]).unwrap();
        assert!(matches!(v.status, SmoothStatus::Inconclusive { .. }));
        let v = certify_over_q(&q("35*x0^3 + x1^3 + x2^3 + x3^3 + x4^3 + x5^3"), &[5, 7, 11]).unwrap();
        assert_eq!(v.status, SmoothStatus::CertifiedSmooth { prime: 11 });
    }

    #[test]
    fn entry_eighteen_form() {
        let f = "x0^3+x1^3+x2^2*x3+x3^2*x0+x4^2*x1+x5^2*x3+x2*x4*x5";
        assert!(is_smooth_mod_p(&fp(f, 5), 5).unwrap().is_certified());
    }

    #[test]
    fn generic_members_are_deterministic() {
        let s: MonomialSet = "x0^3, x1^3, x2^3, x3^3, x4^3, x5^3".parse().unwrap();
        let f101 = PrimeField::new(101).unwrap();
        let a = generic_member(&s, f101, 42);
        let b = generic_member(&s, f101, 42);
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        assert!(a.terms().iter().all(|(_, c)| (1..101).contains(c)));
    }

    #[test]
    fn euler_relation() {
        let f = fp("x0^2*x1 + 2*x1^2*x2 + x2^2*x3 + 3*x3^2*x4 + x4^2*x5 + x5^2*x0", 7);
        let basis = groebner(&partials(&f));
        assert!(basis.normal_form(&f.scale(&3)).is_zero());
    }
}

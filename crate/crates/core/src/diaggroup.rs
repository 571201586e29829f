//! The group of diagonal projective automorphisms preserving all monomials of
//! a support up to a common scalar, and the closure of the support under it.
//!
//! For a set A with base monomial m0, the differences m − m0 span a lattice D
//! inside the sum-zero sublattice of Z^n. The group is the character dual of
//! Z^n / (D + Z·e0): the extra row e0 pins c_0 = 0, which is exactly the
//! projective normalization of signatures. (Adding the all-ones vector instead
//! would not do that: it leaves a spurious Z/(deg) factor in the cokernel.)

use std::collections::BTreeMap;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cubicdomain::{weight, Monomial, MonomialSet, Signature, Universe};
use crate::lattice::{self, AbelianGroupStructure, IntMatrix, LatticeBasis, LatticeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagError {
    #[error("monomial set is empty")]
    EmptySet,
    #[error("group has free rank {0} (continuous symmetry)")]
    Infinite(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Clone, Debug)]
pub struct DiagonalSymmetryGroup {
    pub structure: AbelianGroupStructure,
    pub generator_signatures: Vec<Signature>,
    pub base_monomial: Monomial,
    /// Rows m − m0 for m ∈ A \ {m0}, then e0.
    pub difference_lattice: IntMatrix,
    pub set: MonomialSet,
}

impl DiagonalSymmetryGroup {
    pub fn is_finite(&self) -> bool {
        self.structure.is_finite()
    }

    /// Positive free rank: a torus acts, so no member of the family is smooth.
    pub fn has_continuous_symmetry(&self) -> bool {
        self.structure.free_rank > 0
    }

    pub fn order(&self) -> Option<u64> {
        self.structure.order()
    }

    /// {m : m − m0 ∈ D}, i.e. the monomials with the same weight as A under
    /// every element of the group (torus included when infinite).
    pub fn closure(&self) -> MonomialSet {
        let u = self.set.universe();
        let basis = LatticeBasis::new(&self.difference_lattice);
        let base = self.base_monomial.exponents();
        let mut mask = 0u64;
        for (k, m) in u.monomials().iter().enumerate() {
            let diff: Vec<BigInt> = m
                .exponents()
                .iter()
                .zip(base)
                .map(|(&a, &b)| BigInt::from(a as i64 - b as i64))
                .collect();
            if basis.contains(&diff).expect("dimensions agree") {
                mask |= 1 << k;
            }
        }
        u.set(mask)
    }

    /// Each generator as (root order d, exponents c with c_0 = 0).
    pub fn generator_matrices(&self) -> Result<Vec<(u64, Vec<u64>)>, DiagError> {
        if !self.is_finite() {
            return Err(DiagError::Infinite(self.structure.free_rank));
        }
        Ok(self
            .generator_signatures
            .iter()
            .map(|s| (s.modulus, s.exponents.clone()))
            .collect())
    }

    /// All monomials of the universe grouped by their joint weight vector
    /// under the generators.
    pub fn eigencharacter_partition(
        &self,
    ) -> Result<BTreeMap<Vec<u64>, MonomialSet>, DiagError> {
        if !self.is_finite() {
            return Err(DiagError::Infinite(self.structure.free_rank));
        }
        Ok(partition_by_signatures(&self.generator_signatures, self.set.universe()))
    }
}

/// Groups the monomials of `universe` by joint weight under `sigs`.
pub fn partition_by_signatures(
    sigs: &[Signature],
    universe: &'static Universe,
) -> BTreeMap<Vec<u64>, MonomialSet> {
    let mut classes: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for (k, m) in universe.monomials().iter().enumerate() {
        let key: Vec<u64> = sigs.iter().map(|s| weight(s, m)).collect();
        *classes.entry(key).or_default() |= 1 << k;
    }
    classes.into_iter().map(|(k, mask)| (k, universe.set(mask))).collect()
}

pub fn symmetry_group(a: &MonomialSet) -> Result<DiagonalSymmetryGroup, DiagError> {
    let base = a.first().ok_or(DiagError::EmptySet)?;
    let n = a.universe().vars();
    let b = base.exponents();
    let mut rows: Vec<Vec<i64>> = a
        .iter()
        .skip(1)
        .map(|m| m.exponents().iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect())
        .collect();
    let mut e0 = vec![0i64; n];
    e0[0] = 1;
    rows.push(e0);
    let lat = IntMatrix::from_rows(n, &rows)?;
    let mut structure = lattice::cokernel_structure(&lat, n)?;
    let generators: Vec<Signature> =
        structure.generators.iter().map(Signature::unit_normalized).collect();
    structure.generators = generators.clone();
    Ok(DiagonalSymmetryGroup {
        structure,
        generator_signatures: generators,
        base_monomial: base,
        difference_lattice: lat,
        set: *a,
    })
}

pub fn closure(a: &MonomialSet) -> Result<MonomialSet, DiagError> {
    Ok(symmetry_group(a)?.closure())
}

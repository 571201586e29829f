//! Exact integer linear algebra: Smith and Hermite normal forms, cokernels of
//! integer lattices, and the finite abelian groups they present.
//!
//! Everything here works over arbitrary-precision integers. The matrices that
//! show up in practice are tiny (at most 7×6), but intermediate entries of an
//! elimination can still outgrow machine words.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubicdomain::Signature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{entries} entries cannot fill a {rows}x{cols} matrix")]
    Shape { rows: usize, cols: usize, entries: usize },
    #[error("group has free rank {0}; a finite group is required")]
    Infinite(usize),
}

/// Dense integer matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self, LatticeError> {
        if data.len() != rows * cols {
            return Err(LatticeError::Shape { rows, cols, entries: data.len() });
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small-integer rows; every row must have `cols` entries.
    pub fn from_rows(cols: usize, rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LatticeError::DimensionMismatch { expected: cols, got: r.len() });
            }
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigInt> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn push_row(&mut self, row: &[BigInt]) -> Result<(), LatticeError> {
        if row.len() != self.cols {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: row.len() });
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, LatticeError> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    /// Determinant of a square matrix by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::DimensionMismatch { expected: self.rows, got: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        Ok(sign * a.get(n - 1, n - 1))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for c in 0..self.cols {
            let v = &self.data[src * self.cols + c] * k;
            self.data[dst * self.cols + c] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for r in 0..self.rows {
            let v = &self.data[r * self.cols + src] * k;
            self.data[r * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let idx = r * self.cols + c;
            self.data[idx] = -std::mem::take(&mut self.data[idx]);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal with d_1 | d_2 | ….
/// `v_inv` is carried along because cokernel generators are its rows.
#[derive(Clone, Debug)]
pub struct SnfDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfDecomposition {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> SnfDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut v_inv = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        // Global minimum of the trailing block as the first pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = s.get(i, j);
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        loop {
            // Bring the smallest nonzero entry of row t / column t to the pivot.
            let mut bi = t;
            let mut bj = t;
            for i in t..rows {
                let x = s.get(i, t);
                if !x.is_zero() && (s.get(bi, bj).is_zero() || x.abs() < s.get(bi, bj).abs()) {
                    (bi, bj) = (i, t);
                }
            }
            for j in t..cols {
                let x = s.get(t, j);
                if !x.is_zero() && (s.get(bi, bj).is_zero() || x.abs() < s.get(bi, bj).abs()) {
                    (bi, bj) = (t, j);
                }
            }
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            v_inv.swap_rows(t, bj);

            let pivot = s.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..rows {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -(s.get(i, t) / &pivot);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -(s.get(t, j) / &pivot);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                v_inv.add_row(t, j, &-&q);
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            // Divisibility chain: fold an offending row into the pivot row.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !s.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SnfDecomposition { u, s, v, v_inv }
}

/// Row-style Hermite normal form: nonzero rows in echelon form, positive
/// pivots, entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let mut h = m.clone();
    let mut pr = 0;
    for c in 0..h.cols {
        if pr == h.rows {
            break;
        }
        loop {
            let best = (pr..h.rows)
                .filter(|&i| !h.get(i, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
            let Some(b) = best else { break };
            h.swap_rows(pr, b);
            let pivot = h.get(pr, c).clone();
            let mut clean = true;
            for i in pr + 1..h.rows {
                if h.get(i, c).is_zero() {
                    continue;
                }
                let q = -(h.get(i, c) / &pivot);
                h.add_row(i, pr, &q);
                clean &= h.get(i, c).is_zero();
            }
            if clean {
                break;
            }
        }
        if pr < h.rows && !h.get(pr, c).is_zero() {
            if h.get(pr, c).is_negative() {
                h.negate_row(pr);
            }
            let pivot = h.get(pr, c).clone();
            for i in 0..pr {
                let q = -h.get(i, c).div_floor(&pivot);
                if !q.is_zero() {
                    h.add_row(i, pr, &q);
                }
            }
            pr += 1;
        }
    }
    let data = h.data[..pr * h.cols].to_vec();
    IntMatrix { rows: pr, cols: h.cols, data }
}

/// A lattice given by its Hermite basis, for repeated membership queries.
#[derive(Clone, Debug)]
pub struct LatticeBasis {
    hnf: IntMatrix,
}

impl LatticeBasis {
    pub fn new(generators: &IntMatrix) -> Self {
        LatticeBasis { hnf: hermite_normal_form(generators) }
    }

    pub fn rank(&self) -> usize {
        self.hnf.rows
    }

    pub fn hnf(&self) -> &IntMatrix {
        &self.hnf
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool, LatticeError> {
        if v.len() != self.hnf.cols {
            return Err(LatticeError::DimensionMismatch { expected: self.hnf.cols, got: v.len() });
        }
        let mut w = v.to_vec();
        let mut col = 0;
        for r in 0..self.hnf.rows {
            let row = self.hnf.row(r);
            let pc = row.iter().position(|x| !x.is_zero()).expect("hnf rows are nonzero");
            if w[col..pc].iter().any(|x| !x.is_zero()) {
                return Ok(false);
            }
            let (q, rem) = w[pc].div_rem(&row[pc]);
            if !rem.is_zero() {
                return Ok(false);
            }
            if !q.is_zero() {
                for (wi, hi) in w.iter_mut().zip(row) {
                    *wi -= &q * hi;
                }
            }
            col = pc + 1;
        }
        Ok(w.iter().all(|x| x.is_zero()))
    }
}

/// Is `v` in the integer row span of `l`?
pub fn lattice_contains(l: &IntMatrix, v: &[BigInt]) -> Result<bool, LatticeError> {
    LatticeBasis::new(l).contains(v)
}

/// Finite abelian group (possibly with a free part) in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupStructure {
    pub invariant_factors: Vec<u64>,
    pub free_rank: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Signature>,
}

impl AbelianGroupStructure {
    pub fn trivial() -> Self {
        AbelianGroupStructure { invariant_factors: vec![], free_rank: 0, generators: vec![] }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.invariant_factors.iter().product())
    }

    pub fn exponent(&self) -> Option<u64> {
        self.is_finite().then(|| self.invariant_factors.last().copied().unwrap_or(1))
    }

    /// Same group with generator witnesses dropped; equality of these is isomorphism.
    pub fn shape(&self) -> AbelianGroupStructure {
        AbelianGroupStructure {
            invariant_factors: self.invariant_factors.clone(),
            free_rank: self.free_rank,
            generators: vec![],
        }
    }

    pub fn is_isomorphic(&self, other: &AbelianGroupStructure) -> bool {
        self.invariant_factors == other.invariant_factors && self.free_rank == other.free_rank
    }

    /// p ↦ exponents of the p-primary cyclic summands, largest first.
    pub fn primary_parts(&self) -> BTreeMap<u64, Vec<u32>> {
        let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &d in &self.invariant_factors {
            for (p, e) in factorize(d) {
                parts.entry(p).or_default().push(e);
            }
        }
        for v in parts.values_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        parts
    }

    /// Primary-decomposition rendering, e.g. `Z/3 ⊕ Z/7` for Z/21.
    pub fn primary_string(&self) -> String {
        let mut terms = Vec::new();
        for (p, exps) in self.primary_parts() {
            for e in exps.iter().rev() {
                terms.push(format!("Z/{}", p.pow(*e)));
            }
        }
        for _ in 0..self.free_rank {
            terms.push("Z".to_string());
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" ⊕ ")
        }
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<String> =
            self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        for _ in 0..self.free_rank {
            terms.push("Z".to_string());
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" ⊕ "))
        }
    }
}

/// Trial-division factorization; inputs here are group orders, so small.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Normalizes a multiset of cyclic orders to the invariant-factor chain.
/// A factor of 0 stands for Z; factors of 1 are dropped.
pub fn canonical_group(factors: &[u64]) -> AbelianGroupStructure {
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    let mut free_rank = 0;
    for &d in factors {
        if d == 0 {
            free_rank += 1;
            continue;
        }
        for (p, e) in factorize(d) {
            parts.entry(p).or_default().push(e);
        }
    }
    let len = parts.values().map(Vec::len).max().unwrap_or(0);
    let mut chain = vec![1u64; len];
    for (p, mut exps) in parts {
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (k, e) in exps.into_iter().enumerate() {
            chain[k] *= p.pow(e);
        }
    }
    chain.reverse();
    AbelianGroupStructure { invariant_factors: chain, free_rank, generators: vec![] }
}

/// Does `g` embed into `h`? Per prime, the sorted p-exponent sequence of `g`
/// must be dominated term by term by that of `h`.
pub fn embeds(g: &AbelianGroupStructure, h: &AbelianGroupStructure) -> Result<bool, LatticeError> {
    for grp in [g, h] {
        if grp.free_rank > 0 {
            return Err(LatticeError::Infinite(grp.free_rank));
        }
    }
    let hp = h.primary_parts();
    Ok(g.primary_parts().iter().all(|(p, ge)| match hp.get(p) {
        None => false,
        Some(he) => ge.len() <= he.len() && ge.iter().zip(he).all(|(a, b)| a <= b),
    }))
}

/// Invariant factors of Z^ambient_rank / rowspan(m). Generator witnesses are
/// the dual characters read off the columns of V: the i-th one has order
/// exactly d_i and pairs to 1/d_i with the i-th cokernel generator.
pub fn cokernel_structure(
    m: &IntMatrix,
    ambient_rank: usize,
) -> Result<AbelianGroupStructure, LatticeError> {
    if m.cols != ambient_rank {
        return Err(LatticeError::DimensionMismatch { expected: ambient_rank, got: m.cols });
    }
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let mut factors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d.is_zero() || d.is_one() {
            continue;
        }
        let d64 = d.to_u64().expect("invariant factor fits in u64");
        factors.push(d64);
        let exps: Vec<u64> = snf
            .v
            .column(i)
            .iter()
            .map(|x| x.mod_floor(d).to_u64().expect("residue fits"))
            .collect();
        generators.push(Signature::new(d64, exps));
    }
    Ok(AbelianGroupStructure {
        invariant_factors: factors,
        free_rank: ambient_rank - rank,
        generators,
    })
}

/// Integer lifts of the torsion generators of the cokernel (rows of V⁻¹),
/// paired with their orders.
pub fn cokernel_lifts(m: &IntMatrix) -> Vec<(BigInt, Vec<BigInt>)> {
    let snf = smith_normal_form(m);
    snf.diagonal()
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero() && !d.is_one())
        .map(|(i, d)| (d.clone(), snf.v_inv.row(i).to_vec()))
        .collect()
}

//! Monomial matrices (a permutation times a diagonal of roots of unity), the
//! Pauli generators P_n and W_n, tensor embeddings, and the cubic forms that
//! a finite abelian subgroup of PGL(n) built from them preserves up to scalar.
//!
//! A matrix g acts on variables by g(z_i) = ζ_N^{phase[i]} · z_{perm[i]} and on
//! polynomials as the induced ring automorphism. Composition `a.compose(b)` is
//! the matrix product a·b, i.e. b is applied first.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cubicdomain::{DomainError, Monomial, MonomialSet, Universe, MAX_VARS};
use crate::lattice::{canonical_group, factorize, AbelianGroupStructure};
use crate::par::{self, Mode};
use crate::smoothcert::{
    is_smooth_mod_p, is_prime, mono_of, CertError, PrimeField, SmoothStatus, SmoothnessVerdict,
    SparsePolynomial,
};

const CASES: &str = include_str!("../data/pauli_cases.txt");

/// Upper bound on the number of projective group elements enumerated.
pub const MAX_GROUP_ORDER: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("matrix sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("matrix size must be in 1..={max}, got {0}", max = MAX_VARS)]
    BadSize(usize),
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("root of unity order must be positive")]
    ZeroRoot,
    #[error("no generators given")]
    Empty,
    #[error("generators {0} and {1} do not commute up to a scalar")]
    NonAbelian(usize, usize),
    #[error("projective group has more than {0} elements")]
    TooLarge(usize),
    #[error("element is not in the Pauli group of size {0}")]
    NotPauli(usize),
    #[error("cannot parse {text:?}: {message}")]
    Parse { text: String, message: String },
    #[error("case table line {line}: {message}")]
    CaseTable { line: usize, message: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

fn parse_err(text: &str, message: impl Into<String>) -> PauliError {
    PauliError::Parse { text: text.to_string(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialMatrix {
    perm: Vec<usize>,
    phase: Vec<u64>,
    root: u64,
}

impl MonomialMatrix {
    pub fn new(perm: Vec<usize>, phase: Vec<u64>, root: u64) -> Result<Self, PauliError> {
        let n = perm.len();
        if n == 0 || n > MAX_VARS {
            return Err(PauliError::BadSize(n));
        }
        if phase.len() != n {
            return Err(PauliError::SizeMismatch(n, phase.len()));
        }
        if root == 0 {
            return Err(PauliError::ZeroRoot);
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(PauliError::NotPermutation(n));
            }
        }
        let phase = phase.into_iter().map(|x| x % root).collect();
        Ok(MonomialMatrix { perm, phase, root })
    }

    pub fn identity(n: usize) -> Self {
        MonomialMatrix { perm: (0..n).collect(), phase: vec![0; n], root: 1 }
    }

    pub fn diagonal(root: u64, phase: Vec<u64>) -> Result<Self, PauliError> {
        Self::new((0..phase.len()).collect(), phase, root)
    }

    /// P_n: z_i ↦ z_{i+1 mod n}.
    pub fn shift(n: usize) -> Self {
        MonomialMatrix { perm: (0..n).map(|i| (i + 1) % n).collect(), phase: vec![0; n], root: 1 }
    }

    /// W_n: z_i ↦ ζ_n^i z_i.
    pub fn clock(n: usize) -> Self {
        MonomialMatrix { perm: (0..n).collect(), phase: (0..n as u64).collect(), root: n as u64 }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phase(&self) -> &[u64] {
        &self.phase
    }

    pub fn root(&self) -> u64 {
        self.root
    }

    /// Same matrix with phases expressed over ζ_r; `r` must be a multiple of the root.
    pub fn over_root(&self, r: u64) -> Self {
        assert!(r.is_multiple_of(self.root), "{r} is not a multiple of {}", self.root);
        let k = r / self.root;
        MonomialMatrix { perm: self.perm.clone(), phase: self.phase.iter().map(|x| x * k).collect(), root: r }
    }

    /// Smallest root over which the phases can be written.
    pub fn reduced(&self) -> Self {
        let g = self.phase.iter().fold(self.root, |g, &x| g.gcd(&x));
        MonomialMatrix {
            perm: self.perm.clone(),
            phase: self.phase.iter().map(|x| x / g).collect(),
            root: self.root / g,
        }
    }

    /// self · other (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self, PauliError> {
        if self.size() != other.size() {
            return Err(PauliError::SizeMismatch(self.size(), other.size()));
        }
        let r = self.root.lcm(&other.root);
        let (a, b) = (self.over_root(r), other.over_root(r));
        let perm = b.perm.iter().map(|&j| a.perm[j]).collect();
        let phase = (0..b.size()).map(|i| (b.phase[i] + a.phase[b.perm[i]]) % r).collect();
        Ok(MonomialMatrix { perm, phase, root: r }.reduced())
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::identity(self.size());
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base).expect("same size");
            }
            base = base.compose(&base).expect("same size");
            k >>= 1;
        }
        acc
    }

    pub fn inverse(&self) -> Self {
        let n = self.size();
        let mut perm = vec![0; n];
        let mut phase = vec![0; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            phase[self.perm[i]] = (self.root - self.phase[i]) % self.root;
        }
        MonomialMatrix { perm, phase, root: self.root }
    }

    /// If g = ζ_root^s · I, returns s.
    pub fn scalar_exponent(&self) -> Option<u64> {
        let id = self.perm.iter().enumerate().all(|(i, &p)| i == p);
        (id && self.phase.iter().all(|&x| x == self.phase[0])).then_some(self.phase[0])
    }

    pub fn is_scalar(&self) -> bool {
        self.scalar_exponent().is_some()
    }

    /// Order in PGL(n).
    pub fn projective_order(&self) -> u64 {
        let mut k = 1;
        let mut g = self.clone();
        while !g.is_scalar() {
            g = g.compose(self).expect("same size");
            k += 1;
        }
        k
    }

    pub fn commutes_projectively(&self, other: &Self) -> Result<bool, PauliError> {
        let c = self.compose(other)?.compose(&self.inverse())?.compose(&other.inverse())?;
        Ok(c.is_scalar())
    }

    /// Canonical representative of the class modulo scalars, over ζ_r.
    fn projective_key(&self, r: u64) -> (Vec<usize>, Vec<u64>) {
        let g = self.over_root(r);
        let p0 = g.phase[0];
        (g.perm.clone(), g.phase.iter().map(|&x| (x + r - p0) % r).collect())
    }

    /// g(m) = ζ_root^e · m'; returns (m', e).
    pub fn act_on_monomial(&self, m: &Monomial) -> (Monomial, u64) {
        let n = self.size();
        assert_eq!(m.vars(), n, "monomial lives in {} variables", m.vars());
        let mut exps = vec![0u8; n];
        let mut e = 0u64;
        for (i, &k) in m.exponents().iter().enumerate() {
            exps[self.perm[i]] += k;
            e += k as u64 * self.phase[i];
        }
        (Monomial::new(&exps), e % self.root)
    }

    /// Applies g to a polynomial over F_p, where `zeta` has multiplicative
    /// order `order` and the root divides `order`.
    pub fn apply_mod_p(
        &self,
        f: &SparsePolynomial<PrimeField>,
        zeta: u64,
        order: u64,
    ) -> SparsePolynomial<PrimeField> {
        assert!(order.is_multiple_of(self.root), "ζ of order {order} cannot express ζ_{}", self.root);
        let field = *f.field();
        let scale = order / self.root;
        let n = self.size();
        let terms = f
            .terms()
            .iter()
            .map(|(mono, c)| {
                let mut exps = [0u8; MAX_VARS];
                let mut e = 0u64;
                for i in 0..n {
                    exps[self.perm[i]] += mono.exp(i);
                    e += mono.exp(i) as u64 * self.phase[i];
                }
                let w = field.pow(zeta, (e * scale) % order);
                (crate::smoothcert::Mono::new(&exps[..n]), c * w % field.modulus())
            })
            .collect();
        SparsePolynomial::from_terms(field, f.nvars(), terms)
    }

    /// (a, b) with g ≡ P_n^a W_n^b modulo scalars, if g is a Pauli element.
    pub fn pauli_coords(&self) -> Option<(u64, u64)> {
        let n = self.size() as u64;
        let a = self.perm[0] as u64;
        if (0..self.size()).any(|i| self.perm[i] as u64 != (i as u64 + a) % n) {
            return None;
        }
        let r = self.root.lcm(&n);
        let g = self.over_root(r);
        let unit = r / n;
        let d1 = (g.phase[1 % self.size()] + r - g.phase[0]) % r;
        if !d1.is_multiple_of(unit) {
            return None;
        }
        let b = d1 / unit;
        let ok = (0..self.size() as u64)
            .all(|i| (g.phase[i as usize] + r - g.phase[0]) % r == (b * i * unit) % r);
        ok.then_some((a, b))
    }
}

impl fmt::Display for MonomialMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = (0..self.size())
            .map(|i| match self.phase[i] {
                0 => format!("z{}", self.perm[i]),
                e => format!("w{}^{}*z{}", self.root, e, self.perm[i]),
            })
            .collect();
        write!(f, "({})", terms.join(", "))
    }
}

/// P_n and W_n.
pub fn pauli_generators(n: usize) -> (MonomialMatrix, MonomialMatrix) {
    (MonomialMatrix::shift(n), MonomialMatrix::clock(n))
}

/// How z-indices are laid out for a tensor product A ⊗ B of an m×m and a k×k matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TensorOrder {
    /// z = x + m·y.
    XFastest,
    /// z = y + k·x.
    YFastest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TensorConvention {
    pub m: usize,
    pub k: usize,
    pub order: TensorOrder,
}

impl TensorConvention {
    pub fn x_fastest(m: usize, k: usize) -> Self {
        TensorConvention { m, k, order: TensorOrder::XFastest }
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        match self.order {
            TensorOrder::XFastest => x + self.m * y,
            TensorOrder::YFastest => y + self.k * x,
        }
    }
}

/// A ⊗ B acting on z_{x,y} = x_x · y_y.
pub fn tensor_embed(
    a: &MonomialMatrix,
    b: &MonomialMatrix,
    conv: TensorConvention,
) -> Result<MonomialMatrix, PauliError> {
    if a.size() != conv.m {
        return Err(PauliError::SizeMismatch(conv.m, a.size()));
    }
    if b.size() != conv.k {
        return Err(PauliError::SizeMismatch(conv.k, b.size()));
    }
    let n = conv.m * conv.k;
    if n > MAX_VARS {
        return Err(PauliError::BadSize(n));
    }
    let r = a.root.lcm(&b.root);
    let (a, b) = (a.over_root(r), b.over_root(r));
    let mut perm = vec![0; n];
    let mut phase = vec![0; n];
    for x in 0..conv.m {
        for y in 0..conv.k {
            let i = conv.index(x, y);
            perm[i] = conv.index(a.perm[x], b.perm[y]);
            phase[i] = (a.phase[x] + b.phase[y]) % r;
        }
    }
    Ok(MonomialMatrix { perm, phase, root: r }.reduced())
}

/// Parses a word such as `P6*W6^2` (left factor applied last).
pub fn parse_word(text: &str) -> Result<MonomialMatrix, PauliError> {
    let mut acc: Option<MonomialMatrix> = None;
    for factor in text.split('*').map(str::trim) {
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (b, e.trim().parse::<u64>().map_err(|_| parse_err(text, "bad exponent"))?),
            None => (factor, 1),
        };
        let mut chars = base.chars();
        let kind = chars.next().ok_or_else(|| parse_err(text, "empty factor"))?;
        let n: usize = chars.as_str().parse().map_err(|_| parse_err(text, "expected P<n> or W<n>"))?;
        if n == 0 || n > MAX_VARS {
            return Err(PauliError::BadSize(n));
        }
        let g = match kind.to_ascii_uppercase() {
            'P' => MonomialMatrix::shift(n),
            'W' => MonomialMatrix::clock(n),
            _ => return Err(parse_err(text, "expected P<n> or W<n>")),
        }
        .pow(exp);
        acc = Some(match acc {
            None => g,
            Some(a) => a.compose(&g)?,
        });
    }
    acc.ok_or_else(|| parse_err(text, "empty word"))
}

impl FromStr for MonomialMatrix {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_word(s)
    }
}

fn common_root(gens: &[MonomialMatrix]) -> u64 {
    gens.iter().fold(1u64, |r, g| r.lcm(&g.root))
}

fn check_generators(gens: &[MonomialMatrix]) -> Result<usize, PauliError> {
    let n = gens.first().ok_or(PauliError::Empty)?.size();
    for g in gens {
        if g.size() != n {
            return Err(PauliError::SizeMismatch(n, g.size()));
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_projectively(&gens[j])? {
                return Err(PauliError::NonAbelian(i, j));
            }
        }
    }
    Ok(n)
}

/// The image in PGL(n) of the group generated by `generators`.
#[derive(Clone, Debug)]
pub struct ProjectiveGroup {
    pub generators: Vec<MonomialMatrix>,
    /// One representative per class modulo scalars, identity first.
    pub elements: Vec<MonomialMatrix>,
    pub structure: AbelianGroupStructure,
}

impl ProjectiveGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub fn projective_group(generators: &[MonomialMatrix]) -> Result<ProjectiveGroup, PauliError> {
    let n = check_generators(generators)?;
    // every product's phases live over the common root of the generators
    let r = common_root(generators);
    let id = MonomialMatrix::identity(n);
    let mut seen: HashMap<(Vec<usize>, Vec<u64>), usize> = HashMap::new();
    seen.insert(id.projective_key(r), 0);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let h = elements[i].compose(g)?;
            let key = h.projective_key(r);
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
                if elements.len() >= MAX_GROUP_ORDER {
                    return Err(PauliError::TooLarge(MAX_GROUP_ORDER));
                }
                e.insert(elements.len());
                queue.push_back(elements.len());
                elements.push(h);
            }
        }
    }
    let orders: Vec<u64> = elements.iter().map(MonomialMatrix::projective_order).collect();
    let structure = structure_from_orders(&orders);
    Ok(ProjectiveGroup { generators: generators.to_vec(), elements, structure })
}

/// Invariant factors of a finite abelian group from the multiset of its
/// element orders, via |G[p^k]| for each prime p.
pub fn structure_from_orders(orders: &[u64]) -> AbelianGroupStructure {
    let total = orders.len() as u64;
    let mut cyclic = Vec::new();
    for (p, _) in factorize(total) {
        let mut ranks = Vec::new();
        let mut prev = 0u32;
        let mut pk = 1u64;
        loop {
            pk *= p;
            let count = orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
            let mut log = 0u32;
            let mut c = count;
            while c > 1 {
                c /= p;
                log += 1;
            }
            if log == prev {
                break;
            }
            ranks.push(log - prev);
            prev = log;
        }
        let r1 = ranks.first().copied().unwrap_or(0);
        for j in 1..=r1 {
            let e = ranks.iter().filter(|&&r| r >= j).count() as u32;
            cyclic.push(p.pow(e));
        }
    }
    canonical_group(&cyclic)
}

/// A space of forms sharing one character: g_j(F) = ζ_root^{characters[j]} F.
/// Each orbit contributes a single free coefficient c, and the monomial m of
/// the orbit enters with coefficient c·ζ_root^{b_m}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantFamily {
    pub root: u64,
    pub characters: Vec<u64>,
    pub orbits: Vec<Vec<(Monomial, u64)>>,
}

impl InvariantFamily {
    pub fn dimension(&self) -> usize {
        self.orbits.len()
    }

    pub fn support(&self) -> MonomialSet {
        let ms = self.orbits.iter().flatten().map(|(m, _)| *m);
        MonomialSet::from_monomials(ms).expect("family monomials share a universe")
    }

    /// Random member over F_p, with `zeta` of multiplicative order `root`.
    pub fn member_mod_p(&self, field: PrimeField, zeta: u64, seed: u64) -> SparsePolynomial<PrimeField> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = field.modulus();
        let nvars = self.orbits[0][0].0.vars();
        let mut terms = Vec::new();
        for orbit in &self.orbits {
            let c = rng.gen_range(1..p);
            for (m, b) in orbit {
                terms.push((mono_of(m), c * field.pow(zeta, *b) % p));
            }
        }
        SparsePolynomial::from_terms(field, nvars, terms)
    }

    /// Looks for a smooth member at primes p ≡ 1 (mod root), where ζ_root
    /// reduces to an element of F_p. Smoothness of the reduction of a form
    /// over Z[ζ] at a degree-one prime implies smoothness in characteristic 0.
    pub fn certify(&self, primes: usize, seeds: u64, seed: u64) -> Result<SmoothnessVerdict, PauliError> {
        let ps = split_primes(self.root, primes);
        for &p in &ps {
            let field = PrimeField::new(p)?;
            let zeta = element_of_order(p, self.root);
            for k in 0..seeds {
                let f = self.member_mod_p(field, zeta, seed ^ (p << 20) ^ k);
                if is_smooth_mod_p(&f, p)?.is_certified() {
                    return Ok(SmoothnessVerdict {
                        status: SmoothStatus::CertifiedSmooth { prime: p },
                        witness: None,
                    });
                }
            }
        }
        Ok(SmoothnessVerdict { status: SmoothStatus::Inconclusive { primes: ps }, witness: None })
    }
}

/// The first `count` primes above 100 congruent to 1 modulo `m`.
pub fn split_primes(m: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = m * (100 / m + 1) + 1;
    while out.len() < count {
        if p > 3 && is_prime(p) {
            out.push(p);
        }
        p += m;
    }
    out
}

/// An element of multiplicative order exactly `m` in F_p; requires m | p − 1.
pub fn element_of_order(p: u64, m: u64) -> u64 {
    assert!((p - 1).is_multiple_of(m), "{m} does not divide {p} - 1");
    let field = PrimeField::new(p).expect("prime");
    let qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    let g = (2..p)
        .find(|&g| qs.iter().all(|q| field.pow(g, (p - 1) / q) != 1))
        .expect("F_p has a primitive root");
    field.pow(g, (p - 1) / m)
}

/// All character families of cubic forms in n variables preserved up to
/// scalar by every generator. Returns an error if the generators do not
/// commute modulo scalars.
pub fn invariant_cubics(generators: &[MonomialMatrix]) -> Result<Vec<InvariantFamily>, PauliError> {
    invariant_forms(generators, 3)
}

pub fn invariant_forms(
    generators: &[MonomialMatrix],
    degree: usize,
) -> Result<Vec<InvariantFamily>, PauliError> {
    let n = check_generators(generators)?;
    let universe = Universe::get(n, degree)?;
    let nroot = common_root(generators);
    let orders: Vec<u64> = generators.iter().map(MonomialMatrix::projective_order).collect();
    let big_l = orders.iter().fold(1u64, |a, b| a.lcm(b));
    let m_root = nroot * big_l;
    let gens: Vec<MonomialMatrix> = generators.iter().map(|g| g.over_root(m_root)).collect();

    // action tables: target index and phase, per generator
    let tables: Vec<Vec<(usize, u64)>> = gens
        .iter()
        .map(|g| {
            universe
                .monomials()
                .iter()
                .map(|m| {
                    let (t, e) = g.act_on_monomial(m);
                    (universe.index_of(&t).expect("degree is preserved"), e)
                })
                .collect()
        })
        .collect();

    // g^k = ζ_N^s·I acts on degree-d forms by ζ_N^{ds}, so kλ ≡ ds·(M/N) (mod M).
    let candidates: Vec<Vec<u64>> = generators
        .iter()
        .zip(&orders)
        .map(|(g, &k)| {
            let s = g.pow(k).over_root(nroot).scalar_exponent().expect("power is scalar");
            let c = (degree as u64 * s % nroot) * (m_root / nroot) % m_root;
            let step = m_root / k;
            (0..k).map(|j| (c / k + j * step) % m_root).collect()
        })
        .collect();

    let orbits = orbit_partition(universe.len(), &tables);
    let mut families = Vec::new();
    let mut chars = vec![0u64; gens.len()];
    let mut idx = vec![0usize; gens.len()];
    loop {
        for (j, &i) in idx.iter().enumerate() {
            chars[j] = candidates[j][i];
        }
        let fam_orbits: Vec<Vec<(Monomial, u64)>> = orbits
            .iter()
            .filter_map(|orbit| solve_orbit(orbit[0], &tables, &chars, m_root))
            .map(|b| b.into_iter().map(|(i, e)| (universe.monomial(i), e)).collect())
            .collect();
        if !fam_orbits.is_empty() {
            families.push(InvariantFamily { root: m_root, characters: chars.clone(), orbits: fam_orbits });
        }
        // odometer over the candidate tuples
        let mut j = 0;
        while j < idx.len() {
            idx[j] += 1;
            if idx[j] < candidates[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == idx.len() {
            break;
        }
    }
    Ok(families)
}

fn orbit_partition(len: usize, tables: &[Vec<(usize, u64)>]) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; len];
    let mut orbits = Vec::new();
    for start in 0..len {
        if label[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut orbit = vec![start];
        label[start] = id;
        let mut k = 0;
        while k < orbit.len() {
            for t in tables {
                let next = t[orbit[k]].0;
                if label[next] == usize::MAX {
                    label[next] = id;
                    orbit.push(next);
                }
            }
            k += 1;
        }
        orbits.push(orbit);
    }
    orbits
}

/// Propagates b_{g(m)} = b_m + phase − λ_g through the orbit of `start`;
/// None when the orbit admits no nonzero eigenvector for `chars`.
fn solve_orbit(
    start: usize,
    tables: &[Vec<(usize, u64)>],
    chars: &[u64],
    m: u64,
) -> Option<Vec<(usize, u64)>> {
    let mut b: BTreeMap<usize, u64> = BTreeMap::from([(start, 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        let bi = b[&i];
        for (t, &lam) in tables.iter().zip(chars) {
            let (j, ph) = t[i];
            let bj = (bi + ph + m - lam) % m;
            match b.get(&j) {
                Some(&old) if old != bj => return None,
                Some(_) => {}
                None => {
                    b.insert(j, bj);
                    queue.push_back(j);
                }
            }
        }
    }
    Some(b.into_iter().collect())
}

/// Where a subgroup of the Pauli group of size 6 reduces to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ReductionCase {
    /// No shift component: the group is diagonal.
    Diagonalizable,
    /// Shifts by multiples of 3 only: contained in D3 ⊗ P2.
    TensorD3P2,
    /// Shifts by even amounts only: contained in D2 ⊗ P3.
    TensorD2P3,
    /// Some element shifts by a unit: the genuinely Pauli case.
    PauliCore,
}

impl fmt::Display for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReductionCase::Diagonalizable => "diagonalizable",
            ReductionCase::TensorD3P2 => "D3 (x) P2",
            ReductionCase::TensorD2P3 => "D2 (x) P3",
            ReductionCase::PauliCore => "P6",
        })
    }
}

pub fn reduction_case(generators: &[MonomialMatrix]) -> Result<ReductionCase, PauliError> {
    if generators.is_empty() {
        return Err(PauliError::Empty);
    }
    let mut g = 6u64;
    for h in generators {
        if h.size() != 6 {
            return Err(PauliError::NotPauli(6));
        }
        let (a, _) = h.pauli_coords().ok_or(PauliError::NotPauli(6))?;
        g = g.gcd(&a);
    }
    Ok(match g {
        1 => ReductionCase::PauliCore,
        2 => ReductionCase::TensorD2P3,
        3 => ReductionCase::TensorD3P2,
        _ => ReductionCase::Diagonalizable,
    })
}

/// Class of the x0-part of a form in the D2 ⊗ P3 coordinates z_{x+2y}:
/// setting the x1 variables to zero leaves a cubic in y0, y1, y2, and each
/// monomial y^i is classed by i_1 + 2·i_2 mod 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShadowClass {
    Empty,
    Single(u8),
    Mixed,
}

pub fn x0_shadow_class(support: &MonomialSet) -> ShadowClass {
    let mut class = None;
    for m in support.iter() {
        let e = m.exponents();
        if e.len() != 6 || e[1] + e[3] + e[5] != 0 {
            continue;
        }
        let c = ((e[2] as u32 + 2 * e[4] as u32) % 3) as u8;
        match class {
            None => class = Some(c),
            Some(old) if old != c => return ShadowClass::Mixed,
            _ => {}
        }
    }
    class.map_or(ShadowClass::Empty, ShadowClass::Single)
}

/// The tabulated sub-families of invariant-family cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseFamily {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    C,
    D,
}

impl CaseFamily {
    pub const ALL: [CaseFamily; 8] = [
        CaseFamily::A1,
        CaseFamily::A2,
        CaseFamily::A3,
        CaseFamily::B1,
        CaseFamily::B2,
        CaseFamily::B3,
        CaseFamily::C,
        CaseFamily::D,
    ];
}

impl fmt::Display for CaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for CaseFamily {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CaseFamily::ALL
            .into_iter()
            .find(|c| c.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| parse_err(s, "expected one of A1 A2 A3 B1 B2 B3 C D"))
    }
}

#[derive(Clone, Debug)]
pub struct PauliCase {
    pub label: String,
    pub family: CaseFamily,
    pub generators: Vec<MonomialMatrix>,
    pub expected: AbelianGroupStructure,
    pub anchors: MonomialSet,
}

/// diag(1, ζ_d^c) ⊗ P3^a W3^b in the z = x + 2y layout.
pub fn d2p3_generator(d: u64, c: u64, a: u64, b: u64) -> Result<MonomialMatrix, PauliError> {
    let left = MonomialMatrix::diagonal(d.max(1), vec![0, c])?;
    let right = MonomialMatrix::shift(3).pow(a).compose(&MonomialMatrix::clock(3).pow(b))?;
    tensor_embed(&left, &right, TensorConvention::x_fastest(2, 3))
}

fn parse_case_generator(text: &str) -> Result<MonomialMatrix, PauliError> {
    let args = |inner: &str, want: usize| -> Result<Vec<u64>, PauliError> {
        let v: Vec<u64> = inner
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| parse_err(text, "bad integer argument"))?;
        if v.len() != want {
            return Err(parse_err(text, format!("expected {want} arguments")));
        }
        Ok(v)
    };
    let t = text.trim();
    if let Some(inner) = t.strip_prefix("gen(").and_then(|s| s.strip_suffix(')')) {
        let v = args(inner, 4)?;
        d2p3_generator(v[0], v[1], v[2], v[3])
    } else if let Some(inner) = t.strip_prefix("f0(").and_then(|s| s.strip_suffix(')')) {
        let v = args(inner, 2)?;
        d2p3_generator(v[0], v[1], 0, 0)
    } else {
        parse_word(t)
    }
}

fn parse_cases(text: &str) -> Result<Vec<PauliCase>, PauliError> {
    let u = Universe::cubic6();
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| PauliError::CaseTable { line: k + 1, message };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, got {}", fields.len())));
        }
        let family: CaseFamily = fields[0]
            .split('.')
            .next()
            .unwrap_or("")
            .parse()
            .map_err(|e: PauliError| err(e.to_string()))?;
        let factors: Vec<u64> = fields[1]
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|e| err(e.to_string()))?;
        let generators = fields[2]
            .split(';')
            .map(parse_case_generator)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(e.to_string()))?;
        let anchors = MonomialSet::parse_in(&fields[3].replace('z', "x"), u)
            .map_err(|e| err(e.to_string()))?;
        out.push(PauliCase {
            label: fields[0].to_string(),
            family,
            generators,
            expected: canonical_group(&factors),
            anchors,
        });
    }
    Ok(out)
}

/// The built-in case table.
pub fn case_table() -> Result<Vec<PauliCase>, PauliError> {
    parse_cases(CASES)
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub label: String,
    pub family: CaseFamily,
    pub expected: AbelianGroupStructure,
    pub computed: AbelianGroupStructure,
    pub group_ok: bool,
    pub families: usize,
    pub anchored: usize,
    /// Prime at which some anchored family has a smooth member.
    pub certified_at: Option<u64>,
    pub shadow: Option<ShadowClass>,
    pub passed: bool,
}

pub fn verify_case(case: &PauliCase, seed: u64) -> Result<CaseReport, PauliError> {
    let group = projective_group(&case.generators)?;
    let computed = group.structure.shape();
    let group_ok = computed.is_isomorphic(&case.expected);
    let families = invariant_cubics(&case.generators)?;
    let anchored: Vec<&InvariantFamily> =
        families.iter().filter(|f| case.anchors.is_subset(&f.support())).collect();
    let mut certified_at = None;
    let mut shadow = None;
    for fam in &anchored {
        if let SmoothStatus::CertifiedSmooth { prime } = fam.certify(3, 4, seed)?.status {
            certified_at = Some(prime);
            if matches!(case.family, CaseFamily::A1 | CaseFamily::A2 | CaseFamily::A3 | CaseFamily::B1 | CaseFamily::B2 | CaseFamily::B3) {
                shadow = Some(x0_shadow_class(&fam.support()));
            }
            break;
        }
    }
    Ok(CaseReport {
        label: case.label.clone(),
        family: case.family,
        expected: case.expected.clone(),
        computed,
        group_ok,
        families: families.len(),
        anchored: anchored.len(),
        certified_at,
        shadow,
        passed: group_ok && certified_at.is_some(),
    })
}

/// Checks every tabulated case (or one sub-family).
pub fn verify_cases(
    selector: Option<CaseFamily>,
    seed: u64,
    mode: Mode,
) -> Result<Vec<CaseReport>, PauliError> {
    let cases: Vec<PauliCase> =
        case_table()?.into_iter().filter(|c| selector.is_none_or(|s| c.family == s)).collect();
    par::map(mode, &cases, |c| verify_case(c, seed)).into_iter().collect()
}

/// Outcome of a search for smooth invariant cubics where none should exist.
#[derive(Clone, Debug, Default, Serialize)]
pub struct NegativeReport {
    pub groups: usize,
    pub families: usize,
    /// Families whose support already fails the combinatorial smoothness test.
    pub excluded: usize,
    /// Families whose random members all came out singular.
    pub singular_members: usize,
    /// Groups with a family that has a certified smooth member.
    pub smooth_found: Vec<String>,
}

impl NegativeReport {
    pub fn passed(&self) -> bool {
        self.smooth_found.is_empty()
    }

    fn absorb(&mut self, label: String, families: &[InvariantFamily], seed: u64) -> Result<(), PauliError> {
        self.groups += 1;
        self.families += families.len();
        for fam in families {
            let support = fam.support();
            if !support.universe().is_admissible_mask(support.mask()) {
                self.excluded += 1;
            } else if fam.certify(2, 4, seed)?.is_certified() {
                self.smooth_found.push(label.clone());
            } else {
                self.singular_members += 1;
            }
        }
        Ok(())
    }

    fn merge(mut self, other: NegativeReport) -> Self {
        self.groups += other.groups;
        self.families += other.families;
        self.excluded += other.excluded;
        self.singular_members += other.singular_members;
        self.smooth_found.extend(other.smooth_found);
        self
    }
}

/// The full Pauli group ⟨P6, W6⟩ preserves no cubic form at all.
pub fn check_full_pauli6(seed: u64) -> Result<NegativeReport, PauliError> {
    let (p, w) = pauli_generators(6);
    let mut report = NegativeReport::default();
    report.absorb("P6, W6".into(), &invariant_cubics(&[p, w])?, seed)?;
    Ok(report)
}

/// For every d in 2..=max_d and all diagonal parts, the pair
/// (1, ζ^{c1}, ζ^{c2}) ⊗ σ1 and (1, ζ^{e1}, ζ^{e2}) ⊗ σ2 (σ1 the swap, σ2 =
/// diag(1, −1)) on z = x + 3y: no invariant cubic may be smooth.
pub fn check_d3p2_surjective(max_d: u64, seed: u64, mode: Mode) -> Result<NegativeReport, PauliError> {
    let conv = TensorConvention::x_fastest(3, 2);
    let (s1, s2) = pauli_generators(2);
    let mut params = Vec::new();
    for d in 2..=max_d {
        for c1 in 0..d {
            for c2 in 0..d {
                for e1 in 0..d {
                    for e2 in 0..d {
                        params.push((d, c1, c2, e1, e2));
                    }
                }
            }
        }
    }
    let reports = par::map(mode, &params, |&(d, c1, c2, e1, e2)| -> Result<NegativeReport, PauliError> {
        let f1 = tensor_embed(&MonomialMatrix::diagonal(d, vec![0, c1, c2])?, &s1, conv)?;
        let f2 = tensor_embed(&MonomialMatrix::diagonal(d, vec![0, e1, e2])?, &s2, conv)?;
        let mut r = NegativeReport::default();
        r.absorb(format!("d={d} c=({c1},{c2}) e=({e1},{e2})"), &invariant_cubics(&[f1, f2])?, seed)?;
        Ok(r)
    });
    reports.into_iter().try_fold(NegativeReport::default(), |acc, r| Ok(acc.merge(r?)))
}

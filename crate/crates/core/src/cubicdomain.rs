//! Monomials, monomial sets, signatures and the combinatorial smoothness
//! conditions on supports of cubic forms.
//!
//! A [`MonomialSet`] is a bitmask over a fixed [`Universe`] (all monomials of
//! one degree in a fixed number of variables, listed in descending lex order
//! so that `x0^3` comes first). Universes are capped at 64 monomials, which
//! covers cubics in up to six variables.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub const DEFAULT_VARS: usize = 6;
pub const DEFAULT_DEGREE: usize = 3;
/// Hard cap on variables a [`Monomial`] can carry.
pub const MAX_VARS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("universe of degree-{degree} monomials in {vars} variables is unsupported: {reason}")]
    Universe { vars: usize, degree: usize, reason: String },
    #[error("monomial {0} does not belong to the universe")]
    Foreign(String),
    #[error("defect {0} is not present in the set")]
    DefectAbsent(Defect),
}

fn parse_err(position: usize, message: impl Into<String>) -> DomainError {
    DomainError::Parse { position, message: message.into() }
}

/// Exponent vector of a monomial in at most [`MAX_VARS`] variables.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u8; MAX_VARS],
    vars: u8,
}

impl Monomial {
    pub fn new(exps: &[u8]) -> Self {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut e = [0u8; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Monomial { exps: e, vars: exps.len() as u8 }
    }

    /// x_i^a x_j^b x_k^c-style constructor from a multiset of variable indices.
    pub fn from_indices(vars: usize, idx: &[usize]) -> Self {
        let mut e = [0u8; MAX_VARS];
        for &i in idx {
            assert!(i < vars);
            e[i] += 1;
        }
        Monomial { exps: e, vars: vars as u8 }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exps[..self.vars as usize]
    }

    pub fn vars(&self) -> usize {
        self.vars as usize
    }

    pub fn degree(&self) -> usize {
        self.exponents().iter().map(|&e| e as usize).sum()
    }

    /// Variable indices with multiplicity, ascending.
    pub fn indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        for (i, &e) in self.exponents().iter().enumerate() {
            out.extend(std::iter::repeat_n(i, e as usize));
        }
        out
    }

    /// Image under the coordinate permutation x_i ↦ x_{perm[i]}.
    pub fn permute(&self, perm: &[usize]) -> Monomial {
        let mut e = [0u8; MAX_VARS];
        for (i, &x) in self.exponents().iter().enumerate() {
            e[perm[i]] = x;
        }
        Monomial { exps: e, vars: self.vars }
    }

    pub fn parse_with(text: &str, vars: usize, degree: usize) -> Result<Self, DomainError> {
        parse_monomial_at(text, 0, vars, degree)
    }
}

fn parse_monomial_at(
    text: &str,
    offset: usize,
    vars: usize,
    degree: usize,
) -> Result<Monomial, DomainError> {
    let mut e = [0u8; MAX_VARS];
    let mut any = false;
    let mut pos = 0;
    for factor in text.split('*') {
        let start = offset + pos + (factor.len() - factor.trim_start().len());
        pos += factor.len() + 1;
        let f = factor.trim();
        let rest = f
            .strip_prefix('x')
            .ok_or_else(|| parse_err(start, format!("expected variable, found {f:?}")))?;
        let (idx, exp) = match rest.split_once('^') {
            Some((i, x)) => (i, Some(x)),
            None => (rest, None),
        };
        let i: usize =
            idx.parse().map_err(|_| parse_err(start + 1, format!("bad variable index {idx:?}")))?;
        if i >= vars {
            return Err(parse_err(start + 1, format!("variable x{i} out of range 0..{vars}")));
        }
        let x: u32 = match exp {
            Some(x) => x
                .parse()
                .map_err(|_| parse_err(start + 2 + idx.len(), format!("bad exponent {x:?}")))?,
            None => 1,
        };
        let total = e[i] as u32 + x;
        if total > u8::MAX as u32 {
            return Err(parse_err(start, "exponent too large"));
        }
        e[i] = total as u8;
        any = true;
    }
    if !any {
        return Err(parse_err(offset, "empty monomial"));
    }
    let m = Monomial { exps: e, vars: vars as u8 };
    if m.degree() != degree {
        return Err(parse_err(offset, format!("degree {} but expected {degree}", m.degree())));
    }
    Ok(m)
}

impl FromStr for Monomial {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Monomial::parse_with(s, DEFAULT_VARS, DEFAULT_DEGREE)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Graded, then descending lex on exponents: x0^3 < x0^2*x1 < … < x5^3.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.vars
            .cmp(&other.vars)
            .then(self.degree().cmp(&other.degree()))
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All monomials of one degree in a fixed number of variables, with lookup
/// tables for the cubic predicates and the coordinate permutations.
pub struct Universe {
    vars: usize,
    degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, u8>,
    /// idx of x_i x_j x_k at [i*n*n + j*n + k] (degree 3 only; 255 = absent).
    cubic: Vec<u8>,
    perms: OnceLock<Vec<PermTable>>,
}

struct PermTable {
    perm: Vec<usize>,
    map: Vec<u8>,
}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Universe({} vars, degree {})", self.vars, self.degree)
    }
}

const NONE: u8 = u8::MAX;

impl Universe {
    fn build(vars: usize, degree: usize) -> Result<Universe, DomainError> {
        let bad = |reason: &str| DomainError::Universe { vars, degree, reason: reason.into() };
        if vars == 0 || degree == 0 {
            return Err(bad("need at least one variable and positive degree"));
        }
        if vars > MAX_VARS {
            return Err(bad("too many variables"));
        }
        let mut monomials = Vec::new();
        let mut cur = vec![0u8; vars];
        fn rec(i: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Monomial>, cap: usize) {
            if out.len() > cap {
                return;
            }
            if i + 1 == cur.len() {
                cur[i] = left as u8;
                out.push(Monomial::new(cur));
                return;
            }
            for e in (0..=left).rev() {
                cur[i] = e as u8;
                rec(i + 1, left - e, cur, out, cap);
            }
        }
        rec(0, degree, &mut cur, &mut monomials, 64);
        if monomials.len() > 64 || degree > u8::MAX as usize {
            return Err(bad("more than 64 monomials"));
        }
        let index: HashMap<Monomial, u8> =
            monomials.iter().enumerate().map(|(i, m)| (*m, i as u8)).collect();
        let mut cubic = Vec::new();
        if degree == 3 {
            cubic = vec![NONE; vars * vars * vars];
            for i in 0..vars {
                for j in 0..vars {
                    for k in 0..vars {
                        let m = Monomial::from_indices(vars, &[i, j, k]);
                        cubic[(i * vars + j) * vars + k] = index[&m];
                    }
                }
            }
        }
        Ok(Universe { vars, degree, monomials, index, cubic, perms: OnceLock::new() })
    }

    /// Shared universe for `(vars, degree)`; built once and cached.
    pub fn get(vars: usize, degree: usize) -> Result<&'static Universe, DomainError> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), &'static Universe>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("universe cache poisoned");
        if let Some(u) = guard.get(&(vars, degree)) {
            return Ok(u);
        }
        let u: &'static Universe = Box::leak(Box::new(Universe::build(vars, degree)?));
        guard.insert((vars, degree), u);
        Ok(u)
    }

    /// The 56 cubic monomials in six variables.
    pub fn cubic6() -> &'static Universe {
        static U: OnceLock<&'static Universe> = OnceLock::new();
        U.get_or_init(|| Universe::get(DEFAULT_VARS, DEFAULT_DEGREE).expect("default universe"))
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, idx: usize) -> Monomial {
        self.monomials[idx]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|&i| i as usize)
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Index of x_i x_j x_k in a cubic universe.
    #[inline]
    pub fn idx3(&self, i: usize, j: usize, k: usize) -> Option<usize> {
        let v = *self.cubic.get((i * self.vars + j) * self.vars + k)?;
        (v != NONE).then_some(v as usize)
    }

    #[inline]
    fn bit3(&self, i: usize, j: usize, k: usize) -> u64 {
        self.idx3(i, j, k).map_or(0, |x| 1u64 << x)
    }

    pub fn set(&'static self, mask: u64) -> MonomialSet {
        MonomialSet { universe: self, mask: mask & self.full_mask() }
    }

    pub fn empty_set(&'static self) -> MonomialSet {
        self.set(0)
    }

    pub fn full_set(&'static self) -> MonomialSet {
        self.set(self.full_mask())
    }

    pub fn set_from<I: IntoIterator<Item = Monomial>>(
        &'static self,
        items: I,
    ) -> Result<MonomialSet, DomainError> {
        let mut mask = 0u64;
        for m in items {
            let i = self.index_of(&m).ok_or_else(|| DomainError::Foreign(m.to_string()))?;
            mask |= 1 << i;
        }
        Ok(self.set(mask))
    }

    /// All permutations of the variables in lexicographic order (identity first),
    /// each with its induced index map on monomials.
    fn perm_tables(&self) -> &[PermTable] {
        self.perms.get_or_init(|| {
            let mut out = Vec::new();
            let mut p: Vec<usize> = (0..self.vars).collect();
            loop {
                let map = self
                    .monomials
                    .iter()
                    .map(|m| self.index[&m.permute(&p)])
                    .collect();
                out.push(PermTable { perm: p.clone(), map });
                if !next_permutation(&mut p) {
                    break;
                }
            }
            out
        })
    }

    pub fn permutation_count(&self) -> usize {
        self.perm_tables().len()
    }

    pub fn permute_mask(&self, mask: u64, perm: &[usize]) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1 << self.index[&self.monomials[i].permute(perm)];
        }
        out
    }

    /// Lex-least image of `mask` over all variable permutations, with the
    /// first permutation (in lex order) attaining it.
    pub fn canonical_mask(&self, mask: u64) -> (u64, Vec<usize>) {
        let tables = self.perm_tables();
        let mut best = mask;
        let mut best_key = mask.reverse_bits();
        let mut best_perm = 0;
        for (t, table) in tables.iter().enumerate().skip(1) {
            let mut img = 0u64;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                img |= 1 << table.map[i];
            }
            // Lex order on sorted index lists of equal length = order on the
            // lowest differing bit, i.e. reversed-bit comparison.
            let key = img.reverse_bits();
            if key > best_key {
                best_key = key;
                best = img;
                best_perm = t;
            }
        }
        (best, tables[best_perm].perm.clone())
    }

    fn is_cube(&self, mask: u64, i: usize) -> bool {
        mask & self.bit3(i, i, i) != 0
    }

    pub fn cube_count_mask(&self, mask: u64) -> usize {
        (0..self.vars).filter(|&i| self.is_cube(mask, i)).count()
    }

    pub fn uncovered_mask(&self, mask: u64) -> Vec<usize> {
        (0..self.vars)
            .filter(|&i| (0..self.vars).all(|j| mask & self.bit3(i, i, j) == 0))
            .collect()
    }

    pub fn pair_is_singular(&self, mask: u64, i: usize, j: usize) -> bool {
        if self.degree != 3 || i == j || self.is_cube(mask, i) || self.is_cube(mask, j) {
            return false;
        }
        if mask & (self.bit3(i, i, j) | self.bit3(j, j, i)) != 0 {
            return false;
        }
        let hits = (0..self.vars)
            .filter(|&p| {
                mask & (self.bit3(i, i, p) | self.bit3(j, j, p) | self.bit3(i, j, p)) != 0
            })
            .count();
        hits <= 1
    }

    pub fn triple_is_singular(&self, mask: u64, i: usize, j: usize, l: usize) -> bool {
        if self.degree != 3 || i == j || j == l || i == l {
            return false;
        }
        if [i, j, l].iter().any(|&v| self.is_cube(mask, v)) {
            return false;
        }
        let excluded = self.bit3(i, i, j)
            | self.bit3(j, j, i)
            | self.bit3(i, i, l)
            | self.bit3(l, l, i)
            | self.bit3(j, j, l)
            | self.bit3(l, l, j)
            | self.bit3(i, j, l);
        if mask & excluded != 0 {
            return false;
        }
        let hits = (0..self.vars)
            .filter(|&p| {
                let menu = self.bit3(i, i, p)
                    | self.bit3(j, j, p)
                    | self.bit3(l, l, p)
                    | self.bit3(i, j, p)
                    | self.bit3(i, l, p)
                    | self.bit3(j, l, p);
                mask & menu != 0
            })
            .count();
        hits <= 2
    }

    pub fn singular_pairs_mask(&self, mask: u64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                if self.pair_is_singular(mask, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn singular_triples_mask(&self, mask: u64) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                for l in j + 1..self.vars {
                    if self.triple_is_singular(mask, i, j, l) {
                        out.push((i, j, l));
                    }
                }
            }
        }
        out
    }

    pub fn defect_present(&self, mask: u64, d: Defect) -> bool {
        match d {
            Defect::Pair(i, j) => self.pair_is_singular(mask, i, j),
            Defect::Triple(i, j, l) => self.triple_is_singular(mask, i, j, l),
        }
    }

    /// First defect in the fixed scan order (pairs, then triples), if any.
    pub fn first_defect(&self, mask: u64) -> Option<Defect> {
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                if self.pair_is_singular(mask, i, j) {
                    return Some(Defect::Pair(i, j));
                }
            }
        }
        for i in 0..self.vars {
            for j in i + 1..self.vars {
                for l in j + 1..self.vars {
                    if self.triple_is_singular(mask, i, j, l) {
                        return Some(Defect::Triple(i, j, l));
                    }
                }
            }
        }
        None
    }

    /// Covers every variable and has no singular pair or triple.
    pub fn is_admissible_mask(&self, mask: u64) -> bool {
        self.uncovered_mask(mask).is_empty() && self.first_defect(mask).is_none()
    }

    /// Monomials outside `mask` whose addition alone removes `d`.
    pub fn resolution_menu_mask(&self, mask: u64, d: Defect) -> u64 {
        let mut out = 0u64;
        for k in 0..self.len() {
            let b = 1u64 << k;
            if mask & b == 0 && !self.defect_present(mask | b, d) {
                out |= b;
            }
        }
        out
    }

    /// Directed edges i → j for x_i^2 x_j ∈ A between distinct non-cube variables.
    fn adjacency(&self, mask: u64) -> Vec<Vec<usize>> {
        let n = self.vars;
        (0..n)
            .map(|i| {
                if self.is_cube(mask, i) {
                    return vec![];
                }
                (0..n)
                    .filter(|&j| j != i && !self.is_cube(mask, j) && mask & self.bit3(i, i, j) != 0)
                    .collect()
            })
            .collect()
    }

    pub fn structure_profile_mask(&self, mask: u64) -> StructureProfile {
        let cube_count = if self.degree == 3 { self.cube_count_mask(mask) } else { 0 };
        let adj = self.adjacency(mask);
        let mut best: Vec<usize> = Vec::new();
        // Each simple cycle is found from its least vertex, visiting only larger ones.
        fn dfs(
            start: usize,
            v: usize,
            adj: &[Vec<usize>],
            path: &mut Vec<usize>,
            best: &mut Vec<usize>,
        ) {
            for &w in &adj[v] {
                if w == start && path.len() > best.len() {
                    *best = path.clone();
                } else if w > start && !path.contains(&w) {
                    path.push(w);
                    dfs(start, w, adj, path, best);
                    path.pop();
                }
            }
        }
        if self.degree == 3 {
            for s in 0..self.vars {
                let mut path = vec![s];
                dfs(s, s, &adj, &mut path, &mut best);
            }
        }
        let longest_cycle = best.len();
        best.sort_unstable();
        StructureProfile { cube_count, longest_cycle, cycle_support: best }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// A set of monomials drawn from one [`Universe`], iterated in canonical order.
#[derive(Clone, Copy)]
pub struct MonomialSet {
    universe: &'static Universe,
    mask: u64,
}

impl MonomialSet {
    /// Builds a set in the default (6, 3) universe.
    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(items: I) -> Result<Self, DomainError> {
        Universe::cubic6().set_from(items)
    }

    pub fn universe(&self) -> &'static Universe {
        self.universe
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            (m != 0).then(|| {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                i
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.indices().map(|i| self.universe.monomial(i))
    }

    pub fn to_vec(&self) -> Vec<Monomial> {
        self.iter().collect()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.universe.index_of(m).is_some_and(|i| self.mask >> i & 1 == 1)
    }

    pub fn first(&self) -> Option<Monomial> {
        self.iter().next()
    }

    pub fn with(&self, m: &Monomial) -> Result<Self, DomainError> {
        let i = self.universe.index_of(m).ok_or_else(|| DomainError::Foreign(m.to_string()))?;
        Ok(self.universe.set(self.mask | 1 << i))
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert!(std::ptr::eq(self.universe, other.universe));
        self.universe.set(self.mask | other.mask)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        self.universe.set(self.universe.permute_mask(self.mask, perm))
    }

    /// Parses a comma-separated monomial list in the given universe.
    pub fn parse_in(text: &str, universe: &'static Universe) -> Result<Self, DomainError> {
        let mut mask = 0u64;
        let mut offset = 0;
        for item in text.split(',') {
            let lead = item.len() - item.trim_start().len();
            let t = item.trim();
            if !t.is_empty() {
                let m = parse_monomial_at(t, offset + lead, universe.vars, universe.degree)?;
                mask |= 1 << universe.index_of(&m).expect("parsed monomial lies in universe");
            } else if text.trim().is_empty() {
                // an empty list is the empty set
            } else {
                return Err(parse_err(offset, "empty list item"));
            }
            offset += item.len() + 1;
        }
        Ok(universe.set(mask))
    }
}

impl FromStr for MonomialSet {
    type Err = DomainError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MonomialSet::parse_in(s, Universe::cubic6())
    }
}

impl PartialEq for MonomialSet {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.universe, other.universe) && self.mask == other.mask
    }
}

impl Eq for MonomialSet {}

impl std::hash::Hash for MonomialSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.universe.vars, self.universe.degree, self.mask).hash(state);
    }
}

/// Lexicographic order on the canonically sorted monomial lists.
impl Ord for MonomialSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.universe.vars, self.universe.degree)
            .cmp(&(other.universe.vars, other.universe.degree))
            .then_with(|| self.indices().cmp(other.indices()))
    }
}

impl PartialOrd for MonomialSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MonomialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", items.join(", "))
    }
}

impl fmt::Debug for MonomialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

impl Serialize for MonomialSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|m| m.to_string()))
    }
}

impl<'de> Deserialize<'de> for MonomialSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        MonomialSet::parse_in(&items.join(","), Universe::cubic6())
            .map_err(serde::de::Error::custom)
    }
}

/// Diagonal automorphism diag(ω^{c_0}, …, ω^{c_{n-1}}) with ω a primitive
/// `modulus`-th root of unity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

impl Signature {
    /// Raw signature; exponents are reduced mod `modulus` but nothing else.
    pub fn new(modulus: u64, exponents: Vec<u64>) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        let exponents = exponents.into_iter().map(|c| c % modulus).collect();
        Signature { modulus, exponents }
    }

    pub fn from_signed(modulus: u64, exponents: &[i64]) -> Self {
        let m = modulus as i64;
        Signature::new(modulus, exponents.iter().map(|&c| c.rem_euclid(m) as u64).collect())
    }

    /// Projective normal form: shift so that c_0 = 0, then shrink the modulus
    /// to the true order of the automorphism.
    pub fn normalized(&self) -> Signature {
        let d = self.modulus;
        let c0 = self.exponents.first().copied().unwrap_or(0);
        let shifted: Vec<u64> = self.exponents.iter().map(|&c| (c + d - c0) % d).collect();
        let g = shifted.iter().fold(d, |g, &c| g.gcd(&c));
        Signature::new(d / g, shifted.iter().map(|&c| c / g).collect())
    }

    /// Order of the projective automorphism.
    pub fn order(&self) -> u64 {
        self.normalized().modulus
    }

    /// Representative of the cyclic subgroup ⟨self⟩: among u·c for units u
    /// mod d, the lexicographically least exponent tuple.
    pub fn unit_normalized(&self) -> Signature {
        let d = self.modulus;
        let mut best = self.clone();
        for u in 1..d.max(2) {
            if u.gcd(&d) != 1 {
                continue;
            }
            let cand = Signature::new(d, self.exponents.iter().map(|&c| c * u % d).collect());
            if cand.exponents < best.exponents {
                best = cand;
            }
        }
        best
    }

    /// f-weight Σ e_j c_j mod d.
    pub fn weight(&self, m: &Monomial) -> u64 {
        weight(self, m)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.exponents.iter().map(|c| c.to_string()).collect();
        write!(f, "({}) mod {}", e.join(","), self.modulus)
    }
}

/// Σ_j m_j · c_j reduced mod d.
pub fn weight(f: &Signature, m: &Monomial) -> u64 {
    let d = f.modulus as u128;
    let s: u128 = m
        .exponents()
        .iter()
        .zip(&f.exponents)
        .map(|(&e, &c)| e as u128 * c as u128)
        .sum();
    (s % d) as u64
}

/// An obstruction to smoothness: singular pair or singular triple of variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Defect {
    Pair(usize, usize),
    Triple(usize, usize, usize),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::Pair(i, j) => write!(f, "pair ({i},{j})"),
            Defect::Triple(i, j, l) => write!(f, "triple ({i},{j},{l})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureProfile {
    pub cube_count: usize,
    pub longest_cycle: usize,
    pub cycle_support: Vec<usize>,
}

/// Every monomial of `degree` in `vars` variables.
pub fn all_monomials(vars: usize, degree: usize) -> Result<MonomialSet, DomainError> {
    Ok(Universe::get(vars, degree)?.full_set())
}

/// Does every variable x_i appear as x_i^2 x_j for some j? Also returns the
/// uncovered variables.
pub fn covers(a: &MonomialSet) -> (bool, Vec<usize>) {
    let u = a.universe;
    if u.degree != 3 {
        return (false, (0..u.vars).collect());
    }
    let unc = u.uncovered_mask(a.mask);
    (unc.is_empty(), unc)
}

pub fn singular_pairs(a: &MonomialSet) -> Vec<(usize, usize)> {
    a.universe.singular_pairs_mask(a.mask)
}

pub fn singular_triples(a: &MonomialSet) -> Vec<(usize, usize, usize)> {
    a.universe.singular_triples_mask(a.mask)
}

/// Every variable is covered and no pair or triple of variables is singular.
pub fn is_admissible(a: &MonomialSet) -> bool {
    a.universe.degree == 3 && a.universe.is_admissible_mask(a.mask)
}

/// Every monomial outside `a` whose addition alone removes `defect`.
pub fn resolution_menu(a: &MonomialSet, defect: Defect) -> Result<MonomialSet, DomainError> {
    let u = a.universe;
    if !u.defect_present(a.mask, defect) {
        return Err(DomainError::DefectAbsent(defect));
    }
    Ok(u.set(u.resolution_menu_mask(a.mask, defect)))
}

pub fn structure_profile(a: &MonomialSet) -> StructureProfile {
    a.universe.structure_profile_mask(a.mask)
}

/// Lex-least image of `a` over all coordinate permutations, and the first
/// permutation attaining it (`perm[i]` is the image of variable i).
pub fn canonical_under_permutation(a: &MonomialSet) -> (MonomialSet, Vec<usize>) {
    let (mask, perm) = a.universe.canonical_mask(a.mask);
    (a.universe.set(mask), perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> MonomialSet {
        s.parse().unwrap()
    }

    const FERMAT: &str = "x0^3, x1^3, x2^3, x3^3, x4^3, x5^3";

    #[test]
    fn universe_sizes() {
        assert_eq!(all_monomials(1, 3).unwrap().to_vec(), vec![Monomial::new(&[3])]);
        assert_eq!(all_monomials(2, 3).unwrap().len(), 4);
        assert_eq!(all_monomials(6, 3).unwrap().len(), 56);
        assert!(all_monomials(7, 3).is_err());
        assert!(all_monomials(0, 3).is_err());
        let u = Universe::cubic6();
        assert_eq!(u.monomial(0).to_string(), "x0^3");
        assert_eq!(u.monomial(55).to_string(), "x5^3");
        let sorted: Vec<_> = u.monomials().to_vec();
        assert!(sorted.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn parse_and_print() {
        let m: Monomial = "x0^2*x3".parse().unwrap();
        assert_eq!(m.exponents(), &[2, 0, 0, 1, 0, 0]);
        assert_eq!(m.to_string(), "x0^2*x3");
        let m: Monomial = "x4*x0*x4".parse().unwrap();
        assert_eq!(m.to_string(), "x0*x4^2");
        assert!("x6^3".parse::<Monomial>().is_err());
        assert!("x0^2".parse::<Monomial>().is_err());
        assert!("y0^3".parse::<Monomial>().is_err());
        match "x0^3, x9^3".parse::<MonomialSet>() {
            Err(DomainError::Parse { position, .. }) => assert_eq!(position, 7),
            other => panic!("unexpected {other:?}"),
        }
        let s = set(FERMAT);
        assert_eq!(s.to_string(), FERMAT);
        assert_eq!(set("").len(), 0);
        assert!(set("x1^3, x0^3").iter().next().unwrap() == "x0^3".parse().unwrap());
    }

    #[test]
    fn weights() {
        let f = Signature::new(3, vec![0, 1, 0, 0, 0, 0]);
        assert_eq!(weight(&f, &"x0^3".parse().unwrap()), 0);
        assert_eq!(weight(&f, &"x1^3".parse().unwrap()), 0);
        let f = Signature::from_signed(21, &[0, 1, -1, 3, -5, 11]);
        assert_eq!(weight(&f, &"x0^2*x1".parse().unwrap()), 1);
        assert_eq!(weight(&f, &"x5^2*x0".parse().unwrap()), 1);
        for m in set("x0^2*x1, x1^2*x2, x2^2*x3, x3^2*x4, x4^2*x5, x5^2*x0").iter() {
            assert_eq!(weight(&f, &m), 1);
        }
    }

    #[test]
    fn signature_normalization() {
        let f = Signature::new(6, vec![2, 4, 2, 2, 2, 2]);
        assert_eq!(f.normalized(), Signature::new(3, vec![0, 1, 0, 0, 0, 0]));
        assert_eq!(f.order(), 3);
        let g = Signature::new(21, vec![0, 2, 19, 6, 11, 1]).unit_normalized();
        assert_eq!(g.exponents, vec![0, 1, 20, 3, 16, 11]);
    }

    #[test]
    fn coverage() {
        assert_eq!(covers(&set(FERMAT)), (true, vec![]));
        assert_eq!(covers(&set("x0^3, x1^3, x2^3, x3^3, x4^3")), (false, vec![5]));
        assert_eq!(covers(&set("")).1, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn pairs_and_triples() {
        assert!(singular_pairs(&set(FERMAT)).is_empty());
        assert!(singular_triples(&set(FERMAT)).is_empty());
        let a = set("x0^3, x1^3, x2^3, x3^3, x4^2*x0, x5^2*x0");
        assert_eq!(singular_pairs(&a), vec![(4, 5)]);
        let b = a.with(&"x1*x4*x5".parse().unwrap()).unwrap();
        assert!(singular_pairs(&b).is_empty());

        let t = set("x0^3, x1^3, x2^3, x3^2*x0, x4^2*x0, x5^2*x0");
        assert_eq!(singular_triples(&t), vec![(3, 4, 5)]);
        assert_eq!(singular_pairs(&t), vec![(3, 4), (3, 5), (4, 5)]);
        let t2 = t.with(&"x3*x4*x5".parse().unwrap()).unwrap();
        assert!(singular_triples(&t2).is_empty());
        assert!(singular_pairs(&t2).is_empty());
    }

    #[test]
    fn menus() {
        let a = set("x0^3, x1^3, x2^3, x3^3, x4^2*x0, x5^2*x0");
        let menu = resolution_menu(&a, Defect::Pair(4, 5)).unwrap();
        for m in ["x4^2*x5", "x4*x5^2", "x1*x4*x5", "x2*x4*x5", "x3*x4*x5", "x1*x4^2"] {
            assert!(menu.contains(&m.parse().unwrap()), "{m}");
        }
        for m in menu.iter() {
            let b = a.with(&m).unwrap();
            assert!(!singular_pairs(&b).contains(&(4, 5)));
        }
        assert!(!menu.contains(&"x0^3".parse().unwrap()));
        assert!(resolution_menu(&a, Defect::Pair(0, 1)).is_err());

        let t = set("x0^3, x1^3, x2^3, x3^2*x0, x4^2*x0, x5^2*x0");
        let menu = resolution_menu(&t, Defect::Triple(3, 4, 5)).unwrap();
        assert!(menu.contains(&"x3*x4*x5".parse().unwrap()));
    }

    #[test]
    fn profiles() {
        let p = structure_profile(&set(FERMAT));
        assert_eq!(p, StructureProfile { cube_count: 6, longest_cycle: 0, cycle_support: vec![] });
        let p = structure_profile(&set("x0^3, x1^3, x2^3, x3^3, x4^2*x5, x5^2*x4"));
        assert_eq!((p.cube_count, p.longest_cycle, p.cycle_support), (4, 2, vec![4, 5]));
        let p = structure_profile(&set("x0^2*x1, x1^2*x2, x2^2*x3, x3^2*x4, x4^2*x5, x5^2*x0"));
        assert_eq!((p.cube_count, p.longest_cycle), (0, 6));
        assert_eq!(p.cycle_support, vec![0, 1, 2, 3, 4, 5]);
        // Edges into cube vertices do not count.
        let p = structure_profile(&set("x0^3, x1^2*x0, x0^2*x1, x2^3, x3^3, x4^3, x5^3"));
        assert_eq!(p.longest_cycle, 0);
    }

    #[test]
    fn canonical_forms() {
        let f = set(FERMAT);
        let (c, perm) = canonical_under_permutation(&f);
        assert_eq!(c, f);
        assert_eq!(perm, vec![0, 1, 2, 3, 4, 5]);
        let a = set("x5^2*x0, x0^3, x1^3, x2^3, x3^3, x4^3");
        let b = set("x0^2*x1, x1^3, x2^3, x3^3, x4^3, x5^3");
        let (ca, pa) = canonical_under_permutation(&a);
        assert_eq!(ca, canonical_under_permutation(&b).0);
        assert_eq!(a.permute(&pa), ca);
        assert_eq!(canonical_under_permutation(&ca).0, ca);
        assert_eq!(Universe::cubic6().permutation_count(), 720);
    }

    #[test]
    fn set_ordering_is_lexicographic() {
        let a = set("x0^3");
        let b = set("x0^3, x1^3");
        let c = set("x0^2*x1");
        assert!(a < b);
        assert!(b < c);
    }

    #[test]
    fn serde_round_trip() {
        let s = set("x0^2*x1, x5^3");
        let j = serde_json_like(&s);
        assert_eq!(j, vec!["x0^2*x1".to_string(), "x5^3".to_string()]);
    }

    fn serde_json_like(s: &MonomialSet) -> Vec<String> {
        s.iter().map(|m| m.to_string()).collect()
    }
}

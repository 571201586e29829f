//! Search for admissible supports, their symmetry groups and smooth generic
//! members, and the maximal groups that result.
//!
//! Pipeline:
//! 1. [`coverage_skeletons`]: one monomial x_i^2 x_{j(i)} per variable, up to
//!    relabelling (130 classes).
//! 2. [`complete_to_admissible`]: depth-first completion that repeatedly picks
//!    the first singular pair/triple and branches over the monomials that make
//!    progress on it. Every admissible set contains a set this search emits,
//!    so every minimal admissible set is found when the depth is unbounded.
//! 3. [`classify`]: closure, group, generic-member certification, dedup.
//! 4. [`maximal_groups`]: antichain of the certified groups under embedding.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubicdomain::{DomainError, Defect, MonomialSet, Universe};
use crate::diaggroup::{self, partition_by_signatures};
use crate::lattice::{canonical_group, embeds, AbelianGroupStructure};
use crate::par::{self, Mode};
use crate::smoothcert::{self, generic_member, PrimeField, SmoothStatus, SmoothnessVerdict};

/// Fixture table of in-text group computations: `SET | FACTORS | CLOSURE`.
pub const FIXTURES: &str = include_str!("../data/fixtures.txt");
/// The maximal groups of the classification, one invariant-factor list per line.
pub const REFERENCE_GROUPS: &str = include_str!("../data/maximal_groups.txt");

#[derive(Debug, Error)]
pub enum EnumError {
    #[error("fixture line {line}: {message}")]
    Fixture { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Diag(#[from] diaggroup::DiagError),
    #[error(transparent)]
    Cert(#[from] smoothcert::CertError),
}

/// x_i^2 x_{j(i)} for every function j: {0..5} → {0..5}, reduced to one
/// canonical representative per relabelling class, in canonical order.
pub fn coverage_skeletons() -> Vec<MonomialSet> {
    let u = Universe::cubic6();
    let n = u.vars();
    let total = n.pow(n as u32);
    let mut seen = BTreeSet::new();
    for code in 0..total {
        let mut c = code;
        let mut mask = 0u64;
        for i in 0..n {
            let j = c % n;
            c /= n;
            mask |= 1 << u.idx3(i, i, j).expect("cubic universe");
        }
        seen.insert(u.set(u.canonical_mask(mask).0));
    }
    seen.into_iter().collect()
}

/// Monomials that either remove `d` on their own or enlarge the set of
/// indices p met by its menu; any admissible superset contains one of them.
fn progress_monomials(u: &Universe, mask: u64, d: Defect) -> u64 {
    let mut out = u.resolution_menu_mask(mask, d);
    let bit = |i, j, k| u.idx3(i, j, k).map_or(0u64, |x| 1u64 << x);
    for p in 0..u.vars() {
        let menu = match d {
            Defect::Pair(i, j) => bit(i, i, p) | bit(j, j, p) | bit(i, j, p),
            Defect::Triple(i, j, l) => {
                bit(i, i, p) | bit(j, j, p) | bit(l, l, p) | bit(i, j, p) | bit(i, l, p) | bit(j, l, p)
            }
        };
        if mask & menu == 0 {
            out |= menu;
        }
    }
    out & !mask
}

/// Admissible supersets of `skeleton` reachable by at most `max_added`
/// progress steps (`None` = unbounded), with non-minimal ones dropped.
pub fn complete_to_admissible(skeleton: &MonomialSet, max_added: Option<usize>) -> Vec<MonomialSet> {
    let u = skeleton.universe();
    if !u.uncovered_mask(skeleton.mask()).is_empty() {
        return Vec::new();
    }
    let mut found: BTreeSet<u64> = BTreeSet::new();
    let mut visited: HashSet<u64> = HashSet::new();
    let mut stack = vec![(skeleton.mask(), 0usize)];
    while let Some((mask, depth)) = stack.pop() {
        if !visited.insert(mask) {
            continue;
        }
        let Some(d) = u.first_defect(mask) else {
            found.insert(mask);
            continue;
        };
        if max_added.is_some_and(|k| depth >= k) {
            continue;
        }
        let mut moves = progress_monomials(u, mask, d);
        while moves != 0 {
            let b = moves & moves.wrapping_neg();
            moves &= moves - 1;
            stack.push((mask | b, depth + 1));
        }
    }
    let all: Vec<u64> = found.into_iter().collect();
    all.iter()
        .filter(|&&m| !all.iter().any(|&o| o != m && o & !m == 0))
        .map(|&m| u.set(m))
        .collect()
}

/// Canonical identity of a family: relabelling-canonical closure plus group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalKey {
    pub closure: MonomialSet,
    pub invariant_factors: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub representative: MonomialSet,
    pub closure: MonomialSet,
    pub group: AbelianGroupStructure,
    pub certification: SmoothnessVerdict,
    pub key: CanonicalKey,
}

/// An admissible family whose generic member could not be certified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub representative: MonomialSet,
    pub closure: MonomialSet,
    pub group: AbelianGroupStructure,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub max_added: Option<usize>,
    /// Primes tried in order, each with `seeds_per_prime` random draws.
    pub primes: Vec<u64>,
    pub seeds_per_prime: usize,
    pub seed: u64,
    pub mode: Mode,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            max_added: Some(4),
            primes: vec![101, 1009],
            seeds_per_prime: 8,
            seed: 0,
            mode: Mode::Parallel,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub entries: Vec<ClassificationEntry>,
    pub rejected: Vec<Rejection>,
    pub admissible_sets: usize,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Tries random members of the family spanned by `set`, over each prime in
/// turn. The draw seeds depend only on `seed` and the set itself.
pub fn certify_family(
    set: &MonomialSet,
    primes: &[u64],
    seeds_per_prime: usize,
    seed: u64,
) -> Result<SmoothnessVerdict, smoothcert::CertError> {
    let mut tried = Vec::new();
    for &p in primes {
        let field = PrimeField::new(p)?;
        tried.push(p);
        for k in 0..seeds_per_prime {
            let s = splitmix(seed ^ splitmix(set.mask()) ^ splitmix(p.wrapping_mul(1 << 20) + k as u64));
            let f = generic_member(set, field, s);
            let v = smoothcert::is_smooth_mod_p(&f, p)?;
            if v.is_certified() {
                return Ok(v);
            }
        }
    }
    Ok(SmoothnessVerdict { status: SmoothStatus::Inconclusive { primes: tried }, witness: None })
}

/// All admissible sets found from all skeletons, relabelling-canonical and sorted.
pub fn admissible_sets(max_added: Option<usize>, mode: Mode) -> Vec<MonomialSet> {
    let skeletons = coverage_skeletons();
    let u = Universe::cubic6();
    let raw = par::flat_map(mode, &skeletons, |s| {
        complete_to_admissible(s, max_added)
            .into_iter()
            .map(|a| u.canonical_mask(a.mask()).0)
            .collect()
    });
    let unique: BTreeSet<u64> = raw.into_iter().collect();
    let mut out: Vec<MonomialSet> = unique.into_iter().map(|m| u.set(m)).collect();
    out.sort();
    out
}

pub fn classify(config: &ClassifyConfig) -> Result<Classification, EnumError> {
    let sets = admissible_sets(config.max_added, config.mode);
    classify_sets(&sets, config)
}

/// Classifies explicitly given supports (used for re-running on closures).
pub fn classify_sets(sets: &[MonomialSet], config: &ClassifyConfig) -> Result<Classification, EnumError> {
    let u = Universe::cubic6();
    let analysed = par::map(config.mode, sets, |a| -> Result<_, EnumError> {
        let g = diaggroup::symmetry_group(a)?;
        let closure = g.closure();
        let canon = u.set(u.canonical_mask(closure.mask()).0);
        Ok((*a, g.structure.shape(), canon))
    });
    // Smallest representative per closure family.
    let mut families: BTreeMap<CanonicalKey, (MonomialSet, AbelianGroupStructure)> = BTreeMap::new();
    for r in analysed {
        let (a, group, closure) = r?;
        let key = CanonicalKey { closure, invariant_factors: group.invariant_factors.clone() };
        families
            .entry(key)
            .and_modify(|e| {
                if a < e.0 {
                    e.0 = a;
                }
            })
            .or_insert((a, group));
    }
    let todo: Vec<(CanonicalKey, MonomialSet, AbelianGroupStructure)> =
        families.into_iter().map(|(k, (a, g))| (k, a, g)).collect();
    let verdicts = par::map(config.mode, &todo, |(key, _, group)| {
        if !group.is_finite() {
            return Ok(None);
        }
        certify_family(&key.closure, &config.primes, config.seeds_per_prime, config.seed).map(Some)
    });
    let mut out = Classification { admissible_sets: sets.len(), ..Default::default() };
    for ((key, rep, group), v) in todo.into_iter().zip(verdicts) {
        match v? {
            Some(v) if v.is_certified() => out.entries.push(ClassificationEntry {
                representative: rep,
                closure: key.closure,
                group,
                certification: v,
                key,
            }),
            other => out.rejected.push(Rejection {
                representative: rep,
                closure: key.closure,
                reason: match other {
                    None => format!("continuous symmetry (free rank {})", group.free_rank),
                    Some(_) => "no certified smooth member".to_string(),
                },
                group,
            }),
        }
    }
    Ok(out)
}

/// Groups of `entries` that do not embed into a different group of another entry.
pub fn maximal_groups(entries: &[ClassificationEntry]) -> Vec<AbelianGroupStructure> {
    let groups: BTreeSet<Vec<u64>> =
        entries.iter().filter(|e| e.group.is_finite()).map(|e| e.group.invariant_factors.clone()).collect();
    maximal_among(groups.into_iter().map(|f| canonical_group(&f)).collect())
}

/// Antichain of maximal elements under embedding, sorted by order then factors.
pub fn maximal_among(groups: Vec<AbelianGroupStructure>) -> Vec<AbelianGroupStructure> {
    let mut uniq: Vec<AbelianGroupStructure> = Vec::new();
    for g in groups {
        let g = g.shape();
        if !uniq.contains(&g) {
            uniq.push(g);
        }
    }
    let mut out: Vec<AbelianGroupStructure> = uniq
        .iter()
        .filter(|g| !uniq.iter().any(|h| h != *g && embeds(g, h).unwrap_or(false)))
        .cloned()
        .collect();
    out.sort_by(|a, b| (a.order(), &a.invariant_factors).cmp(&(b.order(), &b.invariant_factors)));
    out
}

/// The reference list of maximal groups shipped with the crate.
pub fn reference_groups() -> Vec<AbelianGroupStructure> {
    REFERENCE_GROUPS
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<u64> = l.split(',').map(|x| x.trim().parse().expect("reference factor")).collect();
            canonical_group(&f)
        })
        .collect()
}

/// Outcome of comparing computed maximal groups with a reference list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremCheck {
    /// Computed groups that embed into no reference group.
    pub not_embedding: Vec<AbelianGroupStructure>,
    /// Reference groups absent from the computed maximal list.
    pub missing: Vec<AbelianGroupStructure>,
    pub computed: Vec<AbelianGroupStructure>,
}

impl TheoremCheck {
    pub fn passed(&self) -> bool {
        self.not_embedding.is_empty() && self.missing.is_empty()
    }
}

pub fn check_against_reference(
    computed_groups: &[AbelianGroupStructure],
    reference: &[AbelianGroupStructure],
) -> TheoremCheck {
    let computed = maximal_among(computed_groups.to_vec());
    let not_embedding = computed
        .iter()
        .filter(|g| !g.is_finite() || !reference.iter().any(|r| embeds(g, r).unwrap_or(false)))
        .cloned()
        .collect();
    let missing = reference
        .iter()
        .filter(|r| !computed.iter().any(|g| g.is_isomorphic(r)))
        .cloned()
        .collect();
    TheoremCheck { not_embedding, missing, computed }
}

/// Removal record of [`compact_table`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsumption {
    pub removed: CanonicalKey,
    pub by: CanonicalKey,
}

/// Table compaction: drops an entry when its group embeds into another
/// entry's group and, after some relabelling, the other entry's weight
/// classes each lie inside one of its own classes.
pub fn compact_table(entries: &[ClassificationEntry]) -> (Vec<ClassificationEntry>, Vec<Subsumption>) {
    let u = Universe::cubic6();
    let n_perm = u.permutation_count();
    let perms: Vec<Vec<usize>> = {
        let mut v = Vec::with_capacity(n_perm);
        let mut p: Vec<usize> = (0..u.vars()).collect();
        loop {
            v.push(p.clone());
            if !next_perm(&mut p) {
                break;
            }
        }
        v
    };
    let partitions: Vec<Vec<u64>> = entries
        .iter()
        .map(|e| {
            diaggroup::symmetry_group(&e.closure)
                .ok()
                .map(|g| {
                    partition_by_signatures(&g.generator_signatures, u)
                        .into_values()
                        .map(|s| s.mask())
                        .collect()
                })
                .unwrap_or_default()
        })
        .collect();
    let mut removed = vec![false; entries.len()];
    let mut log = Vec::new();
    for i in 0..entries.len() {
        for j in 0..entries.len() {
            if i == j || removed[j] {
                continue;
            }
            let (gi, gj) = (&entries[i].group, &entries[j].group);
            if gi.order() > gj.order() || !embeds(gi, gj).unwrap_or(false) {
                continue;
            }
            if gi.is_isomorphic(gj) && entries[i].key <= entries[j].key {
                continue;
            }
            let coarsens = perms.iter().any(|p| {
                partitions[j].iter().all(|&blk| {
                    let img = u.permute_mask(blk, p);
                    partitions[i].iter().any(|&c| img & !c == 0)
                })
            });
            if coarsens {
                removed[i] = true;
                log.push(Subsumption { removed: entries[i].key.clone(), by: entries[j].key.clone() });
                break;
            }
        }
    }
    let kept = entries.iter().zip(&removed).filter(|(_, r)| !**r).map(|(e, _)| e.clone()).collect();
    (kept, log)
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { return false };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// One parsed fixture record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub line: usize,
    pub set: MonomialSet,
    pub group: AbelianGroupStructure,
    pub closure: MonomialSet,
}

pub fn parse_fixtures(text: &str) -> Result<Vec<Fixture>, EnumError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let bad = |message: String| EnumError::Fixture { line: k + 1, message };
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        }
        let set: MonomialSet = fields[0].parse().map_err(|e: DomainError| bad(e.to_string()))?;
        let factors: Vec<u64> = fields[1]
            .split(',')
            .map(|x| x.trim().parse::<u64>().map_err(|e| bad(e.to_string())))
            .collect::<Result<_, _>>()?;
        let closure: MonomialSet = fields[2].parse().map_err(|e: DomainError| bad(e.to_string()))?;
        out.push(Fixture { line: k + 1, set, group: canonical_group(&factors), closure });
    }
    Ok(out)
}

pub fn load_fixtures(path: &Path) -> Result<Vec<Fixture>, EnumError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| EnumError::Io { path: path.display().to_string(), source })?;
    parse_fixtures(&text)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureMismatch {
    pub fixture: Fixture,
    pub computed_group: AbelianGroupStructure,
    pub computed_closure: MonomialSet,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixtureReport {
    pub checked: usize,
    pub mismatches: Vec<FixtureMismatch>,
}

impl fmt::Display for FixtureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} fixtures checked, {} mismatches", self.checked, self.mismatches.len())?;
        for m in &self.mismatches {
            writeln!(
                f,
                "  line {}: expected {} / {{{}}}, computed {} / {{{}}}",
                m.fixture.line, m.fixture.group, m.fixture.closure, m.computed_group, m.computed_closure
            )?;
        }
        Ok(())
    }
}

pub fn verify_fixtures(fixtures: &[Fixture]) -> Result<FixtureReport, EnumError> {
    let mut report = FixtureReport { checked: fixtures.len(), mismatches: Vec::new() };
    for fx in fixtures {
        let g = diaggroup::symmetry_group(&fx.set)?;
        let closure = g.closure();
        if !g.structure.is_isomorphic(&fx.group) || closure != fx.closure {
            report.mismatches.push(FixtureMismatch {
                fixture: fx.clone(),
                computed_group: g.structure.shape(),
                computed_closure: closure,
            });
        }
    }
    Ok(report)
}

/// Checks the shipped fixture table.
pub fn verify_fixture_table() -> Result<FixtureReport, EnumError> {
    verify_fixtures(&parse_fixtures(FIXTURES)?)
}

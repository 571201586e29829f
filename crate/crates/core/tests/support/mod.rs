//! Brute-force oracles shared by the integration tests and the acceptance
//! harness.
#![allow(dead_code)]

use std::collections::HashSet;

use cubicfour::cubicdomain::{Monomial, MonomialSet};
use cubicfour::lattice::factorize;
use cubicfour::smoothcert::{is_smooth_mod_p, parse_polynomial, singular_points_bruteforce, PrimeField};

pub const FORMS: &str = include_str!("../../data/smooth_forms.txt");

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Invariant factors from element orders: |G[p^k]| = p^{Σ min(k, e_i)}.
pub fn factors_from_orders(orders: &[u64]) -> Vec<u64> {
    let n = orders.len() as u64;
    let mut cyclic = Vec::new();
    for (p, _) in factorize(n) {
        let log = |k: u32| {
            let c = orders.iter().filter(|&&o| p.pow(k) % o == 0).count() as u64;
            (c as f64).log(p as f64).round() as u32
        };
        // r_k = number of cyclic p-parts of exponent ≥ k
        let mut k = 1;
        let mut prev = 0;
        let mut ranks = Vec::new();
        loop {
            let l = log(k);
            if l == prev {
                break;
            }
            ranks.push(l - prev);
            prev = l;
            k += 1;
        }
        for j in 1..=ranks.first().copied().unwrap_or(0) {
            let e = ranks.iter().filter(|&&r| r >= j).count() as u32;
            cyclic.push(p.pow(e));
        }
    }
    cyclic
}

pub struct Census {
    pub orders: Vec<u64>,
    pub closure: u64,
}

/// Every c ∈ (Z/e)^6 with c_0 = 0 that gives all monomials of `set` the
/// same weight. Such diagonal matrices, taken modulo scalars, are exactly
/// the symmetries whose order divides e. Coordinates are assigned one at a
/// time and each difference constraint is checked as soon as it is fully
/// determined.
pub fn census(set: &MonomialSet, e: u64) -> Census {
    let u = set.universe();
    let exps = |m: &Monomial| {
        let x = m.exponents();
        [0, 1, 2, 3, 4, 5].map(|i| x[i] as i64)
    };
    let ms: Vec<[i64; 6]> = set.iter().map(|m| exps(&m)).collect();
    let diffs: Vec<[i64; 6]> = ms[1..]
        .iter()
        .map(|m| [0, 1, 2, 3, 4, 5].map(|i| (m[i] - ms[0][i]).rem_euclid(e as i64)))
        .collect();
    // constraints grouped by the last coordinate they involve
    let mut by_last: Vec<Vec<[i64; 6]>> = vec![Vec::new(); 6];
    for d in diffs {
        if let Some(last) = (1..6).rev().find(|&i| d[i] != 0) {
            by_last[last].push(d);
        }
    }
    let all: Vec<[i64; 6]> = u.monomials().iter().map(exps).collect();

    fn rec(
        i: usize,
        c: &mut [i64; 6],
        e: i64,
        by_last: &[Vec<[i64; 6]>],
        leaf: &mut dyn FnMut(&[i64; 6]),
    ) {
        if i == 6 {
            leaf(c);
            return;
        }
        for x in 0..e {
            c[i] = x;
            let ok = by_last[i]
                .iter()
                .all(|d| d.iter().zip(c.iter()).map(|(a, b)| a * b).sum::<i64>() % e == 0);
            if ok {
                rec(i + 1, c, e, by_last, leaf);
            }
        }
    }

    let mut orders = Vec::new();
    let mut closure = u.full_mask();
    let w = |m: &[i64; 6], c: &[i64; 6]| m.iter().zip(c).map(|(a, b)| a * b).sum::<i64>() % e as i64;
    rec(1, &mut [0; 6], e as i64, &by_last, &mut |c| {
        orders.push(c.iter().fold(1u64, |acc, &x| {
            let o = e / gcd(x as u64, e);
            acc / gcd(acc, o) * o
        }));
        let w0 = w(&ms[0], c);
        for (i, m) in all.iter().enumerate() {
            if w(m, c) != w0 {
                closure &= !(1u64 << i);
            }
        }
    });
    Census { orders, closure }
}

// --- embeddings of finite abelian groups -----------------------------------

pub fn chains_of_order(n: u64) -> Vec<Vec<u64>> {
    // invariant-factor chains d_1 | d_2 | ... with product n, d_1 > 1
    fn rec(rem: u64, min: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rem == 1 {
            out.push(cur.clone());
            return;
        }
        for d in 2..=rem {
            if rem.is_multiple_of(d) && d % min == 0 {
                cur.push(d);
                rec(rem / d, d, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, 1, &mut Vec::new(), &mut out);
    out
}

/// A finite abelian group of order ≤ 64 with elements numbered 0..n and
/// subgroups stored as bitmasks.
pub struct Finite {
    pub add: Vec<Vec<usize>>,
    pub order: Vec<u64>,
}

impl Finite {
    pub fn new(mods: &[u64]) -> Self {
        let n = mods.iter().product::<u64>() as usize;
        assert!(n <= 64);
        let elem = |mut k: usize| -> Vec<u64> {
            mods.iter()
                .map(|&m| {
                    let x = k as u64 % m;
                    k /= m as usize;
                    x
                })
                .collect()
        };
        let index = |v: &[u64]| v.iter().zip(mods).rev().fold(0usize, |k, (&x, &m)| k * m as usize + x as usize);
        let add = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let s: Vec<u64> =
                            elem(a).iter().zip(elem(b)).zip(mods).map(|((x, y), m)| (x + y) % m).collect();
                        index(&s)
                    })
                    .collect()
            })
            .collect();
        let order = (0..n)
            .map(|a| {
                elem(a).iter().zip(mods).fold(1, |acc, (&x, &m)| {
                    let o = m / gcd(x, m);
                    acc / gcd(acc, o) * o
                })
            })
            .collect();
        Finite { add, order }
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    /// Subgroup generated by `sub` and `h`.
    pub fn extend(&self, sub: u64, h: usize) -> u64 {
        let mut out = sub;
        let mut mult = h;
        while mult != 0 {
            for k in (0..self.size()).filter(|&k| sub >> k & 1 == 1) {
                out |= 1 << self.add[k][mult];
            }
            mult = self.add[mult][h];
        }
        out
    }
}

/// Search for an injective homomorphism Z/g_1 ⊕ … → H: choose images of
/// the right orders so that each one enlarges the subgroup by its full
/// order. Failed (depth, subgroup) states are remembered.
pub fn embeds_by_search(g: &[u64], h: &Finite) -> bool {
    fn go(g: &[u64], h: &Finite, sub: u64, failed: &mut HashSet<(usize, u64)>) -> bool {
        let Some((&gi, rest)) = g.split_first() else { return true };
        if failed.contains(&(g.len(), sub)) {
            return false;
        }
        let have = sub.count_ones() as u64;
        for x in (0..h.size()).filter(|&x| h.order[x] == gi) {
            let next = h.extend(sub, x);
            if next.count_ones() as u64 == have * gi && go(rest, h, next, failed) {
                return true;
            }
        }
        failed.insert((g.len(), sub));
        false
    }
    go(g, h, 1, &mut HashSet::new())
}

// --- Gröbner certificates against point counts ------------------------------

pub fn forms() -> Vec<&'static str> {
    FORMS.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect()
}

// Every monomial has degree at most one in some x_k, so e_k is singular.
pub const SINGULAR: &[&str] = &[
    "x0^3+x1^3+x2^3+x3^3+x4^3",
    "x0^3+x1^3+x2^3+x3^3+x4^3+x0*x1*x4",
    "x0*x1*x2+x3^3+x4^3+x5^3",
    "x0^3+x1^3+x2^3+x3^3+x4^2*x5",
    "x0^3+x1^3+x2^3+x3^3+x4^3+x0*x1*x5+x2*x3*x5",
];

pub fn groebner_agrees_with_points(text: &str, p: u64) {
    let f = parse_polynomial(text, 6).unwrap();
    let Some(fp) = f.reduce_mod(PrimeField::new(p).unwrap()) else { return };
    let groebner_smooth = is_smooth_mod_p(&fp, p).unwrap().is_certified();
    let no_points = singular_points_bruteforce(&fp).unwrap().is_empty();
    assert_eq!(groebner_smooth, no_points, "p = {p}: {text}");
}

// --- Pair/triple predicates -----------------------------------------------------

/// Pair/triple predicates straight from the decomposition: a pair/triple S is
/// singular when no monomial is cubic in S and the monomials quadratic in S
/// use at most one (pair) or two (triple) outside variables.
pub fn naive_singular(set: &MonomialSet, vars: &[usize]) -> bool {
    let mut outside = Vec::new();
    for m in set.iter() {
        let e = m.exponents();
        let in_s: u8 = vars.iter().map(|&v| e[v]).sum();
        match in_s {
            3 => return false,
            2 => {
                let p = (0..e.len()).find(|k| !vars.contains(k) && e[*k] == 1).unwrap();
                if !outside.contains(&p) {
                    outside.push(p);
                }
            }
            _ => {}
        }
    }
    outside.len() < vars.len()
}

pub fn naive_covered(set: &MonomialSet) -> bool {
    (0..6).all(|i| set.iter().any(|m| m.exponents()[i] >= 2))
}

//! Buchberger's algorithm with the Gebauer–Möller pair update, normal
//! selection strategy, and a reduced monic result.

use super::poly::{Field, Mono, SparsePolynomial};

#[derive(Clone, Debug, PartialEq)]
pub struct GroebnerBasis<F: Field> {
    nvars: usize,
    generators: Vec<SparsePolynomial<F>>,
}

impl<F: Field> GroebnerBasis<F> {
    pub fn generators(&self) -> &[SparsePolynomial<F>] {
        &self.generators
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn leading_monomials(&self) -> Vec<Mono> {
        self.generators.iter().filter_map(|g| g.leading_monomial().copied()).collect()
    }

    pub fn contains_unit(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant())
    }

    pub fn normal_form(&self, f: &SparsePolynomial<F>) -> SparsePolynomial<F> {
        let refs: Vec<&SparsePolynomial<F>> = self.generators.iter().collect();
        normal_form(f, &refs)
    }

    /// Every S-polynomial of the basis reduces to zero.
    pub fn satisfies_buchberger_criterion(&self) -> bool {
        let g = &self.generators;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if !self.normal_form(&s_polynomial(&g[i], &g[j])).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Leading monomials pairwise non-divisible, all generators monic and
    /// no term of any generator divisible by another's leading monomial.
    pub fn is_reduced(&self) -> bool {
        let f = self.generators.first().map(|g| g.field().clone());
        let lms = self.leading_monomials();
        self.generators.iter().enumerate().all(|(i, g)| {
            let monic = match (&f, g.leading_coefficient()) {
                (Some(f), Some(c)) => *c == f.one(),
                _ => false,
            };
            monic
                && g.terms().iter().all(|(m, _)| {
                    lms.iter().enumerate().all(|(j, l)| j == i || !l.divides(m))
                })
        })
    }

    /// Dimension of the affine zero set: −1 when empty, otherwise the largest
    /// set of variables S such that no leading monomial lives in k[S].
    pub fn affine_dimension(&self) -> i32 {
        if self.contains_unit() {
            return -1;
        }
        let supports: Vec<u32> =
            self.generators.iter().filter_map(|g| g.leading_monomial()).map(|m| m.support()).collect();
        let n = self.nvars;
        let mut best = 0;
        for s in 0u32..(1 << n) {
            let size = s.count_ones() as i32;
            if size > best && supports.iter().all(|&sup| sup & !s != 0) {
                best = size;
            }
        }
        best
    }
}

pub fn s_polynomial<F: Field>(f: &SparsePolynomial<F>, g: &SparsePolynomial<F>) -> SparsePolynomial<F> {
    let (Some(lf), Some(lg)) = (f.leading_monomial(), g.leading_monomial()) else {
        return SparsePolynomial::zero(f.field().clone(), f.nvars());
    };
    let field = f.field();
    let l = lf.lcm(lg);
    let cf = field.inv(f.leading_coefficient().expect("nonzero"));
    let cg = field.inv(g.leading_coefficient().expect("nonzero"));
    let a = SparsePolynomial::zero(field.clone(), f.nvars()).sub_scaled(&field.neg(&cf), &lf.quotient_of(&l), f);
    a.sub_scaled(&cg, &lg.quotient_of(&l), g)
}

/// Full reduction of `f` modulo `basis` (leading and tail terms).
pub fn normal_form<F: Field>(
    f: &SparsePolynomial<F>,
    basis: &[&SparsePolynomial<F>],
) -> SparsePolynomial<F> {
    let field = f.field().clone();
    let mut p = f.clone();
    let mut rest: Vec<(Mono, F::Elem)> = Vec::new();
    while let Some((lm, lc)) = p.terms().first().cloned() {
        let divisor = basis
            .iter()
            .find(|g| g.leading_monomial().is_some_and(|gm| gm.divides(&lm)));
        match divisor {
            Some(g) => {
                let gm = g.leading_monomial().expect("nonzero");
                let c = field.mul(&lc, &field.inv(g.leading_coefficient().expect("nonzero")));
                p = p.sub_scaled(&c, &gm.quotient_of(&lm), g);
            }
            None => {
                rest.push((lm, lc));
                let tail = p.terms()[1..].to_vec();
                p = SparsePolynomial::from_terms(field.clone(), p.nvars(), tail);
            }
        }
    }
    SparsePolynomial::from_terms(field, f.nvars(), rest)
}

#[derive(Clone, Copy, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

/// Gebauer–Möller installation of a new basis element `h` (index into `polys`).
fn update<F: Field>(
    polys: &[SparsePolynomial<F>],
    active: &mut Vec<usize>,
    pairs: &mut Vec<Pair>,
    h: usize,
) {
    let lm = |k: usize| *polys[k].leading_monomial().expect("basis elements are nonzero");
    let hm = lm(h);

    let mut c: Vec<Pair> =
        active.iter().map(|&g| Pair { i: g, j: h, lcm: hm.lcm(&lm(g)) }).collect();
    let mut d: Vec<Pair> = Vec::new();
    while let Some(p) = c.pop() {
        let coprime = hm.coprime(&lm(p.i));
        if coprime
            || (c.iter().all(|q| !q.lcm.divides(&p.lcm)) && d.iter().all(|q| !q.lcm.divides(&p.lcm)))
        {
            d.push(p);
        }
    }
    let e: Vec<Pair> = d.into_iter().filter(|p| !hm.coprime(&lm(p.i))).collect();

    pairs.retain(|p| {
        !hm.divides(&p.lcm)
            || hm.lcm(&lm(p.i)) == p.lcm
            || hm.lcm(&lm(p.j)) == p.lcm
    });
    pairs.extend(e);

    active.retain(|&g| !hm.divides(&lm(g)));
    active.push(h);
}

/// Reduced Gröbner basis in degree reverse lexicographic order.
pub fn groebner<F: Field>(gens: &[SparsePolynomial<F>]) -> GroebnerBasis<F> {
    let nvars = gens.iter().map(|g| g.nvars()).max().unwrap_or(0);
    let mut polys: Vec<SparsePolynomial<F>> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut input: Vec<SparsePolynomial<F>> =
        gens.iter().filter(|g| !g.is_zero()).map(|g| g.monic()).collect();
    input.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));

    let mut unit = None;
    for f in input {
        let refs: Vec<&SparsePolynomial<F>> = active.iter().map(|&k| &polys[k]).collect();
        let h = normal_form(&f, &refs);
        if h.is_zero() {
            continue;
        }
        let h = h.monic();
        if h.is_constant() {
            unit = Some(h);
            break;
        }
        polys.push(h);
        update(&polys, &mut active, &mut pairs, polys.len() - 1);
    }

    while unit.is_none() && !pairs.is_empty() {
        // Normal strategy: smallest lcm first; ties by creation order.
        let k = (0..pairs.len())
            .min_by(|&a, &b| {
                pairs[a]
                    .lcm
                    .cmp(&pairs[b].lcm)
                    .then((pairs[a].j, pairs[a].i).cmp(&(pairs[b].j, pairs[b].i)))
            })
            .expect("nonempty");
        let p = pairs.swap_remove(k);
        let s = s_polynomial(&polys[p.i], &polys[p.j]);
        let refs: Vec<&SparsePolynomial<F>> = active.iter().map(|&k| &polys[k]).collect();
        let h = normal_form(&s, &refs);
        if h.is_zero() {
            continue;
        }
        let h = h.monic();
        if h.is_constant() {
            unit = Some(h);
            break;
        }
        polys.push(h);
        update(&polys, &mut active, &mut pairs, polys.len() - 1);
    }

    if let Some(u) = unit {
        return GroebnerBasis { nvars, generators: vec![u] };
    }

    // Minimal basis, then inter-reduce tails.
    let mut basis: Vec<SparsePolynomial<F>> = active.iter().map(|&k| polys[k].clone()).collect();
    basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    let lms: Vec<Mono> = basis.iter().map(|g| *g.leading_monomial().expect("nonzero")).collect();
    let keep: Vec<bool> = (0..basis.len())
        .map(|i| !(0..basis.len()).any(|j| j != i && lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i)))
        .collect();
    let basis: Vec<SparsePolynomial<F>> =
        basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect();
    let mut reduced = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let others: Vec<&SparsePolynomial<F>> =
            basis.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g).collect();
        reduced.push(normal_form(&basis[i], &others).monic());
    }
    GroebnerBasis { nvars, generators: reduced }
}

#[cfg(test)]
mod tests {
    use super::super::poly::{parse_polynomial, PrimeField};
    use super::*;

    fn fp(s: &str, p: u64) -> SparsePolynomial<PrimeField> {
        parse_polynomial(s, 6).unwrap().reduce_mod(PrimeField::new(p).unwrap()).unwrap()
    }

    #[test]
    fn variables_are_a_basis() {
        let g = groebner(&[fp("x0", 5), fp("x1", 5)]);
        assert_eq!(g.generators().len(), 2);
        assert_eq!(g.affine_dimension(), 4);
        assert!(g.satisfies_buchberger_criterion());
        assert!(g.is_reduced());
    }

    #[test]
    fn two_variable_instance() {
        // x0^2 − x1, x1^2: the ideal contains x0^4 = (x0^2 + x1)(x0^2 − x1) + x1^2.
        let g = groebner(&[fp("x0^2 - x1", 5), fp("x1^2", 5)]);
        assert!(g.satisfies_buchberger_criterion());
        assert!(g.normal_form(&fp("x0^4", 5)).is_zero());
        assert!(!g.normal_form(&fp("x0^3", 5)).is_zero());
        assert_eq!(g.affine_dimension(), 4);
    }

    #[test]
    fn fermat_partials() {
        let gens: Vec<_> = (0..6).map(|i| fp(&format!("3*x{i}^2"), 5)).collect();
        let g = groebner(&gens);
        let lms = g.leading_monomials();
        assert_eq!(lms.len(), 6);
        for i in 0..6 {
            let mut e = [0u8; 6];
            e[i] = 2;
            assert!(lms.contains(&Mono::new(&e)));
        }
        assert_eq!(g.affine_dimension(), 0);
    }

    #[test]
    fn unit_ideal() {
        let g = groebner(&[fp("x0 + 1", 7), fp("x0", 7)]);
        assert_eq!(g.affine_dimension(), -1);
        assert!(g.contains_unit());
    }

    #[test]
    fn single_linear_form() {
        let g = groebner(&[fp("x0", 5)]);
        assert_eq!(g.affine_dimension(), 5);
    }

    #[test]
    fn deterministic() {
        let gens = vec![fp("x0^2 + x1*x2", 11), fp("x1^2 - x0*x3", 11), fp("x2^3 + x5^3", 11)];
        let a = groebner(&gens);
        let b = groebner(&gens);
        assert_eq!(a, b);
        assert!(a.satisfies_buchberger_criterion());
        assert!(a.is_reduced());
    }
}

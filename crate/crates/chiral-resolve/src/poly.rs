//! Graded polynomial rings on boson modes, over the rationals.
//!
//! Two variable families occur: the odd-spin generators `u_s` of the ring of
//! integrals of motion (`u_s` has energy 2s-1) and the even modes `v_l`
//! (energy 2l) that realize the boson side of the fermion correspondence.
//! Both share the same machinery; the weighting is a type parameter.
//!
//! On top of the ring sit the series coefficients `T_{-n}` of
//! `exp(sum_s u_s z^{2s-1} / (2s-1))` and the quadratic `Q_{n,l}` polynomials
//! entering the squared screening operator and the fermion basis change.

use crate::fock::Sector;
use crate::linalg::{frac, int, Scalar, SparseMatrix};
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;
use std::sync::{Mutex, OnceLock};

/// Exponent vector, one entry per variable index (1-based), with trailing
/// zeros trimmed so equal monomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: usize) -> Self {
        assert!(s >= 1);
        let mut e = vec![0; s];
        e[s - 1] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut e = vec![0u32; n];
        for (i, x) in self.0.iter().enumerate() {
            e[i] += x;
        }
        for (i, x) in other.0.iter().enumerate() {
            e[i] += x;
        }
        Monomial::from_exponents(e)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }
}

/// Assigns each 1-based variable index its energy.
pub trait VarWeight: Copy + Ord + std::hash::Hash + std::fmt::Debug + 'static {
    const PREFIX: &'static str;
    fn weight(s: usize) -> i64;
}

/// `u_s`, energy 2s - 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OddVars;

impl VarWeight for OddVars {
    const PREFIX: &'static str = "u";
    fn weight(s: usize) -> i64 {
        2 * s as i64 - 1
    }
}

/// `v_l`, energy 2l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EvenVars;

impl VarWeight for EvenVars {
    const PREFIX: &'static str = "v";
    fn weight(s: usize) -> i64 {
        2 * s as i64
    }
}

pub fn monomial_energy<W: VarWeight>(m: &Monomial) -> i64 {
    m.exponents().iter().enumerate().map(|(i, &e)| W::weight(i + 1) * e as i64).sum()
}

/// All monomials of the given energy, sorted by exponent vector.
pub fn monomials_of_energy<W: VarWeight>(energy: i64) -> Vec<Monomial> {
    fn rec<W: VarWeight>(s: usize, remaining: i64, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if remaining == 0 {
            out.push(Monomial::from_exponents(prefix.clone()));
            return;
        }
        if s == 0 {
            return;
        }
        let w = W::weight(s);
        let max_e = remaining / w;
        for e in 0..=max_e {
            prefix[s - 1] = e as u32;
            rec::<W>(s - 1, remaining - e * w, prefix, out);
        }
        prefix[s - 1] = 0;
    }
    if energy < 0 {
        return Vec::new();
    }
    let mut s_max = 0;
    while W::weight(s_max + 1) <= energy.max(1) {
        s_max += 1;
    }
    let mut out = Vec::new();
    let mut prefix = vec![0u32; s_max];
    rec::<W>(s_max, energy, &mut prefix, &mut out);
    out.sort();
    out
}

/// Number of monomials in the odd-variable ring at the given energy, i.e.
/// partitions of `energy` into odd parts.
pub fn d_graded_dim(energy: i64) -> usize {
    monomials_of_energy::<OddVars>(energy).len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPoly<W: VarWeight> {
    terms: BTreeMap<Monomial, Scalar>,
    _weight: PhantomData<fn() -> W>,
}

pub type WeightedPolynomial = GradedPoly<OddVars>;
pub type EvenPolynomial = GradedPoly<EvenVars>;

impl<W: VarWeight> GradedPoly<W> {
    pub fn zero() -> Self {
        GradedPoly { terms: BTreeMap::new(), _weight: PhantomData }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::unit(), c);
        p
    }

    pub fn var(s: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(s), Scalar::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (m, v) in self.terms() {
            out.terms.insert(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            out.add_term(m1.mul(m), c1.clone() * c.clone());
        }
        out
    }

    /// Energy of a nonzero homogeneous polynomial; None when zero or mixed.
    pub fn energy(&self) -> Option<i64> {
        let mut e = None;
        for (m, _) in self.terms() {
            let me = monomial_energy::<W>(m);
            match e {
                None => e = Some(me),
                Some(prev) if prev != me => return None,
                _ => {}
            }
        }
        e
    }

    pub fn is_homogeneous_of(&self, energy: i64) -> bool {
        self.terms().all(|(m, _)| monomial_energy::<W>(m) == energy)
    }
}

impl<W: VarWeight> fmt::Display for GradedPoly<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if m.is_unit() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} *")?;
                for (i, &e) in m.exponents().iter().enumerate() {
                    if e > 0 {
                        write!(f, " {}{}^{}", W::PREFIX, i + 1, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Coefficients `T_{-n}`, `0 <= n <= max_energy`, of
/// `exp(sum_{s>=1} u_s z^{2s-1} / (2s-1)) = sum_n T_{-n} z^n`.
///
/// Computed by the differential recursion `n T_{-n} = sum_s u_s T_{-(n-(2s-1))}`
/// (differentiate the exponential in z and match coefficients); the naive
/// exponentiation oracle in the tests pins this down independently.
pub fn expand_exp_x(max_energy: i64) -> Vec<WeightedPolynomial> {
    let n = max_energy.max(0) as usize;
    let mut t: Vec<WeightedPolynomial> = Vec::with_capacity(n + 1);
    t.push(WeightedPolynomial::one());
    for k in 1..=n {
        let mut acc = WeightedPolynomial::zero();
        let mut s = 1usize;
        while 2 * s - 1 <= k {
            let prev = &t[k - (2 * s - 1)];
            acc = acc.add(&prev.mul(&WeightedPolynomial::var(s)));
            s += 1;
        }
        t.push(acc.scale(&frac(1, k as i64)));
    }
    for (k, poly) in t.iter().enumerate() {
        debug_assert!(poly.is_homogeneous_of(k as i64));
    }
    t
}

fn t_cache() -> &'static Mutex<Vec<WeightedPolynomial>> {
    static CACHE: OnceLock<Mutex<Vec<WeightedPolynomial>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// `T_{-n}` with a process-wide cache. Negative `n` (a positive subscript on
/// T) is zero by convention: the exponential has no negative powers of z.
pub fn t_poly(n: i64) -> WeightedPolynomial {
    if n < 0 {
        return WeightedPolynomial::zero();
    }
    let mut cache = t_cache().lock().unwrap();
    if (n as usize) >= cache.len() {
        *cache = expand_exp_x(n.max(15));
    }
    cache[n as usize].clone()
}

/// Coefficient of z^k in `tau(z) = sum_{n>=1} z^{2n-1} - 2 sum_{n>=1} z^{2n}`.
pub fn tau_coefficient(k: i64) -> i64 {
    if k <= 0 {
        0
    } else if k % 2 == 1 {
        1
    } else {
        -2
    }
}

/// The quadratic polynomials entering the squared screening operator:
///
/// even sector: `Q_{n,l} = sum_{n1+n2=l, 0<=n1, 0<=n2<=n} (T_{-2n1} T_{-2n2} - 2 T_{-(2n1+1)} T_{-(2n2-1)})`
/// odd sector:  `Q_{n,l} = sum_{n1+n2=l, 0<=n1, 0<=n2<=n} (-2 T_{-2n1} T_{-2n2} + T_{-(2n1-1)} T_{-(2n2+1)})`
///
/// with T at a positive subscript read as zero. Energy-homogeneous of
/// energy 2l.
pub fn q_poly(sector: Sector, n: i64, l: i64) -> WeightedPolynomial {
    assert!(l >= 1, "q_poly needs l >= 1");
    type QKey = (Sector, i64, i64);
    static CACHE: OnceLock<Mutex<HashMap<QKey, WeightedPolynomial>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(sector, n, l)) {
        return hit.clone();
    }
    let mut acc = WeightedPolynomial::zero();
    for n2 in 0..=n.min(l) {
        let n1 = l - n2;
        match sector {
            Sector::R => {
                acc = acc.add(&t_poly(2 * n1).mul(&t_poly(2 * n2)));
                acc = acc.add(&t_poly(2 * n1 + 1).mul(&t_poly(2 * n2 - 1)).scale(&int(-2)));
            }
            Sector::NS => {
                acc = acc.add(&t_poly(2 * n1).mul(&t_poly(2 * n2)).scale(&int(-2)));
                acc = acc.add(&t_poly(2 * n1 - 1).mul(&t_poly(2 * n2 + 1)));
            }
        }
    }
    debug_assert!(acc.is_homogeneous_of(2 * l) || acc.is_zero());
    cache.lock().unwrap().insert((sector, n, l), acc.clone());
    acc
}

/// Matrix of multiplication by a homogeneous polynomial, from the monomial
/// basis at `from_energy` to the basis at `from_energy + energy(p)`.
pub fn mult_matrix<W: VarWeight>(p: &GradedPoly<W>, from_energy: i64) -> SparseMatrix {
    let shift = p.energy().expect("multiplication by a zero or mixed polynomial");
    let source = monomials_of_energy::<W>(from_energy);
    let target = monomials_of_energy::<W>(from_energy + shift);
    let index: BTreeMap<&Monomial, usize> = target.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = SparseMatrix::zero(target.len(), source.len());
    for (j, m) in source.iter().enumerate() {
        for (pm, pc) in p.terms() {
            let prod = m.mul(pm);
            let i = *index.get(&prod).expect("homogeneous product lands in target basis");
            out.add_to(i, j, pc);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: usize) -> WeightedPolynomial {
        WeightedPolynomial::var(s)
    }

    /// Naive oracle: exponentiate `X = sum u_s/(2s-1)` term by term and take
    /// homogeneous components; the z-power of a term equals its energy.
    fn exp_x_oracle(max_energy: i64) -> Vec<WeightedPolynomial> {
        let mut x = WeightedPolynomial::zero();
        let mut s = 1usize;
        while 2 * s as i64 - 1 <= max_energy {
            x = x.add(&u(s).scale(&frac(1, 2 * s as i64 - 1)));
            s += 1;
        }
        let mut total = WeightedPolynomial::one();
        let mut power = WeightedPolynomial::one();
        let mut factorial = Scalar::one();
        for k in 1..=max_energy.max(0) {
            power = power.mul(&x);
            factorial *= int(k);
            total = total.add(&power.scale(&(Scalar::one() / factorial.clone())));
        }
        (0..=max_energy)
            .map(|e| {
                let mut piece = WeightedPolynomial::zero();
                for (m, c) in total.terms() {
                    if monomial_energy::<OddVars>(m) == e {
                        piece.add_term(m.clone(), c.clone());
                    }
                }
                piece
            })
            .collect()
    }

    #[test]
    fn exp_x_matches_naive_oracle() {
        let fast = expand_exp_x(9);
        let slow = exp_x_oracle(9);
        assert_eq!(fast, slow);
    }

    #[test]
    fn exp_x_low_orders() {
        let t = expand_exp_x(4);
        assert_eq!(t[0], WeightedPolynomial::one());
        assert_eq!(t[1], u(1));
        // T_{-3} = u1^3/6 + u2/3
        let mut t3 = u(1).mul(&u(1)).mul(&u(1)).scale(&frac(1, 6));
        t3 = t3.add(&u(2).scale(&frac(1, 3)));
        assert_eq!(t[3], t3);
        // T_{-4} = u1^4/24 + u1 u2/3
        let mut t4 = u(1).mul(&u(1)).mul(&u(1)).mul(&u(1)).scale(&frac(1, 24));
        t4 = t4.add(&u(1).mul(&u(2)).scale(&frac(1, 3)));
        assert_eq!(t[4], t4);
    }

    #[test]
    fn exp_x_leading_generator_coefficient() {
        // T_{-(2s-1)} = u_s/(2s-1) + terms in lower variables only
        for s in 1..=5usize {
            let t = t_poly(2 * s as i64 - 1);
            assert_eq!(t.coeff(&Monomial::var(s)), frac(1, 2 * s as i64 - 1));
            for (m, _) in t.terms() {
                if *m != Monomial::var(s) {
                    assert!(m.exponents().len() < s, "unexpected high variable in {t}");
                }
            }
        }
    }

    #[test]
    fn tau_values() {
        assert_eq!(tau_coefficient(0), 0);
        assert_eq!(tau_coefficient(1), 1);
        assert_eq!(tau_coefficient(2), -2);
        assert_eq!(tau_coefficient(7), 1);
        assert_eq!(tau_coefficient(8), -2);
    }

    #[test]
    fn q_poly_examples() {
        // even sector, l = 1: n >= 1 gives -u1^2, n = 0 gives u1^2/2
        let u1sq = u(1).mul(&u(1));
        for n in 1..=4 {
            assert_eq!(q_poly(Sector::R, n, 1), u1sq.scale(&int(-1)));
        }
        assert_eq!(q_poly(Sector::R, 0, 1), u1sq.scale(&frac(1, 2)));
        for sector in [Sector::R, Sector::NS] {
            for n in 0..=3 {
                for l in 1..=4 {
                    let q = q_poly(sector, n, l);
                    assert!(q.is_homogeneous_of(2 * l) || q.is_zero());
                }
            }
        }
    }

    #[test]
    fn partition_counts_into_odd_parts() {
        // exhaustive oracle: enumerate partitions into odd parts directly
        fn count(e: i64, max_part: i64) -> usize {
            if e == 0 {
                return 1;
            }
            let mut total = 0;
            let mut part = 1;
            while part <= e && part <= max_part {
                total += count(e - part, part);
                part += 2;
            }
            total
        }
        for e in 0..=16 {
            assert_eq!(d_graded_dim(e), count(e, e | 1), "energy {e}");
        }
        assert_eq!(d_graded_dim(0), 1);
        assert_eq!(d_graded_dim(4), 2);
        assert_eq!(d_graded_dim(6), 4);
    }

    #[test]
    fn generator_change_is_triangular() {
        // every monomial in t_s = T_{-(2s-1)} expands as the matching
        // u-monomial (with coefficient prod 1/(2s-1)) plus lex-larger terms
        for energy in 0..=10i64 {
            let monos = monomials_of_energy::<OddVars>(energy);
            for tm in &monos {
                let mut prod = WeightedPolynomial::one();
                for (i, &e) in tm.exponents().iter().enumerate() {
                    for _ in 0..e {
                        prod = prod.mul(&t_poly(2 * (i as i64 + 1) - 1));
                    }
                }
                let diag = prod.coeff(tm);
                assert!(!diag.is_zero(), "vanishing diagonal at {tm:?}");
                for (m, _) in prod.terms() {
                    assert!(m >= tm, "non-triangular entry {m:?} < {tm:?}");
                }
            }
        }
    }

    #[test]
    fn mult_matrix_shapes() {
        let m = mult_matrix(&t_poly(3), 2);
        assert_eq!(m.rows(), monomials_of_energy::<OddVars>(5).len());
        assert_eq!(m.cols(), monomials_of_energy::<OddVars>(2).len());
    }

    #[test]
    fn display_canonical_form() {
        let p = u(1).mul(&u(1)).scale(&frac(-1, 2)).add(&u(2).scale(&int(3)));
        assert_eq!(p.to_string(), "3 * u2^1 + -1/2 * u1^2");
    }
}

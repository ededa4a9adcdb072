//! Truncated integer power series in p: Euler products and the closed-form
//! characters of the graded spaces, for comparison against computed
//! dimension tables.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::fmt;

/// Integer power series truncated at a fixed order (inclusive). Arithmetic
/// never reads beyond the truncation; comparisons are exact up to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeriesZ {
    coeffs: Vec<BigInt>,
}

impl PowerSeriesZ {
    pub fn zero(order: usize) -> Self {
        PowerSeriesZ { coeffs: vec![BigInt::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigInt::one();
        s
    }

    /// p^k, or zero when k exceeds the order.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = BigInt::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for k in 0..=order {
            out.coeffs[k] = self.coeff(k) + other.coeff(k);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for k in 0..=order {
            out.coeffs[k] = self.coeff(k) - other.coeff(k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let mut out = Self::zero(order);
        for i in 0..=order {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=order - i {
                if !other.coeffs[j].is_zero() {
                    out.coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
                }
            }
        }
        out
    }

    /// Multiply by p^k (shifting away the tail).
    pub fn shift(&self, k: usize) -> Self {
        let mut out = Self::zero(self.order());
        for i in 0..=self.order() {
            if i + k <= self.order() {
                out.coeffs[i + k] = self.coeffs[i].clone();
            }
        }
        out
    }

    /// Multiply by (1 - p^k).
    pub fn times_one_minus(&self, k: usize) -> Self {
        self.sub(&self.shift(k))
    }
}

impl fmt::Display for PowerSeriesZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// `1 / prod_{k>=1} (1 - p^{k*step})`, the generating function of partitions
/// into parts divisible by `step`.
pub fn euler_inv(step: usize, order: usize) -> PowerSeriesZ {
    assert!(step >= 1);
    let mut s = PowerSeriesZ::one(order);
    let mut part = step;
    while part <= order {
        // multiply by 1/(1 - p^part): unbounded knapsack pass
        for k in part..=order {
            let v = s.coeffs[k - part].clone();
            s.coeffs[k] += v;
        }
        part += step;
    }
    s
}

/// Selector for the closed-form characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// Quotient by both screening images.
    A,
    /// Fermionic building block of the resolution.
    W,
    /// Full (tilde) fermion Fock space.
    Htilde,
    /// Semi-infinite de Rham cohomology at form drop `p_index`.
    Hcoh,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownSelector(pub String);

impl fmt::Display for UnknownSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown character selector: {}", self.0)
    }
}

impl std::error::Error for UnknownSelector {}

/// Closed-form character of the selected graded space, truncated.
///
/// even sector (charge 2m):
///   A:      p^{m^2} (1 - p^{2m+1}) / (p;p)
///   W:      (p^{m^2} - p^{(m+2)^2}) / (p^2;p^2)
///   Htilde: p^{m^2} / (p^2;p^2)
///   Hcoh:   p^{(m+p)^2} (1 - p^{4(m+p+1)}) / (p^2;p^2)
/// odd sector (charge 2m+1):
///   A:      p^{m(m+1)} (1 - p^{2m+2}) / (p;p)
///   W:      p^{m(m+1)} (1 - p^{2m+2}) / (p^2;p^2)
///   Htilde: p^{m(m+1)} / (p^2;p^2)
///   Hcoh:   the odd W for p_index = 0, zero for p_index >= 1
pub fn closed_form(
    space: SpaceKind,
    sector: crate::fock::Sector,
    m: i64,
    p_index: i64,
    order: usize,
) -> Result<PowerSeriesZ, UnknownSelector> {
    use crate::fock::Sector;
    if m < 0 {
        return Err(UnknownSelector(format!("negative m: {m}")));
    }
    let msize = m as usize;
    let series = match (space, sector) {
        (SpaceKind::A, Sector::R) => euler_inv(1, order)
            .shift(msize * msize)
            .times_one_minus(2 * msize + 1),
        (SpaceKind::A, Sector::NS) => euler_inv(1, order)
            .shift(msize * (msize + 1))
            .times_one_minus(2 * msize + 2),
        (SpaceKind::W, Sector::R) => {
            let h = euler_inv(2, order);
            h.shift(msize * msize).sub(&h.shift((msize + 2) * (msize + 2)))
        }
        (SpaceKind::W, Sector::NS) => euler_inv(2, order)
            .shift(msize * (msize + 1))
            .times_one_minus(2 * msize + 2),
        (SpaceKind::Htilde, Sector::R) => euler_inv(2, order).shift(msize * msize),
        (SpaceKind::Htilde, Sector::NS) => euler_inv(2, order).shift(msize * (msize + 1)),
        (SpaceKind::Hcoh, Sector::R) => {
            if p_index < 0 {
                return Err(UnknownSelector(format!("negative p index: {p_index}")));
            }
            let mp = msize + p_index as usize;
            euler_inv(2, order).shift(mp * mp).times_one_minus(4 * (mp + 1))
        }
        (SpaceKind::Hcoh, Sector::NS) => {
            if p_index < 0 {
                return Err(UnknownSelector(format!("negative p index: {p_index}")));
            }
            if p_index == 0 {
                closed_form(SpaceKind::W, Sector::NS, m, 0, order)?
            } else {
                PowerSeriesZ::zero(order)
            }
        }
    };
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Sector;
    use num_bigint::BigInt;

    fn ints(series: &PowerSeriesZ) -> Vec<i64> {
        series.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn euler_inv_is_partition_counting() {
        // exhaustive oracle: partitions with parts divisible by step
        fn count(e: usize, max_part: usize, step: usize) -> usize {
            if e == 0 {
                return 1;
            }
            let mut total = 0;
            let mut part = step;
            while part <= e.min(max_part) {
                total += count(e - part, part, step);
                part += step;
            }
            total
        }
        for step in 1..=3usize {
            let s = euler_inv(step, 12);
            for e in 0..=12 {
                assert_eq!(s.coeff(e), BigInt::from(count(e, e, step)), "step {step} e {e}");
            }
        }
        assert_eq!(ints(&euler_inv(1, 6)), vec![1, 1, 2, 3, 5, 7, 11]);
        for k in (1..=11).step_by(2) {
            assert_eq!(euler_inv(2, 12).coeff(k), BigInt::zero());
        }
        assert_eq!(ints(&euler_inv(1, 0)), vec![1]);
    }

    #[test]
    fn closed_form_a_even() {
        let s = closed_form(SpaceKind::A, Sector::R, 0, 0, 10).unwrap();
        assert_eq!(ints(&s), vec![1, 0, 1, 1, 2, 2, 4, 4, 7, 8, 12]);
    }

    #[test]
    fn closed_form_a_odd() {
        let s = closed_form(SpaceKind::A, Sector::NS, 0, 0, 10).unwrap();
        assert_eq!(ints(&s), vec![1, 1, 1, 2, 3, 4, 6, 8, 11, 15, 20]);
    }

    #[test]
    fn closed_form_w_even() {
        let s = closed_form(SpaceKind::W, Sector::R, 0, 0, 8).unwrap();
        assert_eq!(ints(&s), vec![1, 0, 1, 0, 1, 0, 2, 0, 3]);
    }

    #[test]
    fn closed_form_htilde() {
        let s = closed_form(SpaceKind::Htilde, Sector::R, 1, 0, 6).unwrap();
        assert_eq!(ints(&s), vec![0, 1, 0, 1, 0, 2, 0]);
    }

    #[test]
    fn hcoh_matches_w_at_p_zero() {
        for m in 0..=2 {
            let a = closed_form(SpaceKind::Hcoh, Sector::R, m, 0, 12).unwrap();
            let b = closed_form(SpaceKind::W, Sector::R, m, 0, 12).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn character_identities() {
        let order = 16;
        // ch A (even) = ch D * (ch Htilde_{2m} - ch Htilde_{2m+2})
        let ch_d = euler_inv_odd(order);
        for m in 0..=2i64 {
            let a = closed_form(SpaceKind::A, Sector::R, m, 0, order).unwrap();
            let hm = closed_form(SpaceKind::Htilde, Sector::R, m, 0, order).unwrap();
            let hm1 = closed_form(SpaceKind::Htilde, Sector::R, m + 1, 0, order).unwrap();
            assert_eq!(a, ch_d.mul(&hm.sub(&hm1)));
            // ch W_{2m} = ch Htilde_{2m} - ch Htilde_{2m+4}
            let w = closed_form(SpaceKind::W, Sector::R, m, 0, order).unwrap();
            let hm2 = closed_form(SpaceKind::Htilde, Sector::R, m + 2, 0, order).unwrap();
            assert_eq!(w, hm.sub(&hm2));
        }
        // all character coefficients are non-negative
        for m in 0..=2i64 {
            for space in [SpaceKind::A, SpaceKind::W, SpaceKind::Htilde] {
                for sector in [Sector::R, Sector::NS] {
                    let s = closed_form(space, sector, m, 0, order).unwrap();
                    assert!(s.coeffs().iter().all(|c| c >= &BigInt::zero()));
                }
            }
        }
    }

    /// 1 / prod (1 - p^{2k-1}): the character of the odd polynomial ring.
    fn euler_inv_odd(order: usize) -> PowerSeriesZ {
        let mut s = PowerSeriesZ::one(order);
        let mut part = 1;
        while part <= order {
            for k in part..=order {
                let v = s.coeffs[k - part].clone();
                s.coeffs[k] += v;
            }
            part += 2;
        }
        s
    }
}

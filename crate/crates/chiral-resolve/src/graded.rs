//! Graded pieces and matrix materialization.
//!
//! A `DPiece` is one (charge, energy) slice of the tensor product of the
//! odd polynomial ring with a fermion Fock space; its basis is the cross
//! product of ring monomials and fermion states, ordered by polynomial
//! energy, then monomial, then state. A `FockPiece` is a bare fermion
//! slice. Operators become `SparseMatrix` columns through `build_matrix`;
//! an operator application that leaves the declared target piece is a
//! bookkeeping bug and panics.

use crate::fock::{enumerate_basis, FermionState, Sector};
use crate::linalg::{Scalar, SparseMatrix};
use crate::poly::{monomials_of_energy, Monomial, OddVars};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// One term of an element of the tensor space.
pub type DHTerm = ((Monomial, FermionState), Scalar);

#[derive(Debug)]
pub struct DPiece {
    pub sector: Sector,
    pub charge: i64,
    pub energy: i64,
    pub basis: Vec<(Monomial, FermionState)>,
    index: HashMap<(Monomial, FermionState), usize>,
}

impl DPiece {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, mono: &Monomial, state: &FermionState) -> usize {
        *self
            .index
            .get(&(mono.clone(), state.clone()))
            .unwrap_or_else(|| panic!("term {mono:?} x {state} is not in piece (charge {}, energy {})", self.charge, self.energy))
    }
}

fn dpiece_cache() -> &'static Mutex<HashMap<(Sector, i64, i64), Arc<DPiece>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Sector, i64, i64), Arc<DPiece>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The (charge, energy) piece of the polynomial ring tensored with the
/// Fock space. Memoized.
pub fn dpiece(sector: Sector, charge: i64, energy: i64) -> Arc<DPiece> {
    let key = (sector, charge, energy);
    if let Some(hit) = dpiece_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut basis = Vec::new();
    let vac = sector.vacuum_energy(charge);
    for d in 0..=(energy - vac).max(-1) {
        let states = enumerate_basis(sector, charge, energy - d);
        if states.is_empty() {
            continue;
        }
        for mono in monomials_of_energy::<OddVars>(d) {
            for state in states.iter() {
                basis.push((mono.clone(), state.clone()));
            }
        }
    }
    let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let piece = Arc::new(DPiece { sector, charge, energy, basis, index });
    dpiece_cache().lock().unwrap().insert(key, piece.clone());
    piece
}

/// Materialize an operator as a matrix between two pieces. `apply` produces
/// the image of a basis element as a list of terms.
pub fn build_matrix(
    source: &DPiece,
    target: &DPiece,
    mut apply: impl FnMut(&Monomial, &FermionState) -> Vec<DHTerm>,
) -> SparseMatrix {
    let mut out = SparseMatrix::zero(target.dim(), source.dim());
    for (j, (mono, state)) in source.basis.iter().enumerate() {
        for ((tm, ts), coeff) in apply(mono, state) {
            out.add_to(target.index_of(&tm, &ts), j, &coeff);
        }
    }
    out
}

/// A bare fermion slice, optionally restricted to states with no hole at
/// mode index 1 (the odd-sector subspace from which the odd building blocks
/// are formed).
#[derive(Debug)]
pub struct FockPiece {
    pub sector: Sector,
    pub charge: i64,
    pub energy: i64,
    pub psi1_free: bool,
    pub states: Vec<FermionState>,
    index: HashMap<FermionState, usize>,
}

impl FockPiece {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: &FermionState) -> usize {
        *self
            .index
            .get(state)
            .unwrap_or_else(|| panic!("state {state} is not in piece (charge {}, energy {})", self.charge, self.energy))
    }
}

fn fock_piece_cache() -> &'static Mutex<HashMap<(Sector, i64, i64, bool), Arc<FockPiece>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Sector, i64, i64, bool), Arc<FockPiece>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub fn fock_piece(sector: Sector, charge: i64, energy: i64, psi1_free: bool) -> Arc<FockPiece> {
    let key = (sector, charge, energy, psi1_free);
    if let Some(hit) = fock_piece_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let mut states: Vec<FermionState> = enumerate_basis(sector, charge, energy).as_slice().to_vec();
    if psi1_free {
        assert_eq!(sector, Sector::NS, "the mode-1 restriction only concerns the odd sector");
        states.retain(|s| !s.annihilators().contains(&1));
    }
    let index = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    let piece = Arc::new(FockPiece { sector, charge, energy, psi1_free, states, index });
    fock_piece_cache().lock().unwrap().insert(key, piece.clone());
    piece
}

pub fn build_fock_matrix(
    source: &FockPiece,
    target: &FockPiece,
    mut apply: impl FnMut(&FermionState) -> Vec<(FermionState, Scalar)>,
) -> SparseMatrix {
    let mut out = SparseMatrix::zero(target.dim(), source.dim());
    for (j, state) in source.states.iter().enumerate() {
        for (t, coeff) in apply(state) {
            out.add_to(target.index_of(&t), j, &coeff);
        }
    }
    out
}

/// Mode indices k for which `psi_k` can act without immediately vanishing:
/// present creators plus hole insertions at or below the vacuum boundary,
/// restricted to `k >= min_index`.
pub fn psi_candidates(state: &FermionState, min_index: i64) -> Vec<i64> {
    let mut out: Vec<i64> = Vec::new();
    let charge = state.charge();
    let mut k = charge;
    while k >= min_index {
        if !state.annihilators().contains(&k) {
            out.push(k);
        }
        k -= 2;
    }
    for &c in state.creators() {
        if c >= min_index && c > charge {
            out.push(c);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::d_graded_dim;

    #[test]
    fn dpiece_dimension_is_a_convolution() {
        for energy in 0..=10 {
            let piece = dpiece(Sector::R, 0, energy);
            let expected: usize = (0..=energy)
                .map(|d| d_graded_dim(d) * enumerate_basis(Sector::R, 0, energy - d).len())
                .sum();
            assert_eq!(piece.dim(), expected);
        }
    }

    #[test]
    fn psi1_free_restriction() {
        let full = fock_piece(Sector::NS, 1, 2, false);
        let restricted = fock_piece(Sector::NS, 1, 2, true);
        assert!(restricted.dim() < full.dim());
        for s in &restricted.states {
            assert!(!s.annihilators().contains(&1));
        }
    }
}

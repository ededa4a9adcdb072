//! Charged fermion Fock spaces.
//!
//! Two families of fermions are supported: modes with even integer indices
//! (the R sector, housing even charge labels) and modes with odd integer
//! indices (the NS sector, odd charge labels). A basis state is a
//! normal-ordered word of creation modes and hole modes over a charged
//! vacuum `|c>`:
//!
//! ```text
//!   psi*_{c_1} ... psi*_{c_k}  psi_{a_1} ... psi_{a_k} |c>
//! ```
//!
//! with creator indices strictly above the vacuum label, hole indices at or
//! below it, both lists strictly increasing, and equal lengths (the charge
//! is carried entirely by the vacuum label). Applying a single mode returns
//! at most one signed basis state; the sign is the parity of the
//! transpositions needed to restore this canonical order.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    /// Even mode indices, even charge labels.
    R,
    /// Odd mode indices, odd charge labels.
    NS,
}

impl Sector {
    pub fn parity(self) -> i64 {
        match self {
            Sector::R => 0,
            Sector::NS => 1,
        }
    }

    pub fn matches(self, index: i64) -> bool {
        index.rem_euclid(2) == self.parity()
    }

    /// Energy of the charged vacuum `|c>`: m^2 for `c = 2m`, m^2 + m for
    /// `c = 2m + 1`.
    pub fn vacuum_energy(self, charge: i64) -> i64 {
        assert!(self.matches(charge), "charge {charge} has wrong parity for {self:?}");
        match self {
            Sector::R => {
                let m = charge / 2;
                m * m
            }
            Sector::NS => {
                let m = (charge - 1).div_euclid(2);
                m * m + m
            }
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::R => write!(f, "even"),
            Sector::NS => write!(f, "odd"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeKind {
    Psi,
    PsiStar,
}

/// Energy carried by a single mode: `psi*_k` raises the energy by `k - 1`,
/// `psi_k` lowers it by `k - 1` (which raises it for `k <= 0`).
pub fn mode_energy(kind: ModeKind, index: i64) -> i64 {
    match kind {
        ModeKind::Psi => -(index - 1),
        ModeKind::PsiStar => index - 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FermionState {
    sector: Sector,
    charge: i64,
    creators: Vec<i64>,
    annihilators: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FockError {
    ParityMismatch { sector: Sector, index: i64 },
}

impl fmt::Display for FockError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FockError::ParityMismatch { sector, index } => {
                write!(f, "mode index {index} does not match the {sector} sector parity")
            }
        }
    }
}

impl std::error::Error for FockError {}

impl FermionState {
    pub fn vacuum(sector: Sector, charge: i64) -> Self {
        assert!(sector.matches(charge), "vacuum label parity mismatch");
        FermionState { sector, charge, creators: Vec::new(), annihilators: Vec::new() }
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn charge(&self) -> i64 {
        self.charge
    }

    pub fn creators(&self) -> &[i64] {
        &self.creators
    }

    pub fn annihilators(&self) -> &[i64] {
        &self.annihilators
    }

    pub fn energy(&self) -> i64 {
        let mut e = self.sector.vacuum_energy(self.charge);
        for &c in &self.creators {
            e += c - 1;
        }
        for &a in &self.annihilators {
            e -= a - 1;
        }
        e
    }

    pub fn is_vacuum(&self) -> bool {
        self.creators.is_empty() && self.annihilators.is_empty()
    }

    /// Largest mode index that can annihilate into this state, i.e. the
    /// largest creator present or the vacuum boundary.
    pub fn max_psi_index(&self) -> i64 {
        self.creators.last().copied().unwrap_or(self.charge).max(self.charge)
    }
}

impl fmt::Display for FermionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.creators {
            write!(f, "psi*_{c} ")?;
        }
        for a in &self.annihilators {
            write!(f, "psi_{a} ")?;
        }
        write!(f, "|{}>", self.charge)
    }
}

/// Apply one mode over a fixed vacuum `|vac>` to the word described by
/// `creators`/`annihilators` (creators all > vac, holes all <= vac, both
/// strictly increasing, lengths unconstrained mid-computation). Returns the
/// sign and updated lists, or None when the result is zero.
fn apply_raw(
    kind: ModeKind,
    k: i64,
    vac: i64,
    creators: &mut Vec<i64>,
    annihilators: &mut Vec<i64>,
) -> Option<i64> {
    match kind {
        ModeKind::Psi => {
            if k > vac {
                // must contract with a creator
                match creators.iter().position(|&c| c == k) {
                    Some(i) => {
                        creators.remove(i);
                        Some(if i % 2 == 0 { 1 } else { -1 })
                    }
                    None => None,
                }
            } else {
                // pass the creator block, then insert a hole
                if annihilators.contains(&k) {
                    return None;
                }
                let q = annihilators.iter().take_while(|&&a| a < k).count();
                let swaps = creators.len() + q;
                let pos = q;
                annihilators.insert(pos, k);
                Some(if swaps % 2 == 0 { 1 } else { -1 })
            }
        }
        ModeKind::PsiStar => {
            if k <= vac {
                // must contract with a hole
                match annihilators.iter().position(|&a| a == k) {
                    Some(t) => {
                        annihilators.remove(t);
                        let swaps = creators.len() + t;
                        Some(if swaps % 2 == 0 { 1 } else { -1 })
                    }
                    None => None,
                }
            } else {
                if creators.contains(&k) {
                    return None;
                }
                let q = creators.iter().take_while(|&&c| c < k).count();
                creators.insert(q, k);
                Some(if q % 2 == 0 { 1 } else { -1 })
            }
        }
    }
}

/// Apply `psi_k` or `psi*_k` to a canonical state. The result is
/// re-expressed over the vacuum of the new charge, using
/// `|c> = psi*_c |c-2>` and `|c> = psi_{c+2} |c+2>`.
pub fn apply_mode(
    kind: ModeKind,
    k: i64,
    state: &FermionState,
) -> Result<Option<(i64, FermionState)>, FockError> {
    if !state.sector.matches(k) {
        return Err(FockError::ParityMismatch { sector: state.sector, index: k });
    }
    let c = state.charge;
    let (new_charge, reroot): (i64, (ModeKind, i64)) = match kind {
        ModeKind::Psi => (c - 2, (ModeKind::PsiStar, c)),
        ModeKind::PsiStar => (c + 2, (ModeKind::Psi, c + 2)),
    };
    // operator word, left to right; rightmost acts first
    let mut ops: Vec<(ModeKind, i64)> = Vec::with_capacity(state.creators.len() + state.annihilators.len() + 2);
    ops.push((kind, k));
    for &cr in &state.creators {
        ops.push((ModeKind::PsiStar, cr));
    }
    for &an in &state.annihilators {
        ops.push((ModeKind::Psi, an));
    }
    ops.push(reroot);

    let mut creators = Vec::new();
    let mut annihilators = Vec::new();
    let mut sign = 1i64;
    for &(kd, idx) in ops.iter().rev() {
        match apply_raw(kd, idx, new_charge, &mut creators, &mut annihilators) {
            Some(s) => sign *= s,
            None => return Ok(None),
        }
    }
    debug_assert_eq!(creators.len(), annihilators.len(), "unbalanced state after rebase");
    Ok(Some((sign, FermionState { sector: state.sector, charge: new_charge, creators, annihilators })))
}

/// Apply a word of modes (written left to right, rightmost acting first).
pub fn apply_word(
    ops: &[(ModeKind, i64)],
    state: &FermionState,
) -> Result<Option<(i64, FermionState)>, FockError> {
    let mut sign = 1i64;
    let mut cur = state.clone();
    for &(kind, k) in ops.iter().rev() {
        match apply_mode(kind, k, &cur)? {
            Some((s, next)) => {
                sign *= s;
                cur = next;
            }
            None => return Ok(None),
        }
    }
    Ok(Some((sign, cur)))
}

/// The charged vacuum `|m>` as a state; `psi*_m |m-2> = |m>` holds by
/// construction and is exercised in tests.
pub fn charge_shift_state(sector: Sector, m: i64) -> FermionState {
    FermionState::vacuum(sector, m)
}

/// Strictly increasing lists of `count` integers `>= min_val` with the given
/// sum, in lexicographic order.
fn distinct_lists(count: usize, sum: i64, min_val: i64) -> Vec<Vec<i64>> {
    fn rec(count: usize, sum: i64, min_val: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if count == 0 {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let n = count as i64;
        // remaining values are >= v, v+1, ..., v+n-1
        let mut v = min_val;
        loop {
            let min_rest = n * v + n * (n - 1) / 2;
            if min_rest > sum {
                break;
            }
            prefix.push(v);
            rec(count - 1, sum - v, v + 1, prefix, out);
            prefix.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    rec(count, sum, min_val, &mut prefix, &mut out);
    out
}

type BasisKey = (Sector, i64, i64);

fn basis_cache() -> &'static Mutex<HashMap<BasisKey, Arc<Vec<FermionState>>>> {
    static CACHE: OnceLock<Mutex<HashMap<BasisKey, Arc<Vec<FermionState>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All normal-ordered states of the given charge and (absolute) energy, in
/// lexicographic order keyed on (creator list, annihilator list). Memoized.
pub fn enumerate_basis(sector: Sector, charge: i64, energy: i64) -> Arc<Vec<FermionState>> {
    let key = (sector, charge, energy);
    if let Some(hit) = basis_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let rel = energy - sector.vacuum_energy(charge);
    let mut states = Vec::new();
    if rel >= 0 {
        // k creator/hole pairs cost at least 2k^2
        let mut k = 0usize;
        while 2 * (k as i64) * (k as i64) <= rel {
            if k == 0 {
                if rel == 0 {
                    states.push(FermionState::vacuum(sector, charge));
                }
                k += 1;
                continue;
            }
            let kk = k as i64;
            // creators charge + 2t (t >= 1 distinct): energy sum k(charge-1) + 2*sum(t)
            // holes charge - 2(u-1) (u >= 1 distinct): energy sum k(1-charge) + 2*sum(u-1)
            let min_cr = kk * (charge - 1) + kk * (kk + 1);
            let min_hole = kk * (1 - charge) + kk * (kk - 1);
            for e_cr in min_cr..=(rel - min_hole) {
                let e_hole = rel - e_cr;
                let t_sum2 = e_cr - kk * (charge - 1);
                let u_sum2 = e_hole - kk * (1 - charge);
                if t_sum2 < 0 || u_sum2 < 0 || t_sum2 % 2 != 0 || u_sum2 % 2 != 0 {
                    continue;
                }
                let t_lists = distinct_lists(k, t_sum2 / 2, 1);
                if t_lists.is_empty() {
                    continue;
                }
                let u_lists = distinct_lists(k, u_sum2 / 2, 0);
                for ts in &t_lists {
                    for us in &u_lists {
                        let creators: Vec<i64> = ts.iter().map(|t| charge + 2 * t).collect();
                        let mut annihilators: Vec<i64> = us.iter().map(|u| charge - 2 * u).collect();
                        annihilators.reverse();
                        states.push(FermionState {
                            sector,
                            charge,
                            creators,
                            annihilators,
                        });
                    }
                }
            }
            k += 1;
        }
    }
    states.sort();
    for s in &states {
        debug_assert_eq!(s.energy(), energy);
    }
    let arc = Arc::new(states);
    basis_cache().lock().unwrap().insert(key, arc.clone());
    arc
}

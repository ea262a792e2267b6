//! Multimode bosonic occupation vectors and Fock bases.
//!
//! Every basis is ordered total-photon-number-major and lexicographically
//! within each photon-number sector, so feature vectors, saved models and
//! golden files share one layout.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon counts per optical mode. Serializes as a plain integer array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `∏ᵢ nᵢ!`
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| (1..=n).map(f64::from).product::<f64>()).product()
    }

    /// Mode indices repeated by occupation, e.g. `[2,0,1]` -> `[0,0,2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n as usize)).collect()
    }

    /// Places this occupation at `positions` of a larger `modes`-mode vector,
    /// leaving the other modes empty.
    pub fn embed(&self, modes: usize, positions: &[usize]) -> Result<Occupation> {
        if positions.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{} positions for a {}-mode occupation",
                positions.len(),
                self.modes()
            )));
        }
        check_mode_set(positions, modes)?;
        let mut out = vec![0; modes];
        for (&p, &n) in positions.iter().zip(&self.0) {
            out[p] = n;
        }
        Ok(Occupation(out))
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(v: Vec<u32>) -> Self {
        Occupation(v)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Exactly this many photons.
    Fixed(u32),
    /// Every total from 0 up to this many photons.
    UpTo(u32),
}

/// An ordered list of occupation vectors with O(1) reverse lookup.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct FockBasis {
    mode_count: usize,
    sector: Sector,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.mode_count == other.mode_count && self.states == other.states
    }
}

impl Eq for FockBasis {}

impl FockBasis {
    fn from_states(mode_count: usize, sector: Sector, states: Vec<Occupation>) -> Self {
        let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
        FockBasis { mode_count, sector, states, index }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &Occupation {
        &self.states[k]
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ).copied()
    }

    /// Largest total photon number present.
    pub fn max_photons(&self) -> u32 {
        match self.sector {
            Sector::Fixed(n) | Sector::UpTo(n) => n,
        }
    }

    /// Contiguous index ranges of each photon-number sector, in order of
    /// increasing total. A fixed-n basis has a single range.
    pub fn sector_ranges(&self) -> Vec<Range<usize>> {
        let mut ranges: Vec<Range<usize>> = Vec::new();
        let mut start = 0;
        for k in 1..=self.states.len() {
            if k == self.states.len() || self.states[k].total() != self.states[start].total() {
                ranges.push(start..k);
                start = k;
            }
        }
        ranges
    }
}

fn fixed_states(mode_count: usize, photons: u32) -> Vec<Occupation> {
    // Depth-first over the first mode's count in ascending order gives
    // lexicographic order directly.
    fn fill(prefix: &mut Vec<u32>, modes_left: usize, photons_left: u32, out: &mut Vec<Occupation>) {
        if modes_left == 1 {
            prefix.push(photons_left);
            out.push(Occupation(prefix.clone()));
            prefix.pop();
            return;
        }
        for n in 0..=photons_left {
            prefix.push(n);
            fill(prefix, modes_left - 1, photons_left - n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(mode_count), mode_count, photons, &mut out);
    out
}

/// All occupation vectors of `mode_count` modes with exactly `photons`
/// photons, in lexicographic order.
pub fn enumerate_fixed(mode_count: usize, photons: u32) -> Result<FockBasis> {
    if mode_count == 0 {
        return Err(Error::ZeroModes);
    }
    Ok(FockBasis::from_states(mode_count, Sector::Fixed(photons), fixed_states(mode_count, photons)))
}

/// Concatenation of the fixed sectors `0..=max_photons`.
pub fn enumerate_up_to(mode_count: usize, max_photons: u32) -> Result<FockBasis> {
    if mode_count == 0 {
        return Err(Error::ZeroModes);
    }
    let states = (0..=max_photons).flat_map(|n| fixed_states(mode_count, n)).collect();
    Ok(FockBasis::from_states(mode_count, Sector::UpTo(max_photons), states))
}

pub(crate) fn check_mode_set(modes: &[usize], mode_count: usize) -> Result<()> {
    let mut seen = vec![false; mode_count];
    for &m in modes {
        if m >= mode_count {
            return Err(Error::ModeOutOfRange { index: m, modes: mode_count });
        }
        if seen[m] {
            return Err(Error::DuplicateMode(m));
        }
        seen[m] = true;
    }
    Ok(())
}

/// Splits `occ` into the counts at `kept_modes` (in the given order) and the
/// counts at the remaining modes (in ascending mode order).
pub fn split_occupation(occ: &Occupation, kept_modes: &[usize]) -> Result<(Occupation, Occupation)> {
    check_mode_set(kept_modes, occ.modes())?;
    let kept = kept_modes.iter().map(|&m| occ.0[m]).collect();
    let rest = (0..occ.modes()).filter(|m| !kept_modes.contains(m)).map(|m| occ.0[m]).collect();
    Ok((Occupation(kept), Occupation(rest)))
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

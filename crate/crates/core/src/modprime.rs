//! Modulo-prime "Add"/"Sub" over representative value sets.
//!
//! A residue system pairs a prime `p` with `p` distinct representative
//! values. Arithmetic runs on positions in that list, so `reps[0]` is the
//! identity and `add(x, y) = reps[(idx(x) + idx(y)) mod p]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueSystem {
    p: u32,
    reps: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl ResidueSystem {
    pub fn new(p: u32, reps: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if reps.len() != p as usize {
            return Err(Error::BadRepresentatives);
        }
        let mut sorted = reps.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != reps.len() {
            return Err(Error::BadRepresentatives);
        }
        Ok(ResidueSystem { p, reps })
    }

    /// The value sets used by the base-2/3/5/7 sub-scramblers; any other
    /// prime gets `0..p`.
    pub fn standard(p: u32) -> Result<Self> {
        let reps = match p {
            2 => vec![0, 1],
            3 => vec![1, 2, 3],
            5 => vec![3, 4, 5, 6, 7],
            7 => (1..=7).collect(),
            _ => (0..p).collect(),
        };
        Self::new(p, reps)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn reps(&self) -> &[u32] {
        &self.reps
    }

    pub fn identity(&self) -> u32 {
        self.reps[0]
    }

    pub fn index_of(&self, v: u32) -> Result<usize> {
        self.reps
            .iter()
            .position(|&r| r == v)
            .ok_or(Error::ValueNotInSystem(v))
    }

    pub fn rep(&self, idx: usize) -> u32 {
        self.reps[idx % self.p as usize]
    }

    pub fn add(&self, x: u32, y: u32) -> Result<u32> {
        let (ix, iy) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.rep(ix + iy))
    }

    pub fn sub(&self, z: u32, y: u32) -> Result<u32> {
        let p = self.p as usize;
        let (iz, iy) = (self.index_of(z)?, self.index_of(y)?);
        Ok(self.rep(iz + p - iy))
    }

    /// `table[i][j] = add(reps[i], reps[j])`.
    pub fn cayley_table(&self) -> Vec<Vec<u32>> {
        let p = self.p as usize;
        (0..p)
            .map(|i| (0..p).map(|j| self.rep(i + j)).collect())
            .collect()
    }
}

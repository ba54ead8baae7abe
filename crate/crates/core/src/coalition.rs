//! Fixed-width coalitions over at most 64 players.
//!
//! Bit `i` of the encoding is player `i`; the integer encoding is the
//! canonical index used for tables, files and enumeration order.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_PLAYERS: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coalition {
    bits: u64,
    n: u8,
}

impl Coalition {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "at most {MAX_PLAYERS} players");
        Self { bits: 0, n: n as u8 }
    }

    pub fn grand(n: usize) -> Self {
        Self { bits: full_mask(n), ..Self::empty(n) }
    }

    pub fn singleton(n: usize, player: usize) -> Self {
        Self::empty(n).with(player)
    }

    /// Builds a coalition from its integer encoding, rejecting stray high bits.
    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        if n > MAX_PLAYERS {
            return Err(Error::TooManyPlayers { what: "coalition", max: MAX_PLAYERS, n });
        }
        if bits & !full_mask(n) != 0 {
            let player = 63 - (bits & !full_mask(n)).leading_zeros() as usize;
            return Err(Error::PlayerOutOfRange { player, n });
        }
        Ok(Self { bits, n: n as u8 })
    }

    pub fn from_players(n: usize, players: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut c = Self::empty(n);
        for p in players {
            if p >= n {
                return Err(Error::PlayerOutOfRange { player: p, n });
            }
            c.bits |= 1 << p;
        }
        Ok(c)
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn index(self) -> usize {
        self.bits as usize
    }

    #[inline]
    pub fn width(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn is_grand(self) -> bool {
        self.bits == full_mask(self.width())
    }

    #[inline]
    pub fn contains(self, player: usize) -> bool {
        player < self.width() && self.bits >> player & 1 == 1
    }

    #[must_use]
    pub fn with(self, player: usize) -> Self {
        assert!(player < self.width(), "player {player} out of range");
        Self { bits: self.bits | 1 << player, ..self }
    }

    #[must_use]
    pub fn without(self, player: usize) -> Self {
        assert!(player < self.width(), "player {player} out of range");
        Self { bits: self.bits & !(1 << player), ..self }
    }

    #[must_use]
    pub fn complement(self) -> Self {
        Self { bits: !self.bits & full_mask(self.width()), ..self }
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self { bits: self.bits | other.bits, ..self }
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let p = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(p)
        })
    }

    /// `x(S)`, the total allocation to the members.
    pub fn total(self, x: &[f64]) -> f64 {
        self.members().fold(0.0, |acc, i| acc + x[i])
    }

    /// Indicator vector of the coalition (length `n`).
    pub fn indicator(self) -> Vec<f64> {
        (0..self.width()).map(|i| if self.contains(i) { 1.0 } else { 0.0 }).collect()
    }

    /// All `2^n` coalitions in increasing integer encoding.
    pub fn all(n: usize) -> impl Iterator<Item = Coalition> {
        assert!(n < MAX_PLAYERS, "cannot enumerate 2^{n} coalitions");
        (0..1u64 << n).map(move |bits| Coalition { bits, n: n as u8 })
    }
}

#[inline]
pub(crate) fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members()).finish()
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, p) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

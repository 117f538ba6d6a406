//! Agent sets as single-word bitmasks.

use std::fmt;
use std::ops::{BitAnd, BitAndAssign, BitOr, BitOrAssign, Not, Sub, SubAssign};

/// Largest number of agents an [`AgentSet`] can hold.
pub const MAX_AGENTS: usize = 63;

/// A subset of the agents `{0, .., n-1}`, stored as an `n`-bit mask.
///
/// Coalitions, search grounds, remainders and masks are all `AgentSet`s.
/// The set does not know `n`; callers keep membership below the instance
/// size (bit 63 is never used).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AgentSet(u64);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        AgentSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub const fn singleton(agent: usize) -> Self {
        AgentSet(1 << agent)
    }

    /// `{0, .., n-1}`.
    #[inline]
    pub const fn full(n: usize) -> Self {
        if n == 0 {
            AgentSet(0)
        } else {
            AgentSet(u64::MAX >> (64 - n))
        }
    }

    /// Agents with index strictly below `agent`.
    #[inline]
    pub const fn below(agent: usize) -> Self {
        AgentSet((1u64 << agent) - 1)
    }

    #[inline]
    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub const fn contains(self, agent: usize) -> bool {
        agent < 64 && self.0 & (1 << agent) != 0
    }

    #[inline]
    pub fn insert(&mut self, agent: usize) {
        self.0 |= 1 << agent;
    }

    #[inline]
    pub fn remove(&mut self, agent: usize) {
        self.0 &= !(1 << agent);
    }

    #[inline]
    pub const fn with(self, agent: usize) -> Self {
        AgentSet(self.0 | (1 << agent))
    }

    #[inline]
    pub const fn without(self, agent: usize) -> Self {
        AgentSet(self.0 & !(1 << agent))
    }

    #[inline]
    pub const fn union(self, other: Self) -> Self {
        AgentSet(self.0 | other.0)
    }

    #[inline]
    pub const fn intersection(self, other: Self) -> Self {
        AgentSet(self.0 & other.0)
    }

    #[inline]
    pub const fn difference(self, other: Self) -> Self {
        AgentSet(self.0 & !other.0)
    }

    #[inline]
    pub const fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub const fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest-index agent, if any.
    #[inline]
    pub const fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    /// Removes and returns the lowest-index agent.
    #[inline]
    pub fn pop_first(&mut self) -> Option<usize> {
        let a = self.first()?;
        self.0 &= self.0 - 1;
        Some(a)
    }

    /// Agents in ascending index order.
    #[inline]
    pub fn iter(self) -> Agents {
        Agents(self.0)
    }

    /// Every subset of `self` (including the empty set and `self`).
    pub fn subsets(self) -> Subsets {
        Subsets {
            ground: self.0,
            next: Some(0),
        }
    }
}

/// Iterator over the members of an [`AgentSet`].
#[derive(Clone)]
pub struct Agents(u64);

impl Iterator for Agents {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let a = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(a)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Agents {}

/// Iterator over all subsets of a ground set, in increasing mask order.
pub struct Subsets {
    ground: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = AgentSet;

    fn next(&mut self) -> Option<AgentSet> {
        let cur = self.next?;
        // Standard submask walk: (cur - ground) & ground steps to the next submask.
        self.next = if cur == self.ground {
            None
        } else {
            Some(cur.wrapping_sub(self.ground) & self.ground)
        };
        Some(AgentSet(cur))
    }
}

impl IntoIterator for AgentSet {
    type Item = usize;
    type IntoIter = Agents;

    fn into_iter(self) -> Agents {
        self.iter()
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AgentSet::EMPTY;
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl BitOr for AgentSet {
    type Output = AgentSet;
    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        self.union(rhs)
    }
}

impl BitOrAssign for AgentSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: Self) {
        self.0 |= rhs.0;
    }
}

impl BitAnd for AgentSet {
    type Output = AgentSet;
    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        self.intersection(rhs)
    }
}

impl BitAndAssign for AgentSet {
    #[inline]
    fn bitand_assign(&mut self, rhs: Self) {
        self.0 &= rhs.0;
    }
}

impl Sub for AgentSet {
    type Output = AgentSet;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self.difference(rhs)
    }
}

impl SubAssign for AgentSet {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.0 &= !rhs.0;
    }
}

impl Not for AgentSet {
    type Output = AgentSet;
    /// Complement within the 63 usable agent slots.
    #[inline]
    fn not(self) -> Self {
        AgentSet(!self.0 & (u64::MAX >> 1))
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: AgentSet = [0, 2].into_iter().collect();
        let b: AgentSet = [1, 2].into_iter().collect();
        assert_eq!((a | b).len(), 3);
        assert_eq!(a & b, AgentSet::singleton(2));
        assert_eq!(a - b, AgentSet::singleton(0));
        assert!(AgentSet::singleton(2).is_subset(a));
        assert!(!a.is_subset(b));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(AgentSet::full(4).bits(), 0b1111);
        assert_eq!(AgentSet::full(63).len(), 63);
        assert_eq!(AgentSet::below(3).bits(), 0b111);
        assert_eq!(format!("{a}"), "{0,2}");
    }

    #[test]
    fn subsets_walks_every_submask_once() {
        let g: AgentSet = [1, 3, 4].into_iter().collect();
        let subs: Vec<_> = g.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(g)));
        let mut sorted = subs.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
        assert_eq!(AgentSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn pop_first_drains_in_order() {
        let mut s: AgentSet = [5, 1, 9].into_iter().collect();
        assert_eq!(s.pop_first(), Some(1));
        assert_eq!(s.pop_first(), Some(5));
        assert_eq!(s.pop_first(), Some(9));
        assert_eq!(s.pop_first(), None);
    }
}

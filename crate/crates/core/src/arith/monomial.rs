use std::cmp::Ordering;
use std::fmt;

/// Largest particle count supported by the packed exponent layout.
pub const MAX_SITES: usize = 8;
/// Position slots followed by the two parameter slots.
pub const NUM_VARS: usize = MAX_SITES + 2;
/// Number of unordered site pairs `(j, k)`, `j < k`.
pub const NUM_PAIRS: usize = MAX_SITES * (MAX_SITES - 1) / 2;

const LAMBDA_SLOT: usize = MAX_SITES;
const OMEGA_SLOT: usize = MAX_SITES + 1;

/// A variable of the fixed table `x_1 < ... < x_L < λ < ω`.
///
/// Positions are 1-based, as in the model definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X(usize),
    Lambda,
    Omega,
}

impl Var {
    pub fn slot(self) -> usize {
        match self {
            Var::X(j) => {
                assert!((1..=MAX_SITES).contains(&j), "position index {j} out of range");
                j - 1
            }
            Var::Lambda => LAMBDA_SLOT,
            Var::Omega => OMEGA_SLOT,
        }
    }

    pub fn from_slot(slot: usize) -> Var {
        match slot {
            LAMBDA_SLOT => Var::Lambda,
            OMEGA_SLOT => Var::Omega,
            s => Var::X(s + 1),
        }
    }

    pub fn is_position(self) -> bool {
        matches!(self, Var::X(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(j) => write!(f, "x{j}"),
            Var::Lambda => f.write_str("lambda"),
            Var::Omega => f.write_str("omega"),
        }
    }
}

/// Exponent vector over the fixed variable table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub(crate) [u8; NUM_VARS]);

impl Monomial {
    pub const ONE: Monomial = Monomial([0; NUM_VARS]);

    pub fn var(v: Var) -> Self {
        Self::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u8) -> Self {
        let mut m = Self::ONE;
        m.0[v.slot()] = e;
        m
    }

    pub fn exponent(&self, v: Var) -> u8 {
        self.0[v.slot()]
    }

    pub(crate) fn slot_exp(&self, slot: usize) -> u8 {
        self.0[slot]
    }

    pub(crate) fn set_slot(&mut self, slot: usize, e: u8) {
        self.0[slot] = e;
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; NUM_VARS]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = [0u8; NUM_VARS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].checked_add(other.0[i]).expect("monomial exponent overflow");
        }
        Monomial(out)
    }

    /// True when any position variable beyond `sites` occurs.
    pub fn uses_sites_beyond(&self, sites: usize) -> bool {
        self.0[sites.min(MAX_SITES)..MAX_SITES].iter().any(|&e| e != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u8)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e != 0).map(|(s, &e)| (Var::from_slot(s), e))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, with ω the most significant variable and x_1 the least.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        // Print the most significant variable first.
        for slot in (0..NUM_VARS).rev() {
            let e = self.0[slot];
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "{}", Var::from_slot(slot))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// An ordered site pair `(j, k)` with `1 <= j < k <= MAX_SITES`, naming the
/// difference factor `x_j - x_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SitePair {
    pub j: usize,
    pub k: usize,
}

impl SitePair {
    pub fn new(j: usize, k: usize) -> Self {
        assert!(j < k && j >= 1 && k <= MAX_SITES, "invalid difference factor ({j},{k})");
        SitePair { j, k }
    }

    /// The pair for `x_a - x_b` in either orientation, plus the sign `s` with
    /// `x_a - x_b = s * (x_j - x_k)`.
    pub fn oriented(a: usize, b: usize) -> (Self, i8) {
        if a < b {
            (Self::new(a, b), 1)
        } else {
            (Self::new(b, a), -1)
        }
    }

    pub(crate) fn index(self) -> usize {
        // Row-major over the strict upper triangle, 0-based.
        let (j, k) = (self.j - 1, self.k - 1);
        j * (2 * MAX_SITES - j - 1) / 2 + (k - j - 1)
    }

    pub(crate) fn from_index(idx: usize) -> Self {
        let mut rest = idx;
        for j in 0..MAX_SITES {
            let row = MAX_SITES - j - 1;
            if rest < row {
                return SitePair { j: j + 1, k: j + 2 + rest };
            }
            rest -= row;
        }
        unreachable!("pair index {idx} out of range")
    }

    pub fn contains(self, site: usize) -> bool {
        self.j == site || self.k == site
    }
}

/// Denominator `∏ (x_j - x_k)^{e_jk}` over `j < k`, stored densely by pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct DenominatorProfile(pub(crate) [u8; NUM_PAIRS]);

impl DenominatorProfile {
    pub const ONE: DenominatorProfile = DenominatorProfile([0; NUM_PAIRS]);

    pub fn single(pair: SitePair, e: u8) -> Self {
        let mut d = Self::ONE;
        d.0[pair.index()] = e;
        d
    }

    pub fn exponent(&self, pair: SitePair) -> u8 {
        self.0[pair.index()]
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; NUM_PAIRS]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [0u8; NUM_PAIRS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].checked_add(other.0[i]).expect("denominator exponent overflow");
        }
        DenominatorProfile(out)
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut out = [0u8; NUM_PAIRS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i].max(other.0[i]);
        }
        DenominatorProfile(out)
    }

    /// `self / other`, assuming `other` divides `self`.
    pub(crate) fn quotient(&self, other: &Self) -> Self {
        let mut out = [0u8; NUM_PAIRS];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i] - other.0[i];
        }
        DenominatorProfile(out)
    }

    pub(crate) fn set(&mut self, pair: SitePair, e: u8) {
        self.0[pair.index()] = e;
    }

    pub fn factors(&self) -> impl Iterator<Item = (SitePair, u8)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e != 0).map(|(i, &e)| (SitePair::from_index(i), e))
    }
}

impl fmt::Debug for DenominatorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DenominatorProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (p, e) in self.factors() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "(x{}-x{})", p.j, p.k)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

use std::fmt;

use crate::arith::MAX_SITES;

/// Largest spin dimension representable in a packed matrix unit.
pub const MAX_SPIN_DIM: usize = 15;

/// Product of partial derivatives `∏_j ∂_j^{α_j}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DerivMono(pub(crate) [u8; MAX_SITES]);

impl DerivMono {
    pub const IDENTITY: DerivMono = DerivMono([0; MAX_SITES]);

    /// `∂_site^order`, sites 1-based.
    pub fn single(site: usize, order: u8) -> Self {
        let mut d = Self::IDENTITY;
        d.0[site - 1] = order;
        d
    }

    pub fn order(&self, site: usize) -> u8 {
        self.0[site - 1]
    }

    pub fn total_order(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [0; MAX_SITES]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [0u8; MAX_SITES];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i] + other.0[i];
        }
        DerivMono(out)
    }

    /// All `γ <= self` componentwise, with the multinomial weight `∏ C(α_j, γ_j)`.
    pub fn sub_multi_indices(&self) -> Vec<(DerivMono, i64, DerivMono)> {
        let mut out = vec![(DerivMono::IDENTITY, 1i64, *self)];
        for site in 0..MAX_SITES {
            let a = self.0[site];
            if a == 0 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
            for (g, w, rest) in &out {
                for k in 0..=a {
                    let mut g2 = *g;
                    g2.0[site] = k;
                    let mut r2 = *rest;
                    r2.0[site] = a - k;
                    next.push((g2, w * binomial(a, k), r2));
                }
            }
            out = next;
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u8)> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i + 1, e))
    }

    pub(crate) fn max_site(&self) -> usize {
        self.iter().map(|(s, _)| s).max().unwrap_or(0)
    }
}

fn binomial(n: u8, k: u8) -> i64 {
    let mut r = 1i64;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

impl fmt::Debug for DerivMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DerivMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        let parts: Vec<String> =
            self.iter().map(|(s, e)| if e == 1 { format!("d{s}") } else { format!("d{s}^{e}") }).collect();
        f.write_str(&parts.join("*"))
    }
}

/// Product of single-site matrix units `∏_j E_j^{a_j b_j}` over distinct sites.
/// Inside an operator no site carries `E^{NN}`.
///
/// Each site stores `a << 4 | b` (1-based indices), with 0 for the identity.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SpinWord(pub(crate) [u8; MAX_SITES]);

impl SpinWord {
    pub const IDENTITY: SpinWord = SpinWord([0; MAX_SITES]);

    /// `E_site^{ab}`, everything 1-based.
    pub fn unit(site: usize, a: usize, b: usize) -> Self {
        let mut w = Self::IDENTITY;
        w.0[site - 1] = pack(a, b);
        w
    }

    pub fn get(&self, site: usize) -> Option<(usize, usize)> {
        unpack(self.0[site - 1])
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [0; MAX_SITES]
    }

    /// Site-wise product with `E^{ab} E^{cd} = δ_{bc} E^{ad}`; `None` when it vanishes.
    pub fn mul(&self, other: &Self) -> Option<Self> {
        let mut out = self.0;
        for (i, o) in out.iter_mut().enumerate() {
            let r = other.0[i];
            if r == 0 {
                continue;
            }
            if *o == 0 {
                *o = r;
                continue;
            }
            if (*o & 0x0f) != (r >> 4) {
                return None;
            }
            *o = (*o & 0xf0) | (r & 0x0f);
        }
        Some(SpinWord(out))
    }

    /// Rewrites every `E^{NN}` as `Id - Σ_{a<N} E^{aa}` into `out`, so that
    /// words range over a basis of the spin endomorphisms.
    pub(crate) fn expand_top(self, n: usize, out: &mut Vec<(i64, SpinWord)>) {
        out.clear();
        out.push((1, self));
        let top = pack(n, n);
        for i in 0..MAX_SITES {
            if self.0[i] != top {
                continue;
            }
            for idx in 0..out.len() {
                let (s, w) = out[idx];
                let mut id = w;
                id.0[i] = 0;
                out[idx] = (s, id);
                for a in 1..n {
                    let mut v = w;
                    v.0[i] = pack(a, a);
                    out.push((-s, v));
                }
            }
        }
    }

    pub(crate) fn has_top(&self, n: usize) -> bool {
        let top = pack(n, n);
        self.0.contains(&top)
    }

    /// Action on a basis state; `None` when some unit annihilates it.
    pub fn apply(&self, state: &SpinState) -> Option<SpinState> {
        let mut out = *state;
        for (i, &u) in self.0.iter().enumerate() {
            if u == 0 {
                continue;
            }
            let (a, b) = unpack(u).unwrap();
            if state.0[i] as usize != b {
                return None;
            }
            out.0[i] = a as u8;
        }
        Some(out)
    }

    pub fn units(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.0.iter().enumerate().filter_map(|(i, &u)| unpack(u).map(|(a, b)| (i + 1, a, b)))
    }

    pub fn site_count(&self) -> usize {
        self.0.iter().filter(|&&u| u != 0).count()
    }

    pub(crate) fn max_site(&self) -> usize {
        self.units().map(|(s, _, _)| s).max().unwrap_or(0)
    }

    pub(crate) fn max_index(&self) -> usize {
        self.units().map(|(_, a, b)| a.max(b)).max().unwrap_or(0)
    }
}

fn pack(a: usize, b: usize) -> u8 {
    assert!((1..=MAX_SPIN_DIM).contains(&a) && (1..=MAX_SPIN_DIM).contains(&b), "matrix unit ({a},{b}) out of range");
    ((a as u8) << 4) | b as u8
}

fn unpack(u: u8) -> Option<(usize, usize)> {
    (u != 0).then_some(((u >> 4) as usize, (u & 0x0f) as usize))
}

impl fmt::Debug for SpinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SpinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("Id");
        }
        let parts: Vec<String> = self.units().map(|(s, a, b)| format!("E{s}({a},{b})")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Basis vector `e_{σ_1} ⊗ ... ⊗ e_{σ_L}` of the spin space, 1-based entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinState(pub(crate) [u8; MAX_SITES]);

impl SpinState {
    pub fn new(entries: &[usize]) -> Self {
        assert!(entries.len() <= MAX_SITES);
        let mut s = [0u8; MAX_SITES];
        for (i, &e) in entries.iter().enumerate() {
            assert!((1..=MAX_SPIN_DIM).contains(&e));
            s[i] = e as u8;
        }
        SpinState(s)
    }

    pub fn entry(&self, site: usize) -> usize {
        self.0[site - 1] as usize
    }

    /// Enumerates all `n^sites` basis states in lexicographic order.
    pub fn all(n: usize, sites: usize) -> Vec<SpinState> {
        let mut out = vec![SpinState::new(&vec![1; sites])];
        for site in 0..sites {
            let mut next = Vec::with_capacity(out.len() * n);
            for s in &out {
                for v in 1..=n {
                    let mut t = *s;
                    t.0[site] = v as u8;
                    next.push(t);
                }
            }
            out = next;
        }
        out.sort();
        out
    }
}

impl fmt::Debug for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SpinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().take_while(|&&e| e != 0).map(|e| format!("e{e}")).collect();
        f.write_str(&parts.join("x"))
    }
}

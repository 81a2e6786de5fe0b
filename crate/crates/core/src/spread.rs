//! The spread `{L_a : a ∈ J ∪ {∞}}` of `G = R × R`, where
//! `L_a = {(x, ax)}` and `L_∞ = {(0, x)}`.
//!
//! Group elements are handled by canonical index (`x·|R| + y`).

use std::fmt;
use std::sync::Arc;

use crate::algebra::{ChainRing, Elem};
use crate::error::{Error, Result};

/// Default bound on `|G| = p^{2sd}`.
pub const DEFAULT_GROUP_CAP: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Infinity,
    Finite(Elem),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Infinity => write!(f, "∞"),
            Label::Finite(a) => write!(f, "{}", a.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadLine {
    pub label: Label,
    /// Sorted canonical indices; always contains 0.
    pub members: Vec<u32>,
}

/// Lines in label order `a_0 = ∞, a_1, …, a_{p^d}` (finite labels in
/// canonical `J` order).
#[derive(Clone, Debug)]
pub struct Spread {
    ring: Arc<ChainRing>,
    lines: Vec<SpreadLine>,
}

impl Spread {
    pub fn build(ring: Arc<ChainRing>) -> Result<Self> {
        Self::build_with_cap(ring, DEFAULT_GROUP_CAP)
    }

    pub fn build_with_cap(ring: Arc<ChainRing>, cap: u64) -> Result<Self> {
        let order = ring.group_order();
        if order > cap {
            return Err(Error::SizeCap {
                what: "group order |G| = p^(2sd)",
                size: order,
                cap,
            });
        }
        let n = ring.order() as u32;
        let mut lines = Vec::with_capacity(ring.residue_order() as usize + 1);
        lines.push(SpreadLine {
            label: Label::Infinity,
            members: (0..n).collect(),
        });
        for a in ring.coset_reps() {
            let mut members: Vec<u32> = ring
                .elements()
                .map(|x| x.0 * n + ring.mul(a, x).0)
                .collect();
            members.sort_unstable();
            lines.push(SpreadLine {
                label: Label::Finite(a),
                members,
            });
        }
        Ok(Spread { ring, lines })
    }

    pub fn ring(&self) -> &Arc<ChainRing> {
        &self.ring
    }

    pub fn lines(&self) -> &[SpreadLine] {
        &self.lines
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.lines.iter().map(|l| l.label)
    }

    /// Position of a label in `J′` (0 for `∞`).
    pub fn position(&self, label: Label) -> Result<usize> {
        self.lines
            .iter()
            .position(|l| l.label == label)
            .ok_or_else(|| Error::InvalidParameters(format!("unknown spread label {label}")))
    }

    pub fn line(&self, label: Label) -> Result<&SpreadLine> {
        Ok(&self.lines[self.position(label)?])
    }

    pub fn line_at(&self, pos: usize) -> &SpreadLine {
        &self.lines[pos]
    }

    /// Coset representatives of `L_a` in `G`, chosen greedily: each one is the
    /// first element of `G` not covered by the earlier cosets.
    pub fn line_cosets(&self, label: Label) -> Result<Vec<u32>> {
        Ok(self.cosets_at(self.position(label)?))
    }

    pub(crate) fn cosets_at(&self, pos: usize) -> Vec<u32> {
        let line = &self.lines[pos].members;
        let order = self.ring.group_order() as usize;
        let mut covered = vec![false; order];
        let mut reps = Vec::with_capacity(order / line.len());
        for g in 0..order as u32 {
            if covered[g as usize] {
                continue;
            }
            reps.push(g);
            for &l in line {
                covered[self.ring.group_add(g, l) as usize] = true;
            }
        }
        reps
    }

    /// `L_a + L_b = G`, checked as a multiset: every element of `G` arises
    /// exactly once as `x + y` with `x ∈ L_a`, `y ∈ L_b`.
    pub fn product_is_g(&self, a: Label, b: Label) -> Result<bool> {
        if a == b {
            return Err(Error::InvalidParameters(format!(
                "L_{a} + L_{a} is not a spread pair"
            )));
        }
        let (la, lb) = (&self.line(a)?.members, &self.line(b)?.members);
        let mut hits = vec![0u32; self.ring.group_order() as usize];
        for &x in la {
            for &y in lb {
                hits[self.ring.group_add(x, y) as usize] += 1;
            }
        }
        Ok(hits.iter().all(|&h| h == 1))
    }

    /// Whether every pair of distinct lines meets only in the origin.
    pub fn pairwise_trivial(&self) -> bool {
        let order = self.ring.group_order() as usize;
        let words = order.div_ceil(64);
        let masks: Vec<Vec<u64>> = self
            .lines
            .iter()
            .map(|l| {
                let mut m = vec![0u64; words];
                for &g in &l.members {
                    m[g as usize / 64] |= 1 << (g % 64);
                }
                m
            })
            .collect();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                let common: u32 = masks[i]
                    .iter()
                    .zip(&masks[j])
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                // both contain the origin
                if common != 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Number of elements of `G` on at least one line.
    pub fn covered_count(&self) -> usize {
        let mut seen = vec![false; self.ring.group_order() as usize];
        for l in &self.lines {
            for &g in &l.members {
                seen[g as usize] = true;
            }
        }
        seen.iter().filter(|&&b| b).count()
    }

    /// Whether each line is closed under addition and negation.
    pub fn lines_are_subgroups(&self) -> bool {
        self.lines.iter().all(|l| {
            let set: std::collections::HashSet<u32> = l.members.iter().copied().collect();
            set.contains(&0)
                && l.members.iter().all(|&x| {
                    set.contains(&self.ring.group_neg(x))
                        && l.members
                            .iter()
                            .all(|&y| set.contains(&self.ring.group_add(x, y)))
                })
        })
    }
}

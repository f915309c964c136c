//! Lookup-table inversion for integer-valued images.
//!
//! For `b + 1` integer levels the forward transform is tabulated once; the
//! table restricted to either branch is strictly monotone, so a nearest-match
//! lookup is total and an exact inverse for values the table produced.

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::{compute_d_max, normalized_unchecked, Branch, DichotomyParams};

/// Forward table of normalized outputs `k * |(l/b)^g - l/b|` for `l in 0..=b`.
///
/// Serializes to `{gamma, bit_max, boundary_index, entries}`; entries are the
/// normalized outputs in index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyLut {
    pub gamma: f64,
    /// Maximum level `b` (255 for 8-bit data).
    pub bit_max: u32,
    /// Last index on the ascending branch, `floor(d_max * b)`.
    pub boundary_index: u32,
    pub entries: Vec<f64>,
}

/// Tabulates the normalized transform for every level `0..=bit_max`.
pub fn build_lut(gamma: f64, bit_max: u32) -> Result<DichotomyLut> {
    if bit_max == 0 {
        return Err(crate::error::Error::Domain(
            "bit_max must be >= 1".into(),
        ));
    }
    let params = DichotomyParams::from_gamma(gamma)?;
    let d_max = compute_d_max(gamma)?;
    let b = f64::from(bit_max);
    let entries = (0..=bit_max)
        .map(|l| normalized_unchecked(f64::from(l) / b, &params))
        .collect();
    Ok(DichotomyLut {
        gamma,
        bit_max,
        boundary_index: (d_max * b).floor() as u32,
        entries,
    })
}

impl DichotomyLut {
    /// Table entry for an integer level.
    pub fn forward(&self, level: u32) -> f64 {
        self.entries[level as usize]
    }

    /// Index range `[lo, hi]` covered by a branch. The ascending side owns
    /// the boundary index, mirroring the sample classification rule.
    fn branch_range(&self, branch: Branch) -> (usize, usize) {
        match branch {
            Branch::Ascending => (0, self.boundary_index as usize),
            Branch::Descending => (
                (self.boundary_index as usize + 1).min(self.bit_max as usize),
                self.bit_max as usize,
            ),
        }
    }

    /// Level on the requested branch whose entry is nearest to `value`;
    /// ties break toward the lower index.
    pub fn invert(&self, value: f64, branch: Branch) -> u32 {
        let (lo, hi) = self.branch_range(branch);
        let entries = &self.entries[lo..=hi];
        // Entries rise on the ascending branch and fall on the descending
        // one; find the first index past `value` in branch order, then
        // compare the two neighbors of the insertion point.
        let ascending = matches!(branch, Branch::Ascending);
        let split = entries.partition_point(|&v| if ascending { v < value } else { v > value });
        let below = split.saturating_sub(1);
        let above = split.min(entries.len() - 1);
        // strict comparison keeps exact ties on the lower index
        let best = if (entries[above] - value).abs() < (entries[below] - value).abs() {
            above
        } else {
            below
        };
        (lo + best) as u32
    }
}

/// Free-function form of [`DichotomyLut::invert`].
pub fn invert_lut(value: f64, lut: &DichotomyLut, branch: Branch) -> u32 {
    lut.invert(value, branch)
}

use crate::bp_round::RoundedInstance;
use crate::error::Result;

use super::{check_feasible, copies_fitting, PackingSolution, Pattern, PatternUse};

/// Consecutive bins with identical content, in opening order.
#[derive(Debug, Clone)]
struct BinGroup {
    counts: Vec<u64>,
    fill: f64,
    bins: u64,
}

/// First fit decreasing on the expanded instance, computed per size class.
///
/// Bins opened in the same way form a group. When a size class is placed,
/// every group that still has room for it is split into the bins that are
/// filled to the maximum, at most one partially filled bin and the untouched
/// rest, which is exactly what first fit does item by item.
pub fn solve_ffd(instance: &RoundedInstance) -> Result<PackingSolution> {
    check_feasible(instance)?;
    let sigma = instance.sigma();
    let sizes: Vec<f64> = instance.entries().iter().map(|e| e.size).collect();
    let fill_of = |counts: &[u64]| -> f64 {
        counts.iter().zip(&sizes).map(|(&c, &s)| c as f64 * s).sum()
    };

    let mut groups: Vec<BinGroup> = Vec::new();
    for (i, entry) in instance.entries().iter().enumerate() {
        let size = entry.size;
        let mut remaining = entry.multiplicity;
        let mut next: Vec<BinGroup> = Vec::with_capacity(groups.len() + 2);
        for group in groups.drain(..) {
            let per_bin = copies_fitting(size, 1.0 - group.fill);
            if remaining == 0 || per_bin == 0 {
                next.push(group);
                continue;
            }
            let full = group.bins.min(remaining / per_bin);
            remaining -= full * per_bin;
            let mut untouched = group.bins - full;
            if full > 0 {
                let mut counts = group.counts.clone();
                counts[i] += per_bin;
                let fill = fill_of(&counts);
                next.push(BinGroup { counts, fill, bins: full });
            }
            if untouched > 0 && remaining > 0 {
                let mut counts = group.counts.clone();
                counts[i] += remaining;
                let fill = fill_of(&counts);
                next.push(BinGroup { counts, fill, bins: 1 });
                remaining = 0;
                untouched -= 1;
            }
            if untouched > 0 {
                next.push(BinGroup { bins: untouched, ..group });
            }
        }
        if remaining > 0 {
            let per_bin = copies_fitting(size, 1.0).max(1);
            let full = remaining / per_bin;
            let rest = remaining % per_bin;
            for (copies, bins) in [(per_bin, full), (rest, 1)] {
                if copies == 0 || bins == 0 {
                    continue;
                }
                let mut counts = vec![0; sigma];
                counts[i] = copies;
                let fill = fill_of(&counts);
                next.push(BinGroup { counts, fill, bins });
            }
        }
        groups = next;
    }

    Ok(PackingSolution::from_uses(
        groups
            .into_iter()
            .map(|g| PatternUse { pattern: Pattern { counts: g.counts }, uses: g.bins, fill: g.fill })
            .collect(),
    ))
}

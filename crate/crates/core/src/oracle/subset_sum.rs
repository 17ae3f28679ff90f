use crate::error::{Error, Result};
use crate::model::Instance;

/// Largest number of subset sums tracked by [`optimal_discrepancy`].
pub const DEFAULT_TABLE_BUDGET: u64 = 1 << 26;

/// Minimum discrepancy over all `2^n` assignments.
pub fn optimal_discrepancy(instance: &Instance) -> Result<u64> {
    optimal_discrepancy_with_budget(instance, DEFAULT_TABLE_BUDGET)
}

/// Pseudo-polynomial subset-sum over `[0, P/2]` with a bitset of reachable
/// sums. Instances whose table would exceed `budget` entries are refused.
pub fn optimal_discrepancy_with_budget(instance: &Instance, budget: u64) -> Result<u64> {
    let total = instance.total();
    let half = total / 2;
    let needed = half + 1;
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let bits = needed as usize;
    let mut reach = vec![0u64; bits.div_ceil(64)];
    reach[0] = 1;
    for &p in instance.sizes() {
        if p as usize >= bits {
            continue;
        }
        shift_or(&mut reach, p as usize);
        mask_tail(&mut reach, bits);
    }
    let best = highest_set_bit(&reach).expect("the empty subset is always reachable") as u64;
    Ok(total - 2 * best)
}

/// `reach |= reach << shift`.
fn shift_or(reach: &mut [u64], shift: usize) {
    let words = shift / 64;
    let bits = shift % 64;
    for i in (words..reach.len()).rev() {
        let src = i - words;
        let mut v = reach[src] << bits;
        if bits > 0 && src > 0 {
            v |= reach[src - 1] >> (64 - bits);
        }
        reach[i] |= v;
    }
}

fn mask_tail(reach: &mut [u64], bits: usize) {
    let rem = bits % 64;
    if rem != 0 {
        if let Some(last) = reach.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

fn highest_set_bit(reach: &[u64]) -> Option<usize> {
    reach
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

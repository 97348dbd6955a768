//! Binomial coefficients and lexicographic combination unranking.

use crate::error::{Error, Result};

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc * (n - k + i) / i stays exact because acc * (n-k+i) is divisible by i.
        match acc.checked_mul(n as u128 - k as u128 + i) {
            Some(v) => acc = v / i,
            None => return u128::MAX,
        }
    }
    acc
}

/// Returns the `rank`-th `r`-subset of `{0, .., n-1}` in lexicographic order.
pub fn unrank_combination(n: usize, r: usize, rank: u128) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(r);
    unrank_into(n, r, rank, &mut out)?;
    Ok(out)
}

/// Same as [`unrank_combination`], writing into a reusable buffer.
pub fn unrank_into(n: usize, r: usize, mut rank: u128, out: &mut Vec<usize>) -> Result<()> {
    let total = binomial(n, r);
    if rank >= total {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} out of range for C({n}, {r}) = {total}"
        )));
    }
    out.clear();
    let mut next = 0usize;
    for slot in 0..r {
        let remaining = r - slot - 1;
        let mut c = next;
        loop {
            // Number of combinations whose element at `slot` is `c`.
            let count = binomial(n - c - 1, remaining);
            if rank < count {
                break;
            }
            rank -= count;
            c += 1;
        }
        out.push(c);
        next = c + 1;
    }
    Ok(())
}

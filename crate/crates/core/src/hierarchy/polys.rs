//! The `W` and `H` operator polynomials.

use crate::error::{Error, Result};
use crate::polarized::BlockOperator;

/// Largest `l` for which [`h_poly`] enumerates binary tuples directly.
pub const H_ENUMERATION_MAX_L: usize = 12;

/// Table `t[k][n] = W^k_n(μ)` for `0 ≤ n ≤ k ≤ k_max`, built with
/// `W^{k+1}_n = W^k_n μ + W^k_{n−1} P₊`.
pub fn w_table(k_max: usize, mu: &BlockOperator) -> Vec<Vec<BlockOperator>> {
    let dims = mu.dims();
    let mut table = Vec::with_capacity(k_max + 1);
    table.push(vec![BlockOperator::identity(dims)]);
    for k in 0..k_max {
        let prev: &Vec<BlockOperator> = &table[k];
        let mut row = Vec::with_capacity(k + 2);
        for n in 0..=k + 1 {
            let mut w = if n <= k { &prev[n] * mu } else { BlockOperator::zeros(dims) };
            if n >= 1 {
                w = &w + &prev[n - 1].p_plus_right();
            }
            row.push(w);
        }
        table.push(row);
    }
    table
}

/// Same table from the right-handed recurrence `W^{k+1}_n = μW^k_n + P₊W^k_{n−1}`.
pub fn w_table_right(k_max: usize, mu: &BlockOperator) -> Vec<Vec<BlockOperator>> {
    let dims = mu.dims();
    let mut table = Vec::with_capacity(k_max + 1);
    table.push(vec![BlockOperator::identity(dims)]);
    for k in 0..k_max {
        let prev: &Vec<BlockOperator> = &table[k];
        let mut row = Vec::with_capacity(k + 2);
        for n in 0..=k + 1 {
            let mut w = if n <= k { mu * &prev[n] } else { BlockOperator::zeros(dims) };
            if n >= 1 {
                w = &w + &prev[n - 1].p_plus_left();
            }
            row.push(w);
        }
        table.push(row);
    }
    table
}

/// `W^k_n(μ)`, the coefficient of `λⁿ` in `(μ + λP₊)^k`.
pub fn w_poly(k: usize, n: usize, mu: &BlockOperator) -> Result<BlockOperator> {
    if n > k {
        return Err(Error::IndexOutOfRange(format!("W^{k}_{n} needs n ≤ k")));
    }
    let mut table = w_table(k, mu);
    Ok(table.swap_remove(k).swap_remove(n))
}

/// `H^l_n(μ)`: sum over binary tuples `(i₀,…,i_l)` with `Σ iⱼ = n` of
/// `P₊^{i₀} μ P₊^{i₁} ⋯ μ P₊^{i_l}`.
pub fn h_poly(l: usize, n: usize, mu: &BlockOperator) -> Result<BlockOperator> {
    if n > l + 1 {
        return Err(Error::IndexOutOfRange(format!("H^{l}_{n} needs n ≤ l+1")));
    }
    if l <= H_ENUMERATION_MAX_L {
        Ok(h_poly_enumerated(l, n, mu))
    } else {
        let mut table = h_table(l, mu);
        Ok(table.swap_remove(l).swap_remove(n))
    }
}

fn h_poly_enumerated(l: usize, n: usize, mu: &BlockOperator) -> BlockOperator {
    let dims = mu.dims();
    let slots = l + 1;
    let mut acc = BlockOperator::zeros(dims);
    for mask in 0u32..(1u32 << slots) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let mut term = if mask & 1 == 1 { BlockOperator::p_plus(dims) } else { BlockOperator::identity(dims) };
        for j in 1..slots {
            term = &term * mu;
            if mask >> j & 1 == 1 {
                term = term.p_plus_right();
            }
        }
        acc = &acc + &term;
    }
    acc
}

/// Table `t[l][n] = H^l_n(μ)` for `0 ≤ n ≤ l+1`, `l ≤ l_max`, built with
/// `H^{l+1}_{n+1} = P₊μH^l_n + μH^l_{n+1}` and `H^{l+1}_0 = μH^l_0`.
pub fn h_table(l_max: usize, mu: &BlockOperator) -> Vec<Vec<BlockOperator>> {
    let dims = mu.dims();
    let mut table = Vec::with_capacity(l_max + 1);
    table.push(vec![BlockOperator::identity(dims), BlockOperator::p_plus(dims)]);
    for l in 0..l_max {
        let prev: &Vec<BlockOperator> = &table[l];
        let mut row = Vec::with_capacity(l + 3);
        row.push(mu * &prev[0]);
        for n in 0..=l + 1 {
            let mut h = (mu * &prev[n]).p_plus_left();
            if n <= l {
                h = &h + &(mu * &prev[n + 1]);
            }
            row.push(h);
        }
        table.push(row);
    }
    table
}

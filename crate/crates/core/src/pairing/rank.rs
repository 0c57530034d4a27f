use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::taut::Rational;

/// Rank of a rational matrix by fraction-free (Bareiss) elimination.
///
/// Each row is first cleared of denominators; pivots are taken in column order
/// from the first row that has a nonzero entry, so the result is reproducible.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let width = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..width {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][col].clone();
        for r in rank + 1..m.len() {
            let factor = m[r][col].clone();
            for c in col..width {
                let v = &pivot * &m[r][c] - &factor * &m[rank][c];
                m[r][c] = v / &prev;
            }
        }
        prev = pivot;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taut::{rat, ratio};

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[vec![rat(0), rat(0)]]), 0);
        let m = vec![
            vec![rat(0), ratio(1, 2), ratio(1, 4)],
            vec![ratio(1, 2), rat(0), ratio(1, 4)],
            vec![ratio(1, 4), ratio(1, 4), ratio(-1, 4)],
        ];
        assert_eq!(rank(&m), 3);
        let dependent = vec![vec![rat(1), rat(2), rat(3)], vec![ratio(1, 3), ratio(2, 3), rat(1)], vec![rat(0), rat(1), rat(1)]];
        assert_eq!(rank(&dependent), 2);
    }
}

//! Smith normal form over arbitrary-precision integers and the
//! abelianization of a finite presentation it yields.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::word::Presentation;

/// Invariant factors of a finitely generated abelian group: each divides
/// the next, unit factors are omitted, `0` stands for an infinite cyclic
/// factor (zeros come last).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    factors: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn from_factors(factors: Vec<BigInt>) -> AbelianInvariants {
        AbelianInvariants { factors }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of infinite cyclic factors.
    pub fn free_rank(&self) -> usize {
        self.factors.iter().filter(|f| f.is_zero()).count()
    }

    /// Group order; `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank() > 0 {
            return None;
        }
        Some(self.factors.iter().product())
    }
}

impl core::fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|k| {
                if k.is_zero() {
                    String::from("Z")
                } else {
                    alloc::format!("Z/{k}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Quotient rounded to nearest, so the remainder is at most half the
/// divisor in magnitude (keeps entries small during elimination).
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if r.abs() * 2 > b.abs() {
        if r.is_negative() == b.is_negative() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Diagonal of the Smith normal form of an integer matrix, as nonnegative
/// entries satisfying the divisibility chain (zeros last). The length is
/// `min(rows, cols)`.
pub fn smith_normal_form(mat: &[Vec<BigInt>]) -> Vec<BigInt> {
    let rows = mat.len();
    let cols = mat.first().map_or(0, |r| r.len());
    let n = rows.min(cols);
    if n == 0 {
        return Vec::new();
    }
    let mut m: Vec<Vec<BigInt>> = mat.to_vec();

    for t in 0..n {
        'pivot: loop {
            // Least nonzero absolute value in the trailing submatrix.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !m[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let (pi, pj) = match best {
                Some(p) => p,
                None => break 'pivot,
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = div_nearest(&m[i][t], &m[t][t]);
                for j in t..cols {
                    let delta = &q * &m[t][j];
                    m[i][j] -= delta;
                }
                if !m[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = div_nearest(&m[t][j], &m[t][t]);
                for i in t..rows {
                    let delta = &q * &m[i][t];
                    m[i][j] -= delta;
                }
                if !m[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivot;
            }
            // Pivot must divide the rest of the submatrix; if not, absorb
            // the offending row and keep reducing.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&m[i][j] % &m[t][t]).is_zero() {
                        for jj in t..cols {
                            let v = m[i][jj].clone();
                            m[t][jj] += v;
                        }
                        continue 'pivot;
                    }
                }
            }
            break 'pivot;
        }
    }

    let mut diag: Vec<BigInt> = (0..n).map(|k| m[k][k].abs()).collect();
    // Enforce the divisibility chain (gcd/lcm sweep to fixpoint). Note
    // gcd(0, x) = x and lcm(0, x) = 0, which also floats zeros to the end.
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (diag[i].clone(), diag[j].clone());
                if b.is_zero() && a.is_zero() {
                    continue;
                }
                if !a.is_zero() && (&b % &a).is_zero() {
                    continue;
                }
                let g = a.gcd(&b);
                let l = if g.is_zero() { BigInt::zero() } else { &a / &g * &b };
                diag[i] = g;
                diag[j] = l.abs();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    diag
}

/// Abelianization of a presentation: Smith normal form of the exponent-sum
/// matrix of the relators, with a zero factor for every generator not
/// covered by the matrix rank.
pub fn abelianization(pres: &Presentation) -> AbelianInvariants {
    let gens = pres.gens();
    let relators = pres.relators();
    if gens.is_empty() {
        return AbelianInvariants::from_factors(Vec::new());
    }
    if relators.is_empty() {
        return AbelianInvariants::from_factors(vec![BigInt::zero(); gens.len()]);
    }
    let mat: Vec<Vec<BigInt>> = relators
        .iter()
        .map(|r| gens.iter().map(|g| r.exponent_sum(g)).collect())
        .collect();
    let diag = smith_normal_form(&mat);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let mut factors: Vec<BigInt> = diag
        .into_iter()
        .filter(|d| !d.is_one() && !d.is_zero())
        .collect();
    factors.extend(vec![BigInt::zero(); gens.len() - rank]);
    AbelianInvariants::from_factors(factors)
}

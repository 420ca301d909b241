use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `x₁^α₁ ⋯ xₙ^αₙ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All monomials of total degree `<= degree` in `dim` variables, graded-lexicographic.
///
/// Within one total degree the order is lexicographically descending in the exponent
/// vector, so for two variables and degree 2: `1, x, y, x², xy, y²`.
#[derive(Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    dim: usize,
    degree: usize,
    indices: Vec<MultiIndex>,
    position: HashMap<MultiIndex, usize>,
}

impl MonomialBasis {
    fn build(dim: usize, degree: usize) -> Self {
        let mut indices = Vec::with_capacity(binomial(dim + degree, dim));
        for d in 0..=degree {
            let mut cur = vec![0u32; dim];
            push_compositions(d as u32, 0, &mut cur, &mut indices);
        }
        let position = indices
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        Self {
            dim,
            degree,
            indices,
            position,
        }
    }

    /// Shared, cached basis for `(dim, degree)`.
    pub fn shared(dim: usize, degree: usize) -> Arc<Self> {
        static CACHE: OnceLock<Mutex<BTreeMap<(usize, usize), Arc<MonomialBasis>>>> =
            OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().expect("basis cache poisoned");
        guard
            .entry((dim, degree))
            .or_insert_with(|| Arc::new(Self::build(dim, degree)))
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        self.position.get(alpha).copied()
    }
}

fn push_compositions(remaining: u32, var: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let n = cur.len();
    if n == 0 {
        if remaining == 0 {
            out.push(MultiIndex(Vec::new()));
        }
        return;
    }
    if var == n - 1 {
        cur[var] = remaining;
        out.push(MultiIndex(cur.clone()));
        cur[var] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[var] = e;
        push_compositions(remaining - e, var + 1, cur, out);
    }
    cur[var] = 0;
}

/// `C(n, k)` in exact integer arithmetic.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order_in_two_variables() {
        let b = MonomialBasis::shared(2, 2);
        let got: Vec<Vec<u32>> = b.indices().iter().map(|m| m.0.clone()).collect();
        assert_eq!(
            got,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
    }

    #[test]
    fn basis_count_matches_binomial() {
        for n in 1..=6 {
            for m in 0..=5 {
                assert_eq!(
                    MonomialBasis::shared(n, m).len(),
                    binomial(n + m, n),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn display_monomial() {
        assert_eq!(MultiIndex(vec![2, 0, 1]).to_string(), "x1^2*x3");
        assert_eq!(MultiIndex(vec![0, 0]).to_string(), "1");
    }
}

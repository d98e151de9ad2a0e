//! Finite abelian groups in invariant-factor form.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Z/d_1 x ... x Z/d_k` with `d_1 | d_2 | ... | d_k` and every `d_i >= 2`.
/// The empty list is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        if invariant_factors.iter().any(|&d| d < 2) {
            return Err(Error::Parse(format!(
                "invariant factors must be at least 2: {invariant_factors:?}"
            )));
        }
        if invariant_factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(Error::Parse(format!(
                "invariant factors must form a divisibility chain: {invariant_factors:?}"
            )));
        }
        Ok(FiniteAbelianGroup { invariant_factors })
    }

    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            Self::trivial()
        } else {
            FiniteAbelianGroup { invariant_factors: vec![n] }
        }
    }

    /// Builds the group from an arbitrary list of cyclic orders (any order,
    /// ones allowed) by regrouping primary parts.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let mut primary: Vec<(u64, Vec<u32>)> = Vec::new();
        for &n in orders {
            for (p, e) in factorize(n) {
                match primary.iter_mut().find(|(q, _)| *q == p) {
                    Some((_, es)) => es.push(e),
                    None => primary.push((p, vec![e])),
                }
            }
        }
        Self::from_primary(primary)
    }

    /// Cokernel of an integer matrix from its Smith diagonal. Zero entries
    /// (free summands) are rejected.
    pub fn from_smith_diagonal(diag: &[BigInt]) -> Result<Self> {
        if diag.iter().any(Zero::is_zero) {
            return Err(Error::Lattice("cokernel is infinite".into()));
        }
        let factors = diag
            .iter()
            .filter(|d| !d.is_one())
            .map(|d| d.to_u64().ok_or_else(|| Error::Overflow("invariant factor".into())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(factors)
    }

    /// Identifies an abelian group from the orders of all of its elements.
    /// Fails when the multiset of orders is not that of an abelian group.
    pub fn from_element_orders(orders: &[u64]) -> Result<Self> {
        let n = orders.len() as u64;
        if n == 0 {
            return Err(Error::Internal("empty group".into()));
        }
        let mut primary = Vec::new();
        for (p, e) in factorize(n) {
            // c[k] = #{g : ord(g) divides p^k}
            let mut logs = Vec::with_capacity(e as usize + 1);
            for k in 0..=e {
                let pk = p.pow(k);
                let c = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                logs.push(exact_log(c, p).ok_or_else(|| {
                    Error::NonAbelian(format!("{c} elements of {p}-power order dividing {pk}"))
                })?);
            }
            if logs[e as usize] != e {
                return Err(Error::NonAbelian(format!("Sylow {p}-subgroup has wrong size")));
            }
            // at_least[k] = number of cyclic factors of order >= p^k
            let at_least: Vec<u32> = (1..=e as usize).map(|k| logs[k] - logs[k - 1]).collect();
            if at_least.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::NonAbelian("inconsistent element orders".into()));
            }
            let mut exps = Vec::new();
            for k in 1..=at_least.len() {
                let next = at_least.get(k).copied().unwrap_or(0);
                for _ in 0..at_least[k - 1] - next {
                    exps.push(k as u32);
                }
            }
            primary.push((p, exps));
        }
        Ok(Self::from_primary(primary))
    }

    fn from_primary(primary: Vec<(u64, Vec<u32>)>) -> Self {
        let width = primary.iter().map(|(_, es)| es.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; width];
        for (p, mut es) in primary {
            es.sort_unstable_by(|a, b| b.cmp(a));
            for (j, e) in es.into_iter().enumerate() {
                factors[j] *= p.pow(e);
            }
        }
        factors.retain(|&d| d > 1);
        factors.reverse();
        FiniteAbelianGroup { invariant_factors: factors }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    /// All elements as tuples `(a_1, ..., a_k)` with `0 <= a_i < d_i`, in
    /// lexicographic order. Index 0 is the identity.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariant_factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |a| {
                        let mut v = prefix.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

impl TryFrom<Vec<u64>> for FiniteAbelianGroup {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<FiniteAbelianGroup> for Vec<u64> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.invariant_factors
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn exact_log(mut c: u64, p: u64) -> Option<u32> {
    let mut k = 0;
    while c > 1 {
        if c % p != 0 {
            return None;
        }
        c /= p;
        k += 1;
    }
    (c == 1).then_some(k)
}

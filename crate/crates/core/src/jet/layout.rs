//! Multi-indices and the dense coefficient layout shared by all jets of one shape.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variable group of a jet: base coordinates `x` or fiber coordinates `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    X,
    Y,
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Group::X => f.write_str("x"),
            Group::Y => f.write_str("y"),
        }
    }
}

/// Per-group truncation orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    pub x: u8,
    pub y: u8,
}

impl Caps {
    pub const fn new(x: u8, y: u8) -> Self {
        Caps { x, y }
    }

    pub fn get(&self, group: Group) -> u8 {
        match group {
            Group::X => self.x,
            Group::Y => self.y,
        }
    }

    /// Highest total degree a retained monomial can have.
    pub fn total(&self) -> usize {
        self.x as usize + self.y as usize
    }
}

impl Default for Caps {
    /// `(x: 1, y: 5)`: enough for the Landsberg tensor through the
    /// metric-derived spray (2 fiber derivatives for the spray, 3 more for
    /// the Berwald tensor, 1 base derivative).
    fn default() -> Self {
        Caps::new(1, 5)
    }
}

/// Exponent vector over `n_x + n_y` variables, x-group first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n_x: usize,
    exponents: Vec<u8>,
}

impl MultiIndex {
    pub fn new(n_x: usize, exponents: Vec<u8>) -> Self {
        assert!(n_x <= exponents.len(), "x-group larger than the exponent vector");
        MultiIndex { n_x, exponents }
    }

    pub fn zero(n_x: usize, n_y: usize) -> Self {
        MultiIndex::new(n_x, vec![0; n_x + n_y])
    }

    /// Builds the index of `∂_{xs[0]} ∂_{xs[1]} … ∂̇_{ys[0]} …` (0-based, repeats allowed).
    pub fn from_partials(n_x: usize, n_y: usize, xs: &[usize], ys: &[usize]) -> Result<Self> {
        let mut idx = MultiIndex::zero(n_x, n_y);
        for &i in xs {
            if i >= n_x {
                return Err(Error::IndexOutOfRange { group: Group::X, index: i, dim: n_x });
            }
            idx.exponents[i] += 1;
        }
        for &j in ys {
            if j >= n_y {
                return Err(Error::IndexOutOfRange { group: Group::Y, index: j, dim: n_y });
            }
            idx.exponents[n_x + j] += 1;
        }
        Ok(idx)
    }

    pub fn exponents(&self) -> &[u8] {
        &self.exponents
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.exponents.len() - self.n_x
    }

    pub fn x_degree(&self) -> usize {
        self.exponents[..self.n_x].iter().map(|&e| e as usize).sum()
    }

    pub fn y_degree(&self) -> usize {
        self.exponents[self.n_x..].iter().map(|&e| e as usize).sum()
    }

    pub fn degree(&self) -> usize {
        self.x_degree() + self.y_degree()
    }

    pub fn fits(&self, caps: Caps) -> bool {
        self.x_degree() <= caps.x as usize && self.y_degree() <= caps.y as usize
    }

    /// `∏ αᵢ!`
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&e| (1..=e as u32).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (xs, ys) = self.exponents.split_at(self.n_x);
        write!(f, "x{xs:?}y{ys:?}")
    }
}

/// Coefficient ordering and the truncated product table for one jet shape.
///
/// Monomials are stored in graded order: ascending total degree, and within a
/// degree in descending lexicographic order of the exponent vector (x-group
/// first). So the constant term is slot 0, then `x¹, x², …, y¹, y², …`, then
/// `(x¹)², x¹x², …`.
#[derive(Debug)]
pub(crate) struct Layout {
    pub n_x: usize,
    pub n_y: usize,
    pub caps: Caps,
    pub indices: Vec<MultiIndex>,
    pub factorials: Vec<f64>,
    position: HashMap<Vec<u8>, usize>,
    row_start: Vec<usize>,
    row_entries: Vec<(u32, u32)>,
}

impl Layout {
    fn build(n_x: usize, n_y: usize, caps: Caps) -> Layout {
        let xs = bounded_exponents(n_x, caps.x);
        let ys = bounded_exponents(n_y, caps.y);
        let mut indices: Vec<MultiIndex> = Vec::with_capacity(xs.len() * ys.len());
        for xe in &xs {
            for ye in &ys {
                let mut e = xe.clone();
                e.extend_from_slice(ye);
                indices.push(MultiIndex::new(n_x, e));
            }
        }
        indices.sort_by_key(|m| (m.degree(), Reverse(m.exponents.clone())));

        let position: HashMap<Vec<u8>, usize> = indices
            .iter()
            .enumerate()
            .map(|(k, m)| (m.exponents.clone(), k))
            .collect();
        let factorials = indices.iter().map(MultiIndex::factorial).collect();

        let mut row_start = Vec::with_capacity(indices.len() + 1);
        let mut row_entries = Vec::new();
        let mut sum = vec![0u8; n_x + n_y];
        for a in &indices {
            row_start.push(row_entries.len());
            for (j, b) in indices.iter().enumerate() {
                if a.x_degree() + b.x_degree() > caps.x as usize
                    || a.y_degree() + b.y_degree() > caps.y as usize
                {
                    continue;
                }
                for (s, (ea, eb)) in sum.iter_mut().zip(a.exponents.iter().zip(&b.exponents)) {
                    *s = ea + eb;
                }
                let k = position[&sum];
                row_entries.push((j as u32, k as u32));
            }
        }
        row_start.push(row_entries.len());

        Layout { n_x, n_y, caps, indices, factorials, position, row_start, row_entries }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, exponents: &[u8]) -> Option<usize> {
        self.position.get(exponents).copied()
    }

    /// `(j, k)` pairs such that monomial `i` times monomial `j` is monomial `k`.
    pub fn row(&self, i: usize) -> &[(u32, u32)] {
        &self.row_entries[self.row_start[i]..self.row_start[i + 1]]
    }

    pub fn same_shape(&self, other: &Layout) -> bool {
        self.n_x == other.n_x && self.n_y == other.n_y && self.caps == other.caps
    }
}

fn bounded_exponents(n: usize, cap: u8) -> Vec<Vec<u8>> {
    fn rec(n: usize, left: u8, prefix: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(n, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, cap, &mut Vec::with_capacity(n), &mut out);
    out
}

type LayoutKey = (usize, usize, Caps);

pub(crate) fn layout(n_x: usize, n_y: usize, caps: Caps) -> Arc<Layout> {
    static CACHE: OnceLock<Mutex<HashMap<LayoutKey, Arc<Layout>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(l) = cache.lock().expect("layout cache poisoned").get(&(n_x, n_y, caps)) {
        return Arc::clone(l);
    }
    // Built outside the lock; a racing thread may build the same layout once more.
    let built = Arc::new(Layout::build(n_x, n_y, caps));
    let mut guard = cache.lock().expect("layout cache poisoned");
    Arc::clone(guard.entry((n_x, n_y, caps)).or_insert(built))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_order_starts_with_constant_then_x_then_y() {
        let l = layout(2, 2, Caps::new(1, 2));
        assert_eq!(l.indices[0].degree(), 0);
        assert_eq!(l.indices[1].exponents(), &[1, 0, 0, 0]);
        assert_eq!(l.indices[2].exponents(), &[0, 1, 0, 0]);
        assert_eq!(l.indices[3].exponents(), &[0, 0, 1, 0]);
        assert_eq!(l.indices[4].exponents(), &[0, 0, 0, 1]);
        for w in l.indices.windows(2) {
            assert!(w[0].degree() <= w[1].degree());
        }
    }

    #[test]
    fn coefficient_count_matches_binomials() {
        // x: deg <= 1 in 4 vars -> 5, y: deg <= 5 in 4 vars -> C(9,4) = 126
        assert_eq!(layout(4, 4, Caps::new(1, 5)).len(), 5 * 126);
        assert_eq!(layout(3, 3, Caps::new(0, 3)).len(), 20);
    }

    #[test]
    fn factorial_of_multi_index() {
        let m = MultiIndex::new(1, vec![1, 3, 2]);
        assert_eq!(m.factorial(), 12.0);
        assert_eq!(m.to_string(), "x[1]y[3, 2]");
    }

    #[test]
    fn partial_indices_are_checked() {
        assert!(MultiIndex::from_partials(2, 2, &[2], &[]).is_err());
        let m = MultiIndex::from_partials(2, 3, &[0], &[1, 1, 2]).unwrap();
        assert_eq!(m.exponents(), &[1, 0, 0, 2, 1]);
    }
}

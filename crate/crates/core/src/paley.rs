//! The `d = 2` quadrance graph with nonzero-square edge values, compared to
//! the Paley graph of order `p^2`.
//!
//! For `p = 3 (mod 4)` the ring `Z_p[i]` with `i^2 = -1` is the field of order
//! `p^2`. Identifying `(x, y)` with `x + y i`, the quadrance of two points is
//! the field norm of their difference, `N(z) = z^(p+1)`, and `N(z)` is a
//! nonzero square in `Z_p` exactly when `z` is a nonzero square in the field.
//! So the identity map is an isomorphism, which [`verify_isomorphism`] checks
//! over all vertex pairs.

use serde::Serialize;

use crate::bitset::Bitset;
use crate::error::{QecError, Result};
use crate::graph::{GraphParams, QuadranceGraph, DEFAULT_MATERIALIZE_LIMIT};
use crate::zmod::{legendre_symbol, mul_mod, Modulus, Residue};

/// An element `x + y i` of `Z_p[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gaussian {
    pub x: u64,
    pub y: u64,
}

/// The field `Z_p[i]`, `p = 3 (mod 4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianField {
    p: u64,
}

impl GaussianField {
    pub fn new(p: u64) -> Result<Self> {
        Modulus::odd_prime(p)?;
        if p % 4 != 3 {
            return Err(QecError::NotAField(p));
        }
        Ok(Self { p })
    }

    pub fn order(self) -> u64 {
        self.p * self.p
    }

    /// Element with index `x * p + y`.
    pub fn element(self, index: usize) -> Gaussian {
        let p = self.p as usize;
        Gaussian {
            x: (index / p) as u64,
            y: (index % p) as u64,
        }
    }

    pub fn sub(self, a: Gaussian, b: Gaussian) -> Gaussian {
        let p = self.p;
        Gaussian {
            x: (a.x + p - b.x) % p,
            y: (a.y + p - b.y) % p,
        }
    }

    pub fn mul(self, a: Gaussian, b: Gaussian) -> Gaussian {
        let p = self.p;
        let xx = mul_mod(a.x, b.x, p);
        let yy = mul_mod(a.y, b.y, p);
        Gaussian {
            x: (xx + p - yy) % p,
            y: (mul_mod(a.x, b.y, p) + mul_mod(a.y, b.x, p)) % p,
        }
    }

    pub fn pow(self, mut base: Gaussian, mut e: u64) -> Gaussian {
        let mut acc = Gaussian { x: 1, y: 0 };
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `x^2 + y^2`.
    pub fn norm(self, z: Gaussian) -> u64 {
        (mul_mod(z.x, z.x, self.p) + mul_mod(z.y, z.y, self.p)) % self.p
    }

    /// Euler's criterion in the field: `z != 0` and `z^((q-1)/2) = 1`.
    pub fn is_nonzero_square(self, z: Gaussian) -> bool {
        z != (Gaussian { x: 0, y: 0 }) && self.pow(z, (self.order() - 1) / 2) == Gaussian { x: 1, y: 0 }
    }
}

/// Paley graph on `Z_p[i]`: `z ~ z'` iff `z - z'` is a nonzero square.
#[derive(Debug, Clone)]
pub struct PaleyGraph {
    field: GaussianField,
    rows: Vec<Bitset>,
}

impl PaleyGraph {
    pub fn field(&self) -> GaussianField {
        self.field
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Bitset] {
        &self.rows
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.rows[a].get(b)
    }

    pub fn degree(&self) -> Option<usize> {
        regular_degree(&self.rows)
    }
}

pub fn build_paley(p: u64) -> Result<PaleyGraph> {
    let field = GaussianField::new(p)?;
    let q = field.order() as usize;
    let squares: Vec<bool> = (0..q).map(|i| field.is_nonzero_square(field.element(i))).collect();
    let rows = (0..q)
        .map(|a| {
            let mut row = Bitset::new(q);
            let za = field.element(a);
            for b in 0..q {
                let diff = field.sub(field.element(b), za);
                if squares[(diff.x * p + diff.y) as usize] {
                    row.set(b);
                }
            }
            row
        })
        .collect();
    Ok(PaleyGraph { field, rows })
}

/// `G_{V,p}`: `d = 2`, edge values the nonzero squares mod `p`.
pub fn build_quadratic_residue_graph(p: u64) -> Result<QuadranceGraph> {
    let modulus = Modulus::odd_prime(p)?;
    let residues = (1..p)
        .filter(|&x| legendre_symbol(Residue(x), modulus) == Ok(1))
        .collect();
    QuadranceGraph::build(
        GraphParams::with_edge_values(modulus, 2, residues)?,
        DEFAULT_MATERIALIZE_LIMIT,
    )
}

/// Vertex bijection from `Z_p^2` indices to field element indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoMap {
    pub images: Vec<usize>,
}

impl IsoMap {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoCheck {
    pub p: u64,
    pub isomorphic: bool,
    pub map: IsoMap,
    /// First vertex pair (in index order) whose adjacency disagrees.
    pub counterexample: Option<(usize, usize)>,
    pub pairs_checked: u64,
}

/// Check that `(x, y) -> x + y i` maps `G_{V,p}` onto the Paley graph.
pub fn verify_isomorphism(p: u64) -> Result<IsoCheck> {
    let paley = build_paley(p)?;
    let qr = build_quadratic_residue_graph(p)?;
    let map = IsoMap::identity(paley.order());
    let n = qr.vertex_count();
    let mut pairs = 0;
    for a in 0..n {
        let row = qr.neighbor_bitset(&qr.point(a))?;
        for b in a + 1..n {
            pairs += 1;
            if row.get(b) != paley.is_edge(map.images[a], map.images[b]) {
                return Ok(IsoCheck {
                    p,
                    isomorphic: false,
                    map,
                    counterexample: Some((a, b)),
                    pairs_checked: pairs,
                });
            }
        }
    }
    Ok(IsoCheck {
        p,
        isomorphic: map.is_bijection(),
        map,
        counterexample: None,
        pairs_checked: pairs,
    })
}

/// Parameters `(n, k, lambda, mu)` of a strongly regular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SrgParams {
    pub n: usize,
    pub k: usize,
    pub lambda: usize,
    pub mu: usize,
}

impl SrgParams {
    /// Expected parameters of the Paley graph of order `q`.
    pub fn paley(q: usize) -> Self {
        Self {
            n: q,
            k: (q - 1) / 2,
            lambda: (q - 5) / 4,
            mu: (q - 1) / 4,
        }
    }
}

fn regular_degree(rows: &[Bitset]) -> Option<usize> {
    let k = rows.first()?.count_ones();
    rows.iter().all(|r| r.count_ones() == k).then_some(k)
}

/// Strongly regular parameters from adjacency rows, or `None` if the graph is
/// not strongly regular.
pub fn srg_parameters(rows: &[Bitset]) -> Option<SrgParams> {
    let k = regular_degree(rows)?;
    let n = rows.len();
    let (mut lambda, mut mu) = (None, None);
    for a in 0..n {
        for b in a + 1..n {
            let mut common = rows[a].clone();
            common.and_assign(&rows[b]);
            let c = common.count_ones();
            let slot = if rows[a].get(b) { &mut lambda } else { &mut mu };
            match *slot {
                None => *slot = Some(c),
                Some(prev) if prev != c => return None,
                _ => {}
            }
        }
    }
    Some(SrgParams {
        n,
        k,
        lambda: lambda.unwrap_or(0),
        mu: mu.unwrap_or(0),
    })
}

/// Adjacency rows of a materialized quadrance graph.
pub fn adjacency_rows(g: &QuadranceGraph) -> Result<Vec<Bitset>> {
    (0..g.vertex_count())
        .map(|i| g.neighbor_bitset(&g.point(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_edge_values() {
        assert_eq!(build_quadratic_residue_graph(7).unwrap().params().edge_values(), &[1, 2, 4]);
        assert_eq!(build_quadratic_residue_graph(5).unwrap().params().edge_values(), &[1, 4]);
        let g = build_quadratic_residue_graph(7).unwrap();
        let rows = adjacency_rows(&g).unwrap();
        assert!(regular_degree(&rows).is_some());
    }

    #[test]
    fn paley_sizes() {
        let g3 = build_paley(3).unwrap();
        assert_eq!((g3.order(), g3.degree()), (9, Some(4)));
        let g7 = build_paley(7).unwrap();
        assert_eq!((g7.order(), g7.degree()), (49, Some(24)));
        assert_eq!(build_paley(5).unwrap_err(), QecError::NotAField(5));
        assert!(build_paley(9).is_err());
    }

    #[test]
    fn norm_is_frobenius_power() {
        for p in [3u64, 7, 11] {
            let f = GaussianField::new(p).unwrap();
            for idx in 0..f.order() as usize {
                let z = f.element(idx);
                assert_eq!(f.pow(z, p + 1), Gaussian { x: f.norm(z), y: 0 });
                let m = Modulus::new(p).unwrap();
                let norm_square = legendre_symbol(Residue(f.norm(z)), m).unwrap() == 1;
                assert_eq!(norm_square, f.is_nonzero_square(z));
            }
        }
    }

    #[test]
    fn isomorphism_small() {
        for p in [3u64, 7, 11] {
            let r = verify_isomorphism(p).unwrap();
            assert!(r.isomorphic, "p={p}");
            let q = (p * p) as u64;
            assert_eq!(r.pairs_checked, q * (q - 1) / 2);
        }
        assert_eq!(verify_isomorphism(3).unwrap().pairs_checked, 36);
        assert!(verify_isomorphism(13).is_err());
    }

    #[test]
    fn srg_of_paley_9() {
        let g = build_paley(3).unwrap();
        assert_eq!(srg_parameters(g.rows()), Some(SrgParams { n: 9, k: 4, lambda: 1, mu: 2 }));
    }

    #[test]
    fn srg_rejects_non_srg() {
        // path on three vertices is not regular
        let mut rows = vec![Bitset::new(3), Bitset::new(3), Bitset::new(3)];
        rows[0].set(1);
        rows[1].set(0);
        rows[1].set(2);
        rows[2].set(1);
        assert_eq!(srg_parameters(&rows), None);
    }
}

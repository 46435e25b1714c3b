//! Quadrance graphs on `Z_m^d`.
//!
//! Two points are adjacent when they are distinct and their quadrance
//! `sum (x_i - y_i)^2 mod m` lies in the edge-value set. Adjacency depends only
//! on the difference of the endpoints, so the graph is a Cayley graph of
//! `Z_m^d` and is fully described by its connection set
//! `S = { s != 0 : ||s|| in edge_values }`. A materialized graph stores `S` as
//! a bitset over vertex indices; neighbourhoods are obtained by translating it.
//!
//! Vertex indices are big-endian mixed radix:
//! `index(X) = sum x_i * m^(d-1-i)`.

use std::fmt;
use std::io::Write;
use std::ops::Range;

use crate::bitset::Bitset;
use crate::error::{QecError, Result};
use crate::zmod::{legendre_symbol, mul_mod, Modulus, Residue};

/// Default vertex-count threshold below which the connection set is stored.
pub const DEFAULT_MATERIALIZE_LIMIT: usize = 1 << 21;

/// A point of `Z_m^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    modulus: u64,
    coords: Vec<u64>,
}

impl Point {
    pub fn new(modulus: Modulus, coords: Vec<u64>) -> Self {
        let m = modulus.value();
        Self {
            modulus: m,
            coords: coords.into_iter().map(|c| c % m).collect(),
        }
    }

    pub fn from_i64(modulus: Modulus, coords: &[i64]) -> Self {
        Self {
            modulus: modulus.value(),
            coords: coords.iter().map(|&c| modulus.from_i64(c).0).collect(),
        }
    }

    pub fn origin(modulus: Modulus, dim: usize) -> Self {
        Self {
            modulus: modulus.value(),
            coords: vec![0; dim],
        }
    }

    /// The `k`-th standard unit vector (zero-based).
    pub fn unit(modulus: Modulus, dim: usize, k: usize) -> Self {
        let mut p = Self::origin(modulus, dim);
        p.coords[k] = 1 % modulus.value();
        p
    }

    pub fn from_index(modulus: Modulus, dim: usize, mut index: usize) -> Self {
        let m = modulus.value() as usize;
        let mut coords = vec![0u64; dim];
        for c in coords.iter_mut().rev() {
            *c = (index % m) as u64;
            index /= m;
        }
        Self {
            modulus: m as u64,
            coords,
        }
    }

    pub fn index(&self) -> usize {
        let m = self.modulus as usize;
        self.coords.iter().fold(0usize, |acc, &c| acc * m + c as usize)
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_compatible(&self, other: &Point) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(QecError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        if self.dim() != other.dim() {
            return Err(QecError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// Coordinate-wise sum. Panics on mismatched shapes.
    pub fn add(&self, other: &Point) -> Point {
        self.check_compatible(other).expect("point shapes differ");
        let m = self.modulus;
        Point {
            modulus: m,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + b) % m)
                .collect(),
        }
    }

    /// Coordinate-wise difference. Panics on mismatched shapes.
    pub fn sub(&self, other: &Point) -> Point {
        self.check_compatible(other).expect("point shapes differ");
        let m = self.modulus;
        Point {
            modulus: m,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + m - b) % m)
                .collect(),
        }
    }

    pub fn scale(&self, c: u64) -> Point {
        let m = self.modulus;
        Point {
            modulus: m,
            coords: self.coords.iter().map(|&x| mul_mod(x, c, m)).collect(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `Q(X, Y) = sum (x_i - y_i)^2 mod m`.
pub fn quadrance(x: &Point, y: &Point) -> Result<Residue> {
    x.check_compatible(y)?;
    let m = x.modulus;
    Ok(Residue(x.coords.iter().zip(&y.coords).fold(0, |acc, (&a, &b)| {
        let diff = (a + m - b) % m;
        (acc + mul_mod(diff, diff, m)) % m
    })))
}

/// `||X|| = Q(X, 0)`.
pub fn norm(x: &Point) -> Residue {
    let m = x.modulus;
    Residue(
        x.coords
            .iter()
            .fold(0, |acc, &a| (acc + mul_mod(a, a, m)) % m),
    )
}

pub fn inner_product(x: &Point, y: &Point) -> Result<Residue> {
    x.check_compatible(y)?;
    let m = x.modulus;
    Ok(Residue(
        x.coords
            .iter()
            .zip(&y.coords)
            .fold(0, |acc, (&a, &b)| (acc + mul_mod(a, b, m)) % m),
    ))
}

/// Parameters `(m, d, edge_values)` of a quadrance graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphParams {
    modulus: Modulus,
    dim: usize,
    edge_values: Vec<u64>,
}

impl GraphParams {
    /// `edge_values = {0, ..., floor((m-1)/2)}`. For composite `m` this is a
    /// convention mirroring the prime case.
    pub fn canonical(m: u64, dim: usize) -> Result<Self> {
        let modulus = Modulus::new(m)?;
        Self::with_edge_values(modulus, dim, (0..=(m - 1) / 2).collect())
    }

    pub fn with_edge_values(modulus: Modulus, dim: usize, mut edge_values: Vec<u64>) -> Result<Self> {
        if dim == 0 {
            return Err(QecError::InvalidArgument("dimension must be at least 1".into()));
        }
        if let Some(&bad) = edge_values.iter().find(|&&v| v >= modulus.value()) {
            return Err(QecError::InvalidArgument(format!(
                "edge value {bad} not in Z_{}",
                modulus.value()
            )));
        }
        edge_values.sort_unstable();
        edge_values.dedup();
        Ok(Self {
            modulus,
            dim,
            edge_values,
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Sorted, deduplicated edge values.
    pub fn edge_values(&self) -> &[u64] {
        &self.edge_values
    }

    /// `m^d`, or an error when it does not fit a machine word.
    pub fn vertex_count(&self) -> Result<usize> {
        let m = usize::try_from(self.modulus.value())
            .map_err(|_| QecError::InstanceTooLarge("modulus exceeds word size".into()))?;
        (0..self.dim).try_fold(1usize, |acc, _| {
            acc.checked_mul(m).ok_or_else(|| {
                QecError::InstanceTooLarge(format!(
                    "{}^{} vertices overflow the index type",
                    self.modulus, self.dim
                ))
            })
        })
    }

    /// FNV-1a over `(m, d, edge_values)`.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        eat(self.modulus.value());
        eat(self.dim as u64);
        for &v in &self.edge_values {
            eat(v);
        }
        h
    }
}

#[derive(Debug, Clone)]
enum Adjacency {
    Oracle,
    Materialized(Bitset),
}

/// A quadrance graph `G_{m,d}` with a given edge-value set.
#[derive(Debug, Clone)]
pub struct QuadranceGraph {
    params: GraphParams,
    vertex_count: usize,
    edge_mask: Vec<bool>,
    adjacency: Adjacency,
}

impl QuadranceGraph {
    /// Build the graph, storing the connection set when `m^d <= materialize_limit`.
    pub fn build(params: GraphParams, materialize_limit: usize) -> Result<Self> {
        let vertex_count = params.vertex_count()?;
        let m = params.modulus.value() as usize;
        let mut edge_mask = vec![false; m];
        for &v in &params.edge_values {
            edge_mask[v as usize] = true;
        }
        let adjacency = if vertex_count <= materialize_limit {
            let mut conn = Bitset::new(vertex_count);
            for_each_norm(params.modulus, params.dim, vertex_count, |idx, n| {
                if idx != 0 && edge_mask[n as usize] {
                    conn.set(idx);
                }
            });
            Adjacency::Materialized(conn)
        } else {
            Adjacency::Oracle
        };
        Ok(Self {
            params,
            vertex_count,
            edge_mask,
            adjacency,
        })
    }

    /// Canonical `G_{m,d}` with the default materialization limit.
    pub fn canonical(m: u64, dim: usize) -> Result<Self> {
        Self::build(GraphParams::canonical(m, dim)?, DEFAULT_MATERIALIZE_LIMIT)
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn modulus(&self) -> Modulus {
        self.params.modulus
    }

    pub fn dim(&self) -> usize {
        self.params.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn is_materialized(&self) -> bool {
        matches!(self.adjacency, Adjacency::Materialized(_))
    }

    pub fn is_edge_value(&self, q: Residue) -> bool {
        self.edge_mask[q.0 as usize]
    }

    pub fn point(&self, index: usize) -> Point {
        Point::from_index(self.params.modulus, self.params.dim, index)
    }

    pub fn contains(&self, x: &Point) -> bool {
        x.modulus() == self.params.modulus.value() && x.dim() == self.params.dim
    }

    /// Adjacency oracle: distinct endpoints with quadrance in the edge set.
    pub fn is_edge(&self, x: &Point, y: &Point) -> bool {
        x != y && quadrance(x, y).map_or(false, |q| self.is_edge_value(q))
    }

    /// Connection set indicator (neighbourhood of the origin).
    pub fn connection_set(&self) -> Result<&Bitset> {
        match &self.adjacency {
            Adjacency::Materialized(b) => Ok(b),
            Adjacency::Oracle => Err(QecError::NotMaterialized),
        }
    }

    /// Common vertex degree. Popcount of the connection set when
    /// materialized, otherwise a norm enumeration.
    pub fn degree(&self) -> usize {
        match &self.adjacency {
            Adjacency::Materialized(b) => b.count_ones(),
            Adjacency::Oracle => {
                let mut deg = 0;
                for_each_norm(self.params.modulus, self.params.dim, self.vertex_count, |idx, n| {
                    if idx != 0 && self.edge_mask[n as usize] {
                        deg += 1;
                    }
                });
                deg
            }
        }
    }

    /// Neighbourhood of `x` as a bitset over vertex indices.
    pub fn neighbor_bitset(&self, x: &Point) -> Result<Bitset> {
        let conn = self.connection_set()?;
        if !self.contains(x) {
            return Err(QecError::InvalidQuery(format!("{x} is not a vertex")));
        }
        if x.is_origin() {
            return Ok(conn.clone());
        }
        let nwords = self.vertex_count.div_ceil(64);
        let mut words = vec![0u64; nwords];
        self.translate_words(conn, x.coords(), 0..nwords, &mut words);
        Ok(Bitset::from_words(words, self.vertex_count))
    }

    /// Words `range` of the neighbourhood bitset of the vertex with
    /// coordinates `shift`, written to `out` (which must have `range.len()`
    /// words). Bit `v` is `conn[v - shift]`.
    pub(crate) fn translate_words(
        &self,
        conn: &Bitset,
        shift: &[u64],
        range: Range<usize>,
        out: &mut [u64],
    ) {
        debug_assert_eq!(out.len(), range.len());
        let m = self.params.modulus.value();
        let d = self.params.dim;
        let start = range.start * 64;
        let end = (range.end * 64).min(self.vertex_count);
        out.fill(0);
        if start >= end {
            return;
        }
        if shift.iter().all(|&s| s == 0) {
            out.copy_from_slice(&conn.words()[range]);
            return;
        }
        let mut weights = vec![1usize; d];
        for k in (0..d.saturating_sub(1)).rev() {
            weights[k] = weights[k + 1] * m as usize;
        }
        let mut digits = vec![0u64; d];
        let mut rem = start;
        for k in (0..d).rev() {
            digits[k] = (rem % m as usize) as u64;
            rem /= m as usize;
        }
        let mut src_digits: Vec<u64> = digits
            .iter()
            .zip(shift)
            .map(|(&i, &s)| (i + m - s) % m)
            .collect();
        let mut src: usize = src_digits
            .iter()
            .zip(&weights)
            .map(|(&s, &w)| s as usize * w)
            .sum();
        let cw = conn.words();
        for v in start..end {
            if cw[src / 64] >> (src % 64) & 1 == 1 {
                out[v / 64 - range.start] |= 1 << (v % 64);
            }
            // odometer step on both the vertex digits and the source digits
            let mut k = d;
            while k > 0 {
                k -= 1;
                if src_digits[k] == m - 1 {
                    src_digits[k] = 0;
                    src -= (m as usize - 1) * weights[k];
                } else {
                    src_digits[k] += 1;
                    src += weights[k];
                }
                digits[k] += 1;
                if digits[k] == m {
                    digits[k] = 0;
                } else {
                    break;
                }
            }
        }
    }

    /// Write the edge list, one `i j` line per edge with `i < j`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e: std::io::Error| QecError::InvalidArgument(format!("write failed: {e}"));
        for i in 0..self.vertex_count {
            let nb = self.neighbor_bitset(&self.point(i))?;
            for j in nb.iter_ones().filter(|&j| j > i) {
                writeln!(out, "{i} {j}").map_err(io)?;
            }
        }
        Ok(())
    }
}

/// Calls `f(index, ||X||)` for every point of `Z_m^d` in index order.
fn for_each_norm(modulus: Modulus, dim: usize, count: usize, mut f: impl FnMut(usize, u64)) {
    let m = modulus.value();
    let squares: Vec<u64> = (0..m).map(|x| mul_mod(x, x, m)).collect();
    let mut digits = vec![0u64; dim];
    let mut norm = 0u64;
    for idx in 0..count {
        f(idx, norm);
        let mut k = dim;
        while k > 0 {
            k -= 1;
            let old = digits[k];
            let new = (old + 1) % m;
            digits[k] = new;
            norm = (norm + m - squares[old as usize] + squares[new as usize]) % m;
            if new != 0 {
                break;
            }
        }
    }
}

/// Counts `N_d(u) = #{X in Z_p^d : ||X|| = u}` for every `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereTable {
    modulus: Modulus,
    dim: usize,
    counts: Vec<u64>,
}

impl SphereTable {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, u: Residue) -> u64 {
        self.counts[u.0 as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree of the quadrance graph with these edge values: the number of
    /// nonzero `s` whose norm is an edge value.
    pub fn degree(&self, edge_values: &[u64]) -> u64 {
        let sum: u64 = edge_values.iter().map(|&u| self.counts[u as usize]).sum();
        if edge_values.contains(&0) {
            sum - 1
        } else {
            sum
        }
    }
}

/// Sphere sizes by `d`-fold cyclic convolution of the one-dimensional table
/// `N_1(0) = 1`, `N_1(u) = 1 + (u | p)`.
pub fn sphere_table(p: Modulus, dim: usize) -> Result<SphereTable> {
    p.require_odd_prime()?;
    let n = p.value() as usize;
    let mut base = vec![0u64; n];
    for (u, slot) in base.iter_mut().enumerate() {
        *slot = (1 + legendre_symbol(Residue(u as u64), p)?) as u64;
    }
    base[0] = 1;
    let mut counts = vec![0u64; n];
    counts[0] = 1;
    for _ in 0..dim {
        let mut next = vec![0u64; n];
        for (a, &ca) in counts.iter().enumerate() {
            if ca == 0 {
                continue;
            }
            for (b, &cb) in base.iter().enumerate() {
                let slot = &mut next[(a + b) % n];
                *slot = ca
                    .checked_mul(cb)
                    .and_then(|x| slot.checked_add(x))
                    .ok_or_else(|| QecError::InstanceTooLarge("sphere count overflow".into()))?;
            }
        }
        counts = next;
    }
    Ok(SphereTable {
        modulus: p,
        dim,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: u64) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn quadrance_examples() {
        let p = m(7);
        let x = Point::new(p, vec![1, 2]);
        let y = Point::new(p, vec![4, 6]);
        assert_eq!(quadrance(&x, &x).unwrap(), Residue(0));
        assert_eq!(quadrance(&x, &y).unwrap(), Residue(4));
        assert_eq!(
            quadrance(&Point::unit(p, 5, 0), &Point::origin(p, 5)).unwrap(),
            Residue(1)
        );
    }

    #[test]
    fn quadrance_rejects_mismatch() {
        let a = Point::new(m(7), vec![1, 2]);
        assert!(matches!(
            quadrance(&a, &Point::new(m(7), vec![1, 2, 3])),
            Err(QecError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            quadrance(&a, &Point::new(m(5), vec![1, 2])),
            Err(QecError::ModulusMismatch { .. })
        ));
        assert!(inner_product(&a, &Point::new(m(5), vec![1, 2])).is_err());
    }

    #[test]
    fn norm_and_inner_product_examples() {
        assert_eq!(norm(&Point::origin(m(7), 3)), Residue(0));
        assert_eq!(norm(&Point::new(m(7), vec![2, 3])), Residue(6));
        assert_eq!(norm(&Point::new(m(5), vec![1, 1, 1])), Residue(3));
        let p = m(7);
        assert_eq!(
            inner_product(&Point::new(p, vec![5, 6]), &Point::origin(p, 2)).unwrap(),
            Residue(0)
        );
        assert_eq!(
            inner_product(&Point::new(p, vec![1, 2]), &Point::new(p, vec![3, 4])).unwrap(),
            Residue(4)
        );
        assert_eq!(
            inner_product(&Point::unit(p, 5, 0), &Point::unit(p, 5, 1)).unwrap(),
            Residue(0)
        );
    }

    #[test]
    fn is_edge_examples() {
        let g2 = QuadranceGraph::canonical(7, 2).unwrap();
        let x = Point::new(m(7), vec![1, 2]);
        assert!(!g2.is_edge(&x, &x));
        assert!(!g2.is_edge(&x, &Point::new(m(7), vec![4, 6])));
        let g5 = QuadranceGraph::build(GraphParams::canonical(7, 5).unwrap(), 0).unwrap();
        assert!(g5.is_edge(&Point::unit(m(7), 5, 0), &Point::origin(m(7), 5)));
    }

    #[test]
    fn index_is_big_endian_mixed_radix() {
        let p = Point::new(m(7), vec![1, 2, 3]);
        assert_eq!(p.index(), 49 + 14 + 3);
        assert_eq!(Point::from_index(m(7), 3, 66), p);
    }

    #[test]
    fn build_sizes() {
        let g = QuadranceGraph::canonical(7, 5).unwrap();
        assert_eq!(g.vertex_count(), 16807);
        assert!(g.is_materialized());
        let g9 = QuadranceGraph::build(
            GraphParams::with_edge_values(m(9), 2, (0..=4).collect()).unwrap(),
            DEFAULT_MATERIALIZE_LIMIT,
        )
        .unwrap();
        assert_eq!(g9.vertex_count(), 81);
        let oracle = QuadranceGraph::build(GraphParams::canonical(7, 2).unwrap(), 10).unwrap();
        assert!(!oracle.is_materialized());
        assert_eq!(
            oracle.neighbor_bitset(&Point::origin(m(7), 2)),
            Err(QecError::NotMaterialized)
        );
        assert_eq!(oracle.degree(), 24);
    }

    #[test]
    fn build_rejects_overflow() {
        let r = QuadranceGraph::build(GraphParams::canonical(7, 40).unwrap(), 0);
        assert!(matches!(r, Err(QecError::InstanceTooLarge(_))));
    }

    #[test]
    fn regular_and_loopless_g72() {
        let g = QuadranceGraph::canonical(7, 2).unwrap();
        for i in 0..g.vertex_count() {
            let nb = g.neighbor_bitset(&g.point(i)).unwrap();
            assert_eq!(nb.count_ones(), 24);
            assert!(!nb.get(i));
        }
    }

    #[test]
    fn origin_bitset_matches_edge_scan_p5() {
        let g = QuadranceGraph::canonical(5, 2).unwrap();
        for i in 0..25 {
            let x = g.point(i);
            let nb = g.neighbor_bitset(&x).unwrap();
            for j in 0..25 {
                assert_eq!(nb.get(j), g.is_edge(&x, &g.point(j)));
            }
        }
    }

    #[test]
    fn sphere_examples() {
        let t = sphere_table(m(7), 1).unwrap();
        assert_eq!(t.counts(), &[1, 2, 2, 0, 2, 0, 0]);
        let t = sphere_table(m(7), 2).unwrap();
        assert_eq!(t.count(Residue(1)), 8);
        assert_eq!(t.total(), 49);
        assert!(sphere_table(m(9), 2).is_err());
    }

    #[test]
    fn edge_list_export() {
        let g = QuadranceGraph::canonical(3, 1).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "0 1\n0 2\n1 2\n");
    }
}

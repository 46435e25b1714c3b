//! n-existentially-closed checking.
//!
//! A graph is n-e.c. when for every disjoint `A`, `B` with `|A| + |B| = n`
//! some vertex outside `A ∪ B` is joined to all of `A` and none of `B`.
//! Equivalently, for every n-set of points and every join pattern the Venn
//! cell of that pattern is nonempty.
//!
//! Patterns are n-bit integers: bit `i` set means "joined to point `i`".
//! Exhaustive checks use vertex-transitivity and only enumerate n-sets that
//! contain the origin, listed as the origin followed by `n - 1` vertex
//! indices in strictly increasing order.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::Bitset;
use crate::error::{QecError, Result};
use crate::graph::{Point, QuadranceGraph};

/// Largest `n` supported by the bitset checker (patterns fit in a `u64` mask).
pub const MAX_N: usize = 6;

/// Words of each neighbourhood translated at a time before testing cells.
const CHUNK_WORDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub mode: CheckMode,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Keep scanning after the first failure and count all failing queries.
    pub full_scan: bool,
}

impl CheckOptions {
    pub fn exhaustive() -> Self {
        Self {
            mode: CheckMode::Exhaustive,
            workers: None,
            full_scan: false,
        }
    }

    pub fn sampled(count: usize, seed: u64) -> Self {
        Self {
            mode: CheckMode::Sampled { count, seed },
            workers: None,
            full_scan: false,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_full_scan(mut self, full_scan: bool) -> Self {
        self.full_scan = full_scan;
        self
    }
}

/// A query `(A, B)` without witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EcCertificate {
    /// Join pattern over `points`.
    pub pattern: u64,
    /// Vertex indices of the queried points, in pattern-bit order.
    pub points: Vec<usize>,
    #[serde(serialize_with = "ser_points")]
    pub a: Vec<Point>,
    #[serde(serialize_with = "ser_points")]
    pub b: Vec<Point>,
}

fn ser_points<S: serde::Serializer>(pts: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(pts.iter().map(|p| p.coords()))
}

impl EcCertificate {
    fn new(g: &QuadranceGraph, points: &[usize], pattern: u64) -> Self {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, &idx) in points.iter().enumerate() {
            if pattern >> i & 1 == 1 {
                a.push(g.point(idx));
            } else {
                b.push(g.point(idx));
            }
        }
        Self {
            pattern,
            points: points.to_vec(),
            a,
            b,
        }
    }

    /// Re-verify by scanning every vertex: true iff none is a witness.
    pub fn verify(&self, g: &QuadranceGraph) -> bool {
        (0..g.vertex_count()).all(|z| !is_witness(g, &self.a, &self.b, &g.point(z)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(EcCertificate),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn certificate(&self) -> Option<&EcCertificate> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcReport {
    pub m: u64,
    pub d: usize,
    pub edge_values: Vec<u64>,
    pub n: usize,
    pub mode: CheckMode,
    pub verdict: Verdict,
    /// Queries covered in canonical order, up to and including the first
    /// failure (or all of them on pass / full scan).
    pub queries_checked: u64,
    /// Number of failing queries; only set by full scans.
    pub failure_count: Option<u64>,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    m: u64,
    d: usize,
    edge_values: &'a [u64],
    n: usize,
    mode: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<&'a EcCertificate>,
    queries_checked: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

impl EcReport {
    pub fn is_pass(&self) -> bool {
        self.verdict.is_pass()
    }

    /// JSON value of the report. Timing is omitted unless requested so that
    /// identical runs serialize identically.
    pub fn to_json_value(&self, include_timing: bool) -> serde_json::Value {
        let (mode, samples, seed) = match self.mode {
            CheckMode::Exhaustive => ("exhaustive", None, None),
            CheckMode::Sampled { count, seed } => ("sampled", Some(count), Some(seed)),
        };
        serde_json::to_value(ReportJson {
            m: self.m,
            d: self.d,
            edge_values: &self.edge_values,
            n: self.n,
            mode,
            samples,
            seed,
            verdict: if self.is_pass() { "pass" } else { "fail" },
            certificate: self.verdict.certificate(),
            queries_checked: self.queries_checked,
            failure_count: self.failure_count,
            elapsed_ms: include_timing.then(|| self.elapsed.as_millis()),
        })
        .expect("report serializes")
    }

    pub fn to_json(&self, include_timing: bool) -> String {
        serde_json::to_string_pretty(&self.to_json_value(include_timing)).expect("report serializes")
    }
}

/// Whether `z` witnesses the query `(a, b)`.
pub fn is_witness(g: &QuadranceGraph, a: &[Point], b: &[Point], z: &Point) -> bool {
    !a.contains(z)
        && !b.contains(z)
        && a.iter().all(|x| g.is_edge(z, x))
        && b.iter().all(|y| !g.is_edge(z, y))
}

fn run_in_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| QecError::InvalidArgument(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Decide n-e.c. with the bitset checker.
pub fn check_ec(g: &QuadranceGraph, n: usize, opts: CheckOptions) -> Result<EcReport> {
    let start = Instant::now();
    if n == 0 {
        return Err(QecError::InvalidArgument("n must be at least 1".into()));
    }
    if n > MAX_N {
        return Err(QecError::InvalidArgument(format!(
            "n = {n} exceeds the supported maximum {MAX_N}"
        )));
    }
    let v = g.vertex_count();
    if v < n + 1 {
        return Err(QecError::InvalidQuery(format!(
            "n = {n} needs at least {} vertices, graph has {v}",
            n + 1
        )));
    }
    let conn = g.connection_set()?;
    let ctx = Ctx { g, conn, n };
    let (verdict, queries_checked, failure_count) = match opts.mode {
        CheckMode::Exhaustive => run_in_pool(opts.workers, || ctx.exhaustive(opts.full_scan))?,
        CheckMode::Sampled { count, seed } => {
            if count == 0 {
                return Err(QecError::InvalidArgument("sample count must be at least 1".into()));
            }
            let tuples = sample_tuples(v, n, count, seed);
            run_in_pool(opts.workers, || ctx.sampled(&tuples, opts.full_scan))?
        }
    };
    Ok(EcReport {
        m: g.modulus().value(),
        d: g.dim(),
        edge_values: g.params().edge_values().to_vec(),
        n,
        mode: opts.mode,
        verdict,
        queries_checked,
        failure_count,
        elapsed: start.elapsed(),
    })
}

/// `count` tuples of `n` distinct vertex indices from a seeded ChaCha8 stream.
pub fn sample_tuples(vertex_count: usize, n: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut t: Vec<usize> = Vec::with_capacity(n);
            while t.len() < n {
                let x = rng.gen_range(0..vertex_count);
                if !t.contains(&x) {
                    t.push(x);
                }
            }
            t
        })
        .collect()
}

struct Ctx<'a> {
    g: &'a QuadranceGraph,
    conn: &'a Bitset,
    n: usize,
}

type Outcome = (Verdict, u64, Option<u64>);

impl Ctx<'_> {
    fn patterns(&self) -> u64 {
        1u64 << self.n
    }

    fn exhaustive(&self, full_scan: bool) -> Outcome {
        let v = self.g.vertex_count();
        let k = self.n - 1;
        let per_tuple = self.patterns();
        let total = binomial(v - 1, k) as u64 * per_tuple;
        if k == 0 {
            let empty = self.empty_patterns(&[0]);
            return self.finish_single(&[0], empty, 0, total, full_scan);
        }
        // tuples grouped by their first non-origin vertex
        let per_first = |first: usize| -> (u64, Option<(Vec<usize>, u64)>) {
            let mut failures = 0u64;
            let mut first_fail = None;
            let mut rest: Vec<usize> = (first + 1..first + k).collect();
            if rest.last().map_or(false, |&l| l >= v) {
                return (0, None);
            }
            loop {
                let mut tuple = Vec::with_capacity(self.n);
                tuple.push(0);
                tuple.push(first);
                tuple.extend_from_slice(&rest);
                let empty = self.empty_patterns(&tuple);
                if empty != 0 {
                    failures += empty.count_ones() as u64;
                    if first_fail.is_none() {
                        first_fail = Some((tuple, empty.trailing_zeros() as u64));
                    }
                    if !full_scan {
                        break;
                    }
                }
                if !next_combination(&mut rest, v) {
                    break;
                }
            }
            (failures, first_fail)
        };
        if full_scan {
            let parts: Vec<_> = (1..v).into_par_iter().map(per_first).collect();
            let failures: u64 = parts.iter().map(|p| p.0).sum();
            let first = parts.into_iter().find_map(|p| p.1);
            let verdict = match first {
                None => Verdict::Pass,
                Some((t, pat)) => Verdict::Fail(EcCertificate::new(self.g, &t, pat)),
            };
            (verdict, total, Some(failures))
        } else {
            let first = (1..v).into_par_iter().find_map_first(|f| per_first(f).1);
            match first {
                None => (Verdict::Pass, total, None),
                Some((t, pat)) => {
                    let rank = combination_rank(&t[1..], v) as u64;
                    (
                        Verdict::Fail(EcCertificate::new(self.g, &t, pat)),
                        rank * per_tuple + pat + 1,
                        None,
                    )
                }
            }
        }
    }

    fn finish_single(&self, tuple: &[usize], empty: u64, rank: u64, total: u64, full_scan: bool) -> Outcome {
        if empty == 0 {
            return (Verdict::Pass, total, full_scan.then_some(0));
        }
        let pat = empty.trailing_zeros() as u64;
        let cert = Verdict::Fail(EcCertificate::new(self.g, tuple, pat));
        if full_scan {
            (cert, total, Some(empty.count_ones() as u64))
        } else {
            (cert, rank * self.patterns() + pat + 1, None)
        }
    }

    fn sampled(&self, tuples: &[Vec<usize>], full_scan: bool) -> Outcome {
        let per_tuple = self.patterns();
        let total = tuples.len() as u64 * per_tuple;
        if full_scan {
            let empties: Vec<u64> = tuples.par_iter().map(|t| self.empty_patterns(t)).collect();
            let failures = empties.iter().map(|e| e.count_ones() as u64).sum();
            let verdict = empties
                .iter()
                .position(|&e| e != 0)
                .map_or(Verdict::Pass, |i| {
                    Verdict::Fail(EcCertificate::new(
                        self.g,
                        &tuples[i],
                        empties[i].trailing_zeros() as u64,
                    ))
                });
            return (verdict, total, Some(failures));
        }
        let first = tuples
            .par_iter()
            .enumerate()
            .find_map_first(|(i, t)| {
                let e = self.empty_patterns(t);
                (e != 0).then_some((i, e.trailing_zeros() as u64))
            });
        match first {
            None => (Verdict::Pass, total, None),
            Some((i, pat)) => (
                Verdict::Fail(EcCertificate::new(self.g, &tuples[i], pat)),
                i as u64 * per_tuple + pat + 1,
                None,
            ),
        }
    }

    /// Mask of patterns whose Venn cell is empty for the given points.
    fn empty_patterns(&self, tuple: &[usize]) -> u64 {
        empty_patterns(self.g, self.conn, tuple)
    }
}

/// Bitmask of join patterns with empty Venn cell for `tuple`. The tuple is
/// translated so its first point sits at the origin.
pub(crate) fn empty_patterns(g: &QuadranceGraph, conn: &Bitset, tuple: &[usize]) -> u64 {
    let n = tuple.len();
    let v = g.vertex_count();
    let nwords = v.div_ceil(64);
    let base = g.point(tuple[0]);
    let shifted: Vec<Point> = tuple.iter().map(|&t| g.point(t).sub(&base)).collect();
    let excluded: Vec<usize> = shifted.iter().map(Point::index).collect();
    let all_patterns = if n == MAX_N { u64::MAX } else { (1u64 << (1 << n)) - 1 };
    let mut remaining = all_patterns;
    let mut buf = vec![0u64; n * CHUNK_WORDS];
    let mut ws = 0;
    while ws < nwords && remaining != 0 {
        let we = (ws + CHUNK_WORDS).min(nwords);
        let len = we - ws;
        for (i, p) in shifted.iter().enumerate() {
            g.translate_words(conn, p.coords(), ws..we, &mut buf[i * CHUNK_WORDS..i * CHUNK_WORDS + len]);
        }
        for w in 0..len {
            let word_idx = ws + w;
            let mut valid = if word_idx + 1 == nwords { Bitset::tail_mask(v) } else { u64::MAX };
            for &e in &excluded {
                if e / 64 == word_idx {
                    valid &= !(1u64 << (e % 64));
                }
            }
            let mut rem = remaining;
            while rem != 0 {
                let pat = rem.trailing_zeros();
                rem &= rem - 1;
                let mut cell = valid;
                for i in 0..n {
                    let nb = buf[i * CHUNK_WORDS + w];
                    cell &= if pat >> i & 1 == 1 { nb } else { !nb };
                }
                if cell != 0 {
                    remaining &= !(1u64 << pat);
                }
            }
            if remaining == 0 {
                break;
            }
        }
        ws = we;
    }
    remaining
}

/// Venn cell of `pattern` over `points`: vertices outside `points` joined
/// exactly to the points whose pattern bit is set.
pub fn venn_cell(g: &QuadranceGraph, points: &[Point], pattern: u64) -> Result<Bitset> {
    let mut cell = Bitset::full(g.vertex_count());
    for (i, p) in points.iter().enumerate() {
        let nb = g.neighbor_bitset(p)?;
        if pattern >> i & 1 == 1 {
            cell.and_assign(&nb);
        } else {
            cell.and_not_assign(&nb);
        }
    }
    for p in points {
        cell.clear(p.index());
    }
    Ok(cell)
}

/// Witness counts for each of the `2^n` patterns over `points`.
pub fn venn_cell_counts(g: &QuadranceGraph, points: &[Point]) -> Result<Vec<u64>> {
    if points.len() > MAX_N {
        return Err(QecError::InvalidArgument(format!("at most {MAX_N} points")));
    }
    let nbs = points
        .iter()
        .map(|p| g.neighbor_bitset(p))
        .collect::<Result<Vec<_>>>()?;
    let full = {
        let mut f = Bitset::full(g.vertex_count());
        for p in points {
            f.clear(p.index());
        }
        f
    };
    Ok((0..1u64 << points.len())
        .map(|pat| {
            let mut cell = full.clone();
            for (i, nb) in nbs.iter().enumerate() {
                if pat >> i & 1 == 1 {
                    cell.and_assign(nb);
                } else {
                    cell.and_not_assign(nb);
                }
            }
            cell.count_ones() as u64
        })
        .collect())
}

/// Reference checker: every n-subset, every pattern, every candidate vertex,
/// through the adjacency oracle only.
pub fn naive_check_ec(g: &QuadranceGraph, n: usize) -> Result<EcReport> {
    let start = Instant::now();
    if n == 0 {
        return Err(QecError::InvalidArgument("n must be at least 1".into()));
    }
    let v = g.vertex_count();
    let points: Vec<Point> = (0..v).map(|i| g.point(i)).collect();
    let report = |verdict, queries_checked| EcReport {
        m: g.modulus().value(),
        d: g.dim(),
        edge_values: g.params().edge_values().to_vec(),
        n,
        mode: CheckMode::Exhaustive,
        verdict,
        queries_checked,
        failure_count: None,
        elapsed: start.elapsed(),
    };
    if v < n {
        // no n-set exists; report the whole vertex set as unextendable
        let all: Vec<usize> = (0..v).collect();
        let cert = EcCertificate::new(g, &all, (1u64 << v) - 1);
        return Ok(report(Verdict::Fail(cert), 0));
    }
    let mut tuple: Vec<usize> = (0..n).collect();
    let mut checked = 0u64;
    loop {
        for pat in 0..1u64 << n {
            checked += 1;
            let (a, b): (Vec<_>, Vec<_>) = (0..n).partition(|&i| pat >> i & 1 == 1);
            let a: Vec<Point> = a.into_iter().map(|i| points[tuple[i]].clone()).collect();
            let b: Vec<Point> = b.into_iter().map(|i| points[tuple[i]].clone()).collect();
            if !points.iter().any(|z| is_witness(g, &a, &b, z)) {
                let cert = EcCertificate::new(g, &tuple, pat);
                return Ok(report(Verdict::Fail(cert), checked));
            }
        }
        if !next_combination(&mut tuple, v) {
            break;
        }
    }
    Ok(report(Verdict::Pass, checked))
}

/// Advance a strictly increasing tuple over `0..universe` in lex order.
fn next_combination(c: &mut [usize], universe: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < universe - (k - i) {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Lex rank of a strictly increasing tuple drawn from `1..universe`.
fn combination_rank(c: &[usize], universe: usize) -> u128 {
    let n = universe - 1;
    let k = c.len();
    let mut rank = 0u128;
    let mut prev = 0usize; // elements are >= 1
    for (i, &ci) in c.iter().enumerate() {
        for x in prev + 1..ci {
            rank += binomial(n - x, k - 1 - i);
        }
        prev = ci;
    }
    rank
}

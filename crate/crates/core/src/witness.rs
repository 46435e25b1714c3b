//! Constructive 3-e.c. witnesses for canonical quadrance graphs over `Z_p^d`.
//!
//! Given distinct `A, B, C` and a class pattern `(i, j, k)` the solver finds
//! `X` outside `{A, B, C}` with `Q(X, A) in V_i`, `Q(X, B) in V_j` and
//! `Q(X, C) in V_k`, where `V_1 = {0, ..., (p-1)/2}` and `V_2` is its
//! complement. It picks target quadrances `(u, v, w)`, replaces the last two
//! quadrance equations by the linear forms
//!
//! ```text
//! <X, B - A> = (u - v + ||B|| - ||A||) / 2
//! <X, C - A> = (u - w + ||C|| - ||A||) / 2
//! ```
//!
//! and then solves the remaining equation `Q(X, A) = u` on the affine
//! solution space `X0 + span(f_1, ..., f_k)` one coordinate at a time.
//!
//! When `B - A` and `C - A` are dependent, `C - A = t (B - A)` and the two
//! forms are only compatible when `w = t v + a` with
//! `a = ||C|| + (t-1)||A|| - t||B|| - (t-1)u`; triples are scanned in that
//! order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{QecError, Result};
use crate::graph::{inner_product, norm, quadrance, Point};
use crate::zmod::{solve_univariate_quadratic, LinearSystem, Modulus, QuadraticRoots, Residue};

/// Enumeration budget for [`count_quadratic_solutions`].
pub const COUNT_BUDGET: u64 = 10_000_000;

/// Quadrance class per point: `1` selects `V_1` (joined), `2` selects `V_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Pattern3 {
    pub i: u8,
    pub j: u8,
    pub k: u8,
}

impl Pattern3 {
    pub fn new(i: u8, j: u8, k: u8) -> Result<Self> {
        if [i, j, k].iter().any(|c| !matches!(c, 1 | 2)) {
            return Err(QecError::InvalidArgument(format!(
                "pattern components must be 1 or 2, got ({i},{j},{k})"
            )));
        }
        Ok(Self { i, j, k })
    }

    pub fn all() -> impl Iterator<Item = Pattern3> {
        (0..8u8).map(|b| Pattern3 {
            i: 2 - (b & 1),
            j: 2 - (b >> 1 & 1),
            k: 2 - (b >> 2 & 1),
        })
    }

    /// Join pattern as used by the checker: bit 0 for A, bit 1 for B, bit 2
    /// for C, set when the class is `V_1`.
    pub fn join_bits(self) -> u64 {
        (self.i == 1) as u64 | ((self.j == 1) as u64) << 1 | ((self.k == 1) as u64) << 2
    }
}

impl FromStr for Pattern3 {
    type Err = QecError;

    fn from_str(s: &str) -> Result<Self> {
        let digits: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        match digits.as_slice() {
            &[i, j, k] => Pattern3::new(i, j, k),
            _ => Err(QecError::InvalidArgument(format!(
                "pattern must be three digits from {{1,2}}, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Pattern3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.i, self.j, self.k)
    }
}

/// Residues of class `c` mod `p`, ascending.
pub fn class_values(p: Modulus, c: u8) -> std::ops::Range<u64> {
    let half = (p.value() - 1) / 2;
    if c == 1 {
        0..half + 1
    } else {
        half + 1..p.value()
    }
}

pub fn in_class(p: Modulus, c: u8, x: Residue) -> bool {
    class_values(p, c).contains(&x.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Dependence {
    Independent,
    Dependent { t: Residue },
}

/// How `B - A` and `C - A` relate; in the dependent case the plan also
/// records the offset `a` of the compatibility relation `w = t v + a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CaseTag {
    Independent,
    Dependent { t: Residue, a: Residue },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessPlan {
    pub u: Residue,
    pub v: Residue,
    pub w: Residue,
    pub case: CaseTag,
    /// Particular solution of the two linear forms.
    pub x0: Point,
    /// Basis of the homogeneous solution space.
    pub basis: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessResult {
    pub x: Point,
    pub plan: WitnessPlan,
    /// Number of `(u, v, w)` triples tried, the successful one included.
    pub attempts: usize,
    /// Set when `p < 7` or `d < 5`, where existence is not guaranteed.
    pub outside_hypotheses: bool,
}

/// The two linear forms together with the retained constraint `Q(X, A) = u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedSystem {
    pub linear: LinearSystem,
    pub center: Point,
    pub quadrance: Residue,
}

fn validate_triple(a: &Point, b: &Point, c: &Point) -> Result<Modulus> {
    for (x, y) in [(a, b), (a, c)] {
        if x.modulus() != y.modulus() {
            return Err(QecError::ModulusMismatch {
                left: x.modulus(),
                right: y.modulus(),
            });
        }
        if x.dim() != y.dim() {
            return Err(QecError::DimensionMismatch {
                left: x.dim(),
                right: y.dim(),
            });
        }
    }
    let p = Modulus::new(a.modulus())?;
    p.require_odd_prime()?;
    if a == b || a == c || b == c {
        return Err(QecError::InvalidQuery("points must be pairwise distinct".into()));
    }
    Ok(p)
}

/// Replace the quadrance equations for `B` and `C` by linear forms.
pub fn reduce_system(
    a: &Point,
    b: &Point,
    c: &Point,
    u: Residue,
    v: Residue,
    w: Residue,
) -> Result<ReducedSystem> {
    let p = validate_triple(a, b, c)?;
    let half = p.inv(p.residue(2)).expect("p odd");
    let (na, nb, nc) = (norm(a), norm(b), norm(c));
    let rhs = |target: Residue, n_other: Residue| {
        let num = p.add(p.sub(u, target), p.sub(n_other, na));
        p.mul(num, half).0
    };
    let linear = LinearSystem::new(
        p,
        a.dim(),
        vec![
            (b.sub(a).coords().to_vec(), rhs(v, nb)),
            (c.sub(a).coords().to_vec(), rhs(w, nc)),
        ],
    )?;
    Ok(ReducedSystem {
        linear,
        center: a.clone(),
        quadrance: u,
    })
}

/// Decide whether `B - A` and `C - A` are linearly dependent, returning the
/// scalar `t` with `C - A = t (B - A)` if so.
pub fn classify_dependence(a: &Point, b: &Point, c: &Point) -> Result<Dependence> {
    let p = validate_triple(a, b, c)?;
    let ba = b.sub(a);
    let ca = c.sub(a);
    let lead = ba
        .coords()
        .iter()
        .position(|&x| x != 0)
        .expect("B != A");
    let t = p
        .div(Residue(ca.coords()[lead]), Residue(ba.coords()[lead]))
        .expect("nonzero pivot");
    if ba.scale(t.0) == ca {
        Ok(Dependence::Dependent { t })
    } else {
        Ok(Dependence::Independent)
    }
}

/// Offset `a(u) = ||C|| + (t-1)||A|| - t||B|| - (t-1)u`.
pub fn dependent_offset(p: Modulus, t: Residue, a: &Point, b: &Point, c: &Point, u: Residue) -> Residue {
    let t1 = p.sub(t, p.one());
    let s = p.add(norm(c), p.mul(t1, norm(a)));
    let s = p.sub(s, p.mul(t, norm(b)));
    p.sub(s, p.mul(t1, u))
}

/// All `(u, v, w)` triples admissible for the pattern, in scan order: `u`
/// ascending, then `v` ascending, then (independent case only) `w`.
pub fn compatible_triples<'a>(
    pattern: Pattern3,
    dependence: Dependence,
    a: &'a Point,
    b: &'a Point,
    c: &'a Point,
) -> Result<Box<dyn Iterator<Item = (Residue, Residue, Residue)> + 'a>> {
    let p = validate_triple(a, b, c)?;
    let us = class_values(p, pattern.i);
    Ok(match dependence {
        Dependence::Independent => Box::new(us.flat_map(move |u| {
            class_values(p, pattern.j).flat_map(move |v| {
                class_values(p, pattern.k).map(move |w| (Residue(u), Residue(v), Residue(w)))
            })
        })),
        Dependence::Dependent { t } => {
            let base = dependent_offset(p, t, a, b, c, Residue(0));
            Box::new(dependent_triples(p, t, base, pattern))
        }
    })
}

/// Dependent-case scan from the offset at `u = 0`: for `u` ascending in
/// `V_i` and `v` ascending in `V_j`, yield `(u, v, t v + a(u))` whenever it
/// lands in `V_k`, where `a(u) = base - (t-1) u`.
pub fn dependent_triples(
    p: Modulus,
    t: Residue,
    base: Residue,
    pattern: Pattern3,
) -> impl Iterator<Item = (Residue, Residue, Residue)> {
    let t1 = p.sub(t, p.one());
    class_values(p, pattern.i).flat_map(move |u| {
        let off = p.sub(base, p.mul(t1, Residue(u)));
        class_values(p, pattern.j).filter_map(move |v| {
            let w = p.add(p.mul(t, Residue(v)), off);
            in_class(p, pattern.k, w).then_some((Residue(u), Residue(v), w))
        })
    })
}

/// First compatible triple in scan order.
pub fn choose_uvw(
    pattern: Pattern3,
    dependence: Dependence,
    a: &Point,
    b: &Point,
    c: &Point,
) -> Result<(Residue, Residue, Residue)> {
    compatible_triples(pattern, dependence, a, b, c)?
        .next()
        .ok_or(QecError::NoCompatibleTriple)
}

/// Scan `v` in `V_j` for `w = t v + a` in `V_k` with a fixed offset.
pub fn scan_dependent_vw(p: Modulus, t: Residue, offset: Residue, j: u8, k: u8) -> Option<(Residue, Residue)> {
    class_values(p, j).map(Residue).find_map(|v| {
        let w = p.add(p.mul(t, v), offset);
        in_class(p, k, w).then_some((v, w))
    })
}

/// Build the plan for a fixed `(u, v, w)`; `None` if the linear forms are
/// inconsistent.
pub fn build_plan(
    a: &Point,
    b: &Point,
    c: &Point,
    (u, v, w): (Residue, Residue, Residue),
    dependence: Dependence,
) -> Result<Option<WitnessPlan>> {
    let p = validate_triple(a, b, c)?;
    let reduced = reduce_system(a, b, c, u, v, w)?;
    let Some(x0) = reduced.linear.particular_solution() else {
        return Ok(None);
    };
    let basis = reduced
        .linear
        .null_space_basis()
        .into_iter()
        .map(|f| Point::new(p, f))
        .collect();
    let case = match dependence {
        Dependence::Independent => CaseTag::Independent,
        Dependence::Dependent { t } => CaseTag::Dependent {
            t,
            a: dependent_offset(p, t, a, b, c, u),
        },
    };
    Ok(Some(WitnessPlan {
        u,
        v,
        w,
        case,
        x0: Point::new(p, x0),
        basis,
    }))
}

impl WitnessPlan {
    /// Check the plan's algebraic invariants against the triple.
    pub fn is_valid(&self, a: &Point, b: &Point, c: &Point) -> bool {
        let Ok(reduced) = reduce_system(a, b, c, self.u, self.v, self.w) else {
            return false;
        };
        let hom = reduced.linear.homogeneous();
        let forms_ok = reduced.linear.is_satisfied_by(self.x0.coords())
            && self.basis.iter().all(|f| hom.is_satisfied_by(f.coords()));
        let case_ok = match self.case {
            CaseTag::Independent => true,
            CaseTag::Dependent { t, a: off } => {
                let p = Modulus::new(a.modulus()).expect("validated");
                p.add(p.mul(t, self.v), off) == self.w
                    && dependent_offset(p, t, a, b, c, self.u) == off
            }
        };
        forms_ok && case_ok
    }

    /// `X0 + sum coeffs_i f_i`.
    pub fn point_at(&self, coeffs: &[u64]) -> Point {
        self.basis
            .iter()
            .zip(coeffs)
            .fold(self.x0.clone(), |acc, (f, &l)| acc.add(&f.scale(l)))
    }

    /// Every point of the affine space with `Q(X, A) = u`, in the order the
    /// solver visits them: the trailing coefficients in ascending
    /// mixed-radix order, then the roots for the first coefficient.
    pub fn solutions<'a>(&'a self, a: &'a Point) -> impl Iterator<Item = Point> + 'a {
        let p = Modulus::new(a.modulus()).expect("plan modulus");
        let k = self.basis.len();
        let rest = k.saturating_sub(1);
        let mut coeffs = vec![0u64; rest];
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let lambdas = coeffs.clone();
            done = !odometer(&mut coeffs, p.value());
            Some(lambdas)
        })
        .flat_map(move |lambdas| {
            let mut base = self.x0.clone();
            for (f, &l) in self.basis.iter().skip(1).zip(&lambdas) {
                base = base.add(&f.scale(l));
            }
            let roots: Vec<Point> = if k == 0 {
                if quadrance(&base, a).expect("same shape") == self.u {
                    vec![base]
                } else {
                    Vec::new()
                }
            } else {
                let f1 = &self.basis[0];
                let y = base.sub(a);
                let qa = norm(f1);
                let qb = p.mul(p.residue(2), inner_product(&y, f1).expect("same shape"));
                let qc = p.sub(norm(&y), self.u);
                let roots = solve_univariate_quadratic(qa, qb, qc, p).expect("odd prime");
                let lambdas1 = match roots {
                    QuadraticRoots::All => p.elements().collect(),
                    QuadraticRoots::Roots(r) => r,
                };
                lambdas1
                    .into_iter()
                    .map(|l| base.add(&f1.scale(l.0)))
                    .collect()
            };
            roots.into_iter()
        })
    }
}

/// Increment a little-endian-last digit vector in base `m`; false on wrap.
fn odometer(digits: &mut [u64], m: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < m {
            return true;
        }
        *d = 0;
    }
    false
}

/// Find a witness for `(A, B, C)` realizing `pattern`.
pub fn find_witness(a: &Point, b: &Point, c: &Point, pattern: Pattern3) -> Result<WitnessResult> {
    let p = validate_triple(a, b, c)?;
    let outside_hypotheses = p.value() < 7 || a.dim() < 5;
    let dependence = classify_dependence(a, b, c)?;
    let mut attempts = 0;
    for triple in compatible_triples(pattern, dependence, a, b, c)? {
        attempts += 1;
        let Some(plan) = build_plan(a, b, c, triple, dependence)? else {
            continue;
        };
        let found = plan.solutions(a).find(|x| x != a && x != b && x != c);
        if let Some(x) = found {
            return Ok(WitnessResult {
                x,
                plan,
                attempts,
                outside_hypotheses,
            });
        }
    }
    if attempts == 0 {
        Err(QecError::NoCompatibleTriple)
    } else {
        Err(QecError::NoWitness { attempts })
    }
}

impl WitnessResult {
    /// Re-check the witness postconditions from scratch.
    pub fn verify(&self, a: &Point, b: &Point, c: &Point, pattern: Pattern3) -> bool {
        let Ok(p) = Modulus::new(a.modulus()) else {
            return false;
        };
        let class_ok = |y: &Point, cls: u8| {
            quadrance(&self.x, y).map_or(false, |q| in_class(p, cls, q))
        };
        class_ok(a, pattern.i)
            && class_ok(b, pattern.j)
            && class_ok(c, pattern.k)
            && &self.x != a
            && &self.x != b
            && &self.x != c
    }
}

/// Number of points in the plan's affine space with `Q(X, A) = u`, by
/// enumerating every coefficient vector.
pub fn count_quadratic_solutions(plan: &WitnessPlan, a: &Point) -> Result<u64> {
    let p = a.modulus();
    let k = plan.basis.len() as u32;
    let size = p
        .checked_pow(k)
        .filter(|&s| s <= COUNT_BUDGET)
        .ok_or_else(|| QecError::BudgetExceeded(format!("{p}^{k} affine points")))?;
    let mut coeffs = vec![0u64; k as usize];
    let mut count = 0;
    for _ in 0..size {
        let x = plan.point_at(&coeffs);
        if quadrance(&x, a)? == plan.u {
            count += 1;
        }
        odometer(&mut coeffs, p);
    }
    Ok(count)
}

/// One line of a batch run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessRecord {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub c: Vec<u64>,
    pub pattern: String,
    pub x: Vec<u64>,
    pub u: Residue,
    pub v: Residue,
    pub w: Residue,
    #[serde(flatten)]
    pub case: CaseTag,
    pub attempts: usize,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessBatchReport {
    pub p: u64,
    pub d: usize,
    pub count: usize,
    pub seed: u64,
    pub failures: usize,
    pub median_attempts: usize,
    pub max_attempts: usize,
    pub records: Vec<WitnessRecord>,
}

/// `count` random instances `(A, B, C, pattern)` with pairwise distinct
/// points, from a seeded ChaCha8 stream.
pub fn random_instances(p: Modulus, dim: usize, count: usize, seed: u64) -> Vec<(Point, Point, Point, Pattern3)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns: Vec<Pattern3> = Pattern3::all().collect();
    let random_point =
        |rng: &mut ChaCha8Rng| Point::new(p, (0..dim).map(|_| rng.gen_range(0..p.value())).collect());
    (0..count)
        .map(|_| {
            let a = random_point(&mut rng);
            let b = loop {
                let b = random_point(&mut rng);
                if b != a {
                    break b;
                }
            };
            let c = loop {
                let c = random_point(&mut rng);
                if c != a && c != b {
                    break c;
                }
            };
            let pat = patterns[rng.gen_range(0..8)];
            (a, b, c, pat)
        })
        .collect()
}

/// Solve `count` random instances and collect a deterministic report.
pub fn witness_batch(p: u64, dim: usize, count: usize, seed: u64, workers: Option<usize>) -> Result<WitnessBatchReport> {
    let modulus = Modulus::odd_prime(p)?;
    let instances = random_instances(modulus, dim, count, seed);
    let solve = || {
        instances
            .par_iter()
            .map(|(a, b, c, pat)| {
                let r = find_witness(a, b, c, *pat)?;
                Ok(WitnessRecord {
                    a: a.coords().to_vec(),
                    b: b.coords().to_vec(),
                    c: c.coords().to_vec(),
                    pattern: pat.to_string(),
                    x: r.x.coords().to_vec(),
                    u: r.plan.u,
                    v: r.plan.v,
                    w: r.plan.w,
                    case: r.plan.case,
                    attempts: r.attempts,
                    verified: r.verify(a, b, c, *pat),
                })
            })
            .collect::<Result<Vec<_>>>()
    };
    let records = match workers {
        None => solve()?,
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| QecError::InvalidArgument(format!("thread pool: {e}")))?
            .install(solve)?,
    };
    let mut attempts: Vec<usize> = records.iter().map(|r| r.attempts).collect();
    attempts.sort_unstable();
    Ok(WitnessBatchReport {
        p,
        d: dim,
        count,
        seed,
        failures: records.iter().filter(|r| !r.verified).count(),
        median_attempts: attempts.get(attempts.len() / 2).copied().unwrap_or(0),
        max_attempts: attempts.last().copied().unwrap_or(0),
        records,
    })
}

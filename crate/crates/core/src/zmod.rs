//! Arithmetic over `Z_m`, quadratic-residue machinery for odd primes and
//! Gaussian elimination over prime fields.
//!
//! Residues are always stored canonically in `[0, m)`. Everything that needs
//! division (square roots, quadratics, linear systems) requires a prime
//! modulus and reports [`QecError::RequiresOddPrime`] otherwise.

use std::fmt;

use serde::Serialize;

use crate::error::{QecError, Result};

/// A modulus `m >= 2` with its primality decided at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u64,
    prime: bool,
}

/// A canonical residue in `[0, m)`. The modulus is carried by context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Residue(pub u64);

impl Residue {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Modulus {
    pub fn new(m: u64) -> Result<Self> {
        if m < 2 {
            return Err(QecError::InvalidModulus(m));
        }
        Ok(Self {
            m,
            prime: is_prime(m),
        })
    }

    /// Like [`Modulus::new`] but rejects anything that is not an odd prime.
    pub fn odd_prime(p: u64) -> Result<Self> {
        let m = Self::new(p).map_err(|_| QecError::RequiresOddPrime(p))?;
        m.require_odd_prime()?;
        Ok(m)
    }

    pub fn value(self) -> u64 {
        self.m
    }

    pub fn is_prime(self) -> bool {
        self.prime
    }

    pub fn require_odd_prime(self) -> Result<()> {
        if self.prime && self.m != 2 {
            Ok(())
        } else {
            Err(QecError::RequiresOddPrime(self.m))
        }
    }

    pub fn residue(self, x: u64) -> Residue {
        Residue(x % self.m)
    }

    pub fn from_i64(self, x: i64) -> Residue {
        Residue(x.rem_euclid(self.m as i64) as u64)
    }

    pub fn zero(self) -> Residue {
        Residue(0)
    }

    pub fn one(self) -> Residue {
        Residue(1 % self.m)
    }

    pub fn add(self, a: Residue, b: Residue) -> Residue {
        Residue(((a.0 as u128 + b.0 as u128) % self.m as u128) as u64)
    }

    pub fn sub(self, a: Residue, b: Residue) -> Residue {
        if a.0 >= b.0 {
            Residue(a.0 - b.0)
        } else {
            Residue(self.m - (b.0 - a.0))
        }
    }

    pub fn neg(self, a: Residue) -> Residue {
        if a.0 == 0 {
            a
        } else {
            Residue(self.m - a.0)
        }
    }

    pub fn mul(self, a: Residue, b: Residue) -> Residue {
        Residue(mul_mod(a.0, b.0, self.m))
    }

    pub fn pow(self, a: Residue, e: u64) -> Residue {
        Residue(pow_mod(a.0, e, self.m))
    }

    /// Multiplicative inverse; defined for units of `Z_m`.
    pub fn inv(self, a: Residue) -> Option<Residue> {
        let (g, x, _) = ext_gcd(a.0 as i128, self.m as i128);
        if g != 1 {
            return None;
        }
        Some(Residue(x.rem_euclid(self.m as i128) as u64))
    }

    pub fn div(self, a: Residue, b: Residue) -> Option<Residue> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// All residues in ascending order.
    pub fn elements(self) -> impl Iterator<Item = Residue> {
        (0..self.m).map(Residue)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.m)
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Deterministic Miller-Rabin. The first twelve prime bases are exact far
/// beyond the `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol `(x | p)` via Euler's criterion.
pub fn legendre_symbol(x: Residue, p: Modulus) -> Result<i8> {
    p.require_odd_prime()?;
    let x = p.residue(x.0);
    if x.0 == 0 {
        return Ok(0);
    }
    let e = p.pow(x, (p.value() - 1) / 2);
    Ok(if e.0 == 1 { 1 } else { -1 })
}

/// Both square roots of `x` mod `p`, smaller first, or `None` for a
/// non-residue. Tonelli-Shanks with the smallest non-residue as generator.
pub fn sqrt_mod(x: Residue, p: Modulus) -> Result<Option<(Residue, Residue)>> {
    let x = p.residue(x.0);
    match legendre_symbol(x, p)? {
        0 => return Ok(Some((Residue(0), Residue(0)))),
        -1 => return Ok(None),
        _ => {}
    }
    let pv = p.value();
    let root = if pv % 4 == 3 {
        p.pow(x, (pv + 1) / 4)
    } else {
        let mut q = pv - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = Residue(2);
        while legendre_symbol(z, p)? != -1 {
            z = Residue(z.0 + 1);
        }
        let mut c = p.pow(z, q);
        let mut r = p.pow(x, (q + 1) / 2);
        let mut t = p.pow(x, q);
        let mut m = s;
        while t.0 != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2.0 != 1 {
                t2 = p.mul(t2, t2);
                i += 1;
            }
            let b = p.pow(c, 1u64 << (m - i - 1));
            r = p.mul(r, b);
            c = p.mul(b, b);
            t = p.mul(t, c);
            m = i;
        }
        r
    };
    let other = p.neg(root);
    Ok(Some(if root <= other { (root, other) } else { (other, root) }))
}

/// Solution set of a univariate quadratic over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticRoots {
    /// The polynomial vanishes identically; every residue is a root.
    All,
    /// Distinct roots in ascending order (possibly empty).
    Roots(Vec<Residue>),
}

impl QuadraticRoots {
    pub fn contains(&self, x: Residue) -> bool {
        match self {
            Self::All => true,
            Self::Roots(r) => r.contains(&x),
        }
    }

    /// Materialize the root set, expanding `All` over the modulus.
    pub fn to_vec(&self, p: Modulus) -> Vec<Residue> {
        match self {
            Self::All => p.elements().collect(),
            Self::Roots(r) => r.clone(),
        }
    }
}

/// All `x` with `a x^2 + b x + c = 0 (mod p)`.
pub fn solve_univariate_quadratic(
    a: Residue,
    b: Residue,
    c: Residue,
    p: Modulus,
) -> Result<QuadraticRoots> {
    p.require_odd_prime()?;
    let (a, b, c) = (p.residue(a.0), p.residue(b.0), p.residue(c.0));
    if a.0 == 0 {
        if b.0 == 0 {
            return Ok(if c.0 == 0 {
                QuadraticRoots::All
            } else {
                QuadraticRoots::Roots(Vec::new())
            });
        }
        let x = p.div(p.neg(c), b).expect("b is a unit in a field");
        return Ok(QuadraticRoots::Roots(vec![x]));
    }
    // (2a x + b)^2 = b^2 - 4ac
    let disc = p.sub(p.mul(b, b), p.mul(p.residue(4), p.mul(a, c)));
    let two_a_inv = p.inv(p.add(a, a)).expect("2a is a unit");
    let mut roots = match sqrt_mod(disc, p)? {
        None => Vec::new(),
        Some((r1, r2)) => {
            let x1 = p.mul(p.sub(r1, b), two_a_inv);
            let x2 = p.mul(p.sub(r2, b), two_a_inv);
            vec![x1, x2]
        }
    };
    roots.sort();
    roots.dedup();
    Ok(QuadraticRoots::Roots(roots))
}

/// A system of linear equations `<coeffs, X> = rhs` over a prime field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    modulus: Modulus,
    dim: usize,
    rows: Vec<(Vec<u64>, u64)>,
}

/// Reduced row echelon form with pivot columns.
struct Echelon {
    rows: Vec<Vec<u64>>,
    rhs: Vec<u64>,
    pivots: Vec<usize>,
}

impl LinearSystem {
    pub fn new(modulus: Modulus, dim: usize, rows: Vec<(Vec<u64>, u64)>) -> Result<Self> {
        modulus.require_odd_prime()?;
        for (coeffs, _) in &rows {
            if coeffs.len() != dim {
                return Err(QecError::DimensionMismatch {
                    left: coeffs.len(),
                    right: dim,
                });
            }
        }
        let m = modulus.value();
        let rows = rows
            .into_iter()
            .map(|(c, r)| (c.into_iter().map(|x| x % m).collect(), r % m))
            .collect();
        Ok(Self { modulus, dim, rows })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[(Vec<u64>, u64)] {
        &self.rows
    }

    /// The same coefficient rows with zero right-hand sides.
    pub fn homogeneous(&self) -> Self {
        Self {
            modulus: self.modulus,
            dim: self.dim,
            rows: self.rows.iter().map(|(c, _)| (c.clone(), 0)).collect(),
        }
    }

    fn echelon(&self) -> Echelon {
        let p = self.modulus;
        let m = p.value();
        let mut rows: Vec<Vec<u64>> = self.rows.iter().map(|(c, _)| c.clone()).collect();
        let mut rhs: Vec<u64> = self.rows.iter().map(|(_, r)| *r).collect();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.dim {
            let Some(found) = (next..rows.len()).find(|&r| rows[r][col] != 0) else {
                continue;
            };
            rows.swap(next, found);
            rhs.swap(next, found);
            let inv = p.inv(Residue(rows[next][col])).expect("nonzero in field").0;
            for x in rows[next].iter_mut() {
                *x = mul_mod(*x, inv, m);
            }
            rhs[next] = mul_mod(rhs[next], inv, m);
            for r in 0..rows.len() {
                if r == next || rows[r][col] == 0 {
                    continue;
                }
                let f = rows[r][col];
                for c in 0..self.dim {
                    let s = mul_mod(f, rows[next][c], m);
                    rows[r][c] = (rows[r][c] + m - s) % m;
                }
                rhs[r] = (rhs[r] + m - mul_mod(f, rhs[next], m)) % m;
            }
            pivots.push(col);
            next += 1;
            if next == rows.len() {
                break;
            }
        }
        Echelon { rows, rhs, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of the homogeneous solution space, one vector per pivot-free
    /// column in ascending column order.
    pub fn null_space_basis(&self) -> Vec<Vec<u64>> {
        let m = self.modulus.value();
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.dim];
        for &c in &ech.pivots {
            is_pivot[c] = true;
        }
        (0..self.dim)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0u64; self.dim];
                v[free] = 1;
                for (r, &pc) in ech.pivots.iter().enumerate() {
                    v[pc] = (m - ech.rows[r][free]) % m;
                }
                v
            })
            .collect()
    }

    /// One solution with all free variables set to zero, or `None` when the
    /// system is inconsistent.
    pub fn particular_solution(&self) -> Option<Vec<u64>> {
        let ech = self.echelon();
        let rank = ech.pivots.len();
        if ech.rhs[rank..].iter().any(|&r| r != 0) {
            return None;
        }
        let mut x = vec![0u64; self.dim];
        for (r, &pc) in ech.pivots.iter().enumerate() {
            x[pc] = ech.rhs[r];
        }
        Some(x)
    }

    /// Whether `x` satisfies every row.
    pub fn is_satisfied_by(&self, x: &[u64]) -> bool {
        let m = self.modulus.value();
        self.rows.iter().all(|(c, r)| dot(c, x, m) == *r)
    }
}

pub(crate) fn dot(a: &[u64], b: &[u64], m: u64) -> u64 {
    a.iter()
        .zip(b)
        .fold(0u64, |acc, (&x, &y)| (acc + mul_mod(x, y, m)) % m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p7() -> Modulus {
        Modulus::new(7).unwrap()
    }

    fn brute_squares(p: u64) -> Vec<u64> {
        let mut s: Vec<u64> = (1..p).map(|a| a * a % p).collect();
        s.sort();
        s.dedup();
        s
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        assert!(Modulus::new(9).unwrap().require_odd_prime().is_err());
        assert!(Modulus::new(1).is_err());
    }

    #[test]
    fn legendre_examples() {
        let p = p7();
        assert_eq!(legendre_symbol(Residue(0), p).unwrap(), 0);
        assert_eq!(legendre_symbol(Residue(2), p).unwrap(), 1);
        assert_eq!(legendre_symbol(Residue(3), p).unwrap(), -1);
        let sq = brute_squares(7);
        for x in 1..7 {
            let expect = if sq.contains(&x) { 1 } else { -1 };
            assert_eq!(legendre_symbol(Residue(x), p).unwrap(), expect);
        }
    }

    #[test]
    fn legendre_rejects_non_odd_prime() {
        for m in [2, 4, 9, 15] {
            let m = Modulus::new(m).unwrap();
            assert_eq!(
                legendre_symbol(Residue(1), m),
                Err(QecError::RequiresOddPrime(m.value()))
            );
        }
    }

    #[test]
    fn sqrt_examples() {
        let p = p7();
        assert_eq!(sqrt_mod(Residue(0), p).unwrap(), Some((Residue(0), Residue(0))));
        assert_eq!(sqrt_mod(Residue(2), p).unwrap(), Some((Residue(3), Residue(4))));
        assert_eq!(sqrt_mod(Residue(5), p).unwrap(), None);
    }

    #[test]
    fn sqrt_and_symbol_counts_for_small_primes() {
        for p in (3..1000u64).filter(|&n| is_prime(n)) {
            let m = Modulus::new(p).unwrap();
            let (mut plus, mut minus) = (0, 0);
            for x in 1..p {
                match legendre_symbol(Residue(x), m).unwrap() {
                    1 => {
                        plus += 1;
                        let (r1, r2) = sqrt_mod(Residue(x), m).unwrap().unwrap();
                        assert!(r1 < r2);
                        assert_eq!(mul_mod(r1.0, r1.0, p), x);
                        assert_eq!(mul_mod(r2.0, r2.0, p), x);
                    }
                    -1 => {
                        minus += 1;
                        assert!(sqrt_mod(Residue(x), m).unwrap().is_none());
                    }
                    _ => unreachable!(),
                }
            }
            assert_eq!(plus, (p - 1) / 2);
            assert_eq!(minus, (p - 1) / 2);
        }
    }

    #[test]
    fn quadratic_examples() {
        let p = p7();
        let r = |v: Vec<u64>| QuadraticRoots::Roots(v.into_iter().map(Residue).collect());
        assert_eq!(
            solve_univariate_quadratic(Residue(1), Residue(0), p.from_i64(-2), p).unwrap(),
            r(vec![3, 4])
        );
        assert_eq!(
            solve_univariate_quadratic(Residue(0), Residue(0), Residue(0), p).unwrap(),
            QuadraticRoots::All
        );
        assert_eq!(
            solve_univariate_quadratic(Residue(1), Residue(1), Residue(1), p).unwrap(),
            r(vec![2, 4])
        );
        assert_eq!(
            solve_univariate_quadratic(Residue(0), Residue(0), Residue(3), p).unwrap(),
            r(vec![])
        );
        assert_eq!(
            solve_univariate_quadratic(Residue(0), Residue(2), Residue(1), p).unwrap(),
            r(vec![3])
        );
    }

    #[test]
    fn quadratic_matches_brute_force() {
        for p in [3u64, 5, 7, 11] {
            let m = Modulus::new(p).unwrap();
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        let brute: Vec<Residue> = (0..p)
                            .filter(|&x| (a * x * x + b * x + c) % p == 0)
                            .map(Residue)
                            .collect();
                        let got =
                            solve_univariate_quadratic(Residue(a), Residue(b), Residue(c), m)
                                .unwrap();
                        assert_eq!(got.to_vec(m), brute, "p={p} a={a} b={b} c={c}");
                        assert_eq!(got == QuadraticRoots::All, brute.len() == p as usize && a == 0);
                    }
                }
            }
        }
    }

    #[test]
    fn null_space_examples() {
        let sys = LinearSystem::new(p7(), 3, vec![]).unwrap();
        assert_eq!(
            sys.null_space_basis(),
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );

        let sys = LinearSystem::new(
            p7(),
            5,
            vec![(vec![1, 0, 0, 0, 0], 0), (vec![0, 1, 0, 0, 0], 0)],
        )
        .unwrap();
        assert_eq!(
            sys.null_space_basis(),
            vec![
                vec![0, 0, 1, 0, 0],
                vec![0, 0, 0, 1, 0],
                vec![0, 0, 0, 0, 1]
            ]
        );

        let p5 = Modulus::new(5).unwrap();
        let sys = LinearSystem::new(p5, 3, vec![(vec![1, 2, 3], 0)]).unwrap();
        let basis = sys.null_space_basis();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert_eq!(dot(v, &[1, 2, 3], 5), 0);
        }
        assert_eq!(basis, vec![vec![3, 1, 0], vec![2, 0, 1]]);
    }

    #[test]
    fn particular_examples() {
        let sys = LinearSystem::new(p7(), 2, vec![(vec![1, 0], 3)]).unwrap();
        assert_eq!(sys.particular_solution(), Some(vec![3, 0]));

        let sys = LinearSystem::new(p7(), 2, vec![(vec![1, 1], 0), (vec![2, 2], 1)]).unwrap();
        assert_eq!(sys.particular_solution(), None);

        let sys = LinearSystem::new(
            p7(),
            5,
            vec![(vec![1, 2, 0, 0, 0], 4), (vec![0, 0, 1, 1, 0], 5)],
        )
        .unwrap();
        let x = sys.particular_solution().unwrap();
        assert_eq!(dot(&x, &[1, 2, 0, 0, 0], 7), 4);
        assert_eq!(dot(&x, &[0, 0, 1, 1, 0], 7), 5);
    }

    #[test]
    fn linear_system_validation() {
        assert!(LinearSystem::new(Modulus::new(9).unwrap(), 2, vec![]).is_err());
        assert!(LinearSystem::new(p7(), 2, vec![(vec![1, 2, 3], 0)]).is_err());
    }

    #[test]
    fn inverse_for_units_of_composite() {
        let m = Modulus::new(9).unwrap();
        assert_eq!(m.inv(Residue(2)), Some(Residue(5)));
        assert_eq!(m.inv(Residue(3)), None);
    }
}

//! Integer abelianization and Smith normal form.
//!
//! Exponent-sum matrices of relators present H_1; the invariant factors come
//! from an exact SNF over arbitrary-precision integers, and surjectivity of
//! abelian-group maps is decided by prime-power rank counts.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::word::{Alphabet, Word};

/// Relator exponent-sum matrix: one row per relator, one column per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i64>,
}

impl IntegerMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        IntegerMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut m = IntegerMatrix::new(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols);
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }
}

/// Exponent sums of each relator with respect to the alphabet's generators.
pub fn abelianization_matrix(relators: &[Word], alphabet: &Alphabet) -> IntegerMatrix {
    let gens = alphabet.generators();
    let mut m = IntegerMatrix::new(relators.len(), gens.len());
    for (i, rel) in relators.iter().enumerate() {
        for c in rel.letters() {
            let lower = c.to_ascii_lowercase();
            if let Some(j) = gens.iter().position(|&g| g == lower) {
                let delta = if c.is_ascii_lowercase() { 1 } else { -1 };
                m.set(i, j, m.get(i, j) + delta);
            }
        }
    }
    m
}

/// A finitely generated abelian group Z^rank + sum Z/d_i with d_1 | d_2 | ...
/// and every d_i > 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub invariants: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            invariants: Vec::new(),
        }
    }

    pub fn cyclic(n: u64) -> Self {
        AbelianGroup {
            free_rank: 0,
            invariants: if n > 1 {
                vec![BigInt::from(n)]
            } else {
                Vec::new()
            },
        }
    }

    pub fn from_invariants(free_rank: usize, invariants: &[u64]) -> Self {
        AbelianGroup {
            free_rank,
            invariants: invariants
                .iter()
                .filter(|&&d| d > 1)
                .map(|&d| BigInt::from(d))
                .collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariants.is_empty()
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for _ in 0..self.free_rank {
            parts.push("Z".into());
        }
        for d in &self.invariants {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Invariant factors (1s dropped) and free rank = cols - rank from the Smith
/// normal form, computed exactly over BigInt.
pub fn smith_invariants(m: &IntegerMatrix) -> AbelianGroup {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| BigInt::from(m.get(i, j))).collect())
        .collect();
    let rows = m.rows;
    let cols = m.cols;
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0usize;

    while t < rows.min(cols) {
        // smallest nonzero entry in the remaining block becomes the pivot
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() {
                    match &pivot {
                        Some((pi, pj)) if a[*pi][*pj].abs() <= a[i][j].abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }

        // euclidean elimination until the pivot divides its row and column
        loop {
            let mut clean = true;
            for i in (t + 1)..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in t..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for row in a.iter_mut().take(rows).skip(t) {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }

        // divisibility: fold any non-multiple of the pivot into its row
        let mut retry = false;
        'scan: for i in (t + 1)..rows {
            for j in (t + 1)..cols {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    for col in t..cols {
                        let add = a[i][col].clone();
                        a[t][col] += add;
                    }
                    retry = true;
                    break 'scan;
                }
            }
        }
        if retry {
            continue;
        }
        diag.push(a[t][t].abs());
        t += 1;
    }

    let rank = diag.len();
    AbelianGroup {
        free_rank: cols - rank,
        invariants: diag.into_iter().filter(|d| d > &BigInt::from(1)).collect(),
    }
}

fn prime_factors(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if (&n % &p).is_zero() {
            let mut k = 0;
            while (&n % &p).is_zero() {
                n /= &p;
                k += 1;
            }
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if n > BigInt::from(1) {
        out.push((n, 1));
    }
    out
}

/// Whether a surjective homomorphism source -> target of f.g. abelian groups
/// exists: free rank dominates, and for every prime power p^k in the target
/// the source has at least as many summands of order divisible by p^k
/// (free summands count for every p^k).
pub fn surjects_onto(source: &AbelianGroup, target: &AbelianGroup) -> bool {
    if source.free_rank < target.free_rank {
        return false;
    }
    let mut primes: Vec<BigInt> = Vec::new();
    for d in &target.invariants {
        for (p, _) in prime_factors(d) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    for p in primes {
        let max_k = target
            .invariants
            .iter()
            .map(|d| prime_factors(d).iter().find(|(q, _)| *q == p).map_or(0, |(_, k)| *k))
            .max()
            .unwrap_or(0);
        let mut pk = p.clone();
        for _ in 1..=max_k {
            let count = |g: &AbelianGroup| {
                g.free_rank
                    + g.invariants
                        .iter()
                        .filter(|d| (*d % &pk).is_zero())
                        .count()
            };
            if count(source) < count(target) {
                return false;
            }
            pk *= &p;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn abelianization_rows() {
        let ab = Alphabet::new(&['a', 'b']);
        let m = abelianization_matrix(&[w("a^2bAB^2Aba")], &ab);
        assert_eq!((m.get(0, 0), m.get(0, 1)), (1, 0));

        let m = abelianization_matrix(&[w("a^6BAb^2AB")], &ab);
        assert_eq!((m.get(0, 0), m.get(0, 1)), (4, 0));

        let xy = Alphabet::new(&['x', 'y']);
        let m = abelianization_matrix(&[w("x^3"), w("y^3"), w("(xy)^4")], &xy);
        assert_eq!((m.get(0, 0), m.get(0, 1)), (3, 0));
        assert_eq!((m.get(1, 0), m.get(1, 1)), (0, 3));
        assert_eq!((m.get(2, 0), m.get(2, 1)), (4, 4));
    }

    #[test]
    fn abelianization_respects_reduction() {
        let ab = Alphabet::new(&['a', 'b']);
        // unreduced input reduces before counting; both give the same row
        let raw = "abBAa^2b";
        let m1 = abelianization_matrix(&[w(raw)], &ab);
        let m2 = abelianization_matrix(&[Word::parse(raw).unwrap()], &ab);
        assert_eq!(m1, m2);
    }

    #[test]
    fn snf_triangle_334() {
        let m = IntegerMatrix::from_rows(&[vec![3, 0], vec![0, 3], vec![4, 4]], 2);
        let g = smith_invariants(&m);
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.invariants, vec![BigInt::from(3)]);
    }

    #[test]
    fn snf_small_cases() {
        let m = IntegerMatrix::from_rows(&[vec![1, 0]], 2);
        let g = smith_invariants(&m);
        assert_eq!(g.free_rank, 1);
        assert!(g.invariants.is_empty());

        let m = IntegerMatrix::new(0, 2);
        let g = smith_invariants(&m);
        assert_eq!(g.free_rank, 2);

        let m = IntegerMatrix::from_rows(&[vec![2, 0], vec![-11, -7]], 2);
        let g = smith_invariants(&m);
        assert_eq!(g.free_rank, 0);
        assert_eq!(g.invariants, vec![BigInt::from(14)]);
    }

    /// Independent oracle: d_k = D_k / D_{k-1} with D_k the gcd of all k x k minors.
    fn determinantal_divisors(m: &IntegerMatrix) -> (usize, Vec<BigInt>) {
        use num_bigint::BigInt;
        fn minors(m: &IntegerMatrix, k: usize) -> Vec<BigInt> {
            fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
                if k == 0 {
                    return vec![vec![]];
                }
                if n < k {
                    return vec![];
                }
                let mut out = combos(n - 1, k);
                for mut c in combos(n - 1, k - 1) {
                    c.push(n - 1);
                    out.push(c);
                }
                out
            }
            fn det(m: &[Vec<BigInt>]) -> BigInt {
                let n = m.len();
                if n == 0 {
                    return BigInt::from(1);
                }
                if n == 1 {
                    return m[0][0].clone();
                }
                let mut sum = BigInt::from(0);
                for j in 0..n {
                    let minor: Vec<Vec<BigInt>> = m[1..]
                        .iter()
                        .map(|row| {
                            row.iter()
                                .enumerate()
                                .filter(|(c, _)| *c != j)
                                .map(|(_, v)| v.clone())
                                .collect()
                        })
                        .collect();
                    let term = &m[0][j] * det(&minor);
                    if j % 2 == 0 {
                        sum += term;
                    } else {
                        sum -= term;
                    }
                }
                sum
            }
            let mut out = Vec::new();
            for ri in combos(m.rows, k) {
                for ci in combos(m.cols, k) {
                    let sub: Vec<Vec<BigInt>> = ri
                        .iter()
                        .map(|&i| ci.iter().map(|&j| BigInt::from(m.get(i, j))).collect())
                        .collect();
                    out.push(det(&sub));
                }
            }
            out
        }
        fn gcd_all(v: &[BigInt]) -> BigInt {
            fn gcd(a: BigInt, b: BigInt) -> BigInt {
                if b.is_zero() {
                    a.abs()
                } else {
                    let r = &a % &b;
                    gcd(b, r)
                }
            }
            v.iter().fold(BigInt::from(0), |acc, x| gcd(acc, x.clone()))
        }
        let mut dks = vec![BigInt::from(1)];
        let mut rank = 0;
        for k in 1..=m.rows.min(m.cols) {
            let g = gcd_all(&minors(m, k));
            if g.is_zero() {
                break;
            }
            rank = k;
            dks.push(g);
        }
        let invs: Vec<BigInt> = (1..=rank)
            .map(|k| &dks[k] / &dks[k - 1])
            .filter(|d| d > &BigInt::from(1))
            .collect();
        (m.cols - rank, invs)
    }

    #[test]
    fn snf_matches_determinantal_divisor_oracle() {
        // deterministic pseudo-random 4x4 matrices with entries in [-5, 5]
        let mut state: u64 = 0x9e3779b97f4a7c15;
        let mut rng = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 11) as i64 - 5
        };
        for _case in 0..40 {
            let rows: Vec<Vec<i64>> = (0..4).map(|_| (0..4).map(|_| rng()).collect()).collect();
            let m = IntegerMatrix::from_rows(&rows, 4);
            let g = smith_invariants(&m);
            let (rank_free, invs) = determinantal_divisors(&m);
            assert_eq!(g.free_rank, rank_free, "matrix {rows:?}");
            assert_eq!(g.invariants, invs, "matrix {rows:?}");
            // divisibility chain
            for w in g.invariants.windows(2) {
                assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn surjection_cases() {
        let z = AbelianGroup::free(1);
        let z3 = AbelianGroup::cyclic(3);
        let z3z3 = AbelianGroup::from_invariants(0, &[3, 3]);
        let z14 = AbelianGroup::cyclic(14);
        let z20 = AbelianGroup::cyclic(20);
        let z16 = AbelianGroup::cyclic(16);
        let z9 = AbelianGroup::cyclic(9);

        assert!(!surjects_onto(&z14, &z3));
        assert!(!surjects_onto(&z20, &z3z3));
        assert!(!surjects_onto(&z16, &z3z3));
        assert!(surjects_onto(&z, &z3));
        assert!(!surjects_onto(&z, &z3z3));
        assert!(surjects_onto(&z9, &z3));
        assert!(!surjects_onto(&z3z3, &z9));
        assert!(surjects_onto(&AbelianGroup::from_invariants(1, &[3]), &z3z3));
        assert!(surjects_onto(&AbelianGroup::from_invariants(0, &[4, 2]), &AbelianGroup::from_invariants(0, &[2, 2])));
        assert!(!surjects_onto(&AbelianGroup::cyclic(4), &AbelianGroup::from_invariants(0, &[2, 2])));
    }
}

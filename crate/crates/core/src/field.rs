//! Arithmetic modulo a ~61-bit prime, plus the matrix and polynomial routines the
//! randomized exact-weight decisions need.

use rand::Rng;

use crate::error::{Error, Result};

/// 2^61 − 1.
pub const DEFAULT_MODULUS: u64 = (1 << 61) - 1;

/// Prime modulus, RNG seed and amplification count for randomized decisions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldConfig {
    pub modulus: u64,
    pub seed: u64,
    pub repeats: usize,
}

impl FieldConfig {
    pub fn new(modulus: u64, seed: u64, repeats: usize) -> Result<Self> {
        if !is_prime(modulus) {
            return Err(Error::InvalidArgument(format!("modulus {modulus} is not prime")));
        }
        if modulus >= 1 << 63 {
            return Err(Error::InvalidArgument("modulus must be below 2^63".into()));
        }
        if repeats == 0 {
            return Err(Error::InvalidArgument("repeat count must be positive".into()));
        }
        Ok(FieldConfig { modulus, seed, repeats })
    }

    pub fn with_seed(seed: u64, repeats: usize) -> Self {
        FieldConfig { modulus: DEFAULT_MODULUS, seed, repeats: repeats.max(1) }
    }

    /// `⌈λ·ln(k·|V|)⌉`, at least 1.
    pub fn amplified_repeats(lambda: f64, k: usize, vertices: usize) -> usize {
        let x = (k.max(1) * vertices.max(1)) as f64;
        ((lambda * x.ln()).ceil() as usize).max(1)
    }

    /// Upper bound on the one-trial false-negative probability for a polynomial whose
    /// random-variable degree is `degree` (Schwartz–Zippel).
    pub fn failure_bound(&self, degree: usize) -> f64 {
        degree as f64 / self.modulus as f64
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Field {
    p: u64,
}

impl Field {
    pub fn new(p: u64) -> Self {
        Field { p }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let prod = a as u128 * b as u128;
        if self.p == DEFAULT_MODULUS {
            let lo = (prod as u64) & DEFAULT_MODULUS;
            let hi = (prod >> 61) as u64;
            self.add(lo, hi)
        } else {
            (prod % self.p as u128) as u64
        }
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    pub fn random_nonzero<R: Rng>(&self, rng: &mut R) -> u64 {
        rng.gen_range(1..self.p)
    }

    /// Determinant by division-free row reduction; one inversion at the end.
    pub fn determinant(&self, mut a: Vec<Vec<u64>>) -> u64 {
        let n = a.len();
        let mut num = 1 % self.p;
        let mut den = 1 % self.p;
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            if pivot != col {
                a.swap(pivot, col);
                num = self.neg(num);
            }
            let pv = a[col][col];
            num = self.mul(num, pv);
            for r in col + 1..n {
                let factor = a[r][col];
                if factor == 0 {
                    continue;
                }
                // row_r = pv * row_r - factor * row_col
                den = self.mul(den, pv);
                for c in col..n {
                    let x = self.mul(pv, a[r][c]);
                    let y = self.mul(factor, a[col][c]);
                    a[r][c] = self.sub(x, y);
                }
            }
        }
        self.mul(num, self.inv(den))
    }

    /// Pfaffian of a skew-symmetric matrix by congruence elimination in pairs of rows.
    pub fn pfaffian(&self, mut a: Vec<Vec<u64>>) -> u64 {
        let n = a.len();
        if n % 2 == 1 {
            return 0;
        }
        let mut pf = 1 % self.p;
        let mut k = 0;
        while k < n {
            let Some(j) = (k + 1..n).find(|&j| a[k][j] != 0) else {
                return 0;
            };
            if j != k + 1 {
                // swapping index j with k+1 flips the sign
                a.swap(j, k + 1);
                for row in a.iter_mut() {
                    row.swap(j, k + 1);
                }
                pf = self.neg(pf);
            }
            let pivot = a[k][k + 1];
            pf = self.mul(pf, pivot);
            let pivot_inv = self.inv(pivot);
            let back_inv = self.inv(a[k + 1][k]);
            for i in k + 2..n {
                // clear a[k][i] with index k+1, then a[k+1][i] with index k
                let t = self.mul(a[k][i], pivot_inv);
                if t != 0 {
                    self.congruence_sub(&mut a, i, k + 1, t);
                }
                let s = self.mul(a[k + 1][i], back_inv);
                if s != 0 {
                    self.congruence_sub(&mut a, i, k, s);
                }
            }
            k += 2;
        }
        pf
    }

    /// Column `i` −= t·column `src`, then row `i` −= t·row `src`.
    fn congruence_sub(&self, a: &mut [Vec<u64>], i: usize, src: usize, t: u64) {
        let n = a.len();
        for row in a.iter_mut() {
            let d = self.mul(t, row[src]);
            row[i] = self.sub(row[i], d);
        }
        for c in 0..n {
            let d = self.mul(t, a[src][c]);
            a[i][c] = self.sub(a[i][c], d);
        }
    }

    /// Coefficients (lowest degree first) of the polynomial through `(xs[i], ys[i])`.
    pub fn interpolate(&self, xs: &[u64], ys: &[u64]) -> Vec<u64> {
        let n = xs.len();
        // Newton divided differences
        let mut coef = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = self.sub(coef[i], coef[i - 1]);
                let den = self.sub(xs[i], xs[i - j]);
                coef[i] = self.mul(num, self.inv(den));
            }
        }
        // expand the Newton form into monomials
        let mut poly = vec![0u64; n];
        for i in (0..n).rev() {
            // poly = poly * (x - xs[i]) + coef[i]
            let mut next = vec![0u64; n];
            for d in 0..n {
                if poly[d] == 0 {
                    continue;
                }
                if d + 1 < n {
                    next[d + 1] = self.add(next[d + 1], poly[d]);
                }
                let t = self.mul(poly[d], xs[i]);
                next[d] = self.sub(next[d], t);
            }
            next[0] = self.add(next[0], coef[i]);
            poly = next;
        }
        poly
    }

    /// Interpolation through the points `0, 1, …, ys.len() − 1`.
    pub fn interpolate_at_integers(&self, ys: &[u64]) -> Vec<u64> {
        let n = ys.len();
        let mut inv = vec![0u64; n.max(2)];
        inv[1] = 1 % self.p;
        for i in 2..n {
            // inv(i) = -(p / i) * inv(p mod i)
            let q = self.p / i as u64;
            inv[i] = self.neg(self.mul(q % self.p, inv[(self.p % i as u64) as usize]));
        }
        let mut coef = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = self.sub(coef[i], coef[i - 1]);
                coef[i] = self.mul(num, inv[j]);
            }
        }
        let mut poly = vec![0u64; n];
        for i in (0..n).rev() {
            let x = i as u64 % self.p;
            for d in (0..n).rev() {
                // poly = poly * (x - i) + coef[i], in place from the top
                let lower = if d > 0 { poly[d - 1] } else { 0 };
                let t = self.mul(poly[d], x);
                poly[d] = self.sub(lower, t);
            }
            poly[0] = self.add(poly[0], coef[i]);
        }
        poly
    }

    /// Checks that `degree + 1` distinct evaluation points exist.
    pub fn check_degree(&self, degree: usize) -> Result<()> {
        if degree as u64 + 1 >= self.p {
            return Err(Error::ModulusTooSmall { modulus: self.p, degree });
        }
        Ok(())
    }
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let f = Field::new(n);
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = f.pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = f.mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primality() {
        assert!(is_prime(DEFAULT_MODULUS));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime(221));
        assert!(!is_prime((1 << 61) + 1));
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let f = Field::new(DEFAULT_MODULUS);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 4, 6, 8] {
            for _ in 0..20 {
                let mut a = vec![vec![0u64; n]; n];
                for i in 0..n {
                    for j in i + 1..n {
                        // sparse-ish so that zero pivots occur
                        let v = if rng.gen_bool(0.6) { f.random_nonzero(&mut rng) } else { 0 };
                        a[i][j] = v;
                        a[j][i] = f.neg(v);
                    }
                }
                let pf = f.pfaffian(a.clone());
                assert_eq!(f.mul(pf, pf), f.determinant(a));
            }
        }
    }

    #[test]
    fn small_pfaffians() {
        let f = Field::new(101);
        assert_eq!(f.pfaffian(vec![vec![0, 7], vec![f.neg(7), 0]]), 7);
        // Pf of 4x4 = a12 a34 - a13 a24 + a14 a23
        let (a12, a13, a14, a23, a24, a34) = (2u64, 3, 5, 7, 11, 13);
        let m = vec![
            vec![0, a12, a13, a14],
            vec![f.neg(a12), 0, a23, a24],
            vec![f.neg(a13), f.neg(a23), 0, a34],
            vec![f.neg(a14), f.neg(a24), f.neg(a34), 0],
        ];
        let expected = (a12 * a34 + a14 * a23 + 101 - (a13 * a24) % 101) % 101;
        assert_eq!(f.pfaffian(m), expected);
        assert_eq!(f.pfaffian(vec![vec![0; 3]; 3]), 0);
    }

    #[test]
    fn interpolation_recovers_coefficients() {
        let f = Field::new(DEFAULT_MODULUS);
        let poly = [5u64, 0, 3, 0, 0, 9, 1];
        let xs: Vec<u64> = (0..poly.len() as u64).collect();
        let ys: Vec<u64> = xs
            .iter()
            .map(|&x| poly.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c)))
            .collect();
        assert_eq!(f.interpolate(&xs, &ys), poly.to_vec());
        assert_eq!(f.interpolate_at_integers(&ys), poly.to_vec());
        let small = Field::new(1009);
        let ys: Vec<u64> = (0..7u64).map(|x| (3 * x * x * x + 2 * x + 11) % 1009).collect();
        assert_eq!(small.interpolate_at_integers(&ys), vec![11, 2, 0, 3, 0, 0, 0]);
    }

    #[test]
    fn config_validation() {
        assert!(FieldConfig::new(100, 0, 1).is_err());
        assert!(FieldConfig::new(101, 0, 0).is_err());
        assert!(FieldConfig::new(101, 0, 3).is_ok());
        assert_eq!(FieldConfig::amplified_repeats(3.0, 3, 8), 10);
        assert!(Field::new(7).check_degree(6).is_err());
        assert!(Field::new(7).check_degree(5).is_ok());
    }
}

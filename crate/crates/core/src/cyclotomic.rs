//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! Elements are stored as rational coefficient vectors over the power basis
//! `1, zeta, ..., zeta^{phi(m)-1}`, reduced modulo the m-th cyclotomic
//! polynomial. The reduction is canonical, so equality is coefficient
//! equality. The scalar type of the rational coefficients is generic over
//! the `num-traits` integer machinery; the crate root pins the default
//! alias [`crate::Cyc`] to `BigInt` coefficients.

use std::fmt;

use num_rational::Ratio;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Integer scalar usable as the coefficient backbone of a cyclotomic field
/// element (`i64`, `i128` and `BigInt` all qualify).
pub trait CycInt:
    num_integer::Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug
{
}

impl<T> CycInt for T where
    T: num_integer::Integer + Signed + Clone + FromPrimitive + ToPrimitive + fmt::Debug
{
}

/// Euler totient by trial-division factorization.
pub fn euler_phi(m: u32) -> u32 {
    let mut n = m;
    let mut phi = m;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            phi = phi / p * (p - 1);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        phi = phi / n * (n - 1);
    }
    phi
}

/// Units modulo `m`: `{u | 1 <= u <= m, gcd(u, m) = 1}`, ascending.
pub fn units_mod(m: u32) -> Vec<u32> {
    (1..=m).filter(|&u| num_integer::gcd(u, m) == 1).collect()
}

/// Coefficients of the m-th cyclotomic polynomial, ascending degree, monic.
/// Computed by dividing `x^m - 1` by the product of the lower `Phi_d`.
pub fn cyclotomic_polynomial(m: u32) -> Vec<i64> {
    fn divide_exact(num: &mut Vec<i64>, den: &[i64]) {
        // den is monic; exact division in Z[x]
        let mut quo = vec![0i64; num.len() - den.len() + 1];
        for i in (0..quo.len()).rev() {
            let c = num[i + den.len() - 1];
            quo[i] = c;
            if c != 0 {
                for (j, &d) in den.iter().enumerate() {
                    num[i + j] -= c * d;
                }
            }
        }
        debug_assert!(num.iter().all(|&c| c == 0));
        *num = quo;
    }
    let mut phi: Vec<Vec<i64>> = vec![Vec::new(); m as usize + 1];
    for d in 1..=m {
        if !m.is_multiple_of(d) {
            continue;
        }
        let mut poly = vec![0i64; d as usize + 1];
        poly[0] = -1;
        poly[d as usize] = 1; // x^d - 1
        for e in 1..d {
            if d.is_multiple_of(e) {
                divide_exact(&mut poly, &phi[e as usize]);
            }
        }
        phi[d as usize] = poly;
    }
    phi[m as usize].clone()
}

/// Exact element of the m-th cyclotomic field.
#[derive(Clone, Debug)]
pub struct Cyclotomic<T: CycInt> {
    m: u32,
    coeffs: Vec<Ratio<T>>,
}

impl<T: CycInt> Cyclotomic<T> {
    fn ratio_i64(v: i64) -> Ratio<T> {
        Ratio::from_integer(T::from_i64(v).expect("scalar holds small integers"))
    }

    /// Reduce a raw coefficient vector (any length) modulo `Phi_m`.
    fn reduce(m: u32, mut raw: Vec<Ratio<T>>) -> Cyclotomic<T> {
        let phi = cyclotomic_polynomial(m);
        let deg = phi.len() - 1;
        if raw.len() > deg {
            // long division by the monic Phi_m: kill leading terms
            for i in (deg..raw.len()).rev() {
                let c = raw[i].clone();
                if c.is_zero() {
                    continue;
                }
                for (j, &pc) in phi.iter().enumerate() {
                    let idx = i + j - deg;
                    let sub = c.clone() * Self::ratio_i64(pc);
                    raw[idx] = raw[idx].clone() - sub;
                }
            }
        }
        raw.truncate(deg);
        raw.resize(deg, Ratio::zero());
        Cyclotomic { m, coeffs: raw }
    }

    pub fn zero(m: u32) -> Cyclotomic<T> {
        Cyclotomic::reduce(m, Vec::new())
    }

    pub fn one(m: u32) -> Cyclotomic<T> {
        Cyclotomic::from_rational(m, Ratio::one())
    }

    pub fn from_rational(m: u32, q: Ratio<T>) -> Cyclotomic<T> {
        Cyclotomic::reduce(m, vec![q])
    }

    /// `zeta_m^k`.
    pub fn root_of_unity(m: u32, k: u32) -> Cyclotomic<T> {
        let k = (k % m) as usize;
        let mut raw = vec![Ratio::zero(); k + 1];
        raw[k] = Ratio::one();
        Cyclotomic::reduce(m, raw)
    }

    pub fn conductor(&self) -> u32 {
        self.m
    }

    /// Reduced coefficients over the power basis, length `phi(m)`.
    pub fn coeffs(&self) -> &[Ratio<T>] {
        &self.coeffs
    }

    /// Rewrite in the field of conductor `big` (requires `m | big`).
    pub fn lift(&self, big: u32) -> Cyclotomic<T> {
        assert!(
            big.is_multiple_of(self.m),
            "can only lift into a multiple conductor"
        );
        let scale = (big / self.m) as usize;
        let mut raw = vec![Ratio::zero(); self.coeffs.len() * scale + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            raw[k * scale] = c.clone();
        }
        Cyclotomic::reduce(big, raw)
    }

    fn common(&self, other: &Cyclotomic<T>) -> (Cyclotomic<T>, Cyclotomic<T>) {
        if self.m == other.m {
            (self.clone(), other.clone())
        } else {
            let m = num_integer::lcm(self.m, other.m);
            (self.lift(m), other.lift(m))
        }
    }

    pub fn add(&self, other: &Cyclotomic<T>) -> Cyclotomic<T> {
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.clone() + y.clone();
        }
        a
    }

    pub fn sub(&self, other: &Cyclotomic<T>) -> Cyclotomic<T> {
        let (mut a, b) = self.common(other);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x = x.clone() - y.clone();
        }
        a
    }

    pub fn neg(&self) -> Cyclotomic<T> {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn mul(&self, other: &Cyclotomic<T>) -> Cyclotomic<T> {
        let (a, b) = self.common(other);
        let mut raw = vec![Ratio::zero(); a.coeffs.len() + b.coeffs.len()];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[i + j] = raw[i + j].clone() + x.clone() * y.clone();
            }
        }
        Cyclotomic::reduce(a.m, raw)
    }

    pub fn scale(&self, q: &Ratio<T>) -> Cyclotomic<T> {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = c.clone() * q.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// `(self, Phi_m)` over `Q[x]`; `None` for zero.
    pub fn inv(&self) -> Option<Cyclotomic<T>> {
        if self.is_zero() {
            return None;
        }
        let phi: Vec<Ratio<T>> = cyclotomic_polynomial(self.m)
            .into_iter()
            .map(Self::ratio_i64)
            .collect();
        // maintain r0 = phi, r1 = self with s-coefficients tracking self
        let mut r0 = phi;
        let mut r1 = self.coeffs.clone();
        trim(&mut r1);
        let mut s0: Vec<Ratio<T>> = vec![];
        let mut s1: Vec<Ratio<T>> = vec![Ratio::one()];
        while !r1.is_empty() {
            let (q, rem) = poly_divmod(&r0, &r1);
            let s_next = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_next;
        }
        // r0 is the (degree-0) gcd since Phi_m is irreducible over Q
        debug_assert_eq!(r0.len(), 1);
        let g = r0[0].clone();
        let inv_coeffs: Vec<Ratio<T>> = s0.iter().map(|c| c.clone() / g.clone()).collect();
        Some(Cyclotomic::reduce(self.m, inv_coeffs))
    }

    /// Galois conjugation `zeta -> zeta^{-1}` (complex conjugation).
    pub fn conjugate(&self) -> Cyclotomic<T> {
        let m = self.m as usize;
        let mut raw = vec![Ratio::zero(); m];
        for (k, c) in self.coeffs.iter().enumerate() {
            let idx = (m - k) % m;
            raw[idx] = raw[idx].clone() + c.clone();
        }
        Cyclotomic::reduce(self.m, raw)
    }

    /// Exact real part `(z + conj(z)) / 2` as a cyclotomic number.
    pub fn real_part(&self) -> Cyclotomic<T> {
        self.add(&self.conjugate())
            .scale(&Ratio::new(T::one(), T::from_u8(2).unwrap()))
    }

    /// The rational value, when the element is rational.
    pub fn to_rational(&self) -> Option<Ratio<T>> {
        if self.coeffs.iter().skip(1).any(|c| !c.is_zero()) {
            return None;
        }
        Some(self.coeffs.first().cloned().unwrap_or_else(Ratio::zero))
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_some()
    }

    /// Embed into floating complex arithmetic with `zeta_m = e^(2 pi i / m)`.
    /// Only used by self-checks; every result in the crate stays exact.
    pub fn eval_f64(&self) -> (f64, f64) {
        let theta = 2.0 * std::f64::consts::PI / f64::from(self.m);
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for (k, c) in self.coeffs.iter().enumerate() {
            let num = c.numer().to_f64().expect("coefficient fits f64");
            let den = c.denom().to_f64().expect("coefficient fits f64");
            let v = num / den;
            let ang = theta * k as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        (re, im)
    }
}

impl<T: CycInt> PartialEq for Cyclotomic<T> {
    fn eq(&self, other: &Self) -> bool {
        if self.m == other.m {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}

impl<T: CycInt> Eq for Cyclotomic<T> {}

impl<T: CycInt> fmt::Display for Cyclotomic<T>
where
    T: fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*z{}^{k}", self.m)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

fn trim<T: CycInt>(p: &mut Vec<Ratio<T>>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_sub<T: CycInt>(a: &[Ratio<T>], b: &[Ratio<T>]) -> Vec<Ratio<T>> {
    let mut out = vec![Ratio::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] = c.clone();
    }
    for (i, c) in b.iter().enumerate() {
        out[i] = out[i].clone() - c.clone();
    }
    trim(&mut out);
    out
}

fn poly_mul<T: CycInt>(a: &[Ratio<T>], b: &[Ratio<T>]) -> Vec<Ratio<T>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Ratio::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    trim(&mut out);
    out
}

/// Division with remainder over `Q[x]`; divisor need not be monic.
fn poly_divmod<T: CycInt>(num: &[Ratio<T>], den: &[Ratio<T>]) -> (Vec<Ratio<T>>, Vec<Ratio<T>>) {
    let mut rem: Vec<Ratio<T>> = num.to_vec();
    trim(&mut rem);
    let dd = den.len() - 1;
    let lead = den.last().expect("nonzero divisor").clone();
    if rem.len() <= dd {
        return (Vec::new(), rem);
    }
    let mut quo = vec![Ratio::zero(); rem.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = rem[i + dd].clone() / lead.clone();
        if !c.is_zero() {
            quo[i] = c.clone();
            for (j, d) in den.iter().enumerate() {
                rem[i + j] = rem[i + j].clone() - c.clone() * d.clone();
            }
        }
    }
    trim(&mut rem);
    trim(&mut quo);
    (quo, rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type C = Cyclotomic<BigInt>;

    #[test]
    fn phi_values() {
        for (m, phi) in [
            (1, 1),
            (2, 1),
            (3, 2),
            (4, 2),
            (5, 4),
            (6, 2),
            (7, 6),
            (11, 10),
            (12, 4),
        ] {
            assert_eq!(euler_phi(m), phi, "phi({m})");
            assert_eq!(cyclotomic_polynomial(m).len() as u32 - 1, phi);
        }
    }

    #[test]
    fn known_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(7), vec![1; 7]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_multiply() {
        for m in [2u32, 3, 4, 5, 6, 7, 11] {
            let z = C::root_of_unity(m, 1);
            let mut acc = C::one(m);
            for _ in 0..m {
                acc = acc.mul(&z);
            }
            assert_eq!(acc, C::one(m), "zeta_{m}^{m} = 1");
            // primitive: no smaller power hits 1
            let mut acc = C::one(m);
            for k in 1..m {
                acc = acc.mul(&z);
                assert_ne!(acc, C::one(m), "zeta_{m}^{k} != 1");
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for m in [2u32, 3, 5, 7, 11] {
            for k in 1..m {
                let z = C::root_of_unity(m, k);
                let one_minus = C::one(m).sub(&z);
                let inv = one_minus.inv().expect("1 - zeta^k is nonzero");
                assert_eq!(one_minus.mul(&inv), C::one(m));
            }
        }
        assert!(C::zero(7).inv().is_none());
    }

    #[test]
    fn real_part_of_root_fraction() {
        // Re(zeta^u / (1 - zeta^u)) = -1/2 for every root of unity != 1
        for m in [2u32, 3, 4, 5, 6, 7, 11] {
            for u in units_mod(m) {
                if u == m {
                    continue;
                }
                let z = C::root_of_unity(m, u);
                let frac = z.mul(&C::one(m).sub(&z).inv().unwrap());
                let re = frac.real_part();
                assert_eq!(
                    re.to_rational(),
                    Some(Ratio::new(BigInt::from(-1), BigInt::from(2))),
                    "m={m}, u={u}"
                );
            }
        }
    }

    #[test]
    fn conjugation_is_involutive() {
        let z = C::root_of_unity(7, 3);
        let w = z.add(&C::from_rational(
            7,
            Ratio::new(BigInt::from(2), BigInt::from(3)),
        ));
        assert_eq!(w.conjugate().conjugate(), w);
    }

    #[test]
    fn cross_conductor_equality() {
        // zeta_6^3 = -1 = zeta_2
        let a = C::root_of_unity(6, 3);
        let b = C::root_of_unity(2, 1);
        assert_eq!(a, b);
        let sum = C::root_of_unity(3, 1).add(&C::root_of_unity(3, 2));
        assert_eq!(
            sum,
            C::from_rational(1, Ratio::from_integer(BigInt::from(-1)))
        );
    }

    #[test]
    fn float_embedding_agrees() {
        // sampled exact computations match the f64 embedding to 1e-9
        for m in [3u32, 5, 7, 11] {
            let z = C::root_of_unity(m, 1);
            let w = z.mul(&z).add(&z.inv().unwrap());
            let (re, im) = w.eval_f64();
            let theta = 2.0 * std::f64::consts::PI / f64::from(m);
            let expect_re = (2.0 * theta).cos() + theta.cos();
            let expect_im = (2.0 * theta).sin() - theta.sin();
            assert!((re - expect_re).abs() < 1e-9, "m={m}");
            assert!((im - expect_im).abs() < 1e-9, "m={m}");
        }
    }

    #[test]
    fn ring_laws_on_sampled_elements() {
        // deterministic small elements of Q(zeta_7)
        let els: Vec<C> = (0..5)
            .map(|k| {
                C::root_of_unity(7, k).add(&C::from_rational(
                    7,
                    Ratio::new(BigInt::from(k as i64 - 2), BigInt::from(3)),
                ))
            })
            .collect();
        for a in &els {
            for b in &els {
                assert_eq!(a.add(b), b.add(a));
                assert_eq!(a.mul(b), b.mul(a));
                assert_eq!(a.conjugate().mul(&b.conjugate()), a.mul(b).conjugate());
                for c in &els {
                    assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
                    assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
                }
                if !b.is_zero() {
                    let q = a.mul(&b.inv().unwrap());
                    assert_eq!(q.mul(b), *a);
                }
            }
        }
    }

    #[test]
    fn i64_backed_scalars_work_too() {
        let z: Cyclotomic<i64> = Cyclotomic::root_of_unity(11, 4);
        assert_eq!(z.mul(&z.conjugate()), Cyclotomic::one(11));
        let inv = z.inv().unwrap();
        assert_eq!(z.mul(&inv), Cyclotomic::one(11));
    }
}

use std::fmt;

use super::gaussian::GaussianRational;
use super::poly::Polynomial;

type G = GaussianRational;

/// Dense univariate polynomial, coefficients from degree 0 upwards.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    c: Vec<G>,
}

impl UPoly {
    pub fn new(mut c: Vec<G>) -> Self {
        while c.last().map(|x| x.is_zero()).unwrap_or(false) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: G) -> Self {
        Self::new(vec![a])
    }

    pub fn one() -> Self {
        Self::constant(G::one())
    }

    /// `x - a`.
    pub fn linear(a: &G) -> Self {
        Self::new(vec![-a, G::one()])
    }

    pub fn coeffs(&self) -> &[G] {
        &self.c
    }

    pub fn coeff(&self, k: usize) -> G {
        self.c.get(k).cloned().unwrap_or_else(G::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> G {
        self.c.last().cloned().unwrap_or_else(G::zero)
    }

    pub fn from_polynomial(p: &Polynomial, var: &str) -> Option<Self> {
        let mut c = vec![G::zero(); p.degree_in(var) as usize + 1];
        for (m, k) in p.terms() {
            match m.as_slice() {
                [] => c[0] += k,
                [(v, e)] if v == var => c[*e as usize] += k,
                _ => return None,
            }
        }
        Some(Self::new(c))
    }

    pub fn to_polynomial(&self, var: &str) -> Polynomial {
        Polynomial::from_terms(self.c.iter().enumerate().map(|(k, a)| {
            let m = if k == 0 { vec![] } else { vec![(var.to_string(), k as u32)] };
            (m, a.clone())
        }))
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| &self.coeff(k) + &o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|k| &self.coeff(k) - &o.coeff(k)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![G::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += &(a * b);
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, a: &G) -> UPoly {
        Self::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return Self::zero();
        }
        self.scale(&self.lc().inv().expect("nonzero"))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.degree();
        let inv = d.lc().inv().expect("nonzero");
        if r.len() < d.c.len() {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![G::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let t = &r[k + dd] * &inv;
            if !t.is_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[k + j] -= &(&t * b);
                }
            }
            q[k] = t;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g = gcd`.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = r1;
            r1 = r;
            let s = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = s;
            let t = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = t;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv().expect("nonzero");
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Inverse of `self` modulo `m`, if coprime.
    pub fn inv_mod(&self, m: &UPoly) -> Option<UPoly> {
        let (g, s, _) = self.rem(m).ext_gcd(m);
        if g.degree() == 0 && !g.is_zero() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn derivative(&self) -> UPoly {
        Self::new(self.c.iter().enumerate().skip(1).map(|(k, a)| a * &G::from_int(k as i64)).collect())
    }

    pub fn eval(&self, x: &G) -> G {
        let mut acc = G::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    pub fn eval_c64(&self, x: num_complex::Complex64) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for a in self.c.iter().rev() {
            acc = acc * x + a.to_complex();
        }
        acc
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: &G) -> UPoly {
        let mut acc = Self::zero();
        let lin = Self::new(vec![a.clone(), G::one()]);
        for c in self.c.iter().rev() {
            acc = acc.mul(&lin).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_part(&self) -> UPoly {
        if self.degree() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Multiplicity of the root `a` (0 if not a root).
    pub fn root_multiplicity(&self, a: &G) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let lin = Self::linear(a);
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.divrem(&lin);
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Trace of multiplication by `self` on `Q(i)[x]/(m)`.
    pub fn trace_mod(&self, m: &UPoly) -> G {
        let d = m.degree();
        let mut acc = G::zero();
        let base = self.rem(m);
        let mut xk = Self::one();
        let x = Self::new(vec![G::zero(), G::one()]);
        for k in 0..d {
            acc += &base.mul(&xk).rem(m).coeff(k);
            xk = xk.mul(&x).rem(m);
        }
        acc
    }
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_polynomial("t"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&k| G::from_int(k)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = up(&[-1, 0, 1]); // x^2 - 1
        let b = up(&[-1, 1]); // x - 1
        let (q, r) = a.divrem(&b);
        assert_eq!(q, up(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&up(&[1, 1])), up(&[1, 1]));
    }

    #[test]
    fn trace_of_identity_is_degree() {
        let m = up(&[-2, 0, 1]);
        assert_eq!(UPoly::one().trace_mod(&m), G::from_int(2));
        assert_eq!(up(&[0, 1]).trace_mod(&m), G::zero());
    }

    #[test]
    fn inverse_mod() {
        let m = up(&[-2, 0, 1]);
        let two_x = up(&[0, 2]);
        let inv = two_x.inv_mod(&m).unwrap();
        assert_eq!(inv, UPoly::new(vec![G::zero(), G::from_ratio(1, 4)]));
    }

    #[test]
    fn shift_and_multiplicity() {
        let p = up(&[0, 0, 1]).mul(&up(&[-3, 1]));
        assert_eq!(p.root_multiplicity(&G::zero()), 2);
        assert_eq!(p.root_multiplicity(&G::from_int(3)), 1);
        assert_eq!(p.shift(&G::from_int(3)).coeff(0), G::zero());
        assert_eq!(p.squarefree_part(), up(&[0, -3, 1]));
    }
}

use std::collections::BTreeMap;
use std::fmt;

use super::poly::Polynomial;
use super::rational::RationalFunction;
use crate::error::{Error, Result};

/// Element of `O_M / I_S^k`: a polynomial of degree `< k` in the normal
/// variables with rational-function coefficients in the tangential ones.
#[derive(Clone, PartialEq, Eq)]
pub struct NormalJet {
    normal: Vec<String>,
    order: u32,
    coeffs: BTreeMap<Vec<u32>, RationalFunction>,
}

fn deg(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl NormalJet {
    pub fn zero(normal: &[String], order: u32) -> Self {
        NormalJet { normal: normal.to_vec(), order, coeffs: BTreeMap::new() }
    }

    pub fn one(normal: &[String], order: u32) -> Self {
        let mut j = Self::zero(normal, order);
        j.set(vec![0; normal.len()], RationalFunction::one());
        j
    }

    pub fn normal_vars(&self) -> &[String] {
        &self.normal
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<u32>, RationalFunction> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> RationalFunction {
        self.coeffs.get(e).cloned().unwrap_or_default()
    }

    fn set(&mut self, e: Vec<u32>, c: RationalFunction) {
        if deg(&e) >= self.order || c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    fn accumulate(&mut self, e: Vec<u32>, c: &RationalFunction) {
        if deg(&e) >= self.order || c.is_zero() {
            return;
        }
        let cur = self.coeff(&e);
        self.set(e, &cur + c);
    }

    /// Restriction to S (the degree-zero coefficient).
    pub fn constant_part(&self) -> RationalFunction {
        self.coeff(&vec![0; self.normal.len()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn from_poly(p: &Polynomial, normal: &[String], order: u32) -> Self {
        let mut j = Self::zero(normal, order);
        for (e, c) in p.split_by(normal) {
            j.accumulate(e, &RationalFunction::from_poly(c));
        }
        j
    }

    /// Taylor expansion in the normal block to degree `< k`.
    pub fn project(p: &RationalFunction, normal: &[String], k: u32) -> Result<Self> {
        let n = Self::from_poly(p.num(), normal, k);
        if p.den().is_one() {
            return Ok(n);
        }
        let d = Self::from_poly(p.den(), normal, k);
        if d.constant_part().is_zero() {
            return Err(Error::NotRegular(format!("denominator {} vanishes on S", p.den())));
        }
        Ok(n.mul(&d.invert()?))
    }

    pub fn add(&self, o: &NormalJet) -> NormalJet {
        let mut out = self.clone();
        for (e, c) in &o.coeffs {
            out.accumulate(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &NormalJet) -> NormalJet {
        self.add(&o.scale(&RationalFunction::from_int(-1)))
    }

    pub fn scale(&self, c: &RationalFunction) -> NormalJet {
        let mut out = Self::zero(&self.normal, self.order);
        for (e, v) in &self.coeffs {
            out.set(e.clone(), v * c);
        }
        out
    }

    /// Product truncated at the smaller of the two orders.
    pub fn mul(&self, o: &NormalJet) -> NormalJet {
        let order = self.order.min(o.order);
        let mut out = Self::zero(&self.normal, order);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &o.coeffs {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                if deg(&e) < order {
                    out.accumulate(e, &(c1 * c2));
                }
            }
        }
        out
    }

    /// Inverse modulo `I^k`; requires a nonzero restriction to S.
    pub fn invert(&self) -> Result<NormalJet> {
        let j0 = self.constant_part();
        if j0.is_zero() {
            return Err(Error::NotUnit);
        }
        let inv0 = j0.inv()?;
        let mut h = self.clone();
        h.set(vec![0; self.normal.len()], RationalFunction::zero());
        let w = h.scale(&-&inv0);
        let one = Self::one(&self.normal, self.order);
        let mut s = one.clone();
        for _ in 1..self.order {
            s = one.add(&w.mul(&s));
        }
        Ok(s.scale(&inv0))
    }

    pub fn truncate(&self, k: u32) -> NormalJet {
        let mut out = Self::zero(&self.normal, k.min(self.order));
        for (e, c) in &self.coeffs {
            out.set(e.clone(), c.clone());
        }
        out
    }

    /// Lowest normal degree present; `None` for the zero jet.
    pub fn ideal_order(&self) -> Option<u32> {
        self.coeffs.keys().map(|e| deg(e)).min()
    }

    pub fn to_rational(&self) -> RationalFunction {
        let mut acc = RationalFunction::zero();
        for (e, c) in &self.coeffs {
            let mono: Vec<(String, u32)> =
                self.normal.iter().cloned().zip(e.iter().copied()).filter(|(_, k)| *k > 0).collect();
            let m = RationalFunction::from_poly(Polynomial::monomial(mono, super::GaussianRational::one()));
            acc = &acc + &(&m * c);
        }
        acc
    }
}

impl fmt::Debug for NormalJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]_{}", self.to_rational(), self.order)
    }
}

pub fn jet_project(p: &RationalFunction, normal: &[String], k: u32) -> Result<NormalJet> {
    NormalJet::project(p, normal, k)
}

pub fn jet_mul(a: &NormalJet, b: &NormalJet) -> NormalJet {
    a.mul(b)
}

pub fn jet_invert(j: &NormalJet) -> Result<NormalJet> {
    j.invert()
}

pub fn ideal_order(p: &RationalFunction, normal: &[String]) -> Result<Option<u32>> {
    p.ideal_order(normal)
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gaussian::GaussianRational;
use super::poly::{gcd, Polynomial};
use crate::error::{Error, Result};

/// `num / den` with `gcd(num, den) = 1` and `den` monic in lexicographic order.
/// Two equal rational functions have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv().expect("nonzero denominator");
            return RationalFunction { num: num.scale(&inv), den: Polynomial::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        let lc = den.leading_coeff();
        let inv = lc.inv().expect("nonzero leading coefficient");
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    /// Scales an already coprime pair so the denominator is monic.
    fn monic_den(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let inv = den.leading_coeff().inv().expect("nonzero leading coefficient");
        RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(n))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn var(name: &str) -> Self {
        Self::from_poly(Polynomial::var(name))
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut v = self.num.variables();
        v.extend(self.den.variables());
        v
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &RationalFunction) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(&self.num * &o.den, &self.den * &o.num))
    }

    pub fn pow(&self, e: u32) -> Self {
        RationalFunction { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Formal partial derivative by the quotient rule.
    pub fn derivative(&self, var: &str) -> Self {
        let dn = self.num.derivative(var);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.derivative(var);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone());
        }
        // with g = gcd(d, d'), only factors of g can cancel against d * (d / g)
        let g = gcd(&self.den, &dd);
        let q = self.den.div_exact(&g).expect("gcd divides");
        let num = &(&dn * &q) - &(&self.num * &dd.div_exact(&g).expect("gcd divides"));
        if g.is_one() {
            return Self::monic_den(num, &self.den * &q);
        }
        Self::normalized(num, &self.den * &q)
    }

    /// Derivative that rejects variables not in `scope`.
    pub fn differentiate(&self, var: &str, scope: &[String]) -> Result<Self> {
        if !scope.iter().any(|v| v == var) {
            return Err(Error::UnknownVariable(var.to_string()));
        }
        Ok(self.derivative(var))
    }

    /// Composition; variables absent from `map` are kept.
    pub fn substitute(&self, map: &BTreeMap<String, RationalFunction>) -> Result<Self> {
        let vars = self.variables();
        if !vars.iter().any(|v| map.contains_key(v)) {
            return Ok(self.clone());
        }
        let all_poly = vars.iter().filter_map(|v| map.get(v)).all(|r| r.den.is_one());
        if all_poly {
            let pm: BTreeMap<String, Polynomial> =
                map.iter().filter(|(k, _)| vars.contains(*k)).map(|(k, v)| (k.clone(), v.num.clone())).collect();
            let n = self.num.compose(&pm);
            let d = self.den.compose(&pm);
            if d.is_zero() {
                return Err(Error::PoleEverywhere);
            }
            return Ok(Self::normalized(n, d));
        }
        let (n, dn) = homogenized(&self.num, map);
        let (d, dd) = homogenized(&self.den, map);
        if d.is_zero() {
            return Err(Error::PoleEverywhere);
        }
        let mut num = n;
        let mut den = d;
        for (v, r) in map {
            let a = dd.get(v).copied().unwrap_or(0) as i64;
            let b = dn.get(v).copied().unwrap_or(0) as i64;
            if a > b {
                num = &num * &r.den.pow((a - b) as u32);
            } else if b > a {
                den = &den * &r.den.pow((b - a) as u32);
            }
        }
        Ok(Self::normalized(num, den))
    }

    /// Set the given variables to zero.
    pub fn restrict_zero(&self, vars: &[String]) -> Result<Self> {
        let point: BTreeMap<String, GaussianRational> =
            vars.iter().map(|v| (v.clone(), GaussianRational::zero())).collect();
        self.eval_partial(&point)
    }

    pub fn eval_partial(&self, point: &BTreeMap<String, GaussianRational>) -> Result<Self> {
        let d = self.den.eval_partial(point);
        if d.is_zero() {
            return Err(Error::NotRegular(format!("denominator {} vanishes", self.den)));
        }
        Ok(Self::normalized(self.num.eval_partial(point), d))
    }

    pub fn eval(&self, point: &BTreeMap<String, GaussianRational>) -> Result<GaussianRational> {
        let r = self.eval_partial(point)?;
        r.as_constant().ok_or_else(|| Error::UnknownVariable(format!("{:?}", r.variables())))
    }

    pub fn eval_c64(&self, point: &BTreeMap<String, num_complex::Complex64>) -> num_complex::Complex64 {
        self.num.eval_c64(point) / self.den.eval_c64(point)
    }

    /// Largest `mu` with `self` in `(normal)^mu`; `None` means infinity (zero).
    pub fn ideal_order(&self, normal: &[String]) -> Result<Option<u32>> {
        if self.is_zero() {
            return Ok(None);
        }
        let d0 = self.den.eval_partial(&zero_point(normal));
        if d0.is_zero() {
            return Err(Error::NotRegular(format!("denominator {} vanishes on S", self.den)));
        }
        Ok(self.num.min_degree_in(normal))
    }

    pub fn in_ideal_power(&self, normal: &[String], k: u32) -> Result<bool> {
        Ok(match self.ideal_order(normal)? {
            None => true,
            Some(o) => o >= k,
        })
    }

    pub fn to_expr_string(&self) -> String {
        if self.den.is_one() {
            return self.num.to_expr_string();
        }
        let n = if self.num.num_terms() > 1 {
            format!("({})", self.num.to_expr_string())
        } else {
            self.num.to_expr_string()
        };
        let d = if self.den.is_var_power() {
            self.den.to_expr_string()
        } else {
            format!("({})", self.den.to_expr_string())
        };
        format!("{}/{}", n, d)
    }
}

pub fn zero_point(vars: &[String]) -> BTreeMap<String, GaussianRational> {
    vars.iter().map(|v| (v.clone(), GaussianRational::zero())).collect()
}

/// `p(N/D)` written as `P / prod D_v^{deg_v p}`; returns `P` and the degrees.
fn homogenized(p: &Polynomial, map: &BTreeMap<String, RationalFunction>) -> (Polynomial, BTreeMap<String, u32>) {
    let degs: BTreeMap<String, u32> = map.keys().map(|v| (v.clone(), p.degree_in(v))).collect();
    let mut out = Polynomial::zero();
    for (m, c) in p.terms() {
        let mut t = Polynomial::constant(c.clone());
        let mut kept = Vec::new();
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        for (v, e) in m {
            match map.get(v) {
                Some(r) => {
                    seen.insert(v.as_str());
                    let d = degs[v];
                    t = &(&t * &r.num.pow(*e)) * &r.den.pow(d - e);
                }
                None => kept.push((v.clone(), *e)),
            }
        }
        for (v, r) in map {
            if !seen.contains(v.as_str()) {
                let d = degs[v];
                if d > 0 {
                    t = &t * &r.den.pow(d);
                }
            }
        }
        if !kept.is_empty() {
            t = t.mul_monomial(&kept, &GaussianRational::one());
        }
        out = &out + &t;
    }
    (out, degs)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.den == o.den {
            return RationalFunction::normalized(&self.num + &o.num, self.den.clone());
        }
        // only factors of gcd(d1, d2) can cancel
        let g = gcd(&self.den, &o.den);
        let (d1, d2) = (self.den.div_exact(&g).expect("gcd divides"), o.den.div_exact(&g).expect("gcd divides"));
        let num = &(&self.num * &d2) + &(&o.num * &d1);
        if g.is_one() {
            return RationalFunction::monic_den(num, &d1 * &d2);
        }
        let h = gcd(&num, &g);
        let num = num.div_exact(&h).expect("gcd divides");
        let den = &(&d1 * &d2) * &g.div_exact(&h).expect("gcd divides");
        RationalFunction::monic_den(num, den)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RationalFunction::from_poly(&self.num * &o.num);
        }
        let (g1, g2) = (gcd(&self.num, &o.den), gcd(&o.num, &self.den));
        let q = |p: &Polynomial, g: &Polynomial| p.div_exact(g).expect("gcd divides");
        RationalFunction::monic_den(&q(&self.num, &g1) * &q(&o.num, &g2), &q(&self.den, &g2) * &q(&o.den, &g1))
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

macro_rules! forward_owned_rf {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned_rf!(Add, add);
forward_owned_rf!(Sub, sub);
forward_owned_rf!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> RationalFunction {
        RationalFunction::var(n)
    }
    fn c(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }

    #[test]
    fn quotient_rule() {
        // d/dy x/(1-xy) = x^2/(1-xy)^2
        let one_m = &c(1) - &(&v("x") * &v("y"));
        let f = v("x").checked_div(&one_m).unwrap();
        let expect = (&v("x") * &v("x")).checked_div(&(&one_m * &one_m)).unwrap();
        assert_eq!(f.derivative("y"), expect);
    }

    #[test]
    fn differentiate_rejects_unknown() {
        let scope = vec!["x".to_string()];
        assert_eq!(v("x").differentiate("q", &scope), Err(Error::UnknownVariable("q".into())));
        assert!(c(7).differentiate("x", &scope).unwrap().is_zero());
    }

    #[test]
    fn cancellation() {
        let a = &(&v("x") * &v("x")) - &c(1);
        let b = &v("x") - &c(1);
        let r = a.checked_div(&b).unwrap();
        assert_eq!(r, &v("x") + &c(1));
        assert!(r.is_polynomial());
    }

    #[test]
    fn substitution_examples() {
        let mut m = BTreeMap::new();
        m.insert("x".to_string(), &v("u") + &v("w"));
        m.insert("y".to_string(), v("u"));
        let p = &(&v("x") * &v("x")) + &v("y");
        let s = &v("u") + &v("w");
        assert_eq!(p.substitute(&m).unwrap(), &(&s * &s) + &v("u"));

        let mut m = BTreeMap::new();
        m.insert("y".to_string(), c(1).checked_div(&v("w")).unwrap());
        assert_eq!(c(1).checked_div(&v("y")).unwrap().substitute(&m).unwrap(), v("w"));

        let mut m = BTreeMap::new();
        m.insert("x".to_string(), c(0));
        let f = v("x").checked_div(&(&c(1) - &(&v("x") * &v("y")))).unwrap();
        assert!(f.substitute(&m).unwrap().is_zero());
    }

    #[test]
    fn pole_everywhere() {
        let mut m = BTreeMap::new();
        m.insert("y".to_string(), v("x"));
        let f = c(1).checked_div(&(&v("y") - &v("x"))).unwrap();
        assert_eq!(f.substitute(&m), Err(Error::PoleEverywhere));
    }

    #[test]
    fn ideal_orders() {
        let n = vec!["x".to_string()];
        assert_eq!((&(&v("x") * &v("x")) * &v("y")).ideal_order(&n).unwrap(), Some(2));
        assert_eq!((&v("y") + &v("x")).ideal_order(&n).unwrap(), Some(0));
        assert_eq!(c(0).ideal_order(&n).unwrap(), None);
        let pole = c(1).checked_div(&v("x")).unwrap();
        assert!(pole.ideal_order(&n).is_err());
    }

    #[test]
    fn canonical_form() {
        let a = c(2).checked_div(&(&c(2) * &v("y"))).unwrap();
        let b = c(1).checked_div(&v("y")).unwrap();
        assert_eq!(a, b);
    }
}

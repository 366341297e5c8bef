use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gaussian::GaussianRational;

/// Sorted list of `(variable, exponent)` with positive exponents.
pub type Monomial = Vec<(String, u32)>;

/// Sparse multivariate polynomial over Q(i). Variables are named; the
/// variable set is whatever appears in the stored monomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, GaussianRational>,
}

pub fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            out.push((a[i].0.clone(), a[i].1 + b[j].1));
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sorts by variable, merges repeats and drops zero exponents.
fn canonical(m: Monomial) -> Monomial {
    if m.windows(2).all(|w| w[0].0 < w[1].0) && m.iter().all(|(_, e)| *e > 0) {
        return m;
    }
    m.into_iter().filter(|(_, e)| *e > 0).fold(Monomial::new(), |acc, f| mono_mul(&acc, &vec![f]))
}

/// `a / b` when `b` divides `a`.
pub fn mono_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let mut out = Vec::with_capacity(a.len());
    let mut j = 0;
    for (v, e) in a {
        if j < b.len() && &b[j].0 == v {
            if b[j].1 > *e {
                return None;
            }
            if *e > b[j].1 {
                out.push((v.clone(), e - b[j].1));
            }
            j += 1;
        } else {
            if j < b.len() && b[j].0 < *v {
                return None;
            }
            out.push((v.clone(), *e));
        }
    }
    if j < b.len() {
        return None;
    }
    Some(out)
}

/// Lexicographic order with variables compared alphabetically.
pub fn lex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (i < a.len(), j < b.len()) {
            (false, false) => return Ordering::Equal,
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            (true, true) => match a[i].0.cmp(&b[j].0) {
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
                Ordering::Equal => {
                    if a[i].1 != b[j].1 {
                        return a[i].1.cmp(&b[j].1);
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

pub fn mono_exp(m: &Monomial, var: &str) -> u32 {
    m.iter().find(|(v, _)| v == var).map(|(_, e)| *e).unwrap_or(0)
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(GaussianRational::one())
    }

    pub fn constant(c: GaussianRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn var(name: &str) -> Self {
        Self::monomial(vec![(name.to_string(), 1)], GaussianRational::one())
    }

    pub fn monomial(m: Monomial, c: GaussianRational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(canonical(m), c);
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, GaussianRational)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() {
            return;
        }
        let m = canonical(m);
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_empty())
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms.get(&Vec::new()).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.iter().map(|(v, _)| v.clone())).collect()
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(k, v)| (mono_mul(k, m), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn degree_in(&self, var: &str) -> u32 {
        self.terms.keys().map(|m| mono_exp(m, var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|(_, e)| e).sum()).max().unwrap_or(0)
    }

    /// Minimum total degree in the given variables over all terms; `None` for zero.
    pub fn min_degree_in(&self, vars: &[String]) -> Option<u32> {
        self.terms
            .keys()
            .map(|m| m.iter().filter(|(v, _)| vars.contains(v)).map(|(_, e)| e).sum())
            .min()
    }

    pub fn derivative(&self, var: &str) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = mono_exp(m, var);
            if e == 0 {
                continue;
            }
            let nm: Monomial = m
                .iter()
                .filter_map(|(v, k)| {
                    if v == var {
                        if *k > 1 {
                            Some((v.clone(), k - 1))
                        } else {
                            None
                        }
                    } else {
                        Some((v.clone(), *k))
                    }
                })
                .collect();
            out.add_term(nm, &(c * &GaussianRational::from_int(e as i64)));
        }
        out
    }

    /// View as a polynomial in `var` with coefficients free of `var`.
    pub fn coeffs_in(&self, var: &str) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = mono_exp(m, var);
            let rest: Monomial = m.iter().filter(|(v, _)| v != var).cloned().collect();
            out.entry(e).or_default().add_term(rest, c);
        }
        out
    }

    pub fn coeff_in(&self, var: &str, deg: u32) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if mono_exp(m, var) == deg {
                out.add_term(m.iter().filter(|(v, _)| v != var).cloned().collect(), c);
            }
        }
        out
    }

    /// Split by exponent vector in `vars`; values are free of `vars`.
    pub fn split_by(&self, vars: &[String]) -> BTreeMap<Vec<u32>, Polynomial> {
        let mut out: BTreeMap<Vec<u32>, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> = vars.iter().map(|v| mono_exp(m, v)).collect();
            let rest: Monomial = m.iter().filter(|(v, _)| !vars.contains(v)).cloned().collect();
            out.entry(key).or_default().add_term(rest, c);
        }
        out
    }

    /// Polynomial composition; variables absent from `map` are kept.
    pub fn compose(&self, map: &BTreeMap<String, Polynomial>) -> Polynomial {
        let mut cache: BTreeMap<(String, u32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(c.clone());
            let mut kept: Monomial = Vec::new();
            for (v, e) in m {
                match map.get(v) {
                    Some(p) => {
                        let key = (v.clone(), *e);
                        let pw = cache.entry(key).or_insert_with(|| p.pow(*e)).clone();
                        t = &t * &pw;
                    }
                    None => kept.push((v.clone(), *e)),
                }
            }
            if !kept.is_empty() {
                t = t.mul_monomial(&kept, &GaussianRational::one());
            }
            out = &out + &t;
        }
        out
    }

    /// Substitute constants; remaining variables are kept.
    pub fn eval_partial(&self, point: &BTreeMap<String, GaussianRational>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut kept: Monomial = Vec::new();
            for (v, e) in m {
                match point.get(v) {
                    Some(x) => coef = &coef * &x.pow(*e),
                    None => kept.push((v.clone(), *e)),
                }
            }
            out.add_term(kept, &coef);
        }
        out
    }

    /// Full evaluation; `None` if a variable has no value.
    pub fn eval(&self, point: &BTreeMap<String, GaussianRational>) -> Option<GaussianRational> {
        self.eval_partial(point).as_constant()
    }

    pub fn eval_c64(&self, point: &BTreeMap<String, num_complex::Complex64>) -> num_complex::Complex64 {
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (v, e) in m {
                let x = point.get(v).copied().unwrap_or_default();
                t *= x.powu(*e);
            }
            acc += t;
        }
        acc
    }

    /// Leading term in lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().max_by(|a, b| lex_cmp(a.0, b.0))
    }

    pub fn leading_coeff(&self) -> GaussianRational {
        self.leading_term().map(|(_, c)| c.clone()).unwrap_or_else(GaussianRational::zero)
    }

    /// Scaled so the lexicographic leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            None => Polynomial::zero(),
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// Exact quotient `self / d`, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv()?));
        }
        let (dm, dc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone()))?;
        let dci = dc.inv()?;
        let mut r = self.clone();
        let mut quo = Polynomial::zero();
        while let Some((lm, lc)) = r.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            let m = mono_div(&lm, &dm)?;
            let c = &lc * &dci;
            quo.add_term(m.clone(), &c);
            r = &r - &d.mul_monomial(&m, &c);
        }
        Some(quo)
    }

    /// Greatest common divisor, normalized monic in lexicographic order.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        gcd(self, other)
    }

    /// Formats with the expression grammar of the parser.
    pub fn to_expr_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(&Monomial, &GaussianRational)> = self.terms.iter().collect();
        terms.sort_by(|a, b| lex_cmp(b.0, a.0));
        let mut out = String::new();
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let t = term_string(m, c);
            if k == 0 {
                out.push_str(&t);
            } else if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&t);
            }
        }
        out
    }

    /// True for a single variable raised to a power (prints without parentheses).
    pub fn is_var_power(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(m, c)| m.len() == 1 && c.is_one())
    }
}

fn coeff_string(c: &GaussianRational) -> String {
    if c.is_real() {
        c.to_string()
    } else {
        format!("({})", c)
    }
}

fn term_string(m: &Monomial, c: &GaussianRational) -> String {
    if m.is_empty() {
        return coeff_string(c);
    }
    let mono: Vec<String> = m
        .iter()
        .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{}^{}", v, e) })
        .collect();
    let mono = mono.join("*");
    if c.is_one() {
        mono
    } else if c == &GaussianRational::from_int(-1) {
        format!("-{}", mono)
    } else {
        format!("{}*{}", coeff_string(c), mono)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr_string())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(mono_mul(m1, m2), &(c1 * c2));
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned_poly {
    ($tr:ident, $m:ident) => {
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: Polynomial) -> Polynomial {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned_poly!(Add, add);
forward_owned_poly!(Sub, sub);
forward_owned_poly!(Mul, mul);

/// Variable of least degree occurring in both, else any variable.
fn main_var(a: &Polynomial, b: &Polynomial) -> Option<String> {
    let (va, vb) = (a.variables(), b.variables());
    va.intersection(&vb)
        .min_by_key(|v| a.degree_in(v).max(b.degree_in(v)))
        .or_else(|| va.union(&vb).next())
        .cloned()
}

/// Content with respect to `x` (a polynomial free of `x`) and primitive part.
fn content_primitive(a: &Polynomial, x: &str) -> (Polynomial, Polynomial) {
    let mut content = Polynomial::zero();
    for c in a.coeffs_in(x).values() {
        content = gcd(&content, c);
        if content.is_one() {
            break;
        }
    }
    let prim = a.div_exact(&content).expect("content divides polynomial").monic();
    (content, prim)
}

/// `lc(g)^(deg f - deg g + 1) f mod g` in `x`.
fn prem(f: &Polynomial, g: &Polynomial, x: &str) -> Polynomial {
    let dg = g.degree_in(x);
    let lcg = g.coeff_in(x, dg);
    let mut r = f.clone();
    let mut steps = f.degree_in(x) + 1 - dg;
    while !r.is_zero() && r.degree_in(x) >= dg {
        let dr = r.degree_in(x);
        let lcr = r.coeff_in(x, dr);
        let shift = Polynomial::monomial(vec![(x.to_string(), dr - dg)], GaussianRational::one());
        r = &(&lcg * &r) - &(&(&lcr * &shift) * g);
        steps -= 1;
    }
    &lcg.pow(steps) * &r
}

/// True when univariate images prove `gcd(a, b)` constant. For each variable
/// the others are fixed at a point where the leading coefficient of `a` in
/// that variable survives, so the image gcd bounds the true degree.
fn coprime_by_images(a: &Polynomial, b: &Polynomial) -> bool {
    let mut vs = a.variables();
    vs.extend(b.variables());
    if vs.len() < 2 {
        return false;
    }
    let vs: Vec<String> = vs.into_iter().collect();
    'var: for v in &vs {
        if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
            continue;
        }
        let lc = a.coeff_in(v, a.degree_in(v));
        for shift in 0..4i64 {
            let point: BTreeMap<String, GaussianRational> = vs
                .iter()
                .enumerate()
                .filter(|(_, w)| *w != v)
                .map(|(k, w)| (w.clone(), GaussianRational::from_int(2 + 3 * k as i64 + 7 * shift)))
                .collect();
            if lc.eval_partial(&point).is_zero() {
                continue;
            }
            let (ia, ib) = (a.eval_partial(&point), b.eval_partial(&point));
            if gcd(&ia, &ib).degree_in(v) == 0 {
                continue 'var;
            }
            return false;
        }
        return false;
    }
    true
}

/// Largest monomial dividing every term.
fn monomial_content(p: &Polynomial) -> Monomial {
    let mut it = p.terms.keys();
    let mut m = it.next().cloned().unwrap_or_default();
    for t in it {
        m.retain_mut(|(v, e)| {
            *e = (*e).min(mono_exp(t, v));
            *e > 0
        });
        if m.is_empty() {
            break;
        }
    }
    m
}

fn mono_gcd(a: &Monomial, b: &Monomial) -> Monomial {
    a.iter().filter_map(|(v, e)| Some((v.clone(), (*e).min(mono_exp(b, v)))).filter(|(_, k)| *k > 0)).collect()
}

pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    if a == b {
        return a.monic();
    }
    let (ma, mb) = (monomial_content(a), monomial_content(b));
    if !ma.is_empty() || !mb.is_empty() {
        let one = GaussianRational::one();
        let m = Polynomial::monomial(mono_gcd(&ma, &mb), one.clone());
        let a = a.div_exact(&Polynomial::monomial(ma, one.clone())).expect("monomial content divides");
        let b = b.div_exact(&Polynomial::monomial(mb, one)).expect("monomial content divides");
        return &m * &gcd(&a, &b);
    }
    if coprime_by_images(a, b) {
        return Polynomial::one();
    }
    let (small, large) = if a.num_terms() <= b.num_terms() { (a, b) } else { (b, a) };
    if large.div_exact(small).is_some() {
        return small.monic();
    }
    let x = match main_var(a, b) {
        Some(x) => x,
        None => return Polynomial::one(),
    };
    let (ca, pa) = content_primitive(a, &x);
    let (cb, pb) = content_primitive(b, &x);
    let c = gcd(&ca, &cb);
    let (mut f, mut g) = if pa.degree_in(&x) >= pb.degree_in(&x) { (pa, pb) } else { (pb, pa) };
    // subresultant remainder sequence
    let (mut lead, mut h) = (Polynomial::one(), Polynomial::one());
    loop {
        if g.degree_in(&x) == 0 {
            return c.monic();
        }
        let delta = f.degree_in(&x) - g.degree_in(&x);
        let r = prem(&f, &g, &x);
        if r.is_zero() {
            break;
        }
        let scale = &lead * &h.pow(delta);
        f = g;
        g = r.div_exact(&scale).expect("subresultant division is exact");
        lead = f.coeff_in(&x, f.degree_in(&x));
        h = if delta == 0 {
            h
        } else {
            lead.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
    (&c * &content_primitive(&g, &x).1).monic()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Polynomial {
        Polynomial::var("x")
    }
    fn y() -> Polynomial {
        Polynomial::var("y")
    }
    fn c(n: i64) -> Polynomial {
        Polynomial::from_int(n)
    }

    #[test]
    fn zero_terms_are_dropped() {
        let p = &(&x() + &y()) - &x();
        assert_eq!(p, y());
        assert!((&x() - &x()).is_zero());
    }

    #[test]
    fn power_rule() {
        let p = &x().pow(2) * &y();
        assert_eq!(p.derivative("x"), &c(2) * &(&x() * &y()));
        assert!(c(7).derivative("x").is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &(&x() - &y()) * &(&x() + &c(1));
        assert_eq!(a.div_exact(&(&x() + &c(1))).unwrap(), &x() - &y());
        assert!(a.div_exact(&(&x() + &c(2))).is_none());
    }

    #[test]
    fn gcd_multivariate() {
        let common = &(&x() * &y()) - &c(1);
        let a = &common * &(&x() + &y());
        let b = &common * &(&x() - &c(3));
        assert_eq!(gcd(&a, &b), common.monic());
        assert!(gcd(&x(), &y()).is_one());
        assert_eq!(gcd(&x().pow(3), &(&x().pow(2) * &y())), x().pow(2));
    }

    #[test]
    fn compose_substitution() {
        let p = &x().pow(2) + &y();
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), &Polynomial::var("u") + &Polynomial::var("w"));
        map.insert("y".to_string(), Polynomial::var("u"));
        let u = Polynomial::var("u");
        let w = Polynomial::var("w");
        assert_eq!(p.compose(&map), &(&u + &w).pow(2) + &u);
    }

    #[test]
    fn lex_leading_term() {
        let p = &(&x() * &y().pow(5)) + &x().pow(2);
        assert_eq!(p.leading_term().unwrap().0, &vec![("x".to_string(), 2)]);
    }

    #[test]
    fn expr_string() {
        let p = &c(2) * &(&x() * &y());
        assert_eq!(p.to_expr_string(), "2*x*y");
        assert_eq!(Polynomial::zero().to_expr_string(), "0");
    }
}

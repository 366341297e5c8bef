use std::collections::BTreeMap;

use crate::algebra::{linalg, GaussianRational as G, Polynomial, RationalFunction as RF};
use crate::error::{Error, Result};

use super::oned::{residue_at_point_1d, OneForm1D};

pub const DEFAULT_N_CAP: u32 = 12;

/// Local residue of `numerator dz / (a_1 ... a_k)` at an isolated common zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GrothendieckData {
    pub vars: Vec<String>,
    pub point: Vec<G>,
    pub denominators: Vec<Polynomial>,
    pub numerator: Polynomial,
}

/// Cap on the exponent `N`; `LOCIDX_NCAP` overrides the default.
pub fn n_cap() -> u32 {
    std::env::var("LOCIDX_NCAP").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_N_CAP)
}

fn shift_map(vars: &[String], point: &[G]) -> BTreeMap<String, Polynomial> {
    vars.iter()
        .zip(point)
        .map(|(v, p)| (v.clone(), &Polynomial::var(v) + &Polynomial::constant(p.clone())))
        .collect()
}

fn exponents(p: &Polynomial, vars: &[String]) -> Result<BTreeMap<Vec<u32>, G>> {
    let mut out = BTreeMap::new();
    for (k, c) in p.split_by(vars) {
        let c = c.as_constant().ok_or_else(|| Error::Residue(format!("unexpected variables in {}", c)))?;
        out.insert(k, c);
    }
    Ok(out)
}

fn monomials_up_to(k: usize, d: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for e in 0..=d {
        for mut rest in monomials_up_to(k - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

fn mono(vars: &[String], e: &[u32]) -> Polynomial {
    let m = vars.iter().zip(e).filter(|(_, &k)| k > 0).map(|(v, &k)| (v.clone(), k)).collect();
    Polynomial::monomial(m, G::one())
}

fn truncate(p: &Polynomial, vars: &[String], deg: u32) -> Polynomial {
    let mut out = Polynomial::zero();
    for (e, c) in p.split_by(vars) {
        if e.iter().sum::<u32>() <= deg {
            out = &out + &(&mono(vars, &e) * &c);
        }
    }
    out
}

/// `1/u` as a power series at 0 truncated at total degree `deg`; needs `u(0) != 0`.
fn series_inverse(u: &Polynomial, vars: &[String], deg: u32) -> Polynomial {
    let u0 = u.constant_term();
    let inv0 = u0.inv().expect("unit at the point");
    let t = &Polynomial::one() - &u.scale(&inv0);
    let mut acc = Polynomial::one();
    let mut pw = Polynomial::one();
    for _ in 0..deg {
        pw = truncate(&(&pw * &t), vars, deg);
        if pw.is_zero() {
            break;
        }
        acc = &acc + &pw;
    }
    acc.scale(&inv0)
}

/// Solves `z_i^N u = sum_j A_j a_j` with `u(0) = 1`, entries of degree `<= bound`.
fn membership(a: &[Polynomial], vars: &[String], i: usize, n: u32, bound: u32) -> Option<(Vec<Polynomial>, Polynomial)> {
    let k = vars.len();
    let monos = monomials_up_to(k, bound);
    let mut e_target = vec![0u32; k];
    e_target[i] = n;
    let target = mono(vars, &e_target);
    // columns: A_j coefficients, then u coefficients except the constant one
    let mut cols: Vec<Polynomial> = Vec::new();
    for aj in a {
        for m in &monos {
            cols.push(&mono(vars, m) * aj);
        }
    }
    let u_monos: Vec<&Vec<u32>> = monos.iter().filter(|m| m.iter().any(|&x| x > 0)).collect();
    for m in &u_monos {
        cols.push(-&(&mono(vars, m) * &target));
    }
    let mut rows: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let col_exps: Vec<BTreeMap<Vec<u32>, G>> = cols.iter().map(|c| exponents(c, vars).expect("in vars")).collect();
    for ce in &col_exps {
        for e in ce.keys() {
            let len = rows.len();
            rows.entry(e.clone()).or_insert(len);
        }
    }
    let len = rows.len();
    rows.entry(e_target.clone()).or_insert(len);
    let mut mat = vec![vec![G::zero(); cols.len()]; rows.len()];
    for (j, ce) in col_exps.iter().enumerate() {
        for (e, c) in ce {
            mat[rows[e]][j] = c.clone();
        }
    }
    let mut rhs = vec![G::zero(); rows.len()];
    rhs[rows[&e_target]] = G::one();
    let x = linalg::solve(&mat, &rhs)?;
    let per = monos.len();
    let mut out = Vec::with_capacity(a.len());
    for j in 0..a.len() {
        let mut p = Polynomial::zero();
        for (t, m) in monos.iter().enumerate() {
            let c = &x[j * per + t];
            if !c.is_zero() {
                p = &p + &mono(vars, m).scale(c);
            }
        }
        out.push(p);
    }
    let mut u = Polynomial::one();
    for (t, m) in u_monos.iter().enumerate() {
        let c = &x[a.len() * per + t];
        if !c.is_zero() {
            u = &u + &mono(vars, m).scale(c);
        }
    }
    Some((out, u))
}

fn check_common_zero(data: &GrothendieckData) -> Result<()> {
    if data.vars.len() != data.point.len() || data.vars.len() != data.denominators.len() {
        return Err(Error::Residue("need as many denominators and coordinates as variables".into()));
    }
    Ok(())
}

fn value_at(p: &Polynomial, vars: &[String], point: &[G]) -> G {
    let pt: BTreeMap<String, G> = vars.iter().cloned().zip(point.iter().cloned()).collect();
    p.eval(&pt).unwrap_or_else(G::zero)
}

/// Grothendieck residue through the transformation law.
pub fn grothendieck_residue(data: &GrothendieckData) -> Result<G> {
    grothendieck_with_unit(data, &Polynomial::one())
}

/// Residue of `numerator / (unit * prod a_j)` with `unit(p) != 0`.
fn grothendieck_with_unit(data: &GrothendieckData, unit: &Polynomial) -> Result<G> {
    check_common_zero(data)?;
    let vars = &data.vars;
    let k = vars.len();
    if data.numerator.is_zero() {
        return Ok(G::zero());
    }
    if data.denominators.iter().any(|a| !value_at(a, vars, &data.point).is_zero()) {
        // the integrand is holomorphic in some direction
        return Ok(G::zero());
    }
    if k == 1 {
        let num = RF::from_poly(data.numerator.clone());
        let den = RF::from_poly(&data.denominators[0] * unit);
        let form = OneForm1D::new(&vars[0], num.checked_div(&den)?)?;
        return residue_at_point_1d(&form, &data.point[0]);
    }
    let sh = shift_map(vars, &data.point);
    let a: Vec<Polynomial> = data.denominators.iter().map(|p| p.compose(&sh)).collect();
    let h = data.numerator.compose(&sh);
    let unit = unit.compose(&sh);
    let maxdeg = a.iter().map(|p| p.total_degree()).max().unwrap_or(0);
    let cap = n_cap();
    for n in 1..=cap {
        let bound = n + maxdeg + 2;
        let mut rows = Vec::with_capacity(k);
        let mut units = Vec::with_capacity(k);
        let mut ok = true;
        for i in 0..k {
            match membership(&a, vars, i, n, bound) {
                Some((r, u)) => {
                    rows.push(r.into_iter().map(RF::from_poly).collect::<Vec<_>>());
                    units.push(u);
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let det = linalg::det(&rows);
        let det = det.num().clone();
        let deg = (k as u32) * (n - 1);
        let mut series = truncate(&(&h * &det), vars, deg);
        for u in units.iter().chain(std::iter::once(&unit)) {
            series = truncate(&(&series * &series_inverse(u, vars, deg)), vars, deg);
        }
        let target = vec![n - 1; k];
        let c = series.split_by(vars).get(&target).and_then(|c| c.as_constant()).unwrap_or_else(G::zero);
        return Ok(c);
    }
    Err(Error::Residue(format!(
        "not an isolated complete intersection at the point (or raise the cap, currently N = {})",
        cap
    )))
}

/// Rational inputs: denominators of the numerator and of each `a_j` must
/// not vanish at the point.
pub fn grothendieck_residue_rf(numerator: &RF, denominators: &[RF], vars: &[String], point: &[G]) -> Result<G> {
    let pt: BTreeMap<String, G> = vars.iter().cloned().zip(point.iter().cloned()).collect();
    let mut num = numerator.num().clone();
    let mut unit = numerator.den().clone();
    let mut dens = Vec::with_capacity(denominators.len());
    for a in denominators {
        num = &num * a.den();
        dens.push(a.num().clone());
    }
    for d in std::iter::once(numerator.den()).chain(denominators.iter().map(|a| a.den())) {
        if d.eval(&pt).map(|v| v.is_zero()).unwrap_or(true) {
            return Err(Error::Residue(format!("denominator {} vanishes at the point", d)));
        }
    }
    if unit.is_one() {
        unit = Polynomial::one();
    }
    let data = GrothendieckData { vars: vars.to_vec(), point: point.to_vec(), denominators: dens, numerator: num };
    grothendieck_with_unit(&data, &unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn vars() -> Vec<String> {
        vec!["x".to_string(), "y".to_string()]
    }

    fn p(s: &str) -> Polynomial {
        parse_expression(s, &vars()).unwrap().num().clone()
    }

    fn data(num: &str, dens: &[&str], pt: (i64, i64)) -> GrothendieckData {
        GrothendieckData {
            vars: vars(),
            point: vec![G::from_int(pt.0), G::from_int(pt.1)],
            denominators: dens.iter().map(|d| p(d)).collect(),
            numerator: p(num),
        }
    }

    #[test]
    fn monomial_denominators() {
        assert_eq!(grothendieck_residue(&data("1", &["x", "y"], (0, 0))).unwrap(), G::one());
        assert_eq!(grothendieck_residue(&data("x*y^2 + 3*x + 5", &["x^2", "y^3"], (0, 0))).unwrap(), G::one());
        assert_eq!(grothendieck_residue(&data("x*y^2 + 3*x + 5", &["x^2", "y"], (0, 0))).unwrap(), G::from_int(3));
    }

    #[test]
    fn linear_change() {
        assert_eq!(grothendieck_residue(&data("1", &["x + y", "x - y"], (0, 0))).unwrap(), G::from_ratio(-1, 2));
    }

    #[test]
    fn ideal_members_vanish() {
        assert_eq!(grothendieck_residue(&data("y", &["x^2", "y"], (0, 0))).unwrap(), G::zero());
    }

    #[test]
    fn translated_point_and_other_zeros() {
        // a = (x (x - 1), y - 1) at (1, 1): 1/(x (x-1)) near x = 1 gives 1
        assert_eq!(grothendieck_residue(&data("1", &["x*(x - 1)", "y - 1"], (1, 1))).unwrap(), G::one());
        assert_eq!(grothendieck_residue(&data("1", &["x*(x - 1)", "y - 1"], (0, 1))).unwrap(), G::from_int(-1));
    }

    #[test]
    fn non_isolated_hits_cap() {
        let err = grothendieck_residue(&data("1", &["x*y", "x*y^2"], (0, 0))).unwrap_err();
        assert!(err.to_string().contains("isolated"));
    }

    #[test]
    fn rational_wrapper() {
        let v = vars();
        let num = parse_expression("1/(1 + x)", &v).unwrap();
        let dens = vec![parse_expression("x/(2 + y)", &v).unwrap(), parse_expression("y", &v).unwrap()];
        let r = grothendieck_residue_rf(&num, &dens, &v, &[G::zero(), G::zero()]).unwrap();
        assert_eq!(r, G::from_int(2));
    }
}

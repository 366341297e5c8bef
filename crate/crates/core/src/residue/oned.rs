use crate::algebra::{GaussianRational as G, RationalFunction as RF, UPoly};
use crate::error::{Error, Result};

/// `coeff * d(var)` with `coeff` a function of `var` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm1D {
    pub var: String,
    pub coeff: RF,
}

impl OneForm1D {
    pub fn new(var: &str, coeff: RF) -> Result<Self> {
        if let Some(v) = coeff.variables().into_iter().find(|v| v != var) {
            return Err(Error::Residue(format!("coefficient depends on `{}` besides `{}`", v, var)));
        }
        Ok(OneForm1D { var: var.to_string(), coeff })
    }

    pub fn num_den(&self) -> (UPoly, UPoly) {
        let n = UPoly::from_polynomial(self.coeff.num(), &self.var).expect("univariate");
        let d = UPoly::from_polynomial(self.coeff.den(), &self.var).expect("univariate");
        (n, d)
    }
}

/// First `k` power-series coefficients of `n / d` at 0; needs `d(0) != 0`.
pub fn series_div(n: &UPoly, d: &UPoly, k: usize) -> Vec<G> {
    let d0 = d.coeff(0).inv().expect("unit at 0");
    let mut q: Vec<G> = Vec::with_capacity(k);
    for j in 0..k {
        let mut acc = n.coeff(j);
        for i in 1..=j {
            acc -= &(&d.coeff(i) * &q[j - i]);
        }
        q.push(&acc * &d0);
    }
    q
}

/// Coefficient of `(y - p)^{-1}` in the Laurent expansion at `p`.
pub fn residue_at_point_1d(form: &OneForm1D, p: &G) -> Result<G> {
    let (n, d) = form.num_den();
    let (n, d) = (n.shift(p), d.shift(p));
    let k = d.coeffs().iter().take_while(|c| c.is_zero()).count();
    if k == 0 || n.is_zero() {
        return Ok(G::zero());
    }
    let d1 = UPoly::new(d.coeffs()[k..].to_vec());
    Ok(series_div(&n, &d1, k).pop().expect("k > 0"))
}

/// Sum of the residues of `form` over the roots of `factor`, without
/// computing the roots: Hermite reduction to a simple pole, then the trace
/// form on `Q(i)[y]/(factor)`.
pub fn residue_total_1d(form: &OneForm1D, factor: &UPoly) -> Result<G> {
    if factor.is_zero() {
        return Err(Error::Residue("zero factor".into()));
    }
    let (n, d) = form.num_den();
    total_over(&n, &d, &factor.squarefree_part())
}

fn total_over(n: &UPoly, d: &UPoly, q: &UPoly) -> Result<G> {
    if q.degree() == 0 {
        return Ok(G::zero());
    }
    let g = q.gcd(d);
    if g.degree() == 0 {
        return Ok(G::zero());
    }
    if g.degree() < q.degree() {
        return total_over(n, d, &g);
    }
    let mut e = d.clone();
    let mut k = 0u32;
    loop {
        let (quo, rem) = e.divrem(q);
        if !rem.is_zero() {
            break;
        }
        e = quo;
        k += 1;
    }
    let g = q.gcd(&e);
    if g.degree() > 0 {
        // roots of different pole orders: split the factor
        let rest = q.divrem(&g).0;
        return Ok(&total_over(n, d, &g)? + &total_over(n, d, &rest)?);
    }
    // N/D = N u / E + N v / q^k with u q^k + v E = 1
    let qk = q.pow(k);
    let (_, _, v) = qk.ext_gcd(&e);
    let mut a = n.mul(&v).rem(&qk);
    let qd = q.derivative();
    let (_, s, t) = q.ext_gcd(&qd);
    // A / q^j = d(-A t / ((j-1) q^{j-1})) + (A s + (A t)' / (j-1)) / q^{j-1}
    let mut j = k;
    while j > 1 {
        let at = a.mul(&t);
        let c = G::from_int(j as i64 - 1).inv().expect("nonzero");
        a = a.mul(&s).add(&at.derivative().scale(&c));
        j -= 1;
        a = a.rem(&q.pow(j));
    }
    let h = a.rem(q);
    let inv = qd.inv_mod(q).ok_or_else(|| Error::Residue("factor is not squarefree".into()))?;
    Ok(h.mul(&inv).trace_mod(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_expression;

    fn form(s: &str) -> OneForm1D {
        OneForm1D::new("y", parse_expression(s, &["y".to_string()]).unwrap()).unwrap()
    }

    fn up(s: &str) -> UPoly {
        UPoly::from_polynomial(parse_expression(s, &["y".to_string()]).unwrap().num(), "y").unwrap()
    }

    #[test]
    fn point_residues() {
        assert_eq!(residue_at_point_1d(&form("1/y"), &G::zero()).unwrap(), G::one());
        assert_eq!(residue_at_point_1d(&form("2/(3*y)"), &G::zero()).unwrap(), G::from_ratio(2, 3));
        assert_eq!(residue_at_point_1d(&form("1/y^2"), &G::zero()).unwrap(), G::zero());
        assert_eq!(residue_at_point_1d(&form("y"), &G::zero()).unwrap(), G::zero());
        assert_eq!(residue_at_point_1d(&form("(1 + y + y^2)/y^3"), &G::zero()).unwrap(), G::one());
        // 1/((y-1)^2 (y+1)) at 1: d/dy (1/(y+1)) = -1/4
        assert_eq!(residue_at_point_1d(&form("1/((y - 1)^2*(y + 1))"), &G::one()).unwrap(), G::from_ratio(-1, 4));
        assert_eq!(residue_at_point_1d(&form("1/(y^2 + 1)"), &G::i()).unwrap(), G::new(crate::algebra::gaussian::q(0, 1), crate::algebra::gaussian::q(-1, 2)));
    }

    #[test]
    fn totals() {
        assert_eq!(residue_total_1d(&form("1/(y^2 - 2)"), &up("y^2 - 2")).unwrap(), G::zero());
        // dq/q counts roots
        assert_eq!(residue_total_1d(&form("(3*y^2 + 1)/(y^3 + y + 1)"), &up("y^3 + y + 1")).unwrap(), G::from_int(3));
        // higher order poles at non-rational roots
        assert_eq!(residue_total_1d(&form("(2*y)/(y^2 - 3)^2"), &up("y^2 - 3")).unwrap(), G::zero());
        assert_eq!(residue_total_1d(&form("y^3/(y^2 - 3)^2"), &up("y^2 - 3")).unwrap(), G::one());
    }

    #[test]
    fn total_matches_points_on_rational_roots() {
        let f = form("(y^3 + 2)/((y - 1)^2*(y + 2)*y^3)");
        let sum = [G::one(), G::from_int(-2), G::zero()]
            .iter()
            .map(|p| residue_at_point_1d(&f, p).unwrap())
            .fold(G::zero(), |a, b| &a + &b);
        let tot = residue_total_1d(&f, &up("(y - 1)*(y + 2)*y")).unwrap();
        assert_eq!(sum, tot);
        // no residue at infinity when deg den - deg num >= 2
        assert_eq!(tot, G::zero());
    }

    #[test]
    fn mixed_orders_split() {
        let f = form("y/((y - 1)^2*(y + 1))");
        let pts = [G::one(), G::from_int(-1)].iter().map(|p| residue_at_point_1d(&f, p).unwrap()).fold(G::zero(), |a, b| &a + &b);
        assert_eq!(residue_total_1d(&f, &up("y^2 - 1")).unwrap(), pts);
        assert_eq!(residue_total_1d(&f, &up("y - 5")).unwrap(), G::zero());
    }
}

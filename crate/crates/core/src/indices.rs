//! Localisation on `S`: symmetric functions of the connection matrix,
//! singular-point enumeration on curves and residues at declared points.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::{linalg, GaussianRational as G, Polynomial, RationalFunction as RF, UPoly};
use crate::atlas::Atlas;
use crate::error::{Error, Result};
use crate::residue::{gaussian_roots, grothendieck_residue_rf, residue_at_point_1d, residue_total_1d, OneForm1D};

/// A product of elementary symmetric functions `c_k` of the eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phi {
    pub factors: Vec<usize>,
}

impl Phi {
    /// `c1^d`.
    pub fn chern_power(d: usize) -> Phi {
        Phi { factors: vec![1; d] }
    }

    /// Accepts products such as `c1^2*c2` or `c1 c3`.
    pub fn parse(s: &str) -> Result<Phi> {
        let mut factors = Vec::new();
        for tok in s.split(|c: char| c == '*' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => (b, e.parse::<usize>().map_err(|_| Error::Unsupported(format!("bad exponent in `{}`", tok)))?),
                None => (tok, 1),
            };
            let k = base
                .strip_prefix('c')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::Unsupported(format!("unknown symmetric function `{}` (use c1, c2, ...)", base)))?;
            factors.extend(std::iter::repeat_n(k, exp));
        }
        if factors.is_empty() {
            return Err(Error::Unsupported("empty symmetric-function specification".into()));
        }
        factors.sort_unstable();
        Ok(Phi { factors })
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().sum()
    }

    /// Number-valued residues need degree exactly `dim S`.
    pub fn check_degree(&self, dim_s: usize) -> Result<()> {
        if self.degree() != dim_s {
            return Err(Error::Unsupported(format!(
                "symmetric function of degree {} given, residues need degree dim S = {}",
                self.degree(),
                dim_s
            )));
        }
        Ok(())
    }

    pub fn eval(&self, c: &[Vec<RF>]) -> RF {
        let mut out = RF::one();
        for &k in &self.factors {
            out = &out * &elementary(c, k);
        }
        out
    }
}

impl std::fmt::Display for Phi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|k| format!("c{}", k)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Sum of the principal `k x k` minors.
pub fn elementary(c: &[Vec<RF>], k: usize) -> RF {
    let m = c.len();
    if k == 0 {
        return RF::one();
    }
    if k > m {
        return RF::zero();
    }
    let mut acc = RF::zero();
    for idx in subsets(m, k) {
        let minor: Vec<Vec<RF>> = idx.iter().map(|&i| idx.iter().map(|&j| c[i][j].clone()).collect()).collect();
        acc = &acc + &linalg::det(&minor);
    }
    acc
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// Connection data of a one-dimensional object along one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalIndexData {
    pub chart: String,
    /// Connection matrix along `direction`, functions on `S`.
    pub c: Vec<Vec<RF>>,
    /// Tangential components of the direction; their common zeros are the
    /// singular points.
    pub direction: Vec<RF>,
}

impl LocalIndexData {
    /// `trace(C) / b d(y)` on a curve.
    pub fn curve_form(&self, var: &str) -> Result<OneForm1D> {
        if self.direction.len() != 1 {
            return Err(Error::Unsupported("curve form needs dim S = 1".into()));
        }
        if self.direction[0].is_zero() {
            return Err(Error::Geometry(format!("S lies in the singular locus on chart `{}`", self.chart)));
        }
        let tr = elementary(&self.c, 1);
        OneForm1D::new(var, tr.checked_div(&self.direction[0])?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointResidue {
    pub chart: String,
    pub point: String,
    pub residue: String,
    /// True when the entry sums over all roots of an irreducible-over-Q(i) factor.
    pub cluster: bool,
    #[serde(skip)]
    pub value: G,
}

fn upoly(p: &Polynomial, var: &str) -> Result<UPoly> {
    UPoly::from_polynomial(p, var).ok_or_else(|| Error::Unsupported(format!("`{}` is not univariate in `{}`", p, var)))
}

fn pretty_factor(q: &UPoly, var: &str) -> String {
    format!("{} = 0", q.monic().to_polynomial(var))
}

/// Singular points on a curve `S`, chart by chart: every pole of the
/// index form and every zero of the direction in the first chart, then in
/// each later chart only the points missing from all earlier ones.
pub fn enumerate_curve(atlas: &Atlas, data: &BTreeMap<String, LocalIndexData>) -> Result<Vec<PointResidue>> {
    if atlas.dim_s() != 1 {
        return Err(Error::Unsupported("singular-point enumeration needs dim S = 1; declare points".into()));
    }
    let mut out = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for chart in atlas.charts() {
        let Some(d) = data.get(&chart.name) else { continue };
        let y = &chart.tangential[0];
        let form = d.curve_form(y)?;
        let (_, den) = form.num_den();
        let bnum = upoly(d.direction[0].num(), y)?;
        let cand = den.mul(&bnum).squarefree_part();
        let mut missing: Option<UPoly> = None;
        let mut disjoint = !seen.is_empty();
        for e in &seen {
            let Some(ce) = atlas.chart(e) else { continue };
            if atlas.transition(&chart.name, e).is_none() {
                continue;
            }
            disjoint = false;
            let mut miss = UPoly::one();
            for v in &ce.tangential {
                let r = atlas.to_chart_on_s(&RF::var(v), e, &chart.name)?;
                miss = miss.mul(&upoly(r.den(), y)?);
            }
            let miss = miss.squarefree_part();
            missing = Some(match missing {
                None => miss,
                Some(m) => m.gcd(&miss),
            });
        }
        if disjoint {
            return Err(Error::Unsupported(format!(
                "chart `{}` has no transition to the charts before it; declared-points mode required",
                chart.name
            )));
        }
        seen.push(&chart.name);
        if cand.degree() == 0 {
            continue;
        }
        let split = gaussian_roots(&cand);
        for (r, _) in &split.roots {
            if let Some(m) = &missing {
                if !m.eval(r).is_zero() {
                    continue;
                }
            }
            let v = residue_at_point_1d(&form, r)?;
            out.push(PointResidue {
                chart: chart.name.clone(),
                point: format!("{} = {}", y, r),
                residue: v.to_string(),
                cluster: false,
                value: v,
            });
        }
        let rem = match &missing {
            Some(m) => split.remainder.gcd(m),
            None => split.remainder.clone(),
        };
        if rem.degree() > 0 {
            let v = residue_total_1d(&form, &rem)?;
            out.push(PointResidue {
                chart: chart.name.clone(),
                point: pretty_factor(&rem, y),
                residue: v.to_string(),
                cluster: true,
                value: v,
            });
        }
    }
    Ok(out)
}

/// Residue of `phi(C) / (b^1 ... b^d)` at a declared point of `S`.
pub fn residue_at(data: &LocalIndexData, tangential: &[String], phi: &Phi, coords: &BTreeMap<String, G>) -> Result<G> {
    phi.check_degree(tangential.len())?;
    let point: Vec<G> = tangential
        .iter()
        .map(|v| coords.get(v).cloned().ok_or_else(|| Error::Geometry(format!("point is missing coordinate `{}`", v))))
        .collect::<Result<_>>()?;
    if tangential.len() == 1 {
        return residue_at_point_1d(&data.curve_form(&tangential[0])?, &point[0]);
    }
    if data.direction.len() != tangential.len() {
        return Err(Error::Unsupported("Grothendieck residue needs a one-dimensional direction".into()));
    }
    grothendieck_residue_rf(&phi.eval(&data.c), &data.direction, tangential, &point)
}

/// True when some generator of the degeneracy ideal is a nonzero constant.
pub fn nowhere_degenerate(minors: &[RF]) -> bool {
    minors.iter().any(|m| m.as_constant().is_some_and(|c| !c.is_zero()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::fixtures::p2_line;
    use crate::parser::parse_expression;

    fn rf(s: &str, vars: &[&str]) -> RF {
        let v: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        parse_expression(s, &v).unwrap()
    }

    #[test]
    fn phi_parsing_and_degree() {
        assert_eq!(Phi::parse("c1^2*c2").unwrap().factors, vec![1, 1, 2]);
        assert_eq!(Phi::parse("c1^2*c2").unwrap().degree(), 4);
        assert!(Phi::parse("").is_err());
        assert!(Phi::parse("p1").is_err());
        assert!(Phi::chern_power(0).check_degree(1).is_err());
        assert!(Phi::chern_power(2).check_degree(2).is_ok());
    }

    #[test]
    fn elementary_functions() {
        let c = vec![vec![RF::from_int(1), RF::from_int(2)], vec![RF::from_int(3), RF::from_int(4)]];
        assert_eq!(elementary(&c, 1), RF::from_int(5));
        assert_eq!(elementary(&c, 2), RF::from_int(-2));
        assert_eq!(elementary(&c, 3), RF::zero());
        assert_eq!(Phi::parse("c1*c2").unwrap().eval(&c), RF::from_int(-10));
    }

    #[test]
    fn p2_line_points() {
        // x d/dx + 2 y d/dy: C = 1 along y d/dy, and 1 along -w d/dw in B
        let at = p2_line();
        let mut d = BTreeMap::new();
        d.insert("A".into(), LocalIndexData { chart: "A".into(), c: vec![vec![RF::one()]], direction: vec![rf("2*y", &["y"])] });
        d.insert("B".into(), LocalIndexData { chart: "B".into(), c: vec![vec![RF::from_int(-1)]], direction: vec![rf("-2*w", &["w"])] });
        let pts = enumerate_curve(&at, &d).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].point, "y = 0");
        assert_eq!(pts[0].value, G::from_ratio(1, 2));
        assert_eq!(pts[1].point, "w = 0");
        assert_eq!(pts[1].value, G::from_ratio(1, 2));
    }

    #[test]
    fn irrational_cluster() {
        let at = p2_line();
        let mut d = BTreeMap::new();
        d.insert("A".into(), LocalIndexData { chart: "A".into(), c: vec![vec![rf("2*y", &["y"])]], direction: vec![rf("y^2 - 2", &["y"])] });
        let pts = enumerate_curve(&at, &d).unwrap();
        assert_eq!(pts.len(), 1);
        assert!(pts[0].cluster);
        assert_eq!(pts[0].value, G::from_int(2));
    }

    #[test]
    fn declared_point_grothendieck() {
        let t = vec!["y".to_string(), "z".to_string()];
        let d = LocalIndexData {
            chart: "A".into(),
            c: vec![vec![RF::one()]],
            direction: vec![rf("y + z", &["y", "z"]), rf("y - z", &["y", "z"])],
        };
        let mut p = BTreeMap::new();
        p.insert("y".to_string(), G::zero());
        p.insert("z".to_string(), G::zero());
        assert_eq!(residue_at(&d, &t, &Phi::chern_power(2), &p).unwrap(), G::from_ratio(-1, 2));
        assert!(residue_at(&d, &t, &Phi::chern_power(1), &p).is_err());
    }
}

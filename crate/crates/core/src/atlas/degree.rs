use super::{Atlas, RF};
use crate::algebra::{GaussianRational, UPoly};
use crate::error::{Error, Result};

/// Order at `0` of a univariate rational function.
pub fn order_at_zero(r: &RF, var: &str) -> Option<i64> {
    let n = UPoly::from_polynomial(r.num(), var)?;
    let d = UPoly::from_polynomial(r.den(), var)?;
    if n.is_zero() {
        return None;
    }
    let z = GaussianRational::zero();
    Some(n.root_multiplicity(&z) as i64 - d.root_multiplicity(&z) as i64)
}

/// Degree of `N_S` for a rational curve covered by two charts with
/// `w = 1/y` on the overlap: the order at `w = 0` of the normal frame change.
pub fn normal_bundle_degree(atlas: &Atlas) -> Result<i64> {
    let unsupported = |why: &str| Error::Unsupported(format!("normal bundle degree: {}; declare the degree", why));
    if atlas.codim() != 1 || atlas.dim_s() != 1 {
        return Err(unsupported("needs m = 1 and dim S = 1"));
    }
    if atlas.charts().len() != 2 || atlas.overlaps().len() != 1 {
        return Err(unsupported("needs exactly two charts with one overlap"));
    }
    let (a, b) = atlas.overlaps()[0].clone();
    let ca = atlas.chart(&a).expect("pair");
    let cb = atlas.chart(&b).expect("pair");
    let (y, w) = (&ca.tangential[0], &cb.tangential[0]);
    let y_in_b = atlas.to_chart_on_s(&RF::var(y), &a, &b)?;
    if y_in_b != RF::one().checked_div(&RF::var(w))? {
        return Err(unsupported(&format!("tangential coordinates are not related by {} = 1/{}", w, y)));
    }
    let jac = atlas.jacobian(&a, &b)?;
    let c = atlas.to_chart_on_s(&ca.restrict(&jac[0][0])?, &a, &b)?;
    // a line-bundle cocycle on C* is a w^k
    let mono = c.num().num_terms() == 1 && c.den().num_terms() == 1 && c.variables().iter().all(|v| v == w);
    if !mono {
        return Err(Error::Geometry(format!("normal frame change {} is not a unit on the overlap", c)));
    }
    order_at_zero(&c, w).ok_or_else(|| Error::Geometry("normal frame change vanishes identically".to_string()))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::{Atlas, Chart};
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(normal_bundle_degree(&p2_line()).unwrap(), 1);
        assert_eq!(normal_bundle_degree(&blowup()).unwrap(), -1);
        assert_eq!(normal_bundle_degree(&product()).unwrap(), 0);
    }

    #[test]
    fn symmetric_in_chart_order() {
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&b, &a, &["u/w", "1/w"], &["x/y", "1/y"]);
        let at = Atlas::new(vec![a, b], vec![t]).unwrap();
        assert_eq!(normal_bundle_degree(&at).unwrap(), 1);
    }

    #[test]
    fn higher_degree() {
        // O(3): u = x / y^3
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&a, &b, &["x/y^3", "1/y"], &["u/w^3", "1/w"]);
        let at = Atlas::new(vec![a, b], vec![t]).unwrap();
        assert_eq!(normal_bundle_degree(&at).unwrap(), 3);
    }

    #[test]
    fn unsupported_shapes() {
        assert!(matches!(normal_bundle_degree(&nonsplit()), Err(Error::Unsupported(_))));
    }
}

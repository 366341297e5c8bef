use serde::Serialize;

use super::{Atlas, RF};
use crate::error::Result;

/// A failing derivative for one of the classification conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub condition: String,
    pub from: String,
    pub to: String,
    pub derivative: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub adapted: bool,
    pub splitting: bool,
    pub two_splitting: bool,
    pub comfortable: bool,
    pub two_linearizable: bool,
    pub witnesses: Vec<Witness>,
}

fn witness(cond: &str, from: &str, to: &str, derivative: String, value: &RF) -> Witness {
    Witness { condition: cond.to_string(), from: from.to_string(), to: to.to_string(), derivative, value: value.to_string() }
}

/// Classifies the embedding of `S` witnessed by the atlas.
pub fn classify_atlas(atlas: &Atlas) -> Result<Classification> {
    let mut w = Vec::new();
    let mut adapted = true;
    for (a, b) in atlas.pairs() {
        let ca = atlas.chart(&a).expect("pair");
        let t = atlas.transition(&a, &b).expect("pair");
        let cb = atlas.chart(&b).expect("pair");
        for (r, f) in t.forward.iter().enumerate().take(cb.codim()) {
            let f0 = ca.restrict(f)?;
            if !f0.is_zero() {
                adapted = false;
                w.push(witness("adapted", &a, &b, format!("{}|S", cb.normal[r]), &f0));
            }
        }
    }
    if !adapted {
        return Ok(Classification {
            adapted,
            splitting: false,
            two_splitting: false,
            comfortable: false,
            two_linearizable: false,
            witnesses: w,
        });
    }
    let (mut splitting, mut two_splitting, mut second) = (true, true, true);
    for (a, b) in atlas.pairs() {
        let ca = atlas.chart(&a).expect("pair");
        let cb = atlas.chart(&b).expect("pair");
        let m = ca.codim();
        let jac = atlas.jacobian(&a, &b)?;
        let hes = atlas.hessian(&a, &b)?;
        for p in m..cb.dim() {
            for r in 0..m {
                let d = &jac[p][r];
                let name = format!("d{}/d{}", cb.vars()[p], ca.normal[r]);
                let d0 = ca.restrict(d)?;
                if !d0.is_zero() {
                    splitting = false;
                    w.push(witness("splitting", &a, &b, name.clone(), &d0));
                }
                if !d.in_ideal_power(&ca.normal, 2)? {
                    two_splitting = false;
                    w.push(witness("two_splitting", &a, &b, name, d));
                }
            }
        }
        for r in 0..m {
            for s1 in 0..m {
                for s2 in s1..m {
                    let h0 = ca.restrict(&hes[r][s1][s2])?;
                    if !h0.is_zero() {
                        second = false;
                        let name = format!("d2{}/d{}d{}", cb.normal[r], ca.normal[s1], ca.normal[s2]);
                        w.push(witness("comfortable", &a, &b, name, &h0));
                    }
                }
            }
        }
    }
    let comfortable = splitting && second;
    Ok(Classification {
        adapted,
        splitting,
        two_splitting: two_splitting && splitting,
        comfortable,
        two_linearizable: two_splitting && comfortable,
        witnesses: w,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::super::Chart;
    use super::*;

    #[test]
    fn blowup_is_two_linearizable() {
        let c = classify_atlas(&blowup()).unwrap();
        assert!(c.adapted && c.splitting && c.comfortable && c.two_splitting && c.two_linearizable);
        assert!(c.witnesses.is_empty());
    }

    #[test]
    fn product_atlas_all_flags() {
        let c = classify_atlas(&product()).unwrap();
        assert!(c.splitting && c.comfortable && c.two_linearizable);
    }

    #[test]
    fn shear_is_not_splitting() {
        let c = classify_atlas(&nonsplit()).unwrap();
        assert!(c.adapted);
        assert!(!c.splitting && !c.comfortable && !c.two_splitting);
        let wt = c.witnesses.iter().find(|w| w.condition == "splitting" && w.from == "A").unwrap();
        assert_eq!(wt.derivative, "dw/dx");
        assert_eq!(wt.value, "1");
    }

    #[test]
    fn non_adapted_stops() {
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&a, &b, &["x + y", "y"], &["u - w", "w"]);
        let at = Atlas::new(vec![a, b], vec![t]).unwrap();
        let c = classify_atlas(&at).unwrap();
        assert!(!c.adapted && !c.splitting);
        assert_eq!(c.witnesses[0].value, "y");
    }

    #[test]
    fn quadratic_normal_term_breaks_comfort_only() {
        // u = x/(1 - x y) = x + x^2 y + ... keeps splitting, d2u/dx2 = 2y on S
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&a, &b, &["x/(1 - x*y)", "y"], &["u/(1 + u*w)", "w"]);
        let at = Atlas::new(vec![a, b], vec![t]).unwrap();
        let c = classify_atlas(&at).unwrap();
        assert!(c.splitting && c.two_splitting);
        assert!(!c.comfortable);
    }
}

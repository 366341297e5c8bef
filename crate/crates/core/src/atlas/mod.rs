//! Chart atlases adapted to a submanifold `S`, embedding classification,
//! obstruction cocycles and the normal-bundle degree.

pub mod classify;
pub mod cocycle;
pub mod degree;

use std::collections::BTreeMap;

use crate::algebra::RationalFunction;
use crate::error::{Error, Result};

pub use classify::{classify_atlas, Classification, Witness};
pub use cocycle::{apply_splitting_correction, chart_correction, atiyah_cocycle, coboundary_residual, conormal_cocycle, CochainValue};
pub use degree::normal_bundle_degree;

type RF = RationalFunction;

/// Coordinates `z = (z', z'')`; `S = {z' = 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub name: String,
    pub normal: Vec<String>,
    pub tangential: Vec<String>,
}

impl Chart {
    pub fn new(name: &str, normal: &[&str], tangential: &[&str]) -> Self {
        Chart {
            name: name.to_string(),
            normal: normal.iter().map(|s| s.to_string()).collect(),
            tangential: tangential.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Normal variables first, then tangential.
    pub fn vars(&self) -> Vec<String> {
        self.normal.iter().chain(self.tangential.iter()).cloned().collect()
    }

    pub fn codim(&self) -> usize {
        self.normal.len()
    }

    pub fn dim(&self) -> usize {
        self.normal.len() + self.tangential.len()
    }

    pub fn index_of(&self, var: &str) -> Option<usize> {
        self.vars().iter().position(|v| v == var)
    }

    /// Restriction to `S`.
    pub fn restrict(&self, r: &RF) -> Result<RF> {
        r.restrict_zero(&self.normal)
    }
}

/// `z_to = forward(z_from)`, `z_from = backward(z_to)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: String,
    pub to: String,
    /// One entry per variable of `to`, in `from` variables.
    pub forward: Vec<RF>,
    /// One entry per variable of `from`, in `to` variables.
    pub backward: Vec<RF>,
}

impl Transition {
    pub fn inverse(&self) -> Transition {
        Transition {
            from: self.to.clone(),
            to: self.from.clone(),
            forward: self.backward.clone(),
            backward: self.forward.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atlas {
    charts: Vec<Chart>,
    transitions: BTreeMap<(String, String), Transition>,
}

fn assignment(vars: &[String], vals: &[RF]) -> BTreeMap<String, RF> {
    vars.iter().cloned().zip(vals.iter().cloned()).collect()
}

impl Atlas {
    /// Builds the atlas, checking that each transition is invertible and
    /// storing both directions.
    pub fn new(charts: Vec<Chart>, transitions: Vec<Transition>) -> Result<Self> {
        let mut a = Atlas { charts, transitions: BTreeMap::new() };
        for c in &a.charts {
            let vs = c.vars();
            for (k, v) in vs.iter().enumerate() {
                if vs[..k].contains(v) {
                    return Err(Error::Geometry(format!("variable `{}` repeated in chart `{}`", v, c.name)));
                }
            }
            if a.charts.iter().filter(|d| d.name == c.name).count() > 1 {
                return Err(Error::Geometry(format!("chart `{}` declared twice", c.name)));
            }
        }
        for t in transitions {
            let from = a.chart(&t.from).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", t.from)))?;
            let to = a.chart(&t.to).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", t.to)))?;
            if t.forward.len() != to.dim() || t.backward.len() != from.dim() {
                return Err(Error::Geometry(format!("transition {} -> {} has the wrong number of components", t.from, t.to)));
            }
            let fwd = assignment(&to.vars(), &t.forward);
            for (k, b) in t.backward.iter().enumerate() {
                let id = b.substitute(&fwd)?;
                if id != RF::var(&from.vars()[k]) {
                    return Err(Error::Geometry(format!(
                        "inverse of {} -> {} does not compose to the identity in `{}`: got {}",
                        t.from,
                        t.to,
                        from.vars()[k],
                        id
                    )));
                }
            }
            let bwd = assignment(&from.vars(), &t.backward);
            for (k, f) in t.forward.iter().enumerate() {
                let id = f.substitute(&bwd)?;
                if id != RF::var(&to.vars()[k]) {
                    return Err(Error::Geometry(format!(
                        "transition {} -> {} is not the inverse of its inverse block in `{}`",
                        t.from,
                        t.to,
                        to.vars()[k]
                    )));
                }
            }
            let key = (t.from.clone(), t.to.clone());
            if a.transitions.contains_key(&key) {
                return Err(Error::Geometry(format!("duplicate transition {} -> {}", t.from, t.to)));
            }
            let inv = t.inverse();
            a.transitions.insert((inv.from.clone(), inv.to.clone()), inv);
            a.transitions.insert(key, t);
        }
        Ok(a)
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn transition(&self, from: &str, to: &str) -> Option<&Transition> {
        self.transitions.get(&(from.to_string(), to.to_string()))
    }

    /// Ordered pairs with a transition, both directions.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.transitions.keys().cloned().collect()
    }

    /// Unordered pairs, each once (`from < to`).
    pub fn overlaps(&self) -> Vec<(String, String)> {
        self.transitions.keys().filter(|(a, b)| a < b).cloned().collect()
    }

    /// Triples of charts with all three transitions.
    pub fn triples(&self) -> Vec<(String, String, String)> {
        let mut out = Vec::new();
        let names: Vec<&String> = self.charts.iter().map(|c| &c.name).collect();
        for a in &names {
            for b in &names {
                for c in &names {
                    if a < b && b < c && self.transition(a, b).is_some() && self.transition(b, c).is_some() && self.transition(c, a).is_some() {
                        out.push(((*a).clone(), (*b).clone(), (*c).clone()));
                    }
                }
            }
        }
        out
    }

    pub fn codim(&self) -> usize {
        self.charts.first().map(|c| c.codim()).unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.charts.first().map(|c| c.dim()).unwrap_or(0)
    }

    pub fn dim_s(&self) -> usize {
        self.dim() - self.codim()
    }

    fn pair(&self, from: &str, to: &str) -> Result<(&Chart, &Chart, &Transition)> {
        let t = self
            .transition(from, to)
            .ok_or_else(|| Error::Geometry(format!("no transition {} -> {}", from, to)))?;
        Ok((self.chart(from).expect("checked"), self.chart(to).expect("checked"), t))
    }

    /// `J[j][k] = dz_to^j / dz_from^k`, in `from` variables.
    pub fn jacobian(&self, from: &str, to: &str) -> Result<Vec<Vec<RF>>> {
        let (a, _, t) = self.pair(from, to)?;
        let va = a.vars();
        Ok(t.forward.iter().map(|f| va.iter().map(|v| f.derivative(v)).collect()).collect())
    }

    /// `H[j][k][l] = d^2 z_to^j / dz_from^k dz_from^l`.
    pub fn hessian(&self, from: &str, to: &str) -> Result<Vec<Vec<Vec<RF>>>> {
        let (a, _, t) = self.pair(from, to)?;
        let va = a.vars();
        Ok(t.forward
            .iter()
            .map(|f| va.iter().map(|v| { let d = f.derivative(v); va.iter().map(|w| d.derivative(w)).collect() }).collect())
            .collect())
    }

    /// Rewrites a function of `from` variables in `to` variables.
    pub fn to_chart(&self, r: &RF, from: &str, to: &str) -> Result<RF> {
        let (a, _, t) = self.pair(from, to)?;
        r.substitute(&assignment(&a.vars(), &t.backward))
    }

    /// Rewrites a function on `S` given in `from`'s tangential coordinates
    /// into `to`'s tangential coordinates.
    pub fn to_chart_on_s(&self, r: &RF, from: &str, to: &str) -> Result<RF> {
        let (_, b, _) = self.pair(from, to)?;
        b.restrict(&self.to_chart(r, from, to)?)
    }

    /// Pushforward of a vector field given by components in `from`.
    pub fn push_field(&self, v: &[RF], from: &str, to: &str) -> Result<Vec<RF>> {
        let jac = self.jacobian(from, to)?;
        let mut out = Vec::with_capacity(jac.len());
        for row in &jac {
            let mut acc = RF::zero();
            for (d, c) in row.iter().zip(v) {
                acc = &acc + &(d * c);
            }
            out.push(self.to_chart(&acc, from, to)?);
        }
        Ok(out)
    }

    /// Conjugates a self-map: `f_to = z_to o f_from o z_from`.
    pub fn conjugate_map(&self, f: &[RF], from: &str, to: &str) -> Result<Vec<RF>> {
        let (a, _, t) = self.pair(from, to)?;
        let fa = assignment(&a.vars(), f);
        let mut out = Vec::new();
        for g in &t.forward {
            out.push(self.to_chart(&g.substitute(&fa)?, from, to)?);
        }
        Ok(out)
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn rejects_bad_inverse() {
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&a, &b, &["x", "y + x"], &["u", "w"]);
        assert!(Atlas::new(vec![a, b], vec![t]).is_err());
    }

    #[test]
    fn push_field_through_blowup() {
        let at = blowup();
        // t d/dt in chart A becomes y d/dy - s d/ds in chart B
        let v = vec![RF::zero(), RF::var("t")];
        let w = at.push_field(&v, "A", "B").unwrap();
        assert_eq!(w[0], RF::var("y"));
        assert_eq!(w[1], -RF::var("s"));
    }

    #[test]
    fn overlaps_and_pairs() {
        let at = p2_line();
        assert_eq!(at.pairs().len(), 2);
        assert_eq!(at.overlaps(), vec![("A".to_string(), "B".to_string())]);
        assert_eq!(at.dim_s(), 1);
        assert!(at.triples().is_empty());
    }
}

use std::collections::BTreeMap;
use std::fmt;

use super::{classify_atlas, Atlas, Chart, Transition, RF};
use crate::error::{Error, Result};

/// How one tensor index transforms under a change of chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexKind {
    /// `d/dz^p` on `S`.
    Tangent,
    /// `dz^p` on `S`.
    Cotangent,
    /// `d_r`, the normal frame of `N_S`.
    Normal,
    /// `omega^s`, the conormal frame.
    Conormal,
}

/// Tensor on `S` in the frame of `chart`, components functions of the
/// chart's tangential variables. `other` is set for overlap-indexed values.
#[derive(Clone, PartialEq)]
pub struct CochainValue {
    pub chart: String,
    pub other: Option<String>,
    pub kinds: Vec<IndexKind>,
    pub shape: Vec<usize>,
    pub entries: Vec<RF>,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn unflatten(mut i: usize, shape: &[usize]) -> Vec<usize> {
    let mut out = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        out[k] = i % shape[k];
        i /= shape[k];
    }
    out
}

impl CochainValue {
    pub fn zeros(chart: &Chart, other: Option<&str>, kinds: &[IndexKind]) -> Self {
        let shape: Vec<usize> = kinds
            .iter()
            .map(|k| match k {
                IndexKind::Tangent | IndexKind::Cotangent => chart.tangential.len(),
                IndexKind::Normal | IndexKind::Conormal => chart.codim(),
            })
            .collect();
        let n = shape.iter().product();
        CochainValue {
            chart: chart.name.clone(),
            other: other.map(|s| s.to_string()),
            kinds: kinds.to_vec(),
            shape,
            entries: vec![RF::zero(); n],
        }
    }

    /// Sections of `T_S (x) N*_S` such as the splitting cochains `c^p_r`.
    pub fn from_matrix(chart: &Chart, rows: Vec<Vec<RF>>) -> Result<Self> {
        let mut c = Self::zeros(chart, None, &[IndexKind::Tangent, IndexKind::Conormal]);
        if rows.len() != c.shape[0] || rows.iter().any(|r| r.len() != c.shape[1]) {
            return Err(Error::Geometry(format!("cochain for `{}` has the wrong shape", chart.name)));
        }
        c.entries = rows.into_iter().flatten().collect();
        Ok(c)
    }

    pub fn get(&self, idx: &[usize]) -> &RF {
        let s = strides(&self.shape);
        &self.entries[idx.iter().zip(&s).map(|(a, b)| a * b).sum::<usize>()]
    }

    fn set(&mut self, idx: &[usize], v: RF) {
        let s = strides(&self.shape);
        let k = idx.iter().zip(&s).map(|(a, b)| a * b).sum::<usize>();
        self.entries[k] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn sub(&self, o: &CochainValue) -> Result<CochainValue> {
        if self.shape != o.shape || self.kinds != o.kinds || self.chart != o.chart {
            return Err(Error::Geometry("cochain shape mismatch".to_string()));
        }
        let mut out = self.clone();
        out.entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect();
        Ok(out)
    }

    pub fn neg(&self) -> CochainValue {
        let mut out = self.clone();
        out.entries = self.entries.iter().map(|a| -a).collect();
        out
    }

    /// Rewrites the tensor in the frame of `to`.
    pub fn transform(&self, atlas: &Atlas, to: &str) -> Result<CochainValue> {
        if self.chart == to {
            return Ok(self.clone());
        }
        let b = atlas.chart(&self.chart).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", self.chart)))?;
        let a = atlas.chart(to).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", to)))?;
        let m = a.codim();
        // jba: dz_to/dz_from in `from`, jab: dz_from/dz_to in `to`
        let jba = atlas.jacobian(&b.name, to)?;
        let jab = atlas.jacobian(to, &b.name)?;
        let on_a = |r: &RF| -> Result<RF> { a.restrict(r) };
        let from_b = |r: &RF| -> Result<RF> { atlas.to_chart_on_s(&b.restrict(r)?, &b.name, to) };
        // factor matrices fac[k][new][old] in `to` tangential coordinates
        let mut facs: Vec<Vec<Vec<RF>>> = Vec::new();
        for kind in &self.kinds {
            let f = match kind {
                IndexKind::Tangent => (0..a.tangential.len())
                    .map(|p| (0..b.tangential.len()).map(|q| from_b(&jba[m + p][m + q])).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
                IndexKind::Normal => (0..m)
                    .map(|r| (0..m).map(|t| from_b(&jba[r][t])).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
                IndexKind::Conormal => (0..m)
                    .map(|s| (0..m).map(|t| on_a(&jab[t][s])).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
                IndexKind::Cotangent => (0..a.tangential.len())
                    .map(|p| (0..b.tangential.len()).map(|q| on_a(&jab[m + q][m + p])).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?,
            };
            facs.push(f);
        }
        let moved: Vec<RF> = self.entries.iter().map(from_b).collect::<Result<_>>()?;
        let mut out = CochainValue::zeros(a, self.other.as_deref(), &self.kinds);
        for ni in 0..out.entries.len() {
            let nidx = unflatten(ni, &out.shape);
            let mut acc = RF::zero();
            for (oi, v) in moved.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let oidx = unflatten(oi, &self.shape);
                let mut term = v.clone();
                for (k, f) in facs.iter().enumerate() {
                    term = &term * &f[nidx[k]][oidx[k]];
                    if term.is_zero() {
                        break;
                    }
                }
                acc = &acc + &term;
            }
            out.set(&nidx, acc);
        }
        if let Some(o) = &self.other {
            out.other = Some(if o == to { self.chart.clone() } else { o.clone() });
        }
        Ok(out)
    }
}

impl fmt::Debug for CochainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for CochainValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| format!("{:?}: {}", unflatten(i, &self.shape), e))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

/// `s_{ba}` in the frame of `a`: entries `[p][s] = dz_a^p/dz_b^q dz_b^q/dz_a^s |_S`.
pub fn conormal_cocycle(atlas: &Atlas, a: &str, b: &str) -> Result<CochainValue> {
    let ca = atlas.chart(a).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", a)))?;
    let m = ca.codim();
    let jab = atlas.jacobian(a, b)?;
    let jba = atlas.jacobian(b, a)?;
    let mut out = CochainValue::zeros(ca, Some(b), &[IndexKind::Tangent, IndexKind::Conormal]);
    let nb = atlas.chart(b).expect("checked").dim();
    for p in 0..ca.tangential.len() {
        for s in 0..m {
            let mut acc = RF::zero();
            for q in m..nb {
                let d = atlas.to_chart(&jba[m + p][q], b, a)?;
                acc = &acc + &(&d * &jab[q][s]);
            }
            out.set(&[p, s], ca.restrict(&acc)?);
        }
    }
    Ok(out)
}

/// `g_{ab}` in the frame of `a`: entries
/// `[p][s][r] = dz_b^t/dz_a^s d2z_a^r/dz_b^p dz_b^t |_S` (`p` a tangential index of `b`).
pub fn atiyah_cocycle(atlas: &Atlas, a: &str, b: &str) -> Result<CochainValue> {
    let ca = atlas.chart(a).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", a)))?;
    let m = ca.codim();
    let jab = atlas.jacobian(a, b)?;
    let hba = atlas.hessian(b, a)?;
    let mut out = CochainValue::zeros(ca, Some(b), &[IndexKind::Cotangent, IndexKind::Conormal, IndexKind::Normal]);
    for p in 0..ca.tangential.len() {
        for s in 0..m {
            for r in 0..m {
                let mut acc = RF::zero();
                for t in 0..m {
                    let h = atlas.to_chart(&hba[r][m + p][t], b, a)?;
                    acc = &acc + &(&jab[t][s] * &h);
                }
                out.set(&[p, s, r], ca.restrict(&acc)?);
            }
        }
    }
    // the dz_b^p index is re-expressed in the frame of `a`
    let cb = atlas.chart(b).expect("checked");
    let mut fixed = out.clone();
    for s in 0..m {
        for r in 0..m {
            for p in 0..ca.tangential.len() {
                let mut acc = RF::zero();
                for q in 0..cb.tangential.len() {
                    let d = ca.restrict(&jab[m + q][m + p])?;
                    acc = &acc + &(out.get(&[q, s, r]) * &d);
                }
                fixed.set(&[p, s, r], acc);
            }
        }
    }
    Ok(fixed)
}

/// Residual `cocycle_{ba} - (T(cochain_b) - cochain_a)` on every overlap.
/// Keys of `cocycle` are `(a, b)` with values in the frame of `a`.
pub fn coboundary_residual(
    atlas: &Atlas,
    cocycle: &BTreeMap<(String, String), CochainValue>,
    cochain: &BTreeMap<String, CochainValue>,
) -> Result<BTreeMap<(String, String), CochainValue>> {
    let mut out = BTreeMap::new();
    for ((a, b), v) in cocycle {
        let ca = cochain.get(a).ok_or_else(|| Error::Geometry(format!("cochain missing on chart `{}`", a)))?;
        let cb = cochain.get(b).ok_or_else(|| Error::Geometry(format!("cochain missing on chart `{}`", b)))?;
        let tb = cb.transform(atlas, a)?;
        let mut d = tb.sub(ca)?;
        d.other = v.other.clone();
        out.insert((a.clone(), b.clone()), v.sub(&d)?);
    }
    Ok(out)
}

/// `C_a(z) = (z', z'' - c z')` for `sign < 0` and its inverse
/// `(z', z'' + c z')` for `sign > 0`, in the chart's own variables.
pub fn chart_correction(chart: &Chart, cochain: Option<&CochainValue>, sign: i64) -> Vec<RF> {
    let m = chart.codim();
    let mut out: Vec<RF> = chart.normal.iter().map(|v| RF::var(v)).collect();
    for (p, v) in chart.tangential.iter().enumerate() {
        let mut e = RF::var(v);
        if let Some(c) = cochain {
            for r in 0..m {
                let term = c.get(&[p, r]) * &RF::var(&chart.normal[r]);
                e = if sign < 0 { &e - &term } else { &e + &term };
            }
        }
        out.push(e);
    }
    out
}

/// Replaces `z^p` by `z^p - c^p_r z^r` in every chart; requires constant
/// cochains solving `s_{ba} = T c_b - c_a`.
pub fn apply_splitting_correction(atlas: &Atlas, cochain: &BTreeMap<String, CochainValue>) -> Result<Atlas> {
    let mut coc = BTreeMap::new();
    for (a, b) in atlas.pairs() {
        coc.insert((a.clone(), b.clone()), conormal_cocycle(atlas, &a, &b)?);
    }
    let res = coboundary_residual(atlas, &coc, cochain)?;
    let bad: Vec<String> =
        res.iter().filter(|(_, v)| !v.is_zero()).map(|((a, b), v)| format!("({}, {}): {}", a, b, v)).collect();
    if !bad.is_empty() {
        return Err(Error::Geometry(format!("cochain is not a primitive of the cocycle; residual {}", bad.join("; "))));
    }
    for (name, c) in cochain {
        if let Some(e) = c.entries.iter().find(|e| e.as_constant().is_none()) {
            return Err(Error::Unsupported(format!(
                "splitting correction with non-constant cochain entry `{}` on chart `{}`",
                e, name
            )));
        }
    }
    let correction = |chart: &Chart, sign: i64| chart_correction(chart, cochain.get(&chart.name), sign);
    let mut transitions = Vec::new();
    for (a, b) in atlas.overlaps() {
        let ca = atlas.chart(&a).expect("pair");
        let cb = atlas.chart(&b).expect("pair");
        let t = atlas.transition(&a, &b).expect("pair");
        let inv_a: BTreeMap<String, RF> = ca.vars().into_iter().zip(correction(ca, 1)).collect();
        let inv_b: BTreeMap<String, RF> = cb.vars().into_iter().zip(correction(cb, 1)).collect();
        let fwd_b: BTreeMap<String, RF> = cb.vars().into_iter().zip(t.forward.iter().cloned()).collect();
        let bwd_a: BTreeMap<String, RF> = ca.vars().into_iter().zip(t.backward.iter().cloned()).collect();
        // new forward: C_b o phi o C_a^{-1}
        let forward = correction(cb, -1)
            .iter()
            .map(|e| e.substitute(&fwd_b)?.substitute(&inv_a))
            .collect::<Result<Vec<_>>>()?;
        let backward = correction(ca, -1)
            .iter()
            .map(|e| e.substitute(&bwd_a)?.substitute(&inv_b))
            .collect::<Result<Vec<_>>>()?;
        transitions.push(Transition { from: a.clone(), to: b.clone(), forward, backward });
    }
    let out = Atlas::new(atlas.charts().to_vec(), transitions)?;
    let cls = classify_atlas(&out)?;
    if !cls.splitting {
        return Err(Error::Geometry(format!("corrected atlas is still not splitting: {:?}", cls.witnesses)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    fn mat(chart: &Chart, v: i64) -> CochainValue {
        CochainValue::from_matrix(chart, vec![vec![RF::from_int(v)]]).unwrap()
    }

    #[test]
    fn splitting_atlases_have_zero_conormal_cocycle() {
        for at in [blowup(), p2_line(), product()] {
            for (a, b) in at.pairs() {
                assert!(conormal_cocycle(&at, &a, &b).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn shear_conormal_cocycle() {
        // y = w - u gives dy/dw * dw/dx = 1
        let at = nonsplit();
        let s = conormal_cocycle(&at, "A", "B").unwrap();
        assert_eq!(s.get(&[0, 0]), &RF::one());
        let r = conormal_cocycle(&at, "B", "A").unwrap();
        assert_eq!(r.get(&[0, 0]), &RF::from_int(-1));
        // antisymmetry
        assert_eq!(r.transform(&at, "A").unwrap().entries, s.neg().entries);
    }

    #[test]
    fn product_and_linear_atiyah_cocycle_vanish() {
        let at = product();
        for (a, b) in at.pairs() {
            assert!(atiyah_cocycle(&at, &a, &b).unwrap().is_zero());
        }
        let at = nonsplit();
        assert!(atiyah_cocycle(&at, "A", "B").unwrap().is_zero());
    }

    #[test]
    fn blowup_atiyah_cocycle() {
        // x = s y: d2x/ds dy = 1, dy/dx = t, and ds = -dt/t^2, so g = -1/t
        let at = blowup();
        let g = atiyah_cocycle(&at, "A", "B").unwrap();
        let t = RF::var("t");
        let expect = -(&t * &RF::one().checked_div(&t.pow(2)).unwrap());
        assert_eq!(g.get(&[0, 0, 0]), &expect);
        let h = atiyah_cocycle(&at, "B", "A").unwrap();
        assert_eq!(h.transform(&at, "A").unwrap().entries, g.neg().entries);
    }

    #[test]
    fn correction_repairs_shear() {
        let at = nonsplit();
        let mut c = BTreeMap::new();
        c.insert("A".to_string(), mat(at.chart("A").unwrap(), -1));
        c.insert("B".to_string(), mat(at.chart("B").unwrap(), 0));
        let fixed = apply_splitting_correction(&at, &c).unwrap();
        assert!(classify_atlas(&fixed).unwrap().splitting);
        let t = fixed.transition("A", "B").unwrap();
        assert_eq!(t.forward[1], RF::var("y"));
    }

    #[test]
    fn wrong_cochain_reports_residual() {
        let at = nonsplit();
        let mut c = BTreeMap::new();
        c.insert("A".to_string(), mat(at.chart("A").unwrap(), 0));
        c.insert("B".to_string(), mat(at.chart("B").unwrap(), 0));
        let e = apply_splitting_correction(&at, &c).unwrap_err();
        assert!(e.to_string().contains("residual"));
    }

    #[test]
    fn zero_correction_keeps_atlas() {
        let at = blowup();
        let mut c = BTreeMap::new();
        c.insert("A".to_string(), mat(at.chart("A").unwrap(), 0));
        c.insert("B".to_string(), mat(at.chart("B").unwrap(), 0));
        assert_eq!(apply_splitting_correction(&at, &c).unwrap(), at);
    }
}

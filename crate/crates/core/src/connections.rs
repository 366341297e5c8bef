//! The Atiyah sheaf in local frames, the universal connection, splitting
//! morphisms `psi` and their connection and curvature matrices.
//!
//! An element of the Atiyah sheaf in a chart is `b^p pi(d_p) + e^r_s pi([z^s] d_r)`;
//! every component is a function of the chart's tangential variables.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::linalg;
use crate::atlas::{classify_atlas, Atlas, Chart};
use crate::algebra::RationalFunction as RF;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct AtiyahElement {
    pub chart: String,
    /// Coefficients of `pi(d/dz^p)`, `p` over the tangential block.
    pub b: Vec<RF>,
    /// `e[r][s]`, coefficient of `pi([z^s] d/dz^r)`.
    pub e: Vec<Vec<RF>>,
}

fn chart_of<'a>(atlas: &'a Atlas, name: &str) -> Result<&'a Chart> {
    atlas.chart(name).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", name)))
}

impl AtiyahElement {
    pub fn zero(chart: &Chart) -> Self {
        let m = chart.codim();
        AtiyahElement {
            chart: chart.name.clone(),
            b: vec![RF::zero(); chart.tangential.len()],
            e: vec![vec![RF::zero(); m]; m],
        }
    }

    /// `pi(d/dz^p)` for the tangential index `p`.
    pub fn tangent_frame(chart: &Chart, p: usize) -> Self {
        let mut q = Self::zero(chart);
        q.b[p] = RF::one();
        q
    }

    /// `pi([z^s] d/dz^r)`.
    pub fn endo_frame(chart: &Chart, r: usize, s: usize) -> Self {
        let mut q = Self::zero(chart);
        q.e[r][s] = RF::one();
        q
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().all(|x| x.is_zero()) && self.e.iter().flatten().all(|x| x.is_zero())
    }

    /// The endomorphism-only part is what `ker theta_1` sees.
    pub fn is_vertical(&self) -> bool {
        self.b.iter().all(|x| x.is_zero())
    }

    fn zip(&self, o: &AtiyahElement, f: impl Fn(&RF, &RF) -> RF) -> AtiyahElement {
        AtiyahElement {
            chart: self.chart.clone(),
            b: self.b.iter().zip(&o.b).map(|(x, y)| f(x, y)).collect(),
            e: self.e.iter().zip(&o.e).map(|(r, s)| r.iter().zip(s).map(|(x, y)| f(x, y)).collect()).collect(),
        }
    }

    pub fn add(&self, o: &AtiyahElement) -> AtiyahElement {
        self.zip(o, |x, y| x + y)
    }

    pub fn sub(&self, o: &AtiyahElement) -> AtiyahElement {
        self.zip(o, |x, y| x - y)
    }

    pub fn scale(&self, c: &RF) -> AtiyahElement {
        self.zip(self, |x, _| c * x)
    }

    /// `b^p d_p + e^r_s z^s d_r` in the chart's variables.
    pub fn representative(&self, chart: &Chart) -> Vec<RF> {
        let m = chart.codim();
        let mut v = Vec::with_capacity(chart.dim());
        for r in 0..m {
            let mut acc = RF::zero();
            for s in 0..m {
                acc = &acc + &(&self.e[r][s] * &RF::var(&chart.normal[s]));
            }
            v.push(acc);
        }
        v.extend(self.b.iter().cloned());
        v
    }

    /// Rewrites the element in the frame of chart `to`.
    pub fn transform(&self, atlas: &Atlas, to: &str) -> Result<AtiyahElement> {
        if self.chart == to {
            return Ok(self.clone());
        }
        let a = chart_of(atlas, &self.chart)?;
        let b = chart_of(atlas, to)?;
        let m = a.codim();
        let n = a.dim();
        let jab = atlas.jacobian(&a.name, to)?;
        let hab = atlas.hessian(&a.name, to)?;
        let jba = atlas.jacobian(to, &a.name)?;
        let on_b = |r: &RF| -> Result<RF> { atlas.to_chart_on_s(&a.restrict(r)?, &a.name, to) };
        let mut out = AtiyahElement::zero(b);
        for (pp, slot) in out.b.iter_mut().enumerate() {
            let mut acc = RF::zero();
            for (q, bq) in self.b.iter().enumerate() {
                acc = &acc + &(&jab[m + pp][m + q] * bq);
            }
            *slot = on_b(&acc)?;
        }
        for rp in 0..m {
            // X_k = d_k (dz_b^{r'}/dz_a^j v^j) on S, for every index k of `a`
            let mut x = Vec::with_capacity(n);
            for k in 0..n {
                let mut acc = RF::zero();
                for (p, bp) in self.b.iter().enumerate() {
                    acc = &acc + &(&hab[rp][k][m + p] * bp);
                }
                if k < m {
                    for r in 0..m {
                        acc = &acc + &(&jab[rp][r] * &self.e[r][k]);
                    }
                }
                x.push(on_b(&acc)?);
            }
            for sp in 0..m {
                let mut acc = RF::zero();
                for (k, xk) in x.iter().enumerate() {
                    acc = &acc + &(&b.restrict(&jba[k][sp])? * xk);
                }
                out.e[rp][sp] = acc;
            }
        }
        Ok(out)
    }
}

/// `pi(v)` for a vector field whose normal components vanish on `S`.
pub fn atiyah_project(v: &[RF], chart: &Chart) -> Result<AtiyahElement> {
    let m = chart.codim();
    if v.len() != chart.dim() {
        return Err(Error::Geometry(format!("field has {} components, chart `{}` has {}", v.len(), chart.name, chart.dim())));
    }
    let mut out = AtiyahElement::zero(chart);
    for r in 0..m {
        let v0 = chart.restrict(&v[r])?;
        if !v0.is_zero() {
            return Err(Error::Geometry(format!(
                "field is not tangent to S: component d/d{} restricts to {}",
                chart.normal[r], v0
            )));
        }
        for s in 0..m {
            out.e[r][s] = chart.restrict(&v[r].derivative(&chart.normal[s]))?;
        }
    }
    for p in 0..chart.tangential.len() {
        out.b[p] = chart.restrict(&v[m + p])?;
    }
    Ok(out)
}

/// Extension of `pi` to all fields, using the lifting of the atlas:
/// `pi(v - rho([v^r]_1) d_r)`. Needs a comfortable atlas.
pub fn tilde_pi(v: &[RF], atlas: &Atlas, chart: &str) -> Result<AtiyahElement> {
    let cls = classify_atlas(atlas)?;
    if !cls.comfortable {
        let w = cls
            .witnesses
            .iter()
            .map(|w| format!("{} fails: {} = {} ({} -> {})", w.condition, w.derivative, w.value, w.from, w.to))
            .collect::<Vec<_>>()
            .join("; ");
        return Err(Error::Geometry(format!("atlas is not comfortable: {}", w)));
    }
    let c = chart_of(atlas, chart)?;
    let mut w = v.to_vec();
    for r in 0..c.codim() {
        let v0 = c.restrict(&w[r])?;
        w[r] = &w[r] - &v0;
    }
    atiyah_project(&w, c)
}

/// `[u, v]^j = u^k d_k v^j - v^k d_k u^j`.
pub fn lie_bracket(u: &[RF], v: &[RF], vars: &[String]) -> Vec<RF> {
    (0..u.len())
        .map(|j| {
            let mut acc = RF::zero();
            for (k, x) in vars.iter().enumerate() {
                acc = &acc + &(&u[k] * &v[j].derivative(x));
                acc = &acc - &(&v[k] * &u[j].derivative(x));
            }
            acc
        })
        .collect()
}

/// Algebroid bracket: bracket of representatives, projected back.
pub fn atiyah_bracket(q1: &AtiyahElement, q2: &AtiyahElement, chart: &Chart) -> Result<AtiyahElement> {
    let u = q1.representative(chart);
    let v = q2.representative(chart);
    atiyah_project(&lie_bracket(&u, &v, &chart.vars()), chart)
}

/// `p_2([v, d_r])` on `S`, from a representative field.
pub fn universal_connection_field(v: &[RF], chart: &Chart, r: usize) -> Result<Vec<RF>> {
    let x = &chart.normal[r];
    (0..chart.codim()).map(|t| chart.restrict(&-v[t].derivative(x))).collect()
}

/// Universal connection `X_q(d_r)`: `m` normal components.
pub fn universal_connection(q: &AtiyahElement, chart: &Chart, r: usize) -> Result<Vec<RF>> {
    universal_connection_field(&q.representative(chart), chart, r)
}

/// One frame element of `F` on `S` with its image in the Atiyah sheaf.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiImage {
    /// Tangential components on `S`.
    pub frame: Vec<RF>,
    pub image: AtiyahElement,
}

/// A morphism `F -> A` given chart by chart on a frame of `F`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PsiMorphism {
    pub charts: BTreeMap<String, Vec<PsiImage>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionMatrix {
    pub chart: String,
    pub direction: Vec<String>,
    /// `entries[s][r] = c^s_r`.
    pub entries: Vec<Vec<String>>,
    #[serde(skip)]
    pub values: Vec<Vec<RF>>,
}

/// Coefficients `h` with `sum h_k frame_k = w`.
fn in_span(frames: &[Vec<RF>], w: &[RF]) -> Option<Vec<RF>> {
    if frames.is_empty() {
        return if w.iter().all(|x| x.is_zero()) { Some(vec![]) } else { None };
    }
    let a: Vec<Vec<RF>> = (0..w.len()).map(|p| frames.iter().map(|f| f[p].clone()).collect()).collect();
    let h = linalg::solve(&a, w)?;
    Some(h)
}

fn push_on_s(atlas: &Atlas, w: &[RF], from: &str, to: &str) -> Result<Vec<RF>> {
    let a = chart_of(atlas, from)?;
    let m = a.codim();
    let jac = atlas.jacobian(from, to)?;
    let mut out = Vec::new();
    for row in &jac[m..] {
        let mut acc = RF::zero();
        for (q, wq) in w.iter().enumerate() {
            acc = &acc + &(&row[m + q] * wq);
        }
        out.push(atlas.to_chart_on_s(&a.restrict(&acc)?, from, to)?);
    }
    Ok(out)
}

impl PsiMorphism {
    /// Violations of `theta_1 o psi = id`.
    pub fn section_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (c, imgs) in &self.charts {
            for (k, im) in imgs.iter().enumerate() {
                if im.frame != im.image.b {
                    out.push(format!("chart {} frame {}: tangential part {:?} differs from {:?}", c, k, im.image.b, im.frame));
                }
            }
        }
        out
    }

    /// On every ordered overlap `(a, b)`: `T(psi_b(w)) - psi_a(T w)` in `a`'s
    /// frame, for each frame element `w` of `b`.
    pub fn overlap_residuals(&self, atlas: &Atlas) -> Result<BTreeMap<(String, String), Vec<AtiyahElement>>> {
        let mut out = BTreeMap::new();
        for (a, b) in atlas.pairs() {
            let (Some(ia), Some(ib)) = (self.charts.get(&a), self.charts.get(&b)) else { continue };
            let fa: Vec<Vec<RF>> = ia.iter().map(|i| i.frame.clone()).collect();
            let mut res = Vec::new();
            for im in ib {
                let w = push_on_s(atlas, &im.frame, &b, &a)?;
                let h = in_span(&fa, &w).ok_or_else(|| {
                    Error::Geometry(format!("frame of `{}` does not map into the frame span of `{}`", b, a))
                })?;
                let mut expect = AtiyahElement::zero(chart_of(atlas, &a)?);
                for (hk, ik) in h.iter().zip(ia) {
                    expect = expect.add(&ik.image.scale(hk));
                }
                res.push(im.image.transform(atlas, &a)?.sub(&expect));
            }
            out.insert((a, b), res);
        }
        Ok(out)
    }

    /// `psi(direction)` for a tangential field in the span of the chart frame.
    pub fn apply(&self, chart: &Chart, direction: &[RF]) -> Result<AtiyahElement> {
        let imgs = self
            .charts
            .get(&chart.name)
            .ok_or_else(|| Error::Geometry(format!("psi undefined on chart `{}`", chart.name)))?;
        let frames: Vec<Vec<RF>> = imgs.iter().map(|i| i.frame.clone()).collect();
        let h = in_span(&frames, direction)
            .ok_or_else(|| Error::Geometry(format!("direction is not in the span of F on `{}`", chart.name)))?;
        let mut q = AtiyahElement::zero(chart);
        for (hk, ik) in h.iter().zip(imgs) {
            q = q.add(&ik.image.scale(hk));
        }
        Ok(q)
    }
}

/// `C = (c^s_r)` along `direction`, with `c^s_r` the `e`-block of `psi(direction)`.
pub fn connection_matrix(psi: &PsiMorphism, chart: &Chart, direction: &[RF]) -> Result<ConnectionMatrix> {
    let q = psi.apply(chart, direction)?;
    Ok(ConnectionMatrix {
        chart: chart.name.clone(),
        direction: direction.iter().map(|d| d.to_string()).collect(),
        entries: q.e.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        values: q.e,
    })
}

/// Universal-connection matrix `G[t][r]` of `X_q(d_r) = G[t][r] d_t`.
fn gamma(q: &AtiyahElement, chart: &Chart) -> Result<Vec<Vec<RF>>> {
    let m = chart.codim();
    let cols: Vec<Vec<RF>> = (0..m).map(|r| universal_connection(q, chart, r)).collect::<Result<_>>()?;
    Ok((0..m).map(|t| (0..m).map(|r| cols[r][t].clone()).collect()).collect())
}

fn directional(u: &[RF], f: &RF, chart: &Chart) -> RF {
    let mut acc = RF::zero();
    for (up, y) in u.iter().zip(&chart.tangential) {
        acc = &acc + &(up * &f.derivative(y));
    }
    acc
}

/// Curvature of the connection `X_{psi(.)}` on the frame pair `(i, j)` of `chart`.
pub fn curvature(psi: &PsiMorphism, chart: &Chart, i: usize, j: usize) -> Result<Vec<Vec<RF>>> {
    let imgs = psi
        .charts
        .get(&chart.name)
        .ok_or_else(|| Error::Geometry(format!("psi undefined on chart `{}`", chart.name)))?;
    let (u, v) = (&imgs[i], &imgs[j]);
    let gu = gamma(&u.image, chart)?;
    let gv = gamma(&v.image, chart)?;
    let ty = chart.tangential.clone();
    let br = lie_bracket(&u.frame, &v.frame, &ty);
    let frames: Vec<Vec<RF>> = imgs.iter().map(|i| i.frame.clone()).collect();
    let h = in_span(&frames, &br)
        .ok_or_else(|| Error::Geometry(format!("frame of F on `{}` is not involutive", chart.name)))?;
    let mut gb = vec![vec![RF::zero(); chart.codim()]; chart.codim()];
    for (hk, ik) in h.iter().zip(imgs) {
        let g = gamma(&ik.image, chart)?;
        for (row, grow) in gb.iter_mut().zip(&g) {
            for (x, y) in row.iter_mut().zip(grow) {
                *x = &*x + &(hk * y);
            }
        }
    }
    let uv = linalg::mat_mul(&gu, &gv);
    let vu = linalg::mat_mul(&gv, &gu);
    let m = chart.codim();
    let mut out = vec![vec![RF::zero(); m]; m];
    for t in 0..m {
        for r in 0..m {
            let x = &directional(&u.frame, &gv[t][r], chart) - &directional(&v.frame, &gu[t][r], chart);
            let y = &uv[t][r] - &vu[t][r];
            out[t][r] = &(&x + &y) - &gb[t][r];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::fixtures::*;
    use crate::parser::parse_expression;

    fn f(c: &Chart, s: &[&str]) -> Vec<RF> {
        s.iter().map(|e| parse_expression(e, &c.vars()).unwrap()).collect()
    }

    fn plane() -> Chart {
        Chart::new("A", &["x"], &["y"])
    }

    #[test]
    fn project_frame_elements() {
        let c = plane();
        let q = atiyah_project(&f(&c, &["0", "1"]), &c).unwrap();
        assert_eq!(q, AtiyahElement::tangent_frame(&c, 0));
        let q = atiyah_project(&f(&c, &["x", "0"]), &c).unwrap();
        assert_eq!(q, AtiyahElement::endo_frame(&c, 0, 0));
        let q = atiyah_project(&f(&c, &["x*y^2", "y"]), &c).unwrap();
        assert_eq!(q.b[0], RF::var("y"));
        assert_eq!(q.e[0][0], parse_expression("y^2", &c.vars()).unwrap());
    }

    #[test]
    fn project_rejects_transverse_field() {
        let c = plane();
        let err = atiyah_project(&f(&c, &["1 + x", "y"]), &c).unwrap_err();
        assert!(err.to_string().contains("d/dx"));
    }

    #[test]
    fn tilde_pi_examples() {
        let c = plane();
        let at = Atlas::new(vec![c.clone()], vec![]).unwrap();
        assert!(tilde_pi(&f(&c, &["1", "0"]), &at, "A").unwrap().is_zero());
        let q = tilde_pi(&f(&c, &["y", "1"]), &at, "A").unwrap();
        assert_eq!(q, AtiyahElement::tangent_frame(&c, 0));
        let v = f(&c, &["x*y^2", "y"]);
        assert_eq!(tilde_pi(&v, &at, "A").unwrap(), atiyah_project(&v, &c).unwrap());
    }

    #[test]
    fn tilde_pi_refuses_uncomfortable_atlas() {
        let a = Chart::new("A", &["x"], &["y"]);
        let b = Chart::new("B", &["u"], &["w"]);
        let t = tr(&a, &b, &["x/(1 - x*y)", "y"], &["u/(1 + u*w)", "w"]);
        let at = Atlas::new(vec![a.clone(), b], vec![t]).unwrap();
        let err = tilde_pi(&f(&a, &["1", "0"]), &at, "A").unwrap_err();
        assert!(err.to_string().contains("comfortable"));
    }

    #[test]
    fn universal_connection_examples() {
        let c = plane();
        let q = AtiyahElement::tangent_frame(&c, 0);
        assert!(universal_connection(&q, &c, 0).unwrap()[0].is_zero());
        let q = AtiyahElement::endo_frame(&c, 0, 0);
        assert_eq!(universal_connection(&q, &c, 0).unwrap()[0], RF::from_int(-1));
        // [a(y) x]_2 d_x + [b(y)]_2 d_y -> -a(y)
        let q = atiyah_project(&f(&c, &["(y + 3)*x", "y^2"]), &c).unwrap();
        assert_eq!(universal_connection(&q, &c, 0).unwrap()[0], parse_expression("-y - 3", &c.vars()).unwrap());
    }

    #[test]
    fn universal_connection_on_codim_two() {
        let c = Chart::new("A", &["x1", "x2"], &["y"]);
        // q = pi([z^2] d_1); X_q(d_2) = -d_1
        let q = AtiyahElement::endo_frame(&c, 0, 1);
        let x = universal_connection(&q, &c, 1).unwrap();
        assert_eq!(x, vec![RF::from_int(-1), RF::zero()]);
        assert_eq!(universal_connection(&q, &c, 0).unwrap(), vec![RF::zero(), RF::zero()]);
    }

    #[test]
    fn transform_matches_pushforward() {
        for at in [blowup(), p2_line(), product()] {
            for (a, b) in at.pairs() {
                let ca = at.chart(&a).unwrap();
                let (x, y) = (&ca.normal[0], &ca.tangential[0]);
                let v = f(ca, &[&format!("{x}*({y} + 2) + {x}^2"), &format!("{y}^2 - 1 + {x}*{y}")]);
                let q = atiyah_project(&v, ca).unwrap();
                let pushed = at.push_field(&v, &a, &b).unwrap();
                let direct = atiyah_project(&pushed, at.chart(&b).unwrap()).unwrap();
                assert_eq!(q.transform(&at, &b).unwrap(), direct, "{} -> {}", a, b);
            }
        }
    }

    #[test]
    fn bracket_of_frame_elements() {
        let c = plane();
        let d = AtiyahElement::tangent_frame(&c, 0);
        let mut ye = AtiyahElement::zero(&c);
        ye.e[0][0] = RF::var("y");
        // [d_y, y x d_x] = x d_x
        let br = atiyah_bracket(&d, &ye, &c).unwrap();
        assert_eq!(br, AtiyahElement::endo_frame(&c, 0, 0));
    }

    fn flat_psi() -> (Chart, PsiMorphism) {
        // F spanned by d_y + z x d_x and d_z + y x d_x on C^3, S = {x = 0}
        let c = Chart::new("A", &["x"], &["y", "z"]);
        let q1 = atiyah_project(&f(&c, &["z*x", "1", "0"]), &c).unwrap();
        let q2 = atiyah_project(&f(&c, &["y*x", "0", "1"]), &c).unwrap();
        let imgs = vec![
            PsiImage { frame: f(&c, &["1", "0"]), image: q1 },
            PsiImage { frame: f(&c, &["0", "1"]), image: q2 },
        ];
        let mut psi = PsiMorphism::default();
        psi.charts.insert("A".into(), imgs);
        (c, psi)
    }

    #[test]
    fn flat_and_perturbed_curvature() {
        let (c, mut psi) = flat_psi();
        assert!(psi.section_violations().is_empty());
        assert!(curvature(&psi, &c, 0, 1).unwrap()[0][0].is_zero());
        assert!(curvature(&psi, &c, 0, 0).unwrap()[0][0].is_zero());
        let im = &mut psi.charts.get_mut("A").unwrap()[1].image;
        im.e[0][0] = &im.e[0][0] + &RF::var("y");
        assert!(!curvature(&psi, &c, 0, 1).unwrap()[0][0].is_zero());
    }

    #[test]
    fn non_involutive_frame_is_an_error() {
        let c = Chart::new("A", &["x"], &["y", "z", "t"]);
        let imgs = vec![
            PsiImage { frame: f(&c, &["0", "y", "1"]), image: AtiyahElement::zero(&c) },
            PsiImage { frame: f(&c, &["1", "0", "0"]), image: AtiyahElement::zero(&c) },
        ];
        let mut psi = PsiMorphism::default();
        psi.charts.insert("A".into(), imgs);
        assert!(curvature(&psi, &c, 0, 1).is_err());
    }

    #[test]
    fn connection_matrix_of_product_coordinate_foliation() {
        let at = product();
        let mut psi = PsiMorphism::default();
        for c in at.charts() {
            psi.charts.insert(
                c.name.clone(),
                vec![PsiImage { frame: vec![RF::one()], image: AtiyahElement::tangent_frame(c, 0) }],
            );
        }
        let c = at.chart("A").unwrap();
        let cm = connection_matrix(&psi, c, &[RF::var("y")]).unwrap();
        assert!(cm.values[0][0].is_zero());
        let res = psi.overlap_residuals(&at).unwrap();
        assert!(res.values().flatten().all(|q| q.is_zero()));
        assert!(psi.section_violations().is_empty());
    }
}

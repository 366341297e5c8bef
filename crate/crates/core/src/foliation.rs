//! Holomorphic foliations near `S`: tangency, the sigma-projection, canonical
//! frames, the transfer section, the obstruction cocycle `f`, splitting
//! morphisms `psi` and Camacho-Sad indices.

use std::collections::BTreeMap;

use crate::algebra::{linalg, Polynomial, RationalFunction as RF};
use crate::atlas::{classify_atlas, Atlas, Chart};
use crate::connections::{atiyah_project, curvature, lie_bracket, tilde_pi, AtiyahElement, PsiImage, PsiMorphism};
use crate::error::{Error, Result};
use crate::harness::report::Check;
use crate::indices::{nowhere_degenerate, subsets, LocalIndexData};
use crate::residue::{residue_at_point_1d, OneForm1D};
use crate::algebra::GaussianRational as G;

#[derive(Debug, Clone, PartialEq)]
pub struct Foliation {
    pub name: String,
    pub dim: usize,
    /// Per chart, `dim` fields with one component per chart variable.
    pub generators: BTreeMap<String, Vec<Vec<RF>>>,
}

fn chart<'a>(atlas: &'a Atlas, name: &str) -> Result<&'a Chart> {
    atlas.chart(name).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", name)))
}

fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let g = a.gcd(b);
    (a * b).div_exact(&g).expect("gcd divides")
}

/// Clears denominators and common factors, so the field has isolated zeros.
pub fn saturate(v: &[RF]) -> Vec<RF> {
    let mut l = Polynomial::one();
    for c in v.iter().filter(|c| !c.is_zero()) {
        l = lcm(&l, c.den());
    }
    let nums: Vec<Polynomial> = v.iter().map(|c| (&RF::from_poly(l.clone()) * c).num().clone()).collect();
    let mut g = Polynomial::zero();
    for n in nums.iter().filter(|n| !n.is_zero()) {
        g = if g.is_zero() { n.clone() } else { g.gcd(n) };
    }
    if g.is_zero() {
        return v.to_vec();
    }
    nums.iter().map(|n| RF::from_poly(n.div_exact(&g).expect("gcd divides"))).collect()
}

fn rank_rf(vectors: &[Vec<RF>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    linalg::rank(vectors)
}

impl Foliation {
    /// Fills charts without declared generators by pushing forward, then
    /// saturates one-dimensional foliations.
    pub fn new(atlas: &Atlas, name: &str, declared: &BTreeMap<String, Vec<Vec<RF>>>) -> Result<Self> {
        Self::build(atlas, name, declared, true)
    }

    /// Keeps the declared generators as they are (for globally generated foliations).
    pub fn global(atlas: &Atlas, name: &str, declared: &BTreeMap<String, Vec<Vec<RF>>>) -> Result<Self> {
        Self::build(atlas, name, declared, false)
    }

    fn build(atlas: &Atlas, name: &str, declared: &BTreeMap<String, Vec<Vec<RF>>>, sat: bool) -> Result<Self> {
        let dim = declared.values().next().map(|g| g.len()).ok_or_else(|| Error::Geometry(format!("foliation `{}` has no generators", name)))?;
        if dim == 0 {
            return Err(Error::Geometry(format!("foliation `{}` has no generators", name)));
        }
        let mut generators = BTreeMap::new();
        for (c, gens) in declared {
            let ch = chart(atlas, c)?;
            if gens.len() != dim {
                return Err(Error::Geometry(format!("foliation `{}` has {} generators on `{}` but {} elsewhere", name, gens.len(), c, dim)));
            }
            if gens.iter().any(|g| g.len() != ch.dim()) {
                return Err(Error::Geometry(format!("generator of `{}` on `{}` has the wrong number of components", name, c)));
            }
            generators.insert(c.clone(), gens.clone());
        }
        for ch in atlas.charts() {
            if generators.contains_key(&ch.name) {
                continue;
            }
            let Some(src) = declared.keys().find(|d| atlas.transition(d, &ch.name).is_some()) else {
                return Err(Error::Geometry(format!("foliation `{}` cannot be carried to chart `{}`", name, ch.name)));
            };
            let gens = declared[src].iter().map(|g| atlas.push_field(g, src, &ch.name)).collect::<Result<Vec<_>>>()?;
            generators.insert(ch.name.clone(), gens);
        }
        if sat && dim == 1 {
            for gens in generators.values_mut() {
                gens[0] = saturate(&gens[0]);
            }
        }
        for (c, gens) in &generators {
            if rank_rf(gens) < dim {
                return Err(Error::Geometry(format!("generators of `{}` are linearly dependent on chart `{}`", name, c)));
            }
            let vars = chart(atlas, c)?.vars();
            for i in 0..dim {
                for j in i + 1..dim {
                    let mut m = gens.clone();
                    m.push(lie_bracket(&gens[i], &gens[j], &vars));
                    if rank_rf(&m) > dim {
                        return Err(Error::Geometry(format!("foliation `{}` is not involutive on chart `{}`", name, c)));
                    }
                }
            }
        }
        Ok(Foliation { name: name.to_string(), dim, generators })
    }

    pub fn on(&self, chart: &str) -> Result<&Vec<Vec<RF>>> {
        self.generators.get(chart).ok_or_else(|| Error::Geometry(format!("foliation `{}` undefined on chart `{}`", self.name, chart)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangencyReport {
    pub tangent: bool,
    /// Normal components that do not vanish on `S`.
    pub witnesses: Vec<String>,
}

pub fn tangency_classify(f: &Foliation, atlas: &Atlas) -> Result<TangencyReport> {
    let mut witnesses = Vec::new();
    for (c, gens) in &f.generators {
        let ch = chart(atlas, c)?;
        let mut all_zero = true;
        for (k, g) in gens.iter().enumerate() {
            for (j, comp) in g.iter().enumerate() {
                let r = ch.restrict(comp)?;
                if r.is_zero() {
                    continue;
                }
                all_zero = false;
                if j < ch.codim() {
                    witnesses.push(format!("chart {} generator {}: d/d{} restricts to {}", c, k + 1, ch.normal[j], r));
                }
            }
        }
        if all_zero {
            return Err(Error::Geometry(format!("S inside singular locus of `{}` on chart `{}`", f.name, c)));
        }
    }
    Ok(TangencyReport { tangent: witnesses.is_empty(), witnesses })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaReport {
    pub chart: String,
    /// `sigma(generator)|_S`, tangential components.
    pub generators: Vec<Vec<RF>>,
    pub rank: usize,
    pub involutive: bool,
    /// All `l x l` minors of the projected generators.
    pub minors: Vec<RF>,
    /// gcd of the minors' numerators: the codimension-one part of the degeneracy locus.
    pub degeneracy: Polynomial,
}

/// Projection along the lifting induced by `chart` (drop normal
/// components, restrict to `S`), with the faithfulness diagnosis.
pub fn sigma_project(f: &Foliation, atlas: &Atlas, chart_name: &str) -> Result<SigmaReport> {
    let ch = chart(atlas, chart_name)?;
    let m = ch.codim();
    let gens: Vec<Vec<RF>> = f
        .on(chart_name)?
        .iter()
        .map(|g| g[m..].iter().map(|c| ch.restrict(c)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rank = rank_rf(&gens);
    if rank < f.dim {
        return Err(Error::Geometry(format!(
            "lifting not F-faithful anywhere on chart `{}`: projected rank {} < {}",
            chart_name, rank, f.dim
        )));
    }
    let d = ch.tangential.len();
    let mut minors = Vec::new();
    let mut degeneracy = Polynomial::zero();
    for rows in subsets(d, f.dim) {
        let mat: Vec<Vec<RF>> = rows.iter().map(|&p| gens.iter().map(|g| g[p].clone()).collect()).collect();
        let det = linalg::det(&mat);
        if !det.is_zero() {
            degeneracy = if degeneracy.is_zero() { det.num().clone() } else { degeneracy.gcd(det.num()) };
        }
        minors.push(det);
    }
    let mut involutive = true;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let mut mm = gens.clone();
            mm.push(lie_bracket(&gens[i], &gens[j], &ch.tangential));
            if rank_rf(&mm) > f.dim {
                involutive = false;
            }
        }
    }
    Ok(SigmaReport { chart: chart_name.to_string(), generators: gens, rank, involutive, minors, degeneracy })
}

/// The frame `v_{p'}` of `F` normalised by `sigma(v_{p'})^{q'} = delta` on
/// the selected tangential indices `P'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFrame {
    pub chart: String,
    /// Tangential positions (0-based within the tangential block) forming `P'`.
    pub selected: Vec<usize>,
    pub fields: Vec<Vec<RF>>,
}

impl CanonicalFrame {
    /// `a^r_{p'}` for a normal index `r`.
    pub fn a_normal(&self, r: usize, p: usize) -> &RF {
        &self.fields[p][r]
    }

    /// `sigma(v_{p'})|_S`.
    pub fn sigma_frame(&self, ch: &Chart) -> Result<Vec<Vec<RF>>> {
        let m = ch.codim();
        self.fields.iter().map(|v| v[m..].iter().map(|c| ch.restrict(c)).collect()).collect()
    }
}

pub fn canonical_frame(f: &Foliation, atlas: &Atlas, chart_name: &str) -> Result<CanonicalFrame> {
    let ch = chart(atlas, chart_name)?;
    let m = ch.codim();
    let gens = f.on(chart_name)?;
    let d = ch.tangential.len();
    for rows in subsets(d, f.dim) {
        let b: Vec<Vec<RF>> = rows.iter().map(|&p| gens.iter().map(|g| g[m + p].clone()).collect()).collect();
        let det = linalg::det(&b);
        if det.is_zero() || ch.restrict(&det).map(|r| r.is_zero()).unwrap_or(true) {
            continue;
        }
        let inv = linalg::inverse(&b).expect("nonzero determinant");
        let fields = (0..f.dim)
            .map(|p| {
                (0..ch.dim())
                    .map(|j| {
                        let mut acc = RF::zero();
                        for (k, g) in gens.iter().enumerate() {
                            acc = &acc + &(&inv[k][p] * &g[j]);
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        return Ok(CanonicalFrame { chart: chart_name.to_string(), selected: rows, fields });
    }
    Err(Error::Geometry(format!("atlas not adapted to `{}` on chart `{}`: every tangential minor vanishes on S", f.name, chart_name)))
}

type Matrix = Vec<Vec<RF>>;

/// `c[p'][q']` with `v_{b,q'} = c^{p'}_{q'} v_{a,p'}` on the overlap, in
/// `a` variables, and the residual of that identity.
pub fn calfabeta(atlas: &Atlas, fa: &CanonicalFrame, fb: &CanonicalFrame) -> Result<(Matrix, Matrix)> {
    let ca = chart(atlas, &fa.chart)?;
    let m = ca.codim();
    let l = fa.fields.len();
    let mut c = vec![vec![RF::zero(); l]; l];
    let mut residual = Vec::with_capacity(l);
    for (q, vb) in fb.fields.iter().enumerate() {
        let w = atlas.push_field(vb, &fb.chart, &fa.chart)?;
        for (p, &sel) in fa.selected.iter().enumerate() {
            c[p][q] = w[m + sel].clone();
        }
        let mut res = w.clone();
        for (p, va) in fa.fields.iter().enumerate() {
            for (x, y) in res.iter_mut().zip(va) {
                *x = &*x - &(&c[p][q] * y);
            }
        }
        residual.push(res);
    }
    Ok((c, residual))
}

/// `T[r][p'] = a^r_{p'}|_S`.
pub fn transfer_section(atlas: &Atlas, frame: &CanonicalFrame) -> Result<Vec<Vec<RF>>> {
    let ch = chart(atlas, &frame.chart)?;
    (0..ch.codim()).map(|r| frame.fields.iter().map(|v| ch.restrict(&v[r])).collect()).collect()
}

/// `sum_p' c|_S T_a - (dz_a/dz_b)|_S T_b`, in `a`'s coordinates on `S`.
pub fn transfer_residual(atlas: &Atlas, fa: &CanonicalFrame, fb: &CanonicalFrame, c: &[Vec<RF>]) -> Result<Vec<Vec<RF>>> {
    let ca = chart(atlas, &fa.chart)?;
    let cb = chart(atlas, &fb.chart)?;
    let m = ca.codim();
    let ta = transfer_section(atlas, fa)?;
    let tb = transfer_section(atlas, fb)?;
    let jba = atlas.jacobian(&fb.chart, &fa.chart)?;
    let mut out = vec![vec![RF::zero(); fb.fields.len()]; m];
    for (r, row) in out.iter_mut().enumerate() {
        for (q, slot) in row.iter_mut().enumerate() {
            let mut lhs = RF::zero();
            for (p, crow) in c.iter().enumerate() {
                lhs = &lhs + &(&ca.restrict(&crow[q])? * &ta[r][p]);
            }
            let mut rhs = RF::zero();
            for s in 0..m {
                rhs = &rhs + &(&cb.restrict(&jba[r][s])? * &tb[s][q]);
            }
            *slot = &lhs - &atlas.to_chart_on_s(&rhs, &fb.chart, &fa.chart)?;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FCocycle {
    /// `f[t][p~][p'] = sum_q' (c|_S)^{-1}[q'][p'] d c^{p~}_{q'} / dz^t |_S`.
    pub f: Vec<Vec<Vec<RF>>>,
    /// `(T_* f)[t][r][p'] = sum_p~ T[r][p~] f[t][p~][p']`.
    pub pushed: Vec<Vec<Vec<RF>>>,
}

impl FCocycle {
    pub fn is_zero(&self) -> bool {
        self.f.iter().flatten().flatten().all(|x| x.is_zero())
    }

    pub fn pushed_is_zero(&self) -> bool {
        self.pushed.iter().flatten().flatten().all(|x| x.is_zero())
    }
}

/// Obstruction cocycle on the ordered overlap `(a, b)`. Zero for tangent foliations.
pub fn f_cocycle(atlas: &Atlas, fa: &CanonicalFrame, fb: &CanonicalFrame, tangent: bool) -> Result<FCocycle> {
    let ca = chart(atlas, &fa.chart)?;
    let m = ca.codim();
    let l = fa.fields.len();
    if tangent {
        let z = vec![vec![vec![RF::zero(); l]; l]; m];
        return Ok(FCocycle { f: z.clone(), pushed: vec![vec![vec![RF::zero(); l]; m]; m] });
    }
    if !classify_atlas(atlas)?.comfortable {
        return Err(Error::Geometry("the obstruction cocycle of a transverse foliation needs a comfortable atlas".into()));
    }
    let (c, _) = calfabeta(atlas, fa, fb)?;
    let cs: Vec<Vec<RF>> = c.iter().map(|r| r.iter().map(|x| ca.restrict(x)).collect()).collect::<Result<_>>()?;
    let cinv = linalg::inverse(&cs).ok_or_else(|| Error::Geometry("frame change is singular along S".into()))?;
    let ta = transfer_section(atlas, fa)?;
    let mut f = vec![vec![vec![RF::zero(); l]; l]; m];
    for (t, ft) in f.iter_mut().enumerate() {
        let x = &ca.normal[t];
        for (pt, row) in ft.iter_mut().enumerate() {
            for (p, slot) in row.iter_mut().enumerate() {
                let mut acc = RF::zero();
                for (q, inv_row) in cinv.iter().enumerate() {
                    acc = &acc + &(&inv_row[p] * &ca.restrict(&c[pt][q].derivative(x))?);
                }
                *slot = acc;
            }
        }
    }
    let mut pushed = vec![vec![vec![RF::zero(); l]; m]; m];
    for t in 0..m {
        for r in 0..m {
            for p in 0..l {
                let mut acc = RF::zero();
                for pt in 0..l {
                    acc = &acc + &(&ta[r][pt] * &f[t][pt][p]);
                }
                pushed[t][r][p] = acc;
            }
        }
    }
    Ok(FCocycle { f, pushed })
}

/// Local morphisms `psi_a(sigma v_{a,p'}) = pi(v)` (tangent) or `tilde_pi(v)` (transverse).
pub fn psi_local(atlas: &Atlas, frames: &BTreeMap<String, CanonicalFrame>, tangent: bool) -> Result<PsiMorphism> {
    let mut psi = PsiMorphism::default();
    for (c, fr) in frames {
        let ch = chart(atlas, c)?;
        let imgs = fr
            .fields
            .iter()
            .map(|v| {
                let image = if tangent { atiyah_project(v, ch)? } else { tilde_pi(v, atlas, c)? };
                Ok(PsiImage { frame: image.b.clone(), image })
            })
            .collect::<Result<Vec<_>>>()?;
        psi.charts.insert(c.clone(), imgs);
    }
    Ok(psi)
}

/// `D_{p'} = sum_q' (c|_S)^{-1}[q'][p'] T(psi_b(v_{b,q'})) - psi_a(v_{a,p'})` in `a`'s frame.
pub fn psi_difference(atlas: &Atlas, psi: &PsiMorphism, fa: &CanonicalFrame, fb: &CanonicalFrame) -> Result<Vec<AtiyahElement>> {
    let ca = chart(atlas, &fa.chart)?;
    let (c, _) = calfabeta(atlas, fa, fb)?;
    let cs: Vec<Vec<RF>> = c.iter().map(|r| r.iter().map(|x| ca.restrict(x)).collect()).collect::<Result<_>>()?;
    let cinv = linalg::inverse(&cs).ok_or_else(|| Error::Geometry("frame change is singular along S".into()))?;
    let ia = &psi.charts[&fa.chart];
    let tb: Vec<AtiyahElement> = psi.charts[&fb.chart].iter().map(|i| i.image.transform(atlas, &fa.chart)).collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(ia.len());
    for (p, im) in ia.iter().enumerate() {
        let mut acc = AtiyahElement::zero(ca);
        for (q, t) in tb.iter().enumerate() {
            acc = acc.add(&t.scale(&cinv[q][p]));
        }
        out.push(acc.sub(&im.image));
    }
    Ok(out)
}

/// `psi` for a tangent foliation; fails unless the local morphisms glue.
pub fn psi_tangential(f: &Foliation, atlas: &Atlas) -> Result<PsiMorphism> {
    if !tangency_classify(f, atlas)?.tangent {
        return Err(Error::Geometry(format!("foliation `{}` is not tangent to S", f.name)));
    }
    let frames = atlas.charts().iter().map(|c| Ok((c.name.clone(), canonical_frame(f, atlas, &c.name)?))).collect::<Result<BTreeMap<_, _>>>()?;
    let psi = psi_local(atlas, &frames, true)?;
    for (a, b) in atlas.pairs() {
        let d = psi_difference(atlas, &psi, &frames[&a], &frames[&b])?;
        if d.iter().any(|x| !x.is_zero()) {
            return Err(Error::Geometry(format!("local morphisms do not glue on ({}, {})", a, b)));
        }
    }
    Ok(psi)
}

/// `psi(sigma v_j) = tilde_pi(v_j)` for generators valid in every chart.
pub fn psi_from_global_generators(f: &Foliation, atlas: &Atlas) -> Result<PsiMorphism> {
    for (a, b) in atlas.pairs() {
        let (ga, gb) = (f.on(&a)?, f.on(&b)?);
        for (va, vb) in ga.iter().zip(gb) {
            if &atlas.push_field(vb, &b, &a)? != va {
                return Err(Error::Geometry(format!("generators of `{}` are not global on ({}, {})", f.name, a, b)));
            }
        }
    }
    let mut psi = PsiMorphism::default();
    for (c, gens) in &f.generators {
        let rep = sigma_project(f, atlas, c)?;
        if !nowhere_degenerate(&rep.minors) {
            return Err(Error::Geometry(format!(
                "generators fail to span rank {} on chart `{}` (degenerate along {} = 0)",
                f.dim, c, rep.degeneracy
            )));
        }
        let imgs = gens
            .iter()
            .map(|v| {
                let image = tilde_pi(v, atlas, c)?;
                Ok(PsiImage { frame: image.b.clone(), image })
            })
            .collect::<Result<Vec<_>>>()?;
        psi.charts.insert(c.clone(), imgs);
    }
    Ok(psi)
}

/// `Res_p( d(a^1/a^2)/dz^1 |_S dz^2 )` for a one-dimensional foliation
/// tangent to a curve of codimension one.
pub fn camacho_sad_index(f: &Foliation, atlas: &Atlas, chart_name: &str, p: &G) -> Result<G> {
    let ch = chart(atlas, chart_name)?;
    if ch.codim() != 1 || ch.tangential.len() != 1 || f.dim != 1 {
        return Err(Error::Unsupported("Camacho-Sad index needs a curve of codimension one and a one-dimensional foliation".into()));
    }
    let g = &f.on(chart_name)?[0];
    if !ch.restrict(&g[0])?.is_zero() {
        return Err(Error::Geometry(format!("foliation `{}` is not tangent to S on chart `{}`", f.name, chart_name)));
    }
    if ch.restrict(&g[1])?.is_zero() {
        return Err(Error::Geometry(format!("S in singular locus of `{}` on chart `{}`", f.name, chart_name)));
    }
    let e = ch.restrict(&g[0].checked_div(&g[1])?.derivative(&ch.normal[0]))?;
    residue_at_point_1d(&OneForm1D::new(&ch.tangential[0], e)?, p)
}

/// Everything the index pipeline needs from a foliation, plus its checks.
#[derive(Debug, Clone)]
pub struct FoliationAnalysis {
    pub tangency: TangencyReport,
    pub sigma: BTreeMap<String, SigmaReport>,
    pub frames: BTreeMap<String, CanonicalFrame>,
    pub transfer: BTreeMap<String, Vec<Vec<RF>>>,
    pub psi: Option<PsiMorphism>,
    pub psi_global: bool,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, String>,
}

fn all_zero<'a>(it: impl IntoIterator<Item = &'a RF>) -> bool {
    it.into_iter().all(|x| x.is_zero())
}

fn show(v: &[Vec<RF>]) -> String {
    let rows: Vec<String> = v.iter().map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))).collect();
    rows.join(" ")
}

pub fn analyze(f: &Foliation, atlas: &Atlas) -> Result<FoliationAnalysis> {
    let tangency = tangency_classify(f, atlas)?;
    let mut summary = BTreeMap::new();
    let mut checks = Vec::new();
    summary.insert("dimension".into(), f.dim.to_string());
    summary.insert("tangency".into(), if tangency.tangent { "tangent".into() } else { format!("transverse ({})", tangency.witnesses.join("; ")) });
    let mut sigma = BTreeMap::new();
    let mut frames = BTreeMap::new();
    let mut transfer = BTreeMap::new();
    for ch in atlas.charts() {
        let rep = sigma_project(f, atlas, &ch.name)?;
        summary.insert(
            format!("sigma[{}]", ch.name),
            format!(
                "rank {}, {}, degeneracy {}",
                rep.rank,
                if rep.involutive { "involutive" } else { "not involutive" },
                if rep.degeneracy.is_constant() { "none".to_string() } else { format!("{} = 0", rep.degeneracy) }
            ),
        );
        sigma.insert(ch.name.clone(), rep);
        let fr = canonical_frame(f, atlas, &ch.name)?;
        let t = transfer_section(atlas, &fr)?;
        transfer.insert(ch.name.clone(), t);
        frames.insert(ch.name.clone(), fr);
    }
    if tangency.tangent {
        let zero = transfer.values().all(|t| all_zero(t.iter().flatten()));
        checks.push(Check::new("transfer section vanishes", zero, ""));
    } else {
        let desc: Vec<String> = transfer.iter().map(|(c, t)| format!("{}: {}", c, show(t))).collect();
        summary.insert("transfer section".into(), desc.join("; "));
    }
    for (a, b) in atlas.pairs() {
        let (fa, fb) = (&frames[&a], &frames[&b]);
        let (c, res) = calfabeta(atlas, fa, fb)?;
        checks.push(Check::new(format!("frame change residual ({}, {})", a, b), all_zero(res.iter().flatten()), ""));
        let tr = transfer_residual(atlas, fa, fb, &c)?;
        checks.push(Check::new(format!("transfer identity ({}, {})", a, b), all_zero(tr.iter().flatten()), ""));
    }
    let mut psi = None;
    let mut psi_global = false;
    match psi_local(atlas, &frames, tangency.tangent) {
        Err(e) => {
            summary.insert("psi".into(), format!("unavailable: {}", e));
        }
        Ok(p) => {
            let viol = p.section_violations();
            checks.push(Check::new("psi is a section of theta_1", viol.is_empty(), viol.join("; ")));
            let mut global = true;
            for (a, b) in atlas.pairs() {
                let (fa, fb) = (&frames[&a], &frames[&b]);
                let d = psi_difference(atlas, &p, fa, fb)?;
                let fc = f_cocycle(atlas, fa, fb, tangency.tangent)?;
                let mut ok = d.iter().all(|x| x.is_vertical());
                for (pi, dp) in d.iter().enumerate() {
                    for (r, row) in dp.e.iter().enumerate() {
                        for (t, x) in row.iter().enumerate() {
                            ok &= x == &fc.pushed[t][r][pi];
                        }
                    }
                }
                checks.push(Check::new(format!("psi overlap difference equals T_*(f) ({}, {})", a, b), ok, ""));
                global &= d.iter().all(|x| x.is_zero());
            }
            psi_global = global;
            if tangency.tangent {
                for ch in atlas.charts() {
                    for i in 0..f.dim {
                        for j in i + 1..f.dim {
                            let r = curvature(&p, ch, i, j)?;
                            let flat = all_zero(r.iter().flatten());
                            checks.push(Check::new(format!("curvature ({}, {}) on {}", i + 1, j + 1, ch.name), flat, if flat { String::new() } else { show(&r) }));
                        }
                    }
                }
            }
            summary.insert("psi".into(), if global { "global".into() } else { "local only: T_*(f) != 0".into() });
            psi = Some(p);
        }
    }
    Ok(FoliationAnalysis { tangency, sigma, frames, transfer, psi, psi_global, checks, summary })
}

/// Connection data along `sigma(generator)|_S`, one-dimensional foliations only.
pub fn local_index_data(f: &Foliation, atlas: &Atlas, psi: &PsiMorphism) -> Result<BTreeMap<String, LocalIndexData>> {
    if f.dim != 1 {
        return Err(Error::Unsupported("index data along a single direction needs a one-dimensional foliation".into()));
    }
    let mut out = BTreeMap::new();
    for ch in atlas.charts() {
        let g = &f.on(&ch.name)?[0];
        let w: Vec<RF> = g[ch.codim()..].iter().map(|c| ch.restrict(c)).collect::<Result<_>>()?;
        let q = psi.apply(ch, &w)?;
        out.insert(ch.name.clone(), LocalIndexData { chart: ch.name.clone(), c: q.e, direction: w });
    }
    Ok(out)
}

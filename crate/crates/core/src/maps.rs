//! Holomorphic self-maps fixing `S` pointwise: order of contact, the
//! canonical section and distribution, the obstruction cocycle `m` and the
//! splitting morphism of codimension-one models.

use std::collections::BTreeMap;

use crate::algebra::{linalg, GaussianRational as G, Polynomial, RationalFunction as RF};
use crate::atlas::{classify_atlas, Atlas, Chart};
use crate::connections::{AtiyahElement, PsiImage, PsiMorphism};
use crate::error::{Error, Result};
use crate::harness::report::Check;
use crate::indices::{nowhere_degenerate, subsets, LocalIndexData};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfMap {
    pub name: String,
    /// Per chart, the components `f^j` in that chart's variables.
    pub components: BTreeMap<String, Vec<RF>>,
}

fn chart<'a>(atlas: &'a Atlas, name: &str) -> Result<&'a Chart> {
    atlas.chart(name).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", name)))
}

impl SelfMap {
    /// Conjugates into charts without declared components and checks that
    /// declared components agree and that `S` is fixed pointwise.
    pub fn new(atlas: &Atlas, name: &str, declared: &BTreeMap<String, Vec<RF>>) -> Result<Self> {
        if declared.is_empty() {
            return Err(Error::Geometry(format!("map `{}` has no components", name)));
        }
        for (c, f) in declared {
            let ch = chart(atlas, c)?;
            if f.len() != ch.dim() {
                return Err(Error::Geometry(format!("map `{}` on `{}` has {} components, expected {}", name, c, f.len(), ch.dim())));
            }
        }
        let mut components = declared.clone();
        for ch in atlas.charts() {
            if components.contains_key(&ch.name) {
                continue;
            }
            let Some(src) = declared.keys().find(|d| atlas.transition(d, &ch.name).is_some()) else {
                return Err(Error::Geometry(format!("map `{}` cannot be carried to chart `{}`", name, ch.name)));
            };
            components.insert(ch.name.clone(), atlas.conjugate_map(&declared[src], src, &ch.name)?);
        }
        for (a, b) in atlas.pairs() {
            if declared.contains_key(&a) && declared.contains_key(&b) && atlas.conjugate_map(&declared[&a], &a, &b)? != declared[&b] {
                return Err(Error::Geometry(format!("map `{}` is not compatible on ({}, {})", name, a, b)));
            }
        }
        for (c, f) in &components {
            let ch = chart(atlas, c)?;
            for (j, (fj, z)) in f.iter().zip(ch.vars()).enumerate() {
                let d = fj - &RF::var(&z);
                if !d.in_ideal_power(&ch.normal, 1)? {
                    return Err(Error::Geometry(format!("map `{}` moves S on chart `{}` (component {})", name, c, j + 1)));
                }
            }
        }
        Ok(SelfMap { name: name.to_string(), components })
    }

    pub fn on(&self, c: &str) -> Result<&Vec<RF>> {
        self.components.get(c).ok_or_else(|| Error::Geometry(format!("map `{}` undefined on chart `{}`", self.name, c)))
    }
}

fn chart_order(f: &[RF], ch: &Chart) -> Result<Option<u32>> {
    let mut nu: Option<u32> = None;
    for (fj, z) in f.iter().zip(ch.vars()) {
        if let Some(o) = (fj - &RF::var(&z)).ideal_order(&ch.normal)? {
            nu = Some(nu.map_or(o, |n| n.min(o)));
        }
    }
    Ok(nu)
}

/// `nu_f = min_j max { mu : f^j - z^j in I^mu }`, checked to agree across charts.
pub fn order_of_contact(f: &SelfMap, atlas: &Atlas) -> Result<u32> {
    let mut out: Option<(u32, String)> = None;
    for (c, comps) in &f.components {
        let o = chart_order(comps, chart(atlas, c)?)?
            .ok_or_else(|| Error::Geometry(format!("map `{}` is the identity on chart `{}`: order of contact undefined", f.name, c)))?;
        match &out {
            None => out = Some((o, c.clone())),
            Some((n, d)) if *n != o => {
                return Err(Error::Geometry(format!("order of contact {} on `{}` but {} on `{}`", n, d, o, c)));
            }
            _ => {}
        }
    }
    Ok(out.expect("non-empty").0)
}

/// The g-coefficients of one chart, keyed by sorted multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartContact {
    pub chart: String,
    pub nu: u32,
    pub g: BTreeMap<Vec<usize>, Vec<RF>>,
    pub tangential: bool,
}

fn permutations(r: &[usize]) -> i64 {
    let mut counts = BTreeMap::new();
    for &x in r {
        *counts.entry(x).or_insert(0i64) += 1;
    }
    let fact = |n: i64| (1..=n).product::<i64>();
    fact(r.len() as i64) / counts.values().map(|&c| fact(c)).product::<i64>()
}

fn multisets(m: usize, nu: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, nu, &mut Vec::new(), &mut out);
    out
}

impl ChartContact {
    /// `g^j_{r_1 ... r_nu}` for any ordering of the lower indices.
    pub fn coeff(&self, j: usize, r: &[usize]) -> RF {
        let mut k = r.to_vec();
        k.sort_unstable();
        self.g.get(&k).map(|v| v[j].clone()).unwrap_or_else(RF::zero)
    }

    /// `f^j - z^j - sum g^j_R z^R` over ordered multi-indices.
    pub fn reconstruction_residual(&self, f: &[RF], ch: &Chart) -> Vec<RF> {
        f.iter()
            .zip(ch.vars())
            .enumerate()
            .map(|(j, (fj, z))| {
                let mut acc = fj - &RF::var(&z);
                for (r, g) in &self.g {
                    let mut mono = RF::from_int(permutations(r));
                    for &i in r {
                        mono = &mono * &RF::var(&ch.normal[i]);
                    }
                    acc = &acc - &(&mono * &g[j]);
                }
                acc
            })
            .collect()
    }
}

/// Splits `f^j - z^j` into `sum_R g^j_R z^R` by exact division in the normal
/// block, symmetrised over the lower indices.
pub fn canonical_section(f: &SelfMap, atlas: &Atlas, chart_name: &str, nu: u32) -> Result<ChartContact> {
    let ch = chart(atlas, chart_name)?;
    let m = ch.codim();
    let comps = f.on(chart_name)?;
    let keys = multisets(m, nu as usize);
    let mut g: BTreeMap<Vec<usize>, Vec<RF>> = keys.iter().map(|k| (k.clone(), vec![RF::zero(); ch.dim()])).collect();
    for (j, (fj, z)) in comps.iter().zip(ch.vars()).enumerate() {
        let h = fj - &RF::var(&z);
        if h.is_zero() {
            continue;
        }
        let mut parts: BTreeMap<Vec<usize>, Polynomial> = BTreeMap::new();
        for (mono, c) in h.num().terms() {
            let mut need = nu;
            let mut key = Vec::new();
            let mut rest = Vec::new();
            for (v, e) in mono {
                match ch.normal.iter().position(|n| n == v) {
                    Some(i) if need > 0 => {
                        let take = (*e).min(need);
                        need -= take;
                        key.extend(std::iter::repeat_n(i, take as usize));
                        if *e > take {
                            rest.push((v.clone(), e - take));
                        }
                    }
                    _ => rest.push((v.clone(), *e)),
                }
            }
            if need > 0 {
                return Err(Error::Geometry(format!("component {} of `{}` is not in I^{} on `{}`", j + 1, f.name, nu, chart_name)));
            }
            key.sort_unstable();
            let part = parts.entry(key).or_insert_with(Polynomial::zero);
            *part = &*part + &Polynomial::monomial(rest, c.clone());
        }
        for (key, p) in parts {
            let den = &RF::from_poly(h.den().clone()) * &RF::from_int(permutations(&key));
            g.get_mut(&key).expect("multiset key")[j] = RF::from_poly(p).checked_div(&den)?;
        }
    }
    let mut tangential = true;
    for r in 0..m {
        let h = &comps[r] - &RF::var(&ch.normal[r]);
        if !h.in_ideal_power(&ch.normal, nu + 1)? {
            tangential = false;
        }
    }
    let out = ChartContact { chart: chart_name.to_string(), nu, g, tangential };
    if out.reconstruction_residual(comps, ch).iter().any(|x| !x.is_zero()) {
        return Err(Error::Geometry(format!("internal: g-coefficient reconstruction failed on `{}`", chart_name)));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactData {
    pub nu: u32,
    pub tangential: bool,
    pub charts: BTreeMap<String, ChartContact>,
}

pub fn contact_data(f: &SelfMap, atlas: &Atlas) -> Result<ContactData> {
    let nu = order_of_contact(f, atlas)?;
    let charts: BTreeMap<String, ChartContact> =
        atlas.charts().iter().map(|c| Ok((c.name.clone(), canonical_section(f, atlas, &c.name, nu)?))).collect::<Result<_>>()?;
    let tangential = charts.values().all(|c| c.tangential);
    if charts.values().any(|c| c.tangential != tangential) {
        return Err(Error::Geometry(format!("map `{}` is tangential on some charts only", f.name)));
    }
    Ok(ContactData { nu, tangential, charts })
}

/// Generators `v_R = [g^j_R]_1 d_j` of the canonical distribution, with the
/// tangential frames that the splitting morphism acts on.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    pub keys: Vec<Vec<usize>>,
    /// Per chart and key, all components restricted to `S`.
    pub generators: BTreeMap<String, Vec<Vec<RF>>>,
    /// Per chart and key, tangential frame (twisted by `df` when `nu = 1`
    /// and the map is not tangential).
    pub frames: BTreeMap<String, Vec<Vec<RF>>>,
    pub rank: usize,
    pub degeneracy: BTreeMap<String, Vec<RF>>,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

pub fn canonical_distribution(atlas: &Atlas, cd: &ContactData) -> Result<Distribution> {
    let m = atlas.codim();
    let dim_s = atlas.dim_s();
    let l = binomial(m + cd.nu as usize - 1, cd.nu as usize);
    if l > dim_s {
        return Err(Error::Unsupported(format!("canonical distribution would have rank {} > dim S = {}", l, dim_s)));
    }
    let keys = multisets(m, cd.nu as usize);
    let mut generators = BTreeMap::new();
    let mut frames = BTreeMap::new();
    let mut degeneracy = BTreeMap::new();
    let mut rank = 0;
    for ch in atlas.charts() {
        let c = &cd.charts[&ch.name];
        let gens: Vec<Vec<RF>> = keys.iter().map(|k| c.g[k].iter().map(|x| ch.restrict(x)).collect()).collect::<Result<_>>()?;
        let fr: Vec<Vec<RF>> = if cd.tangential || cd.nu > 1 {
            gens.iter().map(|v| v[m..].to_vec()).collect()
        } else {
            // (delta + g) g along S
            (0..m)
                .map(|r| {
                    (0..dim_s)
                        .map(|p| {
                            let mut acc = RF::zero();
                            for s in 0..m {
                                let delta = if s == r { RF::one() } else { RF::zero() };
                                acc = &acc + &(&(&delta + &gens[r][s]) * &gens[s][m + p]);
                            }
                            acc
                        })
                        .collect()
                })
                .collect()
        };
        rank = rank.max(if fr.iter().flatten().all(|x| x.is_zero()) { 0 } else { linalg::rank(&fr) });
        let minors: Vec<RF> = subsets(dim_s, l)
            .into_iter()
            .map(|rows| linalg::det(&rows.iter().map(|&p| fr.iter().map(|v| v[p].clone()).collect()).collect::<Vec<Vec<RF>>>()))
            .collect();
        degeneracy.insert(ch.name.clone(), minors);
        generators.insert(ch.name.clone(), gens);
        frames.insert(ch.name.clone(), fr);
    }
    Ok(Distribution { keys, generators, frames, rank, degeneracy })
}

/// Coefficients `k_S` with `v_{R,a} = sum_S k_S push(v_{S,b})`, one row per key `R` of `a`.
fn change_coefficients(atlas: &Atlas, dist: &Distribution, a: &str, b: &str) -> Result<Vec<Vec<RF>>> {
    let ca = chart(atlas, a)?;
    let m = ca.codim();
    let jab = atlas.jacobian(a, b)?;
    let j0: Vec<Vec<RF>> = (0..m).map(|s| (0..m).map(|r| ca.restrict(&jab[s][r])).collect()).collect::<Result<_>>()?;
    let nu = dist.keys[0].len();
    let mut out = vec![vec![RF::zero(); dist.keys.len()]; dist.keys.len()];
    for (ri, r) in dist.keys.iter().enumerate() {
        // ordered s
        let total = m.pow(nu as u32);
        for idx in 0..total {
            let mut s = Vec::with_capacity(nu);
            let mut x = idx;
            for _ in 0..nu {
                s.push(x % m);
                x /= m;
            }
            let mut w = RF::one();
            for (si, rr) in s.iter().zip(r) {
                w = &w * &j0[*si][*rr];
            }
            s.sort_unstable();
            let si = dist.keys.iter().position(|k| k == &s).expect("multiset");
            out[ri][si] = &out[ri][si] + &w;
        }
    }
    Ok(out)
}

/// Push of a vector along `S` (all components, functions on `S`).
fn push_on_s(atlas: &Atlas, v: &[RF], from: &str, to: &str) -> Result<Vec<RF>> {
    let cf = chart(atlas, from)?;
    let jac = atlas.jacobian(from, to)?;
    jac.iter()
        .map(|row| {
            let mut acc = RF::zero();
            for (d, c) in row.iter().zip(v) {
                acc = &acc + &(&cf.restrict(d)? * c);
            }
            atlas.to_chart_on_s(&acc, from, to)
        })
        .collect()
}

/// Residuals of the transformation rule of the generators on `(a, b)`, in `a`'s coordinates.
pub fn distribution_residuals(atlas: &Atlas, dist: &Distribution, a: &str, b: &str) -> Result<Vec<Vec<RF>>> {
    let k = change_coefficients(atlas, dist, a, b)?;
    let pushed: Vec<Vec<RF>> = dist.generators[b].iter().map(|v| push_on_s(atlas, v, b, a)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (ri, va) in dist.generators[a].iter().enumerate() {
        let mut res = va.clone();
        for (si, w) in pushed.iter().enumerate() {
            for (x, y) in res.iter_mut().zip(w) {
                *x = &*x - &(&k[ri][si] * y);
            }
        }
        out.push(res);
    }
    Ok(out)
}

/// `m_{ba}` evaluated on the frames of `a`: `m[R][r][s]`.
pub fn m_cocycle(atlas: &Atlas, dist: &Distribution, a: &str, b: &str) -> Result<Vec<Vec<Vec<RF>>>> {
    let ca = chart(atlas, a)?;
    let cb = chart(atlas, b)?;
    let m = ca.codim();
    let jab = atlas.jacobian(a, b)?;
    let hba = atlas.hessian(b, a)?;
    let mut out = Vec::new();
    for fa in &dist.frames[a] {
        // frame of a pushed into b, tangential block
        let mut wb = Vec::with_capacity(cb.tangential.len());
        for row in &jab[m..] {
            let mut acc = RF::zero();
            for (q, bq) in fa.iter().enumerate() {
                acc = &acc + &(&ca.restrict(&row[m + q])? * bq);
            }
            wb.push(atlas.to_chart_on_s(&acc, a, b)?);
        }
        let mut mm = vec![vec![RF::zero(); m]; m];
        for (r, row) in mm.iter_mut().enumerate() {
            for (s, slot) in row.iter_mut().enumerate() {
                let mut acc = RF::zero();
                for (q, wq) in wb.iter().enumerate() {
                    for t in 0..cb.dim() {
                        let h = atlas.to_chart_on_s(&cb.restrict(&hba[r][m + q][t])?, b, a)?;
                        acc = &acc + &(&(&atlas.to_chart_on_s(wq, b, a)? * &h) * &ca.restrict(&jab[t][s])?);
                    }
                }
                *slot = acc;
            }
        }
        out.push(mm);
    }
    Ok(out)
}

/// `x_a`: the `e`-part `d g^1_{1...1} / dz^1 |_S` correcting the local morphism (codimension one).
pub fn x_cochain(atlas: &Atlas, cd: &ContactData, a: &str) -> Result<RF> {
    let ca = chart(atlas, a)?;
    if ca.codim() != 1 {
        return Err(Error::Unsupported("obstruction mode: supply cochain (codimension > 1)".into()));
    }
    let c = &cd.charts[a];
    let g = c.coeff(0, &vec![0; cd.nu as usize]);
    ca.restrict(&g.derivative(&ca.normal[0]))
}

/// Local morphisms `psi_a(v_R) = pi(frame)` with zero endomorphism part.
pub fn psi_local(atlas: &Atlas, dist: &Distribution) -> Result<PsiMorphism> {
    let mut psi = PsiMorphism::default();
    for ch in atlas.charts() {
        let imgs = dist.frames[&ch.name]
            .iter()
            .map(|b| {
                let mut image = AtiyahElement::zero(ch);
                image.b = b.clone();
                PsiImage { frame: b.clone(), image }
            })
            .collect();
        psi.charts.insert(ch.name.clone(), imgs);
    }
    Ok(psi)
}

/// `sum_S k_S T(psi_b(v_S)) - psi_a(v_R)` on each key `R` of `a`.
pub fn psi_difference(atlas: &Atlas, dist: &Distribution, psi: &PsiMorphism, a: &str, b: &str) -> Result<Vec<AtiyahElement>> {
    let ca = chart(atlas, a)?;
    let k = change_coefficients(atlas, dist, a, b)?;
    let tb: Vec<AtiyahElement> = psi.charts[b].iter().map(|i| i.image.transform(atlas, a)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (ri, im) in psi.charts[a].iter().enumerate() {
        let mut acc = AtiyahElement::zero(ca);
        for (si, t) in tb.iter().enumerate() {
            acc = acc.add(&t.scale(&k[ri][si]));
        }
        out.push(acc.sub(&im.image));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct MapAnalysis {
    pub contact: ContactData,
    pub distribution: Distribution,
    pub psi: Option<PsiMorphism>,
    pub checks: Vec<Check>,
    pub summary: BTreeMap<String, String>,
}

fn all_zero<'a>(it: impl IntoIterator<Item = &'a RF>) -> bool {
    it.into_iter().all(|x| x.is_zero())
}

pub fn analyze_map(f: &SelfMap, atlas: &Atlas) -> Result<MapAnalysis> {
    let cd = contact_data(f, atlas)?;
    let mut summary = BTreeMap::new();
    let mut checks = Vec::new();
    summary.insert("order of contact".into(), cd.nu.to_string());
    summary.insert("tangential".into(), cd.tangential.to_string());
    for (c, cc) in &cd.charts {
        let ch = chart(atlas, c)?;
        let res = cc.reconstruction_residual(f.on(c)?, ch);
        checks.push(Check::new(format!("g reconstruction on {}", c), all_zero(&res), ""));
    }
    if !cd.tangential && !classify_atlas(atlas)?.comfortable {
        return Err(Error::Geometry("a non-tangential map needs a comfortable atlas".into()));
    }
    if !cd.tangential && cd.nu > 1 {
        return Err(Error::Geometry("internal: non-tangential map with order of contact > 1".into()));
    }
    let dist = canonical_distribution(atlas, &cd)?;
    for (c, minors) in &dist.degeneracy {
        let text = if nowhere_degenerate(minors) {
            "none".to_string()
        } else if minors.iter().all(|x| x.is_zero()) {
            "everywhere".to_string()
        } else {
            let g = minors.iter().filter(|x| !x.is_zero()).fold(Polynomial::zero(), |acc, x| if acc.is_zero() { x.num().clone() } else { acc.gcd(x.num()) });
            format!("{} = 0", g)
        };
        summary.insert(format!("degeneracy[{}]", c), text);
    }
    for (a, b) in atlas.pairs() {
        let res = distribution_residuals(atlas, &dist, &a, &b)?;
        checks.push(Check::new(format!("distribution transformation ({}, {})", a, b), all_zero(res.iter().flatten()), ""));
    }
    let local = psi_local(atlas, &dist)?;
    let mut mvals = BTreeMap::new();
    for (a, b) in atlas.pairs() {
        let m = m_cocycle(atlas, &dist, &a, &b)?;
        let d = psi_difference(atlas, &dist, &local, &a, &b)?;
        let mut ok = d.iter().all(|x| x.is_vertical());
        for (dr, mr) in d.iter().zip(&m) {
            ok &= &dr.e == mr;
        }
        checks.push(Check::new(format!("local psi difference equals m ({}, {})", a, b), ok, ""));
        mvals.insert((a, b), m);
    }
    for (a, b, c) in atlas.triples() {
        // m_ca = m_cb + m_ba on frames of a, with m_cb carried to a's frames
        let k = change_coefficients(atlas, &dist, &a, &b)?;
        let m_cb_a = transform_endos(atlas, &m_cocycle(atlas, &dist, &b, &c)?, &b, &a)?;
        let mut ok = true;
        for (ri, mca) in mvals[&(a.clone(), c.clone())].iter().enumerate() {
            for r in 0..mca.len() {
                for s in 0..mca.len() {
                    let mut rhs = mvals[&(a.clone(), b.clone())][ri][r][s].clone();
                    for (si, kk) in k[ri].iter().enumerate() {
                        rhs = &rhs + &(kk * &m_cb_a[si][r][s]);
                    }
                    ok &= mca[r][s] == rhs;
                }
            }
        }
        checks.push(Check::new(format!("m cocycle law ({}, {}, {})", a, b, c), ok, ""));
    }
    let m_zero = mvals.values().all(|m| all_zero(m.iter().flatten().flatten()));
    let psi = if atlas.codim() == 1 {
        let x: BTreeMap<String, RF> = atlas.charts().iter().map(|c| Ok((c.name.clone(), x_cochain(atlas, &cd, &c.name)?))).collect::<Result<_>>()?;
        for (a, b) in atlas.pairs() {
            // m = x_a - J^nu x_b
            let ca = chart(atlas, &a)?;
            let j = ca.restrict(&atlas.jacobian(&a, &b)?[0][0])?.pow(cd.nu);
            let xb = atlas.to_chart_on_s(&x[&b], &b, &a)?;
            let r = &(&x[&a] - &(&j * &xb)) - &mvals[&(a.clone(), b.clone())][0][0][0];
            checks.push(Check::new(format!("m is the coboundary of x ({}, {})", a, b), r.is_zero(), r.to_string()));
        }
        let mut psi = local;
        for (c, imgs) in psi.charts.iter_mut() {
            imgs[0].image.e[0][0] = x[c].clone();
        }
        summary.insert("psi".into(), "local morphisms corrected by x".into());
        Some(psi)
    } else if m_zero {
        summary.insert("psi".into(), "local morphisms glue (m = 0)".into());
        Some(local)
    } else {
        summary.insert("psi".into(), "obstruction mode: supply cochain".into());
        None
    };
    if let Some(p) = &psi {
        let viol = p.section_violations();
        checks.push(Check::new("psi is a section of theta_1", viol.is_empty(), viol.join("; ")));
        for ((a, b), res) in p.overlap_residuals(atlas)? {
            checks.push(Check::new(format!("psi overlap compatibility ({}, {})", a, b), res.iter().all(|x| x.is_zero()), ""));
        }
    }
    Ok(MapAnalysis { contact: cd, distribution: dist, psi, checks, summary })
}

/// Rewrites endomorphism blocks `e[R][r][s]` from `from`'s normal frame into `to`'s.
fn transform_endos(atlas: &Atlas, e: &[Vec<Vec<RF>>], from: &str, to: &str) -> Result<Vec<Vec<Vec<RF>>>> {
    let cf = chart(atlas, from)?;
    let mut out = Vec::new();
    for blk in e {
        let mut q = AtiyahElement::zero(cf);
        for (r, row) in blk.iter().enumerate() {
            for (s, x) in row.iter().enumerate() {
                q.e[r][s] = x.clone();
            }
        }
        out.push(q.transform(atlas, to)?.e);
    }
    Ok(out)
}

/// Connection data along the distribution frame, dim S = 1.
pub fn local_index_data(atlas: &Atlas, an: &MapAnalysis) -> Result<BTreeMap<String, LocalIndexData>> {
    let psi = an.psi.as_ref().ok_or_else(|| Error::Unsupported("obstruction mode: supply cochain".into()))?;
    if an.distribution.keys.len() != 1 {
        return Err(Error::Unsupported("index data needs a rank-one canonical distribution".into()));
    }
    let mut out = BTreeMap::new();
    for ch in atlas.charts() {
        let im = &psi.charts[&ch.name][0];
        if im.frame.iter().all(|x| x.is_zero()) {
            return Err(Error::Geometry(format!("canonical distribution vanishes identically on S in chart `{}`", ch.name)));
        }
        out.insert(ch.name.clone(), LocalIndexData { chart: ch.name.clone(), c: im.image.e.clone(), direction: im.frame.clone() });
    }
    Ok(out)
}

/// Residue of the map at a point of a curve (or declared point when dim S > 1).
pub fn map_residue(atlas: &Atlas, an: &MapAnalysis, chart_name: &str, coords: &BTreeMap<String, G>, phi: &crate::indices::Phi) -> Result<G> {
    let data = local_index_data(atlas, an)?;
    let ch = chart(atlas, chart_name)?;
    crate::indices::residue_at(&data[chart_name], &ch.tangential, phi, coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::fixtures::*;
    use crate::indices::{enumerate_curve, Phi};
    use crate::parser::parse_expression;

    fn map(at: &Atlas, c: &str, comps: &[&str]) -> SelfMap {
        let ch = at.chart(c).unwrap();
        let mut d = BTreeMap::new();
        d.insert(c.to_string(), comps.iter().map(|e| parse_expression(e, &ch.vars()).unwrap()).collect());
        SelfMap::new(at, "f", &d).unwrap()
    }

    fn plane() -> Atlas {
        Atlas::new(vec![Chart::new("A", &["x"], &["y"])], vec![]).unwrap()
    }

    fn rf(s: &str, v: &[&str]) -> RF {
        parse_expression(s, &v.iter().map(|x| x.to_string()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn orders_of_contact() {
        let at = plane();
        assert_eq!(order_of_contact(&map(&at, "A", &["x + x^3", "y + x^2"]), &at).unwrap(), 2);
        assert_eq!(order_of_contact(&map(&at, "A", &["x", "y + x"]), &at).unwrap(), 1);
        assert_eq!(order_of_contact(&map(&at, "A", &["x", "y/(1 - x*y)"]), &at).unwrap(), 1);
        assert!(order_of_contact(&map(&at, "A", &["x", "y"]), &at).is_err());
    }

    #[test]
    fn moving_s_is_rejected() {
        let at = plane();
        let mut d = BTreeMap::new();
        d.insert("A".to_string(), vec![rf("x + 1", &["x", "y"]), RF::var("y")]);
        assert!(SelfMap::new(&at, "f", &d).is_err());
    }

    #[test]
    fn g_coefficients() {
        let at = plane();
        let f = map(&at, "A", &["x + x^3", "y + x^2"]);
        let c = canonical_section(&f, &at, "A", 2).unwrap();
        assert_eq!(c.coeff(0, &[0, 0]), RF::var("x"));
        assert_eq!(c.coeff(1, &[0, 0]), RF::one());
        assert!(c.tangential);
        let f = map(&at, "A", &["x + x^2", "y + x*y"]);
        let c = canonical_section(&f, &at, "A", 1).unwrap();
        assert_eq!(c.coeff(0, &[0]), RF::var("x"));
        assert_eq!(c.coeff(1, &[0]), RF::var("y"));
        assert!(c.tangential);
        // read at first order the distribution is degenerate everywhere
        let f = map(&at, "A", &["x + x^2", "y"]);
        let c = canonical_section(&f, &at, "A", 1).unwrap();
        assert_eq!(c.coeff(0, &[0]), RF::var("x"));
        assert!(c.coeff(1, &[0]).is_zero());
        assert!(c.tangential);
        // the order of contact itself is 2 here, since y' - y = 0
        assert_eq!(order_of_contact(&f, &at).unwrap(), 2);
    }

    #[test]
    fn symmetrised_in_codim_two() {
        let at = Atlas::new(vec![Chart::new("A", &["x1", "x2"], &["y1", "y2", "y3"])], vec![]).unwrap();
        let f = map(&at, "A", &["x1", "x2", "y1 + x1*x2", "y2 + x1^2", "y3"]);
        let c = canonical_section(&f, &at, "A", 2).unwrap();
        assert_eq!(c.coeff(2, &[0, 1]), RF::constant(G::from_ratio(1, 2)));
        assert_eq!(c.coeff(2, &[1, 0]), RF::constant(G::from_ratio(1, 2)));
        assert_eq!(c.coeff(3, &[0, 0]), RF::one());
        let cd = contact_data(&f, &at).unwrap();
        let d = canonical_distribution(&at, &cd).unwrap();
        assert_eq!(d.keys.len(), 3);
    }

    #[test]
    fn mobius_distribution() {
        let at = product();
        let f = map(&at, "A", &["x", "y/(1 - x*y)"]);
        assert_eq!(f.on("B").unwrap()[1], rf("w - u", &["u", "w"]));
        let an = analyze_map(&f, &at).unwrap();
        assert!(an.checks.iter().all(|c| c.passed), "{:?}", an.checks);
        assert_eq!(an.distribution.generators["A"][0], vec![RF::zero(), rf("y^2", &["y"])]);
        assert_eq!(an.distribution.generators["B"][0], vec![RF::zero(), RF::from_int(-1)]);
        assert_eq!(an.summary["degeneracy[A]"], "y^2 = 0");
        let data = local_index_data(&at, &an).unwrap();
        assert!(data["A"].c[0][0].is_zero());
        let pts = enumerate_curve(&at, &data).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].value, G::zero());
    }

    #[test]
    fn order_two_psi() {
        let at = plane();
        let f = map(&at, "A", &["x + x^3", "y + x^2"]);
        let an = analyze_map(&f, &at).unwrap();
        let psi = an.psi.unwrap();
        assert_eq!(psi.charts["A"][0].frame, vec![RF::one()]);
        assert_eq!(psi.charts["A"][0].image.e[0][0], RF::one());
        let pts = enumerate_curve(&at, &local_index_data(&at, &MapAnalysis { psi: Some(psi), ..an }).unwrap()).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn simple_degeneracy_index() {
        // connection +e; see the sign note in the README
        let at = plane();
        let f = map(&at, "A", &["x + x^2", "y + x*y"]);
        let an = analyze_map(&f, &at).unwrap();
        let mut p = BTreeMap::new();
        p.insert("y".to_string(), G::zero());
        assert_eq!(map_residue(&at, &an, "A", &p, &Phi::chern_power(1)).unwrap(), G::one());
    }

    #[test]
    fn linear_transitions_have_zero_m() {
        let at = product();
        let f = map(&at, "A", &["x + x^2", "y + x*y"]);
        let an = analyze_map(&f, &at).unwrap();
        for (a, b) in at.pairs() {
            let m = m_cocycle(&at, &an.distribution, &a, &b).unwrap();
            assert!(m[0][0][0].is_zero());
        }
    }

    #[test]
    fn blowup_map_sum() {
        let at = blowup();
        let f = map(&at, "A", &["x + x^2", "t*(1 + 2*x)/(1 + x)"]);
        let an = analyze_map(&f, &at).unwrap();
        assert!(an.checks.iter().all(|c| c.passed), "{:?}", an.checks);
        let m = m_cocycle(&at, &an.distribution, "A", "B").unwrap();
        assert!(!m[0][0][0].is_zero());
        let pts = enumerate_curve(&at, &local_index_data(&at, &an).unwrap()).unwrap();
        let vals: Vec<G> = pts.iter().map(|p| p.value.clone()).collect();
        assert_eq!(vals, vec![G::one(), G::from_int(-2)]);
    }

    #[test]
    fn non_tangential_order_one() {
        let at = plane();
        let f = map(&at, "A", &["2*x + x^2", "y + x*y"]);
        let an = analyze_map(&f, &at).unwrap();
        assert!(!an.contact.tangential);
        assert_eq!(an.distribution.frames["A"][0], vec![&RF::from_int(2) * &RF::var("y")]);
        let psi = an.psi.unwrap();
        assert_eq!(psi.charts["A"][0].image.e[0][0], RF::one());
    }

    #[test]
    fn non_tangential_needs_comfortable() {
        let at = nonsplit();
        let f = map(&at, "A", &["2*x", "y + x*y"]);
        assert!(analyze_map(&f, &at).unwrap_err().to_string().contains("comfortable"));
    }
}

//! Loading models, running verifications and rendering reports.

pub mod corpus;
pub mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::algebra::{GaussianRational as G, RationalFunction as RF};
use crate::atlas::{apply_splitting_correction, chart_correction, classify_atlas, normal_bundle_degree, Atlas, Chart};
use crate::error::{Error, Result};
use crate::foliation::{self, Foliation};
use crate::indices::{enumerate_curve, nowhere_degenerate, residue_at, LocalIndexData, Phi, PointResidue};
use crate::maps::{self, SelfMap};
use crate::parser::manifest::{DegreeExpectation, FoliationDecl, MapDecl, ModelBundle, ObjectDecl, PointDecl};
use crate::parser::parse_manifest;

pub use report::{render_text, Check, ClassificationSummary, ObjectReport, PointEntry, Verdict, VerificationReport};

pub fn load_model(path: &Path) -> Result<ModelBundle> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_manifest(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn emit_report(r: &VerificationReport, format: Format, sink: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Text => sink.write_all(render_text(r).as_bytes()),
        Format::Json => {
            sink.write_all(r.to_json().as_bytes())?;
            sink.write_all(b"\n")
        }
    }
}

fn substitution(ch: &Chart, values: Vec<RF>) -> BTreeMap<String, RF> {
    ch.vars().into_iter().zip(values).collect()
}

/// Rewrites declared objects into the coordinates `C_a(z)` of a corrected atlas.
fn correct_objects(bundle: &ModelBundle) -> Result<Vec<ObjectDecl>> {
    let mut out = Vec::new();
    for obj in &bundle.objects {
        out.push(match obj {
            ObjectDecl::Foliation(f) => {
                let mut generators = BTreeMap::new();
                for (c, gens) in &f.generators {
                    let ch = bundle.atlas.chart(c).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", c)))?;
                    let fwd = chart_correction(ch, bundle.cochains.get(c), -1);
                    let inv = substitution(ch, chart_correction(ch, bundle.cochains.get(c), 1));
                    let vars = ch.vars();
                    let mut new = Vec::new();
                    for v in gens {
                        let mut w = Vec::new();
                        for comp in &fwd {
                            let mut acc = RF::zero();
                            for (x, vx) in vars.iter().zip(v) {
                                acc = &acc + &(&comp.derivative(x) * vx);
                            }
                            w.push(acc.substitute(&inv)?);
                        }
                        new.push(w);
                    }
                    generators.insert(c.clone(), new);
                }
                ObjectDecl::Foliation(FoliationDecl { generators, ..f.clone() })
            }
            ObjectDecl::Map(m) => {
                let mut components = BTreeMap::new();
                for (c, comps) in &m.components {
                    let ch = bundle.atlas.chart(c).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", c)))?;
                    let fwd = chart_correction(ch, bundle.cochains.get(c), -1);
                    let inv = substitution(ch, chart_correction(ch, bundle.cochains.get(c), 1));
                    let fsub = substitution(ch, comps.clone());
                    let new = fwd.iter().map(|e| e.substitute(&fsub)?.substitute(&inv)).collect::<Result<Vec<_>>>()?;
                    components.insert(c.clone(), new);
                }
                ObjectDecl::Map(MapDecl { components, ..m.clone() })
            }
        });
    }
    Ok(out)
}

/// What an object contributes to the index computation.
struct Pipeline {
    kind: &'static str,
    checks: Vec<Check>,
    summary: BTreeMap<String, String>,
    data: Result<BTreeMap<String, LocalIndexData>>,
    /// Every chart has a constant nonzero degeneracy generator.
    no_singular_points: bool,
    /// Reason the local morphisms do not glue, if they do not.
    obstruction: Option<String>,
}

fn foliation_pipeline(atlas: &Atlas, decl: &FoliationDecl) -> Result<Pipeline> {
    let f = Foliation::new(atlas, &decl.name, &decl.generators)?;
    let an = foliation::analyze(&f, atlas)?;
    let no_singular_points = an.sigma.values().all(|s| nowhere_degenerate(&s.minors));
    let obstruction = if an.psi.is_none() {
        Some(an.summary.get("psi").cloned().unwrap_or_default())
    } else if !an.psi_global {
        Some("local morphisms do not glue: T_*(f) != 0".to_string())
    } else {
        None
    };
    let data = match &an.psi {
        Some(p) if f.dim == 1 => foliation::local_index_data(&f, atlas, p),
        Some(_) => Err(Error::Unsupported(format!("residues along a {}-dimensional foliation need a chosen direction", f.dim))),
        None => Err(Error::Unsupported("no splitting morphism".into())),
    };
    Ok(Pipeline { kind: "foliation", checks: an.checks, summary: an.summary, data, no_singular_points, obstruction })
}

fn map_pipeline(atlas: &Atlas, decl: &MapDecl) -> Result<Pipeline> {
    let f = SelfMap::new(atlas, &decl.name, &decl.components)?;
    let an = maps::analyze_map(&f, atlas)?;
    let no_singular_points = an.distribution.degeneracy.values().all(|m| nowhere_degenerate(m));
    let obstruction = if an.psi.is_none() { Some("obstruction mode: supply cochain".to_string()) } else { None };
    let data = maps::local_index_data(atlas, &an);
    Ok(Pipeline { kind: "map", checks: an.checks, summary: an.summary, data, no_singular_points, obstruction })
}

fn pipeline(atlas: &Atlas, obj: &ObjectDecl) -> Result<Pipeline> {
    match obj {
        ObjectDecl::Foliation(f) => foliation_pipeline(atlas, f),
        ObjectDecl::Map(m) => map_pipeline(atlas, m),
    }
}

fn point_label(p: &PointDecl) -> String {
    p.coords.iter().map(|(k, v)| format!("{} = {}", k, v)).collect::<Vec<_>>().join(", ")
}

fn declared_residues(atlas: &Atlas, pl: &Pipeline, points: &[&PointDecl]) -> Result<Vec<PointResidue>> {
    let data = pl.data.as_ref().map_err(|e| Error::Unsupported(e.to_string()))?;
    let phi = Phi::chern_power(atlas.dim_s());
    let mut out = Vec::new();
    for p in points {
        let ch = atlas.chart(&p.chart).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", p.chart)))?;
        let d = data.get(&p.chart).ok_or_else(|| Error::Geometry(format!("no data on chart `{}`", p.chart)))?;
        let v = residue_at(d, &ch.tangential, &phi, &p.coords)?;
        out.push(PointResidue { chart: p.chart.clone(), point: point_label(p), residue: v.to_string(), cluster: false, value: v });
    }
    Ok(out)
}

fn failed(name: &str, kind: &str, reason: String) -> ObjectReport {
    ObjectReport {
        name: name.to_string(),
        kind: kind.to_string(),
        summary: BTreeMap::new(),
        checks: vec![],
        points: vec![],
        sum: None,
        expected: None,
        verdict: Verdict::Fail,
        reason: Some(reason),
    }
}

fn verify_object(bundle: &ModelBundle, atlas: &Atlas, obj: &ObjectDecl, degree: &std::result::Result<G, String>) -> ObjectReport {
    let kind = match obj {
        ObjectDecl::Foliation(_) => "foliation",
        ObjectDecl::Map(_) => "map",
    };
    let pl = match pipeline(atlas, obj) {
        Ok(p) => p,
        Err(e) => return failed(obj.name(), kind, e.to_string()),
    };
    let mut rep = ObjectReport {
        name: obj.name().to_string(),
        kind: pl.kind.to_string(),
        summary: pl.summary.clone(),
        checks: pl.checks.clone(),
        points: vec![],
        sum: None,
        expected: None,
        verdict: Verdict::Fail,
        reason: None,
    };
    if let Some(why) = &pl.obstruction {
        rep.reason = Some(why.clone());
        return rep;
    }
    let points: Vec<&PointDecl> = bundle.points.iter().filter(|p| p.object.as_deref().is_none_or(|o| o == obj.name())).collect();
    let declared = !points.is_empty();
    let residues = if declared {
        declared_residues(atlas, &pl, &points)
    } else if pl.no_singular_points {
        Ok(vec![])
    } else {
        match &pl.data {
            Ok(d) => enumerate_curve(atlas, d),
            Err(e) => Err(Error::Unsupported(format!("{}; declared-points mode required", e))),
        }
    };
    let residues = match residues {
        Ok(r) => r,
        Err(e) => {
            rep.reason = Some(e.to_string());
            return rep;
        }
    };
    let sum = residues.iter().fold(G::zero(), |a, p| &a + &p.value);
    rep.points = residues.iter().map(PointEntry::from).collect();
    rep.sum = Some(sum.to_string());
    let expected = if declared {
        match (&bundle.expect_sum, degree) {
            (Some(s), _) => Ok(s.clone()),
            (None, d) => d.clone(),
        }
    } else {
        if let (Some(s), Ok(d)) = (&bundle.expect_sum, degree) {
            rep.checks.push(Check::new("declared sum equals degree", s == d, format!("{} vs {}", s, d)));
        }
        match (degree, &bundle.expect_sum) {
            (Ok(d), _) => Ok(d.clone()),
            (Err(_), Some(s)) => Ok(s.clone()),
            (Err(e), None) => Err(e.clone()),
        }
    };
    let expected = match expected {
        Ok(e) => e,
        Err(e) => {
            rep.reason = Some(format!("no expected value: {}", e));
            return rep;
        }
    };
    rep.expected = Some(expected.to_string());
    let checks_ok = rep.checks.iter().all(|c| c.passed);
    if sum == expected && checks_ok {
        rep.verdict = Verdict::Pass;
    } else if sum != expected {
        rep.reason = Some(if residues.is_empty() {
            format!("inconsistent model: no singular points but expected {}", expected)
        } else {
            format!("sum {} differs from expected {}", sum, expected)
        });
    } else {
        let bad: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        rep.reason = Some(format!("failed checks: {}", bad.join(", ")));
    }
    rep
}

fn summarize(atlas: &Atlas) -> Result<ClassificationSummary> {
    let c = classify_atlas(atlas)?;
    Ok(ClassificationSummary {
        adapted: c.adapted,
        splitting: c.splitting,
        two_splitting: c.two_splitting,
        comfortable: c.comfortable,
        two_linearizable: c.two_linearizable,
        witnesses: c.witnesses.iter().map(|w| format!("{} ({} -> {}): {} = {}", w.condition, w.from, w.to, w.derivative, w.value)).collect(),
    })
}

/// The atlas the pipelines run on, after any declared splitting correction,
/// with objects in its coordinates.
pub fn prepared(bundle: &ModelBundle) -> Result<(Atlas, Vec<ObjectDecl>)> {
    if bundle.cochains.is_empty() {
        return Ok((bundle.atlas.clone(), bundle.objects.clone()));
    }
    Ok((apply_splitting_correction(&bundle.atlas, &bundle.cochains)?, correct_objects(bundle)?))
}

fn degree_of(bundle: &ModelBundle, atlas: &Atlas) -> std::result::Result<G, String> {
    match &bundle.expect_degree {
        Some(DegreeExpectation::Declared(k)) => Ok(G::from_int(*k)),
        Some(DegreeExpectation::Compute) | None => normal_bundle_degree(atlas).map(G::from_int).map_err(|e| e.to_string()),
    }
}

fn verification(bundle: &ModelBundle) -> VerificationReport {
    let start = Instant::now();
    let mut rep = VerificationReport {
        model: bundle.name.clone(),
        description: bundle.description.clone(),
        classification: None,
        corrected: !bundle.cochains.is_empty(),
        before_correction: None,
        degree: None,
        objects: vec![],
        verdict: Verdict::Fail,
        reason: None,
        elapsed_ms: 0,
    };
    if rep.corrected {
        rep.before_correction = summarize(&bundle.atlas).ok();
    }
    let (atlas, objects) = match prepared(bundle) {
        Ok(x) => x,
        Err(e) => {
            rep.classification = summarize(&bundle.atlas).ok();
            rep.reason = Some(e.to_string());
            return rep;
        }
    };
    match summarize(&atlas) {
        Ok(c) => {
            if !c.adapted {
                rep.reason = Some("atlas is not adapted to S".into());
            }
            rep.classification = Some(c);
        }
        Err(e) => rep.reason = Some(e.to_string()),
    }
    let degree = degree_of(bundle, &atlas);
    if let Ok(d) = &degree {
        rep.degree = Some(d.to_string());
    }
    if rep.reason.is_none() {
        if objects.is_empty() {
            rep.reason = Some("model declares no foliation or map".into());
        }
        for obj in &objects {
            rep.objects.push(verify_object(bundle, &atlas, obj, &degree));
        }
    }
    if rep.reason.is_none() && rep.objects.iter().all(|o| o.verdict == Verdict::Pass) {
        rep.verdict = Verdict::Pass;
    }
    rep.elapsed_ms = start.elapsed().as_millis();
    rep
}

/// Runs every pipeline on the model. Never panics: internal failures become FAIL entries.
pub fn run_verification(bundle: &ModelBundle) -> VerificationReport {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| verification(bundle))) {
        Ok(r) => r,
        Err(p) => {
            let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default();
            VerificationReport {
                model: bundle.name.clone(),
                description: bundle.description.clone(),
                classification: None,
                corrected: false,
                before_correction: None,
                degree: None,
                objects: vec![],
                verdict: Verdict::Fail,
                reason: Some(format!("internal error: {}", msg)),
                elapsed_ms: 0,
            }
        }
    }
}

/// Exact residue of one object at a point given in a chart's tangential coordinates.
pub fn residue_at_point(bundle: &ModelBundle, object: Option<&str>, chart: &str, coords: &BTreeMap<String, G>, phi: Option<&Phi>) -> Result<G> {
    let (atlas, objects) = prepared(bundle)?;
    let obj = match object {
        Some(n) => objects.iter().find(|o| o.name() == n).ok_or_else(|| Error::Geometry(format!("no object named `{}`", n)))?,
        None => objects.first().ok_or_else(|| Error::Geometry("model declares no foliation or map".into()))?,
    };
    let pl = pipeline(&atlas, obj)?;
    if let Some(why) = pl.obstruction {
        return Err(Error::Geometry(why));
    }
    let data = pl.data?;
    let ch = atlas.chart(chart).ok_or_else(|| Error::Geometry(format!("unknown chart `{}`", chart)))?;
    let d = data.get(chart).ok_or_else(|| Error::Geometry(format!("no data on chart `{}`", chart)))?;
    let default = Phi::chern_power(atlas.dim_s());
    residue_at(d, &ch.tangential, phi.unwrap_or(&default), coords)
}

/// Classification, witnesses, degree and conormal cocycle of a model's atlas, as text.
pub fn check_atlas(bundle: &ModelBundle) -> Result<String> {
    use std::fmt::Write as _;
    let c = summarize(&bundle.atlas)?;
    let mut out = String::new();
    let _ = writeln!(out, "model {}", bundle.name);
    let _ = writeln!(out, "  charts: {}", bundle.atlas.charts().iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(out, "  codim {}, dim S {}", bundle.atlas.codim(), bundle.atlas.dim_s());
    for (k, v) in [("adapted", c.adapted), ("splitting", c.splitting), ("2-splitting", c.two_splitting), ("comfortable", c.comfortable), ("2-linearizable", c.two_linearizable)] {
        let _ = writeln!(out, "  {:<15} {}", k, v);
    }
    for w in &c.witnesses {
        let _ = writeln!(out, "  witness: {}", w);
    }
    if c.adapted {
        for (a, b) in bundle.atlas.pairs() {
            let s = crate::atlas::conormal_cocycle(&bundle.atlas, &a, &b)?;
            let _ = writeln!(out, "  conormal cocycle ({}, {}): {}", a, b, s);
        }
    }
    match normal_bundle_degree(&bundle.atlas) {
        Ok(d) => {
            let _ = writeln!(out, "  normal bundle degree: {}", d);
        }
        Err(e) => {
            let _ = writeln!(out, "  normal bundle degree: unavailable ({})", e);
        }
    }
    if !bundle.cochains.is_empty() {
        match apply_splitting_correction(&bundle.atlas, &bundle.cochains) {
            Ok(fixed) => {
                let c2 = classify_atlas(&fixed)?;
                let _ = writeln!(out, "  after correction: splitting {}, comfortable {}", c2.splitting, c2.comfortable);
            }
            Err(e) => {
                let _ = writeln!(out, "  correction failed: {}", e);
            }
        }
    }
    Ok(out)
}

//! The bundled example models.

use crate::error::{Error, Result};
use crate::parser::manifest::ModelBundle;
use crate::parser::parse_manifest;

pub const CORPUS: &[(&str, &str)] = &[
    ("linear_cs", include_str!("../../corpus/linear_cs.man")),
    ("p2_line", include_str!("../../corpus/p2_line.man")),
    ("blowup_foliation", include_str!("../../corpus/blowup_foliation.man")),
    ("transversal_2lin", include_str!("../../corpus/transversal_2lin.man")),
    ("map_tangential_nu2", include_str!("../../corpus/map_tangential_nu2.man")),
    ("map_codim1_index", include_str!("../../corpus/map_codim1_index.man")),
    ("map_mobius", include_str!("../../corpus/map_mobius.man")),
    ("nonsplit_demo", include_str!("../../corpus/nonsplit_demo.man")),
    ("blowup_map", include_str!("../../corpus/blowup_map.man")),
    ("tangent_plane_flat", include_str!("../../corpus/tangent_plane_flat.man")),
    ("p2_three_charts", include_str!("../../corpus/p2_three_charts.man")),
    ("map_three_charts", include_str!("../../corpus/map_three_charts.man")),
];

pub fn corpus_text(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn corpus_model(name: &str) -> Result<ModelBundle> {
    let text = corpus_text(name).ok_or_else(|| Error::Geometry(format!("no corpus model `{}`", name)))?;
    parse_manifest(text)
}

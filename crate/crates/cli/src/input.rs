//! Format detection for input files.

use anyhow::{bail, Result};
use shortpa_core::apcover::{APCoverInstance, MAPCoverInstance};
use shortpa_core::formats;
use shortpa_core::geometry::{GIPInstance, HPolytope, VPolytope};
use shortpa_core::kpt::PipInstance;
use shortpa_core::optimize::{BilevelInstance, ParetoInstance};
use shortpa_core::presburger::ShortSentence;
use shortpa_core::satred::{Cnf3, QbfInstance};

pub enum Input {
    Cnf(Cnf3),
    Qbf(QbfInstance),
    ApCover(APCoverInstance),
    MapCover(MAPCoverInstance),
    Sentence(ShortSentence),
    Gip(GIPInstance),
    Bilevel(BilevelInstance),
    Pareto(ParetoInstance),
    Pip(PipInstance),
    HPoly(HPolytope),
    VPoly(VPolytope),
}

impl Input {
    pub fn kind(&self) -> &'static str {
        match self {
            Input::Cnf(_) => "CNF",
            Input::Qbf(_) => "QBF",
            Input::ApCover(_) => "AP-COVER",
            Input::MapCover(_) => "m-AP-COVER",
            Input::Sentence(_) => "sentence",
            Input::Gip(_) => "GIP",
            Input::Bilevel(_) => "bilevel",
            Input::Pareto(_) => "Pareto",
            Input::Pip(_) => "PIP",
            Input::HPoly(_) | Input::VPoly(_) => "polytope",
        }
    }
}

fn first_key(text: &str) -> Option<&str> {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("c ") && *l != "c")
        .and_then(|l| l.split_whitespace().next())
}

fn has_quantifier_line(text: &str) -> bool {
    text.lines().any(|l| {
        let mut t = l.split_whitespace();
        matches!(t.next(), Some("a" | "e")) && t.next().is_some()
    })
}

pub fn parse(text: &str) -> Result<Input> {
    Ok(match first_key(text) {
        Some("p") if has_quantifier_line(text) => Input::Qbf(formats::parse_qdimacs(text)?),
        Some("p") => Input::Cnf(formats::parse_dimacs(text)?),
        Some("J") => Input::ApCover(formats::parse_apcover(text)?),
        Some("PREFIX") => Input::MapCover(formats::parse_mapcover(text)?),
        Some("SENTENCE") => Input::Sentence(formats::parse_sentence(text)?),
        Some("GIP") => Input::Gip(formats::parse_gip(text)?),
        Some("BILEVEL") => Input::Bilevel(formats::parse_bilevel(text)?),
        Some("PARETO") => Input::Pareto(formats::parse_pareto(text)?),
        Some("PIP") => Input::Pip(formats::parse_pip(text)?),
        Some("H") => Input::HPoly(formats::parse_hpolytope(text)?),
        Some("V") => Input::VPoly(formats::parse_vpolytope(text)?),
        Some(k) => bail!("unrecognized input format starting with `{k}`"),
        None => bail!("empty input"),
    })
}

pub fn write(input: &Input) -> String {
    match input {
        Input::Cnf(f) => formats::write_dimacs(f),
        Input::Qbf(f) => formats::write_qdimacs(f),
        Input::ApCover(i) => formats::write_apcover(i),
        Input::MapCover(i) => formats::write_mapcover(i),
        Input::Sentence(s) => formats::write_sentence(s),
        Input::Gip(g) => formats::write_gip(g),
        Input::Bilevel(b) => formats::write_bilevel(b),
        Input::Pareto(p) => formats::write_pareto(p),
        Input::Pip(p) => formats::write_pip(p),
        Input::HPoly(h) => formats::write_hpolytope(h),
        Input::VPoly(v) => formats::write_vpolytope(v),
    }
}

/// Canonical bytes of a file that is already in canonical form. Files with
/// comments are not canonical, so `None` is returned for them.
pub fn reserialize(text: &str) -> Result<Option<String>> {
    let input = parse(text)?;
    let has_comments = text.lines().any(|l| {
        let l = l.trim();
        l.starts_with('#') || l == "c" || l.starts_with("c ")
    });
    Ok((!has_comments).then(|| write(&input)))
}

//! Reading and writing models: a line-based text format and a JSON rendering
//! of the same fields.
//!
//! Text format, one declaration per line, `#` to end of line is a comment:
//!
//! ```text
//! kind dproduct
//! worlds1 x0 x1
//! worlds2 y0 y1
//! r1 x0 x1
//! r2@x1 y0 y1
//! val p1 x1 y1
//! nom i1 x0
//! nom a1 y0
//! designated x0 y0
//! ```
//!
//! Product models use `r2 y0 y1` lines instead of `r2@x`. Without a `kind`
//! line the kind is dproduct if any `r2@` line is present.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{FrameKind, Kripke, KripkeDProduct, KripkeProduct, Model, Relation, Valuation, WorldPair};
use crate::syntax::{parse, Atom, Dim, Formula, Nominal};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("invalid JSON model: {0}")]
    Json(String),
    #[error("{0}")]
    Invalid(String),
}

/// A model together with an optional designated world pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelFile {
    pub model: Model,
    pub designated: Option<WorldPair>,
}

/// JSON shape. `r2` is a list of pairs for product models and a map from
/// first-dimension world to pairs for dependent products.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelJson {
    pub kind: FrameKind,
    pub worlds1: Vec<String>,
    pub worlds2: Vec<String>,
    pub r1: Vec<(String, String)>,
    pub r2: R2Json,
    #[serde(default)]
    pub val: BTreeMap<String, Vec<(String, String)>>,
    #[serde(default)]
    pub nom: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designated: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum R2Json {
    Product(Vec<(String, String)>),
    Dependent(BTreeMap<String, Vec<(String, String)>>),
}

/// Model data keyed by world names, before index resolution.
#[derive(Default)]
struct Draft {
    kind: Option<FrameKind>,
    worlds1: Option<Vec<String>>,
    worlds2: Option<Vec<String>>,
    r1: Vec<(String, String)>,
    r2: Vec<(String, String)>,
    r2_at: Vec<(String, String, String)>,
    val: Vec<(String, String, String)>,
    nom: Vec<(String, String)>,
    designated: Option<(String, String)>,
}

pub fn parse_model_text(text: &str) -> Result<ModelFile, ExchangeError> {
    let mut d = Draft::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = words.split_first() else { continue };
        let err = |message: String| ExchangeError::Text { line, message };
        let arity = |n: usize| {
            if rest.len() == n {
                Ok(())
            } else {
                Err(err(format!("`{head}` takes {n} arguments, found {}", rest.len())))
            }
        };
        let owned = |i: usize| rest[i].to_string();
        match head {
            "kind" => {
                arity(1)?;
                d.kind = Some(match rest[0] {
                    "product" => FrameKind::Product,
                    "dproduct" => FrameKind::DProduct,
                    other => return Err(err(format!("unknown kind `{other}`"))),
                });
            }
            "worlds1" | "worlds2" => {
                if rest.is_empty() {
                    return Err(err(format!("`{head}` needs at least one world")));
                }
                let slot = if head == "worlds1" { &mut d.worlds1 } else { &mut d.worlds2 };
                if slot.is_some() {
                    return Err(err(format!("duplicate `{head}` line")));
                }
                *slot = Some(rest.iter().map(|s| s.to_string()).collect());
            }
            "r1" => {
                arity(2)?;
                d.r1.push((owned(0), owned(1)));
            }
            "r2" => {
                arity(2)?;
                d.r2.push((owned(0), owned(1)));
            }
            "val" => {
                arity(3)?;
                d.val.push((owned(0), owned(1), owned(2)));
            }
            "nom" => {
                arity(2)?;
                d.nom.push((owned(0), owned(1)));
            }
            "designated" => {
                arity(2)?;
                d.designated = Some((owned(0), owned(1)));
            }
            h if h.starts_with("r2@") => {
                arity(2)?;
                d.r2_at.push((h["r2@".len()..].to_string(), owned(0), owned(1)));
            }
            other => return Err(err(format!("unknown declaration `{other}`"))),
        }
    }
    d.build()
}

pub fn parse_model_json(text: &str) -> Result<ModelFile, ExchangeError> {
    let j: ModelJson = serde_json::from_str(text).map_err(|e| ExchangeError::Json(e.to_string()))?;
    model_from_json(j)
}

pub fn model_from_json(j: ModelJson) -> Result<ModelFile, ExchangeError> {
    let mut d = Draft {
        kind: Some(j.kind),
        worlds1: Some(j.worlds1),
        worlds2: Some(j.worlds2),
        r1: j.r1,
        designated: j.designated,
        ..Draft::default()
    };
    match j.r2 {
        R2Json::Product(pairs) => d.r2 = pairs,
        R2Json::Dependent(map) => {
            for (x, pairs) in map {
                d.r2_at.extend(pairs.into_iter().map(|(a, b)| (x.clone(), a, b)));
            }
        }
    }
    for (p, pairs) in j.val {
        d.val.extend(pairs.into_iter().map(|(x, y)| (p.clone(), x, y)));
    }
    d.nom = j.nom.into_iter().collect();
    d.build()
}

/// Accepts either format, choosing JSON when the text starts with `{`.
pub fn parse_model(text: &str) -> Result<ModelFile, ExchangeError> {
    if text.trim_start().starts_with('{') {
        parse_model_json(text)
    } else {
        parse_model_text(text)
    }
}

fn parse_atom(name: &str) -> Result<Atom, ExchangeError> {
    match parse(name) {
        Ok(Formula::Atom(a)) => Ok(a),
        _ => Err(ExchangeError::Invalid(format!("`{name}` is not an atom"))),
    }
}

fn index_of(names: &[String], name: &str, what: &str) -> Result<usize, ExchangeError> {
    names
        .iter()
        .position(|w| w == name)
        .ok_or_else(|| ExchangeError::Invalid(format!("unknown {what} world `{name}`")))
}

impl Draft {
    fn build(self) -> Result<ModelFile, ExchangeError> {
        let w1 = self.worlds1.ok_or_else(|| ExchangeError::Invalid("missing worlds1".into()))?;
        let w2 = self.worlds2.ok_or_else(|| ExchangeError::Invalid("missing worlds2".into()))?;
        for (names, what) in [(&w1, "worlds1"), (&w2, "worlds2")] {
            if names.is_empty() {
                return Err(ExchangeError::Invalid(format!("{what} is empty")));
            }
            if names.iter().collect::<BTreeSet<_>>().len() != names.len() {
                return Err(ExchangeError::Invalid(format!("{what} repeats a world name")));
            }
        }
        let kind = self.kind.unwrap_or(if self.r2_at.is_empty() { FrameKind::Product } else { FrameKind::DProduct });
        let i1 = |n: &str| index_of(&w1, n, "first-dimension");
        let i2 = |n: &str| index_of(&w2, n, "second-dimension");

        let mut r1 = Relation::empty(w1.len());
        for (a, b) in &self.r1 {
            r1.insert(i1(a)?, i1(b)?);
        }
        let mut valuation = Valuation::default();
        for (p, x, y) in &self.val {
            match parse_atom(p)? {
                Atom::Prop(q) => valuation.set_prop(q, WorldPair::new(i1(x)?, i2(y)?)),
                Atom::Nom(_) => return Err(ExchangeError::Invalid(format!("`val` needs a proposition, got `{p}`"))),
            }
        }
        for (n, w) in &self.nom {
            match parse_atom(n)? {
                Atom::Nom(nom) => {
                    let world = if nom.dim == Dim::One { i1(w)? } else { i2(w)? };
                    valuation.set_nominal(nom, world);
                }
                Atom::Prop(_) => return Err(ExchangeError::Invalid(format!("`nom` needs a nominal, got `{n}`"))),
            }
        }
        let model = match kind {
            FrameKind::Product => {
                if !self.r2_at.is_empty() {
                    return Err(ExchangeError::Invalid("product model with `r2@` edges".into()));
                }
                let mut r2 = Relation::empty(w2.len());
                for (a, b) in &self.r2 {
                    r2.insert(i2(a)?, i2(b)?);
                }
                Model::Product(KripkeProduct { worlds1: w1.clone(), worlds2: w2.clone(), r1, r2, valuation })
            }
            FrameKind::DProduct => {
                if !self.r2.is_empty() {
                    return Err(ExchangeError::Invalid("dproduct model with unindexed `r2` edges".into()));
                }
                let mut r2 = vec![Relation::empty(w2.len()); w1.len()];
                for (x, a, b) in &self.r2_at {
                    r2[i1(x)?].insert(i2(a)?, i2(b)?);
                }
                Model::DProduct(KripkeDProduct { worlds1: w1.clone(), worlds2: w2.clone(), r1, r2, valuation })
            }
        };
        let designated = match &self.designated {
            Some((x, y)) => Some(WorldPair::new(i1(x)?, i2(y)?)),
            None => None,
        };
        Ok(ModelFile { model, designated })
    }
}

fn pair_names(m: &Model, x: usize, y: usize) -> (String, String) {
    (m.worlds1()[x].clone(), m.worlds2()[y].clone())
}

pub fn model_to_json(m: &Model, designated: Option<WorldPair>) -> ModelJson {
    let w1 = m.worlds1();
    let w2 = m.worlds2();
    let r1 = m.r1().pairs().map(|(a, b)| (w1[a].clone(), w1[b].clone())).collect();
    let r2 = match m {
        Model::Product(p) => R2Json::Product(p.r2.pairs().map(|(a, b)| (w2[a].clone(), w2[b].clone())).collect()),
        Model::DProduct(d) => R2Json::Dependent(
            d.r2.iter()
                .enumerate()
                .map(|(x, r)| (w1[x].clone(), r.pairs().map(|(a, b)| (w2[a].clone(), w2[b].clone())).collect()))
                .collect(),
        ),
    };
    let val = m
        .valuation()
        .props
        .iter()
        .map(|(p, set)| (Atom::Prop(*p).to_string(), set.iter().map(|w| pair_names(m, w.x, w.y)).collect()))
        .collect();
    let nom = m
        .valuation()
        .noms
        .iter()
        .map(|(n, &w)| (n.to_string(), if n.dim == Dim::One { w1[w].clone() } else { w2[w].clone() }))
        .collect();
    ModelJson {
        kind: m.kind(),
        worlds1: w1.to_vec(),
        worlds2: w2.to_vec(),
        r1,
        r2,
        val,
        nom,
        designated: designated.map(|w| pair_names(m, w.x, w.y)),
    }
}

pub fn render_model_json(m: &Model, designated: Option<WorldPair>) -> String {
    serde_json::to_string_pretty(&model_to_json(m, designated)).expect("model JSON serializes")
}

pub fn render_model_text(m: &Model, designated: Option<WorldPair>) -> String {
    let w1 = m.worlds1();
    let w2 = m.worlds2();
    let mut out = String::new();
    writeln!(out, "kind {}", m.kind()).unwrap();
    writeln!(out, "worlds1 {}", w1.join(" ")).unwrap();
    writeln!(out, "worlds2 {}", w2.join(" ")).unwrap();
    for (a, b) in m.r1().pairs() {
        writeln!(out, "r1 {} {}", w1[a], w1[b]).unwrap();
    }
    match m {
        Model::Product(p) => {
            for (a, b) in p.r2.pairs() {
                writeln!(out, "r2 {} {}", w2[a], w2[b]).unwrap();
            }
        }
        Model::DProduct(d) => {
            for (x, r) in d.r2.iter().enumerate() {
                for (a, b) in r.pairs() {
                    writeln!(out, "r2@{} {} {}", w1[x], w2[a], w2[b]).unwrap();
                }
            }
        }
    }
    for (p, set) in &m.valuation().props {
        for w in set {
            writeln!(out, "val p{p} {} {}", w1[w.x], w2[w.y]).unwrap();
        }
    }
    for (n, &w) in &m.valuation().noms {
        let world = if n.dim == Dim::One { &w1[w] } else { &w2[w] };
        writeln!(out, "nom {n} {world}").unwrap();
    }
    if let Some(w) = designated {
        writeln!(out, "designated {} {}", w1[w.x], w2[w.y]).unwrap();
    }
    out
}

/// Looks up a nominal's world in a named model, for callers holding names.
pub fn nominal_world_name(m: &Model, n: Nominal) -> Option<&str> {
    let w = m.valuation().nominal(n)?;
    Some(match n.dim {
        Dim::One => &m.worlds1()[w],
        Dim::Two => &m.worlds2()[w],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWAP: &str = "\
# two first-dimension worlds, R2 only above x2
worlds1 x1 x2
worlds2 y1 y2
r1 x1 x2
r2@x2 y1 y2
val p1 x2 y2
designated x1 y1
";

    #[test]
    fn text_infers_dproduct_from_indexed_edges() {
        let f = parse_model_text(SWAP).unwrap();
        assert_eq!(f.model.kind(), FrameKind::DProduct);
        assert_eq!(f.designated, Some(WorldPair::new(0, 0)));
        let d = f.model.as_dproduct().unwrap();
        assert!(d.r2[0].is_empty());
        assert!(d.r2[1].contains(0, 1));
    }

    #[test]
    fn text_and_json_round_trip() {
        let mut f = parse_model_text(SWAP).unwrap();
        f.model.valuation_mut().set_nominal(Nominal::first(1), 1);
        f.model.valuation_mut().set_nominal(Nominal::second(3), 0);
        let text = render_model_text(&f.model, f.designated);
        assert_eq!(parse_model_text(&text).unwrap(), f);
        let json = render_model_json(&f.model, f.designated);
        assert_eq!(parse_model(&json).unwrap(), f);
    }

    #[test]
    fn product_json_uses_a_pair_list() {
        let mut m = KripkeProduct::blank(1, 2);
        m.r2.insert(0, 1);
        let json = render_model_json(&m.clone().into(), None);
        assert!(json.contains("\"kind\": \"product\""));
        assert_eq!(parse_model_json(&json).unwrap().model, Model::Product(m));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_model_text("worlds1 x0\nworlds2 y0\nr1 x0\n").unwrap_err();
        assert!(matches!(e, ExchangeError::Text { line: 3, .. }), "{e}");
        assert!(parse_model_text("worlds1 x0\nworlds2 y0\nr1 x0 x9\n").is_err());
        assert!(parse_model_text("worlds1 x0\nworlds2 y0\nnom p1 x0\n").is_err());
        assert!(parse_model_text("worlds1 x0\n").is_err());
    }
}

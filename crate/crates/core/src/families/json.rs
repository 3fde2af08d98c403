//! Family JSON schema.
//!
//! ```json
//! {
//!   "label": "road runner m=2",
//!   "precision_bits": 128,
//!   "outer": {"cx": "0", "cy": "0", "r": "1"},
//!   "finite": [{"cx": "0.5", "cy": "0", "r": "0.125"}],
//!   "parametric": {"id": "road_runner", "params": {"m": 2}, "start": 2},
//!   "open_ended": false,
//!   "tail_bounds": {"1": "0.25"}
//! }
//! ```
//!
//! Reals are accepted as JSON numbers or decimal strings and written as
//! decimal strings that round-trip at the family precision. `parametric`
//! may be a single object or an array. Generator ids and their params:
//! `road_runner {m}`, `synthetic_budget {n, count, seed}`,
//! `infinite_order {count, seed}`, `sqrt {inner}`, `annulus {inner, n}`,
//! `affine {inner, shift: [re, im], scale}`, where `inner` is a nested
//! `{id, params}` object. `tail_bounds` maps an order to a bound on the
//! Browder tail at the origin and is only used for open-ended families.

use std::collections::BTreeMap;

use rug::{Complex, Float};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::families::{CheeseSpec, DiscFamily, Generator, ParametricTail};
use crate::geometry::Disc;
use crate::precision::{format_exact, Precision};

#[derive(Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Number(serde_json::Number),
}

impl Num {
    fn parse(&self, prec: Precision, path: &str) -> Result<Float> {
        let text = match self {
            Num::Text(s) => s.clone(),
            Num::Number(n) => n.to_string(),
        };
        prec.parse(&text).map_err(|e| Error::schema(path, e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisc {
    cx: Num,
    cy: Num,
    r: Num,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    id: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    start: Option<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    precision_bits: Option<u32>,
    #[serde(default)]
    outer: Option<RawDisc>,
    #[serde(default)]
    finite: Vec<RawDisc>,
    #[serde(default)]
    parametric: Option<OneOrMany<RawGenerator>>,
    #[serde(default)]
    open_ended: bool,
    #[serde(default)]
    tail_bounds: BTreeMap<String, Num>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RoadRunnerParams {
    m: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SyntheticParams {
    n: u32,
    count: u32,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InfiniteOrderParams {
    count: u32,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SqrtParams {
    inner: RawGenerator,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnnulusParams {
    inner: RawGenerator,
    n: u32,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AffineParams {
    inner: RawGenerator,
    shift: [Num; 2],
    scale: Num,
}

fn from_value<T: DeserializeOwned>(value: Value, path: &str) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let full = if inner == "." { path.to_string() } else { format!("{path}.{inner}") };
        Error::schema(full, e.into_inner().to_string())
    })
}

fn parse_disc(raw: &RawDisc, prec: Precision, path: &str) -> Result<Disc> {
    let cx = raw.cx.parse(prec, &format!("{path}.cx"))?;
    let cy = raw.cy.parse(prec, &format!("{path}.cy"))?;
    let r = raw.r.parse(prec, &format!("{path}.r"))?;
    if r <= 0 {
        return Err(Error::schema(format!("{path}.r"), "radius must be positive"));
    }
    Disc::new(Complex::with_val(prec.bits(), (cx, cy)), r).map_err(|e| Error::schema(path, e.to_string()))
}

fn parse_generator(raw: RawGenerator, prec: Precision, path: &str) -> Result<Generator> {
    let params = Value::Object(raw.params);
    let ppath = format!("{path}.params");
    let positive = |v: u32, field: &str| -> Result<u32> {
        if v == 0 {
            Err(Error::schema(format!("{ppath}.{field}"), "must be >= 1"))
        } else {
            Ok(v)
        }
    };
    Ok(match raw.id.as_str() {
        "road_runner" => {
            let p: RoadRunnerParams = from_value(params, &ppath)?;
            Generator::RoadRunner { m: positive(p.m, "m")? }
        }
        "synthetic_budget" => {
            let p: SyntheticParams = from_value(params, &ppath)?;
            Generator::SyntheticBudget {
                n: positive(p.n, "n")?,
                count: p.count,
                seed: p.seed,
            }
        }
        "infinite_order" => {
            let p: InfiniteOrderParams = from_value(params, &ppath)?;
            Generator::InfiniteOrder {
                count: p.count,
                seed: p.seed,
            }
        }
        "sqrt" => {
            let p: SqrtParams = from_value(params, &ppath)?;
            Generator::Sqrt(Box::new(parse_generator(p.inner, prec, &format!("{ppath}.inner"))?))
        }
        "annulus" => {
            let p: AnnulusParams = from_value(params, &ppath)?;
            Generator::Annulus {
                inner: Box::new(parse_generator(p.inner, prec, &format!("{ppath}.inner"))?),
                n: positive(p.n, "n")?,
            }
        }
        "affine" => {
            let p: AffineParams = from_value(params, &ppath)?;
            let re = p.shift[0].parse(prec, &format!("{ppath}.shift[0]"))?;
            let im = p.shift[1].parse(prec, &format!("{ppath}.shift[1]"))?;
            let scale = p.scale.parse(prec, &format!("{ppath}.scale"))?;
            if scale <= 0 {
                return Err(Error::schema(format!("{ppath}.scale"), "must be positive"));
            }
            Generator::Affine {
                inner: Box::new(parse_generator(p.inner, prec, &format!("{ppath}.inner"))?),
                shift: Complex::with_val(prec.bits(), (re, im)),
                scale,
            }
        }
        other => {
            return Err(Error::schema(format!("{path}.id"), format!("unknown generator id `{other}`")));
        }
    })
}

/// Parses a family document. `default_prec` applies when the document does
/// not set `precision_bits`.
pub fn cheese_from_json(text: &str, default_prec: Precision) -> Result<CheeseSpec> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawFamily = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner().to_string())
    })?;
    de.end().map_err(|e| Error::schema(".", e.to_string()))?;

    let prec = match raw.precision_bits {
        Some(bits) => Precision::new(bits).map_err(|e| Error::schema("precision_bits", e.to_string()))?,
        None => default_prec,
    };
    let mut fam = DiscFamily::empty(prec);
    if let Some(outer) = &raw.outer {
        fam = fam.with_outer(parse_disc(outer, prec, "outer")?);
    }
    for (i, d) in raw.finite.iter().enumerate() {
        fam.push(parse_disc(d, prec, &format!("finite[{i}]"))?);
    }
    let generators = match raw.parametric {
        None => Vec::new(),
        Some(OneOrMany::One(g)) => vec![("parametric".to_string(), g)],
        Some(OneOrMany::Many(gs)) => gs
            .into_iter()
            .enumerate()
            .map(|(i, g)| (format!("parametric[{i}]"), g))
            .collect(),
    };
    for (path, g) in generators {
        let start = g.start.unwrap_or(1);
        if start == 0 {
            return Err(Error::schema(format!("{path}.start"), "indices start at 1"));
        }
        fam.push_tail(ParametricTail {
            generator: parse_generator(g, prec, &path)?,
            start,
        });
    }
    fam = fam.open_ended(raw.open_ended);
    for (key, value) in &raw.tail_bounds {
        let path = format!("tail_bounds.{key}");
        let order: u32 = key
            .parse()
            .map_err(|_| Error::schema(&path, "keys must be nonnegative integer orders"))?;
        let bound = value.parse(prec, &path)?;
        if bound < 0 {
            return Err(Error::schema(&path, "tail bounds must be nonnegative"));
        }
        fam = fam.with_supplied_tail(order, bound);
    }
    Ok(CheeseSpec::new(fam, raw.label.unwrap_or_default()))
}

fn disc_json(d: &Disc) -> Value {
    json!({
        "cx": format_exact(d.center().real()),
        "cy": format_exact(d.center().imag()),
        "r": format_exact(d.radius()),
    })
}

fn generator_json(g: &Generator) -> Value {
    let params = match g {
        Generator::RoadRunner { m } => json!({ "m": m }),
        Generator::SyntheticBudget { n, count, seed } => json!({ "n": n, "count": count, "seed": seed }),
        Generator::InfiniteOrder { count, seed } => json!({ "count": count, "seed": seed }),
        Generator::Sqrt(inner) => json!({ "inner": generator_json(inner) }),
        Generator::Annulus { inner, n } => json!({ "inner": generator_json(inner), "n": n }),
        Generator::Affine { inner, shift, scale } => json!({
            "inner": generator_json(inner),
            "shift": [format_exact(shift.real()), format_exact(shift.imag())],
            "scale": format_exact(scale),
        }),
    };
    json!({ "id": g.id(), "params": params })
}

pub fn cheese_to_json(cheese: &CheeseSpec) -> Value {
    let fam = &cheese.family;
    let mut obj = Map::new();
    obj.insert("label".into(), Value::String(cheese.label.clone()));
    obj.insert("precision_bits".into(), json!(fam.prec().bits()));
    if !fam.outer_is_unit() {
        obj.insert("outer".into(), disc_json(fam.outer()));
    }
    obj.insert("finite".into(), Value::Array(fam.finite().iter().map(disc_json).collect()));
    let tails: Vec<Value> = fam
        .tails()
        .iter()
        .map(|t| {
            let mut g = generator_json(&t.generator);
            g["start"] = json!(t.start);
            g
        })
        .collect();
    match tails.len() {
        0 => {}
        1 => {
            obj.insert("parametric".into(), tails.into_iter().next().expect("one tail"));
        }
        _ => {
            obj.insert("parametric".into(), Value::Array(tails));
        }
    }
    if fam.is_open_ended() {
        obj.insert("open_ended".into(), Value::Bool(true));
    }
    if !fam.supplied_tails().is_empty() {
        let bounds: Map<String, Value> = fam
            .supplied_tails()
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(format_exact(v))))
            .collect();
        obj.insert("tail_bounds".into(), Value::Object(bounds));
    }
    Value::Object(obj)
}

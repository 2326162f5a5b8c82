//! Browser bindings. Each operation is a plain function returning a JSON
//! string, so it can be tested natively; the `#[wasm_bindgen]` wrappers only
//! convert errors to strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use symdisc::discrepancy::warnock_l2_sq;
use symdisc::faure::{faure_l2_sq, Target};
use symdisc::formulas::{
    c_constant_closed, c_constant_definition, leading_constant_of, scrambled_l2_sq_closed, sym_l2_sq_closed,
    CMethod,
};
use symdisc::pointset::{scrambled_hammersley, symmetrized, DEFAULT_SIZE_CAP};
use symdisc::table::table_row;
use symdisc::{parse_sigma, Error, Rational, SigmaPattern};

const DECIMALS: u32 = 6;

#[derive(Clone, Copy)]
enum Which {
    Sym,
    Scrambled,
}

fn which(what: &str) -> Result<Which, Error> {
    match what {
        "sym" => Ok(Which::Sym),
        "scrambled" => Ok(Which::Scrambled),
        other => Err(Error::Parse(format!("unknown set {other:?}; expected sym or scrambled"))),
    }
}

fn pattern(b: usize, sigma: &str, word: &str) -> Result<SigmaPattern, Error> {
    SigmaPattern::parse(parse_sigma(sigma, b)?, word)
}

/// An exact value with its rounded decimal alongside.
#[derive(Serialize, PartialEq, Eq, Debug)]
pub struct Exact {
    pub value: Rational,
    pub approx: String,
}

impl From<Rational> for Exact {
    fn from(value: Rational) -> Self {
        Exact {
            approx: value.to_decimal(DECIMALS),
            value,
        }
    }
}

#[derive(Serialize)]
struct Points {
    b: usize,
    n: usize,
    /// coordinates are integers over this
    scale: u64,
    sigma: String,
    word: String,
    points: Vec<[u64; 2]>,
}

pub fn points_json(b: usize, sigma: &str, word: &str, what: &str) -> Result<String, Error> {
    let p = pattern(b, sigma, word)?;
    let ps = match which(what)? {
        Which::Sym => symmetrized(&p, DEFAULT_SIZE_CAP)?,
        Which::Scrambled => scrambled_hammersley(&p, DEFAULT_SIZE_CAP)?,
    };
    Ok(to_json(&Points {
        b,
        n: p.len(),
        scale: ps.scale(),
        sigma: p.sigma().to_string(),
        word: p.word_string(),
        points: ps.points().iter().map(|q| [q.x, q.y]).collect(),
    }))
}

#[derive(Serialize)]
struct L2 {
    /// `(N·L2)²` with `N` the number of points
    label: &'static str,
    warnock: Exact,
    faure: Exact,
    /// `None` when σ does not commute with the reversal
    closed: Option<Exact>,
    agree: bool,
}

pub fn l2_json(b: usize, sigma: &str, word: &str, what: &str) -> Result<String, Error> {
    let p = pattern(b, sigma, word)?;
    let n = p.len();
    let (label, warnock, faure, closed) = match which(what)? {
        Which::Sym => (
            "(2b^n L2)^2",
            warnock_l2_sq(&symmetrized(&p, DEFAULT_SIZE_CAP)?),
            faure_l2_sq(&p, Target::Symmetrized, DEFAULT_SIZE_CAP)?,
            sym_l2_sq_closed(p.sigma(), n, CMethod::Closed).ok(),
        ),
        Which::Scrambled => (
            "(b^n L2)^2",
            warnock_l2_sq(&scrambled_hammersley(&p, DEFAULT_SIZE_CAP)?),
            faure_l2_sq(&p, Target::Scrambled, DEFAULT_SIZE_CAP)?,
            scrambled_l2_sq_closed(p.sigma(), n, p.l()).ok(),
        ),
    };
    let agree = warnock == faure && closed.as_ref().is_none_or(|c| *c == warnock);
    Ok(to_json(&L2 {
        label,
        warnock: warnock.into(),
        faure: faure.into(),
        closed: closed.map(Exact::from),
        agree,
    }))
}

#[derive(Serialize)]
struct Published {
    cycles: &'static str,
    g: usize,
    c: &'static str,
    leading: &'static str,
}

#[derive(Serialize)]
struct Constant {
    b: usize,
    sigma: String,
    c: Exact,
    /// `None` when σ does not commute with the reversal
    c_closed: Option<Exact>,
    leading: String,
    /// the printed minimum for this base, when there is one
    published: Option<Published>,
    /// `c` minus the printed minimum; zero for a minimizer, except at
    /// b = 26 where the printed fraction is off by 27/17576
    excess: Option<Exact>,
}

pub fn constant_json(b: usize, sigma: &str) -> Result<String, Error> {
    let s = parse_sigma(sigma, b)?;
    let c = c_constant_definition(&s);
    let row = table_row(b);
    let excess = match row {
        Some(r) => Some(Exact::from(&c - &r.c.parse::<Rational>()?)),
        None => None,
    };
    Ok(to_json(&Constant {
        b,
        sigma: s.to_string(),
        leading: leading_constant_of(&c, b, DECIMALS)?,
        c_closed: c_constant_closed(&s).ok().map(Exact::from),
        c: c.into(),
        published: row.map(|r| Published {
            cycles: r.cycles,
            g: r.g,
            c: r.c,
            leading: r.leading,
        }),
        excess,
    }))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain structs serialize")
}

fn js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

#[wasm_bindgen]
pub fn points(b: usize, sigma: &str, word: &str, what: &str) -> Result<String, JsValue> {
    points_json(b, sigma, word, what).map_err(js)
}

#[wasm_bindgen]
pub fn l2(b: usize, sigma: &str, word: &str, what: &str) -> Result<String, JsValue> {
    l2_json(b, sigma, word, what).map_err(js)
}

#[wasm_bindgen]
pub fn constant(b: usize, sigma: &str) -> Result<String, JsValue> {
    constant_json(b, sigma).map_err(js)
}

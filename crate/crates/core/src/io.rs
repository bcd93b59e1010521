//! JSON, CSV and LaTeX representations. Rationals are strings `"p/q"`,
//! indices are 1-based.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;
use crate::poly::{MultiIndex, Poly};
use crate::rmatrix::GramTable;
use crate::scalars::{format_rational, parse_rational, Rational, RationalFn, UPoly};
use crate::weyl::WeylElement;
use crate::zalgebra::ZElement;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFnJson {
    /// Ascending coefficients of the numerator.
    pub num: Vec<String>,
    /// Ascending coefficients of the monic denominator.
    pub den: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricJson {
    pub n: usize,
    pub eta: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exp: Vec<u32>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<PolyTermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylTermJson<C> {
    pub x: Vec<u32>,
    pub d: Vec<u32>,
    pub coeff: C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeylJson<C> {
    pub n: usize,
    pub terms: Vec<WeylTermJson<C>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramJson {
    pub r: usize,
    /// Sorted words, 1-based.
    pub words: Vec<Vec<usize>>,
    pub entries: Vec<Vec<RationalFnJson>>,
}

fn upoly_strings(p: &UPoly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

fn parse_all(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

pub fn rfn_to_json(f: &RationalFn) -> RationalFnJson {
    RationalFnJson {
        num: upoly_strings(f.numer()),
        den: upoly_strings(f.denom()),
    }
}

pub fn rfn_from_json(j: &RationalFnJson) -> Result<RationalFn> {
    RationalFn::new(UPoly::new(parse_all(&j.num)?), UPoly::new(parse_all(&j.den)?))
}

pub fn metric_to_json(m: &Metric) -> MetricJson {
    MetricJson {
        n: m.n(),
        eta: m
            .eta()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect(),
    }
}

pub fn metric_from_json(j: &MetricJson) -> Result<Metric> {
    let eta = j
        .eta
        .iter()
        .map(|row| parse_all(row))
        .collect::<Result<Vec<_>>>()?;
    if eta.len() != j.n {
        return Err(Error::DimensionMismatch(j.n, eta.len()));
    }
    Metric::new(eta)
}

fn check_len(n: usize, e: &[u32]) -> Result<MultiIndex> {
    if e.len() != n {
        return Err(Error::DimensionMismatch(n, e.len()));
    }
    Ok(MultiIndex(e.to_vec()))
}

pub fn poly_to_json(p: &Poly) -> PolyJson {
    PolyJson {
        n: p.n(),
        terms: p
            .terms()
            .map(|(e, c)| PolyTermJson {
                exp: e.0.clone(),
                coeff: format_rational(c),
            })
            .collect(),
    }
}

pub fn poly_from_json(j: &PolyJson) -> Result<Poly> {
    let terms = j
        .terms
        .iter()
        .map(|t| Ok((check_len(j.n, &t.exp)?, parse_rational(&t.coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    Poly::from_terms(j.n, terms)
}

pub fn weyl_to_json(w: &WeylElement) -> WeylJson<String> {
    WeylJson {
        n: w.n(),
        terms: w
            .terms()
            .map(|((x, d), c)| WeylTermJson {
                x: x.0.clone(),
                d: d.0.clone(),
                coeff: format_rational(c),
            })
            .collect(),
    }
}

pub fn weyl_from_json(j: &WeylJson<String>) -> Result<WeylElement> {
    let mut w = WeylElement::zero(j.n);
    for t in &j.terms {
        w.add_term((check_len(j.n, &t.x)?, check_len(j.n, &t.d)?), parse_rational(&t.coeff)?);
    }
    Ok(w)
}

pub fn zelement_to_json(z: &ZElement) -> WeylJson<RationalFnJson> {
    WeylJson {
        n: z.n(),
        terms: z
            .terms()
            .map(|((x, d), c)| WeylTermJson {
                x: x.0.clone(),
                d: d.0.clone(),
                coeff: rfn_to_json(c),
            })
            .collect(),
    }
}

/// Reads the terms as given; run the result through
/// [`crate::zalgebra::ZAlgebra::reduce`] to reach normal form.
pub fn zelement_from_json(j: &WeylJson<RationalFnJson>) -> Result<ZElement> {
    let mut z = ZElement::zero(j.n);
    for t in &j.terms {
        let term = ZElement::monomial(
            check_len(j.n, &t.x)?,
            check_len(j.n, &t.d)?,
            rfn_from_json(&t.coeff)?,
        );
        z = z.add(&term)?;
    }
    Ok(z)
}

pub fn gram_to_json(g: &GramTable) -> GramJson {
    GramJson {
        r: g.r,
        words: g
            .words
            .iter()
            .map(|w| w.iter().map(|a| a + 1).collect())
            .collect(),
        entries: g
            .entries
            .iter()
            .map(|row| row.iter().map(rfn_to_json).collect())
            .collect(),
    }
}

pub fn gram_from_json(j: &GramJson) -> Result<GramTable> {
    let words = j
        .words
        .iter()
        .map(|w| {
            w.iter()
                .map(|&a| a.checked_sub(1).ok_or_else(|| Error::Parse("index 0".into())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let entries = j
        .entries
        .iter()
        .map(|row| row.iter().map(rfn_from_json).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(GramTable { r: j.r, words, entries })
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        return "()".into();
    }
    w.iter().map(|a| (a + 1).to_string()).collect::<Vec<_>>().join(" ")
}

/// CSV with a header row of words and one row per word.
pub fn gram_to_csv(g: &GramTable) -> Result<String> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec![String::new()];
    header.extend(g.words.iter().map(|w| word_label(w)));
    wtr.write_record(&header).map_err(|e| Error::Parse(e.to_string()))?;
    for (w, row) in g.words.iter().zip(&g.entries) {
        let mut rec = vec![word_label(w)];
        rec.extend(row.iter().map(|c| c.to_string()));
        wtr.write_record(&rec).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = wtr.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn upoly_latex(p: &UPoly) -> String {
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if a.is_integer() {
            a.numer().to_string()
        } else {
            format!("\\frac{{{}}}{{{}}}", a.numer(), a.denom())
        };
        match i {
            0 => out.push_str(&coeff),
            _ => {
                if !a.is_one() {
                    out.push_str(&coeff);
                }
                out.push('H');
                if i > 1 {
                    out.push_str(&format!("^{{{i}}}"));
                }
            }
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub fn rfn_to_latex(f: &RationalFn) -> String {
    if f.is_polynomial() {
        upoly_latex(f.numer())
    } else {
        format!("\\frac{{{}}}{{{}}}", upoly_latex(f.numer()), upoly_latex(f.denom()))
    }
}

pub fn gram_to_latex(g: &GramTable) -> String {
    let rows: Vec<String> = g
        .entries
        .iter()
        .map(|row| row.iter().map(rfn_to_latex).collect::<Vec<_>>().join(" & "))
        .collect();
    format!("\\begin{{pmatrix}}\n{}\n\\end{{pmatrix}}", rows.join(" \\\\\n"))
}

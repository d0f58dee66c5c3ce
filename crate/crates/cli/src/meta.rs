//! Construction metadata carried on the `#meta` line of `gen` output.
//!
//! `construction` holds what is needed to rebuild the context exactly; the
//! remaining fields describe it for readers.

use losc_core::cancellation::Presentation;
use losc_core::constructions::{
    gen_bowditch, gen_cantor, gen_perfect, gen_perfect_family, gen_rips, gen_rips_nli, Bowditch, PerfectGroup,
    RipsOutput, SubgroupMap,
};
use losc_core::words::{Alphabet, Word};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{text, CliError};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Construction {
    Bowditch { indices: Vec<i64> },
    Perfect { seed: u64, family: Vec<i64> },
    Rips { seed: u64, nli: bool, q: String },
    Cantor { name: String, base: String },
}

pub enum Built {
    Bowditch(Bowditch),
    Perfect(PerfectGroup),
    Rips(RipsOutput),
    Cantor(Presentation),
}

impl Built {
    pub fn presentation(&self) -> &Presentation {
        match self {
            Built::Bowditch(b) => &b.presentation,
            Built::Perfect(p) => &p.presentation,
            Built::Rips(r) => &r.presentation,
            Built::Cantor(p) => p,
        }
    }
}

impl Construction {
    pub fn build(&self) -> Result<Built, CliError> {
        let gen_err = |e: losc_core::constructions::ConstructionError| CliError::input(e.to_string());
        Ok(match self {
            Construction::Bowditch { indices } => Built::Bowditch(gen_bowditch(indices).map_err(gen_err)?),
            Construction::Perfect { seed, family } => {
                let p = if family.is_empty() { gen_perfect(*seed) } else { gen_perfect_family(*seed, family) };
                Built::Perfect(p.map_err(gen_err)?)
            }
            Construction::Rips { seed, nli, q } => {
                let q = text::parse(q)?.presentation;
                let r = if *nli { gen_rips_nli(&q, *seed) } else { gen_rips(&q, *seed) };
                Built::Rips(r.map_err(gen_err)?)
            }
            Construction::Cantor { name, base } => {
                let base = text::parse(base)?.presentation;
                Built::Cantor(gen_cantor(&base, name).map_err(gen_err)?)
            }
        })
    }

    /// Reads the construction from a parsed file and checks it regenerates
    /// the file's presentation.
    pub fn from_parsed(parsed: &text::Parsed) -> Result<(Construction, Built), CliError> {
        let meta = parsed.meta.as_ref().ok_or_else(|| CliError::input("input has no #meta line"))?;
        let c: Construction = serde_json::from_value(
            meta.get("construction").cloned().ok_or_else(|| CliError::input("#meta has no `construction`"))?,
        )
        .map_err(|e| CliError::input(format!("bad construction: {e}")))?;
        let built = c.build()?;
        if built.presentation() != &parsed.presentation {
            return Err(CliError::input("#meta does not regenerate the presentation in the file"));
        }
        Ok((c, built))
    }
}

fn words(a: &Alphabet, ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| a.format_word(w)).collect()
}

fn map_doc(a: &Alphabet, m: &SubgroupMap) -> Value {
    json!({ "domain": words(a, &m.domain), "codomain": words(a, &m.codomain) })
}

/// The `#meta` document for a built construction.
pub fn describe(c: &Construction, built: &Built) -> Value {
    let a = &built.presentation().alphabet;
    let details = match built {
        Built::Bowditch(b) => json!({ "map": map_doc(a, &b.map) }),
        Built::Perfect(p) => {
            let splits: Vec<Value> = p
                .splits
                .iter()
                .map(|s| {
                    let mid = |x: Option<losc_core::words::SignedLetter>, n: u32| {
                        x.map_or("1".to_string(), |x| a.format_word(&Word::power_of(x, n as i64)))
                    };
                    json!({
                        "w": a.format_word(&s.w),
                        "mid": mid(s.x, s.n),
                        "v": a.format_word(&s.v),
                        "k_mid": mid(s.y, s.m),
                    })
                })
                .collect();
            json!({ "map": map_doc(a, &p.map), "splits": splits })
        }
        Built::Rips(r) => {
            let pairs: Vec<Value> = r
                .pairs
                .iter()
                .map(|p| {
                    json!({
                        "index": p.index,
                        "family": p.family.label(),
                        "i": p.i,
                        "l": p.l,
                        "h": a.format_word(&p.h),
                        "k": a.format_word(&p.k),
                    })
                })
                .collect();
            let names = a.names();
            let projection: Vec<Value> = r
                .projection
                .iter()
                .enumerate()
                .map(|(g, t)| json!([names[g], t.map_or(Value::Null, |q| Value::from(r.q_names[q].clone()))]))
                .collect();
            json!({
                "f_letters": r.layout.f_rank(),
                "g_generators": r.presentation.rank(),
                "base_letters": r.layout.free_rank(),
                "n_generators": r.n_generators,
                "pairs_before_q": r.pre_q_pairs(),
                "pairs": pairs,
                "projection": projection,
                "p_relators": words(a, &r.p_relators()),
            })
        }
        Built::Cantor(_) => json!({}),
    };
    json!({ "construction": c, "details": details })
}

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The inequalities that can be certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "univariate")]
    Univariate,
    #[serde(rename = "diederichs1d")]
    Diederichs1d,
    #[serde(rename = "2d-l2")]
    TwoDimL2,
    #[serde(rename = "2d-linf")]
    TwoDimLinf,
    #[serde(rename = "highd")]
    HighDim,
    #[serde(rename = "global-w1")]
    GlobalW1,
    #[serde(rename = "md-order")]
    MdOrder,
    #[serde(rename = "esprit")]
    Esprit,
    #[serde(rename = "vandermonde-pairs")]
    VandermondePairs,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::Univariate,
        TheoremId::Diederichs1d,
        TheoremId::TwoDimL2,
        TheoremId::TwoDimLinf,
        TheoremId::HighDim,
        TheoremId::GlobalW1,
        TheoremId::MdOrder,
        TheoremId::Esprit,
        TheoremId::VandermondePairs,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Univariate => "univariate",
            TheoremId::Diederichs1d => "diederichs1d",
            TheoremId::TwoDimL2 => "2d-l2",
            TheoremId::TwoDimLinf => "2d-linf",
            TheoremId::HighDim => "highd",
            TheoremId::GlobalW1 => "global-w1",
            TheoremId::MdOrder => "md-order",
            TheoremId::Esprit => "esprit",
            TheoremId::VandermondePairs => "vandermonde-pairs",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown theorem id `{s}`")))
    }
}

/// Direction of the certified inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// `lhs ≥ Σ rhs`; margin is `lhs − Σ rhs`.
    Geq,
    /// `lhs ≤ Σ rhs`; margin is `Σ rhs − lhs`.
    Leq,
}

impl Sense {
    pub fn margin(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Sense::Geq => lhs - rhs,
            Sense::Leq => rhs - lhs,
        }
    }
}

/// Serde helpers writing non-finite floats as the strings `inf`, `-inf`, `nan`.
mod nonfinite {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn to_repr(x: f64) -> Repr {
        if x.is_finite() {
            Repr::Num(x)
        } else if x.is_nan() {
            Repr::Text("nan".into())
        } else if x > 0.0 {
            Repr::Text("inf".into())
        } else {
            Repr::Text("-inf".into())
        }
    }

    fn from_repr<E: serde::de::Error>(r: Repr) -> Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("invalid float `{other}`"))),
            },
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        to_repr(*x).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        from_repr(Repr::deserialize(d)?)
    }

    pub mod map {
        use super::*;

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            let r: BTreeMap<&String, Repr> = m.iter().map(|(k, v)| (k, to_repr(*v))).collect();
            r.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            BTreeMap::<String, Repr>::deserialize(d)?
                .into_iter()
                .map(|(k, v)| from_repr(v).map(|x| (k, x)))
                .collect()
        }
    }
}

/// Roundoff allowance for an inequality between `lhs` and `rhs`.
pub fn slack(lhs: f64, rhs: f64) -> f64 {
    1e-10 * lhs.abs().max(rhs.abs()).max(1e-300)
}

/// An additional inequality evaluated alongside the main one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondaryCheck {
    pub name: String,
    pub premise: bool,
    #[serde(with = "nonfinite")]
    pub lhs: f64,
    #[serde(with = "nonfinite")]
    pub rhs: f64,
    pub sense: Sense,
    #[serde(with = "nonfinite")]
    pub margin: f64,
    /// Vacuously true when `premise` is false.
    pub holds: bool,
}

impl SecondaryCheck {
    pub fn new(name: &str, premise: bool, lhs: f64, rhs: f64, sense: Sense) -> Self {
        let margin = sense.margin(lhs, rhs);
        Self {
            name: name.to_string(),
            premise,
            lhs,
            rhs,
            sense,
            margin,
            holds: !premise || margin >= -slack(lhs, rhs),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub n: u32,
    pub d: usize,
    /// Largest node count among the inputs.
    pub m: usize,
    #[serde(with = "nonfinite")]
    pub c_min: f64,
    pub kappa: Option<f64>,
    pub seed: Option<u64>,
}

/// Outcome of one inequality check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    #[serde(rename = "premise")]
    pub premise_holds: bool,
    #[serde(with = "nonfinite")]
    pub lhs: f64,
    #[serde(with = "nonfinite::map")]
    pub rhs_terms: BTreeMap<String, f64>,
    pub sense: Sense,
    /// Signed slack; nonnegative when the inequality holds.
    #[serde(with = "nonfinite")]
    pub margin: f64,
    /// `premise_holds ⇒ margin ≥ −slack`.
    pub satisfied: bool,
    /// Matching-structure claims (empty `Y₃`, neighbour radius); vacuous
    /// without the premise.
    pub structural_ok: bool,
    #[serde(with = "nonfinite::map")]
    pub diagnostics: BTreeMap<String, f64>,
    pub secondary: Vec<SecondaryCheck>,
    pub meta: ReportMeta,
}

impl TheoremReport {
    pub fn new(
        theorem: TheoremId,
        premise_holds: bool,
        lhs: f64,
        rhs_terms: BTreeMap<String, f64>,
        sense: Sense,
        meta: ReportMeta,
    ) -> Self {
        let rhs: f64 = rhs_terms.values().sum();
        let margin = sense.margin(lhs, rhs);
        let holds = margin >= -slack(lhs, rhs);
        let mut diagnostics = BTreeMap::new();
        if !premise_holds {
            diagnostics.insert("conclusion_holds".to_string(), f64::from(u8::from(holds)));
        }
        Self {
            theorem,
            premise_holds,
            lhs,
            rhs_terms,
            sense,
            margin,
            satisfied: !premise_holds || holds,
            structural_ok: true,
            diagnostics,
            secondary: Vec::new(),
            meta,
        }
    }

    pub fn rhs(&self) -> f64 {
        self.rhs_terms.values().sum()
    }

    /// Main inequality, structural claims and every secondary check hold.
    pub fn passes(&self) -> bool {
        self.satisfied && self.structural_ok && self.secondary.iter().all(|s| s.holds)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
            let js = serde_json::to_string(&id).unwrap();
            assert_eq!(js, format!("\"{id}\""));
        }
        assert!("2d".parse::<TheoremId>().is_err());
    }

    #[test]
    fn margin_sign_follows_sense() {
        let terms: BTreeMap<_, _> = [("a".to_string(), 1.0), ("b".to_string(), 2.0)].into();
        let r = TheoremReport::new(TheoremId::Univariate, true, 4.0, terms.clone(), Sense::Geq, ReportMeta::default());
        assert_eq!(r.margin, 1.0);
        assert!(r.passes());
        let r = TheoremReport::new(TheoremId::GlobalW1, true, 4.0, terms, Sense::Leq, ReportMeta::default());
        assert_eq!(r.margin, -1.0);
        assert!(!r.passes());
    }

    #[test]
    fn failed_premise_is_vacuous_but_recorded() {
        let terms: BTreeMap<_, _> = [("a".to_string(), 5.0)].into();
        let r = TheoremReport::new(TheoremId::Univariate, false, 1.0, terms, Sense::Geq, ReportMeta::default());
        assert!(r.satisfied);
        assert_eq!(r.diagnostics["conclusion_holds"], 0.0);
    }

    #[test]
    fn equality_passes() {
        let terms: BTreeMap<_, _> = [("a".to_string(), 0.0)].into();
        let r = TheoremReport::new(TheoremId::TwoDimL2, true, 0.0, terms, Sense::Geq, ReportMeta::default());
        assert_eq!(r.margin, 0.0);
        assert!(r.passes());
    }
}

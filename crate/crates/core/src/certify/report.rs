use serde::{Deserialize, Serialize};

use crate::setlib::Point;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Property {
    /// Polyak-Lojasiewicz (`p = 2`).
    Pl,
    PLojasiewicz {
        p: f64,
    },
    Conditioning {
        p: f64,
    },
    SubmetricRegularity {
        p: f64,
    },
    /// `(mu/2) d^2 <= f - inf f <= (L/2) d^2`.
    Sandwich,
    /// Length and distance bounds of a proximal point trace.
    FiniteLength {
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// No sampled counterexample. Not a proof.
    Holds,
    Violated,
    Inconclusive,
}

/// Outcome of checking one inequality on a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub property: Property,
    #[serde(with = "extended_real")]
    pub estimated_constant: f64,
    pub claimed_constant: Option<f64>,
    pub verdict: Verdict,
    /// Extremal sample: the worst violation when violated, otherwise the
    /// sample attaining the estimate. `None` when no sample was used.
    pub witness: Option<Point>,
    pub samples_used: usize,
    pub tolerance: f64,
}

impl CertificationReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Serializes non-finite floats as the strings `"inf"`, `"-inf"`, `"nan"`.
pub mod extended_real {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("not an extended real: {other}"))),
            },
        }
    }
}

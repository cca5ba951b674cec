//! On-disk JSON schema for algebra, bimodule and homomorphism specs.

use serde::{Deserialize, Serialize};

/// A rational written either as a JSON integer or as text `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatText {
    Int(i64),
    Text(String),
}

impl RatText {
    pub fn as_text(&self) -> String {
        match self {
            RatText::Int(n) => n.to_string(),
            RatText::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub id: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub label: String,
    pub energy: RatText,
    pub maslov: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutEntry {
    pub id: String,
    pub coeff: RatText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermEntry {
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
    pub out: Vec<OutEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    pub class: String,
    pub terms: Vec<TermEntry>,
}

/// One file may hold an algebra, a bimodule over it (`module_basis`,
/// `n_ops`), or a homomorphism (`source`, `target`, `f_ops`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecFile {
    pub name: String,
    #[serde(default)]
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub classes: Vec<ClassEntry>,
    #[serde(default)]
    pub ops: Vec<OpEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_basis: Option<Vec<BasisEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n_ops: Vec<OpEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Box<SpecFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Box<SpecFile>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f_ops: Vec<OpEntry>,
}

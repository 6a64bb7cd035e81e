//! System description file (JSON)s.
//!
//! Rationals are strings `"p/q"` or `"p"` (bare integers are accepted too)
//! and are parsed while deserializing, so a bad value is reported with its
//! line and column.

use std::fmt;
use std::path::Path;

use ergotile::rational::{parse, Rational};
use ergotile::system::{ArithmeticPredicate, SuccessorObservable, SuccessorObservables};
use ergotile::{FiniteSystem, StreamSystem};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use crate::CliError;

/// An exact rational read from a string or an integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct QVisitor;
        impl Visitor<'_> for QVisitor {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational such as \"3/4\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse(v).map(Q).ok_or_else(|| E::custom(format!("invalid rational `{v}`")))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(Rational::from_integer(v.into())))
            }
        }
        d.deserialize_any(QVisitor)
    }
}

fn rationals(values: &[Q]) -> Vec<Rational> {
    values.iter().map(|q| q.0.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PredicateInput {
    Residue { modulus: u64, residue: u64 },
    Bit(u32),
}

impl PredicateInput {
    pub fn to_core(self) -> ArithmeticPredicate {
        match self {
            PredicateInput::Residue { modulus, residue } => ArithmeticPredicate::residue(modulus, residue),
            PredicateInput::Bit(index) => ArithmeticPredicate::bit(index),
        }
    }
}

fn one() -> Q {
    Q(Rational::from_integer(1.into()))
}

fn zero() -> Q {
    Q(Rational::from_integer(0.into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ObservableInput {
    Const(Q),
    Indicator {
        when: PredicateInput,
        #[serde(default = "one")]
        on: Q,
        #[serde(default = "zero")]
        off: Q,
    },
}

impl ObservableInput {
    fn to_core(&self) -> SuccessorObservable {
        match self {
            ObservableInput::Const(q) => SuccessorObservable::constant(q.0.clone()),
            ObservableInput::Indicator { when, on, off } => SuccessorObservable::Indicator {
                when: when.to_core(),
                on: on.0.clone(),
                off: off.0.clone(),
            },
        }
    }
}

/// How to obtain a separating family for the marker construction.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SeparatingInput {
    /// Binary digits `0..bits`.
    Dyadic { bits: u32 },
    Predicates(Vec<PredicateInput>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteInput {
    #[serde(default, rename = "kind")]
    pub _kind: Option<String>,
    pub step: Vec<usize>,
    pub f: Vec<Q>,
    pub g: Option<Vec<Q>>,
    pub h: Option<Vec<Q>>,
    pub w: Option<Vec<Q>>,
    pub measure: Option<Vec<Q>>,
    /// Tiling threshold `h = limsup − h_offset`, replacing `h`.
    pub h_offset: Option<Q>,
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamInput {
    #[serde(default, rename = "kind")]
    pub _kind: Option<String>,
    pub f: Option<ObservableInput>,
    pub g: Option<ObservableInput>,
    pub h: Option<ObservableInput>,
    pub w: Option<ObservableInput>,
    pub window: Option<usize>,
    /// Marker sets `B_0, B_1, …`, used as given.
    pub markers: Option<Vec<PredicateInput>>,
    /// Family for building markers when `markers` is absent.
    pub separating: Option<SeparatingInput>,
    pub probes: Option<Vec<u64>>,
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum SystemInput {
    Finite(FiniteInput),
    StreamSuccessor(StreamInput),
}

pub const DEFAULT_WINDOW: usize = 4096;
pub const DEFAULT_PROBES: u64 = 64;

impl SystemInput {
    /// Reads `kind` first, then deserializes the whole text as that kind,
    /// which keeps line and column information in errors.
    pub fn from_json(text: &str, source: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        struct Header {
            kind: String,
        }
        let err = |e: serde_json::Error| CliError::Parse {
            source_name: source.to_string(),
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        };
        let header: Header = serde_json::from_str(text).map_err(err)?;
        match header.kind.as_str() {
            "finite" => serde_json::from_str(text).map(SystemInput::Finite).map_err(err),
            "stream-successor" => serde_json::from_str(text).map(SystemInput::StreamSuccessor).map_err(err),
            other => Err(CliError::Invalid {
                location: format!("{source}: kind"),
                message: format!("unknown kind `{other}`, expected `finite` or `stream-successor`"),
            }),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let input = Self::from_json(&text, &path.display().to_string())?;
        input.validate()?;
        Ok(input)
    }

    /// Builds the system once so that bad values are reported at load time.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            SystemInput::Finite(s) => s.build().map(drop),
            SystemInput::StreamSuccessor(s) => s.build(s.window(None)).map(drop),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemInput::Finite(_) => "finite",
            SystemInput::StreamSuccessor(_) => "stream-successor",
        }
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

fn length_check(field: &str, values: &Option<Vec<Q>>, n: usize) -> Result<(), CliError> {
    match values {
        Some(v) if v.len() != n => Err(CliError::Invalid {
            location: field.to_string(),
            message: format!("has {} entries, expected {n}", v.len()),
        }),
        _ => Ok(()),
    }
}

impl FiniteInput {
    pub fn build(&self) -> Result<FiniteSystem, CliError> {
        let n = self.step.len();
        for (field, values) in [("g", &self.g), ("h", &self.h), ("w", &self.w), ("measure", &self.measure)] {
            length_check(field, values, n)?;
        }
        let or = |v: &Option<Vec<Q>>, default: i64| {
            v.as_deref()
                .map(rationals)
                .unwrap_or_else(|| vec![Rational::from_integer(default.into()); n])
        };
        FiniteSystem::new(
            self.step.clone(),
            rationals(&self.f),
            or(&self.g, 1),
            or(&self.h, 0),
            or(&self.w, 1),
        )
        .map_err(CliError::from_core)
    }

    pub fn measure(&self) -> Option<Vec<Rational>> {
        self.measure.as_deref().map(rationals)
    }
}

impl StreamInput {
    pub fn window(&self, flag: Option<usize>) -> usize {
        flag.or(self.window).unwrap_or(DEFAULT_WINDOW)
    }

    pub fn build(&self, window: usize) -> Result<StreamSystem<u64>, CliError> {
        let pick = |o: &Option<ObservableInput>, default: SuccessorObservable| {
            o.as_ref().map(ObservableInput::to_core).unwrap_or(default)
        };
        let defaults = SuccessorObservables::default();
        let obs = SuccessorObservables {
            f: pick(&self.f, defaults.f),
            g: pick(&self.g, defaults.g),
            h: pick(&self.h, defaults.h),
            w: pick(&self.w, defaults.w),
        };
        for (field, input) in [("markers", &self.markers), ("separating", &self.separating_predicates())] {
            if let Some(preds) = input {
                if let Some(k) = preds.iter().position(|p| !p.to_core().is_valid()) {
                    return Err(CliError::Invalid {
                        location: format!("{field}[{k}]"),
                        message: "modulus must be positive with residue below it, bits below 64".into(),
                    });
                }
            }
        }
        StreamSystem::successor(obs, window).map_err(CliError::from_core)
    }

    fn separating_predicates(&self) -> Option<Vec<PredicateInput>> {
        match &self.separating {
            Some(SeparatingInput::Predicates(p)) => Some(p.clone()),
            _ => None,
        }
    }

    pub fn probes(&self) -> Vec<u64> {
        self.probes.clone().unwrap_or_else(|| (0..DEFAULT_PROBES).collect())
    }
}

//! The three-valued truth domain.
//!
//! Besides `true` and `false` a statement may be *recursive*: asking for its
//! value requires asking for the same value again, forever. The connectives
//! are the strong-Kleene ones with `Recursive` in the third slot, so a
//! classical operand decides the result whenever it can.
//!
//! Values are also ordered by *knowledge*: `Recursive` sits below both
//! classical values, which are incomparable. Every fixpoint computation in
//! this crate climbs that order starting from all-`Recursive`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    Recursive,
}

pub use TruthValue::{False, Recursive, True};

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [True, False, Recursive];

    pub fn is_classical(self) -> bool {
        self != Recursive
    }

    /// `self ⊑ other` in the knowledge order.
    pub fn knowledge_le(self, other: TruthValue) -> bool {
        self == Recursive || self == other
    }

    pub fn implies(self, other: TruthValue) -> TruthValue {
        !self | other
    }

    pub fn iff(self, other: TruthValue) -> TruthValue {
        self.implies(other) & other.implies(self)
    }

    /// Conjunction over a sequence; the empty conjunction is `True`.
    pub fn all<I: IntoIterator<Item = TruthValue>>(values: I) -> TruthValue {
        values.into_iter().fold(True, |acc, v| acc & v)
    }

    /// Disjunction over a sequence; the empty disjunction is `False`.
    pub fn any<I: IntoIterator<Item = TruthValue>>(values: I) -> TruthValue {
        values.into_iter().fold(False, |acc, v| acc | v)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            True => "true",
            False => "false",
            Recursive => "recursive",
        }
    }
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            True
        } else {
            False
        }
    }
}

impl Not for TruthValue {
    type Output = TruthValue;

    fn not(self) -> TruthValue {
        match self {
            True => False,
            False => True,
            Recursive => Recursive,
        }
    }
}

impl BitAnd for TruthValue {
    type Output = TruthValue;

    fn bitand(self, other: TruthValue) -> TruthValue {
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Recursive,
        }
    }
}

impl BitOr for TruthValue {
    type Output = TruthValue;

    fn bitor(self, other: TruthValue) -> TruthValue {
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Recursive,
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown truth value `{0}` (expected true, false or recursive)")]
pub struct ParseTruthValueError(pub String);

impl FromStr for TruthValue {
    type Err = ParseTruthValueError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "true" => Ok(True),
            "false" => Ok(False),
            "recursive" => Ok(Recursive),
            other => Err(ParseTruthValueError(other.to_string())),
        }
    }
}

/// A total assignment of truth values over a declared key universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation<K: Ord> {
    values: BTreeMap<K, TruthValue>,
}

impl<K: Ord + Clone> Interpretation<K> {
    /// Every key starts out `Recursive`, the bottom of the knowledge order.
    pub fn all_recursive<I: IntoIterator<Item = K>>(keys: I) -> Self {
        Self {
            values: keys.into_iter().map(|k| (k, Recursive)).collect(),
        }
    }

    pub fn get(&self, key: &K) -> Option<TruthValue> {
        self.values.get(key).copied()
    }

    pub fn set(&mut self, key: K, value: TruthValue) {
        self.values.insert(key, value);
    }

    pub fn contains(&self, key: &K) -> bool {
        self.values.contains_key(key)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, TruthValue)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.values.keys()
    }

    /// Pointwise knowledge order. Interpretations over different key sets are
    /// incomparable.
    pub fn knowledge_le(&self, other: &Self) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|((ka, va), (kb, vb))| ka == kb && va.knowledge_le(*vb))
    }

    /// Keys whose value differs in `next`, with their new value.
    pub fn changes_to(&self, next: &Self) -> Vec<(K, TruthValue)> {
        next.values
            .iter()
            .filter(|(k, v)| self.values.get(*k) != Some(*v))
            .map(|(k, v)| (k.clone(), *v))
            .collect()
    }
}

impl<K: Ord> FromIterator<(K, TruthValue)> for Interpretation<K> {
    fn from_iter<I: IntoIterator<Item = (K, TruthValue)>>(iter: I) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs() -> impl Iterator<Item = (TruthValue, TruthValue)> {
        TruthValue::ALL
            .into_iter()
            .flat_map(|a| TruthValue::ALL.into_iter().map(move |b| (a, b)))
    }

    #[test]
    fn negation_table() {
        assert_eq!(!True, False);
        assert_eq!(!False, True);
        assert_eq!(!Recursive, Recursive);
    }

    #[test]
    fn kleene_examples() {
        assert_eq!(Recursive | True, True);
        assert_eq!(Recursive & False, False);
        assert_eq!(Recursive & Recursive, Recursive);
        assert_eq!(Recursive.iff(Recursive), Recursive);
        assert_eq!(True.iff(False), False);
        assert_eq!(False.implies(Recursive), True);
    }

    #[test]
    fn empty_folds() {
        assert_eq!(TruthValue::all([]), True);
        assert_eq!(TruthValue::any([]), False);
    }

    #[test]
    fn commutative_and_associative() {
        for (a, b) in pairs() {
            assert_eq!(a & b, b & a);
            assert_eq!(a | b, b | a);
            for c in TruthValue::ALL {
                assert_eq!((a & b) & c, a & (b & c));
                assert_eq!((a | b) | c, a | (b | c));
            }
        }
    }

    #[test]
    fn tokens_round_trip() {
        for v in TruthValue::ALL {
            assert_eq!(v.to_string().parse::<TruthValue>().unwrap(), v);
        }
        assert!("unknown".parse::<TruthValue>().is_err());
        assert_eq!(serde_json::to_string(&Recursive).unwrap(), "\"recursive\"");
    }

    #[test]
    fn knowledge_order() {
        assert!(Recursive.knowledge_le(True));
        assert!(Recursive.knowledge_le(False));
        assert!(!True.knowledge_le(False));
        assert!(!False.knowledge_le(True));
        assert!(!True.knowledge_le(Recursive));

        let lo = Interpretation::all_recursive(["a", "b"]);
        let mut hi = lo.clone();
        hi.set("a", True);
        assert!(lo.knowledge_le(&hi));
        assert!(!hi.knowledge_le(&lo));
        assert_eq!(lo.changes_to(&hi), vec![("a", True)]);
    }
}

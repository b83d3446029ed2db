//! Negation-free boolean formulas over input streams, kept in disjunctive
//! normal form.

use std::collections::BTreeSet;
use std::fmt;

use crate::ir::StreamId;

/// A positive formula as a set of conjunctive terms. The empty term is
/// `true`; a formula without terms is `false`. Subsumed terms are removed,
/// so equal formulas have equal representations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Activation {
    terms: BTreeSet<BTreeSet<StreamId>>,
}

impl Activation {
    pub fn always() -> Self {
        Activation {
            terms: BTreeSet::from([BTreeSet::new()]),
        }
    }

    pub fn never() -> Self {
        Activation {
            terms: BTreeSet::new(),
        }
    }

    pub fn var(s: StreamId) -> Self {
        Activation {
            terms: BTreeSet::from([BTreeSet::from([s])]),
        }
    }

    pub fn is_always(&self) -> bool {
        self.terms.contains(&BTreeSet::new())
    }

    pub fn terms(&self) -> impl Iterator<Item = &BTreeSet<StreamId>> {
        self.terms.iter()
    }

    pub fn variables(&self) -> BTreeSet<StreamId> {
        self.terms.iter().flatten().copied().collect()
    }

    pub fn or(&self, other: &Activation) -> Activation {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::absorb(terms)
    }

    pub fn and(&self, other: &Activation) -> Activation {
        let mut terms = BTreeSet::new();
        for l in &self.terms {
            for r in &other.terms {
                terms.insert(l.union(r).copied().collect());
            }
        }
        Self::absorb(terms)
    }

    fn absorb(terms: BTreeSet<BTreeSet<StreamId>>) -> Activation {
        let kept = terms
            .iter()
            .filter(|t| !terms.iter().any(|o| o != *t && o.is_subset(t)))
            .cloned()
            .collect();
        Activation { terms: kept }
    }

    /// Evaluates the formula with exactly the given streams set to true.
    pub fn holds(&self, fresh: impl Fn(StreamId) -> bool) -> bool {
        self.terms.iter().any(|t| t.iter().all(|&s| fresh(s)))
    }

    /// `self → other` is valid. For monotone formulas this holds iff every
    /// term of `self` contains some term of `other`.
    pub fn entails(&self, other: &Activation) -> bool {
        self.terms
            .iter()
            .all(|t| other.terms.iter().any(|o| o.is_subset(t)))
    }

    /// Renders with the given stream names, e.g. `(a && b) || c`.
    pub fn display<'a>(&'a self, names: &'a dyn Fn(StreamId) -> String) -> impl fmt::Display + 'a {
        Shown { act: self, names }
    }
}

struct Shown<'a> {
    act: &'a Activation,
    names: &'a dyn Fn(StreamId) -> String,
}

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.act.is_always() {
            return f.write_str("true");
        }
        if self.act.terms.is_empty() {
            return f.write_str("false");
        }
        let multi = self.act.terms.len() > 1;
        for (i, term) in self.act.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            let paren = multi && term.len() > 1;
            if paren {
                f.write_str("(")?;
            }
            for (j, s) in term.iter().enumerate() {
                if j > 0 {
                    f.write_str(" && ")?;
                }
                f.write_str(&(self.names)(*s))?;
            }
            if paren {
                f.write_str(")")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Debug)]
    enum F {
        T,
        V(usize),
        And(Box<F>, Box<F>),
        Or(Box<F>, Box<F>),
    }

    impl F {
        fn eval(&self, bits: u32) -> bool {
            match self {
                F::T => true,
                F::V(v) => bits & (1 << v) != 0,
                F::And(l, r) => l.eval(bits) && r.eval(bits),
                F::Or(l, r) => l.eval(bits) || r.eval(bits),
            }
        }

        fn dnf(&self) -> Activation {
            match self {
                F::T => Activation::always(),
                F::V(v) => Activation::var(StreamId(*v)),
                F::And(l, r) => l.dnf().and(&r.dnf()),
                F::Or(l, r) => l.dnf().or(&r.dnf()),
            }
        }
    }

    fn formula() -> impl Strategy<Value = F> {
        let leaf = prop_oneof![1 => Just(F::T), 6 => (0usize..6).prop_map(F::V)];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(l, r)| F::And(Box::new(l), Box::new(r))),
                (inner.clone(), inner).prop_map(|(l, r)| F::Or(Box::new(l), Box::new(r))),
            ]
        })
    }

    fn s(i: usize) -> Activation {
        Activation::var(StreamId(i))
    }

    #[test]
    fn basic_entailment() {
        assert!(s(0).and(&s(1)).entails(&s(0)));
        assert!(s(0).entails(&s(0)));
        assert!(!s(0).or(&s(1)).entails(&s(0)));
        assert!(s(0).entails(&Activation::always()));
        assert!(!Activation::always().entails(&s(0)));
    }

    #[test]
    fn absorption_normalizes() {
        let a = s(0).or(&s(0).and(&s(1)));
        assert_eq!(a, s(0));
    }

    proptest! {
        #[test]
        fn entails_matches_truth_table(l in formula(), r in formula()) {
            let brute = (0..64u32).all(|bits| !l.eval(bits) || r.eval(bits));
            prop_assert_eq!(l.dnf().entails(&r.dnf()), brute);
        }

        #[test]
        fn dnf_preserves_meaning(f in formula()) {
            let d = f.dnf();
            for bits in 0..64u32 {
                prop_assert_eq!(d.holds(|s| bits & (1 << s.0) != 0), f.eval(bits));
            }
        }
    }
}

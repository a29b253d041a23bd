//! SKI terms: syntax, compilation to zipper graphs, readback and a
//! term-rewriting reference reducer.

mod compile;
mod oracle;

use std::fmt;

use rand::Rng;
use thiserror::Error;

pub use compile::{compile, readback, ReadbackError, OUT};
pub use oracle::{oracle_nf, step, FuelExhausted};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    S,
    K,
    I,
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application of `f` to `args`.
    pub fn apply_all(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    /// Number of S, K, I leaves.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => f.size() + a.size(),
            _ => 1,
        }
    }

    /// Counts of (applications, I, K, S).
    pub fn census(&self) -> (usize, usize, usize, usize) {
        match self {
            Term::S => (0, 0, 0, 1),
            Term::K => (0, 0, 1, 0),
            Term::I => (0, 1, 0, 0),
            Term::App(f, a) => {
                let (a1, i1, k1, s1) = f.census();
                let (a2, i2, k2, s2) = a.census();
                (a1 + a2 + 1, i1 + i2, k1 + k2, s1 + s2)
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::S => f.write_str("S"),
            Term::K => f.write_str("K"),
            Term::I => f.write_str("I"),
            Term::App(g, a) => {
                write!(f, "{g} ")?;
                if let Term::App(..) = **a {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("empty term")]
    Empty,
    #[error("unexpected {found:?} at position {pos}")]
    Unexpected { pos: usize, found: char },
    #[error("unclosed parenthesis opened at position {pos}")]
    Unclosed { pos: usize },
    #[error("empty parentheses at position {pos}")]
    EmptyGroup { pos: usize },
}

/// Parses juxtaposition (left-associative) over S, K, I and parentheses.
/// Positions in errors are 1-based character offsets.
pub fn parse_term(text: &str) -> Result<Term, TermError> {
    // Stack of (open paren position, accumulated application).
    let mut stack: Vec<(usize, Option<Term>)> = vec![(0, None)];
    let push = |slot: &mut Option<Term>, t: Term| {
        *slot = Some(match slot.take() {
            Some(f) => Term::app(f, t),
            None => t,
        });
    };
    for (i, c) in text.chars().enumerate() {
        let pos = i + 1;
        match c {
            'S' | 'K' | 'I' => {
                let atom = match c {
                    'S' => Term::S,
                    'K' => Term::K,
                    _ => Term::I,
                };
                push(&mut stack.last_mut().expect("root").1, atom);
            }
            '(' => stack.push((pos, None)),
            ')' => {
                if stack.len() == 1 {
                    return Err(TermError::Unexpected { pos, found: c });
                }
                let (open, inner) = stack.pop().expect("checked");
                let inner = inner.ok_or(TermError::EmptyGroup { pos: open })?;
                push(&mut stack.last_mut().expect("root").1, inner);
            }
            c if c.is_whitespace() => {}
            c => return Err(TermError::Unexpected { pos, found: c }),
        }
    }
    if stack.len() > 1 {
        return Err(TermError::Unclosed { pos: stack.last().expect("non-empty").0 });
    }
    stack.pop().and_then(|(_, t)| t).ok_or(TermError::Empty)
}

/// A uniformly shaped random term with exactly `size` leaves.
pub fn random_term<R: Rng>(rng: &mut R, size: usize) -> Term {
    assert!(size >= 1, "terms have at least one leaf");
    if size == 1 {
        return match rng.gen_range(0..3) {
            0 => Term::S,
            1 => Term::K,
            _ => Term::I,
        };
    }
    let left = rng.gen_range(1..size);
    Term::app(random_term(rng, left), random_term(rng, size - left))
}

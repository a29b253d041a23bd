use thiserror::Error;

use super::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no normal form within {fuel} steps")]
pub struct FuelExhausted {
    pub fuel: usize,
}

fn spine(t: &Term) -> (&Term, Vec<&Term>) {
    let mut head = t;
    let mut args = Vec::new();
    while let Term::App(f, a) = head {
        args.push(a.as_ref());
        head = f;
    }
    args.reverse();
    (head, args)
}

/// One leftmost-outermost step, or `None` at a normal form.
pub fn step(t: &Term) -> Option<Term> {
    let (head, args) = spine(t);
    let fire = match (head, args.len()) {
        (Term::I, n) if n >= 1 => Some((args[0].clone(), 1)),
        (Term::K, n) if n >= 2 => Some((args[0].clone(), 2)),
        (Term::S, n) if n >= 3 => {
            let (x, y, z) = (args[0].clone(), args[1].clone(), args[2].clone());
            Some((Term::app(Term::app(x, z.clone()), Term::app(y, z)), 3))
        }
        _ => None,
    };
    if let Some((r, used)) = fire {
        return Some(Term::apply_all(r, args[used..].iter().map(|a| (*a).clone())));
    }
    for (i, a) in args.iter().enumerate() {
        if let Some(a2) = step(a) {
            let rebuilt = args
                .iter()
                .enumerate()
                .map(|(j, b)| if j == i { a2.clone() } else { (*b).clone() });
            return Some(Term::apply_all(head.clone(), rebuilt));
        }
    }
    None
}

/// Normal form by leftmost-outermost reduction, using at most `fuel` steps.
pub fn oracle_nf(t: &Term, fuel: usize) -> Result<Term, FuelExhausted> {
    let mut cur = t.clone();
    for _ in 0..fuel {
        match step(&cur) {
            Some(next) => cur = next,
            None => return Ok(cur),
        }
    }
    if step(&cur).is_none() {
        Ok(cur)
    } else {
        Err(FuelExhausted { fuel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{parse_term, random_term};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn nf(s: &str) -> Term {
        oracle_nf(&parse_term(s).unwrap(), 100).unwrap()
    }

    #[test]
    fn rules() {
        assert_eq!(nf("I K"), Term::K);
        assert_eq!(nf("S K K I"), Term::I);
        assert_eq!(nf("K I (K I)"), Term::I);
        assert_eq!(nf("S K K"), parse_term("S K K").unwrap());
        assert_eq!(nf("S (I K) (I I)"), parse_term("S K I").unwrap());
    }

    #[test]
    fn divergence_runs_out_of_fuel() {
        let omega = parse_term("S I I (S I I)").unwrap();
        assert_eq!(oracle_nf(&omega, 50), Err(FuelExhausted { fuel: 50 }));
        // Outermost first discards the divergent argument.
        assert_eq!(oracle_nf(&parse_term("K I (S I I (S I I))").unwrap(), 10).unwrap(), Term::I);
    }

    proptest! {
        #[test]
        fn extra_fuel_does_not_change_the_result(seed in any::<u64>(), size in 1usize..=10) {
            let t = random_term(&mut StdRng::seed_from_u64(seed), size);
            if let Ok(n) = oracle_nf(&t, 200) {
                prop_assert_eq!(oracle_nf(&t, 400).unwrap(), n.clone());
                prop_assert!(step(&n).is_none());
            }
        }
    }
}

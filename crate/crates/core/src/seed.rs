//! Seed measured tracks for once-punctured torus mapping classes.

use thiserror::Error;

use crate::algebra::{pf_eigenpair, AlgebraError, AlgebraicNumber, IntegerMatrix};
use crate::track::{Port, Slot, TrainTrack};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeedError {
    #[error("word {0:?} is not pseudo-Anosov: it must use both R and L")]
    NotPseudoAnosov(String),
    #[error("word {0:?} has letters other than R and L")]
    BadWord(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub fn letter_matrix(c: char) -> IntegerMatrix {
    match c {
        'R' => IntegerMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap(),
        _ => IntegerMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap(),
    }
}

/// Ordered product of the letter matrices of `word`.
pub fn word_matrix(word: &str) -> IntegerMatrix {
    word.chars().fold(IntegerMatrix::identity(2), |acc, c| {
        acc.mul(&letter_matrix(c))
    })
}

fn check_word(word: &str) -> Result<(), SeedError> {
    if word.is_empty() || word.chars().any(|c| c != 'R' && c != 'L') {
        return Err(SeedError::BadWord(word.to_string()));
    }
    if !(word.contains('R') && word.contains('L')) {
        return Err(SeedError::NotPseudoAnosov(word.to_string()));
    }
    Ok(())
}

/// Largest `k` with `word = u^k`.
pub fn word_exponent(word: &str) -> usize {
    let n = word.len();
    (1..=n)
        .rev()
        .find(|&k| {
            n.is_multiple_of(k)
                && word
                    .as_bytes()
                    .chunks(n / k)
                    .all(|c| c == &word.as_bytes()[..n / k])
        })
        .unwrap_or(1)
}

/// The two-switch track on the once-punctured torus: branch 0 joins the
/// large slots, branch 1 the `SR` slots and branch 2 the `SL` slots.
pub fn punctured_torus_track() -> TrainTrack {
    let mut t = TrainTrack::from_branches(
        2,
        &[
            [Port::new(0, Slot::L), Port::new(1, Slot::L)],
            [Port::new(0, Slot::SR), Port::new(1, Slot::SR)],
            [Port::new(0, Slot::SL), Port::new(1, Slot::SL)],
        ],
    )
    .expect("complete track");
    t.puncture_all();
    t
}

/// Measured seed whose maximal splitting sequence reads `word` letter by
/// letter: `R` when the `SR` branch is heavier, `L` otherwise.
pub fn seed_punctured_torus(word: &str) -> Result<(TrainTrack, Vec<AlgebraicNumber>), SeedError> {
    check_word(word)?;
    let pf = pf_eigenpair(&word_matrix(word))?;
    let (x, y) = (pf.vector[0].clone(), pf.vector[1].clone());
    let e = &x + &y;
    Ok((punctured_torus_track(), vec![e, x, y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IntPolynomial;

    #[test]
    fn rl_seed() {
        let (t, mu) = seed_punctured_torus("RL").unwrap();
        assert!(t.validate_measure(&mu).is_ok());
        assert_eq!(t.validate().unwrap().genus, 1);
        assert_eq!(
            mu[0].field().minpoly(),
            &IntPolynomial::from_i64s(&[1, -3, 1])
        );
        assert_eq!(
            mu[0].minimal_polynomial(),
            IntPolynomial::from_i64s(&[-1, -1, 1])
        );
        // SR = 1, SL = λ - 2
        assert_eq!(mu[1], mu[1].field().from_int(1));
        assert_eq!(
            mu[2],
            &mu[2].field().generator() - &mu[2].field().from_int(2)
        );
    }

    #[test]
    fn rrl_matrix() {
        assert_eq!(
            word_matrix("RRL"),
            IntegerMatrix::from_rows(&[vec![3, 2], vec![1, 1]]).unwrap()
        );
        let (_, mu) = seed_punctured_torus("RRL").unwrap();
        assert_eq!(
            mu[1].field().minpoly(),
            &IntPolynomial::from_i64s(&[1, -4, 1])
        );
    }

    #[test]
    fn single_letters_rejected() {
        assert_eq!(
            seed_punctured_torus("R").unwrap_err(),
            SeedError::NotPseudoAnosov("R".into())
        );
        assert_eq!(
            seed_punctured_torus("LLL").unwrap_err(),
            SeedError::NotPseudoAnosov("LLL".into())
        );
        assert!(matches!(
            seed_punctured_torus("RX"),
            Err(SeedError::BadWord(_))
        ));
    }

    #[test]
    fn exponents() {
        assert_eq!(word_exponent("RLRL"), 2);
        assert_eq!(word_exponent("RRLRRLRRL"), 3);
        assert_eq!(word_exponent("RLL"), 1);
    }
}

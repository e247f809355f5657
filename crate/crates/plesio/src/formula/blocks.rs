//! Reusable building blocks for composing new triply periodic fields.
//!
//! Many catalog surfaces are linear combinations of a handful of cyclic
//! trigonometric blocks (the K Surface is `0.3E + 0.3F - 0.4G + 0.2`, for
//! instance). This module ships those blocks plus a small generator for the
//! phase/frequency "superblock" family that most of them specialize.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use super::ast::{Axis, Expr};
use super::field::PeriodicField;
use super::parse::parse;

/// A named building block: a single letter and a cyclic expression.
#[derive(Clone, Debug)]
pub struct Block {
    pub label: char,
    pub expr: Expr,
    pub description: String,
}

const BLOCK_DATA: [(char, &str, &str); 9] = [
    ('A', "Gyroid", "sin(x)*cos(y)+sin(y)*cos(z)+sin(z)*cos(x)"),
    ('C', "Triple cos", "cos(x)*cos(y)*cos(z)"),
    ('D', "Triple sin", "sin(x)*sin(y)*sin(z)"),
    ('E', "P-sum", "cos(x)+cos(y)+cos(z)"),
    ('F', "Pairwise cos", "cos(x)*cos(y)+cos(y)*cos(z)+cos(z)*cos(x)"),
    ('G', "2w cos sum", "cos(2*x)+cos(2*y)+cos(2*z)"),
    (
        'H',
        "Lidinoid triple",
        "sin(2*x)*cos(y)*sin(z)+sin(2*y)*cos(z)*sin(x)+sin(2*z)*cos(x)*sin(y)",
    ),
    (
        'I',
        "2w pairwise cos",
        "cos(2*x)*cos(2*y)+cos(2*y)*cos(2*z)+cos(2*z)*cos(2*x)",
    ),
    ('L', "Mixed pairwise sin", "sin(2*x)*sin(y)+sin(2*y)*sin(z)+sin(2*z)*sin(x)"),
];

/// The nine blocks, in label order.
pub fn blocks() -> &'static [Block] {
    static BLOCKS: OnceLock<Vec<Block>> = OnceLock::new();
    BLOCKS.get_or_init(|| {
        BLOCK_DATA
            .iter()
            .map(|(label, desc, formula)| Block {
                label: *label,
                expr: parse(formula).expect("block formula parses"),
                description: desc.to_string(),
            })
            .collect()
    })
}

/// Look up a block by its letter (case-insensitive).
pub fn block(label: char) -> Option<&'static Block> {
    let label = label.to_ascii_uppercase();
    blocks().iter().find(|b| b.label == label)
}

/// Linear combination of blocks plus a constant, as a 2π-periodic field.
///
/// The tree is built exactly as the printed form `c1*(B1) ± c2*(B2) ... ± k`
/// parses: coefficients of 1 are elided, negative coefficients become
/// subtractions, and a zero constant is dropped. Hand-parsing the same
/// formula therefore yields a structurally equal tree.
///
/// Panics when `terms` is empty.
pub fn compose_blocks(terms: &[(f64, &Block)], constant: f64) -> PeriodicField {
    assert!(!terms.is_empty(), "compose_blocks needs at least one term");
    let scaled = |c: f64, b: &Block| -> Expr {
        if c == 1.0 {
            b.expr.clone()
        } else {
            Expr::Mul(Box::new(Expr::Constant(c)), Box::new(b.expr.clone()))
        }
    };
    let (c0, b0) = terms[0];
    let mut acc = if c0 < 0.0 {
        Expr::Neg(Box::new(scaled(-c0, b0)))
    } else {
        scaled(c0, b0)
    };
    for &(c, b) in &terms[1..] {
        acc = if c < 0.0 {
            Expr::Sub(Box::new(acc), Box::new(scaled(-c, b)))
        } else {
            Expr::Add(Box::new(acc), Box::new(scaled(c, b)))
        };
    }
    if constant > 0.0 {
        acc = Expr::Add(Box::new(acc), Box::new(Expr::Constant(constant)));
    } else if constant < 0.0 {
        acc = Expr::Sub(Box::new(acc), Box::new(Expr::Constant(-constant)));
    }
    PeriodicField::new(acc)
}

/// How the phase-shifted cosine factors of a superblock combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuperblockArity {
    /// Cyclic sum of two-factor products: f(x)g(y) + f(y)g(z) + f(z)g(x).
    Pairwise,
    /// Product of three factors; unequal phases yield the cyclic 3-sum.
    Triple,
    /// Plain sum f(x) + f(y) + f(z).
    Sum,
}

impl SuperblockArity {
    fn phase_count(self) -> usize {
        match self {
            SuperblockArity::Pairwise => 2,
            SuperblockArity::Triple => 3,
            SuperblockArity::Sum => 1,
        }
    }
}

/// One factor of a superblock: cos(N·axis − φ).
///
/// The two ends of the allowed phase interval print exactly: φ = 0 is a plain
/// cosine, φ = π/2 a plain sine (sin u = cos(u − π/2)).
fn factor(axis: Axis, freq: u32, phase: f64) -> Expr {
    let arg = if freq == 1 {
        Expr::Variable(axis)
    } else {
        Expr::Mul(
            Box::new(Expr::Constant(freq as f64)),
            Box::new(Expr::Variable(axis)),
        )
    };
    if phase == 0.0 {
        Expr::Cos(Box::new(arg))
    } else if (phase - FRAC_PI_2).abs() < 1e-12 {
        Expr::Sin(Box::new(arg))
    } else {
        Expr::Cos(Box::new(Expr::Sub(
            Box::new(arg),
            Box::new(Expr::Constant(phase)),
        )))
    }
}

fn sum3(terms: [Expr; 3]) -> Expr {
    let [a, b, c] = terms;
    Expr::Add(
        Box::new(Expr::Add(Box::new(a), Box::new(b))),
        Box::new(c),
    )
}

/// Build the cyclic symmetric expression in the cos(N·axis − φ) family.
///
/// `phases` holds one φ per factor (1 for `Sum`, 2 for `Pairwise`, 3 for
/// `Triple`), each in [0, π/2]; `freq` is the common frequency N ≥ 1.
pub fn superblock(phases: &[f64], freq: u32, arity: SuperblockArity) -> Expr {
    assert!(freq >= 1, "superblock frequency must be at least 1");
    assert_eq!(
        phases.len(),
        arity.phase_count(),
        "superblock arity {:?} takes {} phase(s)",
        arity,
        arity.phase_count()
    );
    assert!(
        phases.iter().all(|p| (0.0..=FRAC_PI_2 + 1e-12).contains(p)),
        "phases must lie in [0, pi/2]"
    );
    let axes = [Axis::X, Axis::Y, Axis::Z];
    match arity {
        SuperblockArity::Sum => sum3([
            factor(Axis::X, freq, phases[0]),
            factor(Axis::Y, freq, phases[0]),
            factor(Axis::Z, freq, phases[0]),
        ]),
        SuperblockArity::Pairwise => {
            let term = |a: Axis| {
                Expr::Mul(
                    Box::new(factor(a, freq, phases[0])),
                    Box::new(factor(a.next(), freq, phases[1])),
                )
            };
            sum3([term(Axis::X), term(Axis::Y), term(Axis::Z)])
        }
        SuperblockArity::Triple => {
            let product = |offset: usize| {
                let f0 = factor(axes[offset % 3], freq, phases[0]);
                let f1 = factor(axes[(offset + 1) % 3], freq, phases[1]);
                let f2 = factor(axes[(offset + 2) % 3], freq, phases[2]);
                Expr::Mul(Box::new(Expr::Mul(Box::new(f0), Box::new(f1))), Box::new(f2))
            };
            if phases.windows(2).all(|w| w[0] == w[1]) {
                // all three cyclic terms coincide
                product(0)
            } else {
                sum3([product(0), product(1), product(2)])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::catalog_lookup;

    #[test]
    fn k_surface_from_blocks() {
        let e = block('E').unwrap();
        let f = block('F').unwrap();
        let g = block('G').unwrap();
        let composed = compose_blocks(&[(0.3, e), (0.3, f), (-0.4, g)], 0.2);
        assert_eq!(
            *composed.expr(),
            catalog_lookup("K Surface").unwrap().expr
        );
    }

    #[test]
    fn unit_block_is_the_gyroid() {
        let a = block('A').unwrap();
        let composed = compose_blocks(&[(1.0, a)], 0.0);
        assert_eq!(*composed.expr(), catalog_lookup("Gyroid").unwrap().expr);
    }

    #[test]
    #[should_panic(expected = "at least one term")]
    fn empty_terms_violate_the_precondition() {
        compose_blocks(&[], 0.1);
    }

    #[test]
    fn superblock_pairwise_gyroid() {
        let e = superblock(&[0.0, FRAC_PI_2], 1, SuperblockArity::Pairwise);
        assert_eq!(e, catalog_lookup("Gyroid (corax)").unwrap().expr);
    }

    #[test]
    fn superblock_sum_is_block_e() {
        let e = superblock(&[0.0], 1, SuperblockArity::Sum);
        assert_eq!(e, block('E').unwrap().expr);
    }

    #[test]
    fn superblock_pairwise_double_frequency_is_block_i() {
        let e = superblock(&[0.0, 0.0], 2, SuperblockArity::Pairwise);
        assert_eq!(e, block('I').unwrap().expr);
    }

    #[test]
    fn superblock_triple_cos_and_sin() {
        assert_eq!(
            superblock(&[0.0, 0.0, 0.0], 1, SuperblockArity::Triple),
            block('C').unwrap().expr
        );
        assert_eq!(
            superblock(&[FRAC_PI_2; 3], 1, SuperblockArity::Triple),
            block('D').unwrap().expr
        );
    }

    #[test]
    fn all_nine_blocks_exist() {
        assert_eq!(blocks().len(), 9);
        for label in ['A', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'L'] {
            assert!(block(label).is_some(), "missing block {label}");
        }
        assert!(block('B').is_none());
    }
}

//! The 48 signed permutation matrices (the symmetry group of the cube),
//! used for congruence search and rotation recovery.

use std::sync::OnceLock;

use nalgebra::Matrix3;

/// One group element.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub matrix: Matrix3<f64>,
    /// Determinant +1 (a rotation) rather than -1 (a rotoreflection).
    pub proper: bool,
    pub index: usize,
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// All 48 elements in a fixed order with the identity first.
pub fn elements() -> &'static [GroupElement] {
    static ELEMS: OnceLock<Vec<GroupElement>> = OnceLock::new();
    ELEMS.get_or_init(|| {
        let mut out = Vec::with_capacity(48);
        for perm in PERMS {
            for bits in 0..8u8 {
                let signs = [
                    if bits & 1 == 0 { 1.0 } else { -1.0 },
                    if bits & 2 == 0 { 1.0 } else { -1.0 },
                    if bits & 4 == 0 { 1.0 } else { -1.0 },
                ];
                let mut m = Matrix3::zeros();
                for r in 0..3 {
                    m[(r, perm[r])] = signs[r];
                }
                let proper = m.determinant() > 0.0;
                out.push(GroupElement {
                    matrix: m,
                    proper,
                    index: out.len(),
                });
            }
        }
        out
    })
}

/// The 24 rotations.
pub fn proper_elements() -> impl Iterator<Item = &'static GroupElement> {
    elements().iter().filter(|e| e.proper)
}

/// The rotation by `degrees` (a multiple of 90) about a coordinate axis,
/// as a group element index.
pub fn axis_rotation(axis: usize, degrees: i32) -> &'static GroupElement {
    let quarter = |m: &Matrix3<f64>| -> Matrix3<f64> { *m };
    let _ = quarter;
    let d = degrees.rem_euclid(360);
    let (c, s) = match d {
        0 => (1.0, 0.0),
        90 => (0.0, 1.0),
        180 => (-1.0, 0.0),
        270 => (0.0, -1.0),
        _ => panic!("rotation must be a multiple of 90 degrees"),
    };
    let m = match axis {
        0 => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        1 => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        2 => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
        _ => panic!("axis must be 0, 1 or 2"),
    };
    elements()
        .iter()
        .find(|e| (e.matrix - m).abs().max() < 1e-12)
        .expect("quarter-turn rotations are group elements")
}

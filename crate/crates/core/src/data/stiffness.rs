//! Monoclinic β-HMX elastic coefficients and their 13-row table layout.

use crate::tensor::{rotation_exp, Tensor4Voigt6};

/// Row labels of the monoclinic coefficient table.
pub const TABLE_LABELS: [&str; 13] =
    ["D11", "D22", "D33", "D44", "D55", "D66", "D12", "D13", "D23", "D15", "D25", "D35", "D46"];

/// Tensor-index names of the table rows.
pub const TABLE_COMPONENTS: [&str; 13] = [
    "C1111", "C2222", "C3333", "C1212", "C2323", "C1313", "C1122", "C1133", "C2233", "C1123", "C2223", "C3323",
    "C1213",
];

/// Voigt positions (order 11, 22, 33, 12, 23, 13) of the table rows.
pub const TABLE_VOIGT: [(usize, usize); 13] =
    [(0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (0, 1), (0, 2), (1, 2), (0, 4), (1, 4), (2, 4), (3, 5)];

/// σ–ε coefficients at 300 K and 1e-4 GPa, GPa.
pub const LITERATURE_AMBIENT: [f64; 13] =
    [22.97, 22.62, 21.67, 8.645, 10.407, 9.527, 9.2, 12.32, 12.37, -0.43, 4.47, 1.84, 2.248];

/// σ–ε coefficients at 300 K and 5 GPa, GPa.
pub const LITERATURE_5GPA: [f64; 13] =
    [87.71, 67.08, 62.11, 19.461, 34.08, 19.662, 36.93, 52.95, 46.49, -11.32, 11.1, 2.48, 6.06];

/// Stiffness from the 13 table coefficients, other couplings zero.
pub fn from_table(values: &[f64; 13]) -> Tensor4Voigt6 {
    let mut m = [[0.0; 6]; 6];
    for (v, &(a, b)) in values.iter().zip(TABLE_VOIGT.iter()) {
        m[a][b] = *v;
        m[b][a] = *v;
    }
    Tensor4Voigt6(m)
}

/// The 13 table coefficients of a stiffness.
pub fn to_table(c: &Tensor4Voigt6) -> [f64; 13] {
    let mut out = [0.0; 13];
    for (o, &(a, b)) in out.iter_mut().zip(TABLE_VOIGT.iter()) {
        *o = c.0[a][b];
    }
    out
}

/// Ambient literature stiffness with the table labels placed literally.
///
/// In this placement the two-fold axis of the tensor is `e₁`.
pub fn literature_stiffness() -> Tensor4Voigt6 {
    from_table(&LITERATURE_AMBIENT)
}

/// [`literature_stiffness`] turned a quarter about `e₃`, so its two-fold axis is the crystal b axis `e₂`.
pub fn literature_stiffness_b_axis() -> Tensor4Voigt6 {
    let q = rotation_exp(&[0.0, 0.0, core::f64::consts::FRAC_PI_2]);
    literature_stiffness().rotate(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Rotation;

    #[test]
    fn table_round_trip_and_spd() {
        let c = literature_stiffness();
        assert_eq!(to_table(&c), LITERATURE_AMBIENT);
        assert_eq!(c.get(0, 0, 0, 0), 22.97);
        assert_eq!(c.get(0, 1, 2, 0), 2.248);
        assert!(c.min_eigenvalue() > 0.0);
        assert!(from_table(&LITERATURE_5GPA).asymmetry() == 0.0);
    }

    #[test]
    fn two_fold_axes() {
        let half = |axis: [f64; 3]| Rotation::new(*rotation_exp(&axis).tensor()).unwrap();
        let pi = core::f64::consts::PI;
        let c = literature_stiffness();
        let diff = |a: &Tensor4Voigt6, b: &Tensor4Voigt6| {
            (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).map(|(i, j)| (a.0[i][j] - b.0[i][j]).abs()).fold(0.0, f64::max)
        };
        assert!(diff(&c.rotate(&half([pi, 0.0, 0.0])), &c) < 1e-12);
        assert!(diff(&c.rotate(&half([0.0, pi, 0.0])), &c) > 1.0);
        let cb = literature_stiffness_b_axis();
        assert!(diff(&cb.rotate(&half([0.0, pi, 0.0])), &cb) < 1e-12);
    }
}

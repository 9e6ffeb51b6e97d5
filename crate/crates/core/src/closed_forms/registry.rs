//! Transcribed forms at the normalization point `(x, 0)`.

use num_rational::Rational64;

use super::{Base, ClosedForm, Factor, Family, Poly};

// Recurring polynomials, ascending coefficients.
const X: &[i64] = &[0, 1];
const X2: &[i64] = &[0, 0, 1];
const X3: &[i64] = &[0, 0, 0, 1];
const X2_M1: &[i64] = &[-1, 0, 1];
const ONE_M_X2: &[i64] = &[1, 0, -1];
const X2_M2: &[i64] = &[-2, 0, 1];
const TWO_M_X2: &[i64] = &[2, 0, -1];
const THREE_M_2X2: &[i64] = &[3, 0, -2];
const Q4: &[i64] = &[2, 0, -3, 0, 1];
const S4: &[i64] = &[5, 0, -6, 0, 2];
const U4: &[i64] = &[5, 0, -5, 0, 1];
const V4: &[i64] = &[3, 0, -3, 0, 1];
const P8: &[i64] = &[15, 0, -30, 0, 23, 0, -8, 0, 1];
const Q6: &[i64] = &[-15, 0, 28, 0, -18, 0, 4];
const NEG_Q6: &[i64] = &[15, 0, -28, 0, 18, 0, -4];
const N16: &[i64] = &[-18, 0, -300, 0, 1410, 0, -2598, 0, 2605, 0, -1552, 0, 551, 0, -108, 0, 9];
const HY28: &[i64] = &[
    -2430, 0, -9810, 0, 137820, 0, -531240, 0, 1150505, 0, -1646775, 0, 1668725, 0, -1237584, 0,
    681267, 0, -278485, 0, 83491, 0, -17844, 0, 2575, 0, -225, 0, 9,
];
const F1: &[i64] = &[
    1755, 0, -11070, 0, 30876, 0, -50274, 0, 52968, 0, -37738, 0, 18412, 0, -6074, 0, 1297, 0,
    -162, 0, 9,
];

fn f(c: &[i64], e: i64) -> Factor {
    Factor {
        base: Base::Poly(Poly::new(c)),
        exponent: Rational64::from(e),
    }
}

fn root(c: &[i64], num: i64, den: i64) -> Factor {
    Factor {
        base: Base::Poly(Poly::new(c)),
        exponent: Rational64::new(num, den),
    }
}

/// `f2 = P8 / (-Q6)` raised to `num/den`.
fn f2_pow(num: i64, den: i64) -> Factor {
    Factor {
        base: Base::Quotient(Poly::new(P8), Poly::new(NEG_Q6)),
        exponent: Rational64::new(num, den),
    }
}

fn form(name: &str, family: Family, c: (i64, i64), pi: i32, factors: Vec<Factor>) -> ClosedForm {
    ClosedForm::new(name, family, Rational64::new(c.0, c.1), pi, factors)
}

/// `c / pi^2 * num / (x^2 - 1)^k`
fn kernel(name: &str, c: (i64, i64), num: &[i64], k: i64) -> ClosedForm {
    form(
        &format!("dB_{name}"),
        Family::KernelDerivative,
        c,
        -2,
        vec![f(num, 1), f(X2_M1, -k)],
    )
}

fn kernel_forms() -> Vec<ClosedForm> {
    let half = (1, 2);
    let one = (1, 1);
    let neg = (-1, 1);
    let two = (2, 1);
    let neg_two = (-2, 1);
    let d1 = &[0, -3, 0, 1][..];
    let d2 = &[0, -3, 0, 2][..];
    let t11b = &[3, 0, 4, 0, -1][..];
    let t12b = &[-3, 0, 1][..];
    let t22b = &[3, 0, 4, 0, -4][..];
    let t11 = &[0, 0, -4, 0, 1][..];
    let t12 = &[0, 0, -2, 0, 1][..];
    let t22 = &[0, 0, 4, 0, -3][..];
    let c111 = &[0, -8, 0, -5, 0, 1][..];
    let c112 = &[0, -4, 0, 1][..];
    let c122 = &[0, -5, 0, 2][..];
    let c212 = &[0, 8, 0, -9, 0, 3][..];
    let c222 = &[0, 4, 0, 5, 0, -6][..];
    let a111 = &[0, 8, 0, 5, 0, -1][..];
    let a112 = &[0, 4, 0, -1][..];
    let a221 = &[0, 5, 0, -2][..];
    let q1111 = &[8, 0, 42, 0, 12, 0, -2][..];
    let q1112 = &[-2, 0, -5, 0, 1][..];
    let q1122 = &[5, 0, 6, 0, -2][..];
    let q1212 = &[-4, 0, 1][..];
    let q2212 = &[2, 0, 7, 0, -9, 0, 3][..];
    let q2222 = &[4, 0, 5, 0, 6, 0, -9][..];
    vec![
        kernel("1", half, d1, 3),
        kernel("1b", half, d1, 3),
        kernel("2", (-1, 2), d2, 2),
        kernel("2b", (-1, 2), d2, 2),
        kernel("1_1b", half, t11b, 4),
        kernel("1_2b", half, t12b, 3),
        kernel("2_1b", half, t12b, 3),
        kernel("2_2b", half, t22b, 2),
        kernel("1_1", neg, t11, 4),
        kernel("1_2", one, t12, 3),
        kernel("2_2", one, t22, 2),
        kernel("1_1b_1", one, c111, 5),
        kernel("1_1b_2", neg, c112, 4),
        kernel("1_2b_1", neg, c112, 4),
        kernel("2_1b_1", neg, c112, 4),
        kernel("1_2b_2", one, c122, 3),
        kernel("2_2b_1", one, c122, 3),
        kernel("2_1b_2", neg, c212, 3),
        kernel("2_2b_2", one, c222, 2),
        kernel("1_1b_1b", neg, a111, 5),
        kernel("1_1b_2b", one, a112, 4),
        kernel("1_2b_1b", one, a112, 4),
        kernel("2_1b_1b", one, a112, 4),
        kernel("1_2b_2b", neg, c212, 3),
        kernel("2_2b_1b", neg, a221, 3),
        kernel("2_1b_2b", neg, a221, 3),
        kernel("2_2b_2b", one, c222, 2),
        kernel("1_1b_1_1b", one, q1111, 6),
        kernel("1_1b_1_2b", two, q1112, 5),
        kernel("1_1b_2_1b", two, q1112, 5),
        kernel("1_2b_1_1b", two, q1112, 5),
        kernel("1_1b_2_2b", one, q1122, 4),
        kernel("1_2b_2_1b", one, q1122, 4),
        kernel("2_2b_1_1b", one, q1122, 4),
        kernel("1_2b_1_2b", neg_two, q1212, 4),
        kernel("2_2b_1_2b", neg_two, q2212, 3),
        kernel("2_2b_2_1b", neg_two, q2212, 3),
        kernel("1_2b_2_2b", neg_two, q2212, 3),
        kernel("2_2b_2_2b", two, q2222, 2),
    ]
}

fn symmetric(name: &str, c: (i64, i64), num: &[i64], k: i64) -> ClosedForm {
    form(
        &format!("dBG_{name}"),
        Family::SymmetricDerivative,
        c,
        -2,
        vec![f(num, 1), f(X2_M1, -k)],
    )
}

fn symmetric_forms() -> Vec<ClosedForm> {
    let g1 = &[0, -3, 0, 1][..];
    let g2 = &[0, 0, -2, 0, 1][..];
    let g11b = &[3, 0, 4, 0, -1][..];
    let g12b = &[0, -4, 0, 1][..];
    let g22b = &[5, 0, -6, 0, 6, 0, -2][..];
    vec![
        symmetric("1", (1, 2), g1, 3),
        symmetric("1b", (1, 2), g1, 3),
        symmetric("2", (-1, 1), g2, 3),
        symmetric("2b", (-1, 1), g2, 3),
        symmetric("1_1b", (1, 2), g11b, 4),
        symmetric("1_2b", (1, 1), g12b, 4),
        symmetric("2_1b", (1, 1), g12b, 4),
        symmetric("2_2b", (1, 1), g22b, 4),
    ]
}

fn metric_forms() -> Vec<ClosedForm> {
    use Family::*;
    vec![
        form("g11", Metric, (1, 1), 0, vec![f(&[6, 0, -4], 1), f(Q4, -2)]),
        form("g12", Metric, (2, 1), 0, vec![f(X, 1), f(X2_M2, 1), f(X2_M1, -2)]),
        form("g22", Metric, (-2, 1), 0, vec![f(S4, 1), f(X2_M2, -1), f(X2_M1, -2)]),
        form("g_inv_11", InverseMetric, (1, 2), 0, vec![f(X2_M2, 2), f(S4, 1), f(P8, -1)]),
        form("g_inv_12", InverseMetric, (1, 2), 0, vec![f(X, 1), f(X2_M2, 4), f(P8, -1)]),
        form("g_inv_22", InverseMetric, (1, 2), 0, vec![f(&[6, 0, -7, 0, 2], 1), f(P8, -1)]),
        form("det_g", Determinant, (-4, 1), 0, vec![f(P8, 1), f(X2_M2, -3), f(X2_M1, -2)]),
    ]
}

fn christoffel_forms() -> Vec<ClosedForm> {
    use Family::Christoffel as C;
    vec![
        form(
            "Gamma_1_11",
            C,
            (2, 1),
            0,
            vec![f(X, 1), f(&[3, 0, -1, 0, -2, 0, 1], 1), f(X2_M2, -1), f(X2_M1, -1), f(P8, -1)],
        ),
        form("Gamma_2_11", C, (6, 1), 0, vec![f(X2_M2, 1), f(P8, -1)]),
        form("Gamma_1_12", C, (2, 1), 0, vec![f(X2, 1), f(X2_M2, 2), f(X2_M1, -1), f(P8, -1)]),
        form("Gamma_1_22", C, (2, 1), 0, vec![f(X3, 1), f(X2_M2, 3), f(X2_M1, -1), f(P8, -1)]),
        form(
            "Gamma_2_12",
            C,
            (-1, 1),
            0,
            vec![f(X, 1), f(&[39, 0, -62, 0, 37, 0, -10, 0, 1], 1), f(X2_M2, -1), f(P8, -1)],
        ),
        form("Gamma_2_22", C, (2, 1), 0, vec![f(X2, 1), f(&[-3, 0, 1], 1), f(X2_M2, 2), f(P8, -1)]),
    ]
}

fn curvature_forms() -> Vec<ClosedForm> {
    use Family::Curvature as C;
    vec![
        form("R_1111", C, (4, 1), 0, vec![f(N16, 1), f(Q4, -4), f(P8, -1)]),
        form(
            "R_1122",
            C,
            (4, 1),
            0,
            vec![
                f(&[195, 0, -726, 0, 1170, 0, -1074, 0, 627, 0, -248, 0, 68, 0, -12, 0, 1], 1),
                f(X2_M2, -3),
                f(X2_M1, -4),
                f(P8, -1),
            ],
        ),
        form(
            "R_1212",
            C,
            (-4, 1),
            0,
            vec![
                f(X2, 1),
                f(&[66, 0, -198, 0, 245, 0, -160, 0, 59, 0, -12, 0, 1], 1),
                f(X2_M1, -4),
                f(P8, -1),
            ],
        ),
        form(
            "R_2111",
            C,
            (4, 1),
            0,
            vec![
                f(X, 1),
                f(&[-51, 0, 138, 0, -147, 0, 76, 0, -19, 0, 2], 1),
                f(X2_M2, -1),
                f(X2_M1, -4),
                f(P8, -1),
            ],
        ),
        form(
            "R_1222",
            C,
            (4, 1),
            0,
            vec![
                f(X, 1),
                f(&[60, 0, -174, 0, 207, 0, -130, 0, 47, 0, -10, 0, 1], 1),
                f(X2_M1, -4),
                f(P8, -1),
            ],
        ),
        form(
            "R_2222",
            C,
            (4, 1),
            0,
            vec![
                f(&[-90, 0, 60, 0, 624, 0, -1614, 0, 1829, 0, -1156, 0, 423, 0, -84, 0, 7], 1),
                f(X2_M2, -2),
                f(X2_M1, -4),
                f(P8, -1),
            ],
        ),
    ]
}

fn sectional_forms() -> Vec<ClosedForm> {
    use Family::*;
    vec![
        form("H_X", Sectional, (1, 1), 0, vec![f(N16, 1), f(THREE_M_2X2, -2), f(P8, -1)]),
        form(
            "H_Y",
            Sectional,
            (1, 1),
            0,
            vec![f(HY28, 1), f(THREE_M_2X2, -2), f(U4, -3), f(V4, -2)],
        ),
        form("H_Y_poly", Sectional, (1, 1), 0, vec![f(HY28, 1)]),
        form(
            "B_XY",
            Bisectional,
            (-1, 1),
            0,
            vec![f(X2_M1, 2), f(F1, 1), f(THREE_M_2X2, -2), f(P8, -2)],
        ),
        form("f1", Bisectional, (1, 1), 0, vec![f(F1, 1)]),
        form("f2", Mixed, (-1, 1), 0, vec![f(P8, 1), f(Q6, -1)]),
    ]
}

fn mixed_forms() -> Vec<ClosedForm> {
    use Family::Mixed as M;
    vec![
        form(
            "R_XXXY",
            M,
            (-3, 1),
            0,
            vec![
                f(X, 1),
                root(TWO_M_X2, 5, 2),
                f(ONE_M_X2, 3),
                f(&[45, 0, -92, 0, 71, 0, -24, 0, 3], 1),
                f(THREE_M_2X2, -2),
                root(S4, -1, 2),
                root(THREE_M_2X2, -1, 2),
                f(Q6, -1),
                f2_pow(-3, 2),
            ],
        ),
        form(
            "R_YYYX",
            M,
            (1, 1),
            0,
            vec![
                f(X, 1),
                root(TWO_M_X2, 5, 2),
                f(X2_M1, 2),
                f(&[-630, 0, 2610, 0, -4545, 0, 4276, 0, -2335, 0, 739, 0, -126, 0, 9], 1),
                f(THREE_M_2X2, -2),
                root(S4, -1, 2),
                root(THREE_M_2X2, -1, 2),
                f(U4, -2),
                f(V4, -1),
                f2_pow(-1, 2),
            ],
        ),
        form(
            "R_XYXY",
            M,
            (-3, 1),
            0,
            vec![
                f(X2, 1),
                f(X2_M2, 3),
                f(X2_M1, 2),
                f(&[62, 0, -124, 0, 89, 0, -27, 0, 3], 1),
                f(THREE_M_2X2, -2),
                f(U4, -2),
                f(V4, -1),
            ],
        ),
    ]
}

/// All forms, in registration order.
pub fn standard_forms() -> Vec<ClosedForm> {
    let mut out = kernel_forms();
    out.extend(symmetric_forms());
    out.extend(metric_forms());
    out.extend(christoffel_forms());
    out.extend(curvature_forms());
    out.extend(sectional_forms());
    out.extend(mixed_forms());
    out
}

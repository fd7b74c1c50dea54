#![allow(dead_code)]

use std::path::PathBuf;

use sppt::state_file::Expectation;
use sppt::StateFile;
use sppt_core::families::{
    bell_diagonal, bell_is_sppt, bell_zero_discord, build_cq_state, s12_generators, xstate,
    xstate_is_ppt, xstate_is_sppt, xstate_zero_discord, zero_discord_bell_state,
    BellDiagonalParams, XStateParams,
};
use sppt_core::random::{random_cq_spec, random_ginibre_state, random_pure, random_sppt};
use sppt_core::{c64, BipartiteState, ComplexMatrix, Tolerance, C64};

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

pub fn sppt_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_sppt"))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> C64 {
    let n = m.rows();
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    let mut det = c64(1.0, 0.0);
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm())).unwrap();
        if a[p][col].norm() == 0.0 {
            return c64(0.0, 0.0);
        }
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                let v = a[col][c];
                a[r][c] -= f * v;
            }
        }
    }
    det
}

fn expect(ppt: bool, sppt: bool, cq: bool) -> Expectation {
    Expectation { ppt, sppt, cq }
}

fn file(name: &str, family: &str, state: &BipartiteState, e: Expectation) -> (String, StateFile) {
    let mut f = StateFile::from_state(state).with_label(name).with_family(family);
    f.expect = Some(e);
    (name.to_owned(), f)
}

fn xs(a11: f64, a22: f64, b11: f64, b22: f64, a12: f64, b12: f64) -> XStateParams {
    XStateParams { a11, a22, b11, b22, a12: c64(a12, 0.0), b12: c64(b12, 0.0) }
}

/// The stored fixtures, rebuilt in memory. Expectations come from closed-form
/// predicates or from facts that do not use the pipeline under test.
pub fn fixture_recipes() -> Vec<(String, StateFile)> {
    let tol = Tolerance::default();
    let mut out = Vec::new();

    let bells: [(&str, [f64; 4]); 6] = [
        ("bell-uniform", [0.25; 4]),
        ("bell-phi-plus", [1.0, 0.0, 0.0, 0.0]),
        ("bell-psi-minus", [0.0, 0.0, 0.0, 1.0]),
        ("bell-half-p1-p3", [0.5, 0.0, 0.5, 0.0]),
        ("bell-skew", [0.7, 0.1, 0.1, 0.1]),
        ("bell-graded", [0.4, 0.3, 0.2, 0.1]),
    ];
    for (name, p) in bells {
        let params = BellDiagonalParams::new(p).unwrap();
        let e = expect(
            xstate_is_ppt(&params.to_xstate()).unwrap(),
            bell_is_sppt(&params).unwrap(),
            bell_zero_discord(&params).unwrap(),
        );
        out.push(file(name, "bell-diagonal", &bell_diagonal(&params, &tol).unwrap(), e));
    }

    let xstates = [
        ("xstate-sppt-not-zero-discord", xs(0.3, 0.2, 0.3, 0.2, 0.1, 0.1)),
        ("xstate-one-sided", xs(0.45, 0.45, 0.05, 0.05, 0.3, 0.0)),
        ("xstate-ppt-not-sppt", xs(0.3, 0.2, 0.3, 0.2, 0.1, 0.05)),
        ("xstate-swapped", xs(0.3, 0.2, 0.2, 0.3, 0.1, -0.1)),
        ("xstate-diagonal", xs(0.4, 0.1, 0.3, 0.2, 0.0, 0.0)),
    ];
    for (name, p) in xstates {
        let e = expect(
            xstate_is_ppt(&p).unwrap(),
            xstate_is_sppt(&p).unwrap(),
            xstate_zero_discord(&p).unwrap(),
        );
        out.push(file(name, "xstate", &xstate(&p, &tol).unwrap(), e));
    }

    // 2 x N CQ states are separable, hence PPT, and always SPPT.
    for (name, n, seed) in [("cq-2x3", 3, 101), ("cq-2x4", 4, 102)] {
        let s = build_cq_state(&random_cq_spec(2, n, seed), &tol).unwrap();
        let (_, f) = file(name, "cq", &s, expect(true, true, true));
        out.push((name.to_owned(), f.with_seed(seed)));
    }
    // 3 x N CQ states: canonical SPPT fails iff the S12 commutator does not
    // vanish, which the generator identity predicts without factorizing.
    for (name, n, seed) in [("cq-3x2", 2, 103), ("cq-3x4", 4, 104)] {
        let spec = random_cq_spec(3, n, seed);
        let predicted = s12_generators(&spec, &tol).unwrap().predicted_commutator().fro_norm();
        assert!(predicted > 1e-3, "{name}: pick another seed");
        let s = build_cq_state(&spec, &tol).unwrap();
        let (_, f) = file(name, "cq", &s, expect(true, false, true));
        out.push((name.to_owned(), f.with_seed(seed)));
    }

    // Normal S by construction; ||[rho, rho_A (x) I]|| > 0 rules out CQ.
    let s = random_sppt(3, 105, &tol).unwrap();
    let comm = direct_commutator(&s);
    assert!(comm > 1e-3);
    let (_, f) = file("sppt-2x3", "random-sppt", &s, expect(true, true, false));
    out.push(("sppt-2x3".to_owned(), f.with_seed(105)));

    // Two-qubit Ginibre states: the partial transpose has at most one negative
    // eigenvalue, so NPT iff its determinant is negative.
    for (name, seed) in [("ginibre-2x2-a", 106), ("ginibre-2x2-b", 115)] {
        let s = random_ginibre_state(2, 2, seed, &tol).unwrap();
        let det = determinant(&s.partial_transpose_a());
        assert!(det.re.abs() > 1e-6 && det.im.abs() < 1e-12);
        let ppt = det.re > 0.0;
        assert!(direct_commutator(&s) > 1e-3);
        let (_, f) = file(name, "random-ginibre", &s, expect(ppt, false, false));
        out.push((name.to_owned(), f.with_seed(seed)));
    }

    // Generic pure states are entangled, hence NPT.
    let s = random_pure(2, 2, 108, &tol).unwrap();
    let (_, f) = file("pure-2x2", "random-pure", &s, expect(false, false, false));
    out.push(("pure-2x2".to_owned(), f.with_seed(108)));

    let s = zero_discord_bell_state(0.5, -1.0, &tol).unwrap();
    out.push(file("zero-discord-bell-q0.5-minus", "zero-discord-bell", &s, expect(true, true, true)));
    out
}

/// `||rho (rho_A (x) I) - (rho_A (x) I) rho||_F` from explicit index sums.
pub fn direct_commutator(s: &BipartiteState) -> f64 {
    let (m, n) = (s.dim_a(), s.dim_b());
    let rho = s.rho();
    let mut ra = vec![vec![c64(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            for b in 0..n {
                ra[i][j] += rho[(i * n + b, j * n + b)];
            }
        }
    }
    let lifted = ComplexMatrix::from_fn(m * n, m * n, |r, c| {
        if r % n == c % n {
            ra[r / n][c / n]
        } else {
            c64(0.0, 0.0)
        }
    });
    (&(rho * &lifted) - &(&lifted * rho)).fro_norm()
}

use corner_spectrum::transmission_1d::{solve_1d, ExpPoly, HalfLine, HalfLineRhs};
use corner_spectrum::MaterialPair;

/// Flux-form finite differences for `a (w - w'') = h` on `[-l, l]` with
/// `w(+-l) = 0`; the interface row integrates over `[-h/2, h/2]`.
fn full_line(ap: f64, am: f64, hp: impl Fn(f64) -> f64, hm: impl Fn(f64) -> f64, l: f64, n: usize) -> Vec<f64> {
    let h = l / n as f64;
    let m = 2 * n - 1;
    let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for i in 0..m {
        let yi = -l + (i + 1) as f64 * h;
        if yi.abs() < 0.5 * h {
            lo[i] = -am / h;
            up[i] = -ap / h;
            di[i] = (am + ap) / h + 0.5 * h * (am + ap);
            rhs[i] = 0.5 * h * (hm(0.0) + hp(0.0));
        } else {
            let a = if yi > 0.0 { ap } else { am };
            lo[i] = -a / (h * h);
            up[i] = -a / (h * h);
            di[i] = 2.0 * a / (h * h) + a;
            rhs[i] = if yi > 0.0 { hp(yi) } else { hm(-yi) };
        }
    }
    for i in 1..m {
        let f = lo[i] / di[i - 1];
        di[i] -= f * up[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    let mut w = vec![0.0; m];
    w[m - 1] = rhs[m - 1] / di[m - 1];
    for i in (0..m - 1).rev() {
        w[i] = (rhs[i] - up[i] * w[i + 1]) / di[i];
    }
    w
}

#[test]
fn closed_form_matches_full_line_differences() {
    let m = MaterialPair::new(1.0, -2.0).unwrap();
    let hp = ExpPoly::term(1.0, 0, 1.0);
    let hm = ExpPoly::term(0.5, 1, 2.0).plus(&ExpPoly::term(-1.0, 0, 0.5));
    let sol = solve_1d(&m, &HalfLineRhs::closed(hm.clone(), hp.clone())).unwrap();
    let (l, n) = (40.0, 40 * 256);
    let w = full_line(1.0, -2.0, |s| hp.eval(s), |s| hm.eval(s), l, n);
    let h = l / n as f64;
    let mut err = 0.0f64;
    for (i, v) in w.iter().enumerate() {
        let y = -l + (i + 1) as f64 * h;
        err = err.max((sol.eval(y) - v).abs());
    }
    assert!(err < 1e-4, "max error {err}");
    assert!((w[n - 1] - sol.traces.value).abs() < 1e-4);
}

#[test]
fn sampled_and_closed_paths_agree() {
    let m = MaterialPair::new(3.0, -1.5).unwrap();
    let hp = ExpPoly::term(2.0, 2, 1.5);
    let hm = ExpPoly::term(1.0, 0, 3.0);
    let exact = solve_1d(&m, &HalfLineRhs::closed(hm.clone(), hp.clone())).unwrap();
    let sampled = HalfLineRhs {
        minus: HalfLine::sample(|s| hm.eval(s), 40.0, 1.0 / 128.0),
        plus: HalfLine::sample(|s| hp.eval(s), 40.0, 1.0 / 128.0),
    };
    let fd = solve_1d(&m, &sampled).unwrap();
    assert!((fd.traces.value - exact.traces.value).abs() < 1e-6);
    assert!((fd.traces.d_plus - exact.traces.d_plus).abs() < 1e-6);
    assert!((fd.traces.d_minus - exact.traces.d_minus).abs() < 1e-6);
    for y in [-3.0, -0.5, 0.25, 2.0] {
        assert!((fd.eval(y) - exact.eval(y)).abs() < 1e-5);
    }
}

#[test]
fn opposite_coefficients_are_rejected() {
    let m = MaterialPair::new(1.0, -1.0);
    assert!(m.is_err() || solve_1d(&m.unwrap(), &HalfLineRhs::closed(ExpPoly::zero(), ExpPoly::zero())).is_err());
}

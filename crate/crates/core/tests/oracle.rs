use cv_entangle::model::{make_state, ModelParams};
use cv_entangle::oracle::{
    compare_spectra, convergence_report, discretize_pt_kernel, eigen_pairs, eigen_spectrum, reduce_density,
    reduce_density_of, GridSpec, Party, Weighting,
};
use cv_entangle::spectrum::PtSpectrum;
use cv_entangle::EvolvedStateF64;
use num_complex::Complex;

fn state(sigma: f64, d: f64, t: f64) -> EvolvedStateF64 {
    make_state(ModelParams::natural(sigma, d).unwrap(), t).unwrap()
}

fn grid(s: &EvolvedStateF64, n: usize) -> GridSpec {
    GridSpec::for_state(s, n).unwrap()
}

#[test]
fn negative_eigenvalues_sum_to_minus_negativity() {
    let s = state(1.0, 1.0, 0.0);
    let k = discretize_pt_kernel(&s, &grid(&s, 32)).unwrap();
    let all = eigen_spectrum(&k, k.dimension()).unwrap();
    let neg: f64 = all.iter().filter(|v| **v < 0.0).sum();
    assert!((neg + 0.5).abs() < 2e-3, "{neg}");
}

#[test]
fn eigen_pairs_meet_residual_contract() {
    for t in [0.0, 0.8] {
        let s = state(1.0, 1.0, t);
        let k = discretize_pt_kernel(&s, &grid(&s, 20)).unwrap();
        for pair in eigen_pairs(&k, 10).unwrap() {
            assert!(pair.residual < 1e-8, "t={t}: {pair:?}");
        }
    }
}

#[test]
fn complex_kernel_eigenvalues_are_real() {
    // Rayleigh quotients v* K v of the returned eigenvectors must be real
    let s = state(2.0, 3.0, 1.7);
    let k = discretize_pt_kernel(&s, &grid(&s, 20)).unwrap();
    assert!(!k.is_real());
    for pair in eigen_pairs(&k, 6).unwrap() {
        let v = &pair.vector;
        let n = v.len();
        let mut q = Complex::new(0.0, 0.0);
        for r in 0..n {
            let kv: Complex<f64> = (0..n).map(|c| k.get(r, c) * v[c]).sum();
            q += v[r].conj() * kv;
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let q = q / norm;
        assert!(q.im.abs() < 1e-10, "{q}");
        assert!((q.re - pair.value).abs() < 1e-10);
    }
}

#[test]
fn trace_equals_diagonal_quadrature() {
    for (sigma, d, t) in [(1.0, 1.0, 0.0), (2.0, 3.0, 1.0)] {
        let s = state(sigma, d, t);
        let g = grid(&s, 24);
        let k = discretize_pt_kernel(&s, &g).unwrap();
        let nodes = g.nodes();
        let mut direct = 0.0;
        for &(x1, w1) in &nodes {
            for &(x2, w2) in &nodes {
                direct += w1 * w2 * s.amplitude(x1, x2).norm_sqr();
            }
        }
        assert!((k.trace() - direct).abs() < 1e-10, "{} vs {direct}", k.trace());
    }
}

#[test]
fn reduced_density_levels_and_purity() {
    let s = state(1.0, 1.0, 0.0);
    let rho = reduce_density(&s, &grid(&s, 48)).unwrap();
    let v = eigen_spectrum(&rho, 3).unwrap();
    // lambda0 beta^{2n} with lambda0 = 8/9, beta = 1/3
    for (n, exact) in [8.0 / 9.0, 8.0 / 81.0, 8.0 / 729.0].iter().enumerate() {
        assert!((v[n] - exact).abs() < 1e-6, "level {n}: {}", v[n]);
    }
    assert!((rho.frobenius_sq() - 0.8).abs() < 1e-4);
}

#[test]
fn both_reductions_share_a_spectrum() {
    let s = state(2.0, 3.0, 0.9);
    let g = grid(&s, 40);
    let a = eigen_spectrum(&reduce_density_of(&s, &g, Party::First).unwrap(), 6).unwrap();
    let b = eigen_spectrum(&reduce_density_of(&s, &g, Party::Second).unwrap(), 6).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn refinement_ladder_converges() {
    let s = state(1.0, 1.0, 0.0);
    let grids: Vec<GridSpec> = [20, 40, 60].iter().map(|&n| grid(&s, n)).collect();
    let report = convergence_report(&s, &grids, 6).unwrap();
    assert!(report.monotone && !report.diverging, "{report:?}");
    assert!(report.rows[2].errors[0] <= report.rows[0].errors[0]);
    assert!(report.rows[2].max_error < 1e-6);
}

#[test]
fn separable_case_converges_to_a_single_level() {
    let s = state(1.0, 0.5, 0.0);
    let grids: Vec<GridSpec> = [12, 24].iter().map(|&n| grid(&s, n)).collect();
    let report = convergence_report(&s, &grids, 4).unwrap();
    assert!(report.monotone);
    let k = discretize_pt_kernel(&s, &grids[1]).unwrap();
    let v = eigen_spectrum(&k, 4).unwrap();
    assert!((v[0] - 1.0).abs() < 1e-8 && v[1..].iter().all(|x| x.abs() < 1e-8), "{v:?}");
}

#[test]
fn gauss_legendre_weighting_also_converges() {
    let s = state(1.0, 1.0, 0.0);
    let g = GridSpec::new(40, 10.0, Weighting::GaussLegendre).unwrap();
    let k = discretize_pt_kernel(&s, &g).unwrap();
    let target = PtSpectrum::from_params(s.params()).unwrap().head(6);
    let cmp = compare_spectra(&eigen_spectrum(&k, 6).unwrap(), &target);
    assert!(cmp.signs_match && cmp.max_abs_error < 1e-4, "{cmp:?}");
}

#[test]
fn assembly_is_independent_of_thread_count() {
    let s = state(2.0, 3.0, 0.6);
    let g = grid(&s, 16);
    let build = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| discretize_pt_kernel(&s, &g).unwrap())
    };
    let (a, b) = (build(1), build(3));
    let n = a.dimension();
    for r in 0..n {
        for c in 0..n {
            assert_eq!(a.get(r, c), b.get(r, c));
        }
    }
}

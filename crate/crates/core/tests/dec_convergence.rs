use hodgebound::dec::{hodge_laplacian, solve_spectrum, DecOperators, SolverConfig};
use hodgebound::mesh::{build_flat_torus, build_icosphere, SurfaceMesh};
use std::time::Instant;

fn smallest(mesh: &SurfaceMesh, p: usize, num: usize) -> hodgebound::dec::SpectrumResult {
    let ops = DecOperators::assemble(mesh).unwrap();
    let pencil = hodge_laplacian(&ops, p, false).unwrap();
    let t = Instant::now();
    let s = solve_spectrum(&pencil, num, &SolverConfig::default()).unwrap();
    println!(
        "{} p={p} dim={} method={:?} iters={} {:.2}s",
        mesh.descriptor(),
        pencil.dim(),
        s.method,
        s.iterations,
        t.elapsed().as_secs_f64()
    );
    s
}

#[test]
fn torus_first_eigenvalue_converges_monotonically() {
    let mut prev = f64::INFINITY;
    for m in [8, 16, 32, 64] {
        let s = smallest(&build_flat_torus(m).unwrap(), 0, 2);
        let err = (s.eigenvalues[1] - 1.0).abs();
        println!("m={m} lambda1={} err={err:e}", s.eigenvalues[1]);
        assert!(err < prev);
        prev = err;
    }
}

#[test]
fn torus_low_spectrum_m32() {
    let s = smallest(&build_flat_torus(32).unwrap(), 0, 6);
    let expect = [0.0, 1.0, 1.0, 1.0, 1.0, 2.0];
    assert_eq!(s.kernel_dim, 1);
    for (l, e) in s.eigenvalues.iter().zip(expect).skip(1) {
        assert!((l - e).abs() < 0.02 * e, "{l}");
    }
}

#[test]
fn sphere_low_spectrum_s4() {
    let s = smallest(&build_icosphere(4).unwrap(), 0, 4);
    assert_eq!(s.kernel_dim, 1);
    for &l in &s.eigenvalues[1..] {
        assert!((l - 2.0).abs() < 0.04, "{l}");
    }
}

#[test]
fn one_form_kernels_on_fine_meshes() {
    let torus = smallest(&build_flat_torus(64).unwrap(), 1, 4);
    assert_eq!(torus.kernel_dim, 2, "{:?}", torus.eigenvalues);
    let sphere = smallest(&build_icosphere(4).unwrap(), 1, 4);
    assert_eq!(sphere.kernel_dim, 0, "{:?}", sphere.eigenvalues);
}

#[test]
fn torus_one_forms_m32_many() {
    let s = smallest(&build_flat_torus(32).unwrap(), 1, 24);
    assert_eq!(s.kernel_dim, 2);
    println!("{:?}", s.eigenvalues);
}

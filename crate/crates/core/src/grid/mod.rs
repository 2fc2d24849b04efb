//! Staggered (MAC) grid, field containers and the discrete operators.
//!
//! The operators satisfy the summation-by-parts identity
//! `<grad f, v> + <f, div v> = 0` for admissible `v` (zero boundary-normal
//! entries), which is what carries energy stability and exact charge
//! conservation of the time stepper over to the discrete level.

mod field;
mod ops;

pub use field::{cell_inner, face_inner, CellField, FaceField, GridSpec};
pub use ops::{
    assemble_convect, assemble_cross, assemble_div, assemble_grad, assemble_laplacian,
    assemble_variable_laplacian, assemble_viscous, convect, convect_stencil, cross_b,
    cross_stencil, div_face_to_cell, div_stencil, grad_cell_to_face, grad_stencil,
    interp_cell_to_face, laplacian_neumann, laplacian_stencil, variable_laplacian_stencil,
    viscous_apply, viscous_dissipation, viscous_stencil, InterpMode,
};

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cell(g: &GridSpec, rng: &mut ChaCha8Rng) -> CellField {
        CellField::from_fn(g, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_admissible(g: &GridSpec, rng: &mut ChaCha8Rng) -> FaceField {
        let mut v = FaceField::from_fn(g, |_, _| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        v.zero_boundary();
        v
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn grid_rejects_small_or_degenerate() {
        assert!(GridSpec::new(3, 8, 1.0, 1.0).is_err());
        assert!(GridSpec::new(8, 8, 0.0, 1.0).is_err());
        let g = GridSpec::new(8, 4, 2.0, 1.0).unwrap();
        assert_eq!(g.hx, 0.25);
        assert_eq!(g.hy, 0.25);
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let g = GridSpec::unit_square(8).unwrap();
        let gf = grad_cell_to_face(&g, &CellField::constant(&g, 3.7)).unwrap();
        assert_eq!(gf.max_abs(), 0.0);
    }

    #[test]
    fn grad_of_linear_is_exact_inside() {
        let g = GridSpec::unit_square(8).unwrap();
        let f = CellField::from_fn(&g, |x, _| x);
        let gf = grad_cell_to_face(&g, &f).unwrap();
        for j in 0..g.ny {
            for i in 0..=g.nx {
                let v = gf.xs[g.xface(i, j)];
                if g.is_boundary_xface(i) {
                    assert_eq!(v, 0.0);
                } else {
                    assert!((v - 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(gf.ys.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn summation_by_parts() {
        let g = GridSpec::new(9, 7, 1.3, 0.8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random_cell(&g, &mut rng);
        let gf = grad_cell_to_face(&g, &f).unwrap();
        for _ in 0..10 {
            let v = random_admissible(&g, &mut rng);
            let lhs = face_inner(&g, &gf, &v);
            let rhs = -cell_inner(&g, &f, &div_face_to_cell(&g, &v).unwrap());
            assert!(rel(lhs, rhs) < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn div_of_zero_and_telescoping() {
        let g = GridSpec::unit_square(6).unwrap();
        assert_eq!(div_face_to_cell(&g, &FaceField::zeros(&g)).unwrap().max_abs(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = random_admissible(&g, &mut rng);
        let d = div_face_to_cell(&g, &v).unwrap();
        assert!(d.integral(&g).abs() < 1e-13);
    }

    #[test]
    fn div_grad_is_laplacian_with_zero_row_sums() {
        let g = GridSpec::new(7, 5, 1.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_cell(&g, &mut rng);
        let a = div_face_to_cell(&g, &grad_cell_to_face(&g, &f).unwrap()).unwrap();
        let b = laplacian_neumann(&g, &f).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-10 * x.abs().max(1.0));
        }
        let lap = assemble_laplacian(&g);
        for r in 0..lap.nrows() {
            let s: f64 = lap.row(r).map(|(_, v)| v).sum();
            assert!(s.abs() < 1e-10);
        }
    }

    #[test]
    fn laplacian_is_nsd_and_symmetric() {
        let g = GridSpec::unit_square(10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let f = random_cell(&g, &mut rng);
            let lf = laplacian_neumann(&g, &f).unwrap();
            assert!(cell_inner(&g, &f, &lf) <= 0.0);
        }
        let lap = assemble_laplacian(&g);
        assert!(lap.is_symmetric(1e-12));
        let c = laplacian_neumann(&g, &CellField::constant(&g, 2.0)).unwrap();
        assert!(c.max_abs() < 1e-10);
    }

    #[test]
    fn laplacian_of_cosine_converges_second_order() {
        let err = |n: usize| {
            let g = GridSpec::unit_square(n).unwrap();
            let k = std::f64::consts::PI;
            let f = CellField::from_fn(&g, |x, _| (k * x).cos());
            let lf = laplacian_neumann(&g, &f).unwrap();
            lf.values
                .iter()
                .zip(&f.values)
                .map(|(l, v)| (l + k * k * v).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(128), err(256));
        let ratio = e1 / e2;
        assert!(e1 < 1e-3);
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn interpolation_modes() {
        let g = GridSpec::unit_square(4).unwrap();
        let c = interp_cell_to_face(&g, &CellField::constant(&g, 3.0), InterpMode::Harmonic).unwrap();
        assert!(c.xs.iter().chain(&c.ys).all(|&v| (v - 3.0).abs() < 1e-15));

        let f = CellField::from_fn(&g, |x, _| if x < 0.25 { 1.0 } else { 2.0 });
        let a = interp_cell_to_face(&g, &f, InterpMode::Arithmetic).unwrap();
        let h = interp_cell_to_face(&g, &f, InterpMode::Harmonic).unwrap();
        assert!((a.xs[g.xface(1, 0)] - 1.5).abs() < 1e-15);
        assert!((h.xs[g.xface(1, 0)] - 4.0 / 3.0).abs() < 1e-15);
        // boundary faces copy the adjacent cell
        assert_eq!(a.xs[g.xface(0, 2)], 1.0);
        assert_eq!(a.xs[g.xface(4, 2)], 2.0);

        let mut bad = CellField::constant(&g, 1.0);
        bad.values[5] = 0.0;
        assert!(interp_cell_to_face(&g, &bad, InterpMode::Harmonic).is_err());
        assert!(interp_cell_to_face(&g, &bad, InterpMode::Arithmetic).is_ok());
    }

    #[test]
    fn harmonic_never_exceeds_arithmetic() {
        let g = GridSpec::unit_square(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = CellField::from_fn(&g, |_, _| rng.gen_range(0.01..10.0));
        let a = interp_cell_to_face(&g, &f, InterpMode::Arithmetic).unwrap();
        let h = interp_cell_to_face(&g, &f, InterpMode::Harmonic).unwrap();
        for (x, y) in a.to_flat().iter().zip(h.to_flat()) {
            assert!(y <= x * (1.0 + 1e-15));
        }
    }

    #[test]
    fn viscous_is_symmetric_and_dissipative() {
        let g = GridSpec::new(8, 6, 1.0, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let eta = CellField::from_fn(&g, |_, _| rng.gen_range(0.5..3.0));
        let u = random_admissible(&g, &mut rng);
        let v = random_admissible(&g, &mut rng);
        let lu = viscous_apply(&g, &eta, &u).unwrap();
        let lv = viscous_apply(&g, &eta, &v).unwrap();
        assert!(rel(face_inner(&g, &lu, &v), face_inner(&g, &u, &lv)) < 1e-12);
        assert!(-face_inner(&g, &lu, &u) > 0.0);
        assert!(assemble_viscous(&g, &eta).is_symmetric(1e-12));
        assert!(viscous_apply(&g, &CellField::constant(&g, 1.0), &FaceField::zeros(&g))
            .unwrap()
            .max_abs()
            == 0.0);
        assert!(viscous_apply(&g, &CellField::constant(&g, -1.0), &u).is_err());
    }

    #[test]
    fn no_slip_blocks_rigid_translation() {
        let g = GridSpec::unit_square(8).unwrap();
        let mut u = FaceField::from_fn(&g, |_, _| (1.0, 0.0));
        u.zero_boundary();
        let eta = CellField::constant(&g, 1.0);
        let lu = viscous_apply(&g, &eta, &u).unwrap();
        assert!(-face_inner(&g, &lu, &u) > 0.0);
        // away from the walls the translation is force free
        for j in 1..g.ny - 1 {
            for i in 2..g.nx - 1 {
                assert!(lu.xs[g.xface(i, j)].abs() < 1e-10);
            }
        }
        assert!(lu.xs[g.xface(4, 0)] < 0.0);
    }

    #[test]
    fn constant_viscosity_is_vector_laplacian_plus_grad_div() {
        // 2 div(eta D(u)) = eta (lap u + grad div u) for constant eta, with
        // the reflected-ghost wall closure for tangential components.
        let g = GridSpec::new(7, 9, 1.0, 1.2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = random_admissible(&g, &mut rng);
        let eta = 1.7;
        let lhs = viscous_apply(&g, &CellField::constant(&g, eta), &u).unwrap();
        let gd = grad_cell_to_face(&g, &div_face_to_cell(&g, &u).unwrap()).unwrap();
        let (hx2, hy2) = (g.hx * g.hx, g.hy * g.hy);
        for j in 0..g.ny {
            for i in 1..g.nx {
                let c = u.xs[g.xface(i, j)];
                let e = u.xs[g.xface(i + 1, j)];
                let w = u.xs[g.xface(i - 1, j)];
                let n = if j + 1 < g.ny { u.xs[g.xface(i, j + 1)] } else { -c };
                let s = if j > 0 { u.xs[g.xface(i, j - 1)] } else { -c };
                let lap = (e - 2.0 * c + w) / hx2 + (n - 2.0 * c + s) / hy2;
                let expect = eta * (lap + gd.xs[g.xface(i, j)]);
                assert!((lhs.xs[g.xface(i, j)] - expect).abs() < 1e-9 * expect.abs().max(1.0));
            }
        }
        for j in 1..g.ny {
            for i in 0..g.nx {
                let c = u.ys[g.yface(i, j)];
                let n = u.ys[g.yface(i, j + 1)];
                let s = u.ys[g.yface(i, j - 1)];
                let e = if i + 1 < g.nx { u.ys[g.yface(i + 1, j)] } else { -c };
                let w = if i > 0 { u.ys[g.yface(i - 1, j)] } else { -c };
                let lap = (e - 2.0 * c + w) / hx2 + (n - 2.0 * c + s) / hy2;
                let expect = eta * (lap + gd.ys[g.yface(i, j)]);
                assert!((lhs.ys[g.yface(i, j)] - expect).abs() < 1e-9 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn convection_is_skew_and_linear() {
        let g = GridSpec::new(8, 10, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert_eq!(
            convect(&g, &FaceField::zeros(&g), &random_admissible(&g, &mut rng)).unwrap().max_abs(),
            0.0
        );
        for _ in 0..10 {
            let u = random_admissible(&g, &mut rng);
            let w = random_admissible(&g, &mut rng);
            let cw = convect(&g, &u, &w).unwrap();
            assert!(face_inner(&g, &cw, &w).abs() < 1e-12);
        }
        let u = random_admissible(&g, &mut rng);
        let w1 = random_admissible(&g, &mut rng);
        let w2 = random_admissible(&g, &mut rng);
        let mut comb = w1.clone();
        comb.scale(2.0);
        comb.axpy(-0.5, &w2);
        let lhs = convect(&g, &u, &comb).unwrap();
        let mut rhs = convect(&g, &u, &w1).unwrap();
        rhs.scale(2.0);
        rhs.axpy(-0.5, &convect(&g, &u, &w2).unwrap());
        for (a, b) in lhs.to_flat().iter().zip(rhs.to_flat()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(assemble_convect(&g, &u).is_skew(1e-14));
    }

    #[test]
    fn lorentz_and_ohm_terms_cancel() {
        let g = GridSpec::new(9, 8, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let b = rng.gen_range(-2.0..2.0);
            let j = random_admissible(&g, &mut rng);
            let u = random_admissible(&g, &mut rng);
            let jb = cross_b(&g, &j, b).unwrap();
            let ub = cross_b(&g, &u, b).unwrap();
            let s = face_inner(&g, &jb, &u) + face_inner(&g, &ub, &j);
            let scale = face_inner(&g, &jb, &u).abs().max(1e-300);
            assert!(s.abs() / scale < 1e-12);
            // the cross product is orthogonal to its argument
            assert!(face_inner(&g, &ub, &u).abs() < 1e-12);
        }
    }

    #[test]
    fn cross_of_discrete_curl_is_a_gradient() {
        // u = curl(psi) with psi on nodes vanishing on the boundary gives
        // u x B = -b grad(psi averaged to cells): a pure gradient.
        let g = GridSpec::unit_square(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let np = (g.nx + 1) * (g.ny + 1);
        let mut psi = vec![0.0; np];
        for j in 1..g.ny {
            for i in 1..g.nx {
                psi[i + (g.nx + 1) * j] = rng.gen_range(-1.0..1.0);
            }
        }
        let p = |i: usize, j: usize| psi[i + (g.nx + 1) * j];
        let mut u = FaceField::zeros(&g);
        for j in 0..g.ny {
            for i in 0..=g.nx {
                u.xs[g.xface(i, j)] = (p(i, j + 1) - p(i, j)) / g.hy;
            }
        }
        for j in 0..=g.ny {
            for i in 0..g.nx {
                u.ys[g.yface(i, j)] = -(p(i + 1, j) - p(i, j)) / g.hx;
            }
        }
        assert!(div_face_to_cell(&g, &u).unwrap().max_abs() < 1e-12);
        let b = 1.3;
        let ub = cross_b(&g, &u, b).unwrap();
        let bar = CellField::from_vec(
            &g,
            (0..g.n_cells())
                .map(|k| {
                    let (i, j) = (k % g.nx, k / g.nx);
                    0.25 * (p(i, j) + p(i + 1, j) + p(i, j + 1) + p(i + 1, j + 1))
                })
                .collect(),
        )
        .unwrap();
        let mut grad = grad_cell_to_face(&g, &bar).unwrap();
        grad.scale(-b);
        for (a, c) in ub.to_flat().iter().zip(grad.to_flat()) {
            assert!((a - c).abs() < 1e-12);
        }
    }
}

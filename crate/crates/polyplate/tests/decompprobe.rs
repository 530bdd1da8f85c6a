use polyplate::mesh::Domain;
use polyplate::quadrature::polygon_quadrature;
use polyplate::system::{solve_plate, BoundaryCondition, BoundaryConditions};
use polyplate::verify::{cvt_series, reference_material, AnalyticalSolution};

fn h1_parts(domain: Domain, seed: u64, h: f64, exact_kind: &str) {
    let material = reference_material(h);
    let exact = match exact_kind {
        "square" => AnalyticalSolution::nonuniform_square(&material),
        _ => AnalyticalSolution::circular_clamped(&material),
    };
    let meshes = cvt_series(domain, &[64, 256, 1024, 4096], seed).unwrap();
    for mesh in &meshes {
        let bcs = BoundaryConditions::uniform(mesh, BoundaryCondition::Clamped);
        let solution = solve_plate(mesh, &material, &|p| (exact.load)(p), &bcs).unwrap();
        let (mut gw_num, mut gw2_num, mut gb_num, mut den) = (0.0f64, 0.0, 0.0, 0.0);
        for e in 0..mesh.num_elements() {
            let ctx = solution.context(e);
            let ue = solution.element_dofs(e);
            let dbeta = ctx.delta_beta(&ue);
            let quad = polygon_quadrature(ctx.polygon(), 6).unwrap();
            for (p, wq) in quad.iter() {
                let eval = ctx.basis().eval(p).unwrap();
                let fe = ctx.field_sample(&eval, &ue, &dbeta);
                let gamma = ctx.shear_b(&eval) * &ue;
                let gw_rec = polyplate::geometry::Vector::new(
                    gamma[0] - fe.beta.x,
                    gamma[1] - fe.beta.y,
                );
                let gw = (exact.grad_w)(p);
                let gb = (exact.grad_beta)(p);
                gw_num += wq * (fe.grad_w - gw).norm_squared();
                gw2_num += wq * (gw_rec - gw).norm_squared();
                gb_num += wq * (fe.grad_beta - gb).norm_squared();
                den += wq * (gw.norm_squared() + gb.norm_squared());
            }
        }
        println!(
            "{exact_kind} h={h} count {}: gw {:.3e} gw_rec {:.3e} gb {:.3e}  H1 {:.3e}  H1_rec {:.3e}",
            mesh.num_elements(),
            (gw_num / den).sqrt(),
            (gw2_num / den).sqrt(),
            (gb_num / den).sqrt(),
            ((gw_num + gb_num) / den).sqrt(),
            ((gw2_num + gb_num) / den).sqrt()
        );
    }
}

#[test]
#[ignore]
fn h1_parts_square_thick() {
    h1_parts(Domain::UnitSquare { a: 1.0 }, 33, 0.1, "square");
}

#[test]
#[ignore]
fn h1_parts_square_thin() {
    h1_parts(Domain::UnitSquare { a: 1.0 }, 33, 1e-5, "square");
}

//! Kernel families, their masses and the derivative bound S.

use nfield::kernel::{blend_kernels, make_kernel, verify_h4, KernelFamily};

fn main() -> nfield::error::Result<()> {
    let families = [
        KernelFamily::PolynomialBump { coefficient: 1.0 },
        KernelFamily::Bump { amplitude: 1.0 },
    ];
    for dim in 1..=3 {
        let spacing = vec![0.05; dim];
        for family in families {
            let k = make_kernel(family, dim, &spacing, Some(1.0))?;
            let h4 = verify_h4(&k);
            println!(
                "N = {dim} {:?}: discrete l1 = {:.12}, continuous l1 = {:.8}, S = {:.6} (observed {:.6})",
                k.nominal_family().unwrap(),
                k.l1_norm(),
                k.continuous_l1_norm(),
                h4.s_claimed,
                h4.s_observed
            );
        }
    }
    let j0 = make_kernel(families[0], 1, &[0.05], Some(1.0))?;
    let j1 = make_kernel(families[1], 1, &[0.05], Some(2.0))?;
    for eps in [0.0, 0.25, 0.5, 1.0] {
        let k = blend_kernels(&j0, &j1, eps)?;
        println!("blend eps = {eps}: l1 = {:.12}", k.l1_norm());
    }
    Ok(())
}

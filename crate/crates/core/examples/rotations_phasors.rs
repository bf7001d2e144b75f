//! The algebraic ingredients: rotations with nonzero product distance and
//! thread phasors with rationally independent exponents.

use ffs::algebra::{
    besicovitch_exponents, monomial_exponents, probe_sqrt_relations, verify_rotation,
    AlgebraicRotation, Constellation,
};

fn main() -> ffs::Result<()> {
    for dim in [2, 3, 4] {
        let u = AlgebraicRotation::builtin(dim)?;
        let report = verify_rotation(&u, &Constellation::bpsk(), 1 << 20);
        println!(
            "rotation {dim}x{dim}: ||U^H U - I|| = {:.2e}, min product distance {:.3e} over {} vectors ({})",
            report.orth_residual,
            report.min_prod_dist,
            report.vectors_checked,
            if report.exhaustive { "exhaustive" } else { "sampled" }
        );
    }

    let phasors = besicovitch_exponents(2);
    println!("thread exponents for T=2: {:?}", phasors.betas());
    println!("gammas: {:.4?}", phasors.gammas());

    let monomials = monomial_exponents(2);
    let radicands = monomials.radicands().expect("square-root set");
    let probe = probe_sqrt_relations(radicands, 1000);
    println!(
        "sqrt of {radicands:?}: relation with |q| <= {} -> {:?}, smallest residual {:.3e}",
        probe.height, probe.relation, probe.min_residual
    );
    Ok(())
}

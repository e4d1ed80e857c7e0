//! The `z` outcomes of an iterative run on an eigenstate are i.i.d. Bernoulli(p):
//! exact law from statevector branching, then a sampled threshold plan.

use qvp::fixtures::random_procedure;
use qvp::iterative::jordan::{bernoulli_product, branching_z_law, total_variation};
use qvp::iterative::{jordan_blocks_of, pg, IterativePlan, Sampler};
use qvp::spectral::spectrum;
use qvp::tolerances::Limits;

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let q = random_procedure(11, 2, 2, &limits)?;
    let (ops, blocks) = jordan_blocks_of(&q)?;
    println!("{} two-dimensional and {} one-dimensional blocks", blocks.two_d.len(), blocks.one_d.len());
    let basis = spectrum(&q)?.eigenbasis();
    for (p, psi) in &basis {
        let law = branching_z_law(&ops, psi.amplitudes(), 6);
        println!("p = {p:.6}: TV to Bernoulli(p)^6 = {:.2e}", total_variation(&law, &bernoulli_product(*p, 6)));
    }
    let plan = IterativePlan::threshold(8, 5)?;
    let sampler = Sampler::new(&q, &plan, &limits)?;
    let (p, psi) = &basis[0];
    let run = sampler.run(&psi.to_density(), 100_000, 1, 0)?;
    println!("threshold plan on top eigenstate: sampled {:.4}, exact {:.4}", run.distribution[1], pg(&plan, *p)?);
    Ok(())
}

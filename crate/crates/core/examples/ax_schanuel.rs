//! Restrict a Lie-algebra-valued form to a subvariety, read off its generic
//! rank and kernel, and cut the subvariety down by the first integrals found.

use std::error::Error;

use chabauty_core::axschanuel::{self, DEMOS};

pub fn run() -> Result<(), Box<dyn Error>> {
    for name in DEMOS {
        let (form, chart) = axschanuel::demo(name, 12).expect("built-in demo");
        let pb = axschanuel::pull_back(&form, &chart)?;
        let ka = axschanuel::kernel_analysis(&pb)?;
        println!("{name}: generic rank {} of {}", ka.rank.rank, form.dim());
        for k in &ka.kernel_basis {
            let coeffs: Vec<String> = k.coeffs.iter().map(|(j, f)| format!("v*{j}: {}", f.to_poly_string())).collect();
            println!("  kernel v*{} + [{}]", k.row, coeffs.join(", "));
        }
        println!("  verdict {}", ka.verdict.label());
        let locus = axschanuel::effective_locus(&form, &chart, 4)?;
        let v: Vec<String> = locus.vanishing.iter().map(|g| g.to_poly_string()).collect();
        println!("  vanishing [{}], {}", v.join(", "), locus.notes.join("; "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

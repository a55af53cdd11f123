//! Transport across logarithmic poles with nilpotent residues, and the
//! residue functional of a connection in normal form.

use std::error::Error;

use chabauty_core::exactnum::int;
use chabauty_core::transport::{self, ConnectionForm, SeriesMatrix, SingularResidue};

pub fn run() -> Result<(), Box<dyn Error>> {
    let vars = vec!["u".to_string(), "s".to_string()];
    let g = transport::parallel_transport(&transport::demo_family(4), None)?.h;
    let n = SingularResidue {
        var: 0,
        n: vec![vec![int(0), int(0)], vec![int(1), int(0)]],
    };
    let h = transport::log_singular_transport(std::slice::from_ref(&n), &g)?;
    println!("exp(N log u) G, bottom-left entry: {}", h.get(1, 0));

    let z = SeriesMatrix::zero(3, 3, &vars, 3);
    let n0 = SingularResidue {
        var: 0,
        n: vec![vec![int(0), int(0), int(0)], vec![int(2), int(0), int(0)], vec![int(3), int(0), int(0)]],
    };
    let conn = ConnectionForm::new(vec![z.clone(), z], vec![n0])?;
    let r = transport::residue_functional(&conn, 0)?;
    let f: Vec<String> = r.functional.iter().map(|x| x.to_string()).collect();
    println!("residue functional ({})", f.join(", "));
    for row in &r.stoll_projection {
        let v: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        println!("  kernel vector ({})", v.join(", "));
    }
    println!("horizontal: {}", r.horizontal);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run().unwrap();
}

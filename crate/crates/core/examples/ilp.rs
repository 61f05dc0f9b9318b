//! Integer program for stable dual-admission assignments, checked point by
//! point against enumeration on a small instance.

use shbm::random::rng_from;
use shbm::uda::{emit_ilp, enumerate_stable_assignments, random_uda, UdaSizes};

fn main() -> shbm::error::Result<()> {
    let sizes = UdaSizes {
        students: 3,
        universities: 2,
        max_programs_per_university: 2,
        max_list_len: 2,
        min_capacity: 1,
        max_capacity: 2,
        max_quota: 1,
        max_weight: 0,
    };
    let inst = random_uda(&mut rng_from(1), &sizes);
    let lp = emit_ilp(&inst);
    print!("{}", lp.to_lp_string());

    let n = lp.variables.len();
    assert!(n <= 20, "too many variables to enumerate");
    let mut feasible = Vec::new();
    for bits in 0u32..(1 << n) {
        let x: Vec<bool> = (0..n).map(|i| bits & (1 << i) != 0).collect();
        if lp.is_feasible(&x) {
            feasible.extend(lp.assignment(&inst, &x));
        }
    }
    let stable = enumerate_stable_assignments(&inst, 20)?;
    println!("\\ {} feasible points, {} stable assignments", feasible.len(), stable.len());
    Ok(())
}

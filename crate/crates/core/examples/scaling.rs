//! Prints the fitted exponents of both analysis routes on generated instances.

use daestruct::gen::{run_bench, Method};

fn main() {
    let sizes = [400, 800, 1200, 1600];
    for method in [Method::Esmm, Method::Smm] {
        let r = run_bench(method, 10, &sizes, 3, 0).expect("generated instances are well-posed");
        println!("{}: nu = {:.3}, points = {:?}", method.label(), r.nu, r.points);
    }
}

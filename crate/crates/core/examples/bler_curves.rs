//! The built-in SINR to BLER curves, the receiver-gain shift, and loading a
//! replacement table from CSV.

use sidelink_sim::l2sm::{load_table, MCS_COUNT};
use sidelink_sim::BlerTable;

fn main() {
    let table = BlerTable::builtin();
    let grid = [-6.0, -2.0, 2.0, 6.0, 10.0, 14.0, 18.0, 22.0];
    print!("{:>4}", "mcs");
    for s in grid {
        print!(" {s:>7}");
    }
    println!();
    for mcs in 1..=MCS_COUNT {
        print!("{mcs:>4}");
        for s in grid {
            print!(" {:>7.4}", table.lookup(mcs, s, 0.0).unwrap());
        }
        println!();
    }

    println!("\nMCS 4 at 0 dB with receiver gain:");
    for delta in [0.0, 3.0, 5.0, 7.0] {
        println!("  delta {delta} dB -> BLER {:.4}", table.lookup(4, 0.0, delta).unwrap());
    }

    let mut csv = Vec::new();
    table.write_csv(&mut csv).unwrap();
    let reloaded = load_table(std::str::from_utf8(&csv).unwrap()).unwrap();
    println!("\nCSV round trip identical: {}", reloaded == table);
}

//! Dump every preset table row with timing; handy for eyeballing parameters.

use lrc::metrics::DistanceOptions;
use lrc::tables;

fn main() {
    let ids: Vec<u32> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("table id"))
        .collect();
    let ids = if ids.is_empty() {
        (1..=10).collect()
    } else {
        ids
    };
    let opts = DistanceOptions::default();
    for id in ids {
        let start = std::time::Instant::now();
        let rows = tables::table_rows(id, &opts).expect("table build");
        println!("table {id} ({:.2?}):", start.elapsed());
        println!("{}", tables::CSV_HEADER);
        for (analysis, _) in &rows {
            let r = analysis.row();
            println!(
                "{},{},{},{},{:?},{},{},{},{}  sharp={:?} enum={}",
                r.q,
                r.n,
                r.k,
                r.d,
                r.d_mode,
                r.d_dual,
                r.r,
                r.delta,
                r.defect,
                analysis.sharp,
                analysis.d.enumerated
            );
        }
    }
}

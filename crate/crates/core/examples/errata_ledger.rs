//! Compare printed componentwise formulas with the quaternion algebra they expand.
use hyperholo::errata::errata_report;
use hyperholo::StructuralSet;

fn main() {
    let (report, outcomes) = errata_report(&StructuralSet::cimmino(), 0, 16);
    for o in &outcomes {
        println!(
            "{:<30} best convention {:<50} {} mismatched terms, {} conventions match",
            o.formula,
            o.convention.name(),
            o.mismatches(),
            o.matching_conventions
        );
    }
    for e in &report.errata {
        println!("  {} / {}: {}", e.formula, e.item, e.detail);
    }
}

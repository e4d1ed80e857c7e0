//! Run named checks in-process and print their JSON report lines.

use qvp::report::{sort_reports, write_json_lines};
use qvp::tolerances::Limits;
use qvp::verify::{run_check, CheckId, Instance};

fn main() -> qvp::Result<()> {
    let limits = Limits::default();
    let mut reports = Vec::new();
    for id in [CheckId::PgIdentity, CheckId::PgBeta, CheckId::PgMonotone, CheckId::EmapSynthesis, CheckId::ClassicalAgreement] {
        reports.extend(run_check(id, "builtin", &Instance::None, 42, false, &limits)?);
    }
    let q = qvp::fixtures::example1(4);
    reports.extend(run_check(CheckId::BlockStructure, "example1", &Instance::Procedure(q), 42, false, &limits)?);
    sort_reports(&mut reports);
    write_json_lines(&reports, std::io::stdout().lock()).expect("stdout");
    Ok(())
}

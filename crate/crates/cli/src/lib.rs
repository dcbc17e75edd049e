//! Library half of the `noncross` command: file formats, rendering, run
//! reports and the property suites.

pub mod io;
pub mod oracle;
pub mod report;
pub mod suites;
pub mod svg;

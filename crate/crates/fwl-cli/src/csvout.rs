//! Plain numeric CSV writers: '.' decimal via Rust's default float
//! Display (shortest round-trip form), no quoting needed, one header row.

use fwl_core::cylinder::{symbol_p, FlowTrajectory};
use fwl_core::weyl::CountTable;
use fwl_core::zeta::ZeroList;
use num_complex::Complex64;

pub fn points_csv(points: &[Complex64]) -> Vec<u8> {
    let mut out = String::from("re,im\n");
    for z in points {
        out.push_str(&format!("{},{}\n", z.re, z.im));
    }
    out.into_bytes()
}

pub fn zeros_csv(list: &ZeroList) -> Vec<u8> {
    let mut out = String::from("re,im,mult\n");
    for (z, m) in &list.zeros {
        out.push_str(&format!("{},{},{m}\n", z.re, z.im));
    }
    out.into_bytes()
}

pub fn counts_csv(table: &CountTable) -> Vec<u8> {
    let mut out = String::from("t,r_used,count,retries\n");
    for row in &table.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.t, row.r_used, row.count, row.retries
        ));
    }
    out.into_bytes()
}

pub fn trajectory_csv(traj: &FlowTrajectory) -> Vec<u8> {
    let mut out = String::from("t,r,y,zeta,eta,p\n");
    for (t, pt) in &traj.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t,
            pt.r,
            pt.y,
            pt.zeta,
            pt.eta,
            symbol_p(pt)
        ));
    }
    out.into_bytes()
}

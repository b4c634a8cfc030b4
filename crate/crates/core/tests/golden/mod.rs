//! Nine-dimensional binding data shared by the golden tests and the acceptance suite.
#![allow(dead_code)]

use contact_calculus::{Chart, ChartRef};

pub const ETA1: &str = "(2-(x^2+y^2)^2)(d[z1]+x1 d[y1])+(d[z2]+x2 d[y2])";

// Differential as printed alongside the 1-form. The d[y]^d[y1] coefficient
// carries one more factor x1 than d(η) actually has.
pub const DETA1_PRINTED: &str = "(-4 x^3-4 x y^2) d[x]^d[z1]+(-4 x^3 x1-4 x x1 y^2) d[x]^d[y1]
    +(-4 x^2 y-4 y^3) d[y]^d[z1]+(-4 x^2 x1 y-4 x1 y^3) x1 d[y]^d[y1]
    +(2-x^4-2 x^2 y^2-y^4) d[t1]^d[z1]+(2-x^4-2 x^2 y^2-y^4) d[x1]^d[y1]
    +(2 x1-x^4 x1-2 x^2 x1 y^2-x1 y^4) d[t1]^d[y1]+d[x2]^d[y2]
    +d[t1]^d[z2]+x2 d[t1]^d[y2]-x d[t1]^d[y]+y d[t1]^d[x]";

// The 1-form before restricting to t1 = 0.
pub const ETA: &str = "exp(t1) ((2-(x^2+y^2)^2)(d[z1]+x1 d[y1]) + d[z2] + x2 d[y2] - t1 (x d[y] - y d[x]))";

pub const TAU: &str = "24 (x^2+y^2)^2 d[x1]^d[y1]
    + (-96 x (-1+x1) x1 y (x^2+y^2)^2) d[t1]^d[x1]
    + (-24 x1 (x^2+y^2) (x^2+x1 y^2)) d[x1]^d[z1]
    + (6 x (-2+x^4+2 x^2 y^2+y^4)) d[x]^d[z1]
    + (6 y (-2+x^4+2 x^2 y^2+y^4)) d[y]^d[z1]
    + (-24 (x^2+y^2)^2 (-2+x^4+2 x^2 y^2+y^4)) d[x2]^d[y2]
    + (24 x2 (x^2+y^2)^2 (-2+x^4+2 x^2 y^2+y^4)) d[x2]^d[z2]
    + (6 x (-2+x^4+2 x^2 y^2+y^4)^2) d[x]^d[z2]
    + (6 y (-2+x^4+2 x^2 y^2+y^4)^2) d[y]^d[z2]
    + (24 x (x^2+y^2) (-2+x^4+2 x^2 y^2+y^4)) d[t1]^d[y]
    + (-24 y (x^2+y^2) (-2+x^4+2 x^2 y^2+y^4)) d[t1]^d[x]
    + (-24 (-1+x1) x1 y^2 (x^2+y^2) (-2+x^4+2 x^2 y^2+y^4)) d[x1]^d[z2]";

pub const TAU4: &str = "(-1990656 (x^2+y^2)^6 (-2+x^4+2 x^2 y^2+y^4)^3) d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[y2]^d[z1]
    + (-1990656 x2 (x^2+y^2)^6 (-2+x^4+2 x^2 y^2+y^4)^3) d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[z1]^d[z2]
    + (-1990656 x1 (x^2+y^2)^6 (-2+x^4+2 x^2 y^2+y^4)^4) d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y2]^d[z1]^d[z2]
    + (-1990656 (x^2+y^2)^6 (-2+x^4+2 x^2 y^2+y^4)^4) d[t1]^d[x]^d[x1]^d[x2]^d[y]^d[y1]^d[y2]^d[z2]";

pub fn alphabetical() -> ChartRef {
    Chart::parse_list("t1,x,x1,x2,y,y1,y2,z1,z2").unwrap().shared()
}

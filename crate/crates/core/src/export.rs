//! CSV and SVG renderings of a PL map.
//!
//! Consecutive pieces that continue one affine segment (same slope, range
//! interval starting where the previous one ends) are merged into a single
//! output row; the merged row lists the words of every piece it covers,
//! joined by `|`.

use std::fmt::Write as _;

use crate::perron::AlgebraicNumber;
use crate::pl::{Piece, PlMap};
use crate::sft::Word;

/// A maximal affine run of pieces.
#[derive(Debug, Clone)]
pub struct Segment {
    pub x_lo: AlgebraicNumber,
    pub x_hi: AlgebraicNumber,
    pub y_lo: AlgebraicNumber,
    pub y_hi: AlgebraicNumber,
    pub exponent: i64,
    pub domains: Vec<Word>,
    pub ranges: Vec<Word>,
}

pub fn segments(f: &PlMap) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for p in f.pieces() {
        let y_hi = p.y_hi();
        if let Some(last) = out.last_mut() {
            if last.exponent == p.exponent && last.y_hi == p.y_lo {
                last.x_hi = p.x_hi.clone();
                last.y_hi = y_hi;
                last.domains.push(p.domain.clone());
                last.ranges.push(p.range.clone());
                continue;
            }
        }
        out.push(start(p, y_hi));
    }
    out
}

fn start(p: &Piece, y_hi: AlgebraicNumber) -> Segment {
    Segment {
        x_lo: p.x_lo.clone(),
        x_hi: p.x_hi.clone(),
        y_lo: p.y_lo.clone(),
        y_hi,
        exponent: p.exponent,
        domains: vec![p.domain.clone()],
        ranges: vec![p.range.clone()],
    }
}

fn words(ws: &[Word]) -> String {
    ws.iter()
        .map(|w| w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("|")
}

fn exact(a: &AlgebraicNumber) -> String {
    a.poly_strings().join(" ")
}

/// CSV with columns `x_lo,x_hi,y_at_lo,slope_exponent,nu,mu` followed by the
/// exact residue coefficients of the three endpoints.
pub fn to_csv(f: &PlMap, digits: usize) -> Vec<u8> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["x_lo", "x_hi", "y_at_lo", "slope_exponent", "nu", "mu", "x_lo_exact", "x_hi_exact", "y_at_lo_exact"])
        .expect("in-memory write");
    for s in segments(f) {
        wtr.write_record([
            s.x_lo.to_decimal(digits),
            s.x_hi.to_decimal(digits),
            s.y_lo.to_decimal(digits),
            s.exponent.to_string(),
            words(&s.domains),
            words(&s.ranges),
            exact(&s.x_lo),
            exact(&s.x_hi),
            exact(&s.y_lo),
        ])
        .expect("in-memory write");
    }
    wtr.into_inner().expect("in-memory flush")
}

/// SVG of the graph in the unit square; each segment has a filled circle at
/// its closed left end and an open circle at its open right end.
pub fn to_svg(f: &PlMap, digits: usize) -> Vec<u8> {
    let digits = digits.min(8);
    let mut s = String::new();
    s.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"512\" height=\"512\">\n");
    s.push_str("<g transform=\"translate(0,1) scale(1,-1)\">\n");
    s.push_str("<rect x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.004\"/>\n");
    for seg in segments(f) {
        let (x0, x1) = (seg.x_lo.to_decimal(digits), seg.x_hi.to_decimal(digits));
        let (y0, y1) = (seg.y_lo.to_decimal(digits), seg.y_hi.to_decimal(digits));
        let _ = writeln!(
            s,
            "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"black\" stroke-width=\"0.006\"/>"
        );
        let _ = writeln!(s, "<circle cx=\"{x0}\" cy=\"{y0}\" r=\"0.012\" fill=\"black\"/>");
        let _ = writeln!(
            s,
            "<circle cx=\"{x1}\" cy=\"{y1}\" r=\"0.012\" fill=\"white\" stroke=\"black\" stroke-width=\"0.004\"/>"
        );
    }
    s.push_str("</g>\n</svg>\n");
    s.into_bytes()
}

//! Text dump of a [`ConicProblem`] for cross-checking with external solvers.
//!
//! The layout is SDPA sparse with a few comment lines on top:
//!
//! ```text
//! * chancmp conic dump
//! * sense min                 (or max)
//! * free 3                    (one line per free block, 1-based block id)
//! 2                           number of constraints m
//! 3                           number of blocks
//! 4 -2 -1                     block sizes; negative = diagonal block
//! 1.0 0.0                     b
//! 0 1 1 2 0.5                 matrix block i j value
//! ```
//!
//! Matrix 0 is the objective `C`, matrix `k` is constraint row `k`; indices
//! are 1-based and only `i <= j` is written. Each line stands for the
//! symmetric pair of entries, so the row reads `Σ value·(X_ij + X_ji)` off
//! the diagonal. Unlike plain SDPA, `C` is written as given and the sense
//! line says whether it is minimized or maximized. Nonnegative and free
//! blocks are diagonal blocks, the latter flagged by a `* free` line.

use std::fmt::Write as _;

use super::{svec_index, Cone, ConicProblem, Sense};
use crate::error::{Error, Result};

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes `p` in the format described in the module docs.
pub fn write_dump(p: &ConicProblem) -> String {
    let mut out = String::new();
    out.push_str("* chancmp conic dump\n");
    let sense = match p.sense() {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let _ = writeln!(out, "* sense {sense}");
    for (k, cone) in p.cones().iter().enumerate() {
        if let Cone::Free(_) = cone {
            let _ = writeln!(out, "* free {}", k + 1);
        }
    }
    let _ = writeln!(out, "{}", p.num_rows());
    let _ = writeln!(out, "{}", p.cones().len());
    let sizes: Vec<String> = p
        .cones()
        .iter()
        .map(|c| match *c {
            Cone::Psd(n) => n.to_string(),
            Cone::Nonneg(n) | Cone::Free(n) => format!("-{n}"),
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let b: Vec<String> = p.rhs().iter().map(|v| fmt_f(*v)).collect();
    let _ = writeln!(out, "{}", b.join(" "));

    let loc = locator(p);
    let line = |mat: usize, var: usize, v: f64, out: &mut String| {
        let (blk, i, j, w) = loc[var];
        let _ = writeln!(out, "{mat} {} {} {} {}", blk + 1, i + 1, j + 1, fmt_f(v * w));
    };
    for (var, &v) in p.objective().iter().enumerate() {
        if v != 0.0 {
            line(0, var, v, &mut out);
        }
    }
    for (r, row) in p.rows().iter().enumerate() {
        for &(var, v) in row {
            line(r + 1, var, v, &mut out);
        }
    }
    out
}

/// For every variable: block, row, column and the factor turning a packed
/// coefficient into a matrix coefficient.
fn locator(p: &ConicProblem) -> Vec<(usize, usize, usize, f64)> {
    let mut loc = Vec::with_capacity(p.num_vars());
    for (k, cone) in p.cones().iter().enumerate() {
        match *cone {
            Cone::Psd(n) => {
                for i in 0..n {
                    for j in i..n {
                        let w = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                        loc.push((k, i, j, w));
                    }
                }
            }
            Cone::Nonneg(n) | Cone::Free(n) => loc.extend((0..n).map(|i| (k, i, i, 1.0))),
        }
    }
    loc
}

/// Parses the output of [`write_dump`].
pub fn read_dump(text: &str) -> Result<ConicProblem> {
    let bad = |msg: &str| Error::Format(format!("conic dump: {msg}"));
    let mut sense = Sense::Minimize;
    let mut free = Vec::new();
    let mut tokens: Vec<&str> = Vec::new();
    for line in text.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix('*') {
            let mut w = rest.split_whitespace();
            match (w.next(), w.next()) {
                (Some("sense"), Some("max")) => sense = Sense::Maximize,
                (Some("sense"), Some("min")) => sense = Sense::Minimize,
                (Some("free"), Some(k)) => free.push(k.parse::<usize>().map_err(|_| bad("free block id"))?),
                _ => {}
            }
            continue;
        }
        tokens.extend(t.split_whitespace());
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| bad(&format!("missing {what}")));
    let m: usize = next("m")?.parse().map_err(|_| bad("m"))?;
    let nb: usize = next("block count")?.parse().map_err(|_| bad("block count"))?;
    let mut cones = Vec::with_capacity(nb);
    for k in 0..nb {
        let s: i64 = next("block size")?.parse().map_err(|_| bad("block size"))?;
        let n = s.unsigned_abs() as usize;
        cones.push(if s > 0 {
            Cone::Psd(n)
        } else if free.contains(&(k + 1)) {
            Cone::Free(n)
        } else {
            Cone::Nonneg(n)
        });
    }
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        b.push(next("b")?.parse::<f64>().map_err(|_| bad("b"))?);
    }
    let mut p = ConicProblem::new(sense, cones.clone());
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    loop {
        let Ok(mat) = next("entry") else { break };
        let mat: usize = mat.parse().map_err(|_| bad("matrix index"))?;
        let blk: usize = next("block")?.parse().map_err(|_| bad("block"))?;
        let i: usize = next("row")?.parse().map_err(|_| bad("row"))?;
        let j: usize = next("col")?.parse().map_err(|_| bad("col"))?;
        let v: f64 = next("value")?.parse().map_err(|_| bad("value"))?;
        if blk == 0 || blk > nb || i == 0 || j == 0 || mat > m {
            return Err(bad("index out of range"));
        }
        let (i, j) = if i <= j { (i - 1, j - 1) } else { (j - 1, i - 1) };
        let (var, coef) = match cones[blk - 1] {
            Cone::Psd(n) => {
                if j >= n {
                    return Err(bad("index out of range"));
                }
                let w = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
                (p.offset(blk - 1) + svec_index(n, i, j), v * w)
            }
            Cone::Nonneg(n) | Cone::Free(n) => {
                if i != j || i >= n {
                    return Err(bad("off-diagonal entry in a diagonal block"));
                }
                (p.offset(blk - 1) + i, v)
            }
        };
        if mat == 0 {
            p.add_objective(var, coef);
        } else {
            rows[mat - 1].push((var, coef));
        }
    }
    for (row, bi) in rows.into_iter().zip(b) {
        p.add_row(row, bi);
    }
    Ok(p)
}

//! Plain-text code tables.
//!
//! ```text
//! # comments run to end of line
//! blockcode
//! l 1            # block length
//! m 2            # codeword count
//! x 4            # |X|
//! y 2 2          # |Y_j| per decoder
//! zt 2 2         # |Z̃_j| per decoder
//! enc 0 1 1 0    # |X|^l codeword indices, lexicographic in the source word
//! dec 1          # decoder number, 1-based; followed by M * |Y_j|^l rows
//! 0              # row m * |Y_j|^l + pack(y): l reconstruction symbols
//! 1
//! 1
//! 0
//! dec 2
//! 0
//! 1
//! 1
//! 0
//! end
//! ```
//!
//! A file may hold any number of codes back to back.

use std::fmt::Write;

use super::BlockCode;
use crate::error::{Error, Result};
use crate::word;

pub fn write_codes(codes: &[BlockCode]) -> String {
    let mut out = String::new();
    for code in codes {
        write_one(&mut out, code);
    }
    out
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_one(out: &mut String, code: &BlockCode) {
    let _ = writeln!(out, "blockcode");
    let _ = writeln!(out, "l {}", code.block_len);
    let _ = writeln!(out, "m {}", code.codewords);
    let _ = writeln!(out, "x {}", code.source_size);
    let _ = writeln!(out, "y {}", join(&code.side_sizes));
    let _ = writeln!(out, "zt {}", join(&code.recon_sizes));
    let _ = writeln!(out, "enc {}", join(&code.enc));
    for (j, table) in code.dec.iter().enumerate() {
        let _ = writeln!(out, "dec {}", j + 1);
        for row in table.chunks(code.block_len) {
            let _ = writeln!(out, "{}", join(row));
        }
    }
    let _ = writeln!(out, "end");
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, line)| {
                (
                    i + 1,
                    line.split('#')
                        .next()
                        .unwrap_or("")
                        .split_whitespace()
                        .collect::<Vec<_>>(),
                )
            })
            .filter(|(_, toks)| !toks.is_empty())
            .collect();
        Self { items, pos: 0 }
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }

    fn next(&mut self) -> Result<(usize, Vec<&'a str>)> {
        match self.items.get(self.pos) {
            Some(item) => {
                self.pos += 1;
                Ok(item.clone())
            }
            None => Err(Error::CodeParse {
                line: self.items.last().map_or(1, |(l, _)| l + 1),
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<usize>)> {
        let (line, toks) = self.next()?;
        if toks[0] != key {
            return Err(Error::CodeParse {
                line,
                message: format!("expected `{key}`, found `{}`", toks[0]),
            });
        }
        Ok((line, numbers(line, &toks[1..])?))
    }
}

fn numbers(line: usize, toks: &[&str]) -> Result<Vec<usize>> {
    toks.iter()
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::CodeParse {
                line,
                message: format!("`{t}` is not a nonnegative integer"),
            })
        })
        .collect()
}

fn single(line: usize, values: &[usize], key: &str) -> Result<usize> {
    match values {
        [v] => Ok(*v),
        _ => Err(Error::CodeParse {
            line,
            message: format!("`{key}` takes exactly one value"),
        }),
    }
}

pub fn parse_codes(text: &str) -> Result<Vec<BlockCode>> {
    let mut lines = Lines::new(text);
    let mut codes = Vec::new();
    while !lines.done() {
        let (line, toks) = lines.next()?;
        if toks != ["blockcode"] {
            return Err(Error::CodeParse {
                line,
                message: "expected `blockcode`".into(),
            });
        }
        let (line, v) = lines.keyed("l")?;
        let l = single(line, &v, "l")?;
        let (line, v) = lines.keyed("m")?;
        let m = single(line, &v, "m")?;
        let (line, v) = lines.keyed("x")?;
        let x = single(line, &v, "x")?;
        let (_, side_sizes) = lines.keyed("y")?;
        let (line, recon_sizes) = lines.keyed("zt")?;
        if side_sizes.len() != recon_sizes.len() || side_sizes.is_empty() {
            return Err(Error::CodeParse {
                line,
                message: "`y` and `zt` must list the same positive number of decoders".into(),
            });
        }
        let (_, enc) = lines.keyed("enc")?;
        let mut dec = Vec::with_capacity(side_sizes.len());
        for (j, &y) in side_sizes.iter().enumerate() {
            let (line, v) = lines.keyed("dec")?;
            if single(line, &v, "dec")? != j + 1 {
                return Err(Error::CodeParse {
                    line,
                    message: format!("expected decoder {}", j + 1),
                });
            }
            let rows = m as u64
                * word::word_count(y, l).map_err(|e| Error::CodeParse {
                    line,
                    message: e.to_string(),
                })?;
            let mut table = Vec::with_capacity(rows as usize * l);
            for _ in 0..rows {
                let (line, toks) = lines.next()?;
                let row = numbers(line, &toks)?;
                if row.len() != l {
                    return Err(Error::CodeParse {
                        line,
                        message: format!("decoder row has {} symbols, expected {l}", row.len()),
                    });
                }
                table.extend(row);
            }
            dec.push(table);
        }
        let (line, toks) = lines.next()?;
        if toks != ["end"] {
            return Err(Error::CodeParse {
                line,
                message: "expected `end`".into(),
            });
        }
        let code = BlockCode::new(l, m, x, side_sizes, recon_sizes, enc, dec).map_err(|e| Error::CodeParse {
            line,
            message: e.to_string(),
        })?;
        codes.push(code);
    }
    Ok(codes)
}

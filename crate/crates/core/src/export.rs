//! Text serialisation of circuits.
//!
//! The gatelist format is line oriented:
//!
//! ```text
//! qubits 3
//! segments 1
//! segment U 2
//! RY t=1 a=0.69999999999999996 c=.01
//! SWAP t=1,3
//! ```
//!
//! Angles use C's `%.17g` so that parsing recovers every bit. The header
//! count of a segment is its number of gate lines.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::circuit::{Circuit, Control, Gate, Kind, Op, SegmentedCircuit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Gatelist,
    /// OpenQASM 3 flavoured listing with `ctrl @` / `negctrl @` modifiers.
    QasmLike,
}

/// Formats like C's `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn gate_line(g: &Gate, n: usize, out: &mut String) {
    if let Some((a, b)) = g.swap_pair() {
        let _ = writeln!(out, "SWAP t={a},{b}");
        return;
    }
    let _ = write!(out, "{} t={}", g.kind().name(), g.target());
    if let Some(a) = g.angle() {
        let _ = write!(out, " a={}", format_g17(a));
    }
    let _ = writeln!(out, " c={}", g.pattern(n));
}

/// Gatelist text of a segmented circuit.
pub fn to_gatelist(c: &SegmentedCircuit) -> String {
    let n = c.n_qubits();
    let mut out = String::new();
    let _ = writeln!(out, "qubits {n}");
    let _ = writeln!(out, "segments {}", c.segments().len());
    for (name, seg) in c.segments() {
        let _ = writeln!(out, "segment {name} {}", seg.len());
        for g in seg.gates() {
            gate_line(g, n, &mut out);
        }
    }
    out
}

fn qasm_angle(a: f64) -> String {
    format_g17(a)
}

/// One instruction per line; qubit `k` of the circuit is `q[k-1]`.
pub fn to_qasm_like(c: &SegmentedCircuit) -> String {
    let n = c.n_qubits();
    let mut out = String::new();
    let _ = writeln!(out, "OPENQASM 3.0;");
    let _ = writeln!(out, "include \"stdgates.inc\";");
    let _ = writeln!(out, "qubit[{n}] q;");
    for (name, seg) in c.segments() {
        let _ = writeln!(out, "// segment {name}");
        for g in seg.gates() {
            if let Some((a, b)) = g.swap_pair() {
                let _ = writeln!(out, "swap q[{}], q[{}];", a - 1, b - 1);
                continue;
            }
            let controls: Vec<(usize, Control)> = (1..=n)
                .map(|k| (k, g.control(k)))
                .filter(|(_, c)| *c != Control::Free)
                .collect();
            let mut line = String::new();
            for (_, c) in &controls {
                line.push_str(if *c == Control::One { "ctrl @ " } else { "negctrl @ " });
            }
            let operands: Vec<String> = controls
                .iter()
                .map(|(k, _)| format!("q[{}]", k - 1))
                .collect();
            match g.op() {
                // a phase on the target's whole space acts on the controls alone
                Op::Phase(a) => {
                    let _ = write!(line, "gphase({})", qasm_angle(a));
                    if !operands.is_empty() {
                        let _ = write!(line, " {}", operands.join(", "));
                    }
                }
                op => {
                    let head = match op {
                        Op::Ry(a) => format!("ry({})", qasm_angle(a)),
                        Op::Rz(a) => format!("rz({})", qasm_angle(a)),
                        Op::Z => "z".to_string(),
                        Op::Phase(_) | Op::Swap(_) => unreachable!(),
                    };
                    let mut all = operands;
                    all.push(format!("q[{}]", g.target() - 1));
                    let _ = write!(line, "{head} {}", all.join(", "));
                }
            }
            let _ = writeln!(out, "{line};");
        }
    }
    out
}

pub fn export(c: &SegmentedCircuit, format: Format) -> String {
    match format {
        Format::Gatelist => to_gatelist(c),
        Format::QasmLike => to_qasm_like(c),
    }
}

/// Writes the serialisation to `path`.
pub fn export_to_file(c: &SegmentedCircuit, format: Format, path: &Path) -> Result<()> {
    let text = export(c, format);
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, l)) => {
                self.last = i + 1;
                Ok((i + 1, l))
            }
            None => Err(Error::parse(self.last + 1, 1, format!("unexpected end of input, expected {what}"))),
        }
    }
}

fn keyword_value<'a>(line: &'a str, lineno: usize, keyword: &str) -> Result<&'a str> {
    line.strip_prefix(keyword)
        .and_then(|r| r.strip_prefix(' '))
        .ok_or_else(|| Error::parse(lineno, 1, format!("expected `{keyword} <value>`")))
}

fn parse_usize(s: &str, lineno: usize, col: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::parse(lineno, col, format!("expected a non-negative integer, found {s:?}")))
}

/// Byte column (1-based) of `part` within `line`.
fn column_of(line: &str, part: &str) -> usize {
    part.as_ptr() as usize - line.as_ptr() as usize + 1
}

fn parse_gate(line: &str, lineno: usize, n: usize) -> Result<Gate> {
    let mut fields = line.split(' ');
    let kind_s = fields.next().unwrap_or("");
    let kind = Kind::from_name(kind_s).ok_or_else(|| Error::parse(lineno, 1, format!("unknown gate kind {kind_s:?}")))?;
    let mut field = |key: &str| -> Result<&str> {
        let f = fields
            .next()
            .ok_or_else(|| Error::parse(lineno, line.len() + 1, format!("missing `{key}=` field")))?;
        f.strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| Error::parse(lineno, column_of(line, f), format!("expected `{key}=`")))
    };
    if kind == Kind::Swap {
        let t = field("t")?;
        let (a, b) = t
            .split_once(',')
            .ok_or_else(|| Error::parse(lineno, column_of(line, t), "SWAP needs `t=<i>,<j>`"))?;
        let a = parse_usize(a, lineno, column_of(line, a))?;
        let b = parse_usize(b, lineno, column_of(line, b))?;
        if a > n || b > n {
            return Err(Error::parse(lineno, column_of(line, t), "qubit index out of range"));
        }
        let g = Gate::swap(a, b).map_err(|e| Error::parse(lineno, column_of(line, t), e.to_string()))?;
        if let Some(extra) = fields.next() {
            return Err(Error::parse(lineno, column_of(line, extra), "unexpected trailing field"));
        }
        return Ok(g);
    }
    let t_s = field("t")?;
    let t = parse_usize(t_s, lineno, column_of(line, t_s))?;
    if t == 0 || t > n {
        return Err(Error::parse(lineno, column_of(line, t_s), "target out of range"));
    }
    let angle = if kind == Kind::Z {
        None
    } else {
        let a_s = field("a")?;
        let a: f64 = a_s
            .parse()
            .map_err(|_| Error::parse(lineno, column_of(line, a_s), format!("invalid angle {a_s:?}")))?;
        Some(a)
    };
    let c_s = field("c")?;
    if let Some(extra) = fields.next() {
        return Err(Error::parse(lineno, column_of(line, extra), "unexpected trailing field"));
    }
    if c_s.chars().count() != n {
        return Err(Error::parse(lineno, column_of(line, c_s), format!("pattern must have {n} characters")));
    }
    let op = match (kind, angle) {
        (Kind::Ry, Some(a)) => Op::Ry(a),
        (Kind::Rz, Some(a)) => Op::Rz(a),
        (Kind::Phase, Some(a)) => Op::Phase(a),
        _ => Op::Z,
    };
    let mut g = Gate::new(op, t)?;
    let col0 = column_of(line, c_s);
    for (k, ch) in c_s.chars().enumerate() {
        let q = k + 1;
        let control = match ch {
            '.' => continue,
            '1' => Control::One,
            '0' => Control::Zero,
            other => return Err(Error::parse(lineno, col0 + k, format!("invalid pattern character {other:?}"))),
        };
        if q == t {
            return Err(Error::parse(lineno, col0 + k, "the target position must be `.`"));
        }
        g = g.with_control(q, control).map_err(|e| Error::parse(lineno, col0 + k, e.to_string()))?;
    }
    Ok(g)
}

/// Parses gatelist text produced by [`to_gatelist`].
pub fn parse_gatelist(text: &str) -> Result<SegmentedCircuit> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (ln, l) = lines.next_line("`qubits <n>`")?;
    let n_s = keyword_value(l, ln, "qubits")?;
    let n = parse_usize(n_s, ln, column_of(l, n_s))?;
    if n == 0 || n > crate::circuit::MAX_QUBITS {
        return Err(Error::parse(ln, column_of(l, n_s), "qubit count out of range"));
    }
    let (ln, l) = lines.next_line("`segments <k>`")?;
    let k_s = keyword_value(l, ln, "segments")?;
    let k = parse_usize(k_s, ln, column_of(l, k_s))?;
    let mut segments = Vec::with_capacity(k);
    for _ in 0..k {
        let (ln, l) = lines.next_line("`segment <name> <count>`")?;
        let rest = keyword_value(l, ln, "segment")?;
        let (name, count_s) = rest
            .split_once(' ')
            .ok_or_else(|| Error::parse(ln, 1, "expected `segment <name> <count>`"))?;
        let count = parse_usize(count_s, ln, column_of(l, count_s))?;
        let mut gates = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, l) = lines.next_line("a gate line")?;
            gates.push(parse_gate(l, ln, n)?);
        }
        let circuit = Circuit::new(n, gates)?;
        segments.push((name.to_string(), circuit));
    }
    if let Some((i, l)) = lines.inner.next() {
        if !l.is_empty() || lines.inner.next().is_some() {
            return Err(Error::parse(i + 1, 1, "unexpected content after the last segment"));
        }
    }
    SegmentedCircuit::new(n, segments)
}

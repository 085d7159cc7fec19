use alloc::vec::Vec;
use core::fmt;

/// Source location of a statement or condition, qualified by the loop
/// iterations it belongs to (outermost first).
///
/// Rendered as `line`, `c:i.line`, or `c1:i1.c2:i2.line` for nested loops.
/// A loop condition renders as `c:i` since its line is the innermost
/// context line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct LocRef {
    pub line: u32,
    /// `(condition line, iteration)` pairs, 1-based iterations.
    pub loops: Vec<(u32, u32)>,
}

impl LocRef {
    pub fn new(line: u32) -> Self {
        LocRef { line, loops: Vec::new() }
    }

    pub fn in_loop(mut self, cond_line: u32, iteration: u32) -> Self {
        self.loops.insert(0, (cond_line, iteration));
        self
    }

    pub fn parse(text: &str) -> Option<LocRef> {
        let mut loops = Vec::new();
        let mut parts = text.split('.').peekable();
        let mut line = None;
        while let Some(part) = parts.next() {
            match part.split_once(':') {
                Some((c, i)) => {
                    let c = c.parse().ok()?;
                    let i = i.parse().ok()?;
                    loops.push((c, i));
                    if parts.peek().is_none() {
                        line = Some(c);
                    }
                }
                None => {
                    if parts.peek().is_some() {
                        return None;
                    }
                    line = Some(part.parse().ok()?);
                }
            }
        }
        let line = line?;
        if line == 0 {
            return None;
        }
        Some(LocRef { line, loops })
    }
}

impl fmt::Display for LocRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, (c, i)) in self.loops.iter().enumerate() {
            if n > 0 {
                f.write_str(".")?;
            }
            write!(f, "{c}:{i}")?;
        }
        match self.loops.last() {
            Some((c, _)) if *c == self.line => Ok(()),
            Some(_) => write!(f, ".{}", self.line),
            None => write!(f, "{}", self.line),
        }
    }
}

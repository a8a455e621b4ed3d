use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>, usize),
}

impl Sexpr {
    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexpr::Atom(a) => Some(a),
            Sexpr::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexpr]> {
        match self {
            Sexpr::List(v, _) => Some(v),
            Sexpr::Atom(_) => None,
        }
    }

    /// Lowercased head symbol of a list.
    pub fn head(&self) -> Option<String> {
        self.list()?.first()?.atom().map(|s| s.to_ascii_lowercase())
    }

    pub fn line(&self) -> usize {
        match self {
            Sexpr::List(_, l) => *l,
            Sexpr::Atom(_) => 0,
        }
    }
}

impl fmt::Display for Sexpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexpr::Atom(a) => f.write_str(a),
            Sexpr::List(v, _) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Parses one top-level form. Returns `(line, message)` on error.
pub fn parse(text: &str) -> Result<Sexpr, (usize, String)> {
    let mut stack: Vec<(Vec<Sexpr>, usize)> = Vec::new();
    let mut done: Option<Sexpr> = None;
    let mut line = 1;
    let mut chars = text.char_indices().peekable();
    let mut push = |x: Sexpr, stack: &mut Vec<(Vec<Sexpr>, usize)>, line: usize| -> Result<(), (usize, String)> {
        match stack.last_mut() {
            Some((v, _)) => v.push(x),
            None if done.is_none() => done = Some(x),
            None => return Err((line, "unexpected content after the top-level form".into())),
        }
        Ok(())
    };
    while let Some((i, c)) = chars.next() {
        match c {
            '\n' => line += 1,
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => stack.push((Vec::new(), line)),
            ')' => {
                let (v, l) = stack.pop().ok_or((line, "unbalanced `)`".to_string()))?;
                push(Sexpr::List(v, l), &mut stack, line)?;
            }
            c if c.is_whitespace() => {}
            _ => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                push(Sexpr::Atom(text[i..end].to_string()), &mut stack, line)?;
            }
        }
    }
    if let Some((_, l)) = stack.last() {
        return Err((*l, "unclosed `(`".into()));
    }
    done.ok_or((line, "empty input".into()))
}

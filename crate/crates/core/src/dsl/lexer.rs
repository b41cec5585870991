//! Per-line tokenizer. `#` starts a comment outside string literals.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Arrow,
    Comma,
    Eq,
    Colon,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Arrow => "`->`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Colon => "`:`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    /// 1-based, in characters.
    pub col: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c == '.' || c == '-'
}

/// Whether `s` prints as a single identifier token.
pub fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) && !s.contains("->")
}

/// Tokenizes one line. Errors carry the 1-based column.
pub(crate) fn tokenize(line: &str) -> Result<Vec<Token>, (usize, String)> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            ',' => {
                out.push(Token { tok: Tok::Comma, col });
                i += 1;
            }
            '=' => {
                out.push(Token { tok: Tok::Eq, col });
                i += 1;
            }
            ':' => {
                out.push(Token { tok: Tok::Colon, col });
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Token { tok: Tok::Arrow, col });
                i += 2;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err((col, "unterminated string literal".into())),
                        Some('"') => {
                            i += 1;
                            break;
                        }
                        Some('\\') => {
                            let esc = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('r') => '\r',
                                Some(other) => return Err((i + 1, format!("unknown escape `\\{other}`"))),
                                None => return Err((col, "unterminated string literal".into())),
                            };
                            s.push(esc);
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(s), col });
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                while let Some(&ch) = chars.get(i) {
                    if !is_ident_char(ch) || (ch == '-' && chars.get(i + 1) == Some(&'>')) {
                        break;
                    }
                    s.push(ch);
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(s), col });
            }
            other => return Err((col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

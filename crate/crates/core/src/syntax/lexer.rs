use super::{Diagnostic, Loc};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Num(usize),
    Str(String),
    Char(char),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Arrow,
    Bar,
    Concat,
    Caret,
    Dot,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Char(c) => format!("character {c:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Concat => "`++`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

pub(crate) fn tokenize(text: &str, origin: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| Diagnostic {
        origin: origin.into(),
        line,
        col,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc { line, col };
        let mut advance = 1;
        let tok = match c {
            '\n' => {
                out.push(Token { tok: Tok::Newline, loc });
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '^' => Some(Tok::Caret),
            '.' => Some(Tok::Dot),
            '|' => Some(Tok::Bar),
            '-' if chars.get(i + 1) == Some(&'>') => {
                advance = 2;
                Some(Tok::Arrow)
            }
            '+' if chars.get(i + 1) == Some(&'+') => {
                advance = 2;
                Some(Tok::Concat)
            }
            '→' => Some(Tok::Arrow),
            '"' => {
                let mut j = i + 1;
                let mut s = String::new();
                loop {
                    match chars.get(j) {
                        None | Some('\n') => {
                            return Err(err(line, col, "unterminated string literal".into()))
                        }
                        Some('"') => break,
                        Some('\\') => {
                            let escaped = chars
                                .get(j + 1)
                                .and_then(|&e| unescape(e))
                                .ok_or_else(|| err(line, col, "bad escape in string literal".into()))?;
                            s.push(escaped);
                            j += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                advance = j + 1 - i;
                Some(Tok::Str(s))
            }
            '\'' => {
                let (ch, len) = match (chars.get(i + 1), chars.get(i + 2)) {
                    (Some('\\'), Some(&e)) => (
                        unescape(e).ok_or_else(|| err(line, col, "bad escape in character literal".into()))?,
                        2,
                    ),
                    (Some(&ch), _) if ch != '\'' && ch != '\n' => (ch, 1),
                    _ => return Err(err(line, col, "bad character literal".into())),
                };
                if chars.get(i + 1 + len) != Some(&'\'') {
                    return Err(err(line, col, "unterminated character literal".into()));
                }
                advance = len + 2;
                Some(Tok::Char(ch))
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits
                    .parse::<usize>()
                    .map_err(|_| err(line, col, format!("numeral `{digits}` is too large")))?;
                advance = j - i;
                Some(Tok::Num(n))
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                advance = j - i;
                if c.is_uppercase() || c == '_' {
                    Some(Tok::Var(word))
                } else {
                    Some(Tok::Ident(word))
                }
            }
            other => return Err(err(line, col, format!("unexpected character {other:?}"))),
        };
        if let Some(tok) = tok {
            out.push(Token { tok, loc });
        }
        i += advance;
        col += advance;
    }
    out.push(Token {
        tok: Tok::Eof,
        loc: Loc { line, col },
    });
    Ok(out)
}

fn unescape(c: char) -> Option<char> {
    match c {
        'n' => Some('\n'),
        't' => Some('\t'),
        '\\' => Some('\\'),
        '\'' => Some('\''),
        '"' => Some('"'),
        _ => None,
    }
}

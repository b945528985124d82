use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    Op(String),
    KwSymbol,
    KwRule,
    KwInfix,
    Type,
    Underscore,
    LParen,
    RParen,
    Bang,
    Backslash,
    Comma,
    Colon,
    ColonEq,
    Dot,
    Arrow,
    RuleArrow,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn is_op_char(c: char) -> bool {
    "+-*/<>=~&|@#$%^?".contains(c)
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |i: &mut usize, col: &mut usize| {
            *i += 1;
            *col += 1;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            bump(&mut i, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut col);
            }
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '!' => Some(Tok::Bang),
            '\\' => Some(Tok::Backslash),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = single {
            bump(&mut i, &mut col);
            toks.push(Token { tok, line: tl, col: tc });
            continue;
        }
        if c == '"' {
            bump(&mut i, &mut col);
            let start = i;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                bump(&mut i, &mut col);
            }
            if i >= chars.len() || chars[i] != '"' {
                return Err(ParseError { line: tl, col: tc, msg: "unterminated string".into() });
            }
            let s: String = chars[start..i].iter().collect();
            bump(&mut i, &mut col);
            toks.push(Token { tok: Tok::Str(s), line: tl, col: tc });
            continue;
        }
        if c == ':' {
            if chars.get(i + 1) == Some(&'=') {
                i += 2;
                col += 2;
                toks.push(Token { tok: Tok::ColonEq, line: tl, col: tc });
            } else {
                bump(&mut i, &mut col);
                toks.push(Token { tok: Tok::Colon, line: tl, col: tc });
            }
            continue;
        }
        if is_op_char(c) {
            let start = i;
            // A run of operator characters, stopping before any `//` so a
            // trailing comment never glues onto an operator.
            while i < chars.len()
                && is_op_char(chars[i])
                && !(chars[i] == '/' && chars.get(i + 1) == Some(&'/'))
            {
                bump(&mut i, &mut col);
            }
            let run: String = chars[start..i].iter().collect();
            let tok = match run.as_str() {
                "->" => Tok::Arrow,
                "-->" => Tok::RuleArrow,
                _ => Tok::Op(run),
            };
            toks.push(Token { tok, line: tl, col: tc });
            continue;
        }
        if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                bump(&mut i, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match word.as_str() {
                "symbol" => Tok::KwSymbol,
                "rule" => Tok::KwRule,
                "infix" => Tok::KwInfix,
                "TYPE" => Tok::Type,
                "_" => Tok::Underscore,
                _ => Tok::Ident(word),
            };
            toks.push(Token { tok, line: tl, col: tc });
            continue;
        }
        return Err(ParseError {
            line: tl,
            col: tc,
            msg: format!("unexpected character '{c}'"),
        });
    }
    Ok(toks)
}

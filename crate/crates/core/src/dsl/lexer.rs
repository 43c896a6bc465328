use super::error::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Meta(String),
    Int(u64),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Meta(s) => format!("?{s}"),
            Tok::Int(n) => n.to_string(),
            Tok::Sym(s) => (*s).to_owned(),
            Tok::Eof => "end of input".to_owned(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const SYMBOLS: [&str; 20] = [
    "<-", "|>", ";", ",", "{", "}", "(", ")", "[", "]", "^", "=", ":", "/", "&", "*", "+", "-", "?", ".",
];

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize| {
        for &b in &bytes[*i..*i + n] {
            if b == b'\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        }
        *i += n;
    };
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if b == b'#' {
            let end = src[i..].find('\n').map_or(bytes.len(), |k| i + k);
            let n = end - i;
            advance(&mut i, &mut line, &mut col, n);
            continue;
        }
        let start = i;
        let span_to = |end: usize| SourceSpan {
            start,
            end,
            line,
            column: col,
        };
        let ident_len = |from: usize| {
            bytes[from..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == b'_')
                .count()
        };
        let (tok, len) = if b.is_ascii_alphabetic() || b == b'_' {
            let n = ident_len(i);
            (Tok::Ident(src[i..i + n].to_owned()), n)
        } else if b.is_ascii_digit() {
            let n = bytes[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            match src[i..i + n].parse::<u64>() {
                Ok(v) => (Tok::Int(v), n),
                Err(_) => {
                    return Err(ParseError::new(span_to(i + n), &["integer below 2^64"], &src[i..i + n]));
                }
            }
        } else if b == b'?' && bytes.get(i + 1).is_some_and(|c| c.is_ascii_alphabetic() || *c == b'_') {
            let n = ident_len(i + 1);
            (Tok::Meta(src[i + 1..i + 1 + n].to_owned()), n + 1)
        } else if let Some(s) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            (Tok::Sym(s), s.len())
        } else {
            let ch = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError::new(span_to(i + ch.len_utf8()), &["token"], &ch.to_string()));
        };
        out.push(Token {
            tok,
            span: span_to(i + len),
        });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan {
            start: src.len(),
            end: src.len(),
            line,
            column: col,
        },
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_lines_and_columns() {
        let toks = tokenize("has^3 T(x);\n  # note\n  reset;").unwrap();
        let reset = toks.iter().find(|t| t.tok == Tok::Ident("reset".into())).unwrap();
        assert_eq!((reset.span.line, reset.span.column), (3, 3));
        assert_eq!(toks.last().unwrap().tok, Tok::Eof);
    }

    #[test]
    fn metavariables_and_arrows() {
        let toks: Vec<Tok> = tokenize("?x |> <-").unwrap().into_iter().map(|t| t.tok).collect();
        assert_eq!(toks, vec![Tok::Meta("x".into()), Tok::Sym("|>"), Tok::Sym("<-"), Tok::Eof]);
    }

    #[test]
    fn rejects_non_ascii() {
        let e = tokenize("has µ").unwrap_err();
        assert_eq!(e.span.start, 4);
    }
}

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    /// `<...>` with escapes decoded, not yet resolved.
    Iri(String),
    PName {
        prefix: String,
        local: String,
    },
    Var(String),
    BlankLabel(String),
    /// String literal body with escapes decoded.
    Str(String),
    LangTag(String),
    Integer(String),
    Decimal(String),
    Double(String),
    /// Bare word: keyword, function name, `a`, `true`/`false`.
    Word(String),
    Punct(&'static str),
}

impl Tok {
    pub fn is_word(&self, kw: &str) -> bool {
        matches!(self, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self, Tok::Punct(q) if *q == p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    /// Byte offsets into the source.
    pub start: usize,
    pub end: usize,
}

const PUNCT: &[&str] = &[
    "^^", "&&", "||", "<=", ">=", "!=", "{", "}", "(", ")", "[", "]", ".", ";", ",", "*", "=", "<", ">", "!", "+", "-",
    "/", "|", "^", "?",
];

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    Lexer { src: text, pos: 0, line: 1, column: 1 }.run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.rest().chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { line: self.line, column: self.column, message: message.into() })
    }

    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { return Ok(out) };
            let (line, column, start) = (self.line, self.column, self.pos);
            let tok = match c {
                '<' => match self.try_iri() {
                    Some(iri) => Tok::Iri(iri?),
                    None => self.punct(),
                },
                '?' | '$' if self.peek2().is_some_and(is_varname_char) => {
                    self.bump();
                    Tok::Var(self.take_while(is_varname_char).to_owned())
                }
                '"' | '\'' => Tok::Str(self.string()?),
                '@' => {
                    self.bump();
                    let tag = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                    if tag.is_empty() {
                        return self.err("empty language tag");
                    }
                    Tok::LangTag(tag.to_ascii_lowercase())
                }
                '_' if self.peek2() == Some(':') => {
                    self.bump();
                    self.bump();
                    let label = self.take_name_chars();
                    if label.is_empty() {
                        return self.err("empty blank node label");
                    }
                    Tok::BlankLabel(label)
                }
                c if c.is_ascii_digit() => self.number(),
                '.' if self.peek2().is_some_and(|c| c.is_ascii_digit()) => self.number(),
                ':' => {
                    self.bump();
                    Tok::PName { prefix: String::new(), local: self.take_name_chars() }
                }
                c if c.is_alphabetic() || c == '_' => {
                    let word = self.take_while(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.');
                    let mut word = word.to_owned();
                    // a trailing '.' ends a statement, it is not part of the name
                    while word.ends_with('.') {
                        word.pop();
                        self.pos -= 1;
                        self.column -= 1;
                    }
                    if self.peek() == Some(':') {
                        self.bump();
                        Tok::PName { prefix: word, local: self.take_name_chars() }
                    } else {
                        Tok::Word(word)
                    }
                }
                _ => self.punct(),
            };
            if let Tok::Punct("") = tok {
                return self.err(format!("unexpected character '{c}'"));
            }
            out.push(Token { tok, line, column, start, end: self.pos });
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.src[start..self.pos]
    }

    /// Local part of a prefixed name (or a blank node label): name chars,
    /// inner dots, `%XX` and `\`-escapes.
    fn take_name_chars(&mut self) -> String {
        let mut out = String::new();
        loop {
            match self.peek() {
                Some(c) if c.is_alphanumeric() || c == '_' || c == '-' || c == ':' || c == '\u{B7}' => {
                    out.push(c);
                    self.bump();
                }
                Some('%') => {
                    out.push('%');
                    self.bump();
                }
                Some('\\') if self.peek2().is_some_and(|c| "_~.-!$&'()*+,;=/?#@%".contains(c)) => {
                    self.bump();
                    out.push(self.bump().unwrap());
                }
                Some('.') if self.peek2().is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == ':') => {
                    out.push('.');
                    self.bump();
                }
                _ => return out,
            }
        }
    }

    fn punct(&mut self) -> Tok {
        for p in PUNCT {
            if self.rest().starts_with(p) {
                for _ in 0..p.len() {
                    self.bump();
                }
                return Tok::Punct(p);
            }
        }
        Tok::Punct("")
    }

    /// Attempts an IRIREF at the cursor. `None` means `<` is an operator.
    fn try_iri(&mut self) -> Option<Result<String, ParseError>> {
        let rest = self.rest();
        let mut end = None;
        for (i, c) in rest.char_indices().skip(1) {
            match c {
                '>' => {
                    end = Some(i);
                    break;
                }
                c if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '`') => return None,
                _ => {}
            }
        }
        let end = end?;
        let raw = &rest[1..end];
        let decoded = match decode_iri_escapes(raw) {
            Ok(s) => s,
            Err(msg) => return Some(self.err(msg)),
        };
        for _ in 0..rest[..=end].chars().count() {
            self.bump();
        }
        Some(Ok(decoded))
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let quote = self.bump().unwrap();
        let long = self.peek() == Some(quote) && self.peek2() == Some(quote);
        if long {
            self.bump();
            self.bump();
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return self.err("unterminated string"),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek2() == Some(quote) {
                        self.bump();
                        self.bump();
                        while self.peek() == Some(quote) {
                            out.push(quote);
                            self.bump();
                        }
                        return Ok(out);
                    }
                    out.push(c);
                }
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        _ => return self.err("invalid string escape"),
                    };
                    out.push(c);
                }
                Some('\n') | Some('\r') if !long => return self.err("newline in string"),
                Some(c) => out.push(c),
            }
        }
    }

    fn hex(&mut self, n: usize) -> Result<char, ParseError> {
        let mut code = 0;
        for _ in 0..n {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => code = code * 16 + d,
                None => return self.err("invalid hex escape"),
            }
        }
        char::from_u32(code).map_or_else(|| self.err("invalid code point"), Ok)
    }

    fn number(&mut self) -> Tok {
        let start = self.pos;
        self.take_while(|c| c.is_ascii_digit());
        let mut decimal = false;
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            self.take_while(|c| c.is_ascii_digit());
            decimal = true;
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let save = (self.pos, self.line, self.column);
            self.bump();
            if matches!(self.peek(), Some('+' | '-')) {
                self.bump();
            }
            if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                (self.pos, self.line, self.column) = save;
            } else {
                return Tok::Double(self.src[start..self.pos].to_owned());
            }
        }
        let text = self.src[start..self.pos].to_owned();
        if decimal {
            Tok::Decimal(text)
        } else {
            Tok::Integer(text)
        }
    }
}

fn is_varname_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\u{B7}'
}

fn decode_iri_escapes(raw: &str) -> Result<String, String> {
    if !raw.contains('\\') {
        return Ok(raw.to_owned());
    }
    let mut out = String::new();
    let mut chars = raw.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        let n = match chars.next() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err("invalid escape in IRI".into()),
        };
        let hex: String = chars.by_ref().take(n).collect();
        let code = u32::from_str_radix(&hex, 16).map_err(|_| "invalid hex escape in IRI")?;
        out.push(char::from_u32(code).ok_or("invalid code point in IRI")?);
    }
    Ok(out)
}

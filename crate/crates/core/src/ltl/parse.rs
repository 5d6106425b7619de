use std::iter::Peekable;
use std::str::{CharIndices, FromStr};

use thiserror::Error;

use super::formula::{BinaryOp, Formula, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty formula")]
    Empty,
    #[error("invalid variable {ch:?} at position {pos}: variables must be in a..z")]
    InvalidVariable { pos: usize, ch: char },
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Var(Var),
    True,
    False,
    Unary(UnaryOp),
    Binary(BinaryOp),
    Open,
    Close,
}

struct Lexer<'a> {
    chars: Peekable<CharIndices<'a>>,
    end: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.char_indices().peekable(), end: text.len() }
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        while let Some(&(_, c)) = self.chars.peek() {
            if !c.is_whitespace() {
                break;
            }
            self.chars.next();
        }
        let Some((pos, c)) = self.chars.next() else {
            return Ok(None);
        };
        let token = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            '1' => Token::True,
            'N' => Token::False,
            c if c.is_ascii_lowercase() => Token::Var(Var::from_char(c).unwrap()),
            c => {
                if let Some(op) = UnaryOp::from_symbol(c) {
                    Token::Unary(op)
                } else if let Some(op) = BinaryOp::from_symbol(c) {
                    Token::Binary(op)
                } else if c.is_alphabetic() {
                    return Err(ParseError::InvalidVariable { pos, ch: c });
                } else {
                    return Err(ParseError::Syntax { pos, message: format!("unexpected character {c:?}") });
                }
            }
        };
        Ok(Some((pos, token)))
    }
}

/// Recursive-descent parser. Grammar, loosest binding first:
///
/// ```text
/// boolean  := temporal (('&' | '|') boolean)?
/// temporal := unary (('U' | 'R' | 'W' | 'M') temporal)?
/// unary    := ('!' | 'G' | 'F' | 'X') unary | atom
/// atom     := a..z | '1' | 'N' | '(' boolean ')'
/// ```
struct Parser<'a> {
    lexer: Lexer<'a>,
    lookahead: Option<(usize, Token)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(text);
        let lookahead = lexer.next_token()?;
        Ok(Parser { lexer, lookahead })
    }

    fn advance(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        let current = self.lookahead.take();
        self.lookahead = self.lexer.next_token()?;
        Ok(current)
    }

    fn end_pos(&self) -> usize {
        self.lookahead.map_or(self.lexer.end, |(pos, _)| pos)
    }

    fn boolean(&mut self) -> Result<Formula, ParseError> {
        let left = self.temporal()?;
        match self.lookahead {
            Some((_, Token::Binary(op))) if op.precedence() == 1 => {
                self.advance()?;
                Ok(Formula::binary(op, left, self.boolean()?))
            }
            _ => Ok(left),
        }
    }

    fn temporal(&mut self) -> Result<Formula, ParseError> {
        let left = self.unary()?;
        match self.lookahead {
            Some((_, Token::Binary(op))) if op.precedence() == 2 => {
                self.advance()?;
                Ok(Formula::binary(op, left, self.temporal()?))
            }
            _ => Ok(left),
        }
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if let Some((_, Token::Unary(op))) = self.lookahead {
            self.advance()?;
            return Ok(Formula::unary(op, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.end_pos();
        match self.advance()? {
            Some((_, Token::Var(v))) => Ok(Formula::Var(v)),
            Some((_, Token::True)) => Ok(Formula::True),
            Some((_, Token::False)) => Ok(Formula::False),
            Some((_, Token::Open)) => {
                let inner = self.boolean()?;
                match self.advance()? {
                    Some((_, Token::Close)) => Ok(inner),
                    _ => Err(ParseError::Syntax { pos: self.end_pos(), message: "expected ')'".into() }),
                }
            }
            Some((_, token)) => Err(ParseError::Syntax { pos, message: format!("unexpected {token:?}") }),
            None => Err(ParseError::Syntax { pos, message: "unexpected end of formula".into() }),
        }
    }
}

/// Parses the textual LTL syntax: variables `a`..`z`, constants `1` and `N`,
/// unary `! G F X`, binary `U R W M & |`, parentheses. All binary operators
/// are right-associative.
pub fn parse_ltl(text: &str) -> Result<Formula, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut parser = Parser::new(text)?;
    let formula = parser.boolean()?;
    if let Some((pos, token)) = parser.lookahead {
        return Err(ParseError::Syntax { pos, message: format!("trailing {token:?}") });
    }
    Ok(formula)
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ltl(s)
    }
}

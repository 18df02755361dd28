//! Theory-file and formula parsing.
//!
//! Theory files are sequences of period-terminated declarations: sorts,
//! subsorts, operators (with `ctor`, `pred`, `assoc`, `comm`, `id:`, `prec`
//! attributes), variable blocks, rules `rl lhs => rhs .`, negative patterns
//! `npattern atom =/= tt [if w =/= w' /\ ...] .`, finiteness annotations,
//! and `convergent .`.
//!
//! Terms use prefix application plus declared infix/postfix templates
//! (`_+_`, `_,_`, `_:Nat`). A glued `name:Sort` token is an inline variable;
//! a spaced `term :Sort` applies a postfix operator. Inside a prefix
//! argument list the comma separates arguments, so comma-headed operators
//! must be parenthesized there.

use std::collections::BTreeMap;

use crate::error::{Diagnostic, LoadError};
use crate::formula::QfFormula;
use crate::signature::{AxiomClass, Role, Signature, SortId, SymbolDecl, SymbolId};
use crate::term::Term;
use crate::theory::{RawTheory, Theory};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Sym(String),
    /// Glued `name:Sort` inline variable.
    VarColon(String, String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Dot,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Word(s) | Tok::Sym(s) => s.clone(),
            Tok::VarColon(n, s) => format!("{}:{}", n, s),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::LBracket => "[".into(),
            Tok::RBracket => "]".into(),
            Tok::Dot => ".".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    col: usize,
}

const MULTI_SYMS: [&str; 7] = ["=/=", "<=>", "->", "=>", "<=", "/\\", "\\/"];

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '\''
}

fn lex(text: &str) -> Result<Vec<Lexed>, Diagnostic> {
    let mut out: Vec<Lexed> = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && i + 1 < chars.len() && chars[i + 1] == '/' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        if is_word_char(c) {
            let start = i;
            while i < chars.len() && is_word_char(chars[i]) {
                i += 1;
                col += 1;
            }
            let word: String = chars[start..i].iter().collect();
            // glued name:Sort inline variable
            if i < chars.len() && chars[i] == ':' && i + 1 < chars.len() && is_word_char(chars[i + 1])
            {
                i += 1;
                col += 1;
                let sstart = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                    col += 1;
                }
                let sort: String = chars[sstart..i].iter().collect();
                out.push(Lexed { tok: Tok::VarColon(word, sort), line: tline, col: tcol });
            } else {
                out.push(Lexed { tok: Tok::Word(word), line: tline, col: tcol });
            }
            continue;
        }
        match c {
            '(' => {
                out.push(Lexed { tok: Tok::LParen, line: tline, col: tcol });
                i += 1;
                col += 1;
            }
            ')' => {
                out.push(Lexed { tok: Tok::RParen, line: tline, col: tcol });
                i += 1;
                col += 1;
            }
            '[' => {
                out.push(Lexed { tok: Tok::LBracket, line: tline, col: tcol });
                i += 1;
                col += 1;
            }
            ']' => {
                out.push(Lexed { tok: Tok::RBracket, line: tline, col: tcol });
                i += 1;
                col += 1;
            }
            '.' => {
                out.push(Lexed { tok: Tok::Dot, line: tline, col: tcol });
                i += 1;
                col += 1;
            }
            _ => {
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                let mut matched = None;
                for m in MULTI_SYMS {
                    if rest.starts_with(m) {
                        matched = Some(m);
                        break;
                    }
                }
                match matched {
                    Some(m) => {
                        out.push(Lexed { tok: Tok::Sym(m.to_string()), line: tline, col: tcol });
                        i += m.len();
                        col += m.len();
                    }
                    None => {
                        out.push(Lexed { tok: Tok::Sym(c.to_string()), line: tline, col: tcol });
                        i += 1;
                        col += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// theory files
// ---------------------------------------------------------------------

struct RawOp {
    name: String,
    arg_sorts: Vec<String>,
    result: String,
    ctor: bool,
    pred: bool,
    assoc: bool,
    comm: bool,
    identity: Option<String>,
    prec: Option<u32>,
    line: usize,
}

pub fn parse_theory(text: &str) -> Result<RawTheory, LoadError> {
    let toks = lex(text).map_err(LoadError::one)?;
    // split on periods
    let mut statements: Vec<Vec<Lexed>> = Vec::new();
    let mut cur: Vec<Lexed> = Vec::new();
    for t in toks {
        if t.tok == Tok::Dot {
            if !cur.is_empty() {
                statements.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(t);
        }
    }
    if !cur.is_empty() {
        return Err(LoadError::one(Diagnostic::at(
            "missing-period",
            "declaration is not terminated by `.`",
            cur[0].line,
            cur[0].col,
        )));
    }
    if statements.is_empty() {
        return Err(LoadError::one(Diagnostic::new("empty-theory", "no sorts declared")));
    }

    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut sort_names: Vec<(String, usize)> = Vec::new();
    let mut subsorts: Vec<(String, String, usize)> = Vec::new();
    let mut raw_ops: Vec<RawOp> = Vec::new();
    let mut var_decls: Vec<(Vec<String>, String, usize)> = Vec::new();
    let mut rule_stmts: Vec<(Option<String>, Vec<Lexed>, Vec<Lexed>)> = Vec::new();
    let mut pattern_stmts: Vec<(Vec<Lexed>, Vec<(Vec<Lexed>, Vec<Lexed>)>)> = Vec::new();
    let mut convergent = false;
    let mut finite_ann: Vec<(String, bool, usize)> = Vec::new();

    for stmt in &statements {
        let head = &stmt[0];
        let keyword = match &head.tok {
            Tok::Word(w) => w.clone(),
            _ => {
                diags.push(Diagnostic::at(
                    "bad-declaration",
                    format!("expected a declaration keyword, found `{}`", head.tok.text()),
                    head.line,
                    head.col,
                ));
                continue;
            }
        };
        let rest = &stmt[1..];
        match keyword.as_str() {
            "sorts" | "sort" => {
                if rest.is_empty() {
                    diags.push(Diagnostic::at("bad-sorts", "no sort names given", head.line, head.col));
                }
                for t in rest {
                    match &t.tok {
                        Tok::Word(w) => sort_names.push((w.clone(), t.line)),
                        _ => diags.push(Diagnostic::at(
                            "bad-sorts",
                            format!("`{}` is not a sort name", t.tok.text()),
                            t.line,
                            t.col,
                        )),
                    }
                }
            }
            "subsort" | "subsorts" => {
                // A < B [< C]*
                let mut names: Vec<String> = Vec::new();
                let mut expect_name = true;
                let mut ok = true;
                for t in rest {
                    match (&t.tok, expect_name) {
                        (Tok::Word(w), true) => {
                            names.push(w.clone());
                            expect_name = false;
                        }
                        (Tok::Sym(s), false) if s == "<" => expect_name = true,
                        _ => {
                            diags.push(Diagnostic::at(
                                "bad-subsort",
                                "expected `Sort < Sort [< Sort ...]`",
                                t.line,
                                t.col,
                            ));
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && (names.len() < 2 || expect_name) {
                    diags.push(Diagnostic::at("bad-subsort", "expected `Sort < Sort`", head.line, head.col));
                    ok = false;
                }
                if ok {
                    for pair in names.windows(2) {
                        subsorts.push((pair[0].clone(), pair[1].clone(), head.line));
                    }
                }
            }
            "op" => match parse_op(rest, head.line) {
                Ok(op) => raw_ops.push(op),
                Err(d) => diags.push(d),
            },
            "var" | "vars" => {
                // names : Sort
                let colon = rest.iter().position(|t| t.tok == Tok::Sym(":".into()));
                match colon {
                    Some(ci) if ci > 0 && ci + 1 == rest.len() - 1 => {
                        let mut names = Vec::new();
                        let mut ok = true;
                        for t in &rest[..ci] {
                            match &t.tok {
                                Tok::Word(w) => names.push(w.clone()),
                                _ => {
                                    diags.push(Diagnostic::at(
                                        "bad-var",
                                        "variable names must be identifiers",
                                        t.line,
                                        t.col,
                                    ));
                                    ok = false;
                                }
                            }
                        }
                        let sort = match &rest[ci + 1].tok {
                            Tok::Word(w) => w.clone(),
                            _ => {
                                diags.push(Diagnostic::at(
                                    "bad-var",
                                    "expected a sort name after `:`",
                                    rest[ci + 1].line,
                                    rest[ci + 1].col,
                                ));
                                ok = false;
                                String::new()
                            }
                        };
                        if ok {
                            var_decls.push((names, sort, head.line));
                        }
                    }
                    _ => diags.push(Diagnostic::at(
                        "bad-var",
                        "expected `var Name ... : Sort .`",
                        head.line,
                        head.col,
                    )),
                }
            }
            "rl" => {
                let mut body = rest;
                let mut label = None;
                // optional [label] :
                if body.first().map(|t| &t.tok) == Some(&Tok::LBracket) {
                    if body.len() >= 4
                        && matches!(body[1].tok, Tok::Word(_))
                        && body[2].tok == Tok::RBracket
                        && body[3].tok == Tok::Sym(":".into())
                    {
                        if let Tok::Word(w) = &body[1].tok {
                            label = Some(w.clone());
                        }
                        body = &body[4..];
                    } else {
                        diags.push(Diagnostic::at("bad-rule", "malformed rule label", head.line, head.col));
                        continue;
                    }
                }
                let arrow = body.iter().position(|t| t.tok == Tok::Sym("=>".into()));
                match arrow {
                    Some(ai) if ai > 0 && ai < body.len() - 1 => {
                        rule_stmts.push((label, body[..ai].to_vec(), body[ai + 1..].to_vec()));
                    }
                    _ => diags.push(Diagnostic::at(
                        "bad-rule",
                        "expected `rl lhs => rhs .`",
                        head.line,
                        head.col,
                    )),
                }
            }
            "npattern" => {
                let if_pos = rest.iter().position(|t| t.tok == Tok::Word("if".into()));
                let (head_toks, constraint_toks) = match if_pos {
                    Some(i) => (&rest[..i], Some(&rest[i + 1..])),
                    None => (rest, None),
                };
                let mut constraints: Vec<(Vec<Lexed>, Vec<Lexed>)> = Vec::new();
                let mut ok = true;
                if let Some(ct) = constraint_toks {
                    for part in split_on(ct, &Tok::Sym("/\\".into())) {
                        match split_once_depth0(&part, &Tok::Sym("=/=".into())) {
                            Some((l, r)) => constraints.push((l, r)),
                            None => {
                                diags.push(Diagnostic::at(
                                    "bad-pattern",
                                    "pattern constraint must be `term =/= term`",
                                    head.line,
                                    head.col,
                                ));
                                ok = false;
                            }
                        }
                    }
                }
                if ok {
                    pattern_stmts.push((head_toks.to_vec(), constraints));
                }
            }
            "convergent" => {
                if !rest.is_empty() {
                    diags.push(Diagnostic::at("bad-annotation", "`convergent .` takes no arguments", head.line, head.col));
                }
                convergent = true;
            }
            "finite" | "infinite" => {
                // finite sort S .
                if rest.len() == 2
                    && rest[0].tok == Tok::Word("sort".into())
                {
                    if let Tok::Word(w) = &rest[1].tok {
                        finite_ann.push((w.clone(), keyword == "finite", head.line));
                        continue;
                    }
                }
                diags.push(Diagnostic::at(
                    "bad-annotation",
                    format!("expected `{} sort S .`", keyword),
                    head.line,
                    head.col,
                ));
            }
            other => diags.push(Diagnostic::at(
                "unknown-declaration",
                format!("unknown declaration `{}`", other),
                head.line,
                head.col,
            )),
        }
    }

    if sort_names.is_empty() {
        diags.push(Diagnostic::new("empty-theory", "no sorts declared"));
    }
    if !diags.is_empty() {
        return Err(LoadError { diagnostics: diags });
    }

    // build the signature
    let mut sig = Signature::new();
    for (name, _) in &sort_names {
        sig.add_sort(name);
    }
    for (lo, hi, line) in &subsorts {
        let l = sig.sort_by_name(lo);
        let h = sig.sort_by_name(hi);
        match (l, h) {
            (Some(l), Some(h)) => sig.add_subsort(l, h),
            _ => {
                let missing = if l.is_none() { lo } else { hi };
                diags.push(Diagnostic::at(
                    "unknown-sort",
                    format!("subsort declaration names unknown sort `{}`", missing),
                    *line,
                    1,
                ));
            }
        }
    }
    if !diags.is_empty() {
        return Err(LoadError { diagnostics: diags });
    }
    sig.close_subsorts().map_err(LoadError::one)?;

    for (i, op) in raw_ops.iter().enumerate() {
        let mut arg_ids = Vec::new();
        let mut bad = false;
        for a in &op.arg_sorts {
            match sig.sort_by_name(a) {
                Some(s) => arg_ids.push(s),
                None => {
                    diags.push(Diagnostic::at(
                        "unknown-sort",
                        format!("operator `{}` uses unknown sort `{}`", op.name, a),
                        op.line,
                        1,
                    ));
                    bad = true;
                }
            }
        }
        let result = match sig.sort_by_name(&op.result) {
            Some(s) => s,
            None => {
                diags.push(Diagnostic::at(
                    "unknown-sort",
                    format!("operator `{}` uses unknown sort `{}`", op.name, op.result),
                    op.line,
                    1,
                ));
                bad = true;
                SortId(0)
            }
        };
        if bad {
            continue;
        }
        let class = match (op.assoc, op.comm, &op.identity) {
            (false, false, None) => AxiomClass::Free,
            (false, true, None) => AxiomClass::Comm,
            (true, true, None) => AxiomClass::AssocComm,
            (true, true, Some(idname)) => {
                match raw_ops.iter().position(|o| &o.name == idname) {
                    Some(j) if raw_ops[j].arg_sorts.is_empty() => {
                        AxiomClass::AssocCommId(SymbolId(j as u32))
                    }
                    Some(_) => {
                        diags.push(Diagnostic::at(
                            "id-shape",
                            format!("identity `{}` of `{}` is not a constant", idname, op.name),
                            op.line,
                            1,
                        ));
                        continue;
                    }
                    None => {
                        diags.push(Diagnostic::at(
                            "unknown-op",
                            format!("identity `{}` of `{}` is not declared", idname, op.name),
                            op.line,
                            1,
                        ));
                        continue;
                    }
                }
            }
            (true, false, _) => {
                diags.push(Diagnostic::at(
                    "assoc-without-comm",
                    format!(
                        "operator `{}` is associative but not commutative; that axiom combination is not supported",
                        op.name
                    ),
                    op.line,
                    1,
                ));
                continue;
            }
            (false, _, Some(_)) => {
                diags.push(Diagnostic::at(
                    "id-without-assoc",
                    format!("operator `{}` has an identity but is not assoc comm", op.name),
                    op.line,
                    1,
                ));
                continue;
            }
        };
        let role = if op.pred {
            Role::Predicate
        } else if op.ctor {
            Role::Constructor
        } else {
            Role::Defined
        };
        let decl = SymbolDecl {
            name: op.name.clone(),
            arg_sorts: arg_ids,
            result,
            class,
            role,
            prec: op.prec.unwrap_or(30),
            infra: false,
        };
        match sig.add_symbol(decl) {
            Ok(id) => debug_assert_eq!(id, SymbolId(i as u32)),
            Err(d) => diags.push(d),
        }
    }
    if !diags.is_empty() {
        return Err(LoadError { diagnostics: diags });
    }

    let mut var_table: BTreeMap<String, SortId> = BTreeMap::new();
    for (names, sort, line) in &var_decls {
        match sig.sort_by_name(sort) {
            Some(s) => {
                for n in names {
                    if let Some(prev) = var_table.insert(n.clone(), s) {
                        if prev != s {
                            diags.push(Diagnostic::at(
                                "var-redecl",
                                format!("variable `{}` declared with two different sorts", n),
                                *line,
                                1,
                            ));
                        }
                    }
                }
            }
            None => diags.push(Diagnostic::at(
                "unknown-sort",
                format!("variable block uses unknown sort `{}`", sort),
                *line,
                1,
            )),
        }
    }
    if !diags.is_empty() {
        return Err(LoadError { diagnostics: diags });
    }

    // parse rule and pattern terms
    let mut rules: Vec<(Term, Term, Option<String>)> = Vec::new();
    for (label, lhs_toks, rhs_toks) in &rule_stmts {
        let lhs = parse_term_tokens(&sig, &var_table, lhs_toks);
        let rhs = parse_term_tokens(&sig, &var_table, rhs_toks);
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => rules.push((l, r, label.clone())),
            (Err(d), _) | (_, Err(d)) => diags.push(d),
        }
    }
    let mut patterns: Vec<(SymbolId, Vec<Term>, Vec<(Term, Term)>)> = Vec::new();
    for (head_toks, constraint_toks) in &pattern_stmts {
        let parsed = (|| -> Result<(), Diagnostic> {
            let (atom_toks, tt_toks) = split_once_depth0(head_toks, &Tok::Sym("=/=".into()))
                .ok_or_else(|| {
                    Diagnostic::at(
                        "bad-pattern",
                        "negative pattern must be `atom =/= tt`",
                        head_toks[0].line,
                        head_toks[0].col,
                    )
                })?;
            if tt_toks.len() != 1 || tt_toks[0].tok != Tok::Word("tt".into()) {
                return Err(Diagnostic::at(
                    "bad-pattern",
                    "negative pattern right-hand side must be `tt`",
                    head_toks[0].line,
                    head_toks[0].col,
                ));
            }
            let atom = parse_term_tokens(&sig, &var_table, &atom_toks)?;
            let (p, args) = match &atom {
                Term::App(p, args) => (*p, args.clone()),
                Term::Var(_) => {
                    return Err(Diagnostic::at(
                        "bad-pattern",
                        "negative pattern head must be a predicate application",
                        head_toks[0].line,
                        head_toks[0].col,
                    ))
                }
            };
            let mut constraint = Vec::new();
            for (lt, rt) in constraint_toks {
                let l = parse_term_tokens(&sig, &var_table, lt)?;
                let r = parse_term_tokens(&sig, &var_table, rt)?;
                constraint.push((l, r));
            }
            patterns.push((p, args, constraint));
            Ok(())
        })();
        if let Err(d) = parsed {
            diags.push(d);
        }
    }

    let mut finiteness_annotations = Vec::new();
    for (name, fin, line) in &finite_ann {
        match sig.sort_by_name(name) {
            Some(s) => finiteness_annotations.push((s, *fin)),
            None => diags.push(Diagnostic::at(
                "unknown-sort",
                format!("finiteness annotation names unknown sort `{}`", name),
                *line,
                1,
            )),
        }
    }

    if !diags.is_empty() {
        return Err(LoadError { diagnostics: diags });
    }
    Ok(RawTheory { sig, var_table, rules, patterns, convergent, finiteness_annotations })
}

fn parse_op(rest: &[Lexed], line: usize) -> Result<RawOp, Diagnostic> {
    let arrow = rest
        .iter()
        .position(|t| t.tok == Tok::Sym("->".into()))
        .ok_or_else(|| Diagnostic::at("bad-op", "operator declaration has no `->`", line, 1))?;
    if arrow + 1 >= rest.len() {
        return Err(Diagnostic::at("bad-op", "operator declaration has no result sort", line, 1));
    }
    let result = match &rest[arrow + 1].tok {
        Tok::Word(w) => w.clone(),
        _ => return Err(Diagnostic::at("bad-op", "result sort must be an identifier", line, 1)),
    };
    // walk backwards from the arrow over the argument sort words
    let mut i = arrow;
    let mut arg_sorts_rev: Vec<String> = Vec::new();
    while i > 0 {
        match &rest[i - 1].tok {
            Tok::Word(w) => {
                arg_sorts_rev.push(w.clone());
                i -= 1;
            }
            Tok::Sym(s) if s == ":" => break,
            _ => break,
        }
    }
    if i == 0 || rest[i - 1].tok != Tok::Sym(":".into()) {
        return Err(Diagnostic::at(
            "bad-op",
            "operator declaration must be `op name : Sorts -> Sort`",
            line,
            1,
        ));
    }
    arg_sorts_rev.reverse();
    let name: String = rest[..i - 1].iter().map(|t| t.tok.text()).collect();
    if name.is_empty() {
        return Err(Diagnostic::at("bad-op", "operator has an empty name", line, 1));
    }
    // attributes
    let mut op = RawOp {
        name,
        arg_sorts: arg_sorts_rev,
        result,
        ctor: false,
        pred: false,
        assoc: false,
        comm: false,
        identity: None,
        prec: None,
        line,
    };
    let attrs = &rest[arrow + 2..];
    if attrs.is_empty() {
        return Ok(op);
    }
    if attrs[0].tok != Tok::LBracket || attrs[attrs.len() - 1].tok != Tok::RBracket {
        return Err(Diagnostic::at("bad-op", "operator attributes must be bracketed", line, 1));
    }
    let mut k = 1;
    while k < attrs.len() - 1 {
        match &attrs[k].tok {
            Tok::Word(w) if w == "ctor" => {
                op.ctor = true;
                k += 1;
            }
            Tok::Word(w) if w == "pred" => {
                op.pred = true;
                k += 1;
            }
            Tok::Word(w) if w == "assoc" => {
                op.assoc = true;
                k += 1;
            }
            Tok::Word(w) if w == "comm" => {
                op.comm = true;
                k += 1;
            }
            Tok::Word(w) if w == "prec" => {
                let n = attrs.get(k + 1).and_then(|t| match &t.tok {
                    Tok::Word(d) => d.parse::<u32>().ok(),
                    _ => None,
                });
                match n {
                    Some(n) => {
                        op.prec = Some(n);
                        k += 2;
                    }
                    None => {
                        return Err(Diagnostic::at("bad-op", "`prec` needs a number", line, 1))
                    }
                }
            }
            Tok::Word(w) if w == "id" => {
                // `id: constant`
                if attrs.get(k + 1).map(|t| &t.tok) == Some(&Tok::Sym(":".into())) {
                    match attrs.get(k + 2).map(|t| t.tok.text()) {
                        Some(cname) => {
                            op.identity = Some(cname);
                            k += 3;
                        }
                        None => {
                            return Err(Diagnostic::at("bad-op", "`id:` needs a constant", line, 1))
                        }
                    }
                } else {
                    return Err(Diagnostic::at("bad-op", "expected `id: constant`", line, 1));
                }
            }
            Tok::VarColon(w, cname) if w == "id" => {
                op.identity = Some(cname.clone());
                k += 1;
            }
            other => {
                return Err(Diagnostic::at(
                    "bad-op",
                    format!("unknown operator attribute `{}`", other.text()),
                    line,
                    1,
                ))
            }
        }
    }
    Ok(op)
}

fn split_on(toks: &[Lexed], sep: &Tok) -> Vec<Vec<Lexed>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut depth = 0i32;
    for t in toks {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            _ => {}
        }
        if depth == 0 && &t.tok == sep {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(t.clone());
        }
    }
    out.push(cur);
    out
}

fn split_once_depth0(toks: &[Lexed], sep: &Tok) -> Option<(Vec<Lexed>, Vec<Lexed>)> {
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen => depth += 1,
            Tok::RParen => depth -= 1,
            _ => {}
        }
        if depth == 0 && &t.tok == sep {
            return Some((toks[..i].to_vec(), toks[i + 1..].to_vec()));
        }
    }
    None
}

// ---------------------------------------------------------------------
// terms
// ---------------------------------------------------------------------

struct OpTemplate {
    sym: SymbolId,
    /// Literal token texts of the template segment.
    tokens: Vec<String>,
    prec: u32,
}

struct TermParser<'a> {
    sig: &'a Signature,
    vars: &'a BTreeMap<String, SortId>,
    toks: &'a [Lexed],
    pos: usize,
    infix: Vec<OpTemplate>,
    postfix: Vec<OpTemplate>,
    /// Precedence limit for prefix-application arguments: just below the
    /// tightest comma-headed operator.
    arg_limit: u32,
}

fn segment_tokens(seg: &str) -> Vec<String> {
    lex(seg).map(|v| v.into_iter().map(|l| l.tok.text()).collect()).unwrap_or_default()
}

impl<'a> TermParser<'a> {
    fn new(sig: &'a Signature, vars: &'a BTreeMap<String, SortId>, toks: &'a [Lexed]) -> Self {
        let mut infix = Vec::new();
        let mut postfix = Vec::new();
        let mut arg_limit = u32::MAX;
        for f in sig.symbol_ids() {
            let d = sig.symbol(f);
            if d.infra {
                continue;
            }
            if d.is_infix() {
                let seg = d.name.split('_').nth(1).expect("infix");
                let toks = segment_tokens(seg);
                if seg == "," && d.prec.saturating_sub(1) < arg_limit {
                    arg_limit = d.prec - 1;
                }
                infix.push(OpTemplate { sym: f, tokens: toks, prec: d.prec });
            } else if d.is_postfix() {
                let seg = d.name.split('_').nth(1).expect("postfix");
                postfix.push(OpTemplate { sym: f, tokens: segment_tokens(seg), prec: d.prec });
            }
        }
        // longer templates first so `<=` style literals win over prefixes
        infix.sort_by_key(|t| std::cmp::Reverse(t.tokens.len()));
        postfix.sort_by_key(|t| std::cmp::Reverse(t.tokens.len()));
        TermParser { sig, vars, toks, pos: 0, infix, postfix, arg_limit }
    }

    fn peek(&self) -> Option<&Lexed> {
        self.toks.get(self.pos)
    }

    fn err(&self, code: &str, msg: impl Into<String>) -> Diagnostic {
        match self.peek().or_else(|| self.toks.last()) {
            Some(t) => Diagnostic::at(code, msg, t.line, t.col),
            None => Diagnostic::new(code, msg),
        }
    }

    fn matches_template(&self, tmpl: &OpTemplate) -> bool {
        if tmpl.tokens.is_empty() {
            return false;
        }
        for (i, text) in tmpl.tokens.iter().enumerate() {
            match self.toks.get(self.pos + i) {
                Some(t) if &t.tok.text() == text => {}
                _ => return false,
            }
        }
        true
    }

    fn parse(&mut self, limit: u32) -> Result<Term, Diagnostic> {
        let mut lhs = self.parse_primary()?;
        'outer: loop {
            // infix operators at or below the limit
            let mut candidate: Option<(SymbolId, usize, u32)> = None;
            for tmpl in &self.infix {
                if self.matches_template(tmpl) {
                    candidate = Some((tmpl.sym, tmpl.tokens.len(), tmpl.prec));
                    break;
                }
            }
            if let Some((sym, len, prec)) = candidate {
                if prec > limit {
                    break 'outer;
                }
                self.pos += len;
                let rhs = self.parse(prec.saturating_sub(1))?;
                lhs = self
                    .sig
                    .try_app(sym, vec![lhs, rhs])
                    .map_err(|m| self.err("sort-error", m))?;
                continue;
            }
            break;
        }
        Ok(lhs)
    }

    fn parse_primary(&mut self) -> Result<Term, Diagnostic> {
        let t = self.peek().cloned().ok_or_else(|| self.err("term-eof", "unexpected end of term"))?;
        let mut base = match &t.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.parse(u32::MAX)?;
                match self.peek().map(|x| &x.tok) {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        inner
                    }
                    _ => return Err(self.err("unbalanced", "expected `)`")),
                }
            }
            Tok::VarColon(name, sortname) => {
                let sort = self
                    .sig
                    .sort_by_name(sortname)
                    .ok_or_else(|| self.err("unknown-sort", format!("unknown sort `{}`", sortname)))?;
                self.pos += 1;
                Term::var(name.clone(), sort)
            }
            Tok::Word(w) => {
                if self.toks.get(self.pos + 1).map(|x| &x.tok) == Some(&Tok::LParen) {
                    if let Some(f) = self.sig.symbol_by_name(w) {
                        self.pos += 2;
                        let mut args = Vec::new();
                        if self.peek().map(|x| &x.tok) == Some(&Tok::RParen) {
                            return Err(self.err("bad-app", "empty argument list"));
                        }
                        loop {
                            args.push(self.parse(self.arg_limit)?);
                            match self.peek().map(|x| x.tok.clone()) {
                                Some(Tok::Sym(s)) if s == "," => {
                                    self.pos += 1;
                                }
                                Some(Tok::RParen) => {
                                    self.pos += 1;
                                    break;
                                }
                                _ => return Err(self.err("bad-app", "expected `,` or `)` in argument list")),
                            }
                        }
                        self.sig
                            .try_app(f, args)
                            .map_err(|m| self.err("sort-error", m))?
                    } else {
                        return Err(self.err("unknown-op", format!("unknown operator `{}`", w)));
                    }
                } else if let Some(&sort) = self.vars.get(w) {
                    self.pos += 1;
                    Term::var(w.clone(), sort)
                } else if let Some(f) = self.sig.symbol_by_name(w) {
                    if self.sig.symbol(f).arity() != 0 {
                        return Err(self.err(
                            "bad-app",
                            format!("operator `{}` needs {} arguments", w, self.sig.symbol(f).arity()),
                        ));
                    }
                    self.pos += 1;
                    Term::constant(f)
                } else {
                    return Err(self.err("unknown-ident", format!("unknown identifier `{}`", w)));
                }
            }
            other => return Err(self.err("bad-term", format!("unexpected `{}`", other.text()))),
        };
        // postfix templates bind tightest
        loop {
            let mut matched = None;
            for tmpl in &self.postfix {
                if self.matches_template(tmpl) {
                    matched = Some((tmpl.sym, tmpl.tokens.len()));
                    break;
                }
            }
            match matched {
                Some((sym, len)) => {
                    self.pos += len;
                    base = self
                        .sig
                        .try_app(sym, vec![base])
                        .map_err(|m| self.err("sort-error", m))?;
                }
                None => break,
            }
        }
        Ok(base)
    }
}

fn parse_term_tokens(
    sig: &Signature,
    vars: &BTreeMap<String, SortId>,
    toks: &[Lexed],
) -> Result<Term, Diagnostic> {
    let mut p = TermParser::new(sig, vars, toks);
    let t = p.parse(u32::MAX)?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing-tokens", "unexpected trailing tokens in term"));
    }
    Ok(t)
}

/// Parse a term against a loaded theory, using its variable table.
pub fn parse_term_str(theory: &Theory, text: &str) -> Result<Term, Diagnostic> {
    let toks = lex(text)?;
    parse_term_tokens(&theory.sig, &theory.var_table, &toks)
}

// ---------------------------------------------------------------------
// formulas
// ---------------------------------------------------------------------

pub fn parse_formula_str(theory: &Theory, text: &str) -> Result<QfFormula, Diagnostic> {
    let toks = lex(text)?;
    parse_formula_tokens(theory, &toks)
}

fn parse_formula_tokens(theory: &Theory, toks: &[Lexed]) -> Result<QfFormula, Diagnostic> {
    if toks.is_empty() {
        return Err(Diagnostic::new("empty-formula", "empty formula"));
    }
    // connectives from loosest to tightest
    for (sep, kind) in [("<=>", 0u8), ("=>", 1), ("\\/", 2), ("/\\", 3)] {
        if let Some((l, r)) = split_once_depth0(toks, &Tok::Sym(sep.into())) {
            if l.is_empty() || r.is_empty() {
                return Err(Diagnostic::at(
                    "bad-formula",
                    format!("`{}` is missing an operand", sep),
                    toks[0].line,
                    toks[0].col,
                ));
            }
            let lf = parse_formula_tokens(theory, &l)?;
            let rf = parse_formula_tokens(theory, &r)?;
            return Ok(match kind {
                0 => QfFormula::iff(lf, rf),
                1 => QfFormula::implies(lf, rf),
                2 => QfFormula::or(lf, rf),
                _ => QfFormula::and(lf, rf),
            });
        }
    }
    if toks[0].tok == Tok::Sym("~".into()) {
        return Ok(QfFormula::not(parse_formula_tokens(theory, &toks[1..])?));
    }
    // formula-level parentheses: the whole range is one balanced group
    if toks[0].tok == Tok::LParen {
        let mut depth = 0i32;
        let mut closes_at_end = false;
        for (i, t) in toks.iter().enumerate() {
            match t.tok {
                Tok::LParen => depth += 1,
                Tok::RParen => {
                    depth -= 1;
                    if depth == 0 {
                        closes_at_end = i == toks.len() - 1;
                        break;
                    }
                }
                _ => {}
            }
        }
        if closes_at_end {
            // try as a parenthesized formula; fall back to an atom
            if let Ok(f) = parse_formula_tokens(theory, &toks[1..toks.len() - 1]) {
                return Ok(f);
            }
        }
    }
    // atom
    for (sep, positive) in [("=/=", false), ("=", true)] {
        if let Some((l, r)) = split_once_depth0(toks, &Tok::Sym(sep.into())) {
            let lt = parse_term_tokens(&theory.sig, &theory.var_table, &l)?;
            let rt = parse_term_tokens(&theory.sig, &theory.var_table, &r)?;
            let ls = theory.sig.least_sort(&lt);
            let rs = theory.sig.least_sort(&rt);
            if theory.literal_ops(ls, rs).is_none() {
                return Err(Diagnostic::at(
                    "atom-sorts",
                    format!(
                        "literal sides have incomparable sorts {} and {}",
                        theory.sig.sort_name(ls),
                        theory.sig.sort_name(rs)
                    ),
                    toks[0].line,
                    toks[0].col,
                ));
            }
            return Ok(if positive {
                QfFormula::Eq(lt, rt)
            } else {
                QfFormula::Neq(lt, rt)
            });
        }
    }
    Err(Diagnostic::at(
        "bad-formula",
        "expected an atom `term = term` or `term =/= term`",
        toks[0].line,
        toks[0].col,
    ))
}

// ---------------------------------------------------------------------
// theory printing (round-trip surface)
// ---------------------------------------------------------------------

/// Print a loaded theory back to the file syntax. Internal conjunction
/// machinery is omitted.
pub fn print_theory(theory: &Theory) -> String {
    let sig = &theory.sig;
    let infra_sorts = [theory.infra.lit, theory.infra.conj];
    let mut out = String::new();
    let user_sorts: Vec<SortId> = sig
        .sort_ids()
        .filter(|s| !infra_sorts.contains(s))
        .collect();
    out.push_str("sorts");
    for s in &user_sorts {
        out.push(' ');
        out.push_str(sig.sort_name(*s));
    }
    out.push_str(" .\n");
    for (lo, hi) in sig.subsort_edges() {
        if infra_sorts.contains(&lo) || infra_sorts.contains(&hi) {
            continue;
        }
        out.push_str(&format!("subsort {} < {} .\n", sig.sort_name(lo), sig.sort_name(hi)));
    }
    for f in sig.symbol_ids() {
        let d = sig.symbol(f);
        if d.infra {
            continue;
        }
        let args: Vec<&str> = d.arg_sorts.iter().map(|&s| sig.sort_name(s)).collect();
        let mut attrs: Vec<String> = Vec::new();
        if d.role == Role::Constructor {
            attrs.push("ctor".into());
        }
        if d.role == Role::Predicate {
            attrs.push("pred".into());
        }
        match d.class {
            AxiomClass::Free => {}
            AxiomClass::Comm => attrs.push("comm".into()),
            AxiomClass::AssocComm => {
                attrs.push("assoc".into());
                attrs.push("comm".into());
            }
            AxiomClass::AssocCommId(e) => {
                attrs.push("assoc".into());
                attrs.push("comm".into());
                attrs.push(format!("id: {}", sig.symbol(e).name));
            }
        }
        if d.prec != 30 {
            attrs.push(format!("prec {}", d.prec));
        }
        let attr_str = if attrs.is_empty() {
            String::new()
        } else {
            format!(" [{}]", attrs.join(" "))
        };
        if args.is_empty() {
            out.push_str(&format!("op {} : -> {}{} .\n", d.name, sig.sort_name(d.result), attr_str));
        } else {
            out.push_str(&format!(
                "op {} : {} -> {}{} .\n",
                d.name,
                args.join(" "),
                sig.sort_name(d.result),
                attr_str
            ));
        }
    }
    // variable blocks grouped by sort
    let mut by_sort: BTreeMap<SortId, Vec<String>> = BTreeMap::new();
    for (name, sort) in &theory.var_table {
        by_sort.entry(*sort).or_default().push(name.clone());
    }
    for (sort, names) in &by_sort {
        out.push_str(&format!("vars {} : {} .\n", names.join(" "), sig.sort_name(*sort)));
    }
    for r in &theory.rules {
        match &r.label {
            Some(l) => out.push_str(&format!(
                "rl [{}] : {} => {} .\n",
                l,
                sig.term_to_string(&r.lhs),
                sig.term_to_string(&r.rhs)
            )),
            None => out.push_str(&format!(
                "rl {} => {} .\n",
                sig.term_to_string(&r.lhs),
                sig.term_to_string(&r.rhs)
            )),
        }
    }
    for p in &theory.patterns {
        let atom = sig.term_to_string(&sig.app(p.pred, p.args.clone()));
        if p.constraint.is_empty() {
            out.push_str(&format!("npattern {} =/= tt .\n", atom));
        } else {
            let cs: Vec<String> = p
                .constraint
                .iter()
                .map(|(a, b)| format!("{} =/= {}", sig.term_to_string(a), sig.term_to_string(b)))
                .collect();
            out.push_str(&format!("npattern {} =/= tt if {} .\n", atom, cs.join(" /\\ ")));
        }
    }
    if theory.convergent {
        out.push_str("convergent .\n");
    }
    out
}

//! Term and substitution printing. Mixfix operators print through their
//! declared templates; the output re-parses to the same canonical term.

use crate::signature::Signature;
use crate::subst::Subst;
use crate::term::Term;

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    /// Argument inside a prefix application's parentheses.
    PrefixArg,
    /// Child of an infix operator with the given precedence.
    InfixChild(u32),
    /// Argument of a postfix operator.
    PostfixArg,
}

impl Signature {
    /// Operator name as written by the user; internal disambiguation
    /// suffixes (after `#`) are stripped.
    pub fn effective_name(&self, f: crate::signature::SymbolId) -> &str {
        let name = &self.symbol(f).name;
        match name.find('#') {
            Some(i) => &name[..i],
            None => name,
        }
    }

    pub fn term_to_string(&self, t: &Term) -> String {
        let mut out = String::new();
        self.fmt_term(t, false, Ctx::Top, &mut out);
        out
    }

    /// Variables are printed `name:Sort` so the output parses without a
    /// variable context.
    pub fn term_to_string_typed(&self, t: &Term) -> String {
        let mut out = String::new();
        self.fmt_term(t, true, Ctx::Top, &mut out);
        out
    }

    pub fn subst_to_string(&self, s: &Subst) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (v, t) in s.iter() {
            parts.push(format!("{} |-> {}", v.name, self.term_to_string(t)));
        }
        format!("{{{}}}", parts.join(", "))
    }

    fn op_shape(&self, t: &Term) -> Option<(bool, u32)> {
        // Some((is_infix, prec)) when the top symbol prints infix/postfix.
        let f = t.top_symbol()?;
        let decl = self.symbol(f);
        let name = self.effective_name(f);
        let parts: Vec<&str> = name.split('_').collect();
        if parts.len() == 3 && parts[0].is_empty() && parts[2].is_empty() && !parts[1].is_empty() {
            return Some((true, decl.prec));
        }
        if parts.len() == 2 && parts[0].is_empty() && !parts[1].is_empty() && decl.arity() == 1 {
            return Some((false, decl.prec));
        }
        None
    }

    fn fmt_term(&self, t: &Term, typed: bool, ctx: Ctx, out: &mut String) {
        match t {
            Term::Var(v) => {
                out.push_str(&v.name);
                if typed {
                    out.push(':');
                    out.push_str(self.sort_name(v.sort));
                }
            }
            Term::App(f, args) => {
                let name = self.effective_name(*f).to_string();
                match self.op_shape(t) {
                    Some((true, prec)) => {
                        let op_text = name.split('_').nth(1).expect("infix template");
                        let needs_parens = match ctx {
                            Ctx::Top => false,
                            Ctx::PrefixArg => op_text.contains(','),
                            Ctx::InfixChild(parent) => prec >= parent,
                            Ctx::PostfixArg => true,
                        };
                        if needs_parens {
                            out.push('(');
                        }
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                out.push(' ');
                                out.push_str(op_text);
                                out.push(' ');
                            }
                            self.fmt_term(a, typed, Ctx::InfixChild(prec), out);
                        }
                        if needs_parens {
                            out.push(')');
                        }
                    }
                    Some((false, prec)) => {
                        let op_text = name.split('_').nth(1).expect("postfix template");
                        let needs_parens = match ctx {
                            Ctx::Top => false,
                            Ctx::PrefixArg => op_text.contains(','),
                            Ctx::InfixChild(parent) => prec >= parent,
                            Ctx::PostfixArg => true,
                        };
                        if needs_parens {
                            out.push('(');
                        }
                        self.fmt_term(&args[0], typed, Ctx::PostfixArg, out);
                        out.push(' ');
                        out.push_str(op_text);
                        if needs_parens {
                            out.push(')');
                        }
                    }
                    None => {
                        out.push_str(&name);
                        if !args.is_empty() {
                            out.push('(');
                            for (i, a) in args.iter().enumerate() {
                                if i > 0 {
                                    out.push_str(", ");
                                }
                                self.fmt_term(a, typed, Ctx::PrefixArg, out);
                            }
                            out.push(')');
                        }
                    }
                }
            }
        }
    }
}

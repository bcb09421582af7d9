#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ltgen {

/// A lambda term in de Bruijn notation.
///
/// A term is either a variable (a nonnegative index counting the binders
/// between the occurrence and its lambda, 0 = innermost), an abstraction,
/// or an application. Subterms are shared immutably, so copying a Term is
/// two refcount bumps.
///
/// Two size measures are used throughout:
///   - unit size: each constructor weighs its arity (0 weighs 0, the
///     successor step of an index and a lambda weigh 1, an application
///     weighs 2). All internal budgets and counters are unit sizes.
///   - natural size: every constructor weighs 1; always unit size + 1.
class Term {
 public:
  enum class Kind : uint8_t { index, abs, app };

  static Term index(int k) {
    Term t;
    t.kind_ = Kind::index;
    t.k_ = k;
    return t;
  }
  static Term abs(Term body) {
    Term t;
    t.kind_ = Kind::abs;
    t.lhs_ = std::make_shared<const Term>(std::move(body));
    return t;
  }
  static Term app(Term fun, Term arg) {
    Term t;
    t.kind_ = Kind::app;
    t.lhs_ = std::make_shared<const Term>(std::move(fun));
    t.rhs_ = std::make_shared<const Term>(std::move(arg));
    return t;
  }

  Kind kind() const { return kind_; }
  bool is_index() const { return kind_ == Kind::index; }
  bool is_abs() const { return kind_ == Kind::abs; }
  bool is_app() const { return kind_ == Kind::app; }

  int var_index() const { return k_; }
  const Term& body() const { return *lhs_; }
  const Term& fun() const { return *lhs_; }
  const Term& arg() const { return *rhs_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case Kind::index: return a.k_ == b.k_;
      case Kind::abs: return *a.lhs_ == *b.lhs_;
      case Kind::app: return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    }
    return false;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  Term() = default;
  Kind kind_ = Kind::index;
  int k_ = 0;
  std::shared_ptr<const Term> lhs_;
  std::shared_ptr<const Term> rhs_;
};

/// Arity-weighted size: sum of index values plus #abs plus 2 * #app.
inline long long unit_size(const Term& t) {
  long long total = 0;
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* cur = stack.back();
    stack.pop_back();
    switch (cur->kind()) {
      case Term::Kind::index:
        total += cur->var_index();
        break;
      case Term::Kind::abs:
        total += 1;
        stack.push_back(&cur->body());
        break;
      case Term::Kind::app:
        total += 2;
        stack.push_back(&cur->fun());
        stack.push_back(&cur->arg());
        break;
    }
  }
  return total;
}

/// Natural size: every constructor (0, s, lambda, application) weighs 1.
inline long long natural_size(const Term& t) { return unit_size(t) + 1; }

/// True iff every index is bound by an enclosing abstraction.
inline bool is_closed(const Term& t) {
  std::vector<std::pair<const Term*, int>> stack{{&t, 0}};
  while (!stack.empty()) {
    auto [cur, depth] = stack.back();
    stack.pop_back();
    switch (cur->kind()) {
      case Term::Kind::index:
        if (cur->var_index() >= depth) return false;
        break;
      case Term::Kind::abs:
        stack.push_back({&cur->body(), depth + 1});
        break;
      case Term::Kind::app:
        stack.push_back({&cur->fun(), depth});
        stack.push_back({&cur->arg(), depth});
        break;
    }
  }
  return true;
}

/// True iff the term contains no beta-redex, i.e. no application whose
/// function part is an abstraction.
inline bool is_normal_form(const Term& t) {
  std::vector<const Term*> stack{&t};
  while (!stack.empty()) {
    const Term* cur = stack.back();
    stack.pop_back();
    switch (cur->kind()) {
      case Term::Kind::index:
        break;
      case Term::Kind::abs:
        stack.push_back(&cur->body());
        break;
      case Term::Kind::app:
        if (cur->fun().is_abs()) return false;
        stack.push_back(&cur->fun());
        stack.push_back(&cur->arg());
        break;
    }
  }
  return true;
}

/// Canonical text form, no whitespace: T ::= "0" | "s(" T ")" | "l(" T ")"
/// | "a(" T "," T ")". Indices print as chains of s applications.
inline void print_term(const Term& t, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::index: {
      for (int i = 0; i < t.var_index(); ++i) out += "s(";
      out += '0';
      for (int i = 0; i < t.var_index(); ++i) out += ')';
      break;
    }
    case Term::Kind::abs:
      out += "l(";
      print_term(t.body(), out);
      out += ')';
      break;
    case Term::Kind::app:
      out += "a(";
      print_term(t.fun(), out);
      out += ',';
      print_term(t.arg(), out);
      out += ')';
      break;
  }
}

inline std::string print_term(const Term& t) {
  std::string out;
  print_term(t, out);
  return out;
}

/// Malformed term text. position is the 1-based offset of the offending
/// character (one past the end for truncated input).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t position)
      : std::runtime_error(what), position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

namespace detail {

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  Term parse() {
    Term t = parse_term();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  Term parse_term() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    switch (c) {
      case '0':
        ++pos_;
        return Term::index(0);
      case 's': {
        ++pos_;
        expect('(');
        Term inner = parse_term();
        expect(')');
        if (!inner.is_index()) fail("successor applied to non-index");
        return Term::index(inner.var_index() + 1);
      }
      case 'l': {
        ++pos_;
        expect('(');
        Term body = parse_term();
        expect(')');
        return Term::abs(std::move(body));
      }
      case 'a': {
        ++pos_;
        expect('(');
        Term fun = parse_term();
        expect(',');
        Term arg = parse_term();
        expect(')');
        return Term::app(std::move(fun), std::move(arg));
      }
      default:
        fail("expected one of '0', 's', 'l', 'a'");
    }
    return Term::index(0);  // unreachable
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg + " at offset " + std::to_string(pos_ + 1), pos_ + 1);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

}  // namespace detail

/// Parses the canonical term grammar; whitespace between tokens is ignored.
/// Throws ParseError on malformed input.
inline Term parse_term(std::string_view text) {
  return detail::TermParser(text).parse();
}

/// The seven enumerable/countable term families.
enum class TermClass {
  plain,              // all terms, free indices allowed
  closed,             // all indices bound
  plain_typable,      // simply typable in some environment
  closed_typable,     // closed and simply typable
  plain_nf,           // beta-normal forms
  plain_typable_nf,   // typable normal forms
  closed_typable_nf,  // closed typable normal forms
};

struct ClassTraits {
  bool typed;
  bool closed;
  bool normal_form;
};

constexpr ClassTraits class_traits(TermClass c) {
  switch (c) {
    case TermClass::plain: return {false, false, false};
    case TermClass::closed: return {false, true, false};
    case TermClass::plain_typable: return {true, false, false};
    case TermClass::closed_typable: return {true, true, false};
    case TermClass::plain_nf: return {false, false, true};
    case TermClass::plain_typable_nf: return {true, false, true};
    case TermClass::closed_typable_nf: return {true, true, true};
  }
  return {false, false, false};
}

constexpr std::string_view to_string(TermClass c) {
  switch (c) {
    case TermClass::plain: return "plain";
    case TermClass::closed: return "closed";
    case TermClass::plain_typable: return "plain-typable";
    case TermClass::closed_typable: return "closed-typable";
    case TermClass::plain_nf: return "plain-nf";
    case TermClass::plain_typable_nf: return "plain-typable-nf";
    case TermClass::closed_typable_nf: return "closed-typable-nf";
  }
  return "?";
}

inline bool term_class_from_string(std::string_view name, TermClass& out) {
  for (TermClass c :
       {TermClass::plain, TermClass::closed, TermClass::plain_typable,
        TermClass::closed_typable, TermClass::plain_nf,
        TermClass::plain_typable_nf, TermClass::closed_typable_nf}) {
    if (to_string(c) == name) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace ltgen

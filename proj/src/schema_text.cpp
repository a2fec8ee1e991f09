#include "halflab/schema_text.hpp"

#include <cctype>
#include <sstream>

#include "halflab/errors.hpp"

namespace halflab {

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string& text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    return text_[pos_];
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool try_consume(char c) {
    if (at_end() || text_[pos_] != c) return false;
    ++pos_;
    return true;
  }

  std::string word() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return text_.substr(start, pos_ - start);
  }

  std::uint64_t number() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    const std::string digits = text_.substr(start, pos_ - start);
    try {
      return std::stoull(digits);
    } catch (const std::exception&) {
      fail("number out of range: " + digits);
    }
    return 0;  // unreachable
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw parse_error("schema text at offset " + std::to_string(pos_) + ": " + message);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
};

std::vector<std::uint64_t> number_list(Cursor& c, char terminator) {
  std::vector<std::uint64_t> values;
  if (c.peek() == terminator) return values;
  for (;;) {
    values.push_back(c.number());
    if (!c.try_consume(',')) break;
  }
  return values;
}

std::vector<bool> bit_list(Cursor& c, char terminator) {
  std::vector<bool> bits;
  if (c.peek() == terminator) return bits;
  for (;;) {
    const std::uint64_t v = c.number();
    if (v > 1) c.fail("bits must be 0 or 1");
    bits.push_back(v == 1);
    if (!c.try_consume(',')) break;
  }
  return bits;
}

Set parse_node(Cursor& c) {
  const std::string name = c.word();
  c.expect('(');
  if (name == "finite") {
    auto elements = number_list(c, ')');
    c.expect(')');
    return Set::finite(std::move(elements));
  }
  if (name == "periodic") {
    auto prefix = bit_list(c, ';');
    c.expect(';');
    auto period = bit_list(c, ')');
    c.expect(')');
    if (period.empty()) c.fail("periodic schema requires a non-empty period");
    return Set::periodic(std::move(prefix), std::move(period));
  }
  if (name == "not") {
    Set inner = parse_node(c);
    c.expect(')');
    return Set::complement(std::move(inner));
  }
  if (name == "and" || name == "or") {
    Set left = parse_node(c);
    c.expect(',');
    Set right = parse_node(c);
    c.expect(')');
    return name == "and" ? Set::intersection_of(std::move(left), std::move(right))
                         : Set::union_of(std::move(left), std::move(right));
  }
  if (name == "seeded") {
    const std::uint64_t seed = c.number();
    c.expect(')');
    return Set::seeded(seed);
  }
  if (name == "intervals") {
    const std::string generator = c.word();
    c.expect(',');
    const std::string parity_word = c.word();
    BlockParity parity;
    if (parity_word == "even") {
      parity = BlockParity::Even;
    } else if (parity_word == "odd") {
      parity = BlockParity::Odd;
    } else {
      c.fail("parity must be 'even' or 'odd'");
    }
    if (generator == "factorial") {
      c.expect(')');
      return Set::intervals(IntervalPartition::factorial(), parity);
    }
    if (generator == "doubling") {
      c.expect(')');
      return Set::intervals(IntervalPartition::doubling(), parity);
    }
    if (generator == "table") {
      c.expect(';');
      auto boundaries = number_list(c, ')');
      c.expect(')');
      try {
        return Set::intervals(IntervalPartition::table(std::move(boundaries)), parity);
      } catch (const precondition_error& e) {
        c.fail(e.what());
      }
    }
    c.fail("unknown interval generator '" + generator + "'");
  }
  c.fail("unknown schema constructor '" + name + "'");
}

void append_bits(std::ostringstream& out, const std::vector<bool>& bits) {
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (i) out << ',';
    out << (bits[i] ? '1' : '0');
  }
}

void format_node(std::ostringstream& out, const Set& set) {
  const SetNode& node = set.node();
  if (const auto* fin = std::get_if<FiniteNode>(&node.value)) {
    out << "finite(";
    for (std::size_t i = 0; i < fin->elements.size(); ++i) {
      if (i) out << ',';
      out << fin->elements[i];
    }
    out << ')';
    return;
  }
  if (const auto* per = std::get_if<PeriodicNode>(&node.value)) {
    out << "periodic(";
    append_bits(out, per->prefix);
    out << ';';
    append_bits(out, per->period);
    out << ')';
    return;
  }
  if (const auto* comp = std::get_if<ComplementNode>(&node.value)) {
    out << "not(";
    format_node(out, comp->inner);
    out << ')';
    return;
  }
  if (const auto* uni = std::get_if<UnionNode>(&node.value)) {
    out << "or(";
    format_node(out, uni->left);
    out << ',';
    format_node(out, uni->right);
    out << ')';
    return;
  }
  if (const auto* inter = std::get_if<IntersectionNode>(&node.value)) {
    out << "and(";
    format_node(out, inter->left);
    out << ',';
    format_node(out, inter->right);
    out << ')';
    return;
  }
  if (const auto* seed = std::get_if<SeededNode>(&node.value)) {
    out << "seeded(" << seed->seed << ')';
    return;
  }
  const auto& iv = std::get<IntervalsNode>(node.value);
  out << "intervals(";
  switch (iv.partition.kind()) {
    case IntervalPartition::Kind::Factorial:
      out << "factorial";
      break;
    case IntervalPartition::Kind::Doubling:
      out << "doubling";
      break;
    case IntervalPartition::Kind::Table:
      out << "table";
      break;
  }
  out << ',' << (iv.parity == BlockParity::Even ? "even" : "odd");
  if (iv.partition.kind() == IntervalPartition::Kind::Table) {
    out << ';';
    const auto& b = iv.partition.boundaries();
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) out << ',';
      out << b[i];
    }
  }
  out << ')';
}

}  // namespace

Set parse_set(const std::string& text) {
  Cursor cursor(text);
  Set result = parse_node(cursor);
  if (!cursor.at_end()) cursor.fail("trailing characters after schema");
  return result;
}

std::string format_set(const Set& set) {
  std::ostringstream out;
  format_node(out, set);
  return out.str();
}

}  // namespace halflab

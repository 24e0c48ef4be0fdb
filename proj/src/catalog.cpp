#include "oadp/catalog.hpp"

#include "oadp/errors.hpp"
#include "oadp/linalg.hpp"
#include "oadp/projective.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace oadp {

namespace {

ExpectedValue ev(long v, std::string note) { return ExpectedValue{v, std::move(note)}; }
ExpectedValue none() { return ExpectedValue{}; }

struct EntrySpec {
  std::string id;
  std::string ctor;
  std::vector<long> args;
  bool oadp;
  bool run_lines;
  ExpectedInvariants exp;
};

std::vector<EntrySpec> entry_specs() {
  std::vector<EntrySpec> s;
  const std::string h0 = "dimension count: h0(I_X(2)) = h0(O(2)) - h0(O_X(2))";
  const std::string birational =
      "tangential projection of an OADP variety at a general point is birational";
  const std::string nondef = "non-defective: secant variety fills min(2n+1, N)";

  s.push_back({"scroll_3", "scroll", {3}, true, true,
               {ev(3, "rational normal scroll degree = sum of type"),
                ev(1, "the rational normal cubic is the unique OADP curve"),
                ev(3, nondef),
                ev(0, "a twisted cubic contains no lines"),
                ev(1, birational),
                ev(3, h0)}});
  s.push_back({"scroll_1_3", "scroll", {1, 3}, true, true,
               {ev(4, "rational normal scroll degree = sum of type"),
                ev(1, "quartic scrolls S(1,3) and S(2,2) are the OADP surfaces of minimal degree"),
                ev(5, nondef),
                ev(1, "one ruling line through each point of a surface scroll"),
                ev(1, birational),
                ev(6, h0)}});
  s.push_back({"scroll_2_2", "scroll", {2, 2}, true, true,
               {ev(4, "rational normal scroll degree = sum of type"),
                ev(1, "quartic scrolls S(1,3) and S(2,2) are the OADP surfaces of minimal degree"),
                ev(5, nondef),
                ev(1, "one ruling line through each point of a surface scroll"),
                ev(1, birational),
                ev(6, h0)}});
  s.push_back({"scroll_1_1_3", "scroll", {1, 1, 3}, true, false,
               {ev(5, "rational normal scroll degree = sum of type"),
                ev(1, "degree-5 threefold scrolls S(1,1,3) and S(1,2,2) are OADP"),
                ev(7, nondef),
                none(),  // plane fibers carry a pencil of lines through each point
                ev(1, birational),
                ev(10, h0)}});
  s.push_back({"scroll_1_2_2", "scroll", {1, 2, 2}, true, false,
               {ev(5, "rational normal scroll degree = sum of type"),
                ev(1, "degree-5 threefold scrolls S(1,1,3) and S(1,2,2) are OADP"),
                ev(7, nondef),
                none(),
                ev(1, birational),
                ev(10, h0)}});
  s.push_back({"del_pezzo_quintic", "del_pezzo_quintic", {}, true, true,
               {ev(5, "plane cubics through 4 general points: degree 9 - 4"),
                ev(1, "the quintic del Pezzo surface is an OADP surface"),
                ev(5, nondef),
                ev(0, "the 10 lines of a quintic del Pezzo miss a general point"),
                ev(1, birational),
                ev(5, h0)}});
  s.push_back({"veronese", "veronese", {}, false, true,
               {ev(4, "Veronese surface: degree 2^2 of the quadratic embedding"),
                ev(0, "defective varieties have nu = 0 by convention"),
                ev(4, "Veronese surface is defective: its secant variety is a quartic"
                      " hypersurface in P^5"),
                ev(0, "the Veronese surface contains no lines"),
                ev(0, "tangential projection of the Veronese collapses to a conic curve"),
                ev(6, h0)}});
  s.push_back({"segre_1_2", "segre", {1, 2}, false, false,
               {ev(3, "Segre product degree = multinomial(1+2; 1,2) = 3"),
                none(),  // ambient P^5 is not P^{2n+1} for n = 3
                ev(5, "2x3 matrices of rank <= 2 fill the whole of P^5"),
                none(),  // a pencil of lines passes through each point
                none(),
                ev(3, "the three 2x2 minors of a generic 2x3 matrix")}});
  s.push_back({"segre_1_1_1", "segre", {1, 1, 1}, true, true,
               {ev(6, "Segre product degree = multinomial(3; 1,1,1) = 6"),
                ev(1, "P1xP1xP1 in P^7 is an OADP threefold"),
                ev(7, nondef),
                ev(3, "three rulings of P1xP1xP1 through each point; d = 9 - k"),
                ev(1, birational),
                ev(9, h0)}});
  s.push_back({"edge_2_0", "edge_variety", {2, 0}, true, true,
               {ev(4, "divisor of type (0,2) on P1xP2 has degree 4"),
                ev(1, "degree-2n Edge varieties are OADP"),
                ev(5, nondef),
                ev(1, "P1 x conic: the P1 ruling is the unique line through a general point"),
                ev(1, birational),
                ev(6, h0)}});
  s.push_back({"edge_2_1", "edge_variety", {2, 1}, true, true,
               {ev(5, "divisor of type (1,2) on P1xP2 has degree 5"),
                ev(1, "degree-2n+1 Edge varieties are OADP"),
                ev(5, nondef),
                ev(0, "reducible members of the conic pencil miss a general point"),
                ev(1, birational),
                ev(5, h0)}});
  s.push_back({"edge_3_0", "edge_variety", {3, 0}, true, true,
               {ev(6, "divisor of type (0,2) on P1xP3 has degree 6"),
                ev(1, "degree-2n Edge varieties are OADP"),
                ev(7, nondef),
                ev(3, "P1 ruling plus the two rulings of the quadric surface; d = 9 - k"),
                ev(1, birational),
                ev(9, h0)}});
  s.push_back({"edge_3_1", "edge_variety", {3, 1}, true, true,
               {ev(7, "divisor of type (1,2) on P1xP3 has degree 7"),
                ev(1, "degree-2n+1 Edge varieties are OADP"),
                ev(7, nondef),
                ev(2, "the two rulings of the residual quadric; d = 9 - k"),
                ev(1, birational),
                ev(8, h0)}});
  s.push_back({"degree8_scroll", "degree8_scroll", {}, true, true,
               {ev(8, "residual intersection of two (1,2) divisors on the cone over Seg(1,2)"),
                ev(1, "the degree-8 scroll in lines over P^2 is an OADP threefold"),
                ev(7, nondef),
                ev(1, "a scroll in lines: one ruling line through each point; d = 9 - k"),
                ev(1, birational),
                ev(7, "the ideal of the degree-8 scroll is generated by 7 quadrics")}});
  s.push_back({"skew_lines", "skew_lines", {}, true, false,
               {ev(2, "two lines"),
                ev(1, "one transversal of two skew lines through a general point of P^3"),
                ev(3, "the join of two skew lines fills P^3"),
                none(),
                ev(1, "projection from one line maps the other isomorphically to P^1"),
                ev(4, h0)}});
  s.push_back({"curve_1_1", "curve_on_quadric", {1, 1}, false, true,
               {ev(2, "a (1,1) curve on a quadric is a plane conic"),
                ev(0, "defective varieties have nu = 0 by convention"),
                ev(2, "secants of a plane conic fill only its plane"),
                ev(0, "an irreducible conic contains no lines"),
                ev(0, "projection of a conic from its tangent line is constant"),
                ev(5, h0)}});
  s.push_back({"curve_1_2", "curve_on_quadric", {1, 2}, true, true,
               {ev(3, "a (1,2) curve on a quadric is a twisted cubic"),
                ev(1, "space-curve secant count (d-1)(d-2)/2 - g = 1"),
                ev(3, nondef),
                ev(0, "a twisted cubic contains no lines"),
                ev(1, birational),
                ev(3, h0)}});
  s.push_back({"curve_2_1", "curve_on_quadric", {2, 1}, true, true,
               {ev(3, "a (2,1) curve on a quadric is a twisted cubic"),
                ev(1, "space-curve secant count (d-1)(d-2)/2 - g = 1"),
                ev(3, nondef),
                ev(0, "a twisted cubic contains no lines"),
                ev(1, birational),
                ev(3, h0)}});
  s.push_back({"curve_1_3", "curve_on_quadric", {1, 3}, false, true,
               {ev(4, "a (1,3) curve on a quadric is a rational quartic"),
                ev(3, "space-curve secant count (d-1)(d-2)/2 - g = 3"),
                ev(3, nondef),
                ev(0, "a rational normal-degree space curve contains no lines"),
                ev(2, "projection of a degree-d curve from a general tangent line has degree d-2"),
                ev(1, "the unique quadric through a rational quartic of type (1,3)")}});
  s.push_back({"curve_2_2", "curve_on_quadric", {2, 2}, false, false,
               {ev(4, "complete intersection of two quadrics in P^3"),
                ev(2, "space-curve secant count (d-1)(d-2)/2 - g = 2"),
                none(),  // implicit model: exact Terracini ranks need a parametrization
                none(),
                none(),
                ev(2, "the defining pencil of quadrics")}});
  s.push_back({"curve_0_2", "curve_on_quadric", {0, 2}, true, false,
               {ev(2, "two lines"),
                ev(1, "one transversal of two skew lines through a general point of P^3"),
                ev(3, "the join of two skew lines fills P^3"),
                none(),
                ev(1, "projection from one line maps the other isomorphically to P^1"),
                ev(4, h0)}});
  s.push_back({"flag_threefold", "flag_threefold", {}, false, true,
               {ev(6, "the flag threefold of P^2 has degree 6 in its Segre embedding"),
                none(),  // spans only a hyperplane section of the Segre of P^2 x P^2
                ev(6, "the secant variety of the flag threefold is a cubic hypersurface in P^7"),
                ev(2, "the two incidence-pencil lines through each point of the flag"),
                none(),
                ev(18, h0)}});
  s.push_back({"grassmannian_16", "grassmannian_16", {}, false, false,
               {ev(14, "degree of G(1,5) in the Pluecker embedding (Catalan-type Schubert count)"),
                none(),  // ambient P^14 is not P^{2n+1} for n = 8
                ev(13, "the secant variety of G(1,5) is a cubic hypersurface in P^14"),
                none(),  // a positive-dimensional family of lines through each point
                none(),
                ev(15, "the 15 quadratic Pluecker relations of G(1,5)")}});
  return s;
}

}  // namespace

VarietyModel build_model(const std::string& constructor, const std::vector<long>& args,
                         std::uint64_t seed) {
  SplitRng rng(seed);
  std::vector<int> iargs(args.begin(), args.end());
  if (constructor == "scroll") return scroll(iargs);
  if (constructor == "segre") return segre(iargs);
  if (constructor == "edge_variety") {
    if (args.size() != 2) throw ConfigError("edge_variety takes 2 arguments");
    return edge_variety(iargs[0], iargs[1], rng);
  }
  if (constructor == "skew_lines") return skew_lines();
  if (constructor == "curve_on_quadric") {
    if (args.size() != 2) throw ConfigError("curve_on_quadric takes 2 arguments");
    return curve_on_quadric(iargs[0], iargs[1], rng);
  }
  if (constructor == "veronese") return veronese();
  if (constructor == "del_pezzo_quintic") return del_pezzo_quintic();
  if (constructor == "flag_threefold") return flag_threefold(rng);
  if (constructor == "grassmannian_16") return grassmannian_16();
  if (constructor == "degree8_scroll") return degree8_scroll(rng);
  throw UnknownEntryError("unknown constructor: " + constructor);
}

std::vector<CatalogEntry> default_catalog(std::uint64_t seed) {
  std::vector<CatalogEntry> entries;
  SplitRng rng(seed);
  for (const EntrySpec& spec : entry_specs()) {
    CatalogEntry e;
    e.id = spec.id;
    e.constructor = spec.ctor;
    e.args = spec.args;
    e.seed = rng.derive(spec.id).next_u64();
    e.oadp_candidate = spec.oadp;
    e.run_lines = spec.run_lines;
    e.expected = spec.exp;
    e.model = build_model(spec.ctor, spec.args, e.seed);
    if (e.oadp_candidate && e.model.ambient_dim != 2 * e.model.variety_dim + 1)
      throw ConfigError("entry " + e.id + ": OADP candidates must live in P^{2n+1}");
    entries.push_back(std::move(e));
  }
  return entries;
}

const CatalogEntry* find_entry(const std::vector<CatalogEntry>& entries, const std::string& id) {
  for (const CatalogEntry& e : entries)
    if (e.id == id) return &e;
  return nullptr;
}

int default_quadric_samples(const VarietyModel& model) {
  const int nh = model.ambient_dim + 1;
  return 3 * (nh * (nh + 1) / 2);
}

std::vector<RationalPoly> quadrics_through(const VarietyModel& model, int samples,
                                           std::uint64_t seed) {
  const int nh = model.ambient_dim + 1;
  const auto monos = homogeneous_monomials(nh, 2);
  if (model.kind == ModelKind::ImplicitCurveCI) return model.quadrics;
  if (samples < 3 * static_cast<int>(monos.size()))
    throw InsufficientSamples("quadrics_through needs at least " +
                              std::to_string(3 * monos.size()) + " samples, got " +
                              std::to_string(samples));
  SplitRng rng = SplitRng(seed).derive("quadrics");
  RationalMatrix eval(samples, static_cast<Eigen::Index>(monos.size()));
  int row = 0;
  int attempts = 0;
  std::set<std::vector<std::string>> seen;  // distinct points only (projective string key)
  while (row < samples) {
    if (++attempts > 20 * samples)
      throw DegenerateDataError("quadrics_through: could not sample enough distinct points");
    const PolyMap& f = model.components[attempts % model.components.size()];
    RationalVector u(f.source_dim());
    for (int i = 0; i < f.source_dim(); ++i) u[i] = rng.small_rational(9, 7);
    RationalVector img = f.eval_exact(u);
    bool zero = true;
    for (Eigen::Index i = 0; i < img.size(); ++i)
      if (img[i] != Rational(0)) zero = false;
    if (zero) continue;
    img = normalize_exact(img);
    std::vector<std::string> key;
    key.reserve(static_cast<std::size_t>(img.size()));
    for (Eigen::Index i = 0; i < img.size(); ++i) key.push_back(to_string(img[i]));
    if (!seen.insert(std::move(key)).second) continue;
    for (std::size_t c = 0; c < monos.size(); ++c) {
      Rational v(1);
      for (int i = 0; i < nh; ++i)
        for (int e = 0; e < monos[c][i]; ++e) v *= img[i];
      eval(row, static_cast<Eigen::Index>(c)) = v;
    }
    ++row;
  }
  std::vector<RationalPoly> out;
  for (const RationalVector& k : rational_kernel(eval)) {
    RationalPoly q(nh);
    for (std::size_t c = 0; c < monos.size(); ++c)
      q.add_term(monos[c], k[static_cast<Eigen::Index>(c)]);
    out.push_back(std::move(q));
  }
  return out;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void emit_expect(std::ostringstream& os, const char* name, const ExpectedValue& v) {
  if (!v.value) return;
  os << "  expect " << name << " " << *v.value << " " << quote(v.note) << "\n";
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  bool eof() const { return pos >= text.size(); }
  std::string line() {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string l = text.substr(pos, end - pos);
    pos = end + (end < text.size() ? 1 : 0);
    return l;
  }
};

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    if (line[i] == '"') {
      std::string tok;
      ++i;
      while (i < line.size() && line[i] != '"') {
        if (line[i] == '\\' && i + 1 < line.size()) ++i;
        tok.push_back(line[i++]);
      }
      if (i >= line.size()) throw ConfigError("config: unterminated string");
      ++i;
      tokens.push_back(std::move(tok));
    } else {
      std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      tokens.push_back(line.substr(start, i - start));
    }
  }
  return tokens;
}

// Integer-valued token; accepts "p/q" rational syntax with denominator 1.
long parse_integer_token(const std::string& tok) {
  const Rational r = parse_rational(tok);
  if (denominator(r) != Integer(1))
    throw ConfigError("config: expected an integer value, got " + tok);
  return static_cast<long>(numerator(r));
}

}  // namespace

std::string serialize_catalog(const std::vector<CatalogEntry>& entries) {
  std::ostringstream os;
  os << "# variety catalog: one record per entry; values may be integers or p/q rationals\n";
  for (const CatalogEntry& e : entries) {
    os << "entry " << e.id << "\n";
    os << "  constructor " << e.constructor << "\n";
    if (!e.args.empty()) {
      os << "  args";
      for (long a : e.args) os << " " << a;
      os << "\n";
    }
    os << "  seed " << e.seed << "\n";
    os << "  oadp_candidate " << (e.oadp_candidate ? "true" : "false") << "\n";
    os << "  run_lines " << (e.run_lines ? "true" : "false") << "\n";
    emit_expect(os, "degree", e.expected.degree);
    emit_expect(os, "nu", e.expected.nu);
    emit_expect(os, "secant_dim", e.expected.secant_dim);
    emit_expect(os, "lines", e.expected.lines);
    emit_expect(os, "delta", e.expected.delta);
    emit_expect(os, "quadric_count", e.expected.quadric_count);
    os << "end\n";
  }
  return os.str();
}

std::vector<CatalogEntry> parse_catalog(const std::string& text) {
  std::vector<CatalogEntry> entries;
  Cursor cur{text};
  CatalogEntry e;
  bool open = false;
  while (!cur.eof()) {
    const auto tokens = tokenize(cur.line());
    if (tokens.empty()) continue;
    const std::string& key = tokens[0];
    if (key == "entry") {
      if (open) throw ConfigError("config: nested entry record");
      if (tokens.size() != 2) throw ConfigError("config: entry needs an id");
      e = CatalogEntry{};
      e.id = tokens[1];
      open = true;
    } else if (!open) {
      throw ConfigError("config: field outside an entry record: " + key);
    } else if (key == "constructor") {
      e.constructor = tokens.at(1);
    } else if (key == "args") {
      for (std::size_t i = 1; i < tokens.size(); ++i)
        e.args.push_back(parse_integer_token(tokens[i]));
    } else if (key == "seed") {
      e.seed = std::stoull(tokens.at(1));
    } else if (key == "oadp_candidate") {
      e.oadp_candidate = tokens.at(1) == "true";
    } else if (key == "run_lines") {
      e.run_lines = tokens.at(1) == "true";
    } else if (key == "expect") {
      if (tokens.size() < 3) throw ConfigError("config: expect needs name and value");
      ExpectedValue v{parse_integer_token(tokens[2]), tokens.size() > 3 ? tokens[3] : ""};
      const std::string& name = tokens[1];
      if (name == "degree") e.expected.degree = v;
      else if (name == "nu") e.expected.nu = v;
      else if (name == "secant_dim") e.expected.secant_dim = v;
      else if (name == "lines") e.expected.lines = v;
      else if (name == "delta") e.expected.delta = v;
      else if (name == "quadric_count") e.expected.quadric_count = v;
      else throw ConfigError("config: unknown expected invariant: " + name);
    } else if (key == "end") {
      if (e.constructor.empty()) throw ConfigError("config: entry without constructor");
      e.model = build_model(e.constructor, e.args, e.seed);
      entries.push_back(std::move(e));
      e = CatalogEntry{};
      open = false;
    } else {
      throw ConfigError("config: unknown field: " + key);
    }
  }
  if (open) throw ConfigError("config: unterminated entry record");
  return entries;
}

}  // namespace oadp

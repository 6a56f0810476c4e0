#include "kgt/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kgt/errors.hpp"

namespace kgt {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("not a number: '" + std::string(s) + "'");
  return v;
}

namespace {

void write_map(std::ostringstream& os, const char* name, const ExponentMap& m) {
  os << name << ":{";
  bool first = true;
  for (const auto& [n, e] : m) {
    if (!first) os << ',';
    os << n << ':' << e;
    first = false;
  }
  os << '}';
}

int parse_int(std::string_view s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ParseError("not an integer: '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Parses "name:{n:e,...}" starting at pos; advances pos past the closing brace.
ExponentMap read_map(std::string_view line, std::size_t& pos, std::string_view name) {
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (line.substr(pos, name.size()) != name || pos + name.size() + 1 >= line.size() ||
      line[pos + name.size()] != ':' || line[pos + name.size() + 1] != '{')
    throw ParseError("expected '" + std::string(name) + ":{'");
  pos += name.size() + 2;
  std::size_t close = line.find('}', pos);
  if (close == std::string_view::npos) throw ParseError("unterminated exponent map");
  std::string_view body = line.substr(pos, close - pos);
  pos = close + 1;
  ExponentMap m;
  int last = 0;
  bool first = true;
  while (!body.empty()) {
    std::size_t comma = body.find(',');
    std::string_view item = body.substr(0, comma);
    std::size_t colon = item.find(':');
    if (colon == std::string_view::npos) throw ParseError("expected n:e in exponent map");
    int n = parse_int(trim(item.substr(0, colon)));
    int e = parse_int(trim(item.substr(colon + 1)));
    if (e <= 0) throw ParseError("exponents must be positive");
    if (!first && n <= last) throw ParseError("exponent map indices must ascend");
    m.set(n, e);
    last = n;
    first = false;
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return m;
}

}  // namespace

std::string serialize(const Hamiltonian& h) {
  const auto& m = h.meta();
  std::ostringstream os;
  os << "# kgt-hamiltonian sigma=" << format_double(m.sigma) << " r=" << format_double(m.r)
     << " c=" << format_double(m.c) << " nmax=" << m.n_max << " dmax=" << m.d_max
     << " form=" << to_string(h.form()) << '\n';
  for (std::size_t i = 0; i < h.size(); ++i) {
    Monomial mono = h.monomial(i);
    os << format_double(mono.coeff.real()) << ' ' << format_double(mono.coeff.imag()) << " | ";
    write_map(os, "a", mono.a);
    os << ' ';
    write_map(os, "b", mono.b);
    os << ' ';
    write_map(os, "k", mono.k);
    os << ' ';
    write_map(os, "k'", mono.kprime);
    os << '\n';
  }
  return os.str();
}

Hamiltonian parse_hamiltonian(std::string_view text) {
  HamiltonianMeta meta;
  Form form = Form::kReduced;
  bool have_header = false;
  std::vector<Monomial> monos;
  std::size_t line_no = 0;
  while (!text.empty()) {
    std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (line.empty()) continue;
    try {
      if (line.front() == '#') {
        if (line.find("kgt-hamiltonian") == std::string_view::npos) continue;
        std::istringstream is{std::string(line.substr(1))};
        std::string tok;
        while (is >> tok) {
          auto eq = tok.find('=');
          if (eq == std::string::npos) continue;
          std::string key = tok.substr(0, eq);
          std::string_view val = std::string_view(tok).substr(eq + 1);
          if (key == "sigma") meta.sigma = parse_double(val);
          else if (key == "r") meta.r = parse_double(val);
          else if (key == "c") meta.c = parse_double(val);
          else if (key == "nmax") meta.n_max = parse_int(val);
          else if (key == "dmax") meta.d_max = parse_int(val);
          else if (key == "form") {
            if (val == "reduced") form = Form::kReduced;
            else if (val == "expanded") form = Form::kExpanded;
            else throw ParseError("unknown form '" + std::string(val) + "'");
          }
        }
        have_header = true;
        continue;
      }
      std::size_t bar = line.find('|');
      if (bar == std::string_view::npos) throw ParseError("missing '|' separator");
      std::string_view nums = trim(line.substr(0, bar));
      std::size_t sp = nums.find(' ');
      if (sp == std::string_view::npos) throw ParseError("expected 're im'");
      Monomial m;
      m.coeff = cplx(parse_double(trim(nums.substr(0, sp))), parse_double(trim(nums.substr(sp + 1))));
      std::string_view rest = line.substr(bar + 1);
      std::size_t pos = 0;
      m.a = read_map(rest, pos, "a");
      m.b = read_map(rest, pos, "b");
      m.k = read_map(rest, pos, "k");
      m.kprime = read_map(rest, pos, "k'");
      if (!trim(rest.substr(pos)).empty()) throw ParseError("trailing characters");
      monos.push_back(std::move(m));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ParseError("missing '# kgt-hamiltonian' header");
  return Hamiltonian::from_monomials(meta, monos, form);
}

void write_hamiltonian(const std::string& path, const Hamiltonian& h) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << serialize(h);
  if (!out) throw Error("write failed: " + path);
}

Hamiltonian read_hamiltonian(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_hamiltonian(ss.str());
}

}  // namespace kgt

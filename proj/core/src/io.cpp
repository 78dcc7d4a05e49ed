#include "ggmrecon/io.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <memory>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <string_view>

namespace ggmrecon::io {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

std::vector<Token> split_words(std::string_view line) {
  auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && blank(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !blank(line[i])) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

std::vector<Token> split_fields(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<Token> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    std::string_view field = line.substr(start, comma == std::string_view::npos ? line.size() - start
                                                                                : comma - start);
    out.push_back({field, start + 1});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool skippable(std::string_view line) {
  for (char c : line) {
    if (c == '#') return true;
    if (c != ' ' && c != '\t' && c != '\r') return false;
  }
  return true;
}

template <typename T>
T parse_integer(const Token& tok, const std::string& source, std::size_t line,
                const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
  if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
    throw ParseError(source, line, tok.column,
                     std::string("expected ") + what + ", got '" + std::string(tok.text) + "'");
  }
  return value;
}

double parse_real(const Token& tok, const std::string& source, std::size_t line) {
  std::string text(tok.text);
  if (text.empty()) throw ParseError(source, line, tok.column, "empty numeric field");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(text.c_str(), &end);
  bool overflow = errno == ERANGE && std::abs(v) > 1.0;
  if (end != text.c_str() + text.size() || overflow || !std::isfinite(v)) {
    throw ParseError(source, line, tok.column, "expected a finite real, got '" + text + "'");
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "' for reading");
  return in;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, std::size_t column,
                       const std::string& message)
    : InputError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                 message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------

Graph parse_graph(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> n;
  std::vector<Edge> edges;
  std::vector<std::size_t> edge_line;

  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    auto tokens = split_words(line);
    const auto& head = tokens[0];
    if (!n) {
      if (head.text != "n" || tokens.size() != 2) {
        throw ParseError(source, lineno, head.column, "expected 'n <count>' header");
      }
      n = parse_integer<std::size_t>(tokens[1], source, lineno, "a vertex count");
      continue;
    }
    if (head.text != "e") {
      throw ParseError(source, lineno, head.column,
                       "unknown record '" + std::string(head.text) + "', expected 'e'");
    }
    if (tokens.size() != 3) {
      throw ParseError(source, lineno, head.column, "expected 'e <i> <j>'");
    }
    auto u = parse_integer<Vertex>(tokens[1], source, lineno, "a vertex index");
    auto v = parse_integer<Vertex>(tokens[2], source, lineno, "a vertex index");
    if (u >= *n || v >= *n) {
      const auto& bad = u >= *n ? tokens[1] : tokens[2];
      throw ParseError(source, lineno, bad.column,
                       "vertex index " + std::string(bad.text) + " is not below n = " +
                           std::to_string(*n));
    }
    if (u == v) {
      throw ParseError(source, lineno, tokens[1].column,
                       "self-loop on vertex " + std::to_string(u));
    }
    edges.push_back({std::min(u, v), std::max(u, v)});
    edge_line.push_back(lineno);
  }
  if (!n) throw ParseError(source, lineno + 1, 1, "missing 'n <count>' header");

  std::vector<std::size_t> order(edges.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return edges[a] < edges[b]; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (edges[order[k]] == edges[order[k - 1]]) {
      const auto& e = edges[order[k]];
      throw ParseError(source, edge_line[order[k]], 1,
                       "duplicate edge (" + std::to_string(e.u) + ", " + std::to_string(e.v) +
                           "), first given on line " + std::to_string(edge_line[order[k - 1]]));
    }
  }
  return Graph::from_edges(*n, std::move(edges));
}

Graph read_graph_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_graph(in, path.string());
}

void write_graph(std::ostream& out, const Graph& g) {
  out << "n " << g.size() << '\n';
  for (const auto& e : g.edges()) out << "e " << e.u << ' ' << e.v << '\n';
}

// ---------------------------------------------------------------------------

RoadNetworkDescription parse_road_network(std::istream& in, const std::string& source) {
  RoadNetworkDescription desc;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    auto tokens = split_words(line);
    const auto& head = tokens[0];
    if (head.text == "road") {
      if (tokens.size() != 2) throw ParseError(source, lineno, head.column, "expected 'road <name>'");
      if (!desc.intersections.empty()) {
        throw ParseError(source, lineno, head.column, "'road' lines must precede intersections");
      }
      desc.roads.emplace_back(tokens[1].text);
    } else if (head.text == "x") {
      std::vector<std::string> members;
      for (std::size_t k = 1; k < tokens.size(); ++k) members.emplace_back(tokens[k].text);
      if (members.size() < 2) {
        throw ParseError(source, lineno, head.column, "an intersection joins at least two roads");
      }
      desc.intersections.push_back(std::move(members));
    } else {
      throw ParseError(source, lineno, head.column,
                       "unknown record '" + std::string(head.text) + "', expected 'road' or 'x'");
    }
  }
  return desc;
}

RoadNetworkDescription read_road_network_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_road_network(in, path.string());
}

// ---------------------------------------------------------------------------

GgmParams parse_params(std::istream& in, const std::string& source) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ": " + e.what());
  }
  try {
    GgmParams p;
    p.xi = doc.at("xi").get<double>();
    p.j = doc.at("j").get<double>();
    auto h = doc.at("h").get<std::vector<double>>();
    p.h = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(source + ": " + e.what());
  }
}

GgmParams read_params_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_params(in, path.string());
}

void write_params(std::ostream& out, const GgmParams& p) {
  // Written by hand so the numbers use the same 17-digit form as the CSVs.
  out << "{\n  \"xi\": " << format_double(p.xi) << ",\n  \"j\": " << format_double(p.j)
      << ",\n  \"h\": [";
  for (Eigen::Index i = 0; i < p.h.size(); ++i) {
    out << (i == 0 ? "" : ", ") << format_double(p.h[i]);
  }
  out << "]\n}\n";
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    cols = split_fields(line).size();
    break;
  }
  if (cols == 0) throw ParseError(source, lineno + 1, 1, "missing CSV header");

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != cols) {
      throw ParseError(source, lineno, 1,
                       "expected " + std::to_string(cols) + " fields, found " +
                           std::to_string(fields.size()));
    }
    for (const auto& f : fields) values.push_back(parse_real(f, source, lineno));
    ++rows;
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * cols + c];
    }
  }
  return m;
}

Eigen::MatrixXd read_matrix_csv_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_matrix_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c == 0 ? "" : ",") << 'x' << c;
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c == 0 ? "" : ",") << format_double(m(r, c));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

std::vector<Vertex> parse_index_list(std::istream& in, const std::string& source) {
  std::vector<Vertex> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    auto tokens = split_words(line);
    if (tokens.size() != 1) {
      throw ParseError(source, lineno, tokens[1].column, "expected one index per line");
    }
    out.push_back(parse_integer<Vertex>(tokens[0], source, lineno, "a vertex index"));
  }
  return out;
}

std::vector<Vertex> read_index_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_index_list(in, path.string());
}

// ---------------------------------------------------------------------------

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "' for hashing");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialization failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);

  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return hex.str();
}

std::string RunManifest::to_json() const {
  nlohmann::json doc;
  doc["subcommand"] = subcommand;
  doc["flags"] = flags;
  doc["input_digests"] = input_digests;
  doc["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  doc["version"] = version;
  return doc.dump(2);
}

void write_manifest(const std::filesystem::path& output, const RunManifest& manifest) {
  auto path = output;
  path += ".manifest.json";
  auto out = open_output(path);
  out << manifest.to_json() << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace ggmrecon::io

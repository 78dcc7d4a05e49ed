#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ggmrecon/error.hpp"
#include "ggmrecon/ggm.hpp"
#include "ggmrecon/graph.hpp"

namespace ggmrecon::io {

/// Parse failure with a 1-based source location.
class ParseError : public InputError {
 public:
  ParseError(const std::string& source, std::size_t line, std::size_t column,
             const std::string& message);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Graph text format:
///
///   n <count>
///   e <i> <j>        (one line per edge, 0-indexed)
///
/// Blank lines and lines starting with '#' are ignored.
Graph parse_graph(std::istream& in, const std::string& source = "<graph>");
Graph read_graph_file(const std::filesystem::path& path);
/// Canonical form: edges sorted, one per line.
void write_graph(std::ostream& out, const Graph& g);

/// Road network text format: `road <name>` lines, then one
/// `x <name> <name> ...` line per intersection.
RoadNetworkDescription parse_road_network(std::istream& in, const std::string& source = "<roads>");
RoadNetworkDescription read_road_network_file(const std::filesystem::path& path);

/// Parameters as JSON: {"xi": <real>, "j": <real>, "h": [<real>, ...]}.
GgmParams parse_params(std::istream& in, const std::string& source = "<params>");
GgmParams read_params_file(const std::filesystem::path& path);
void write_params(std::ostream& out, const GgmParams& p);

/// 17 significant digits (%.17g), enough to round-trip any double.
std::string format_double(double v);

/// CSV sample matrix with header `x0,...,x{n-1}`; one row per sample.
Eigen::MatrixXd parse_matrix_csv(std::istream& in, const std::string& source = "<csv>");
Eigen::MatrixXd read_matrix_csv_file(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

/// Missing-index file: one vertex index per line.
std::vector<Vertex> parse_index_list(std::istream& in, const std::string& source = "<mask>");
std::vector<Vertex> read_index_file(const std::filesystem::path& path);

/// Hex SHA-256 of a file's bytes.
std::string file_digest(const std::filesystem::path& path);

/// Provenance record written next to every output file.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> input_digests;  // path -> sha256
  std::optional<std::uint64_t> seed;
  std::string version;

  std::string to_json() const;
};

/// Writes `<output>.manifest.json`.
void write_manifest(const std::filesystem::path& output, const RunManifest& manifest);

/// Opens for writing, throwing InputError on failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace ggmrecon::io

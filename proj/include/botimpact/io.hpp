#pragma once

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "botimpact/graph.hpp"

namespace botimpact {

// Reads text lines from a plain or gzip-compressed file (zlib detects the
// format). Trailing '\n' / '\r\n' are stripped.
class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at end of file.
  bool next(std::string& line);
  std::size_t line_number() const { return line_number_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  void* handle_ = nullptr;
  std::size_t line_number_ = 0;
  std::vector<char> buffer_;
};

// Buffers output and publishes it with a temp-file rename on commit().
// Destruction without commit() discards the temp file.
class AtomicFileWriter {
 public:
  explicit AtomicFileWriter(std::filesystem::path path);
  ~AtomicFileWriter();
  AtomicFileWriter(const AtomicFileWriter&) = delete;
  AtomicFileWriter& operator=(const AtomicFileWriter&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::ostringstream out_;
  bool committed_ = false;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(const std::filesystem::path& path);

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char delim);

// Shortest decimal form that round-trips a double; used for every numeric
// output so reruns are byte-identical.
std::string format_double(double value);

struct EdgeListReport {
  std::size_t edges = 0;
  std::size_t skipped = 0;
  std::vector<std::string> diagnostics;
};

// `source<TAB>target[<TAB>weight]` per line, weight defaulting to 1.
// Self-loops and malformed lines are skipped and reported with line numbers.
DirectedWeightedGraph read_edge_list(const std::filesystem::path& path,
                                     EdgeListReport* report = nullptr,
                                     const std::vector<std::string>& extra_nodes = {});
// Writes isolated nodes as `#node<TAB>id` lines so the node set survives a
// round trip.
void write_edge_list(const DirectedWeightedGraph& graph, const std::filesystem::path& path);

}  // namespace botimpact

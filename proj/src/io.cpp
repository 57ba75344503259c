#include "botimpact/io.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>

#include <fmt/format.h>
#include <openssl/evp.h>
#include <zlib.h>

#include "botimpact/error.hpp"

namespace botimpact {

namespace fs = std::filesystem;

LineReader::LineReader(const fs::path& path) : path_(path), buffer_(1 << 16) {
  if (!fs::exists(path)) throw InputError(fmt::format("missing input file: {}", path.string()));
  handle_ = gzopen(path.c_str(), "rb");
  if (handle_ == nullptr) throw InputError(fmt::format("cannot open {}", path.string()));
  gzbuffer(static_cast<gzFile>(handle_), 1 << 17);
}

LineReader::~LineReader() {
  if (handle_ != nullptr) gzclose(static_cast<gzFile>(handle_));
}

bool LineReader::next(std::string& line) {
  line.clear();
  auto* file = static_cast<gzFile>(handle_);
  bool got_any = false;
  while (gzgets(file, buffer_.data(), static_cast<int>(buffer_.size())) != nullptr) {
    got_any = true;
    std::size_t len = std::strlen(buffer_.data());
    line.append(buffer_.data(), len);
    if (len > 0 && buffer_[len - 1] == '\n') break;
  }
  if (!got_any) {
    int err = 0;
    const char* msg = gzerror(file, &err);
    if (err != Z_OK && err != Z_STREAM_END) {
      throw InputError(fmt::format("{}: read error: {}", path_.string(), msg));
    }
    return false;
  }
  ++line_number_;
  while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
  return true;
}

AtomicFileWriter::AtomicFileWriter(fs::path path) : path_(std::move(path)) {}

AtomicFileWriter::~AtomicFileWriter() = default;

void AtomicFileWriter::commit() {
  if (committed_) return;
  write_file_atomic(path_, out_.view());
  committed_ = true;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InputError(fmt::format("write failed for {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string format_double(double value) { return fmt::format("{}", value); }

DirectedWeightedGraph read_edge_list(const fs::path& path, EdgeListReport* report,
                                     const std::vector<std::string>& extra_nodes) {
  EdgeListReport local;
  EdgeListReport& rep = report != nullptr ? *report : local;
  DirectedWeightedGraph::Builder builder;
  for (const auto& n : extra_nodes) builder.add_node(n);

  LineReader reader(path);
  std::string line;
  auto skip = [&](std::string_view why) {
    ++rep.skipped;
    rep.diagnostics.push_back(
        fmt::format("{}:{}: {}", path.string(), reader.line_number(), why));
  };
  while (reader.next(line)) {
    if (line.empty()) continue;
    if (line.starts_with("#node\t")) {
      builder.add_node(std::string_view(line).substr(6));
      continue;
    }
    if (line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() < 2 || fields.size() > 3 || fields[0].empty() || fields[1].empty()) {
      skip("expected source<TAB>target[<TAB>weight]");
      continue;
    }
    double weight = 1.0;
    if (fields.size() == 3) {
      auto f = fields[2];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), weight);
      if (ec != std::errc() || ptr != f.data() + f.size() || !(weight > 0.0) ||
          !std::isfinite(weight)) {
        skip("weight must be a positive number");
        continue;
      }
    }
    if (fields[0] == fields[1]) {
      skip("self-loop");
      continue;
    }
    builder.add_interaction(fields[0], fields[1], weight);
    ++rep.edges;
  }
  return std::move(builder).build();
}

void write_edge_list(const DirectedWeightedGraph& graph, const fs::path& path) {
  AtomicFileWriter file(path);
  auto& out = file.stream();
  for (NodeId u = 0; u < graph.node_count(); ++u) {
    if (graph.followers_of(u).empty() && graph.following_of(u).empty()) {
      out << "#node\t" << graph.name(u) << '\n';
    }
  }
  for (const Edge& e : graph.edges()) {
    out << graph.name(e.source) << '\t' << graph.name(e.target) << '\t'
        << format_double(e.weight) << '\n';
  }
  file.commit();
}

}  // namespace botimpact

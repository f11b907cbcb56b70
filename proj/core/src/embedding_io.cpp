#include "netmf/embedding_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "netmf/errors.hpp"

namespace netmf {

namespace {

void append_number(std::string& line, const char* format, double value) {
  char buf[64];
  const int len = std::snprintf(buf, sizeof buf, format, value == 0.0 ? 0.0 : value);
  line.append(buf, static_cast<std::size_t>(len));
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& value) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

void write_embedding(std::ostream& out, const DenseMatrix& vectors, const Vocabulary& vocabulary,
                     const EmbeddingWriteOptions& options) {
  if (vocabulary.size() != vectors.rows())
    throw ValidationError("embedding has " + std::to_string(vectors.rows()) + " rows but " +
                          std::to_string(vocabulary.size()) + " tokens");
  if (!vectors.allFinite()) throw ValidationError("embedding has non-finite entries");
  const char* format = options.full_precision ? " %.17g" : " %.6f";
  out << vectors.rows() << ' ' << vectors.cols() << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    line = vocabulary.token(static_cast<Index>(i));
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) append_number(line, format, vectors(i, j));
    line += '\n';
    out << line;
  }
  for (const auto& c : options.comments) out << "# " << c << '\n';
}

EmbeddingFile read_embedding(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  long rows = -1;
  long cols = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 2 || !parse_number(fields[0], rows) || !parse_number(fields[1], cols) ||
        rows < 0 || cols < 1)
      throw FormatError("expected header \"n d\"", lineno);
    break;
  }
  if (rows < 0) throw FormatError("missing header \"n d\"", lineno);

  EmbeddingFile file;
  file.vectors.resize(rows, cols);
  long row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split_ws(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (row >= rows) throw FormatError("more rows than the header declares", lineno);
    if (static_cast<long>(fields.size()) != cols + 1)
      throw FormatError("expected a token and " + std::to_string(cols) + " values", lineno);
    const std::string token(fields[0]);
    if (file.vocabulary.find(token)) throw FormatError("duplicate token '" + token + "'", lineno);
    file.vocabulary.intern(token);
    for (long j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_number(fields[static_cast<std::size_t>(j + 1)], v) || !std::isfinite(v))
        throw FormatError("bad value '" + std::string(fields[static_cast<std::size_t>(j + 1)]) +
                              "'",
                          lineno);
      file.vectors(row, j) = v;
    }
    ++row;
  }
  if (row != rows)
    throw FormatError("header declares " + std::to_string(rows) + " rows, found " +
                          std::to_string(row),
                      lineno);
  return file;
}

EmbeddingFile read_embedding_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open embedding file '" + path + "'");
  try {
    return read_embedding(in);
  } catch (const FormatError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void write_matrix_tsv(std::ostream& out, const ClosedFormMatrix& matrix,
                      const std::vector<std::string>& extra_comments) {
  out << "# " << matrix.provenance.describe() << '\n';
  out << "# kind=" << to_string(matrix.kind) << '\n';
  for (const auto& c : extra_comments) out << "# " << c << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < matrix.values.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < matrix.values.cols(); ++j) {
      if (j > 0) line += '\t';
      append_number(line, "%.12g", matrix.values(i, j));
    }
    line += '\n';
    out << line;
  }
}

void write_file_atomically(const std::string& path,
                           const std::function<void(std::ostream&)>& writer) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create '" + tmp.string() + "'");
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename onto '" + path + "': " + ec.message());
  }
}

}  // namespace netmf

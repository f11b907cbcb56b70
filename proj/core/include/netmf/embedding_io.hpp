#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "netmf/closed_form.hpp"
#include "netmf/graph.hpp"

namespace netmf {

// Embedding text format: a first line "n d", then one line per vertex
// "token v1 ... vd". Lines starting with '#' are comments and may appear
// anywhere after the first line.
struct EmbeddingWriteOptions {
  bool full_precision = false;  // %.17g instead of %.6f
  std::vector<std::string> comments;  // written after the rows, '#' added
};

void write_embedding(std::ostream& out, const DenseMatrix& vectors, const Vocabulary& vocabulary,
                     const EmbeddingWriteOptions& options = {});

struct EmbeddingFile {
  Vocabulary vocabulary;
  DenseMatrix vectors;
};

// Throws FormatError on a malformed header, row width mismatch, duplicate
// token, unparsable value or row-count mismatch.
EmbeddingFile read_embedding(std::istream& in);
EmbeddingFile read_embedding_file(const std::string& path);

// "# <describe()>" header, then one row per line, tab-separated, %.12g.
void write_matrix_tsv(std::ostream& out, const ClosedFormMatrix& matrix,
                      const std::vector<std::string>& extra_comments = {});

// Writes through a sibling temporary file and renames it over `path`.
// Throws IoError when the file cannot be created, written or renamed.
void write_file_atomically(const std::string& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace netmf

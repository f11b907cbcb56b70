#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "netmf/embedding_io.hpp"
#include "netmf/errors.hpp"
#include "netmf/factorize.hpp"
#include "oracles.hpp"

namespace netmf {
namespace {

namespace fs = std::filesystem;

EmbeddingFile parse(const std::string& text) {
  std::istringstream in(text);
  return read_embedding(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const FormatError& e) {
    return e.line();
  }
  return 0;
}

TEST(EmbeddingText, SixDecimalLayout) {
  DenseMatrix v(2, 2);
  v << 1.0, -0.0, 0.1234567, -2.5;
  std::ostringstream out;
  write_embedding(out, v, Vocabulary({"a", "b"}), {false, {"seed=1"}});
  EXPECT_EQ(out.str(), "2 2\na 1.000000 0.000000\nb 0.123457 -2.500000\n# seed=1\n");
}

TEST(EmbeddingText, FullPrecisionRoundTripIsExact) {
  const Graph g = testing::karate();
  const Embedding e = netmf_exact(g, 10, 1.0, 8);
  const Vocabulary& vocab = g.vocabulary();
  std::ostringstream out;
  write_embedding(out, e.vectors, vocab, {true, {"netmf test", "more"}});
  const EmbeddingFile back = parse(out.str());
  EXPECT_EQ(back.vocabulary, vocab);
  EXPECT_EQ((back.vectors - e.vectors).cwiseAbs().maxCoeff(), 0.0);
}

TEST(EmbeddingText, DefaultPrecisionRoundTripWithinHalfUlpOfSixDigits) {
  const Embedding e = netmf_exact(testing::karate(), 10, 1.0, 8);
  std::ostringstream out;
  write_embedding(out, e.vectors, testing::karate().vocabulary());
  const EmbeddingFile back = parse(out.str());
  EXPECT_LE((back.vectors - e.vectors).cwiseAbs().maxCoeff(), 5e-7 + 1e-15);
}

TEST(EmbeddingText, CommentsAndBlankLinesAreSkipped) {
  const EmbeddingFile f = parse("# leading\n2 1\nx 1\n\n# mid\ny 2\n# tail\n");
  EXPECT_EQ(f.vocabulary.tokens(), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(f.vectors(1, 0), 2.0);
}

TEST(EmbeddingText, MalformedInputsNameTheLine) {
  EXPECT_EQ(error_line("2\n"), 1u);
  EXPECT_EQ(error_line("2 x\n"), 1u);
  EXPECT_EQ(error_line("1 0\n"), 1u);
  EXPECT_EQ(error_line("2 2\na 1 2\nb 1\n"), 3u);
  EXPECT_EQ(error_line("2 1\na 1\na 2\n"), 3u);
  EXPECT_EQ(error_line("1 1\na nan\n"), 2u);
  EXPECT_EQ(error_line("1 1\na 1e\n"), 2u);
  EXPECT_EQ(error_line("1 1\na 1\nb 2\n"), 3u);
  EXPECT_EQ(error_line("3 1\na 1\nb 2\n"), 3u);
  EXPECT_THROW(parse(""), FormatError);
}

TEST(EmbeddingText, WriterValidates) {
  std::ostringstream out;
  EXPECT_THROW(write_embedding(out, DenseMatrix::Zero(2, 2), Vocabulary({"a"})), ValidationError);
  DenseMatrix bad = DenseMatrix::Zero(1, 1);
  bad(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(write_embedding(out, bad, Vocabulary({"a"})), ValidationError);
}

TEST(EmbeddingFileIo, MissingAndMalformedFiles) {
  EXPECT_THROW(read_embedding_file("/nonexistent/e.txt"), IoError);
  const fs::path p = fs::temp_directory_path() / "netmf_bad_embedding.txt";
  std::ofstream(p) << "1 2\na 1\n";
  try {
    read_embedding_file(p.string());
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(p.string()), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  fs::remove(p);
}

TEST(AtomicWrite, ReplacesTargetAndLeavesNoTemporary) {
  const fs::path p = fs::temp_directory_path() / "netmf_atomic.txt";
  std::ofstream(p) << "old";
  write_file_atomically(p.string(), [](std::ostream& out) { out << "new"; });
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "new");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove(p);
}

TEST(AtomicWrite, WriterFailureKeepsOldContent) {
  const fs::path p = fs::temp_directory_path() / "netmf_atomic_fail.txt";
  std::ofstream(p) << "old";
  EXPECT_THROW(write_file_atomically(p.string(),
                                     [](std::ostream&) { throw ValidationError("boom"); }),
               ValidationError);
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "old");
  EXPECT_FALSE(fs::exists(p.string() + ".tmp"));
  fs::remove(p);
}

TEST(AtomicWrite, UnwritableDirectory) {
  EXPECT_THROW(write_file_atomically("/nonexistent/dir/out.txt", [](std::ostream&) {}), IoError);
}

TEST(MatrixTsv, HeaderAndValues) {
  std::ostringstream out;
  write_matrix_tsv(out, line_matrix(testing::k3(), 1.0), {"extra"});
  EXPECT_EQ(out.str(),
            "# model=line T=1 b=1 n=3\n# kind=similarity\n# extra\n"
            "0\t1.5\t1.5\n1.5\t0\t1.5\n1.5\t1.5\t0\n");
}

}  // namespace
}  // namespace netmf
